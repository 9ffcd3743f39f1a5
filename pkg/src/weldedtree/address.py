"""Addresses, the address tree, its bit-string encoding and the resolution maps.

An address is either a special name or a palindrome-free color tuple naming a walk
from ENTRANCE. The address tree is the proper 3-colored tree on these names of
depth ``p_max``; ``lambda_`` is its color-c neighbor map. ``AddressCodec`` packs
addresses into ``2 * p_max``-bit register strings, and ``l_prime``/``l_map``
resolve addresses to real vertex labels by querying the oracle.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Sequence, Union

from weldedtree.interfaces import Color, WeldedTreeError
from weldedtree.oracle import Oracle

logger = logging.getLogger(__name__)


class SpecialAddress(Enum):
    ZERO = "zeroaddress"
    EMPTY = "emptyaddress"
    NOEDGE = "noedgeaddress"
    INVALID = "invalidaddress"


Address = Union[SpecialAddress, tuple[Color, ...]]

ZERO = SpecialAddress.ZERO
EMPTY = SpecialAddress.EMPTY
NOEDGE = SpecialAddress.NOEDGE
INVALID = SpecialAddress.INVALID


class AddressDepthError(WeldedTreeError):
    """Raised when lambda would step below depth p_max of the address tree."""


def is_palindrome_free(colors: Sequence[Color]) -> bool:
    """True when no two consecutive colors are equal."""
    return all(a is not b for a, b in zip(colors, colors[1:]))


def format_address(t: Address) -> str:
    if isinstance(t, SpecialAddress):
        return t.value
    return "(" + ",".join(c.short for c in t) + ")"


def parent(t: Address) -> Optional[Address]:
    """Tree parent: drop the last color; NOEDGE hangs off EMPTY; roots and junk have none."""
    if isinstance(t, tuple):
        return t[:-1] if len(t) > 1 else EMPTY
    if t is NOEDGE:
        return EMPTY
    return None


def lambda_(t: Address, color: Color, c_star: Color, p_max: int) -> Address:
    """
    Color-c neighbor of t in the address tree.

    Args:
        t: Address tree vertex
        color: Edge color to follow
        c_star: Color missing at ENTRANCE
        p_max: Depth of the tree

    Returns:
        Neighbor address; INVALID for ZERO, NOEDGE and INVALID

    Raises:
        AddressDepthError: If the step would leave the depth-p_max tree
    """
    if t is EMPTY:
        return NOEDGE if color is c_star else (color,)
    if isinstance(t, SpecialAddress):
        return INVALID
    if t[-1] is color:
        return t[:-1] if len(t) > 1 else EMPTY
    if len(t) >= p_max:
        raise AddressDepthError(f"{format_address(t)} + {color.value} exceeds depth {p_max}")
    return t + (color,)


def address_tree_labels(p_max: int, c_star: Color) -> Iterator[Address]:
    """Every address tree vertex label, in breadth-first order from EMPTY."""
    yield EMPTY
    yield NOEDGE
    queue: deque[tuple[Color, ...]] = deque((c,) for c in Color.ordered() if c is not c_star)
    while queue:
        t = queue.popleft()
        yield t
        if len(t) < p_max:
            queue.extend(t + (c,) for c in Color.ordered() if c is not t[-1])


@dataclass(frozen=True)
class AddressCodec:
    """
    Injective packing of address tree labels into ``2 * p_max``-bit strings.

    Colors occupy 2-bit slots (red 01, green 10, blue 11) filled from the most
    significant slot; the top slot of a tuple is never 00, which leaves the values
    0..3 for ZERO, EMPTY, NOEDGE and INVALID.

    Args:
        p_max: Tree depth, at least 2
        c_star: Color missing at ENTRANCE
    """

    p_max: int
    c_star: Color

    def __post_init__(self) -> None:
        if self.p_max < 2:
            raise ValueError("p_max must be at least 2")

    @property
    def width(self) -> int:
        return 2 * self.p_max

    @property
    def zero(self) -> int:
        return 0

    @property
    def empty(self) -> int:
        return 1

    @property
    def noedge(self) -> int:
        return 2

    @property
    def invalid(self) -> int:
        return 3

    def encode(self, t: Address) -> int:
        if isinstance(t, SpecialAddress):
            return _SPECIAL_CODES[t]
        if not t:
            raise ValueError("empty tuple is not an address; use EMPTY")
        if len(t) > self.p_max:
            raise AddressDepthError(f"{format_address(t)} is deeper than {self.p_max}")
        if not is_palindrome_free(t) or t[0] is self.c_star:
            raise ValueError(f"{format_address(t)} is not an address tree label")
        value = 0
        for i, c in enumerate(t):
            value |= c.code << (2 * (self.p_max - 1 - i))
        return value

    def decode(self, s: int) -> Address:
        """Inverse of ``encode``; INVALID for strings outside its range."""
        if not 0 <= s < (1 << self.width):
            return INVALID
        shift = 2 * (self.p_max - 1)
        if s >> shift == 0:
            return _CODE_SPECIALS.get(s, INVALID)
        colors: list[Color] = []
        for i in range(self.p_max):
            slot = (s >> (shift - 2 * i)) & 3
            if slot == 0:
                if s & ((1 << (shift - 2 * i)) - 1):
                    return INVALID
                break
            colors.append(Color.from_code(slot))
        if colors[0] is self.c_star or not is_palindrome_free(colors):
            return INVALID
        return tuple(colors)

    def in_range(self, s: int) -> bool:
        return s == self.invalid or self.decode(s) is not INVALID


_SPECIAL_CODES: dict[SpecialAddress, int] = {ZERO: 0, EMPTY: 1, NOEDGE: 2, INVALID: 3}
_CODE_SPECIALS: dict[int, SpecialAddress] = {v: k for k, v in _SPECIAL_CODES.items()}


def l_prime(oracle: Oracle, t: Address, metered: bool = True) -> int:
    """
    Resolve an address to a vertex label by walking from ENTRANCE.

    Args:
        oracle: Oracle to resolve against
        t: Address
        metered: Charge one query per color (False for white-box analysis)

    Returns:
        The label reached; specials map to zero, INVALID, ENTRANCE or NOEDGE for free
    """
    special = oracle.special
    if t is ZERO:
        return special.zero
    if t is INVALID:
        return special.invalid
    if t is EMPTY:
        return special.entrance
    if t is NOEDGE:
        return special.noedge
    step = oracle.query if metered else oracle.lookup
    label = special.entrance
    for c in t:
        label = step(c, label)
    return label


def l_map(
    oracle: Oracle, codec: AddressCodec, regs: Sequence[int], metered: bool = True
) -> tuple[int, ...]:
    """Componentwise ``l_prime`` of decoded register strings."""
    return tuple(l_prime(oracle, codec.decode(s), metered) for s in regs)


def walk_labels(oracle: Oracle, t: Sequence[Color]) -> list[int]:
    """Labels visited by the walk t from ENTRANCE, ENTRANCE included; unmetered."""
    labels = [oracle.entrance]
    for c in t:
        labels.append(oracle.lookup(c, labels[-1]))
    return labels


def check_entrance_cycle(oracle: Oracle, t: tuple[Color, ...]) -> bool:
    """A nonempty walk that returns to ENTRANCE must revisit some vertex."""
    labels = walk_labels(oracle, t)
    if not t or labels[-1] != oracle.entrance:
        return True
    return len(set(labels)) < len(labels)


def check_lambda_commutes(
    oracle: Oracle, t: Address, color: Color, c_star: Color, p_max: int
) -> Optional[bool]:
    """
    Check l_prime(lambda_c(t)) == eta_c(l_prime(t)).

    Returns:
        None when the identity is not claimed for t (the walk meets EXIT, revisits a
        vertex, or lambda would overflow the tree), otherwise whether it holds
    """
    if isinstance(t, tuple):
        labels = walk_labels(oracle, t)
        if oracle.exit in labels or len(set(labels)) < len(labels):
            return None
    elif t is not EMPTY:
        return None
    try:
        moved = lambda_(t, color, c_star, p_max)
    except AddressDepthError:
        return None
    expected = oracle.lookup(color, l_prime(oracle, t, metered=False))
    return l_prime(oracle, moved, metered=False) == expected
