"""Shared types and abstract interfaces.

The register-space interface is the contract both the vertex space (labels of the
welded tree) and the address space (B-encoded address-tree labels) implement, so the
simulator engine and the decomposition code run unchanged on either.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from enum import Enum
from typing import Sequence


class WeldedTreeError(Exception):
    """Base class for every error raised by this package."""


class Color(Enum):
    """Edge colors, ordered red < green < blue."""

    RED = "red"
    GREEN = "green"
    BLUE = "blue"

    @property
    def index(self) -> int:
        """Position in the fixed color order (0, 1, 2)."""
        return _COLOR_ORDER.index(self)

    @property
    def code(self) -> int:
        """Two-bit slot value used by the address encoding (01, 10, 11)."""
        return self.index + 1

    @property
    def short(self) -> str:
        return self.value[0]

    @classmethod
    def ordered(cls) -> tuple[Color, ...]:
        return _COLOR_ORDER

    @classmethod
    def from_code(cls, code: int) -> Color:
        if not 1 <= code <= 3:
            raise ValueError(f"no color has slot code {code}")
        return _COLOR_ORDER[code - 1]

    @classmethod
    def parse(cls, text: str) -> Color:
        """Accept full names or the one-letter forms r/g/b."""
        key = text.strip().lower()
        for color in _COLOR_ORDER:
            if key in (color.value, color.short):
                return color
        raise ValueError(f"unknown color {text!r}")

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, Color):
            return NotImplemented
        return self.index < other.index


_COLOR_ORDER: tuple[Color, ...] = (Color.RED, Color.GREEN, Color.BLUE)


def parse_colors(text: str) -> tuple[Color, ...]:
    """Parse ``"b,g,b"`` or ``"bgb"`` into a color tuple."""
    text = text.strip()
    if not text:
        return ()
    parts = text.split(",") if "," in text else list(text)
    return tuple(Color.parse(p) for p in parts)


def format_colors(colors: Sequence[Color]) -> str:
    return ",".join(c.short for c in colors)


class Side(Enum):
    """Which binary tree a vertex belongs to."""

    LEFT = "left"
    RIGHT = "right"


class Space(Enum):
    """Register space a circuit or state lives in."""

    VERTEX = "vertex"
    ADDRESS = "address"


class GenuinenessPolicy(Enum):
    """What an oracle gate does on a controlled config violating v_k in {0, eta_c(v_j)}."""

    RAISE = "raise"
    GADGET = "gadget"


class Verdict(Enum):
    GOOD = "good"
    BAD = "bad"


class RegisterSpace(ABC):
    """Semantics of register contents for one space.

    Register contents are plain ints of ``width`` bits. Gates only ever need the
    three distinguished strings, the color-c neighbor map and the rootedness test.
    """

    space: Space

    @property
    @abstractmethod
    def width(self) -> int:
        """Bits per register."""

    @property
    @abstractmethod
    def zero(self) -> int:
        """The all-zero register string."""

    @property
    @abstractmethod
    def start(self) -> int:
        """Content of register 0 in the initial state."""

    @property
    @abstractmethod
    def noedge(self) -> int:
        """String tested by the no-edge check gate."""

    @abstractmethod
    def neighbor(self, color: Color, value: int) -> int:
        """
        String XORed into the target register by a color-c oracle gate.

        Args:
            color: Oracle color
            value: Content of the source register

        Returns:
            The neighbor string (never raises for out-of-range content)
        """

    @abstractmethod
    def is_rooted(self, regs: Sequence[int]) -> bool:
        """
        Rootedness of the multiset of stored strings.

        Args:
            regs: Register contents of one basis configuration

        Returns:
            True if the configuration is rooted in this space
        """

    def clear_caches(self) -> None:
        """Drop memoized lookups."""

    def format(self, value: int) -> str:
        """Render a register string as fixed-width binary."""
        return format(value, f"0{self.width}b")
