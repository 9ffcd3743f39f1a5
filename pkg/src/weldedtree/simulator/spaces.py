"""Register-space semantics: welded tree labels and encoded addresses."""

from __future__ import annotations

import logging
from collections import deque
from functools import lru_cache
from typing import Sequence

from weldedtree.address import INVALID, AddressCodec, lambda_, parent
from weldedtree.interfaces import Color, RegisterSpace, Space
from weldedtree.oracle import Oracle

logger = logging.getLogger(__name__)

CACHE_SIZE = 2**16


class VertexSpace(RegisterSpace):
    """
    Registers hold welded tree labels.

    Neighbor lookups go through the oracle white-box (unmetered).

    Args:
        oracle: Oracle of the graph the circuit runs on
    """

    space = Space.VERTEX

    def __init__(self, oracle: Oracle, cache_size: int = CACHE_SIZE):
        self.oracle = oracle
        self._rooted = lru_cache(maxsize=cache_size)(self._compute_rooted)

    @property
    def width(self) -> int:
        return self.oracle.width

    @property
    def zero(self) -> int:
        return self.oracle.special.zero

    @property
    def start(self) -> int:
        return self.oracle.entrance

    @property
    def noedge(self) -> int:
        return self.oracle.special.noedge

    def neighbor(self, color: Color, value: int) -> int:
        return self.oracle.lookup(color, value)

    def clear_caches(self) -> None:
        self._rooted.cache_clear()

    def is_rooted(self, regs: Sequence[int]) -> bool:
        return self._rooted(frozenset(regs))

    def _compute_rooted(self, stored: frozenset[int]) -> bool:
        special = self.oracle.special
        entrance = special.entrance
        if entrance not in stored:
            return False
        real = {v for v in stored if v not in (special.zero, special.noedge)}
        if any(not self.oracle.is_vertex(v) for v in real):
            return False
        seen = {entrance}
        queue = deque([entrance])
        noedge_reached = False
        while queue:
            v = queue.popleft()
            for c in Color.ordered():
                u = self.oracle.lookup(c, v)
                if u == special.noedge:
                    noedge_reached = True
                elif u in real and u not in seen:
                    seen.add(u)
                    queue.append(u)
        if seen != real:
            return False
        return special.noedge not in stored or noedge_reached


class AddressSpace(RegisterSpace):
    """
    Registers hold B-encoded addresses.

    Args:
        codec: Encoding of the depth-p_max address tree
    """

    space = Space.ADDRESS

    def __init__(self, codec: AddressCodec, cache_size: int = CACHE_SIZE):
        self.codec = codec
        self._neighbors = lru_cache(maxsize=cache_size)(self._compute_neighbor)
        self._rooted = lru_cache(maxsize=cache_size)(self._compute_rooted)

    @property
    def width(self) -> int:
        return self.codec.width

    @property
    def zero(self) -> int:
        return self.codec.zero

    @property
    def start(self) -> int:
        return self.codec.empty

    @property
    def noedge(self) -> int:
        return self.codec.noedge

    def neighbor(self, color: Color, value: int) -> int:
        return self._neighbors(color, value)

    def _compute_neighbor(self, color: Color, value: int) -> int:
        codec = self.codec
        return codec.encode(lambda_(codec.decode(value), color, codec.c_star, codec.p_max))

    def clear_caches(self) -> None:
        self._neighbors.cache_clear()
        self._rooted.cache_clear()

    def is_rooted(self, regs: Sequence[int]) -> bool:
        return self._rooted(frozenset(regs))

    def _compute_rooted(self, stored: frozenset[int]) -> bool:
        codec = self.codec
        if codec.empty not in stored:
            return False
        for s in stored:
            t = codec.decode(s)
            if t is INVALID:
                return False
            up = parent(t)
            if up is not None and codec.encode(up) not in stored:
                return False
        return True


def is_rooted(regs: Sequence[int], oracle: Oracle) -> bool:
    """Vertex-space rootedness of one configuration's registers."""
    return VertexSpace(oracle).is_rooted(regs)


def is_address_rooted(regs: Sequence[int], codec: AddressCodec) -> bool:
    return AddressSpace(codec).is_rooted(regs)

