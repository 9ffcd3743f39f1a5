"""The black-box adjacency oracle over vertex labels, with a query meter."""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from typing import Iterator, Optional

from weldedtree.graph.permutation import WeldPermutation
from weldedtree.graph.welded import NO_NEIGHBOR, WeldedTree
from weldedtree.interfaces import Color

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpecialVertices:
    """The five reserved-or-distinguished label strings of one graph."""

    zero: int
    entrance: int
    exit: int
    noedge: int
    invalid: int

    def __post_init__(self) -> None:
        if len(set(self)) != 5:
            raise ValueError("special vertex strings must be pairwise distinct")

    def __iter__(self) -> Iterator[int]:
        return iter((self.zero, self.entrance, self.exit, self.noedge, self.invalid))

    @classmethod
    def of_graph(cls, g: WeldedTree) -> SpecialVertices:
        return cls(
            zero=g.zero_label,
            entrance=g.entrance_label,
            exit=g.exit_label,
            noedge=g.noedge_label,
            invalid=g.invalid_label,
        )


class Oracle:
    """
    Color-c neighbor oracle eta_c for a welded tree, optionally permuted on the WELD.

    ``query`` is the metered black-box call used by classical procedures;
    ``lookup`` answers the same question without touching the meter and is what
    the quantum simulator and analysis code use.

    Args:
        graph: Canonical graph
        sigma: Optional color-preserving permutation applied on WELD edges
    """

    def __init__(self, graph: WeldedTree, sigma: Optional[WeldPermutation] = None):
        self.graph = graph
        self.sigma = sigma
        self.special = SpecialVertices.of_graph(graph)
        self._meter = 0
        self._lock = threading.Lock()

    @property
    def meter(self) -> int:
        return self._meter

    def charge(self, queries: int) -> None:
        """Add queries made on private copies of this oracle."""
        if queries < 0:
            raise ValueError("queries must be non-negative")
        with self._lock:
            self._meter += queries

    def reset_meter(self) -> int:
        """Zero the meter, returning the previous count."""
        with self._lock:
            used, self._meter = self._meter, 0
        return used

    def permuted(self, sigma: WeldPermutation) -> Oracle:
        return Oracle(self.graph, sigma)

    @property
    def width(self) -> int:
        return self.graph.label_width

    @property
    def entrance(self) -> int:
        return self.special.entrance

    @property
    def exit(self) -> int:
        return self.special.exit

    def neighbor_index(self, v: int, color: Color) -> int:
        """Neighbor index in G^sigma, or ``NO_NEIGHBOR``."""
        g = self.graph
        sigma = self.sigma
        if sigma is not None:
            klass = g.weld_class.get(v)
            if klass is not None and klass[1] is not color:
                u = g.adjacency[sigma.inverse(v)][color.index]
                return sigma.forward(u)
        return g.adjacency[v][color.index]

    def lookup(self, color: Color, label: int) -> int:
        """Unmetered eta_c(label)."""
        v = self.graph.index_of.get(label)
        if v is None:
            return self.special.invalid
        u = self.neighbor_index(v, color)
        if u == NO_NEIGHBOR:
            return self.special.noedge
        return self.graph.labels[u]

    def query(self, color: Color, label: int) -> int:
        """Metered eta_c(label)."""
        with self._lock:
            self._meter += 1
        return self.lookup(color, label)

    def missing_color(self) -> Color:
        """c_*, determined with exactly two queries."""
        first, second, third = Color.ordered()
        first_missing = self.query(first, self.entrance) == self.special.noedge
        second_missing = self.query(second, self.entrance) == self.special.noedge
        if first_missing:
            return first
        if second_missing:
            return second
        return third

    def is_vertex(self, label: int) -> bool:
        return label in self.graph.index_of

    def __repr__(self) -> str:
        permuted = "permuted" if self.sigma is not None else "canonical"
        return f"Oracle(n={self.graph.n}, {permuted}, meter={self._meter})"
