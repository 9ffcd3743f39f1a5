"""The welded tree graph value type.

Vertices are dense indices ``0 .. 2^(n+2)-3``; labels are a separate table of
``label_width(n)``-bit ints. The edge list is the source of truth, everything else
(adjacency, WELD classes, subtree ids) is derived and cached.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterator, Optional

from weldedtree.interfaces import Color, Side

NO_NEIGHBOR = -1


def label_width(n: int) -> int:
    """Bits per vertex label: 2n, widened for n < 3 so the reserved strings fit."""
    return max(2 * n, n + 3)


def vertex_count(n: int) -> int:
    return 2 ** (n + 2) - 2


@dataclass(frozen=True)
class WeldedTree:
    """
    A 3-edge-colored welded tree graph with labeled vertices.

    Args:
        n: Height of each binary tree
        labels: Label of each vertex index
        edges: ``(u, v, color)`` triples with ``u < v``
        entrance: Index of the ENTRANCE root
        exit: Index of the EXIT root
        column: Distance of each vertex from ENTRANCE (-1 if unreachable)
        seed: Construction seed, kept for reproducibility headers
    """

    n: int
    labels: tuple[int, ...]
    edges: tuple[tuple[int, int, Color], ...]
    entrance: int
    exit: int
    column: tuple[int, ...]
    seed: Optional[int] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if len(self.labels) != len(self.column):
            raise ValueError("labels and column tables differ in length")

    @classmethod
    def from_edges(
        cls,
        n: int,
        labels: tuple[int, ...],
        edges: list[tuple[int, int, Color]],
        entrance: int,
        exit: int,
        seed: Optional[int] = None,
    ) -> WeldedTree:
        """Build a graph, computing columns by breadth-first search from ENTRANCE."""
        count = len(labels)
        normalized = tuple(sorted((min(u, v), max(u, v), c) for u, v, c in edges))
        neighbors: list[list[int]] = [[] for _ in range(count)]
        for u, v, _ in normalized:
            neighbors[u].append(v)
            neighbors[v].append(u)
        column = [-1] * count
        column[entrance] = 0
        queue = deque([entrance])
        while queue:
            u = queue.popleft()
            for v in neighbors[u]:
                if column[v] < 0:
                    column[v] = column[u] + 1
                    queue.append(v)
        return cls(
            n=n,
            labels=tuple(labels),
            edges=normalized,
            entrance=entrance,
            exit=exit,
            column=tuple(column),
            seed=seed,
        )

    # -- sizes and reserved strings ------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return len(self.labels)

    @property
    def label_width(self) -> int:
        return label_width(self.n)

    @property
    def zero_label(self) -> int:
        return 0

    @property
    def noedge_label(self) -> int:
        return (1 << self.label_width) - 1

    @property
    def invalid_label(self) -> int:
        return (1 << self.label_width) - 2

    @property
    def entrance_label(self) -> int:
        return self.labels[self.entrance]

    @property
    def exit_label(self) -> int:
        return self.labels[self.exit]

    # -- adjacency -----------------------------------------------------------------

    @cached_property
    def adjacency(self) -> list[list[int]]:
        """Per vertex, per color index: neighbor index or ``NO_NEIGHBOR``."""
        adj = [[NO_NEIGHBOR] * 3 for _ in range(self.vertex_count)]
        for u, v, c in self.edges:
            adj[u][c.index] = v
            adj[v][c.index] = u
        return adj

    @cached_property
    def index_of(self) -> dict[int, int]:
        return {label: i for i, label in enumerate(self.labels)}

    def neighbor(self, v: int, color: Color) -> Optional[int]:
        u = self.adjacency[v][color.index]
        return None if u == NO_NEIGHBOR else u

    def colors_at(self, v: int) -> tuple[Color, ...]:
        return tuple(c for c in Color.ordered() if self.adjacency[v][c.index] != NO_NEIGHBOR)

    def edge_color(self, u: int, v: int) -> Optional[Color]:
        for c in Color.ordered():
            if self.adjacency[u][c.index] == v:
                return c
        return None

    def missing_color_at(self, v: int) -> Optional[Color]:
        missing = [c for c in Color.ordered() if self.adjacency[v][c.index] == NO_NEIGHBOR]
        return missing[0] if len(missing) == 1 else None

    @cached_property
    def missing_color(self) -> Color:
        """c_*, the unique color with no edge at ENTRANCE."""
        c = self.missing_color_at(self.entrance)
        if c is None:
            raise ValueError("ENTRANCE does not miss exactly one color")
        return c

    # -- columns, sides and the WELD -----------------------------------------------

    def side(self, v: int) -> Side:
        return Side.LEFT if 0 <= self.column[v] <= self.n else Side.RIGHT

    def is_weld(self, v: int) -> bool:
        return self.column[v] in (self.n, self.n + 1)

    def is_weld_edge(self, u: int, v: int) -> bool:
        return self.is_weld(u) and self.is_weld(v) and self.column[u] != self.column[v]

    def vertices_in_column(self, col: int) -> list[int]:
        return [v for v, c in enumerate(self.column) if c == col]

    def leaves(self, side: Side) -> list[int]:
        return self.vertices_in_column(self.n if side is Side.LEFT else self.n + 1)

    @cached_property
    def weld_class(self) -> dict[int, tuple[Side, Color]]:
        """(side, tree-edge color) for every WELD vertex."""
        classes: dict[int, tuple[Side, Color]] = {}
        for side in Side:
            inward = self.n - 1 if side is Side.LEFT else self.n + 2
            for v in self.leaves(side):
                for c in Color.ordered():
                    u = self.adjacency[v][c.index]
                    if u != NO_NEIGHBOR and self.column[u] == inward:
                        classes[v] = (side, c)
        return classes

    @cached_property
    def weld_groups(self) -> dict[tuple[Side, Color], list[int]]:
        """WELD vertices grouped by class, each group sorted by index."""
        groups: dict[tuple[Side, Color], list[int]] = {}
        for v, key in sorted(self.weld_class.items()):
            groups.setdefault(key, []).append(v)
        return groups

    @cached_property
    def weld_position(self) -> dict[int, int]:
        """Position of each WELD vertex inside its class group."""
        return {v: i for group in self.weld_groups.values() for i, v in enumerate(group)}

    def weld_edges(self) -> Iterator[tuple[int, int, Color]]:
        for u, v, c in self.edges:
            if self.is_weld_edge(u, v):
                yield u, v, c

    # -- height-ceil(n/3) subtrees ---------------------------------------------------

    @property
    def subtree_height(self) -> int:
        return math.ceil(self.n / 3)

    def subtree_root_column(self, side: Side) -> int:
        h = self.subtree_height
        return self.n - h if side is Side.LEFT else self.n + 1 + h

    @cached_property
    def subtree_id(self) -> dict[int, int]:
        """Leaf index -> index of the root of its height-ceil(n/3) subtree."""
        ids: dict[int, int] = {}
        for side in Side:
            step = -1 if side is Side.LEFT else 1
            for leaf in self.leaves(side):
                v = leaf
                for _ in range(self.subtree_height):
                    v = self._toward(v, self.column[v] + step)
                ids[leaf] = v
        return ids

    @cached_property
    def subtree_leaves(self) -> dict[int, list[int]]:
        groups: dict[int, list[int]] = {}
        for leaf, root in self.subtree_id.items():
            groups.setdefault(root, []).append(leaf)
        return groups

    def _toward(self, v: int, col: int) -> int:
        for u in self.adjacency[v]:
            if u != NO_NEIGHBOR and self.column[u] == col:
                return u
        raise ValueError(f"vertex {v} has no neighbor in column {col}")

    def parent(self, v: int) -> Optional[int]:
        """Neighbor one column closer to this vertex's own tree root."""
        if v in (self.entrance, self.exit):
            return None
        col = self.column[v]
        return self._toward(v, col - 1 if self.side(v) is Side.LEFT else col + 1)

    # -- serialization ---------------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        digits = -(-self.label_width // 4)
        return {
            "n": self.n,
            "seed": self.seed,
            "entrance": self.entrance,
            "exit": self.exit,
            "labels": [format(label, f"0{digits}x") for label in self.labels],
            "edges": [[u, v, c.value] for u, v, c in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> WeldedTree:
        try:
            return cls.from_edges(
                n=int(data["n"]),
                labels=tuple(int(s, 16) for s in data["labels"]),
                edges=[(int(u), int(v), Color(c)) for u, v, c in data["edges"]],
                entrance=int(data["entrance"]),
                exit=int(data["exit"]),
                seed=data.get("seed"),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed graph document: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> WeldedTree:
        return cls.from_dict(json.loads(text))
