"""Color-preserving permutations of WELD vertices.

A permutation may only move a WELD vertex within its class, the (side, tree-edge
color) pair. ``ColorPreservingPermutation`` is an explicit map; ``LazyPermutation``
draws images on demand and is distributed exactly like a fully sampled one.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator, Protocol

from weldedtree.graph.welded import WeldedTree
from weldedtree.interfaces import Color, Side, WeldedTreeError


class PermutationError(WeldedTreeError):
    """Raised when a permutation moves a vertex out of its WELD class."""


class WeldPermutation(Protocol):
    def forward(self, v: int) -> int: ...

    def inverse(self, v: int) -> int: ...


def weld_classes(g: WeldedTree) -> dict[tuple[Side, Color], list[int]]:
    """WELD vertices grouped by class, each group sorted by index."""
    return g.weld_groups


@dataclass(frozen=True)
class ColorPreservingPermutation:
    """
    Explicit permutation of WELD vertices; identity elsewhere.

    Args:
        mapping: WELD vertex -> image; vertices absent from the map are fixed
    """

    mapping: dict[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if sorted(self.mapping) != sorted(self.mapping.values()):
            raise ValueError("mapping is not a bijection on its domain")
        object.__setattr__(self, "_inverse", {u: v for v, u in self.mapping.items()})

    def forward(self, v: int) -> int:
        return self.mapping.get(v, v)

    def inverse(self, v: int) -> int:
        return self._inverse.get(v, v)  # type: ignore[attr-defined]

    def __call__(self, v: int) -> int:
        return self.forward(v)

    @property
    def is_identity(self) -> bool:
        return all(v == u for v, u in self.mapping.items())

    def compose(self, other: ColorPreservingPermutation) -> ColorPreservingPermutation:
        """``self`` after ``other``."""
        domain = set(self.mapping) | set(other.mapping)
        return ColorPreservingPermutation({v: self.forward(other.forward(v)) for v in domain})

    @classmethod
    def identity(cls) -> ColorPreservingPermutation:
        return cls({})

    @classmethod
    def swap(cls, u: int, v: int) -> ColorPreservingPermutation:
        return cls({u: v, v: u})


def check_color_preserving(g: WeldedTree, sigma: ColorPreservingPermutation) -> None:
    """Raise PermutationError unless every moved vertex stays in its WELD class."""
    classes = g.weld_class
    for v, u in sigma.mapping.items():
        if v == u:
            continue
        if v not in classes or u not in classes:
            raise PermutationError(f"permutation moves non-WELD vertex {v} -> {u}")
        if classes[v] != classes[u]:
            raise PermutationError(
                f"vertex {v} in class {_class_name(classes[v])} mapped to "
                f"{u} in class {_class_name(classes[u])}"
            )


def _class_name(key: tuple[Side, Color]) -> str:
    return f"{key[1].value}-{key[0].value}"


def sample_permutation(g: WeldedTree, rng: random.Random) -> ColorPreservingPermutation:
    """Uniform draw from the product of the six per-class symmetric groups."""
    mapping: dict[int, int] = {}
    for _, members in sorted(weld_classes(g).items(), key=lambda kv: (kv[0][0].value, kv[0][1].index)):
        images = list(members)
        rng.shuffle(images)
        mapping.update(zip(members, images))
    return ColorPreservingPermutation(mapping)


def enumerate_permutations(g: WeldedTree) -> Iterator[ColorPreservingPermutation]:
    """Every color-preserving permutation; only feasible for small n."""
    groups = [
        members
        for _, members in sorted(
            weld_classes(g).items(), key=lambda kv: (kv[0][0].value, kv[0][1].index)
        )
    ]
    for images in itertools.product(*(itertools.permutations(m) for m in groups)):
        mapping: dict[int, int] = {}
        for members, image in zip(groups, images):
            mapping.update(zip(members, image))
        yield ColorPreservingPermutation(mapping)


def permutation_count(g: WeldedTree) -> int:
    total = 1
    for members in weld_classes(g).values():
        for k in range(2, len(members) + 1):
            total *= k
    return total


def apply_permutation(g: WeldedTree, sigma: ColorPreservingPermutation) -> WeldedTree:
    """
    Materialize G^sigma by relabeling the endpoints of every WELD edge.

    Args:
        g: Source graph
        sigma: Color-preserving permutation for g

    Returns:
        The permuted graph, sharing labels, roots and seed with g

    Raises:
        PermutationError: If sigma is not color-preserving for g
    """
    check_color_preserving(g, sigma)
    edges = []
    for u, v, c in g.edges:
        if g.is_weld_edge(u, v):
            edges.append((sigma(u), sigma(v), c))
        else:
            edges.append((u, v, c))
    return WeldedTree.from_edges(g.n, g.labels, edges, g.entrance, g.exit, seed=g.seed)


class _SparsePool:
    """Shrinking pool over a fixed member list with O(1) draw and removal.

    Untouched slots read through to the shared member list, so creating a pool
    costs nothing beyond the shared index.
    """

    def __init__(self, members: list[int], position: dict[int, int]) -> None:
        self._members = members
        self._position = position
        self._slot: dict[int, int] = {}
        self._where: dict[int, int] = {}
        self.size = len(members)

    def _item_at(self, pos: int) -> int:
        if pos in self._slot:
            return self._slot[pos]
        return self._members[pos]

    def _pos_of(self, item: int) -> int:
        return self._where.get(item, self._position[item])

    def remove(self, item: int) -> None:
        pos = self._pos_of(item)
        last = self.size - 1
        if pos > last:
            raise KeyError(item)
        moved = self._item_at(last)
        self._slot[pos] = moved
        self._where[moved] = pos
        self._where[item] = self.size
        self.size -= 1

    def draw(self, rng: random.Random) -> int:
        item = self._item_at(rng.randrange(self.size))
        self.remove(item)
        return item


class LazyPermutation:
    """
    Color-preserving permutation revealed one vertex at a time.

    Each fresh forward (inverse) lookup draws uniformly from the class members not
    yet used as images (preimages), so every revealed partial map extends to a
    uniform full permutation.

    Args:
        g: Graph whose WELD classes are permuted
        rng: Stream the draws come from
    """

    def __init__(self, g: WeldedTree, rng: random.Random) -> None:
        self._rng = rng
        self._class = g.weld_class
        groups, position = g.weld_groups, g.weld_position
        self._images = {key: _SparsePool(m, position) for key, m in groups.items()}
        self._preimages = {key: _SparsePool(m, position) for key, m in groups.items()}
        self._forward: dict[int, int] = {}
        self._backward: dict[int, int] = {}

    def forward(self, v: int) -> int:
        if v in self._forward:
            return self._forward[v]
        key = self._class.get(v)
        if key is None:
            return v
        u = self._images[key].draw(self._rng)
        self._preimages[key].remove(v)
        self._forward[v] = u
        self._backward[u] = v
        return u

    def inverse(self, u: int) -> int:
        if u in self._backward:
            return self._backward[u]
        key = self._class.get(u)
        if key is None:
            return u
        v = self._preimages[key].draw(self._rng)
        self._images[key].remove(u)
        self._forward[v] = u
        self._backward[u] = v
        return v

    @property
    def revealed(self) -> int:
        return len(self._forward)


