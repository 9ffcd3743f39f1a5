"""Randomized construction of canonical welded tree graphs."""

from __future__ import annotations

import logging
import random

import networkx as nx

from weldedtree.graph.validate import validate_welded_tree
from weldedtree.graph.welded import WeldedTree, label_width, vertex_count
from weldedtree.interfaces import Color, WeldedTreeError
from weldedtree.streams import stream

logger = logging.getLogger(__name__)

MAX_HEIGHT = 18


class ColoringError(WeldedTreeError):
    """Raised when the matching-based 3-edge-coloring cannot be completed."""


def _tree_edges(n: int, offset: int) -> list[tuple[int, int]]:
    internal = 2**n - 1
    edges = []
    for parent in range(internal):
        edges.append((offset + parent, offset + 2 * parent + 1))
        edges.append((offset + parent, offset + 2 * parent + 2))
    return edges


def _weld_cycle(left: list[int], right: list[int], rng: random.Random) -> list[tuple[int, int]]:
    """Alternating cycle L0 R0 L1 R1 ... back to L0 over shuffled leaves."""
    left = list(left)
    right = list(right)
    rng.shuffle(left)
    rng.shuffle(right)
    edges = []
    size = len(left)
    for i in range(size):
        edges.append((left[i], right[i]))
        edges.append((right[i], left[(i + 1) % size]))
    return edges


def three_edge_coloring(
    edges: list[tuple[int, int]], top: set[int], rng: random.Random
) -> list[tuple[int, int, Color]]:
    """
    Color a 3-regular bipartite graph by peeling three perfect matchings.

    Args:
        edges: Edge list of a simple 3-regular bipartite graph
        top: One side of the bipartition
        rng: Stream choosing which color each matching gets

    Returns:
        Colored edge list

    Raises:
        ColoringError: If a round fails to find a perfect matching
    """
    graph = nx.Graph()
    graph.add_edges_from(edges)
    node_count = graph.number_of_nodes()
    palette = list(Color.ordered())
    rng.shuffle(palette)
    colored: list[tuple[int, int, Color]] = []
    for color in palette:
        matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=top)
        if len(matching) != node_count:
            raise ColoringError(
                f"no perfect matching for {color.value}: matched {len(matching)} of {node_count}"
            )
        pairs = [(u, matching[u]) for u in top]
        colored.extend((u, v, color) for u, v in pairs)
        graph.remove_edges_from(pairs)
    if graph.number_of_edges():
        raise ColoringError(f"{graph.number_of_edges()} edges left uncolored")
    return colored


def build_canonical(n: int, seed: int = 0) -> WeldedTree:
    """
    Build a random welded tree of height n.

    Args:
        n: Tree height, at least 1
        seed: Root seed for the weld, label and coloring streams

    Returns:
        A validated WeldedTree

    Raises:
        ValueError: If n is out of range
        ColoringError: If construction produces an invalid graph
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > MAX_HEIGHT:
        raise ValueError(f"n={n} exceeds the memory budget (maximum {MAX_HEIGHT})")

    half = 2 ** (n + 1) - 1
    entrance, exit_ = 0, half
    edges = _tree_edges(n, 0) + _tree_edges(n, half)
    left_leaves = list(range(2**n - 1, half))
    right_leaves = [half + v for v in left_leaves]
    edges += _weld_cycle(left_leaves, right_leaves, stream(seed, "graph.weld"))

    # Bipartition by column parity; left depth d is column d, right depth d is column 2n+1-d.
    top = {v for v in range(half) if _depth(v) % 2 == 0}
    top |= {half + v for v in range(half) if (2 * n + 1 - _depth(v)) % 2 == 0}

    dummy = (entrance, exit_)
    colored = three_edge_coloring(edges + [dummy], top, stream(seed, "graph.coloring"))
    c_star = next(c for u, v, c in colored if {u, v} == set(dummy))
    colored = [(u, v, c) for u, v, c in colored if {u, v} != set(dummy)]

    width = label_width(n)
    count = vertex_count(n)
    labels = tuple(stream(seed, "graph.labels").sample(range(1, (1 << width) - 2), count))

    graph = WeldedTree.from_edges(n, labels, colored, entrance, exit_, seed=seed)
    report = validate_welded_tree(graph)
    if not report.ok:
        raise ColoringError(f"constructed graph is invalid: {report}")
    logger.info("built welded tree n=%d seed=%d c_*=%s", n, seed, c_star.value)
    return graph


def _depth(heap_index: int) -> int:
    return (heap_index + 1).bit_length() - 1
