"""Hand-labeled reference graphs.

Vertex names spell the root-to-vertex color path: ``L`` is ENTRANCE, ``Lbg`` is
reached from ENTRANCE by a blue then a green edge; ``R`` names play the same role
from EXIT.
"""

from __future__ import annotations

from typing import Callable

from weldedtree.graph.welded import WeldedTree
from weldedtree.interfaces import Color

REFERENCE_N3_LABELS: dict[str, str] = {
    "L": "100000",
    "Lr": "010110",
    "Lb": "101000",
    "Lrg": "011101",
    "Lrb": "101001",
    "Lbg": "110100",
    "Lbr": "101010",
    "Lrgb": "001100",
    "Lrgr": "110011",
    "Lrbg": "101111",
    "Lrbr": "111001",
    "Lbgr": "011000",
    "Lbgb": "010100",
    "Lbrg": "101110",
    "Lbrb": "000001",
    "R": "100001",
    "Rb": "101101",
    "Rr": "001010",
    "Rbg": "001011",
    "Rbr": "101100",
    "Rrg": "010101",
    "Rrb": "011110",
    "Rbgr": "000101",
    "Rbgb": "010001",
    "Rbrg": "001001",
    "Rbrb": "100100",
    "Rrgb": "110110",
    "Rrgr": "001110",
    "Rrbg": "110101",
    "Rrbr": "000100",
}

# The weld cycle, as consecutive (u, color, v) hops.
REFERENCE_N3_WELD: tuple[tuple[str, str, str], ...] = (
    ("Lbrb", "g", "Rbgr"),
    ("Rbgr", "b", "Lrbg"),
    ("Lrbg", "r", "Rbrb"),
    ("Rbrb", "g", "Lbgb"),
    ("Lbgb", "r", "Rrbg"),
    ("Rrbg", "b", "Lrbr"),
    ("Lrbr", "g", "Rrgr"),
    ("Rrgr", "b", "Lrgr"),
    ("Lrgr", "g", "Rrgb"),
    ("Rrgb", "r", "Lbrg"),
    ("Lbrg", "b", "Rrbr"),
    ("Rrbr", "g", "Lrgb"),
    ("Lrgb", "r", "Rbgb"),
    ("Rbgb", "g", "Lbgr"),
    ("Lbgr", "b", "Rbrg"),
    ("Rbrg", "r", "Lbrb"),
)


def _from_names(
    n: int, names: dict[str, str], weld: tuple[tuple[str, str, str], ...]
) -> WeldedTree:
    order = sorted(names, key=lambda name: (name[0], len(name), name))
    index = {name: i for i, name in enumerate(order)}
    labels = tuple(int(names[name], 2) for name in order)
    edges = []
    for name in order:
        if len(name) > 1:
            edges.append((index[name[:-1]], index[name], Color.parse(name[-1])))
    for u, c, v in weld:
        edges.append((index[u], index[v], Color.parse(c)))
    return WeldedTree.from_edges(n, labels, edges, index["L"], index["R"])


def reference_n3() -> WeldedTree:
    """Height-3 welded tree with c_* = green, ENTRANCE 100000 and EXIT 100001."""
    return _from_names(3, REFERENCE_N3_LABELS, REFERENCE_N3_WELD)


def reference_label(name: str) -> int:
    """Label of a named vertex of the height-3 reference graph."""
    return int(REFERENCE_N3_LABELS[name], 2)


FIXTURES: dict[str, Callable[[], WeldedTree]] = {
    "reference-n3": reference_n3,
}


def load_fixture(name: str) -> WeldedTree:
    try:
        return FIXTURES[name]()
    except KeyError:
        known = ", ".join(sorted(FIXTURES))
        raise ValueError(f"unknown graph fixture {name!r} (known: {known})") from None
