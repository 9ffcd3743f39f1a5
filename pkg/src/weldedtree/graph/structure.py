"""Structural queries: per-level color counts, WELD distances, leaf color suffixes."""

from __future__ import annotations

from collections import Counter

from weldedtree.graph.welded import WeldedTree
from weldedtree.interfaces import Color, Side


def root_missing_color(g: WeldedTree, side: Side) -> Color:
    root = g.entrance if side is Side.LEFT else g.exit
    c = g.missing_color_at(root)
    if c is None:
        raise ValueError(f"{side.value} root does not miss exactly one color")
    return c


def _level_columns(g: WeldedTree, side: Side, i: int) -> tuple[int, int]:
    """(parent column, child column) of level-i edges in one tree."""
    if side is Side.LEFT:
        return i - 1, i
    top = 2 * g.n + 1
    return top - (i - 1), top - i


def gamma_count(g: WeldedTree, side: Side, color: Color, i: int) -> int:
    """
    Number of color-c edges at level i of one tree.

    Args:
        g: Graph
        side: Tree (LEFT is rooted at ENTRANCE, RIGHT at EXIT)
        color: Edge color
        i: Level, 1 <= i <= n; level i joins depth i-1 to depth i

    Returns:
        Edge count
    """
    if not 1 <= i <= g.n:
        raise ValueError(f"level {i} outside 1..{g.n}")
    upper, lower = _level_columns(g, side, i)
    count = 0
    for v in g.vertices_in_column(upper):
        u = g.adjacency[v][color.index]
        if u >= 0 and g.column[u] == lower:
            count += 1
    return count


def gamma_closed_form(i: int, color: Color, c_star: Color) -> int:
    """floor(2^i/3) when (i odd and c = c_*) or (i even and c != c_*), else ceil(2^i/3)."""
    if i < 1:
        raise ValueError("level must be at least 1")
    low = (i % 2 == 1) == (color is c_star)
    return 2**i // 3 if low else -(-(2**i) // 3)


def distance_to_weld(g: WeldedTree, v: int) -> int:
    col = g.column[v]
    return min(abs(col - g.n), abs(col - (g.n + 1)))


def upward_colors(g: WeldedTree, leaf: int, j: int) -> tuple[Color, ...]:
    """Last j edge colors on the root-to-leaf path, in root-to-leaf order."""
    colors: list[Color] = []
    v = leaf
    for _ in range(j):
        parent = g.parent(v)
        if parent is None:
            raise ValueError(f"path from vertex {leaf} to its root is shorter than {j}")
        c = g.edge_color(v, parent)
        assert c is not None
        colors.append(c)
        v = parent
    return tuple(reversed(colors))


def leaf_suffix_counts(g: WeldedTree, side: Side, j: int) -> Counter[tuple[Color, ...]]:
    """Leaves of one tree counted by their length-j color suffix."""
    if not 1 <= j <= g.n:
        raise ValueError(f"suffix length {j} outside 1..{g.n}")
    return Counter(upward_colors(g, leaf, j) for leaf in g.leaves(side))


def leaf_suffix_bound(n: int, j: int) -> int:
    return -(-(2 ** (n - j + 1)) // 3)
