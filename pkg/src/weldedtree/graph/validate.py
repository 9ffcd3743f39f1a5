"""Exhaustive structural validation of welded tree graphs."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import networkx as nx

from weldedtree.graph.welded import NO_NEIGHBOR, WeldedTree, vertex_count


@dataclass
class ValidationReport:
    """Violations found by ``validate_welded_tree``; empty means valid."""

    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, message: str) -> None:
        self.violations.append(message)

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(self.violations)


def validate_welded_tree(g: WeldedTree, max_violations: int = 50) -> ValidationReport:
    """
    Check every welded-tree invariant.

    Args:
        g: Graph to check
        max_violations: Stop collecting after this many messages

    Returns:
        ValidationReport listing degree, coloring, shape, weld and label violations
    """
    report = ValidationReport()
    n = g.n
    count = g.vertex_count

    if count != vertex_count(n):
        report.add(f"expected {vertex_count(n)} vertices, found {count}")
        return report

    for u, v, _ in g.edges:
        if not (0 <= u < count and 0 <= v < count) or u == v:
            report.add(f"malformed edge ({u}, {v})")
            return report

    per_color = Counter()
    degree = Counter()
    for u, v, c in g.edges:
        per_color[(u, c)] += 1
        per_color[(v, c)] += 1
        degree[u] += 1
        degree[v] += 1
    for (v, c), k in sorted(per_color.items(), key=lambda item: (item[0][0], item[0][1].index)):
        if k > 1:
            report.add(f"improper coloring at vertex {v}: {k} {c.value} edges")
    if len(set((u, v) for u, v, _ in g.edges)) != len(g.edges):
        report.add("parallel edges present")

    for v in range(count):
        expected = 2 if v in (g.entrance, g.exit) else 3
        if degree[v] != expected:
            report.add(f"vertex {v} has degree {degree[v]}, expected {expected}")
        if len(report.violations) >= max_violations:
            return report

    _check_columns(g, report)
    if report.ok:
        _check_trees(g, report)
        _check_weld(g, report)
    _check_labels(g, report)
    return report


def _check_columns(g: WeldedTree, report: ValidationReport) -> None:
    n = g.n
    if g.column[g.exit] != 2 * n + 1:
        report.add(f"EXIT is at distance {g.column[g.exit]} from ENTRANCE, expected {2 * n + 1}")
    sizes = Counter(g.column)
    if sizes.get(-1):
        report.add(f"{sizes[-1]} vertices unreachable from ENTRANCE")
    for col in range(2 * n + 2):
        expected = 2 ** min(col, 2 * n + 1 - col)
        if sizes.get(col, 0) != expected:
            report.add(f"column {col} has {sizes.get(col, 0)} vertices, expected {expected}")
    for u, v, _ in g.edges:
        cu, cv = g.column[u], g.column[v]
        if abs(cu - cv) != 1:
            report.add(f"edge ({u}, {v}) joins columns {cu} and {cv}")


def _check_trees(g: WeldedTree, report: ValidationReport) -> None:
    n = g.n
    adj = g.adjacency
    for v in range(g.vertex_count):
        col = g.column[v]
        cols = [g.column[u] for u in adj[v] if u != NO_NEIGHBOR]
        if col < n:
            if cols.count(col + 1) != 2 or cols.count(col - 1) != (0 if col == 0 else 1):
                report.add(f"left-tree vertex {v} (column {col}) is not a binary-tree node")
        elif col > n + 1:
            if cols.count(col - 1) != 2 or cols.count(col + 1) != (0 if col == 2 * n + 1 else 1):
                report.add(f"right-tree vertex {v} (column {col}) is not a binary-tree node")


def _check_weld(g: WeldedTree, report: ValidationReport) -> None:
    n = g.n
    weld = nx.Graph()
    weld.add_nodes_from(v for v in range(g.vertex_count) if g.is_weld(v))
    weld.add_edges_from((u, v) for u, v, _ in g.weld_edges())
    bad_degree = [v for v, d in weld.degree() if d != 2]
    if bad_degree:
        report.add(f"{len(bad_degree)} WELD vertices without exactly two WELD edges")
        return
    if weld.number_of_nodes() != 2 ** (n + 1) or not nx.is_connected(weld):
        report.add("WELD edges do not form a single alternating cycle")


def _check_labels(g: WeldedTree, report: ValidationReport) -> None:
    reserved = {g.zero_label, g.noedge_label, g.invalid_label}
    limit = 1 << g.label_width
    if len(set(g.labels)) != len(g.labels):
        report.add("vertex labels are not distinct")
    for v, label in enumerate(g.labels):
        if not 0 <= label < limit:
            report.add(f"label of vertex {v} exceeds {g.label_width} bits")
        elif label in reserved:
            report.add(f"label of vertex {v} is a reserved string")
