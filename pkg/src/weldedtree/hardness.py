"""Path embeddings, WELD-crossing bookkeeping and the hardness Monte Carlo.

A color tuple t is followed from ENTRANCE through a (randomly permuted) oracle.
Every time the walk traverses a WELD edge it moves between two of the
height-ceil(n/3) subtrees hanging off the WELD; the desirability predicates
below look at which subtrees were visited and how far from the WELD the walk
wandered. The Monte Carlo estimators draw the permutation lazily per trial.
"""

from __future__ import annotations

import csv
import logging
import math
import random
from dataclasses import dataclass, field
from typing import Collection, Optional, Sequence, TextIO, Union

from scipy.stats import norm

from weldedtree.address import Address, is_palindrome_free
from weldedtree.checks import CheckTable
from weldedtree.classical import (
    FixedSubtreeSampler,
    RandomSubtreeSampler,
    check_subtree,
    evaluate_embedding,
    subtree_embedding,
)
from weldedtree.graph.permutation import LazyPermutation, enumerate_permutations
from weldedtree.graph.structure import distance_to_weld
from weldedtree.graph.welded import NO_NEIGHBOR, WeldedTree
from weldedtree.interfaces import Color
from weldedtree.oracle import Oracle
from weldedtree.streams import run_trials, stream

logger = logging.getLogger(__name__)

MODES = ("path", "subtree", "desirable")


@dataclass(frozen=True)
class Crossing:
    """One traversal of a WELD edge, at color position ``position`` (1-based)."""

    position: int
    edge: frozenset[int]


@dataclass(frozen=True)
class PathEmbedding:
    """
    The walk of a color tuple through the oracle.

    ``labels[0]`` is ENTRANCE and ``labels[j]`` is the label reached after the j-th
    color; ``vertices`` holds the matching vertex indices (None once the walk has
    left the graph through NOEDGE or INVALID). ``subtrees`` lists the subtree root
    of every subtree encountered, one more than the number of crossings when the
    walk reaches the WELD at all; ``first_weld`` is the color position at which
    that first happens (``len(t) + 1`` if never).
    """

    t: tuple[Color, ...]
    labels: tuple[int, ...]
    vertices: tuple[Optional[int], ...]
    crossings: tuple[Crossing, ...]
    subtrees: tuple[int, ...]
    first_weld: int

    @property
    def ell(self) -> int:
        return len(self.subtrees)

    @property
    def prefix_marks(self) -> tuple[int, ...]:
        """Lengths of pre_1(t), ..., pre_ell(t)."""
        if not self.subtrees:
            return ()
        return tuple(c.position - 1 for c in self.crossings) + (len(self.t),)

    def prefix(self, length: int) -> PathEmbedding:
        """Embedding of t[:length], cut from this one."""
        if not 0 <= length <= len(self.t):
            raise ValueError(f"prefix length {length} outside 0..{len(self.t)}")
        crossings = tuple(c for c in self.crossings if c.position <= length)
        reached = self.first_weld <= length
        return PathEmbedding(
            t=self.t[:length],
            labels=self.labels[: length + 1],
            vertices=self.vertices[: length + 1],
            crossings=crossings,
            subtrees=self.subtrees[: len(crossings) + 1] if reached else (),
            first_weld=self.first_weld if reached else length + 1,
        )

    @property
    def real_vertices(self) -> list[int]:
        return [v for v in self.vertices if v is not None]

    def reaches_exit(self, g: WeldedTree) -> bool:
        return g.exit in self.real_vertices

    def has_cycle(self) -> bool:
        real = self.real_vertices
        return len(set(real)) < len(real)


def path_embed(oracle: Oracle, t: Sequence[Color]) -> PathEmbedding:
    """
    Follow t from ENTRANCE with metered queries, recording WELD crossings.

    Args:
        oracle: Oracle, possibly permuted
        t: Palindrome-free color tuple

    Returns:
        The PathEmbedding

    Raises:
        ValueError: If t repeats a color consecutively
    """
    t = tuple(t)
    if not is_palindrome_free(t):
        raise ValueError("color tuple repeats a color consecutively")
    g = oracle.graph
    labels = [oracle.entrance]
    vertices: list[Optional[int]] = [g.entrance]
    crossings: list[Crossing] = []
    subtrees: list[int] = []
    first_weld = len(t) + 1
    for position, c in enumerate(t, start=1):
        label = oracle.query(c, labels[-1])
        labels.append(label)
        u, v = vertices[-1], g.index_of.get(label)
        vertices.append(v)
        if v is None or not g.is_weld(v):
            continue
        if not subtrees:
            subtrees.append(g.subtree_id[v])
            first_weld = position
        elif u is not None and g.is_weld_edge(u, v):
            crossings.append(Crossing(position, frozenset((u, v))))
            subtrees.append(g.subtree_id[v])
    return PathEmbedding(
        t=t,
        labels=tuple(labels),
        vertices=tuple(vertices),
        crossings=tuple(crossings),
        subtrees=tuple(subtrees),
        first_weld=first_weld,
    )


@dataclass(frozen=True)
class Desirability:
    large_displacement: bool
    colliding: bool

    @property
    def desirable(self) -> bool:
        return not (self.large_displacement or self.colliding)


def _weld_edges_between(oracle: Oracle, a: int, b: int) -> set[frozenset[int]]:
    """G^sigma edges joining leaves of subtree a to leaves of subtree b."""
    g = oracle.graph
    edges = set()
    for v in g.subtree_leaves[a]:
        tree_color = g.weld_class[v][1]
        for c in Color.ordered():
            if c is tree_color:
                continue
            u = oracle.neighbor_index(v, c)
            if u != NO_NEIGHBOR and g.subtree_id.get(u) == b:
                edges.add(frozenset((u, v)))
    return edges


def is_desirable(e: PathEmbedding, oracle: Oracle) -> Desirability:
    """
    Evaluate small displacement and non-collision of an embedding in G^sigma.

    Large displacement: after the first crossing the walk visits a vertex at
    distance at least n/3 from the WELD. Colliding: for some pair of encountered
    subtrees, an edge between their leaves is neither of the two crossing edges
    indexed by that pair.
    """
    g = oracle.graph
    large = False
    if e.crossings:
        after = e.vertices[e.crossings[0].position :]
        large = any(v is not None and distance_to_weld(g, v) >= g.n / 3 for v in after)
    colliding = False
    edge_at = {i: c.edge for i, c in enumerate(e.crossings)}
    cache: dict[tuple[int, int], set[frozenset[int]]] = {}
    for a in range(e.ell):
        for b in range(a + 1, e.ell):
            key = (e.subtrees[a], e.subtrees[b])
            if key not in cache:
                cache[key] = _weld_edges_between(oracle, *key)
            allowed = {edge_at.get(a), edge_at.get(b)}
            if any(edge not in allowed for edge in cache[key]):
                colliding = True
                break
        if colliding:
            break
    return Desirability(large, colliding)


# -- statistics ----------------------------------------------------------------------


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return 0.0, 1.0
    z = float(norm.ppf(0.5 + confidence / 2))
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class FrequencyEstimate:
    """An empirical frequency with its Wilson interval and the bound it is held to."""

    label: str
    successes: int
    trials: int
    bound: float
    low: float = field(init=False)
    high: float = field(init=False)

    def __post_init__(self) -> None:
        low, high = wilson_interval(self.successes, self.trials)
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)

    @property
    def frequency(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    @property
    def halfwidth(self) -> float:
        return (self.high - self.low) / 2

    @property
    def limit(self) -> float:
        return self.bound + 3 * self.halfwidth

    @property
    def passed(self) -> bool:
        return self.frequency <= self.limit


def desirable_bound(n: int, i: int) -> float:
    return 4 * i * i * 2 ** (-n / 3)


def path_bound(n: int, p: int) -> float:
    return 4 * p * p * 2 ** (-n / 3)


def subtree_bound(n: int, p: int) -> float:
    return 4 * p**4 * 2 ** (-n / 3)


@dataclass
class HardnessReport:
    """Outcome of one hardness experiment, one estimate per row."""

    mode: str
    n: int
    size: int
    seed: int
    estimates: list[FrequencyEstimate] = field(default_factory=list)
    unsafe_desirable: int = 0

    @property
    def passed(self) -> bool:
        return self.unsafe_desirable == 0 and all(e.passed for e in self.estimates)

    def checks(self) -> CheckTable:
        table = CheckTable()
        if self.mode == "desirable":
            table.add("hardness.desirable.implies-safe", self.unsafe_desirable, 0)
        for e in self.estimates:
            table.add(f"hardness.{self.mode}.{e.label}", e.frequency, e.limit)
            if e.frequency > e.bound and e.passed:
                logger.warning(
                    "%s %s: frequency %.3g exceeds bound %.3g, within sampling slack",
                    self.mode,
                    e.label,
                    e.frequency,
                    e.bound,
                )
        return table

    def rows(self) -> list[dict[str, Union[str, int, float]]]:
        return [
            {
                "mode": self.mode,
                "n": self.n,
                "size": self.size,
                "seed": self.seed,
                "row": e.label,
                "trials": e.trials,
                "hits": e.successes,
                "frequency": e.frequency,
                "wilson_low": e.low,
                "wilson_high": e.high,
                "bound": e.bound,
                "verdict": "pass" if e.passed else "fail",
            }
            for e in self.estimates
        ]

    def write_csv(self, out: TextIO) -> None:
        fields = [
            "mode", "n", "size", "seed", "row", "trials", "hits",
            "frequency", "wilson_low", "wilson_high", "bound", "verdict",
        ]
        writer = csv.DictWriter(out, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in self.rows():
            writer.writerow({k: (f"{v:.6g}" if isinstance(v, float) else v) for k, v in row.items()})


# -- per-trial workers (picklable for process pools) ----------------------------------


def _trial_oracle(g: WeldedTree, seed: int, trial: int) -> Oracle:
    return Oracle(g, LazyPermutation(g, stream(seed, "hardness.trial", trial)))


class _DesirableTrial:
    def __init__(self, g: WeldedTree, t: tuple[Color, ...], seed: int):
        self.g, self.t, self.seed = g, t, seed

    def __call__(self, trial: int) -> tuple[list[bool], int]:
        """(undesirable flag per pre_i, count of desirable prefixes that hit EXIT or a cycle)."""
        oracle = _trial_oracle(self.g, self.seed, trial)
        e = path_embed(oracle, self.t)
        flags = []
        contradictions = 0
        for mark in e.prefix_marks:
            pre = e.prefix(mark)
            verdict = is_desirable(pre, oracle)
            flags.append(not verdict.desirable)
            if verdict.desirable and (pre.reaches_exit(self.g) or pre.has_cycle()):
                contradictions += 1
        return flags, contradictions


class _PathTrial:
    def __init__(self, g: WeldedTree, t: tuple[Color, ...], seed: int):
        self.g, self.t, self.seed = g, t, seed

    def __call__(self, trial: int) -> bool:
        e = path_embed(_trial_oracle(self.g, self.seed, trial), self.t)
        return e.reaches_exit(self.g) or e.has_cycle()


class _SubtreeTrial:
    def __init__(self, g: WeldedTree, sampler, seed: int):
        self.g, self.sampler, self.seed = g, sampler, seed

    def __call__(self, trial: int) -> bool:
        oracle = _trial_oracle(self.g, self.seed, trial)
        tree = self.sampler(stream(self.seed, "hardness.subtree", trial))
        found_exit, found_cycle = evaluate_embedding(subtree_embedding(oracle, tree), oracle)
        return found_exit or found_cycle


# -- experiments ---------------------------------------------------------------------


def mc_desirable(
    t: Sequence[Color], g: WeldedTree, trials: int, seed: int = 0, workers: int = 1
) -> HardnessReport:
    """
    Per-i frequency of pre_i(t) being undesirable over random permutations.

    Row i is conditioned on trials whose embedding encounters at least i subtrees.

    Raises:
        ValueError: If n is not a multiple of 3 or t is not palindrome-free
    """
    if g.n % 3:
        raise ValueError("desirability needs n divisible by 3")
    t = tuple(t)
    if not is_palindrome_free(t):
        raise ValueError("color tuple repeats a color consecutively")
    results = run_trials(_DesirableTrial(g, t, seed), trials, workers)
    longest = max((len(flags) for flags, _ in results), default=0)
    report = HardnessReport("desirable", g.n, len(t), seed)
    for i in range(1, longest + 1):
        reached = [flags[i - 1] for flags, _ in results if len(flags) >= i]
        report.estimates.append(
            FrequencyEstimate(f"i={i}", sum(reached), len(reached), desirable_bound(g.n, i))
        )
    report.unsafe_desirable = sum(c for _, c in results)
    logger.info("desirable: n=%d |t|=%d trials=%d max ell=%d", g.n, len(t), trials, longest)
    return report


def mc_exit_or_cycle(
    g: WeldedTree,
    trials: int,
    seed: int = 0,
    t: Optional[Sequence[Color]] = None,
    tree: Optional[Collection[Address]] = None,
    subtree_size: Optional[int] = None,
    workers: int = 1,
) -> HardnessReport:
    """
    Frequency of the embedding finding EXIT or a cycle over random permutations.

    Exactly one of ``t`` (path variant), ``tree`` (fixed subtree) or
    ``subtree_size`` (fresh random subtree per trial) selects the experiment.
    """
    chosen = [x is not None for x in (t, tree, subtree_size)]
    if sum(chosen) != 1:
        raise ValueError("give exactly one of a color tuple, a subtree or a subtree size")
    if t is not None:
        t = tuple(t)
        if not is_palindrome_free(t):
            raise ValueError("color tuple repeats a color consecutively")
        mode, size, bound = "path", len(t), path_bound(g.n, len(t))
        fn = _PathTrial(g, t, seed)
    else:
        if tree is not None:
            check_subtree(tree, g.missing_color)
            sampler = FixedSubtreeSampler(tree)
            size = len(sampler.tree)
        else:
            sampler = RandomSubtreeSampler(subtree_size, g.missing_color)
            size = subtree_size
        mode, bound = "subtree", subtree_bound(g.n, size)
        fn = _SubtreeTrial(g, sampler, seed)
    hits = sum(run_trials(fn, trials, workers))
    report = HardnessReport(mode, g.n, size, seed)
    report.estimates.append(FrequencyEstimate("exit-or-cycle", hits, trials, bound))
    logger.info("%s: n=%d size=%d trials=%d hits=%d", mode, g.n, size, trials, hits)
    return report


def exact_exit_or_cycle_probability(
    g: WeldedTree,
    t: Optional[Sequence[Color]] = None,
    tree: Optional[Collection[Address]] = None,
) -> float:
    """Exact probability over every color-preserving permutation (small n only)."""
    if (t is None) == (tree is None):
        raise ValueError("give exactly one of a color tuple or a subtree")
    hits = 0
    total = 0
    for sigma in enumerate_permutations(g):
        oracle = Oracle(g, sigma)
        if t is not None:
            e = path_embed(oracle, t)
            hit = e.reaches_exit(g) or e.has_cycle()
        else:
            found_exit, found_cycle = evaluate_embedding(subtree_embedding(oracle, tree), oracle)
            hit = found_exit or found_cycle
        hits += hit
        total += 1
    return hits / total


def random_palindrome_free(
    rng: random.Random, length: int, first_excluded: Optional[Color] = None
) -> tuple[Color, ...]:
    """Random color tuple with no color repeated consecutively."""
    colors: list[Color] = []
    for _ in range(length):
        if colors:
            banned: tuple[Color, ...] = (colors[-1],)
        else:
            banned = (first_excluded,) if first_excluded else ()
        colors.append(rng.choice([c for c in Color.ordered() if c not in banned]))
    return tuple(colors)
