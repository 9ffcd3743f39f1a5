"""Continuous-time quantum walk on the welded tree, and a classical baseline search."""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.linalg import expm_multiply

from weldedtree.graph.builder import build_canonical
from weldedtree.graph.permutation import LazyPermutation
from weldedtree.graph.welded import WeldedTree
from weldedtree.hardness import wilson_interval
from weldedtree.interfaces import Color
from weldedtree.oracle import Oracle
from weldedtree.streams import run_trials, stream

logger = logging.getLogger(__name__)


def reduced_hamiltonian(n: int) -> np.ndarray:
    """
    Adjacency restricted to uniform column superpositions.

    Tridiagonal of size 2n+2: sqrt(2) between neighboring columns inside a tree and
    2 across the WELD (columns n and n+1).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    size = 2 * n + 2
    off = np.full(size - 1, math.sqrt(2.0))
    off[n] = 2.0
    return np.diag(off, 1) + np.diag(off, -1)


def _rk4_step(h: np.ndarray, psi: np.ndarray, dt: float) -> np.ndarray:
    def deriv(x: np.ndarray) -> np.ndarray:
        return -1j * (h @ x)

    k1 = deriv(psi)
    k2 = deriv(psi + 0.5 * dt * k1)
    k3 = deriv(psi + 0.5 * dt * k2)
    k4 = deriv(psi + dt * k3)
    return psi + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


@dataclass(frozen=True)
class WalkSeries:
    """EXIT-column probability on a uniform time grid."""

    n: int
    times: np.ndarray
    p_exit: np.ndarray
    max_norm_error: float

    def first_time_above(self, threshold: float) -> float | None:
        hits = np.nonzero(self.p_exit >= threshold)[0]
        return float(self.times[hits[0]]) if hits.size else None


def column_walk_series(n: int, tmax: float, dt: float) -> WalkSeries:
    """
    Integrate the reduced walk from column 0 with fixed RK4 steps of size dt.

    Args:
        n: Tree height
        tmax: Final time; the grid is 0, dt, 2dt, ... up to tmax
        dt: Step size

    Returns:
        WalkSeries of probabilities at column 2n+1
    """
    if tmax < 0:
        raise ValueError("time must be non-negative")
    if dt <= 0:
        raise ValueError("dt must be positive")
    h = reduced_hamiltonian(n)
    psi = np.zeros(2 * n + 2, dtype=complex)
    psi[0] = 1.0
    steps = int(round(tmax / dt))
    times = np.arange(steps + 1) * dt
    probs = np.empty(steps + 1)
    probs[0] = 0.0
    worst = 0.0
    for k in range(1, steps + 1):
        psi = _rk4_step(h, psi, dt)
        probs[k] = abs(psi[-1]) ** 2
        worst = max(worst, abs(np.vdot(psi, psi).real - 1.0))
    logger.debug("column walk n=%d: %d steps, norm drift %.2e", n, steps, worst)
    return WalkSeries(n, times, probs, worst)


def column_walk_at(n: int, times: Sequence[float], dt: float = 0.001) -> np.ndarray:
    """
    EXIT-column probabilities at arbitrary non-decreasing times.

    Each gap between consecutive times is split into equal steps no longer than dt.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    h = reduced_hamiltonian(n)
    psi = np.zeros(2 * n + 2, dtype=complex)
    psi[0] = 1.0
    now = 0.0
    out = np.empty(len(times))
    for k, time in enumerate(times):
        time = float(time)
        if time < now:
            raise ValueError("times must be non-negative and non-decreasing")
        span = time - now
        steps = math.ceil(span / dt - 1e-12) if span > 0 else 0
        for _ in range(steps):
            psi = _rk4_step(h, psi, span / steps)
        now = time
        out[k] = abs(psi[-1]) ** 2
    return out


def column_walk(n: int, time: float, dt: float = 0.001) -> float:
    """Probability of the reduced walk at the EXIT column after ``time``."""
    if time < 0:
        raise ValueError("time must be non-negative")
    return float(column_walk_at(n, [time], dt)[0])


def adjacency_matrix(g: WeldedTree) -> csr_matrix:
    rows, cols = [], []
    for u, v, _ in g.edges:
        rows += [u, v]
        cols += [v, u]
    size = g.vertex_count
    return csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(size, size))


def full_walk(g: WeldedTree, times: np.ndarray) -> np.ndarray:
    """EXIT probability of the walk on the full adjacency, at each of ``times``."""
    a = adjacency_matrix(g)
    psi0 = np.zeros(g.vertex_count, dtype=complex)
    psi0[g.entrance] = 1.0
    out = np.empty(len(times))
    for k, t in enumerate(times):
        psi = expm_multiply(-1j * float(t) * a, psi0)
        out[k] = abs(psi[g.exit]) ** 2
    return out


def reduction_residual(g: WeldedTree, times: np.ndarray, dt: float = 0.001) -> float:
    """Largest gap between the reduced and full EXIT probabilities over sorted ``times``."""
    reduced = column_walk_at(g.n, times, dt)
    return float(np.max(np.abs(reduced - full_walk(g, times))))


# -- classical baseline -------------------------------------------------------------


def random_exploration(oracle: Oracle, queries: int, rng: random.Random) -> bool:
    """
    Explore the discovered subgraph with random queries until EXIT appears.

    Each step picks a uniformly random discovered vertex that still has unqueried
    colors and queries one of those colors at random.
    """
    discovered = {oracle.entrance}
    frontier: list[tuple[int, list[Color]]] = [(oracle.entrance, list(Color.ordered()))]
    for _ in range(queries):
        if not frontier:
            return False
        k = rng.randrange(len(frontier))
        label, colors = frontier[k]
        c = colors.pop(rng.randrange(len(colors)))
        if not colors:
            frontier[k] = frontier[-1]
            frontier.pop()
        u = oracle.query(c, label)
        if u == oracle.exit:
            return True
        if oracle.is_vertex(u) and u not in discovered:
            discovered.add(u)
            frontier.append((u, list(Color.ordered())))
    return False


class _BaselineTrial:
    def __init__(self, g: WeldedTree, queries: int, seed: int):
        self.g, self.queries, self.seed = g, queries, seed

    def __call__(self, trial: int) -> bool:
        rng = stream(self.seed, "walk.baseline", trial)
        oracle = Oracle(self.g, LazyPermutation(self.g, rng))
        return random_exploration(oracle, self.queries, rng)


@dataclass(frozen=True)
class BaselineResult:
    n: int
    queries: int
    trials: int
    hits: int

    @property
    def hit_rate(self) -> float:
        return self.hits / self.trials if self.trials else 0.0

    @property
    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.hits, self.trials)


def classical_baseline(
    n: int,
    queries: int,
    trials: int,
    seed: int = 0,
    workers: int = 1,
    graph: WeldedTree | None = None,
) -> BaselineResult:
    """Hit rate of random exploration with a query budget over randomly permuted graphs."""
    g = graph if graph is not None else build_canonical(n, seed)
    hits = sum(run_trials(_BaselineTrial(g, queries, seed), trials, workers))
    result = BaselineResult(g.n, queries, trials, hits)
    logger.info("baseline n=%d queries=%d: %d/%d hits", g.n, queries, hits, trials)
    return result
