"""Classical query algorithms: transcript-state simulation and subtree samplers.

``simulate_classical`` runs the address translation of a circuit without touching
the oracle (beyond the two queries that find c_*), samples a basis configuration of
every prefix state and resolves it with real queries. The subtree functions embed a
parent-closed set of addresses into the graph, the generic shape of a classical
algorithm that explores a tree of walks from ENTRANCE.
"""

from __future__ import annotations

import json
import logging
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Collection, Iterable, Optional

import numpy as np

from weldedtree.address import (
    EMPTY,
    Address,
    AddressCodec,
    SpecialAddress,
    format_address,
    is_palindrome_free,
    l_map,
    parent,
)
from weldedtree.config import SimulatorConfig
from weldedtree.interfaces import Color, WeldedTreeError, parse_colors
from weldedtree.oracle import Oracle
from weldedtree.simulator.engine import CircuitSimulator, translate_circuit
from weldedtree.simulator.gates import Circuit
from weldedtree.simulator.spaces import AddressSpace
from weldedtree.simulator.state import BasisConfig, SparseState
from weldedtree.streams import numpy_stream, run_trials

logger = logging.getLogger(__name__)


class MalformedSubtreeError(WeldedTreeError):
    """Raised for address sets that are not parent-closed subtrees rooted at EMPTY."""


# -- transcript simulation -----------------------------------------------------------


@dataclass(frozen=True)
class StepSample:
    """One output of the classical simulation: the sampled config and its resolution."""

    step: int
    config: BasisConfig
    labels: tuple[int, ...]
    queries: int


@dataclass
class ClassicalRun:
    """All per-step outputs of one classical simulation run."""

    samples: list[StepSample] = field(default_factory=list)
    transcript_queries: int = 0

    @property
    def total_queries(self) -> int:
        return self.transcript_queries + sum(s.queries for s in self.samples)

    @property
    def final_labels(self) -> tuple[int, ...]:
        return self.samples[-1].labels if self.samples else ()


class _ConfigSampler:
    """Inverse-CDF sampling over a state's support in canonical order."""

    def __init__(self, state: SparseState):
        probs = state.probabilities()
        self.configs = [c for c, _ in probs]
        weights = np.array([p for _, p in probs], dtype=float)
        self.cumulative = np.cumsum(weights)

    def draw(self, rng: np.random.Generator) -> BasisConfig:
        u = rng.random() * self.cumulative[-1]
        index = int(np.searchsorted(self.cumulative, u, side="right"))
        return self.configs[min(index, len(self.configs) - 1)]


def transcript_states(
    circuit: Circuit, oracle: Oracle, config: Optional[SimulatorConfig] = None
) -> tuple[AddressCodec, list[SparseState]]:
    """
    Address-space prefix states after 1..p gates.

    Charges exactly two oracle queries, to find c_*.
    """
    c_star = oracle.missing_color()
    translated = translate_circuit(circuit, c_star)
    codec = AddressCodec(translated.p_max, c_star)
    simulator = CircuitSimulator(translated, AddressSpace(codec), config)
    states = []
    while not simulator.done:
        states.append(simulator.step())
    return codec, states


def resolved_length(config: BasisConfig, codec: AddressCodec) -> int:
    """Queries needed to resolve a config: the total length of its tuple addresses."""
    total = 0
    for s in config.regs:
        t = codec.decode(s)
        if isinstance(t, tuple):
            total += len(t)
    return total


class _ClassicalTrial:
    """One sampled-and-resolved run, on a private oracle over the same graph and sigma."""

    def __init__(
        self,
        oracle: Oracle,
        codec: AddressCodec,
        samplers: list[_ConfigSampler],
        seed: int,
        transcript_queries: int,
    ):
        self.graph, self.sigma = oracle.graph, oracle.sigma
        self.codec, self.samplers, self.seed = codec, samplers, seed
        self.transcript_queries = transcript_queries

    def __call__(self, trial: int) -> ClassicalRun:
        oracle = Oracle(self.graph, self.sigma)
        rng = numpy_stream(self.seed, "classical.sample", trial)
        run = ClassicalRun(transcript_queries=self.transcript_queries if trial == 0 else 0)
        for step, sampler in enumerate(self.samplers, start=1):
            sampled = sampler.draw(rng)
            start = oracle.meter
            labels = l_map(oracle, self.codec, sampled.regs)
            run.samples.append(StepSample(step, sampled, labels, oracle.meter - start))
        return run


def simulate_classical(
    circuit: Circuit,
    oracle: Oracle,
    seed: int = 0,
    trials: int = 1,
    config: Optional[SimulatorConfig] = None,
    workers: int = 1,
) -> list[ClassicalRun]:
    """
    Classical simulation of a genuine rooted circuit.

    The transcript states are computed once; each trial samples every step with its
    own stream and resolves the samples on its own meter. The first run carries
    the two transcript queries. Resolution queries of all trials are charged to
    ``oracle`` once the trials finish.

    Args:
        circuit: Genuine rooted vertex-space circuit
        oracle: Oracle to resolve against
        seed: Root seed of the ``classical.sample`` streams
        trials: Number of independent runs
        config: Simulator settings
        workers: Process count for the trials

    Returns:
        One ClassicalRun per trial, identical for any worker count
    """
    before = oracle.meter
    codec, states = transcript_states(circuit, oracle, config)
    transcript_queries = oracle.meter - before
    samplers = [_ConfigSampler(s) for s in states]
    trial = _ClassicalTrial(oracle, codec, samplers, seed, transcript_queries)
    runs = run_trials(trial, trials, workers)
    oracle.charge(sum(r.total_queries - r.transcript_queries for r in runs))
    logger.info(
        "classical simulation: %d trials, %d steps, %d queries",
        trials,
        len(states),
        oracle.meter - before,
    )
    return runs


def has_entrance_exit_path(labels: Iterable[int], oracle: Oracle) -> bool:
    """True when the labels contain a path from ENTRANCE to EXIT (unmetered)."""
    stored = set(labels)
    if oracle.entrance not in stored or oracle.exit not in stored:
        return False
    seen = {oracle.entrance}
    queue = deque([oracle.entrance])
    while queue:
        v = queue.popleft()
        if v == oracle.exit:
            return True
        for c in Color.ordered():
            u = oracle.lookup(c, v)
            if u in stored and u not in seen:
                seen.add(u)
                queue.append(u)
    return False


# -- subtree embeddings -------------------------------------------------------------


def check_subtree(tree: Collection[Address], c_star: Color) -> None:
    """
    Raise MalformedSubtreeError unless tree is a parent-closed address subtree.

    The tree must contain EMPTY, no other special address, and only palindrome-free
    tuples whose first color is not c_*.
    """
    members = set(tree)
    if EMPTY not in members:
        raise MalformedSubtreeError("subtree does not contain the empty address")
    for t in members:
        if isinstance(t, SpecialAddress):
            if t is not EMPTY:
                raise MalformedSubtreeError(f"subtree contains special address {t.value}")
            continue
        if not t or not is_palindrome_free(t) or t[0] is c_star:
            raise MalformedSubtreeError(f"{format_address(t)} is not an address tree label")
        if parent(t) not in members:
            raise MalformedSubtreeError(f"parent of {format_address(t)} is missing")


def subtree_embedding(
    oracle: Oracle, tree: Collection[Address], c_star: Optional[Color] = None
) -> dict[Address, int]:
    """
    Labels of the subtree's vertices under the oracle.

    Each non-root vertex costs one query: its label is the color-c neighbor of its
    parent's label, c being its last color.

    Args:
        oracle: Oracle (metered)
        tree: Parent-closed address subtree
        c_star: Missing color; taken white-box from the graph when omitted

    Returns:
        Address -> label
    """
    c_star = c_star or oracle.graph.missing_color
    check_subtree(tree, c_star)
    order = sorted((t for t in tree if isinstance(t, tuple)), key=lambda t: (len(t), t))
    labels: dict[Address, int] = {EMPTY: oracle.entrance}
    for t in order:
        labels[t] = oracle.query(t[-1], labels[parent(t)])
    return labels


@dataclass(frozen=True)
class SamplerOutcome:
    found_exit: bool
    found_cycle: bool
    queries: int

    @property
    def success(self) -> bool:
        return self.found_exit or self.found_cycle


def evaluate_embedding(labels: dict[Address, int], oracle: Oracle) -> tuple[bool, bool]:
    """(EXIT reached, two tree vertices share a vertex label)."""
    special = oracle.special
    real = [v for v in labels.values() if v not in (special.noedge, special.invalid)]
    return special.exit in real, len(set(real)) < len(real)


def run_subtree_sampler(
    sampler: Callable[[random.Random], Collection[Address]],
    oracle: Oracle,
    rng: random.Random,
) -> SamplerOutcome:
    """Draw a subtree, embed it, and report whether it found EXIT or a cycle."""
    tree = sampler(rng)
    start = oracle.meter
    labels = subtree_embedding(oracle, tree)
    found_exit, found_cycle = evaluate_embedding(labels, oracle)
    return SamplerOutcome(found_exit, found_cycle, oracle.meter - start)


def children(t: Address, c_star: Color) -> list[tuple[Color, ...]]:
    if t is EMPTY:
        return [(c,) for c in Color.ordered() if c is not c_star]
    if isinstance(t, tuple):
        return [t + (c,) for c in Color.ordered() if c is not t[-1]]
    return []


def random_subtree(rng: random.Random, size: int, c_star: Color) -> set[Address]:
    """Grow a parent-closed subtree of ``size`` vertices by adding random frontier children."""
    if size < 1:
        raise ValueError("subtree size must be at least 1")
    tree: set[Address] = {EMPTY}
    frontier: list[tuple[Color, ...]] = children(EMPTY, c_star)
    while len(tree) < size:
        pick = frontier.pop(rng.randrange(len(frontier)))
        tree.add(pick)
        frontier.extend(children(pick, c_star))
    return tree


def path_subtree(colors: Iterable[Color]) -> set[Address]:
    """The subtree of all prefixes of one walk."""
    tree: set[Address] = {EMPTY}
    prefix: tuple[Color, ...] = ()
    for c in colors:
        prefix = prefix + (c,)
        tree.add(prefix)
    return tree


class RandomSubtreeSampler:
    """Picklable sampler of uniform-growth random subtrees of fixed size."""

    def __init__(self, size: int, c_star: Color):
        self.size = size
        self.c_star = c_star

    def __call__(self, rng: random.Random) -> set[Address]:
        return random_subtree(rng, self.size, self.c_star)


class FixedSubtreeSampler:
    """Sampler that always returns the same subtree."""

    def __init__(self, tree: Collection[Address]):
        self.tree = set(tree)

    def __call__(self, rng: random.Random) -> set[Address]:
        return set(self.tree)


def load_subtree(path: str) -> set[Address]:
    """
    Read a subtree file: a JSON list of color words, ``""`` being the empty address.

    Raises:
        MalformedSubtreeError: If the file is not a list of color words
    """
    with open(path, "r") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise MalformedSubtreeError(f"subtree file is not JSON: {exc}") from exc
    if not isinstance(data, list) or not all(isinstance(w, str) for w in data):
        raise MalformedSubtreeError("subtree file must be a JSON list of color words")
    tree: set[Address] = set()
    for word in data:
        try:
            colors = parse_colors(word)
        except ValueError as exc:
            raise MalformedSubtreeError(str(exc)) from exc
        tree.add(colors if colors else EMPTY)
    return tree
