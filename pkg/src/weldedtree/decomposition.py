"""Good/bad/ugly decomposition of prefix states in both register spaces.

A configuration is bad once its stored labels contain EXIT or the subgraph they
induce is no longer a forest; address-space configurations are judged through
their resolved labels, and additionally when two distinct addresses resolve to the
same vertex. Step by step, the part of the state that has never been bad (good),
the part that just became bad, and the evolved history of all bad parts (ugly)
are tracked for the vertex run (psi) and its address translation (phi).
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, TextIO

import networkx as nx

from weldedtree.address import INVALID, AddressCodec, l_map, l_prime
from weldedtree.checks import CheckTable
from weldedtree.config import SimulatorConfig
from weldedtree.graph import build_canonical
from weldedtree.interfaces import Color, GenuinenessPolicy, RegisterSpace, Space, Verdict
from weldedtree.oracle import Oracle
from weldedtree.simulator.engine import apply_gate, initial_state, translate_circuit
from weldedtree.simulator.circuits import random_genuine_circuit
from weldedtree.simulator.gates import Circuit, Gate
from weldedtree.simulator.spaces import AddressSpace, VertexSpace
from weldedtree.simulator.state import BasisConfig, SparseState

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9


def classify_labels(labels: Sequence[int], oracle: Oracle) -> Verdict:
    """
    Classify a multiset of stored vertex labels.

    Args:
        labels: Register contents
        oracle: Graph access (white-box, unmetered)

    Returns:
        BAD if EXIT is stored or the induced subgraph on the distinct real labels has
        a cycle, GOOD otherwise
    """
    special = oracle.special
    reserved = (special.zero, special.noedge, special.invalid)
    real = {v for v in labels if v not in reserved and oracle.is_vertex(v)}
    if special.exit in real:
        return Verdict.BAD
    if len(real) < 3:
        return Verdict.GOOD
    graph = nx.Graph()
    graph.add_nodes_from(real)
    for v in real:
        for c in Color.ordered():
            u = oracle.lookup(c, v)
            if u in real:
                graph.add_edge(v, u)
    return Verdict.GOOD if nx.is_forest(graph) else Verdict.BAD


def classify_config(
    config: BasisConfig,
    space: Space,
    oracle: Oracle,
    codec: Optional[AddressCodec] = None,
) -> Verdict:
    """
    Classify one basis configuration.

    Args:
        config: Configuration to classify
        space: VERTEX or ADDRESS
        oracle: Graph access
        codec: Address encoding, required for ADDRESS

    Returns:
        GOOD or BAD
    """
    if space is Space.VERTEX:
        return classify_labels(config.regs, oracle)
    if codec is None:
        raise ValueError("address-space classification needs the codec")
    special = oracle.special
    reserved = (special.zero, special.noedge, special.invalid)
    resolved: dict[int, int] = {}
    for s in set(config.regs):
        t = codec.decode(s)
        if t is INVALID:
            continue
        label = l_prime(oracle, t, metered=False)
        if label in reserved:
            continue
        if label in resolved.values():
            return Verdict.BAD
        resolved[s] = label
    return classify_labels(list(resolved.values()), oracle)


class Classifier:
    """Cached classification by stored-string set."""

    def __init__(self, space: Space, oracle: Oracle, codec: Optional[AddressCodec] = None):
        self.space = space
        self.oracle = oracle
        self.codec = codec
        self._cache: dict[frozenset[int], Verdict] = {}

    def __call__(self, config: BasisConfig) -> Verdict:
        key = frozenset(config.regs)
        verdict = self._cache.get(key)
        if verdict is None:
            verdict = classify_config(config, self.space, self.oracle, self.codec)
            self._cache[key] = verdict
        return verdict

    def is_good(self, config: BasisConfig) -> bool:
        return self(config) is Verdict.GOOD

    def is_bad(self, config: BasisConfig) -> bool:
        return self(config) is Verdict.BAD


@dataclass
class StepParts:
    """The decomposition after i gates; all states generally sub-normalized."""

    step: int
    phi_total: SparseState
    phi_good: SparseState
    phi_bad: SparseState
    phi_ugly: SparseState
    psi_total: SparseState
    psi_good: SparseState
    psi_bad: SparseState
    psi_ugly: SparseState

    def norms(self) -> dict[str, float]:
        return {
            "phi_good": self.phi_good.norm_squared(),
            "phi_bad": self.phi_bad.norm_squared(),
            "phi_ugly": self.phi_ugly.norm_squared(),
            "psi_good": self.psi_good.norm_squared(),
            "psi_bad": self.psi_bad.norm_squared(),
            "psi_ugly": self.psi_ugly.norm_squared(),
        }


@dataclass
class GoodBadSplit:
    """Per-step decomposition of one circuit plus every identity check evaluated on it."""

    n: int
    p: int
    steps: list[StepParts] = field(default_factory=list)
    checks: CheckTable = field(default_factory=CheckTable)

    @property
    def final(self) -> StepParts:
        return self.steps[-1]

    def max_residual(self, step: int) -> float:
        values = [
            r.value for r in self.checks.results if r.step == step and r.name.startswith("identity")
        ]
        return max(values, default=0.0)

    def rows(self) -> list[dict[str, float]]:
        rows = []
        for parts in self.steps:
            row: dict[str, float] = {"i": parts.step}
            row.update(parts.norms())
            row["max_residual"] = self.max_residual(parts.step)
            rows.append(row)
        return rows

    def write_csv(self, stream: TextIO) -> None:
        columns = [
            "i", "phi_good", "phi_bad", "phi_ugly", "psi_good", "psi_bad", "psi_ugly",
            "max_residual",
        ]
        writer = csv.DictWriter(stream, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in self.rows():
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


class _Track:
    """Recursion state for one register space."""

    def __init__(self, space: RegisterSpace, classifier: Classifier, options: dict):
        self.space = space
        self.classifier = classifier
        self.options = options
        self.total = initial_state(space, options.pop("registers"))
        self.good = self.total
        self.bad = SparseState.zero(self.total.space)
        self.ugly = SparseState.zero(self.total.space)

    def advance(self, gate: Gate, index: int) -> SparseState:
        """Apply one gate; returns C_i applied to the previous good part."""

        def apply(state: SparseState) -> SparseState:
            return apply_gate(state, gate, self.space, gate_index=index, **self.options)

        evolved_ugly = apply(self.ugly)
        evolved_good = apply(self.good)
        self.total = apply(self.total)
        rest, _ = (self.total - evolved_ugly).pruned(self.options["prune_threshold"])
        self.good = rest.project(self.classifier.is_good)
        self.bad = rest.project(self.classifier.is_bad)
        self.ugly = self.bad + evolved_ugly
        self._evolved_ugly = evolved_ugly
        return evolved_good

    @property
    def evolved_ugly(self) -> SparseState:
        return self._evolved_ugly


def _identity_checks(
    table: CheckTable, prefix: str, track: _Track, evolved_good: SparseState, step: int, tol: float
) -> None:
    good_part = track.classifier.is_good
    bad_part = track.classifier.is_bad
    total = track.total
    table.add(
        f"identity.{prefix}.projector-fixed-point",
        max(
            track.good.project(good_part).max_residual(track.good),
            track.bad.project(bad_part).max_residual(track.bad),
        ),
        tol,
        step,
    )
    overlap = len(set(track.good.support()) & set(track.bad.support()))
    table.add(f"identity.{prefix}.disjoint-supports", float(overlap), 0.0, step)
    table.add(
        f"identity.{prefix}.good-is-total-minus-ugly",
        (total - track.ugly).max_residual(track.good),
        tol,
        step,
    )
    table.add(
        f"identity.{prefix}.evolved-good-splits",
        evolved_good.max_residual(track.good + track.bad),
        tol,
        step,
    )
    table.add(
        f"identity.{prefix}.bad-projection",
        total.project(bad_part).max_residual(track.bad + track.evolved_ugly.project(bad_part)),
        tol,
        step,
    )
    table.add(
        f"identity.{prefix}.good-projection",
        total.project(good_part).max_residual(track.good + track.evolved_ugly.project(good_part)),
        tol,
        step,
    )


def _count_unrooted(state: SparseState, rooted: Callable[[Sequence[int]], bool]) -> int:
    return sum(1 for c in state.support() if not rooted(c.regs))


def decompose_run(
    circuit: Circuit,
    oracle: Oracle,
    config: Optional[SimulatorConfig] = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> GoodBadSplit:
    """
    Run a circuit and its address translation side by side and decompose both.

    Args:
        circuit: Genuine vertex-space circuit
        oracle: Graph the circuit runs on (white-box; the meter is not charged)
        config: Simulator settings; both spaces use the GADGET policy
        tolerance: Residual tolerance of the identity checks

    Returns:
        GoodBadSplit with one StepParts per prefix length 0..len(circuit)
    """
    config = config or SimulatorConfig()
    c_star = oracle.graph.missing_color
    translated = translate_circuit(circuit, c_star)
    codec = AddressCodec(translated.p_max, c_star)
    vertex_space = VertexSpace(oracle)
    address_space = AddressSpace(codec)

    def options() -> dict:
        return {
            "registers": circuit.registers,
            "policy": GenuinenessPolicy.GADGET,
            "enforce_rootedness": config.enforce_rootedness,
            "prune_threshold": config.prune_threshold,
            "support_cap": config.support_cap,
        }

    psi = _Track(vertex_space, Classifier(Space.VERTEX, oracle), options())
    phi = _Track(address_space, Classifier(Space.ADDRESS, oracle, codec), options())

    def resolve(c: BasisConfig) -> BasisConfig:
        return BasisConfig(l_map(oracle, codec, c.regs, metered=False), c.work)

    n, p = circuit.n, translated.p_max
    split = GoodBadSplit(n=n, p=p)
    table = split.checks
    bad_mass = 0.0
    for i in range(len(circuit) + 1):
        if i > 0:
            gate = circuit.gates[i - 1]
            evolved_psi = psi.advance(gate, i - 1)
            evolved_phi = phi.advance(gate, i - 1)
            _identity_checks(table, "psi", psi, evolved_psi, i, tolerance)
            _identity_checks(table, "phi", phi, evolved_phi, i, tolerance)
        parts = StepParts(
            step=i,
            phi_total=phi.total,
            phi_good=phi.good,
            phi_bad=phi.bad,
            phi_ugly=phi.ugly,
            psi_total=psi.total,
            psi_good=psi.good,
            psi_bad=psi.bad,
            psi_ugly=psi.ugly,
        )
        split.steps.append(parts)

        mapped = phi.good.map_configs(resolve, Space.VERTEX)
        table.add("identity.resolved-good-parts-agree", mapped.max_residual(psi.good), tolerance, i)
        table.add(
            "identity.good-norms-agree", abs(phi.good.norm() - psi.good.norm()), tolerance, i
        )
        bad_mass += psi.bad.norm_squared()
        table.add(
            "identity.conservation",
            abs(psi.good.norm_squared() + bad_mass - 1.0),
            tolerance,
            i,
        )
        table.add(
            "rooted.psi-support",
            float(_count_unrooted(psi.good, vertex_space.is_rooted)
                  + _count_unrooted(psi.bad, vertex_space.is_rooted)),
            0.0,
            i,
        )
        table.add(
            "rooted.phi-support",
            float(_count_unrooted(phi.good, address_space.is_rooted)
                  + _count_unrooted(phi.bad, address_space.is_rooted)),
            0.0,
            i,
        )
        _ugly_bounds(table, parts, i, n, p, bad_mass, tolerance)

    table.add(
        "bound.success",
        success_probability(split, oracle),
        success_bound(n, p) + tolerance,
        len(circuit),
    )
    logger.info(
        "decomposed %d gates: |psi_good|^2=%.6g |psi_ugly|^2=%.6g",
        len(circuit),
        split.final.psi_good.norm_squared(),
        split.final.psi_ugly.norm_squared(),
    )
    return split


def _ugly_bounds(
    table: CheckTable, parts: StepParts, i: int, n: int, p: int, bad_mass: float, tol: float
) -> None:
    decay_sixth = 2 ** (-n / 6)
    decay_third = 2 ** (-n / 3)
    table.add("bound.phi-ugly-norm", parts.phi_ugly.norm(), 2 * i * p**2 * decay_sixth, i, False)
    table.add("bound.phi-bad-mass", parts.phi_bad.norm_squared(), 4 * p**4 * decay_third, i, False)
    table.add(
        "bound.psi-ugly-mass", parts.psi_ugly.norm_squared(), 4 * i**2 * p**2 * decay_sixth, i, False
    )
    table.add("bound.psi-ugly-cumulative", parts.psi_ugly.norm_squared(), i * bad_mass + tol, i)


def success_probability(split: GoodBadSplit, oracle: Oracle) -> float:
    """Mass of the final vertex state on bad configurations."""
    classifier = Classifier(Space.VERTEX, oracle)
    return split.final.psi_total.project(classifier.is_bad).norm_squared()


def success_bound(n: int, p: int) -> float:
    """Upper bound on the final bad mass of a genuine rooted circuit with p_max = p."""
    return 4 * p**4 * 2 ** (-n / 6)


@dataclass(frozen=True)
class HeightRow:
    """Final-state masses of one circuit family decomposed at one tree height."""

    n: int
    p: int
    circuits: int
    mean_psi_ugly: float
    max_psi_ugly: float
    max_success: float

    @property
    def bound(self) -> float:
        return success_bound(self.n, self.p)


def ugly_height_sweep(
    heights: Sequence[int],
    registers: int,
    workspace: int,
    gates: int,
    circuits: int,
    seed: int = 0,
    graph_seed: int = 0,
    config: Optional[SimulatorConfig] = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> tuple[list[HeightRow], CheckTable]:
    """
    Decompose the same random circuit family at several tree heights.

    Circuit ``k`` at every height is ``random_genuine_circuit`` with the same shape,
    seed and index ``k``. The table asserts the success bound for every circuit and
    that the mean final psi_ugly mass does not grow from one height to the next.

    Args:
        heights: Tree heights, visited in increasing order
        registers: Register count of every circuit
        workspace: Workspace width of every circuit
        gates: Gate count of every circuit
        circuits: Family size per height
        seed: Circuit seed
        graph_seed: Graph construction seed, shared by all heights
        config: Simulator settings
        tolerance: Residual tolerance

    Returns:
        One HeightRow per height, and the sweep checks
    """
    if circuits < 1:
        raise ValueError("circuits must be at least 1")
    table = CheckTable()
    rows: list[HeightRow] = []
    for n in sorted(set(heights)):
        oracle = Oracle(build_canonical(n, seed=graph_seed))
        ugly, success = [], []
        p = 0
        for k in range(circuits):
            circuit = random_genuine_circuit(
                oracle, registers, workspace, gates, seed=seed, index=k
            )
            split = decompose_run(circuit, oracle, config, tolerance)
            p = split.p
            ugly.append(split.final.psi_ugly.norm_squared())
            success.append(success_probability(split, oracle))
        row = HeightRow(n, p, circuits, math.fsum(ugly) / circuits, max(ugly), max(success))
        table.add("sweep.success-bound", row.max_success, row.bound + tolerance, n)
        if rows:
            growth = row.mean_psi_ugly - rows[-1].mean_psi_ugly
            table.add("sweep.ugly-nonincreasing", growth, tolerance, n)
        rows.append(row)
        logger.info(
            "height sweep n=%d: mean |psi_ugly|^2=%.6g max success=%.6g",
            n,
            row.mean_psi_ugly,
            row.max_success,
        )
    return rows, table


def measurement_distribution(
    state: SparseState, oracle: Oracle, codec: AddressCodec
) -> dict[tuple[int, ...], float]:
    """Exact distribution of resolved register tuples when measuring an address state."""
    dist: dict[tuple[int, ...], float] = {}
    for c, prob in state.probabilities():
        key = l_map(oracle, codec, c.regs, metered=False)
        dist[key] = dist.get(key, 0.0) + prob
    total = math.fsum(dist.values())
    return {k: v / total for k, v in dist.items()} if total else dist
