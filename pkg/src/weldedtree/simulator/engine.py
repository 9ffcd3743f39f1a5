"""Gate application and circuit runs over sparse states."""

from __future__ import annotations

import logging
import math
from dataclasses import replace
from typing import Callable, Optional

from weldedtree.config import SimulatorConfig
from weldedtree.interfaces import Color, GenuinenessPolicy, RegisterSpace, Space, WeldedTreeError
from weldedtree.simulator.gates import (
    Circuit,
    COracle,
    CSwapRot,
    EqCheck,
    Gate,
    NoEdgeCheck,
    WorkspaceUnitary,
    ZeroCheck,
)
from weldedtree.simulator.state import BasisConfig, SparseState

logger = logging.getLogger(__name__)


class GenuinenessViolation(WeldedTreeError):
    """An oracle gate met a controlled config whose target is neither 0 nor eta_c(source)."""

    def __init__(self, config: BasisConfig, gate_index: Optional[int], gate: Gate):
        self.config = config
        self.gate_index = gate_index
        self.gate = gate
        where = "" if gate_index is None else f" at gate {gate_index}"
        super().__init__(f"genuineness violated{where} ({gate}) on config {config}")


class SupportCapExceeded(WeldedTreeError):
    """The state grew past the configured number of basis configurations."""

    def __init__(self, size: int, cap: int, gate_index: Optional[int] = None):
        self.size = size
        self.cap = cap
        where = "" if gate_index is None else f" after gate {gate_index}"
        super().__init__(f"support size {size} exceeds cap {cap}{where}")


def initial_state(space: RegisterSpace, registers: int) -> SparseState:
    """Register 0 holds the start string, the rest zero, workspace all zero."""
    if registers < 1:
        raise ValueError("at least one register is required")
    regs = (space.start,) + (space.zero,) * (registers - 1)
    return SparseState.basis(BasisConfig(regs, 0), space.space)


def _accumulate(out: dict[BasisConfig, complex], config: BasisConfig, amp: complex) -> None:
    out[config] = out.get(config, 0j) + amp


def _apply_oracle(
    state: SparseState,
    gate: COracle,
    space: RegisterSpace,
    policy: GenuinenessPolicy,
    enforce_rootedness: bool,
    gate_index: Optional[int],
) -> dict[BasisConfig, complex]:
    out: dict[BasisConfig, complex] = {}
    zero = space.zero
    for config, amp in state.items():
        if not config.bit(gate.control):
            _accumulate(out, config, amp)
            continue
        eta = space.neighbor(gate.color, config.regs[gate.source])
        current = config.regs[gate.target]
        if current != zero and current != eta:
            if policy is GenuinenessPolicy.RAISE:
                raise GenuinenessViolation(config, gate_index, gate)
            _accumulate(out, config, amp)
            continue
        flipped = config.with_reg(gate.target, current ^ eta)
        if enforce_rootedness and not (
            space.is_rooted(config.regs) and space.is_rooted(flipped.regs)
        ):
            _accumulate(out, config, amp)
            continue
        _accumulate(out, flipped, amp)
    return out


def _apply_swap(state: SparseState, gate: CSwapRot) -> dict[BasisConfig, complex]:
    out: dict[BasisConfig, complex] = {}
    cos = math.cos(gate.theta)
    isin = 1j * math.sin(gate.theta)
    for config, amp in state.items():
        if not config.bit(gate.control):
            _accumulate(out, config, amp)
            continue
        _accumulate(out, config, cos * amp)
        _accumulate(out, config.swapped(gate.first, gate.second), isin * amp)
    return out


def _apply_check(state: SparseState, target: int, predicate: Callable[[BasisConfig], bool]):
    out: dict[BasisConfig, complex] = {}
    for config, amp in state.items():
        _accumulate(out, config.flip(target) if predicate(config) else config, amp)
    return out


def _apply_workspace(state: SparseState, gate: WorkspaceUnitary) -> dict[BasisConfig, complex]:
    out: dict[BasisConfig, complex] = {}
    qubits = gate.qubits
    k = len(qubits)
    mask = 0
    for q in qubits:
        mask |= 1 << q
    matrix = gate.matrix
    dim = 2**k
    for config, amp in state.items():
        col = 0
        for q in qubits:
            col = (col << 1) | config.bit(q)
        base = config.work & ~mask
        for row in range(dim):
            entry = matrix[row][col]
            if entry == 0:
                continue
            work = base
            for pos, q in enumerate(qubits):
                if (row >> (k - 1 - pos)) & 1:
                    work |= 1 << q
            _accumulate(out, BasisConfig(config.regs, work), entry * amp)
    return out


def apply_gate(
    state: SparseState,
    gate: Gate,
    space: RegisterSpace,
    *,
    policy: GenuinenessPolicy = GenuinenessPolicy.RAISE,
    enforce_rootedness: bool = True,
    prune_threshold: float = 1e-14,
    support_cap: int = 2**20,
    gate_index: Optional[int] = None,
) -> SparseState:
    """
    Apply one genuine gate.

    Args:
        state: Input state
        gate: Gate to apply
        space: Semantics of the register strings
        policy: Behavior on non-compliant controlled oracle configs
        enforce_rootedness: Oracle gates flip only between rooted configs
        prune_threshold: Drop amplitudes at or below this magnitude
        support_cap: Maximum support size of the result
        gate_index: Position of the gate, for error reports

    Returns:
        The output state

    Raises:
        GenuinenessViolation: Under the RAISE policy
        SupportCapExceeded: If the result is too large
    """
    if isinstance(gate, COracle):
        amps = _apply_oracle(state, gate, space, policy, enforce_rootedness, gate_index)
    elif isinstance(gate, CSwapRot):
        amps = _apply_swap(state, gate)
    elif isinstance(gate, EqCheck):
        amps = _apply_check(
            state, gate.target, lambda c: c.regs[gate.first] == c.regs[gate.second]
        )
    elif isinstance(gate, NoEdgeCheck):
        noedge = space.noedge
        amps = _apply_check(state, gate.target, lambda c: c.regs[gate.register] == noedge)
    elif isinstance(gate, ZeroCheck):
        zero = space.zero
        amps = _apply_check(state, gate.target, lambda c: c.regs[gate.register] == zero)
    elif isinstance(gate, WorkspaceUnitary):
        amps = _apply_workspace(state, gate)
    else:
        raise TypeError(f"not a genuine gate: {gate!r}")

    result, dropped = SparseState(amps, state.space).pruned(prune_threshold)
    if dropped:
        logger.debug("gate %s pruned mass %.3g", gate_index, dropped)
    if len(result) > support_cap:
        raise SupportCapExceeded(len(result), support_cap, gate_index)
    return result


def translate_circuit(circuit: Circuit, c_star: Color) -> Circuit:
    """Address-space analog: the same gate sequence, interpreted on encoded addresses."""
    if circuit.space is Space.ADDRESS:
        raise ValueError("circuit is already an address-space translation")
    return replace(circuit, space=Space.ADDRESS, c_star=c_star)


def run_prefix(
    circuit: Circuit,
    i: int,
    space: RegisterSpace,
    config: Optional[SimulatorConfig] = None,
    policy: Optional[GenuinenessPolicy] = None,
) -> SparseState:
    """Fold the first i gates over the initial state."""
    if not 0 <= i <= len(circuit):
        raise ValueError(f"prefix length {i} outside 0..{len(circuit)}")
    simulator = CircuitSimulator(circuit, space, config, policy)
    simulator.run(i)
    return simulator.state


class CircuitSimulator:
    """
    Step-by-step runner for one circuit in one register space.

    Args:
        circuit: Circuit to run
        space: Register semantics
        config: Pruning, cap and enforcement settings
        policy: Genuineness policy; defaults to the config's for vertex space and
            GADGET for address space
    """

    def __init__(
        self,
        circuit: Circuit,
        space: RegisterSpace,
        config: Optional[SimulatorConfig] = None,
        policy: Optional[GenuinenessPolicy] = None,
    ):
        self.circuit = circuit
        self.space = space
        self.config = config or SimulatorConfig()
        if policy is None:
            policy = (
                self.config.genuineness
                if space.space is Space.VERTEX
                else GenuinenessPolicy.GADGET
            )
        self.policy = policy
        self._callbacks: list[Callable[[SparseState, int], None]] = []
        self.reset()

    def reset(self) -> None:
        self.space.clear_caches()
        self.state = initial_state(self.space, self.circuit.registers)
        self._step_count = 0
        self._max_support = 1

    def add_callback(self, callback: Callable[[SparseState, int], None]) -> None:
        """
        Add a callback run after every gate.

        Args:
            callback: Function taking (state, number of gates applied)
        """
        self._callbacks.append(callback)

    @property
    def done(self) -> bool:
        return self._step_count >= len(self.circuit)

    def step(self) -> SparseState:
        """Apply the next gate."""
        if self.done:
            raise IndexError("circuit already finished")
        index = self._step_count
        self.state = apply_gate(
            self.state,
            self.circuit.gates[index],
            self.space,
            policy=self.policy,
            enforce_rootedness=self.config.enforce_rootedness,
            prune_threshold=self.config.prune_threshold,
            support_cap=self.config.support_cap,
            gate_index=index,
        )
        self._step_count += 1
        self._max_support = max(self._max_support, len(self.state))
        logger.debug("gate %d: support %d", index, len(self.state))
        for callback in self._callbacks:
            callback(self.state, self._step_count)
        return self.state

    def run(self, steps: Optional[int] = None) -> SparseState:
        """Apply ``steps`` more gates, or all remaining ones."""
        remaining = len(self.circuit) - self._step_count
        count = remaining if steps is None else min(steps, remaining)
        for _ in range(count):
            self.step()
        return self.state

    def get_stats(self) -> dict:
        """
        Get run statistics.

        Returns:
            Dictionary with step count, support sizes and norm
        """
        return {
            "step_count": self._step_count,
            "gates": len(self.circuit),
            "support": len(self.state),
            "max_support": self._max_support,
            "norm": self.state.norm(),
            "space": self.space.space.value,
        }
