"""Genuineness checking gadget built from compliant gates only.

``wrap_genuine`` replaces every oracle gate by a sequence that copies the target
register aside, recomputes eta_c(source) into it, compares, and only then applies
the original oracle gate under an AND of its control and the comparison bit. Every
oracle call inside the sequence is compliant by construction, so a wrapped circuit
never triggers a genuineness violation, and a non-compliant call becomes identity.
"""

from __future__ import annotations

import math

import numpy as np

from weldedtree.simulator.gates import (
    PAULI_X,
    Circuit,
    COracle,
    CSwapRot,
    EqCheck,
    Gate,
    WorkspaceUnitary,
    ZeroCheck,
    controlled,
)
from weldedtree.simulator.state import BasisConfig, SparseState

SQRT_X = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)


def toffoli(c1: int, c2: int, target: int) -> list[WorkspaceUnitary]:
    """Doubly controlled X as five two-qubit gates."""
    cv = controlled(SQRT_X)
    cv_dagger = controlled(SQRT_X.conj().T)
    cx = controlled(PAULI_X)
    return [
        WorkspaceUnitary.from_array((c2, target), cv),
        WorkspaceUnitary.from_array((c1, c2), cx),
        WorkspaceUnitary.from_array((c2, target), cv_dagger),
        WorkspaceUnitary.from_array((c1, c2), cx),
        WorkspaceUnitary.from_array((c1, target), cv),
    ]


def checked_oracle(gate: COracle, scratch: int, one: int, check: int, ancilla: int) -> list[Gate]:
    """
    Gate sequence applying ``gate`` only on configs where its target is 0 or eta_c(source).

    Args:
        gate: Oracle gate to guard
        scratch: Register that is zero before and after the sequence
        one: Workspace bit held at 1
        check: Workspace bit that is zero before and after the sequence
        ancilla: Workspace bit that is zero before and after the sequence

    Returns:
        The guarded sequence; its four quarter swaps multiply to phase 1
    """
    quarter = math.pi / 2
    c, j, k = gate.color, gate.source, gate.target
    swap = CSwapRot(quarter, one, k, scratch)
    sequence: list[Gate] = [
        swap,
        COracle(c, one, j, k),
        ZeroCheck(scratch, check),
        EqCheck(k, scratch, check),
        swap,
    ]
    sequence += toffoli(check, gate.control, ancilla)
    sequence.append(COracle(c, ancilla, j, k))
    sequence += toffoli(check, gate.control, ancilla)
    sequence += [
        swap,
        EqCheck(k, scratch, check),
        ZeroCheck(scratch, check),
        COracle(c, one, j, k),
        swap,
    ]
    return sequence


def wrap_genuine(circuit: Circuit) -> Circuit:
    """
    Guard every oracle gate of a circuit with the checking sequence.

    Adds one scratch register (last) and three workspace bits (one, check, ancilla,
    in that order after the circuit's own bits).
    """
    scratch = circuit.registers
    one, check, ancilla = circuit.workspace, circuit.workspace + 1, circuit.workspace + 2
    set_one = WorkspaceUnitary.from_array((one,), PAULI_X)
    gates: list[Gate] = [set_one]
    for gate in circuit.gates:
        if isinstance(gate, COracle):
            gates += checked_oracle(gate, scratch, one, check, ancilla)
        else:
            gates.append(gate)
    gates.append(set_one)
    return Circuit(
        n=circuit.n,
        registers=circuit.registers + 1,
        workspace=circuit.workspace + 3,
        gates=tuple(gates),
        space=circuit.space,
        c_star=circuit.c_star,
    )


def strip_ancillas(state: SparseState, registers: int, workspace: int) -> SparseState:
    """
    Drop trailing registers and workspace bits that a wrapper added.

    Raises:
        ValueError: If any dropped register or bit is nonzero in the support
    """
    keep = (1 << workspace) - 1

    def strip(config: BasisConfig) -> BasisConfig:
        if any(config.regs[registers:]) or config.work >> workspace:
            raise ValueError(f"ancillas not returned to zero in {config}")
        return BasisConfig(config.regs[:registers], config.work & keep)

    return state.map_configs(strip)
