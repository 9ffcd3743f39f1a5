"""Circuit files and circuit generators."""

from __future__ import annotations

import json
import logging
import math
from typing import Any, Sequence

from scipy.stats import unitary_group

from weldedtree.interfaces import Color, GenuinenessPolicy, WeldedTreeError
from weldedtree.oracle import Oracle
from weldedtree.simulator.engine import GenuinenessViolation, apply_gate, initial_state
from weldedtree.simulator.gates import (
    PAULI_X,
    Circuit,
    COracle,
    CSwapRot,
    EqCheck,
    Gate,
    NoEdgeCheck,
    WorkspaceUnitary,
    ZeroCheck,
)
from weldedtree.simulator.spaces import VertexSpace
from weldedtree.streams import numpy_stream, stream

logger = logging.getLogger(__name__)

FORMAT = "weldedtree-circuit"
FORMAT_VERSION = 1


class CircuitFormatError(WeldedTreeError):
    """Raised for circuit documents that do not follow the circuit file format."""


def gate_to_dict(gate: Gate) -> dict[str, Any]:
    if isinstance(gate, COracle):
        return {
            "type": "oracle",
            "color": gate.color.value,
            "control": gate.control,
            "source": gate.source,
            "target": gate.target,
        }
    if isinstance(gate, CSwapRot):
        return {
            "type": "swap",
            "theta": gate.theta,
            "control": gate.control,
            "first": gate.first,
            "second": gate.second,
        }
    if isinstance(gate, EqCheck):
        return {"type": "eq", "first": gate.first, "second": gate.second, "target": gate.target}
    if isinstance(gate, NoEdgeCheck):
        return {"type": "noedge", "register": gate.register, "target": gate.target}
    if isinstance(gate, ZeroCheck):
        return {"type": "zero", "register": gate.register, "target": gate.target}
    if isinstance(gate, WorkspaceUnitary):
        return {
            "type": "unitary",
            "qubits": list(gate.qubits),
            "matrix": [[[x.real, x.imag] for x in row] for row in gate.matrix],
        }
    raise TypeError(f"not a genuine gate: {gate!r}")


def gate_from_dict(data: dict[str, Any]) -> Gate:
    kind = data.get("type")
    if kind == "oracle":
        return COracle(
            Color.parse(data["color"]), int(data["control"]), int(data["source"]), int(data["target"])
        )
    if kind == "swap":
        return CSwapRot(
            float(data["theta"]), int(data["control"]), int(data["first"]), int(data["second"])
        )
    if kind == "eq":
        return EqCheck(int(data["first"]), int(data["second"]), int(data["target"]))
    if kind == "noedge":
        return NoEdgeCheck(int(data["register"]), int(data["target"]))
    if kind == "zero":
        return ZeroCheck(int(data["register"]), int(data["target"]))
    if kind == "unitary":
        matrix = tuple(tuple(complex(re, im) for re, im in row) for row in data["matrix"])
        return WorkspaceUnitary(tuple(int(q) for q in data["qubits"]), matrix)
    raise CircuitFormatError(f"unknown gate type {kind!r}")


def circuit_to_dict(circuit: Circuit) -> dict[str, Any]:
    return {
        "format": FORMAT,
        "version": FORMAT_VERSION,
        "n": circuit.n,
        "registers": circuit.registers,
        "workspace": circuit.workspace,
        "gates": [gate_to_dict(g) for g in circuit.gates],
    }


def circuit_from_dict(data: dict[str, Any]) -> Circuit:
    """
    Parse a circuit document.

    Raises:
        CircuitFormatError: On a wrong format tag, missing fields or invalid gates
    """
    if data.get("format") != FORMAT:
        raise CircuitFormatError(f"not a {FORMAT} document")
    if data.get("version") != FORMAT_VERSION:
        raise CircuitFormatError(f"unsupported circuit format version {data.get('version')!r}")
    try:
        gates = tuple(gate_from_dict(g) for g in data["gates"])
        return Circuit(
            n=int(data["n"]),
            registers=int(data["registers"]),
            workspace=int(data["workspace"]),
            gates=gates,
        )
    except CircuitFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CircuitFormatError(f"invalid circuit document: {exc}") from exc


def dumps_circuit(circuit: Circuit) -> str:
    return json.dumps(circuit_to_dict(circuit), indent=2) + "\n"


def loads_circuit(text: str) -> Circuit:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitFormatError(f"circuit file is not JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise CircuitFormatError("circuit document must be a JSON object")
    return circuit_from_dict(data)


def load_circuit(path: str) -> Circuit:
    with open(path, "r") as f:
        return loads_circuit(f.read())


def save_circuit(circuit: Circuit, path: str) -> None:
    with open(path, "w") as f:
        f.write(dumps_circuit(circuit))


def path_circuit(n: int, colors: Sequence[Color]) -> Circuit:
    """Deterministic walk: register i+1 receives the color-c_i neighbor of register i."""
    gates: list[Gate] = [WorkspaceUnitary.from_array((0,), PAULI_X)]
    gates += [COracle(c, 0, i, i + 1) for i, c in enumerate(colors)]
    return Circuit(n=n, registers=len(colors) + 1, workspace=1, gates=tuple(gates))


_KINDS = ("oracle", "swap", "unitary", "check")
_WEIGHTS = (5, 2, 3, 1)


def random_genuine_circuit(
    oracle: Oracle,
    registers: int,
    workspace: int,
    gates: int,
    seed: int = 0,
    index: int = 0,
    max_attempts: int = 50,
    support_cap: int = 2**16,
) -> Circuit:
    """
    Random circuit whose oracle gates are compliant on every reachable config.

    Candidates are simulated in the vertex space with rootedness enforced; an oracle
    candidate that would violate genuineness is rejected and redrawn.

    Args:
        oracle: Graph the circuit must be compliant on
        registers: Register count
        workspace: Workspace width, at least 1
        gates: Gate count
        seed: Root seed
        index: Circuit index within a sweep
        max_attempts: Oracle redraws before falling back to a workspace gate
        support_cap: Support cap during generation

    Returns:
        A genuine, rooted Circuit
    """
    if workspace < 1:
        raise ValueError("random circuits need at least one workspace qubit")
    if registers < 2:
        raise ValueError("random circuits need at least two registers")
    rng = stream(seed, "circuit", index)
    np_rng = numpy_stream(seed, "circuit", index)
    space = VertexSpace(oracle)
    state = initial_state(space, registers)
    chosen: list[Gate] = []
    rejected = 0
    attempts = 0
    while len(chosen) < gates:
        kind = rng.choices(_KINDS, weights=_WEIGHTS)[0]
        if kind == "oracle" and attempts >= max_attempts:
            kind = "unitary"
        if kind == "oracle":
            j, k = rng.sample(range(registers), 2)
            candidate: Gate = COracle(
                rng.choice(Color.ordered()), rng.randrange(workspace), j, k
            )
        elif kind == "swap":
            j, k = rng.sample(range(registers), 2)
            candidate = CSwapRot(rng.uniform(0.0, math.pi), rng.randrange(workspace), j, k)
        elif kind == "unitary":
            if workspace >= 2 and rng.random() < 0.3:
                qubits = tuple(rng.sample(range(workspace), 2))
            else:
                qubits = (rng.randrange(workspace),)
            matrix = unitary_group.rvs(2 ** len(qubits), random_state=np_rng)
            candidate = WorkspaceUnitary.from_array(qubits, matrix)
        else:
            target = rng.randrange(workspace)
            r = rng.randrange(registers)
            check = rng.randrange(3)
            if check == 0:
                other = rng.choice([x for x in range(registers) if x != r])
                candidate = EqCheck(r, other, target)
            elif check == 1:
                candidate = ZeroCheck(r, target)
            else:
                candidate = NoEdgeCheck(r, target)
        try:
            state = apply_gate(
                state,
                candidate,
                space,
                policy=GenuinenessPolicy.RAISE,
                enforce_rootedness=True,
                support_cap=support_cap,
                gate_index=len(chosen),
            )
        except GenuinenessViolation:
            rejected += 1
            attempts += 1
            continue
        chosen.append(candidate)
        attempts = 0
    logger.debug("random circuit %d: %d gates, %d rejected oracle draws", index, gates, rejected)
    return Circuit(
        n=oracle.graph.n, registers=registers, workspace=workspace, gates=tuple(chosen)
    )

