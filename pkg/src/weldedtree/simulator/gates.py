"""The genuine gate set and circuits built from it."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from weldedtree.interfaces import Color, Space

UNITARY_TOLERANCE = 1e-12


def _check_index(name: str, value: int) -> None:
    if value < 0:
        raise ValueError(f"{name} index must be non-negative, got {value}")


@dataclass(frozen=True)
class COracle:
    """XOR eta_c(register source) into register target when workspace bit control is 1."""

    color: Color
    control: int
    source: int
    target: int

    def __post_init__(self) -> None:
        for name in ("control", "source", "target"):
            _check_index(name, getattr(self, name))
        if self.source == self.target:
            raise ValueError("oracle source and target registers must differ")

    @property
    def registers(self) -> tuple[int, ...]:
        return (self.source, self.target)

    @property
    def workspace(self) -> tuple[int, ...]:
        return (self.control,)


@dataclass(frozen=True)
class CSwapRot:
    """cos(theta) identity + i sin(theta) swap on registers (first, second), controlled."""

    theta: float
    control: int
    first: int
    second: int

    def __post_init__(self) -> None:
        for name in ("control", "first", "second"):
            _check_index(name, getattr(self, name))
        if self.first == self.second:
            raise ValueError("swap registers must differ")
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")

    @property
    def registers(self) -> tuple[int, ...]:
        return (self.first, self.second)

    @property
    def workspace(self) -> tuple[int, ...]:
        return (self.control,)


@dataclass(frozen=True)
class EqCheck:
    """Flip workspace bit target when registers first and second hold equal strings."""

    first: int
    second: int
    target: int

    def __post_init__(self) -> None:
        for name in ("first", "second", "target"):
            _check_index(name, getattr(self, name))
        if self.first == self.second:
            raise ValueError("compared registers must differ")

    @property
    def registers(self) -> tuple[int, ...]:
        return (self.first, self.second)

    @property
    def workspace(self) -> tuple[int, ...]:
        return (self.target,)


@dataclass(frozen=True)
class NoEdgeCheck:
    """Flip workspace bit target when the register holds the no-edge string."""

    register: int
    target: int

    def __post_init__(self) -> None:
        _check_index("register", self.register)
        _check_index("target", self.target)

    @property
    def registers(self) -> tuple[int, ...]:
        return (self.register,)

    @property
    def workspace(self) -> tuple[int, ...]:
        return (self.target,)


@dataclass(frozen=True)
class ZeroCheck:
    """Flip workspace bit target when the register holds the all-zero string."""

    register: int
    target: int

    def __post_init__(self) -> None:
        _check_index("register", self.register)
        _check_index("target", self.target)

    @property
    def registers(self) -> tuple[int, ...]:
        return (self.register,)

    @property
    def workspace(self) -> tuple[int, ...]:
        return (self.target,)


@dataclass(frozen=True)
class WorkspaceUnitary:
    """
    One- or two-qubit unitary on workspace bits.

    For two qubits, ``qubits[0]`` is the more significant bit of the row index.

    Args:
        qubits: Workspace bit indices
        matrix: Row-major complex entries, 2x2 or 4x4
    """

    qubits: tuple[int, ...]
    matrix: tuple[tuple[complex, ...], ...]
    array: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.qubits) not in (1, 2):
            raise ValueError("workspace unitaries act on one or two qubits")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("workspace qubits must be distinct")
        for q in self.qubits:
            _check_index("qubit", q)
        dim = 2 ** len(self.qubits)
        array = np.array(self.matrix, dtype=complex)
        if array.shape != (dim, dim):
            raise ValueError(f"matrix must be {dim}x{dim}, got shape {array.shape}")
        deviation = np.max(np.abs(array.conj().T @ array - np.eye(dim)))
        if deviation > UNITARY_TOLERANCE:
            raise ValueError(f"matrix is not unitary (deviation {deviation:.3g})")
        object.__setattr__(self, "matrix", tuple(tuple(complex(x) for x in row) for row in array))
        object.__setattr__(self, "array", array)

    @classmethod
    def from_array(cls, qubits: tuple[int, ...], array: np.ndarray) -> WorkspaceUnitary:
        return cls(tuple(qubits), tuple(tuple(complex(x) for x in row) for row in np.asarray(array)))

    @property
    def registers(self) -> tuple[int, ...]:
        return ()

    @property
    def workspace(self) -> tuple[int, ...]:
        return self.qubits


Gate = Union[COracle, CSwapRot, EqCheck, NoEdgeCheck, ZeroCheck, WorkspaceUnitary]

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def controlled(u: np.ndarray) -> np.ndarray:
    """blockdiag(I, U): U on the second qubit when the first is 1."""
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = u
    return out


@dataclass(frozen=True)
class Circuit:
    """
    A genuine circuit.

    Args:
        n: Height of the welded tree the circuit runs on
        registers: Number of label registers
        workspace: Number of workspace qubits
        gates: Gates in application order
        space: VERTEX for the circuit as written, ADDRESS for its translation
        c_star: Missing color the address translation was built for
    """

    n: int
    registers: int
    workspace: int
    gates: tuple[Gate, ...]
    space: Space = Space.VERTEX
    c_star: Optional[Color] = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.registers < 1:
            raise ValueError("a circuit needs at least one register")
        if self.workspace < 0:
            raise ValueError("workspace width must be non-negative")
        object.__setattr__(self, "gates", tuple(self.gates))
        for i, gate in enumerate(self.gates):
            if any(r >= self.registers for r in gate.registers):
                raise ValueError(f"gate {i} uses a register index >= {self.registers}")
            if any(q >= self.workspace for q in gate.workspace):
                raise ValueError(f"gate {i} uses a workspace index >= {self.workspace}")
        if self.space is Space.ADDRESS and self.c_star is None:
            raise ValueError("address-space circuits need c_star")

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def p_max(self) -> int:
        """Address tree depth: enough for every register and every oracle step."""
        return max(2, self.registers, len(self.gates))

    @property
    def oracle_count(self) -> int:
        return sum(1 for g in self.gates if isinstance(g, COracle))

    def prefix(self, i: int) -> Circuit:
        if not 0 <= i <= len(self.gates):
            raise ValueError(f"prefix length {i} outside 0..{len(self.gates)}")
        return replace(self, gates=self.gates[:i])
