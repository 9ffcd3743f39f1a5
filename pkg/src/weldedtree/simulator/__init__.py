"""Sparse simulation of genuine circuits in the vertex and address spaces."""

from weldedtree.simulator.circuits import (
    CircuitFormatError,
    load_circuit,
    path_circuit,
    random_genuine_circuit,
    save_circuit,
)
from weldedtree.simulator.engine import (
    CircuitSimulator,
    GenuinenessViolation,
    SupportCapExceeded,
    apply_gate,
    initial_state,
    run_prefix,
    translate_circuit,
)
from weldedtree.simulator.gadgets import strip_ancillas, wrap_genuine
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
from weldedtree.simulator.spaces import AddressSpace, VertexSpace, is_address_rooted, is_rooted
from weldedtree.simulator.state import BasisConfig, SparseState

__all__ = [
    "AddressSpace",
    "BasisConfig",
    "COracle",
    "CSwapRot",
    "Circuit",
    "CircuitFormatError",
    "CircuitSimulator",
    "EqCheck",
    "Gate",
    "GenuinenessViolation",
    "NoEdgeCheck",
    "SparseState",
    "SupportCapExceeded",
    "VertexSpace",
    "WorkspaceUnitary",
    "ZeroCheck",
    "apply_gate",
    "initial_state",
    "is_address_rooted",
    "is_rooted",
    "load_circuit",
    "path_circuit",
    "random_genuine_circuit",
    "run_prefix",
    "save_circuit",
    "strip_ancillas",
    "translate_circuit",
    "wrap_genuine",
]
