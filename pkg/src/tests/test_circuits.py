"""Tests for circuit files and circuit generators."""

import json

import pytest

from weldedtree.interfaces import Color, GenuinenessPolicy
from weldedtree.simulator import (
    CircuitFormatError,
    CircuitSimulator,
    COracle,
    VertexSpace,
    load_circuit,
    path_circuit,
    random_genuine_circuit,
    save_circuit,
)
from weldedtree.simulator.circuits import circuit_to_dict, loads_circuit


class TestCircuitFiles:
    """Test the JSON circuit format."""

    def test_save_load(self, tmp_path, ref_oracle):
        """Test a saved circuit loads back equal."""
        circuit = random_genuine_circuit(ref_oracle, 3, 2, 8, seed=3)
        path = tmp_path / "circuit.json"
        save_circuit(circuit, str(path))
        assert load_circuit(str(path)) == circuit

    def test_document_fields(self):
        """Test the document carries format tag and sizes."""
        data = circuit_to_dict(path_circuit(3, [Color.BLUE]))
        assert data["format"] == "weldedtree-circuit"
        assert data["version"] == 1
        assert data["registers"] == 2
        assert data["gates"][1] == {
            "type": "oracle", "color": "blue", "control": 0, "source": 0, "target": 1,
        }

    @pytest.mark.parametrize(
        "text",
        [
            "not json",
            "[]",
            json.dumps({"format": "other", "version": 1}),
            json.dumps({"format": "weldedtree-circuit", "version": 99}),
            json.dumps({"format": "weldedtree-circuit", "version": 1, "n": 3, "registers": 2}),
            json.dumps(
                {
                    "format": "weldedtree-circuit", "version": 1, "n": 3, "registers": 2,
                    "workspace": 1, "gates": [{"type": "teleport"}],
                }
            ),
            json.dumps(
                {
                    "format": "weldedtree-circuit", "version": 1, "n": 3, "registers": 2,
                    "workspace": 1,
                    "gates": [{"type": "oracle", "color": "blue", "control": 0, "source": 0,
                               "target": 5}],
                }
            ),
        ],
    )
    def test_malformed_documents(self, text):
        """Test every malformed document raises CircuitFormatError."""
        with pytest.raises(CircuitFormatError):
            loads_circuit(text)


class TestGenerators:
    """Test path and random circuit generators."""

    def test_path_circuit_layout(self):
        """Test register i+1 receives the neighbor of register i."""
        circuit = path_circuit(3, [Color.BLUE, Color.GREEN])
        assert circuit.registers == 3
        assert circuit.gates[2] == COracle(Color.GREEN, 0, 1, 2)
        assert circuit.oracle_count == 2

    def test_random_deterministic(self, ref_oracle):
        """Test the same (seed, index) gives the same circuit."""
        a = random_genuine_circuit(ref_oracle, 3, 2, 10, seed=5, index=2)
        b = random_genuine_circuit(ref_oracle, 3, 2, 10, seed=5, index=2)
        c = random_genuine_circuit(ref_oracle, 3, 2, 10, seed=5, index=3)
        assert a == b
        assert a != c

    @pytest.mark.parametrize("index", range(5))
    def test_random_is_genuine(self, small_oracle, index):
        """Test random circuits never violate genuineness when run."""
        circuit = random_genuine_circuit(small_oracle, 4, 2, 12, seed=0, index=index)
        assert len(circuit) == 12
        simulator = CircuitSimulator(
            circuit, VertexSpace(small_oracle), policy=GenuinenessPolicy.RAISE
        )
        assert simulator.run().norm() == pytest.approx(1.0)

    def test_random_needs_room(self, ref_oracle):
        """Test too few registers or workspace bits are rejected."""
        with pytest.raises(ValueError):
            random_genuine_circuit(ref_oracle, 1, 2, 4)
        with pytest.raises(ValueError):
            random_genuine_circuit(ref_oracle, 3, 0, 4)
