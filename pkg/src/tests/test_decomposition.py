"""Tests for good/bad classification and the per-step decomposition."""

import io
import math

import pytest

from weldedtree.address import AddressCodec, address_tree_labels
from weldedtree.decomposition import (
    Classifier,
    classify_config,
    classify_labels,
    decompose_run,
    measurement_distribution,
    success_bound,
    success_probability,
    ugly_height_sweep,
)
from weldedtree.graph import reference_label
from weldedtree.graph.fixtures import REFERENCE_N3_LABELS
from weldedtree.interfaces import Color, Space, Verdict, parse_colors
from weldedtree.simulator import (
    AddressSpace,
    BasisConfig,
    Circuit,
    COracle,
    WorkspaceUnitary,
    path_circuit,
    random_genuine_circuit,
    run_prefix,
    translate_circuit,
)
from weldedtree.simulator.gates import HADAMARD

LEFT_TREE = [reference_label(name) for name in REFERENCE_N3_LABELS if name.startswith("L")]


class TestClassifyLabels:
    """Test the vertex-space good/bad predicate."""

    def test_small_tree_is_good(self, ref_oracle):
        """Test a rooted path is good."""
        labels = [reference_label(x) for x in ("L", "Lb", "Lbg")]
        assert classify_labels(labels, ref_oracle) is Verdict.GOOD

    def test_exit_is_bad(self, ref_oracle):
        """Test storing EXIT is bad."""
        assert classify_labels([ref_oracle.entrance, ref_oracle.exit], ref_oracle) is Verdict.BAD

    def test_whole_left_tree_is_good(self, ref_oracle):
        """Test a binary tree is a forest."""
        assert classify_labels(LEFT_TREE, ref_oracle) is Verdict.GOOD

    def test_cycle_through_weld_is_bad(self, ref_oracle):
        """Test Rbgr closes a cycle through Lbrb and Lrbg."""
        labels = LEFT_TREE + [reference_label("Rbgr")]
        assert classify_labels(labels, ref_oracle) is Verdict.BAD

    def test_reserved_strings_ignored(self, ref_oracle):
        """Test zero, NOEDGE and INVALID do not affect the verdict."""
        special = ref_oracle.special
        labels = [special.entrance, special.zero, special.noedge, special.invalid]
        assert classify_labels(labels, ref_oracle) is Verdict.GOOD


class TestClassifyConfig:
    """Test address-space classification through resolved labels."""

    def test_aliasing_addresses_are_bad(self, ref_oracle):
        """Test two addresses naming Lrbg make the config bad."""
        codec = AddressCodec(5, Color.GREEN)
        rbg = parse_colors("rbg")
        around = parse_colors("brbgb")
        regs = (codec.empty, codec.encode(rbg), codec.encode(around))
        config = BasisConfig(regs, 0)
        assert classify_config(config, Space.ADDRESS, ref_oracle, codec) is Verdict.BAD
        lrbg = reference_label("Lrbg")
        vertex_config = BasisConfig((ref_oracle.entrance, lrbg, lrbg), 0)
        assert classify_config(vertex_config, Space.VERTEX, ref_oracle) is Verdict.GOOD

    def test_address_needs_codec(self, ref_oracle):
        """Test address classification without a codec fails."""
        with pytest.raises(ValueError):
            classify_config(BasisConfig((1,), 0), Space.ADDRESS, ref_oracle)

    def test_junk_strings_ignored(self, ref_oracle):
        """Test strings decoding to INVALID do not make a config bad."""
        codec = AddressCodec(4, Color.GREEN)
        config = BasisConfig((codec.empty, 0b11110000), 0)
        assert classify_config(config, Space.ADDRESS, ref_oracle, codec) is Verdict.GOOD

    def test_classifier_caches_by_stored_set(self, ref_oracle):
        """Test configs with the same stored strings share a verdict."""
        classifier = Classifier(Space.VERTEX, ref_oracle)
        a = BasisConfig((ref_oracle.entrance, ref_oracle.exit), 0)
        b = BasisConfig((ref_oracle.exit, ref_oracle.entrance), 1)
        assert classifier.is_bad(a)
        assert classifier.is_bad(b)
        assert len(classifier._cache) == 1


class TestDecomposeRun:
    """Test the step-by-step good/bad/ugly split."""

    def test_exit_walk(self, ref_oracle):
        """Test the bgbgbrb walk turns bad exactly at the last step."""
        circuit = path_circuit(3, parse_colors("bgbgbrb"))
        split = decompose_run(circuit, ref_oracle)
        assert split.checks.ok
        assert len(split.steps) == len(circuit) + 1
        rows = split.rows()
        assert rows[-2]["psi_good"] == pytest.approx(1.0)
        assert rows[-1]["psi_bad"] == pytest.approx(1.0)
        assert rows[-1]["phi_bad"] == pytest.approx(1.0)
        assert success_probability(split, ref_oracle) == pytest.approx(1.0)
        assert ref_oracle.meter == 0

    def test_csv_layout(self, ref_oracle):
        """Test the per-step table has a header and one row per prefix."""
        split = decompose_run(path_circuit(3, parse_colors("bg")), ref_oracle)
        out = io.StringIO()
        split.write_csv(out)
        lines = out.getvalue().splitlines()
        assert lines[0] == "i,phi_good,phi_bad,phi_ugly,psi_good,psi_bad,psi_ugly,max_residual"
        assert len(lines) == 1 + len(split.steps)

    @pytest.mark.lemma
    @pytest.mark.parametrize(
        "index", [*range(4), *(pytest.param(i, marks=pytest.mark.slow) for i in range(4, 50))]
    )
    def test_random_circuits_pass_identities(self, small_oracle, index):
        """Test every asserted identity holds on random genuine circuits at n=4, p=12."""
        circuit = random_genuine_circuit(small_oracle, 3, 2, 12, seed=21, index=index)
        assert circuit.p_max == 12
        split = decompose_run(circuit, small_oracle)
        assert split.checks.failures() == []
        final = split.final
        assert final.psi_total.norm() == pytest.approx(1.0)
        assert final.phi_good.norm() == pytest.approx(final.psi_good.norm(), abs=1e-9)
        assert success_probability(split, small_oracle) <= success_bound(4, split.p)

    @pytest.mark.lemma
    @pytest.mark.parametrize("index", range(3))
    def test_reference_graph_identities(self, ref_oracle, index):
        """Test identities on the small reference graph, where bad parts are common."""
        circuit = random_genuine_circuit(ref_oracle, 4, 2, 12, seed=8, index=index)
        split = decompose_run(circuit, ref_oracle)
        assert split.checks.ok
        names = {r.name for r in split.checks.results}
        assert "identity.conservation" in names
        assert "bound.psi-ugly-cumulative" in names

    def test_success_bound(self):
        """Test the closed form of the success bound."""
        assert success_bound(6, 2) == pytest.approx(4 * 16 * 0.5)

    def test_success_bound_is_asserted(self, ref_oracle):
        """Test the final bad mass is checked against the success bound."""
        split = decompose_run(path_circuit(3, parse_colors("bgbgbrb")), ref_oracle)
        (check,) = [r for r in split.checks.results if r.name == "bound.success"]
        assert check.asserted
        assert check.value == pytest.approx(1.0)
        assert check.limit >= success_bound(3, split.p)


class TestHeightSweep:
    """Test one circuit family decomposed at several tree heights."""

    def test_rows_and_checks(self):
        """Test rows come back in height order with their checks."""
        rows, table = ugly_height_sweep([4, 3], 2, 1, 4, circuits=2, seed=3)
        assert [r.n for r in rows] == [3, 4]
        assert all(r.circuits == 2 for r in rows)
        assert all(r.max_success <= r.bound for r in rows)
        names = [r.name for r in table.results]
        assert names.count("sweep.success-bound") == 2
        assert names.count("sweep.ugly-nonincreasing") == 1

    def test_rejects_empty_family(self):
        with pytest.raises(ValueError):
            ugly_height_sweep([3], 2, 1, 4, circuits=0)

    @pytest.mark.lemma
    @pytest.mark.slow
    def test_ugly_mass_does_not_grow_with_height(self):
        """Test the mean final psi_ugly mass is non-increasing over n = 3, 6, 9."""
        rows, table = ugly_height_sweep([3, 6, 9], 3, 2, 12, circuits=10, seed=21)
        assert table.failures() == []
        ugly = [r.mean_psi_ugly for r in rows]
        assert all(b <= a + 1e-9 for a, b in zip(ugly, ugly[1:]))
        for row in rows:
            assert row.max_success <= success_bound(row.n, row.p)


class TestMeasurementDistribution:
    """Test exact resolved outcome distributions."""

    def test_half_controlled_step(self, ref_oracle):
        """Test a Hadamard-controlled blue step lands on Lb with probability 1/2."""
        circuit = Circuit(
            3,
            2,
            1,
            (WorkspaceUnitary.from_array((0,), HADAMARD), COracle(Color.BLUE, 0, 0, 1)),
        )
        translated = translate_circuit(circuit, Color.GREEN)
        codec = AddressCodec(translated.p_max, Color.GREEN)
        state = run_prefix(translated, 2, AddressSpace(codec))
        dist = measurement_distribution(state, ref_oracle, codec)
        entrance = ref_oracle.entrance
        assert dist[(entrance, 0)] == pytest.approx(0.5)
        assert dist[(entrance, reference_label("Lb"))] == pytest.approx(0.5)
        assert math.fsum(dist.values()) == pytest.approx(1.0)

    def test_tree_labels_resolve(self, ref_oracle):
        """Test every depth-3 address resolves to a distinct real vertex."""
        codec = AddressCodec(3, Color.GREEN)
        tuples = [t for t in address_tree_labels(3, Color.GREEN) if isinstance(t, tuple)]
        config = BasisConfig(tuple(codec.encode(t) for t in tuples), 0)
        assert classify_config(config, Space.ADDRESS, ref_oracle, codec) is Verdict.GOOD
