"""Tests for the classical transcript simulation and subtree samplers."""

import json
import random

import pytest

from weldedtree.address import EMPTY, NOEDGE
from weldedtree.classical import (
    FixedSubtreeSampler,
    MalformedSubtreeError,
    RandomSubtreeSampler,
    check_subtree,
    children,
    evaluate_embedding,
    has_entrance_exit_path,
    load_subtree,
    path_subtree,
    random_subtree,
    resolved_length,
    run_subtree_sampler,
    simulate_classical,
    subtree_embedding,
    transcript_states,
)
from weldedtree.decomposition import measurement_distribution
from weldedtree.graph import build_canonical, reference_label
from weldedtree.interfaces import Color, parse_colors
from weldedtree.oracle import Oracle
from weldedtree.simulator import (
    Circuit,
    COracle,
    WorkspaceUnitary,
    path_circuit,
    random_genuine_circuit,
)
from weldedtree.simulator.gates import HADAMARD

G = Color.GREEN


def half_step_circuit():
    return Circuit(
        3, 2, 1, (WorkspaceUnitary.from_array((0,), HADAMARD), COracle(Color.BLUE, 0, 0, 1))
    )


class TestTranscript:
    """Test the query-free address-space run."""

    def test_costs_two_queries(self, ref_oracle):
        """Test only finding c_* touches the oracle."""
        circuit = random_genuine_circuit(ref_oracle, 3, 2, 8, seed=1)
        codec, states = transcript_states(circuit, ref_oracle)
        assert ref_oracle.meter == 2
        assert len(states) == len(circuit)
        assert codec.c_star is G
        assert codec.p_max == circuit.p_max

    def test_costs_two_queries_when_red_is_missing(self):
        """Test the transcript cost does not depend on which color c_* is."""
        g = next(
            g for g in (build_canonical(6, seed=s) for s in range(100))
            if g.missing_color is Color.RED
        )
        oracle = Oracle(g)
        circuit = path_circuit(6, parse_colors("bg"))
        transcript_states(circuit, oracle)
        assert oracle.meter == 2
        (run,) = simulate_classical(circuit, Oracle(g))
        assert run.transcript_queries == 2

    def test_resolved_length(self, ref_oracle):
        """Test resolution cost is the total tuple length."""
        codec, states = transcript_states(path_circuit(3, parse_colors("bgb")), ref_oracle)
        (config,) = states[-1].support()
        assert resolved_length(config, codec) == 1 + 2 + 3


class TestSimulateClassical:
    """Test sampled-and-resolved classical runs."""

    def test_path_walk_outputs(self, ref_oracle):
        """Test a deterministic walk resolves step by step to the vertex run."""
        circuit = path_circuit(3, parse_colors("bgbg"))
        (run,) = simulate_classical(circuit, ref_oracle, seed=0)
        assert len(run.samples) == len(circuit)
        assert [s.queries for s in run.samples] == [0, 1, 3, 6, 10]
        assert run.transcript_queries == 2
        assert run.total_queries == 22
        assert run.total_queries <= 2 + circuit.p_max**3
        assert run.final_labels[-1] == reference_label("Rbrb")

    def test_only_first_run_pays_transcript(self, ref_oracle):
        """Test later trials are charged their resolutions only."""
        runs = simulate_classical(path_circuit(3, parse_colors("b")), ref_oracle, trials=3)
        assert [r.transcript_queries for r in runs] == [2, 0, 0]
        assert ref_oracle.meter == sum(r.total_queries for r in runs)

    def test_seeded(self, ref_oracle):
        """Test the same seed reproduces the samples."""
        circuit = half_step_circuit()
        a = simulate_classical(circuit, ref_oracle, seed=4, trials=20)
        b = simulate_classical(circuit, ref_oracle, seed=4, trials=20)
        assert [r.final_labels for r in a] == [r.final_labels for r in b]

    def test_half_step_frequency(self, ref_oracle):
        """Test the controlled blue step is observed about half the time."""
        runs = simulate_classical(half_step_circuit(), ref_oracle, seed=0, trials=2000)
        hits = sum(r.final_labels[1] == reference_label("Lb") for r in runs)
        assert abs(hits / 2000 - 0.5) < 0.05

    def test_matches_exact_distribution(self, ref_oracle):
        """Test sampled final outputs follow the exact measurement distribution."""
        circuit = random_genuine_circuit(ref_oracle, 3, 2, 6, seed=2, index=1)
        codec, states = transcript_states(circuit, ref_oracle)
        exact = measurement_distribution(states[-1], ref_oracle, codec)
        trials = 4000
        runs = simulate_classical(circuit, ref_oracle, seed=9, trials=trials)
        counts = {}
        for run in runs:
            counts[run.final_labels] = counts.get(run.final_labels, 0) + 1
        keys = set(exact) | set(counts)
        tv = 0.5 * sum(abs(exact.get(k, 0.0) - counts.get(k, 0) / trials) for k in keys)
        assert tv < 0.1

    def test_workers_do_not_change_runs(self, ref_oracle, ref_graph):
        """Test runs and charged queries are identical inline and in a process pool."""
        circuit = half_step_circuit()
        inline = simulate_classical(circuit, ref_oracle, seed=3, trials=12)
        pooled_oracle = Oracle(ref_graph)
        pooled = simulate_classical(circuit, pooled_oracle, seed=3, trials=12, workers=2)
        assert [r.final_labels for r in inline] == [r.final_labels for r in pooled]
        assert [r.total_queries for r in inline] == [r.total_queries for r in pooled]
        assert pooled_oracle.meter == ref_oracle.meter

    @pytest.mark.slow
    @pytest.mark.parametrize("index", range(3))
    def test_matches_exact_distribution_at_scale(self, small_oracle, index):
        """Test 1e5 sampled outputs at n=4, p=8 are within TV 0.02 of the exact law."""
        circuit = random_genuine_circuit(small_oracle, 3, 2, 8, seed=5, index=index)
        assert circuit.p_max <= 8
        codec, states = transcript_states(circuit, small_oracle)
        exact = measurement_distribution(states[-1], small_oracle, codec)
        trials = 100_000
        runs = simulate_classical(circuit, small_oracle, seed=index, trials=trials, workers=2)
        counts = {}
        for run in runs:
            counts[run.final_labels] = counts.get(run.final_labels, 0) + 1
        keys = set(exact) | set(counts)
        tv = 0.5 * sum(abs(exact.get(k, 0.0) - counts.get(k, 0) / trials) for k in keys)
        assert tv < 0.02

    def test_exit_comes_with_path(self, ref_oracle):
        """Test any sample storing EXIT also stores a path to it."""
        runs = simulate_classical(path_circuit(3, parse_colors("bgbgbrb")), ref_oracle)
        for sample in runs[0].samples:
            if ref_oracle.exit in sample.labels:
                assert has_entrance_exit_path(sample.labels, ref_oracle)


class TestEntranceExitPath:
    """Test path detection in stored labels."""

    def test_connected(self, ref_oracle):
        names = ["L", "Lb", "Lbg", "Lbgb", "Rbrb", "Rbr", "Rb", "R"]
        assert has_entrance_exit_path([reference_label(x) for x in names], ref_oracle)

    def test_disconnected(self, ref_oracle):
        assert not has_entrance_exit_path([ref_oracle.entrance, ref_oracle.exit], ref_oracle)
        assert not has_entrance_exit_path([ref_oracle.entrance], ref_oracle)


class TestSubtrees:
    """Test address subtrees and their embeddings."""

    def test_embedding_costs_one_query_per_vertex(self, ref_oracle):
        """Test the walk subtree resolves with one query per non-root address."""
        tree = path_subtree(parse_colors("bgbg"))
        labels = subtree_embedding(ref_oracle, tree)
        assert ref_oracle.meter == 4
        assert labels[EMPTY] == ref_oracle.entrance
        assert labels[parse_colors("bgbg")] == reference_label("Rbrb")

    def test_exit_found(self, ref_oracle):
        """Test the exit walk subtree reports EXIT."""
        labels = subtree_embedding(ref_oracle, path_subtree(parse_colors("bgbgbrb")))
        assert evaluate_embedding(labels, ref_oracle) == (True, False)

    def test_cycle_found(self, ref_oracle):
        """Test two addresses of Lrbg are reported as a cycle."""
        tree = path_subtree(parse_colors("rbg")) | path_subtree(parse_colors("brbgb"))
        labels = subtree_embedding(ref_oracle, tree)
        assert evaluate_embedding(labels, ref_oracle) == (False, True)

    @pytest.mark.parametrize(
        "tree",
        [
            {(Color.BLUE,)},
            {EMPTY, (Color.BLUE, Color.RED)},
            {EMPTY, (G,)},
            {EMPTY, NOEDGE},
            {EMPTY, (Color.BLUE,), (Color.BLUE, Color.BLUE)},
        ],
    )
    def test_malformed_subtrees(self, tree):
        """Test non-subtrees are rejected."""
        with pytest.raises(MalformedSubtreeError):
            check_subtree(tree, G)

    def test_children(self):
        """Test root and tuple children."""
        assert children(EMPTY, G) == [(Color.RED,), (Color.BLUE,)]
        assert children((Color.RED,), G) == [(Color.RED, G), (Color.RED, Color.BLUE)]
        assert children(NOEDGE, G) == []

    @pytest.mark.parametrize("size", [1, 2, 7, 30])
    def test_random_subtree(self, size):
        """Test random subtrees have the requested size and are parent-closed."""
        tree = random_subtree(random.Random(size), size, G)
        assert len(tree) == size
        check_subtree(tree, G)

    def test_random_subtree_size(self):
        with pytest.raises(ValueError):
            random_subtree(random.Random(0), 0, G)

    def test_samplers(self, ref_oracle):
        """Test the sampler wrappers and outcome accounting."""
        fixed = FixedSubtreeSampler(path_subtree(parse_colors("bgbgbrb")))
        outcome = run_subtree_sampler(fixed, ref_oracle, random.Random(0))
        assert outcome.success
        assert outcome.found_exit and not outcome.found_cycle
        assert outcome.queries == 7
        sampled = RandomSubtreeSampler(5, G)(random.Random(1))
        assert len(sampled) == 5


class TestLoadSubtree:
    """Test subtree files."""

    def test_load(self, tmp_path):
        path = tmp_path / "tree.json"
        path.write_text(json.dumps(["", "b", "bg", "r"]))
        assert load_subtree(str(path)) == {
            EMPTY, (Color.BLUE,), (Color.BLUE, G), (Color.RED,),
        }

    @pytest.mark.parametrize("text", ["{not json", json.dumps({"a": 1}), json.dumps(["", "bx"])])
    def test_malformed(self, tmp_path, text):
        path = tmp_path / "tree.json"
        path.write_text(text)
        with pytest.raises(MalformedSubtreeError):
            load_subtree(str(path))
