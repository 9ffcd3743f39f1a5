"""Tests for welded tree construction, structure and permutations."""

import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from weldedtree.graph import (
    ColorPreservingPermutation,
    LazyPermutation,
    PermutationError,
    WeldedTree,
    apply_permutation,
    build_canonical,
    distance_to_weld,
    gamma_closed_form,
    gamma_count,
    label_width,
    load_fixture,
    reference_label,
    sample_permutation,
    validate_welded_tree,
)
from weldedtree.graph.permutation import (
    check_color_preserving,
    enumerate_permutations,
    permutation_count,
)
from weldedtree.graph.structure import leaf_suffix_bound, leaf_suffix_counts, upward_colors
from weldedtree.interfaces import Color, Side


def heights_and_seeds(fast_height=8, fast_seeds=3, seeds=20):
    """(n, seed) pairs for n = 1..12; large heights and extra seeds are slow."""
    return [
        pytest.param(n, s, marks=pytest.mark.slow)
        if n > fast_height or s >= fast_seeds
        else (n, s)
        for n in range(1, 13)
        for s in range(seeds)
    ]


def edge_set(g):
    return {(frozenset((u, v)), c) for u, v, c in g.edges}


class TestBuildCanonical:
    """Test canonical welded tree construction."""

    @pytest.mark.parametrize("n, seed", heights_and_seeds(seeds=5))
    def test_valid_for_every_height(self, n, seed):
        """Test every height up to 12 produces a valid graph."""
        g = build_canonical(n, seed=seed)
        report = validate_welded_tree(g)
        assert report.ok, str(report)
        assert g.vertex_count == 2 ** (n + 2) - 2

    def test_deterministic(self):
        """Test the same seed gives byte-identical serializations."""
        assert build_canonical(5, seed=7).to_json() == build_canonical(5, seed=7).to_json()

    def test_seed_changes_graph(self):
        """Test different seeds give different labelings."""
        assert build_canonical(5, seed=1).labels != build_canonical(5, seed=2).labels

    def test_rejects_bad_height(self):
        """Test heights below one are rejected."""
        with pytest.raises(ValueError):
            build_canonical(0)

    def test_label_width(self):
        """Test labels widen for tiny trees so reserved strings fit."""
        assert label_width(1) == 4
        assert label_width(2) == 5
        assert label_width(3) == 6
        assert label_width(10) == 20

    def test_reserved_labels_unused(self, small_graph):
        """Test no vertex carries 0, NOEDGE or INVALID."""
        reserved = {small_graph.zero_label, small_graph.noedge_label, small_graph.invalid_label}
        assert reserved.isdisjoint(small_graph.labels)
        assert small_graph.noedge_label == (1 << small_graph.label_width) - 1
        assert small_graph.invalid_label == small_graph.noedge_label - 1

    def test_roots_miss_the_same_color(self, small_graph):
        """Test ENTRANCE and EXIT both lack c_*."""
        c_star = small_graph.missing_color
        assert small_graph.missing_color_at(small_graph.exit) is c_star

    def test_json_roundtrip(self, small_graph):
        """Test serialization preserves the graph."""
        assert WeldedTree.from_json(small_graph.to_json()) == small_graph

    def test_from_dict_rejects_missing_fields(self, small_graph):
        """Test malformed graph documents raise ValueError."""
        data = small_graph.to_dict()
        del data["edges"]
        with pytest.raises(ValueError):
            WeldedTree.from_dict(data)


class TestReferenceFixture:
    """Test the hand-labeled height-3 graph."""

    def test_fixture_is_valid(self, ref_graph):
        """Test the fixture passes validation."""
        assert validate_welded_tree(ref_graph).ok

    def test_roots_and_missing_color(self, ref_graph):
        """Test the documented roots and c_*."""
        assert ref_graph.missing_color is Color.GREEN
        assert ref_graph.entrance_label == 0b100000
        assert ref_graph.exit_label == 0b100001

    def test_named_labels(self, ref_graph):
        """Test named vertices resolve to their labels."""
        assert reference_label("Lb") == 0b101000
        assert reference_label("Rbrb") == 0b100100
        assert reference_label("Lb") in ref_graph.index_of

    def test_load_fixture(self):
        """Test fixtures load by name and unknown names fail."""
        assert load_fixture("reference-n3").n == 3
        with pytest.raises(ValueError):
            load_fixture("no-such-graph")


class TestStructure:
    """Test per-level color counts and leaf suffixes."""

    @pytest.mark.parametrize("n, seed", heights_and_seeds())
    def test_level_color_counts(self, n, seed):
        """Test gamma counts match the closed form on both trees."""
        g = build_canonical(n, seed=seed)
        c_star = g.missing_color
        for side in Side:
            for i in range(1, n + 1):
                for c in Color.ordered():
                    assert gamma_count(g, side, c, i) == gamma_closed_form(i, c, c_star)

    def test_closed_form_values(self):
        """Test the first levels of the closed form."""
        c_star = Color.GREEN
        assert gamma_closed_form(1, Color.GREEN, c_star) == 0
        assert gamma_closed_form(1, Color.RED, c_star) == 1
        assert gamma_closed_form(2, Color.GREEN, c_star) == 2
        assert gamma_closed_form(2, Color.BLUE, c_star) == 1

    @pytest.mark.parametrize("n, seed", heights_and_seeds(seeds=5))
    def test_leaf_suffix_bound(self, n, seed):
        """Test no color suffix is shared by too many leaves."""
        g = build_canonical(n, seed=seed)
        for side in Side:
            for j in range(1, n + 1):
                counts = leaf_suffix_counts(g, side, j)
                assert max(counts.values()) <= leaf_suffix_bound(n, j)
                assert sum(counts.values()) == 2**n

    def test_upward_colors_of_named_leaf(self, ref_graph):
        """Test the root-to-leaf colors of Lbrb."""
        leaf = ref_graph.index_of[reference_label("Lbrb")]
        assert upward_colors(ref_graph, leaf, 3) == (Color.BLUE, Color.RED, Color.BLUE)

    def test_distance_to_weld(self, ref_graph):
        """Test distances of roots and WELD vertices."""
        assert distance_to_weld(ref_graph, ref_graph.entrance) == 3
        assert distance_to_weld(ref_graph, ref_graph.exit) == 3
        leaf = ref_graph.index_of[reference_label("Rbgr")]
        assert distance_to_weld(ref_graph, leaf) == 0

    def test_subtrees_partition_leaves(self, ref_graph):
        """Test height-1 subtrees at n=3 each hold two leaves."""
        groups = ref_graph.subtree_leaves
        assert len(groups) == 8
        assert all(len(leaves) == 2 for leaves in groups.values())


class TestPermutations:
    """Test color-preserving WELD permutations."""

    def test_permutation_count_reference(self, ref_graph):
        """Test (3! 3! 2!)^2 permutations exist at n=3."""
        assert permutation_count(ref_graph) == 5184

    def test_enumeration_is_exhaustive(self):
        """Test enumeration yields every permutation once at n=2."""
        g = build_canonical(2, seed=0)
        seen = {tuple(sorted(p.mapping.items())) for p in enumerate_permutations(g)}
        assert len(seen) == permutation_count(g)

    @given(seed=st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=25, deadline=None)
    def test_sampled_permutations_preserve_classes(self, seed):
        """Test sampled permutations keep the graph valid."""
        g = build_canonical(4, seed=2)
        sigma = sample_permutation(g, random.Random(seed))
        check_color_preserving(g, sigma)
        assert validate_welded_tree(apply_permutation(g, sigma)).ok

    @pytest.mark.slow
    def test_thousand_permutations_valid_at_height_nine(self):
        """Test 1000 sampled permutations at n=9 all give valid graphs."""
        g = build_canonical(9, seed=0)
        rng = random.Random(9)
        for _ in range(1000):
            sigma = sample_permutation(g, rng)
            check_color_preserving(g, sigma)
            report = validate_welded_tree(apply_permutation(g, sigma))
            assert report.ok, str(report)

    def test_sampled_images_uniform(self):
        """Test a fixed WELD vertex is sent uniformly over its class at n=6."""
        g = build_canonical(6, seed=1)
        members = max(g.weld_groups.values(), key=len)
        v = members[0]
        position = {u: k for k, u in enumerate(members)}
        observed = np.zeros(len(members))
        rng = random.Random(6)
        draws = 200 * len(members)
        for _ in range(draws):
            observed[position[sample_permutation(g, rng)(v)]] += 1
        assert chisquare(observed).pvalue > 1e-3

    @given(
        first=st.integers(min_value=0, max_value=10**6),
        second=st.integers(min_value=0, max_value=10**6),
    )
    @settings(max_examples=25, deadline=None)
    def test_apply_respects_composition(self, first, second):
        """Test permuting by rho then sigma equals permuting once by sigma after rho."""
        g = build_canonical(4, seed=2)
        rho = sample_permutation(g, random.Random(first))
        sigma = sample_permutation(g, random.Random(second))
        stepwise = apply_permutation(apply_permutation(g, rho), sigma)
        at_once = apply_permutation(g, sigma.compose(rho))
        assert edge_set(stepwise) == edge_set(at_once)
        assert validate_welded_tree(at_once).ok

    def test_cross_class_swap_rejected(self, ref_graph):
        """Test a swap between classes is not color-preserving."""
        groups = ref_graph.weld_groups
        left_red = groups[(Side.LEFT, Color.RED)][0]
        left_blue = groups[(Side.LEFT, Color.BLUE)][0]
        with pytest.raises(PermutationError):
            apply_permutation(ref_graph, ColorPreservingPermutation.swap(left_red, left_blue))

    def test_non_bijection_rejected(self):
        """Test a mapping with repeated images raises."""
        with pytest.raises(ValueError):
            ColorPreservingPermutation({1: 2, 2: 2})

    def test_compose_with_inverse_swap(self):
        """Test a swap composed with itself is the identity."""
        swap = ColorPreservingPermutation.swap(3, 4)
        assert swap.compose(swap).is_identity


class TestLazyPermutation:
    """Test on-demand permutation draws."""

    @given(seed=st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=50, deadline=None)
    def test_forward_inverse_consistent(self, seed):
        """Test inverse undoes forward and images stay in class."""
        g = build_canonical(4, seed=1)
        lazy = LazyPermutation(g, random.Random(seed))
        for v in g.weld_class:
            u = lazy.forward(v)
            assert g.weld_class[u] == g.weld_class[v]
            assert lazy.inverse(u) == v

    @given(seed=st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=50, deadline=None)
    def test_full_reveal_is_bijection(self, seed):
        """Test mixing forward and inverse lookups still reveals a bijection."""
        g = build_canonical(3, seed=4)
        lazy = LazyPermutation(g, random.Random(seed))
        members = sorted(g.weld_class)
        for k, v in enumerate(members):
            if k % 2:
                lazy.inverse(v)
            else:
                lazy.forward(v)
        images = [lazy.forward(v) for v in members]
        assert sorted(images) == members
        assert lazy.revealed == len(members)

    def test_non_weld_vertices_fixed(self, ref_graph):
        """Test vertices off the WELD map to themselves."""
        lazy = LazyPermutation(ref_graph, random.Random(0))
        assert lazy.forward(ref_graph.entrance) == ref_graph.entrance
        assert lazy.inverse(ref_graph.exit) == ref_graph.exit

    def test_first_image_uniform(self, ref_graph):
        """Test the first draw in a size-3 class is uniform."""
        members = ref_graph.weld_groups[(Side.LEFT, Color.RED)]
        assert len(members) == 3
        trials = 3000
        fixed = sum(
            LazyPermutation(ref_graph, random.Random(k)).forward(members[0]) == members[0]
            for k in range(trials)
        )
        assert abs(fixed / trials - 1 / 3) < 0.04
