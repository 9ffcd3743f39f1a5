"""Welded tree graphs: construction, validation, permutations and fixtures."""

from weldedtree.graph.builder import ColoringError, build_canonical
from weldedtree.graph.fixtures import FIXTURES, load_fixture, reference_label, reference_n3
from weldedtree.graph.permutation import (
    ColorPreservingPermutation,
    LazyPermutation,
    PermutationError,
    apply_permutation,
    enumerate_permutations,
    sample_permutation,
)
from weldedtree.graph.structure import distance_to_weld, gamma_closed_form, gamma_count
from weldedtree.graph.validate import ValidationReport, validate_welded_tree
from weldedtree.graph.welded import WeldedTree, label_width

__all__ = [
    "ColoringError",
    "ColorPreservingPermutation",
    "FIXTURES",
    "LazyPermutation",
    "PermutationError",
    "ValidationReport",
    "WeldedTree",
    "apply_permutation",
    "build_canonical",
    "distance_to_weld",
    "enumerate_permutations",
    "gamma_closed_form",
    "gamma_count",
    "label_width",
    "load_fixture",
    "reference_label",
    "reference_n3",
    "sample_permutation",
    "validate_welded_tree",
]
