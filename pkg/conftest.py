"""Shared pytest fixtures for unit and end-to-end tests."""

import sys
from pathlib import Path

import pytest

root_path = Path(__file__).parent.resolve()
src_path = root_path / "src"
if str(src_path) not in sys.path:
    sys.path.insert(0, str(src_path))

from weldedtree.graph import build_canonical, reference_n3  # noqa: E402
from weldedtree.oracle import Oracle  # noqa: E402


@pytest.fixture(scope="session")
def ref_graph():
    """Hand-labeled height-3 graph (c_* = green)."""
    return reference_n3()


@pytest.fixture
def ref_oracle(ref_graph):
    """Fresh canonical oracle on the reference graph, meter at zero."""
    return Oracle(ref_graph)


@pytest.fixture(scope="session")
def small_graph():
    return build_canonical(4, seed=1)


@pytest.fixture
def small_oracle(small_graph):
    return Oracle(small_graph)
