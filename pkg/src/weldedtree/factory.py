"""Factories turning configuration into graphs and oracles."""

import logging
from typing import Optional

from weldedtree.config import GraphConfig, WeldedTreeConfig
from weldedtree.graph import WeldedTree, build_canonical, load_fixture, sample_permutation
from weldedtree.oracle import Oracle
from weldedtree.streams import stream

logger = logging.getLogger(__name__)


def create_graph(config: Optional[GraphConfig] = None) -> WeldedTree:
    """
    Build the graph a configuration names.

    Args:
        config: Graph section (defaults if None); a fixture name wins over n and seed

    Returns:
        The canonical welded tree
    """
    if config is None:
        config = GraphConfig()
    if config.fixture:
        g = load_fixture(config.fixture)
        logger.info("loaded fixture %s (n=%d)", config.fixture, g.n)
        return g
    return build_canonical(config.n, config.seed)


def load_graph(path: str) -> WeldedTree:
    with open(path, "r") as f:
        return WeldedTree.from_json(f.read())


def create_oracle(
    config: Optional[WeldedTreeConfig] = None, permutation: Optional[int] = None
) -> Oracle:
    """
    Oracle for the configured graph.

    Args:
        config: Full configuration (defaults if None)
        permutation: Draw index of a random color-preserving permutation from the
            run seed's ``permutation`` stream; None keeps the canonical graph

    Returns:
        Fresh Oracle with its meter at zero
    """
    if config is None:
        config = WeldedTreeConfig()
    g = create_graph(config.graph)
    if permutation is None:
        return Oracle(g)
    sigma = sample_permutation(g, stream(config.run.seed, "permutation", permutation))
    return Oracle(g, sigma)
