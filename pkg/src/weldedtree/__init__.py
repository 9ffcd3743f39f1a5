"""Welded tree graphs, genuine rooted circuit simulation and classical hardness experiments."""

__version__ = "0.1.0"

from weldedtree.config import WeldedTreeConfig
from weldedtree.factory import create_graph, create_oracle
from weldedtree.interfaces import Color, GenuinenessPolicy, Side, Space, Verdict, WeldedTreeError
from weldedtree.oracle import Oracle

__all__ = [
    "Color",
    "GenuinenessPolicy",
    "Oracle",
    "Side",
    "Space",
    "Verdict",
    "WeldedTreeConfig",
    "WeldedTreeError",
    "create_graph",
    "create_oracle",
]
