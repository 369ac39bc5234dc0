"""Uniform spanning tree samplers: random-walk baselines, a shortcutting sampler, and exact oracles."""

from .graph import Multigraph, boundary, condition, connected_components, interior, read_edgelist
from .orchestrator import SamplerConfig, sample_spanning_tree, sample_spanning_tree_baseline

__all__ = [
    "Multigraph",
    "SamplerConfig",
    "boundary",
    "condition",
    "connected_components",
    "interior",
    "read_edgelist",
    "sample_spanning_tree",
    "sample_spanning_tree_baseline",
]
