"""Separation machinery: canonical separations, breakers, hub-free and general a-b separators."""

from .banana import ab_separator, clique_menger, diminduction, hub_partition
from .canonical import canonical_separation, central_bag
from .constants import THEORY, PipelineConstants
from .hubfree import ab_separator_hubfree, chordal_partition, dangerous_triple_check, purity_check
from .rebalance import rebalance_separator
from .separators import SeparatorReport, exact_min_clique_separator
from .stars import cooperative_check, lift_separator, safe_vertices, star_separations_and_core
from .triples import breaker_census, classify_minimal_connected, find_triple_witness, local_to_global

__all__ = [
    "THEORY", "PipelineConstants", "SeparatorReport", "ab_separator", "ab_separator_hubfree", "breaker_census",
    "canonical_separation", "central_bag", "chordal_partition", "classify_minimal_connected", "clique_menger",
    "cooperative_check", "dangerous_triple_check", "diminduction", "exact_min_clique_separator",
    "find_triple_witness", "hub_partition", "lift_separator", "local_to_global", "purity_check",
    "rebalance_separator", "safe_vertices", "star_separations_and_core",
]
