"""Ordinal walk distances, enlargements and galaxies of transfinite wgraphs."""
from .ordinal import OMEGA, Ordinal, nat_diff, nat_sum, omega_pow_scaled, parse, render
from .wgraph import ARROW, INCONCLUSIVE, NodeRef, Presentation, WGraph, parse_node_ref, parse_rank
from .catalog import get_graph
from .wdistance import LengthModel, Scope, shortest_walk, unbounded_walk, wdist
from .enlargement import FilterDecision, HypernodeSpec, Verdict, decide, hyperdist, parse_spec
from .galaxy import (
    Closeness,
    classify,
    closer,
    ladder,
    limitedly_distant,
    non_principal_witness,
    partial_order_check,
    principal_membership,
)

__version__ = "0.1.0"
