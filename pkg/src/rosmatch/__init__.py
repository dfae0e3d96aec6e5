"""Approximate maximum matching in random-order edge streams.

The streaming algorithm keeps a subgraph H of bounded edge-degree while
reading a short prefix of the stream, then collects the underfull edges of
the rest and returns an exact maximum matching of the union.
"""

from .edcs import EdcsState, RemovalTrace, check_edcs, new_edcs, verify_edcs
from .generators import GeneratorSpec, generate_graph
from .graph import (
    Graph,
    Matching,
    StreamOrder,
    make_graph,
    parse_edge_list,
    permute,
    serialize_edge_list,
    subgraph_union,
    validate,
)
from .matching import (
    MatcherKind,
    brute_force_mu,
    greedy_maximal,
    max_matching,
    max_matching_bipartite,
    max_matching_general,
    verify_matching,
)
from .stream import Params, RunResult, derive_params, run, run_graph

__all__ = [
    "EdcsState", "RemovalTrace", "check_edcs", "new_edcs", "verify_edcs",
    "GeneratorSpec", "generate_graph",
    "Graph", "Matching", "StreamOrder", "make_graph", "parse_edge_list", "permute",
    "serialize_edge_list", "subgraph_union", "validate",
    "MatcherKind", "brute_force_mu", "greedy_maximal", "max_matching",
    "max_matching_bipartite", "max_matching_general", "verify_matching",
    "Params", "RunResult", "derive_params", "run", "run_graph",
]

__version__ = "0.1.0"
