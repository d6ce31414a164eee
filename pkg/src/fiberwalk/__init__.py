"""fiberwalk: degree-fixed graph sampling and exact conditional tests.

Samples multigraphs or simple graphs with a prescribed degree sequence by a
Metropolis random walk whose proposals are randomly generated basis moves,
and tests the beta random-graph model against the resulting null
distributions.  Brute-force oracles validate every component at desk scale.
"""

from .betamodel import (
    BetaFit,
    DegenerateFitError,
    chi_square,
    clustering_coefficient,
    fit_beta_mle,
    triangle_count,
)
from .graphs import (
    Capacities,
    DegreeSequence,
    EdgeVector,
    Graph,
    InputFormatError,
    InvalidEdgeError,
    Move,
    apply_move,
    degree_sequence,
    is_move,
    read_degree_file,
    read_edge_list,
)
from .graver import (
    BudgetTooSmallError,
    GenMode,
    WeightedTree,
    build_weighted_tree,
    sample_graver_element,
    tree_from_walk,
    tree_to_walk,
)
from .mcmc import (
    ChainConfig,
    ChainConfigError,
    ChainReport,
    ChainState,
    estimate_pvalue,
    iter_chain,
    mh_step,
    run_chain,
)
from .oracles import (
    InstanceTooLargeError,
    connectivity_check,
    enumerate_fiber,
    is_primitive_bruteforce,
    sample_moves_to_saturation,
)
from .walks import ClosedWalk, WalkError, is_primitive, is_square_free, vertex_multiplicity, walk_to_move

__version__ = "0.1.0"

__all__ = [
    "BetaFit",
    "BudgetTooSmallError",
    "Capacities",
    "ChainConfig",
    "ChainConfigError",
    "ChainReport",
    "ChainState",
    "ClosedWalk",
    "DegenerateFitError",
    "DegreeSequence",
    "EdgeVector",
    "GenMode",
    "Graph",
    "InputFormatError",
    "InstanceTooLargeError",
    "InvalidEdgeError",
    "Move",
    "WalkError",
    "WeightedTree",
    "apply_move",
    "build_weighted_tree",
    "chi_square",
    "clustering_coefficient",
    "connectivity_check",
    "degree_sequence",
    "enumerate_fiber",
    "estimate_pvalue",
    "fit_beta_mle",
    "is_move",
    "is_primitive",
    "is_primitive_bruteforce",
    "is_square_free",
    "iter_chain",
    "mh_step",
    "read_degree_file",
    "read_edge_list",
    "run_chain",
    "sample_graver_element",
    "sample_moves_to_saturation",
    "tree_from_walk",
    "tree_to_walk",
    "triangle_count",
    "vertex_multiplicity",
    "walk_to_move",
]
