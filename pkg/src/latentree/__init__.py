"""Gaussian latent tree models recovered from pairwise leaf correlations."""
__version__ = "0.1.0"

from ._backend import BACKEND
from .builder import (
    ConsistencyReport,
    LabelError,
    build_topology,
    consistency_check,
    topology_isomorphic,
    verify_topology,
)
from .model import (
    CorrelationMatrix,
    CovarianceMatrix,
    DegenerateModelWarning,
    DegenerateVariableError,
    GenuineDependencyError,
    InconsistencyError,
    LatentTreeError,
    LinearGaussian,
    NotStarDecomposable,
    NotTreeDecomposable,
    ShapeError,
    Tolerances,
    Topology,
    TreeModel,
    ValidationReport,
    covariance_to_correlation,
    tree_is_valid,
    validate_correlation_matrix,
)
from .oracle import (
    SampleMatrix,
    estimate_correlations,
    joint_covariance,
    leaf_correlations,
    marginal_leaf_block,
    random_tree_model,
    sample,
)
from .params import (
    assemble_tree_model,
    canonicalize_signs,
    direct_conditional,
    recover_internal_edge,
    recover_leaf_edges,
)
from .quartet import QuartetClass, classify_quartet, classify_quartets, cross_products
from .star import StarSolution, is_star_decomposable, solve_star, solve_star_loadings, star_conditionals

__all__ = [
    "BACKEND",
    "__version__",
    "ConsistencyReport",
    "CorrelationMatrix",
    "CovarianceMatrix",
    "DegenerateModelWarning",
    "DegenerateVariableError",
    "GenuineDependencyError",
    "InconsistencyError",
    "LabelError",
    "LatentTreeError",
    "LinearGaussian",
    "NotStarDecomposable",
    "NotTreeDecomposable",
    "QuartetClass",
    "SampleMatrix",
    "ShapeError",
    "StarSolution",
    "Tolerances",
    "Topology",
    "TreeModel",
    "ValidationReport",
    "assemble_tree_model",
    "build_topology",
    "canonicalize_signs",
    "classify_quartet",
    "classify_quartets",
    "consistency_check",
    "covariance_to_correlation",
    "cross_products",
    "direct_conditional",
    "estimate_correlations",
    "is_star_decomposable",
    "joint_covariance",
    "leaf_correlations",
    "marginal_leaf_block",
    "random_tree_model",
    "recover_internal_edge",
    "recover_leaf_edges",
    "sample",
    "solve_star",
    "solve_star_loadings",
    "star_conditionals",
    "topology_isomorphic",
    "tree_is_valid",
    "validate_correlation_matrix",
    "verify_topology",
]
