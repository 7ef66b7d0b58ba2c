"""Graph-based semi-supervised classification of empirical measures.

Builds Wasserstein / linear-OT distance graphs over point-cloud samples,
solves the constrained graph p-Dirichlet problem, and checks the
discrete-to-continuum energy consistency numerically at desk scale.
"""

__version__ = "0.1.0"

from .dirichlet import graph_dirichlet_energy, graph_p_laplacian
from .graphs import (
    Kernel,
    WeightedGraph,
    connectivity_epsilon,
    epsilon_graph,
    is_connected,
    knn_graph,
    pairwise_distances,
)
from .laplace_learn import LearnResult, predict_and_score, solve_p, solve_p2
from .lot import LotEmbedding, lot_distance, lot_embed
from .measures import (
    EmpiricalMeasure,
    GaussianFamilySpec,
    LabeledDataset,
    empirical_from_points,
    sample_gaussian_family,
    sample_translation_family,
)
from .tlp import FunctionOverMeasure, tlp_distance
from .transport import TransportMap, TransportPlan, barycentric_map, brute_force_ot, w2_exact, winf

__all__ = [
    "EmpiricalMeasure",
    "FunctionOverMeasure",
    "GaussianFamilySpec",
    "Kernel",
    "LabeledDataset",
    "LearnResult",
    "LotEmbedding",
    "TransportMap",
    "TransportPlan",
    "WeightedGraph",
    "barycentric_map",
    "brute_force_ot",
    "connectivity_epsilon",
    "empirical_from_points",
    "epsilon_graph",
    "graph_dirichlet_energy",
    "graph_p_laplacian",
    "is_connected",
    "knn_graph",
    "lot_distance",
    "lot_embed",
    "pairwise_distances",
    "predict_and_score",
    "sample_gaussian_family",
    "sample_translation_family",
    "solve_p",
    "solve_p2",
    "tlp_distance",
    "w2_exact",
    "winf",
]
