"""Expansion, almost automorphisms and cluster groups of sofic approximations."""

__version__ = "0.1.0"

from .core_graph import (
    GeneratorSet,
    LabeledGraph,
    RootedBall,
    VertexSet,
    boundary,
    cayley_graph,
    good_vertices,
    is_connected,
    is_simple,
    make_labeled_graph,
    parse_graph,
    product_graph,
    restrict_labels,
    rooted_ball,
    rooted_ball_isomorphic,
    serialize_graph,
)
from .expansion import CheegerEstimate, SpectralData, cheeger_bounds, cheeger_exact, lambda2, sweep_cut
from .sofic import SoficReport, Word, defect, random_permutation_model, sofic_report, word_action
from .almost_auto import (
    DefectReport,
    ImprovementConfig,
    ImprovementTrace,
    VertexMap,
    compose,
    defect_of_map,
    graph_of_map,
    improve,
    invert,
    label_automorphisms,
)
from .clusters import (
    Cluster,
    ClusterGroup,
    LefCertificate,
    cluster_group,
    cluster_maps,
    dichotomy_check,
    group_invariants,
    hamming,
    lef_certificate,
)

__all__ = [
    "GeneratorSet",
    "LabeledGraph",
    "RootedBall",
    "VertexSet",
    "boundary",
    "cayley_graph",
    "good_vertices",
    "is_connected",
    "is_simple",
    "make_labeled_graph",
    "parse_graph",
    "product_graph",
    "restrict_labels",
    "rooted_ball",
    "rooted_ball_isomorphic",
    "serialize_graph",
    "CheegerEstimate",
    "SpectralData",
    "cheeger_bounds",
    "cheeger_exact",
    "lambda2",
    "sweep_cut",
    "SoficReport",
    "Word",
    "defect",
    "random_permutation_model",
    "sofic_report",
    "word_action",
    "DefectReport",
    "ImprovementConfig",
    "ImprovementTrace",
    "VertexMap",
    "compose",
    "defect_of_map",
    "graph_of_map",
    "improve",
    "invert",
    "label_automorphisms",
    "Cluster",
    "ClusterGroup",
    "LefCertificate",
    "cluster_group",
    "cluster_maps",
    "dichotomy_check",
    "group_invariants",
    "hamming",
    "lef_certificate",
    "__version__",
]
