"""Spectral community detection on RBF-weighted Katz proximity.

The main entry point is :func:`detect`, configured by
:class:`PipelineConfig`. Graphs are read with :func:`read_graph` or
:func:`parse_edge_list`.
"""

__version__ = "0.1.0"

from .datasets import load_dataset, toy_graph
from .exceptions import (ConvergenceError, InputError, KatzDivergenceError,
                         NumericalError, ParseError, RbfScoreError, SingularMatrixError)
from .graph_io import (AffinityMatrix, Graph, affinity, attach_labels, parse_edge_list,
                       parse_labels, permute_nodes, read_graph, serialize_edge_list)
from .katz import KatzConfig, katz, katz_series
from .kmeans import KmeansConfig, kmeans
from .linalg import (EigenBundle, condition_number, eig_symmetric, solve_linear,
                     spectral_radius, top_by_magnitude)
from .metrics import modularity, nmi
from .rbf import RbfChoice, RbfKind, masked_rbf_matrix, rbf_value, select_shaping_parameter
from .spectral import (DetectionResult, PipelineConfig, RatioMode, SignalReport, Variant,
                       classify_signal, detect, ratio_features, regularized_laplacian)
from .synth import PlantedConfig, SweepSpec, benchmark_matrix, generate_planted, sweep

__all__ = [
    "__version__",
    "AffinityMatrix",
    "ConvergenceError",
    "DetectionResult",
    "EigenBundle",
    "Graph",
    "InputError",
    "KatzConfig",
    "KatzDivergenceError",
    "KmeansConfig",
    "NumericalError",
    "ParseError",
    "PipelineConfig",
    "PlantedConfig",
    "RatioMode",
    "RbfChoice",
    "RbfKind",
    "RbfScoreError",
    "SignalReport",
    "SingularMatrixError",
    "SweepSpec",
    "Variant",
    "affinity",
    "attach_labels",
    "benchmark_matrix",
    "classify_signal",
    "condition_number",
    "detect",
    "eig_symmetric",
    "generate_planted",
    "katz",
    "katz_series",
    "kmeans",
    "load_dataset",
    "masked_rbf_matrix",
    "modularity",
    "nmi",
    "parse_edge_list",
    "parse_labels",
    "permute_nodes",
    "ratio_features",
    "rbf_value",
    "read_graph",
    "regularized_laplacian",
    "select_shaping_parameter",
    "serialize_edge_list",
    "solve_linear",
    "spectral_radius",
    "sweep",
    "top_by_magnitude",
    "toy_graph",
]
