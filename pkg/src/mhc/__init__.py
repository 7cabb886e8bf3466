"""Multi-view hierarchical clustering over integrated cosine distances.

Build a hierarchy of nested partitions with :func:`fit` (no tuning
parameters), then extract an exact cluster count with :func:`cut`.
"""
from ._version import __version__
from .agglomerate import (
    ClusterRepresentatives,
    NeighborGraph,
    build_graph,
    compute_representatives,
    connected_components,
    nearest_from_distance_matrix,
    nearest_neighbors,
    nearest_neighbors_exact,
    nearest_neighbors_fast,
)
from .dataset import (
    MultiViewDataset,
    SyntheticSpec,
    generate_synthetic,
    load_dataset,
    load_labels,
)
from .distance import (
    cosine_distance,
    integrate_distances,
    view_distance_matrix,
)
from .errors import ValidationError
from .hierarchy import Hierarchy, closest_level, cut, fit, refine_to_k
from .metrics import accuracy, f_measure, nmi, optimal_assignment
from .partition import Partition

__all__ = [
    "ClusterRepresentatives",
    "Hierarchy",
    "MultiViewDataset",
    "NeighborGraph",
    "Partition",
    "SyntheticSpec",
    "ValidationError",
    "__version__",
    "accuracy",
    "build_graph",
    "closest_level",
    "compute_representatives",
    "connected_components",
    "cosine_distance",
    "cut",
    "f_measure",
    "fit",
    "generate_synthetic",
    "integrate_distances",
    "load_dataset",
    "load_labels",
    "nearest_from_distance_matrix",
    "nearest_neighbors",
    "nearest_neighbors_exact",
    "nearest_neighbors_fast",
    "nmi",
    "optimal_assignment",
    "refine_to_k",
    "view_distance_matrix",
]
