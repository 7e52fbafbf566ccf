"""mvsom: multi-viewpoint self-organizing-map workbench.

Cluster one dataset under several feature viewpoints, train a map per
viewpoint, measure cross-viewpoint consistency via activity propagation
between maps, and chain propagations for local link-behaviour analysis.
"""

from .viewpoints import (
    DataItem,
    Dataset,
    SparseVector,
    ValidationReport,
    ViewpointMatrix,
    build_viewpoint_matrix,
    cosine_similarity,
    validate_dataset,
)
from .som import (
    Projection,
    SomMap,
    TrainingParams,
    best_matching_unit,
    default_training_params,
    load_model,
    project_data,
    quantization_error,
    save_model,
    train_som,
)
from .quality import (
    QualityReport,
    ScanResult,
    f_measure,
    map_recall_precision,
    peculiar_features,
    scan_map_sizes,
    scan_table,
)
from .topology import InformationArea, dominant_label, label_nodes, zone_map
from .propagation import (
    Activation,
    ChainStep,
    ConsistencyMatrix,
    ConsistencyReport,
    PropagationResult,
    activate,
    chain_propagation,
    consistency_matrix,
    dispersion,
    node_posterior,
    propagate,
    propagation_consistency,
)
from .ingest import (
    ParseError,
    SiteRecord,
    SyntheticSpec,
    filter_kernel,
    generate_site_corpus,
    generate_synthetic,
    load_dataset,
    merge_site_tables,
    records_to_viewpoints,
    refinement_dataset,
    restrict_links,
    save_dataset,
)

__version__ = "0.1.0"
