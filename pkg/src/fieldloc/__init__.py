"""fieldloc: localization of silent sensor networks from thresholded
background-field records.

Sensors that never communicate can still be localized: each one records a
binary time series of a spatially correlated random field, the pairwise
empirical cumulants of those records rank neighbors by proximity, and hop
distances to a few known-position beacons pin down absolute coordinates.
"""

from .analytic import (
    CovarianceCurve,
    bigclouds_covariance_fit,
    boolean_covariance,
    coverage_probability,
    lens_area,
    montecarlo_covariance,
)
from .deploy import CORNERS, Deployment, Point2, compute_kn, deploy_sensors, place_beacons
from .estimation import (
    CumulantMatrix,
    PairStatistics,
    cumulant_matrix,
    empirical_correlation,
    lagged_cumulant,
    pair_cumulant,
)
from .estimators import CumulantAffinity, CumulantLocalizer
from .fields import (
    BigClouds,
    BooleanClouds,
    ObservationMatrix,
    RandomWalkers,
    generate_observations,
    observe_walkers,
    sample_big_clouds,
    sample_boolean_clouds,
    simulate_walkers,
    step_walkers,
)
from .graph import (
    HopDistanceTable,
    KnnQualityReport,
    ProximityGraph,
    build_geometric_graph,
    build_proximity_graph,
    geometric_radius,
    hop_distances,
    hop_scale,
    knn_quality,
    scale_hops,
    true_knn_edges,
)
from .localization import (
    DegenerateGeometryError,
    ErrorReport,
    LocalizationResult,
    MultilaterationFit,
    error_report,
    localize_all,
    multilaterate,
)
from .rng import RngStream
from .scenario import ConfigError, ScenarioConfig, config_from_dict, config_to_dict, load_config, save_config

__version__ = "0.1.0"

__all__ = [
    "BigClouds",
    "BooleanClouds",
    "CORNERS",
    "ConfigError",
    "CovarianceCurve",
    "CumulantAffinity",
    "CumulantLocalizer",
    "CumulantMatrix",
    "DegenerateGeometryError",
    "Deployment",
    "ErrorReport",
    "HopDistanceTable",
    "KnnQualityReport",
    "LocalizationResult",
    "MultilaterationFit",
    "ObservationMatrix",
    "PairStatistics",
    "Point2",
    "ProximityGraph",
    "RandomWalkers",
    "RngStream",
    "ScenarioConfig",
    "bigclouds_covariance_fit",
    "boolean_covariance",
    "build_geometric_graph",
    "build_proximity_graph",
    "compute_kn",
    "config_from_dict",
    "config_to_dict",
    "coverage_probability",
    "cumulant_matrix",
    "deploy_sensors",
    "empirical_correlation",
    "error_report",
    "generate_observations",
    "geometric_radius",
    "hop_distances",
    "hop_scale",
    "knn_quality",
    "lagged_cumulant",
    "lens_area",
    "load_config",
    "localize_all",
    "montecarlo_covariance",
    "multilaterate",
    "observe_walkers",
    "pair_cumulant",
    "place_beacons",
    "sample_big_clouds",
    "sample_boolean_clouds",
    "save_config",
    "scale_hops",
    "simulate_walkers",
    "step_walkers",
    "true_knn_edges",
]
