"""Toolkit for identifying RIS-assisted propagation paths.

Part of the surface alternates between reinforcing the observed user and
serving others, modulating the estimated channel power. This package
models the resulting power statistics analytically, derives optimal
detection thresholds, and cross-validates everything against seeded
Monte Carlo simulation.
"""

__version__ = "0.1.0"

from .channel import (CascadedChannel, PhaseVector, cascaded_channel,
                      effective_channel, freespace_coeff, wrap_phase)
from .detector import (DetectionReport, ThresholdResult, error_probability,
                       evaluate_scenario, optimal_threshold,
                       pattern_power_distributions, random_part_ratio,
                       relative_power_difference)
from .montecarlo import (EmpiricalCdf, TrialBatch, empirical_cdf,
                         empirical_error, ks_distance, simulate_batch,
                         simulate_channel)
from .patterns import (RisPartition, RisPattern, build_pattern,
                       coherent_indices, coherent_phases, make_partition,
                       random_indices, random_phases)
from .scene import (SPEED_OF_LIGHT, ElementLayout, Scene, SceneConfigError,
                    build_layout, dbm_to_watts, distances, load_scene,
                    parse_scene, reference_scene, watts_to_dbm)
from .stats import (GaussianChannelModel, PowerDistribution,
                    SeriesTruncationError, channel_model, dynamic_sum_moments,
                    ncx2_cdf, power_cdf, power_distribution)

__all__ = [
    "__version__",
    "SPEED_OF_LIGHT",
    "CascadedChannel",
    "DetectionReport",
    "ElementLayout",
    "EmpiricalCdf",
    "GaussianChannelModel",
    "PhaseVector",
    "PowerDistribution",
    "RisPartition",
    "RisPattern",
    "Scene",
    "SceneConfigError",
    "SeriesTruncationError",
    "ThresholdResult",
    "TrialBatch",
    "build_layout",
    "build_pattern",
    "cascaded_channel",
    "channel_model",
    "coherent_indices",
    "coherent_phases",
    "dbm_to_watts",
    "distances",
    "dynamic_sum_moments",
    "effective_channel",
    "empirical_cdf",
    "empirical_error",
    "error_probability",
    "evaluate_scenario",
    "freespace_coeff",
    "ks_distance",
    "load_scene",
    "make_partition",
    "ncx2_cdf",
    "optimal_threshold",
    "parse_scene",
    "pattern_power_distributions",
    "power_cdf",
    "power_distribution",
    "random_indices",
    "random_part_ratio",
    "random_phases",
    "reference_scene",
    "relative_power_difference",
    "simulate_batch",
    "simulate_channel",
    "watts_to_dbm",
    "wrap_phase",
]
