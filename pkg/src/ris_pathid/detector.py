"""Binary hypothesis detection between the two alternating patterns.

Decide "dynamic area coherent" when the observed channel power exceeds a
threshold. The threshold is placed between the two mean powers so that
the average of miss and false-alarm probabilities (equal priors) is
minimal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channel import cascaded_channel
from .patterns import RisPartition, RisPattern
from .scene import Scene, build_layout
from .stats import PowerDistribution, channel_model, power_cdf, power_distribution

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class ThresholdResult(NamedTuple):
    threshold: float
    p_error: float


@dataclass(frozen=True)
class DetectionReport:
    """Detection figures for one scenario.

    ``threshold`` and the two means are in channel-power units, ``g_d_db``
    is the mean-power ratio in dB, ``r_ratio`` the dynamic-area fraction.
    """

    threshold: float
    p_error: float
    r_ratio: float
    g_d_db: float
    mean_h1: float
    mean_h2: float


def error_probability(gamma: float, dist1: PowerDistribution, dist2: PowerDistribution,
                      *, priors: tuple[float, float] = (0.5, 0.5)) -> float:
    """Average of P{power < gamma | pattern 1} and P{power > gamma | pattern 2}.

    Priors are kept as an internal knob; every exposed surface uses the
    equal-prior case.
    """
    p1, p2 = priors
    return p1 * float(power_cdf(gamma, dist1)) + p2 * (1.0 - float(power_cdf(gamma, dist2)))


def optimal_threshold(dist1: PowerDistribution, dist2: PowerDistribution) -> ThresholdResult:
    """Minimise the detection error probability over [mean2, mean1].

    Golden-section search, refined until the bracket is below 1e-6 of the
    initial interval. The objective is treated as unimodal on the
    interval; tests validate this against an exhaustive grid scan.
    """
    mu1, mu2 = dist1.mean, dist2.mean
    if mu1 <= mu2:
        raise ValueError(
            "degenerate separation: pattern 1 must have strictly larger mean power"
        )
    lo, hi = mu2, mu1
    tol = 1e-6 * (mu1 - mu2)
    c = hi - _INV_GOLDEN * (hi - lo)
    d = lo + _INV_GOLDEN * (hi - lo)
    fc = error_probability(c, dist1, dist2)
    fd = error_probability(d, dist1, dist2)
    while hi - lo > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_GOLDEN * (hi - lo)
            fc = error_probability(c, dist1, dist2)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_GOLDEN * (hi - lo)
            fd = error_probability(d, dist1, dist2)
    gamma = 0.5 * (lo + hi)
    return ThresholdResult(gamma, error_probability(gamma, dist1, dist2))


def random_part_ratio(partition: RisPartition) -> float:
    """Fraction of elements in the dynamic area."""
    return len(partition.a3) / partition.num_elements


def relative_power_difference(dist1: PowerDistribution, dist2: PowerDistribution) -> float:
    """dB ratio of the mean channel powers under the two patterns."""
    return 10.0 * math.log10(dist1.mean / dist2.mean)


def pattern_power_distributions(scene: Scene, partition: RisPartition
                                ) -> tuple[PowerDistribution, PowerDistribution]:
    """Analytic power distributions for both patterns of one scenario."""
    ch = cascaded_channel(scene, build_layout(scene))
    noise_variance = scene.noise_variance
    dist1 = power_distribution(
        channel_model(ch, partition, RisPattern.DYNAMIC_COHERENT, noise_variance))
    dist2 = power_distribution(
        channel_model(ch, partition, RisPattern.DYNAMIC_RANDOM, noise_variance))
    return dist1, dist2


def evaluate_scenario(scene: Scene, partition: RisPartition) -> DetectionReport:
    """Full analytic detection report: optimal threshold, error probability,
    dynamic-area ratio and relative power difference."""
    dist1, dist2 = pattern_power_distributions(scene, partition)
    gamma, p_error = optimal_threshold(dist1, dist2)
    return DetectionReport(
        threshold=gamma,
        p_error=p_error,
        r_ratio=random_part_ratio(partition),
        g_d_db=relative_power_difference(dist1, dist2),
        mean_h1=dist1.mean,
        mean_h2=dist2.mean,
    )
