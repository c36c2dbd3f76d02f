"""Analytical distribution of the estimated channel and its power.

The estimated channel under either pattern is a complex Gaussian: a real
deterministic mean from the coherently aligned elements, plus a circular
random part from the uniform-phase elements and the estimation noise.
Its power, scaled by the per-component variance, follows a noncentral
chi-squared distribution with two degrees of freedom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln

from .channel import CascadedChannel
from .patterns import RisPartition, RisPattern, coherent_indices, random_indices


@dataclass(frozen=True)
class GaussianChannelModel:
    """First and second moments of the complex channel estimate.

    The real part carries the coherent mean; the imaginary part has zero
    mean. Both components share ``component_variance`` and are
    uncorrelated.
    """

    mean_real: float
    mean_imag: float
    component_variance: float

    def __post_init__(self):
        if self.mean_imag != 0.0:
            raise ValueError("mean_imag must be exactly 0 for this construction")
        if self.mean_real < 0.0:
            raise ValueError("mean_real must be nonnegative")
        if self.component_variance <= 0.0:
            raise ValueError(
                "component_variance must be positive; the noise-free case with no "
                "random-phase elements is rejected rather than modelled as a point mass"
            )


@dataclass(frozen=True)
class PowerDistribution:
    """Scaled noncentral chi-squared description of the channel power.

    power / scale follows a noncentral chi-squared distribution with 2
    degrees of freedom and the given noncentrality.
    """

    scale: float
    noncentrality: float
    dof: int = 2

    def __post_init__(self):
        if self.dof != 2:
            raise ValueError("only the two-degree-of-freedom distribution is supported")
        if self.scale <= 0.0:
            raise ValueError("scale must be positive")
        if self.noncentrality < 0.0:
            raise ValueError("noncentrality must be nonnegative")

    @property
    def mean(self) -> float:
        return self.scale * (2.0 + self.noncentrality)

    @property
    def variance(self) -> float:
        return self.scale ** 2 * (4.0 + 4.0 * self.noncentrality)


def dynamic_sum_moments(amplitudes) -> tuple[float, float]:
    """Moments of a sum of fixed-amplitude phasors with i.i.d. uniform phases.

    Returns (mean, per-component variance): the mean of both components is
    zero, the variance of each is half the sum of squared amplitudes, and
    the two components are uncorrelated.
    """
    amps = np.asarray(amplitudes, dtype=float)
    return 0.0, 0.5 * float(np.sum(amps ** 2))


def channel_model(ch: CascadedChannel, partition: RisPartition,
                  pattern: RisPattern, noise_variance: float) -> GaussianChannelModel:
    """Gaussian moments of the channel estimate for one pattern.

    The mean is the amplitude sum over the coherently aligned areas; the
    per-component variance collects half the noise variance plus half the
    squared-amplitude sum over the random-phase areas. The variance is
    accumulated area by area so the two patterns' variances differ by the
    dynamic-area term exactly.
    """
    if noise_variance < 0.0:
        raise ValueError("noise_variance must be nonnegative")
    mean = float(np.sum(ch.amplitudes[coherent_indices(partition, pattern)]))
    variance = 0.5 * noise_variance + dynamic_sum_moments(ch.amplitudes[partition.a2])[1]
    if pattern is RisPattern.DYNAMIC_RANDOM:
        variance += dynamic_sum_moments(ch.amplitudes[partition.a3])[1]
    return GaussianChannelModel(
        mean_real=mean,
        mean_imag=0.0,
        component_variance=variance,
    )


def power_distribution(model: GaussianChannelModel) -> PowerDistribution:
    """Noncentral chi-squared parameters of the channel power.

    Scale is the per-component variance; the noncentrality is the squared
    coherent mean over that variance.
    """
    return PowerDistribution(
        scale=model.component_variance,
        noncentrality=model.mean_real ** 2 / model.component_variance,
        dof=2,
    )


# Truncation control for the Poisson-mixture series: keep widening the
# window around the Poisson mode until the edge masses drop below
# _EDGE_MASS. Beyond such an edge the pmf decays at least geometrically,
# so the discarded tail is below 1e-14.
_EDGE_MASS = 1e-17
_DEFAULT_MAX_TERMS = 100_000


class SeriesTruncationError(RuntimeError):
    """The mixture series hit its term cap before the tail converged."""


def _poisson_window(mean: float, max_terms: int) -> tuple[np.ndarray, np.ndarray]:
    width = int(math.ceil(10.0 * math.sqrt(mean))) + 20
    mode = int(mean)
    while True:
        lo = max(0, mode - width)
        hi = mode + width
        if hi - lo + 1 > max_terms:
            raise SeriesTruncationError(
                f"noncentral chi-squared series needs more than {max_terms} terms "
                f"for noncentrality {2 * mean!r}"
            )
        k = np.arange(lo, hi + 1, dtype=float)
        weights = np.exp(k * math.log(mean) - mean - gammaln(k + 1.0))
        if (lo == 0 or weights[0] < _EDGE_MASS) and weights[-1] < _EDGE_MASS:
            return k, weights
        width *= 2


def ncx2_cdf(x, noncentrality: float, *, max_terms: int = _DEFAULT_MAX_TERMS):
    """CDF of the noncentral chi-squared distribution with 2 degrees of freedom.

    Evaluated as a Poisson(noncentrality/2) mixture of central chi-squared
    CDFs, truncated once the neglected Poisson mass is below 1e-14;
    absolute error is below 1e-10. ``x`` may be a scalar or an array.

    Raises ``SeriesTruncationError`` if the term cap is hit before the
    tail converges.
    """
    if noncentrality < 0.0:
        raise ValueError("noncentrality must be nonnegative")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0.0):
        raise ValueError("x must be nonnegative")
    half_x = x_arr / 2.0
    if noncentrality == 0.0:
        out = gammainc(1.0, half_x)
    else:
        k, weights = _poisson_window(noncentrality / 2.0, max_terms)
        flat = np.atleast_1d(half_x).ravel()
        out_flat = np.empty_like(flat)
        # chunk the x axis so the (terms, points) table stays small
        step = max(1, 4_000_000 // k.size)
        for start in range(0, flat.size, step):
            block = flat[start:start + step]
            out_flat[start:start + step] = weights @ gammainc(k[:, None] + 1.0, block[None, :])
        out = np.clip(out_flat.reshape(np.atleast_1d(half_x).shape), 0.0, 1.0)
        out = out.reshape(x_arr.shape)
    if np.isscalar(x) or x_arr.ndim == 0:
        return float(out)
    return out


def power_cdf(gamma, dist: PowerDistribution):
    """Probability that the channel power is below ``gamma``."""
    gamma_arr = np.asarray(gamma, dtype=float)
    if np.any(gamma_arr < 0.0):
        raise ValueError("gamma must be nonnegative")
    return ncx2_cdf(gamma_arr / dist.scale, dist.noncentrality)
