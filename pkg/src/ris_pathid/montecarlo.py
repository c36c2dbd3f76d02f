"""Trial-level simulation of the estimated channel under both patterns.

Reproducibility contract: all randomness comes from counter-based Philox
streams keyed by the batch seed. Substream 0 carries phases, substream 1
noise. Trial ``t`` owns a fixed block of each substream (4-word-aligned,
``Philox.advance`` steps one 4-word counter block), so samples are
independent of chunking, execution order and thread count, and trials can
be generated in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox, SeedSequence
from scipy.special import ndtri

from .channel import cascaded_channel
from .patterns import RisPartition, RisPattern, coherent_indices, random_indices
from .scene import Scene, build_layout
from .stats import PowerDistribution, power_cdf

_PHASES_SUBSTREAM = 0
_NOISE_SUBSTREAM = 1
_NOISE_WORDS = 4  # words reserved per trial; the first two become Re/Im
_DEFAULT_CHUNK = 8192


@dataclass(frozen=True)
class TrialBatch:
    """Simulated channel-power samples for one (scenario, pattern, seed)."""

    pattern: RisPattern
    samples: np.ndarray
    seed: int
    n_trials: int

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size != self.n_trials or self.n_trials < 1:
            raise ValueError("samples must be a 1-D array of length n_trials >= 1")
        if np.any(samples < 0.0):
            raise ValueError("power samples must be nonnegative")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)


def _substream(seed: int, substream: int, skip_blocks: int) -> Generator:
    bg = Philox(SeedSequence(seed, spawn_key=(substream,)))
    if skip_blocks:
        bg.advance(skip_blocks)
    return Generator(bg)


def simulate_channel(scene: Scene, partition: RisPartition, pattern: RisPattern,
                     n_trials: int, seed: int, *,
                     noise_variance: float | None = None,
                     chunk_size: int = _DEFAULT_CHUNK) -> np.ndarray:
    """Complex channel-estimate samples, one per trial.

    Each trial adds the coherent amplitude sum, a freshly drawn
    uniform-phase sum over the random areas, and circular Gaussian noise
    with per-component variance noise_variance / 2. ``noise_variance``
    defaults to the scene's normalised value; passing 0 disables noise.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if noise_variance is None:
        noise_variance = scene.noise_variance
    if noise_variance < 0.0:
        raise ValueError("noise_variance must be nonnegative")
    ch = cascaded_channel(scene, build_layout(scene))
    if partition.num_elements != ch.num_elements:
        raise ValueError("partition and scene sizes differ")
    coherent_sum = float(np.sum(ch.amplitudes[coherent_indices(partition, pattern)]))
    random_amps = ch.amplitudes[random_indices(partition, pattern)]
    m = random_amps.size
    phase_words = 4 * ((m + 3) // 4)  # per-trial block, 4-word aligned
    noise_sigma = np.sqrt(noise_variance / 2.0)

    out = np.empty(n_trials, dtype=complex)
    for start in range(0, n_trials, chunk_size):
        count = min(chunk_size, n_trials - start)
        if m > 0:
            gen = _substream(seed, _PHASES_SUBSTREAM, start * (phase_words // 4))
            beta = gen.random((count, phase_words))[:, :m] * (2.0 * np.pi) - np.pi
            re = np.einsum("tm,m->t", np.cos(beta), random_amps) + coherent_sum
            im = np.einsum("tm,m->t", np.sin(beta), random_amps)
        else:
            re = np.full(count, coherent_sum)
            im = np.zeros(count)
        if noise_variance > 0.0:
            gen = _substream(seed, _NOISE_SUBSTREAM, start * (_NOISE_WORDS // 4))
            u = gen.random((count, _NOISE_WORDS))[:, :2]
            # guard the (2^-53 probability) exact zero that would map to -inf
            z = ndtri(np.maximum(u, 2.0 ** -54)) * noise_sigma
            re = re + z[:, 0]
            im = im + z[:, 1]
        out[start:start + count] = re + 1j * im
    return out


def simulate_batch(scene: Scene, partition: RisPartition, pattern: RisPattern,
                   n_trials: int, seed: int, *,
                   noise_variance: float | None = None,
                   chunk_size: int = _DEFAULT_CHUNK) -> TrialBatch:
    """Channel-power samples |estimate|^2 for one pattern."""
    estimates = simulate_channel(scene, partition, pattern, n_trials, seed,
                                 noise_variance=noise_variance, chunk_size=chunk_size)
    samples = estimates.real ** 2 + estimates.imag ** 2
    return TrialBatch(pattern=pattern, samples=samples, seed=seed, n_trials=n_trials)


class EmpiricalCdf:
    """Right-continuous empirical distribution of a sample set."""

    def __init__(self, samples):
        sorted_samples = np.sort(np.asarray(samples, dtype=float))
        if sorted_samples.size < 1:
            raise ValueError("need at least one sample")
        self._sorted = sorted_samples

    @property
    def sorted_samples(self) -> np.ndarray:
        return self._sorted

    def __call__(self, x):
        """Fraction of samples <= x; x may be a scalar or an array."""
        n = self._sorted.size
        counts = np.searchsorted(self._sorted, np.asarray(x, dtype=float), side="right")
        frac = counts / n
        return float(frac) if np.ndim(x) == 0 else frac

    def quantile(self, p: float) -> float:
        """Smallest sample with CDF value >= p."""
        if not 0.0 < p <= 1.0:
            raise ValueError("p must be in (0, 1]")
        n = self._sorted.size
        idx = min(n - 1, max(0, int(np.ceil(p * n)) - 1))
        return float(self._sorted[idx])


def empirical_cdf(batch: TrialBatch) -> EmpiricalCdf:
    return EmpiricalCdf(batch.samples)


def empirical_error(batch1: TrialBatch, batch2: TrialBatch, gamma: float) -> float:
    """Detection error frequency at threshold ``gamma``: half the fraction
    of pattern-1 samples below it plus half the fraction of pattern-2
    samples above it."""
    below = np.count_nonzero(batch1.samples < gamma) / batch1.n_trials
    above = np.count_nonzero(batch2.samples > gamma) / batch2.n_trials
    return 0.5 * below + 0.5 * above


def ks_distance(batch: TrialBatch, dist: PowerDistribution) -> float:
    """Kolmogorov-Smirnov statistic between the batch and the analytic
    power distribution, evaluated at the sample points."""
    sorted_samples = np.sort(batch.samples)
    n = sorted_samples.size
    model = power_cdf(sorted_samples, dist)
    model = np.atleast_1d(model)
    steps_hi = np.arange(1, n + 1) / n
    steps_lo = np.arange(0, n) / n
    return float(max(np.max(steps_hi - model), np.max(model - steps_lo)))
