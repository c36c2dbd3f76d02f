import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import i0e

from ris_pathid import (GaussianChannelModel, PowerDistribution, RisPattern,
                        SeriesTruncationError, channel_model,
                        dynamic_sum_moments, make_partition, ncx2_cdf,
                        power_cdf, power_distribution, simulate_batch,
                        simulate_channel, ks_distance, reference_scene)

# value computed beforehand by adaptive quadrature of the density
# (independent of the series implementation under test)
NCX2_CDF_X6_LAM4 = 0.58528941476587


def ncx2_density(x, lam):
    if lam == 0.0:
        return 0.5 * math.exp(-x / 2.0)
    root = math.sqrt(lam * x)
    return 0.5 * math.exp(-(x + lam) / 2.0 + root) * i0e(root)


def ncx2_cdf_quadrature(x, lam):
    value, err = quad(ncx2_density, 0.0, x, args=(lam,), epsabs=1e-12, limit=300)
    assert err < 1e-9
    return value


# ---------------------------------------------------------------- moments

def test_dynamic_sum_moments_empty_and_single():
    assert dynamic_sum_moments([]) == (0.0, 0.0)
    mean, var = dynamic_sum_moments([1.0])
    assert mean == 0.0 and var == 0.5


def test_dynamic_sum_moments_against_direct_sampling(channel7000):
    amps = channel7000.amplitudes[:100]
    _, var = dynamic_sum_moments(amps)
    rng = np.random.default_rng(515)
    n_draws = 300_000
    betas = rng.uniform(-np.pi, np.pi, (n_draws, amps.size))
    sums = (np.exp(1j * betas) * amps).sum(axis=1)
    assert np.var(sums.real) == pytest.approx(var, rel=0.02)
    assert np.var(sums.imag) == pytest.approx(var, rel=0.02)
    corr = np.corrcoef(sums.real, sums.imag)[0, 1]
    assert abs(corr) < 3.0 / math.sqrt(n_draws)


# ----------------------------------------------------------- channel model

def test_channel_model_patterns_coincide_without_dynamic_area(channel7000):
    part = make_partition(1000, 600, 400, 0)
    m1 = channel_model(channel7000, part, RisPattern.DYNAMIC_COHERENT, 1e-16)
    m2 = channel_model(channel7000, part, RisPattern.DYNAMIC_RANDOM, 1e-16)
    assert m1 == m2


def test_channel_model_noise_free_dynamic_only(channel7000):
    part = make_partition(1000, 900, 0, 100)
    model = channel_model(channel7000, part, RisPattern.DYNAMIC_RANDOM, 0.0)
    expected = 0.5 * np.sum(channel7000.amplitudes[part.a3] ** 2)
    assert model.component_variance == pytest.approx(expected, rel=1e-15)
    assert model.mean_real == pytest.approx(channel7000.amplitudes[part.a1].sum(), rel=1e-15)


def test_channel_model_variance_decomposition_is_exact(channel7000, partition_500_400_100):
    noise_var = 5.97e-17
    m1 = channel_model(channel7000, partition_500_400_100,
                       RisPattern.DYNAMIC_COHERENT, noise_var)
    m2 = channel_model(channel7000, partition_500_400_100,
                       RisPattern.DYNAMIC_RANDOM, noise_var)
    _, dynamic_var = dynamic_sum_moments(
        channel7000.amplitudes[partition_500_400_100.a3])
    assert m2.component_variance == m1.component_variance + dynamic_var


def test_channel_model_moments_match_simulation(scene7000, partition_500_400_100):
    noise_var = scene7000.noise_variance
    n_trials = 200_000
    for pattern in RisPattern:
        model = channel_model_for(scene7000, partition_500_400_100, pattern, noise_var)
        draws = simulate_channel(scene7000, partition_500_400_100, pattern,
                                 n_trials, seed=91)
        comp_std = math.sqrt(model.component_variance)
        stderr = comp_std / math.sqrt(n_trials)
        assert abs(draws.real.mean() - model.mean_real) < 3 * stderr
        assert abs(draws.imag.mean()) < 3 * stderr
        assert np.var(draws.real) == pytest.approx(model.component_variance, rel=0.01)
        assert np.var(draws.imag) == pytest.approx(model.component_variance, rel=0.01)


def channel_model_for(scene, partition, pattern, noise_var):
    from ris_pathid import build_layout, cascaded_channel

    ch = cascaded_channel(scene, build_layout(scene))
    return channel_model(ch, partition, pattern, noise_var)


def test_real_imag_uncorrelated(scene7000, partition_500_400_100):
    n_trials = 200_000
    for pattern in RisPattern:
        draws = simulate_channel(scene7000, partition_500_400_100, pattern,
                                 n_trials, seed=17)
        corr = np.corrcoef(draws.real, draws.imag)[0, 1]
        assert abs(corr) < 3.0 / math.sqrt(n_trials)


def test_degenerate_model_rejected(channel7000):
    part = make_partition(1000, 1000, 0, 0)
    with pytest.raises(ValueError):
        channel_model(channel7000, part, RisPattern.DYNAMIC_COHERENT, 0.0)
    with pytest.raises(ValueError):
        GaussianChannelModel(mean_real=1.0, mean_imag=0.5, component_variance=1.0)


# ------------------------------------------------------ power distribution

def test_power_distribution_parameters():
    central = power_distribution(GaussianChannelModel(0.0, 0.0, 2.0))
    assert central.noncentrality == 0.0 and central.scale == 2.0 and central.dof == 2
    unit = power_distribution(GaussianChannelModel(3.0, 0.0, 9.0))
    assert unit.noncentrality == pytest.approx(1.0, rel=1e-15)
    assert unit.mean == pytest.approx(9.0 * 3.0, rel=1e-15)


def test_power_distribution_invariants():
    with pytest.raises(ValueError):
        PowerDistribution(scale=0.0, noncentrality=1.0)
    with pytest.raises(ValueError):
        PowerDistribution(scale=1.0, noncentrality=-0.1)
    with pytest.raises(ValueError):
        PowerDistribution(scale=1.0, noncentrality=1.0, dof=4)


def test_power_mean_matches_simulation(scene7000, partition_500_400_100):
    batch = simulate_batch(scene7000, partition_500_400_100,
                           RisPattern.DYNAMIC_COHERENT, 100_000, seed=5)
    model = channel_model_for(scene7000, partition_500_400_100,
                              RisPattern.DYNAMIC_COHERENT, scene7000.noise_variance)
    dist = power_distribution(model)
    assert batch.samples.mean() == pytest.approx(dist.mean, rel=0.01)


# ------------------------------------------------------------ ncx2 series

def test_central_case_closed_form():
    assert ncx2_cdf(2.0 * math.log(2.0), 0.0) == pytest.approx(0.5, abs=1e-14)
    x = np.array([0.0, 0.5, 3.0, 10.0])
    np.testing.assert_allclose(ncx2_cdf(x, 0.0), 1.0 - np.exp(-x / 2.0), atol=1e-14)


def test_cdf_zero_at_origin():
    for lam in (0.0, 1.0, 50.0, 500.0):
        assert ncx2_cdf(0.0, lam) == 0.0


def test_cdf_rejects_negative_arguments():
    with pytest.raises(ValueError):
        ncx2_cdf(-1.0, 1.0)
    with pytest.raises(ValueError):
        ncx2_cdf(1.0, -1.0)
    with pytest.raises(ValueError):
        ncx2_cdf(np.array([0.5, -0.5]), 1.0)


def test_cdf_against_quadrature_spot_value():
    assert ncx2_cdf(6.0, 4.0) == pytest.approx(NCX2_CDF_X6_LAM4, abs=1e-8)
    assert ncx2_cdf(6.0, 4.0) == pytest.approx(ncx2_cdf_quadrature(6.0, 4.0), abs=1e-8)


def test_cdf_against_quadrature_grid():
    rng = np.random.default_rng(8)
    for lam in (0.0, 0.3, 2.0, 9.0, 40.0, 130.0):
        xs = rng.uniform(0.0, lam + 30.0, 6)
        for x in xs:
            assert ncx2_cdf(float(x), lam) == pytest.approx(
                ncx2_cdf_quadrature(float(x), lam), abs=1e-8)


def test_cdf_monotonicity_and_range():
    xs = np.linspace(0.0, 100.0, 201)
    lams = np.linspace(0.0, 200.0, 21)
    previous = None
    for lam in lams:
        values = ncx2_cdf(xs, lam)
        assert np.all(values >= 0.0) and np.all(values <= 1.0)
        assert np.all(np.diff(values) >= -1e-13)          # nondecreasing in x
        if previous is not None:
            assert np.all(values <= previous + 1e-12)     # nonincreasing in lam
        previous = values


def test_cdf_mean_identity():
    for lam in (0.0, 3.0, 25.0):
        upper = (2.0 + lam) + 40.0 * math.sqrt(4.0 + 4.0 * lam)
        mean, err = quad(lambda t: 1.0 - ncx2_cdf(t, lam), 0.0, upper,
                         epsabs=1e-10, epsrel=1e-10, limit=500)
        assert mean == pytest.approx(2.0 + lam, rel=1e-6)


def test_series_truncation_cap():
    with pytest.raises(SeriesTruncationError):
        ncx2_cdf(1.0, 4000.0, max_terms=20)


def test_large_noncentrality_is_stable():
    value = ncx2_cdf(4000.0, 4000.0, max_terms=200_000)
    assert 0.0 < value < 1.0
    assert value == pytest.approx(ncx2_cdf_quadrature(4000.0, 4000.0), abs=1e-7)


# -------------------------------------------------------------- power_cdf

def test_power_cdf_scaling():
    dist = PowerDistribution(scale=3.5e-17, noncentrality=80.0)
    gamma = dist.mean
    assert power_cdf(gamma, dist) == pytest.approx(ncx2_cdf(gamma / dist.scale, 80.0),
                                                   rel=1e-14)
    assert 0.0 < power_cdf(gamma, dist) < 1.0
    assert power_cdf(0.0, dist) == 0.0
    with pytest.raises(ValueError):
        power_cdf(-1e-18, dist)


# ---------------------------------------- Gaussian approximation validity

def test_gaussian_approximation_improves_with_dynamic_size(scene7000):
    # With the noise disabled the random-phase sum is the only randomness,
    # so the fit quality of the chi-squared model tracks the number of
    # summed phasors directly.
    ks_values = {}
    for k in (10, 50, 100):
        scene = reference_scene(num_elements=k + 1)
        part = make_partition(k + 1, 1, 0, k)
        dist = power_distribution(channel_model_for(scene, part,
                                                    RisPattern.DYNAMIC_RANDOM, 0.0))
        batch = simulate_batch(scene, part, RisPattern.DYNAMIC_RANDOM,
                               150_000, seed=23, noise_variance=0.0)
        ks_values[k] = ks_distance(batch, dist)
    assert ks_values[10] > ks_values[50] > ks_values[100]
    assert ks_values[10] > 2.0 * ks_values[100]
