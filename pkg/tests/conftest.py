import numpy as np
import pytest

from ris_pathid import (build_layout, cascaded_channel, make_partition,
                        reference_scene)


@pytest.fixture(scope="session")
def scene7000():
    return reference_scene(ue_position=(7000.0, 0.0))


@pytest.fixture(scope="session")
def scene9000():
    return reference_scene(ue_position=(9000.0, 0.0))


@pytest.fixture(scope="session")
def channel7000(scene7000):
    return cascaded_channel(scene7000, build_layout(scene7000))


@pytest.fixture(scope="session")
def partition_500_400_100():
    return make_partition(1000, 500, 400, 100)


def random_geometry(rng: np.random.Generator, *, max_elements: int = 120):
    """Random scene inside the detectable operating regime.

    The noise level is calibrated to the link budget (well below the
    coherent power but not negligible) so that moment and detection
    properties are statistically resolvable at the trial counts the tests
    use.
    """
    import dataclasses

    from ris_pathid import Scene, build_layout, cascaded_channel

    freq = rng.uniform(1e9, 30e9)
    wavelength = 299_792_458.0 / freq
    scene = Scene(
        bs_position=(rng.uniform(-50, 50), rng.uniform(-50, 50)),
        ris_center=(rng.uniform(100, 300), rng.uniform(100, 300)),
        ris_orientation=(rng.normal(), rng.normal() + 0.1),
        ue_position=(rng.uniform(2000, 12000), rng.uniform(-200, 200)),
        num_elements=int(rng.integers(40, max_elements + 1)),
        element_spacing=wavelength * rng.uniform(0.4, 0.8),
        carrier_frequency=freq,
        tx_power=10 ** rng.uniform(-1, 1),
        noise_power=1.0,  # placeholder, replaced below
    )
    amp_sum = cascaded_channel(scene, build_layout(scene)).amplitudes.sum()
    noise_variance = amp_sum ** 2 * 10 ** rng.uniform(-5, -3)
    return dataclasses.replace(scene, noise_power=noise_variance * scene.tx_power)


def random_sizes(rng: np.random.Generator, q: int) -> tuple[int, int, int]:
    """Random area sizes: nonempty dynamic area, coherent area at least q/3."""
    n_min = -(-q // 3)
    k = int(rng.integers(1, q // 3 + 1))
    m = int(rng.integers(0, q - k - n_min + 1))
    return q - m - k, m, k
