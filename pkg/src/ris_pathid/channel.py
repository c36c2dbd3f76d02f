"""Free-space per-element channel coefficients and the effective channel
through a phase-configured RIS.

All coefficients are kept in linear scale. Cascaded amplitudes of order
1e-10 and powers of order 1e-20 stay far above double-precision underflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scene import ElementLayout, Scene, distances


def wrap_phase(phi):
    """Wrap an angle (or array of angles) to [-pi, pi)."""
    return np.mod(np.asarray(phi) + np.pi, 2.0 * np.pi) - np.pi


def freespace_coeff(distance: float, wavelength: float) -> complex:
    """Free-space coefficient: modulus wavelength/(4*pi*d), phase -2*pi*d/wavelength.

    Rejects zero distance, where the point-source pathloss is singular.
    """
    if wavelength <= 0.0:
        raise ValueError("wavelength must be positive")
    if distance <= 0.0:
        raise ValueError("distance must be positive")
    modulus = wavelength / (4.0 * np.pi * distance)
    phase = wrap_phase(-2.0 * np.pi * distance / wavelength)
    return complex(modulus * np.cos(phase), modulus * np.sin(phase))


def _freespace_array(dist: np.ndarray, wavelength: float) -> np.ndarray:
    if np.any(dist <= 0.0):
        raise ValueError("distance must be positive")
    modulus = wavelength / (4.0 * np.pi * dist)
    phase = wrap_phase(-2.0 * np.pi * dist / wavelength)
    return modulus * np.exp(1j * phase)


@dataclass(frozen=True)
class CascadedChannel:
    """Per-element products of the BS-to-element and element-to-UE coefficients.

    ``amplitudes`` caches the moduli, which every statistic downstream is
    built from.
    """

    per_element: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        coeffs = np.ascontiguousarray(self.per_element, dtype=complex)
        amps = np.ascontiguousarray(self.amplitudes, dtype=float)
        if coeffs.ndim != 1 or coeffs.shape != amps.shape:
            raise ValueError("per_element and amplitudes must be matching 1-D arrays")
        if not np.allclose(amps, np.abs(coeffs), rtol=1e-12, atol=0.0):
            raise ValueError("amplitudes must equal |per_element|")
        if np.any(amps <= 0.0):
            raise ValueError("cascaded amplitudes must be positive")
        coeffs.flags.writeable = False
        amps.flags.writeable = False
        object.__setattr__(self, "per_element", coeffs)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_elements(self) -> int:
        return self.per_element.shape[0]


def cascaded_channel(scene: Scene, layout: ElementLayout) -> CascadedChannel:
    """Cascade of the two free-space hops for every element."""
    wavelength = scene.wavelength
    to_bs = distances(layout, scene.bs_position)
    to_ue = distances(layout, scene.ue_position)
    coeffs = _freespace_array(to_bs, wavelength) * _freespace_array(to_ue, wavelength)
    return CascadedChannel(per_element=coeffs, amplitudes=np.abs(coeffs))


@dataclass(frozen=True)
class PhaseVector:
    """Per-element phase shifts in radians, each in [-pi, pi).

    A diagonal unit-modulus configuration matrix is always represented by
    this vector, never materialised as a dense matrix.
    """

    phases: np.ndarray

    def __post_init__(self):
        phases = np.ascontiguousarray(self.phases, dtype=float)
        if phases.ndim != 1:
            raise ValueError("phases must be a 1-D array")
        if np.any(phases < -np.pi) or np.any(phases >= np.pi):
            raise ValueError("phases must lie in [-pi, pi)")
        phases.flags.writeable = False
        object.__setattr__(self, "phases", phases)

    @property
    def num_elements(self) -> int:
        return self.phases.shape[0]


def effective_channel(ch: CascadedChannel, pv: PhaseVector) -> complex:
    """Sum of per-element coefficients rotated by the configured phases."""
    if ch.num_elements != pv.num_elements:
        raise ValueError(
            f"channel has {ch.num_elements} elements but phase vector has {pv.num_elements}"
        )
    return complex(np.sum(ch.per_element * np.exp(1j * pv.phases)))
