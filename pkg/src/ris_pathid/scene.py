"""Scene geometry and RF constants for a BS / ULA-RIS / UE link.

Everything is strictly 2-D. Distances are exact per-element Euclidean
norms; no plane-wave approximation is applied anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s


class SceneConfigError(ValueError):
    """Malformed scene configuration file."""


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


@dataclass(frozen=True)
class Scene:
    """Immutable link geometry plus RF constants.

    Positions are metre coordinates, powers are watts. ``ris_orientation``
    is normalised to a unit vector at construction; it is the axis along
    which the uniform linear array of elements is laid out.
    """

    bs_position: tuple[float, float]
    ris_center: tuple[float, float]
    ris_orientation: tuple[float, float]
    ue_position: tuple[float, float]
    num_elements: int
    element_spacing: float
    carrier_frequency: float
    tx_power: float
    noise_power: float

    def __post_init__(self):
        object.__setattr__(self, "bs_position", _point(self.bs_position))
        object.__setattr__(self, "ris_center", _point(self.ris_center))
        object.__setattr__(self, "ue_position", _point(self.ue_position))
        ox, oy = float(self.ris_orientation[0]), float(self.ris_orientation[1])
        norm = math.hypot(ox, oy)
        if norm == 0.0:
            raise ValueError("ris_orientation must be a nonzero vector")
        object.__setattr__(self, "ris_orientation", (ox / norm, oy / norm))
        if self.num_elements < 1:
            raise ValueError("num_elements must be >= 1")
        for name in ("element_spacing", "carrier_frequency", "tx_power", "noise_power"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        points = {
            "bs_position": self.bs_position,
            "ris_center": self.ris_center,
            "ue_position": self.ue_position,
        }
        names = list(points)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                if math.dist(points[a], points[b]) == 0.0:
                    raise ValueError(f"{a} and {b} must not coincide")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_frequency

    @property
    def noise_variance(self) -> float:
        """Variance of the channel-estimate noise after pilot normalisation.

        The estimate divides the received sample by the known transmitted
        sample, so the additive noise variance scales as noise/tx power.
        """
        return self.noise_power / self.tx_power


@dataclass(frozen=True)
class ElementLayout:
    """Per-element positions of the RIS array, shape (Q, 2), metres."""

    positions: np.ndarray

    def __post_init__(self):
        pos = np.ascontiguousarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2 or pos.shape[0] < 1:
            raise ValueError("positions must be a (Q, 2) array with Q >= 1")
        pos.flags.writeable = False
        object.__setattr__(self, "positions", pos)

    @property
    def num_elements(self) -> int:
        return self.positions.shape[0]


def build_layout(scene: Scene) -> ElementLayout:
    """Place the Q array elements evenly along the orientation axis,
    centred on the array centre."""
    q = scene.num_elements
    if q < 1:
        raise ValueError("cannot build a layout with zero elements")
    offsets = (np.arange(q) - (q - 1) / 2.0) * scene.element_spacing
    orient = np.asarray(scene.ris_orientation)
    positions = np.asarray(scene.ris_center)[None, :] + offsets[:, None] * orient[None, :]
    return ElementLayout(positions)


def distances(layout: ElementLayout, point) -> np.ndarray:
    """Euclidean distance from every element to ``point``, element order."""
    p = np.asarray(point, dtype=float)
    return np.linalg.norm(layout.positions - p[None, :], axis=1)


def _point(value) -> tuple[float, float]:
    x, y = value
    return (float(x), float(y))


# Configuration file format: one "key = value" per line, '#' comments and
# blank lines allowed. Powers are given in dBm, spacing either in metres
# or in units of half a carrier wavelength.
_FLOAT_KEYS = frozenset({
    "bs_x", "bs_y", "ris_x", "ris_y", "orient_x", "orient_y", "ue_x", "ue_y",
    "spacing_m", "spacing_half_wavelength", "freq_hz", "tx_dbm", "noise_dbm",
})
_INT_KEYS = frozenset({"q"})
_REQUIRED = frozenset({
    "bs_x", "bs_y", "ris_x", "ris_y", "orient_x", "orient_y", "ue_x", "ue_y",
    "q", "freq_hz", "tx_dbm", "noise_dbm",
})


def parse_scene(text: str, *, source: str = "<config>") -> Scene:
    """Parse a key-value scene configuration; errors carry line numbers."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise SceneConfigError(f"{source}:{lineno}: expected 'key = value'")
        key = key.strip()
        value = value.strip()
        if key not in _FLOAT_KEYS and key not in _INT_KEYS:
            raise SceneConfigError(f"{source}:{lineno}: unknown key '{key}'")
        if key in values:
            raise SceneConfigError(f"{source}:{lineno}: duplicate key '{key}'")
        try:
            values[key] = int(value) if key in _INT_KEYS else float(value)
        except ValueError:
            raise SceneConfigError(
                f"{source}:{lineno}: invalid number '{value}' for key '{key}'"
            ) from None
    missing = sorted(_REQUIRED - values.keys())
    if missing:
        raise SceneConfigError(f"{source}: missing required keys: {', '.join(missing)}")
    has_m = "spacing_m" in values
    has_hw = "spacing_half_wavelength" in values
    if has_m == has_hw:
        raise SceneConfigError(
            f"{source}: exactly one of spacing_m or spacing_half_wavelength is required"
        )
    wavelength = SPEED_OF_LIGHT / values["freq_hz"]
    spacing = values["spacing_m"] if has_m else values["spacing_half_wavelength"] * wavelength / 2.0
    try:
        return Scene(
            bs_position=(values["bs_x"], values["bs_y"]),
            ris_center=(values["ris_x"], values["ris_y"]),
            ris_orientation=(values["orient_x"], values["orient_y"]),
            ue_position=(values["ue_x"], values["ue_y"]),
            num_elements=int(values["q"]),
            element_spacing=spacing,
            carrier_frequency=values["freq_hz"],
            tx_power=dbm_to_watts(values["tx_dbm"]),
            noise_power=dbm_to_watts(values["noise_dbm"]),
        )
    except ValueError as exc:
        raise SceneConfigError(f"{source}: {exc}") from None


def load_scene(path) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scene(fh.read(), source=str(path))


def reference_scene(ue_position=(7000.0, 0.0), *, num_elements: int = 1000) -> Scene:
    """Reference 5 GHz link: BS at the origin, a 1000-element half-wavelength
    ULA centred at (25 m, 25 m) and laid out along the y axis, 30 dBm
    transmit power, thermal noise over a 15 kHz band (about -132 dBm)."""
    freq = 5e9
    wavelength = SPEED_OF_LIGHT / freq
    noise_dbm = -174.0 + 10.0 * math.log10(15e3)
    return Scene(
        bs_position=(0.0, 0.0),
        ris_center=(25.0, 25.0),
        ris_orientation=(0.0, 1.0),
        ue_position=ue_position,
        num_elements=num_elements,
        element_spacing=wavelength / 2.0,
        carrier_frequency=freq,
        tx_power=dbm_to_watts(30.0),
        noise_power=dbm_to_watts(noise_dbm),
    )
