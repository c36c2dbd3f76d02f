"""RIS area partition and construction of the two alternating phase patterns.

The surface is split into three disjoint areas: the observed user's
coherent area (size N), the area serving other users (size M), and the
dynamic area (size K) that alternates between the two roles. From the
observed user's point of view the other-user areas carry uniform random
phases.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import CascadedChannel, PhaseVector, wrap_phase


class RisPattern(Enum):
    """State of the dynamic area as seen by the observed user."""

    DYNAMIC_COHERENT = 1  # dynamic area reinforces the observed user
    DYNAMIC_RANDOM = 2    # dynamic area serves another user


@dataclass(frozen=True)
class RisPartition:
    """Disjoint element-index sets covering the whole array.

    ``a1`` is the observed user's coherent area, ``a2`` the other-user
    area, ``a3`` the dynamic area. N >= 1 so the observed user always
    retains a coherent area; K may be zero.
    """

    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray

    def __post_init__(self):
        arrays = []
        for name in ("a1", "a2", "a3"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.intp)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
            arrays.append(arr)
        if len(self.a1) < 1:
            raise ValueError("the coherent area must contain at least one element")
        combined = np.concatenate(arrays)
        q = combined.size
        if np.unique(combined).size != q or combined.min() != 0 or combined.max() != q - 1:
            raise ValueError("areas must be disjoint and cover indices 0..Q-1 exactly")

    @property
    def num_elements(self) -> int:
        return len(self.a1) + len(self.a2) + len(self.a3)

    @property
    def sizes(self) -> tuple[int, int, int]:
        return (len(self.a1), len(self.a2), len(self.a3))


def make_partition(q: int, n: int, m: int, k: int,
                   policy: str = "contiguous", seed: int | None = None) -> RisPartition:
    """Split ``q`` element indices into areas of sizes ``n``, ``m``, ``k``.

    ``contiguous`` lays the areas out as index blocks with the dynamic
    area first, the observed user's coherent area next and the other-user
    area last: a3 = [0, k), a1 = [k, k+n), a2 = [k+n, q). ``interleaved``
    assigns membership by a seeded deterministic shuffle instead, which
    removes any correlation between area membership and element position.
    """
    if min(q, n, m, k) < 0 or n + m + k != q:
        raise ValueError(f"area sizes {n}+{m}+{k} must be nonnegative and sum to q={q}")
    if n < 1:
        raise ValueError("the coherent area must contain at least one element")
    if policy == "contiguous":
        idx = np.arange(q)
    elif policy == "interleaved":
        if seed is None:
            raise ValueError("the interleaved policy requires a shuffle seed")
        idx = np.random.default_rng(seed).permutation(q)
    else:
        raise ValueError(f"unknown partition policy '{policy}'")
    return RisPartition(a1=idx[k:k + n], a2=idx[k + n:], a3=idx[:k])


def coherent_phases(ch: CascadedChannel, indices) -> np.ndarray:
    """Phases cancelling each cascaded coefficient's argument, so the
    selected elements contribute the sum of their amplitudes."""
    idx = np.asarray(indices, dtype=np.intp)
    return wrap_phase(-np.angle(ch.per_element[idx]))


def random_phases(indices, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. uniform phases on [-pi, pi), one per index."""
    idx = np.asarray(indices, dtype=np.intp)
    return rng.uniform(-np.pi, np.pi, idx.size)


def build_pattern(ch: CascadedChannel, partition: RisPartition,
                  pattern: RisPattern, rng: np.random.Generator) -> PhaseVector:
    """Assemble the full phase vector for one pattern.

    The coherent area is always aligned for the observed user, the
    other-user area always carries random phases (drawn first), and the
    dynamic area is aligned or random according to ``pattern`` (drawn
    second).
    """
    if partition.num_elements != ch.num_elements:
        raise ValueError("partition and channel sizes differ")
    phases = np.zeros(ch.num_elements)
    phases[partition.a1] = coherent_phases(ch, partition.a1)
    phases[partition.a2] = random_phases(partition.a2, rng)
    if pattern is RisPattern.DYNAMIC_COHERENT:
        phases[partition.a3] = coherent_phases(ch, partition.a3)
    else:
        phases[partition.a3] = random_phases(partition.a3, rng)
    return PhaseVector(phases)


def coherent_indices(partition: RisPartition, pattern: RisPattern) -> np.ndarray:
    """Indices deterministically aligned for the observed user under ``pattern``."""
    if pattern is RisPattern.DYNAMIC_COHERENT:
        return np.concatenate([partition.a1, partition.a3])
    return partition.a1


def random_indices(partition: RisPartition, pattern: RisPattern) -> np.ndarray:
    """Indices carrying uniform random phases under ``pattern``."""
    if pattern is RisPattern.DYNAMIC_COHERENT:
        return partition.a2
    return np.concatenate([partition.a2, partition.a3])
