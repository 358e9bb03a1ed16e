"""Direction sets for the line solver and their angular resolution."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

# Fibonacci sphere size used for the 3D resolution estimate.  Its covering
# angle is about sqrt(4*pi/N), i.e. ~3.5e-3 rad, which bounds the error.
SPHERE_SAMPLES = 1_000_000


def canonicalize(v) -> tuple[int, ...]:
    """Coprime, sign-normalized representative of the line through ``v``.

    >>> canonicalize((-1, 3))
    (1, -3)
    """
    v = [int(c) for c in v]
    if not any(v):
        raise ValueError("the zero vector has no direction")
    g = math.gcd(*v)
    v = [c // g for c in v]
    first = next(c for c in v if c != 0)
    if first < 0:
        v = [-c for c in v]
    return tuple(v)


def _half_turn_angle(v) -> float:
    """Angle of an unoriented 2D direction in ``[0, pi)``."""
    a = math.atan2(v[1], v[0])
    return a % math.pi


@dataclass(frozen=True)
class DirectionSet:
    """Canonical integer direction vectors.

    ``width`` is the max-norm bound for lattice-generated sets, else ``None``.
    """

    dim: int
    vectors: tuple[tuple[int, ...], ...]
    width: int | None = None

    def __post_init__(self):
        vecs = tuple(tuple(int(c) for c in v) for v in self.vectors)
        if any(len(v) != self.dim for v in vecs):
            raise ValueError("vector length does not match dim")
        if any(canonicalize(v) != v for v in vecs):
            raise ValueError("direction vectors must be canonical")
        if len(set(vecs)) != len(vecs):
            raise ValueError("duplicate direction vectors")
        object.__setattr__(self, "vectors", vecs)

    @classmethod
    def from_vectors(cls, vectors, dim: int | None = None) -> "DirectionSet":
        """Canonicalize and deduplicate arbitrary integer vectors, keeping order."""
        seen = {}
        for v in vectors:
            seen.setdefault(canonicalize(v), None)
        vecs = tuple(seen)
        if dim is None:
            if not vecs:
                raise ValueError("cannot infer dim of an empty direction set")
            dim = len(vecs[0])
        return cls(dim, vecs)

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def unit_vectors(self) -> np.ndarray:
        a = np.asarray(self.vectors, dtype=np.float64)
        return a / np.linalg.norm(a, axis=1, keepdims=True)


def lattice_directions(dim: int, width: int) -> DirectionSet:
    """All unoriented lattice directions with max-norm at most ``width``.

    2D sets are sorted by angle in ``[0, pi)`` so ``(1, 0)`` comes first; 3D
    sets are sorted lexicographically.  In 1D the set is just ``(1,)``.
    """
    if width < 1:
        raise ValueError(f"width must be at least 1, got {width}")
    if dim not in (1, 2, 3):
        raise ValueError(f"dim must be 1, 2 or 3, got {dim}")
    if dim == 1:
        return DirectionSet(1, ((1,),), width)
    rng = range(-width, width + 1)
    found = {
        canonicalize(v) for v in itertools.product(rng, repeat=dim) if any(v)
    }
    if dim == 2:
        vecs = sorted(found, key=lambda v: (_half_turn_angle(v), v))
    else:
        vecs = sorted(found)
    return DirectionSet(dim, tuple(vecs), width)


def equally_spaced_2d(k: int) -> np.ndarray:
    """``k`` unit vectors at angles ``j*pi/k``; rows are vectors."""
    if k < 2:
        raise ValueError(f"need at least 2 directions, got {k}")
    t = np.arange(k) * (math.pi / k)
    return np.stack([np.cos(t), np.sin(t)], axis=1)


def _as_unit_rows(D) -> np.ndarray:
    if isinstance(D, DirectionSet):
        return D.unit_vectors()
    a = np.asarray(D, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] == 0:
        raise ValueError("need a nonempty array of direction vectors")
    return a / np.linalg.norm(a, axis=1, keepdims=True)


def fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n, dtype=np.float64) + 0.5
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(1.0 - z * z)
    phi = i * (math.pi * (3.0 - math.sqrt(5.0)))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def _max_min_angle(samples: np.ndarray, units: np.ndarray, chunk=1 << 16) -> float:
    """max over samples of the angle to the nearest unoriented direction."""
    best = 0.0
    for s in range(0, samples.shape[0], chunk):
        cos = np.abs(samples[s : s + chunk] @ units.T).max(axis=1)
        best = max(best, float(np.arccos(np.clip(cos.min(), -1.0, 1.0))))
    return best


def directional_resolution(D, samples: int = SPHERE_SAMPLES) -> float:
    """Largest angle (radians) a unit vector can make with its nearest direction.

    In 2D this is exact: half the widest gap between consecutive direction
    angles once every direction is also counted at angle + pi.  In 3D it is
    estimated as the maximum over a Fibonacci sphere grid of ``samples``
    points; the estimate is low by at most the grid's covering angle
    (about ``sqrt(4*pi/samples)``).
    """
    units = _as_unit_rows(D)
    dim = units.shape[1]
    if dim == 2:
        ang = np.sort(np.arctan2(units[:, 1], units[:, 0]) % math.pi)
        gaps = np.diff(np.concatenate([ang, [ang[0] + math.pi]]))
        return float(gaps.max() / 2)
    if dim == 3:
        return _max_min_angle(fibonacci_sphere(samples), units)
    raise ValueError(f"resolution is defined for dim 2 or 3, got {dim}")
