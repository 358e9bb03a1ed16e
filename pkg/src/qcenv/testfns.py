"""Samplers for the benchmark functions.

Every sampler takes an ``(N, dim)`` array of points and returns ``N`` values,
so it plugs straight into :func:`qcenv.grid.build`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

WORST_ANGLE_W3 = math.atan(1 / 3) / 2


@dataclass(frozen=True)
class ConeSpec:
    theta: float = 0.0
    alpha: float = 0.0
    combiner: str = "min"
    dim: int = 2

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if self.combiner not in ("min", "max"):
            raise ValueError(f"combiner must be 'min' or 'max', got {self.combiner!r}")

    def vertices(self) -> tuple[np.ndarray, np.ndarray]:
        """(unshifted vertex, vertex shifted down by ``alpha``)."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        if self.dim == 2:
            # x + a = 0 and x + b = 0 with a = R(0.5, 0), b = R(-0.5, 0)
            first = np.array([-0.5 * c, -0.5 * s])
            return first, -first
        first = np.array([0.5 * c, 0.5 * s, 0.0])
        return first, -first


def two_cones(spec: ConeSpec):
    """``combiner(|x - p|, |x - q| - alpha)`` for the two cone vertices p, q.

    In 2D the vertices are ``R(theta)(-0.5, 0)`` and ``R(theta)(0.5, 0)``; in
    3D they are ``(0.5, 0, 0)`` and ``(-0.5, 0, 0)`` rotated about the
    ``x3`` axis, the second one shifted.
    """
    p, q = spec.vertices()
    combine = np.minimum if spec.combiner == "min" else np.maximum

    def sampler(x):
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        return combine(
            np.linalg.norm(x - p, axis=1), np.linalg.norm(x - q, axis=1) - spec.alpha
        )

    return sampler


def _segment_distance(x, a, b):
    ab = b - a
    t = np.clip(((x - a) @ ab) / (ab @ ab), 0.0, 1.0)
    return np.linalg.norm(x - (a + t[:, None] * ab), axis=1)


def pacman_sdf(center=(0.0, 0.0), radius: float = 1.0, removed_quadrant: int = 1):
    """Signed distance to a disk with one closed quadrant removed.

    Negative inside, positive outside.  Quadrants are numbered
    counter-clockwise from ``x >= 0, y >= 0``.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    if removed_quadrant not in (1, 2, 3, 4):
        raise ValueError("removed_quadrant must be 1, 2, 3 or 4")
    flip = {1: (1, 1), 2: (-1, 1), 3: (-1, -1), 4: (1, -1)}[removed_quadrant]
    c = np.asarray(center, dtype=np.float64)
    flip = np.asarray(flip, dtype=np.float64)
    origin = np.zeros(2)
    ex = np.array([radius, 0.0])
    ey = np.array([0.0, radius])

    def sampler(x):
        # reflect so the removed quadrant is always the first one
        y = (np.atleast_2d(np.asarray(x, dtype=np.float64)) - c) * flip
        r = np.linalg.norm(y, axis=1)
        on_arc = ~((y[:, 0] > 0) & (y[:, 1] > 0))
        d_arc = np.where(
            on_arc,
            np.abs(r - radius),
            np.minimum(np.linalg.norm(y - ex, axis=1), np.linalg.norm(y - ey, axis=1)),
        )
        d_edges = np.minimum(_segment_distance(y, origin, ex),
                             _segment_distance(y, origin, ey))
        d = np.minimum(d_arc, d_edges)
        inside = (r < radius) & ~((y[:, 0] >= 0) & (y[:, 1] >= 0))
        return np.where(inside, -d, d)

    return sampler


def plateau_profile(t):
    """Slope 40 up to 0.25, flat at 10 until 0.75, then slope 40 again."""
    t = np.asarray(t, dtype=np.float64)
    return np.where(t <= 0.25, 40.0 * t, np.where(t <= 0.75, 10.0, 10.0 + 40.0 * (t - 0.75)))


def chebyshev_plateau():
    """``f(max(|x1|, |x2|))`` with the piecewise-linear plateau profile ``f``."""

    def sampler(x):
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        return plateau_profile(np.abs(x[:, :2]).max(axis=1))

    return sampler


def neg_dist_interval(lo: float = -1.0, hi: float = 1.0):
    """``-dist(x, [lo, hi])`` in one dimension."""

    def sampler(x):
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        return -np.maximum(np.maximum(lo - x, x - hi), 0.0)

    return sampler
