"""Exact one-dimensional envelope operators and structural checks.

All envelope arithmetic reduces to running minima, so the plain operators are
exact: the output only contains values that already occur in the input.

The batched kernels work on a 2D array whose rows are independent sequences,
right-padded with ``+inf``.  The padding never leaks into real entries: a
forward running minimum only looks left, and the backward one only ever
takes a minimum with the pads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Seq:
    """Samples along a line with uniform arc-length ``step``."""

    values: np.ndarray
    step: float = 1.0

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).reshape(-1)
        if values.size < 1:
            raise ValueError("a sequence needs at least one sample")
        if not np.all(np.isfinite(values)):
            raise ValueError("sequence values must be finite")
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "step", float(self.step))

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


@dataclass(frozen=True)
class RobustParams:
    epsilon: float

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")


def _as_seq(g) -> Seq:
    return g if isinstance(g, Seq) else Seq(g)


def _epsilon(p) -> float:
    if isinstance(p, RobustParams):
        return p.epsilon
    return RobustParams(float(p)).epsilon


# -- batched kernels -------------------------------------------------------


def decreasing_rows(V):
    """Running minimum from the left of every row."""
    return np.minimum.accumulate(V, axis=1)


def increasing_rows(V):
    """Running minimum from the right of every row."""
    return np.minimum.accumulate(V[:, ::-1], axis=1)[:, ::-1]


def qce_rows(V):
    return np.maximum(decreasing_rows(V), increasing_rows(V))


def robust_qce_rows(V, eps_h):
    """Robust envelope of every row; ``eps_h`` is ``epsilon * step`` per row.

    The recursions ``d[j+1] = min(d[j] - eps_h, g[j+1])`` and
    ``i[j-1] = min(i[j] - eps_h, g[j-1])`` become plain running minima after
    shifting by the ramp ``eps_h * j``.
    """
    V = np.asarray(V, dtype=np.float64)
    eps_h = np.broadcast_to(np.asarray(eps_h, dtype=np.float64), (V.shape[0],))
    if not np.any(eps_h):
        return qce_rows(V)
    ramp = eps_h[:, None] * np.arange(V.shape[1], dtype=np.float64)[None, :]
    down = decreasing_rows(V + ramp) - ramp
    up = increasing_rows(V - ramp) + ramp
    floor = V.min(axis=1, keepdims=True)
    # every branch is <= V in exact arithmetic; the clamp absorbs ramp rounding
    return np.minimum(np.maximum(np.maximum(down, up), floor), V)


# -- public operators ------------------------------------------------------


def sweep_decreasing(g) -> Seq:
    """Largest nonincreasing minorant: ``out[j] = min(g[:j+1])``."""
    g = _as_seq(g)
    return Seq(decreasing_rows(g.values[None, :])[0], g.step)


def sweep_increasing(g) -> Seq:
    """Largest nondecreasing minorant: ``out[j] = min(g[j:])``."""
    g = _as_seq(g)
    return Seq(increasing_rows(g.values[None, :])[0], g.step)


def qce_1d(g) -> Seq:
    """Quasiconvex envelope of a sequence.

    Pointwise maximum of the two monotone sweeps. The result is the largest
    down-up sequence below ``g`` and keeps both end values.

    >>> qce_1d([2, 0, 1, 0, 2]).values.tolist()
    [2.0, 0.0, 0.0, 0.0, 2.0]
    """
    g = _as_seq(g)
    return Seq(qce_rows(g.values[None, :])[0], g.step)


def robust_qce_1d(g, p) -> Seq:
    """Epsilon-robust envelope of a sequence.

    Parameters
    ----------
    g : Seq or array_like
        Input samples; the arc step is taken from ``g.step``.
    p : RobustParams or float
        Required slope magnitude ``epsilon`` per unit length.

    Returns
    -------
    Seq
        The maximum of the forward sweep ``d[j+1] = min(d[j] - eps*h, g[j+1])``,
        the backward sweep ``i[j-1] = min(i[j] - eps*h, g[j-1])`` and the
        constant ``min(g)``.  With ``epsilon = 0`` this is exactly
        :func:`qce_1d`.
    """
    g = _as_seq(g)
    eps = _epsilon(p)
    return Seq(robust_qce_rows(g.values[None, :], eps * g.step)[0], g.step)


def _argmin_range(values, tol):
    m = values.min()
    hits = np.flatnonzero(values <= m + tol)
    return int(hits[0]), int(hits[-1])


def classify_a(u, tol: float = 0.0) -> np.ndarray:
    """-1 left of the first argmin, 0 on the argmin interval, +1 right of it."""
    values = np.asarray(_as_seq(u).values)
    lo, hi = _argmin_range(values, tol)
    out = np.zeros(values.size, dtype=np.int8)
    out[:lo] = -1
    out[hi + 1 :] = 1
    return out


def is_down_up(u, tol: float = 1e-12) -> bool:
    values = _as_seq(u).values
    first, _ = _argmin_range(values, tol)
    steps = np.diff(values)
    return bool(np.all(steps[:first] <= tol) and np.all(steps[first:] >= -tol))


def is_robust_qc_1d(u, p, tol: float = 1e-12) -> bool:
    """Check every triple ``j < k < l`` against its worst admissible tilt.

    For a tilt ``s`` the triple condition reads
    ``u[k] <= max(u[j] - s*(k-j)*h, u[l] + s*(l-k)*h)``; the right side is
    smallest where the two affine pieces cross, so only the crossing slope
    clamped to ``[-eps, eps]`` has to be tested.
    """
    return robust_violation_1d(u, p) <= tol


def robust_violation_1d(u, p) -> float:
    """Largest excess ``u[k] - bound`` over all triples (0 if none)."""
    u = _as_seq(u)
    eps = _epsilon(p)
    v, h = u.values, u.step
    n = v.size
    worst = 0.0
    for k in range(1, n - 1):
        j = np.arange(k)[:, None]
        l = np.arange(k + 1, n)[None, :]
        tilt = np.clip((v[j] - v[l]) / ((l - j) * h), -eps, eps)
        bound = np.maximum(v[j] - tilt * (k - j) * h, v[l] + tilt * (l - k) * h)
        worst = max(worst, float(v[k] - bound.min()))
    return worst
