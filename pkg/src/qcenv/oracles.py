"""Brute-force references and diagnostics for the line solver.

Everything here is meant for small grids.  The relaxations enumerate
collinear index triples directly and never call the sweep operators, so
they can certify them.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .envelope1d import Seq, _epsilon
from .grid import GridFn
from .linesweep import _plan


@dataclass(frozen=True)
class ViolationReport:
    """Worst failure of ``u[z] <= max(u[x], u[y])`` over collinear triples.

    ``worst_triple`` is ``(x, z, y, direction)`` with flat indices and ``z``
    strictly between ``x`` and ``y``; it is ``None`` when nothing violates.
    """

    max_violation: float
    worst_triple: tuple | None
    count_above: int
    threshold: float = 1e-12


def walk_lines(shape, step) -> list[list[int]]:
    """Flat indices of each maximal line along ``step``, by plain walking."""
    shape = tuple(shape)
    step = tuple(step)

    def inside(p):
        return all(0 <= c < n for c, n in zip(p, shape))

    lines = []
    for p in itertools.product(*(range(n) for n in shape)):
        if inside(tuple(c - s for c, s in zip(p, step))):
            continue
        line = []
        q = p
        while inside(q):
            line.append(int(np.ravel_multi_index(q, shape)))
            q = tuple(c + s for c, s in zip(q, step))
        lines.append(line)
    return lines


def _relax_line_plain(w: np.ndarray) -> bool:
    """One Gauss-Seidel sweep of the triple rule over a line; True if changed."""
    changed = False
    n = w.size
    for k in range(1, n - 1):
        pair_max = np.maximum.outer(w[:k], w[k + 1 :])
        b = pair_max.min()
        if b < w[k]:
            w[k] = b
            changed = True
    return changed


def _relax_line_robust(w: np.ndarray, eps: float, h: float) -> bool:
    changed = False
    n = w.size
    for k in range(1, n - 1):
        j = np.arange(k)[:, None]
        l = np.arange(k + 1, n)[None, :]
        tilt = np.clip((w[j] - w[l]) / ((l - j) * h), -eps, eps)
        b = np.maximum(w[j] - tilt * (k - j) * h, w[l] + tilt * (l - k) * h).min()
        if b < w[k]:
            w[k] = b
            changed = True
    return changed


def _arc(spacing, step):
    return float(np.sqrt(sum((h * s) ** 2 for h, s in zip(spacing, step))))


def _relax_grid(g: GridFn, D, relax, order_rng=None) -> GridFn:
    v = g.values.copy()
    work = []
    for step in D:
        h = _arc(g.spacing, step)
        for line in walk_lines(g.shape, step):
            if len(line) >= 3:
                work.append((np.asarray(line), h))
    if order_rng is not None:
        order_rng.shuffle(work)
    cap = max(1, g.size * max(1, len(work)))
    for _ in range(cap):
        changed = False
        for idx, h in work:
            w = v[idx]
            if relax(w, h):
                v[idx] = w
                changed = True
        if not changed:
            return g.with_values(v)
    warnings.warn("relaxation hit its iteration cap", RuntimeWarning)
    return g.with_values(v)


def dqce_oracle(g: GridFn, D, order_rng=None) -> GridFn:
    """Discrete D-quasiconvex envelope by triple relaxation.

    Lowers ``v[z]`` to ``max(v[x], v[y])`` over every collinear triple along
    every direction of ``D`` until nothing changes.  ``order_rng`` shuffles
    the line visiting order (the fixed point does not depend on it).
    """
    if g.size > 4096:
        warnings.warn("dqce_oracle is cubic per line; this grid is large",
                      RuntimeWarning)
    return _relax_grid(g, D, lambda w, h: _relax_line_plain(w), order_rng)


def robust_dqce_oracle(g: GridFn, D, epsilon: float, order_rng=None) -> GridFn:
    """Robust analogue of :func:`dqce_oracle` with per-line arc steps."""
    eps = _epsilon(epsilon)
    return _relax_grid(g, D, lambda w, h: _relax_line_robust(w, eps, h), order_rng)


def robust_qce_oracle_1d(g, epsilon) -> Seq:
    """Fixed point of the clamped-tilt triple relaxation on one sequence."""
    g = g if isinstance(g, Seq) else Seq(g)
    eps = _epsilon(epsilon)
    w = g.values.copy()
    cap = max(1, w.size**3)
    for _ in range(cap):
        if not _relax_line_robust(w, eps, g.step):
            break
    else:
        warnings.warn("robust relaxation hit its iteration cap", RuntimeWarning)
    return Seq(w, g.step)


def _line_batches(u: GridFn, step, rows=2048):
    """Padded (+inf) value blocks of the lines along ``step``, with positions."""
    plan = _plan(u.shape, tuple(step))
    for r0 in range(0, plan.n_lines, rows):
        r1 = min(r0 + rows, plan.n_lines)
        mask = plan.mask[r0:r1]
        P = np.full(mask.shape, -1, dtype=np.int64)
        P[mask] = plan.pos[plan.row_offsets[r0] : plan.row_offsets[r1]]
        V = np.full(mask.shape, np.inf)
        V[mask] = u.values[P[mask]]
        yield V, P, mask


def qc_violation(u: GridFn, D, threshold: float = 1e-12) -> ViolationReport:
    """Worst quasiconvexity violation over collinear triples along ``D``.

    For a middle point ``z`` the worst triple pairs it with the smallest value
    on each side, so the maximum over all triples follows exactly from
    prefix and suffix minima.  ``count_above`` counts every triple whose
    excess exceeds ``threshold``.
    """
    best = 0.0
    witness = None
    count = 0
    for step in D:
        for V, P, mask in _line_batches(u, step):
            inf = np.full((V.shape[0], 1), np.inf)
            left = np.concatenate([inf, np.minimum.accumulate(V, axis=1)[:, :-1]], 1)
            right = np.minimum.accumulate(V[:, ::-1], axis=1)[:, ::-1]
            right = np.concatenate([right[:, 1:], inf], 1)
            with np.errstate(invalid="ignore"):
                excess = np.where(mask, V - np.maximum(left, right), -np.inf)
            r, k = np.unravel_index(int(np.argmax(excess)), excess.shape)
            batch_worst = excess[r, k]
            if batch_worst > best:
                best = float(excess[r, k])
                j = int(np.argmin(V[r, :k]))
                l = k + 1 + int(np.argmin(V[r, k + 1 :]))
                witness = (int(P[r, j]), int(P[r, k]), int(P[r, l]), tuple(step))
            if batch_worst > threshold:
                # triples (j, k, l) with both ends below w[k] - threshold
                low = V[:, :, None] < (V[:, None, :] - threshold)  # [r, j, k]
                n = V.shape[1]
                before = np.tril(np.ones((n, n), dtype=bool), -1).T  # j < k
                n_left = (low & before[None]).sum(axis=1)
                n_right = (low & before.T[None]).sum(axis=1)
                count += int((n_left * n_right)[mask].sum())
    return ViolationReport(best, witness, count, threshold)


def robust_qc_violation(u: GridFn, D, epsilon: float,
                        threshold: float = 1e-12) -> ViolationReport:
    """Worst robust-triple excess along every lattice line of ``D``."""
    eps = _epsilon(epsilon)
    best = 0.0
    witness = None
    count = 0
    for step in D:
        h = _arc(u.spacing, step)
        for V, P, mask in _line_batches(u, step, rows=256):
            n = V.shape[1]
            for k in range(1, n - 1):
                j = np.arange(k)[None, :, None]
                l = np.arange(k + 1, n)[None, None, :]
                wj = V[:, :k, None]
                wl = V[:, None, k + 1 :]
                with np.errstate(invalid="ignore"):
                    tilt = np.clip((wj - wl) / ((l - j) * h), -eps, eps)
                    bound = np.maximum(wj - tilt * (k - j) * h, wl + tilt * (l - k) * h)
                    excess = V[:, k, None, None] - bound
                excess = np.where(np.isfinite(excess), excess, -np.inf)
                count += int(np.count_nonzero(excess > threshold))
                r, a, b = np.unravel_index(int(np.argmax(excess)), excess.shape)
                if excess[r, a, b] > best:
                    best = float(excess[r, a, b])
                    witness = (int(P[r, a]), int(P[r, k]), int(P[r, k + 1 + b]),
                               tuple(step))
    return ViolationReport(best, witness, count, threshold)


def hj_residual(u: GridFn, x) -> float:
    """Nonlocal residual ``sup {grad u(x) . (y - x) : u(y) <= u(x)}``.

    The gradient uses central differences, so ``x`` (flat or multi-index)
    must be an interior point.  Quasiconvex ``u`` gives residuals of order
    ``h`` at smooth points.
    """
    mi = u.multi_index(x) if np.ndim(x) == 0 else tuple(int(c) for c in x)
    if any(c <= 0 or c >= n - 1 for c, n in zip(mi, u.shape)):
        raise ValueError(f"index {mi} is on the grid boundary")
    a = u.array
    grad = np.empty(u.dim)
    for ax in range(u.dim):
        hi = list(mi)
        lo = list(mi)
        hi[ax] += 1
        lo[ax] -= 1
        grad[ax] = (a[tuple(hi)] - a[tuple(lo)]) / (2 * u.spacing[ax])
    flat = int(np.ravel_multi_index(mi, u.shape))
    below = u.values <= u.values[flat]
    pts = u.coordinates()[below] - u.coordinate_of(flat)
    return float((pts @ grad).max())
