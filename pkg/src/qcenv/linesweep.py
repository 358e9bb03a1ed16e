"""Line solver: apply the 1D envelope along every lattice line, iterate."""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .directions import DirectionSet, canonicalize
from .envelope1d import qce_rows, robust_qce_rows
from .grid import GridFn

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LatticeLine:
    start: tuple[int, ...]
    step: tuple[int, ...]
    count: int

    def indices(self) -> np.ndarray:
        """Multi-indices of the points, ordered by increasing ``t``."""
        t = np.arange(self.count)[:, None]
        return np.asarray(self.start)[None, :] + t * np.asarray(self.step)[None, :]


@dataclass(frozen=True)
class SolveParams:
    """Stopping rule and mode.  ``epsilon=None`` selects the plain envelope."""

    tolerance: float = 1e-6
    max_outer_iterations: int = 50
    epsilon: float | None = None
    workers: int = 1

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_outer_iterations < 1:
            raise ValueError("max_outer_iterations must be at least 1")
        if self.epsilon is not None and not self.epsilon >= 0:
            raise ValueError("epsilon must be nonnegative")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass
class SolveReport:
    outer_iterations: int = 0
    max_change_per_iteration: list[float] = field(default_factory=list)
    converged: bool = False
    wall_time: float = 0.0


def _line_counts(shape, step):
    """Start multi-indices (sorted by flat index) and point counts per line."""
    shape = np.asarray(shape)
    step = np.asarray(step)
    idx = np.indices(tuple(shape)).reshape(len(shape), -1).T
    prev = idx - step
    is_start = np.any((prev < 0) | (prev >= shape), axis=1)
    starts = idx[is_start]
    counts = np.full(starts.shape[0], np.iinfo(np.int64).max, dtype=np.int64)
    for ax, s in enumerate(step):
        if s > 0:
            counts = np.minimum(counts, (shape[ax] - 1 - starts[:, ax]) // s + 1)
        elif s < 0:
            counts = np.minimum(counts, starts[:, ax] // (-s) + 1)
    return starts, counts


def enumerate_lines(shape, step) -> list[LatticeLine]:
    """Maximal lattice lines with direction ``step``; they partition the grid."""
    step = tuple(int(s) for s in step)
    if len(step) != len(shape):
        raise ValueError("step and shape dimensions differ")
    if canonicalize(step) != step:
        raise ValueError(f"step {step} is not canonical")
    starts, counts = _line_counts(shape, step)
    return [
        LatticeLine(tuple(int(c) for c in s), step, int(n))
        for s, n in zip(starts, counts)
    ]


@dataclass(frozen=True)
class _LinePlan:
    """Padded gather layout for all lines with at least two points."""

    mask: np.ndarray  # (lines, maxlen) bool, True on real entries
    pos: np.ndarray  # flat grid indices of the real entries, row-major in mask
    row_offsets: np.ndarray  # pos[row_offsets[r]:row_offsets[r+1]] is line r

    @property
    def n_lines(self) -> int:
        return self.mask.shape[0]


@lru_cache(maxsize=256)
def _plan(shape: tuple[int, ...], step: tuple[int, ...]) -> _LinePlan:
    starts, counts = _line_counts(shape, step)
    keep = counts >= 2
    starts, counts = starts[keep], counts[keep]
    strides = np.array(
        [math.prod(shape[ax + 1 :]) for ax in range(len(shape))], dtype=np.int64
    )
    flat_step = int(np.dot(strides, step))
    start_flat = starts @ strides
    maxlen = int(counts.max()) if counts.size else 0
    t = np.arange(maxlen, dtype=np.int64)
    mask = t[None, :] < counts[:, None]
    pos = (start_flat[:, None] + t[None, :] * flat_step)[mask]
    dtype = np.int32 if math.prod(shape) < 2**31 else np.int64
    offsets = np.concatenate([[0], np.cumsum(counts)])
    return _LinePlan(mask, pos.astype(dtype), offsets)


def arc_step(spacing, step) -> float:
    """Euclidean length of one lattice translation by ``step``."""
    return float(math.sqrt(sum((h * s) ** 2 for h, s in zip(spacing, step))))


def _run_rows(plan, src, dst, rows, eps_h):
    r0, r1 = rows
    mask = plan.mask[r0:r1]
    pos = plan.pos[plan.row_offsets[r0] : plan.row_offsets[r1]]
    V = np.full(mask.shape, np.inf)
    V[mask] = src[pos]
    W = qce_rows(V) if eps_h is None else robust_qce_rows(V, eps_h)
    dst[pos] = W[mask]


def _pass(values, shape, step, eps_h, workers, pool=None):
    plan = _plan(tuple(shape), tuple(step))
    out = values.copy()
    n = plan.n_lines
    if n == 0:
        return out
    if workers <= 1 or n < 2 * workers:
        _run_rows(plan, values, out, (0, n), eps_h)
        return out
    bounds = np.linspace(0, n, workers + 1).astype(int)
    chunks = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    own = pool is None
    pool = pool or ThreadPoolExecutor(max_workers=workers)
    try:
        list(pool.map(lambda rows: _run_rows(plan, values, out, rows, eps_h), chunks))
    finally:
        if own:
            pool.shutdown()
    return out


def _check_step(g: GridFn, step):
    step = tuple(int(s) for s in step)
    if len(step) != g.dim:
        raise ValueError(f"direction {step} does not match grid dimension {g.dim}")
    return canonicalize(step)


def apply_direction(
    u: GridFn, step, epsilon: float | None = None, workers: int = 1
) -> GridFn:
    """Replace every lattice line along ``step`` by its 1D envelope.

    With ``epsilon`` set, the robust envelope is used with the line's
    Euclidean arc step, and its floor is the minimum of that line.
    """
    step = _check_step(u, step)
    eps_h = None if epsilon is None else epsilon * arc_step(u.spacing, step)
    return u.with_values(_pass(u.values, u.shape, step, eps_h, workers))


def solve(
    g: GridFn,
    D: DirectionSet,
    params: SolveParams | None = None,
    callback: Callable[[int, GridFn], None] | None = None,
) -> tuple[GridFn, SolveReport]:
    """Iterate the composed directional envelope to a fixed point.

    Every outer iteration applies :func:`apply_direction` once per direction
    of ``D`` in order, each seeing the previous pass's output.  Iteration
    stops once an outer iteration changes no value by ``params.tolerance``
    or more.  ``callback(n, u_n)`` is called after each outer iteration.
    """
    params = params or SolveParams()
    if D.dim != g.dim:
        raise ValueError(f"direction set is {D.dim}D but the grid is {g.dim}D")
    steps = [_check_step(g, v) for v in D]
    eps_hs = [
        None if params.epsilon is None else params.epsilon * arc_step(g.spacing, v)
        for v in steps
    ]
    report = SolveReport()
    t0 = time.perf_counter()
    u = g.values.copy()
    pool = ThreadPoolExecutor(params.workers) if params.workers > 1 else None
    try:
        for n in range(1, params.max_outer_iterations + 1):
            prev = u
            for step, eps_h in zip(steps, eps_hs):
                u = _pass(u, g.shape, step, eps_h, params.workers, pool)
            change = float(np.max(np.abs(prev - u)))
            report.outer_iterations = n
            report.max_change_per_iteration.append(change)
            log.debug("outer iteration %d: max change %.3e", n, change)
            if callback is not None:
                callback(n, g.with_values(u))
            if change < params.tolerance:
                report.converged = True
                break
    finally:
        if pool is not None:
            pool.shutdown()
    report.wall_time = time.perf_counter() - t0
    return g.with_values(u), report


def robust_solve(g, D, epsilon: float, params: SolveParams | None = None, callback=None):
    """:func:`solve` in robust mode with slope bound ``epsilon``."""
    params = params or SolveParams()
    params = SolveParams(
        params.tolerance, params.max_outer_iterations, float(epsilon), params.workers
    )
    return solve(g, D, params, callback)
