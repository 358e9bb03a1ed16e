"""Grid-sampled scalar functions on uniform boxes, plus the text file format.

Values are stored flat in row-major order (last axis fastest), so axis 0 is
the first coordinate ``x1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

FORMAT_MAGIC = "qcegrid 1"


class GridFormatError(ValueError):
    """Raised when a grid file cannot be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class GridFn:
    """A scalar function sampled on a uniform axis-aligned grid.

    Attributes
    ----------
    shape : tuple of int
        Samples per axis, each at least 2.
    origin : tuple of float
        Coordinates of the first sample.
    spacing : tuple of float
        Step per axis, strictly positive.
    values : ndarray
        Flat float64 array of length ``prod(shape)``.
    """

    shape: tuple[int, ...]
    origin: tuple[float, ...]
    spacing: tuple[float, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        origin = tuple(float(o) for o in self.origin)
        spacing = tuple(float(h) for h in self.spacing)
        if not 1 <= len(shape) <= 3:
            raise ValueError(f"dimension must be 1, 2 or 3, got {len(shape)}")
        if len(origin) != len(shape) or len(spacing) != len(shape):
            raise ValueError("shape, origin and spacing must have the same length")
        if any(n < 2 for n in shape):
            raise ValueError(f"every axis needs at least 2 samples, got {shape}")
        if any(not (h > 0 and math.isfinite(h)) for h in spacing):
            raise ValueError(f"spacing must be finite and positive, got {spacing}")
        values = np.array(self.values, dtype=np.float64).reshape(-1)
        if values.size != math.prod(shape):
            raise ValueError(
                f"values has length {values.size}, expected {math.prod(shape)}"
            )
        bad = ~np.isfinite(values)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise ValueError(f"non-finite value {values[i]} at flat index {i}")
        values.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the values with shape ``self.shape``."""
        return self.values.reshape(self.shape)

    @property
    def box(self) -> list[tuple[float, float]]:
        return [
            (o, o + h * (n - 1))
            for o, h, n in zip(self.origin, self.spacing, self.shape)
        ]

    def with_values(self, values) -> "GridFn":
        """Same grid geometry, new values."""
        return GridFn(self.shape, self.origin, self.spacing, values)

    def multi_index(self, index: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(index, self.shape))

    def coordinate_of(self, index) -> np.ndarray:
        """Coordinates of a flat index or a multi-index."""
        if np.ndim(index) == 0:
            index = np.unravel_index(int(index), self.shape)
        idx = np.asarray(index, dtype=np.float64)
        return np.asarray(self.origin) + idx * np.asarray(self.spacing)

    def index_of(self, coordinate) -> int:
        """Flat index of the lattice point nearest to ``coordinate``."""
        c = np.asarray(coordinate, dtype=np.float64).reshape(self.dim)
        idx = np.rint((c - np.asarray(self.origin)) / np.asarray(self.spacing))
        idx = idx.astype(np.int64)
        if np.any(idx < 0) or np.any(idx >= np.asarray(self.shape)):
            raise ValueError(f"coordinate {tuple(c)} lies outside the grid")
        return int(np.ravel_multi_index(tuple(idx), self.shape))

    def coordinates(self) -> np.ndarray:
        """All sample coordinates as an ``(size, dim)`` array in flat order."""
        axes = [
            o + h * np.arange(n)
            for o, h, n in zip(self.origin, self.spacing, self.shape)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)


@dataclass(frozen=True)
class MinInfo:
    u_m: float
    argmin_indices: tuple[int, ...]


def build(
    domain_box: Sequence[Sequence[float]],
    shape: Sequence[int],
    sampler: Callable[[np.ndarray], np.ndarray],
    vectorized: bool = True,
) -> GridFn:
    """Sample ``sampler`` on a uniform grid covering ``domain_box``.

    Parameters
    ----------
    domain_box : sequence of (lo, hi)
        One interval per axis; the end points are sampled.
    shape : sequence of int
        Samples per axis.
    sampler : callable
        With ``vectorized=True`` it receives an ``(N, dim)`` array of points and
        returns ``N`` values; otherwise it is called once per point with a
        length-``dim`` array.
    """
    box = [tuple(map(float, b)) for b in domain_box]
    shape = tuple(int(n) for n in shape)
    if len(box) != len(shape):
        raise ValueError("domain_box and shape must have the same length")
    if any(n < 2 for n in shape):
        raise ValueError(f"every axis needs at least 2 samples, got {shape}")
    if any(not hi > lo for lo, hi in box):
        raise ValueError(f"empty domain box {box}")
    origin = tuple(lo for lo, _ in box)
    spacing = tuple((hi - lo) / (n - 1) for (lo, hi), n in zip(box, shape))
    probe = GridFn(shape, origin, spacing, np.zeros(math.prod(shape)))
    points = probe.coordinates()
    if vectorized:
        values = np.asarray(sampler(points), dtype=np.float64).reshape(-1)
        if values.size != points.shape[0]:
            raise ValueError(
                f"sampler returned {values.size} values for {points.shape[0]} points"
            )
    else:
        values = np.array([float(sampler(p)) for p in points])
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise ValueError(
            f"sampler returned {values[i]} at coordinate {tuple(points[i])}"
        )
    return probe.with_values(values)


def min_info(u: GridFn, tol: float = 0.0) -> MinInfo:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    values = u.values
    u_m = float(values.min())
    idx = np.flatnonzero(values <= u_m + tol)
    return MinInfo(u_m, tuple(int(i) for i in idx))


def write_grid(u: GridFn, path) -> None:
    lines = [
        FORMAT_MAGIC,
        f"dim {u.dim}",
        "shape " + " ".join(str(n) for n in u.shape),
        "origin " + " ".join(repr(o) for o in u.origin),
        "spacing " + " ".join(repr(h) for h in u.spacing),
    ]
    lines.extend(format(float(v), ".17g") for v in u.values)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _header_numbers(line: str, key: str, lineno: int, cast, count: int | None):
    parts = line.split()
    if not parts or parts[0] != key:
        raise GridFormatError(f"expected '{key} ...', got {line!r}", lineno)
    try:
        nums = [cast(p) for p in parts[1:]]
    except ValueError:
        raise GridFormatError(f"bad number in {line!r}", lineno) from None
    if count is not None and len(nums) != count:
        raise GridFormatError(
            f"'{key}' needs {count} entries for this dimension, got {len(nums)}",
            lineno,
        )
    if cast is float and not all(math.isfinite(x) for x in nums):
        raise GridFormatError(f"non-finite entry in {line!r}", lineno)
    return nums


def read_grid(path) -> GridFn:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if len(lines) < 5:
        raise GridFormatError("file too short for the 5-line header", len(lines) or 1)
    if lines[0].strip() != FORMAT_MAGIC:
        raise GridFormatError(f"expected {FORMAT_MAGIC!r}", 1)
    (dim,) = _header_numbers(lines[1], "dim", 2, int, 1)
    if dim not in (1, 2, 3):
        raise GridFormatError(f"dim must be 1, 2 or 3, got {dim}", 2)
    shape = _header_numbers(lines[2], "shape", 3, int, dim)
    if any(n < 2 for n in shape):
        raise GridFormatError("every shape entry must be at least 2", 3)
    origin = _header_numbers(lines[3], "origin", 4, float, dim)
    spacing = _header_numbers(lines[4], "spacing", 5, float, dim)
    if any(h <= 0 for h in spacing):
        raise GridFormatError("spacing entries must be positive", 5)

    body = [(i + 6, s.strip()) for i, s in enumerate(lines[5:])]
    body = [(n, s) for n, s in body if s]
    expected = math.prod(shape)
    if len(body) != expected:
        lineno = body[expected][0] if len(body) > expected else len(lines) + 1
        raise GridFormatError(
            f"expected {expected} values, found {len(body)}", lineno
        )
    values = np.empty(expected)
    for k, (lineno, token) in enumerate(body):
        try:
            v = float(token)
        except ValueError:
            raise GridFormatError(f"not a number: {token!r}", lineno) from None
        if not math.isfinite(v):
            raise GridFormatError(f"non-finite value {token!r}", lineno)
        values[k] = v
    return GridFn(tuple(shape), tuple(origin), tuple(spacing), values)
