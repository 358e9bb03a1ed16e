"""Convex hulls of sublevel sets through the quasiconvex envelope."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .grid import GridFn
from .linesweep import SolveParams, solve

_BLOCK = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True, eq=False)
class Mask:
    shape: tuple[int, ...]
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=bool).reshape(self.shape)
        object.__setattr__(self, "shape", tuple(self.shape))
        object.__setattr__(self, "data", data)

    @property
    def count(self) -> int:
        return int(self.data.sum())

    def __eq__(self, other):
        return (
            isinstance(other, Mask)
            and self.shape == other.shape
            and np.array_equal(self.data, other.data)
        )


@dataclass
class ContourSet:
    """Per-level polylines in domain coordinates; each is an ``(n, 2)`` array."""

    levels: list[float]
    polylines: list[list[np.ndarray]]

    def closed(self, i: int, j: int) -> bool:
        p = self.polylines[i][j]
        return len(p) > 2 and np.allclose(p[0], p[-1])


def sublevel_mask(u: GridFn, alpha: float) -> Mask:
    return Mask(u.shape, u.array <= alpha)


def hull_via_qce(g: GridFn, alpha: float, D, params: SolveParams | None = None):
    """Envelope of ``g`` and its ``alpha``-sublevel mask."""
    if g.dim != 2:
        raise ValueError("hull_via_qce works on 2D grids")
    u, _ = solve(g, D, params)
    return u, sublevel_mask(u, alpha)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def monotone_chain(points) -> list[tuple[int, int]]:
    """Counter-clockwise hull vertices, collinear points dropped."""
    pts = sorted(set(map(tuple, points)))
    if len(pts) <= 2:
        return pts
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def convex_hull_oracle(m: Mask) -> Mask:
    """Rasterized convex hull of the occupied cells, boundary included.

    Works in integer index coordinates, so every inclusion test is exact.
    """
    if len(m.shape) != 2:
        raise ValueError("convex_hull_oracle works on 2D masks")
    pts = np.argwhere(m.data)
    if pts.size == 0:
        raise ValueError("cannot take the hull of an empty mask")
    hull = monotone_chain(pts.tolist())
    I, J = np.indices(m.shape)
    if len(hull) == 1:
        inside = (I == hull[0][0]) & (J == hull[0][1])
    elif len(hull) == 2:
        (a0, a1), (b0, b1) = hull
        cross = (b0 - a0) * (J - a1) - (b1 - a1) * (I - a0)
        dot = (I - a0) * (b0 - a0) + (J - a1) * (b1 - a1)
        length2 = (b0 - a0) ** 2 + (b1 - a1) ** 2
        inside = (cross == 0) & (dot >= 0) & (dot <= length2)
    else:
        inside = np.ones(m.shape, dtype=bool)
        for (a0, a1), (b0, b1) in zip(hull, hull[1:] + hull[:1]):
            inside &= (b0 - a0) * (J - a1) - (b1 - a1) * (I - a0) >= 0
    return Mask(m.shape, inside)


def mask_diff(a: Mask, b: Mask) -> tuple[int, float]:
    """Symmetric-difference size and its fraction of the union."""
    if a.shape != b.shape:
        raise ValueError(f"mask shapes differ: {a.shape} vs {b.shape}")
    count = int(np.count_nonzero(a.data ^ b.data))
    union = int(np.count_nonzero(a.data | b.data))
    return count, (count / union if union else 0.0)


def boundary_band(m: Mask, cells: int = 2) -> Mask:
    """Cells within Chebyshev distance ``cells`` of the mask's boundary.

    The boundary is the set of occupied cells that have an unoccupied
    8-neighbour (cells beyond the grid count as unoccupied).
    """
    padded = np.pad(m.data, 1, constant_values=False)
    interior = ndimage.binary_erosion(padded, _BLOCK)[1:-1, 1:-1]
    edge = m.data & ~interior
    if cells > 0 and edge.any():
        edge = ndimage.binary_dilation(edge, _BLOCK, iterations=cells)
    return Mask(m.shape, edge)


def diff_within_band(a: Mask, reference: Mask, cells: int = 2) -> bool:
    """True if every cell where ``a`` and ``reference`` differ is near the
    boundary of ``reference``."""
    diff = a.data ^ reference.data
    return not np.any(diff & ~boundary_band(reference, cells).data)


# -- marching squares ------------------------------------------------------

# corner bits: 1 = (i, j), 2 = (i+1, j), 4 = (i+1, j+1), 8 = (i, j+1)
# edges: 0 bottom (i,j)-(i+1,j), 1 right, 2 top (i,j+1)-(i+1,j+1), 3 left
_SEGMENTS = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)],
    6: [(0, 2)], 7: [(3, 2)], 8: [(2, 3)], 9: [(2, 0)],
    11: [(2, 1)], 12: [(1, 3)], 13: [(1, 0)], 14: [(0, 3)],
}
# saddles, indexed by (case, centre is high)
_SADDLES = {
    (5, True): [(3, 2), (1, 0)], (5, False): [(3, 0), (1, 2)],
    (10, True): [(0, 3), (2, 1)], (10, False): [(0, 1), (2, 3)],
}


def _edge_key(i, j, e):
    """Global id of a cell edge, shared by the two cells touching it."""
    if e == 0:
        return ("h", i, j)
    if e == 2:
        return ("h", i, j + 1)
    if e == 3:
        return ("v", i, j)
    return ("v", i + 1, j)


def _edge_point(a, i, j, e, level, origin, spacing):
    (p, q) = {0: ((i, j), (i + 1, j)), 1: ((i + 1, j), (i + 1, j + 1)),
              2: ((i, j + 1), (i + 1, j + 1)), 3: ((i, j), (i, j + 1))}[e]
    va, vb = a[p], a[q]
    t = 0.5 if vb == va else (level - va) / (vb - va)
    t = min(max(t, 0.0), 1.0)
    x = p[0] + t * (q[0] - p[0])
    y = p[1] + t * (q[1] - p[1])
    return (origin[0] + x * spacing[0], origin[1] + y * spacing[1])


def _chain(segments: list[tuple]) -> list[list]:
    """Join segments sharing edge keys into maximal paths."""
    adj = defaultdict(list)
    for s, (k0, k1) in enumerate(segments):
        adj[k0].append(s)
        adj[k1].append(s)
    used = [False] * len(segments)

    def walk(key, seg):
        path = [key]
        while seg is not None:
            used[seg] = True
            k0, k1 = segments[seg]
            key = k1 if k0 == key else k0
            path.append(key)
            seg = next((t for t in adj[key] if not used[t]), None)
        return path

    paths = []
    # open paths start at edge keys touched by a single segment
    for key, segs in adj.items():
        if len(segs) == 1 and not used[segs[0]]:
            paths.append(walk(key, segs[0]))
    for s in range(len(segments)):
        if not used[s]:
            paths.append(walk(segments[s][0], s))
    return paths


def marching_squares(u: GridFn, levels) -> ContourSet:
    """Linear-interpolation contours of a 2D grid at each level.

    Corners with value ``>= level`` count as high; saddle cells are resolved
    by comparing the average of the four corners with the level.
    """
    if u.dim != 2:
        raise ValueError("marching_squares works on 2D grids")
    a = u.array
    nx, ny = u.shape
    levels = [float(c) for c in np.atleast_1d(levels)]
    out = []
    for level in levels:
        high = a >= level
        case = (
            high[:-1, :-1] * 1 + high[1:, :-1] * 2 + high[1:, 1:] * 4 + high[:-1, 1:] * 8
        )
        segments = []
        points = {}
        for i, j in np.argwhere((case != 0) & (case != 15)):
            c = int(case[i, j])
            if c in (5, 10):
                centre = (a[i, j] + a[i + 1, j] + a[i + 1, j + 1] + a[i, j + 1]) / 4
                pairs = _SADDLES[(c, bool(centre >= level))]
            else:
                pairs = _SEGMENTS[c]
            for e0, e1 in pairs:
                k0, k1 = _edge_key(i, j, e0), _edge_key(i, j, e1)
                for k, e in ((k0, e0), (k1, e1)):
                    if k not in points:
                        points[k] = _edge_point(a, i, j, e, level, u.origin, u.spacing)
                segments.append((k0, k1))
        lines = [np.array([points[k] for k in path]) for path in _chain(segments)]
        out.append(lines)
    return ContourSet(levels, out)
