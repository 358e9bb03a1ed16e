"""Writers for masks (ASCII PBM), contour plots (SVG) and 3D grids (VTK)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .grid import GridFn
from .levelset import ContourSet, Mask

SVG_WIDTH, SVG_HEIGHT = 800, 600
SVG_PAD = 0.05
_COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def write_pbm(mask: Mask, path) -> None:
    """Plain PBM; image rows run from the top (largest ``x2``) down, columns
    follow ``x1``.  1 marks an occupied cell."""
    if len(mask.shape) != 2:
        raise ValueError("PBM output needs a 2D mask")
    img = mask.data.T[::-1].astype(np.uint8)
    lines = ["P1", f"{img.shape[1]} {img.shape[0]}"]
    lines += [" ".join(str(int(b)) for b in row) for row in img]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_pbm(path) -> Mask:
    tokens = Path(path).read_text(encoding="ascii").split()
    if not tokens or tokens[0] != "P1":
        raise ValueError("not a plain PBM file")
    w, h = int(tokens[1]), int(tokens[2])
    bits = np.array([int(t) for t in "".join(tokens[3:])], dtype=bool)
    if bits.size != w * h:
        raise ValueError("PBM pixel count does not match its header")
    img = bits.reshape(h, w)
    data = img[::-1].T
    return Mask(data.shape, data)


def _svg_transform(box):
    (x0, x1), (y0, y1) = box
    usable_w = SVG_WIDTH * (1 - 2 * SVG_PAD)
    usable_h = SVG_HEIGHT * (1 - 2 * SVG_PAD)
    scale = min(usable_w / (x1 - x0), usable_h / (y1 - y0))
    ox = (SVG_WIDTH - scale * (x1 - x0)) / 2
    oy = (SVG_HEIGHT - scale * (y1 - y0)) / 2

    def to_px(p):
        return ox + (p[0] - x0) * scale, SVG_HEIGHT - (oy + (p[1] - y0) * scale)

    return to_px


def _path_data(poly, to_px) -> str:
    pts = [to_px(p) for p in poly]
    head = f"M{pts[0][0]:.3f},{pts[0][1]:.3f}"
    return head + "".join(f" L{x:.3f},{y:.3f}" for x, y in pts[1:])


def render_svg(box, contours: ContourSet, path, overlay: ContourSet | None = None):
    """One ``<g>`` per level: solid for ``contours``, dashed for ``overlay``."""
    to_px = _svg_transform(box)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
    ]
    (bx0, bx1), (by0, by1) = box
    c0, c1 = to_px((bx0, by1)), to_px((bx1, by0))
    out.append(
        f'<rect x="{c0[0]:.3f}" y="{c0[1]:.3f}" width="{c1[0] - c0[0]:.3f}" '
        f'height="{c1[1] - c0[1]:.3f}" fill="none" stroke="#cccccc"/>'
    )
    layers = [("input", contours, "")]
    if overlay is not None:
        layers.append(("overlay", overlay, ' stroke-dasharray="6,4"'))
    for name, cs, dash in layers:
        for i, (level, polys) in enumerate(zip(cs.levels, cs.polylines)):
            color = _COLORS[i % len(_COLORS)]
            out.append(
                f'<g class="{name}" data-level="{level!r}" fill="none" '
                f'stroke="{color}" stroke-width="1.5"{dash}>'
            )
            out.extend(f'<path d="{_path_data(p, to_px)}"/>' for p in polys if len(p) > 1)
            out.append("</g>")
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def write_vtk(u: GridFn, path, name: str = "u") -> None:
    """Legacy ASCII VTK STRUCTURED_POINTS with one scalar point field."""
    dims = list(u.shape) + [1] * (3 - u.dim)
    origin = list(u.origin) + [0.0] * (3 - u.dim)
    spacing = list(u.spacing) + [1.0] * (3 - u.dim)
    # VTK wants x fastest; our storage has the last axis fastest
    vals = u.array.transpose().reshape(-1)
    lines = [
        "# vtk DataFile Version 3.0",
        "quasiconvex envelope grid",
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        "DIMENSIONS " + " ".join(str(d) for d in dims),
        "ORIGIN " + " ".join(repr(float(o)) for o in origin),
        "SPACING " + " ".join(repr(float(h)) for h in spacing),
        f"POINT_DATA {u.size}",
        f"SCALARS {name} double 1",
        "LOOKUP_TABLE default",
    ]
    lines.extend(format(float(v), ".17g") for v in vals)
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
