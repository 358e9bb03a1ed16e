import xml.etree.ElementTree as ET

import numpy as np
import pytest

from qcenv.grid import GridFn, build
from qcenv.export import read_pbm, render_svg, write_pbm, write_vtk
from qcenv.levelset import Mask, marching_squares

SVG = "{http://www.w3.org/2000/svg}"


def test_pbm_roundtrip(tmp_path, rng):
    a = rng.random((5, 7)) < 0.5
    write_pbm(Mask(a.shape, a), tmp_path / "m.pbm")
    back = read_pbm(tmp_path / "m.pbm")
    np.testing.assert_array_equal(back.data, a)
    head = (tmp_path / "m.pbm").read_text().splitlines()
    assert head[0] == "P1" and head[1] == "5 7"


def test_pbm_orientation(tmp_path):
    a = np.zeros((3, 2), bool)
    a[2, 1] = True  # largest x1, largest x2: top right pixel
    write_pbm(Mask(a.shape, a), tmp_path / "m.pbm")
    rows = (tmp_path / "m.pbm").read_text().splitlines()[2:]
    assert rows[0] == "0 0 1"


def test_svg_groups(tmp_path):
    g = build([(-1, 1), (-1, 1)], (21, 21), lambda x: np.linalg.norm(x, axis=1))
    h = g.with_values(g.values * 0.9)
    levels = [0.3, 0.6]
    render_svg(g.box, marching_squares(g, levels), tmp_path / "a.svg",
               overlay=marching_squares(h, levels))
    root = ET.parse(tmp_path / "a.svg").getroot()
    assert root.get("width") == "800" and root.get("height") == "600"
    groups = root.findall(f"{SVG}g")
    assert [gr.get("class") for gr in groups] == ["input", "input", "overlay", "overlay"]
    assert all(gr.get("stroke-dasharray") is None for gr in groups[:2])
    assert all(gr.get("stroke-dasharray") for gr in groups[2:])
    assert all(len(gr.findall(f"{SVG}path")) == 1 for gr in groups)
    # the domain maps inside the padded viewport
    for path in root.iter(f"{SVG}path"):
        nums = [float(t) for t in path.get("d").replace("M", " ").replace("L", " ")
                .replace(",", " ").split()]
        xs, ys = nums[0::2], nums[1::2]
        assert 0 < min(xs) and max(xs) < 800 and 0 < min(ys) and max(ys) < 600


def test_vtk(tmp_path):
    g = GridFn((2, 3), (0.0, 1.0), (0.5, 0.25), np.arange(6.0))
    write_vtk(g, tmp_path / "g.vtk")
    lines = (tmp_path / "g.vtk").read_text().splitlines()
    assert lines[0].startswith("# vtk DataFile")
    assert "DIMENSIONS 2 3 1" in lines and "POINT_DATA 6" in lines
    vals = [float(v) for v in lines[lines.index("LOOKUP_TABLE default") + 1 :]]
    # x fastest: (0,0), (1,0), (0,1), ...
    assert vals == [0, 3, 1, 4, 2, 5]


def test_pbm_rejects_3d(tmp_path):
    with pytest.raises(ValueError):
        write_pbm(Mask((2, 2, 2), np.zeros(8, bool)), tmp_path / "x.pbm")
