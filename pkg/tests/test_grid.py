import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcenv.grid import GridFn, GridFormatError, build, min_info, read_grid, write_grid
from qcenv.testfns import neg_dist_interval

from conftest import random_grid


def test_build_linear_1d():
    g = build([(0.0, 1.0)], (3,), lambda x: x[:, 0])
    np.testing.assert_array_equal(g.values, [0.0, 0.5, 1.0])
    assert g.spacing == (0.5,)


def test_build_constant_2d():
    g = build([(-1, 1), (-1, 1)], (3, 3), lambda x: np.zeros(len(x)))
    assert g.size == 9 and not g.values.any()


def test_build_neg_dist():
    g = build([(-2, 2)], (5,), neg_dist_interval())
    np.testing.assert_array_equal(g.values, [-1, 0, 0, 0, -1])


def test_build_rejects_nonfinite_and_reports_coordinate():
    with pytest.raises(ValueError, match="0.5"):
        build([(0, 1)], (3,), lambda x: np.where(x[:, 0] == 0.5, np.nan, 0.0))


def test_build_scalar_sampler():
    g = build([(0, 1), (0, 2)], (2, 3), lambda p: p[0] + p[1], vectorized=False)
    np.testing.assert_allclose(g.array, [[0, 1, 2], [1, 2, 3]])


@pytest.mark.parametrize("kw", [
    dict(shape=(1,), origin=(0,), spacing=(1,), values=[0.0]),
    dict(shape=(2,), origin=(0,), spacing=(0,), values=[0.0, 1.0]),
    dict(shape=(2,), origin=(0,), spacing=(1,), values=[0.0, np.inf]),
    dict(shape=(2, 2), origin=(0, 0), spacing=(1, 1), values=[0.0, 1.0, 2.0]),
])
def test_gridfn_invariants(kw):
    with pytest.raises(ValueError):
        GridFn(**kw)


def test_values_are_read_only(rng):
    g = random_grid(rng, (3, 3))
    with pytest.raises(ValueError):
        g.values[0] = 1.0


def test_row_major_layout():
    g = build([(0, 1), (0, 2)], (2, 3), lambda x: 10 * x[:, 0] + x[:, 1])
    # last axis fastest
    np.testing.assert_allclose(g.values, [0, 1, 2, 10, 11, 12])
    np.testing.assert_allclose(g.coordinate_of(4), (1.0, 1.0))


@pytest.mark.parametrize("vals, tol, um, idx", [
    ([3, 1, 1, 3], 0, 1, [1, 2]),
    ([0, 2, 1, 3], 0, 0, [0]),
    ([2, 2, 2], 0, 2, [0, 1, 2]),
    ([1.0, 1.0 + 1e-10, 5.0], 1e-9, 1.0, [0, 1]),
])
def test_min_info(vals, tol, um, idx):
    g = GridFn((len(vals),), (0.0,), (1.0,), vals)
    m = min_info(g, tol)
    assert m.u_m == um and list(m.argmin_indices) == idx


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=50))
def test_min_info_matches_naive_scan(vals):
    g = GridFn((len(vals),), (0.0,), (1.0,), vals)
    m = min_info(g)
    assert m.u_m == min(vals)
    assert list(m.argmin_indices) == [i for i, v in enumerate(vals) if v == min(vals)]


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 6), st.integers(2, 6), st.floats(-5, 5), st.floats(0.01, 3))
def test_coordinate_index_roundtrip(n1, n2, o, h):
    g = GridFn((n1, n2), (o, -o), (h, 2 * h), np.zeros(n1 * n2))
    for i in range(g.size):
        c = g.coordinate_of(i)
        assert g.index_of(c) == i
        np.testing.assert_allclose(g.coordinate_of(g.index_of(c)), c, rtol=1e-12, atol=1e-12)


def test_write_read_roundtrip(tmp_path, rng):
    g = random_grid(rng, (4, 4), spacing=(0.1, 0.3))
    p = tmp_path / "g.grid"
    write_grid(g, p)
    h = read_grid(p)
    assert h.shape == g.shape and h.origin == g.origin and h.spacing == g.spacing
    np.testing.assert_array_equal(h.values, g.values)
    assert p.read_text().splitlines()[0] == "qcegrid 1"


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64),
                min_size=2, max_size=30))
def test_roundtrip_property(tmp_path_factory, vals):
    g = GridFn((len(vals),), (0.25,), (1e-3,), vals)
    p = tmp_path_factory.mktemp("rt") / "g.grid"
    write_grid(g, p)
    np.testing.assert_array_equal(read_grid(p).values, g.values)


def _write(tmp_path, text):
    p = tmp_path / "bad.grid"
    p.write_text(text)
    return p


def test_read_rejects_dim_shape_mismatch(tmp_path):
    p = _write(tmp_path, "qcegrid 1\ndim 2\nshape 2 2 2\norigin 0 0\nspacing 1 1\n")
    with pytest.raises(GridFormatError) as e:
        read_grid(p)
    assert e.value.line == 3


def test_read_nan_names_line(tmp_path):
    p = _write(tmp_path, "qcegrid 1\ndim 1\nshape 3\norigin 0\nspacing 1\n0\nnan\n1\n")
    with pytest.raises(GridFormatError, match="line 7"):
        read_grid(p)


def test_read_count_mismatch(tmp_path):
    p = _write(tmp_path, "qcegrid 1\ndim 1\nshape 3\norigin 0\nspacing 1\n0\n1\n")
    with pytest.raises(GridFormatError):
        read_grid(p)


def test_read_bad_magic(tmp_path):
    with pytest.raises(GridFormatError) as e:
        read_grid(_write(tmp_path, "grid 2\n"))
    assert e.value.line == 1


def test_read_scientific_notation(tmp_path):
    p = _write(tmp_path, "qcegrid 1\ndim 1\nshape 2\norigin -1e0\nspacing 2.5E-1\n1e-3\n-4\n")
    g = read_grid(p)
    assert g.origin == (-1.0,) and g.spacing == (0.25,)
    np.testing.assert_array_equal(g.values, [1e-3, -4.0])
