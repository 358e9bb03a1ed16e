import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from qcenv.envelope1d import (RobustParams, Seq, classify_a, is_down_up, is_robust_qc_1d,
                              qce_1d, robust_qce_1d, robust_violation_1d, sweep_decreasing,
                              sweep_increasing)
from qcenv.oracles import robust_qce_oracle_1d

seqs = arrays(np.float64, st.integers(1, 40), elements=st.floats(-10, 10))
small_seqs = arrays(np.float64, st.integers(1, 12), elements=st.floats(-3, 3))
epsilons = st.sampled_from([0.0, 0.1, 0.5, 1.0, 5.0])


def direct_qce(g):
    """Quadratic-time evaluation of max(min over y <= x, min over y >= x)."""
    g = list(g)
    out = []
    for x in range(len(g)):
        left = min(g[y] for y in range(x + 1))
        right = min(g[y] for y in range(x, len(g)))
        out.append(max(left, right))
    return np.array(out)


@pytest.mark.parametrize("g, expected", [
    ([3, 2, 1], [3, 2, 1]),
    ([0, 2, 1, 3], [0, 0, 0, 0]),
    ([2, 0, 1, 0, 2], [2, 0, 0, 0, 0]),
])
def test_sweep_decreasing_examples(g, expected):
    np.testing.assert_array_equal(sweep_decreasing(g).values, expected)


@pytest.mark.parametrize("g, expected", [
    ([1, 2, 3], [1, 2, 3]),
    ([0, 2, 1, 3], [0, 1, 1, 3]),
    ([2, 0, 1, 0, 2], [0, 0, 0, 0, 2]),
])
def test_sweep_increasing_examples(g, expected):
    np.testing.assert_array_equal(sweep_increasing(g).values, expected)


@pytest.mark.parametrize("g, expected", [
    ([3, 1, 0, 0, 2, 5], [3, 1, 0, 0, 2, 5]),
    ([2, 0, 1, 0, 2], [2, 0, 0, 0, 2]),
    ([-1, 0, 0, 0, -1], [-1, -1, -1, -1, -1]),
])
def test_qce_examples(g, expected):
    np.testing.assert_array_equal(qce_1d(g).values, expected)


def test_step_is_carried_through():
    out = qce_1d(Seq([1, 2, 0], step=0.25))
    assert out.step == 0.25


@given(seqs)
def test_qce_matches_direct(g):
    np.testing.assert_array_equal(qce_1d(g).values, direct_qce(g))


@given(seqs)
def test_qce_structure(g):
    u = qce_1d(g).values
    assert np.all(u <= g)
    assert is_down_up(u, tol=0)
    assert u[0] == g[0] and u[-1] == g[-1]
    np.testing.assert_array_equal(qce_1d(u).values, u)
    np.testing.assert_array_equal(sweep_decreasing(sweep_decreasing(g)).values,
                                  sweep_decreasing(g).values)
    np.testing.assert_array_equal(sweep_increasing(sweep_increasing(g)).values,
                                  sweep_increasing(g).values)
    assert np.all(np.diff(sweep_decreasing(g).values) <= 0)
    assert np.all(np.diff(sweep_increasing(g).values) >= 0)


@given(seqs, st.data())
def test_comparison_principle(g, data):
    bump = data.draw(arrays(np.float64, g.size, elements=st.floats(0, 5)))
    gh = g + bump
    for op in (sweep_decreasing, sweep_increasing, qce_1d):
        assert np.all(op(g).values <= op(gh).values)
    eps = data.draw(epsilons)
    assert np.all(robust_qce_1d(g, eps).values <= robust_qce_1d(gh, eps).values)


@given(seqs)
def test_value_transform_equivariance(g):
    phi = lambda t: np.tanh(t / 4) + 2 * t
    np.testing.assert_array_equal(qce_1d(phi(g)).values, phi(qce_1d(g).values))
    np.testing.assert_array_equal(sweep_decreasing(phi(g)).values,
                                  phi(sweep_decreasing(g).values))


# -- robust ----------------------------------------------------------------


def test_robust_eps_zero_is_plain():
    g = np.array([2.0, 0.0, 1.0, 0.0, 2.0])
    np.testing.assert_array_equal(robust_qce_1d(g, 0.0).values, qce_1d(g).values)


def test_robust_hand_cases():
    np.testing.assert_allclose(robust_qce_1d([0, 1, 1, 2], 0.5).values, [0, 0.5, 1, 2],
                               atol=1e-15)
    np.testing.assert_array_equal(robust_qce_1d([1, 0, 0, 1], RobustParams(0.5)).values,
                                  [1, 0, 0, 1])


@pytest.mark.parametrize("n", [1, 2, 7])
def test_robust_constant(n):
    np.testing.assert_array_equal(robust_qce_1d(np.zeros(n), 3.0).values, np.zeros(n))


def test_robust_rejects_negative_eps():
    with pytest.raises(ValueError):
        robust_qce_1d([0, 1], -0.1)
    with pytest.raises(ValueError):
        RobustParams(-1.0)


def test_robust_step_scales_slope():
    # eps*h is what matters: eps 0.5 at h = 2 acts like eps 1 at h = 1
    g = [0, 3, 3, 3, 5]
    a = robust_qce_1d(Seq(g, 2.0), 0.5).values
    b = robust_qce_1d(Seq(g, 1.0), 1.0).values
    np.testing.assert_array_equal(a, b)


@settings(max_examples=200)
@given(small_seqs, epsilons, st.floats(0.1, 2))
def test_robust_properties(g, eps, h):
    s = Seq(g, h)
    u = robust_qce_1d(s, eps)
    assert np.all(u.values <= g)
    assert is_robust_qc_1d(u, eps, tol=1e-12)
    np.testing.assert_allclose(robust_qce_1d(u, eps).values, u.values, atol=1e-12)
    # the relaxation is the largest feasible minorant, so it sits above
    assert np.all(robust_qce_oracle_1d(s, eps).values >= u.values - 1e-12)


@given(small_seqs, st.floats(-5, 5), epsilons)
def test_robust_shift_equivariance(g, c, eps):
    np.testing.assert_allclose(robust_qce_1d(g + c, eps).values,
                               robust_qce_1d(g, eps).values + c, atol=1e-9)


@given(small_seqs, epsilons, epsilons)
def test_robust_monotone_in_eps(g, e1, e2):
    lo, hi = sorted((e1, e2))
    assert np.all(robust_qce_1d(g, hi).values <= robust_qce_1d(g, lo).values)


# -- checkers --------------------------------------------------------------


@pytest.mark.parametrize("u, expected", [
    ([3, 1, 1, 3], [-1, 0, 0, 1]),
    ([4, 4, 4], [0, 0, 0]),
    ([0, 1, 2], [0, 1, 1]),
])
def test_classify_a(u, expected):
    assert classify_a(u).tolist() == expected


@pytest.mark.parametrize("u, expected", [
    ([2, 0, 0, 2], True),
    ([0, 1, 0], False),
    ([2, 0, 1, 0, 2], False),
    ([5], True),
])
def test_is_down_up(u, expected):
    assert is_down_up(u) is expected


def test_is_robust_qc_examples():
    assert not is_robust_qc_1d([0, 1, 1, 2], 0.5)
    assert is_robust_qc_1d([0, 0.5, 1, 2], 0.5)
    assert robust_violation_1d([0, 1, 1, 2], 0.5) == pytest.approx(0.5)


@given(small_seqs)
def test_robust_checker_at_zero_is_triple_condition(u):
    triple_ok = all(
        u[k] <= max(u[j], u[l])
        for j in range(len(u)) for k in range(j + 1, len(u)) for l in range(k + 1, len(u))
    )
    assert is_robust_qc_1d(u, 0.0, tol=0) == triple_ok
    assert is_down_up(u, tol=0) == triple_ok
