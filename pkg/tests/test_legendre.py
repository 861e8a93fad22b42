from fractions import Fraction

import numpy as np
import pytest

from ldgheat.legendre import (
    RefPoly,
    derivative_matrix,
    ds_inverse,
    eval_legendre,
    gauss_rule,
    legendre_table,
    radau_points,
    rule_for_degree,
)


def test_eval_legendre_closed_forms():
    assert eval_legendre(2, 0.5) == pytest.approx(-0.125, abs=1e-15)
    assert eval_legendre(3, 0.3) == pytest.approx((5 * 0.027 - 3 * 0.3) / 2, abs=1e-15)
    assert eval_legendre(7, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert eval_legendre(7, -1.0) == pytest.approx(-1.0, abs=1e-15)


def test_endpoint_normalization_all_degrees():
    for m in range(13):
        assert eval_legendre(m, 1.0) == pytest.approx(1.0, abs=1e-13)
        assert eval_legendre(m, -1.0) == pytest.approx((-1.0) ** m, abs=1e-13)


def test_sup_norm_is_one_on_sample():
    s = np.linspace(-1, 1, 2001)
    table = legendre_table(10, s)
    assert np.abs(table).max() <= 1.0 + 1e-13


def test_ds_inverse_mode_rules():
    # L_0 -> L_1 + L_0, L_1 -> (L_2 - L_0)/3, L_2 -> (L_3 - L_1)/5
    assert ds_inverse(RefPoly((1.0,))).coeffs == (1.0, 1.0)
    out = ds_inverse(RefPoly((0.0, 1.0)))
    assert np.allclose(out.coeffs, (-1 / 3, 0.0, 1 / 3), atol=1e-16)
    out = ds_inverse(RefPoly((0.0, 0.0, 1.0)))
    assert np.allclose(out.coeffs, (0.0, -1 / 5, 0.0, 1 / 5), atol=1e-16)


def test_ds_inverse_vanishes_at_left_end():
    rng = np.random.default_rng(7)
    for _ in range(200):
        deg = rng.integers(0, 13)
        p = RefPoly(tuple(rng.uniform(-1, 1, deg + 1)))
        q = ds_inverse(p)
        assert abs(q.at_minus_one()) <= 1e-13
        # and it really is the running integral
        s = rng.uniform(-1, 1)
        rule = gauss_rule(10)
        half = (s + 1) / 2
        nodes = -1 + half * (rule.nodes + 1)
        assert q(s) == pytest.approx(half * float(rule.weights @ p(nodes)), abs=1e-12)


def test_derivative_undoes_antiderivative_exactly_in_rationals():
    rng = np.random.default_rng(3)
    for _ in range(50):
        deg = int(rng.integers(0, 11))
        coeffs = tuple(Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10))) for _ in range(deg + 1))
        p = RefPoly(coeffs)
        back = ds_inverse(p).derivative()
        assert back.coeffs[: deg + 1] == coeffs
        assert all(c == 0 for c in back.coeffs[deg + 1 :])


def test_refpoly_evaluation_matches_legendre_sum():
    rng = np.random.default_rng(11)
    s = np.linspace(-1, 1, 33)
    for _ in range(10):
        c = rng.uniform(-1, 1, 7)
        p = RefPoly(tuple(c))
        expect = sum(ci * eval_legendre(m, s) for m, ci in enumerate(c))
        assert np.allclose(p(s), expect, atol=1e-14)


def test_derivative_matrix_matches_refpoly_derivative():
    rng = np.random.default_rng(5)
    c = rng.uniform(-1, 1, 7)
    via_matrix = c @ derivative_matrix(6)
    via_poly = RefPoly(tuple(c)).derivative().coeffs
    assert np.allclose(via_matrix[:6], via_poly, atol=1e-14)


@pytest.mark.parametrize("k,side,expected", [
    (1, "right", [-1 / 3]),
    (1, "left", [1 / 3]),
    (2, "right", [(-1 - np.sqrt(6)) / 5, (-1 + np.sqrt(6)) / 5]),
])
def test_radau_points_small_degrees(k, side, expected):
    assert np.allclose(radau_points(k, side), expected, atol=1e-14)


@pytest.mark.parametrize("k", range(1, 9))
@pytest.mark.parametrize("side,sign", [("left", 1.0), ("right", -1.0)])
def test_radau_residuals(k, side, sign):
    pts = radau_points(k, side)
    assert pts.size == k
    assert np.all(np.diff(pts) > 0)
    vals = np.array([eval_legendre(k + 1, s) + sign * eval_legendre(k, s) for s in pts])
    assert np.abs(vals).max() <= 1e-13


def test_gauss_rule_basics():
    r1 = gauss_rule(1)
    assert np.allclose(r1.nodes, [0.0]) and np.allclose(r1.weights, [2.0])
    r2 = gauss_rule(2)
    assert np.allclose(r2.nodes, [-1 / np.sqrt(3), 1 / np.sqrt(3)], atol=1e-15)
    assert np.allclose(r2.weights, [1.0, 1.0], atol=1e-15)
    r3 = gauss_rule(3)
    assert float(r3.weights @ r3.nodes**4) == pytest.approx(2 / 5, abs=1e-15)


@pytest.mark.parametrize("n", range(1, 14))
def test_gauss_rule_exactness_on_monomials(n):
    rule = gauss_rule(n)
    assert float(rule.weights.sum()) == pytest.approx(2.0, abs=1e-14)
    for d in range(2 * n):
        exact = 0.0 if d % 2 else 2.0 / (d + 1)
        assert float(rule.weights @ rule.nodes**d) == pytest.approx(exact, abs=1e-13)


def test_quadrature_orthogonality_of_legendre_pairs():
    rule = rule_for_degree(20)
    table = legendre_table(10, rule.nodes)
    gram = (table * rule.weights) @ table.T
    expect = np.diag(2.0 / (2.0 * np.arange(11) + 1.0))
    assert np.abs(gram - expect).max() <= 1e-13


def test_radau_rejects_bad_input():
    with pytest.raises(ValueError):
        radau_points(0, "left")
    with pytest.raises(ValueError):
        radau_points(3, "middle")
    with pytest.raises(ValueError):
        gauss_rule(0)
