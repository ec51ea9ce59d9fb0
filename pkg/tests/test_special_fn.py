import cmath
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from srbm_wedge.errors import OnCut
from srbm_wedge.fixtures import get
from srbm_wedge.kernel import special_points, y_of
from srbm_wedge.special_fn import (
    InvariantW, angle_offset, cheb_T, cheb_T_alg, cheb_T_derivs, cheb_T_series, hyp2f1_sqrt_minus,
    sqrt_one_minus_T_over, sqrt_one_plus_T, w_inverse, w_of_s, w_on_R,
)

from conftest import valid_models

orders = st.floats(0.3, 6.0)
off_cut = st.tuples(st.floats(-4, 4), st.floats(-4, 4)).map(lambda t: complex(*t)).filter(
    lambda z: not (z.real < -0.9 and abs(z.imag) < 0.1))


@given(off_cut)
def test_integer_orders_are_polynomials(x):
    assert cheb_T(1, x) == pytest.approx(x, abs=1e-12 * (1 + abs(x)))
    assert cheb_T(2, x) == pytest.approx(2 * x * x - 1, rel=1e-10, abs=1e-10)


@given(off_cut)
def test_three_halves(x):
    expected = (2 * x - 1) * cmath.sqrt((1 + x) / 2)
    assert cheb_T(1.5, x) == pytest.approx(expected, rel=1e-9, abs=1e-9)


@given(orders)
def test_value_at_one(a):
    assert cheb_T(a, 1) == pytest.approx(1, abs=1e-15)
    assert sqrt_one_minus_T_over(a, 1) == pytest.approx(1, abs=1e-15)


@given(orders, off_cut)
def test_algebraic_form_matches(a, x):
    ref = cheb_T(a, x)
    assert cheb_T_alg(a, x) == pytest.approx(ref, rel=1e-8, abs=1e-8)


@given(orders, st.tuples(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5)).map(lambda t: 1 + complex(*t)))
def test_series_near_one(a, x):
    assert cheb_T_series(a, x) == pytest.approx(cheb_T(a, x), rel=1e-11, abs=1e-12)
    assert hyp2f1_sqrt_minus(a, x) == pytest.approx(sqrt_one_minus_T_over(a, x), rel=1e-10, abs=1e-12)


@given(orders, off_cut)
def test_square_root_identities(a, x):
    t = cheb_T(a, x)
    assert sqrt_one_plus_T(a, x) ** 2 == pytest.approx(1 + t, rel=1e-8, abs=1e-8)
    if abs(x - 1) > 1e-3:
        v = sqrt_one_minus_T_over(a, x)
        assert (a * v) ** 2 * (1 - x) == pytest.approx(1 - t, rel=1e-8, abs=1e-8)


@given(orders, off_cut.filter(lambda z: abs(z - 1) > 0.3 and abs(z + 1) > 0.3))
def test_derivatives_match_finite_differences(a, x):
    h = 1e-5
    d = cheb_T_derivs(a, x)
    fd = (cheb_T(a, x + h) - cheb_T(a, x - h)) / (2 * h)
    assert d[1] == pytest.approx(fd, rel=1e-6, abs=1e-6)
    fd2 = (cheb_T_derivs(a, x + h)[1] - cheb_T_derivs(a, x - h)[1]) / (2 * h)
    assert d[2] == pytest.approx(fd2, rel=1e-5, abs=1e-5)


def test_cut_rejected():
    with pytest.raises(OnCut):
        cheb_T(0.5, -2.0)
    with pytest.raises(OnCut):
        w_inverse(get("skew_symmetric").model(), -3.0)


@given(st.floats(0.2, 3.0), st.floats(-0.99, 0.99))
def test_angle_offset(beta, x):
    assert angle_offset(x, beta).real == pytest.approx(math.acos(x) - beta, abs=1e-12)


@given(valid_models())
def test_invariant_fixed_values(q):
    geo = special_points(q)
    W = InvariantW.of(q)
    assert W(geo.y_at_minus_one) == pytest.approx(-1, abs=1e-10)
    assert W(geo.y_minus) == pytest.approx(1, abs=1e-12)


@given(valid_models(), st.floats(-4, 4))
def test_invariant_real_on_R_and_matches_parameter_form(q, u):
    s = -math.exp(u)
    y = y_of(q, s)
    W = InvariantW.of(q)
    v = W(y)
    assert v == pytest.approx(W(y.conjugate()), rel=1e-9, abs=1e-9)
    assert v.real == pytest.approx(w_on_R(q, s), rel=1e-9)
    assert w_of_s(q, s) == pytest.approx(v, rel=1e-9, abs=1e-9)


@given(valid_models(), st.tuples(st.floats(-20, 20), st.floats(-20, 20)).map(lambda t: complex(*t)))
def test_inverse_round_trip(q, z):
    if z.real < -0.5 and abs(z.imag) < 0.5:
        return
    y = w_inverse(q, z)
    assert InvariantW.of(q)(y) == pytest.approx(z, rel=1e-9, abs=1e-9)
