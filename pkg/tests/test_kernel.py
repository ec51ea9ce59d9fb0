import cmath
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from srbm_wedge.errors import PoleOfE
from srbm_wedge.fixtures import get
from srbm_wedge.kernel import (
    E_from_gammas, E_func, G_ratio, Region, gamma_eval, kernel_roots, kernel_roots_y, preimages_y,
    region_of, special_points, uniformize, uniformize_normal, y_of,
)

from conftest import valid_models

unit_complex = st.tuples(st.floats(0.2, 3.0), st.floats(-math.pi, math.pi)).map(lambda t: cmath.rect(*t))


def test_no_constant_term():
    assert gamma_eval(get("skew_symmetric").model(), 0, 0) == (0, 0, 0)


@given(valid_models(), st.floats(-5, 5), st.floats(-5, 5))
def test_roots_annihilate_kernel(q, a, b):
    y = complex(a, b)
    r = kernel_roots(q, y)
    scale = 1 + abs(y) ** 2
    for x in (r.minus, r.plus):
        assert abs(gamma_eval(q, x, y)[0]) < 1e-9 * scale * (1 + abs(x)) ** 2
    for yy in kernel_roots_y(q, y):
        if isinstance(yy, complex):
            assert abs(gamma_eval(q, y, yy)[0]) < 1e-9 * scale * (1 + abs(yy)) ** 2


@given(valid_models(), unit_complex)
def test_parameterization_lies_on_curve(q, s):
    x, y = uniformize(q, s)
    assert abs(gamma_eval(q, x, y)[0]) < 1e-9 * (1 + abs(x) + abs(y)) ** 2
    # the normal-form cross-check raises on disagreement
    gamma_eval(q, *uniformize_normal(q, s), normal=True)


def test_double_root_at_branch_point():
    q = get("gamma_half").model()
    geo = special_points(q)
    r = kernel_roots(q, geo.y_plus)
    assert r.minus == pytest.approx(r.plus, abs=1e-6)


@given(valid_models(), st.floats(0.01, 0.99))
def test_root_gap_on_R_has_nonnegative_real_part(q, t):
    y = y_of(q, -math.exp(6 * (t - 0.5)))
    r = kernel_roots(q, y)
    assert (r.plus - r.minus).real >= -1e-12


@given(valid_models())
def test_Y_of_x_minus_is_y_at_minus_one(q):
    geo = special_points(q)
    r = kernel_roots_y(q, geo.x_minus)
    assert r.minus.real == pytest.approx(geo.y_at_minus_one, abs=1e-6)
    assert 0 < geo.y_at_minus_one < geo.y_plus


@given(valid_models())
def test_special_parameter_values(q):
    geo = special_points(q)
    w = geo.wedge
    assert uniformize(q, 1)[0] == pytest.approx(geo.x_plus, abs=1e-12)
    assert y_of(q, cmath.exp(1j * w.beta)) == pytest.approx(geo.y_plus, abs=1e-12)
    x0, y0 = uniformize(q, geo.s0)
    assert abs(x0) < 1e-12 and abs(y0) < 1e-12
    alpha = (w.delta + w.eps - math.pi) / w.beta
    assert geo.s1 / geo.s2 == pytest.approx(cmath.exp(2j * w.beta * (1 - alpha)), abs=1e-12)


@given(valid_models(), st.floats(-math.pi, math.pi))
def test_unit_circle_is_real(q, t):
    x, y = uniformize(q, cmath.exp(1j * t))
    assert abs(x.imag) < 1e-12 and abs(y.imag) < 1e-12


def test_s1_is_minus_one_on_equality():
    # 2 beta - 2 eps - theta = 0
    from srbm_wedge.model import quadrant_from_angles

    b, th = 1.2, 0.4
    q = quadrant_from_angles(b, th, 1.0, (2 * b - th) / 2)
    assert special_points(q).s1 == pytest.approx(-1, abs=1e-12)


def test_orthogonal_y_of_s2_is_zero():
    q = get("orthogonal").model()
    assert abs(y_of(q, special_points(q).s2)) < 1e-12


@given(valid_models())
def test_regions(q):
    geo = special_points(q)
    assert region_of(q, 0) is Region.INTERIOR
    assert region_of(q, geo.y_at_minus_one) is Region.ON_R
    assert region_of(q, geo.y_plus * 1.5) is Region.OUTSIDE
    assert region_of(q, geo.y_minus) is Region.INTERIOR


@given(valid_models(), unit_complex)
def test_preimages(q, s):
    a, b = preimages_y(q, y_of(q, s))
    assert a * b == pytest.approx(special_points(q).q, abs=1e-9)
    assert min(abs(a - s), abs(b - s)) < 1e-8 * max(1, abs(s))


@given(valid_models(), st.floats(-3, 3))
def test_G_on_R(q, u):
    y = y_of(q, -math.exp(u))
    g = G_ratio(q, y)
    assert abs(g) == pytest.approx(1, abs=1e-10)
    assert G_ratio(q, y.conjugate()) == pytest.approx(1 / g, abs=1e-10)
    assert g == pytest.approx(E_func(q, -math.exp(u)), abs=1e-9)


def test_G_at_real_point_of_R():
    q = get("skew_symmetric").model()
    assert G_ratio(q, special_points(q).y_at_minus_one) == pytest.approx(1, abs=1e-12)


@given(valid_models(), unit_complex)
def test_E_forms_agree(q, s):
    geo = special_points(q)
    if min(abs(s - geo.s2), abs(s - 1 / geo.s1), abs(s - 1 / geo.s2), abs(s - geo.s1)) < 1e-3:
        return
    assert E_func(q, s) == pytest.approx(E_from_gammas(q, s), rel=1e-8, abs=1e-10)


def test_E_limits_and_pole():
    q = get("algebraic_two_thirds").model()
    geo = special_points(q)
    assert E_func(q, 0) == pytest.approx(geo.s1 / geo.s2, abs=1e-14)
    assert E_func(q, 1e12) == pytest.approx(geo.s2 / geo.s1, abs=1e-9)
    with pytest.raises(PoleOfE):
        E_func(q, geo.s2)
