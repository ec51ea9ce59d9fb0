import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from srbm_wedge.closed_form import (
    Erf, GammaHalf, SumOfExponentials, WedgePolar, build_pair, build_phi1, count_in_GR, decoupling,
    density, enumerate_in_GR, eval_phi, eval_phi1, laplace_json, marginal_means, moment_recurrence,
    phi1_moment_form, phi_algebraic,
)
from srbm_wedge.classify import classify
from srbm_wedge.errors import AtKernelZero, InvalidInput, NotCovered, OnCut
from srbm_wedge.fixtures import get
from srbm_wedge.kernel import gamma_eval, special_points
from srbm_wedge.model import boundary_masses, to_wedge

from conftest import CLOSED, CLOSED_IDS, valid_models


def _form(name):
    fx = name if not isinstance(name, str) else get(name)
    m = fx.model()
    return fx, m, build_phi1(m, exact=fx.angles)


@given(valid_models(), st.floats(-math.pi, math.pi), st.integers(-6, 6))
def test_counting_formula_matches_enumeration(q, omega, r):
    sigma = cmath.exp(1j * omega)
    # skip parameters within rounding of a boundary point
    geo = special_points(q)
    for j in range(-7, 8):
        t = omega + 2 * j * geo.wedge.beta
        if abs(math.remainder(t - math.pi, 2 * math.pi)) < 1e-6:
            return
        if abs(math.remainder(t - math.pi - 2 * geo.wedge.beta, 2 * math.pi)) < 1e-6:
            return
    assert count_in_GR(q, sigma, r) == enumerate_in_GR(q, sigma, r)


def test_counting_rejects_off_circle():
    with pytest.raises(InvalidInput):
        count_in_GR(get("skew_symmetric").model(), 1.5, 2)


@pytest.mark.parametrize("name", CLOSED, ids=CLOSED_IDS)
def test_value_at_zero_is_boundary_mass(name):
    _, m, f = _form(name)
    assert eval_phi1(f, 0.0) == pytest.approx(boundary_masses(m)[0], rel=1e-12)


def test_skew_symmetric_is_a_single_pole():
    _, m, f = _form("skew_symmetric")
    (rho, _), = f.polyP
    p0 = boundary_masses(m)[0]
    for y in (-3.0, 0.4, 0.2 + 1j, -1 - 2j):
        assert eval_phi1(f, y) == pytest.approx(p0 * rho / (rho - y), rel=1e-12)
    d = density(f)
    assert isinstance(d, SumOfExponentials)
    (rate, coeffs), = d.terms
    assert rate == pytest.approx(rho, rel=1e-14)
    assert coeffs[0] == pytest.approx(p0 * rho, rel=1e-12)


def test_erlang_density_shape():
    _, m, f = _form("erlang")
    d = density(f)
    (rate, coeffs), = d.terms
    assert len(coeffs) == 2 and coeffs[0] == pytest.approx(0, abs=1e-12)
    p0 = boundary_masses(m)[0]
    z = 0.7
    assert d.pdf(z) == pytest.approx(p0 * rate**2 * z * math.exp(-rate * z), rel=1e-10)


def test_gamma_half_form():
    _, m, f = _form("gamma_half")
    yp = special_points(m).y_plus
    p0 = boundary_masses(m)[0]
    for y in (-2.0, 1.0, 0.5 + 0.5j):
        assert eval_phi1(f, y) == pytest.approx(p0 / cmath.sqrt(1 - y / yp), rel=1e-12)
    d = density(f)
    assert isinstance(d, GammaHalf) and d.rate == pytest.approx(yp)


@pytest.mark.parametrize("name", ["erf_minus_two_zero", "erf_minus_one_minus_one"])
def test_erf_density(name):
    _, m, f = _form(name)
    d = density(f)
    assert isinstance(d, Erf)
    for y in (-1.0, 0.2, -0.5 + 1j):
        assert d.laplace(y) == pytest.approx(eval_phi1(f, y), rel=1e-11)
    mass, _ = integrate.quad(d.pdf, 0, np.inf)
    assert mass == pytest.approx(f.mass, rel=1e-8)


@pytest.mark.parametrize("name", ["skew_symmetric", "sum_of_exponentials", "erlang",
                                  "sum_of_exponentials_irrational", "skew_symmetric_pole"])
def test_sum_of_exponentials(name):
    _, _, f = _form(name)
    d = density(f)
    for y in (-1.0, 0.05, -0.5 + 1j):
        assert d.laplace(y) == pytest.approx(eval_phi1(f, y), rel=1e-11)
    mass, _ = integrate.quad(d.pdf, 0, np.inf)
    assert mass == pytest.approx(f.mass, rel=1e-8)


def test_uncatalogued_density():
    _, _, f = _form("algebraic_two_thirds")
    with pytest.raises(NotCovered):
        density(f)
    with pytest.raises(NotCovered):
        density(f, joint=True)


@pytest.mark.parametrize("name", CLOSED, ids=CLOSED_IDS)
def test_functional_equation_normalization(name):
    fx = name
    pair = build_pair(fx.model(), fx.angles)
    assert eval_phi(pair, 0, 0) == pytest.approx(1, abs=1e-10)
    assert eval_phi(pair, 1e-6, 0) == pytest.approx(1, abs=1e-4)


def test_kernel_zero_rejected():
    fx = get("gamma_half")
    m = fx.model()
    pair = build_pair(m, fx.angles)
    geo = special_points(m)
    from srbm_wedge.kernel import uniformize
    x, y = uniformize(m, -0.5 + 0.5j)
    with pytest.raises(AtKernelZero):
        eval_phi(pair, x, y)


def test_joint_density_and_algebraic_transform():
    fx = get("gamma_half")
    m = fx.model()
    pair = build_pair(m, fx.angles)
    rng = np.random.default_rng(3)
    for _ in range(20):
        x, y = -rng.uniform(0, 3), -rng.uniform(0, 3)
        x += 1j * rng.uniform(-1, 1)
        if abs(gamma_eval(m, x, y)[0]) < 1e-3:
            continue
        assert phi_algebraic(m, x, y) == pytest.approx(eval_phi(pair, x, y), rel=1e-9)
    d = density(pair.phi1, joint=True)
    assert isinstance(d, WedgePolar)
    mass, _ = integrate.dblquad(lambda a, r: d.wedge_pdf(r, a) * r, 0, np.inf, 0, d.beta)
    assert mass == pytest.approx(1, rel=1e-6)


@pytest.mark.parametrize("name", ["gamma_half", "skew_symmetric", "algebraic_two_thirds"])
def test_marginal_means_match_finite_difference(name):
    fx = get(name)
    pair = build_pair(fx.model(), fx.angles)
    m1, m2 = marginal_means(pair)
    h = 1e-4
    fd1 = (eval_phi(pair, h, 0) - eval_phi(pair, -h, 0)).real / (2 * h)
    fd2 = (eval_phi(pair, 0, h) - eval_phi(pair, 0, -h)).real / (2 * h)
    assert m1 == pytest.approx(fd1, rel=1e-5)
    assert m2 == pytest.approx(fd2, rel=1e-5)
    assert m1 > 0 and m2 > 0


def test_moment_recurrence_seeds_and_form():
    fx = get("moments_equal")
    m = fx.model()
    rec = moment_recurrence(m, fx.angles)
    kp, M0, M1 = rec.seeds
    assert M0 == pytest.approx(boundary_masses(m)[0], rel=1e-14)
    g = phi1_moment_form(m)
    f = build_phi1(m, exact=fx.angles)
    for y in (-1.0, 0.3, -0.4 + 0.7j):
        assert g(y) == pytest.approx(eval_phi1(f, y), rel=1e-10)
    h = 1e-4
    slope = (eval_phi1(f, h) - eval_phi1(f, -h)).real / (2 * h)
    assert rec.moments(1)[1] == pytest.approx(slope, rel=1e-6)


def test_moment_recurrence_not_covered():
    fx = get("moments_below")
    with pytest.raises(NotCovered):
        moment_recurrence(fx.model(), fx.angles)


def test_decoupling_pairs():
    for name in ("skew_symmetric", "gamma_half", "orthogonal"):
        fx = get(name)
        m = fx.model()
        _, c, _ = classify(to_wedge(m), fx.angles)
        assert decoupling(m, c, exact=fx.angles).check() < 1e-8


def test_not_covered_and_bad_hint():
    fx = get("no_condition_rational")
    with pytest.raises(NotCovered):
        build_phi1(fx.model(), exact=fx.angles)
    fx = get("skew_symmetric")
    with pytest.raises(InvalidInput):
        build_phi1(fx.model(), exact=fx.angles, r_hint=(3, 0))


def test_cut_rejected():
    _, m, f = _form("gamma_half")
    with pytest.raises(OnCut):
        eval_phi1(f, special_points(m).y_plus + 1)


def test_laplace_json_keys():
    _, _, f = _form("erf_minus_two_zero")
    out = laplace_json(f)
    assert set(out) == {"m", "P", "Q", "S", "R", "a_minus", "a_plus", "b", "kappa", "pole", "integers"}
    assert out["m"] == 2
