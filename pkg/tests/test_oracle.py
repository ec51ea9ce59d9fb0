import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srbm_wedge import BACKENDS, simcore_backend
from srbm_wedge.closed_form import GammaHalf, SumOfExponentials, build_phi1
from srbm_wedge.errors import AtPole, Degenerate, InvalidInput, QuadratureFailure, RadiusTooSmall
from srbm_wedge.fixtures import get
from srbm_wedge.kernel import G_ratio, special_points, y_of
from srbm_wedge.model import boundary_masses, quadrant_from_angles
from srbm_wedge.oracle import (
    SampleStats, SimConfig, adaptive_gl, numeric_laplace, phi1_integral, series_coeffs, simulate,
)

# [DERIVED] frozen from the contour integral at tol=1e-10 with the fixture default scales
FROZEN = {
    "skew_symmetric": [0.36753459525813215, 0.8387778946659187, 0.3740346882569982 + 0.2185864747583598j],
    "gamma_half": [1.4964106402639838, 1.8348344796269298, 1.5793219380564116 + 0.2344134695826762j],
    "algebraic_two_thirds": [0.7504029297482174, 1.0250143919292358, 0.7954227186462076 + 0.17477094359170725j],
    "no_condition_irrational": [1.6793460996630953, 2.025837341675936, 1.766977093641235 + 0.2414525826722268j],
    "no_condition_rational": [0.47459832429819354, 0.9460060603535634, 0.4928645103187433 + 0.23642815843274642j],
}
POINTS = [-1.0, 0.05, -0.5 + 0.8j]


@pytest.mark.parametrize("name", sorted(FROZEN))
def test_integral_frozen_values(name):
    m = get(name).model()
    for y, ref in zip(POINTS, FROZEN[name]):
        assert phi1_integral(m, y) == pytest.approx(ref, rel=1e-9)


def test_integral_detail_and_mass():
    m = get("no_condition_rational").model()
    res = phi1_integral(m, -1.0, detail=True)
    assert res.error < 1e-9
    assert phi1_integral(m, 0.0) == pytest.approx(boundary_masses(m)[0], rel=1e-12)


@pytest.mark.parametrize("name", ["no_condition_irrational", "no_condition_rational"])
def test_integral_boundary_relation_without_closed_form(name):
    m = get(name).model()
    eta = 1e-7
    for rad in (0.4, 2.0):
        y = y_of(m, -rad * complex(math.cos(eta), math.sin(eta)))
        a, b = phi1_integral(m, y), phi1_integral(m, y.conjugate())
        assert abs(b - G_ratio(m, y_of(m, -rad)) * a) < 1e-5


def test_integral_preconditions():
    m = get("skew_symmetric_pole").model()
    f = build_phi1(m, exact=get("skew_symmetric_pole").angles)
    with pytest.raises(AtPole):
        phi1_integral(m, f.pole)
    with pytest.raises(InvalidInput):
        phi1_integral(m, 1.1 * special_points(m).y_plus)
    b, th = 1.2, 0.4
    with pytest.raises(Degenerate):
        phi1_integral(quadrant_from_angles(b, th, 1.0, (2 * b - th) / 2), -1.0)


def test_adaptive_gl():
    val = adaptive_gl(lambda u: np.exp(u) * np.cos(3 * u), 0.0, 5.0, 1e-13)[0]
    exact = (math.exp(5) * (math.cos(15) + 3 * math.sin(15)) - 1) / 10
    assert val == pytest.approx(exact, rel=1e-12)
    with pytest.raises(QuadratureFailure):
        adaptive_gl(lambda u: 1 / np.sqrt(np.abs(u - 0.3)), 0.0, 1.0, 1e-14, max_panels=50)


def test_series_coefficients_of_a_pole():
    fx = get("skew_symmetric")
    f = build_phi1(fx.model(), exact=fx.angles)
    (rho, _), = f.polyP
    p0 = boundary_masses(fx.model())[0]
    c = series_coeffs(f, 12)
    for n, v in enumerate(c):
        assert v == pytest.approx(p0 / rho**n, rel=1e-11)


def test_series_radius_guard():
    with pytest.raises(RadiusTooSmall):
        series_coeffs(lambda y: 1 / (0.5 - y), 4, radius=1.0)
    with pytest.raises(RadiusTooSmall):
        series_coeffs(lambda y: y, 2)


def test_numeric_laplace_of_known_laws():
    d = SumOfExponentials(((2.0, (3.0,)),))
    assert numeric_laplace(d, -1.5 + 0.5j) == pytest.approx(3.0 / (3.5 - 0.5j), rel=1e-10)
    g = GammaHalf(1.7, 0.6)
    assert numeric_laplace(g, 0.8) == pytest.approx(0.6 / math.sqrt(1 - 0.8 / 1.7), rel=1e-8)


def _stats(rng, nb=4, bins=3):
    bm = rng.normal(size=(nb, 8))
    h = rng.integers(0, 50, size=(bins, bins)).astype(float)
    e = np.linspace(0, 1, bins + 1)
    s = rng.integers(0, 10, size=2).astype(float)
    return SampleStats.from_batches(bm, h, e, e, s, 0.1, int(h.sum()) + 5)


@given(st.integers(0, 2**32 - 1), st.permutations(range(4)))
@settings(max_examples=30)
def test_merge_is_order_and_grouping_independent(seed, perm):
    rng = np.random.default_rng(seed)
    parts = [_stats(rng) for _ in range(4)]
    a = SampleStats.merge(parts)
    b = SampleStats.merge([SampleStats.merge([parts[perm[0]], parts[perm[1]]]),
                           SampleStats.merge([parts[perm[2]], parts[perm[3]]])])
    assert np.array_equal(a.moments, b.moments)
    assert np.array_equal(a.stderr, b.stderr)
    assert np.array_equal(a.hist_counts, b.hist_counts)
    assert a.n_samples == b.n_samples


def test_merge_rejects_different_grids():
    rng = np.random.default_rng(0)
    a = _stats(rng)
    b = _stats(rng, bins=4)
    with pytest.raises(InvalidInput):
        SampleStats.merge([a, b])


def test_sim_config_validation():
    with pytest.raises(InvalidInput):
        SimConfig(dt=0)
    with pytest.raises(InvalidInput):
        SimConfig(horizon=1e-4)
    with pytest.raises(InvalidInput):
        SimConfig(burn_in_fraction=1.0)


SHORT = SimConfig(dt=1e-3, horizon=20.0, n_paths=2, seed=7)


def test_simulation_is_deterministic_and_in_quadrant():
    m = get("gamma_half").model(drift=0.5)
    a = simulate(m, SHORT, backend="python")
    b = simulate(m, SHORT, backend="python")
    assert np.array_equal(a.moments, b.moments)
    assert a.n_samples == 2 * (20000 - 1000)
    assert a.moments[0] >= 0 and a.moments[4] >= 0
    assert a.hist.sum() <= 1 + 1e-12


@pytest.mark.skipif("cython" not in BACKENDS or simcore_backend() != "cython", reason="extension not built")
def test_backends_agree_bitwise():
    m = get("skew_symmetric").model(drift=0.5)
    a = simulate(m, SHORT, backend="python")
    b = simulate(m, SHORT, backend="cython")
    assert np.array_equal(a.moments, b.moments)
    assert np.array_equal(a.hist_counts, b.hist_counts)
