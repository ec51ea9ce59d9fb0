import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from srbm_wedge.errors import Degenerate, InvalidModel
from srbm_wedge.fixtures import get
from srbm_wedge.model import (
    QuadrantModel, boundary_masses, check, denormalize_xy, normalize_xy, quadrant_from_angles, to_wedge,
    transform_matrix, validate,
)

from conftest import valid_models


def test_identity_covariance_gives_right_angle():
    q = QuadrantModel(1.0, 0.0, 1.0, -1.0, -0.5, 1.0, 0.2, 0.3, 1.0)
    assert to_wedge(q).beta == pytest.approx(math.pi / 2, abs=1e-15)


def test_negative_half_correlation_gives_third_of_pi():
    q = QuadrantModel(1.0, -0.5, 1.0, -1.0, -0.5, 1.0, 0.2, 0.3, 1.0)
    assert to_wedge(q).beta == pytest.approx(math.pi / 3, abs=1e-15)


def test_diagonal_reflection_makes_delta_and_eps_equal_beta():
    q = QuadrantModel(1.3, -0.4, 0.8, -1.0, -0.5, 1.1, 0.0, 0.0, 0.7)
    w = to_wedge(q)
    assert w.delta == pytest.approx(w.beta, abs=1e-14)
    assert w.eps == pytest.approx(w.beta, abs=1e-14)


def test_transform_is_identity_for_identity_covariance():
    T = transform_matrix(QuadrantModel(1.0, 0.0, 1.0, -1.0, -1.0, 1.0, 0.0, 0.0, 1.0)).T
    assert T[0][0] == pytest.approx(1.0) and T[1][1] == pytest.approx(1.0)
    assert abs(T[0][1]) < 1e-15 and T[1][0] == 0.0


@given(valid_models())
def test_transform_inverse(q):
    L = transform_matrix(q)
    for v in ((1.0, 0.0), (0.3, -2.0)):
        back = L.apply_inverse(L.apply(v))
        assert back == pytest.approx(v, abs=1e-12)


@given(valid_models())
def test_drift_direction_matches_tangent_formula(q):
    w = to_wedge(q)
    L = transform_matrix(q)
    mt = L.apply((q.mu1, q.mu2))
    # the transformed drift points along -e^{i theta}
    assert math.atan2(-mt[1], -mt[0]) == pytest.approx(w.theta, abs=1e-12)
    tan_theta = math.sin(w.beta) / ((q.mu1 / q.mu2) * math.sqrt(q.sigma22 / q.sigma11) + math.cos(w.beta))
    assert math.tan(w.theta) == pytest.approx(tan_theta, rel=1e-9)


@given(valid_models())
def test_angles_round_trip(q):
    w = to_wedge(q)
    q2 = quadrant_from_angles(w.beta, w.theta, w.delta, w.eps)
    w2 = to_wedge(q2)
    for name in ("beta", "theta", "delta", "eps"):
        assert getattr(w2, name) == pytest.approx(getattr(w, name), abs=1e-10)


def test_skew_model_passes_all_checks():
    rep = validate(get("skew_symmetric").model())
    assert rep.valid and rep.consistent


def test_positive_drift_fails_in_both_forms():
    q = QuadrantModel(1.0, 0.0, 1.0, 0.5, -1.0, 1.0, 0.2, 0.2, 1.0)
    rep = validate(q)
    assert not rep.wedge["drift_inside_wedge"]
    assert not rep.quadrant["negative_drift"]
    with pytest.raises(InvalidModel) as exc:
        check(q)
    assert "negative_drift" in exc.value.failed


def test_non_semimartingale_has_alpha_at_least_one():
    # delta + eps - pi >= beta inverts to det R < 0 with negative off-diagonals
    q = quadrant_from_angles(math.pi / 2, math.pi / 4, 2.9, 2.9)
    assert q.r12 < 0 and q.r21 < 0 and q.det_r < 0
    rep = validate(q)
    assert not rep.quadrant["semimartingale"]
    assert not rep.wedge["alpha_below_one"]
    assert (2.9 + 2.9 - math.pi) / (math.pi / 2) >= 1


def test_degenerate_is_reported():
    q = QuadrantModel(1.0, 0.0, 1.0, -1.0, -1e-13, 1.0, 0.0, 0.0, 1.0)
    with pytest.raises(Degenerate):
        check(q)


def test_orthogonal_mass():
    q = get("orthogonal").model()
    assert boundary_masses(q)[0] == pytest.approx(-q.mu1 / q.r11, rel=1e-12)


@given(valid_models())
def test_masses_positive_and_agree(q):
    m1, m2 = boundary_masses(q)  # raises if the two formulas disagree
    assert m1 > 0 and m2 > 0


@given(valid_models(), st.booleans())
def test_normalization_endpoints(q, plus):
    from srbm_wedge.kernel import special_points

    geo = special_points(q)
    w = geo.wedge
    assert normalize_xy(q, 0, 0) == (0, 0)
    xn, _ = normalize_xy(q, geo.x_plus if plus else geo.x_minus, 0)
    assert xn == pytest.approx(math.cos(w.theta) + (1 if plus else -1), abs=1e-10)
    _, yn = normalize_xy(q, 0, geo.y_minus)
    assert yn == pytest.approx(math.cos(w.beta - w.theta) - 1, abs=1e-10)
    x, y = denormalize_xy(q, *normalize_xy(q, 0.3, -1.2))
    assert (x, y) == pytest.approx((0.3, -1.2))


@given(valid_models())
def test_swap_is_involution(q):
    assert q.swapped().swapped() == q
    w, ws = to_wedge(q), to_wedge(q.swapped())
    assert ws.theta == pytest.approx(w.beta - w.theta, abs=1e-12)
    assert (ws.delta, ws.eps) == pytest.approx((w.eps, w.delta), abs=1e-12)


def test_json_round_trip_and_schema_error():
    q = get("gamma_half").model()
    assert QuadrantModel.from_json_dict(q.to_json_dict()) == q
    with pytest.raises(InvalidModel):
        QuadrantModel.from_json_dict({"sigma": [1, 0]})
