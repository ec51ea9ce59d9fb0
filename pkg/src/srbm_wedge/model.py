"""Quadrant and wedge parameterizations of a reflected Brownian motion.

A :class:`QuadrantModel` is what users write down: a covariance, a drift and
a reflection matrix for the process in the nonnegative quadrant.  A linear
change of coordinates turns it into a standard Brownian motion in a wedge of
opening ``beta``, described by four angles and one scale (:class:`WedgeModel`).
All later formulas are written in the wedge language.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import Degenerate, InternalConsistencyError, InvalidModel

MARGIN = 1e-10


@dataclass(frozen=True)
class QuadrantModel:
    sigma11: float
    sigma12: float
    sigma22: float
    mu1: float
    mu2: float
    r11: float
    r12: float
    r21: float
    r22: float

    @property
    def det_sigma(self) -> float:
        return self.sigma11 * self.sigma22 - self.sigma12**2

    @property
    def det_r(self) -> float:
        return self.r11 * self.r22 - self.r12 * self.r21

    @property
    def Delta(self) -> float:
        """Drift scale, invariant under the change to wedge coordinates."""
        m1, m2 = self.mu1, self.mu2
        return m1 * m1 * self.sigma22 - 2 * m1 * m2 * self.sigma12 + m2 * m2 * self.sigma11

    def swapped(self) -> QuadrantModel:
        """Exchange the roles of the two coordinates."""
        return QuadrantModel(
            self.sigma22, self.sigma12, self.sigma11,
            self.mu2, self.mu1,
            self.r22, self.r21, self.r12, self.r11,
        )

    def to_json_dict(self) -> dict:
        return {
            "sigma": [self.sigma11, self.sigma12, self.sigma22],
            "mu": [self.mu1, self.mu2],
            "R": [[self.r11, self.r12], [self.r21, self.r22]],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> QuadrantModel:
        try:
            s11, s12, s22 = (float(v) for v in doc["sigma"])
            m1, m2 = (float(v) for v in doc["mu"])
            (r11, r12), (r21, r22) = ((float(a), float(b)) for a, b in doc["R"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidModel(f"malformed model document: {exc}", ("schema",)) from exc
        return cls(s11, s12, s22, m1, m2, r11, r12, r21, r22)


@dataclass(frozen=True)
class WedgeModel:
    """Angles in radians and the drift scale ``Delta``.

    ``theta`` is the direction of the drift, ``delta`` and ``eps`` the
    reflection angles on the two edges, all measured inside a wedge of
    opening ``beta``.
    """

    beta: float
    theta: float
    delta: float
    eps: float
    Delta: float

    @property
    def alpha(self) -> float:
        return (self.delta + self.eps - math.pi) / self.beta

    def swapped(self) -> WedgeModel:
        return WedgeModel(self.beta, self.beta - self.theta, self.eps, self.delta, self.Delta)

    def to_quadrant(self, **scales: float) -> QuadrantModel:
        """A quadrant model realizing these angles, see :func:`quadrant_from_angles`."""
        sigma11 = scales.get("sigma11", 1.0)
        sigma22 = scales.get("sigma22", 1.0)
        det_sigma = sigma11 * sigma22 * math.sin(self.beta) ** 2
        drift = math.sqrt(self.Delta / det_sigma)
        return quadrant_from_angles(
            self.beta, self.theta, self.delta, self.eps,
            sigma11=sigma11, sigma22=sigma22, drift=drift,
            r11=scales.get("r11", 1.0), r22=scales.get("r22", 1.0),
        )


@dataclass(frozen=True)
class LinearMap:
    """The map to wedge coordinates and its inverse, as row-major 2x2 tuples."""

    T: tuple[tuple[float, float], tuple[float, float]]
    T_inv: tuple[tuple[float, float], tuple[float, float]]

    @property
    def det(self) -> float:
        (a, b), (c, d) = self.T
        return a * d - b * c

    def apply(self, v: tuple[float, float]) -> tuple[float, float]:
        (a, b), (c, d) = self.T
        return (a * v[0] + b * v[1], c * v[0] + d * v[1])

    def apply_inverse(self, v: tuple[float, float]) -> tuple[float, float]:
        (a, b), (c, d) = self.T_inv
        return (a * v[0] + b * v[1], c * v[0] + d * v[1])


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of :func:`validate`.

    Wedge-form and quadrant-form conditions are stored separately;
    ``equivalences`` pairs each wedge condition with the quadrant condition
    it must agree with.
    """

    structural: dict[str, bool]
    wedge: dict[str, bool] = field(default_factory=dict)
    quadrant: dict[str, bool] = field(default_factory=dict)
    equivalences: dict[str, tuple[bool, bool]] = field(default_factory=dict)
    degenerate: tuple[str, ...] = ()

    @property
    def consistent(self) -> bool:
        return all(a == b for a, b in self.equivalences.values())

    @property
    def valid(self) -> bool:
        return (
            all(self.structural.values())
            and all(self.quadrant.values())
            and all(self.wedge.values())
            and not self.degenerate
        )

    def failed(self) -> tuple[str, ...]:
        out = [k for k, v in self.structural.items() if not v]
        out += [k for k, v in self.quadrant.items() if not v]
        out += [k for k, v in self.wedge.items() if not v]
        return tuple(out)


def _positive(value: float, name: str, degenerate: list[str]) -> bool:
    if abs(value) <= MARGIN:
        degenerate.append(name)
    return value > MARGIN


def _structural(q: QuadrantModel, degenerate: list[str]) -> dict[str, bool]:
    return {
        "sigma_positive_definite": _positive(q.sigma11, "sigma11", degenerate)
        and _positive(q.sigma22, "sigma22", degenerate)
        and _positive(q.det_sigma, "det_sigma", degenerate),
        "reflection_diagonal_positive": _positive(q.r11, "r11", degenerate)
        and _positive(q.r22, "r22", degenerate),
        "drift_nonzero": q.mu1 != 0.0 or q.mu2 != 0.0,
    }


def _angles_unchecked(q: QuadrantModel) -> tuple[float, float, float, float]:
    s11, s12, s22 = q.sigma11, q.sigma12, q.sigma22
    beta = math.acos(max(-1.0, min(1.0, -s12 / math.sqrt(s11 * s22))))
    sb, cb = math.sin(beta), math.cos(beta)
    delta = math.atan2(sb, (q.r12 / q.r22) * math.sqrt(s22 / s11) + cb)
    eps = math.atan2(sb, (q.r21 / q.r11) * math.sqrt(s11 / s22) + cb)
    big = math.sqrt(s22 * q.Delta)
    c = (q.mu2 * s12 - q.mu1 * s22) / big
    theta = -math.copysign(1.0, q.mu2) * math.acos(max(-1.0, min(1.0, c)))
    return beta, theta, delta, eps


def validate(q: QuadrantModel) -> ConditionReport:
    """Evaluate the validity conditions in both parameterizations.

    Structural requirements (positive definite covariance, positive diagonal
    of the reflection matrix, nonzero drift) are needed before any angle can
    be defined.  When they hold, the three quadrant conditions (semimartingale
    property, negative drift, stationarity) and their wedge counterparts are
    evaluated independently and paired up.
    """
    degenerate: list[str] = []
    structural = _structural(q, degenerate)
    if not all(structural.values()):
        return ConditionReport(structural, degenerate=tuple(degenerate))

    detr = q.det_r
    quadrant = {
        "semimartingale": _positive(detr, "det_r", degenerate)
        or (_positive(q.r12, "r12", degenerate) and _positive(q.r21, "r21", degenerate)),
        "negative_drift": _positive(-q.mu1, "mu1", degenerate)
        and _positive(-q.mu2, "mu2", degenerate),
        "stationarity": _positive(detr, "det_r", degenerate)
        and _positive(q.r12 * q.mu2 - q.r22 * q.mu1, "stationarity_1", degenerate)
        and _positive(q.r21 * q.mu1 - q.r11 * q.mu2, "stationarity_2", degenerate),
    }

    beta, theta, delta, eps = _angles_unchecked(q)
    wedge = {
        "alpha_below_one": _positive(beta - (delta + eps - math.pi), "alpha_below_one", degenerate),
        "drift_inside_wedge": _positive(theta, "theta", degenerate)
        and _positive(beta - theta, "beta_minus_theta", degenerate),
        "reflection_ordering": _positive(theta - (beta - eps), "theta_above_beta_minus_eps", degenerate)
        and _positive(delta - theta, "delta_above_theta", degenerate),
    }
    wedge["wedge_combined"] = (
        _positive((beta - eps) - (delta - math.pi), "beta_minus_eps_above_delta_minus_pi", degenerate)
        and wedge["reflection_ordering"]
        and wedge["drift_inside_wedge"]
    )
    equivalences = {
        "alpha_below_one~semimartingale": (wedge["alpha_below_one"], quadrant["semimartingale"]),
        "drift_inside_wedge~negative_drift": (wedge["drift_inside_wedge"], quadrant["negative_drift"]),
        "wedge_combined~negative_drift+stationarity": (
            wedge["wedge_combined"],
            quadrant["negative_drift"] and quadrant["stationarity"],
        ),
    }
    return ConditionReport(structural, wedge, quadrant, equivalences, tuple(dict.fromkeys(degenerate)))


def check(q: QuadrantModel) -> ConditionReport:
    """Like :func:`validate` but raise unless the model is valid."""
    rep = validate(q)
    if rep.degenerate:
        raise Degenerate(
            "model sits within the safety margin of: " + ", ".join(rep.degenerate),
            rep.degenerate,
        )
    if not rep.valid:
        raise InvalidModel("invalid model, failed: " + ", ".join(rep.failed()), rep.failed())
    if not rep.consistent:
        bad = [k for k, (a, b) in rep.equivalences.items() if a != b]
        raise InternalConsistencyError("wedge and quadrant conditions disagree: " + ", ".join(bad))
    return rep


def to_wedge(q: QuadrantModel) -> WedgeModel:
    check(q)
    beta, theta, delta, eps = _angles_unchecked(q)
    return WedgeModel(beta, theta, delta, eps, q.Delta)


def transform_matrix(q: QuadrantModel) -> LinearMap:
    degenerate: list[str] = []
    if not _structural(q, degenerate)["sigma_positive_definite"]:
        raise InvalidModel("covariance is not positive definite", ("sigma_positive_definite",))
    s11, s12, s22 = q.sigma11, q.sigma12, q.sigma22
    det = q.det_sigma
    T = (
        (math.sqrt(s22 / det), -s12 / math.sqrt(s22 * det)),
        (0.0, 1.0 / math.sqrt(s22)),
    )
    T_inv = (
        (math.sqrt(det / s22), s12 / math.sqrt(s22)),
        (0.0, math.sqrt(s22)),
    )
    return LinearMap(T, T_inv)


def boundary_masses(q: QuadrantModel) -> tuple[float, float]:
    """Total masses of the two boundary measures.

    Computed from the model coefficients and, independently, from the wedge
    angles; the two must agree.
    """
    w = to_wedge(q)
    denom = q.r12 * q.r21 - q.r11 * q.r22
    mass1 = (q.mu1 * q.r22 - q.mu2 * q.r12) / denom
    mass2 = (q.mu2 * q.r11 - q.mu1 * q.r21) / denom

    sb = math.sin(w.beta)
    core = math.sin(w.beta - w.delta - w.eps) * sb
    alt1 = (
        math.sqrt(w.Delta / q.sigma22) / q.r11
        * math.sin(w.theta - w.delta) * math.sin(w.eps) / core
    )
    alt2 = (
        math.sqrt(w.Delta / q.sigma11) / q.r22
        * math.sin(w.beta - w.theta - w.eps) * math.sin(w.delta) / core
    )
    for a, b, name in ((mass1, alt1, "mass1"), (mass2, alt2, "mass2")):
        if abs(a - b) > 1e-10 * max(abs(a), abs(b)):
            raise InternalConsistencyError(f"{name}: {a!r} != {b!r}")
    return mass1, mass2


def normalize_xy(q: QuadrantModel, x: complex, y: complex) -> tuple[complex, complex]:
    det = q.det_sigma
    D = q.Delta
    return x * det / math.sqrt(D * q.sigma22), y * det / math.sqrt(D * q.sigma11)


def denormalize_xy(q: QuadrantModel, xn: complex, yn: complex) -> tuple[complex, complex]:
    det = q.det_sigma
    D = q.Delta
    return xn * math.sqrt(D * q.sigma22) / det, yn * math.sqrt(D * q.sigma11) / det


def quadrant_from_angles(
    beta: float,
    theta: float,
    delta: float,
    eps: float,
    *,
    sigma11: float = 1.0,
    sigma22: float = 1.0,
    drift: float = 1.0,
    r11: float = 1.0,
    r22: float = 1.0,
) -> QuadrantModel:
    """Build a quadrant model whose wedge angles are the given ones.

    ``drift`` is the length of the drift vector in wedge coordinates.  The
    remaining free scales (the covariance diagonal and the reflection
    diagonal) do not affect the angles.
    """
    sigma12 = -math.cos(beta) * math.sqrt(sigma11 * sigma22)
    mu1 = -math.sin(beta - theta) * drift * math.sqrt(sigma11)
    mu2 = -math.sin(theta) * drift * math.sqrt(sigma22)
    r12 = r22 * math.sin(beta - delta) / math.sin(delta) * math.sqrt(sigma11 / sigma22)
    r21 = r11 * math.sin(beta - eps) / math.sin(eps) * math.sqrt(sigma22 / sigma11)
    return QuadrantModel(sigma11, sigma12, sigma22, mu1, mu2, r11, r12, r21, r22)

