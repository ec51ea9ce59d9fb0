"""Catalogue of worked parameter tuples with their expected classification.

Angles are exact: rational multiples of pi, or linear forms in an opening
of one radian that is treated as irrational.  Each fixture also carries
quadrant-side scales so that the quadrant model is not trivially normalized.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as Fr

from .classify import BETA, PI, ExactAngles, Lin, Nature
from .model import QuadrantModel, quadrant_from_angles

IRRATIONAL_BETA = 1.0

DEFAULT_SCALES = {"sigma11": 1.3, "sigma22": 0.8, "drift": 0.9, "r11": 1.1, "r22": 0.7}


@dataclass(frozen=True)
class Fixture:
    name: str
    description: str
    angles: ExactAngles
    nature: Nature
    simple: tuple[int, int] | None = None
    double: tuple[int, int, int, int] | None = None  # (r1, e1, r2, e2)
    closed_form: bool = True
    scales: dict = field(default_factory=lambda: dict(DEFAULT_SCALES))
    simple_as_written: tuple[int, int] | None = None

    def model(self, **override) -> QuadrantModel:
        w = self.angles.to_wedge()
        sc = {**self.scales, **override}
        return quadrant_from_angles(w.beta, w.theta, w.delta, w.eps, **sc)

    def wedge(self):
        return self.angles.to_wedge()


def _rat(beta, delta, eps, theta) -> ExactAngles:
    return ExactAngles.rational(Fr(beta), Fr(theta), Fr(delta), Fr(eps))


def _irr(theta: Lin, delta: Lin, eps: Lin) -> ExactAngles:
    return ExactAngles(theta, delta, eps, beta_value=IRRATIONAL_BETA)


HALF_PI = PI * Fr(1, 2)

FIXTURES: tuple[Fixture, ...] = (
    Fixture(
        "skew_symmetric",
        "delta + eps = pi: exponential boundary law",
        _rat("1/2", "3/5", "2/5", "1/4"), Nature.RATIONAL, simple=(1, 0),
    ),
    Fixture(
        "skew_symmetric_pole",
        "delta + eps = pi with 2 beta - 2 eps - theta > 0 (pole inside the domain)",
        _rat("1/2", "3/4", "1/4", "3/8"), Nature.RATIONAL, simple=(1, 0),
    ),
    Fixture(
        "sum_of_exponentials",
        "alpha = -1 with simple roots: sum of two exponentials",
        _rat("1/4", "1/2", "1/4", "1/8"), Nature.RATIONAL, simple=(2, 0),
    ),
    Fixture(
        "erlang",
        "alpha = -1 with a double root: Gamma/Erlang boundary law",
        _rat("5/16", "5/16", "3/8", "1/4"), Nature.RATIONAL, simple=(2, 0),
    ),
    Fixture(
        "sum_of_exponentials_irrational",
        "alpha = -1 with an irrational opening",
        _irr(BETA * Fr(1, 2), HALF_PI, HALF_PI - BETA), Nature.RATIONAL, simple=(2, 0),
    ),
    Fixture(
        "orthogonal",
        "diagonal reflection matrix, irrational opening",
        _irr(BETA * Fr(1, 2), BETA, BETA), Nature.D_ALGEBRAIC, simple=(-1, -1),
    ),
    Fixture(
        "algebraic_two_thirds",
        "beta = 2 pi / 3 and alpha = 1/2",
        _rat("2/3", "3/4", "7/12", "1/3"), Nature.ALGEBRAIC, simple=(-1, -1),
    ),
    Fixture(
        "moments_below",
        "delta + eps + beta = 2 pi with 2 eps + theta < 2 pi",
        _rat("2/3", "5/6", "1/2", "1/4"), Nature.ALGEBRAIC, simple=(-1, -1),
        simple_as_written=(2, 1),
    ),
    Fixture(
        "moments_above",
        "delta + eps + beta = 2 pi with 2 eps + theta > 2 pi",
        _rat("2/3", "4/9", "8/9", "1/4"), Nature.ALGEBRAIC, simple=(-1, -1),
        simple_as_written=(2, 1),
    ),
    Fixture(
        "moments_equal",
        "delta + eps + beta = 2 pi with 2 eps + theta = 2 pi (moment recurrence)",
        _rat("2/3", "7/12", "3/4", "1/2"), Nature.ALGEBRAIC, simple=(-1, -1),
        simple_as_written=(2, 1),
        scales={"sigma11": 1.3, "sigma22": 0.8, "drift": 0.9, "r11": 1.1, "r22": 0.7},
    ),
    Fixture(
        "gamma_half",
        "alpha1 = alpha2 = 0: Gamma(1/2) boundary law and explicit bivariate density",
        _irr(BETA * Fr(1, 3), HALF_PI + BETA * Fr(1, 6), HALF_PI + BETA * Fr(1, 3)),
        Nature.ALGEBRAIC, double=(0, 1, 0, 0),
    ),
    Fixture(
        "erf_minus_two_zero",
        "alpha1 = -2, alpha2 = 0: erf boundary density",
        _irr(BETA * Fr(1, 2), HALF_PI + BETA * Fr(1, 4), HALF_PI - BETA * Fr(3, 4)),
        Nature.ALGEBRAIC, double=(1, 1, 0, 0),
    ),
    Fixture(
        "sqrt_over_pole",
        "alpha1 = -1, alpha2 = 1",
        _irr(BETA * Fr(1, 2), HALF_PI + BETA * Fr(3, 4), HALF_PI - BETA * Fr(1, 4)),
        Nature.ALGEBRAIC, double=(1, 0, 0, 1),
    ),
    Fixture(
        "erf_minus_one_minus_one",
        "alpha1 = alpha2 = -1: erf boundary density",
        _irr(BETA * Fr(1, 2), HALF_PI - BETA * Fr(1, 4), HALF_PI - BETA * Fr(1, 4)),
        Nature.ALGEBRAIC, double=(1, 0, -1, 1),
    ),
    Fixture(
        "no_condition_irrational",
        "irrational opening and neither angle condition",
        _irr(BETA * Fr(1, 2), HALF_PI + BETA * Fr(1, 3), HALF_PI + BETA * Fr(1, 5)),
        Nature.D_TRANSCENDENTAL, closed_form=False,
    ),
    Fixture(
        "no_condition_rational",
        "rational opening and neither angle condition",
        _rat("1/2", "2/3", "5/12", "1/4"), Nature.D_ALGEBRAIC, closed_form=False,
    ),
)

BY_NAME = {f.name: f for f in FIXTURES}


def get(name: str) -> Fixture:
    return BY_NAME[name]


def closed_form_fixtures() -> tuple[Fixture, ...]:
    return tuple(f for f in FIXTURES if f.closed_form)
