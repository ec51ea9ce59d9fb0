"""Agreement checks between the closed forms and the numerical oracles.

Each check returns a :class:`Check`; :func:`run_suite` collects the ones that
apply to a model.  The CLI ``verify`` and ``examples`` commands are thin
wrappers around these functions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .classify import ExactAngles, classify
from .closed_form import (
    LaplaceForm, build_pair, build_phi1, decoupling, density, eval_phi, eval_phi1, moment_recurrence,
)
from .errors import NotCovered
from .kernel import E_func, G_ratio, special_points, y_of
from .model import QuadrantModel, to_wedge, validate
from .oracle import numeric_laplace, phi1_integral, series_coeffs
from .special_fn import InvariantW, w_inverse

TOL = {
    "boundary": 1e-8,
    "e_relation": 1e-8,
    "integral": 1e-5,
    "slope": 1e-2,
    "moments": 1e-8,
    "invariant": 1e-10,
    "density": 1e-6,
    "normalization": 1e-10,
    "decoupling": 1e-8,
    "integral_boundary": 1e-5,
}


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    error: float
    tol: float
    points: int

    def to_json_dict(self) -> dict:
        return {"passed": self.passed, "error": self.error, "tol": self.tol, "points": self.points}


def _check(name: str, errors: list[float], tol: float) -> Check:
    worst = max(errors) if errors else 0.0
    return Check(name, bool(worst < tol), float(worst), tol, len(errors))


def points_on_R(m: QuadrantModel, n: int = 50, span: float = 3.0) -> list[complex]:
    """``y(-e^u)`` for ``n`` values of ``u`` spread over ``[-span, span]``."""
    return [y_of(m, -math.exp(u)) for u in np.linspace(-span, span, n)]


def interior_points(m: QuadrantModel, n: int = 20, pole: float | None = None) -> list[complex]:
    """Points of the domain bounded by R, away from its boundary and the pole."""
    beta = special_points(m).wedge.beta
    out = []
    k = 0
    while len(out) < n:
        frac = 0.2 + 0.6 * ((k * 0.618034) % 1.0)
        rad = math.exp(math.log(0.2) + math.log(25.0) * ((k * 0.414214) % 1.0))
        y = y_of(m, rad * cmath.exp(1j * (math.pi + 2 * beta * frac)))
        k += 1
        if pole is not None and abs(y - pole) < 1e-2 * max(1.0, abs(pole)):
            continue
        out.append(y)
    return out


def check_boundary(f: LaplaceForm, n: int = 50) -> Check:
    errs = []
    for y in points_on_R(f.model, n):
        p = eval_phi1(f, y)
        errs.append(abs(eval_phi1(f, y.conjugate()) - G_ratio(f.model, y) * p) / (1 + abs(p)))
    return _check("boundary_condition", errs, TOL["boundary"])


def check_e_relation(f: LaplaceForm, n: int = 50) -> Check:
    m = f.model
    q = special_points(m).q
    errs = []
    for s in np.linspace(-10.0, -0.1, n):
        p = eval_phi1(f, y_of(m, s))
        errs.append(abs(eval_phi1(f, y_of(m, q * s)) - E_func(m, s) * p) / (1 + abs(p)))
    return _check("e_relation", errs, TOL["e_relation"])


def check_integral(f: LaplaceForm, n: int = 20) -> Check:
    errs = []
    for y in interior_points(f.model, n, f.pole):
        ref = phi1_integral(f.model, y)
        errs.append(abs(eval_phi1(f, y) - ref) / abs(ref))
    return _check("integral_oracle", errs, TOL["integral"])


def asymptotic_slope(f: LaplaceForm, lo: float = 1e3, hi: float = 1e5, n: int = 21) -> float:
    t = np.geomspace(lo, hi, n)
    vals = np.log([abs(eval_phi1(f, -x)) for x in t])
    return float(np.polyfit(np.log(t), vals, 1)[0])


def check_slope(f: LaplaceForm) -> Check:
    w = to_wedge(f.model)
    alpha = (w.delta + w.eps - math.pi) / w.beta
    return _check("asymptotic_exponent", [abs(asymptotic_slope(f) - (alpha - 1))], TOL["slope"])


def check_normalization(m: QuadrantModel, exact: ExactAngles | None) -> Check:
    pair = build_pair(m, exact)
    return _check("phi_at_origin", [abs(eval_phi(pair, 0.0, 0.0) - 1)], TOL["normalization"])


def check_decoupling(m: QuadrantModel, exact: ExactAngles | None) -> Check:
    _, cond, _ = classify(to_wedge(m), exact)
    try:
        pair = decoupling(m, cond, exact=exact)
    except NotCovered:
        return _check("decoupling", [], TOL["decoupling"])
    return _check("decoupling", [pair.check()], TOL["decoupling"])


def check_moments(m: QuadrantModel, exact: ExactAngles | None, n: int = 20) -> Check:
    rec = moment_recurrence(m, exact).moments(n)
    coeffs = series_coeffs(build_phi1(m, exact=exact), n)
    errs = [abs(math.factorial(k) * coeffs[k] - rec[k]) / abs(rec[k]) for k in range(n + 1)]
    return _check("moment_recurrence", errs, TOL["moments"])


def check_density(f: LaplaceForm) -> Check:
    d = density(f)
    errs = [abs(d.mass() - f.mass) / f.mass]
    # the transform converges up to the first positive singularity of phi1
    sing = [special_points(f.model).y_plus] + [r for r, _ in f.polyP if r > 0]
    if f.pole is not None and f.pole > 0:
        sing.append(f.pole)
    for y in (-0.3, -1.0, -3.0, 0.5 * min(sing)):
        ref = numeric_laplace(d, y)
        errs.append(abs(eval_phi1(f, y) - ref) / abs(ref))
    return _check("density_transform", errs, TOL["density"])


def check_invariant(m: QuadrantModel) -> Check:
    geo = special_points(m)
    W = InvariantW.of(m)
    errs = [abs(W(geo.y_at_minus_one) + 1), abs(W(geo.y_minus) - 1)]
    for z in (0.3, -0.7 + 0.2j, 2.5 - 1j, 10 + 4j, -5 + 0.5j):
        errs.append(abs(W(w_inverse(m, z)) - z) / max(1.0, abs(z)))
    for y in points_on_R(m, 10):
        errs.append(abs(W(y) - W(y.conjugate())) / max(1.0, abs(W(y))))
    return _check("canonical_invariant", errs, TOL["invariant"])


def check_integral_boundary(m: QuadrantModel, eta: float = 1e-7) -> Check:
    """The integral representation satisfies the boundary relation in the limit.

    Points at angular distance ``eta`` inside each edge of the domain are
    compared; the residual is ``O(eta)``.
    """
    sign_val = (lambda w: 2 * w.beta - 2 * w.eps - w.theta)(to_wedge(m))
    errs = []
    if abs(sign_val) < 1e-6:
        return _check("integral_boundary", errs, TOL["integral_boundary"])
    for rad in (0.3, 0.7, 3.0):
        y = y_of(m, -rad * cmath.exp(1j * eta))
        a, b = phi1_integral(m, y), phi1_integral(m, y.conjugate())
        errs.append(abs(b - G_ratio(m, y_of(m, -rad)) * a) / (1 + abs(a)))
    return _check("integral_boundary", errs, TOL["integral_boundary"])


def run_suite(m: QuadrantModel, exact: ExactAngles | None = None) -> list[Check]:
    """Every check that applies to the model."""
    rep = validate(m)
    checks = [Check("validity", rep.valid and rep.consistent, 0.0, 0.0, 1), check_invariant(m),
              check_integral_boundary(m)]
    _, cond, _ = classify(to_wedge(m), exact)
    if cond.simple is None and cond.double is None:
        return checks
    f = build_phi1(m, exact=exact)
    checks += [
        check_boundary(f), check_e_relation(f), check_integral(f), check_slope(f),
        check_normalization(m, exact), check_decoupling(m, exact),
    ]
    try:
        checks.append(check_moments(m, exact))
    except NotCovered:
        pass
    try:
        checks.append(check_density(f))
    except NotCovered:
        pass
    return checks


__all__ = [
    "Check", "TOL", "asymptotic_slope", "check_boundary", "check_decoupling", "check_density",
    "check_e_relation", "check_integral", "check_integral_boundary", "check_invariant", "check_moments",
    "check_normalization", "check_slope", "interior_points", "points_on_R", "run_suite",
]
