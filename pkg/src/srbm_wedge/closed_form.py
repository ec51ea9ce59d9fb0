"""Closed forms of the boundary Laplace transforms under an angle condition.

``phi1`` is assembled as a product over *groups*: every root of the
y-polynomials and every root of the w-polynomials is attached to the point
of the y-plane it comes from.  When a y-root and a w-root share their
origin the pair is a removable singularity, evaluated near the origin from
a Taylor expansion of ``w`` instead of a difference of nearly equal values.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import mpmath

from .classify import (
    BETA,
    ConditionData,
    DoubleInts,
    ExactAngles,
    FloatCalc,
    alphas,
    angle_conditions,
    make_calc,
)
from .errors import (
    AtKernelZero,
    AtPole,
    DegreeMismatch,
    InternalConsistencyError,
    InvalidInput,
    NearCoincidence,
    NoDecoupling,
    NotCovered,
    OnCut,
)
from .kernel import Region, gamma_eval, kernel_roots_y, region_of, special_points, y_of
from .model import QuadrantModel, WedgeModel, boundary_masses, to_wedge
from .special_fn import InvariantW, angle_offset, cheb_T, sqrt_one_minus_T_over

MERGE_TOL = 1e-9
TAYLOR_RADIUS = 1e-5
POLE_TOL = 1e-10


# ---------------------------------------------------------------- counting

def m_count(calc, omega, sign: int, lo: int, hi: int) -> int:
    """``#{j in [lo, hi] : e^{i omega} q^{sign j} = -1}``."""
    return sum(1 for j in range(lo, hi + 1) if calc.is_odd_pi(omega + (2 * sign * j) * calc.beta))


def in_GR(calc, omega) -> bool:
    """Whether ``y(e^{i omega})`` lies in the open domain bounded by R."""
    a = omega - calc.pi
    inside = calc.floor_over_2pi(a) - calc.floor_over_2pi(a - 2 * calc.beta) == 1
    return inside and not calc.is_odd_pi(omega)


def _count(calc, omega, r: int) -> int:
    lo = calc.floor_over_2pi(omega - calc.pi)
    hi = calc.floor_over_2pi(omega - calc.pi - (2 * r) * calc.beta)
    if r >= 0:
        return lo - hi - m_count(calc, omega, -1, 0, r - 1)
    return hi - lo - m_count(calc, omega, +1, 1, -r)


def count_in_GR(m, sigma: complex, r: int, *, calc=None, omega=None) -> int:
    """Roots (``r >= 0``) or poles (``r < 0``) of ``F_{r, sigma}`` inside the domain.

    The count comes from floor functions of the argument of ``sigma``.  Pass
    ``calc`` and an exact ``omega`` to decide the boundary cases exactly.
    """
    if calc is None:
        w = special_points(m).wedge
        calc = FloatCalc(w)
        sigma = complex(sigma)
        if abs(abs(sigma) - 1) > 1e-12:
            raise InvalidInput(f"sigma must have modulus 1, got {abs(sigma)}")
        omega = cmath.phase(sigma)
    return _count(calc, omega, r)


def enumerate_in_GR(m, sigma: complex, r: int) -> int:
    """The same count by locating every point ``y(sigma q^{-+j})`` directly."""
    q = special_points(m).q
    sigma = complex(sigma)
    if r >= 0:
        pts = [sigma * q ** (-j) for j in range(r)]
    else:
        pts = [sigma * q**j for j in range(1, -r + 1)]
    return sum(1 for s in pts if region_of(m, y_of(m, s)) is Region.INTERIOR)


# ---------------------------------------------------------------- angle data

@dataclass(frozen=True)
class _Angles:
    """Arguments of ``s1`` and ``s2`` and the sign of ``2 beta - 2 eps - theta``."""

    calc: object
    omega1: object
    omega2: object
    pole_sign: int


def _angle_data(calc) -> _Angles:
    b, th, de, ep, pi = calc.beta, calc.theta, calc.delta, calc.eps, calc.pi
    om1 = pi + 2 * b - 2 * ep - th
    om2 = -pi + 2 * de - th
    lhs = 2 * b - 2 * ep - th
    sgn = calc.sign(lhs)
    if calc.mode == "numerical" and abs(calc.value(lhs)) <= 1e-9:
        warnings.warn("2 beta - 2 eps - theta is within 1e-9 of zero", NearCoincidence, stacklevel=3)
    return _Angles(calc, om1, om2, sgn)


def _y_at(m, calc, omega) -> float:
    y = y_of(m, cmath.exp(1j * calc.value(omega)))
    return y.real


def _swap_exact(ex: ExactAngles | None) -> ExactAngles | None:
    if ex is None:
        return None
    return ExactAngles(BETA - ex.theta, ex.eps, ex.delta, ex.beta_over_pi, ex.beta_value)


# ---------------------------------------------------------------- decoupling

@dataclass(frozen=True)
class DecouplingPair:
    """``(gamma1/gamma2)^m = F(y)/L(x)`` on the kernel curve.

    ``roots`` lists ``(rho, power)`` with ``F(y) = prod (y - rho)^power``.
    ``L`` is obtained from ``F`` on the lower kernel root.
    """

    model: QuadrantModel
    m: int
    roots: tuple[tuple[float, int], ...]

    def F(self, y: complex) -> complex:
        out = 1 + 0j
        for rho, p in self.roots:
            out *= (complex(y) - rho) ** p
        return out

    def L(self, x: complex) -> complex:
        y = kernel_roots_y(self.model, x).minus
        _, g1, g2 = gamma_eval(self.model, x, y)
        return self.F(y) * (g2 / g1) ** self.m

    def residual(self, x: complex) -> float:
        """Relative failure of the identity at the other kernel root ``Y+(x)``."""
        y = kernel_roots_y(self.model, x).plus
        _, g1, g2 = gamma_eval(self.model, x, y)
        lhs = (g1 / g2) ** self.m
        rhs = self.F(y) / self.L(x)
        return abs(lhs - rhs) / max(abs(lhs), abs(rhs))

    def check(self, n: int = 20) -> float:
        geo = special_points(self.model)
        span = geo.x_plus - geo.x_minus
        xs = [geo.x_minus - span * (0.05 + 3.0 * i / n) for i in range(n)]
        return max(self.residual(x) for x in xs)


def _F_roots(m, calc, omega, r: int, power: int) -> list[tuple[float, int]]:
    """Roots of ``F_{r, e^{i omega}}`` raised to ``power``."""
    if r >= 0:
        return [(_y_at(m, calc, omega - (2 * j) * calc.beta), power) for j in range(r)]
    return [(_y_at(m, calc, omega + (2 * j) * calc.beta), -power) for j in range(1, -r + 1)]


def _f_root(m, e: int, eps: int, power: int) -> list[tuple[float, int]]:
    if e == 0:
        return []
    geo = special_points(m)
    return [(geo.y_minus if eps else geo.y_plus, power)]


def decoupling(m: QuadrantModel, c: ConditionData, exact: ExactAngles | None = None) -> DecouplingPair:
    if not c.any:
        raise NoDecoupling("neither angle condition holds")
    calc = make_calc(to_wedge(m), exact)
    ang = _angle_data(calc)
    if c.simple is not None:
        r, _ = c.simple
        return DecouplingPair(m, 1, tuple(_F_roots(m, calc, ang.omega1, r, 1)))
    d = c.double
    roots = _F_roots(m, calc, ang.omega1, d.r1, 2) + _F_roots(m, calc, ang.omega2, d.r2, -2)
    roots += _f_root(m, d.e1, d.eps1, 1) + _f_root(m, d.e2, d.eps2, -1)
    return DecouplingPair(m, 2, tuple(roots))


# ---------------------------------------------------------------- Laplace form

@dataclass(frozen=True)
class WRoot:
    """A root ``value`` of a polynomial in ``w``; ``w(origin) = value``."""

    origin: float
    value: float
    power: int = 1


@dataclass
class _Group:
    kind: str  # "generic", "minus_one" or "plus"
    origin: float
    py: int = 0
    pw: int = 0
    half: int = 0  # extra power of sqrt(1 + w) or of sqrt(y+ - y)
    taylor: tuple = ()

    @property
    def order(self) -> int:
        if self.kind == "minus_one":
            return self.py + 2 * self.pw + self.half
        return self.py + self.pw


@dataclass(frozen=True)
class LaplaceForm:
    """``phi1 = kappa (Q/P)(y) (S/R)(w(y)) sqrt-factors``.

    Root lists hold ``(root, multiplicity)``.  ``integers`` records the
    lattice data the form was built from.
    """

    model: QuadrantModel
    m: int
    polyP: tuple[tuple[float, int], ...]
    polyQ: tuple[tuple[float, int], ...]
    polyS: tuple[WRoot, ...]
    polyR: tuple[WRoot, ...]
    a_minus: int
    a_plus: int
    b: int
    kappa: float
    pole: float | None
    integers: dict
    _groups: tuple = field(default=(), repr=False, compare=False)

    @property
    def mass(self) -> float:
        return boundary_masses(self.model)[0]

    def __call__(self, y: complex) -> complex:
        return eval_phi1(self, y)


def _merge(roots) -> list[tuple[float, int]]:
    out: list[list] = []
    for rho, p in roots:
        for item in out:
            if abs(item[0] - rho) <= MERGE_TOL * max(1.0, abs(rho)):
                item[1] += p
                break
        else:
            out.append([rho, p])
    return [(r, p) for r, p in out if p != 0]


def _w_roots_simple(m, ang: _Angles, r: int) -> tuple[list[WRoot], list[WRoot]]:
    """Roots of ``S`` and ``R`` for the simple condition."""
    calc, om1 = ang.calc, ang.omega1
    W = InvariantW.of(m)
    y_m1 = special_points(m).y_at_minus_one

    def wr(omega):
        y = _y_at(m, calc, omega)
        return WRoot(y, W(y).real)

    S: list[WRoot] = []
    R: list[WRoot] = []
    if r < 0:
        R += [wr(om1 + (2 * j) * calc.beta) for j in range(1, -r + 1) if in_GR(calc, om1 + (2 * j) * calc.beta)]
        if ang.pole_sign > 0:
            R.append(wr(om1))
        mult = m_count(calc, om1, +1, 0, -r - 1)
        if mult:
            R.append(WRoot(y_m1, -1.0, mult))
    else:
        S += [wr(om1 - (2 * j) * calc.beta) for j in range(1, r) if in_GR(calc, om1 - (2 * j) * calc.beta)]
        if in_GR(calc, om1) and ang.pole_sign <= 0:
            S.append(wr(om1))
        mult = m_count(calc, om1, -1, 1, r - 1)
        if mult:
            S.append(WRoot(y_m1, -1.0, mult))
    return S, R


def _w_roots_double(m, ang: _Angles, d: DoubleInts):
    """``(S1, R1, S2, R2)`` for the double condition."""
    calc, om1, om2 = ang.calc, ang.omega1, ang.omega2
    W = InvariantW.of(m)
    y_m1 = special_points(m).y_at_minus_one

    def wr(omega):
        y = _y_at(m, calc, omega)
        return WRoot(y, W(y).real)

    def minus_ones(mult):
        return [WRoot(y_m1, -1.0, mult)] if mult else []

    S1, R1, S2, R2 = [], [], [], []
    if d.r1 <= 0:
        R1 += [wr(om1 + (2 * j) * calc.beta) for j in range(1, -d.r1 + 1) if in_GR(calc, om1 + (2 * j) * calc.beta)]
        if ang.pole_sign > 0:
            R1.append(wr(om1))
        R1 += minus_ones(m_count(calc, om1, +1, 0, -d.r1))
    else:
        S1 += [wr(om1 - (2 * j) * calc.beta) for j in range(1, d.r1) if in_GR(calc, om1 - (2 * j) * calc.beta)]
        if in_GR(calc, om1) and ang.pole_sign <= 0:
            S1.append(wr(om1))
        S1 += minus_ones(m_count(calc, om1, -1, 1, d.r1 - 1))
    if d.r2 <= 0:
        R2 += [wr(om2 + (2 * j) * calc.beta) for j in range(1, -d.r2 + 1) if in_GR(calc, om2 + (2 * j) * calc.beta)]
        R2 += minus_ones(m_count(calc, om2, +1, 1, -d.r2))
    else:
        S2 += [wr(om2 - (2 * j) * calc.beta) for j in range(0, d.r2) if in_GR(calc, om2 - (2 * j) * calc.beta)]
        S2 += minus_ones(m_count(calc, om2, -1, 1, d.r2 - 1))
    return S1, R1, S2, R2


def _degree(roots: list[WRoot]) -> int:
    return sum(w.power for w in roots)


def _expect_degree(name: str, roots: list[WRoot], expected: int) -> None:
    if _degree(roots) != expected:
        raise DegreeMismatch(f"deg {name} = {_degree(roots)}, expected {expected}")


def _groups(m, y_roots, w_roots, a_plus: int, b: int) -> tuple[_Group, ...]:
    geo = special_points(m)
    scale = geo.scale
    y_m1 = geo.y_at_minus_one
    W = InvariantW.of(m)
    groups: list[_Group] = [
        _Group("plus", geo.y_plus, half=-a_plus),
        _Group("minus_one", y_m1, half=b),
    ]

    def find(rho: float) -> _Group:
        for g in groups:
            if abs(g.origin - rho) <= MERGE_TOL * scale:
                return g
        g = _Group("generic", rho)
        groups.append(g)
        return g

    for rho, p in y_roots:
        find(rho).py += p
    for wr in w_roots:
        g = find(wr.origin)
        if g.kind == "plus":
            raise InternalConsistencyError("a w-root cannot originate at y+")
        g.pw += wr.power
    for g in groups:
        if g.kind == "generic" and g.pw:
            g.taylor = W.derivs(g.origin)[1:]
    return tuple(g for g in groups if g.py or g.pw or g.half)


def _finish(m, order, polyP, polyQ, polyS, polyR, a_minus, a_plus, b, pole, integers) -> LaplaceForm:
    polyP, polyQ = tuple(_merge(polyP)), tuple(_merge(polyQ))
    y_roots = [(r, p) for r, p in polyQ] + [(r, -p) for r, p in polyP]
    w_roots = [WRoot(w.origin, w.value, w.power) for w in polyS]
    w_roots += [WRoot(w.origin, w.value, -w.power) for w in polyR]
    groups = _groups(m, y_roots, w_roots, a_plus, b)
    f = LaplaceForm(m=order, model=m, polyP=polyP, polyQ=polyQ, polyS=tuple(polyS), polyR=tuple(polyR),
                    a_minus=a_minus, a_plus=a_plus, b=b, kappa=1.0, pole=pole, integers=integers,
                    _groups=groups)
    raw0 = eval_phi1(f, 0.0)
    if abs(raw0.imag) > 1e-10 * abs(raw0):
        raise InternalConsistencyError(f"phi1(0) is not real before normalization: {raw0}")
    mass1 = boundary_masses(m)[0]
    f = LaplaceForm(**{**f.__dict__, "kappa": mass1 / raw0.real})
    _check_positive(f)
    return f


def _check_positive(f: LaplaceForm) -> None:
    geo = special_points(f.model)
    lo = geo.y_minus
    for t in (0.0, 0.25, 0.5, 0.75, 0.999):
        y = lo * t
        if f.pole is not None and abs(y - f.pole) < 1e-6 * geo.scale:
            continue
        v = eval_phi1(f, y)
        if not (v.real > 0 and abs(v.imag) <= 1e-9 * abs(v)):
            raise InternalConsistencyError(f"phi1({y}) = {v} is not positive")


def _pick_condition(m, c, exact):
    w = to_wedge(m)
    if c is None:
        c = angle_conditions(alphas(w, exact))
    if not c.any:
        raise NotCovered("neither the simple nor the double angle condition holds")
    calc = make_calc(w, exact)
    return c, calc


def build_phi1(m: QuadrantModel, c: ConditionData | None = None, exact: ExactAngles | None = None,
               r_hint: tuple[int, int] | None = None, prefer: str = "simple") -> LaplaceForm:
    """Construct ``phi1`` from the lattice data of an angle condition.

    ``r_hint`` selects another representative ``(r, k)`` of the simple
    condition (only distinct when ``beta/pi`` is rational).  ``prefer``
    chooses between the two conditions when both hold.
    """
    c, calc = _pick_condition(m, c, exact)
    ang = _angle_data(calc)
    use_simple = c.simple is not None and (prefer == "simple" or c.double is None)
    if use_simple:
        r, k = r_hint if r_hint is not None else c.simple
        target = calc.delta + calc.eps - calc.pi - calc.beta - (k * calc.pi - r * calc.beta)
        if r == 0 or calc.sign(target) != 0:
            raise InvalidInput(f"(r, k) = {(r, k)} does not solve the simple angle condition")
        S, R = _w_roots_simple(m, ang, r)
        if r < 0:
            _expect_degree("R", R, -k)
            polyQ, polyP = [(y, 1) for y, _ in _F_roots(m, calc, ang.omega1, r, 1)], []
        else:
            _expect_degree("S", S, k)
            polyP, polyQ = [(y, 1) for y, _ in _F_roots(m, calc, ang.omega1, r, 1)], []
        pole = _y_at(m, calc, ang.omega1) if ang.pole_sign >= 0 else None
        return _finish(m, 1, polyP, polyQ, S, R, 0, 0, 0, pole, {"r": r, "k": k})

    d = c.double
    S1, R1, S2, R2 = _w_roots_double(m, ang, d)
    if d.r1 <= 0:
        _expect_degree("R1", R1, -d.k1)
    else:
        _expect_degree("S1", S1, d.k1)
    if d.r2 <= 0:
        _expect_degree("R2", R2, -d.k2)
    else:
        _expect_degree("S2", S2, d.k2)
    y1 = [(y, 1) for y, _ in _F_roots(m, calc, ang.omega1, d.r1, 1)]
    y2 = [(y, 1) for y, _ in _F_roots(m, calc, ang.omega2, d.r2, 1)]
    # Q = Q1 P2, P = P1 Q2
    polyQ = (y1 if d.r1 < 0 else []) + (y2 if d.r2 >= 0 else [])
    polyP = (y1 if d.r1 >= 0 else []) + (y2 if d.r2 < 0 else [])
    a_minus = d.e1 * d.eps1 - d.e2 * d.eps2
    a_plus = d.e1 * (1 - d.eps1) - d.e2 * (1 - d.eps2)
    b = d.eps1 * (1 - d.e1) - d.eps2 * (1 - d.e2)
    pole = _y_at(m, calc, ang.omega1) if ang.pole_sign >= 0 else None
    ints = {f: getattr(d, f) for f in ("r1", "k1", "e1", "eps1", "r2", "k2", "e2", "eps2")}
    return _finish(m, 2, polyP, polyQ, S1 + R2, R1 + S2, a_minus, a_plus, b, pole, ints)


# ---------------------------------------------------------------- evaluation

def _group_factor(f: LaplaceForm, g: _Group, y: complex, W: InvariantW) -> complex:
    geo = special_points(f.model)
    h = y - g.origin
    if g.kind == "plus":
        # (y - y+)^py (y+ - y)^(half/2)
        n = 2 * g.py + g.half
        return (-1) ** (g.py % 2) * cmath.sqrt(-h) ** n
    near = abs(h) <= POLE_TOL * max(1.0, abs(g.origin))
    if near and g.order < 0:
        raise AtPole(f"phi1 has a pole at y={g.origin}")
    if g.kind == "minus_one":
        nu = 2 * g.pw + g.half
        if abs(h) <= 1e-3 * geo.scale:
            x = math.cos(geo.wedge.beta) - 2 * h / geo.scale
            u = -math.sqrt(2) * cmath.sin(W.a * angle_offset(x, geo.wedge.beta) / 2)
        else:
            u = math.sqrt(2) * cheb_T(W.a / 2, W.arg(y))
        if h == 0:
            if g.order > 0:
                return 0j
            slope = -math.sqrt(2) * W.a / (geo.scale * math.sin(geo.wedge.beta))
            return complex(slope**nu)
        return h**g.py * u**nu
    if g.pw == 0:
        if h == 0:
            if g.order > 0:
                return 0j
            raise AtPole(f"phi1 has a pole at y={g.origin}")
        return h**g.py
    if abs(h) <= TAYLOR_RADIUS * geo.scale:
        d1, d2, d3 = g.taylor
        ratio = d1 + d2 * h / 2 + d3 * h * h / 6
        if h == 0:
            return 0j if g.order > 0 else ratio**g.pw
        return h**g.order * ratio**g.pw
    dw = W(y) - W(complex(g.origin))
    return h**g.py * dw**g.pw


def eval_phi1(f: LaplaceForm, y: complex) -> complex:
    geo = special_points(f.model)
    y = complex(y)
    if abs(y.imag) <= 1e-12 * max(1.0, abs(y)) and y.real >= geo.y_plus:
        raise OnCut(f"y={y} lies on the cut [y+, inf)")
    W = InvariantW.of(f.model)
    out = complex(f.kappa)
    for g in f._groups:
        out *= _group_factor(f, g, y, W)
    if f.a_minus:
        # sqrt((1 - w)/(y - y-)), positive at y-
        x = W.arg(y)
        root = W.a * sqrt_one_minus_T_over(W.a, x) * math.sqrt(2 / geo.scale)
        out *= root**f.a_minus
    return out


# ---------------------------------------------------------------- both boundaries

@dataclass(frozen=True)
class LaplacePair:
    """``phi1`` of the model and ``phi2`` through the coordinate swap."""

    model: QuadrantModel
    phi1: LaplaceForm
    phi2: LaplaceForm

    def eval_phi1(self, y: complex) -> complex:
        return eval_phi1(self.phi1, y)

    def eval_phi2(self, x: complex) -> complex:
        return eval_phi1(self.phi2, x)

    def eval_phi(self, x: complex, y: complex) -> complex:
        return eval_phi(self, x, y)


def build_pair(m: QuadrantModel, exact: ExactAngles | None = None) -> LaplacePair:
    return LaplacePair(m, build_phi1(m, exact=exact), build_phi1(m.swapped(), exact=_swap_exact(exact)))


def eval_phi2(pair: LaplacePair, x: complex) -> complex:
    return pair.eval_phi2(x)


def eval_phi(pair: LaplacePair, x: complex, y: complex, tol: float = 1e-12) -> complex:
    """The bivariate transform from the functional equation.

    At the origin the quotient is ``0/0``; its value there is the limit
    ``-(r11 phi1(0) + r12 phi2(0)) / mu1`` along the first axis.
    """
    q = pair.model
    x, y = complex(x), complex(y)
    g, g1, g2 = gamma_eval(q, x, y)
    size = abs(q.sigma11 * x * x) + abs(q.sigma22 * y * y) + abs(q.mu1 * x) + abs(q.mu2 * y)
    if abs(x) <= tol and abs(y) <= tol:
        p1, p2 = pair.eval_phi1(0.0), pair.eval_phi2(0.0)
        return -(q.r11 * p1 + q.r12 * p2) / q.mu1
    if abs(g) <= tol * max(size, 1e-300):
        raise AtKernelZero(f"the kernel vanishes at ({x}, {y})")
    return -(g1 * pair.eval_phi1(y) + g2 * pair.eval_phi2(x)) / g


def _singular_radius(f: LaplaceForm, drift: float, var: float) -> float:
    geo = special_points(f.model)
    sing = [abs(geo.y_plus), abs(2 * drift / var)]
    if f.pole is not None:
        sing.append(abs(f.pole))
    sing += [abs(r) for r, _ in f.polyP]
    return 0.5 * min(sing)


def marginal_means(pair: LaplacePair, nodes: int = 64) -> tuple[float, float]:
    """``(E Z1, E Z2)`` under the stationary law.

    Each is the first Taylor coefficient of the bivariate transform along an
    axis, taken by a Cauchy integral on a circle well inside the nearest
    singularity; the transform is analytic there, so the trapezoidal rule
    converges geometrically.
    """
    q = pair.model
    out = []
    for axis, f, drift, var in ((0, pair.phi2, q.mu1, q.sigma11), (1, pair.phi1, q.mu2, q.sigma22)):
        rad = _singular_radius(f, drift, var)
        total = 0j
        for k in range(nodes):
            z = rad * cmath.exp(2j * math.pi * k / nodes)
            v = eval_phi(pair, z, 0.0) if axis == 0 else eval_phi(pair, 0.0, z)
            total += v / z
        out.append((total / nodes).real)
    return out[0], out[1]


# ---------------------------------------------------------------- densities

@dataclass(frozen=True)
class SumOfExponentials:
    """``p(z) = sum_i exp(-rate_i z) sum_l coeffs_i[l-1] z^(l-1)/(l-1)!``."""

    terms: tuple[tuple[float, tuple[float, ...]], ...]
    kind: str = "sum_of_exponentials"

    def pdf(self, z: float) -> float:
        total = 0.0
        for rate, coeffs in self.terms:
            total += math.exp(-rate * z) * sum(c * z**l / math.factorial(l) for l, c in enumerate(coeffs))
        return total

    def laplace(self, y: complex) -> complex:
        return sum(c / (rate - y) ** (l + 1) for rate, coeffs in self.terms for l, c in enumerate(coeffs))

    def mass(self) -> float:
        return self.laplace(0.0).real

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "terms": [{"rate": r, "coeffs": list(c)} for r, c in self.terms]}


@dataclass(frozen=True)
class GammaHalf:
    """Gamma law of shape 1/2 scaled to ``weight``."""

    rate: float
    weight: float
    kind: str = "gamma_half"

    def pdf(self, z: float) -> float:
        if z <= 0:
            return math.inf if z == 0 else 0.0
        return self.weight * math.sqrt(self.rate / math.pi) * math.exp(-self.rate * z) / math.sqrt(z)

    def laplace(self, y: complex) -> complex:
        return self.weight / cmath.sqrt(1 - complex(y) / self.rate)

    def mass(self) -> float:
        return self.weight

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "rate": self.rate, "weight": self.weight}


@dataclass(frozen=True)
class Erf:
    """``p(z) = kappa erf(sqrt(b z)) exp(-a z)``."""

    a: float
    b: float
    kappa: float
    kind: str = "erf"

    def pdf(self, z: float) -> float:
        return self.kappa * math.erf(math.sqrt(self.b * max(z, 0.0))) * math.exp(-self.a * z)

    def laplace(self, y: complex) -> complex:
        y = complex(y)
        return self.kappa * math.sqrt(self.b) / ((self.a - y) * cmath.sqrt(self.a + self.b - y))

    def mass(self) -> float:
        return self.laplace(0.0).real

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "a": self.a, "b": self.b, "kappa": self.kappa}


@dataclass(frozen=True)
class WedgePolar:
    """The explicit stationary density when ``alpha1 = alpha2 = 0``.

    ``pdf`` is the quadrant density; ``wedge_pdf`` the density in polar
    coordinates of the wedge.
    """

    beta: float
    theta: float
    delta: float
    eps: float
    kappa: float
    kappa_wedge: float
    mu_norm: float
    scale1: float
    scale2: float
    kind: str = "wedge_polar"

    def normal_pdf(self, z1: float, z2: float) -> float:
        cb = math.cos(self.beta)
        r2 = z1 * z1 + z2 * z2 + 2 * z1 * z2 * cb
        if r2 <= 0:
            return math.inf
        mod = math.sqrt(r2)
        cos_half_sq = (z1 * math.cos(self.theta) + z2 * math.cos(self.beta - self.theta) + mod) / (2 * mod)
        cos_half_sq = max(cos_half_sq, 0.0)
        return self.kappa * math.sqrt(cos_half_sq) / math.sqrt(mod) * math.exp(-2 * mod * cos_half_sq)

    def pdf(self, u: float, v: float) -> float:
        return self.normal_pdf(u / self.scale1, v / self.scale2)

    def wedge_pdf(self, rho: float, a: float) -> float:
        c = math.cos((self.theta - a) / 2)
        return self.kappa_wedge * c / math.sqrt(rho) * math.exp(-2 * self.mu_norm * rho * c * c)

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind, "beta": self.beta, "theta": self.theta, "delta": self.delta,
            "eps": self.eps, "kappa": self.kappa, "kappa_wedge": self.kappa_wedge,
            "mu_norm": self.mu_norm, "scale1": self.scale1, "scale2": self.scale2,
        }


DensityForm = SumOfExponentials | GammaHalf | Erf | WedgePolar


def _partial_fractions(poles: list[tuple[float, int]], const: float) -> SumOfExponentials:
    """``const * prod (b_i - y)^(-m_i)`` as a sum of ``c (b - y)^(-l)``."""
    terms = []
    for i, (b, mult) in enumerate(poles):
        # expand prod_{j != i} (b_j - b + u)^(-m_j) in u = b - y
        series = [1.0] + [0.0] * (mult - 1)
        for j, (bj, mj) in enumerate(poles):
            if j == i:
                continue
            c = bj - b
            binom = [1.0]
            for n in range(1, mult):
                binom.append(binom[-1] * (-mj - n + 1) / n / c)
            binom = [t * c ** (-mj) for t in binom]
            series = [sum(series[k] * binom[n - k] for k in range(n + 1)) for n in range(mult)]
        # coefficient of u^(-l) is series[mult - l]
        coeffs = tuple(const * series[mult - l] for l in range(1, mult + 1))
        terms.append((b, coeffs))
    return SumOfExponentials(tuple(terms))


def density(f: LaplaceForm, joint: bool = False) -> DensityForm:
    """The density of the first boundary measure, or the joint density.

    Covered cases: a rational transform (sum of exponentials), the two
    square-root cases (Gamma(1/2) and erf), and with ``joint=True`` the
    bivariate density when ``alpha1 = alpha2 = 0``.
    """
    geo = special_points(f.model)
    if joint:
        ints = f.integers
        zero = {"r1": 0, "k1": 0, "e1": 1, "eps1": 0, "r2": 0, "k2": 0, "e2": 0, "eps2": 0}
        if ints != zero:
            raise NotCovered("the joint density is only known when alpha1 = alpha2 = 0")
        return _wedge_polar(f.model)
    ys = [g for g in f._groups if g.kind == "generic"]
    plus = [g for g in f._groups if g.kind == "plus"]
    minus_one = [g for g in f._groups if g.kind == "minus_one"]
    if f.a_minus or minus_one or any(g.pw for g in ys):
        raise NotCovered("no catalogued density for this transform")
    if f.m == 1 and not plus:
        poles = [(g.origin, -g.py) for g in ys]
        if any(p <= 0 for _, p in poles) or any(b <= 0 for b, _ in poles):
            raise NotCovered("the transform is not a sum of exponential terms")
        sign = (-1) ** (sum(p for _, p in poles) % 2)
        return _partial_fractions(poles, sign * f.kappa)
    mass = f.mass
    plus_power = (2 * plus[0].py + plus[0].half) if plus else 0
    if plus_power == -1 and not ys:
        return GammaHalf(geo.y_plus, mass)
    if plus_power == -1 and len(ys) == 1 and ys[0].py == -1:
        a = ys[0].origin
        b = geo.y_plus - a
        if b <= 0 or a <= 0:
            raise NotCovered("erf form needs 0 < a < y+")
        # phi1 = K / ((a - y) sqrt(y+ - y)); K fixed by phi1(0) = mass
        K = mass * a * math.sqrt(geo.y_plus)
        return Erf(a, b, K / math.sqrt(b))
    raise NotCovered("no catalogued density for this transform")


def _wedge_polar(q: QuadrantModel) -> WedgePolar:
    w = to_wedge(q)
    D, det = q.Delta, q.det_sigma
    sd, se = math.sin(w.delta), math.sin(w.eps)
    kappa = 2 * math.sqrt(2) * D * sd * se / (math.sqrt(math.pi) * det**1.5 * math.sin(w.beta / 2))
    mu_norm = math.sqrt(D / det)
    kappa_wedge = (2 * mu_norm) ** 1.5 * sd * se / (math.sqrt(math.pi) * math.sin(w.beta / 2))
    if abs(kappa_wedge - kappa * D**-0.25 * det**0.75) > 1e-10 * kappa_wedge:
        raise InternalConsistencyError("the two normalizations of the joint density disagree")
    return WedgePolar(w.beta, w.theta, w.delta, w.eps, kappa, kappa_wedge, mu_norm,
                      det / math.sqrt(D * q.sigma22), det / math.sqrt(D * q.sigma11))


def phi_algebraic(q: QuadrantModel, x: complex, y: complex) -> complex:
    """The bivariate transform in closed algebraic form for ``alpha1 = alpha2 = 0``."""
    geo = special_points(q)
    w = geo.wedge
    xt = cmath.sqrt(1 - complex(x) / geo.x_plus)
    yt = cmath.sqrt(1 - complex(y) / geo.y_plus)
    sd, se, cde = math.sin(w.delta), math.sin(w.eps), math.cos(w.delta + w.eps)
    k0 = -2 * sd * se * cde
    den = xt * yt * (xt * xt * sd * sd + yt * yt * se * se - 2 * xt * yt * sd * se * cde
                     - math.sin(w.delta + w.eps) ** 2)
    return k0 * (xt + yt) / den


# ---------------------------------------------------------------- moments

MOMENT_DPS = 60


@dataclass(frozen=True)
class MomentRecurrence:
    """Fourth-order recurrence for the rescaled moments ``M~_n``.

    ``M_n = n! [y^n] phi1 = (2/(y+ - y-))^n M~_n``.  Forward iteration
    amplifies rounding by roughly an order of magnitude per step, so the
    coefficients and both seeds are formed and iterated in
    ``MOMENT_DPS``-digit arithmetic from the float angles.
    """

    beta: float
    theta: float
    phi0: float
    scale: float

    def _params(self):
        b, th = mpmath.mpf(self.beta), mpmath.mpf(self.theta)
        a = mpmath.pi / b
        c1, c2 = mpmath.cos(b), mpmath.cos(b - th)
        ct = mpmath.cos(mpmath.pi * th / b)
        kp = self.phi0 * (c2 - c1) ** 2 / (1 - ct)
        M1 = self.phi0 * (2 / (c2 - c1) - a * mpmath.sin(mpmath.pi * th / b) / (mpmath.sin(b - th) * (1 - ct)))
        return a, c1, c2, kp, mpmath.mpf(self.phi0), M1

    @property
    def seeds(self) -> tuple[float, float, float]:
        """``(kappa', M~_0, M~_1)`` rounded to floats."""
        with mpmath.workdps(MOMENT_DPS):
            _, _, _, kp, M0, M1 = self._params()
            return float(kp), float(M0), float(M1)

    @staticmethod
    def _step(n, M, a, c1, c2, kp):
        def get(i):
            return M[i] if i >= 0 else 0

        rhs = a * a * kp if n == 0 else 0
        rhs += (c2 - c1) * (2 * (c1 * c2 - 2 * c2**2 + 1) * n + c1 * c2 - 5 * c2**2 + 4) * get(n + 1)
        rhs += ((c1**2 - 6 * c1 * c2 + 6 * c2**2 - 1) * n**2 - 3 * (2 * c1 * c2 - 3 * c2**2 + 1) * n
                - (c1 - c2) ** 2 * a**2 - 2 * c1 * c2 + 4 * c2**2 - 2) * get(n)
        rhs -= n * (2 * (2 * c2 - c1) * n**2 + 3 * c2 * n + 2 * (c1 - c2) * a**2 + c2) * get(n - 1)
        rhs += n * (n - 1) * (n**2 - a**2) * get(n - 2)
        return rhs / ((1 - c2**2) * (c1 - c2) ** 2)

    def tilde(self, N: int) -> list[float]:
        """``M~_0 .. M~_N``."""
        with mpmath.workdps(MOMENT_DPS):
            a, c1, c2, kp, M0, M1 = self._params()
            M = [M0, M1]
            for n in range(N - 1):
                M.append(self._step(n, M, a, c1, c2, kp))
            return [float(v) for v in M[: N + 1]]

    def moments(self, N: int) -> list[float]:
        """``E``-type moments ``n! [y^n] phi1`` for ``n <= N``."""
        with mpmath.workdps(MOMENT_DPS):
            a, c1, c2, kp, M0, M1 = self._params()
            M = [M0, M1]
            for n in range(N - 1):
                M.append(self._step(n, M, a, c1, c2, kp))
            sc = mpmath.mpf(self.scale)
            return [float(v * sc**n) for n, v in enumerate(M[: N + 1])]


def moment_recurrence(m: QuadrantModel, exact: ExactAngles | None = None) -> MomentRecurrence:
    w = to_wedge(m)
    calc = make_calc(w, exact)
    b, th, de, ep, pi = calc.beta, calc.theta, calc.delta, calc.eps, calc.pi
    if calc.sign(de + ep + b - 2 * pi) != 0 or calc.sign(2 * ep + th - 2 * pi) != 0:
        raise NotCovered("the moment recurrence needs delta+eps+beta = 2pi and 2eps+theta = 2pi")
    geo = special_points(m)
    return MomentRecurrence(w.beta, w.theta, boundary_masses(m)[0], 2 / geo.scale)


def phi1_moment_form(m: QuadrantModel) -> Callable[[complex], complex]:
    """``kappa' (T_a(c2 - z) + 1)/(c2 - c1 - z)^2`` with ``z = 2y/(y+ - y-)``."""
    rec = moment_recurrence(m)
    geo = special_points(m)
    kp = rec.seeds[0]
    a = math.pi / rec.beta
    c1, c2 = math.cos(rec.beta), math.cos(rec.beta - rec.theta)

    def f(y: complex) -> complex:
        z = 2 * complex(y) / geo.scale
        return kp * (cheb_T(a, c2 - z) + 1) / (c2 - c1 - z) ** 2

    return f


# ---------------------------------------------------------------- reporting

def laplace_json(f: LaplaceForm) -> dict:
    return {
        "m": f.m,
        "P": [[r, p] for r, p in f.polyP],
        "Q": [[r, p] for r, p in f.polyQ],
        "S": [[w.value, w.power] for w in f.polyS],
        "R": [[w.value, w.power] for w in f.polyR],
        "a_minus": f.a_minus,
        "a_plus": f.a_plus,
        "b": f.b,
        "kappa": f.kappa,
        "pole": f.pole,
        "integers": dict(f.integers),
    }


__all__ = [
    "DecouplingPair", "DensityForm", "Erf", "GammaHalf", "LaplaceForm", "LaplacePair",
    "MomentRecurrence", "SumOfExponentials", "WRoot", "WedgePolar", "build_pair", "build_phi1",
    "count_in_GR", "decoupling", "density", "enumerate_in_GR", "eval_phi", "eval_phi1", "eval_phi2",
    "in_GR", "laplace_json", "m_count", "marginal_means", "moment_recurrence", "phi1_moment_form", "phi_algebraic",
]
