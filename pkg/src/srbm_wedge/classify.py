"""Angle invariants, the two angle conditions and the nature of ``phi1``.

Membership of a real number in ``Z + (pi/beta) Z`` cannot be decided from
floating point input, so two modes exist.  In exact mode every angle is an
element ``a*pi + b*beta`` with rational ``a``, ``b``; ``beta`` is either a
rational multiple of ``pi`` or a declared irrational symbol (its float value
is then only used for ordering tests, never for equality).  In numerical mode
the same decisions are made by a bounded lattice search with tolerance
``LATTICE_TOL`` and the result is flagged.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import AmbiguousNumerical, InvalidInput
from .model import WedgeModel

LATTICE_TOL = 1e-9
SEARCH_BOUND = 60
RATIONAL_DENOM_MAX = 64


@dataclass(frozen=True)
class Lin:
    """The angle ``pi_coeff * pi + beta_coeff * beta``."""

    pi_coeff: Fraction = Fraction(0)
    beta_coeff: Fraction = Fraction(0)

    def __add__(self, other: Lin) -> Lin:
        return Lin(self.pi_coeff + other.pi_coeff, self.beta_coeff + other.beta_coeff)

    def __sub__(self, other: Lin) -> Lin:
        return Lin(self.pi_coeff - other.pi_coeff, self.beta_coeff - other.beta_coeff)

    def __neg__(self) -> Lin:
        return Lin(-self.pi_coeff, -self.beta_coeff)

    def __mul__(self, c) -> Lin:
        c = Fraction(c)
        return Lin(self.pi_coeff * c, self.beta_coeff * c)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Lin({self.pi_coeff}*pi + {self.beta_coeff}*beta)"


PI = Lin(Fraction(1), Fraction(0))
BETA = Lin(Fraction(0), Fraction(1))

Angle = Union[Lin, float]


def parse_fraction(text: str) -> Fraction:
    """``"n/d"`` or a decimal literal, as an exact fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"not a rational number: {text!r}") from exc


@dataclass(frozen=True)
class ExactAngles:
    """Exactly specified wedge angles.

    ``beta_over_pi`` is set for a rational opening; otherwise ``beta_value``
    is the numerical value of an opening declared irrational.
    """

    theta: Lin
    delta: Lin
    eps: Lin
    beta_over_pi: Fraction | None = None
    beta_value: float | None = None

    def __post_init__(self):
        if (self.beta_over_pi is None) == (self.beta_value is None):
            raise InvalidInput("give exactly one of beta_over_pi and beta_value")

    @classmethod
    def rational(cls, beta, theta, delta, eps) -> ExactAngles:
        """All four angles as rational multiples of pi."""
        b, t, d, e = (Fraction(v) for v in (beta, theta, delta, eps))
        return cls(Lin(t), Lin(d), Lin(e), beta_over_pi=b)

    @property
    def rational_beta(self) -> bool:
        return self.beta_over_pi is not None

    @property
    def beta(self) -> float:
        if self.beta_over_pi is not None:
            return float(self.beta_over_pi) * math.pi
        return self.beta_value

    def reduce(self, a: Lin) -> Lin:
        """Fold ``beta`` into the pi coefficient when it is rational."""
        if self.beta_over_pi is None or a.beta_coeff == 0:
            return a
        return Lin(a.pi_coeff + a.beta_coeff * self.beta_over_pi, Fraction(0))

    def value(self, a: Lin) -> float:
        a = self.reduce(a)
        return float(a.pi_coeff) * math.pi + float(a.beta_coeff) * self.beta

    def to_wedge(self, Delta: float = 1.0) -> WedgeModel:
        return WedgeModel(self.beta, self.value(self.theta), self.value(self.delta), self.value(self.eps), Delta)

    def to_json_dict(self) -> dict:
        if self.beta_over_pi is None:
            raise InvalidInput("only rational openings have a JSON form")
        def nd(a: Lin) -> list[int]:
            f = self.reduce(a).pi_coeff
            return [f.numerator, f.denominator]
        return {
            "beta": [self.beta_over_pi.numerator, self.beta_over_pi.denominator],
            "theta": nd(self.theta), "delta": nd(self.delta), "eps": nd(self.eps),
        }


class ExactCalc:
    """Sign and lattice tests on exact angles."""

    mode = "exact"

    def __init__(self, angles: ExactAngles):
        self.angles = angles
        self.beta, self.theta = BETA, angles.theta
        self.delta, self.eps, self.pi = angles.delta, angles.eps, PI

    def value(self, a: Lin) -> float:
        return self.angles.value(a)

    def sign(self, a: Lin) -> int:
        a = self.angles.reduce(a)
        if a.beta_coeff == 0:
            return (a.pi_coeff > 0) - (a.pi_coeff < 0)
        # irrational beta: a nonzero beta coefficient rules out zero
        v = self.value(a)
        return 1 if v > 0 else -1

    def is_odd_pi(self, a: Lin) -> bool:
        """Whether ``exp(i a) = -1``."""
        a = self.angles.reduce(a)
        if a.beta_coeff != 0:
            return False
        half = (a.pi_coeff - 1) / 2
        return half.denominator == 1

    def floor_over_2pi(self, a: Lin) -> int:
        """``floor(a / 2 pi)``, exact when ``a`` is a multiple of ``2 pi``."""
        a = self.angles.reduce(a)
        if a.beta_coeff == 0:
            return math.floor(a.pi_coeff / 2)
        return math.floor(self.value(a) / (2 * math.pi))


class FloatCalc:
    """The same interface on plain floats, with tolerance ``LATTICE_TOL``."""

    mode = "numerical"

    def __init__(self, w: WedgeModel, tol: float = LATTICE_TOL):
        self.tol = tol
        self.beta, self.theta, self.delta, self.eps = w.beta, w.theta, w.delta, w.eps
        self.pi = math.pi

    def value(self, a: float) -> float:
        return float(a)

    def sign(self, a: float) -> int:
        if abs(a) <= self.tol:
            return 0
        return 1 if a > 0 else -1

    def is_odd_pi(self, a: float) -> bool:
        t = (a - math.pi) / (2 * math.pi)
        return abs(t - round(t)) <= self.tol

    def floor_over_2pi(self, a: float) -> int:
        t = a / (2 * math.pi)
        n = round(t)
        if abs(t - n) <= self.tol:
            return int(n)
        return math.floor(t)


def make_calc(w: WedgeModel, exact: ExactAngles | None = None):
    return ExactCalc(exact) if exact is not None else FloatCalc(w)


@dataclass(frozen=True)
class Mixed:
    """The number ``c + p * pi / beta`` with rational ``c`` and ``p``."""

    c: Fraction
    p: Fraction

    def value(self, beta: float) -> float:
        return float(self.c) + float(self.p) * math.pi / beta


def _over_beta(a: Lin, angles: ExactAngles) -> Mixed:
    a = angles.reduce(a)
    if angles.beta_over_pi is not None:
        # pi / beta is rational
        return Mixed(a.pi_coeff / angles.beta_over_pi, Fraction(0))
    return Mixed(a.beta_coeff, a.pi_coeff)


@dataclass(frozen=True)
class AngleData:
    alpha: float
    alpha1: float
    alpha2: float
    beta: float
    mode: str
    exact: ExactAngles | None = None
    alpha_exact: Mixed | None = None
    alpha1_exact: Mixed | None = None
    alpha2_exact: Mixed | None = None
    beta_over_pi: Fraction | None = None

    @property
    def rational_beta(self) -> bool:
        return self.beta_over_pi is not None


@dataclass(frozen=True)
class DoubleInts:
    r1: int
    k1: int
    e1: int
    eps1: int
    r2: int
    k2: int
    e2: int
    eps2: int


@dataclass(frozen=True)
class ConditionData:
    simple: tuple[int, int] | None
    double: DoubleInts | None
    mode: str

    @property
    def any(self) -> bool:
        return self.simple is not None or self.double is not None


class Nature(enum.IntEnum):
    """Ordered so that a larger value is a smaller class."""

    D_TRANSCENDENTAL = 0
    D_ALGEBRAIC = 1
    D_FINITE = 2
    ALGEBRAIC = 3
    RATIONAL = 4

    @property
    def label(self) -> str:
        return {
            0: "D-transcendental", 1: "D-algebraic", 2: "D-finite",
            3: "algebraic", 4: "rational",
        }[self.value]


@dataclass(frozen=True)
class NatureReport:
    nature: Nature
    recip_phi1_dfinite: bool | None
    logderiv_dfinite: bool | None

    def at_least(self, other: Nature) -> bool:
        return self.nature >= other


def _rational_guess(x: float) -> Fraction | None:
    f = Fraction(x).limit_denominator(RATIONAL_DENOM_MAX)
    return f if abs(float(f) - x) <= LATTICE_TOL else None


def alphas(w: WedgeModel, exact: ExactAngles | None = None) -> AngleData:
    """The three angle ratios, exactly when exact angles are supplied."""
    b, th, de, ep = w.beta, w.theta, w.delta, w.eps
    alpha = (de + ep - math.pi) / b
    alpha1 = (2 * ep + th - b - math.pi) / b
    alpha2 = (2 * de - th - math.pi) / b
    if exact is None:
        return AngleData(alpha, alpha1, alpha2, b, "numerical", beta_over_pi=_rational_guess(b / math.pi))
    for name, a, v in (("beta", BETA, b), ("theta", exact.theta, th), ("delta", exact.delta, de), ("eps", exact.eps, ep)):
        if abs(exact.value(a) - v) > LATTICE_TOL:
            raise InvalidInput(f"exact {name} disagrees with the model: {exact.value(a)} vs {v}")
    A = _over_beta(exact.delta + exact.eps - PI, exact)
    A1 = _over_beta(2 * exact.eps + exact.theta - BETA - PI, exact)
    A2 = _over_beta(2 * exact.delta - exact.theta - PI, exact)
    return AngleData(
        alpha, alpha1, alpha2, b, "exact", exact, A, A1, A2, exact.beta_over_pi,
    )


def _pick(cands, key):
    return min(cands, key=key) if cands else None


def _solve_exact(target: Lin, angles: ExactAngles) -> list[tuple[int, int]]:
    """Integer pairs ``(R, K)`` with ``target = R beta - K pi``, a few per class."""
    if angles.beta_over_pi is None:
        t = angles.reduce(target)
        if t.beta_coeff.denominator != 1 or t.pi_coeff.denominator != 1:
            return []
        return [(int(t.beta_coeff), int(-t.pi_coeff))]
    n, d = angles.beta_over_pi.numerator, angles.beta_over_pi.denominator
    rhs = angles.reduce(target).pi_coeff * d
    if rhs.denominator != 1:
        return []
    rhs = int(rhs)
    # R n - K d = rhs
    R0 = (rhs * pow(n, -1, d)) % d if d > 1 else 0
    K0 = (R0 * n - rhs) // d
    return [(R0 + j * d, K0 + j * n) for j in range(-3, 3)]


def _solve_float(target: float, beta: float) -> list[tuple[int, int]]:
    out = []
    for R in range(-2 * SEARCH_BOUND - 1, 2 * SEARCH_BOUND + 2):
        K = (R * beta - target) / math.pi
        if abs(K - round(K)) <= LATTICE_TOL:
            out.append((R, int(round(K))))
    return out


def angle_conditions(a: AngleData, strict: bool = False) -> ConditionData:
    """Decide both angle conditions and choose their integer data.

    Among admissible solutions the one with the smallest ``|r|`` is kept,
    ties broken by the smallest ``|k|``.  In numerical mode a hit can only
    be certified up to ``LATTICE_TOL``; with ``strict=True`` it raises
    :class:`AmbiguousNumerical` instead.
    """
    if a.mode == "exact":
        ex = a.exact
        solve = lambda t: _solve_exact(t, ex)  # noqa: E731
        simple_t = ex.delta + ex.eps - PI - BETA
        om1 = PI + 2 * BETA - 2 * ex.eps - ex.theta
        om2 = -PI + 2 * ex.delta - ex.theta
    else:
        b = a.beta
        solve = lambda t: _solve_float(t, b)  # noqa: E731
        simple_t = a.alpha * b - b
        om1 = (1 - a.alpha1) * b
        om2 = a.alpha2 * b

    simple = None
    # delta + eps - pi - beta = k pi - r beta, i.e. R = -r, K = -k
    cands = [(-R, -K) for R, K in solve(simple_t) if R != 0]
    if cands:
        simple = _pick(cands, key=lambda rk: (abs(rk[0]), abs(rk[1]), -rk[0]))

    double = None
    c1, c2 = solve(om1), solve(om2)
    if c1 and c2:
        def split(RK):
            R, K = RK
            return R // 2, K // 2, R % 2, K % 2
        key = lambda RK: (abs(RK[0] // 2), abs(RK[1] // 2), abs(RK[0]))  # noqa: E731
        r1, k1, e1, f1 = split(_pick(c1, key))
        r2, k2, e2, f2 = split(_pick(c2, key))
        double = DoubleInts(r1, k1, e1, f1, r2, k2, e2, f2)

    if a.mode == "numerical" and strict and (simple or double):
        raise AmbiguousNumerical(
            "float angles sit on the lattice within tolerance; supply exact angles"
        )
    return ConditionData(simple, double, a.mode)


def _is_int(x: Fraction) -> bool:
    return x.denominator == 1


def nature(a: AngleData, c: ConditionData) -> NatureReport:
    """The class of ``phi1`` in the hierarchy, and the two extra flags."""
    rational_beta = a.rational_beta
    if a.mode == "exact":
        A, A1, A2 = a.alpha_exact, a.alpha1_exact, a.alpha2_exact
        alpha_nonpos_int = A.p == 0 and _is_int(A.c) and A.c <= 0
        alphas_int = A1.p == 0 and _is_int(A1.c) and A2.p == 0 and _is_int(A2.c)
    else:
        near = lambda x: abs(x - round(x)) <= LATTICE_TOL  # noqa: E731
        alpha_nonpos_int = near(a.alpha) and round(a.alpha) <= 0
        alphas_int = near(a.alpha1) and near(a.alpha2)

    if rational_beta:
        if alpha_nonpos_int:
            nat = Nature.RATIONAL
        elif c.any:
            nat = Nature.ALGEBRAIC
        else:
            nat = Nature.D_ALGEBRAIC
        return NatureReport(nat, True, True)

    if not c.any:
        return NatureReport(Nature.D_TRANSCENDENTAL, False, False)
    if alpha_nonpos_int:
        nat = Nature.RATIONAL
    elif alphas_int and c.double is not None:
        nat = Nature.ALGEBRAIC
    elif _dfinite_irrational(a, c):
        nat = Nature.D_FINITE
    else:
        nat = Nature.D_ALGEBRAIC

    recip = None
    if nat >= Nature.ALGEBRAIC:
        recip = True
    elif c.simple is not None:
        r, k = c.simple
        recip = r < 0 or k == 0
    logd = True if nat >= Nature.ALGEBRAIC else None
    return NatureReport(nat, recip, logd)


def _dfinite_irrational(a: AngleData, c: ConditionData) -> bool:
    if c.simple is not None and c.simple[0] >= 1:
        # alpha in -N0 + (pi/beta) Z
        return True
    if c.double is not None:
        d = c.double
        # alpha_i in Z (k_i = eps_i = 0) or in -N + (pi/beta) Z
        ok1 = (d.k1 == 0 and d.eps1 == 0) or (2 * d.r1 + d.e1 - 1 >= 1)
        ok2 = (d.k2 == 0 and d.eps2 == 0) or (-(2 * d.r2 + d.e2) >= 1)
        return ok1 and ok2
    return False


def classify(w: WedgeModel, exact: ExactAngles | None = None, strict: bool = False):
    """``alphas``, ``angle_conditions`` and ``nature`` in one call."""
    a = alphas(w, exact)
    c = angle_conditions(a, strict=strict)
    return a, c, nature(a, c)


def classification_json(a: AngleData, c: ConditionData, n: NatureReport) -> dict:
    simple = None if c.simple is None else {"r": c.simple[0], "k": c.simple[1]}
    double = None
    if c.double is not None:
        d = c.double
        double = {
            "r1": d.r1, "k1": d.k1, "e1": d.e1, "eps1": d.eps1,
            "r2": d.r2, "k2": d.k2, "e2": d.e2, "eps2": d.eps2,
        }
    return {
        "alpha": a.alpha,
        "alpha1": a.alpha1,
        "alpha2": a.alpha2,
        "simple_condition": simple,
        "double_condition": double,
        "nature": n.nature.label,
        "recip_phi1_dfinite": n.recip_phi1_dfinite,
        "logderiv_dfinite": n.logderiv_dfinite,
        "mode": a.mode,
    }
