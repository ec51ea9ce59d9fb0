"""Generalized Chebyshev function and the canonical invariant ``w``.

``T_a(x) = cos(a arccos x)`` extends analytically to the plane slit along
``(-inf, -1]``.  The trigonometric form is continuous across ``[1, inf)``
because cosine is even, so it is used everywhere off the slit; the
algebraic form and the hypergeometric series at ``x = 1`` are kept as
independent evaluation paths for cross-checks and for derivatives near the
branch point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import NoConvergence, OnCut
from .kernel import Region, region_of, special_points, y_of

CUT_TOL = 1e-12
_SERIES_RADIUS = 0.25


def _check_cut(x: complex) -> None:
    if abs(x.imag) <= CUT_TOL and x.real <= -1.0 + CUT_TOL:
        raise OnCut(f"x={x} lies on the cut (-inf, -1]")


def cheb_T(a: float, x: complex) -> complex:
    x = complex(x)
    _check_cut(x)
    return cmath.cos(a * cmath.acos(x))


def cheb_T_alg(a: float, x: complex) -> complex:
    """Algebraic form with principal roots and powers."""
    x = complex(x)
    _check_cut(x)
    r = cmath.sqrt(x * x - 1)
    out = 0j
    for u in (x + r, x - r):
        if u != 0:
            out += cmath.exp(a * cmath.log(u))
    return out / 2


def _series_coeffs(a: float, count: int) -> list[float]:
    # hypergeometric series in (x - 1)
    b = [1.0]
    for n in range(count - 1):
        b.append(b[-1] * (n - a) * (n + a) / ((n + 0.5) * (n + 1)) * -0.5)
    return b


def cheb_T_series(a: float, x: complex, order: int = 0, terms: int = 80) -> complex:
    """The ``order``-th derivative of ``T_a`` from its power series at 1.

    Converges for ``|x - 1| < 2``; only used close to ``x = 1``.
    """
    h = complex(x) - 1
    b = _series_coeffs(a, terms + order)
    total = 0j
    power = 1 + 0j
    for n in range(order, terms + order):
        fall = math.prod(range(n - order + 1, n + 1))
        total += b[n] * fall * power
        power *= h
    return total


def cheb_T_derivs(a: float, x: complex) -> tuple[complex, complex, complex, complex]:
    """``T_a`` and its first three derivatives at ``x``."""
    x = complex(x)
    _check_cut(x)
    if abs(x - 1) < _SERIES_RADIUS:
        return tuple(cheb_T_series(a, x, k) for k in range(4))
    phi = cmath.acos(x)
    t0 = cmath.cos(a * phi)
    t1 = a * cmath.sin(a * phi) / cmath.sin(phi)
    one = 1 - x * x
    t2 = (x * t1 - a * a * t0) / one
    t3 = (3 * x * t2 + (1 - a * a) * t1) / one
    return t0, t1, t2, t3


def sqrt_one_plus_T(a: float, x: complex) -> complex:
    """``sqrt(1 + T_a(x))`` as the single-valued ``sqrt(2) T_{a/2}(x)``."""
    return math.sqrt(2) * cheb_T(a / 2, x)


def sqrt_one_minus_T_over(a: float, x: complex) -> complex:
    """``(1/a) sqrt((1 - T_a(x)) / (1 - x))``, analytic off the cut, 1 at x = 1."""
    x = complex(x)
    _check_cut(x)
    half = cmath.acos(x) / 2
    if abs(half) < 1e-6:
        return 1 - (a * a - 1) * half * half / 6
    return cmath.sin(a * half) / (a * cmath.sin(half))


def hyp2f1_sqrt_minus(a: float, x: complex, terms: int = 200) -> complex:
    """Hypergeometric series for :func:`sqrt_one_minus_T_over` (``|1 - x| < 2``)."""
    z = (1 - complex(x)) / 2
    p, q = (1 - a) / 2, (1 + a) / 2
    term, total = 1 + 0j, 1 + 0j
    for n in range(terms):
        term *= (p + n) * (q + n) / ((1.5 + n) * (n + 1)) * z
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return total


def angle_offset(x: complex, beta: float) -> complex:
    """``arccos(x) - beta`` without cancellation near ``x = cos(beta)``."""
    x = complex(x)
    cb, sb = math.cos(beta), math.sin(beta)
    d = x - cb
    if abs(d) > 0.25:
        return cmath.acos(x) - beta
    s = -cb * d * (2 * cb + d) / (cmath.sqrt(1 - x * x) + sb) - d * sb
    return cmath.asin(s)


@dataclass(frozen=True)
class InvariantW:
    """The canonical invariant of a model, ``w(y) = T_{pi/beta}(arg(y))``."""

    a: float
    y_plus: float
    y_minus: float
    beta: float

    @classmethod
    def of(cls, m) -> InvariantW:
        geo = special_points(m)
        return cls(math.pi / geo.wedge.beta, geo.y_plus, geo.y_minus, geo.wedge.beta)

    @property
    def slope(self) -> float:
        """``d arg / d y``."""
        return -2.0 / (self.y_plus - self.y_minus)

    def arg(self, y: complex) -> complex:
        return -(2 * complex(y) - (self.y_plus + self.y_minus)) / (self.y_plus - self.y_minus)

    def __call__(self, y: complex) -> complex:
        x = self.arg(y)
        if abs(x.imag) <= CUT_TOL * max(1.0, abs(x)) and x.real <= -1.0 + CUT_TOL:
            raise OnCut(f"y={y} lies on the cut [y+, inf)")
        return cheb_T(self.a, x)

    def derivs(self, y: complex) -> tuple[complex, complex, complex, complex]:
        """``w`` and its first three derivatives in ``y``."""
        t = cheb_T_derivs(self.a, self.arg(y))
        k = self.slope
        return t[0], t[1] * k, t[2] * k * k, t[3] * k**3


def w_eval(m, y: complex) -> complex:
    return InvariantW.of(m)(y)


def w_of_s(m, s: complex) -> complex:
    """``w(y(s))`` from the parameter, with the log cut on ``e^{i beta} R_-``."""
    b = special_points(m).wedge.beta
    a = math.pi / b
    s = complex(s)
    # log(-s) with its cut rotated onto e^{i beta} R_-
    lg = cmath.log(-s * cmath.exp(-1j * b)) + 1j * b
    return -0.5 * (cmath.exp(a * lg) + cmath.exp(-a * lg))


def w_on_R(m, s: float) -> float:
    """The real value of ``w`` at ``y(s)`` for ``s < 0``."""
    a = math.pi / special_points(m).wedge.beta
    return -math.cosh(a * math.log(-s))


def w_inverse(m, z: complex, tol: float = 1e-13, max_iter: int = 50) -> complex:
    """The preimage of ``z`` under ``w`` in the closed domain bounded by R.

    An explicit seed comes from solving ``z = (V + 1/V)/2`` in the parameter
    plane; Newton's method then removes the rounding left by the powers.
    """
    z = complex(z)
    if abs(z.imag) <= CUT_TOL and z.real < -1.0 - CUT_TOL:
        raise OnCut(f"z={z} lies on (-inf, -1)")
    W = InvariantW.of(m)
    if abs(z + 1) <= 1e-14:
        return complex(special_points(m).y_at_minus_one)
    if abs(z - 1) <= 1e-14:
        return complex(W.y_minus)
    v = z + cmath.sqrt(z - 1) * cmath.sqrt(z + 1)
    t = cmath.exp(cmath.log(v) / W.a)
    s = -t * cmath.exp(1j * W.beta)
    y = y_of(m, s)
    scale = max(1.0, abs(z))
    for _ in range(max_iter):
        val, d1, _, _ = W.derivs(y)
        err = val - z
        if abs(err) <= tol * scale:
            break
        if d1 == 0:
            raise NoConvergence(f"w'(y) vanished at y={y}")
        y = y - err / d1
    else:
        raise NoConvergence(f"Newton did not converge for z={z}")
    if region_of(m, y, tol=1e-9) is Region.OUTSIDE:
        raise NoConvergence(f"w_inverse({z}) left the domain: y={y}")
    return y
