"""The kernel polynomial and the geometry of its zero set.

The kernel ``gamma(x, y)`` is a quadratic polynomial; its zero set is a conic
with an explicit rational parameterization ``s -> (x(s), y(s))``.  Everything
the closed forms need (branch points, the special parameter values ``s0``,
``s1``, ``s2``, the hyperbola branch ``R`` and the domain it bounds) is
computed here.  Square roots are principal throughout.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from .errors import InternalConsistencyError, PoleOfE, PoleOfG
from .model import QuadrantModel, WedgeModel, normalize_xy, to_wedge

CUT_TOL = 1e-12


class Region(enum.Enum):
    INTERIOR = "interior"
    ON_R = "on_R"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class KernelGeometry:
    x_plus: float
    x_minus: float
    y_plus: float
    y_minus: float
    s0: complex
    s1: complex
    s2: complex
    q: complex
    wedge: WedgeModel

    @property
    def y_at_minus_one(self) -> float:
        """``y(-1)``, the only real point of the hyperbola branch."""
        half = (self.y_plus - self.y_minus) / 2
        return (self.y_plus + self.y_minus) / 2 - half * math.cos(self.wedge.beta)

    @property
    def scale(self) -> float:
        return self.y_plus - self.y_minus


class RootPair(NamedTuple):
    minus: complex
    plus: complex
    on_cut: bool


def _as_quadrant(m: QuadrantModel | WedgeModel) -> QuadrantModel:
    return m.to_quadrant() if isinstance(m, WedgeModel) else m


@lru_cache(maxsize=512)
def _geometry(q: QuadrantModel) -> KernelGeometry:
    w = to_wedge(q)
    s11, s12, s22, m1, m2 = q.sigma11, q.sigma12, q.sigma22, q.mu1, q.mu2
    det, D = q.det_sigma, q.Delta
    yc, yr = (m1 * s12 - m2 * s11) / det, math.sqrt(s11 * D) / det
    xc, xr = (m2 * s12 - m1 * s22) / det, math.sqrt(s22 * D) / det
    b, th, de, ep = w.beta, w.theta, w.delta, w.eps
    return KernelGeometry(
        x_plus=xc + xr,
        x_minus=xc - xr,
        y_plus=yc + yr,
        y_minus=yc - yr,
        s0=-cmath.exp(1j * th),
        s1=-cmath.exp(1j * (2 * b - 2 * ep - th)),
        s2=-cmath.exp(1j * (2 * de - th)),
        q=cmath.exp(2j * b),
        wedge=w,
    )


def special_points(m: QuadrantModel | WedgeModel) -> KernelGeometry:
    """Branch points and the special parameter values of the model."""
    return _geometry(_as_quadrant(m))


def gamma_eval(m, x: complex, y: complex, normal: bool = False) -> tuple[complex, complex, complex]:
    """The kernel and the two reflection polynomials at ``(x, y)``.

    With ``normal=True`` the inputs are normalized variables; they are mapped
    back, and the normal forms are evaluated as a cross-check.
    """
    q = _as_quadrant(m)
    if normal:
        xn, yn = x, y
        det, D = q.det_sigma, q.Delta
        x = xn * math.sqrt(D * q.sigma22) / det
        y = yn * math.sqrt(D * q.sigma11) / det
    g = 0.5 * (q.sigma11 * x * x + 2 * q.sigma12 * x * y + q.sigma22 * y * y) + q.mu1 * x + q.mu2 * y
    g1 = q.r11 * x + q.r21 * y
    g2 = q.r12 * x + q.r22 * y
    if normal:
        _check_normal_forms(q, xn, yn, g, g1, g2)
    return g, g1, g2


def _check_normal_forms(q: QuadrantModel, xn, yn, g, g1, g2) -> None:
    w = special_points(q).wedge
    b, th, de, ep = w.beta, w.theta, w.delta, w.eps
    det, D = q.det_sigma, q.Delta
    sb = math.sin(b)
    terms = [xn * xn, yn * yn, 2 * xn * yn * math.cos(b), 2 * xn * sb * math.sin(b - th), 2 * yn * sb * math.sin(th)]
    ng = D / (2 * sb * sb * det) * (terms[0] + terms[1] - terms[2] - terms[3] - terms[4])
    ng1 = q.r11 * math.sqrt(D * q.sigma22) / det * (xn + yn * math.sin(b - ep) / math.sin(ep))
    ng2 = q.r22 * math.sqrt(D * q.sigma11) / det * (xn * math.sin(b - de) / math.sin(de) + yn)
    size = D / (2 * sb * sb * det) * sum(abs(t) for t in terms)
    size1 = q.r11 * math.sqrt(D * q.sigma22) / det * (abs(xn) + abs(yn * math.sin(b - ep) / math.sin(ep)))
    size2 = q.r22 * math.sqrt(D * q.sigma11) / det * (abs(xn * math.sin(b - de) / math.sin(de)) + abs(yn))
    for a, c, s, name in ((g, ng, size, "gamma"), (g1, ng1, size1, "gamma1"), (g2, ng2, size2, "gamma2")):
        if abs(a - c) > 1e-10 * max(s, 1e-300):
            raise InternalConsistencyError(f"normal form of {name} disagrees: {a} vs {c}")


def _near_cut(z: complex, lo: float, hi: float, scale: float) -> bool:
    """True when ``z`` is within tolerance of ``(-inf, lo] U [hi, inf)``."""
    tol = CUT_TOL * max(1.0, scale)
    if abs(z.imag) > tol:
        return False
    return z.real <= lo + tol or z.real >= hi - tol


def kernel_roots(m, y: complex) -> RootPair:
    """The two roots ``X-(y)``, ``X+(y)`` of ``gamma(., y) = 0``."""
    q = _as_quadrant(m)
    geo = special_points(q)
    y = complex(y)
    s11, s12, s22, m1, m2 = q.sigma11, q.sigma12, q.sigma22, q.mu1, q.mu2
    disc = y * y * (s12 * s12 - s11 * s22) + 2 * y * (m1 * s12 - m2 * s11) + m1 * m1
    root = cmath.sqrt(disc)
    base = -(s12 * y + m1)
    on_cut = _near_cut(y, geo.y_minus, geo.y_plus, geo.scale)
    return RootPair((base - root) / s11, (base + root) / s11, on_cut)


def kernel_roots_y(m, x: complex) -> RootPair:
    """The two roots ``Y-(x)``, ``Y+(x)`` of ``gamma(x, .) = 0``."""
    q = _as_quadrant(m)
    geo = special_points(q)
    x = complex(x)
    s11, s12, s22, m1, m2 = q.sigma11, q.sigma12, q.sigma22, q.mu1, q.mu2
    disc = x * x * (s12 * s12 - s11 * s22) + 2 * x * (m2 * s12 - m1 * s22) + m2 * m2
    root = cmath.sqrt(disc)
    base = -(s12 * x + m2)
    on_cut = _near_cut(x, geo.x_minus, geo.x_plus, geo.x_plus - geo.x_minus)
    return RootPair((base - root) / s22, (base + root) / s22, on_cut)


def uniformize(m, s: complex) -> tuple[complex, complex]:
    """The point ``(x(s), y(s))`` of the kernel curve."""
    geo = special_points(_as_quadrant(m))
    s = complex(s)
    e = cmath.exp(1j * geo.wedge.beta)
    x = (geo.x_plus + geo.x_minus) / 2 + (geo.x_plus - geo.x_minus) / 4 * (s + 1 / s)
    y = (geo.y_plus + geo.y_minus) / 2 + (geo.y_plus - geo.y_minus) / 4 * (s / e + e / s)
    return x, y


def uniformize_normal(m, s: complex) -> tuple[complex, complex]:
    """The same parameterization in normalized variables."""
    w = special_points(_as_quadrant(m)).wedge
    s = complex(s)
    e = cmath.exp(1j * w.beta)
    xn = 0.5 * (2 * math.cos(w.theta) + s + 1 / s)
    yn = 0.5 * (2 * math.cos(w.beta - w.theta) + s / e + e / s)
    return xn, yn


def y_of(m, s: complex) -> complex:
    return uniformize(m, s)[1]


def preimages_y(m, y: complex) -> tuple[complex, complex]:
    """Both solutions ``s`` of ``y(s) = y``; their product is ``q``."""
    geo = special_points(_as_quadrant(m))
    e = cmath.exp(1j * geo.wedge.beta)
    c = (geo.y_plus + geo.y_minus) / 2
    h = (geo.y_plus - geo.y_minus) / 4
    # h/e s^2 + (c - y) s + h e = 0
    a2, a1, a0 = h / e, c - complex(y), h * e
    root = cmath.sqrt(a1 * a1 - 4 * a2 * a0)
    # pick the numerically stable pairing
    if abs(-a1 + root) >= abs(-a1 - root):
        s_big = (-a1 + root) / (2 * a2)
    else:
        s_big = (-a1 - root) / (2 * a2)
    s_other = (a0 / a2) / s_big
    return s_big, s_other


def _arg_mod(z: complex) -> float:
    return cmath.phase(z) % (2 * math.pi)


def region_of(m, y: complex, tol: float = 1e-12) -> Region:
    """Locate ``y`` relative to the hyperbola branch and the domain it bounds.

    ``y = y(s)`` is inside exactly when ``arg s`` lies strictly between
    ``pi`` and ``pi + 2 beta`` (mod ``2 pi``), and on the branch when it equals
    one of the two endpoints.
    """
    geo = special_points(_as_quadrant(m))
    b = geo.wedge.beta
    s, _ = preimages_y(m, y)
    phi = (_arg_mod(s) - math.pi) % (2 * math.pi)
    if phi <= tol or phi >= 2 * math.pi - tol or abs(phi - 2 * b) <= tol:
        return Region.ON_R
    if phi < 2 * b:
        return Region.INTERIOR
    return Region.OUTSIDE


def E_func(m, s: complex) -> complex:
    """The rational function relating ``phi1`` at ``y(qs)`` and ``y(s)``."""
    geo = special_points(_as_quadrant(m))
    s = complex(s)
    s1, s2 = geo.s1, geo.s2
    if abs(s - s2) < 1e-14 or abs(s - 1 / s1) < 1e-14:
        raise PoleOfE(f"E has a pole at s={s}")
    return (s2 / s1) * (s - s1) * (s - 1 / s2) / ((s - s2) * (s - 1 / s1))


def E_from_gammas(m, s: complex) -> complex:
    """``E(s)`` built from the reflection polynomials on the kernel curve."""
    q = _as_quadrant(m)
    s = complex(s)
    x, y = uniformize(q, s)
    xb, yb = uniformize(q, 1 / s)
    _, a1, a2 = gamma_eval(q, x, y)
    _, b1, b2 = gamma_eval(q, xb, yb)
    return (a1 / a2) * (b2 / b1)


def G_ratio(m, y: complex, check: bool = True) -> complex:
    """The gluing function ``G`` on the hyperbola branch."""
    q = _as_quadrant(m)
    geo = special_points(q)
    y = complex(y)
    if check and region_of(q, y, tol=1e-9) is not Region.ON_R:
        raise ValueError(f"y={y} is not on the hyperbola branch")
    yb = y.conjugate()
    xa = kernel_roots(q, y).minus
    xb = kernel_roots(q, yb).minus
    _, a1, a2 = gamma_eval(q, xa, y)
    _, b1, b2 = gamma_eval(q, xb, yb)
    tol = 1e-12 * max(1.0, abs(geo.scale))
    if abs(a2) < tol or abs(b1) < tol:
        raise PoleOfG(f"G is singular at y={y}")
    return (a1 / a2) * (b2 / b1)


def on_R_point(m, t: float) -> complex:
    """The point ``y(-e^t)`` of the hyperbola branch; ``t < 0`` gives ``Im <= 0``."""
    return y_of(m, -math.exp(t))


def normalized(m, x: complex, y: complex) -> tuple[complex, complex]:
    return normalize_xy(_as_quadrant(m), x, y)
