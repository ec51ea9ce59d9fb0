"""Independent numerical ground truth.

None of these routines look at the lattice data used by the closed forms:

* :func:`phi1_integral` evaluates the contour-integral representation of
  ``phi1``, valid for every model;
* :func:`simulate` runs an Euler scheme with oblique pushback;
* :func:`numeric_laplace` and :func:`numeric_laplace2d` integrate densities;
* :func:`series_coeffs` extracts Taylor coefficients by a Cauchy integral.
"""

from __future__ import annotations

import cmath
import heapq
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import (
    AtPole, Degenerate, InvalidInput, PushbackDivergence, QuadratureFailure, RadiusTooSmall,
)
from .kernel import G_ratio, Region, region_of, special_points, y_of
from .model import QuadrantModel, boundary_masses, check, to_wedge
from .special_fn import InvariantW

GL_ORDER = 32
POLE_BOUNDARY_TOL = 1e-6
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)


# ---------------------------------------------------------------- contour integral

@dataclass(frozen=True)
class _Contour:
    """Lower half of the hyperbola branch, ``t = y(-e^u)`` for ``u <= 0``.

    ``arg`` is a continuous determination of ``arg(gamma1/gamma2)`` along the
    contour, tabulated on a grid fine enough to unwrap; ``log G = 2i arg``
    because ``|G| = 1`` there.
    """

    model: QuadrantModel
    a: float
    grid: np.ndarray
    arg_grid: np.ndarray

    def points(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        geo = special_points(self.model)
        s = -np.exp(u)
        e = np.exp(1j * geo.wedge.beta)
        xc, xh = (geo.x_plus + geo.x_minus) / 2, (geo.x_plus - geo.x_minus) / 4
        yc, yh = (geo.y_plus + geo.y_minus) / 2, (geo.y_plus - geo.y_minus) / 4
        return xc + xh * (s + 1 / s), yc + yh * (s / e + e / s)

    def raw_arg(self, u: np.ndarray) -> np.ndarray:
        q = self.model
        x, y = self.points(u)
        return np.angle((q.r11 * x + q.r21 * y) / (q.r12 * x + q.r22 * y))

    def arg(self, u: np.ndarray) -> np.ndarray:
        """Continuous argument, zero at ``u = 0``."""
        raw = self.raw_arg(u)
        ref = np.interp(u, self.grid, self.arg_grid)
        return raw + 2 * np.pi * np.round((ref - raw) / (2 * np.pi)) - self.arg_grid[-1]


@lru_cache(maxsize=64)
def _contour(q: QuadrantModel) -> _Contour:
    w = to_wedge(q)
    a = math.pi / w.beta
    span = 80.0 / a
    n = 4001
    while True:
        grid = np.linspace(-span, 0.0, n)
        c = _Contour(q, a, grid, np.zeros(1))
        raw = c.raw_arg(grid)
        steps = np.diff(raw)
        steps = (steps + np.pi) % (2 * np.pi) - np.pi
        if np.max(np.abs(steps)) < 0.5 or n > 500_000:
            break
        n = 2 * n - 1
    cont = np.concatenate([[raw[0]], raw[0] + np.cumsum(steps)])
    # cont differs from raw by multiples of 2 pi; the shift that makes the
    # branch vanish at y(-1) (a multiple of pi) is applied in arg()
    c = _Contour(q, a, grid, cont)
    _self_check(c)
    return c


def _self_check(c: _Contour) -> None:
    """Compare the vectorized ``log G`` against the kernel module at a few nodes."""
    for u in (-2.0 / c.a, -0.5 / c.a, -0.05 / c.a):
        _, y = c.points(np.array([u]))
        G = G_ratio(c.model, complex(y[0]), check=False)
        mine = np.exp(2j * c.arg(np.array([u]))[0])
        if abs(G - mine) > 1e-8:
            raise QuadratureFailure(f"contour log G disagrees with the kernel: {G} vs {mine}")


def _gl_panel(fun, lo: float, hi: float) -> complex:
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    return half * np.dot(_GL_W, fun(mid + half * _GL_X))


def adaptive_gl(fun: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, tol: float,
                initial: int = 16, max_panels: int = 20000) -> tuple[complex, float]:
    """Globally adaptive composite Gauss-Legendre rule of order 32.

    The panel with the largest error estimate (the change on bisection) is
    split until the summed estimate drops below ``tol`` relative to the
    result.  Returns ``(value, error_estimate)``.
    """

    def leaf(a, b):
        m = (a + b) / 2
        whole = _gl_panel(fun, a, b)
        left, right = _gl_panel(fun, a, m), _gl_panel(fun, m, b)
        return (-abs(left + right - whole), a, b, left + right)

    edges = np.linspace(lo, hi, initial + 1)
    heap = [leaf(edges[i], edges[i + 1]) for i in range(initial)]
    heapq.heapify(heap)
    total = sum(h[3] for h in heap)
    err = -sum(h[0] for h in heap)
    for it in range(max_panels):
        if it % 64 == 0:
            # refresh the running sums to shed accumulated rounding
            total = sum(h[3] for h in heap)
            err = -sum(h[0] for h in heap)
        if err <= tol * max(abs(total), 1e-300):
            return sum(h[3] for h in heap), err
        neg, a, b, val = heapq.heappop(heap)
        m = (a + b) / 2
        if m - a < 1e-14 * (hi - lo):
            # nothing left to resolve; keep the panel as it is
            heapq.heappush(heap, (0.0, a, b, val))
            err += neg
            continue
        kids = leaf(a, m), leaf(m, b)
        for k in kids:
            heapq.heappush(heap, k)
        total += kids[0][3] + kids[1][3] - val
        err += neg - kids[0][0] - kids[1][0]
    raise QuadratureFailure(f"adaptive quadrature exceeded {max_panels} panels (error {err:.2e})")


@dataclass(frozen=True)
class IntegralResult:
    value: complex
    error: float
    exponent: complex


def phi1_integral(m: QuadrantModel, y: complex, tol: float = 1e-10, orientation: int = -1,
                  detail: bool = False):
    """``phi1(y)`` for ``y`` inside the domain, from the contour integral.

    ``c ((w(0)-w(p))/(w(y)-w(p)))^k exp(I(y))`` with ``c = phi1(0)`` and
    ``I`` the Cauchy-type integral of ``log G`` along the lower half of R.
    The direction of travel is ``orientation`` in the parameter ``u``;
    the default runs from ``y(-1)`` out to infinity.
    """
    check(m)
    y = complex(y)
    geo = special_points(m)
    w = geo.wedge
    sign_val = 2 * w.beta - 2 * w.eps - w.theta
    if abs(sign_val) < POLE_BOUNDARY_TOL:
        raise Degenerate(
            "2 beta - 2 eps - theta is within 1e-6 of 0; the pole indicator is ambiguous",
            ("pole_on_R",),
        )
    if region_of(m, y) is not Region.INTERIOR:
        raise InvalidInput(f"y={y} is not inside the domain bounded by R")
    W = InvariantW.of(m)
    w0 = W(0.0)
    wy = W(y)
    pole = None
    if sign_val > 0:
        pole = y_of(m, geo.s1).real
        if abs(y - pole) <= 1e-10 * max(1.0, abs(pole)):
            raise AtPole(f"y={y} is the pole of phi1")
    c = _contour(m)
    a = c.a
    dw = wy - w0

    def fun(u):
        ch, sh = np.cosh(a * u), np.sinh(a * u)
        # d w(t) = -a sinh(a u) du and w(t) = -cosh(a u) on the contour
        bracket = 1.0 / (-ch - wy) - 1.0 / (-ch - w0)
        return c.arg(u) * (-a * sh) * bracket / np.pi

    span = (36.0 + math.log(1.0 + abs(dw))) / a
    lo = -span
    # the integrand peaks where cosh(a u) = -Re w(y); split the range there
    breaks = [lo, 0.0]
    if wy.real < -1:
        ustar = -math.acosh(-wy.real) / a
        if lo < ustar < 0:
            breaks = [lo, ustar, 0.0]
    total, err = 0j, 0.0
    for left, right in zip(breaks[:-1], breaks[1:]):
        v, e_ = adaptive_gl(fun, left, right, tol)
        total += v
        err += e_
    expo = orientation * total
    value = boundary_masses(m)[0] * np.exp(expo)
    if pole is not None:
        wp = W(complex(pole))
        value *= (w0 - wp) / (wy - wp)
    if err > 1e-7 * max(abs(total), 1.0):
        raise QuadratureFailure(f"quadrature error estimate {err:.2e} above tolerance")
    if detail:
        return IntegralResult(complex(value), err, complex(expo))
    return complex(value)


# ---------------------------------------------------------------- Monte Carlo

@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    horizon: float = 1e4
    burn_in_fraction: float = 0.05
    seed: int = 12345
    n_paths: int = 8
    hist_bins: int = 20
    hist_max: tuple[float, float] | None = None
    n_batches: int = 20

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidInput("dt must be positive")
        if not 0 <= self.burn_in_fraction < 1:
            raise InvalidInput("burn_in_fraction must lie in [0, 1)")
        if self.horizon <= self.dt:
            raise InvalidInput("horizon must exceed dt")
        if self.n_paths < 1:
            raise InvalidInput("n_paths must be positive")


@dataclass
class SampleStats:
    """Time averages after burn-in, pooled over paths.

    ``moments[i*4 + k-1]`` is the mean of ``Z_{i+1}^k``; ``stderr`` holds
    batch-means standard errors of the same quantities.  Histogram and strip
    data are kept as integer counts so pooling is exact.
    """

    moments: np.ndarray
    stderr: np.ndarray
    hist_counts: np.ndarray
    edges1: np.ndarray
    edges2: np.ndarray
    strip_counts: np.ndarray
    strip_width: float
    n_samples: int
    batch_means: np.ndarray = field(repr=False)

    @property
    def hist(self) -> np.ndarray:
        """Fraction of time spent in each cell."""
        return self.hist_counts / self.n_samples

    @property
    def strip(self) -> np.ndarray:
        """Fraction of time within ``strip_width`` of each face."""
        return self.strip_counts / self.n_samples

    def mean(self, axis: int) -> tuple[float, float]:
        """``(E Z_axis, standard error)`` for ``axis`` in ``(1, 2)``."""
        k = 4 * (axis - 1)
        return float(self.moments[k]), float(self.stderr[k])

    def histogram_rows(self) -> list[tuple[float, float, float, float, float]]:
        h = self.hist
        return [
            (float(self.edges1[i]), float(self.edges1[i + 1]), float(self.edges2[j]), float(self.edges2[j + 1]),
             float(h[i, j]))
            for i in range(len(self.edges1) - 1)
            for j in range(len(self.edges2) - 1)
        ]

    @classmethod
    def from_batches(cls, bm, hist_counts, edges1, edges2, strip_counts, strip_width, n) -> SampleStats:
        bm = bm[np.lexsort(bm.T[::-1])]
        moments = bm.mean(axis=0)
        stderr = bm.std(axis=0, ddof=1) / math.sqrt(bm.shape[0])
        return cls(moments, stderr, hist_counts, edges1, edges2, strip_counts, strip_width, n, bm)

    @staticmethod
    def merge(parts: list[SampleStats]) -> SampleStats:
        """Pool independent runs.

        Batch means are kept in a canonical order and counts are integers, so
        the result does not depend on how the runs are grouped or ordered.
        """
        p0 = parts[0]
        for p in parts[1:]:
            if not (np.array_equal(p.edges1, p0.edges1) and np.array_equal(p.edges2, p0.edges2)):
                raise InvalidInput("cannot merge statistics with different histogram grids")
        return SampleStats.from_batches(
            np.concatenate([p.batch_means for p in parts], axis=0),
            sum(p.hist_counts for p in parts), p0.edges1, p0.edges2,
            sum(p.strip_counts for p in parts), p0.strip_width, sum(p.n_samples for p in parts),
        )


def _sqrt_sigma(q: QuadrantModel) -> np.ndarray:
    """Symmetric positive-definite square root of the covariance."""
    S = np.array([[q.sigma11, q.sigma12], [q.sigma12, q.sigma22]])
    vals, vecs = np.linalg.eigh(S)
    return vecs @ np.diag(np.sqrt(vals)) @ vecs.T


BLOCK = 1 << 16


def simulate(q: QuadrantModel, cfg: SimConfig, backend: str | None = None) -> SampleStats:
    """Euler scheme with oblique pushback, statistics after burn-in.

    Each path starts at the origin and draws its Gaussian increments from its
    own stream spawned from ``cfg.seed``, so results are reproducible and do
    not depend on the backend.
    """
    check(q)
    from . import get_simcore

    core = get_simcore(backend)
    steps = int(round(cfg.horizon / cfg.dt))
    burn = int(steps * cfg.burn_in_fraction)
    if steps - burn < 2 * cfg.n_batches:
        raise InvalidInput("horizon too short for the requested number of batches")
    F = np.ascontiguousarray(_sqrt_sigma(q))
    mu = np.array([q.mu1, q.mu2])
    R = np.array([[q.r11, q.r12], [q.r21, q.r22]])
    hist_max = cfg.hist_max or _default_hist_range(q)
    strip_width = 2 * math.sqrt(cfg.dt)
    parts = []
    for ss in np.random.SeedSequence(cfg.seed).spawn(cfg.n_paths):
        rng = np.random.Generator(np.random.PCG64(ss))
        acc = _Accumulator(steps - burn, cfg, hist_max, strip_width)
        z = np.zeros(2)
        done = 0
        while done < steps:
            n = min(BLOCK, steps - done)
            normals = rng.standard_normal((n, 2))
            out = np.empty((n, 2))
            if core.euler_block(z, normals, cfg.dt, F, mu, R, out) < 0:
                raise PushbackDivergence(f"pushback did not settle after 100 passes near z={z.tolist()}")
            lo = max(burn - done, 0)
            if lo < n:
                acc.add(out[lo:], done + lo - burn)
            done += n
        parts.append(acc.stats())
    return SampleStats.merge(parts)


def _default_hist_range(q: QuadrantModel) -> tuple[float, float]:
    # eight stationary "length scales" along each axis
    return (8 * q.sigma11 / (2 * abs(q.mu1)), 8 * q.sigma22 / (2 * abs(q.mu2)))


class _Accumulator:
    """Running per-batch power sums, a 2-D histogram and boundary-strip counts."""

    def __init__(self, total: int, cfg: SimConfig, hist_max, strip_width: float):
        self.total = total
        self.nb = cfg.n_batches
        self.sums = np.zeros((cfg.n_batches, 8))
        self.counts = np.zeros(cfg.n_batches)
        self.edges1 = np.linspace(0.0, hist_max[0], cfg.hist_bins + 1)
        self.edges2 = np.linspace(0.0, hist_max[1], cfg.hist_bins + 1)
        self.hist = np.zeros((cfg.hist_bins, cfg.hist_bins))
        self.strip = np.zeros(2)
        self.strip_width = strip_width

    def add(self, z: np.ndarray, offset: int) -> None:
        idx = (np.arange(offset, offset + len(z)) * self.nb) // self.total
        self.counts += np.bincount(idx, minlength=self.nb)
        p1, p2 = z[:, 0].copy(), z[:, 1].copy()
        for k in range(4):
            self.sums[:, k] += np.bincount(idx, weights=p1, minlength=self.nb)
            self.sums[:, 4 + k] += np.bincount(idx, weights=p2, minlength=self.nb)
            p1 *= z[:, 0]
            p2 *= z[:, 1]
        h, _, _ = np.histogram2d(z[:, 0], z[:, 1], bins=(self.edges1, self.edges2))
        self.hist += h
        self.strip += (z < self.strip_width).sum(axis=0)

    def stats(self) -> SampleStats:
        return SampleStats.from_batches(self.sums / self.counts[:, None], self.hist, self.edges1, self.edges2,
                                        self.strip, self.strip_width, int(self.counts.sum()))


# ---------------------------------------------------------------- Laplace transforms

def numeric_laplace(d, y: complex, tol: float = 1e-10) -> complex:
    """``int_0^inf exp(y z) p(z) dz`` for a one-dimensional density.

    The half-line is covered by doubling intervals until a piece no longer
    contributes; this avoids evaluating ``exp(y z)`` at the huge abscissae
    an infinite-range rule would sample when ``Re y > 0``.
    """
    y = complex(y)

    def piece(a, b):
        out, err = 0j, 0.0
        for part in (0, 1):
            if part == 1 and y.imag == 0:
                continue
            fn = (lambda z: (cmath.exp(y * z) * d.pdf(z)).real) if part == 0 else \
                (lambda z: (cmath.exp(y * z) * d.pdf(z)).imag)
            v, e = integrate.quad(fn, a, b, epsabs=0, epsrel=tol, limit=200)
            out += v if part == 0 else 1j * v
            err += e
        return out, err

    total, err = piece(0.0, 1.0)
    a, width = 1.0, 1.0
    while True:
        if y.real * (a + width) > 700:
            raise QuadratureFailure("the transform integrand has not decayed before exp(y z) overflows")
        v, e = piece(a, a + width)
        total += v
        err += e
        a += width
        width *= 2
        if abs(v) <= 1e-15 * abs(total):
            break
    if err > 1e-6 * max(abs(total), 1e-300):
        raise QuadratureFailure(f"1-D Laplace transform error {err:.2e}")
    return total


def numeric_laplace2d(d, x: complex, y: complex, tol: float = 1e-8) -> complex:
    """``iint exp(x z1 + y z2) p(z1, z2)`` for the joint density.

    The integral runs in polar coordinates of the normalized wedge: with
    ``z = rho e^{i a}``, ``rho = t^2`` removes the ``1/sqrt`` singularity at
    the corner.
    """
    x, y = complex(x), complex(y)
    if x.real > 0 or y.real > 0:
        raise InvalidInput("numeric_laplace2d needs Re x <= 0 and Re y <= 0")
    b = d.beta
    sb = math.sin(b)
    c1, c2 = d.scale1, d.scale2

    def inner(a, part):
        # z1 = rho sin(b - a)/sin b, z2 = rho sin(a)/sin b in normalized units
        u1 = math.sin(b - a) / sb * c1
        u2 = math.sin(a) / sb * c2
        lin = x * u1 + y * u2

        def g(t):
            rho = t * t
            val = d.normal_pdf(rho * math.sin(b - a) / sb, rho * math.sin(a) / sb)
            z = np.exp(lin * rho) * val * rho * 2 * t
            return z.real if part == 0 else z.imag

        v, _ = integrate.quad(g, 0, np.inf, epsabs=0, epsrel=tol, limit=400)
        return v

    jac = c1 * c2 / sb
    out = []
    for part in (0, 1):
        if part == 1 and x.imag == 0 and y.imag == 0:
            out.append(0.0)
            continue
        v, err = integrate.quad(lambda a: inner(a, part), 0, b, epsabs=0, epsrel=tol, limit=200)
        out.append(v * jac)
    return complex(out[0], out[1])


def density_mass2d(d, tol: float = 1e-8) -> float:
    return numeric_laplace2d(d, 0.0, 0.0, tol).real


# ---------------------------------------------------------------- series

def series_coeffs(f, n: int, radius: float | None = None, nodes: int = 1024) -> list[float]:
    """Taylor coefficients at 0 up to order ``n`` from a Cauchy integral.

    ``f`` is a :class:`~srbm_wedge.closed_form.LaplaceForm` or a callable.
    The default radius is three quarters of the distance to the nearest
    known singularity (the branch point ``y+``, the pole, and the poles of
    the rational part).  A second, smaller circle guards against an
    unexpected singularity inside.
    """
    from .closed_form import LaplaceForm, eval_phi1

    if isinstance(f, LaplaceForm):
        geo = special_points(f.model)
        sing = [abs(geo.y_plus)]
        if f.pole is not None:
            sing.append(abs(f.pole))
        sing += [abs(r) for r, _ in f.polyP]
        fun = lambda y: eval_phi1(f, y)  # noqa: E731
    else:
        fun = f
        sing = []
    if radius is None:
        if not sing:
            raise RadiusTooSmall("no radius given and no singularities known")
        radius = 0.75 * min(sing)
    if radius <= 1e-12:
        raise RadiusTooSmall(f"radius {radius} too small")

    def coeffs(rad):
        th = 2 * np.pi * np.arange(nodes) / nodes
        vals = np.array([complex(fun(rad * np.exp(1j * t))) for t in th])
        c = np.fft.fft(vals) / nodes
        return [c[k] / rad**k for k in range(n + 1)]

    main = coeffs(radius)
    guard = coeffs(radius * 0.6)
    for k in range(min(n, 6) + 1):
        if abs(main[k] - guard[k]) > 1e-7 * max(abs(main[k]), abs(main[0]) / radius**k):
            raise RadiusTooSmall("Cauchy coefficients depend on the radius; a singularity lies inside")
    return [complex(c).real for c in main]


__all__ = [
    "IntegralResult", "SampleStats", "SimConfig", "adaptive_gl", "density_mass2d",
    "numeric_laplace", "numeric_laplace2d", "phi1_integral", "series_coeffs", "simulate",
]
