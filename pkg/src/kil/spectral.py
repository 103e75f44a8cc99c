"""The eigenvalue side of the theory: the function D(lambda), its analytic
continuation across the imaginary axis, the critical curve, the critical
coupling and the generalized eigenvalue trajectories.

For Re(lambda) > 0,

    D(lambda) = int (1/(lambda - i w) - 1/(lambda + 1 - i w)) g(w) dw.

The continuation into -a < Re(lambda) < 0 adds the residue term
2 pi g(-i lambda) built from the closed-form complex extension of g; on
the axis the boundary value is taken from the right, which is the
Sokhotski-Plemelj splitting into pi*g(y), a principal value, and the
smooth second kernel.

Numerically all three regimes are handled by one subtracted quadrature:
with lambda = x + i y and u = w - y the first kernel is 1/(x - i u), and

    int f(y+u)/(x - i u) du
      = int (f(y+u) - f(y)/(1+u^2))/(x - i u) du + f(y) * C(x),

where C(x) = int du/((1+u^2)(x - i u)) is known in closed form.  The
subtracted integrand stays bounded as x -> 0, so the evaluation is
uniformly accurate near the axis, where the Newton iterations for the
eigenvalue live.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .distributions import FrequencyDistribution
from .exceptions import (AssumptionViolationError, ConvergenceError,
                         NoPositiveEigenvalueError, OutOfStripError)
from .graphons import SpectrumW

QUAD_TOL = 1e-11


@dataclass(frozen=True)
class EigenProblem:
    """Root-finding instance D(lambda) = 1/(K mu)."""

    dist: FrequencyDistribution
    mu: float
    K: float

    def __post_init__(self):
        if self.mu == 0:
            raise ValueError("mu must be nonzero")


@dataclass
class CriticalCurve:
    """The image of the imaginary axis under the continued D."""

    y_grid: np.ndarray
    values: np.ndarray

    def to_csv(self, path) -> None:
        from .cli import write_csv
        rows = [(y, v.real, v.imag)
                for y, v in zip(self.y_grid, self.values)]
        write_csv(path, "y,re,im", rows)


@dataclass(frozen=True)
class CriticalCoupling:
    k_c: float
    g0: float
    mu_max: float
    d_prime0: float
    lambda_slope: float


def _quad_c(f, a, b, **kw):
    """Complex-valued adaptive quadrature.

    quadpack's convergence warnings are suppressed: the subtracted kernels
    below decay slowly enough on the infinite tails to trip its roundoff
    heuristic while the returned values stay far inside tolerance (the
    selftest suite pins them against closed forms).
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(f, a, b, complex_func=True, epsabs=QUAD_TOL,
                      epsrel=QUAD_TOL, limit=200, **kw)
    return val


def _kernel_constant(x: float) -> complex:
    """C(x) = int du / ((1+u^2)(x - i u)), with the x=0 value taken as the
    boundary limit from the right."""
    if x >= 0:
        return math.pi / (1.0 + x)
    return math.pi / (1.0 + x) - 2.0 * math.pi / (1.0 - x * x)


def _plemelj_integral(f, f_at_y: float, x: float, y: float) -> complex:
    """int f(s) / (lambda - i s) ds for lambda = x + i y, via subtraction."""

    def integrand(u):
        return (f(y + u) - f_at_y / (1.0 + u * u)) / (x - 1j * u)

    val = (_quad_c(integrand, -np.inf, -1.0)
           + _quad_c(integrand, -1.0, 1.0, points=[0.0])
           + _quad_c(integrand, 1.0, np.inf))
    return val + f_at_y * _kernel_constant(x)


def _second_kernel(f, x: float, y: float) -> complex:
    """int f(s) / (lambda + 1 - i s) ds; Re(lambda)+1 stays >= 1-a > 0."""

    def integrand(u):
        return f(y + u) / ((x + 1.0) - 1j * u)

    return (_quad_c(integrand, -np.inf, -1.0)
            + _quad_c(integrand, -1.0, 1.0)
            + _quad_c(integrand, 1.0, np.inf))


def d_lambda(dist: FrequencyDistribution, lam: complex) -> complex:
    """D(lambda) for Re(lambda) > 0."""
    lam = complex(lam)
    if not lam.real > 0:
        raise ValueError("d_lambda requires Re(lambda) > 0; use d_continued")
    x, y = lam.real, lam.imag
    g = dist.density
    return _plemelj_integral(g, g(y), x, y) - _second_kernel(g, x, y)


def d_continued(dist: FrequencyDistribution, lam: complex) -> complex:
    """Analytic continuation of D to the strip Re(lambda) > -a.

    Re > 0: D itself.  Re = 0: the boundary value from the right.
    -a < Re < 0: the same quadrature plus the residue term
    2 pi g(-i lambda) from the complex extension of g.
    """
    lam = complex(lam)
    a = dist.decay_exponent_a
    if lam.real <= -a:
        raise OutOfStripError(
            f"lambda = {lam} outside the continuation strip Re > {-a}")
    x, y = lam.real, lam.imag
    g = dist.density
    base = _plemelj_integral(g, g(y), x, y) - _second_kernel(g, x, y)
    if x < 0:
        base += 2.0 * math.pi * dist.density_complex(-1j * lam)
    return base


def d_prime(dist: FrequencyDistribution, lam: complex) -> complex:
    """Derivative of the continued D, via the g'-weighted kernels:
    D'(lambda) = -i int (1/(lambda - i s) - 1/(lambda + 1 - i s)) g'(s) ds,
    plus the derivative of the residue term below the axis."""
    lam = complex(lam)
    a = dist.decay_exponent_a
    if lam.real <= -a:
        raise OutOfStripError(
            f"lambda = {lam} outside the continuation strip Re > {-a}")
    x, y = lam.real, lam.imag
    gp = dist.density_deriv
    val = -1j * (_plemelj_integral(gp, gp(y), x, y)
                 - _second_kernel(gp, x, y))
    if x < 0:
        val += 2.0 * math.pi * (-1j) * dist.density_complex_deriv(-1j * lam)
    return val


def d_prime0(dist: FrequencyDistribution) -> float:
    """Limit of D'(lambda) as lambda -> 0+:  2 int_0^inf g'(s)/(s(1+s^2)) ds.

    The integrand is extended by continuity at s = 0 with the value g''(0).
    Must be negative for any density passing the standing assumptions.
    """
    gpp0 = dist.density_deriv2(0.0)

    def integrand(s):
        if s < 1e-8:
            return gpp0 / (1.0 + s * s)
        return dist.density_deriv(s) / (s * (1.0 + s * s))

    val, _ = quad(integrand, 0.0, 1.0, epsabs=QUAD_TOL, epsrel=QUAD_TOL,
                  limit=200)
    tail, _ = quad(integrand, 1.0, np.inf, epsabs=QUAD_TOL, epsrel=QUAD_TOL,
                   limit=200)
    out = 2.0 * (val + tail)
    if out >= 0:
        raise AssumptionViolationError(
            f"D'(0) = {out} is not negative; unimodality violated?")
    return out


def principal_value(dist: FrequencyDistribution, y: float) -> float:
    """pv int g(s)/(y - s) ds by the even/odd decomposition
    int_0^inf (g(y-u) - g(y+u))/u du, which removes the pole."""
    g = dist.density
    gp_y = dist.density_deriv(y)

    def integrand(u):
        if u < 1e-8:
            return -2.0 * gp_y
        return (g(y - u) - g(y + u)) / u

    # for large |y| the integrand is a narrow bump at u = |y| that an
    # adaptive rule started at u = 1 never samples; break the domain there
    breaks = [0.0, 1.0]
    if abs(y) > 1.0:
        breaks.append(abs(y))
    total = 0.0
    for lo, hi in zip(breaks, breaks[1:]):
        part, _ = quad(integrand, lo, hi, epsabs=QUAD_TOL, epsrel=QUAD_TOL,
                       limit=200)
        total += part
    tail, _ = quad(integrand, breaks[-1], np.inf, epsabs=QUAD_TOL,
                   epsrel=QUAD_TOL, limit=200)
    return total + tail


def curve_value(dist: FrequencyDistribution, y: float) -> complex:
    """G(y), the boundary value of D on the axis, from the two real
    formulas (independent of the subtracted-quadrature path):
        Re G = pi g(y) - int g(s)/(1+(y-s)^2) ds
        Im G = int (y-s) g(s)/(1+(y-s)^2) ds - pv int g(s)/(y-s) ds.
    """
    re = math.pi * dist.density(y) - dist.integrate_weighted(
        lambda s: 1.0 / (1.0 + (y - s) ** 2))
    im = dist.integrate_weighted(
        lambda s: (y - s) / (1.0 + (y - s) ** 2)) - principal_value(dist, y)
    return complex(re, im)


def critical_curve(dist: FrequencyDistribution,
                   y_grid: np.ndarray) -> CriticalCurve:
    """Evaluate G on a grid symmetric about 0 (must include 0)."""
    y_grid = np.asarray(y_grid, dtype=float)
    if not np.any(y_grid == 0.0):
        raise ValueError("y_grid must include 0")
    if not np.allclose(np.sort(y_grid), np.sort(-y_grid)):
        raise ValueError("y_grid must be symmetric about 0")
    vals = np.array([curve_value(dist, float(y)) for y in y_grid])
    return CriticalCurve(y_grid=y_grid, values=vals)


def critical_coupling(dist: FrequencyDistribution,
                      spec: SpectrumW) -> CriticalCoupling:
    """K_c = 1/(mu_max g0) and the transversal slope of the eigenvalue,
    lambda'(K_c) = -1/(mu_max K_c^2 D'(0)) > 0."""
    if spec.mu_max <= 0:
        raise NoPositiveEigenvalueError("mu_max must be positive")
    g0 = dist.g0()
    dp0 = d_prime0(dist)
    k_c = 1.0 / (spec.mu_max * g0)
    slope = -1.0 / (spec.mu_max * k_c * k_c * dp0)
    return CriticalCoupling(k_c=k_c, g0=g0, mu_max=spec.mu_max,
                            d_prime0=dp0, lambda_slope=slope)


def solve_eigenvalue(problem: EigenProblem, lam_init: complex,
                     tol: float = 1e-10, max_iter: int = 200) -> complex:
    """Damped complex Newton for D(lambda) = 1/(K mu) inside the strip.

    The step is halved while the residual does not decrease.  Raises on
    non-convergence (carrying the last iterate) and when an iterate leaves
    the strip.
    """
    dist = problem.dist
    a = dist.decay_exponent_a
    target = 1.0 / (problem.K * problem.mu)
    lam = complex(lam_init)
    if lam.real <= -a:
        raise OutOfStripError(f"initial guess {lam} outside the strip")
    res = d_continued(dist, lam) - target
    for _ in range(max_iter):
        if abs(res) < tol:
            return lam
        deriv = d_prime(dist, lam)
        step = -res / deriv
        scale = 1.0
        for _ in range(60):
            trial = lam + scale * step
            if trial.real <= -a:
                scale /= 2.0
                continue
            trial_res = d_continued(dist, trial) - target
            if abs(trial_res) < abs(res):
                break
            scale /= 2.0
        else:
            raise ConvergenceError(
                f"Newton stalled at lambda = {lam}, |residual| = {abs(res)}",
                last_iterate=lam)
        lam, res = trial, trial_res
    if abs(res) < tol:
        return lam
    raise ConvergenceError(
        f"no convergence in {max_iter} iterations; last lambda = {lam}, "
        f"|residual| = {abs(res)}", last_iterate=lam)


def eigenvalue_trajectory(dist: FrequencyDistribution, mu: float,
                          k_grid, lam_init: complex = 0.0):
    """lambda(K) along a coupling grid, warm-starting each solve from the
    previous root.  Returns a list of (K, lambda-or-None)."""
    out = []
    lam = complex(lam_init)
    for k in k_grid:
        try:
            lam = solve_eigenvalue(EigenProblem(dist, mu, float(k)), lam)
            out.append((float(k), lam))
        except (ConvergenceError, OutOfStripError):
            out.append((float(k), None))
    return out


# cached contour values of D for the winding-number test, per distribution
_contour_cache: dict = {}


def _curve_decay_height(dist: FrequencyDistribution, threshold: float) -> float:
    """Smallest grid y with |G(y)| below threshold, doubled."""
    width = 10.0 * dist.param
    ys = np.linspace(0.0, 50.0 * dist.param + 5.0, 101)
    for y in ys[1:]:
        if abs(curve_value(dist, float(y))) < threshold:
            return 2.0 * float(y)
    return 2.0 * float(ys[-1]) + width


def _contour_values(dist: FrequencyDistribution, height: float,
                    n_side: int = 160):
    """D along the rectangle Re in {1e-6, 10}, |Im| <= height, sampled
    counterclockwise.  Cached per distribution; the cache is grown when a
    taller rectangle is requested."""
    cached = _contour_cache.get(dist)
    if cached is not None and cached[0] >= height:
        return cached[1]
    x_left, x_right = 1e-6, 10.0
    ys = np.linspace(-height, height, 2 * n_side + 1)
    xs = np.linspace(x_left, x_right, n_side + 1)
    pts = []
    pts.extend(complex(x_right, y) for y in ys)            # right, upward
    pts.extend(complex(x, height) for x in xs[::-1][1:])   # top, leftward
    pts.extend(complex(x_left, y) for y in ys[::-1][1:])   # left, downward
    pts.extend(complex(x, -height) for x in xs[1:])        # bottom, rightward
    pts = np.array(pts)
    vals = np.array([d_continued(dist, lam) for lam in pts])
    _contour_cache[dist] = (height, (pts, vals))
    return pts, vals


def subcritical_check(dist: FrequencyDistribution, spec: SpectrumW,
                      K: float) -> bool:
    """True iff K mu_max D(lambda) - 1 has no zeros with Re(lambda) > 0,
    decided by the winding number along a rectangle enclosing the region
    where |D| is non-negligible."""
    if K < 0:
        raise ValueError("subcritical_check expects K >= 0")
    if K == 0:
        return True
    mu = spec.mu_max
    height = _curve_decay_height(dist, 1.0 / (2.0 * K * mu))
    height = 4.0 * math.ceil(height / 4.0)   # quantize so the cache hits
    _, vals = _contour_values(dist, height)
    f = K * mu * vals - 1.0
    phases = np.angle(f)
    dphi = np.diff(np.concatenate([phases, phases[:1]]))
    dphi = (dphi + math.pi) % (2 * math.pi) - math.pi
    winding = int(round(dphi.sum() / (2 * math.pi)))
    return winding == 0
