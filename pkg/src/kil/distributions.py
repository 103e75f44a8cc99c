"""Intrinsic-frequency densities and their scalar functionals.

Two families are supported, Gaussian and Cauchy.  Both are even, unimodal
and real analytic, and both admit closed forms for the density, its
derivatives, its characteristic function and its complex extension, which
downstream code relies on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .exceptions import AssumptionViolationError

GAUSSIAN = "gaussian"
CAUCHY = "cauchy"

# absolute tolerance for all density-weighted quadratures
QUAD_TOL = 1e-12


@dataclass(frozen=True)
class FrequencyDistribution:
    """Even unimodal frequency density g with exponential Fourier decay.

    ``param`` is the scale: the standard deviation sigma for the Gaussian
    family, the half-width delta for the Cauchy family.
    ``decay_exponent_a`` is the width of the strip into which the spectral
    functions are continued; it must satisfy |g_hat(eta)| e^(a eta) -> 0,
    which for the Cauchy family forces a < delta.
    """

    kind: str
    param: float
    decay_exponent_a: float = field(default=None)
    tail_cutoff: float = field(default=None)

    def __post_init__(self):
        if self.kind not in (GAUSSIAN, CAUCHY):
            raise ValueError(f"unknown distribution kind: {self.kind!r}")
        if not self.param > 0:
            raise ValueError("scale parameter must be positive")
        if self.decay_exponent_a is None:
            if self.kind == GAUSSIAN:
                a = 0.9
            else:
                a = min(0.9, self.param / 2.0)
            object.__setattr__(self, "decay_exponent_a", a)
        a = self.decay_exponent_a
        if not 0.0 < a < 1.0:
            raise ValueError("decay exponent must lie in (0, 1)")
        if self.tail_cutoff is None:
            if self.kind == GAUSSIAN:
                omega = 12.0 * self.param
            else:
                # mass outside [-Omega, Omega] is 2/pi * arctan(delta/Omega)
                omega = min(self.param * math.tan(math.pi * (1 - 1e-12) / 2),
                            1e12)
            object.__setattr__(self, "tail_cutoff", omega)

    # -- pointwise evaluations -------------------------------------------

    def density(self, omega):
        """g(omega); accepts scalars or arrays."""
        w = np.asarray(omega, dtype=float)
        p = self.param
        if self.kind == GAUSSIAN:
            out = np.exp(-w * w / (2 * p * p)) / (p * math.sqrt(2 * math.pi))
        else:
            out = p / (math.pi * (w * w + p * p))
        return out if out.ndim else float(out)

    def density_deriv(self, omega):
        """g'(omega), closed form."""
        w = np.asarray(omega, dtype=float)
        p = self.param
        if self.kind == GAUSSIAN:
            out = -w / (p * p) * np.exp(-w * w / (2 * p * p)) \
                / (p * math.sqrt(2 * math.pi))
        else:
            out = -2 * p * w / (math.pi * (w * w + p * p) ** 2)
        return out if out.ndim else float(out)

    def density_deriv2(self, omega):
        """g''(omega), closed form."""
        w = np.asarray(omega, dtype=float)
        p = self.param
        if self.kind == GAUSSIAN:
            out = (w * w / p ** 4 - 1.0 / p ** 2) \
                * np.exp(-w * w / (2 * p * p)) / (p * math.sqrt(2 * math.pi))
        else:
            out = 2 * p * (3 * w * w - p * p) / (math.pi * (w * w + p * p) ** 3)
        return out if out.ndim else float(out)

    def density_deriv4_at_zero(self) -> float:
        """g''''(0); used for the Taylor extension of g'(w)/w near 0."""
        p = self.param
        if self.kind == GAUSSIAN:
            return 3.0 * self.density(0.0) / p ** 4
        return 24.0 / (math.pi * p ** 5)

    def density_complex(self, z: complex) -> complex:
        """Analytic extension of g to complex argument.

        The Cauchy extension has poles at z = +-i*delta; callers stay inside
        |Im z| < delta, which the choice a < delta guarantees.
        """
        p = self.param
        z = complex(z)
        if self.kind == GAUSSIAN:
            return np.exp(-z * z / (2 * p * p)) / (p * math.sqrt(2 * math.pi))
        return p / (math.pi * (z * z + p * p))

    def density_complex_deriv(self, z: complex) -> complex:
        """d/dz of the analytic extension."""
        p = self.param
        z = complex(z)
        if self.kind == GAUSSIAN:
            return -z / (p * p) * self.density_complex(z)
        return -2 * p * z / (math.pi * (z * z + p * p) ** 2)

    def fourier_hat(self, eta):
        """Characteristic function g_hat(eta) = int e^(i eta w) g(w) dw."""
        e = np.asarray(eta, dtype=float)
        p = self.param
        if self.kind == GAUSSIAN:
            out = np.exp(-p * p * e * e / 2)
        else:
            out = np.exp(-p * np.abs(e))
        return out if out.ndim else float(out)

    # -- quadrature helpers ----------------------------------------------

    def integrate_weighted(self, h, tol: float = QUAD_TOL) -> float:
        """int h(w) g(w) dw over the real line.

        The Cauchy family is integrated through the substitution
        w = delta*tan(u), which maps the heavy tails to a finite interval;
        the Gaussian over [-Omega, Omega] with Omega the tail cutoff.
        """
        if self.kind == CAUCHY:
            d = self.param

            def f(u):
                return h(d * math.tan(u)) / math.pi

            val, _ = quad(f, -math.pi / 2, math.pi / 2,
                          epsabs=tol, epsrel=tol, limit=200)
            return val
        om = self.tail_cutoff

        def f(w):
            return h(w) * self.density(w)

        val, _ = quad(f, -om, om, epsabs=tol, epsrel=tol, limit=200)
        return val

    def normalization(self) -> float:
        """Quadrature of g over [-Omega, Omega]; should be 1 to 1e-10."""
        return self.integrate_weighted(lambda w: 1.0)

    # -- scalar functionals ----------------------------------------------

    def g0(self) -> float:
        """The positive constant pi*g(0) - int g(s)/(1+s^2) ds.

        Computed by both equivalent formulas; they must agree to 1e-9 and
        the result must be positive, otherwise the evenness/unimodality
        hypotheses are considered violated.
        """
        direct = math.pi * self.density(0.0) \
            - self.integrate_weighted(lambda s: 1.0 / (1.0 + s * s))
        g_at_0 = self.density(0.0)

        def diff(s):
            return (g_at_0 - self.density(s)) / (1.0 + s * s)

        alt, _ = quad(diff, -np.inf, np.inf, epsabs=QUAD_TOL,
                      epsrel=QUAD_TOL, limit=200)
        if abs(direct - alt) > 1e-9:
            raise AssumptionViolationError(
                f"the two g0 formulas disagree: {direct} vs {alt}")
        if direct <= 0:
            raise AssumptionViolationError(f"g0 = {direct} is not positive")
        return direct

    # -- sampling ---------------------------------------------------------

    def sample(self, n: int, seed) -> np.ndarray:
        """n i.i.d. draws; deterministic for a fixed seed.

        Gaussian: standard normal transform.  Cauchy: inverse CDF.
        """
        if n < 1:
            raise ValueError("need at least one sample")
        rng = np.random.default_rng(seed)
        if self.kind == GAUSSIAN:
            return rng.standard_normal(n) * self.param
        u = rng.random(n)
        return self.param * np.tan(math.pi * (u - 0.5))

    # -- diagnostics -------------------------------------------------------

    def check_assumptions(self, n_grid: int = 200) -> dict:
        """Report-style verification of evenness, unimodality, normalization
        and the Fourier decay bound for the stored exponent."""
        p = self.param
        w = np.linspace(0.0, 10 * p, n_grid)[1:]
        even_ok = bool(np.allclose(self.density(w), self.density(-w),
                                   rtol=0, atol=1e-14))
        unimodal_ok = bool(np.all(self.density_deriv(w) <= 1e-14))
        norm = self.normalization()
        normalized_ok = bool(abs(norm - 1.0) < 1e-10)
        eta = np.linspace(0.0, 400.0, 801)
        decay = np.abs(self.fourier_hat(eta)) * np.exp(
            self.decay_exponent_a * eta)
        tail = decay[len(decay) // 2:]
        decay_ok = bool(tail[-1] < 1e-6 and np.all(np.diff(tail) <= 1e-12))
        return {
            "even": even_ok,
            "unimodal": unimodal_ok,
            "normalized": normalized_ok,
            "fourier_decay": decay_ok,
            "all": even_ok and unimodal_ok and normalized_ok and decay_ok,
        }


def gaussian(sigma: float, a: float = None) -> FrequencyDistribution:
    return FrequencyDistribution(GAUSSIAN, sigma, decay_exponent_a=a)


def cauchy(delta: float, a: float = None) -> FrequencyDistribution:
    return FrequencyDistribution(CAUCHY, delta, decay_exponent_a=a)


def from_spec(spec: dict) -> FrequencyDistribution:
    """Build a distribution from the config-file form
    {"kind": "gaussian"|"cauchy", "param": <real>}."""
    kind = spec["kind"]
    if kind == GAUSSIAN:
        return gaussian(spec["param"])
    if kind == CAUCHY:
        return cauchy(spec["param"])
    raise ValueError(f"unknown distribution kind: {kind!r}")
