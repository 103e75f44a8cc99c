"""Pitchfork normal-form constants and the predicted bifurcating branch.

The reduced dynamics of the order parameter near the critical coupling is

    dh/dt = rho1/(K_c^2 mu_max) * h * (eps^2 - K_c^4 mu_max rho2 rho3 |h|^2),

with eps^2 = K - K_c, so the stable branch has amplitude

    |h| = K_c^(-2) (mu_max rho2 rho3)^(-1/2) sqrt(K - K_c).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp

from .distributions import FrequencyDistribution
from .exceptions import AssumptionViolationError, UnsupportedEigenfunctionError
from .graphons import SpectrumW
from .spectral import critical_coupling, d_prime0

QUAD_TOL = 1e-11


def _cubic_rational(w):
    """The fixed rational weight appearing in the cubic coefficient."""
    w2 = w * w
    return (4 * w2 ** 3 + 13 * w2 ** 2 + 25 * w2 + 10) \
        / ((1 + w2) ** 3 * (1 + 4 * w2))


def rho1(dist: FrequencyDistribution) -> float:
    """-1/D'(0) > 0."""
    return -1.0 / d_prime0(dist)


def _int_gprime_over_w(dist: FrequencyDistribution) -> float:
    """int_0^inf g'(w)/w dw with the removable singularity at 0 handled by
    the Taylor value g''(0) + g''''(0) w^2 / 6 below w = 1e-3."""
    gpp0 = dist.density_deriv2(0.0)
    g4 = dist.density_deriv4_at_zero()

    def integrand(w):
        if w < 1e-3:
            return gpp0 + g4 * w * w / 6.0
        return dist.density_deriv(w) / w

    head, _ = quad(integrand, 0.0, 1.0, epsabs=QUAD_TOL, epsrel=QUAD_TOL,
                   limit=200)
    tail, _ = quad(integrand, 1.0, np.inf, epsabs=QUAD_TOL, epsrel=QUAD_TOL,
                   limit=200)
    return head + tail


def rho2(dist: FrequencyDistribution) -> float:
    """The positive cubic coefficient determined solely by g:

    rho2 = -[ pi g''(0)/2 + 2 int_0^inf g'(w)/w dw - int R(w) g(w) dw ],

    with R the fixed rational weight above."""
    gpp0 = dist.density_deriv2(0.0)
    limit_part = 0.5 * math.pi * gpp0 + 2.0 * _int_gprime_over_w(dist)
    rational_part = dist.integrate_weighted(_cubic_rational)
    out = -(limit_part - rational_part)
    if out <= 0:
        raise AssumptionViolationError(
            f"rho2 = {out} is not positive; quadrature failure or invalid g")
    return out


def _resolvent_kernel_value(dist: FrequencyDistribution, lam: float) -> float:
    """-(T1 + T2 - T3) at one fixed lambda > 0 (see the caller below)."""
    g0v = dist.density(0.0)

    def t1(w):
        return (dist.density(w) - g0v) / (lam * lam + w * w)

    def t2(w):
        return 0.5 * lam * dist.density_deriv2(w) / (lam * lam + w * w)

    v1 = sum(quad(t1, a, b, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=400)[0]
             for a, b in [(-np.inf, -1.0), (-1.0, 1.0), (1.0, np.inf)])
    v2 = sum(quad(t2, a, b, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=400)[0]
             for a, b in [(-np.inf, -1.0), (-1.0, 1.0), (1.0, np.inf)])
    v3 = dist.integrate_weighted(_cubic_rational)
    return -(v1 + v2 - v3)


def rho2_from_resolvent_kernel(dist: FrequencyDistribution,
                               lam: float = 1e-4,
                               extrapolate: bool = True) -> float:
    """Independent cross-check of rho2: quadrature of the three-term
    resolvent-kernel expression at small positive lambda,

      P(lam) = int g(w)/((lam - i w) i w) dw
             + (1/2) int g''(w)/(lam - i w) dw
             - int R(w) g(w) dw,

    with the first term taken in the principal-value sense (its delta-type
    contribution pi g(0)/lam is removed; only the finite part survives the
    limit).  After symmetrizing in w the three terms become

      T1 = int (g(w) - g(0))/(lam^2 + w^2) dw
      T2 = (1/2) int lam g''(w)/(lam^2 + w^2) dw
      T3 = int R(w) g(w) dw,

    and rho2 = -(T1 + T2 - T3) + c1 lam + O(lam^2).  The linear bias c1 is
    genuine: for the Cauchy family T1 + T2 = -1/(Delta (lam + Delta))
    - 1/(lam + Delta)^3 exactly, so c1 = 1/Delta^3 + 3/Delta^4, a few
    hundred times lam in relative terms at the default lam.  With
    ``extrapolate`` the bias is removed by a second evaluation at 2 lam
    (returning 2 P(lam) - P(2 lam), accurate to O(lam^2)); ``lam`` stays
    the finest scale probed."""
    value = _resolvent_kernel_value(dist, lam)
    if not extrapolate:
        return value
    return 2.0 * value - _resolvent_kernel_value(dist, 2.0 * lam)


def rho3(spec: SpectrumW) -> float:
    """1 for a constant or single-Fourier-mode eigenfunction.  The shipped
    translation-invariant kernels have no other eigenfunction shapes; any
    other case is rejected rather than guessed."""
    if not isinstance(spec, SpectrumW):
        raise UnsupportedEigenfunctionError(
            "eigenfunction shape not supported")
    return 1.0


@dataclass(frozen=True)
class PitchforkPrediction:
    k_c: float
    g0: float
    mu_max: float
    rho1: float
    rho2: float
    rho3: float
    amplitude_coeff: float
    lambda_slope: float
    k_c_minus: float = None
    k_c_minus_mode: int = None
    validity_factor: float = 1.2

    def amplitude(self, K: float) -> float:
        """Predicted branch amplitude at coupling K (0 at and below K_c)."""
        if K <= self.k_c:
            return 0.0
        return self.amplitude_coeff * math.sqrt(K - self.k_c)

    @property
    def validity_window(self) -> float:
        return self.validity_factor * self.k_c

    def to_dict(self) -> dict:
        out = {
            "k_c": self.k_c,
            "rho1": self.rho1,
            "rho2": self.rho2,
            "rho3": self.rho3,
            "amplitude_coeff": self.amplitude_coeff,
            "validity_window": self.validity_window,
        }
        if self.k_c_minus is not None:
            out["k_c_minus"] = self.k_c_minus
        return out

    def to_json(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def predict(dist: FrequencyDistribution,
            spec: SpectrumW) -> PitchforkPrediction:
    """Assemble the full prediction for one density/kernel pair.

    The negative branch location 1/(g0 mu_min) is reported whenever the
    kernel has a negative eigenvalue; its amplitude coefficient is not
    (only the location is predicted for the heterogeneous mode).
    """
    cc = critical_coupling(dist, spec)
    r1 = -1.0 / cc.d_prime0
    r2 = rho2(dist)
    r3 = rho3(spec)
    coeff = cc.k_c ** (-2) / math.sqrt(cc.mu_max * r2 * r3)
    k_c_minus = None
    k_c_minus_mode = None
    if spec.mu_min < 0:
        k_c_minus = 1.0 / (cc.g0 * spec.mu_min)
        k_c_minus_mode = spec.v_min_mode
    return PitchforkPrediction(
        k_c=cc.k_c, g0=cc.g0, mu_max=cc.mu_max, rho1=r1, rho2=r2, rho3=r3,
        amplitude_coeff=coeff, lambda_slope=cc.lambda_slope,
        k_c_minus=k_c_minus, k_c_minus_mode=k_c_minus_mode)


def center_amplitude_ode(prediction: PitchforkPrediction, eps: float,
                         c0: float, T: float, n_out: int = 400):
    """Integrate the scalar reduced equation for the branch amplitude from
    |h|(0) = c0 over [0, T]; returns (t, |h|) arrays."""
    if eps <= 0:
        raise ValueError("eps must be positive (K above K_c)")
    if c0 == 0:
        raise ValueError("c0 must be nonzero")
    k_c, mu = prediction.k_c, prediction.mu_max
    lin = prediction.rho1 / (k_c * k_c * mu)
    cubic = k_c ** 4 * mu * prediction.rho2 * prediction.rho3

    def f(_, h):
        return lin * h * (eps * eps - cubic * h * h)

    t_eval = np.linspace(0.0, T, n_out)
    sol = solve_ivp(f, (0.0, T), [c0], t_eval=t_eval, rtol=1e-10,
                    atol=1e-12, method="RK45")
    return sol.t, sol.y[0]
