"""Onset of synchronization in the second-order Kuramoto model on graphs.

Analytical side: critical coupling, generalized eigenvalue trajectories
and pitchfork branch amplitudes for Gaussian/Cauchy frequency densities on
Erdos-Renyi and small-world limit kernels.  Empirical side: direct RK4
simulation of the finite-n oscillator system on W-random graphs, with
coupling sweeps producing bifurcation diagrams.
"""

from .bifurcation import (PitchforkPrediction, center_amplitude_ode, predict,
                          rho1, rho2, rho2_from_resolvent_kernel, rho3)
from .distributions import FrequencyDistribution, cauchy, gaussian
from .graphons import (Graphon, GraphSample, SpectrumW, er, sample_graph,
                       small_world, spectrum)
from .simulator import (OscillatorState, SimConfig, SweepResult,
                        fit_bifurcation_point, integrate, mixing_state,
                        order_parameter, rhs, run_steady, sweep)
from .spectral import (CriticalCoupling, CriticalCurve, EigenProblem,
                       critical_coupling, critical_curve, d_continued,
                       d_lambda, d_prime, d_prime0, eigenvalue_trajectory,
                       solve_eigenvalue, subcritical_check)

__version__ = "0.1.0"

__all__ = [
    "FrequencyDistribution", "gaussian", "cauchy",
    "Graphon", "GraphSample", "SpectrumW", "er", "small_world", "spectrum",
    "sample_graph",
    "EigenProblem", "CriticalCurve", "CriticalCoupling",
    "d_lambda", "d_continued", "d_prime", "d_prime0", "critical_curve",
    "critical_coupling", "solve_eigenvalue", "eigenvalue_trajectory",
    "subcritical_check",
    "PitchforkPrediction", "predict", "rho1", "rho2",
    "rho2_from_resolvent_kernel", "rho3", "center_amplitude_ode",
    "OscillatorState", "SimConfig", "SweepResult", "rhs", "integrate",
    "order_parameter", "mixing_state", "run_steady", "sweep",
    "fit_bifurcation_point",
]
