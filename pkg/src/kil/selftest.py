"""Built-in oracle suites behind the `kil selftest` command.

Each check pairs a library code path with an independent reference
(closed forms, order-of-accuracy ratios, bit-level replays) and reports
pass/fail without raising.
"""
from __future__ import annotations

import numpy as np

from . import graphons, simulator, spectral
from .distributions import cauchy, gaussian


def _check_normalization():
    return all(abs(d.normalization() - 1.0) < 1e-10
               for d in (gaussian(0.3), cauchy(0.5)))


def _check_g0_formulas():
    ok = True
    for d in (gaussian(0.3), cauchy(0.5)):
        val = d.g0()       # raises if the two formulas disagree beyond 1e-9
        ok = ok and val > 0
    delta = 0.5
    ok = ok and abs(cauchy(delta).g0() - 1 / (delta * (1 + delta))) < 1e-10
    return ok


def _check_schwarz_symmetry():
    d = gaussian(0.3)
    for x in (-0.1, 0.05, 0.6):
        for y in (0.3, 1.1):
            lam = complex(x, y)
            a = spectral.d_continued(d, lam)
            b = spectral.d_continued(d, lam.conjugate())
            if abs(a - b.conjugate()) > 1e-8:
                return False
    return True


def _check_critical_curve():
    d = gaussian(0.3)
    # |G(iy)| ~ 1/y^2, so the 1e-3 decay target needs |y| beyond ~32
    ys = np.linspace(-40.0, 40.0, 161)
    curve = spectral.critical_curve(d, ys)
    crossings = [y for y, v in zip(ys, curve.values)
                 if abs(v.imag) < 1e-9 and v.real > 0]
    unique = len(crossings) == 1 and abs(crossings[0]) < 1e-12
    decays = abs(curve.values[0]) < 1e-3 and abs(curve.values[-1]) < 1e-3
    return unique and decays


def _rk4_ratio():
    graphon = graphons.small_world(0.1, 0.3)
    graph = graphons.sample_graph(graphon, 10, seed=7)
    rng = np.random.default_rng(3)
    theta0 = rng.random(10) * 2 * np.pi
    omega = rng.normal(0, 0.3, 10)

    def final(dt):
        cfg = simulator.SimConfig(n=10, K=0.8, dt=dt, t_transient=1,
                                  t_average=50)
        init = simulator.OscillatorState(theta0.copy(), np.zeros(10), omega)
        traj = simulator.integrate(cfg, graph, init, t_end=5.0,
                                   record_modes=())
        return np.concatenate([traj.final_state.theta,
                               traj.final_state.psi])

    ref = final(0.0025)
    e1 = np.max(np.abs(final(0.02) - ref))
    e2 = np.max(np.abs(final(0.01) - ref))
    return e1 / e2


def _check_rk4_order():
    return 14.0 <= _rk4_ratio() <= 18.0


def _steady_bytes():
    d = gaussian(0.3)
    graphon = graphons.er(0.5)
    graph = graphons.sample_graph(graphon, 60, seed=11)
    cfg = simulator.SimConfig(n=60, K=0.4, dt=0.05, t_transient=5,
                              t_average=50, seed=21)
    stats = simulator.run_steady(cfg, graph, d)
    return stats


def _check_determinism():
    a, b = _steady_bytes(), _steady_bytes()
    return (a.mean_r == b.mean_r and a.std_r == b.std_r
            and a.final_state.theta.tobytes() == b.final_state.theta.tobytes()
            and a.final_state.psi.tobytes() == b.final_state.psi.tobytes())


def _check_omega_conserved():
    d = gaussian(0.3)
    graph = graphons.sample_graph(graphons.er(0.5), 60, seed=11)
    cfg = simulator.SimConfig(n=60, K=0.4, dt=0.05, t_transient=5,
                              t_average=50, seed=21)
    init = simulator.mixing_state(cfg, graph, d)
    before = init.omega.tobytes()
    stats = simulator.run_steady(cfg, graph, d, initial=init)
    return stats.final_state.omega.tobytes() == before


CHECKS = [
    ("quadrature normalization (1e-10)", _check_normalization),
    ("g0 two-formula agreement (1e-9)", _check_g0_formulas),
    ("D Schwarz symmetry (1e-8)", _check_schwarz_symmetry),
    ("critical curve: unique crossing and decay", _check_critical_curve),
    ("RK4 order ratio in [14, 18]", _check_rk4_order),
    ("determinism: identical runs, identical bytes", _check_determinism),
    ("omega conservation bit-exact", _check_omega_conserved),
]


def run_all():
    report = []
    for name, fn in CHECKS:
        try:
            ok = bool(fn())
        except Exception:
            ok = False
        report.append((name, ok))
    return report
