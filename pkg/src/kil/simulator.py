"""Direct simulation of the finite-n second-order oscillator system.

The system integrated (damping rescaled to 1) is

    theta_i' = psi_i + omega_i
    psi_i'   = -psi_i + (2K/n) sum_j a_ij sin(theta_j - theta_i)

with a fixed-step classical RK4.  The coupling sum is evaluated in
O(edges) through sin(tj - ti) = sin(tj) cos(ti) - cos(tj) sin(ti) and two
adjacency matvecs; for dense samples the matvec runs through BLAS on the
dense adjacency.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from joblib import Parallel, delayed

from .distributions import FrequencyDistribution
from .exceptions import DivergenceError, FitError
from .graphons import Graphon, GraphSample, sample_graph

# sampled graphs denser than this use a dense adjacency for the force loop
DENSE_THRESHOLD = 0.05


@dataclass
class OscillatorState:
    """Phases (unreduced), shifted velocities psi = theta' - omega, and the
    frozen intrinsic frequencies."""

    theta: np.ndarray
    psi: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        n = len(self.theta)
        if len(self.psi) != n or len(self.omega) != n:
            raise ValueError("state arrays must have equal length")

    @property
    def n(self) -> int:
        return len(self.theta)

    def copy(self) -> "OscillatorState":
        return OscillatorState(self.theta.copy(), self.psi.copy(),
                               self.omega.copy())


@dataclass(frozen=True)
class SimConfig:
    n: int
    K: float = 0.0
    dt: float = 0.02
    t_transient: float = 200.0
    t_average: float = 200.0
    seed: int = 0
    t_transient_warm: float = None   # transient when warm-starting; None = full
    coupling_dtype: str = "float64"  # float32 trades ~1e-6 force error for speed

    def __post_init__(self):
        if not 0 < self.dt <= 0.05:
            raise ValueError("dt must lie in (0, 0.05]")
        if self.t_average < 50:
            raise ValueError("t_average must be at least 50")
        if self.coupling_dtype not in ("float32", "float64"):
            raise ValueError("coupling_dtype must be float32 or float64")


class _Coupling:
    """Precomputed adjacency operator for the force loop."""

    def __init__(self, graph: GraphSample, K: float, dtype: str):
        self.n = graph.n
        self.scale = 2.0 * K / graph.n
        self.f32 = dtype == "float32"
        if graph.edge_density > DENSE_THRESHOLD:
            self.mat = graph.dense(np.float32 if self.f32 else np.float64)
        else:
            self.mat = graph.adjacency.astype(
                np.float32 if self.f32 else np.float64)

    def __call__(self, theta: np.ndarray) -> np.ndarray:
        s = np.sin(theta)
        c = np.cos(theta)
        if self.f32:
            sc = np.column_stack([s, c]).astype(np.float32)
            prod = np.asarray(self.mat @ sc, dtype=np.float64)
        else:
            prod = np.asarray(self.mat @ np.column_stack([s, c]))
        return self.scale * (c * prod[:, 0] - s * prod[:, 1])


def rhs(state: OscillatorState, graph: GraphSample, K: float):
    """Time derivatives (dtheta, dpsi) of the first-order rewrite."""
    if graph.n != state.n:
        raise ValueError("graph size does not match state size")
    coupling = _Coupling(graph, K, "float64")
    return state.psi + state.omega, -state.psi + coupling(state.theta)


def _rk4_span(theta, psi, omega, coupling, dt, n_steps, on_sample=None,
              sample_stride=1):
    """Integrate n_steps of RK4 in place; optionally report theta to
    on_sample every sample_stride steps."""
    half = dt / 2.0
    for step in range(n_steps):
        k1t = psi + omega
        k1p = -psi + coupling(theta)
        th2 = theta + half * k1t
        ps2 = psi + half * k1p
        k2t = ps2 + omega
        k2p = -ps2 + coupling(th2)
        th3 = theta + half * k2t
        ps3 = psi + half * k2p
        k3t = ps3 + omega
        k3p = -ps3 + coupling(th3)
        th4 = theta + dt * k3t
        ps4 = psi + dt * k3p
        k4t = ps4 + omega
        k4p = -ps4 + coupling(th4)
        theta = theta + (dt / 6.0) * (k1t + 2 * k2t + 2 * k3t + k4t)
        psi = psi + (dt / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p)
        if on_sample is not None and (step + 1) % sample_stride == 0:
            on_sample(step + 1, theta)
    if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(psi))):
        raise DivergenceError("non-finite state after integration span",
                              step=n_steps)
    return theta, psi


@dataclass
class Trajectory:
    times: np.ndarray
    order_params: dict          # mode -> complex array along times
    final_state: OscillatorState


def order_parameter(state: OscillatorState, mode: int = 0,
                    grid: np.ndarray = None) -> complex:
    """n^-1 sum_j e^(-2 pi i k x_j) e^(i theta_j); |result| <= 1.

    The latent grid defaults to midpoints (matching sampled graphs)."""
    return _order_parameter(state.theta, mode, grid)


def _order_parameter(theta, mode, grid=None):
    n = len(theta)
    if mode == 0:
        return complex(np.mean(np.exp(1j * theta)))
    if grid is None:
        grid = (2 * np.arange(n) + 1) / (2 * n)
    return complex(np.mean(np.exp(1j * (theta - 2 * np.pi * mode * grid))))


def integrate(config: SimConfig, graph: GraphSample,
              initial: OscillatorState, t_end: float = None,
              record_modes=(0,), sample_stride: int = 5) -> Trajectory:
    """Fixed-step RK4 over [0, t_end] (default: transient + averaging
    window), recording the requested order-parameter modes."""
    if t_end is None:
        t_end = config.t_transient + config.t_average
    n_steps = int(round(t_end / config.dt))
    coupling = _Coupling(graph, config.K, config.coupling_dtype)
    times, series = [], {k: [] for k in record_modes}

    def on_sample(step, theta):
        times.append(step * config.dt)
        for k in record_modes:
            series[k].append(_order_parameter(theta, k, graph.grid))

    theta, psi = _rk4_span(initial.theta.copy(), initial.psi.copy(),
                           initial.omega, coupling, config.dt, n_steps,
                           on_sample, sample_stride)
    return Trajectory(
        times=np.array(times),
        order_params={k: np.array(v) for k, v in series.items()},
        final_state=OscillatorState(theta, psi, initial.omega))


@dataclass
class SteadyStats:
    mean_r: float
    std_r: float
    mean_h: dict                 # mode -> time-averaged |h_mode|
    final_state: OscillatorState


def mixing_state(config: SimConfig, graph: GraphSample,
                 dist: FrequencyDistribution, perturb_mode: int = 0,
                 perturb_amp: float = 0.01) -> OscillatorState:
    """Uniform phases, psi = 0, frequencies drawn from the density, plus a
    small seed of amplitude perturb_amp in the requested spatial mode."""
    ss = np.random.SeedSequence(config.seed)
    s_omega, s_theta = ss.spawn(2)
    omega = dist.sample(config.n, s_omega)
    rng = np.random.default_rng(s_theta)
    theta = rng.random(config.n) * 2 * np.pi
    if perturb_amp:
        target = 2 * np.pi * perturb_mode * graph.grid
        theta = theta + 2 * perturb_amp * np.sin(target - theta)
    return OscillatorState(theta, np.zeros(config.n), omega)


def run_steady(config: SimConfig, graph: GraphSample,
               dist: FrequencyDistribution, modes=(0,),
               perturb_mode: int = 0,
               initial: OscillatorState = None,
               warm: bool = False) -> SteadyStats:
    """Transient then time-averaged order-parameter statistics.

    With warm=True (continuation from a supplied initial state) the
    shorter warm transient from the config is used."""
    if initial is None:
        initial = mixing_state(config, graph, dist, perturb_mode)
    t_trans = config.t_transient
    if warm and config.t_transient_warm is not None:
        t_trans = config.t_transient_warm
    coupling = _Coupling(graph, config.K, config.coupling_dtype)
    n_trans = int(round(t_trans / config.dt))
    n_avg = int(round(config.t_average / config.dt))
    omega = initial.omega
    theta, psi = _rk4_span(initial.theta.copy(), initial.psi.copy(), omega,
                           coupling, config.dt, n_trans)
    record = {k: [] for k in set(modes) | {0}}

    def on_sample(_, th):
        for k in record:
            record[k].append(abs(_order_parameter(th, k, graph.grid)))

    theta, psi = _rk4_span(theta, psi, omega, coupling, config.dt, n_avg,
                           on_sample, sample_stride=5)
    r_series = np.array(record[0])
    return SteadyStats(
        mean_r=float(r_series.mean()),
        std_r=float(r_series.std()),
        mean_h={k: float(np.mean(record[k])) for k in record},
        final_state=OscillatorState(theta, psi, omega))


@dataclass
class SweepResult:
    """Per-K steady statistics aggregated over replicas, with provenance."""

    K: np.ndarray
    mean_r: np.ndarray
    std_r: np.ndarray
    mean_h: dict                 # mode -> array over K
    n: int
    seeds: list
    replica_mean_r: np.ndarray = None   # (replicas, K)
    errors: list = field(default_factory=list)

    def to_csv(self, path, mode: int = 0) -> None:
        from .cli import write_csv
        h = self.mean_h.get(mode, np.full_like(self.K, np.nan))
        rows = [(k, mr, sr, hm, self.n, len(self.seeds))
                for k, mr, sr, hm in zip(self.K, self.mean_r, self.std_r, h)]
        write_csv(path, "K,mean_r,std_r,mean_h_mode,n,seed_count", rows)


def _sweep_one_replica(dist, graphon, k_order, config, seed, modes,
                       perturb_mode, warm_start):
    graph = sample_graph(graphon, config.n, seed)
    cfg0 = replace(config, seed=seed)
    state = None
    out = {}
    for idx, k in k_order:
        cfg = replace(cfg0, K=float(k))
        stats = run_steady(cfg, graph, dist, modes=modes,
                           perturb_mode=perturb_mode,
                           initial=state if warm_start else None,
                           warm=state is not None and warm_start)
        if warm_start:
            state = stats.final_state
        out[idx] = stats
    return out


def sweep(dist: FrequencyDistribution, graphon: Graphon, k_grid,
          config: SimConfig, replicas: int = 4, modes=(0,),
          perturb_mode: int = 0, warm_start: bool = True,
          n_jobs: int = 1) -> SweepResult:
    """Aggregate run_steady over a sorted coupling grid and replica seeds.

    Continuation (warm start) walks the grid from weak to strong coupling
    by |K|, so it works for both the positive and the negative branch.
    Replicas are independent cells merged deterministically by index.
    """
    k_grid = np.asarray(k_grid, dtype=float)
    if len(k_grid) and np.any(np.diff(k_grid) < 0):
        raise ValueError("k_grid must be sorted ascending")
    if len(k_grid) == 0:
        return SweepResult(K=k_grid, mean_r=np.array([]), std_r=np.array([]),
                           mean_h={k: np.array([]) for k in modes},
                           n=config.n, seeds=[])
    order = sorted(range(len(k_grid)), key=lambda i: abs(k_grid[i]))
    k_order = [(i, k_grid[i]) for i in order]
    seeds = [int(s.generate_state(1)[0])
             for s in np.random.SeedSequence(config.seed).spawn(replicas)]

    runner = Parallel(n_jobs=n_jobs) if n_jobs != 1 else None
    jobs = [(dist, graphon, k_order, config, s, tuple(modes), perturb_mode,
             warm_start) for s in seeds]
    errors = []
    results = []
    if runner is not None:
        results = runner(delayed(_sweep_one_replica)(*j) for j in jobs)
    else:
        for j in jobs:
            try:
                results.append(_sweep_one_replica(*j))
            except DivergenceError as exc:   # record, keep other replicas
                errors.append((j[4], str(exc)))
                results.append(None)

    mode_set = sorted(set(modes) | {0})
    nk = len(k_grid)
    rep_r = np.full((replicas, nk), np.nan)
    rep_h = {k: np.full((replicas, nk), np.nan) for k in mode_set}
    for ri, res in enumerate(results):
        if res is None:
            continue
        for idx, stats in res.items():
            rep_r[ri, idx] = stats.mean_r
            for k in mode_set:
                rep_h[k][ri, idx] = stats.mean_h[k]
    return SweepResult(
        K=k_grid,
        mean_r=np.nanmean(rep_r, axis=0),
        std_r=np.nanstd(rep_r, axis=0),
        mean_h={k: np.nanmean(v, axis=0) for k, v in rep_h.items()},
        n=config.n,
        seeds=seeds,
        replica_mean_r=rep_r,
        errors=errors)


def fit_bifurcation_point(result: SweepResult, mode: int = 0,
                          window=(0.1, 0.4)):
    """Least-squares line through (K, |r|^2) over the window where the
    order parameter is between the window bounds; returns (K_hat, slope),
    the line's root and its slope."""
    vals = result.mean_r if mode == 0 else result.mean_h[mode]
    vals = np.asarray(vals, dtype=float)
    mask = np.isfinite(vals) & (vals >= window[0]) & (vals <= window[1])
    if mask.sum() < 2:
        raise FitError(
            f"only {int(mask.sum())} points with order parameter in "
            f"[{window[0]}, {window[1]}]; cannot fit")
    slope, intercept = np.polyfit(result.K[mask], vals[mask] ** 2, 1)
    return -intercept / slope, slope
