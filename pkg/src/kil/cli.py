"""Command-line entry point wiring the modules into reproducible
experiments: prediction reports, critical curves, eigenvalue trajectories,
bifurcation sweeps and a self-test matrix.

Outputs are CSV data files (12 significant digits, '.' decimal separator,
LF line endings) plus generated gnuplot scripts; no images are rendered.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bifurcation, distributions, graphons, simulator, spectral
from .exceptions import ConfigError, KilError

SCHEMA_VERSION = 1


def fmt(value) -> str:
    """12-significant-digit formatting used by every CSV writer."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def write_csv(path, header: str, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


# ---------------------------------------------------------------------------
# configuration

_ALLOWED_TOP = {"schema_version", "distribution", "graphon", "simulation",
                "k_grid", "replicas", "seed", "output_dir", "y_grid",
                "modes", "perturb_mode", "mu"}
_ALLOWED_DIST = {"kind", "param"}
_ALLOWED_GRAPHON = {"kind", "p", "r"}
_ALLOWED_SIM = {"n", "dt", "t_transient", "t_average", "t_transient_warm",
                "coupling_dtype"}
_ALLOWED_KGRID = {"min", "max", "count"}
_ALLOWED_YGRID = {"max", "count"}


def _check_keys(d: dict, allowed: set, where: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


@dataclass
class ExperimentConfig:
    distribution: dict
    graphon: dict = None
    simulation: dict = field(default_factory=dict)
    k_grid: dict = None
    replicas: int = 4
    seed: int = 0
    output_dir: str = "."
    y_grid: dict = None
    modes: list = field(default_factory=lambda: [0])
    perturb_mode: int = 0
    mu: float = None

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        if raw.get("schema_version") != SCHEMA_VERSION:
            raise ConfigError(
                f'config requires "schema_version": {SCHEMA_VERSION}')
        _check_keys(raw, _ALLOWED_TOP, "config")
        if "distribution" not in raw:
            raise ConfigError("config requires a distribution")
        _check_keys(raw["distribution"], _ALLOWED_DIST, "distribution")
        if raw.get("graphon") is not None:
            _check_keys(raw["graphon"], _ALLOWED_GRAPHON, "graphon")
        if raw.get("simulation") is not None:
            _check_keys(raw["simulation"], _ALLOWED_SIM, "simulation")
        if raw.get("k_grid") is not None:
            _check_keys(raw["k_grid"], _ALLOWED_KGRID, "k_grid")
        if raw.get("y_grid") is not None:
            _check_keys(raw["y_grid"], _ALLOWED_YGRID, "y_grid")
        kw = {k: v for k, v in raw.items() if k != "schema_version"}
        cfg = cls(**kw)
        # fail early on invalid parameter ranges
        cfg.build_distribution()
        if cfg.graphon is not None:
            cfg.build_graphon()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        out = {"schema_version": SCHEMA_VERSION}
        for k, v in asdict(self).items():
            if v is not None:
                out[k] = v
        return out

    def dump(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    # -- builders ---------------------------------------------------------

    def build_distribution(self):
        try:
            return distributions.from_spec(self.distribution)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad distribution spec: {exc}") from exc

    def build_graphon(self):
        if self.graphon is None:
            raise ConfigError("this command requires a graphon spec")
        try:
            return graphons.from_spec(self.graphon)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad graphon spec: {exc}") from exc

    def build_sim_config(self, K: float = 0.0) -> simulator.SimConfig:
        sim = dict(self.simulation)
        if "n" not in sim:
            raise ConfigError("simulation spec requires n")
        try:
            return simulator.SimConfig(K=K, seed=self.seed, **sim)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad simulation spec: {exc}") from exc

    def build_k_grid(self) -> np.ndarray:
        if self.k_grid is None:
            raise ConfigError("this command requires a k_grid spec")
        try:
            lo, hi, count = (self.k_grid["min"], self.k_grid["max"],
                             self.k_grid["count"])
        except KeyError as exc:
            raise ConfigError(f"k_grid requires min/max/count: {exc}") from exc
        return np.linspace(lo, hi, int(count))

    def build_y_grid(self) -> np.ndarray:
        spec = self.y_grid or {}
        y_max = spec.get("max", 20.0 * self.distribution["param"] + 2.0)
        count = int(spec.get("count", 401))
        if count % 2 == 0:
            count += 1                      # keep 0 on the grid
        return np.linspace(-y_max, y_max, count)


# ---------------------------------------------------------------------------
# gnuplot emission

def _gnuplot_curve(path, csv_name, g0):
    with open(path, "w", newline="\n") as fh:
        fh.write(
            "set datafile separator ','\n"
            "set xlabel 'Re'\nset ylabel 'Im'\nset grid\n"
            f"set title 'critical curve (crosses the real axis at {fmt(g0)})'\n"
            f"plot '{csv_name}' every ::1 using 2:3 with lines "
            "title 'D(iy)', '-' with points pt 7 title 'g0'\n"
            f"{fmt(g0)} 0\ne\npause -1\n")


def _gnuplot_sweep(path, csv_name, k_c, k_c_minus=None):
    lines = [
        "set datafile separator ','",
        "set xlabel 'K'",
        "set ylabel 'order parameter'",
        "set grid",
        f"set arrow from {fmt(k_c)}, graph 0 to {fmt(k_c)}, graph 1 "
        "nohead dashtype 2 lc rgb 'red'",
    ]
    if k_c_minus is not None:
        lines.append(
            f"set arrow from {fmt(k_c_minus)}, graph 0 to "
            f"{fmt(k_c_minus)}, graph 1 nohead dashtype 2 lc rgb 'red'")
    lines.append(
        f"plot '{csv_name}' every ::1 using 1:2 with linespoints "
        f"title 'mean |r|', '{csv_name}' every ::1 using 1:4 "
        "with linespoints title 'mode order parameter'")
    lines.append("pause -1")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# commands

def cmd_predict(cfg: ExperimentConfig, out_dir: str) -> int:
    dist = cfg.build_distribution()
    spec = graphons.spectrum(cfg.build_graphon())
    pred = bifurcation.predict(dist, spec)
    pred.to_json(os.path.join(out_dir, "predict.json"))
    rows = list(pred.to_dict().items())
    width = max(len(k) for k, _ in rows)
    for key, val in rows:
        print(f"{key:<{width}}  {fmt(val)}")
    return 0


def cmd_curve(cfg: ExperimentConfig, out_dir: str) -> int:
    dist = cfg.build_distribution()
    curve = spectral.critical_curve(dist, cfg.build_y_grid())
    csv_path = os.path.join(out_dir, "curve.csv")
    curve.to_csv(csv_path)
    _gnuplot_curve(os.path.join(out_dir, "curve.gp"), "curve.csv", dist.g0())
    print(f"wrote {csv_path}")
    return 0


def cmd_eig(cfg: ExperimentConfig, out_dir: str) -> int:
    dist = cfg.build_distribution()
    if cfg.mu is not None:
        mu = float(cfg.mu)
    else:
        mu = graphons.spectrum(cfg.build_graphon()).mu_max
    traj = spectral.eigenvalue_trajectory(dist, mu, cfg.build_k_grid())
    rows = [(k, lam.real, lam.imag) for k, lam in traj if lam is not None]
    skipped = sum(1 for _, lam in traj if lam is None)
    csv_path = os.path.join(out_dir, "eig.csv")
    write_csv(csv_path, "K,re_lambda,im_lambda", rows)
    if skipped:
        print(f"warning: no root in the strip for {skipped} grid points",
              file=sys.stderr)
    print(f"wrote {csv_path}")
    return 0


def cmd_sweep(cfg: ExperimentConfig, out_dir: str, threads: int) -> int:
    dist = cfg.build_distribution()
    graphon = cfg.build_graphon()
    spec = graphons.spectrum(graphon)
    pred = bifurcation.predict(dist, spec)
    pred.to_json(os.path.join(out_dir, "predict.json"))
    k_grid = cfg.build_k_grid()
    sim_cfg = cfg.build_sim_config()
    result = simulator.sweep(dist, graphon, k_grid, sim_cfg,
                             replicas=cfg.replicas, modes=tuple(cfg.modes),
                             perturb_mode=cfg.perturb_mode, n_jobs=threads)
    csv_path = os.path.join(out_dir, "sweep.csv")
    mode = cfg.modes[0] if cfg.modes else 0
    result.to_csv(csv_path, mode=mode)
    _gnuplot_sweep(os.path.join(out_dir, "sweep.gp"), "sweep.csv",
                   pred.k_c, pred.k_c_minus)
    print(f"wrote {csv_path}")
    return 0


def cmd_selftest() -> int:
    """Run the oracle suites and print a pass/fail matrix."""
    from . import selftest
    report = selftest.run_all()
    width = max(len(name) for name, _ in report)
    failures = 0
    for name, ok in report:
        print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}")
        failures += not ok
    return 1 if failures else 0


# ---------------------------------------------------------------------------

def _resolve_threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("KIL_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"bad KIL_THREADS value: {env!r}")
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kil",
        description="second-order Kuramoto on graphs: predictions and "
                    "bifurcation experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("predict", "curve", "eig", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
    sub.add_parser("selftest")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            return cmd_selftest()
        cfg = ExperimentConfig.load(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        out_dir = args.out or cfg.output_dir
        os.makedirs(out_dir, exist_ok=True)
        if args.command == "predict":
            return cmd_predict(cfg, out_dir)
        if args.command == "curve":
            return cmd_curve(cfg, out_dir)
        if args.command == "eig":
            return cmd_eig(cfg, out_dir)
        if args.command == "sweep":
            return cmd_sweep(cfg, out_dir, _resolve_threads(args))
        raise AssertionError(args.command)
    except KilError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
