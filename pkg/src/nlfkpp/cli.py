"""Scenario runner: configures a model from ``key = value`` files and
command-line overrides, dispatches to a solver, and writes CSV artifacts,
a JSON manifest, and optional gnuplot scripts.

Exit codes: 0 success, 2 configuration/validation error, 3 solver abort.
The environment variable NLFKPP_MODE selects ``reference`` (sequential,
byte-reproducible, the default) or ``parallel`` sweep execution.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import time
from importlib import resources

import numpy as np

from . import __version__, analysis, asymptotics, exact, gridsim, manifold, planar
from . import spectral
from .config import (ConfigError, ScenarioConfig, apply_assignment,
                     load_config, parse_config_text, resolved_items)
from .csvio import write_csv, read_csv
from .kernel import SQRT_TWO_PI, TWO_PI, CircleKernelParams, eigenvalue

PRESET_SWEEPS = {
    # composite presets: one bundle per value of the named axis
    "fig7": ("model.k0", [0.0, 0.03]),
    "fig8": ("model.D", [0.0, 0.005, 0.5]),
}
PRESET_EXTRAS = {
    "fig5b": "compare_asymptotic",
    "fig6": "ring_csv",
}


def _mode() -> str:
    mode = os.environ.get("NLFKPP_MODE", "reference")
    if mode not in ("reference", "parallel"):
        raise ConfigError(f"NLFKPP_MODE: expected reference or parallel, got {mode!r}")
    return mode


def _kernel(cfg: ScenarioConfig) -> CircleKernelParams:
    return CircleKernelParams(cfg.b0, cfg.gamma, cfg.R)


def scenario_initial(cfg: ScenarioConfig):
    """rho_phi(s) callable for the configured initial condition."""
    v0 = 1.0 / SQRT_TWO_PI
    if cfg.initial_kind == "homogeneous":
        return lambda s: np.full_like(np.asarray(s, dtype=float), v0 * cfg.beta00)
    if cfg.initial_kind == "gaussian_bump":
        width, T, beta00 = cfg.initial_width, cfg.T, cfg.beta00
        return lambda s: v0 * beta00 + np.exp(-np.asarray(s) ** 2 / width) / T
    if cfg.initial_kind == "gaussian":
        width = cfg.initial_width
        return lambda s: np.exp(-np.asarray(s) ** 2 / width)
    if cfg.initial_kind == "cutoff":
        edge = cfg.initial_edge
        def rho_phi(s):
            s = np.asarray(s, dtype=float)
            out = np.where(np.abs(s) < edge, 1.0, 0.0)
            return np.where(np.isclose(np.abs(s), edge, rtol=0, atol=1e-12),
                            0.5, out)
        return rho_phi
    raise ConfigError(f"initial.kind: {cfg.initial_kind!r} needs explicit samples")


def _series_stride(cfg: ScenarioConfig) -> int:
    return max(1, int(round(cfg.t_end / cfg.dt / 400)))


def _write_manifest(outdir, cfg, wall, extra=None):
    manifest = {
        "config": resolved_items(cfg),
        "version": __version__,
        "mode": _mode(),
        "wall_time_s": wall,
    }
    if extra:
        manifest.update(extra)
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _snapshot_name(t: float) -> str:
    return f"snapshot_t{t:g}.csv"


def _emit_plot_script(outdir, csv_names, title):
    lines = ["set datafile separator ','", "set key outside",
             f"set title '{title}'"]
    plots = [f"'{name}' using 1:2 with lines title '{name}'"
             for name in csv_names]
    lines.append("plot " + ", \\\n     ".join(plots))
    with open(os.path.join(outdir, "plot.gp"), "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def run_exact(cfg: ScenarioConfig, outdir: str) -> dict:
    model = exact.HomogeneousModel(cfg.a, cfg.kappa,
                                   eigenvalue(0, _kernel(cfg)), cfg.beta00)
    t = np.arange(0.0, cfg.t_end + 0.5 * cfg.dt, cfg.dt)
    b = exact.beta0(t, model)
    write_csv(os.path.join(outdir, "exact.csv"), ["t", "beta0", "rho0"],
              [t, b, b / SQRT_TWO_PI])
    diag = {"rho_lim": exact.rho_lim(model) if cfg.kappa > 0 else None,
            "saturation": model.saturation}
    c = model.saturation
    if 0 < c < 0.5:
        diag["t_max"] = exact.t_max(model)
    if c > 0:
        alpha = 0.95 if c < 1.0 else 1.05
        diag["alpha"] = alpha
        diag["t_quasi_steady"] = exact.t_quasi_steady(alpha, model)
    return {"csv": ["exact.csv"], "diagnostics": diag}


def run_spectral(cfg: ScenarioConfig, outdir: str) -> dict:
    kern = _kernel(cfg)
    state0 = spectral.project_initial(scenario_initial(cfg), cfg.J)
    rates = spectral.DiffusiveRates(cfg.a, cfg.D)
    traj = spectral.integrate(state0, rates, kern, cfg.kappa, cfg.t_end,
                              cfg.dt, store_every=_series_stride(cfg))
    traj.to_csv(os.path.join(outdir, "trajectory.csv"))
    s = gridsim.grid_nodes(cfg.N)
    names = ["trajectory.csv"]
    for t_snap in cfg.snapshot_times or (cfg.t_end,):
        rho = spectral.reconstruct(traj.at_time(float(t_snap)), s)
        name = _snapshot_name(float(t_snap))
        write_csv(os.path.join(outdir, name), ["s", "rho"], [s, rho])
        names.append(name)
    return {"csv": names, "diagnostics": {"reality_drift": traj.reality_drift}}


def run_grid(cfg: ScenarioConfig, outdir: str) -> dict:
    kern = _kernel(cfg)
    rho_phi = scenario_initial(cfg)
    state = gridsim.GridState(cfg.N, rho_phi(gridsim.grid_nodes(cfg.N)))
    stride = _series_stride(cfg)
    snap_times = sorted(set(float(t) for t in cfg.snapshot_times) | {cfg.t_end})
    names = []
    series_t, series_mass, series_hom, series_peaks = [], [], [], []
    n_steps = int(round(cfg.t_end / cfg.dt))

    def record(st):
        series_t.append(st.t)
        series_mass.append(gridsim.total_mass(st))
        series_hom.append(analysis.homogeneity(st.rho))
        series_peaks.append(analysis.count_peaks(st.rho))

    record(state)
    remaining = [t for t in snap_times if t > 0]
    for i in range(n_steps):
        state = gridsim.step(state, kern, cfg.a, cfg.kappa, cfg.D, cfg.dt,
                             cfg.scheme, cfg.backend)
        if (i + 1) % stride == 0 or i == n_steps - 1:
            record(state)
        while remaining and state.t >= remaining[0] - 0.5 * cfg.dt:
            name = _snapshot_name(remaining.pop(0))
            gridsim.snapshot_to_csv(os.path.join(outdir, name), state)
            names.append(name)
    if 0.0 in snap_times:
        name = _snapshot_name(0.0)
        write_csv(os.path.join(outdir, name), ["s", "rho"],
                  [gridsim.grid_nodes(cfg.N), rho_phi(gridsim.grid_nodes(cfg.N))])
        names.append(name)
    write_csv(os.path.join(outdir, "series.csv"),
              ["t", "mass", "homogeneity", "n_peaks"],
              [series_t, series_mass, series_hom, series_peaks])
    names.append("series.csv")
    diag = {
        "n_peaks_final": analysis.count_peaks(state.rho),
        "homogeneity_final": analysis.homogeneity(state.rho),
        "mass_final": gridsim.total_mass(state),
        "clamped_nodes": state.clamped,
    }
    return {"csv": names, "diagnostics": diag, "final_state": state}


def _expansion(cfg: ScenarioConfig) -> asymptotics.AsymptoticExpansion:
    if cfg.initial_kind != "gaussian_bump":
        raise ConfigError(
            "initial.kind: the asymptotic solver needs gaussian_bump data "
            f"(homogeneous background plus 1/T bump), got {cfg.initial_kind!r}")
    width = cfg.initial_width
    beta1 = asymptotics.beta1_initial(lambda s: np.exp(-np.asarray(s) ** 2 / width),
                                      cfg.J)
    return asymptotics.AsymptoticExpansion(cfg.T, cfg.beta00, beta1, cfg.J,
                                           _kernel(cfg), cfg.a, cfg.kappa, cfg.D)


def run_asymptotic(cfg: ScenarioConfig, outdir: str) -> dict:
    expn = _expansion(cfg)
    s = gridsim.grid_nodes(cfg.N)
    names = []
    for t_snap in cfg.snapshot_times or (cfg.t_end,):
        rho = asymptotics.composite_density(float(t_snap), s, expn)
        name = _snapshot_name(float(t_snap))
        write_csv(os.path.join(outdir, name), ["s", "rho"], [s, rho])
        names.append(name)
    return {"csv": names, "diagnostics": {"saturation": expn.model.saturation}}


def run_manifold(cfg: ScenarioConfig, outdir: str) -> dict:
    spec = manifold.ConvectionSpec(
        a=manifold.constant_rate(cfg.a),
        b=manifold.gaussian_influence(cfg.b0, cfg.gamma),
        kappa=cfg.kappa,
        V_x=manifold.linear_drag(cfg.k0) if cfg.k0 > 0 else None,
    )
    state0 = manifold.circle_state(cfg.R, cfg.N, scenario_initial(cfg))
    times, rho_hist, X_hist = manifold.integrate(
        state0, spec, cfg.t_end, cfg.dt, store_every=_series_stride(cfg))
    manifold.trajectory_to_csv(os.path.join(outdir, "trajectory.csv"),
                               times, state0.s, rho_hist, X_hist)
    ds = state0.s[1] - state0.s[0]
    diag = {
        "n_peaks_final": analysis.count_peaks(rho_hist[-1]),
        "homogeneity_final": analysis.homogeneity(rho_hist[-1]),
        "mass_final": float(ds * np.sum(rho_hist[-1])),
        "radius_final": float(np.mean(np.linalg.norm(X_hist[-1], axis=1))),
    }
    return {"csv": ["trajectory.csv"], "diagnostics": diag}


def run_planar2d(cfg: ScenarioConfig, outdir: str) -> dict:
    kern2d = planar.GaussianKernel2D(cfg.b0, cfg.gamma)
    amplitude = 1.0 / (cfg.sigma * math.sqrt(TWO_PI) * cfg.R * SQRT_TWO_PI)
    field = planar.gaussian_ring(cfg.L, cfg.n2d, cfg.R, cfg.sigma,
                                 amplitude * cfg.beta00, cfg.D)
    field = planar.run2d(field, kern2d, cfg.a, cfg.kappa, cfg.dt, cfg.t_end)
    planar.field_to_csv(os.path.join(outdir, "field.csv"), field)
    s, rho = planar.extract_sld(field, cfg.N)
    write_csv(os.path.join(outdir, "extraction.csv"), ["s", "rho"], [s, rho])
    m, xbar = planar.moments(field)
    diag = {"mass": m, "first_moment": list(xbar),
            "boundary_mass_fraction": planar.boundary_mass_fraction(field)}
    return {"csv": ["field.csv", "extraction.csv"], "diagnostics": diag}


RUNNERS = {
    "exact": run_exact,
    "spectral": run_spectral,
    "grid": run_grid,
    "asymptotic": run_asymptotic,
    "manifold": run_manifold,
    "planar2d": run_planar2d,
}


def run_scenario(cfg: ScenarioConfig, outdir: str = None,
                 plot_script: bool = False, extra: str = None) -> dict:
    cfg.validate()
    outdir = outdir or cfg.outdir
    os.makedirs(outdir, exist_ok=True)
    start = time.perf_counter()
    result = RUNNERS[cfg.solver](cfg, outdir)
    if extra == "compare_asymptotic" and cfg.solver == "grid":
        _compare_with_asymptotic(cfg, outdir, result)
    if extra == "ring_csv" and cfg.solver == "grid":
        _emit_ring_csv(cfg, outdir, result)
    wall = time.perf_counter() - start
    _write_manifest(outdir, cfg, wall, {"diagnostics": result["diagnostics"],
                                        "artifacts": result["csv"]})
    if plot_script:
        snaps = [n for n in result["csv"] if n.startswith("snapshot")]
        _emit_plot_script(outdir, snaps or result["csv"][:1],
                          f"{cfg.label} ({cfg.solver})")
    return result


def _compare_with_asymptotic(cfg, outdir, result):
    expn = _expansion(cfg)
    state = result["final_state"]
    rho_asym = asymptotics.composite_density(state.t, state.s, expn)
    write_csv(os.path.join(outdir, "asymptotic_comparison.csv"),
              ["s", "rho_grid", "rho_asymptotic"],
              [state.s, state.rho, rho_asym])
    result["csv"].append("asymptotic_comparison.csv")
    result["diagnostics"]["rel_linf_vs_asymptotic"] = \
        analysis.relative_linf(state.rho, rho_asym)


def _emit_ring_csv(cfg, outdir, result):
    state = result["final_state"]
    write_csv(os.path.join(outdir, "ring.csv"), ["s", "x", "y", "rho"],
              [state.s, cfg.R * np.cos(state.s), cfg.R * np.sin(state.s),
               state.rho])
    result["csv"].append("ring.csv")


def run_sweep(cfg: ScenarioConfig, axis: str, values, outdir: str,
              plot_script: bool = False) -> list:
    os.makedirs(outdir, exist_ok=True)
    jobs = []
    for value in values:
        sub = dataclasses.replace(cfg)
        apply_assignment(sub, axis, str(value))
        sub.validate()
        jobs.append((value, sub, os.path.join(outdir, f"{axis.split('.')[-1]}_{value:g}")))
    if _mode() == "parallel":
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor() as pool:
            results = list(pool.map(_sweep_entry, jobs))
    else:
        results = [_sweep_entry(job) for job in jobs]
    rows = list(zip(*[(v, d["n_peaks_final"], d["homogeneity_final"],
                       d["mass_final"]) for v, d in results])) if results else []
    write_csv(os.path.join(outdir, "summary.csv"),
              ["value", "n_peaks", "homogeneity", "mass"], rows)
    if plot_script:
        _emit_plot_script(outdir, ["summary.csv"], f"sweep over {axis}")
    return results


def _sweep_entry(job):
    value, sub, subdir = job
    result = run_scenario(sub, subdir)
    diag = result["diagnostics"]
    if "n_peaks_final" not in diag:
        state = result.get("final_state")
        if state is not None:
            diag["n_peaks_final"] = analysis.count_peaks(state.rho)
    diag.setdefault("n_peaks_final", 0)
    diag.setdefault("homogeneity_final", 0.0)
    diag.setdefault("mass_final", 0.0)
    return value, diag


def compare_bundles(dir_a: str, dir_b: str, outdir: str = None,
                    tol_linf: float = None) -> dict:
    """Relative L-inf/L2 errors between matching snapshot CSVs."""
    names_a = sorted(n for n in os.listdir(dir_a) if n.startswith("snapshot"))
    names_b = sorted(n for n in os.listdir(dir_b) if n.startswith("snapshot"))
    common = sorted(set(names_a) & set(names_b))
    if not common:
        raise ConfigError("bundles share no snapshot files")
    report = {}
    for name in common:
        _, (s_a, rho_a) = read_csv(os.path.join(dir_a, name))
        _, (s_b, rho_b) = read_csv(os.path.join(dir_b, name))
        if len(s_a) != len(s_b) or not np.allclose(s_a, s_b):
            # periodic resample of b onto a's grid
            order = np.argsort(s_b)
            sb, rb = s_b[order], rho_b[order]
            sb = np.concatenate([sb, [sb[0] + TWO_PI]])
            rb = np.concatenate([rb, [rb[0]]])
            rho_b = np.interp(np.mod(s_a - sb[0], TWO_PI) + sb[0], sb, rb)
        scale = float(np.max(np.abs(rho_b)))
        linf_rel = float(np.max(np.abs(rho_a - rho_b))) / scale
        l2_rel = float(np.linalg.norm(rho_a - rho_b) / np.linalg.norm(rho_b))
        report[name] = {"rel_linf": linf_rel, "rel_l2": l2_rel}
    if outdir:
        os.makedirs(outdir, exist_ok=True)
        names = sorted(report)
        write_csv(os.path.join(outdir, "compare.csv"),
                  ["snapshot_index", "rel_linf", "rel_l2"],
                  [np.arange(len(names)),
                   [report[n]["rel_linf"] for n in names],
                   [report[n]["rel_l2"] for n in names]])
    passed = True
    for name, entry in sorted(report.items()):
        verdict = ""
        if tol_linf is not None:
            ok = entry["rel_linf"] <= tol_linf
            passed = passed and ok
            verdict = "  PASS" if ok else "  FAIL"
        print(f"{name}: rel_linf={entry['rel_linf']:.3e} "
              f"rel_l2={entry['rel_l2']:.3e}{verdict}")
    report["_passed"] = passed
    return report


def preset_text(name: str) -> str:
    ref = resources.files("nlfkpp").joinpath(f"presets/{name}.cfg")
    if not ref.is_file():
        raise ConfigError(f"preset: unknown preset {name!r}")
    return ref.read_text()


def list_presets():
    root = resources.files("nlfkpp").joinpath("presets")
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlfkpp",
        description="Scenario runner for nonlocal population dynamics on "
                    "concentration manifolds.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a dotted configuration key")
        p.add_argument("--outdir", help="output directory")
        p.add_argument("--plot-script", action="store_true",
                       help="emit a gnuplot script next to the CSVs")

    for name in ("exact", "spectral", "simulate", "manifold", "planar2d",
                 "asymptotic"):
        common(sub.add_parser(name, help=f"run the {name} solver"))

    p_cmp = sub.add_parser("compare", help="compare two artifact bundles")
    p_cmp.add_argument("dir_a")
    p_cmp.add_argument("dir_b")
    p_cmp.add_argument("--outdir")
    p_cmp.add_argument("--tol-linf", type=float, default=None)

    p_sweep = sub.add_parser("sweep", help="run a scenario over an axis")
    common(p_sweep)
    p_sweep.add_argument("--axis", required=True, metavar="KEY")
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated axis values")

    p_preset = sub.add_parser("preset", help="run a committed preset")
    p_preset.add_argument("name", nargs="?")
    p_preset.add_argument("--outdir")
    p_preset.add_argument("--set", action="append", default=[],
                          metavar="KEY=VALUE")
    p_preset.add_argument("--plot-script", action="store_true")
    p_preset.add_argument("--list", action="store_true",
                          help="list available presets and exit")
    return parser


SOLVER_COMMANDS = {
    "exact": "exact", "spectral": "spectral", "simulate": "grid",
    "manifold": "manifold", "planar2d": "planar2d", "asymptotic": "asymptotic",
}


def _load_cfg(args) -> ScenarioConfig:
    if args.config:
        cfg = load_config(args.config, args.set)
    else:
        cfg = ScenarioConfig()
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set {item!r}: expected key=value")
            key, _, value = item.partition("=")
            apply_assignment(cfg, key, value)
        cfg.validate()
    return cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command in SOLVER_COMMANDS:
            cfg = _load_cfg(args)
            cfg.solver = SOLVER_COMMANDS[args.command]
            run_scenario(cfg, args.outdir, args.plot_script)
            return 0
        if args.command == "compare":
            report = compare_bundles(args.dir_a, args.dir_b, args.outdir,
                                     args.tol_linf)
            return 0 if report["_passed"] else 1
        if args.command == "sweep":
            cfg = _load_cfg(args)
            values = [float(v) for v in args.values.split(",")]
            run_sweep(cfg, args.axis, values, args.outdir or cfg.outdir,
                      args.plot_script)
            return 0
        if args.command == "preset":
            if args.list:
                for name in list_presets():
                    print(name)
                return 0
            if not args.name:
                raise ConfigError("preset: a preset name is required")
            cfg = parse_config_text(preset_text(args.name))
            for item in args.set:
                key, _, value = item.partition("=")
                apply_assignment(cfg, key, value)
            cfg.label = args.name
            cfg.validate()
            outdir = args.outdir or os.path.join(cfg.outdir, args.name)
            if args.name in PRESET_SWEEPS:
                axis, values = PRESET_SWEEPS[args.name]
                run_sweep(cfg, axis, values, outdir, args.plot_script)
            else:
                run_scenario(cfg, outdir, args.plot_script,
                             PRESET_EXTRAS.get(args.name))
            return 0
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, OverflowError) as exc:
        print(f"solver abort: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
