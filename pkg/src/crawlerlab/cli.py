"""Command-line front end: config ingestion, orchestration, CSV/JSON reports.

Commands mirror the analysis modules: `simulate` (trajectory + cycle
metrics), `bifurcate` (closed forms with oracle deltas), `gsp` (fold data),
`hb` (describing-function sweep + optimum), `sweep` (parameter grids with
per-point regime classification). Exit codes: 0 success, 1 numerical
failure, 2 configuration error. All floats are serialized with 17
significant digits so reruns are byte-comparable.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from . import bifurcation as bif
from . import describing as dsc
from . import gsp
from . import simulate as sim
from .equilibria import composite_gain, fixed_points
from .errors import (AssumptionViolation, ConfigError, CrawlerlabError,
                     NoCycleError)
from .params import Groups, groups_from_mapping


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        if math.isnan(x):
            return "null"
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return f"{float(x):.17g}"
    raise TypeError(f"cannot serialize {type(x)!r}")


def _json17(obj, indent=0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        items = ",\n".join(
            f'{pad}  "{k}": {_json17(v, indent + 1)}' for k, v in obj.items())
        return "{\n" + items + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json17(v, indent) for v in obj) + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    return _fmt(obj)


def write_json(path: str, obj: dict):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_json17(obj) + "\n")


def _fmt_csv(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (float, np.floating)) and math.isnan(x):
        return "nan"
    return _fmt(x)


def write_csv(path: str, header, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt_csv(v) for v in row) + "\n")


def _check_keys(block: dict, allowed: set, where: str):
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


_COMMON_KEYS = {"groups", "dimensional", "seed"}


def load_config(path: str, command: str) -> dict:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be an object")
    extra = {
        "simulate": {"x0", "t_end", "method", "skip", "t_eval_dt"},
        "bifurcate": {"with_l1"},
        "gsp": set(),
        "hb": {"M", "z_grid"},
        "sweep": {"sweep", "simulate", "workers", "x0", "t_end", "method",
                  "skip"},
    }[command]
    _check_keys(cfg, _COMMON_KEYS | extra, "config")
    param_block = {k: cfg[k] for k in ("groups", "dimensional") if k in cfg}
    cfg["_groups"] = groups_from_mapping(param_block)
    return cfg


def cmd_simulate(cfg: dict, out: str, tol) -> int:
    g: Groups = cfg["_groups"]
    x0 = [float(v) for v in cfg.get("x0", [2.0, 0.0, 0.0, 0.0])]
    t_end = float(cfg.get("t_end", 200.0))
    method = cfg.get("method", "rk45")
    skip = float(cfg.get("skip", 20.0))
    t_eval = None
    if "t_eval_dt" in cfg:
        dt = float(cfg["t_eval_dt"])
        t_eval = np.arange(0.0, t_end + 0.5 * dt, dt)
        t_eval[-1] = min(t_eval[-1], t_end)
    traj = sim.integrate(x0, g, t_end, tol=tol, method=method, t_eval=t_eval)
    sim.write_trajectory_csv(traj, os.path.join(out, "trajectory.csv"))
    metrics = {"t_end": t_end, "method": method, "nfev": traj.stats.nfev}
    try:
        m = sim.cycle_metrics(traj, skip=skip)
        metrics.update(regime="crawling", period=m.period,
                       period_std=m.period_std, omega=m.omega, S_amp=m.S_amp,
                       v_com_bar=m.v_com_bar, n_events=m.n_events,
                       converged=m.converged,
                       V_min=m.V_extrema[0], V_max=m.V_extrema[1])
    except NoCycleError:
        terminal = traj.states[-1]
        metrics.update(regime="resting",
                       terminal_state={
                           "V": terminal[0], "v_com": terminal[1],
                           "s": terminal[2], "v_s": terminal[3],
                           "u_com": terminal[4]})
    write_json(os.path.join(out, "metrics.json"), metrics)
    return 0


def cmd_bifurcate(cfg: dict, out: str, strict: bool) -> int:
    g: Groups = cfg["_groups"]
    with_l1 = bool(cfg.get("with_l1", True))
    flags = {"positivity": bif.positivity_holds(g),
             "gain_window": bif.gain_window_holds(g),
             "strict_gain_window": bif.strict_gain_window_holds(g),
             "anisotropy_window": bif.anisotropy_window_holds(g)}
    if strict and not all(flags.values()):
        failed = [k for k, v in flags.items() if not v]
        print(f"assumption violation in strict mode: {failed}",
              file=sys.stderr)
        return 1
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        gamma = composite_gain(g)
        pi_s_H = bif.hopf_gain(g)
        omega_H = bif.hopf_frequency(g, pi_s_H)
        trans = bif.transversality(g, pi_s_H, omega_H)
        pi_s_P = bif.pitchfork_gain(g)
        l1 = bif.lyapunov_first_coefficient(g, pi_s_H, omega_H) \
            if with_l1 else math.nan
        oracle = {
            "hopf_gain_rel": abs(bif.hopf_gain_numeric(g) - pi_s_H) / pi_s_H,
            "transversality_rel":
                abs(bif.transversality_numeric(g, pi_s_H) - trans)
                / abs(trans),
        }
        g_p = g.with_pi_s(pi_s_P)
        from .equilibria import jacobian
        det = np.linalg.det(jacobian(np.zeros(4), g_p))
        nz = bif.pitchfork_origin_eigenvalues(g)
        det_scale = abs(np.prod([e for e in nz if e != 0]))
        oracle["pitchfork_det_rel"] = abs(det) / det_scale
    report = {
        "gamma": gamma, "pi_s_H": pi_s_H, "omega_H": omega_H,
        "transversality": trans, "l1": l1, "pi_s_P": pi_s_P,
        "assumption_flags": flags, "oracle_deltas": oracle,
    }
    write_json(os.path.join(out, "bifurcation.json"), report)
    return 0


def cmd_gsp(cfg: dict, out: str) -> int:
    g: Groups = cfg["_groups"]
    fd = gsp.folds(g)
    report = {
        "V_F_plus": fd.V_F_plus, "V_F_minus": fd.V_F_minus,
        "s_F_plus": fd.s_F_plus, "s_F_minus": fd.s_F_minus,
        "classification": fd.classification,
        "folded_saddle_condition": gsp.folded_saddle_condition(g),
        "sing_eigs_real": [float(e.real) for e in fd.sing_eigs],
        "sing_eigs_imag": [float(e.imag) for e in fd.sing_eigs],
    }
    write_json(os.path.join(out, "gsp.json"), report)
    return 0


def cmd_hb(cfg: dict, out: str) -> int:
    g: Groups = cfg["_groups"]
    if "M" not in cfg:
        raise ConfigError("hb config requires the relay magnitude 'M'")
    M = float(cfg["M"])
    z_grid = [float(z) for z in cfg.get(
        "z_grid", [0.05 * k for k in range(1, 21)])]
    opt = dsc.optimize(g, M)
    rows = dsc.z_sweep(g, M, z_grid)
    write_csv(os.path.join(out, "hb_sweep.csv"),
              ["Z", "omega", "S", "v_com_bar", "P_bar", "phi_rel"],
              [(r.Z, r.omega, r.S, r.v_com_bar, r.P_bar, r.phi_rel)
               for r in rows])
    write_json(os.path.join(out, "hb_optimum.json"), {
        "Z_star": opt.Z_star, "S_star": opt.S_star,
        "beta_star": opt.beta_star, "omega_star": opt.omega_star,
        "v_com_bar_star": opt.v_com_bar_star, "P_bar_star": opt.P_bar_star,
        "alpha": opt.alpha, "eta": opt.eta, "Delta": opt.Delta,
    })
    return 0


_SWEEPABLE = {"zeta", "pi_f", "pi_V", "pi_eps", "n_f", "pi_c", "pi_l",
              "pi_s", "eps"}


def _sweep_point(g: Groups, cfg: dict, tol):
    row = {}
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            verdict = bif.resting_regime_check(g)
        row.update(regime=verdict.verdict, pi_s_H=verdict.pi_s_H,
                   max_real_part=verdict.max_real_part)
    except CrawlerlabError as exc:
        row.update(regime="error", error=str(exc))
        return row
    if cfg.get("simulate", False) and row["regime"] == "crawling":
        try:
            traj = sim.integrate(cfg.get("x0", [2.0, 0.0, 0.0, 0.0]), g,
                                 float(cfg.get("t_end", 200.0)), tol=tol,
                                 method=cfg.get("method", "lsoda"))
            m = sim.cycle_metrics(traj, skip=float(cfg.get("skip", 20.0)))
            row.update(period=m.period, omega=m.omega, S_amp=m.S_amp,
                       v_com_bar=m.v_com_bar)
        except CrawlerlabError as exc:
            row["error"] = str(exc)
    return row


def cmd_sweep(cfg: dict, out: str, tol) -> int:
    g: Groups = cfg["_groups"]
    spec = cfg.get("sweep")
    if not isinstance(spec, dict):
        raise ConfigError("sweep config requires a 'sweep' object")
    _check_keys(spec, {"param", "values", "start", "stop", "count"}, "sweep")
    param = spec.get("param")
    if param not in _SWEEPABLE:
        raise ConfigError(f"sweep param must be one of {sorted(_SWEEPABLE)}")
    if "values" in spec:
        values = [float(v) for v in spec["values"]]
    elif {"start", "stop", "count"} <= set(spec):
        values = list(np.linspace(float(spec["start"]), float(spec["stop"]),
                                  int(spec["count"])))
    else:
        raise ConfigError("sweep needs 'values' or start/stop/count")
    workers = int(cfg.get("workers", 1))
    points = [replace(g, **{param: v}) for v in values]
    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda gp: _sweep_point(gp, cfg, tol),
                                 points))
    else:
        rows = [_sweep_point(gp, cfg, tol) for gp in points]
    header = ["param", "value", "regime", "pi_s_H", "max_real_part",
              "period", "omega", "S_amp", "v_com_bar", "error"]
    table = []
    for v, row in zip(values, rows):
        table.append((param, v, row.get("regime", ""),
                      row.get("pi_s_H", math.nan),
                      row.get("max_real_part", math.nan),
                      row.get("period", math.nan), row.get("omega", math.nan),
                      row.get("S_amp", math.nan),
                      row.get("v_com_bar", math.nan),
                      row.get("error", "")))
    write_csv(os.path.join(out, "sweep.csv"), header, table)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crawlerlab",
        description="Analysis toolkit for the spiking-controller soft "
                    "crawler closed loop")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "bifurcate", "gsp", "hb", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--strict", action="store_true")
        p.add_argument("--tol-abs", type=float, default=1e-9)
        p.add_argument("--tol-rel", type=float, default=1e-7)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    tol = (args.tol_abs, args.tol_rel)
    try:
        cfg = load_config(args.config, args.command)
        os.makedirs(args.out, exist_ok=True)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.out, tol)
        if args.command == "bifurcate":
            return cmd_bifurcate(cfg, args.out, args.strict)
        if args.command == "gsp":
            return cmd_gsp(cfg, args.out)
        if args.command == "hb":
            return cmd_hb(cfg, args.out)
        return cmd_sweep(cfg, args.out, tol)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except AssumptionViolation as exc:
        print(f"assumption violation: {exc}", file=sys.stderr)
        return 1
    except CrawlerlabError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
