"""Command-line front end: ``swirlab {simulate,criterion,oscillation,constants,verify}``.

Configuration is a JSON document (``--config``) plus ``key=value``
overrides with dotted keys (``grid.n_rho=64``, ``gauge.alpha=0.004``).
Values parse as JSON when they can, else as strings.  Outputs go to
``--out``, else ``$SWIRLAB_OUTPUT``, else ``./swirlab_out``.

Exit codes: 0 completed (criterion failures are data), 1 configuration or
input error, 2 solver error.
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import itertools
import json
import logging
import math
import os
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import __version__
from .criterion import GaugeParams, R_GAUGE_MAX, dyadic_radii, scan_condition
from .dynamics import SolverConfig, run_scenario, stable_dt
from .errors import ContractError, DomainError, PreconditionError, SolverError, StepSizeError
from .geometry import CylGrid
from .moser import (LemmaInputs, MoserInputs, const_thresholds, moser_constants, pi_from_swirl,
                    verify_growth_lemmas)
from .oscillation import (dyadic_scan, fit_decay, max_principle_monitor, records_to_csv)
from .scenarios import SCENARIOS, make_scenario
from .snapshots import SnapshotSeries

log = logging.getLogger("swirlab")

ENV_OUTPUT = "SWIRLAB_OUTPUT"

DEFAULTS = {
    "scenario": "lamb_oseen",
    "scenario_params": {},
    "grid": {"rho_max": 1.0, "z_min": -1.0, "z_max": 1.0, "n_rho": 32, "n_z": 64},
    "solver": {"dt": None, "t_end": 0.05, "cfl_safety": 0.9, "pressure_tol": 1e-10,
               "max_pressure_iters": 10},
    "run": {"stride": 10, "flow": True, "evolve_swirl": True},
    "gauge": {"c_star": 1.0, "alpha": 1.0 / 224.0},
    "criterion": {"probes": [0.0], "probe_time": None, "r_max": None, "count": 4},
    "oscillation": {"z0": 0.0, "t0": None, "R": None, "r_min": None},
    "verify": {"z0": 0.0, "t0": None, "R": None, "c": 1.0, "M0": 2.0},
    "constants": {},
    "seed": 0,
}


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_override(cfg: dict, item: str) -> None:
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not key=value")
    key, val = item.split("=", 1)
    parts = key.strip().split(".")
    node = cfg
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"{key}: {p} is not a section")
    node[parts[-1]] = parse_value(val)


def load_config(path, overrides) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    if path:
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        cfg = _merge(cfg, doc)
    for item in overrides or []:
        apply_override(cfg, item)
    validate(cfg)
    return cfg


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


def gauge_of(cfg) -> GaugeParams:
    g = cfg["gauge"]
    try:
        return GaugeParams(float(g["c_star"]), float(g["alpha"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"gauge: {exc}") from None


def grid_of(cfg) -> CylGrid:
    g = cfg["grid"]
    try:
        return CylGrid(float(g["rho_max"]), float(g["z_min"]), float(g["z_max"]),
                       int(g["n_rho"]), int(g["n_z"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"grid: {exc}") from None


def validate(cfg: dict) -> None:
    try:
        gauge_of(cfg)
    except DomainError as exc:
        raise ConfigError(f"gauge: {exc}") from None
    try:
        grid_of(cfg)
    except DomainError as exc:
        raise ConfigError(f"grid: {exc}") from None
    if cfg["scenario"] not in SCENARIOS:
        raise ConfigError(f"unknown scenario {cfg['scenario']!r}; choose from {sorted(SCENARIOS)}")
    r = cfg["criterion"].get("r_max")
    if r is not None and not 0 < float(r) <= R_GAUGE_MAX:
        raise ConfigError(f"criterion.r_max={r} must lie in (0, 2/3]")


def out_root(args) -> Path:
    root = args.out or os.environ.get(ENV_OUTPUT) or "swirlab_out"
    p = Path(root)
    try:
        p.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"output directory {p} is not writable: {exc}") from None
    return p


def _dump(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_plain) + "\n")


def _plain(o):
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def _load_series(path) -> SnapshotSeries:
    if path is None:
        raise ConfigError("--snapshots is required")
    try:
        return SnapshotSeries.load(path)
    except (FileNotFoundError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot load snapshots from {path}: {exc}") from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args) -> int:
    cfg = load_config(args.config, args.set)
    grid = grid_of(cfg)
    try:
        scenario = make_scenario(cfg["scenario"], **cfg["scenario_params"])
    except TypeError as exc:
        raise ConfigError(f"scenario_params: {exc}") from None
    s = cfg["solver"]
    dt = s.get("dt")
    if dt is None:
        init = scenario.initial_fields(grid)
        dt = stable_dt(grid, init["v_rho"], init["v_3"], float(s["cfl_safety"]), swirl_drift=True)
        vmax = float(np.sqrt(init["v_rho"]**2 + init["v_phi"]**2 + init["v_3"]**2).max())
        if vmax > 0:
            dt = min(dt, float(s["cfl_safety"]) * grid.h / vmax)
    try:
        solver = SolverConfig(float(dt), float(s["t_end"]), 1.0, float(s["cfl_safety"]),
                              float(s["pressure_tol"]), int(s["max_pressure_iters"]))
    except DomainError as exc:
        raise ConfigError(f"solver: {exc}") from None
    run = cfg["run"]
    out = out_root(args) / "snapshots"
    result = run_scenario(scenario, grid, solver, int(run["stride"]), out_dir=out,
                          evolve_swirl=bool(run["evolve_swirl"]), flow=bool(run["flow"]))
    recs = result.records
    manifest = {
        "version": __version__,
        "config": cfg,
        "config_hash": config_hash(cfg),
        "snapshots": str(out),
        "n_snapshots": len(result.series),
        "n_steps": len(recs) - 1,
        "dt": result.series.meta["dt"],
        "residuals": {
            "max_div_face": max(r["div_face"] for r in recs),
            "max_div_node": max(r["div_node"] for r in recs),
        },
        "max_pressure_iters": max(r["pressure_iters"] for r in recs),
        "max_speed": max(r["max_speed"] for r in recs),
    }
    root = out.parent
    _dump(root / "manifest.json", manifest)
    with open(root / "steps.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(recs[0]), lineterminator="\n")
        w.writeheader()
        for r in recs:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    print(f"simulate: {len(recs) - 1} steps, {len(result.series)} snapshots -> {out}")
    return 0


def _auto_R(series: SnapshotSeries, z0: float, t0: float) -> float:
    """Largest reference radius with ``Q(2R)`` inside the data, capped at 1/6."""
    g = series.grid
    zspan = min(z0 - g.z_min, g.z_max - z0) - g.h_z
    tspan = t0 - series.times[0]
    return min(1.0 / 6.0, 0.5 * (g.rho_max - g.h_rho), 0.5 * zspan,
               0.5 * math.sqrt(max(tspan, 0.0)))


def cmd_criterion(args) -> int:
    cfg = load_config(args.config, args.set)
    series = _load_series(args.snapshots)
    c = cfg["criterion"]
    t = series.times[-1] if c.get("probe_time") is None else float(c["probe_time"])
    probes = [(float(z), t) for z in c["probes"]]
    g = series.grid
    r_max = c.get("r_max")
    if r_max is None:
        zspan = min(min(z - g.z_min, g.z_max - z) for z, _ in probes) - g.h_z
        r_max = min(R_GAUGE_MAX, g.rho_max - g.h_rho, zspan, math.sqrt(t - series.times[0]))
    if not r_max > 0:
        raise ConfigError("no admissible radius for the probes")
    radii = dyadic_radii(float(r_max), int(c["count"]))
    try:
        report = scan_condition(series, probes, radii, gauge_of(cfg))
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    root = out_root(args)
    (root / "criterion.json").write_text(report.to_json() + "\n")
    (root / "criterion.csv").write_text(report.to_csv())
    print(f"criterion: worst margin {report.worst_margin:.6g}, "
          f"{'pass' if report.passed else 'fail'} -> {root / 'criterion.json'}")
    return 0


def cmd_oscillation(args) -> int:
    cfg = load_config(args.config, args.set)
    series = _load_series(args.snapshots)
    o = cfg["oscillation"]
    z0 = float(o["z0"])
    t0 = series.times[-1] if o.get("t0") is None else float(o["t0"])
    R = _auto_R(series, z0, t0) if o.get("R") is None else float(o["R"])
    g = series.grid
    r_min = 4 * max(g.h_rho, g.h_z) if o.get("r_min") is None else float(o["r_min"])
    if not series.has("swirl"):
        raise ConfigError("snapshots carry no swirl")
    if r_min > 2 * R:
        raise ConfigError(f"empty scan: r_min={r_min:.4g} exceeds 2R={2 * R:.4g}")
    try:
        recs = dyadic_scan(series, z0, t0, r_min, 2 * R)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    if not recs:
        raise ConfigError("empty scan")
    root = out_root(args)
    (root / "oscillation.csv").write_text(records_to_csv(recs))
    try:
        fit = fit_decay(recs, R)
        doc = json.loads(fit.to_json())
    except DomainError as exc:
        doc = {"error": str(exc)}
    mp = max_principle_monitor(series)
    doc["max_principle"] = {"sigma0": mp.sigma0, "tol_rel": mp.tol_rel,
                            "sup_abs": mp.sup_abs.tolist(), "times": mp.times.tolist(),
                            "first_violation": mp.first_violation}
    _dump(root / "oscillation.json", doc)
    print(f"oscillation: {len(recs)} radii, C2 = {doc.get('C2')} -> {root / 'oscillation.json'}")
    return 0


SWEEP_KEYS = {f.name for f in fields(MoserInputs)} - {"gauge"} | {"c_star", "alpha"}


def parse_range(key: str, text) -> list:
    """``a:b:n`` (linspace), ``x,y,z`` (list) or a single number."""
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, list):
        return [float(x) for x in text]
    s = str(text)
    try:
        if ":" in s:
            a, b, n = s.split(":")
            n = int(n)
            if n < 1:
                raise ValueError
            return [float(x) for x in np.linspace(float(a), float(b), n)]
        return [float(x) for x in s.split(",")]
    except ValueError:
        raise ConfigError(f"malformed range for {key}: {text!r}") from None


CONST_COLUMNS = ["c1", "c1_prime", "mu_star", "kappa0", "delta0_out", "theta0", "s",
                 "beta2_log2", "beta0_log", "N", "hatbeta2_ln"]


def cmd_constants(args) -> int:
    cfg = load_config(args.config, None)
    spec = dict(cfg.get("constants") or {})
    for item in args.sweep or []:
        if "=" not in item:
            raise ConfigError(f"sweep entry {item!r} is not key=range")
        k, v = item.split("=", 1)
        spec[k.strip()] = v
    unknown = sorted(set(spec) - SWEEP_KEYS)
    if unknown:
        raise ConfigError(f"unknown constants inputs {unknown}; valid: {sorted(SWEEP_KEYS)}")
    keys = sorted(spec)
    ranges = [parse_range(k, spec[k]) for k in keys]
    base_gauge = cfg["gauge"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys + CONST_COLUMNS + ["error"])
    n = 0
    for combo in itertools.product(*ranges):
        vals = dict(zip(keys, combo))
        row = [repr(v) for v in combo]
        try:
            gauge = GaugeParams(vals.pop("c_star", float(base_gauge["c_star"])),
                                vals.pop("alpha", float(base_gauge["alpha"])))
            m = moser_constants(MoserInputs(gauge=gauge, **vals))
            d = m.to_dict()
            row += ["" if d[k] is None else repr(d[k]) for k in CONST_COLUMNS] + [""]
        except (DomainError, PreconditionError, ValueError, OverflowError) as exc:
            row += [""] * len(CONST_COLUMNS) + [str(exc)]
        w.writerow(row)
        n += 1
    root = out_root(args)
    (root / "constants.csv").write_text(buf.getvalue())
    gauge = gauge_of(cfg)
    th = const_thresholds(gauge)
    _dump(root / "thresholds.json", {k: t.to_dict() for k, t in th.items()})
    print(f"constants: {n} rows -> {root / 'constants.csv'}")
    return 0


def cmd_verify(args) -> int:
    cfg = load_config(args.config, args.set)
    series = _load_series(args.snapshots)
    v = cfg["verify"]
    z0 = float(v["z0"])
    t0 = series.times[-1] if v.get("t0") is None else float(v["t0"])
    R = _auto_R(series, z0, t0) if v.get("R") is None else float(v["R"])
    inputs = LemmaInputs(c=float(v["c"]), M0=float(v["M0"]), gauge=gauge_of(cfg))
    root = out_root(args)
    names = ("level_set_mean_value", "positivity_spreading", "level_iterations",
             "measure_to_pointwise", "sup_bound", "one_step_lower_bound", "chained_lower_bound")
    try:
        if series.has("scalar") and v.get("k_R") is not None:
            pi, k_R = series, float(v["k_R"])
        else:
            pi, k_R, _ = pi_from_swirl(series, R, z0, t0)
        ledger = verify_growth_lemmas(pi, k_R, R, z0, t0, inputs).to_dict()
    except ContractError as exc:
        ledger = {"R": R, "z0": z0, "t0": t0, "n_failures": 0,
                  "lemmas": [{"lemma": n, "status": "skipped: contract", "note": str(exc)}
                             for n in names]}
    except PreconditionError as exc:
        ledger = {"R": R, "z0": z0, "t0": t0, "n_failures": 0,
                  "lemmas": [{"lemma": n, "status": "skipped: precondition", "note": str(exc)}
                             for n in names]}
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    _dump(root / "lemmas.json", ledger)
    print(f"verify: {ledger['n_failures']} failures -> {root / 'lemmas.json'}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swirlab", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, snapshots=False):
        sp.add_argument("--config", help="JSON configuration file")
        sp.add_argument("--out", help=f"output directory (default ${ENV_OUTPUT} or ./swirlab_out)")
        if snapshots:
            sp.add_argument("--snapshots", help="snapshot directory written by simulate")
        sp.add_argument("set", nargs="*", metavar="key=value", help="configuration overrides")

    common(sub.add_parser("simulate", help="run a scenario and write snapshots"))
    common(sub.add_parser("criterion", help="scan f + M against the gauge g"), True)
    common(sub.add_parser("oscillation", help="dyadic oscillation scan and decay fit"), True)
    sp = sub.add_parser("constants", help="tabulate the level-set chain constants")
    sp.add_argument("--config")
    sp.add_argument("--out")
    sp.add_argument("sweep", nargs="*", metavar="key=range",
                    help="input ranges: a:b:n, x,y,z or a number")
    common(sub.add_parser("verify", help="evaluate the growth lemmas on a run"), True)
    return p


COMMANDS = {"simulate": cmd_simulate, "criterion": cmd_criterion,
            "oscillation": cmd_oscillation, "constants": cmd_constants, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SolverError, StepSizeError) as exc:
        print(f"solver error at step {getattr(exc, 'step', None)}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
