"""
Command-line front end.

    sta-pictures lz-inversion   [--config FILE] [--protocols ...] [--alpha A] [--x0 X] [--T T] ...
    sta-pictures atom-lab-frame [--config FILE] [--omega0 W] ...
    sta-pictures trap-expansion [--config FILE] [--omega-start W0] [--omega-end W1] [--tf T] ...
    sta-pictures compare A.csv B.csv [--column P1] [--tolerance 1e-6]
    sta-pictures run FILE       (scenario taken from the file's `scenario` key)

Config files are flat `key = value` lines; `#` starts a comment and keys may
use dashes or underscores. Flags override file entries, which override the
built-in defaults. Every run writes CSV tables, SVG overlays and a
summary.json recording the resolved parameters and the defaults.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import errors
from .harmonic import KINDS, expansion_suite, make_ramp
from .propagate import populations
from .protocols import LAB_PROTOCOLS, TWO_LEVEL_PROTOCOLS, ProtocolSet, lab_frame_pair, run_lab_protocol
from .schedules import lz_schedule
from .su2 import pauli_components
from .svgplot import line_plot

SCENARIOS = ("lz-inversion", "atom-lab-frame", "trap-expansion")
ALIASES = {"modified-frequency": "modified"}

_COMMON = {"protocols": None, "out": None, "scenario": None}
DEFAULTS = {
    "lz-inversion": {
        **_COMMON, "alpha": None, "x0": 1.0, "T": None, "n_grid": 4001, "n_report": 2001,
        "tolerance": 1e-10, "order": 2,
    },
    "atom-lab-frame": {
        **_COMMON, "alpha": None, "x0": 1.0, "T": None, "omega0": 100.0, "n_grid": 4001, "n_report": 2001,
        "tolerance": 1e-9, "order": 2,
    },
    "trap-expansion": {
        **_COMMON, "omega_start": 1.0, "omega_end": 0.1, "tf": 1.0, "mass": 1.0, "hbar": 1.0, "n_points": 2048,
        "box_widths": 12.0, "steps": 4000, "n_samples": 41, "dilation": "shear", "n_levels": 128,
    },
}
DEFAULT_PROTOCOLS = {
    "lz-inversion": TWO_LEVEL_PROTOCOLS,
    "atom-lab-frame": LAB_PROTOCOLS,
    "trap-expansion": KINDS,
}
_TYPES = {"n_grid": int, "n_report": int, "order": int, "n_points": int, "steps": int, "n_samples": int,
          "n_levels": int, "dilation": str, "out": str, "scenario": str, "protocols": str}


class ConfigError(ValueError):
    pass


# -- config handling --------------------------------------------------------

def _key(k: str) -> str:
    k = k.strip().replace("-", "_")
    return "T" if k in ("T", "t") else k


def read_config(path) -> dict[str, str]:
    entries = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        k, v = line.split("=", 1)
        entries[_key(k)] = v.strip()
    return entries


def _convert(key: str, value):
    if value is None:
        return None
    typ = _TYPES.get(key, float)
    try:
        if typ is int:
            f = float(value)
            if f != int(f):
                raise ValueError
            return int(f)
        return typ(value)
    except ValueError:
        raise ConfigError(f"{key} = {value!r} is not a valid {typ.__name__}") from None


def resolve(scenario: str, file_entries: dict, flags: dict) -> dict:
    """Merge defaults, config-file entries and flags; validate names and values."""
    defaults = DEFAULTS[scenario]
    cfg = dict(defaults)
    for source in (file_entries, flags):
        for k, v in source.items():
            if v is None:
                continue
            if k not in defaults:
                raise ConfigError(f"unknown parameter {k!r} for {scenario}")
            cfg[k] = _convert(k, v)
    if cfg["scenario"] not in (None, scenario):
        raise ConfigError(f"config is for scenario {cfg['scenario']!r}, not {scenario!r}")
    cfg["scenario"] = scenario

    raw = cfg["protocols"]
    names = DEFAULT_PROTOCOLS[scenario] if raw is None else [p.strip() for p in raw.split(",") if p.strip()]
    names = [ALIASES.get(p, p) for p in names]
    if not names:
        raise ConfigError("protocol list is empty")
    bad = [p for p in names if p not in DEFAULT_PROTOCOLS[scenario]]
    if bad:
        raise ConfigError(f"unknown protocol(s) {bad} for {scenario}; choose from {list(DEFAULT_PROTOCOLS[scenario])}")
    cfg["protocols"] = list(dict.fromkeys(names))
    cfg["out"] = cfg["out"] or f"out/{scenario}"

    if "alpha" in cfg:
        # an unspecified sweep keeps |alpha| T = 20, so the sweep covers Z in [-10 x0, 10 x0]
        a, T = cfg["alpha"], cfg["T"]
        if a is None and T is None:
            a = -10.0
        if T is None:
            if a == 0:
                raise ConfigError("alpha must be nonzero when T is not given")
            T = 20.0 / abs(a)
        if a is None:
            a = -20.0 / T
        cfg["alpha"], cfg["T"] = float(a), float(T)
        if cfg["order"] not in (2, 4):
            raise ConfigError("order must be 2 or 4")
        if not cfg["tolerance"] > 0:
            raise ConfigError("tolerance must be positive")
        if cfg["n_report"] < 2:
            raise ConfigError("n_report must be at least 2")
    return cfg


# -- output helpers ---------------------------------------------------------

def write_csv(path, header: list[str], columns) -> None:
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header=",".join(header), comments="")


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def _report(cfg: dict, results: dict, extra: dict | None = None) -> dict:
    out = {"scenario": cfg["scenario"], "config": cfg, "defaults": DEFAULTS[cfg["scenario"]], "protocols": results}
    if extra:
        out.update(extra)
    return out


# -- two-level scenarios ----------------------------------------------------

def _two_level_setup(cfg: dict):
    schedule = lz_schedule(cfg["alpha"], cfg["x0"], cfg["T"])
    need1 = any(p in ("cd1", "cd01") for p in cfg["protocols"])
    return ProtocolSet.build(schedule, need_level1=need1, n_grid=cfg["n_grid"])


def _write_protocol(dirpath: Path, times, coords, run) -> None:
    dirpath.mkdir(parents=True, exist_ok=True)
    write_csv(dirpath / "hamiltonian.csv", ["t", "X", "Y", "Z"], [times, coords[0], coords[1], coords[2]])
    p = run.trajectory.populations
    write_csv(dirpath / "populations.csv", ["t", "P1", "P2", "eigen_P1"],
              [times, p[:, 0], p[:, 1], run.eigen_populations[:, 0]])
    write_json(dirpath / "summary.json", run.summary())


def _plots(out: Path, times, coords: dict, runs: dict, title: str) -> None:
    for i, comp in enumerate("XYZ"):
        line_plot(out / f"hamiltonian_{comp}.svg", [(n, times, c[i]) for n, c in coords.items()],
                  f"{title}: {comp} component", "t", comp)
    line_plot(out / "populations.svg",
              [(n, times, r.trajectory.populations[:, 0]) for n, r in runs.items()],
              f"{title}: population of |1>", "t", "P1")


def run_lz_inversion(cfg: dict) -> dict:
    pset = _two_level_setup(cfg)
    names = cfg["protocols"]
    # bare H_0 is the reference curve for every comparison
    todo = names if "bare" in names else ["bare", *names]
    for n in todo:
        pset.hamiltonian(n)
    kw = dict(tolerance=cfg["tolerance"], n_report=cfg["n_report"], order=cfg["order"])
    runs = pset.run_all(todo, **kw)
    out = Path(cfg["out"])
    times = runs["bare"].trajectory.times
    coords = {}
    for n, r in runs.items():
        c = r.hamiltonian.coords(times)
        coords[n] = tuple(np.broadcast_to(v, times.shape) for v in (c.x, c.y, c.z))
        _write_protocol(out / n, times, coords[n], r)
    g_T = pset.ground_state(cfg["T"])
    target = float(abs(g_T[0]) ** 2)
    bare_p = runs["bare"].trajectory.populations
    results = {}
    for n, r in runs.items():
        s = r.summary()
        s["final_P1_minus_adiabatic_target"] = s["final_P1"] - target
        s["max_population_difference_vs_bare"] = float(np.max(np.abs(r.trajectory.populations - bare_p)))
        results[n] = s
    _plots(out, times, coords, runs, "lz-inversion")
    report = _report(cfg, results, {"adiabatic_target_P1": target})
    write_json(out / "summary.json", report)
    return report


def run_atom_lab_frame(cfg: dict) -> dict:
    pset = _two_level_setup(cfg)
    omega0 = cfg["omega0"]
    for n in cfg["protocols"]:
        lab_frame_pair(pset, n, omega0)
    kw = dict(tolerance=cfg["tolerance"], n_report=cfg["n_report"], order=cfg["order"])
    with ThreadPoolExecutor(max_workers=len(cfg["protocols"])) as ex:
        pairs = dict(zip(cfg["protocols"], ex.map(lambda n: run_lab_protocol(pset, n, omega0, **kw), cfg["protocols"])))
    out = Path(cfg["out"])
    coords, runs, results = {}, {}, {}
    for n, (run, twin) in pairs.items():
        times = run.trajectory.times
        c = pauli_components(run.hamiltonian(times))
        coords[n] = (c.x, c.y, c.z)
        runs[n] = run
        _write_protocol(out / n, times, coords[n], run)
        p = populations(twin)
        write_csv(out / n / "populations_rotating.csv", ["t", "P1", "P2", "eigen_P1"],
                  [twin.times, p[:, 0], p[:, 1], run.eigen_populations[:, 0]])
        results[n] = run.summary()
    _plots(out, times, coords, runs, "atom-lab-frame")
    report = _report(cfg, results)
    write_json(out / "summary.json", report)
    return report


# -- trap -------------------------------------------------------------------

def run_trap_expansion(cfg: dict) -> dict:
    ramp = make_ramp(cfg["omega_start"], cfg["omega_end"], cfg["tf"])
    if cfg["steps"] % (cfg["n_samples"] - 1):
        raise ConfigError("steps must be a multiple of n_samples - 1")
    runs, oracle = expansion_suite(ramp, cfg["protocols"], n=cfg["n_points"], widths=cfg["box_widths"],
                                   steps=cfg["steps"], n_samples=cfg["n_samples"], resample=cfg["dilation"],
                                   n_levels=cfg["n_levels"], mass=cfg["mass"], hbar=cfg["hbar"])
    out = Path(cfg["out"])
    results = {}
    for kind, er in runs.items():
        d = out / kind
        d.mkdir(parents=True, exist_ok=True)
        r = er.run
        write_csv(d / "observables.csv", ["t", "width", "ermakov_width", "mean", "norm"],
                  [r.times, r.widths(), oracle.width(r.times), [s.mean() for s in r.states],
                   [s.norm() for s in r.states]])
        r.final.to_csv(d / "final_wavefunction.csv")
        s = er.summary()
        write_json(d / "summary.json", s)
        results[kind] = s
    extra = {}
    if "reference" in runs:
        ref = runs["reference"]
        rel = np.abs(ref.run.widths() / oracle.width(ref.run.times) - 1)
        p0 = oracle.ground_population(cfg["omega_end"])
        extra["reference_checks"] = {"max_width_relative_error_vs_ermakov": float(rel.max()),
                                     "analytic_P0": p0,
                                     "P0_difference": results["reference"]["final_P0"] - p0}
    if "cd" in runs and "modified" in runs:
        a, b = runs["cd"].run, runs["modified"].run
        dx = a.final.grid.dx
        l1 = np.sum(np.abs(a.densities() - b.densities()), axis=1) * dx
        extra["cd_vs_modified"] = {"max_density_L1": float(l1.max()),
                                   "final_overlap_error": float(abs(a.final.overlap(b.final) - 1))}
    first = next(iter(runs.values())).run
    series = [(k, er.run.times, er.run.widths()) for k, er in runs.items()]
    series.append(("scaling solution", first.times, oracle.width(first.times)))
    line_plot(out / "widths.svg", series, "trap-expansion: width", "t", "width")
    line_plot(out / "final_density.svg", [(k, er.run.final.grid.q, er.run.final.density) for k, er in runs.items()],
              "trap-expansion: final density", "q", "density")
    report = _report(cfg, results, extra)
    write_json(out / "summary.json", report)
    return report


# -- compare ----------------------------------------------------------------

def compare_files(path_a, path_b, column: str = "P1", tolerance: float = 1e-6) -> dict:
    """Max-abs and L1 (trapezoid over the first column) differences of one column."""
    ha, a = read_csv(path_a)
    hb, b = read_csv(path_b)
    for h, p in ((ha, path_a), (hb, path_b)):
        if column not in h:
            raise ConfigError(f"column {column!r} not in {p} (has {h})")
    if a.shape[0] != b.shape[0] or not np.array_equal(a[:, 0], b[:, 0]):
        raise errors.GridMismatch(f"{ha[0]} grids of {path_a} and {path_b} differ")
    x = a[:, 0]
    diff = np.abs(a[:, ha.index(column)] - b[:, hb.index(column)])
    l1 = float(np.sum(0.5 * (diff[1:] + diff[:-1]) * np.diff(x))) if len(x) > 1 else 0.0
    max_abs = float(diff.max())
    return {"column": column, "max_abs": max_abs, "l1": l1, "tolerance": tolerance, "pass": max_abs <= tolerance}


# -- entry point ------------------------------------------------------------

RUNNERS = {"lz-inversion": run_lz_inversion, "atom-lab-frame": run_atom_lab_frame,
           "trap-expansion": run_trap_expansion}

_FLAGS = {
    "lz-inversion": ("alpha", "x0", "T", "n_grid", "n_report", "tolerance", "order"),
    "atom-lab-frame": ("alpha", "x0", "T", "omega0", "n_grid", "n_report", "tolerance", "order"),
    "trap-expansion": ("omega_start", "omega_end", "tf", "mass", "hbar", "n_points", "box_widths", "steps",
                       "n_samples", "dilation", "n_levels"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sta-pictures", description="Shortcut-to-adiabaticity protocol runs.")
    sub = ap.add_subparsers(dest="command", required=True)
    for scen, keys in _FLAGS.items():
        sp = sub.add_parser(scen)
        sp.add_argument("--config", help="flat key = value file")
        sp.add_argument("--protocols", help="comma-separated protocol names")
        sp.add_argument("--out", help="output directory")
        for k in keys:
            flag = "--T" if k == "T" else "--" + k.replace("_", "-")
            sp.add_argument(flag, dest=k, default=None, help=f"default {DEFAULTS[scen][k]}")
    rp = sub.add_parser("run", help="run a config file; its `scenario` key picks the subcommand")
    rp.add_argument("config")
    rp.add_argument("--out")
    cp = sub.add_parser("compare", help="compare one column of two CSV files on the same grid")
    cp.add_argument("file_a")
    cp.add_argument("file_b")
    cp.add_argument("--column", default="P1")
    cp.add_argument("--tolerance", type=float, default=1e-6)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "compare":
            res = compare_files(args.file_a, args.file_b, args.column, args.tolerance)
            verdict = "PASS" if res["pass"] else "FAIL"
            print(f"{verdict} {res['column']}: max_abs={res['max_abs']:.6g} l1={res['l1']:.6g} "
                  f"tolerance={res['tolerance']:.3g}")
            return 0 if res["pass"] else 1
        if args.command == "run":
            entries = read_config(args.config)
            scenario = entries.get("scenario")
            if scenario not in SCENARIOS:
                raise ConfigError(f"{args.config}: scenario must be one of {SCENARIOS}")
            cfg = resolve(scenario, entries, {"out": args.out})
        else:
            scenario = args.command
            entries = read_config(args.config) if args.config else {}
            flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
            cfg = resolve(scenario, entries, flags)
        report = RUNNERS[scenario](cfg)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    for name, s in report["protocols"].items():
        keys = ("final_P1", "fidelity") if "final_P1" in s else ("final_P0", "max_norm_error")
        print(name, " ".join(f"{k}={s[k]:.10g}" for k in keys))
    print(f"wrote {cfg['out']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
