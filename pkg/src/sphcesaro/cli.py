"""Configuration-driven experiment runner.

    sphcesaro validate --config run.yaml
    sphcesaro run --config run.yaml [--output DIR] [--threads K] [--quiet]
    sphcesaro schema [--output DIR]

Configs are YAML mappings. Exit codes: 0 success, 2 invalid or unreadable
config, 3 numeric anomaly (non-finite output cell; the manifest names it).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import platform
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .asymptotics import asymptotic_sweep
from .errors import SphCesaroError
from .maximal import (
    default_radii,
    hl_maximal_field,
    localization_ratio,
    maximal_operator_field,
    theorem_ratio,
    weak_type_levelset,
)
from .spectral_core import cesaro_mean_field, kernel_profile
from .sphere_geom import Cap, build_quadrature_grid, geodesic_angles, random_points
from .testlib import FAMILIES, TestFunction

log = logging.getLogger("sphcesaro")

EXIT_OK, EXIT_INVALID, EXIT_ANOMALY = 0, 2, 3
EXPERIMENTS = ("kernel", "asymptotics", "converge", "localize", "maximal", "weaktype")
FUNCTION_EXPERIMENTS = ("converge", "localize", "maximal", "weaktype")
CONFIG_DIALECT = "yaml"

SCHEMAS = {
    "kernel": {
        "file": "kernel.csv",
        "columns": {
            "n": "summation index of the Cesaro mean",
            "gamma": "geodesic angle in radians",
            "value": "Cesaro kernel Theta^alpha(gamma, n)",
        },
    },
    "asymptotics": {
        "file": "asymptotics.csv",
        "columns": {
            "n": "summation index",
            "gamma": "geodesic angle in radians (interior)",
            "exact": "Cesaro kernel from the degree sum",
            "main_term": "leading asymptotic term",
            "abs_diff": "|exact - main_term|",
        },
    },
    "converge": {
        "file": "converge.csv",
        "columns": {
            "n": "summation index",
            "point_id": "row index into points.csv",
            "value": "Cesaro mean S_n^alpha f at the point",
            "ref_value": "f at the point (capped for singular families)",
        },
    },
    "localize": {
        "file": "localize.csv",
        "columns": {
            "n": "summation index",
            "sup_over_V1": "max over V1 sample points of |S_n^alpha f|",
            "ratio_vs_antipodal_maximal": "max over V1 sample points of |S_n^alpha f(x)| / f*(-x)",
        },
    },
    "maximal": {
        "file": "maximal.csv",
        "columns": {
            "point_id": "row index into points.csv",
            "f_star": "discrete Hardy-Littlewood maximal function at the point",
            "f_star_antipodal": "same at the antipodal point",
            "s_star": "max over 2 <= n <= n_max of |S_n^alpha f|",
            "argmax_n": "first n attaining s_star",
            "ratio": "s_star / (f_star + f_star_antipodal)",
        },
    },
    "weaktype": {
        "file": "weaktype.csv",
        "columns": {
            "mu": "level",
            "measure": "quadrature measure of {value > mu}",
            "normalized_product": "mu * measure / ||f||_1",
        },
    },
    "points": {
        "file": "points.csv",
        "columns": {
            "point_id": "row index",
            "x": "unit vector x coordinate",
            "y": "unit vector y coordinate",
            "z": "unit vector z coordinate",
        },
    },
}


def schema_document(names=None) -> dict:
    """SCHEMAS in a JSON-stable form: ordered column lists."""
    names = SCHEMAS if names is None else names
    return {
        k: {"file": SCHEMAS[k]["file"], "columns": [{"name": c, "description": d} for c, d in SCHEMAS[k]["columns"].items()]}
        for k in names
    }

DEFAULTS = {
    "N": 2,
    "function": None,
    "grid_band_limit": None,
    "radii_count": 64,
    "output_dir": "out",
    "seed": 0,
    "gamma_points": 181,
    "gamma_min": math.pi / 4,
    "gamma_max": 3 * math.pi / 4,
    "points": 50,
    "v1_radius": 0.6,
    "mu_min": 1e-3,
    "mu_max": 1e3,
    "mu_count": 49,
    "weaktype_values": "s_star",
}
REQUIRED = ("experiment", "alpha", "n_schedule")


class ConfigError(Exception):
    def __init__(self, violations):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


@dataclass
class RunConfig:
    experiment: str
    N: int
    alpha: float
    n_schedule: list
    function: object
    grid_band_limit: int
    radii_count: int
    output_dir: str
    seed: int
    extra: dict = field(default_factory=dict)

    def echo(self) -> dict:
        d = {
            "experiment": self.experiment,
            "N": self.N,
            "alpha": self.alpha,
            "n_schedule": list(self.n_schedule),
            "function": self.function.to_dict() if self.function else None,
            "grid_band_limit": self.grid_band_limit,
            "radii_count": self.radii_count,
            "output_dir": self.output_dir,
            "seed": self.seed,
        }
        d.update(self.extra)
        return d


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def parse_config(raw) -> RunConfig:
    """Validate a raw mapping; raise ConfigError listing every violation."""
    if not isinstance(raw, dict):
        raise ConfigError(["config must be a mapping"])
    bad = []
    unknown = sorted(set(raw) - set(DEFAULTS) - set(REQUIRED))
    bad += [f"unknown key {k!r}" for k in unknown]
    bad += [f"missing required key {k!r}" for k in REQUIRED if k not in raw]
    cfg = dict(DEFAULTS)
    cfg.update(raw)

    exp = cfg.get("experiment")
    if "experiment" in raw and exp not in EXPERIMENTS:
        bad.append(f"experiment must be one of {', '.join(EXPERIMENTS)}")
    N = cfg["N"]
    if not _is_int(N) or N < 2:
        bad.append("N must be an integer >= 2")
    elif exp in FUNCTION_EXPERIMENTS and N != 2:
        bad.append(f"experiment {exp!r} is only available for N = 2")
    alpha = cfg.get("alpha")
    if "alpha" in raw:
        if not _is_num(alpha):
            bad.append("alpha must be a number")
        elif not alpha > -1:
            bad.append("alpha must exceed -1")
        elif exp == "maximal" and not alpha > (N - 1) / 2 if _is_int(N) else False:
            bad.append("maximal experiment needs alpha > (N-1)/2")
        elif exp == "localize" and not alpha >= (N - 1) / 2 if _is_int(N) else False:
            bad.append("localize experiment needs alpha >= (N-1)/2")
    sched = cfg.get("n_schedule")
    sched_ok = False
    if "n_schedule" in raw:
        if not isinstance(sched, list) or not sched or not all(_is_int(n) for n in sched):
            bad.append("n_schedule must be a nonempty list of integers")
        else:
            sched_ok = True
            if any(b <= a for a, b in zip(sched, sched[1:])):
                bad.append("n_schedule must be strictly increasing")
            if sched[0] < 1:
                bad.append("n_schedule entries must be >= 1")
            if exp in ("maximal", "localize") and sched[-1] < 2:
                bad.append("maximal operators need max(n_schedule) >= 2")
    band = cfg["grid_band_limit"]
    if band is None and sched_ok:
        band = max(sched)
    if band is not None:
        if not _is_int(band) or band < 0:
            bad.append("grid_band_limit must be a nonnegative integer")
        elif sched_ok and max(sched) > band:
            bad.append("max(n_schedule) must not exceed grid_band_limit")
    for key, lo in (("radii_count", 1), ("points", 1), ("gamma_points", 2), ("mu_count", 1)):
        if not _is_int(cfg[key]) or cfg[key] < lo:
            bad.append(f"{key} must be an integer >= {lo}")
    if not _is_int(cfg["seed"]):
        bad.append("seed must be an integer")
    if not isinstance(cfg["output_dir"], str):
        bad.append("output_dir must be a string path")
    for key in ("gamma_min", "gamma_max", "v1_radius", "mu_min", "mu_max"):
        if not _is_num(cfg[key]):
            bad.append(f"{key} must be a number")
    if _is_num(cfg["gamma_min"]) and _is_num(cfg["gamma_max"]):
        if not (0 < cfg["gamma_min"] < cfg["gamma_max"] < math.pi):
            bad.append("need 0 < gamma_min < gamma_max < pi (radians)")
    if _is_num(cfg["mu_min"]) and _is_num(cfg["mu_max"]) and not (0 < cfg["mu_min"] < cfg["mu_max"]):
        bad.append("need 0 < mu_min < mu_max")
    if cfg["weaktype_values"] not in ("s_star", "f_star"):
        bad.append("weaktype_values must be 's_star' or 'f_star'")

    func = None
    fdesc = cfg["function"]
    if exp in FUNCTION_EXPERIMENTS:
        if fdesc is None:
            bad.append(f"experiment {exp!r} needs a function descriptor")
        else:
            if isinstance(fdesc, str):
                fdesc = {"family": fdesc}
            try:
                if not isinstance(fdesc, dict) or fdesc.get("family") not in FAMILIES:
                    raise SphCesaroError(f"function.family must be one of {', '.join(FAMILIES)}")
                func = TestFunction(fdesc["family"], dict(fdesc.get("params") or {}))
            except (SphCesaroError, TypeError, KeyError) as exc:
                bad.append(f"function: {exc}")
    if exp == "localize" and func is not None and _is_num(cfg["v1_radius"]):
        if func.family not in ("cap_vanishing_bump", "antipodal_singular"):
            bad.append("localize needs a cap_vanishing_bump or antipodal_singular function")
        elif not 0 < cfg["v1_radius"] < _vanishing_cap(func).radius:
            bad.append("v1_radius must be positive and smaller than the vanishing cap radius")
    if bad:
        raise ConfigError(bad)
    extra = {k: cfg[k] for k in DEFAULTS if k not in ("N", "function", "grid_band_limit", "radii_count", "output_dir", "seed")}
    return RunConfig(exp, N, float(alpha), list(sched), func, band, cfg["radii_count"], cfg["output_dir"], cfg["seed"], extra)


def _vanishing_cap(func: TestFunction) -> Cap:
    p = func.params
    if func.family == "cap_vanishing_bump":
        return Cap(func.center, p["radius"])
    return Cap(func.center, math.pi - p["support"])


def load_config(path) -> dict:
    text = Path(path).read_text()
    raw = yaml.safe_load(text)
    return raw


# ---------------------------------------------------------------------------
# experiments; each returns {filename: (header, rows)} and a summary dict
# ---------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _points_table(xyz):
    return tuple(SCHEMAS["points"]["columns"]), [(i, *row) for i, row in enumerate(xyz)]


def exp_kernel(cfg: RunConfig, workers):
    gam = np.linspace(0.0, math.pi, cfg.extra["gamma_points"])
    prof = kernel_profile(cfg.N, cfg.alpha, cfg.n_schedule, gam)
    rows = [(n, g, v) for i, n in enumerate(prof.n_list) for g, v in zip(gam, prof.values[i])]
    return {"kernel.csv": (("n", "gamma", "value"), rows)}, {}


def exp_asymptotics(cfg: RunConfig, workers):
    gam = np.linspace(cfg.extra["gamma_min"], cfg.extra["gamma_max"], cfg.extra["gamma_points"])
    sw = asymptotic_sweep(cfg.N, cfg.alpha, cfg.n_schedule, gam)
    diff = sw.abs_diff
    rows = [
        (n, g, e, m, d)
        for i, n in enumerate(sw.n_list)
        for g, e, m, d in zip(gam, sw.exact[i], sw.main[i], diff[i])
    ]
    summary = {"sup_abs_diff": {str(n): float(v) for n, v in zip(sw.n_list, sw.sup_diff())}}
    return {"asymptotics.csv": (("n", "gamma", "exact", "main_term", "abs_diff"), rows)}, summary


def exp_converge(cfg: RunConfig, workers):
    f = cfg.function
    xyz = random_points(cfg.extra["points"], cfg.seed)
    spec = f.reference_spectrum(max(cfg.n_schedule))
    vals = cesaro_mean_field(spec, cfg.alpha, cfg.n_schedule, xyz, workers=workers)
    ref = f.sample(xyz)
    rows = [(n, p, vals[i, p], ref[p]) for i, n in enumerate(cfg.n_schedule) for p in range(xyz.shape[0])]
    summary = {"max_abs_error": {str(n): float(np.max(np.abs(vals[i] - ref))) for i, n in enumerate(cfg.n_schedule)}}
    return {
        "converge.csv": (("n", "point_id", "value", "ref_value"), rows),
        "points.csv": _points_table(xyz),
    }, summary


def exp_localize(cfg: RunConfig, workers):
    f = cfg.function
    vanish = _vanishing_cap(f)
    v1 = Cap(f.center, cfg.extra["v1_radius"])
    grid = build_quadrature_grid(cfg.grid_band_limit)
    radii = default_radii(grid, cfg.radii_count)
    samples = f.sample(grid)
    xyz = random_points(cfg.extra["points"], cfg.seed, cap=v1)
    n_top = max(cfg.n_schedule)
    spec = f.reference_spectrum(n_top)
    rep = localization_ratio(spec, samples, grid, v1, cfg.alpha, max(n_top, 2), radii,
                             points=xyz, vanishing=vanish, workers=workers)
    means = np.abs(cesaro_mean_field(spec, cfg.alpha, cfg.n_schedule, xyz, workers=workers))
    f_anti = rep.f_star_antipodal
    rows = []
    for i, n in enumerate(cfg.n_schedule):
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(f_anti > 0, means[i] / np.where(f_anti > 0, f_anti, 1.0), np.where(means[i] > 0, np.inf, 0.0))
        rows.append((n, means[i].max(), ratio.max()))
    summary = rep.summary()
    summary["sup_over_V1"] = {str(n): float(r[1]) for n, r in zip(cfg.n_schedule, rows)}
    return {
        "localize.csv": (("n", "sup_over_V1", "ratio_vs_antipodal_maximal"), rows),
        "localize_points.csv": _report_table(rep),
        "points.csv": _points_table(xyz),
    }, summary


def _report_table(rep):
    header = ("point_id", "f_star", "f_star_antipodal", "s_star", "argmax_n", "ratio")
    rows = [
        (i, rep.f_star[i], rep.f_star_antipodal[i], rep.s_star[i], int(rep.argmax_n[i]), rep.ratios[i])
        for i in range(rep.points.shape[0])
    ]
    return header, rows


def exp_maximal(cfg: RunConfig, workers):
    f = cfg.function
    grid = build_quadrature_grid(cfg.grid_band_limit)
    radii = default_radii(grid, cfg.radii_count)
    xyz = random_points(cfg.extra["points"], cfg.seed)
    n_top = max(cfg.n_schedule)
    spec = f.reference_spectrum(n_top)
    rep = theorem_ratio(spec, f.sample(grid), grid, cfg.alpha, xyz, n_top, radii, N=cfg.N, workers=workers)
    return {"maximal.csv": _report_table(rep), "points.csv": _points_table(xyz)}, rep.summary()


def exp_weaktype(cfg: RunConfig, workers):
    f = cfg.function
    grid = build_quadrature_grid(cfg.grid_band_limit)
    radii = default_radii(grid, cfg.radii_count)
    samples = f.sample(grid)
    l1 = grid.integrate(np.abs(samples))
    if cfg.extra["weaktype_values"] == "f_star":
        values = hl_maximal_field(samples, grid, grid, radii, workers)
    else:
        spec = f.reference_spectrum(max(cfg.n_schedule))
        values, _ = maximal_operator_field(spec, cfg.alpha, grid, max(2, max(cfg.n_schedule)), workers)
    mus = np.geomspace(cfg.extra["mu_min"], cfg.extra["mu_max"], cfg.extra["mu_count"])
    rep = weak_type_levelset(values, grid, l1, mus)
    rows = list(zip(rep.mu_list, rep.measures, rep.products))
    return {"weaktype.csv": (("mu", "measure", "normalized_product"), rows)}, rep.summary()


RUNNERS = {
    "kernel": exp_kernel,
    "asymptotics": exp_asymptotics,
    "converge": exp_converge,
    "localize": exp_localize,
    "maximal": exp_maximal,
    "weaktype": exp_weaktype,
}


def render_csv(header, rows):
    """CSV text plus the (row, column) cells that are not finite."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = list(header)
    w.writerow(header)
    bad = []
    for r, row in enumerate(rows):
        for c, v in enumerate(row):
            if isinstance(v, (float, np.floating)) and not math.isfinite(v):
                bad.append({"row": r, "column": header[c]})
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue(), bad


def run(cfg: RunConfig, output_dir=None, workers: int = 1) -> tuple:
    """Run one experiment; returns (manifest dict, exit code)."""
    out = Path(output_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / "manifest.json"
    if manifest_path.exists():
        manifest_path.unlink()
    t0 = time.perf_counter()
    log.info("running %s experiment", cfg.experiment)
    tables, summary = RUNNERS[cfg.experiment](cfg, workers)
    t_compute = time.perf_counter() - t0

    outputs, anomalies = [], []
    for name in sorted(tables):
        header, rows = tables[name]
        text, bad = render_csv(header, rows)
        for cell in bad:
            anomalies.append({"file": name, **cell, "reason": "non-finite value"})
        data = text.encode()
        (out / name).write_bytes(data)
        outputs.append({"file": name, "sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)})
    for a in summary.get("anomalies", []) if isinstance(summary, dict) else []:
        anomalies.append({"file": "summary", **a})

    schema = schema_document([k for k, v in SCHEMAS.items() if v["file"] in tables or k == cfg.experiment])
    schema_bytes = json.dumps(schema, indent=1, sort_keys=True).encode()
    (out / "schema.json").write_bytes(schema_bytes)
    outputs.append({"file": "schema.json", "sha256": hashlib.sha256(schema_bytes).hexdigest(), "bytes": len(schema_bytes)})
    summary_bytes = json.dumps(summary, indent=1, sort_keys=True, default=float).encode()
    (out / "summary.json").write_bytes(summary_bytes)
    outputs.append({"file": "summary.json", "sha256": hashlib.sha256(summary_bytes).hexdigest(), "bytes": len(summary_bytes)})

    code = EXIT_ANOMALY if any(a.get("reason") == "non-finite value" for a in anomalies) else EXIT_OK
    manifest = {
        "config": cfg.echo(),
        "config_dialect": CONFIG_DIALECT,
        "library_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "threads": workers,
        "timings_seconds": {"compute": t_compute, "total": time.perf_counter() - t0},
        "outputs": outputs,
        "anomalies": anomalies,
        "status": "anomaly" if code == EXIT_ANOMALY else "ok",
    }
    # written last: its presence marks a finished run
    manifest_path.write_text(json.dumps(manifest, indent=1, sort_keys=True))
    return manifest, code


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _read_raw(path):
    try:
        return load_config(path), None
    except OSError as exc:
        return None, f"cannot read config: {exc}"
    except yaml.YAMLError as exc:
        return None, f"cannot parse config: {exc}"


def cmd_validate(args) -> int:
    raw, err = _read_raw(args.config)
    if err:
        print(err, file=sys.stderr)
        return EXIT_INVALID
    try:
        parse_config(raw)
    except ConfigError as exc:
        for v in exc.violations:
            print(v)
        return EXIT_INVALID
    if not args.quiet:
        print("config OK")
    return EXIT_OK


def cmd_run(args) -> int:
    raw, err = _read_raw(args.config)
    if err:
        print(err, file=sys.stderr)
        return EXIT_INVALID
    try:
        cfg = parse_config(raw)
    except ConfigError as exc:
        for v in exc.violations:
            print(v, file=sys.stderr)
        return EXIT_INVALID
    try:
        manifest, code = run(cfg, args.output, max(1, args.threads))
    except SphCesaroError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if code == EXIT_ANOMALY:
        for a in manifest["anomalies"]:
            print(f"anomaly: {a}", file=sys.stderr)
    elif not args.quiet:
        print(f"wrote {len(manifest['outputs'])} files to {args.output or cfg.output_dir}")
    return code


def cmd_schema(args) -> int:
    text = json.dumps(schema_document(), indent=1, sort_keys=True)
    if args.output:
        Path(args.output).mkdir(parents=True, exist_ok=True)
        (Path(args.output) / "schema.json").write_text(text)
    else:
        print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sphcesaro", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, needs_config in (("run", cmd_run, True), ("validate", cmd_validate, True), ("schema", cmd_schema, False)):
        p = sub.add_parser(name)
        if needs_config:
            p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--output", default=None, help="output directory (overrides output_dir)")
        p.add_argument("--threads", type=int, default=1, help="worker threads; affects speed only")
        p.add_argument("--quiet", action="store_true")
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
