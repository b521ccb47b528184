"""Command-line pipeline: build -> certify -> integrate -> classify -> export.

Subcommands
-----------
build     construct the metric, verify both warping profiles
certify   grid curvature positivity certificate + FD oracle cross-check
knot      quotient image of a Hopf circle: residual, closure, knot type
census    constant-radius closed geodesics over a winding-pair range
geodesic  integrate one geodesic from explicit initial data

Flags override an optional JSON config file (--config).  Outputs are
deterministic: identical configuration yields byte-identical files.  Exit
codes: 0 success, 1 usage/config error, 2 warp construction failure,
3 positivity failure, 4 geodesy/closure failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import plots
from .errors import (
    CollarViolation,
    ConfigError,
    CoreApproach,
    CoreSingularity,
    DriftAbort,
    GeometryError,
    InfeasibleZone,
    NoRoot,
    NoSolution,
    NotClosed,
    WindingAmbiguous,
)
from .geodesic import (
    DegenerateBand,
    GeodesicState,
    closure_check,
    find_torus_geodesic,
    first_integrals,
    geodesic_residual,
    integrate_geodesic,
)
from .knot import classify_torus_knot
from .metric import build_metric, curvature_scan, fd_curvature_oracle
from .quotient import embed_curve, hopf_circle_image
from .warp import HALF_PI, verify_warp

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_WARP = 2
EXIT_POSITIVITY = 3
EXIT_GEODESY = 4

RESIDUAL_TOL = 1e-6
CLOSURE_TOL = 1e-6
ORACLE_TOL = 1e-5

DEFAULTS = {
    "m": 2,
    "n": 3,
    "rho": 0.25,
    "tol_warp": 1e-12,
    "tol_ode": 1e-10,
    "grid": 2001,
    "lambda_re": 1.0,
    "lambda_im": 0.0,
    "conjugated": False,
    "p_max": 5,
    "q_max": 5,
    "out": "out",
    "seed": 0,
    "format": "csv,json",
    "figures": True,
    "samples": 4096,
    "oracle_samples": 1000,
    "corrupt_warp": False,
    "length": 20.0,
    "r0": math.pi / 4,
    "theta0": 0.0,
    "t0": 0.0,
    "vr": 0.0,
    "vtheta": 1.0,
    "vt": 1.0,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass
class RunConfig:
    m: int
    n: int
    rho: float
    tol_warp: float
    tol_ode: float
    grid: int
    lambda_re: float
    lambda_im: float
    conjugated: bool
    p_max: int
    q_max: int
    out: str
    seed: int
    format: str
    figures: bool
    samples: int
    oracle_samples: int
    corrupt_warp: bool
    length: float
    r0: float
    theta0: float
    t0: float
    vr: float
    vtheta: float
    vt: float

    def validate(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ConfigError(f"orders must be >= 1, got m={self.m}, n={self.n}")
        if not (0.0 < self.rho < math.pi / 4):
            raise ConfigError(f"rho must lie in (0, pi/4), got {self.rho}")
        if self.tol_warp <= 0 or self.tol_ode <= 0:
            raise ConfigError("tolerances must be positive")
        if self.grid < 500:
            raise ConfigError(f"grid must be >= 500, got {self.grid}")
        if self.p_max < 1 or self.q_max < 1:
            raise ConfigError("census bounds must be >= 1")
        if self.samples < 64:
            raise ConfigError("need at least 64 curve samples")
        if self.length <= 0:
            raise ConfigError("length must be positive")
        fmts = set(self.format.split(","))
        if not fmts <= {"csv", "json", "obj"}:
            raise ConfigError(f"unknown format in {self.format!r}")

    @property
    def formats(self) -> set:
        return set(self.format.split(","))

    @property
    def lam(self) -> complex:
        return complex(self.lambda_re, self.lambda_im)


def _merge_config(args: argparse.Namespace) -> RunConfig:
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        unknown = set(file_cfg) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        merged.update(file_cfg)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    cfg = RunConfig(**merged)
    cfg.validate()
    return cfg


def build_parser() -> _Parser:
    parser = _Parser(prog="warpknot", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-m", type=int, default=None, help="order of the t-phase action")
    common.add_argument("-n", type=int, default=None, help="order of the theta-phase action")
    common.add_argument("--rho", type=float, default=None, help="collar radius in (0, pi/4)")
    common.add_argument("--tol-warp", dest="tol_warp", type=float, default=None)
    common.add_argument("--tol-ode", dest="tol_ode", type=float, default=None)
    common.add_argument("--grid", type=int, default=None)
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--format", default=None, help="comma list of csv,json,obj")
    common.add_argument("--config", default=None, help="JSON config file; flags override")
    common.add_argument("--no-figures", dest="figures", action="store_false",
                        default=None, help="skip figure rendering")

    sub.add_parser("build", parents=[common], help="construct and verify the metric")

    p_cert = sub.add_parser("certify", parents=[common],
                            help="curvature positivity certificate")
    p_cert.add_argument("--oracle-samples", dest="oracle_samples", type=int, default=None)
    p_cert.add_argument("--corrupt-warp", dest="corrupt_warp", action="store_true",
                        default=None, help=argparse.SUPPRESS)

    p_knot = sub.add_parser("knot", parents=[common],
                            help="classify the image of a Hopf circle")
    p_knot.add_argument("--lambda-re", dest="lambda_re", type=float, default=None)
    p_knot.add_argument("--lambda-im", dest="lambda_im", type=float, default=None)
    p_knot.add_argument("--conjugated", action="store_true", default=None,
                        help="use the conjugate complex structure (mirror knot)")
    p_knot.add_argument("--samples", type=int, default=None)

    p_cen = sub.add_parser("census", parents=[common],
                           help="constant-radius closed geodesic census")
    p_cen.add_argument("--p-max", dest="p_max", type=int, default=None)
    p_cen.add_argument("--q-max", dest="q_max", type=int, default=None)

    p_geo = sub.add_parser("geodesic", parents=[common],
                           help="integrate one geodesic")
    p_geo.add_argument("--length", type=float, default=None)
    p_geo.add_argument("--r0", type=float, default=None)
    p_geo.add_argument("--theta0", type=float, default=None)
    p_geo.add_argument("--t0", type=float, default=None)
    p_geo.add_argument("--vr", type=float, default=None)
    p_geo.add_argument("--vtheta", type=float, default=None)
    p_geo.add_argument("--vt", type=float, default=None)
    return parser


def _outdir(cfg: RunConfig) -> Path:
    path = Path(cfg.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _write_json(path: Path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _build_metric_or_exit(cfg: RunConfig):
    try:
        return build_metric(cfg.m, cfg.n, cfg.rho, tolerance=cfg.tol_warp)
    except (InfeasibleZone, NoRoot, ValueError) as exc:
        print(f"warp/metric construction failed: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_WARP)


# -- subcommands ----------------------------------------------------------------


def cmd_build(cfg: RunConfig) -> int:
    metric = _build_metric_or_exit(cfg)
    grid = max(cfg.grid, 1001)
    rep_f = verify_warp(metric.fprof, grid)
    rep_h = verify_warp(metric.hprof, grid)
    out = _outdir(cfg)
    _write_json(out / "metric.json", {
        "m": metric.m, "n": metric.n, "rho": metric.rho, "delta": metric.delta,
        "band": list(metric.band),
        "f_profile": metric.fprof.to_dict(),
        "h_profile": metric.hprof.to_dict(),
    })
    _write_json(out / "warp_report.json", {
        "f": json.loads(rep_f.to_json()),
        "h": json.loads(rep_h.to_json()),
    })
    print(rep_f.to_text())
    print(rep_h.to_text())
    if metric.m == 1 and metric.n == 1:
        print("note: (m, n) = (1, 1) is the round metric; no collar modification")
    if cfg.figures:
        plots.warp_figure([metric.fprof, metric.hprof], out / "warp_profile.png")
    ok = rep_f.passed and rep_h.passed
    print(f"build: {'OK' if ok else 'FAILED'} -> {out}")
    return EXIT_OK if ok else EXIT_WARP


def _oracle_cross_check(metric, n_samples: int, seed: int) -> dict:
    """Closed-form vs FD sectional curvature at random points and planes."""
    rng = np.random.default_rng(seed)
    d = metric.delta
    lo, hi = d + 5e-5, HALF_PI - d - 5e-5
    steep = metric.steep_intervals()
    worst = 0.0
    taken = 0
    while taken < n_samples:
        r = float(rng.uniform(lo, hi))
        if any(slo - 1e-4 <= r <= shi + 1e-4 for (slo, shi) in steep):
            continue
        u = rng.normal(size=3)
        v = rng.normal(size=3)
        try:
            kc = metric.sectional_curvature((r, 0.0, 0.0), u, v)
        except GeometryError:
            continue
        kf = fd_curvature_oracle(metric, (r, 0.0, 0.0), u, v)
        worst = max(worst, abs(kc - kf) / max(1.0, abs(kc)))
        taken += 1
    return {"samples": taken, "max_scaled_deviation": worst,
            "tolerance": ORACLE_TOL, "passed": worst < ORACLE_TOL}


def cmd_certify(cfg: RunConfig) -> int:
    metric = _build_metric_or_exit(cfg)
    if cfg.corrupt_warp:
        # test hook: inflate the glide amplitude so concavity fails
        bad = dataclasses.replace(metric.fprof, s=metric.fprof.s * 10.0)
        metric = dataclasses.replace(metric, fprof=bad)
        print("warning: test hook active, f-profile amplitude corrupted",
              file=sys.stderr)
    report = curvature_scan(metric, cfg.grid)
    oracle = _oracle_cross_check(metric, cfg.oracle_samples, cfg.seed)
    out = _outdir(cfg)
    if "csv" in cfg.formats:
        report.to_csv(out / "curvature.csv")
    summary = report.summary_dict()
    summary["oracle"] = oracle
    _write_json(out / "certify.json", summary)
    if cfg.figures:
        plots.curvature_figure(report, out / "curvature.png")
    print(f"min curvature   : {report.min_curvature:.6g} at r = {report.argmin_r:.6g}")
    print(f"band |K - 1| max: {report.band_max_deviation:.3e}")
    print(f"off-diagonal max: {report.offdiag_max:.3e}")
    print(f"oracle deviation: {oracle['max_scaled_deviation']:.3e} "
          f"({oracle['samples']} samples)")
    ok = report.passed and oracle["passed"]
    print(f"certify: {'OK' if ok else 'FAILED'} -> {out}")
    return EXIT_OK if ok else EXIT_POSITIVITY


def cmd_knot(cfg: RunConfig) -> int:
    metric = _build_metric_or_exit(cfg)
    try:
        curve = hopf_circle_image(cfg.m, cfg.n, cfg.lam, rho=cfg.rho,
                                  conjugated=cfg.conjugated, samples=cfg.samples)
    except CollarViolation as exc:
        print(f"collar violation: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = _outdir(cfg)
    residual = geodesic_residual(metric, curve)
    try:
        closure = closure_check(curve, tol=CLOSURE_TOL)
    except (NotClosed, WindingAmbiguous) as exc:
        print(f"closure failed: {exc}", file=sys.stderr)
        return EXIT_GEODESY
    p, q = closure.windings
    ktype = classify_torus_knot(p, q)
    if "csv" in cfg.formats:
        curve.to_csv(out / "curve_hopf.csv", embed=embed_curve)
    if "obj" in cfg.formats:
        _write_obj(out / "curve_hopf.obj", curve)
    _write_json(out / "knot.json", {
        "knot": ktype.to_dict(),
        "windings": [p, q],
        "period": closure.period,
        "closure_mismatch": closure.mismatch,
        "geodesic_residual": residual,
        "radius": curve.meta.get("radius"),
        "conjugated": cfg.conjugated,
        "lambda": {"re": cfg.lambda_re, "im": cfg.lambda_im},
    })
    if cfg.figures:
        plots.curve_figure(curve, out / "knot_curve.png", label=ktype.label)
    print(f"windings (theta, t) : ({p}, {q})")
    print(f"knot type           : {ktype.label} (mirror: {ktype.mirror_label})")
    print(f"period              : {closure.period!r}")
    print(f"geodesic residual   : {residual:.3e}")
    if residual > RESIDUAL_TOL:
        print("knot: FAILED (residual above tolerance)", file=sys.stderr)
        return EXIT_GEODESY
    print(f"knot: OK -> {out}")
    return EXIT_OK


def _write_obj(path: Path, curve) -> None:
    xyz = embed_curve(curve)
    with open(path, "w") as fh:
        for x, y, z in xyz:
            fh.write(f"v {x!r} {y!r} {z!r}\n")
        for i in range(1, len(xyz)):
            fh.write(f"l {i} {i + 1}\n")


def _census_rows(metric, p_max: int, q_max: int) -> list[dict]:
    rows = []
    pairs = [(p, q) for p in range(0, p_max + 1) for q in range(0, q_max + 1)
             if (p, q) != (0, 0) and math.gcd(p, q) == 1]
    for p, q in sorted(pairs):
        row = {"p": p, "q": q,
               "target": (p / q) if q else float("inf"),
               "kind": "none", "radii": [], "band": None,
               "knot": "", "period": None, "residual": None, "note": ""}
        try:
            result = find_torus_geodesic(metric, p, q)
        except NoSolution as exc:
            row["note"] = str(exc)
            rows.append(row)
            continue
        if isinstance(result, DegenerateBand):
            rep = result.representative
            row["kind"] = "band"
            row["band"] = list(result.band)
            row["radii"] = [rt.radius for rt in result.extra_roots]
            row["knot"] = classify_torus_knot(*rep.closure.windings).label
            row["period"] = rep.closure.period
            row["residual"] = rep.residual
            if not rep.confirmed_by_integration:
                row["note"] = "representative inside core exclusion; analytic check only"
        else:
            row["kind"] = "root"
            row["radii"] = [rt.radius for rt in result.roots]
            first = result.roots[0]
            row["knot"] = classify_torus_knot(*first.closure.windings).label
            row["period"] = first.closure.period
            row["residual"] = first.residual
            if not all(rt.closure.windings == (p, q) for rt in result.roots):
                row["note"] = "winding mismatch"
        rows.append(row)
    return rows


def _census_csv(rows, path: Path) -> None:
    cols = ["p", "q", "kind", "band_lo", "band_hi", "radii", "knot",
            "period", "residual", "note"]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            band = row["band"] or ["", ""]
            vals = [
                str(row["p"]), str(row["q"]), row["kind"],
                repr(float(band[0])) if band[0] != "" else "",
                repr(float(band[1])) if band[1] != "" else "",
                ";".join(repr(float(r)) for r in row["radii"]),
                row["knot"],
                repr(float(row["period"])) if row["period"] is not None else "",
                repr(float(row["residual"])) if row["residual"] is not None else "",
                row["note"].replace(",", ";"),
            ]
            fh.write(",".join(vals) + "\n")


def cmd_census(cfg: RunConfig) -> int:
    metric = _build_metric_or_exit(cfg)
    rows = _census_rows(metric, cfg.p_max, cfg.q_max)
    out = _outdir(cfg)
    if "csv" in cfg.formats:
        _census_csv(rows, out / "census.csv")
    _write_json(out / "census.json", {"m": cfg.m, "n": cfg.n, "rho": cfg.rho,
                                      "rows": rows})
    if cfg.figures:
        plots.census_figure(metric, rows, out / "census.png")
    n_found = sum(1 for r in rows if r["kind"] != "none")
    print(f"census: {len(rows)} winding pairs, {n_found} with constant-radius "
          f"geodesics -> {out}")
    return EXIT_OK


def cmd_geodesic(cfg: RunConfig) -> int:
    metric = _build_metric_or_exit(cfg)
    state = GeodesicState(r=cfg.r0, theta=cfg.theta0, t=cfg.t0,
                          vr=cfg.vr, vtheta=cfg.vtheta, vt=cfg.vt)
    E0, _, _ = first_integrals(metric, state)
    if E0 <= 0:
        print("zero initial velocity", file=sys.stderr)
        return EXIT_USAGE
    scale = 1.0 / math.sqrt(E0)
    state = GeodesicState(state.r, state.theta, state.t,
                          state.vr * scale, state.vtheta * scale, state.vt * scale)
    out = _outdir(cfg)
    try:
        curve, report = integrate_geodesic(metric, state, cfg.length, tol=cfg.tol_ode)
    except (CoreApproach, DriftAbort, CoreSingularity) as exc:
        print(f"integration aborted: {exc}", file=sys.stderr)
        return EXIT_GEODESY
    if "csv" in cfg.formats:
        _write_trajectory_csv(out / "trajectory.csv", metric, curve)
    with open(out / "conservation.json", "w") as fh:
        fh.write(report.to_json())
        fh.write("\n")
    if cfg.figures:
        plots.trajectory_figure(curve, report, out / "trajectory.png")
    print(f"steps: {report.n_steps}, max drift: {report.max_drift:.3e}")
    print(f"geodesic: OK -> {out}")
    return EXIT_OK


def _write_trajectory_csv(path: Path, metric, curve) -> None:
    f, _, h, _ = metric.coeffs(curve.r)
    E = curve.vr**2 + f**2 * curve.vtheta**2 + h**2 * curve.vt**2
    ptheta = f**2 * curve.vtheta
    pt = h**2 * curve.vt
    cols = ["s", "r", "theta", "t", "vr", "vtheta", "vt", "E", "p_theta", "p_t"]
    data = [curve.s, curve.r, curve.theta, curve.t,
            curve.vr, curve.vtheta, curve.vt, E, ptheta, pt]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in zip(*data):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


COMMANDS = {
    "build": cmd_build,
    "certify": cmd_certify,
    "knot": cmd_knot,
    "census": cmd_census,
    "geodesic": cmd_geodesic,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _merge_config(args)
    except (_UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](cfg)
    except SystemExit as exc:
        return int(exc.code)
    except CollarViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleZone, NoRoot) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_WARP
    except (NotClosed, WindingAmbiguous, DriftAbort, CoreApproach) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GEODESY
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
