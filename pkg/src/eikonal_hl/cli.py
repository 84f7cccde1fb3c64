"""Command-line front end: ``eikonal-hl [flags] {eval,terminate,spectrum,classify,map}``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.  Errors are
reported as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import characteristics as ch
from . import classify as cl
from . import conjugate as cj
from . import hopflax as hl
from . import sigmap as sm
from .config import (
    build_field,
    build_tolerances,
    defaults_yaml,
    ensure_writable_dir,
    load_config,
)
from .errors import ConfigError, EikonalError, NotApplicable, SingularJacobian

SCHEMA = sm.SCHEMA_VERSION
COMMANDS = ("eval", "terminate", "spectrum", "classify", "map")


def _dump(obj) -> str:
    return json.dumps(cl._jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _point(p, dim):
    if not isinstance(p, dict) or set(p) - {"x", "t"} or "x" not in p or "t" not in p:
        raise ConfigError(f"a point needs exactly the keys x and t, got {p!r}")
    x = np.atleast_1d(np.asarray(p["x"], dtype=float))
    if x.size != dim:
        raise ConfigError(f"point x={p['x']!r} does not match field dimension {dim}")
    try:
        return hl.SpaceTimePoint(x, float(p["t"]))
    except ValueError as e:
        raise ConfigError(str(e)) from None


def _header(cmd, f, cfg):
    return {"schema": SCHEMA, "command": cmd, "field": f.describe() | {"params": getattr(f, "params", {})},
            "seed": cfg["seed"]}


def cmd_eval(cfg, f, tol):
    sec = cfg["eval"]
    pts = sec.get("points")
    single = pts is None
    pts = [sec["point"]] if single else pts
    results = []
    for p in pts:
        q = _point(p, f.dim)
        ms = hl.minimizer_set(f, q, tol)
        gr = hl.gradient_u(f, q, tol, ms=ms)
        rg = hl.reachable_gradients(f, q, tol, ms=ms)
        pc = cl.classify_point(f, q, tol)
        results.append({
            "x": q.x.tolist(), "t": q.t, "u": ms.value,
            "label": pc.label,
            "gradient_status": gr.status,
            "Du": None if gr.Du is None else gr.Du.tolist(),
            "minimizers": ms.to_dict(),
            "reachable_gradients": rg.vectors.tolist(),
            "reachable_continuum": rg.continuum,
        })
    out = _header("eval", f, cfg)
    if single:
        out.update(results[0])
    else:
        out["results"] = results
    return _dump(out)


def _y0_list(cfg, f):
    sec = cfg["terminate"]
    ys = []
    if sec.get("y0") is not None:
        ys += [np.atleast_1d(np.asarray(y, dtype=float)) for y in sec["y0"]]
    rnd = sec.get("random_y0")
    if rnd:
        rng = np.random.default_rng(int(cfg["seed"]))
        lo = np.asarray(rnd.get("lo", [-2.0] * f.dim), dtype=float)
        hi = np.asarray(rnd.get("hi", [2.0] * f.dim), dtype=float)
        ys += list(rng.uniform(lo, hi, size=(int(rnd.get("count", 10)), f.dim)))
    for y in ys:
        if y.size != f.dim:
            raise ConfigError(f"y0 {y.tolist()} does not match field dimension {f.dim}")
    return ys


def cmd_terminate(cfg, f, tol):
    sec = cfg["terminate"]
    T = float(sec["T_max"])
    if not T > 0:
        raise ConfigError("terminate.T_max must be positive")
    P = sec.get("P")
    n = f.dim
    buf = io.StringIO()
    buf.write(f"# schema: {SCHEMA} terminate\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"y{i + 1}" for i in range(n)] + [
        "t_bar", "t_s", "t_bar_capped", "t_s_capped",
        "t_bar_bisect", "t_s_bisect", "t_bar_bisect_capped", "t_s_bisect_capped",
        "method_gap", "agree", "truncated"])
    for y in _y0_list(cfg, f):
        b = ch.termination_times_bisect(f, y, T, P=P, tol=tol)
        try:
            a = ch.termination_times(f, y, T, tol) if P is None else None
        except NotApplicable:
            a = None
        if a is None:
            a_cells = ["", "", "", ""]
            gap, agree = "", ""
        else:
            a_cells = [repr(a.t_bar), repr(a.t_s), int(a.bar_capped), int(a.s_capped)]
            gap = repr(max(abs(a.t_bar - b.t_bar), abs(a.t_s - b.t_s)))
            agree = int(ch.times_agree(a, b, tol))
        w.writerow([repr(float(v)) for v in y] + a_cells + [
            repr(b.t_bar), repr(b.t_s), int(b.bar_capped), int(b.s_capped), gap, agree,
            int(b.truncated or (a is not None and a.truncated))])
    text = buf.getvalue()
    if sec.get("output"):
        ensure_writable_dir(os.path.dirname(os.path.abspath(sec["output"])))
        with open(sec["output"], "w") as fh:
            fh.write(text)
    return text


def cmd_spectrum(cfg, f, tol):
    sec = cfg["spectrum"]
    y0 = np.atleast_1d(np.asarray(sec["y0"], dtype=float))
    if y0.size != f.dim:
        raise ConfigError("spectrum.y0 does not match the field dimension")
    spec = cj.direction_jacobian(f, y0, tol)
    samples = []
    for t in sec.get("t_samples") or []:
        t = float(t)
        d = cj.det_Xy(f, y0, t, tol, A=spec.A)
        try:
            Hm = cj.hessian_transport(f, y0, t, tol, A=spec.A).tolist()
        except SingularJacobian:
            Hm = None
        samples.append({"t": t, "det_Xy": d, "hessian_u": Hm})
    bl = cj.blowup_probe(f, y0, T_max=float(sec["T_max"]), tol=tol)
    out = _header("spectrum", f, cfg)
    out.update({"spectrum": spec.to_dict(), "samples": samples, "blowup": bl.to_dict()})
    return _dump(out)


def cmd_classify(cfg, f, tol):
    res = []
    for p in cfg["classify"].get("points") or []:
        q = _point(p, f.dim)
        res.append({"x": q.x.tolist(), "t": q.t, **cl.classify_point(f, q, tol).to_dict()})
    out = _header("classify", f, cfg)
    out["results"] = res
    return _dump(out)


def cmd_map(cfg, f, tol):
    sec = cfg["map"]
    g = sec["grid"]
    try:
        spec = sm.GridSpec(g["lo"], g["hi"], g["t_min"], g["t_max"], g["res"], g["nt"])
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"map.grid: {e}") from None
    strata = list(sec.get("strata") or [cl.SIGMA, cl.T1])
    bad = [s for s in strata if s not in sm.CODES]
    if bad:
        raise ConfigError(f"map.strata: unknown labels {bad}")
    if sec.get("adjacency") not in (sm.FACES, sm.FACES_DIAGONALS):
        raise ConfigError(f"map.adjacency must be {sm.FACES!r} or {sm.FACES_DIAGONALS!r}")
    outdir = sec["output_dir"]
    ensure_writable_dir(outdir)
    grid = sm.scan_grid(f, spec, tol, workers=int(cfg["workers"]))
    rep = sm.label_components(grid, strata, sec["adjacency"])
    defects = {}
    for k in sec.get("smoothness_orders") or []:
        defects[str(int(k))] = sm.smoothness_probe(f, grid, int(k), tol=tol).to_dict(grid)
    sm.write_nodes_csv(grid, os.path.join(outdir, "nodes.csv"))
    report = _header("map", f, cfg)
    report.update({"grid": spec.to_dict(), "report": rep.to_dict(), "smoothness": defects})
    sm.write_json(cl._jsonable(report), os.path.join(outdir, "report.json"))
    files = ["nodes.csv", "report.json"]
    if sec.get("pgm", True) and spec.dim <= 2:
        files += [os.path.relpath(p, outdir) for p in sm.write_pgm_slices(grid, os.path.join(outdir, "pgm"))]
    summary = {"schema": SCHEMA, "command": "map", "components": rep.n_components,
               "counts": rep.counts, "output_dir": outdir, "files": files}
    return _dump(summary)


HANDLERS = {"eval": cmd_eval, "terminate": cmd_terminate, "spectrum": cmd_spectrum,
            "classify": cmd_classify, "map": cmd_map}


def build_parser():
    p = argparse.ArgumentParser(prog="eikonal-hl", description=__doc__.splitlines()[0])
    p.add_argument("--config", metavar="PATH", help="YAML run configuration")
    p.add_argument("--workers", type=int, help="worker processes for grid scans")
    p.add_argument("--seed", type=int, help="seed for randomly drawn y0")
    p.add_argument("--print-defaults", action="store_true", help="print the default configuration and exit")
    p.add_argument("command", nargs="?", choices=COMMANDS)
    return p


def _fail(kind, code, exc):
    sys.stderr.write(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)},
                                sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    if args.print_defaults:
        sys.stdout.write(defaults_yaml())
        return 0
    if args.command is None:
        return _fail("config", 2, ConfigError("a subcommand is required: " + ", ".join(COMMANDS)))
    try:
        cfg = load_config(args.config)
        if args.workers is not None:
            cfg["workers"] = args.workers
        if args.seed is not None:
            cfg["seed"] = args.seed
        if int(cfg["workers"]) < 1:
            raise ConfigError("workers must be >= 1")
        tol = build_tolerances(cfg)
        f = build_field(cfg)
    except ConfigError as e:
        return _fail("config", 2, e)
    try:
        text = HANDLERS[args.command](cfg, f, tol)
    except ConfigError as e:
        return _fail("config", 2, e)
    except EikonalError as e:
        return _fail("numerical", 3, e)
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
