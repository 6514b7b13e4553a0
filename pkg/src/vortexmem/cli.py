"""Command-line front end.

Exit status: 0 success, 2 validation error (bad arguments, malformed input),
3 numerical failure (fit residual, integrator stall, collision, degeneration,
or a failed acceptance criterion).
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import acceptance
from . import biotsavart as bs
from . import energy as en
from . import filament3d as fl
from . import fixtures as fx
from . import formats
from . import geometry as geo
from . import invariants
from . import membrane_flow as mf
from . import pointvortex2d as pv
from . import symplectic as sy
from .fitting import FitError

log = logging.getLogger("vortexmem")

VERSION = f"vortexmem {__version__}"
EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3

class AcceptanceFailed(RuntimeError):
    pass


NUMERICAL_ERRORS = (AcceptanceFailed, FitError, pv.IntegratorStalled, pv.VortexCollisionError,
                    mf.MeshDegenerationError, fl.TopologyChangeError, FloatingPointError)
VALIDATION_ERRORS = (formats.FormatError, ValueError, NotImplementedError, OSError)


class OperationError(Exception):
    """Carries the name of the failing operation and the exit status."""

    def __init__(self, op, exc, status):
        super().__init__(f"{op}: {exc}")
        self.status = status


# ---------------------------------------------------------------------------
# scenario


KINDS = ("points2d", "filament3d", "membrane", "sheet_family", "lia_slope", "energy_slope", "invariants")


@dataclass
class Scenario:
    kind: str
    input: str | None = None
    out: str | None = None
    diagnostics: str | None = None
    fixture: str | None = None
    dt: float | None = None
    steps: int | None = None
    scheme: str = "rk4"
    vertex: int | None = None
    eps_decades: float = 1.0
    eps_count: int = 6
    dump_every: int | None = None
    resample_every: int | None = None
    record_every: int = 1
    seed: int | None = None
    check_topology: bool = False

    POSITIVE = ("dt", "steps", "eps_decades", "eps_count", "dump_every", "resample_every", "record_every")

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ValueError(f"unknown scenario keys: {', '.join(unknown)}")
        if "kind" not in data:
            raise ValueError("scenario needs a 'kind'")
        sc = cls(**data)
        sc.validate()
        return sc

    def validate(self):
        self.kind = self.kind.replace("-", "_")
        if self.kind not in KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        for name in self.POSITIVE:
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise ValueError(f"{name} must be positive")
        if self.vertex is not None and self.vertex < 0:
            raise ValueError("vertex must be non-negative")
        if self.seed is not None and self.seed < 0:
            raise ValueError("seed must be non-negative")


# ---------------------------------------------------------------------------
# output helpers


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    return x


def write_json(path, payload: dict):
    data = {"version": VERSION, **_jsonable(payload)}
    formats.write_text(path, json.dumps(data, indent=2, sort_keys=True) + "\n")


class NdjsonWriter:
    def __init__(self, path, meta: dict):
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        self.fh = open(path, "w", newline="\n")
        self.write({"record": "meta", "version": VERSION, **meta})

    def write(self, rec: dict):
        self.fh.write(json.dumps(_jsonable(rec), sort_keys=True) + "\n")

    def close(self):
        self.fh.close()


def _require(sc, *names):
    missing = [n for n in names if getattr(sc, n) is None]
    if missing:
        raise ValueError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _read_geometry(path):
    """Curve if the file has a ``c`` record, otherwise a mesh."""
    parsed = formats.parse(path)
    return formats.read_curve(path) if parsed.curves else formats.read_mesh(path)


# ---------------------------------------------------------------------------
# drivers


def sim_points2d(sc: Scenario):
    _require(sc, "input", "dt", "steps", "out")
    cfg = formats.read_points(sc.input)
    diag_path = sc.diagnostics or str(Path(sc.out).with_suffix("")) + ".diagnostics.csv"
    Path(sc.out).parent.mkdir(parents=True, exist_ok=True)
    with open(sc.out, "w", newline="") as ft, open(diag_path, "w", newline="") as fd:
        ft.write(f"# {VERSION}\n")
        fd.write(f"# {VERSION}\n")
        tw, dw = csv.writer(ft, lineterminator="\n"), csv.writer(fd, lineterminator="\n")
        tw.writerow(["t", "j", "x", "y"])
        dw.writerow(["t", "H", "Px", "Py", "I"])

        def emit(step, c):
            t = step * sc.dt
            for j, (x, y) in enumerate(c.positions):
                tw.writerow([repr(t), j, repr(float(x)), repr(float(y))])
            d = pv.first_integrals(c)
            dw.writerow([repr(t)] + [repr(d[k]) for k in ("H", "Px", "Py", "I")])

        emit(0, cfg)
        for step in range(1, sc.steps + 1):
            cfg = pv.step2d(cfg, sc.dt, sc.scheme)
            if step % sc.record_every == 0 or step == sc.steps:
                emit(step, cfg)
    log.info("wrote %s and %s", sc.out, diag_path)


def sim_filament3d(sc: Scenario):
    _require(sc, "input", "dt", "steps", "out")
    curve = formats.read_curve(sc.input)
    w = NdjsonWriter(sc.out, {"kind": "filament3d", "dt": sc.dt, "steps": sc.steps})
    try:
        w.write({"step": 0, "t": 0.0, "length": geo.curve_length(curve), "vertices": curve.points})

        def cb(step, t, c):
            if step % sc.record_every == 0 or step == sc.steps:
                w.write({"step": step, "t": t, "length": geo.curve_length(c), "vertices": c.points})

        run = fl.evolve_filament(curve, sc.dt, sc.steps, resample_every=sc.resample_every or 0,
                                 check_topology=sc.check_topology, callback=cb)
        w.write({"record": "summary", "length_drift": run.length_drift, "resampled_at": run.resample_steps})
    finally:
        w.close()


def sim_membrane(sc: Scenario):
    _require(sc, "input", "dt", "steps", "out")
    mem = formats.read_mesh(sc.input)
    w = NdjsonWriter(sc.out, {"kind": "membrane", "dt": sc.dt, "steps": sc.steps})
    try:
        w.write({"step": 0, "t": 0.0, "volume": geo.membrane_volume(mem), "centroid": mem.vertices.mean(axis=0)})

        def cb(step, t, m):
            if step % sc.record_every == 0 or step == sc.steps:
                w.write({"step": step, "t": t, "volume": geo.membrane_volume(m), "centroid": m.vertices.mean(axis=0)})
            if sc.dump_every and step % sc.dump_every == 0:
                w.write({"record": "dump", "step": step, "vertices": m.vertices})

        run = mf.evolve_membrane(mem, sc.dt, sc.steps, callback=cb)
        w.write({"record": "summary", "volume_drift": run.volume_drift,
                 "displacement": run.centroids[-1] - run.centroids[0]})
    finally:
        w.close()


def sim_sheet_family(sc: Scenario):
    _require(sc, "input", "dt", "steps", "out")
    fib = formats.read_fibration(sc.input)
    w = NdjsonWriter(sc.out, {"kind": "sheet_family", "dt": sc.dt, "steps": sc.steps, "fibers": len(fib)})
    try:
        h0 = fib.hamiltonian()
        w.write({"step": 0, "t": 0.0, "H": h0})
        for step in range(1, sc.steps + 1):
            fib = sy.sheet_family_binormal_step(fib, sc.dt)
            if step % sc.record_every == 0 or step == sc.steps:
                w.write({"step": step, "t": step * sc.dt, "H": fib.hamiltonian(),
                         "fiber_centroids": [c.points.mean(axis=0) for c in fib.fibers]})
        w.write({"record": "summary", "H_drift": abs(fib.hamiltonian() - h0) / h0})
    finally:
        w.close()


def _eps_list(obj, sc):
    if isinstance(obj, geo.DiscreteCurve):
        h = float(np.mean(np.linalg.norm(obj.edges(), axis=1)))
    else:
        h = obj.mesh_size()
    return bs.default_eps_list(h, sc.eps_decades, sc.eps_count)


def analyze_lia(sc: Scenario):
    _require(sc, "input", "out")
    obj = _read_geometry(sc.input)
    q = 0 if sc.vertex is None else sc.vertex
    n_vert = len(obj) if isinstance(obj, geo.DiscreteCurve) else len(obj.vertices)
    if q >= n_vert:
        raise ValueError(f"vertex {q} out of range ({n_vert} vertices)")
    eps = _eps_list(obj, sc)
    res = bs.lia_slope(obj, q, eps)
    write_json(sc.out, {
        "analysis": "lia_slope",
        "vertex": q,
        "eps": eps,
        "slope": res.slope,
        "slope_norm": float(np.linalg.norm(res.slope)),
        "direction_error_deg": res.direction_error_deg if res.direction_error_deg is not None else "not-applicable",
        "c_n_estimate": res.magnitude_ratio if res.magnitude_ratio is not None else "not-applicable",
        "fit_residual": res.fit_residual,
        "mc_norm": res.mc_norm,
    })


def analyze_energy(sc: Scenario):
    _require(sc, "input", "out")
    obj = _read_geometry(sc.input)
    eps = _eps_list(obj, sc)
    res = en.energy_slope(obj, eps)
    write_json(sc.out, {
        "analysis": "energy_slope",
        "eps": eps,
        "energies": res.energies,
        "slope": res.slope,
        "slope_per_volume": res.slope_per_volume,
        "volume": en.volume_of(obj),
        "fit_residual": res.fit_residual,
    })


def check_invariants(sc: Scenario):
    _require(sc, "fixture", "out")
    checks = invariants.run_suite(sc.fixture)
    write_json(sc.out, {"fixture": sc.fixture, "checks": checks, "all_passed": all(c["passed"] for c in checks)})


DRIVERS = {
    "points2d": ("pointvortex2d.step2d", sim_points2d),
    "filament3d": ("filament3d.evolve_filament", sim_filament3d),
    "membrane": ("membrane_flow.evolve_membrane", sim_membrane),
    "sheet_family": ("symplectic.sheet_family_binormal_step", sim_sheet_family),
    "lia_slope": ("biotsavart.lia_slope", analyze_lia),
    "energy_slope": ("energy.energy_slope", analyze_energy),
    "invariants": ("invariants.run_suite", check_invariants),
}


# ---------------------------------------------------------------------------
# evaluate


def _load_field(path, rows, dim, name):
    if path is None:
        raise ValueError(f"--{name} is required")
    try:
        arr = np.loadtxt(path, ndmin=2, comments="#")
    except (OSError, ValueError) as exc:
        raise formats.FormatError(path, 0, f"cannot read field table ({exc})") from None
    if arr.shape == (1, dim) and rows != 1:
        arr = np.tile(arr, (rows, 1))
    if arr.shape != (rows, dim):
        raise ValueError(f"{name} table must have {rows} rows of {dim} columns, got {arr.shape}")
    return arr


def evaluate(args):
    form = args.form
    if form == "kk":
        cfg = formats.read_points(args.input)
        V = _load_field(args.v_field, len(cfg), 2, "v-field")
        W = _load_field(args.w_field, len(cfg), 2, "w-field")
        return "symplectic.kk_form_points", sy.kk_form_points(cfg, V, W)
    if form == "mw":
        obj = _read_geometry(args.input)
        if isinstance(obj, geo.DiscreteCurve):
            V = _load_field(args.v_field, len(obj), 3, "v-field")
            W = _load_field(args.w_field, len(obj), 3, "w-field")
            return "symplectic.mw_form_curve", sy.mw_form_curve(obj, V, W)
        nv = len(obj.vertices)
        V = _load_field(args.v_field, nv, obj.ambient_dim, "v-field")
        W = _load_field(args.w_field, nv, obj.ambient_dim, "w-field")
        return "symplectic.mw_form_membrane", sy.mw_form_membrane(obj, V, W)
    sheet = formats.read_sheet(args.input)
    if form == "sheet-form":
        nv = len(sheet.mesh.vertices)
        V = _load_field(args.v_field, nv, 3, "v-field")
        W = _load_field(args.w_field, nv, 3, "w-field")
        return "symplectic.sheet_form", sy.sheet_form(sheet, V, W)
    V = _load_field(args.v_field, len(sheet.mesh.triangles), 3, "v-field")
    return "symplectic.sheet_pairing", sy.sheet_pairing(sheet, V)


# ---------------------------------------------------------------------------
# fixtures


def make_fixture(args) -> str:
    name = args.name.replace("-", "_")
    r = 1.0 if args.radius is None else args.radius
    if name == "circle3d":
        return formats.curve_text(fx.circle(args.vertices or 512, r))
    if name == "ellipse3d":
        return formats.curve_text(fx.ellipse(args.vertices or 256))
    if name == "perturbed_circle":
        return formats.curve_text(fx.perturbed_circle(args.vertices or 128, seed=args.seed or 0))
    if name == "helix":
        return formats.curve_text(fx.helix(args.vertices or 200))
    if name == "icosphere4d":
        return formats.mesh_text(fx.icosphere4d(r, 4 if args.level is None else args.level))
    if name == "ellipsoid4d":
        return formats.mesh_text(fx.icosphere4d(r, 4 if args.level is None else args.level, axes=(1.0, 1.0, 0.5)))
    if name == "flatpatch4d":
        return formats.mesh_text(fx.flatpatch4d(n=args.vertices or 16))
    if name == "torus4d":
        return formats.mesh_text(fx.torus4d())
    if name == "sphere_band_sheet":
        return formats.sheet_text(fx.sphere_band_sheet(args.width or 0.1, 4 if args.level is None else args.level))
    if name == "torus_band_sheet":
        return formats.sheet_text(fx.torus_band_sheet(args.width or 0.6))
    if name == "cylinder_fibration":
        return formats.fibration_text(fx.cylinder_fibration(args.n or 8, args.vertices or 128, r))
    if name == "random_vortices":
        return formats.points_text(fx.random_vortices(args.n or 4, args.seed or 0))
    if name == "two_vortices":
        return formats.points_text(pv.VortexConfig2D([[0.5, 0.0], [-0.5, 0.0]], [1.0, 1.0]))
    raise ValueError(f"unknown fixture {args.name!r}")


FIXTURES = ("circle3d", "ellipse3d", "perturbed_circle", "helix", "icosphere4d", "ellipsoid4d", "flatpatch4d",
            "torus4d", "sphere_band_sheet", "torus_band_sheet", "cylinder_fibration", "random_vortices",
            "two_vortices")


# ---------------------------------------------------------------------------
# argument parsing


def _positive_float(s):
    x = float(s)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _positive_int(s):
    x = int(s)
    if x <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return x


def _nonneg_int(s):
    x = int(s)
    if x < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return x


def _sim_options(p):
    p.add_argument("--input", required=True)
    p.add_argument("--dt", type=_positive_float, required=True)
    p.add_argument("--steps", type=_positive_int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--record-every", type=_positive_int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vortexmem", description="Vortex membranes: flows, slopes and symplectic forms.",
                                 allow_abbrev=False)
    ap.add_argument("--version", action="version", version=VERSION)
    ap.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", allow_abbrev=False).add_subparsers(dest="kind", required=True)
    p = sim.add_parser("points2d", allow_abbrev=False)
    _sim_options(p)
    p.add_argument("--scheme", choices=["rk4", "implicit_midpoint"], default="rk4")
    p.add_argument("--diagnostics")
    p = sim.add_parser("filament3d", allow_abbrev=False)
    _sim_options(p)
    p.add_argument("--resample-every", type=_positive_int)
    p.add_argument("--check-topology", action="store_true")
    p = sim.add_parser("membrane", allow_abbrev=False)
    _sim_options(p)
    p.add_argument("--dump-every", type=_positive_int)
    p = sim.add_parser("sheet-family", allow_abbrev=False)
    _sim_options(p)

    ana = sub.add_parser("analyze", allow_abbrev=False).add_subparsers(dest="kind", required=True)
    for name in ("lia-slope", "energy-slope"):
        p = ana.add_parser(name, allow_abbrev=False)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--mesh", dest="input")
        src.add_argument("--curve", dest="input")
        p.add_argument("--eps-decades", type=_positive_float, default=1.0)
        p.add_argument("--eps-count", type=_positive_int, default=6)
        p.add_argument("--out", required=True)
        if name == "lia-slope":
            p.add_argument("--vertex", type=_nonneg_int, default=0)

    ev = sub.add_parser("evaluate", allow_abbrev=False)
    ev.add_argument("form", choices=["mw", "kk", "sheet-form", "pairing"])
    ev.add_argument("--input", required=True, help="curve/mesh (mw), points (kk) or sheet file")
    ev.add_argument("--v-field", required=True, help="whitespace table, one row per vertex (or per triangle for pairing)")
    ev.add_argument("--w-field")
    ev.add_argument("--out", required=True)

    fxp = sub.add_parser("fixture", allow_abbrev=False)
    fxp.add_argument("name", choices=FIXTURES + tuple(f.replace("_", "-") for f in FIXTURES if "_" in f))
    fxp.add_argument("--out", required=True)
    fxp.add_argument("--radius", type=_positive_float)
    fxp.add_argument("--level", type=_nonneg_int)
    fxp.add_argument("--vertices", type=_positive_int)
    fxp.add_argument("--n", type=_positive_int)
    fxp.add_argument("--seed", type=_nonneg_int)
    fxp.add_argument("--width", type=_positive_float)

    chk = sub.add_parser("check", allow_abbrev=False)
    chk.add_argument("what", choices=["invariants"])
    chk.add_argument("--fixture", required=True, choices=sorted(invariants.SUITES))
    chk.add_argument("--out", required=True)

    acc = sub.add_parser("acceptance", allow_abbrev=False, help="run one acceptance criterion (1-10) or all")
    acc.add_argument("criterion", choices=[str(i) for i in range(1, 11)] + ["all"])
    acc.add_argument("--out", required=True)

    run = sub.add_parser("run", allow_abbrev=False, help="run a scenario from flags and/or a JSON config")
    run.add_argument("kind", choices=KINDS + tuple(k.replace("_", "-") for k in KINDS if "_" in k))
    run.add_argument("--config", help="JSON object of scenario keys; unknown keys are rejected")
    for f in dataclasses.fields(Scenario):
        if f.name == "kind":
            continue
        flag = "--" + f.name.replace("_", "-")
        if f.name == "check_topology":
            run.add_argument(flag, action="store_true", default=None)
        else:
            typ = {"dt": float, "eps_decades": float}.get(f.name, int if "int" in str(f.type) else str)
            run.add_argument(flag, type=typ, default=None)
    return ap


def _scenario_from_run(args) -> Scenario:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise formats.FormatError(args.config, exc.lineno, f"invalid JSON ({exc.msg})") from None
        if not isinstance(data, dict):
            raise ValueError("scenario config must be a JSON object")
    for f in dataclasses.fields(Scenario):
        val = getattr(args, f.name, None)
        if f.name != "kind" and val is not None:
            data[f.name] = val
    kind = args.kind.replace("-", "_")
    if data.get("kind", kind).replace("-", "_") != kind:
        raise ValueError(f"config kind {data['kind']!r} does not match {args.kind!r}")
    data["kind"] = kind
    return Scenario.from_dict(data)


def _scenario_from_args(kind, args) -> Scenario:
    names = {f.name for f in dataclasses.fields(Scenario)}
    data = {k: v for k, v in vars(args).items() if k in names and v is not None and k != "kind"}
    data["kind"] = kind
    return Scenario.from_dict(data)


def run_acceptance(args):
    numbers = range(1, 11) if args.criterion == "all" else [int(args.criterion)]
    results = []
    for k in numbers:
        r = acceptance.run(k)
        print(r.line(), flush=True)
        results.append(r)
    write_json(args.out, {"criteria": [r.as_dict() for r in results], "all_passed": all(r.passed for r in results)})
    failed = [r.criterion for r in results if not r.passed]
    if failed:
        raise AcceptanceFailed(f"criteria failed: {failed}")


def _dispatch(args):
    """Operation name and thunk for the commands that do not go through a Scenario."""
    cmd = args.command
    if cmd == "check":
        return DRIVERS["invariants"][0], lambda: check_invariants(_scenario_from_args("invariants", args))
    if cmd == "acceptance":
        return "acceptance.run", lambda: run_acceptance(args)
    if cmd == "evaluate":
        def go():
            op, value = evaluate(args)
            write_json(args.out, {"form": args.form, "operation": op, "value": value})
        return "symplectic." + args.form.replace("-", "_"), go
    if cmd == "fixture":
        return "cli.make_fixture", lambda: formats.write_text(args.out, make_fixture(args))
    raise ValueError(f"unknown command {cmd}")


def _guarded(op, fn, *a):
    try:
        return fn(*a)
    except NUMERICAL_ERRORS as exc:
        raise OperationError(op, exc, EXIT_NUMERICAL) from exc
    except VALIDATION_ERRORS as exc:
        raise OperationError(op, exc, EXIT_INVALID) from exc


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            sc = _guarded("cli.run", _scenario_from_run, args)
            op, fn = DRIVERS[sc.kind]
            _guarded(op, fn, sc)
        elif args.command in ("simulate", "analyze"):
            sc = _guarded("cli." + args.command, _scenario_from_args, args.kind.replace("-", "_"), args)
            op, fn = DRIVERS[sc.kind]
            _guarded(op, fn, sc)
        else:
            op, fn = _guarded("cli." + args.command, _dispatch, args)
            _guarded(op, fn)
    except OperationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.status
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
