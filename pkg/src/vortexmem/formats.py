"""Plain-text fixture formats.

One record per line, ``#`` starts a comment::

    dim 4                 # ambient dimension, first record
    v x1 ... xn           # vertex, 0-based in order of appearance
    t i j k               # triangle
    strength C            # membrane strength (default 1)
    c i1 ... im closed    # curve through vertex indices (or ``open``)
    f value               # sheet potential, one per vertex in order
    a i j value           # sheet edge value on the oriented edge i -> j
    pv x y kappa          # point vortex
    fiber fvalue          # starts a new fibration fiber; following v lines belong to it
    df value              # fibration level spacing

Writers use ``repr`` floats so identical inputs give identical bytes.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .geometry import DiscreteCurve, DiscreteMembrane
from .pointvortex2d import VortexConfig2D


class FormatError(ValueError):
    def __init__(self, path, lineno, msg):
        where = f"{path}:{lineno}" if lineno else str(path)
        super().__init__(f"{where}: {msg}")
        self.lineno = lineno


_KNOWN = {"dim", "v", "t", "strength", "c", "f", "a", "pv", "fiber", "df"}


def _records(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(path, 0, f"cannot read file ({exc.strerror})") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] not in _KNOWN:
            raise FormatError(path, lineno, f"unknown record {tok[0]!r}")
        yield lineno, tok[0], tok[1:]


def _floats(path, lineno, toks, count=None):
    if count is not None and len(toks) != count:
        raise FormatError(path, lineno, f"expected {count} numbers, got {len(toks)}")
    try:
        vals = [float(x) for x in toks]
    except ValueError:
        raise FormatError(path, lineno, "malformed number") from None
    if not all(np.isfinite(vals)):
        raise FormatError(path, lineno, "non-finite number")
    return vals


def _ints(path, lineno, toks, count=None):
    if count is not None and len(toks) != count:
        raise FormatError(path, lineno, f"expected {count} indices, got {len(toks)}")
    try:
        vals = [int(x) for x in toks]
    except ValueError:
        raise FormatError(path, lineno, "malformed index") from None
    if any(v < 0 for v in vals):
        raise FormatError(path, lineno, "negative index")
    return vals


class _Parsed:
    def __init__(self):
        self.dim = None
        self.vertices = []
        self.triangles = []
        self.tri_lines = []
        self.strength = 1.0
        self.curves = []
        self.f = []
        self.a = []
        self.pv = []
        self.fibers = []
        self.df = None


def parse(path) -> _Parsed:
    out = _Parsed()
    for lineno, kind, toks in _records(path):
        if kind == "dim":
            if out.dim is not None:
                raise FormatError(path, lineno, "duplicate dim")
            (d,) = _ints(path, lineno, toks, 1)
            if d < 2:
                raise FormatError(path, lineno, "dim must be at least 2")
            out.dim = d
        elif kind == "v":
            if out.dim is None:
                raise FormatError(path, lineno, "vertex before dim header")
            vals = _floats(path, lineno, toks, out.dim)
            (out.fibers[-1][1] if out.fibers else out.vertices).append(vals)
        elif kind == "t":
            out.triangles.append(_ints(path, lineno, toks, 3))
            out.tri_lines.append(lineno)
        elif kind == "strength":
            (out.strength,) = _floats(path, lineno, toks, 1)
        elif kind == "c":
            if len(toks) < 3 or toks[-1] not in ("closed", "open"):
                raise FormatError(path, lineno, "curve needs indices followed by 'closed' or 'open'")
            out.curves.append((_ints(path, lineno, toks[:-1]), toks[-1] == "closed", lineno))
        elif kind == "f":
            out.f.extend(_floats(path, lineno, toks, 1))
        elif kind == "a":
            if len(toks) != 3:
                raise FormatError(path, lineno, "edge value needs 'a i j value'")
            i, j = _ints(path, lineno, toks[:2])
            (val,) = _floats(path, lineno, toks[2:])
            out.a.append(((i, j), val))
        elif kind == "pv":
            out.pv.append(_floats(path, lineno, toks, 3))
        elif kind == "fiber":
            (fv,) = _floats(path, lineno, toks, 1)
            out.fibers.append((fv, []))
        elif kind == "df":
            (out.df,) = _floats(path, lineno, toks, 1)
    return out


def _require(cond, path, msg, lineno=0):
    if not cond:
        raise FormatError(path, lineno, msg)


def read_mesh(path) -> DiscreteMembrane:
    p = parse(path)
    _require(p.dim is not None, path, "missing dim header")
    _require(p.vertices and p.triangles, path, "mesh needs vertices and triangles")
    nv = len(p.vertices)
    for tri, ln in zip(p.triangles, p.tri_lines):
        _require(max(tri) < nv, path, f"triangle index out of range (have {nv} vertices)", ln)
        _require(len(set(tri)) == 3, path, "triangle repeats a vertex", ln)
    return DiscreteMembrane(np.array(p.vertices), np.array(p.triangles), p.strength)


def read_curve(path) -> DiscreteCurve:
    p = parse(path)
    _require(p.dim is not None, path, "missing dim header")
    _require(len(p.curves) == 1, path, "expected exactly one 'c' record")
    idx, closed, ln = p.curves[0]
    _require(max(idx) < len(p.vertices), path, "curve index out of range", ln)
    return DiscreteCurve(np.array(p.vertices)[idx], closed=closed)


def read_sheet(path):
    from .symplectic import VortexSheet

    mesh = read_mesh(path)
    p = parse(path)
    _require(mesh.ambient_dim == 3, path, "sheets need dim 3")
    _require(bool(p.f) != bool(p.a), path, "sheet needs either 'f' lines or 'a' lines, not both")
    if p.f:
        _require(len(p.f) == len(mesh.vertices), path, "one 'f' value per vertex required")
        return VortexSheet.from_potential(mesh, np.array(p.f))
    return VortexSheet.from_edge_values(mesh, dict(p.a))


def read_points(path) -> VortexConfig2D:
    p = parse(path)
    _require(p.pv, path, "no 'pv' records")
    arr = np.array(p.pv)
    return VortexConfig2D(arr[:, :2], arr[:, 2])


def read_fibration(path):
    from .symplectic import SheetFibration

    p = parse(path)
    _require(p.dim == 3, path, "fibrations need dim 3")
    _require(p.fibers, path, "no 'fiber' records")
    _require(p.df is not None, path, "missing df")
    curves = [DiscreteCurve(np.array(v), closed=True) for _, v in p.fibers]
    return SheetFibration(curves, [f for f, _ in p.fibers], p.df)


# ---------------------------------------------------------------------------
# writers


def _fmt(x) -> str:
    return repr(float(x))


def _vertex_lines(points):
    return ["v " + " ".join(_fmt(x) for x in row) for row in np.asarray(points)]


def mesh_text(mem: DiscreteMembrane) -> str:
    lines = [f"dim {mem.ambient_dim}"] + _vertex_lines(mem.vertices)
    lines += [f"t {a} {b} {c}" for a, b, c in mem.triangles]
    lines.append(f"strength {_fmt(mem.strength)}")
    return "\n".join(lines) + "\n"


def curve_text(curve: DiscreteCurve) -> str:
    lines = [f"dim {curve.ambient_dim}"] + _vertex_lines(curve.points)
    lines.append("c " + " ".join(str(i) for i in range(len(curve))) + (" closed" if curve.closed else " open"))
    return "\n".join(lines) + "\n"


def sheet_text(sheet) -> str:
    text = mesh_text(sheet.mesh)
    if sheet.is_exact:
        extra = [f"f {_fmt(x)}" for x in sheet.potential]
    else:
        extra = [f"a {i} {j} {_fmt(x)}" for (i, j), x in zip(sheet.edges, sheet.alpha)]
    return text + "\n".join(extra) + "\n"


def points_text(cfg: VortexConfig2D) -> str:
    return "".join(f"pv {_fmt(x)} {_fmt(y)} {_fmt(k)}\n" for (x, y), k in zip(cfg.positions, cfg.strengths))


def fibration_text(fib) -> str:
    lines = ["dim 3", f"df {_fmt(fib.df)}"]
    for fv, c in zip(fib.f_values, fib.fibers):
        lines.append(f"fiber {_fmt(fv)}")
        lines += _vertex_lines(c.points)
    return "\n".join(lines) + "\n"


def write_text(path, text: str):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
