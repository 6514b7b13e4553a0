"""Velocity from singular vorticity: filaments in R^3 and membranes in R^n.

The membrane velocity is ``v(q) = C * int_P J(Proj_N grad_p G(q, p)) dA(p)``
with ``G = -|q - p|^(2-n) / ((n - 2) sigma_{n-1})``.  With the quarter-turn
convention of :mod:`vortexmem.geometry` this reproduces the classical
Biot-Savart law for n = 3 with no extra constant, and a loop linking the
membrane once, oriented as ``a -> -J a`` in the normal plane, carries
circulation ``C``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gamma, pi

import numpy as np

from . import geometry as geo
from .fitting import FitError, fit_log_eps
from .geometry import DiscreteCurve, DiscreteMembrane, GeometryError

CORE_TOL = 1e-6
EPS_FLOOR = 3.0
NEAR_RATIO = 3.0
MAX_DEPTH = 10


class SingularEvaluationError(GeometryError):
    pass


def sphere_area(n: int) -> float:
    """Area of the unit sphere S^(n-1) in R^n."""
    return 2 * pi ** (n / 2) / gamma(n / 2)


def _check_n(n):
    if n < 3:
        raise ValueError("the Green function here is defined for n >= 3")


def green(n: int, q, p):
    """Fundamental solution of the Laplacian, ``Delta_p G(q, .) = delta_q``."""
    _check_n(n)
    r = np.linalg.norm(np.asarray(p, dtype=float) - np.asarray(q, dtype=float), axis=-1)
    if np.any(r == 0):
        raise SingularEvaluationError("singular evaluation")
    return -r ** (2 - n) / ((n - 2) * sphere_area(n))


def green_gradient(n: int, q, p):
    """``grad_p G(q, p) = (p - q) / (sigma_{n-1} |p - q|^n)``; points from q to p."""
    _check_n(n)
    d = np.asarray(p, dtype=float) - np.asarray(q, dtype=float)
    r = np.linalg.norm(d, axis=-1)
    if np.any(r == 0):
        raise SingularEvaluationError("singular evaluation")
    return d / (sphere_area(n) * r[..., None] ** n)


# ---------------------------------------------------------------------------
# distances


def point_segment_distance(q, a, b):
    q = np.asarray(q, dtype=float)
    ab = b - a
    t = np.clip(np.einsum("...i,...i", q - a, ab) / np.einsum("...i,...i", ab, ab), 0.0, 1.0)
    return np.linalg.norm(a + t[..., None] * ab - q, axis=-1)


def point_triangle_distance(q, p0, a, b):
    """Distance from ``q`` to triangles ``p0 + s a + t b`` (s, t >= 0, s + t <= 1) in R^n."""
    q = np.asarray(q, dtype=float)
    d = q - p0
    aa = np.einsum("ij,ij->i", a, a)
    bb = np.einsum("ij,ij->i", b, b)
    ab = np.einsum("ij,ij->i", a, b)
    da = np.einsum("ij,ij->i", d, a)
    db = np.einsum("ij,ij->i", d, b)
    det = aa * bb - ab * ab
    s = (bb * da - ab * db) / det
    t = (aa * db - ab * da) / det
    inside = (s >= 0) & (t >= 0) & (s + t <= 1)
    plane = np.linalg.norm(d - s[:, None] * a - t[:, None] * b, axis=1)
    p1, p2 = p0 + a, p0 + b
    edge = np.minimum(np.minimum(point_segment_distance(q, p0, p1), point_segment_distance(q, p1, p2)),
                      point_segment_distance(q, p2, p0))
    return np.where(inside, plane, edge)


def distance_to_curve(curve: DiscreteCurve, q) -> float:
    p = curve.points
    nxt = np.roll(p, -1, axis=0) if curve.closed else p[1:]
    start = p if curve.closed else p[:-1]
    return float(np.min(point_segment_distance(q, start, nxt)))


def distance_to_membrane(mem: DiscreteMembrane, q) -> float:
    a, b, _ = geo.triangle_data(mem)
    return float(np.min(point_triangle_distance(q, mem.vertices[mem.triangles[:, 0]], a, b)))


# ---------------------------------------------------------------------------
# filaments in R^3


def _filament_sum(points, edges, strength, q):
    mid = points + 0.5 * edges
    d = q - mid
    r = np.linalg.norm(d, axis=1)
    return -strength / (4 * pi) * np.sum(np.cross(d, edges) / r[:, None] ** 3, axis=0)


def velocity_filament3d(curve: DiscreteCurve, strength: float, q) -> np.ndarray:
    """Midpoint-rule Biot-Savart velocity ``-(C/4pi) sum (q - m_e) x e / |q - m_e|^3``."""
    if curve.ambient_dim != 3:
        raise GeometryError("filament Biot-Savart is three-dimensional")
    q = np.asarray(q, dtype=float)
    if distance_to_curve(curve, q) < CORE_TOL:
        raise SingularEvaluationError("evaluation inside core")
    p = curve.points
    e = curve.edges()
    return _filament_sum(p[: len(e)], e, strength, q)


def velocity_filament_jform(curve: DiscreteCurve, strength: float, q) -> np.ndarray:
    """``C * sum_e J_e(Proj_N grad_p G) |e|`` with edge-tangent frames.

    Independent route to :func:`velocity_filament3d` through the general
    codimension-2 formula; the two agree to rounding error.
    """
    q = np.asarray(q, dtype=float)
    if distance_to_curve(curve, q) < CORE_TOL:
        raise SingularEvaluationError("evaluation inside core")
    p = curve.points
    e = curve.edges()
    length = np.linalg.norm(e, axis=1)
    t = e / length[:, None]
    e1, e2, s = geo.oriented_normal_frames(t[:, None, :])
    mid = p[: len(e)] + 0.5 * e
    g = green_gradient(3, q, mid)
    return strength * np.sum(length[:, None] * geo.apply_J(e1, e2, s, g), axis=0)


# ---------------------------------------------------------------------------
# membranes


@dataclass(frozen=True)
class _TriangleSet:
    p0: np.ndarray
    a: np.ndarray
    b: np.ndarray
    jm: np.ndarray

    def subset(self, mask):
        return _TriangleSet(self.p0[mask], self.a[mask], self.b[mask], self.jm[mask])


def _triangle_set(mem: DiscreteMembrane, mask=None) -> _TriangleSet:
    a, b, _ = geo.triangle_data(mem)
    jm = geo.triangle_j_matrices(mem)
    ts = _TriangleSet(mem.vertices[mem.triangles[:, 0]], a, b, jm)
    return ts if mask is None else ts.subset(mask)


def _edge_midpoint_rule(ts: _TriangleSet, q: np.ndarray, n: int) -> np.ndarray:
    """Sum over triangles of ``J int grad_p G dA`` with the 3-point edge-midpoint rule."""
    aa = np.einsum("ij,ij->i", ts.a, ts.a)
    bb = np.einsum("ij,ij->i", ts.b, ts.b)
    ab = np.einsum("ij,ij->i", ts.a, ts.b)
    area = 0.5 * np.sqrt(np.maximum(aa * bb - ab * ab, 0.0))
    mids = np.stack([ts.p0 + 0.5 * ts.a, ts.p0 + 0.5 * (ts.a + ts.b), ts.p0 + 0.5 * ts.b], axis=1)
    g = green_gradient(n, q, mids).sum(axis=1) * (area / 3.0)[:, None]
    return np.einsum("kij,kj->i", ts.jm, g)


def _subdivide(ts: _TriangleSet) -> _TriangleSet:
    p0, a, b = ts.p0, 0.5 * ts.a, 0.5 * ts.b
    # corners of the four children: (p0, p0+a, p0+b), (p0+a, p0+2a, p0+a+b), (p0+b, p0+a+b, p0+2b), (p0+a, p0+a+b, p0+b)
    c0 = np.concatenate([p0, p0 + a, p0 + b, p0 + a])
    ca = np.concatenate([a, a, a, b])
    cb = np.concatenate([b, b, b, b - a])
    jm = np.concatenate([ts.jm] * 4)
    return _TriangleSet(c0, ca, cb, jm)


def _adaptive_integral(ts: _TriangleSet, q: np.ndarray, n: int, depth: int = 0) -> np.ndarray:
    if len(ts.p0) == 0:
        return np.zeros(n)
    centroid = ts.p0 + (ts.a + ts.b) / 3.0
    diam = np.max(np.stack([np.linalg.norm(ts.a, axis=1), np.linalg.norm(ts.b, axis=1),
                            np.linalg.norm(ts.b - ts.a, axis=1)]), axis=0)
    near = np.linalg.norm(centroid - q, axis=1) < NEAR_RATIO * diam
    if depth >= MAX_DEPTH or not near.any():
        return _edge_midpoint_rule(ts, q, n)
    far = _edge_midpoint_rule(ts.subset(~near), q, n)
    return far + _adaptive_integral(_subdivide(ts.subset(near)), q, n, depth + 1)


def velocity_membrane(mem: DiscreteMembrane, q, refine: bool = True) -> np.ndarray:
    """Velocity at ``q`` off the membrane.

    Each flat triangle carries its own normal plane.  Triangles close to ``q``
    (centroid distance below three diameters) are split recursively before
    the edge-midpoint rule is applied, which keeps the integral accurate for
    ``q`` much closer to the membrane than the mesh spacing.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != (mem.ambient_dim,):
        raise ValueError("query point has the wrong dimension")
    if distance_to_membrane(mem, q) < CORE_TOL:
        raise SingularEvaluationError("evaluation inside core")
    ts = _triangle_set(mem)
    n = mem.ambient_dim
    g = _adaptive_integral(ts, q, n) if refine else _edge_midpoint_rule(ts, q, n)
    return mem.strength * g


def circulation(mem: DiscreteMembrane, loop) -> float:
    """``oint v . dl`` around a closed polygon (midpoint rule on its edges)."""
    loop = np.asarray(loop, dtype=float)
    e = np.roll(loop, -1, axis=0) - loop
    mids = loop + 0.5 * e
    return float(sum(velocity_membrane(mem, m) @ de for m, de in zip(mids, e)))


def linking_loop(mem: DiscreteMembrane, vertex: int, radius: float, n_points: int = 128) -> np.ndarray:
    """Circle of ``radius`` around ``vertex`` in its normal plane, oriented ``a -> -J a``.

    With this orientation a membrane of strength ``C`` has circulation ``+C``.
    """
    frame = geo.membrane_normal_frame(mem, vertex)
    a = frame.e1
    b = -geo.rotate_J(frame, a)
    phi = 2 * np.pi * np.arange(n_points) / n_points
    return mem.vertices[vertex] + radius * (np.cos(phi)[:, None] * a + np.sin(phi)[:, None] * b)


def _check_eps(eps, h):
    if eps < EPS_FLOOR * h * (1 - 1e-12):
        raise ValueError("truncation below mesh resolution")


def velocity_truncated(obj, q: int, eps: float, strength: float | None = None) -> np.ndarray:
    """Self-induced velocity at vertex ``q`` with the chordal ball ``|p - q| < eps`` removed.

    ``obj`` is a :class:`DiscreteMembrane` (triangles kept when their centroid
    is at least ``eps`` away) or a closed :class:`DiscreteCurve` in R^3 (edges
    kept by midpoint).  ``eps`` must be at least three mean edge lengths.
    """
    if isinstance(obj, DiscreteCurve):
        c = 1.0 if strength is None else strength
        p = obj.points
        e = obj.edges()
        h = float(np.mean(np.linalg.norm(e, axis=1)))
        _check_eps(eps, h)
        x = p[q]
        keep = np.linalg.norm(p[: len(e)] + 0.5 * e - x, axis=1) >= eps
        return _filament_sum(p[: len(e)][keep], e[keep], c, x)
    mem = obj
    c = mem.strength if strength is None else strength
    _check_eps(eps, mem.mesh_size())
    x = mem.vertices[q]
    v = mem.vertices
    t = mem.triangles
    centroid = (v[t[:, 0]] + v[t[:, 1]] + v[t[:, 2]]) / 3.0
    keep = np.linalg.norm(centroid - x, axis=1) >= eps
    ts = _triangle_set(mem, keep)
    return c * _adaptive_integral(ts, x, mem.ambient_dim)


def skew_mean_curvature_at(obj, q: int):
    """``(MC(q), J(MC(q)))`` for a membrane vertex or a curve vertex in R^3."""
    if isinstance(obj, DiscreteCurve):
        mc = geo.curve_curvature_vector(obj, q)
        e1, e2, s = geo.curve_normal_frames(obj)
    else:
        mc = geo.membrane_mean_curvature(obj, q)
        e1, e2, s = geo.vertex_normal_frames(obj)
    e1, e2, s = e1[q], e2[q], s[q]
    return mc, geo.apply_J(e1, e2, s, geo.project_normal(e1, e2, mc))


@dataclass(frozen=True)
class LiaSlope:
    slope: np.ndarray
    """d v_eps / d ln(1/eps); the limit of ``v_eps / ln eps`` is ``-slope``."""
    direction_error_deg: float | None
    """Angle between ``-slope`` and ``J(MC)``; None when either is negligible."""
    magnitude_ratio: float | None
    """``|slope| / (|C| |MC|)``: the empirical constant per unit strength."""
    fit_residual: float
    mc_norm: float


def lia_slope(obj, q: int, eps_list, strength: float | None = None, max_residual: float = 0.2,
              negligible: float = 1e-9) -> LiaSlope:
    """Regress the truncated velocity at ``q`` against ``ln(1/eps)``.

    Raises :class:`FitError` ("asymptotic regime not reached") when the pooled
    fit residual exceeds ``max_residual``.
    """
    eps_list = np.asarray(eps_list, dtype=float)
    vals = np.array([velocity_truncated(obj, q, e, strength) for e in eps_list])
    fit = fit_log_eps(eps_list, vals)
    if fit.residual > max_residual:
        raise FitError("asymptotic regime not reached")
    if isinstance(obj, DiscreteCurve):
        c = 1.0 if strength is None else strength
    else:
        c = obj.strength if strength is None else strength
    mc, jmc = skew_mean_curvature_at(obj, q)
    slope = np.asarray(fit.slope)
    sn, jn = np.linalg.norm(slope), np.linalg.norm(jmc)
    if sn <= negligible or jn <= negligible:
        angle = None
    else:
        cosang = np.clip(-slope @ jmc / (sn * jn), -1.0, 1.0)
        angle = float(np.degrees(np.arccos(cosang)))
    mcn = float(np.linalg.norm(mc))
    ratio = float(sn / (abs(c) * mcn)) if mcn > negligible and c != 0 else None
    return LiaSlope(slope, angle, ratio, fit.residual, mcn)


def default_eps_list(h: float, decades: float = 1.0, count: int = 6, floor: float = EPS_FLOOR):
    """Geometric eps ladder from ``floor * h`` spanning ``decades``."""
    lo = floor * h * (1 + 1e-9)
    return lo * np.logspace(0.0, decades, count)
