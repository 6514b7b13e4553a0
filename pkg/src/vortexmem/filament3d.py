"""Binormal flow of closed curves in R^3 and the Hasimoto wave function."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .geometry import DiscreteCurve, GeometryError

log = logging.getLogger(__name__)

FLAT_TOL = 1e-8


class TopologyChangeError(GeometryError):
    pass


def binormal_velocity(curve: DiscreteCurve) -> np.ndarray:
    """Per-vertex ``k b = t x (k n)``; zero where the curvature vanishes."""
    if curve.ambient_dim != 3:
        raise GeometryError("binormal flow is three-dimensional")
    return np.cross(geo.unit_tangents(curve), geo.curvature_vectors(curve))


def resample_arclength(curve: DiscreteCurve) -> DiscreteCurve:
    """Redistribute vertices uniformly in arclength along the polyline."""
    p = curve.points
    closed_pts = np.vstack([p, p[:1]]) if curve.closed else p
    seg = np.linalg.norm(np.diff(closed_pts, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    m = len(p)
    targets = np.linspace(0.0, s[-1], m + 1 if curve.closed else m)[: m]
    new = np.stack([np.interp(targets, s, closed_pts[:, c]) for c in range(p.shape[1])], axis=1)
    return curve.with_points(new)


def _segments_min_distance(p: np.ndarray) -> float:
    """Smallest distance between non-adjacent edges of a closed polyline."""
    m = len(p)
    a = p
    d1 = np.roll(p, -1, axis=0) - p
    i, j = np.triu_indices(m, 2)
    keep = (j - i) < m - 1  # drop the wrap-around neighbour pair
    i, j = i[keep], j[keep]
    u, v, w0 = d1[i], d1[j], a[i] - a[j]
    uu = np.einsum("ij,ij->i", u, u)
    vv = np.einsum("ij,ij->i", v, v)
    uv = np.einsum("ij,ij->i", u, v)
    uw = np.einsum("ij,ij->i", u, w0)
    vw = np.einsum("ij,ij->i", v, w0)
    den = uu * vv - uv * uv
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(den > 1e-14 * uu * vv, (uv * vw - vv * uw) / den, 0.0)
    s = np.clip(s, 0.0, 1.0)
    t = np.clip((vw + s * uv) / vv, 0.0, 1.0)
    s = np.clip((t * uv - uw) / uu, 0.0, 1.0)
    gap = w0 + s[:, None] * u - t[:, None] * v
    return float(np.min(np.linalg.norm(gap, axis=1))) if len(gap) else np.inf


def self_intersection_suspected(curve: DiscreteCurve, factor: float = 0.1) -> bool:
    """True when two non-adjacent edges come closer than ``factor`` times the shortest edge."""
    h = np.min(np.linalg.norm(curve.edges(), axis=1))
    return _segments_min_distance(curve.points) < factor * h


def rk4_step(curve: DiscreteCurve, dt: float) -> DiscreteCurve:
    x = curve.points
    k1 = binormal_velocity(curve)
    k2 = binormal_velocity(curve.with_points(x + 0.5 * dt * k1))
    k3 = binormal_velocity(curve.with_points(x + 0.5 * dt * k2))
    k4 = binormal_velocity(curve.with_points(x + dt * k3))
    return curve.with_points(x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4))


@dataclass
class FilamentRun:
    curve: DiscreteCurve
    times: np.ndarray
    lengths: np.ndarray
    resample_steps: list

    @property
    def length_drift(self) -> float:
        return float(np.max(np.abs(self.lengths - self.lengths[0])) / self.lengths[0])


def stable_dt(curve: DiscreteCurve) -> float:
    """Rough explicit-RK4 limit for the dispersive flow, ``0.7 h_min^2``."""
    return 0.7 * float(np.min(np.linalg.norm(curve.edges(), axis=1))) ** 2


def evolve_filament(curve: DiscreteCurve, dt: float, steps: int, resample_every: int = 0,
                    check_topology: bool = False, callback=None) -> FilamentRun:
    """RK4 integration of ``dgamma/dt = k b``, recording the length after each step.

    Explicit RK4 on this dispersive flow needs ``dt`` of order ``h^2``; a
    warning is logged above :func:`stable_dt`.
    """
    if dt < 0:
        raise ValueError("dt must be non-negative")
    if steps and dt > stable_dt(curve):
        log.warning("dt=%g exceeds the explicit stability estimate %g", dt, stable_dt(curve))
    lengths = [geo.curve_length(curve)]
    resampled = []
    for step in range(1, steps + 1):
        curve = rk4_step(curve, dt)
        if resample_every and step % resample_every == 0:
            curve = resample_arclength(curve)
            resampled.append(step)
            log.info("resampled curve at step %d", step)
        if check_topology and self_intersection_suspected(curve):
            raise TopologyChangeError("topology change suspected")
        lengths.append(geo.curve_length(curve))
        if callback is not None:
            callback(step, step * dt, curve)
    return FilamentRun(curve, dt * np.arange(steps + 1), np.array(lengths), resampled)


def discrete_torsion(curve: DiscreteCurve) -> np.ndarray:
    """Vertex torsion from the turning of consecutive osculating planes.

    Edge rates are the signed dihedral angle between the binormals at the
    edge's end vertices divided by the edge length; vertex values average the
    two adjacent edges.  Open curves return values for interior vertices.
    """
    k = geo.curvature_vectors(curve)
    t = geo.unit_tangents(curve)
    kn = np.linalg.norm(k, axis=1)
    inner = slice(None) if curve.closed else slice(1, -1)
    if np.any(kn[inner] < FLAT_TOL):
        raise GeometryError("torsion undefined at flat point")
    with np.errstate(invalid="ignore", divide="ignore"):
        b = np.cross(t, k) / kn[:, None]
    e = curve.edges()
    elen = np.linalg.norm(e, axis=1)
    if curve.closed:
        b0, b1 = b, np.roll(b, -1, axis=0)
    else:
        b0, b1 = b[1:-2], b[2:-1]
        e, elen = e[1:-1], elen[1:-1]
    that = e / elen[:, None]
    ang = np.arctan2(np.einsum("ij,ij->i", np.cross(b0, b1), that), np.einsum("ij,ij->i", b0, b1))
    rate = ang / elen
    if curve.closed:
        return 0.5 * (rate + np.roll(rate, 1))
    # interior vertices 1..m-2; the two outermost reuse their single adjacent edge
    out = np.empty(len(curve) - 2)
    out[1:-1] = 0.5 * (rate[1:] + rate[:-1])
    out[0], out[-1] = rate[0], rate[-1]
    return out


def hasimoto(curve: DiscreteCurve) -> np.ndarray:
    """``psi_i = k_i exp(i * int tau ds)``, phase zero at the first vertex.

    The integral is the cumulative trapezoid of vertex torsion over edge
    lengths.  For open curves only interior vertices are returned and the
    gauge is fixed at vertex 1.
    """
    if curve.ambient_dim != 3:
        raise GeometryError("Hasimoto transform is three-dimensional")
    tau = discrete_torsion(curve)
    kn = np.linalg.norm(geo.curvature_vectors(curve), axis=1)
    elen = np.linalg.norm(curve.edges(), axis=1)
    if curve.closed:
        ds = elen[:-1]
    else:
        kn = kn[1:-1]
        ds = elen[1:-1]
    phase = np.concatenate([[0.0], np.cumsum(0.5 * (tau[1:] + tau[:-1]) * ds)])
    return kn * np.exp(1j * phase)
