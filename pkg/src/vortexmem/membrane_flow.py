"""Skew-mean-curvature flow ``dP/dt = -J(MC)`` of codimension-2 membranes."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .geometry import DiscreteCurve, DiscreteMembrane, GeometryError

log = logging.getLogger(__name__)

MAX_ASPECT = 100.0


class MeshDegenerationError(GeometryError):
    pass


def skew_mc_velocity(mem: DiscreteMembrane, return_residual: bool = False):
    """Per-vertex velocity ``-J(Proj_N MC)``.

    ``MC`` comes from the cotangent Laplacian and is projected onto the
    estimated normal plane before the quarter turn; the largest relative
    projection residual is logged (and optionally returned).
    """
    if mem.ambient_dim < 4:
        raise GeometryError("skew-mean-curvature flow of surfaces needs ambient dimension >= 4")
    mc = geo.mean_curvature_vectors(mem)
    e1, e2, s = geo.vertex_normal_frames(mem)
    proj = geo.project_normal(e1, e2, mc)
    resid = np.linalg.norm(mc - proj, axis=1)
    scale = np.maximum(np.linalg.norm(mc, axis=1), 1e-300)
    worst = float(np.max(resid / scale)) if len(resid) else 0.0
    log.debug("MC projection residual (relative, max): %.3e", worst)
    vel = -geo.apply_J(e1, e2, s, proj)
    if return_residual:
        return vel, worst
    return vel


def skew_mc_velocity_curve(curve: DiscreteCurve) -> np.ndarray:
    """The same flow for a curve in R^3 treated as a codimension-2 object.

    Built from the generic pieces (tangent, normal frame from the orthogonal
    complement, projection, quarter turn) rather than from cross products.
    """
    if curve.ambient_dim != 3:
        raise GeometryError("the curve path of the skew flow is the n = 3 case")
    mc = geo.curvature_vectors(curve)
    e1, e2, s = geo.curve_normal_frames(curve)
    proj = geo.project_normal(e1, e2, mc)
    return -geo.apply_J(e1, e2, s, proj)


@dataclass
class MembraneRun:
    membrane: DiscreteMembrane
    times: np.ndarray
    volumes: np.ndarray
    centroids: np.ndarray
    dumps: list = field(default_factory=list)

    @property
    def volume_drift(self) -> float:
        return float(np.max(np.abs(self.volumes - self.volumes[0])) / self.volumes[0])


def _check_quality(mem: DiscreteMembrane):
    ar = geo.triangle_aspect_ratios(mem)
    if np.max(ar) > MAX_ASPECT:
        raise MeshDegenerationError("mesh degeneration")


def rk4_step(mem: DiscreteMembrane, dt: float) -> DiscreteMembrane:
    x = mem.vertices
    k1 = skew_mc_velocity(mem)
    k2 = skew_mc_velocity(mem.with_vertices(x + 0.5 * dt * k1))
    k3 = skew_mc_velocity(mem.with_vertices(x + 0.5 * dt * k2))
    k4 = skew_mc_velocity(mem.with_vertices(x + dt * k3))
    return mem.with_vertices(x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4))


def evolve_membrane(mem: DiscreteMembrane, dt: float, steps: int, dump_every: int = 0,
                    callback=None) -> MembraneRun:
    """RK4 integration of the skew-mean-curvature flow.

    Records volume (the Hamiltonian) and centroid after every step.  With
    ``dump_every > 0`` the vertex array is stored every that many steps.
    """
    if dt < 0:
        raise ValueError("dt must be non-negative")
    volumes = [geo.membrane_volume(mem)]
    centroids = [mem.vertices.mean(axis=0)]
    dumps = [(0, mem.vertices)] if dump_every else []
    for step in range(1, steps + 1):
        mem = rk4_step(mem, dt)
        _check_quality(mem)
        volumes.append(geo.membrane_volume(mem))
        centroids.append(mem.vertices.mean(axis=0))
        if dump_every and step % dump_every == 0:
            dumps.append((step, mem.vertices))
        if callback is not None:
            callback(step, step * dt, mem)
    return MembraneRun(mem, dt * np.arange(steps + 1), np.array(volumes), np.array(centroids), dumps)
