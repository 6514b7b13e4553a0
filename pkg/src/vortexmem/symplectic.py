"""Symplectic forms and pairings on point vortices, filaments, membranes and sheets.

All evaluators are exactly bilinear and antisymmetric in the two fields; the
quadratures average vertex samples onto edges or triangles before a single
determinant per cell.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .filament3d import rk4_step as filament_rk4_step
from .geometry import DiscreteCurve, DiscreteMembrane, GeometryError
from .pointvortex2d import VortexConfig2D

log = logging.getLogger(__name__)

CLOSED_TOL = 1e-12


class NonExactSheetError(NotImplementedError):
    pass


def _fields(arr, count: int, dim: int, name: str) -> np.ndarray:
    a = np.asarray(arr, dtype=float)
    if a.shape != (count, dim):
        raise ValueError(f"{name} must have shape ({count}, {dim}), got {a.shape}")
    return a


# ---------------------------------------------------------------------------
# point vortices


def kk_form_points(cfg: VortexConfig2D, V, W) -> float:
    """``sum_j kappa_j det(V_j, W_j)``."""
    n = len(cfg)
    V = _fields(V, n, 2, "V")
    W = _fields(W, n, 2, "W")
    return float(np.sum(cfg.strengths * (V[:, 0] * W[:, 1] - V[:, 1] * W[:, 0])))


def kk_matrix(cfg: VortexConfig2D) -> np.ndarray:
    """Matrix of the form in the coordinates ``(x_1, y_1, ..., x_N, y_N)``."""
    blocks = [k * np.array([[0.0, 1.0], [-1.0, 0.0]]) for k in cfg.strengths]
    out = np.zeros((2 * len(cfg), 2 * len(cfg)))
    for j, b in enumerate(blocks):
        out[2 * j:2 * j + 2, 2 * j:2 * j + 2] = b
    return out


# ---------------------------------------------------------------------------
# Marsden-Weinstein


def mw_form_curve(curve: DiscreteCurve, V, W) -> float:
    """Edge-midpoint quadrature of ``det[V, W, gamma']`` for a curve in R^3."""
    if curve.ambient_dim != 3:
        raise GeometryError("mw_form_curve needs a curve in R^3")
    m = len(curve)
    V = _fields(V, m, 3, "V")
    W = _fields(W, m, 3, "W")
    e = curve.edges()
    nxt = (np.arange(len(e)) + 1) % m
    Vm = 0.5 * (V[: len(e)] + V[nxt])
    Wm = 0.5 * (W[: len(e)] + W[nxt])
    return float(np.sum(np.einsum("ij,ij->i", np.cross(Vm, Wm), e)))


def _project_to_normals(mem: DiscreteMembrane, X: np.ndarray, name: str) -> np.ndarray:
    e1, e2, _ = geo.vertex_normal_frames(mem)
    P = geo.project_normal(e1, e2, X)
    scale = max(float(np.max(np.linalg.norm(X, axis=1))), 1e-300)
    res = float(np.max(np.linalg.norm(X - P, axis=1))) / scale
    if res > 1e-8:
        log.info("mw_form_membrane: %s projected onto normal planes, residual %.3e", name, res)
    return P


def mw_form_membrane(mem: DiscreteMembrane, V, W, project: bool = True) -> float:
    """``int_P i_V i_W mu``: per triangle ``det[V, W, a, b] / 2`` with triangle-averaged fields.

    Fields are first projected onto the vertex normal planes (residual logged).
    Only surfaces in R^4 are supported, where the form is a 2-form on P.
    """
    if mem.ambient_dim != 4:
        raise GeometryError("mw_form_membrane supports triangulated surfaces in R^4")
    nv = len(mem.vertices)
    V = _fields(V, nv, 4, "V")
    W = _fields(W, nv, 4, "W")
    if project:
        V = _project_to_normals(mem, V, "V")
        W = _project_to_normals(mem, W, "W")
    t = mem.triangles
    a, b, _ = geo.triangle_data(mem)
    Vt = V[t].mean(axis=1)
    Wt = W[t].mean(axis=1)
    return float(0.5 * np.sum(np.linalg.det(np.stack([Vt, Wt, a, b], axis=1))))


# ---------------------------------------------------------------------------
# vortex sheets


def _edge_index(triangles: np.ndarray):
    """Unique undirected edges ``(i < j)`` and, per triangle corner edge, its index and sign."""
    t = np.asarray(triangles)
    directed = np.stack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]], axis=1)  # (T, 3, 2)
    lo = directed.min(axis=2)
    hi = directed.max(axis=2)
    sign = np.where(directed[:, :, 0] < directed[:, :, 1], 1.0, -1.0)
    keys = np.stack([lo.ravel(), hi.ravel()], axis=1)
    edges, inv = np.unique(keys, axis=0, return_inverse=True)
    return edges, inv.reshape(t.shape[0], 3), sign


@dataclass(frozen=True)
class VortexSheet:
    """Closed 1-form ``alpha`` on a triangulated surface in R^3, stored as an edge cochain.

    ``alpha[k]`` is the value on the edge ``edges[k] = (i, j)`` oriented from
    ``i`` to ``j`` with ``i < j``.
    """

    mesh: DiscreteMembrane
    alpha: np.ndarray
    potential: np.ndarray | None = None
    edges: np.ndarray = field(init=False, repr=False)
    _tri_edges: np.ndarray = field(init=False, repr=False)
    _tri_signs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.mesh.ambient_dim != 3:
            raise GeometryError("vortex sheets live on surfaces in R^3")
        edges, tri_edges, tri_signs = _edge_index(self.mesh.triangles)
        alpha = np.array(self.alpha, dtype=float).reshape(-1)
        if alpha.shape != (len(edges),):
            raise ValueError(f"alpha needs {len(edges)} edge values, got {alpha.shape[0]}")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_tri_edges", tri_edges)
        object.__setattr__(self, "_tri_signs", tri_signs)
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        d = self.coboundary()
        scale = max(1.0, float(np.max(np.abs(alpha), initial=0.0)))
        if np.max(np.abs(d), initial=0.0) > CLOSED_TOL * scale:
            raise GeometryError(f"alpha is not closed (max |d alpha| = {np.max(np.abs(d)):.3e})")
        if self.potential is not None:
            f = np.array(self.potential, dtype=float).reshape(-1)
            if f.shape != (len(self.mesh.vertices),):
                raise ValueError("potential needs one value per vertex")
            if not np.array_equal(f[edges[:, 1]] - f[edges[:, 0]], alpha):
                raise GeometryError("alpha does not equal the coboundary of the potential")
            f.setflags(write=False)
            object.__setattr__(self, "potential", f)

    @classmethod
    def from_potential(cls, mesh: DiscreteMembrane, f) -> "VortexSheet":
        f = np.asarray(f, dtype=float)
        edges, _, _ = _edge_index(mesh.triangles)
        return cls(mesh, f[edges[:, 1]] - f[edges[:, 0]], f)

    @classmethod
    def from_edge_values(cls, mesh: DiscreteMembrane, values: dict) -> "VortexSheet":
        """Build from ``{(i, j): value}`` with either orientation; missing edges are zero."""
        edges, _, _ = _edge_index(mesh.triangles)
        lookup = {(int(i), int(j)): k for k, (i, j) in enumerate(edges)}
        alpha = np.zeros(len(edges))
        for (i, j), val in values.items():
            if (i, j) in lookup:
                alpha[lookup[(i, j)]] = val
            elif (j, i) in lookup:
                alpha[lookup[(j, i)]] = -val
            else:
                raise ValueError(f"({i}, {j}) is not a mesh edge")
        return cls(mesh, alpha)

    @property
    def is_exact(self) -> bool:
        return self.potential is not None

    def coboundary(self) -> np.ndarray:
        """Oriented sum of alpha around each triangle."""
        return np.sum(self.alpha[self._tri_edges] * self._tri_signs, axis=1)

    def triangle_edge_values(self) -> np.ndarray:
        """``alpha`` on the oriented triangle edges ``p0->p1`` and ``p0->p2``."""
        vals = self.alpha[self._tri_edges] * self._tri_signs  # edges 01, 12, 20
        return np.stack([vals[:, 0], -vals[:, 2]], axis=1)


def _triangle_normals(mesh: DiscreteMembrane):
    a, b, area = geo.triangle_data(mesh)
    n = np.cross(a, b)
    return n / np.linalg.norm(n, axis=1)[:, None], area


def sheet_pairing(sheet: VortexSheet, V) -> float:
    """Flux of ``f V`` through the sheet: ``sum f(centroid) (V . n) area``.

    ``V`` is an array of centroid samples or a callable on centroid arrays.
    """
    if not sheet.is_exact:
        raise NonExactSheetError(
            "non-exact alpha: pairing requires the bounded-domain primitive, not implemented")
    mesh = sheet.mesh
    t = mesh.triangles
    cent = mesh.vertices[t].mean(axis=1)
    Vc = V(cent) if callable(V) else V
    Vc = _fields(np.broadcast_to(np.asarray(Vc, dtype=float), cent.shape), len(t), 3, "V")
    normals, area = _triangle_normals(mesh)
    fc = sheet.potential[t].mean(axis=1)
    return float(np.sum(fc * np.einsum("ij,ij->i", Vc, normals) * area))


def sheet_form(sheet: VortexSheet, V, W) -> float:
    """``int_Gamma alpha ^ beta`` with ``beta(Z) = det[W, V, Z]`` and fields averaged per triangle."""
    mesh = sheet.mesh
    nv = len(mesh.vertices)
    V = _fields(V, nv, 3, "V")
    W = _fields(W, nv, 3, "W")
    t = mesh.triangles
    a, b, _ = geo.triangle_data(mesh)
    wxv = np.cross(W[t].mean(axis=1), V[t].mean(axis=1))
    beta_a = np.einsum("ij,ij->i", wxv, a)
    beta_b = np.einsum("ij,ij->i", wxv, b)
    al = sheet.triangle_edge_values()
    return float(0.5 * np.sum(al[:, 0] * beta_b - al[:, 1] * beta_a))


# ---------------------------------------------------------------------------
# fibrations


@dataclass(frozen=True)
class SheetFibration:
    """Closed level curves ``Gamma_f`` of a sheet, with uniform level spacing ``df``."""

    fibers: tuple
    f_values: np.ndarray
    df: float

    def __post_init__(self):
        fibers = tuple(self.fibers)
        if not fibers:
            raise ValueError("fibration needs at least one fiber")
        m = len(fibers[0])
        for c in fibers:
            if not isinstance(c, DiscreteCurve) or not c.closed or c.ambient_dim != 3:
                raise GeometryError("fibers must be closed curves in R^3")
            if len(c) != m:
                raise GeometryError("fibers must share a vertex count")
        f = np.array(self.f_values, dtype=float).reshape(-1)
        if len(f) != len(fibers):
            raise ValueError("one f value per fiber")
        if not self.df > 0:
            raise ValueError("df must be positive")
        f.setflags(write=False)
        object.__setattr__(self, "fibers", fibers)
        object.__setattr__(self, "f_values", f)

    def __len__(self):
        return len(self.fibers)

    def hamiltonian(self) -> float:
        """``sum_f length(Gamma_f) df``."""
        return float(sum(geo.curve_length(c) for c in self.fibers) * self.df)


def sheet_family_binormal_step(fib: SheetFibration, dt: float) -> SheetFibration:
    """One RK4 binormal step applied independently to every fiber."""
    if dt < 0:
        raise ValueError("dt must be non-negative")
    if dt == 0:
        return fib
    return SheetFibration([filament_rk4_step(c, dt) for c in fib.fibers], fib.f_values, fib.df)


def evolve_fibration(fib: SheetFibration, dt: float, steps: int, callback=None):
    """Repeated :func:`sheet_family_binormal_step`; returns the fibration and the H series."""
    hs = [fib.hamiltonian()]
    for step in range(1, steps + 1):
        fib = sheet_family_binormal_step(fib, dt)
        hs.append(fib.hamiltonian())
        if callback is not None:
            callback(step, step * dt, fib)
    return fib, np.array(hs)
