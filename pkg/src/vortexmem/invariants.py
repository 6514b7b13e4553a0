"""Invariant suites run by ``check invariants``: named checks with measured values."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import biotsavart as bs
from . import filament3d as fl
from . import fixtures as fx
from . import geometry as geo
from . import membrane_flow as mf
from . import pointvortex2d as pv
from . import symplectic as sy


@dataclass
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool


def _check(name, value, tol) -> Check:
    value = float(value)
    return Check(name, value, tol, bool(np.isfinite(value) and value <= tol))


def sphere4d(level: int = 3) -> list[Check]:
    mem = fx.icosphere4d(1.0, level)
    vel, resid = mf.skew_mc_velocity(mem, return_residual=True)
    e4 = np.array([0.0, 0.0, 0.0, 1.0])
    speed = np.linalg.norm(vel, axis=1)
    ang = np.degrees(np.arccos(np.clip(vel @ e4 / speed, -1, 1)))
    flipped = mf.skew_mc_velocity(mem.flipped())
    e1, e2, s = geo.vertex_normal_frames(mem)
    w = np.random.default_rng(0).normal(size=e1.shape)
    wn = geo.project_normal(e1, e2, w)
    jj = geo.apply_J(e1, e2, s, geo.apply_J(e1, e2, s, wn))
    mc = geo.mean_curvature_vectors(mem)
    proj = geo.project_normal(e1, e2, mc)
    return [
        _check("speed error along e4", np.max(np.abs(speed - 1.0)), 2e-2),
        _check("direction error deg", np.max(ang), 2.0),
        _check("orientation flip negates velocity", np.max(np.abs(flipped + vel)), 1e-10),
        _check("J^2 = -Id on normal planes", np.max(np.abs(jj + wn)), 1e-12),
        _check("|v| = |Proj MC| (isometry)", np.max(np.abs(speed - np.linalg.norm(proj, axis=1))), 1e-12),
        _check("tangential velocity residual", np.max(np.linalg.norm(vel - geo.project_normal(e1, e2, vel), axis=1)), 1e-6),
        _check("MC normal projection residual", resid, 5e-2),
        _check("area relative to 4 pi", abs(geo.membrane_volume(mem) / (4 * np.pi) - 1), 5e-3 if level >= 4 else 2e-2),
    ]


def flatpatch4d() -> list[Check]:
    mem = fx.flatpatch4d()
    # interior vertices only; the mixed-area estimate on a boundary is one-sided
    grid = int(round(np.sqrt(len(mem.vertices))))
    ij = np.arange(len(mem.vertices))
    interior = (ij // grid > 0) & (ij // grid < grid - 1) & (ij % grid > 0) & (ij % grid < grid - 1)
    mc = geo.mean_curvature_vectors(mem)
    centre = int(np.argmin(np.linalg.norm(mem.vertices, axis=1)))
    v_eps = [np.linalg.norm(bs.velocity_truncated(mem, centre, e)) for e in bs.default_eps_list(mem.mesh_size(), 0.5, 5)]
    return [
        _check("interior mean curvature", np.max(np.linalg.norm(mc[interior], axis=1)), 1e-10),
        _check("truncated velocity at centre", max(v_eps), 1e-10),
    ]


def circle3d(n_vertices: int = 512) -> list[Check]:
    c = fx.circle(n_vertices)
    v = fl.binormal_velocity(c)
    skew = mf.skew_mc_velocity_curve(c)
    V = np.tile([0.0, 0.0, 1.0], (n_vertices, 1))
    psi = fl.hasimoto(c)
    return [
        _check("binormal velocity = e3", np.max(np.abs(v - [0, 0, 1])), 2e-3),
        _check("skew flow equals binormal flow", np.max(np.abs(skew - v)), 1e-8),
        _check("mw form circle value - 2 pi", abs(sy.mw_form_curve(c, V, c.points) - 2 * np.pi), 1e-3),
        _check("Hasimoto psi - 1", np.max(np.abs(psi - 1)), 1e-8),
        _check("on-axis Biot-Savart |v| - 1/2", abs(np.linalg.norm(bs.velocity_filament3d(c, 1.0, [0, 0, 0])) - 0.5), 1e-3),
    ]


def points2d(seed: int = 0, n: int = 4) -> list[Check]:
    cfg = fx.random_vortices(n, seed)
    _, _, diags = pv.integrate(cfg, 1e-3, 100)
    out = [_check(f"|delta {k}| over 100 steps", abs(diags[-1][k] - diags[0][k]), 1e-8) for k in diags[0]]
    gH = pv.hamiltonian_gradient(cfg)
    gI = 2 * cfg.strengths[:, None] * cfg.positions
    out.append(_check("{H, I}", abs(pv.poisson_bracket(cfg, gH, gI)), 1e-8))
    vel = pv.kirchhoff_velocity(cfg)
    skew = np.stack([gH[:, 1], -gH[:, 0]], axis=1) / cfg.strengths[:, None]
    out.append(_check("velocity = skew gradient of H", np.max(np.abs(vel - skew)), 1e-12))
    return out


def sphere_sheet(level: int = 4) -> list[Check]:
    mesh = fx.icosphere3d_mesh(1.0, level)
    sheet = sy.VortexSheet.from_potential(mesh, mesh.vertices[:, 2])
    ez = np.array([0.0, 0.0, 1.0])
    shifted = sy.VortexSheet.from_potential(mesh, mesh.vertices[:, 2] + 2.5)
    flux = sy.sheet_pairing(sy.VortexSheet.from_potential(mesh, np.ones(len(mesh.vertices))), ez)
    nv = len(mesh.vertices)
    return [
        _check("closedness of alpha", np.max(np.abs(sheet.coboundary())), 1e-12),
        _check("pairing f=z, V=e_z relative to 4 pi/3", abs(sy.sheet_pairing(sheet, ez) / (4 * np.pi / 3) - 1), 1e-2),
        _check("gauge shift f -> f + c", abs(sy.sheet_pairing(shifted, ez) - sy.sheet_pairing(sheet, ez) - 2.5 * flux), 1e-12),
        _check("sheet form f=z, e_x, e_y", abs(sy.sheet_form(sheet, np.tile([1.0, 0, 0], (nv, 1)), np.tile([0, 1.0, 0], (nv, 1)))), 1e-8),
    ]


SUITES = {
    "sphere4d": sphere4d,
    "flatpatch4d": flatpatch4d,
    "circle3d": circle3d,
    "points2d": points2d,
    "sphere_sheet": sphere_sheet,
}


def run_suite(name: str) -> list[dict]:
    key = name.replace("-", "_")
    if key not in SUITES:
        raise ValueError(f"unknown invariant suite {name!r}; choose from {sorted(SUITES)}")
    return [asdict(c) for c in SUITES[key]()]
