"""Kirchhoff point vortices in the plane.

State: positions ``z_j = (x_j, y_j)`` and strengths ``kappa_j``.  Dynamics
``kappa_j x_j' = dH/dy_j``, ``kappa_j y_j' = -dH/dx_j`` with
``H = -(1/4pi) sum_{j<k} kappa_j kappa_k ln |z_j - z_k|^2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

COLLISION_TOL = 1e-6
MIDPOINT_TOL = 1e-12
MIDPOINT_MAXITER = 50


class VortexCollisionError(ValueError):
    pass


class IntegratorStalled(RuntimeError):
    pass


@dataclass(frozen=True)
class VortexConfig2D:
    positions: np.ndarray
    strengths: np.ndarray

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        kap = np.array(self.strengths, dtype=float).reshape(-1)
        if pos.ndim != 2 or pos.shape[1] != 2 or pos.shape[0] != kap.shape[0] or len(kap) < 1:
            raise ValueError("positions must be (N, 2) and strengths (N,) with N >= 1")
        if np.any(kap == 0):
            raise ValueError("vortex strengths must be nonzero")
        pos.setflags(write=False)
        kap.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "strengths", kap)

    def __len__(self):
        return len(self.strengths)

    def with_positions(self, positions) -> "VortexConfig2D":
        return VortexConfig2D(positions, self.strengths)


def min_separation(positions) -> float:
    p = np.asarray(positions, dtype=float)
    if len(p) < 2:
        return np.inf
    d = np.linalg.norm(p[:, None] - p[None], axis=-1)
    return float(np.min(d[np.triu_indices(len(p), 1)]))


def _pair_geometry(positions):
    p = np.asarray(positions, dtype=float)
    d = p[:, None, :] - p[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", d, d)
    off = ~np.eye(len(p), dtype=bool)
    if np.any(r2[off] == 0):
        raise VortexCollisionError("vortex collision")
    np.fill_diagonal(r2, 1.0)
    return d, r2


def _velocity(positions, kappa):
    d, r2 = _pair_geometry(positions)
    w = kappa[None, :] / r2
    np.fill_diagonal(w, 0.0)
    # x_j' = -(1/2pi) sum_k kappa_k (y_j - y_k) / r^2,  y_j' = (1/2pi) sum_k kappa_k (x_j - x_k) / r^2
    ux = -np.sum(w * d[:, :, 1], axis=1) / (2 * np.pi)
    uy = np.sum(w * d[:, :, 0], axis=1) / (2 * np.pi)
    return np.stack([ux, uy], axis=1)


def kirchhoff_velocity(cfg: VortexConfig2D) -> np.ndarray:
    """Closed-form pairwise velocities (no self-interaction)."""
    return _velocity(cfg.positions, cfg.strengths)


def kirchhoff_hamiltonian(cfg: VortexConfig2D) -> float:
    _, r2 = _pair_geometry(cfg.positions)
    k = cfg.strengths
    iu = np.triu_indices(len(k), 1)
    return float(-np.sum(k[iu[0]] * k[iu[1]] * np.log(r2[iu])) / (4 * np.pi))


def hamiltonian_gradient(cfg: VortexConfig2D) -> np.ndarray:
    """Analytic ``(dH/dx_j, dH/dy_j)``."""
    d, r2 = _pair_geometry(cfg.positions)
    k = cfg.strengths
    w = k[:, None] * k[None, :] / r2
    np.fill_diagonal(w, 0.0)
    return -np.einsum("jk,jkc->jc", w, d) / (2 * np.pi)


def poisson_bracket(cfg: VortexConfig2D, grad_f, grad_g) -> float:
    """``{f, g} = sum_j (1/kappa_j)(f_x g_y - f_y g_x)`` from per-vortex gradients."""
    gf = np.asarray(grad_f, dtype=float)
    gg = np.asarray(grad_g, dtype=float)
    n = len(cfg)
    if gf.shape != (n, 2) or gg.shape != (n, 2):
        raise ValueError("gradient arrays must have shape (N, 2)")
    return float(np.sum((gf[:, 0] * gg[:, 1] - gf[:, 1] * gg[:, 0]) / cfg.strengths))


def first_integrals(cfg: VortexConfig2D) -> dict:
    """Hamiltonian, linear impulse and angular impulse."""
    k = cfg.strengths
    p = cfg.positions
    return {
        "H": kirchhoff_hamiltonian(cfg),
        "Px": float(np.sum(k * p[:, 0])),
        "Py": float(np.sum(k * p[:, 1])),
        "I": float(np.sum(k * np.einsum("ij,ij->i", p, p))),
    }


def _rk4(p, k, dt):
    k1 = _velocity(p, k)
    k2 = _velocity(p + 0.5 * dt * k1, k)
    k3 = _velocity(p + 0.5 * dt * k2, k)
    k4 = _velocity(p + dt * k3, k)
    return p + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _implicit_midpoint(p, k, dt):
    new = p + dt * _velocity(p, k)
    for _ in range(MIDPOINT_MAXITER):
        nxt = p + dt * _velocity(0.5 * (p + new), k)
        if np.max(np.abs(nxt - new)) < MIDPOINT_TOL:
            return nxt
        new = nxt
    raise IntegratorStalled("integrator stalled")


def step2d(cfg: VortexConfig2D, dt: float, scheme: str = "rk4") -> VortexConfig2D:
    """Advance one step with ``rk4`` or fixed-point ``implicit_midpoint``."""
    if dt < 0:
        raise ValueError("dt must be non-negative")
    if dt == 0:
        return cfg
    if min_separation(cfg.positions) < COLLISION_TOL:
        raise VortexCollisionError("near collision")
    if scheme == "rk4":
        new = _rk4(cfg.positions, cfg.strengths, dt)
    elif scheme == "implicit_midpoint":
        new = _implicit_midpoint(cfg.positions, cfg.strengths, dt)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    if min_separation(new) < COLLISION_TOL:
        raise VortexCollisionError("near collision")
    return cfg.with_positions(new)


def integrate(cfg: VortexConfig2D, dt: float, steps: int, scheme: str = "rk4"):
    """Run ``steps`` steps; returns final config, trajectory (steps+1, N, 2) and diagnostics."""
    traj = [cfg.positions]
    diags = [first_integrals(cfg)]
    for _ in range(steps):
        cfg = step2d(cfg, dt, scheme)
        traj.append(cfg.positions)
        diags.append(first_integrals(cfg))
    return cfg, np.array(traj), diags
