"""Regularized kinetic energy of membranes and its ln(eps) growth."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .biotsavart import EPS_FLOOR, sphere_area
from .fitting import FitError, fit_log_eps
from .geometry import DiscreteCurve, DiscreteMembrane

CHUNK = 256


def _quadrature_points(obj):
    """Centroids (membranes) or edge midpoints (curves) with their measures."""
    if isinstance(obj, DiscreteCurve):
        e = obj.edges()
        pts = obj.points[: len(e)] + 0.5 * e
        w = np.linalg.norm(e, axis=1)
        return pts, w, float(np.mean(w)), 1.0
    v, t = obj.vertices, obj.triangles
    pts = (v[t[:, 0]] + v[t[:, 1]] + v[t[:, 2]]) / 3.0
    return pts, geo.triangle_areas(obj), obj.mesh_size(), obj.strength


def _abs_green(n, r):
    return r ** (2 - n) / ((n - 2) * sphere_area(n))


def pair_energy_sums(points, weights, eps_values, n: int | None = None, reverse: bool = False,
                     outer=None) -> np.ndarray:
    """``sum_{i, j : |x_i - x_j| >= eps} w_i w_j |G(x_i, x_j)|`` for every eps.

    One pass over all pairs; rows are processed in fixed-size chunks in a
    fixed order (``reverse`` swaps the roles of the two loops, for checking
    symmetry of the double sum).  ``outer`` restricts the first index to a
    subset of points (a boolean mask or index array).
    """
    pts = np.asarray(points, dtype=float)
    w = np.asarray(weights, dtype=float)
    n = pts.shape[1] if n is None else n
    eps_sorted = np.sort(np.asarray(eps_values, dtype=float))
    totals = np.zeros(len(eps_sorted) + 1)
    rows_all = np.arange(len(pts)) if outer is None else np.arange(len(pts))[outer]
    m = len(rows_all)
    starts = range(0, m, CHUNK)
    for s in (reversed(starts) if reverse else starts):
        rows = rows_all[s:s + CHUNK]
        d = np.linalg.norm(pts[rows, None, :] - pts[None, :, :], axis=-1)
        with np.errstate(divide="ignore"):
            g = np.where(d > 0, _abs_green(n, np.where(d > 0, d, 1.0)), 0.0)
        contrib = w[rows, None] * w[None, :] * g
        # bin k collects pairs with eps_sorted[k-1] <= d < eps_sorted[k]
        bins = np.searchsorted(eps_sorted, d, side="right")
        totals += np.bincount(bins.ravel(), weights=contrib.ravel(), minlength=len(eps_sorted) + 1)
    # pairs with d >= eps_sorted[k] are those in bins k+1 .. end
    above = np.cumsum(totals[::-1])[::-1][1:]
    order = np.argsort(np.asarray(eps_values, dtype=float), kind="stable")
    out = np.empty(len(eps_sorted))
    out[order] = above
    return out


def regularized_energies(obj, eps_values, strength: float | None = None, check: bool = True) -> np.ndarray:
    """``E_eps = (C^2 / 2) sum sum_{|p - q| >= eps} |G(q, p)| dA dA`` for several eps.

    The sign is taken positive.  ``obj`` may be a membrane or a closed curve in R^3.
    """
    pts, w, h, c = _quadrature_points(obj)
    if strength is not None:
        c = strength
    eps_values = np.atleast_1d(np.asarray(eps_values, dtype=float))
    if check and np.any(eps_values < EPS_FLOOR * h * (1 - 1e-12)):
        raise ValueError("truncation below mesh resolution")
    return 0.5 * c * c * pair_energy_sums(pts, w, eps_values)


def regularized_energy(obj, eps: float, strength: float | None = None) -> float:
    return float(regularized_energies(obj, [eps], strength)[0])


def volume_of(obj) -> float:
    if isinstance(obj, DiscreteCurve):
        return geo.curve_length(obj)
    return geo.membrane_volume(obj)


@dataclass(frozen=True)
class EnergySlope:
    slope: float
    slope_per_volume: float
    fit_residual: float
    energies: np.ndarray


def energy_slope(obj, eps_list, strength: float | None = None, max_residual: float = 0.2) -> EnergySlope:
    """Fit ``E_eps`` against ``ln(1/eps)``; slope and slope per unit volume."""
    eps_list = np.asarray(eps_list, dtype=float)
    energies = regularized_energies(obj, eps_list, strength)
    fit = fit_log_eps(eps_list, energies)
    if fit.residual > max_residual:
        raise FitError("asymptotic regime not reached")
    slope = float(fit.slope)
    return EnergySlope(slope, slope / volume_of(obj), fit.residual, energies)
