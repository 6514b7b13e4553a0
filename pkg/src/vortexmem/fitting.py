"""Least-squares fits of quantities against ln(1/eps)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class LogFit:
    intercept: np.ndarray
    slope: np.ndarray
    residual: float
    """Residual norm over the norm of the centred data (0 = perfectly affine)."""


def fit_log_eps(eps, values, min_points: int = 5, min_decades: float = 1.0) -> LogFit:
    """Affine fit ``values ~ intercept + slope * ln(1/eps)``.

    ``values`` is (m,) or (m, d); vector data are fitted componentwise and the
    residual is pooled.  The result does not depend on the order of ``eps``.
    """
    eps = np.asarray(eps, dtype=float)
    y = np.asarray(values, dtype=float)
    if eps.ndim != 1 or len(eps) < min_points:
        raise ValueError(f"need at least {min_points} eps values")
    if np.any(eps <= 0):
        raise ValueError("eps values must be positive")
    if np.log10(eps.max() / eps.min()) < min_decades - 1e-12:
        raise ValueError(f"eps values must span at least {min_decades} decade(s)")
    order = np.argsort(eps)
    eps, y = eps[order], y[order]
    x = np.log(1.0 / eps)
    A = np.stack([np.ones_like(x), x], axis=1)
    coef, *_ = np.linalg.lstsq(A, y.reshape(len(x), -1), rcond=None)
    res = y.reshape(len(x), -1) - A @ coef
    centred = y.reshape(len(x), -1) - y.reshape(len(x), -1).mean(axis=0)
    scale = np.sqrt(np.sum(centred ** 2))
    data_scale = np.max(np.abs(y)) if y.size else 0.0
    if scale <= 1e-12 * max(data_scale, 1e-300) or scale == 0.0:
        resid = 0.0
    else:
        resid = float(np.sqrt(np.sum(res ** 2)) / scale)
    shape = y.shape[1:]
    return LogFit(coef[0].reshape(shape), coef[1].reshape(shape), resid)
