"""Deterministic test objects: circles, icospheres, flat patches, tori, sheets."""
from __future__ import annotations

import numpy as np

from .geometry import DiscreteCurve, DiscreteMembrane


def circle(n_vertices: int = 512, radius: float = 1.0, dim: int = 3, center=None) -> DiscreteCurve:
    """Regular polygon inscribed in a circle of the (x1, x2)-plane, counterclockwise."""
    th = 2 * np.pi * np.arange(n_vertices) / n_vertices
    pts = np.zeros((n_vertices, dim))
    pts[:, 0] = radius * np.cos(th)
    pts[:, 1] = radius * np.sin(th)
    if center is not None:
        pts += np.asarray(center, dtype=float)
    return DiscreteCurve(pts, closed=True)


def ellipse(n_vertices: int, a: float = 1.0, b: float = 0.5, dim: int = 3) -> DiscreteCurve:
    th = 2 * np.pi * np.arange(n_vertices) / n_vertices
    pts = np.zeros((n_vertices, dim))
    pts[:, 0] = a * np.cos(th)
    pts[:, 1] = b * np.sin(th)
    return DiscreteCurve(pts, closed=True)


def helix(n_vertices: int, radius: float = 1.0, pitch: float = 0.5, turns: float = 2.0) -> DiscreteCurve:
    """Open helix ``(r cos s, r sin s, pitch * s)``."""
    s = np.linspace(0.0, 2 * np.pi * turns, n_vertices)
    pts = np.stack([radius * np.cos(s), radius * np.sin(s), pitch * s], axis=1)
    return DiscreteCurve(pts, closed=False)


def perturbed_circle(n_vertices: int = 128, amplitude: float = 0.05, modes: int = 3,
                     seed: int = 0) -> DiscreteCurve:
    """Unit circle with a smooth random low-mode perturbation in all three directions."""
    rng = np.random.default_rng(seed)
    th = 2 * np.pi * np.arange(n_vertices) / n_vertices
    pts = np.stack([np.cos(th), np.sin(th), np.zeros_like(th)], axis=1)
    for m in range(2, modes + 2):
        c = rng.normal(size=(3, 2)) * amplitude / m
        pts += np.cos(m * th)[:, None] * c[:, 0] + np.sin(m * th)[:, None] * c[:, 1]
    return DiscreteCurve(pts, closed=True)


# ---------------------------------------------------------------------------
# surfaces


_ICO_FACES = np.array([
    [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
    [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
    [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
    [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
])


def _icosahedron():
    g = (1 + 5 ** 0.5) / 2
    v = np.array([
        [-1, g, 0], [1, g, 0], [-1, -g, 0], [1, -g, 0],
        [0, -1, g], [0, 1, g], [0, -1, -g], [0, 1, -g],
        [g, 0, -1], [g, 0, 1], [-g, 0, -1], [-g, 0, 1],
    ], dtype=float)
    return v / np.linalg.norm(v, axis=1)[:, None], _ICO_FACES.copy()


def icosphere_3d(level: int):
    """Unit icosphere in R^3 with outward (counterclockwise) winding."""
    verts, faces = _icosahedron()
    verts = list(verts)
    for _ in range(level):
        cache: dict[tuple[int, int], int] = {}

        def mid(i, j):
            key = (i, j) if i < j else (j, i)
            if key not in cache:
                p = verts[i] + verts[j]
                verts.append(p / np.linalg.norm(p))
                cache[key] = len(verts) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        faces = np.array(new)
    return np.array(verts), np.asarray(faces, dtype=np.int64)


def icosphere4d(radius: float = 1.0, level: int = 4, strength: float = 1.0,
                axes=(1.0, 1.0, 1.0)) -> DiscreteMembrane:
    """Icosphere embedded in R^3 x {0} of R^4 (optionally an ellipsoid via ``axes``)."""
    v3, f = icosphere_3d(level)
    v = np.zeros((v3.shape[0], 4))
    v[:, :3] = radius * v3 * np.asarray(axes, dtype=float)
    return DiscreteMembrane(v, f, strength)


def bumped_sphere4d(level: int = 4, bump: float = 0.3) -> DiscreteMembrane:
    """Unit icosphere lifted by ``x4 = bump * x1 * x2``, so it spans all of R^4."""
    mem = icosphere4d(1.0, level)
    v = mem.vertices.copy()
    v[:, 3] = bump * v[:, 0] * v[:, 1]
    return mem.with_vertices(v)


def icosphere3d_mesh(radius: float = 1.0, level: int = 4) -> DiscreteMembrane:
    """Icosphere as a hypersurface of R^3 (vortex-sheet carrier)."""
    v3, f = icosphere_3d(level)
    return DiscreteMembrane(radius * v3, f)


def _grid_triangles(nu: int, nv: int, wrap_u: bool, wrap_v: bool) -> np.ndarray:
    iu = nu if wrap_u else nu - 1
    iv = nv if wrap_v else nv - 1

    def idx(i, j):
        return (i % nu) * nv + (j % nv)

    tris = []
    for i in range(iu):
        for j in range(iv):
            a, b, c, d = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)
            # alternate the diagonal to avoid a preferred direction
            if (i + j) % 2 == 0:
                tris += [[a, b, c], [a, c, d]]
            else:
                tris += [[a, b, d], [b, c, d]]
    return np.array(tris, dtype=np.int64)


def flatpatch4d(size: float = 1.0, n: int = 16, strength: float = 1.0) -> DiscreteMembrane:
    """Open square patch ``[-size/2, size/2]^2`` in the (x1, x2)-plane of R^4."""
    u = np.linspace(-size / 2, size / 2, n + 1)
    uu, vv = np.meshgrid(u, u, indexing="ij")
    v = np.zeros(((n + 1) ** 2, 4))
    v[:, 0] = uu.ravel()
    v[:, 1] = vv.ravel()
    return DiscreteMembrane(v, _grid_triangles(n + 1, n + 1, False, False), strength)


def torus4d(r1: float = 1.0, r2: float = 0.7, n1: int = 64, n2: int = 48,
            strength: float = 1.0) -> DiscreteMembrane:
    """Product torus ``(r1 cos a, r1 sin a, r2 cos b, r2 sin b)`` in R^4.

    Mean curvature is ``-(u_a / r1 + u_b / r2) / 2`` with ``u_a``, ``u_b`` the
    unit radial vectors of the two circle factors.
    """
    a = 2 * np.pi * np.arange(n1) / n1
    b = 2 * np.pi * np.arange(n2) / n2
    aa, bb = np.meshgrid(a, b, indexing="ij")
    v = np.stack([r1 * np.cos(aa), r1 * np.sin(aa), r2 * np.cos(bb), r2 * np.sin(bb)], axis=-1)
    return DiscreteMembrane(v.reshape(-1, 4), _grid_triangles(n1, n2, True, True), strength)


def torus3d_mesh(R: float = 1.0, r: float = 0.35, n1: int = 64, n2: int = 32) -> DiscreteMembrane:
    """Outward-oriented torus of revolution in R^3."""
    a = 2 * np.pi * np.arange(n1) / n1
    b = 2 * np.pi * np.arange(n2) / n2
    aa, bb = np.meshgrid(a, b, indexing="ij")
    rho = R + r * np.cos(bb)
    v = np.stack([rho * np.cos(aa), rho * np.sin(aa), r * np.sin(bb)], axis=-1)
    return DiscreteMembrane(v.reshape(-1, 3), _grid_triangles(n1, n2, True, True))


# ---------------------------------------------------------------------------
# point vortices and fibrations


def random_vortices(n: int = 4, seed: int = 0):
    """Positions in the unit square and strengths in ``+-[0.5, 1.5]``, well separated."""
    from .pointvortex2d import VortexConfig2D

    rng = np.random.default_rng(seed)
    while True:
        pos = rng.uniform(-1.0, 1.0, size=(n, 2))
        d = np.linalg.norm(pos[:, None] - pos[None], axis=-1) + np.eye(n) * 10
        if d.min() > 0.3:
            break
    kappa = rng.uniform(0.5, 1.5, size=n) * rng.choice([-1.0, 1.0], size=n)
    return VortexConfig2D(pos, kappa)


def cylinder_fibration(n_fibers: int = 8, n_vertices: int = 128, radius: float = 1.0,
                       height: float = 1.0):
    """Coaxial circles stacked along z, fibre values f = z."""
    from .symplectic import SheetFibration

    z = np.linspace(0.0, height, n_fibers)
    fibers = [circle(n_vertices, radius, center=(0.0, 0.0, zk)) for zk in z]
    df = z[1] - z[0] if n_fibers > 1 else 1.0
    return SheetFibration(fibers, z, df)


def smooth_step(x, width):
    """C^1 ramp from 0 (x < -width/2) to 1 (x > width/2)."""
    s = np.clip(x / width + 0.5, 0.0, 1.0)
    return s * s * (3 - 2 * s)


def sphere_band_sheet(width: float = 0.1, level: int = 5, radius: float = 1.0):
    """Sphere in R^3 with ``alpha = df``, f ramping 0 -> 1 across an equatorial band.

    The transverse integral of alpha across the band is 1, so as ``width -> 0``
    the sheet concentrates on the counterclockwise equator.
    """
    from .symplectic import VortexSheet

    mesh = icosphere3d_mesh(radius, level)
    f = smooth_step(mesh.vertices[:, 2], width)
    return VortexSheet.from_potential(mesh, f)


def torus_band_sheet(width: float = 0.6, R: float = 1.0, r: float = 0.35, n1: int = 64, n2: int = 32):
    """Torus in R^3 with an exact alpha = df, f a bump localized in the toroidal angle."""
    from .symplectic import VortexSheet

    mesh = torus3d_mesh(R, r, n1, n2)
    x, y = mesh.vertices[:, 0], mesh.vertices[:, 1]
    ang = np.arctan2(y, x)
    f = np.where(np.abs(ang) < width, np.cos(0.5 * np.pi * ang / width) ** 2, 0.0)
    return VortexSheet.from_potential(mesh, f)
