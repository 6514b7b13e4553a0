"""Discrete curves and codimension-2 membranes.

Curves are closed (or open) polylines in R^n, membranes are oriented
triangle meshes in R^n.  Every quantity here is computed directly from
vertex positions; there is no cached state, so all functions are pure.

Orientation convention
----------------------
A normal frame ``(e1, e2)`` at a point with oriented tangent basis
``t_1..t_l`` carries ``orientation_sign = sign det[e1, t_1..t_l, e2]`` and the
quarter turn is ``J(e1) = orientation_sign * e2``.  For surfaces (l = 2) this
is the same as asking ``(t_1, t_2, e1, e2)`` to be positive.  For curves in
R^3 (l = 1) it gives ``J(n) = -b``, so that ``-J(k n) = k b`` is the binormal
velocity.  Surface orientation comes from triangle winding; an icosphere
wound counterclockwise seen from outside moves along ``+e_n`` under
``-J(MC)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ORTHO_TOL = 1e-10
PLANE_TOL = 1e-8


class GeometryError(ValueError):
    """Raised for degenerate or inconsistent geometric input."""


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class DiscreteCurve:
    """Polyline in R^n; ``closed`` curves wrap the last vertex to the first."""

    points: np.ndarray
    closed: bool = True

    def __post_init__(self):
        pts = _frozen(self.points)
        if pts.ndim != 2 or pts.shape[1] < 2:
            raise GeometryError("curve points must be an (m, n) array with n >= 2")
        if pts.shape[0] < 3 or (self.closed and pts.shape[0] < 4):
            raise GeometryError("curve needs at least 4 vertices (3 if open)")
        object.__setattr__(self, "points", pts)
        if np.min(np.linalg.norm(self.edges(), axis=1)) <= 0.0:
            raise GeometryError("degenerate edge")

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def edges(self) -> np.ndarray:
        p = self.points
        if self.closed:
            return np.roll(p, -1, axis=0) - p
        return p[1:] - p[:-1]

    def with_points(self, points) -> "DiscreteCurve":
        return DiscreteCurve(points, self.closed)

    def reversed(self) -> "DiscreteCurve":
        return DiscreteCurve(self.points[::-1], self.closed)


@dataclass(frozen=True)
class DiscreteMembrane:
    """Oriented triangle mesh in R^n carrying vorticity ``strength * delta_P``."""

    vertices: np.ndarray
    triangles: np.ndarray
    strength: float = 1.0

    def __post_init__(self):
        v = _frozen(self.vertices)
        t = _frozen(self.triangles, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] < 3:
            raise GeometryError("vertices must be an (m, n) array with n >= 3")
        if t.ndim != 2 or t.shape[1] != 3:
            raise GeometryError("triangles must be an (k, 3) index array")
        if t.size and (t.min() < 0 or t.max() >= v.shape[0]):
            raise GeometryError("triangle index out of range")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)
        object.__setattr__(self, "strength", float(self.strength))

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    def with_vertices(self, vertices) -> "DiscreteMembrane":
        return DiscreteMembrane(vertices, self.triangles, self.strength)

    def with_strength(self, strength: float) -> "DiscreteMembrane":
        return DiscreteMembrane(self.vertices, self.triangles, strength)

    def flipped(self) -> "DiscreteMembrane":
        """Same surface with reversed orientation."""
        return DiscreteMembrane(self.vertices, self.triangles[:, ::-1], self.strength)

    def is_closed(self) -> bool:
        """Every directed edge is matched by its reverse exactly once."""
        e = directed_edges(self.triangles)
        fwd = {tuple(x) for x in e}
        if len(fwd) != len(e):
            return False
        return all((j, i) in fwd for i, j in fwd)

    def mesh_size(self) -> float:
        """Mean edge length (``h``)."""
        e = directed_edges(self.triangles)
        return float(np.mean(np.linalg.norm(self.vertices[e[:, 1]] - self.vertices[e[:, 0]], axis=1)))


@dataclass(frozen=True)
class NormalFrame:
    e1: np.ndarray
    e2: np.ndarray
    orientation_sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "e1", _frozen(self.e1))
        object.__setattr__(self, "e2", _frozen(self.e2))
        if self.orientation_sign not in (1, -1):
            raise GeometryError("orientation_sign must be +1 or -1")
        if (abs(self.e1 @ self.e1 - 1) > ORTHO_TOL or abs(self.e2 @ self.e2 - 1) > ORTHO_TOL
                or abs(self.e1 @ self.e2) > ORTHO_TOL):
            raise GeometryError("normal frame is not orthonormal")

    def rotation_matrix(self) -> np.ndarray:
        """Matrix of ``w -> J(Proj_N w)``."""
        return j_matrix(self.e1, self.e2, self.orientation_sign)


def _scatter(index: np.ndarray, values: np.ndarray, size: int) -> np.ndarray:
    """Sum ``values`` rows into ``size`` bins given by ``index`` (fixed order)."""
    flat = values.reshape(values.shape[0], -1)
    out = np.empty((size, flat.shape[1]))
    for c in range(flat.shape[1]):
        out[:, c] = np.bincount(index, weights=flat[:, c], minlength=size)
    return out.reshape((size,) + values.shape[1:])


def directed_edges(triangles: np.ndarray) -> np.ndarray:
    t = np.asarray(triangles)
    return np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])


def j_matrix(e1, e2, sign=1):
    """Antisymmetric matrix ``s (e2 e1^T - e1 e2^T)``; batched over leading axes."""
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    s = np.asarray(sign, dtype=float)[..., None, None]
    return s * (e2[..., :, None] * e1[..., None, :] - e1[..., :, None] * e2[..., None, :])


# ---------------------------------------------------------------------------
# curves


def _neighbors(curve: DiscreteCurve):
    p = curve.points
    if curve.closed:
        return np.roll(p, 1, axis=0), p, np.roll(p, -1, axis=0)
    return p[:-2], p[1:-1], p[2:]


def _circumcurvature(a: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Curvature vector of the circle through ``0``, ``a`` and ``c``.

    ``a`` and ``c`` are the neighbours relative to the middle vertex.
    Returns ``(O - B) / |O - B|^2`` (magnitude ``1/R``, pointing at the centre).
    """
    aa = np.einsum("...i,...i", a, a)
    cc = np.einsum("...i,...i", c, c)
    ac = np.einsum("...i,...i", a, c)
    if np.any(aa <= 0) or np.any(cc <= 0):
        raise GeometryError("degenerate edge")
    det = aa * cc - ac * ac
    flat = det <= 1e-24 * aa * cc
    det = np.where(flat, 1.0, det)
    # Solve [[aa, ac], [ac, cc]] [s, t] = [aa/2, cc/2]
    s = 0.5 * (aa * cc - ac * cc) / det
    t = 0.5 * (aa * cc - ac * aa) / det
    o = s[..., None] * a + t[..., None] * c
    oo = np.einsum("...i,...i", o, o)
    k = o / np.where(flat, 1.0, oo)[..., None]
    return np.where(flat[..., None], 0.0, k)


def curvature_vectors(curve: DiscreteCurve) -> np.ndarray:
    """Three-point circumcircle curvature vectors ``k n`` at all vertices.

    For open curves the two end vertices get zero.
    """
    prev, mid, nxt = _neighbors(curve)
    k = _circumcurvature(prev - mid, nxt - mid)
    if curve.closed:
        return k
    out = np.zeros_like(curve.points)
    out[1:-1] = k
    return out


def curve_curvature_vector(curve: DiscreteCurve, i: int) -> np.ndarray:
    m = len(curve)
    if not curve.closed and (i <= 0 or i >= m - 1):
        raise GeometryError("curvature undefined at the end of an open curve")
    p = curve.points
    a = p[(i - 1) % m] - p[i]
    c = p[(i + 1) % m] - p[i]
    return _circumcurvature(a, c)


def unit_tangents(curve: DiscreteCurve) -> np.ndarray:
    """Normalised central differences (one-sided at open ends)."""
    p = curve.points
    if curve.closed:
        d = np.roll(p, -1, axis=0) - np.roll(p, 1, axis=0)
    else:
        d = np.empty_like(p)
        d[1:-1] = p[2:] - p[:-2]
        d[0] = p[1] - p[0]
        d[-1] = p[-1] - p[-2]
    norm = np.linalg.norm(d, axis=1)
    if np.any(norm <= 0):
        raise GeometryError("degenerate edge")
    return d / norm[:, None]


def curve_length(curve: DiscreteCurve) -> float:
    return float(np.sum(np.linalg.norm(curve.edges(), axis=1)))


def complement_basis(tangents: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the rows' span.

    ``tangents`` has shape (..., l, n); returns (..., n - l, n).
    """
    t = np.asarray(tangents, dtype=float)
    l, n = t.shape[-2:]
    _, _, vt = np.linalg.svd(t, full_matrices=True)
    return vt[..., l:, :]


def oriented_normal_frames(tangents: np.ndarray):
    """Normal frames ``(e1, e2, sign)`` for oriented tangent bases (..., n-2, n).

    The sign makes ``det[e1, t_1..t_l, e2]`` positive (see module docstring).
    """
    t = np.asarray(tangents, dtype=float)
    l, n = t.shape[-2:]
    if n - l != 2:
        raise GeometryError("normal frames need codimension 2")
    nb = complement_basis(t)
    e1, e2 = nb[..., 0, :], nb[..., 1, :]
    mat = np.concatenate([e1[..., None, :], t, e2[..., None, :]], axis=-2)
    d = np.linalg.det(mat)
    sign = np.where(d >= 0, 1, -1)
    return e1, e2, sign


def curve_normal_frames(curve: DiscreteCurve):
    """Normal frames of a space curve in R^3 built from its unit tangents."""
    if curve.ambient_dim != 3:
        raise GeometryError("curve normal frames are defined in R^3")
    return oriented_normal_frames(unit_tangents(curve)[:, None, :])


# ---------------------------------------------------------------------------
# membranes


def triangle_data(mem: DiscreteMembrane):
    """Edge vectors ``a = p1 - p0``, ``b = p2 - p0`` and areas per triangle."""
    v = mem.vertices
    t = mem.triangles
    p0 = v[t[:, 0]]
    a = v[t[:, 1]] - p0
    b = v[t[:, 2]] - p0
    aa = np.einsum("ij,ij->i", a, a)
    bb = np.einsum("ij,ij->i", b, b)
    ab = np.einsum("ij,ij->i", a, b)
    area = 0.5 * np.sqrt(np.maximum(aa * bb - ab * ab, 0.0))
    return a, b, area


def triangle_areas(mem: DiscreteMembrane) -> np.ndarray:
    return triangle_data(mem)[2]


def membrane_volume(mem: DiscreteMembrane) -> float:
    """(n-2)-volume, i.e. total triangle area measured in R^n."""
    return float(np.sum(triangle_areas(mem)))


def triangle_tangent_bases(mem: DiscreteMembrane) -> np.ndarray:
    """Oriented orthonormal tangent basis (k, 2, n) of each triangle plane."""
    a, b, area = triangle_data(mem)
    if np.any(area <= 0):
        raise GeometryError("zero-area triangle")
    t1 = a / np.linalg.norm(a, axis=1)[:, None]
    b_perp = b - np.einsum("ij,ij->i", b, t1)[:, None] * t1
    t2 = b_perp / np.linalg.norm(b_perp, axis=1)[:, None]
    return np.stack([t1, t2], axis=1)


def triangle_j_matrices(mem: DiscreteMembrane) -> np.ndarray:
    """Per-triangle matrices of ``w -> J(Proj_N w)`` for the flat triangle plane."""
    e1, e2, s = oriented_normal_frames(triangle_tangent_bases(mem))
    return j_matrix(e1, e2, s)


def _cotangents(mem: DiscreteMembrane):
    """Cotangent of the interior angle at each corner, shape (k, 3)."""
    v = mem.vertices
    t = mem.triangles
    cots = np.empty(t.shape, dtype=float)
    for c in range(3):
        p = v[t[:, c]]
        u = v[t[:, (c + 1) % 3]] - p
        w = v[t[:, (c + 2) % 3]] - p
        uw = np.einsum("ij,ij->i", u, w)
        cross = np.sqrt(np.maximum(np.einsum("ij,ij->i", u, u) * np.einsum("ij,ij->i", w, w) - uw * uw, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            cots[:, c] = uw / cross
    return cots


def mixed_areas(mem: DiscreteMembrane) -> np.ndarray:
    """Mixed Voronoi vertex areas (Voronoi for acute triangles, barycentric split otherwise)."""
    v = mem.vertices
    t = mem.triangles
    _, _, area = triangle_data(mem)
    cots = _cotangents(mem)
    out = np.zeros(v.shape[0])
    sq = np.empty(t.shape)
    for c in range(3):
        # squared length of the edge opposite corner c
        d = v[t[:, (c + 1) % 3]] - v[t[:, (c + 2) % 3]]
        sq[:, c] = np.einsum("ij,ij->i", d, d)
    obtuse = cots < 0
    any_obtuse = obtuse.any(axis=1)
    for c in range(3):
        j, k = (c + 1) % 3, (c + 2) % 3
        # Voronoi share of corner c: (|e_cj|^2 cot k + |e_ck|^2 cot j) / 8
        vor = (sq[:, k] * cots[:, k] + sq[:, j] * cots[:, j]) / 8.0
        share = np.where(any_obtuse, np.where(obtuse[:, c], area / 2.0, area / 4.0), vor)
        share = np.where(area > 0, share, 0.0)
        out += np.bincount(t[:, c], weights=share, minlength=v.shape[0])
    return out


def mean_curvature_vectors(mem: DiscreteMembrane, check: bool = True) -> np.ndarray:
    """Mean curvature vectors at all vertices (mean, not sum, of principal curvatures).

    ``MC_i = (1 / (4 A_i)) sum_j (cot a_ij + cot b_ij) (x_j - x_i)``.  Vertices
    on the boundary of an open mesh get meaningless values.
    """
    v = mem.vertices
    t = mem.triangles
    cots = _cotangents(mem)
    if check and not np.all(np.isfinite(cots)):
        raise GeometryError("degenerate vertex area")
    lap = np.zeros_like(v)
    for c in range(3):
        cj, ck = (c + 1) % 3, (c + 2) % 3
        i, j, k = t[:, c], t[:, cj], t[:, ck]
        # edge (i, j) is opposite corner k, edge (i, k) opposite corner j
        contrib = cots[:, ck, None] * (v[j] - v[i]) + cots[:, cj, None] * (v[k] - v[i])
        lap += _scatter(i, contrib, v.shape[0])
    areas = mixed_areas(mem)
    if check and np.any(areas <= 0):
        raise GeometryError("degenerate vertex area")
    with np.errstate(divide="ignore", invalid="ignore"):
        return lap / (4.0 * areas[:, None])


def membrane_mean_curvature(mem: DiscreteMembrane, v: int) -> np.ndarray:
    fan = np.any(mem.triangles == v, axis=1)
    if not fan.any():
        raise GeometryError("degenerate vertex area")
    local = DiscreteMembrane(mem.vertices, mem.triangles[fan], mem.strength)
    if not mixed_areas(local)[v] > 0:
        raise GeometryError("degenerate vertex area")
    with np.errstate(divide="ignore", invalid="ignore"):
        mc = mean_curvature_vectors(local, check=False)[v]
    if not np.all(np.isfinite(mc)):
        raise GeometryError("degenerate vertex area")
    return mc


def _vertex_eigenframes(mem: DiscreteMembrane, check: bool):
    v = mem.vertices
    t = mem.triangles
    a, b, area = triangle_data(mem)
    c = b - a
    cov_t = area[:, None, None] * (
        a[:, :, None] * a[:, None, :] + b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :])
    biv_t = a[:, :, None] * b[:, None, :] - b[:, :, None] * a[:, None, :]
    idx = t.T.ravel()
    cov = _scatter(idx, np.concatenate([cov_t] * 3), v.shape[0])
    biv = _scatter(idx, np.concatenate([biv_t] * 3), v.shape[0])
    w, vec = np.linalg.eigh(cov)
    if check and np.any(w[:, -2] <= 1e-12 * np.maximum(w[:, -1], 1e-300)):
        raise GeometryError("degenerate tangent estimate")
    t1 = vec[:, :, -1]
    t2 = vec[:, :, -2]
    orient = np.einsum("mi,mij,mj->m", t1, biv, t2)
    t2 = np.where(orient[:, None] < 0, -t2, t2)
    return np.stack([t1, t2], axis=1), vec[:, :, :-2]


def vertex_tangent_bases(mem: DiscreteMembrane, check: bool = True) -> np.ndarray:
    """Oriented tangent-plane estimates (m, 2, n) at every vertex.

    The plane is spanned by the two leading eigenvectors of the area-weighted
    covariance of the fan's triangle edges; the pair is oriented so that the
    fan's summed edge bivector is positive on it.
    """
    return _vertex_eigenframes(mem, check)[0]


def vertex_normal_frames(mem: DiscreteMembrane, check: bool = True):
    """Arrays ``(e1, e2, sign)`` of normal frames at every vertex."""
    if mem.ambient_dim != 4:
        raise GeometryError("membrane normal frames need codimension 2 (ambient dimension 4)")
    tb, nb = _vertex_eigenframes(mem, check)
    e1, e2 = nb[:, :, 0], nb[:, :, 1]
    mat = np.concatenate([e1[:, None, :], tb, e2[:, None, :]], axis=1)
    sign = np.where(np.linalg.det(mat) >= 0, 1, -1)
    return e1, e2, sign


def membrane_normal_frame(mem: DiscreteMembrane, v: int) -> NormalFrame:
    fan = np.any(mem.triangles == v, axis=1)
    if not fan.any():
        raise GeometryError("degenerate tangent estimate")
    local = DiscreteMembrane(mem.vertices, mem.triangles[fan], mem.strength)
    # vertices outside the fan have empty covariance; only v is checked
    e1, e2, s = vertex_normal_frames(local, check=False)
    tri = mem.vertices[mem.triangles[fan]]
    edges = np.concatenate([tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 1], tri[:, 0] - tri[:, 2]])
    w = np.linalg.eigvalsh(edges.T @ edges)
    if w[-2] <= 1e-12 * max(w[-1], 1e-300):
        raise GeometryError("degenerate tangent estimate")
    return NormalFrame(e1[v], e2[v], int(s[v]))


def rotate_J(frame: NormalFrame, w) -> np.ndarray:
    """Quarter turn of a normal vector: ``a e1 + b e2 -> s(-b e1 + a e2)``."""
    w = np.asarray(w, dtype=float)
    a = w @ frame.e1
    b = w @ frame.e2
    resid = w - a * frame.e1 - b * frame.e2
    if np.linalg.norm(resid) > PLANE_TOL * max(1.0, np.linalg.norm(w)):
        raise GeometryError("vector not normal")
    return frame.orientation_sign * (-b * frame.e1 + a * frame.e2)


def project_normal(e1, e2, w):
    """Batched projection of ``w`` onto ``span(e1, e2)``."""
    return (np.einsum("...i,...i", w, e1)[..., None] * e1
            + np.einsum("...i,...i", w, e2)[..., None] * e2)


def apply_J(e1, e2, sign, w):
    """Batched ``J(Proj_N w)``."""
    a = np.einsum("...i,...i", w, e1)[..., None]
    b = np.einsum("...i,...i", w, e2)[..., None]
    return np.asarray(sign, dtype=float)[..., None] * (-b * e1 + a * e2)


def triangle_aspect_ratios(mem: DiscreteMembrane) -> np.ndarray:
    """Longest edge over the shortest altitude, per triangle."""
    v = mem.vertices
    t = mem.triangles
    _, _, area = triangle_data(mem)
    e = np.stack([np.linalg.norm(v[t[:, (c + 1) % 3]] - v[t[:, c]], axis=1) for c in range(3)], axis=1)
    longest = e.max(axis=1)
    with np.errstate(divide="ignore"):
        return np.where(area > 0, longest * longest / (2.0 * area), np.inf)
