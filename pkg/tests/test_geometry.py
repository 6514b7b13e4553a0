import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vortexmem import fixtures as fx
from vortexmem import geometry as geo
from vortexmem.geometry import DiscreteCurve, DiscreteMembrane, GeometryError, NormalFrame

from conftest import random_rotation


@pytest.fixture(scope="module")
def sphere():
    return fx.icosphere4d(1.0, 4)


def test_polygon_curvature_is_exact_and_points_inward():
    c = fx.circle(256)
    k = geo.curvature_vectors(c)
    assert np.allclose(np.linalg.norm(k, axis=1), 1.0, atol=1e-12)
    assert np.allclose(k, -c.points, atol=1e-12)
    assert np.allclose(geo.curve_curvature_vector(c, 17), -c.points[17])


def test_radius_two_curvature():
    k = geo.curvature_vectors(fx.circle(256, radius=2.0))
    assert np.allclose(np.linalg.norm(k, axis=1), 0.5, atol=1e-3)


def test_collinear_vertex_has_zero_curvature():
    c = DiscreteCurve([[0, 0, 0], [1, 0, 0], [2, 0, 0], [1, 1, 0]], closed=True)
    assert np.array_equal(geo.curve_curvature_vector(c, 1), np.zeros(3))


def test_repeated_point_is_degenerate_edge():
    with pytest.raises(GeometryError, match="degenerate edge"):
        DiscreteCurve([[0, 0, 0], [0, 0, 0], [1, 0, 0], [1, 1, 0]])


def test_ellipse_curvature_converges_second_order():
    # a circle polygon is exact; an ellipse exercises the truncation error
    a, b = 1.0, 0.5
    sizes = [64, 128, 256, 512]
    errs = []
    for m in sizes:
        c = fx.ellipse(m, a, b)
        th = 2 * np.pi * np.arange(m) / m
        exact = a * b / (a ** 2 * np.sin(th) ** 2 + b ** 2 * np.cos(th) ** 2) ** 1.5
        errs.append(np.max(np.abs(np.linalg.norm(geo.curvature_vectors(c), axis=1) - exact)))
    h = [2 * np.pi / m for m in sizes]
    slope = np.polyfit(np.log(h), np.log(errs), 1)[0]
    assert slope >= 1.9


def test_curve_length_values():
    assert abs(geo.curve_length(fx.circle(1024)) - 2 * 1024 * np.sin(np.pi / 1024)) < 1e-12
    assert abs(geo.curve_length(fx.circle(1024)) - 2 * np.pi) < 1e-4
    sq = DiscreteCurve([[0, 0], [1, 0], [1, 1], [0, 1]])
    assert geo.curve_length(sq) == 4.0
    assert np.isclose(geo.curve_length(fx.circle(64, 3.0)), 3 * geo.curve_length(fx.circle(64)))


def test_sphere_mean_curvature(sphere):
    mc = geo.mean_curvature_vectors(sphere)
    x = sphere.vertices
    assert sphere.n_vertices == 2562
    assert np.max(np.abs(np.linalg.norm(mc, axis=1) - 1)) < 2e-2
    cosang = -np.einsum("ij,ij->i", mc, x) / np.linalg.norm(mc, axis=1) / np.linalg.norm(x, axis=1)
    assert np.degrees(np.arccos(np.clip(cosang.min(), -1, 1))) < 1.0
    assert np.max(np.abs(mc[:, 3])) < 1e-10
    v = 123
    assert np.allclose(geo.membrane_mean_curvature(sphere, v), mc[v], atol=1e-12)


def test_radius_two_sphere_mean_curvature():
    mc = geo.mean_curvature_vectors(fx.icosphere4d(2.0, 4))
    assert np.max(np.abs(np.linalg.norm(mc, axis=1) - 0.5)) < 1e-2


def test_flat_patch_interior_mean_curvature_vanishes():
    n = 8
    mem = fx.flatpatch4d(n=n)
    mc = geo.mean_curvature_vectors(mem)
    i, j = np.divmod(np.arange(mem.n_vertices), n + 1)
    interior = (i > 0) & (i < n) & (j > 0) & (j < n)
    assert np.max(np.abs(mc[interior])) < 1e-10


def _great_circle_average(normal_dirs, curvatures, n_dirs=64):
    """Average of geodesic curvature vectors over sampled unit tangent directions."""
    phi = 2 * np.pi * np.arange(n_dirs) / n_dirs
    return np.mean([curvatures(p) for p in phi], axis=0)


def test_mean_curvature_matches_direction_average_on_torus():
    r1, r2 = 1.0, 0.7
    mem = fx.torus4d(r1, r2, 96, 72)
    mc = geo.mean_curvature_vectors(mem)
    x = mem.vertices
    ua = np.concatenate([x[:, :2] / r1, np.zeros((len(x), 2))], axis=1)
    ub = np.concatenate([np.zeros((len(x), 2)), x[:, 2:] / r2], axis=1)
    # a unit tangent at angle phi has normal curvature -(cos^2/r1 ua + sin^2/r2 ub)
    oracle = _great_circle_average(None, lambda p: -(np.cos(p) ** 2 / r1 * ua + np.sin(p) ** 2 / r2 * ub))
    rel = np.linalg.norm(mc - oracle, axis=1) / np.linalg.norm(oracle, axis=1)
    assert rel.max() < 3e-2


def test_mean_curvature_matches_direction_average_on_sphere(sphere):
    x = sphere.vertices
    oracle = _great_circle_average(None, lambda p: -x)
    mc = geo.mean_curvature_vectors(sphere)
    assert np.max(np.linalg.norm(mc - oracle, axis=1)) < 3e-2


def test_sphere_normal_frame_spans_radial_and_e4(sphere):
    for v in (0, 57, 2000):
        f = geo.membrane_normal_frame(sphere, v)
        u = sphere.vertices[v] / np.linalg.norm(sphere.vertices[v])
        basis = np.stack([u, [0, 0, 0, 1.0]])
        for e in (f.e1, f.e2):
            resid = e - basis.T @ (basis @ e)
            assert np.degrees(np.arcsin(min(1.0, np.linalg.norm(resid)))) < 1.0


def test_flat_patch_frame_is_e3_e4():
    mem = fx.flatpatch4d(n=4)
    f = geo.membrane_normal_frame(mem, 12)
    assert np.allclose(np.abs(f.e1[:2]), 0, atol=1e-12) and np.allclose(np.abs(f.e2[:2]), 0, atol=1e-12)


def test_frame_orientation_rule(sphere):
    e1, e2, s = geo.vertex_normal_frames(sphere)
    tb = geo.vertex_tangent_bases(sphere)
    mats = np.concatenate([tb, e1[:, None], e2[:, None]], axis=1)
    assert np.all(np.sign(np.linalg.det(mats)) == s)


def test_frame_equivariance(sphere, rng):
    Q = random_rotation(rng, 4)
    rot = sphere.with_vertices(sphere.vertices @ Q.T + rng.normal(size=4))
    e1, e2, _ = geo.vertex_normal_frames(sphere)
    f1, f2, _ = geo.vertex_normal_frames(rot)
    P = np.einsum("vi,vj->vij", e1, e1) + np.einsum("vi,vj->vij", e2, e2)
    Pr = np.einsum("vi,vj->vij", f1, f1) + np.einsum("vi,vj->vij", f2, f2)
    assert np.max(np.abs(Q @ P @ Q.T - Pr)) < 1e-8


def test_mean_curvature_equivariance(sphere, rng):
    Q = random_rotation(rng, 4)
    t = rng.normal(size=4)
    mc = geo.mean_curvature_vectors(sphere)
    mcr = geo.mean_curvature_vectors(sphere.with_vertices(sphere.vertices @ Q.T + t))
    assert np.max(np.abs(mc @ Q.T - mcr)) < 1e-8


def test_rotate_J_examples():
    f = NormalFrame([0, 0, 1.0, 0], [0, 0, 0, 1.0], -1)
    assert np.allclose(geo.rotate_J(f, f.e1), -f.e2)
    with pytest.raises(GeometryError, match="vector not normal"):
        geo.rotate_J(f, [1.0, 0, 0, 0])


def test_frame_must_be_orthonormal():
    with pytest.raises(GeometryError):
        NormalFrame([1.0, 0, 0, 0], [1.0, 1e-6, 0, 0])


@st.composite
def frames(draw):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    n = draw(st.integers(3, 6))
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(n, 2)))
    sign = draw(st.sampled_from([1, -1]))
    return NormalFrame(q[:, 0], q[:, 1], sign), rng.normal(size=2)


@given(frames())
def test_J_squared_is_minus_identity_and_isometric(data):
    f, (a, b) = data
    w = a * f.e1 + b * f.e2
    jw = geo.rotate_J(f, w)
    assert np.allclose(geo.rotate_J(f, jw), -w, atol=1e-12)
    assert abs(np.linalg.norm(jw) - np.linalg.norm(w)) <= 1e-12 * max(1.0, np.linalg.norm(w))
    assert np.allclose(f.rotation_matrix() @ w, jw, atol=1e-12)


def test_volume_values(sphere):
    assert abs(geo.membrane_volume(sphere) / (4 * np.pi) - 1) < 5e-3
    big = sphere.with_vertices(3 * sphere.vertices)
    assert np.isclose(geo.membrane_volume(big), 9 * geo.membrane_volume(sphere))
    flat = DiscreteMembrane([[0, 0, 0, 0], [1, 0, 0, 0], [2, 0, 0, 0], [0, 1, 0, 0]], [[0, 1, 2], [0, 1, 3]])
    assert geo.membrane_volume(flat) == 0.5


def test_icosphere_is_closed_and_flip_reverses_winding(sphere):
    assert sphere.is_closed()
    assert sphere.flipped().is_closed()
    assert not fx.flatpatch4d(n=3).is_closed()
    e1, e2, s = geo.vertex_normal_frames(sphere)
    f1, f2, sf = geo.vertex_normal_frames(sphere.flipped())
    w = geo.project_normal(e1, e2, np.random.default_rng(3).normal(size=e1.shape))
    assert np.allclose(geo.apply_J(f1, f2, sf, w), -geo.apply_J(e1, e2, s, w), atol=1e-12)


@given(st.integers(0, 10 ** 6), st.floats(0.5, 3.0))
def test_circumcurvature_of_random_circle_triples(seed, radius):
    rng = np.random.default_rng(seed)
    Q = random_rotation(rng, 3)
    th = np.sort(rng.uniform(0, 2 * np.pi, 3))
    if np.min(np.diff(np.concatenate([th, [th[0] + 2 * np.pi]]))) < 0.05:
        return
    pts = radius * np.stack([np.cos(th), np.sin(th), np.zeros(3)], axis=1) @ Q.T
    c = DiscreteCurve(pts, closed=False)
    assert abs(np.linalg.norm(geo.curvature_vectors(c)[1]) - 1 / radius) < 1e-9 / radius
