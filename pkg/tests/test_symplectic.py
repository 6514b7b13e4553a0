import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vortexmem import filament3d as fl
from vortexmem import fixtures as fx
from vortexmem import geometry as geo
from vortexmem import pointvortex2d as pv
from vortexmem import symplectic as sy
from vortexmem.geometry import GeometryError
from vortexmem.pointvortex2d import VortexConfig2D


@pytest.fixture(scope="module")
def sphere4():
    return fx.icosphere4d(1.0, 3)


@pytest.fixture(scope="module")
def sphere_sheet():
    mesh = fx.icosphere3d_mesh(1.0, 3)
    return sy.VortexSheet.from_potential(mesh, mesh.vertices[:, 2])


def test_kk_examples():
    cfg = VortexConfig2D([[0.0, 0.0]], [3.0])
    assert sy.kk_form_points(cfg, [[1.0, 0.0]], [[0.0, 1.0]]) == 3.0
    V = np.random.default_rng(0).normal(size=(1, 2))
    assert sy.kk_form_points(cfg, V, V) == 0.0
    with pytest.raises(ValueError):
        sy.kk_form_points(cfg, [[1.0, 0.0]], [[1.0, 0.0], [0.0, 1.0]])


def test_kk_and_bracket_are_reciprocal():
    cfg = fx.random_vortices(4, 2)
    n = 2 * len(cfg)
    omega = np.array([[sy.kk_form_points(cfg, a.reshape(-1, 2), b.reshape(-1, 2)) for b in np.eye(n)] for a in np.eye(n)])
    assert np.allclose(omega, sy.kk_matrix(cfg))
    bracket = np.array([[pv.poisson_bracket(cfg, a.reshape(-1, 2), b.reshape(-1, 2)) for b in np.eye(n)] for a in np.eye(n)])
    # the bracket is the inverse structure; diagonal blocks carry 1/kappa_j
    assert np.allclose(bracket @ omega, -np.eye(n), atol=1e-12)
    assert np.allclose(bracket[0, 1], 1 / cfg.strengths[0])


def test_mw_curve_circle_value():
    c = fx.circle(512)
    V = np.tile([0.0, 0.0, 1.0], (512, 1))
    assert abs(sy.mw_form_curve(c, V, c.points) - 2 * np.pi) < 1e-3
    assert sy.mw_form_curve(c, V, V) == 0.0


def test_mw_curve_refinement_invariance():
    def fields(c):
        x = c.points
        return np.stack([np.sin(2 * x[:, 1]), x[:, 0] ** 2, np.cos(x[:, 0])], 1), np.stack([x[:, 1], np.ones(len(x)), x[:, 0] * x[:, 1]], 1)

    vals = [sy.mw_form_curve(c, *fields(c)) for c in (fx.circle(256), fx.circle(512))]
    assert abs(vals[1] - vals[0]) <= 1e-3


def test_mw_membrane_sphere_value():
    mem = fx.icosphere4d(1.0, 4)
    e1, e2, s = geo.vertex_normal_frames(mem)
    val = sy.mw_form_membrane(mem, e1, geo.apply_J(e1, e2, s, e1))
    assert abs(val / (4 * np.pi) - 1) < 1e-2
    assert sy.mw_form_membrane(mem, e1, e1) == 0.0


def _rand(rng, shape):
    return rng.normal(size=shape)


@given(st.integers(0, 10 ** 6), st.floats(-3, 3))
def test_all_forms_bilinear_and_antisymmetric(seed, a):
    rng = np.random.default_rng(seed)
    cases = []
    cfg = fx.random_vortices(3, seed % 50)
    cases.append((lambda V, W: sy.kk_form_points(cfg, V, W), (3, 2)))
    c = fx.perturbed_circle(32, seed=seed % 50)
    cases.append((lambda V, W: sy.mw_form_curve(c, V, W), (32, 3)))
    mem = fx.icosphere4d(1.0, 1)
    cases.append((lambda V, W: sy.mw_form_membrane(mem, V, W), (mem.n_vertices, 4)))
    mesh = fx.icosphere3d_mesh(1.0, 1)
    sheet = sy.VortexSheet.from_potential(mesh, rng.normal(size=mesh.n_vertices))
    cases.append((lambda V, W: sy.sheet_form(sheet, V, W), (mesh.n_vertices, 3)))
    for form, shape in cases:
        V, V2, W = _rand(rng, shape), _rand(rng, shape), _rand(rng, shape)
        base = form(V, W)
        scale = max(1.0, abs(base), abs(form(V2, W)))
        assert abs(form(V, W) + form(W, V)) <= 1e-12 * scale
        assert abs(form(a * V + V2, W) - (a * base + form(V2, W))) <= 1e-12 * scale * (1 + abs(a))


def test_sheet_closedness_enforced(sphere_sheet):
    mesh = sphere_sheet.mesh
    alpha = np.array(sphere_sheet.alpha)
    assert np.max(np.abs(sphere_sheet.coboundary())) <= 1e-12
    alpha[0] += 1e-3
    with pytest.raises(GeometryError, match="not closed"):
        sy.VortexSheet(mesh, alpha)


def test_sheet_potential_must_match(sphere_sheet):
    f = np.array(sphere_sheet.potential)
    f[0] += 1.0
    with pytest.raises(GeometryError):
        sy.VortexSheet(sphere_sheet.mesh, sphere_sheet.alpha, f)


def test_from_edge_values_orientation():
    mesh = fx.icosphere3d_mesh(1.0, 0)
    f = mesh.vertices[:, 0]
    vals = {(int(j), int(i)): f[i] - f[j] for i, j in geo.directed_edges(mesh.triangles)}
    sheet = sy.VortexSheet.from_edge_values(mesh, vals)
    assert np.allclose(sheet.alpha, sy.VortexSheet.from_potential(mesh, f).alpha, atol=1e-15)
    assert not sheet.is_exact


def test_pairing_sphere_value():
    mesh = fx.icosphere3d_mesh(1.0, 4)
    sheet = sy.VortexSheet.from_potential(mesh, mesh.vertices[:, 2])
    assert abs(sy.sheet_pairing(sheet, np.array([0.0, 0.0, 1.0])) / (4 * np.pi / 3) - 1) < 1e-2


def test_pairing_constant_potential_and_tangent_field(sphere_sheet):
    mesh = sphere_sheet.mesh
    const = sy.VortexSheet.from_potential(mesh, np.full(mesh.n_vertices, 2.0))
    assert abs(sy.sheet_pairing(const, np.array([0.3, -1.0, 0.2]))) < 1e-6
    tangent = lambda x: np.cross(x, [0.0, 0.0, 1.0])  # rotation field, tangent to spheres about 0
    cent = mesh.vertices[mesh.triangles].mean(axis=1)
    n, _ = sy._triangle_normals(mesh)
    proj = tangent(cent) - np.einsum("ij,ij->i", tangent(cent), n)[:, None] * n
    assert abs(sy.sheet_pairing(sphere_sheet, proj)) < 1e-12


def test_pairing_gauge_shift(sphere_sheet):
    mesh = sphere_sheet.mesh
    V = lambda x: np.stack([x[:, 1], x[:, 2] ** 2, 1 + x[:, 0]], axis=1)
    shifted = sy.VortexSheet.from_potential(mesh, sphere_sheet.potential + 1.7)
    ones = sy.VortexSheet.from_potential(mesh, np.ones(mesh.n_vertices))
    diff = sy.sheet_pairing(shifted, V) - sy.sheet_pairing(sphere_sheet, V)
    assert abs(diff - 1.7 * sy.sheet_pairing(ones, V)) < 1e-12


def test_pairing_needs_potential():
    mesh = fx.icosphere3d_mesh(1.0, 0)
    sheet = sy.VortexSheet(mesh, np.zeros(30))
    with pytest.raises(NotImplementedError, match="non-exact alpha"):
        sy.sheet_pairing(sheet, np.array([0.0, 0.0, 1.0]))


def test_sheet_form_parallel_one_forms_vanish(sphere_sheet):
    nv = sphere_sheet.mesh.n_vertices
    ex = np.tile([1.0, 0.0, 0.0], (nv, 1))
    ey = np.tile([0.0, 1.0, 0.0], (nv, 1))
    assert abs(sy.sheet_form(sphere_sheet, ex, ey)) < 1e-8


def _smooth_fields(x, seed):
    c = np.random.default_rng(seed).normal(size=8)
    V = np.stack([np.sin(c[0] * x[:, 1] + c[1]), np.cos(c[2] * x[:, 2]), c[3] * x[:, 0]], axis=1)
    W = np.stack([x[:, 2] * c[4], np.sin(c[5] * x[:, 0]), np.cos(c[6] * x[:, 1] + c[7])], axis=1)
    return V, W


def test_band_limit_approaches_filament_form():
    eq = fx.circle(1024)
    ref = sy.mw_form_curve(eq, *_smooth_fields(eq.points, 1))
    errs = []
    for width in (0.3, 0.15, 0.075):
        sheet = fx.sphere_band_sheet(width, level=5)
        errs.append(abs(sy.sheet_form(sheet, *_smooth_fields(sheet.mesh.vertices, 1)) / ref - 1))
    assert errs[-1] < 3e-2
    assert errs[0] > errs[-1]


def test_torus_band_sheet_is_exact_and_closed():
    sheet = fx.torus_band_sheet()
    assert sheet.is_exact and np.max(np.abs(sheet.coboundary())) <= 1e-12


def test_cylinder_fibration_translates():
    fib = fx.cylinder_fibration(4, 64)
    h0 = fib.hamiltonian()
    out, hs = sy.evolve_fibration(fib, 1e-3, 100)
    for before, after in zip(fib.fibers, out.fibers):
        assert np.allclose(after.points - before.points, [0.0, 0.0, 0.1], atol=1e-6)
    assert np.max(np.abs(hs - h0)) / h0 <= 1e-4


def test_fibration_zero_step_and_single_fiber():
    fib = fx.cylinder_fibration(3, 32)
    assert sy.sheet_family_binormal_step(fib, 0.0) is fib
    c = fx.perturbed_circle(64, seed=9)
    single = sy.SheetFibration([c], [0.0], 1.0)
    out, _ = sy.evolve_fibration(single, 1e-3, 10)
    ref = fl.evolve_filament(c, 1e-3, 10).curve
    assert np.array_equal(out.fibers[0].points, ref.points)


def test_fibration_validation():
    with pytest.raises(GeometryError):
        sy.SheetFibration([fx.circle(16), fx.circle(32)], [0.0, 1.0], 1.0)
    with pytest.raises(ValueError):
        sy.SheetFibration([fx.circle(16)], [0.0], 0.0)
