import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vortexmem import filament3d as fl
from vortexmem import fixtures as fx
from vortexmem import geometry as geo
from vortexmem import membrane_flow as mf
from vortexmem.geometry import DiscreteCurve, GeometryError


def hausdorff(a, b):
    d = np.linalg.norm(a[:, None] - b[None], axis=-1)
    return max(d.min(axis=0).max(), d.min(axis=1).max())


def test_unit_circle_velocity():
    v = fl.binormal_velocity(fx.circle(512))
    assert np.max(np.abs(v - [0.0, 0.0, 1.0])) < 2e-3


def test_radius_two_circle_velocity():
    v = fl.binormal_velocity(fx.circle(512, 2.0))
    assert np.max(np.abs(v - [0.0, 0.0, 0.5])) < 1e-3


def test_collinear_vertex_has_zero_velocity():
    c = DiscreteCurve([[0, 0, 0], [1, 0, 0], [2, 0, 0], [1, 1, 0]])
    assert np.array_equal(fl.binormal_velocity(c)[1], np.zeros(3))


def test_needs_three_dimensions():
    with pytest.raises(GeometryError):
        fl.binormal_velocity(fx.circle(16, dim=4))


def test_velocity_orthogonal_to_tangent_and_curvature():
    c = fx.perturbed_circle(128, 0.1, seed=4)
    v = fl.binormal_velocity(c)
    t = geo.unit_tangents(c)
    k = geo.curvature_vectors(c)
    scale = np.linalg.norm(v, axis=1) * np.linalg.norm(k, axis=1)
    assert np.max(np.abs(np.einsum("ij,ij->i", v, t)) / np.linalg.norm(v, axis=1)) < 1e-10
    assert np.max(np.abs(np.einsum("ij,ij->i", v, k)) / scale) < 1e-10


@pytest.mark.parametrize("seed", [0, 1])
def test_skew_flow_reduces_to_binormal_flow(seed):
    for c in (fx.circle(64), fx.perturbed_circle(96, 0.1, seed=seed), fx.ellipse(80)):
        assert np.max(np.abs(mf.skew_mc_velocity_curve(c) - fl.binormal_velocity(c))) < 1e-8


def test_circle_translates_at_unit_speed():
    c = fx.circle(128)
    run = fl.evolve_filament(c, 1e-3, 1000)
    assert hausdorff(run.curve.points, c.points + [0.0, 0.0, 1.0]) < 5e-3
    assert run.length_drift < 1e-4


def test_zero_steps_returns_input():
    c = fx.circle(32)
    assert fl.evolve_filament(c, 1e-3, 0).curve is c


def test_length_conserved_on_perturbed_circle():
    run = fl.evolve_filament(fx.perturbed_circle(128, 0.05, seed=2), 1e-3, 1000)
    assert run.length_drift <= 1e-4


def test_resampling_is_logged(caplog):
    caplog.set_level("INFO", logger="vortexmem.filament3d")
    run = fl.evolve_filament(fx.perturbed_circle(64), 1e-3, 10, resample_every=5)
    assert run.resample_steps == [5, 10]
    assert "resampled" in caplog.text


def test_unstable_step_warns(caplog):
    caplog.set_level("WARNING", logger="vortexmem.filament3d")
    fl.evolve_filament(fx.circle(512), 1e-3, 1)
    assert "stability" in caplog.text


def test_topology_check_flags_close_approach():
    th = np.linspace(0, 2 * np.pi, 200, endpoint=False)
    # figure-eight-like curve whose lobes almost touch at the origin
    pts = np.stack([np.sin(th), np.sin(th) * np.cos(th), 1e-4 * np.cos(th)], axis=1)
    with pytest.raises(fl.TopologyChangeError, match="topology change suspected"):
        fl.evolve_filament(DiscreteCurve(pts), 1e-6, 1, check_topology=True)


def test_hasimoto_circle_is_one():
    assert np.max(np.abs(fl.hasimoto(fx.circle(64)) - 1.0)) < 1e-10


def test_hasimoto_helix():
    r, p = 1.0, 0.5
    k0, tau0 = r / (r * r + p * p), p / (r * r + p * p)
    h = fx.helix(400, r, p)
    psi = fl.hasimoto(h)
    ds = np.linalg.norm(h.edges(), axis=1)[0]
    s = ds * np.arange(len(psi))
    assert np.allclose(np.abs(psi), k0, rtol=1e-3)
    slope = np.polyfit(s, np.unwrap(np.angle(psi)), 1)[0]
    assert abs(slope / tau0 - 1) < 1e-2
    assert np.angle(psi[0]) == 0.0


def test_hasimoto_flat_point():
    c = DiscreteCurve([[0, 0, 0], [1, 0, 0], [2, 0, 0], [1, 1, 0]])
    with pytest.raises(GeometryError, match="torsion undefined at flat point"):
        fl.hasimoto(c)


@given(st.floats(0.3, 4.0), st.integers(0, 1000))
def test_hasimoto_scaling(lam, seed):
    c = fx.perturbed_circle(64, 0.1, seed=seed)
    psi = fl.hasimoto(c)
    psi_l = fl.hasimoto(c.with_points(lam * c.points))
    assert np.allclose(np.abs(psi_l), np.abs(psi) / lam, rtol=1e-9)
    assert np.allclose(np.angle(psi_l * np.conj(psi)), 0.0, atol=1e-8)
