import json

import numpy as np
import pytest

from vortexmem import __version__
from vortexmem import formats
from vortexmem.cli import Scenario, main

VERSION = f"vortexmem {__version__}"


def _fixture(tmp_path, name, *extra):
    out = tmp_path / f"{name}.txt"
    assert main(["fixture", name, "--out", str(out), *extra]) == 0
    return out


def _json(path):
    return json.loads(path.read_text())


def test_fixture_bytes_are_deterministic(tmp_path):
    a = _fixture(tmp_path, "random_vortices", "--n", "4", "--seed", "5").read_bytes()
    b = _fixture(tmp_path, "random_vortices", "--n", "4", "--seed", "5").read_bytes()
    assert a == b
    c = _fixture(tmp_path, "random_vortices", "--n", "4", "--seed", "6").read_bytes()
    assert a != c


def test_icosphere_fixture(tmp_path):
    path = _fixture(tmp_path, "icosphere4d", "--radius", "1", "--level", "4")
    mem = formats.read_mesh(path)
    assert mem.n_vertices == 2562 and mem.is_closed()
    from vortexmem.geometry import membrane_volume

    assert abs(membrane_volume(mem) / (4 * np.pi) - 1) < 5e-3


def test_circle_fixture_perimeter(tmp_path):
    from vortexmem.geometry import curve_length

    c = formats.read_curve(_fixture(tmp_path, "circle3d", "--vertices", "512"))
    assert np.isclose(curve_length(c), 2 * 512 * np.sin(np.pi / 512), rtol=1e-13)


def test_unknown_fixture_exits_2(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["fixture", "teapot", "--out", str(tmp_path / "x")])
    assert info.value.code == 2


def test_malformed_mesh_exit_2_with_line(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("dim 4\nv 0 0 0 0\nv 1 0 0\n")
    code = main(["analyze", "energy-slope", "--mesh", str(bad), "--out", str(tmp_path / "o.json")])
    err = capsys.readouterr().err
    assert code == 2
    assert "bad.txt:3" in err and "energy.energy_slope" in err


def test_run_invariants(tmp_path):
    out = tmp_path / "inv.json"
    assert main(["run", "invariants", "--fixture", "sphere4d", "--out", str(out)]) == 0
    data = _json(out)
    assert data["version"] == VERSION and data["all_passed"]
    assert all({"name", "value", "tolerance", "passed"} <= set(c) for c in data["checks"])


def test_lia_slope_on_flat_patch_is_not_applicable(tmp_path):
    patch = _fixture(tmp_path, "flatpatch4d")
    out = tmp_path / "lia.json"
    assert main(["run", "lia_slope", "--input", str(patch), "--vertex", "136", "--out", str(out)]) == 0
    data = _json(out)
    assert data["slope_norm"] < 1e-8
    assert data["direction_error_deg"] == "not-applicable"


def test_coarse_mesh_fit_failure_exits_3(tmp_path, capsys):
    mesh = _fixture(tmp_path, "icosphere4d", "--level", "2")
    code = main(["analyze", "lia-slope", "--mesh", str(mesh), "--vertex", "3", "--out", str(tmp_path / "o.json")])
    assert code == 3
    assert "biotsavart.lia_slope: asymptotic regime not reached" in capsys.readouterr().err


def test_unknown_config_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"fixture": "points2d", "out": str(tmp_path / "o.json"), "tolerance": 1}))
    assert main(["run", "invariants", "--config", str(cfg)]) == 2
    assert "unknown scenario keys: tolerance" in capsys.readouterr().err


def test_scenario_validation():
    with pytest.raises(ValueError, match="dt must be positive"):
        Scenario.from_dict({"kind": "points2d", "dt": -1.0})
    with pytest.raises(ValueError, match="unknown scenario kind"):
        Scenario.from_dict({"kind": "teapot"})


def test_simulate_points2d_csv(tmp_path):
    pts = _fixture(tmp_path, "two_vortices")
    out = tmp_path / "traj.csv"
    assert main(["simulate", "points2d", "--input", str(pts), "--dt", "0.01", "--steps", "10", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == f"# {VERSION}" and lines[1] == "t,j,x,y"
    assert len(lines) == 2 + 11 * 2
    diag = (tmp_path / "traj.diagnostics.csv").read_text().splitlines()
    assert diag[1] == "t,H,Px,Py,I" and len(diag) == 2 + 11


def test_simulate_is_byte_reproducible(tmp_path):
    pts = _fixture(tmp_path, "random_vortices", "--seed", "2")
    outs = []
    for k in range(2):
        out = tmp_path / f"t{k}.csv"
        main(["simulate", "points2d", "--input", str(pts), "--dt", "0.001", "--steps", "20", "--out", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_simulate_filament_ndjson(tmp_path):
    c = _fixture(tmp_path, "circle3d", "--vertices", "64")
    out = tmp_path / "f.ndjson"
    assert main(["simulate", "filament3d", "--input", str(c), "--dt", "1e-3", "--steps", "5", "--out", str(out)]) == 0
    recs = [json.loads(line) for line in out.read_text().splitlines()]
    assert recs[0]["record"] == "meta" and recs[0]["version"] == VERSION
    assert recs[-1]["record"] == "summary" and recs[-1]["length_drift"] < 1e-10
    assert abs(np.mean(np.array(recs[-2]["vertices"])[:, 2]) - 5e-3) < 1e-4


def test_simulate_membrane_and_sheet_family(tmp_path):
    m = _fixture(tmp_path, "icosphere4d", "--level", "1")
    out = tmp_path / "m.ndjson"
    assert main(["simulate", "membrane", "--input", str(m), "--dt", "1e-3", "--steps", "3", "--out", str(out)]) == 0
    assert json.loads(out.read_text().splitlines()[-1])["record"] == "summary"
    fib = _fixture(tmp_path, "cylinder_fibration", "--n", "3", "--vertices", "32")
    out2 = tmp_path / "s.ndjson"
    assert main(["simulate", "sheet-family", "--input", str(fib), "--dt", "1e-3", "--steps", "3", "--out", str(out2)]) == 0
    assert json.loads(out2.read_text().splitlines()[-1])["H_drift"] < 1e-6


def test_evaluate_mw_circle(tmp_path):
    c = _fixture(tmp_path, "circle3d", "--vertices", "512")
    V, W = tmp_path / "V.txt", tmp_path / "W.txt"
    V.write_text("0 0 1\n")
    np.savetxt(W, formats.read_curve(c).points, fmt="%.17g")
    out = tmp_path / "mw.json"
    assert main(["evaluate", "mw", "--input", str(c), "--v-field", str(V), "--w-field", str(W), "--out", str(out)]) == 0
    data = _json(out)
    assert abs(data["value"] - 2 * np.pi) < 1e-3 and data["version"] == VERSION


def test_evaluate_field_shape_error(tmp_path, capsys):
    c = _fixture(tmp_path, "circle3d", "--vertices", "16")
    V = tmp_path / "V.txt"
    V.write_text("0 0 1\n1 0 0\n")
    code = main(["evaluate", "mw", "--input", str(c), "--v-field", str(V), "--w-field", str(V),
                 "--out", str(tmp_path / "o.json")])
    assert code == 2 and "symplectic.mw" in capsys.readouterr().err


def test_evaluate_pairing_sheet(tmp_path):
    sheet = _fixture(tmp_path, "sphere_band_sheet", "--width", "0.3", "--level", "2")
    V = tmp_path / "V.txt"
    V.write_text("0 0 1\n")
    out = tmp_path / "p.json"
    assert main(["evaluate", "pairing", "--input", str(sheet), "--v-field", str(V), "--out", str(out)]) == 0
    assert np.isfinite(_json(out)["value"])


def test_acceptance_command(tmp_path, capsys):
    out = tmp_path / "acc.json"
    assert main(["acceptance", "2", "--out", str(out)]) == 0
    assert "criterion  2 PASS" in capsys.readouterr().out
    assert _json(out)["criteria"][0]["passed"]


def test_acceptance_failure_exits_3(tmp_path, monkeypatch, capsys):
    from vortexmem import acceptance

    def broken():
        r = acceptance.Result(2, "forced")
        r.at_most("x", 1.0, 0.5)
        return r

    monkeypatch.setitem(acceptance.CRITERIA, 2, broken)
    assert main(["acceptance", "2", "--out", str(tmp_path / "a.json")]) == 3
    assert "FAIL" in capsys.readouterr().out
