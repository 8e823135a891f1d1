import json

import pytest

from darkbright.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_pdet_line(capsys):
    code, out, _ = run(capsys, "pdet", "--system", "line:5", "--detector", "2", "--initial", "1", "--json")
    data = json.loads(out)
    assert code == 0 and data["consistent"]
    assert data["p_det_bright_sum"] == pytest.approx(2 / 3, abs=1e-9)
    assert data["dark_dim"] == 1


def test_pdet_text(capsys):
    code, out, _ = run(capsys, "pdet", "--system", "dangling", "--detector", "0")
    assert code == 0 and "0.952380952" in out


def test_json_byte_identical(capsys):
    argv = ("bounds", "--system", "dangling", "--detector", "0", "--initial", "5", "--json")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_bounds_dangling(capsys):
    code, out, _ = run(capsys, "bounds", "--system", "dangling", "--detector", "0", "--initial", "5", "--json")
    data = json.loads(out)
    assert code == 0
    assert data["lower_single"]["s"] == 5
    assert data["lower_single"]["value"] == pytest.approx(1 / 78, abs=1e-9)
    assert data["lower_path_count"]["exact"] == "1/78"
    assert data["sweep"]["saturated"]


def test_bounds_ring_coincide(capsys):
    code, out, _ = run(capsys, "bounds", "--system", "ring:6", "--detector", "0", "--initial", "1")
    assert code == 0 and "lower and upper bounds coincide" in out


def test_bounds_explicit_dark(capsys):
    code, out, _ = run(capsys, "bounds", "--system", "ring:6", "--detector", "0", "--initial", "2",
                       "--dark", "vec:0,1,0,0,0,-1", "--json")
    assert code == 0
    assert json.loads(out)["upper_dark"]["value"] == pytest.approx(0.5, abs=1e-9)


def test_simulate_resonance_warning(capsys):
    code, out, _ = run(capsys, "simulate", "--system", "ring:6", "--detector", "0", "--initial", "1",
                       "--tau", "6.283185307179586")
    assert code == 0 and "resonant" in out


def test_simulate_csv_and_trajectories(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("DARKBRIGHT_OUTPUT_DIR", str(tmp_path))
    code, out, _ = run(capsys, "simulate", "--system", "ring:6", "--detector", "0", "--initial", "1",
                       "--csv", "run.csv", "--trajectories", "200", "--seed", "4", "--json")
    data = json.loads(out)
    assert code == 0 and data["converged"]
    assert abs(data["p_det_estimate"] - 0.5) <= max(1e-3, data["tail_estimate"])
    lines = (tmp_path / "run.csv").read_text().splitlines()
    assert lines[0] == "n,prob,cumulative"
    assert 0 <= data["trajectories"]["detected_fraction"] <= 1


def test_spectrum(capsys):
    code, out, _ = run(capsys, "spectrum", "--system", "ring:6", "--json")
    data = json.loads(out)
    assert code == 0
    assert [lvl["multiplicity"] for lvl in data["levels"]] == [1, 2, 2, 1]


@pytest.mark.parametrize("argv", [
    ("pdet", "--system", "line:0", "--detector", "1"),
    ("pdet", "--system", "line:5", "--detector", "9"),
    ("pdet", "--system", "ring:2", "--detector", "0"),
    ("pdet", "--system", "line:5", "--detector", "1", "--initial", "vec:1,2"),
    ("simulate", "--system", "line:5", "--detector", "1", "--tau", "0"),
])
def test_invalid_input_exit_code(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_graph_json_file(capsys, tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps({"nodes": 3, "edges": [[0, 1], [1, 2]]}))
    code, out, _ = run(capsys, "pdet", "--system", str(p), "--detector", "0", "--initial", "2", "--json")
    assert code == 0 and json.loads(out)["p_det_bright_sum"] == pytest.approx(1, abs=1e-9)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nodes": 3, "edges": [[0, 0]]}))
    code, _, _ = run(capsys, "pdet", "--system", str(bad), "--detector", "0")
    assert code == 2


def test_reproduce_all(capsys, tmp_path):
    code, out, _ = run(capsys, "reproduce", "all", "--out", str(tmp_path))
    assert code == 0 and "MISMATCH" not in out
    for name in ("fig1", "fig2", "fig3", "fig4", "table1", "appendix"):
        assert (tmp_path / f"{name}.json").exists()
    assert (tmp_path / "fig4_uniform.csv").exists()
