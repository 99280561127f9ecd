from __future__ import annotations

import json

import pytest

from dcomplex.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


@pytest.fixture
def square_doc(tmp_path, capsys):
    path = tmp_path / "sq.json"
    code, _ = run(capsys, "generate", "--kind", "square", "--radius", "6", "--output", str(path))
    assert code == 0
    return path


def test_generate_is_byte_stable(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["generate", "--kind", "penrose", "--radius", "4", "--seed", "42", "--output", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_check_passes(square_doc, capsys):
    code, out = run(capsys, "check", "--input", str(square_doc))
    assert code == 0 and json.loads(out.out)["embeddable"]


def test_green_vertex_map(square_doc, capsys):
    code, out = run(capsys, "green", "--input", str(square_doc), "--depth", "3")
    rep = json.loads(out.out)
    assert code == 0
    assert rep["laplacian_defect"] < 1e-10
    assert len(rep["values"]) > 0


def test_power_gamma_out_of_range(capsys):
    code, out = run(capsys, "power", "--gamma", "1.5")
    assert code == 2 and "gamma" in out.err


def test_power_reports_pattern(capsys):
    code, out = run(capsys, "power", "--gamma", "0.3333333333333333", "--radius", "5")
    rep = json.loads(out.out)
    assert code == 0 and rep["pattern"]["center_color"] == "black"


def test_consistency_hirota(capsys):
    code, out = run(capsys, "consistency", "--kind", "hirota", "--trials", "1000")
    assert code == 0 and json.loads(out.out)["max_deviation"] <= 1e-10


def test_check_failure_exit_code(capsys):
    # an impossible tolerance turns a passing check into a failing one
    code, _ = run(capsys, "consistency", "--kind", "cr", "--trials", "50", "--tolerance", "0")
    assert code == 1


def test_usage_errors(tmp_path, capsys):
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "green", "--input", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1, "vertices": [')
    assert run(capsys, "check", "--input", str(bad))[0] == 2


def test_render_layers(square_doc, tmp_path, capsys):
    for layer in ("tiling", "sectors"):
        out = tmp_path / f"{layer}.svg"
        assert run(capsys, "render", "--input", str(square_doc), "--layer", layer, "--output", str(out))[0] == 0
        assert out.read_text().startswith("<svg")
    assert run(capsys, "render", "--input", str(square_doc), "--layer", "pattern")[0] == 2


def test_json_outputs_are_deterministic(square_doc, capsys):
    a = run(capsys, "log", "--input", str(square_doc))[1].out
    b = run(capsys, "log", "--input", str(square_doc))[1].out
    assert a == b


def test_isomonodromy_and_tangent(capsys):
    code, out = run(capsys, "isomonodromy", "--kind", "hirota", "--gamma", "0.3333333333333333", "--depth", "4")
    assert code == 0 and json.loads(out.out)["worst"] < 1e-8
    code, out = run(capsys, "tangent", "--radius", "5")
    assert code == 0
