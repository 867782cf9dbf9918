"""Command-line interface: subcommands, exit codes, determinism.

Core claims:
    - exit codes encode the outcome: 0 smooth/ok, 1 input error, 2 a
      singularity was found
    - analyze reproduces the worked example through the JSON surface
    - unload is the identity on consistent input
    - cartier emits the expected cluster and a passing certificate
    - outputs are byte-identical across runs and re-parse
"""

import json

import pytest

from sandwiched.cli import main

D1 = "cluster d1 { O ; p1 -> O ; q1 -> p1 }\nweights d1 { O=1 p1=1 q1=1 }\n"


@pytest.fixture
def d1_file(tmp_path):
    path = tmp_path / "d1.cluster"
    path.write_text(D1, encoding="utf-8")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_validate_ok(d1_file, capsys):
    code, out, _ = run(capsys, "validate", d1_file)
    assert code == 0
    assert "d1: ok (3 points)" in out


def test_validate_reports_diagnostics(tmp_path, capsys):
    path = tmp_path / "bad.cluster"
    path.write_text("cluster bad { O ; p1 -> O ; p2 -> p1 ; w -> p2, O }\n", encoding="utf-8")
    code, out, err = run(capsys, "validate", str(path))
    assert code == 1
    assert "satellite-inheritance" in out


def test_operational_commands_reject_invalid_structure(tmp_path, capsys):
    path = tmp_path / "bad.cluster"
    path.write_text("cluster bad { O ; p1 -> O ; p2 -> p1 ; w -> p2, O }\n", encoding="utf-8")
    code, _, err = run(capsys, "unload", str(path))
    assert code == 1
    assert "satellite-inheritance" in err


def test_parse_error_exit_code(tmp_path, capsys):
    path = tmp_path / "syntax.cluster"
    path.write_text("cluster x { O ; p1 -> nowhere }\n", encoding="utf-8")
    code, _, err = run(capsys, "validate", str(path))
    assert code == 1
    assert "line 1" in err and "column" in err


def test_analyze_satellite_json(d1_file, capsys):
    code, out, _ = run(capsys, "analyze", d1_file, "--at", "sat:O,p1", "--format", "json")
    assert code == 2  # singular found
    payload = json.loads(out)
    assert payload["mult"] == 2
    assert payload["emdim"] == 3
    assert payload["br"] == 2
    assert payload["minimal"] is True


def test_analyze_smooth_exit_zero(d1_file, capsys):
    code, out, _ = run(capsys, "analyze", d1_file, "--at", "free:q1")
    assert code == 0
    assert json.loads(out)["smooth"] is True


def test_analyze_component_selector(d1_file, capsys):
    code, out, _ = run(capsys, "analyze", d1_file, "--at", "c0")
    assert code == 2
    assert json.loads(out)["T_Q"] == ["O", "p1"]


def test_analyze_dot_resolution_graph(d1_file, capsys):
    code, out, _ = run(capsys, "analyze", d1_file, "--at", "c0", "--format", "dot")
    assert code == 2
    assert '"O" [label="O (2)"];' in out


def test_singularities_json(d1_file, capsys):
    code, out, _ = run(capsys, "singularities", d1_file)
    assert code == 2
    payload = json.loads(out)
    assert len(payload["singularities"]) == 1


def test_singularities_smooth_surface(tmp_path, capsys):
    path = tmp_path / "s.cluster"
    path.write_text("cluster s { O }\nweights s { O=1 }\n", encoding="utf-8")
    code, out, _ = run(capsys, "singularities", str(path))
    assert code == 0
    assert json.loads(out)["singularities"] == []


def test_unload_fixed_point(d1_file, capsys):
    code, out, _ = run(capsys, "unload", d1_file)
    assert code == 0
    assert out == D1


def test_unload_json_trace(tmp_path, capsys):
    path = tmp_path / "i.cluster"
    path.write_text(
        "cluster i { O ; p1 -> O ; q1 -> p1 ; w -> p1, O }\n"
        "weights i { O=1 p1=1 q1=1 w=1 }\n",
        encoding="utf-8",
    )
    code, out, _ = run(capsys, "unload", str(path), "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["nu"] == {"O": 2, "p1": 1, "q1": 0, "w": 0}
    assert [s["point"] for s in payload["steps"]] == ["O", "p1", "w"]
    assert all(s["tame"] for s in payload["steps"])


def test_cartier_emits_cluster_and_certificate(d1_file, tmp_path, capsys):
    out_path = tmp_path / "t.cluster"
    code, out, _ = run(
        capsys,
        "cartier", d1_file, "--at", "c0", "--alpha", "q1=2",
        "--emit-cluster", str(out_path),
    )
    assert code == 0
    certificate = json.loads(out)
    assert certificate["passed"] is True
    assert certificate["readout"] == {"q1": 2}
    emitted = out_path.read_text(encoding="utf-8")
    assert "O=3 p1=2 q1=1" in emitted
    code2, out2, _ = run(capsys, "validate", str(out_path))
    assert code2 == 0


def test_synthesize(tmp_path, capsys):
    graph = tmp_path / "a1.graph"
    graph.write_text("weight a=2\n", encoding="utf-8")
    code, out, _ = run(capsys, "synthesize", str(graph))
    assert code == 0
    assert "cluster synthesized { O ; u -> O ; a -> u, O ; a_e0 -> a }" in out
    payload = json.loads(out.split("\n", 2)[2])
    assert payload["mult"] == 2
    assert len(payload["Kplus_Q"]) == 3


def test_export_views(d1_file, capsys):
    code, out, _ = run(capsys, "export", d1_file, "--view", "enriques")
    assert code == 0 and "graph \"enriques_d1\"" in out
    code, out, _ = run(capsys, "export", d1_file, "--view", "dual")
    assert code == 0 and "(2)" in out
    code, out, _ = run(capsys, "export", d1_file, "--format", "json")
    assert code == 0 and json.loads(out)["schema"] == 1
    code, out, _ = run(capsys, "export", d1_file, "--format", "dsl")
    assert code == 0 and out == D1


def test_byte_identical_runs(d1_file, capsys):
    _, first, _ = run(capsys, "analyze", d1_file, "--at", "sat:O,p1")
    _, second, _ = run(capsys, "analyze", d1_file, "--at", "sat:O,p1")
    assert first == second


def test_selftest_runs(capsys):
    code, out, _ = run(capsys, "selftest", "--seed", "5", "--clusters", "25")
    assert code == 0
    assert "selftest seed=5" in out


def test_missing_name_on_multi_cluster_file(tmp_path, capsys):
    path = tmp_path / "two.cluster"
    path.write_text("cluster a { O }\ncluster b { O }\n", encoding="utf-8")
    code, _, err = run(capsys, "validate", str(path))
    assert code == 0  # validate checks all clusters
    code, _, err = run(capsys, "unload", str(path))
    assert code == 1
    assert "--name" in err
    code, out, _ = run(capsys, "unload", str(path), "--name", "a")
    assert code == 0


def test_cartier_seed_point_flag(d1_file, capsys):
    code, out, _ = run(
        capsys, "cartier", d1_file, "--at", "c0", "--alpha", "q1=2",
        "--seed-point", "p1",
    )
    assert code == 0
    assert json.loads(out.split("\n", 2)[2])["passed"] is True


def test_singularities_dot_output(d1_file, capsys):
    code, out, _ = run(capsys, "singularities", d1_file, "--format", "dot")
    assert code == 2
    assert 'graph "dual_d1_c0"' in out
