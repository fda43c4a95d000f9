"""Round trips for the JSON formats and end-to-end runs of the command line."""

import json
import os
import subprocess
import sys

import pytest

from qtlab import DisconnectedGraph, FormatError
from qtlab.cli import main
from qtlab.constructions import cayley_graph, grid_graph, path_graph
from qtlab.group_action import GroupAction, Word, evaluate_word
from qtlab.io import (
    action_from_dict,
    action_to_dict,
    graph_from_dict,
    graph_to_dict,
    load_action,
    load_graph,
    save_action,
    save_graph,
)
from qtlab.metric_graph import MetricGraph


# ---------------------------------------------------------------------------
# file formats


def test_graph_round_trip(tmp_path):
    g = grid_graph(3, 4)
    path = tmp_path / "g.json"
    save_graph(g, str(path))
    h = load_graph(str(path))
    assert h.vertex_ids == g.vertex_ids
    assert sorted(h.edge_pairs) == sorted(g.edge_pairs)


def test_graph_round_trip_keeps_boundary():
    con = cayley_graph("Z", 4)
    d = graph_to_dict(con.graph)
    h = graph_from_dict(d)
    assert sorted(h.boundary) == sorted(con.graph.boundary)


def test_action_round_trip_inline(tmp_path):
    con = cayley_graph("Z", 5)
    path = tmp_path / "a.json"
    save_action(con.action, str(path))
    a = load_action(str(path))
    assert a.mode == con.action.mode
    assert evaluate_word(a, Word.parse("s^2"), "0") == "2"


def test_action_round_trip_with_graph_ref(tmp_path):
    con = cayley_graph("Z", 5)
    save_graph(con.action.space, str(tmp_path / "g.json"))
    save_action(con.action, str(tmp_path / "a.json"), graph_ref="g.json")
    # the reference resolves relative to the action file
    raw = json.loads((tmp_path / "a.json").read_text())
    assert raw["graph"] == "g.json"
    a = load_action(str(tmp_path / "a.json"))
    assert evaluate_word(a, Word.parse("s^-1"), "0") == "-1"


def test_graph_from_dict_rejects_wrong_format():
    with pytest.raises(FormatError):
        graph_from_dict({"format": "something-else", "vertices": [], "edges": []})


def test_graph_from_dict_rejects_missing_fields():
    with pytest.raises(FormatError):
        graph_from_dict({"format": "qtlab-graph-v1", "vertices": ["a"]})


def test_action_from_dict_rejects_bad_generator():
    g = path_graph(3)
    d = action_to_dict(GroupAction(g, [("e", {v: v for v in g.vertex_ids})]))
    d["generators"][0]["map"] = [["v0", "v1"], ["v2", "v1"]]
    with pytest.raises(FormatError):
        action_from_dict(d)


def test_disconnected_graph_needs_opt_in(tmp_path):
    d = {"format": "qtlab-graph-v1", "vertices": ["a", "b", "c"], "edges": [["a", "b"]]}
    with pytest.raises(DisconnectedGraph):
        graph_from_dict(d)
    g = graph_from_dict(d, allow_disconnected=True)
    assert g.n == 3


# ---------------------------------------------------------------------------
# command line, in process


def run_cli(capsys, argv):
    rc = main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def test_construct_and_analyze(tmp_path, capsys):
    out = tmp_path / "c8.json"
    rc, stdout, _ = run_cli(capsys, [
        "construct", "cycle", "--params", '{"n": 8}', "--out", str(out)])
    assert rc == 0
    rep = json.loads(stdout)
    assert sorted(rep) == ["command", "determinism_seed", "inputs", "results", "version"]
    assert rep["results"]["written"]["graph"] == str(out)
    assert json.loads(out.read_text())["format"] == "qtlab-graph-v1"

    rc, stdout, _ = run_cli(capsys, ["analyze", "--graph", str(out)])
    assert rc == 0
    res = json.loads(stdout)["results"]
    assert res["two_delta"] == 4
    assert res["delta"] == "2"
    assert res["bottleneck_constant"] == 2
    assert res["is_tree"] is False


def test_orbit_report(tmp_path, capsys):
    act = tmp_path / "z.action.json"
    rc, _, _ = run_cli(capsys, [
        "construct", "cayley", "--params", '{"family": "Z", "radius": 6}',
        "--action-out", str(act)])
    assert rc == 0
    rc, stdout, _ = run_cli(capsys, [
        "orbit", "--action", str(act), "--basepoint", "0", "--horizon", "5"])
    assert rc == 0
    res = json.loads(stdout)["results"]
    assert res["size"] == 11
    assert res["ball_counts"] == [1, 3, 5, 7, 9, 11]
    assert res["complete"] is True
    assert res["sample"][:3] == ["0", "1", "-1"]


def test_classify_word_via_cli(tmp_path, capsys):
    act = tmp_path / "z.action.json"
    run_cli(capsys, ["construct", "cayley", "--params", '{"family": "Z", "radius": 8}',
                     "--action-out", str(act)])
    rc, stdout, _ = run_cli(capsys, [
        "classify", "--action", str(act), "--basepoint", "0",
        "--word", "s", "--horizon", "8"])
    assert rc == 0
    res = json.loads(stdout)["results"]
    assert res["verdict"] == "Loxodromic"
    assert res["tau_lower"] == "1"


def test_properness_csv_table(tmp_path, capsys):
    act = tmp_path / "z.action.json"
    run_cli(capsys, ["construct", "cayley", "--params", '{"family": "Z", "radius": 6}',
                     "--action-out", str(act)])
    rc, stdout, _ = run_cli(capsys, [
        "properness", "--action", str(act), "--horizon", "4", "--format", "csv"])
    assert rc == 0
    lines = stdout.strip().splitlines()
    assert lines[0] == "table,epsilon_or_r,R,count"
    assert len(lines) > 5


def test_csv_refused_for_non_tables(tmp_path, capsys):
    g = tmp_path / "g.json"
    run_cli(capsys, ["construct", "path", "--params", '{"n": 4}', "--out", str(g)])
    rc, _, stderr = run_cli(capsys, ["analyze", "--graph", str(g), "--format", "csv"])
    assert rc == 2
    assert json.loads(stderr)["error"]["type"] == "FormatError"


def test_missing_file_is_a_clean_error(capsys):
    rc, _, stderr = run_cli(capsys, ["analyze", "--graph", "/no/such/file.json"])
    assert rc == 2
    assert json.loads(stderr)["error"]["type"] == "FileError"


def test_invalid_json_is_a_clean_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("not json{{")
    rc, _, stderr = run_cli(capsys, ["analyze", "--graph", str(bad)])
    assert rc == 2
    assert json.loads(stderr)["error"]["type"] == "FormatError"


def test_size_cap_exit_code(tmp_path, capsys):
    g = tmp_path / "g.json"
    run_cli(capsys, ["construct", "cycle", "--params", '{"n": 8}', "--out", str(g)])
    rc, _, stderr = run_cli(capsys, ["--max-vertices", "5", "analyze", "--graph", str(g)])
    assert rc == 3
    assert json.loads(stderr)["error"]["type"] == "SizeLimitExceeded"


def test_size_cap_does_not_leak_between_runs(tmp_path, capsys):
    g = tmp_path / "g.json"
    run_cli(capsys, ["construct", "cycle", "--params", '{"n": 8}', "--out", str(g)])
    rc, _, _ = run_cli(capsys, ["--max-vertices", "5", "analyze", "--graph", str(g)])
    assert rc == 3
    assert "QTLAB_MAX_VERTICES" not in os.environ
    rc, _, _ = run_cli(capsys, ["analyze", "--graph", str(g)])
    assert rc == 0


def test_unknown_fixture_name(capsys):
    rc, _, stderr = run_cli(capsys, ["fixtures", "no-such-fixture"])
    assert rc == 2
    assert "no-such-fixture" in json.loads(stderr)["error"]["message"]


def test_fixture_bundle(tmp_path, capsys):
    rc, stdout, _ = run_cli(capsys, ["fixtures", "doubleline-n16", "--out", str(tmp_path)])
    assert rc == 0
    res = json.loads(stdout)["results"]
    assert res["n_vertices"] == 66
    manifest = json.loads((tmp_path / "doubleline-n16.manifest.json").read_text())
    assert manifest["basepoint"] == "(0,1)"
    assert manifest["n_edges"] == 128
    assert manifest["connectivity_radius"] == 2
    # the bundled files load under the reference formats
    g = load_graph(str(tmp_path / "doubleline-n16.graph.json"))
    assert g.n == 66
    a = load_action(str(tmp_path / "doubleline-n16.action.json"))
    assert evaluate_word(a, Word.parse("s"), "(0,1)") == "(1,1)"


def test_fixture_listing(capsys):
    rc, stdout, _ = run_cli(capsys, ["fixtures", "list"])
    assert rc == 0
    names = json.loads(stdout)["results"]["available"]
    assert "bs12-r8" in names and "farey-Q20" in names
    assert names == sorted(names)


def test_lm_exponents_cli(capsys):
    rc, stdout, _ = run_cli(capsys, ["lm", "exponents", "--n", "3"])
    assert rc == 0
    res = json.loads(stdout)["results"]
    assert (res["alpha"], res["beta"]) == (-117, 44)
    assert res["gaussian"]["congruent_mod5"] is True
    assert res["norm_identity"] is True


def test_lm_obstruction_cli(capsys):
    rc, stdout, _ = run_cli(capsys, ["lm", "obstruction", "--k-max", "5"])
    assert rc == 0
    res = json.loads(stdout)["results"]
    assert res["all_obstructed"] is True
    assert res["unobstructed_k"] == []
    assert res["first_rows"][0]["det_plus"] == 20


def test_lm_fit_cli(tmp_path, capsys):
    samples = tmp_path / "samples.json"
    samples.write_text(json.dumps(
        {"samples": [[[1, 0], "3/2"], [[0, 1], "2"], [[1, 1], "7/2"], [[2, 1], "5"]]}))
    rc, stdout, _ = run_cli(capsys, ["lm", "fit", "--samples", str(samples)])
    assert rc == 0
    res = json.loads(stdout)["results"]
    assert (res["x"], res["y"]) == ("3/2", "2")
    assert res["residual"] == "0"
    assert res["audit"]["passed"] is True


def test_product_distance_and_geodesics_cli(tmp_path, capsys):
    g = tmp_path / "c8.json"
    run_cli(capsys, ["construct", "cycle", "--params", '{"n": 8}', "--out", str(g)])
    rc, stdout, _ = run_cli(capsys, [
        "product", "distance", "--factors", str(g), str(g),
        "--x", '["v0","v1"]', "--y", '["v2","v3"]'])
    assert rc == 0
    assert json.loads(stdout)["results"]["exact"] == 4
    rc, stdout, _ = run_cli(capsys, [
        "product", "geodesics", "--factors", str(g), str(g),
        "--x", '["v0","v0"]', "--y", '["v2","v2"]'])
    assert rc == 0
    res = json.loads(stdout)["results"]
    assert res["geodesic_count"] == 6
    assert res["passed"] is True


def test_product_factor_check_cli(tmp_path, capsys):
    g = tmp_path / "p3.json"
    run_cli(capsys, ["construct", "path", "--params", '{"n": 3}', "--out", str(g)])
    pairs = [[["v%d" % i, "v%d" % j], ["v%d" % j, "v%d" % i]]
             for i in range(3) for j in range(3)]
    mp = tmp_path / "swap.json"
    mp.write_text(json.dumps({"mapping": pairs}))
    rc, stdout, _ = run_cli(capsys, [
        "product", "factor-check", "--factors", str(g), str(g), "--map", str(mp)])
    assert rc == 0
    res = json.loads(stdout)["results"]
    assert res["is_isometry"] is True
    assert res["permutation"] == [1, 0]


def test_product_distortion_cli_csv(tmp_path, capsys):
    act = tmp_path / "z.action.json"
    run_cli(capsys, ["construct", "cayley", "--params", '{"family": "Z", "radius": 6}',
                     "--action-out", str(act)])
    rc, stdout, _ = run_cli(capsys, [
        "product", "distortion", "--factors", str(act), str(act),
        "--horizon", "4", "--format", "csv"])
    assert rc == 0
    lines = stdout.strip().splitlines()
    assert lines[0] == "n,raw,envelope,witness"
    assert lines[1] == "1,1,1,f0_s"


# ---------------------------------------------------------------------------
# command line, through a real process


def test_reports_are_byte_deterministic(tmp_path):
    cmd = [sys.executable, "-m", "qtlab.cli", "construct", "grid",
           "--params", '{"m": 3, "n": 3}']
    a = subprocess.run(cmd, capture_output=True, cwd=str(tmp_path))
    b = subprocess.run(cmd, capture_output=True, cwd=str(tmp_path))
    assert a.returncode == 0 and b.returncode == 0
    assert a.stdout == b.stdout


def test_console_entry_reports_errors_on_stderr(tmp_path):
    cmd = [sys.executable, "-m", "qtlab.cli", "analyze", "--graph", "missing.json"]
    r = subprocess.run(cmd, capture_output=True, cwd=str(tmp_path), text=True)
    assert r.returncode == 2
    assert r.stdout == ""
    assert json.loads(r.stderr)["error"]["type"] == "FileError"
