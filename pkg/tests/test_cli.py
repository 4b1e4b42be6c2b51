import json
import subprocess
import sys

import pytest

from plabic_louise import cli
from plabic_louise import quiver as qv


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_quiver(tmp_path, name, Q):
    p = tmp_path / name
    p.write_text(json.dumps(Q.to_json()))
    return str(p)


def test_diagram_figure(capsys):
    code, out, _ = run(capsys, "diagram", "--window", "4,6,5,7,8,9", "--labels", "target")
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == "v1"
    assert len(data["faces"]) == 9
    bnd = {f["id"] for f in data["faces"] if f["boundary"]}
    inner = {f["id"] for f in data["faces"] if not f["boundary"]}
    assert bnd == {"{1,2,3}", "{2,3,4}", "{3,4,6}", "{4,5,6}", "{1,5,6}", "{1,2,6}"}
    assert inner == {"{1,3,4}", "{1,3,6}", "{3,5,6}"}
    assert len(data["quiver"]["arrows"]) == 12


def test_diagram_source_labels(capsys):
    code, out, _ = run(capsys, "diagram", "--window", "4,6,5,7,8,9", "--labels", "source")
    data = json.loads(out)
    assert code == 0 and data["labels"] == "source"
    assert {v["id"] for v in data["quiver"]["vertices"]} == {f["id"] for f in data["faces"]}


def test_diagram_top_cell_and_dot(capsys):
    code, out, _ = run(capsys, "diagram", "--top-cell", "3,6")
    assert json.loads(out)["permutation"]["window"] == [4, 5, 6, 7, 8, 9]
    code, out, _ = run(capsys, "diagram", "--top-cell", "3,6", "--format", "dot")
    assert code == 0 and out.startswith('digraph "Q"')


def test_diagram_deterministic(capsys):
    a = run(capsys, "diagram", "--window", "3,8,7,6,11,10,9,14,13")[1]
    b = run(capsys, "diagram", "--window", "3,8,7,6,11,10,9,14,13")[1]
    assert a == b


@pytest.mark.parametrize("argv, name", [
    (["diagram", "--window", "3,8,7,6,2,10,9,14,13"], "BoundsViolation"),
    (["diagram", "--window", "2,2"], "NotBijective"),
    (["diagram", "--window", "1,x"], "AffinePermError"),
    (["diagram"], "InvalidInput"),
    (["diagram", "--window", "1", "--top-cell", "0,1"], "InvalidInput"),
    (["diagram", "--top-cell", "7,6"], "InvalidInput"),
    (["sweep", "5", "4"], "InvalidInput"),
])
def test_invalid_input(capsys, argv, name):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith(name + ":")


def test_bad_flag_is_invalid_input(capsys):
    assert run(capsys, "diagram", "--labels", "nope")[0] == 2
    assert run(capsys, "banff", "x.json", "--depth", "0")[0] == 2


def test_certify_verify(capsys, tmp_path):
    out_file = tmp_path / "cert.json"
    code, _, _ = run(capsys, "certify", "--window", "4,6,5,7,8,9", "--out", str(out_file))
    assert code == 0
    data = json.loads(out_file.read_text())
    assert data["schema"] == "v1" and data["case"] == "BridgeCover"
    code, out, _ = run(capsys, "verify", str(out_file))
    assert code == 0 and json.loads(out)["ok"]
    data["children"][1]["case"] = "Lollipop"
    out_file.write_text(json.dumps(data))
    code, out, err = run(capsys, "verify", str(out_file))
    assert code == 1
    assert "root/1" in err


def test_verify_missing_and_garbage(capsys, tmp_path):
    assert run(capsys, "verify", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "verify", str(bad))[0] == 2


def test_banff(capsys, tmp_path):
    path = write_quiver(tmp_path, "markov.json", qv.markov())
    code, out, _ = run(capsys, "banff", path)
    data = json.loads(out)
    assert code == 0 and data["certificate"] is None and data["class_size"] == 1
    path = write_quiver(tmp_path, "c3.json", qv.directed_cycle(3))
    data = json.loads(run(capsys, "banff", path)[1])
    assert data["result"] == "FOUND" and data["certificate"]["tag"] == "MutateStep"
    code, _, err = run(capsys, "banff", path, "--depth", "1", "--class-limit", "1")
    assert code == 3 and err.startswith("LimitExceeded")


def test_explore(capsys, tmp_path):
    path = write_quiver(tmp_path, "c3.json", qv.directed_cycle(3))
    code, out, _ = run(capsys, "explore", path)
    data = json.loads(out)
    assert code == 0
    assert {k: data[k] for k in ("variables", "seeds", "acyclic_seeds")} == {
        "variables": 9, "seeds": 14, "acyclic_seeds": 12}
    path = write_quiver(tmp_path, "markov.json", qv.markov())
    assert run(capsys, "explore", path, "--seed-limit", "100")[0] == 3


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "1", "4")
    data = json.loads(out)
    assert code == 0
    assert data["total"] == data["passed"] == 15 and data["failed"] == 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "plabic_louise", "diagram", "--window", "3,8,7,6,2,10,9,14,13"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2 and "BoundsViolation" in proc.stderr
    proc = subprocess.run([sys.executable, "-m", "plabic_louise", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for flag in ("diagram", "certify", "verify", "banff", "explore", "sweep"):
        assert flag in proc.stdout
