from __future__ import annotations

import json
import subprocess
import sys

import pytest

from transversal.cli import main, strip_timing
from transversal.core import OrientationPattern, RainbowEmbedding, Tournament, validate_embedding
from transversal.instances import InstanceFile, InstanceFormatError
from transversal.rng import generate_collection


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.startswith("{") else out)


# ---------------------------------------------------------------------------
# instance files


def test_instance_round_trip_bytes():
    coll = generate_collection(6, 5, 1)
    text = InstanceFile.from_collection(coll).dumps()
    assert InstanceFile.loads(text).dumps() == text
    assert InstanceFile.loads(text).to_collection() == coll
    assert text.startswith("transversal-instance 1\nn 6\nm 5\ncolor 0\n011100\n")


def test_instance_labels_and_file(tmp_path):
    coll = generate_collection(3, 2, 9)
    inst = InstanceFile.from_collection(coll, ["a", "b", "c"])
    path = tmp_path / "x.txt"
    inst.write(path)
    assert InstanceFile.read(path) == inst


@pytest.mark.parametrize("text", [
    "",
    "transversal-instance 2\nn 2\nm 1\ncolor 0\n01\n00\n",
    "transversal-instance 1\nn 2\nm 1\ncolor 0\n01\n",
    "transversal-instance 1\nn 2\nm 1\ncolor 0\n01\n10\n",  # both arcs
    "transversal-instance 1\nn 2\nm 1\ncolor 0\n01\n00\nextra\n",
    "transversal-instance 1\nn 2\nm 1\ncolour 0\n01\n00\n",
])
def test_instance_format_errors(text):
    with pytest.raises(InstanceFormatError):
        InstanceFile.loads(text)


# ---------------------------------------------------------------------------
# verbs


def test_gen_models(capsys, tmp_path):
    assert main(["gen", "--n", "7", "--m", "2", "--model", "qr"]) == 0
    coll = InstanceFile.loads(capsys.readouterr().out).to_collection()
    assert all(t == Tournament.quadratic_residue(7) for t in coll.members)
    assert main(["gen", "--n", "4", "--m", "3", "--model", "transitive"]) == 0
    coll = InstanceFile.loads(capsys.readouterr().out).to_collection()
    assert all(t == Tournament.transitive(4) for t in coll.members)
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    main(["gen", "--n", "6", "--m", "5", "--seed", "1", "--out", str(a)])
    main(["gen", "--n", "6", "--m", "5", "--seed", "1", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    assert main(["gen", "--n", "0"]) == 2


def test_solve_found_revalidates(capsys, tmp_path):
    path = tmp_path / "two.txt"
    path.write_text("transversal-instance 1\nn 2\nm 1\ncolor 0\n01\n00\n")
    code, rep = run(capsys, "solve", "--instance", str(path), "--pattern", "+")
    assert code == 0 and rep["result"]["status"] == "found"
    emb = rep["result"]["embedding"]
    assert emb["vertices"] == [0, 1]
    coll = InstanceFile.read(path).to_collection()
    p = OrientationPattern.parse(emb["pattern"])
    assert validate_embedding(coll, p, RainbowEmbedding(emb["vertices"], emb["colors"], p)).ok


def test_solve_transitive_cycle_none(capsys):
    code, rep = run(capsys, "solve", "--n", "3", "--model", "transitive", "--pattern", "+++@")
    assert code == 0
    assert rep["result"]["status"] == "none" and rep["result"]["oracle_confirmed"] is True


def test_sweep_matches_oracle(capsys):
    code, rep = run(capsys, "sweep", "--n", "6", "--seed", "4")
    assert code == 0 and rep["result"]["oracle_checked"]
    assert rep["result"]["oracle_disagreements"] == []
    assert rep["result"]["summary"]["total"] == 32


def test_exit_codes(capsys):
    assert run(capsys, "solve", "--n", "4", "--pattern", "+-+-+")[0] == 2
    assert run(capsys, "solve", "--n", "14", "--pattern", "+-+")[0] == 3
    assert main(["verify", "--suite", "nope"]) == 2
    capsys.readouterr()
    assert main(["bogus"]) == 2
    capsys.readouterr()
    code, rep = run(capsys, "solve", "--n", "14", "--m", "14", "--model", "transitive",
                    "--pattern", "+" * 14 + "@", "--cap", "20", "--time-budget", "0.000001")
    assert code == 3 and rep["status"] == "timeout"


def test_verify_patterns(capsys):
    code, rep = run(capsys, "verify", "--suite", "patterns", "--max-length", "8")
    assert code == 0 and rep["result"]["ok"] and rep["result"]["violations"] == []
    assert rep["result"]["checks"]["do-valid"] == 2 ** 9 - 1


def test_hunt_empty_and_hits(capsys, tmp_path):
    code, rep = run(capsys, "hunt", "--trials", "0")
    assert code == 0 and rep["result"]["data"]["hits"] == []
    code, rep = run(capsys, "hunt", "--n-min", "3", "--n-max", "3", "--trials", "60",
                    "--hits-dir", str(tmp_path))
    assert code == 0
    hits = rep["result"]["data"]["hits"]
    assert len(list(tmp_path.iterdir())) == len(hits)
    for hit in hits:
        assert not OrientationPattern.parse(hit["pattern"]).is_directed()


def test_other_verbs(capsys):
    code, rep = run(capsys, "decompose", "--pattern", "+++-+--")
    assert code == 0 and [p["signs"] for p in rep["result"]["pieces"]] == ["++", "+-+--"]
    code, rep = run(capsys, "median", "--n", "8", "--seed", "2")
    assert code == 0 and rep["result"]["exact"] and rep["result"]["interval_properties"]["ok"]
    code, rep = run(capsys, "hpartition", "--n", "60", "--ell", "10", "--seed", "3")
    assert code == 0 and all(len(b) <= 10 for b in rep["result"]["partition"]["blocks"])
    code, rep = run(capsys, "broom", "--op", "directed", "--n", "40", "--ell", "3", "--s1", "2", "--s2", "3")
    assert code == 0 and len(rep["result"]["broom"]["end_tips"]) == 3
    code, rep = run(capsys, "broom", "--op", "short", "--n", "9", "--pattern=-+")
    assert code == 0
    code, rep = run(capsys, "broom", "--op", "chain", "--n", "1004", "--pattern", "+-+-")
    assert code == 0 and rep["result"]["ok"]


def test_reports_are_reproducible(capsys, tmp_path):
    argv = ["sweep", "--n", "5", "--seed", "8", "--kind", "cycle"]
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    assert strip_timing(first) == strip_timing(second)
    assert first["digest"] == second["digest"]
    out = tmp_path / "r.json"
    main(argv + ["--out", str(out)])
    capsys.readouterr()
    assert strip_timing(json.loads(out.read_text())) == strip_timing(first)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "transversal", "decompose", "--pattern", "+-"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["pieces"][1]["signs"] == "+-"
