import json
import subprocess
import sys

import pytest

from sumset_lab.cli import main
from sumset_lab.intset import format_set, parse_set


def run(*argv):
    return subprocess.run([sys.executable, "-m", "sumset_lab.cli", *argv],
                          capture_output=True, text=True)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_version_mentions_seed_mixing(capsys):
    with pytest.raises(SystemExit) as e:
        main(["--version"])
    assert e.value.code == 0
    assert "splitmix64" in capsys.readouterr().out


def test_sieve(capsys):
    assert main(["sieve", "--limit", "100"]) == 0
    assert len(parse_set(capsys.readouterr().out)) == 25


def test_gen_and_construct(tmp_path, capsys):
    path = str(tmp_path / "d.txt")
    assert main(["gen", "--seed", "3", "--hi", "5000", "-o", path]) == 0
    assert main(["construct", "--mode", "sumset", "-i", path, "--k", "3"]) == 0
    trace = json.loads(capsys.readouterr().out)
    assert trace["format"] == "sumset-lab/construct/1" and trace["k"] == 3
    assert main(["gen", "--kind", "symmetric", "--N", "300", "--seed", "1", "-o", path]) == 0
    assert main(["construct", "--mode", "difference", "-i", path, "--k", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["k"] == 3


def test_decompose_exit_codes(tmp_path, capsys):
    sat = write(tmp_path, "sat.txt", "\n".join(map(str, range(6))) + "\n")
    unsat = write(tmp_path, "unsat.txt", "0\n1\n3\n")
    assert main(["decompose", "-i", sat, "--format", "json"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["status"] == "SAT" and "elapsed" not in body
    assert main(["decompose", "-i", unsat]) == 1
    assert "UNSAT" in capsys.readouterr().out


def test_decompose_budget_exit(tmp_path):
    from sumset_lab.decompose import planted_instance
    from sumset_lab.seeding import SeedStream

    T, _, _ = planted_instance(SeedStream(3))
    path = write(tmp_path, "p.txt", format_set(T))
    assert main(["decompose", "-i", path, "--node-budget", "1"]) == 2
    assert main(["decompose", "-i", path]) == 0
    assert main(["decompose", "-i", path, "--node-budget", "0"]) == 3


def test_decompose_witness_files(tmp_path):
    src = write(tmp_path, "t.txt", "0\n1\n2\n10\n11\n12\n")
    a, b = str(tmp_path / "a.txt"), str(tmp_path / "b.txt")
    assert main(["decompose", "-i", src, "--out-a", a, "--out-b", b, "-o",
                 str(tmp_path / "o.txt")]) == 0
    from sumset_lab.intset import sumset
    A = parse_set(open(a).read())
    B = parse_set(open(b).read())
    assert sumset(A, B).tolist() == [0, 1, 2, 10, 11, 12]


def test_invalid_input_exits_3(tmp_path, capsys):
    assert main(["decompose", "-i", str(tmp_path / "missing.txt")]) == 3
    bad = write(tmp_path, "bad.txt", "1\nx\n3\n")
    assert main(["decompose", "-i", bad]) == 3
    with pytest.raises(SystemExit) as e:
        main(["decompose"])
    assert e.value.code == 3
    with pytest.raises(SystemExit) as e:
        main(["--threads", "0", "sieve", "--limit", "10"])
    assert e.value.code == 3
    spec = write(tmp_path, "s.json", "{not json")
    assert main(["mc", "--spec", spec]) == 3


def test_mc_and_stats(tmp_path, capsys):
    spec = {"model": {"limit": 20000},
            "statistic": {"kind": "close_pair", "k": 500, "H": 2},
            "trials": 5000, "master_seed": 4}
    path = write(tmp_path, "s.json", json.dumps({"experiments": [spec, spec]}))
    assert main(["mc", "--spec", path]) == 0
    body = json.loads(capsys.readouterr().out)
    assert len(body["reports"]) == 2 and body["reports"][0] == body["reports"][1]
    assert main(["stats", "--limit", "20000", "--checkpoints", "1000", "10000"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["verdicts"]["D3"] == "pass"


def test_subprocess_rerun_is_byte_identical(tmp_path):
    args = ["perturb", "--limit", "5000", "--seed", "9"]
    a, b = run(*args), run(*args)
    assert a.returncode == 0 and a.stdout == b.stdout and a.stdout
