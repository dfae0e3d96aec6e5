import json
import subprocess
import sys

import pytest

from rosmatch.cli import main


def cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def c5(tmp_path, capsys):
    path = tmp_path / "c5.txt"
    assert cli(capsys, "gen", "--kind", "cycle", "--n", "5", "--out", str(path))[0] == 0
    return path


def test_gen_cycle(c5):
    assert c5.read_text().splitlines()[0] == "5 5"


def test_run_cycle(capsys, c5):
    code, out, _ = cli(
        capsys, "run", "--input", str(c5), "--epsilon", "0.3", "--beta", "16",
        "--lambda", "0.1", "--seed", "1",
    )
    assert code == 0
    report = json.loads(out)
    assert report["matching_size"] == 2
    assert report["params"]["params_derived"] is False


def test_bad_epsilon_exit_code(capsys, c5):
    code, _, err = cli(capsys, "run", "--input", str(c5), "--epsilon", "0.6")
    assert code == 2
    assert "epsilon must be < 1/2" in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["run"],
        ["run", "--kind", "cycle"],
        ["run", "--kind", "cycle", "--n", "5", "--input", "x"],
        ["run", "--input", "/nonexistent/file"],
        ["bench", "--kind", "cycle", "--n", "5", "--trials", "0"],
        ["concentration", "--kind", "cycle", "--n", "5", "--trials", "0"],
        ["gen", "--kind", "cycle", "--n", "2"],
    ],
)
def test_usage_errors(capsys, argv):
    assert cli(capsys, *argv)[0] == 2


def test_malformed_input(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n2\n")
    code, _, err = cli(capsys, "run", "--input", str(bad))
    assert code == 2 and "line 2" in err


BENCH = ["bench", "--kind", "bipartite-trap", "--n", "64", "--beta", "8", "--lambda", "0.125",
         "--alpha", "16", "--trials", "4", "--seed", "9"]


def test_bench_deterministic(capsys):
    a = cli(capsys, *BENCH, "--no-timing")
    b = cli(capsys, *BENCH, "--no-timing")
    assert a[0] == 0 and a[1] == b[1]
    report = json.loads(a[1])
    assert len(report["trials"]) == 4
    assert "wall_time_s" not in a[1]


def test_bench_csv_and_min_ratio(capsys, tmp_path):
    out = tmp_path / "r.csv"
    assert cli(capsys, *BENCH, "--format", "csv", "--out", str(out))[0] == 0
    assert len(out.read_text().splitlines()) == 5
    assert cli(capsys, *BENCH, "--min-ratio", "1.01")[0] == 1


def test_dump_and_verify(capsys, tmp_path):
    graph = tmp_path / "g.txt"
    dump = tmp_path / "h.txt"
    cli(capsys, "gen", "--kind", "bipartite-trap", "--n", "32", "--out", str(graph))
    code, _, _ = cli(
        capsys, "run", "--input", str(graph), "--beta", "8", "--lambda", "0.125",
        "--alpha", "200", "--dump-edcs", str(dump),
    )
    assert code == 0
    code, out, _ = cli(
        capsys, "verify", "--dump", str(dump), "--input", str(graph),
        "--beta", "8", "--lambda", "0.125",
    )
    assert code == 0
    report = json.loads(out)
    assert report["ok"] and report["p1_violations"] == []
    assert report["phi2x_recorded"] == report["phi2x_recomputed"]

    # a wrong potential is a check failure; contradictory degree lines are malformed input
    lines = dump.read_text().splitlines()
    tampered = lines[:-1] + [lines[-1].replace("phi2x=", "phi2x=1")]
    dump.write_text("\n".join(tampered) + "\n")
    assert cli(capsys, "verify", "--dump", str(dump), "--beta", "8", "--lambda", "0.125")[0] == 1
    u, v, du, dv = lines[0].split()
    dump.write_text("\n".join([f"{u} {v} {int(du) + 1} {dv}"] + lines[1:]) + "\n")
    if len(lines) > 2:
        assert cli(capsys, "verify", "--dump", str(dump), "--beta", "8", "--lambda", "0.125")[0] == 2


def test_verify_matching_file(capsys, tmp_path, c5):
    m = tmp_path / "m.txt"
    m.write_text("0 1\n2 3\n")
    code, out, _ = cli(
        capsys, "verify", "--dump", str(_empty_dump(tmp_path)), "--input", str(c5),
        "--beta", "4", "--lambda", "0.25", "--matching", str(m),
    )
    assert code == 0 and json.loads(out)["matching_valid"]
    m.write_text("0 1\n1 2\n")
    assert cli(
        capsys, "verify", "--dump", str(_empty_dump(tmp_path)), "--input", str(c5),
        "--beta", "4", "--lambda", "0.25", "--matching", str(m),
    )[0] == 1


def _empty_dump(tmp_path):
    path = tmp_path / "empty.dump"
    path.write_text("moves=0 phi2x=0\n")
    return path


def test_concentration_cmd(capsys):
    code, out, _ = cli(
        capsys, "concentration", "--kind", "bipartite-planted", "--n", "200",
        "--avg-degree", "6", "--epsilon", "0", "--trials", "3",
    )
    assert code == 0 and json.loads(out)["pass_fraction"] == 1.0
    code, _, err = cli(capsys, "concentration", "--kind", "cycle", "--n", "5", "--epsilon", "0.5")
    assert code == 2 and "epsilon must be < 1/2" in err


def test_module_entry_point(c5):
    proc = subprocess.run(
        [sys.executable, "-m", "rosmatch", "run", "--input", str(c5), "--no-timing", "--seed", "3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["matching_size"] == 2
