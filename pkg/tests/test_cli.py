import json

import pytest

from carshare.cli import main
from carshare.instance import read_instance, write_instance
from carshare.model import read_mps_summary
from carshare.oracle import brute_force_optimum
from conftest import build_counterexample, build_reduction_example, micro_corpus


@pytest.fixture
def counterexample_file(tmp_path):
    p = tmp_path / "counterexample.txt"
    write_instance(build_counterexample(), p)
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_generate(tmp_path, capsys):
    code, out, _ = run(capsys, "generate", "--group", "st", "--n", "20",
                       "--count", "3", "--seed", "5", "--out", tmp_path)
    assert code == 0
    files = sorted(tmp_path.glob("st-n20-s*.txt"))
    assert [f.name for f in files] == \
        ["st-n20-s5.txt", "st-n20-s6.txt", "st-n20-s7.txt"]
    for f in files:
        assert read_instance(f).n == 20


def test_generate_deterministic(tmp_path, capsys):
    for sub in ("a", "b"):
        run(capsys, "generate", "--group", "ft", "--n", "15", "--count", "2",
            "--seed", "9", "--out", tmp_path / sub)
    a = sorted((tmp_path / "a").iterdir())
    b = sorted((tmp_path / "b").iterdir())
    assert [f.read_bytes() for f in a] == [f.read_bytes() for f in b]


def test_generate_count_zero(tmp_path, capsys):
    code, _, _ = run(capsys, "generate", "--group", "fc", "--n", "10",
                     "--count", "0", "--out", tmp_path)
    assert code == 0
    assert not list(tmp_path.glob("*.txt"))


def test_solve_bb(counterexample_file, capsys, tmp_path):
    csv = tmp_path / "agg.csv"
    code, out, _ = run(capsys, "solve", "--method", "bb", "--model", "cs2",
                       "--time-limit", "30", "--csv", csv,
                       counterexample_file)
    assert code == 0
    rep = json.loads(out.strip().splitlines()[-1])
    assert rep["value"] == 4
    assert rep["ub"] == 4.0
    assert rep["gap_pct"] == 0.0
    assert rep["status"] == "optimal"
    assert rep["method"] == "bb" and rep["model"] == "cs2"
    assert set(rep) == {"instance", "method", "model", "n", "value", "ub",
                        "gap_pct", "iterations", "improvements",
                        "construction_value", "elapsed_s", "status", "seed"}
    lines = csv.read_text().strip().splitlines()
    assert lines[0].startswith("set,count,opt,")
    assert len(lines) == 2


def test_solve_heuristics(counterexample_file, capsys):
    for method in ("grasp", "vns", "ts"):
        code, out, _ = run(capsys, "solve", "--method", method,
                           "--time-limit", "0.5", "--seed", "3",
                           counterexample_file)
        assert code == 0
        rep = json.loads(out.strip().splitlines()[-1])
        assert rep["value"] == 4
        assert rep["construction_value"] is not None


def test_solve_empty_instance(tmp_path, capsys):
    p = tmp_path / "empty.txt"
    p.write_text("carshare v1 n=0 mA=1 mB=1 horizon=100\n")
    code, out, _ = run(capsys, "solve", "--method", "grasp", p)
    assert code == 0
    assert json.loads(out.strip().splitlines()[-1])["value"] == 0


def test_solve_matches_oracle_on_files(tmp_path, capsys):
    paths = []
    for i, inst in enumerate(micro_corpus(5, 101)):
        p = tmp_path / f"micro{i}.txt"
        write_instance(inst, p)
        paths.append((p, brute_force_optimum(inst)[0]))
    code, out, _ = run(capsys, "solve", "--method", "bb", "--time-limit",
                       "30", *[p for p, _ in paths])
    assert code == 0
    reports = [json.loads(line) for line in out.strip().splitlines()]
    got = {rep["instance"]: rep["value"] for rep in reports}
    for p, expect in paths:
        assert got[str(p)] == expect


def test_missing_file_exit_code(capsys):
    code, _, err = run(capsys, "solve", "missing-file.txt")
    assert code == 2
    assert "error" in err


def test_preprocess_row(tmp_path, capsys):
    p = tmp_path / "red.txt"
    write_instance(build_reduction_example(), p)
    code, out, _ = run(capsys, "preprocess", p)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("instance,")
    fields = lines[1].split(",")
    assert fields[1:5] == ["14", "22", "6", "11"]


def test_export_mps(counterexample_file, capsys):
    code, out, _ = run(capsys, "export", "--format", "mps",
                       counterexample_file)
    assert code == 0
    target = counterexample_file.with_suffix(".mps")
    assert target.exists()
    summary = read_mps_summary(target)
    assert summary["columns"] > 0 and summary["rows"] > 0
    assert summary["integer_columns"] == 4


def test_export_lp_custom_out(counterexample_file, capsys, tmp_path):
    dest = tmp_path / "model.lp"
    code, _, _ = run(capsys, "export", "--format", "lp", "--out", dest,
                     counterexample_file)
    assert code == 0
    assert "Maximize" in dest.read_text()


def test_priority_stats(tmp_path, capsys):
    from conftest import build_nested_chain
    p = tmp_path / "chain.txt"
    write_instance(build_nested_chain(), p)
    code, out, _ = run(capsys, "priority-stats", p)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1] == f"{p},9,5,4"
    assert lines[2].startswith("average,")
