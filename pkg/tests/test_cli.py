import csv
import io
import json

import pytest

from dehnfill.cli import RunConfig, main
from dehnfill.fileformat import load

from support import FIXTURES


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_build_bundle(tmp_path, capsys):
    out = tmp_path / "lr3.tri"
    assert run(capsys, "build-bundle", "--word", "LRRR", "-o", str(out))[0] == 0
    assert load(out).num_tetrahedra == 4
    code, text, _ = run(capsys, "build-bundle", "--word", "LLRRR")
    assert code == 0 and text.count("\ntet ") + text.startswith("tet ") == 5


def test_build_bundle_reducible(capsys):
    code, _, err = run(capsys, "build-bundle", "--word", "LLL")
    assert code == 2 and "reducible monodromy" in err


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", str(FIXTURES / "jsj.tri"))
    assert code == 0 and "FAIL" not in out


def test_validate_failure_exit_code(tmp_path, capsys):
    text = (FIXTURES / "fig8.tri").read_text().splitlines()
    broken = [line for line in text if not line.startswith("pair")][:] + \
             [line for line in text if line.startswith("pair")][:-1]
    p = tmp_path / "broken.tri"
    p.write_text("\n".join(line for line in broken if not line.startswith("curve")) + "\n")
    code, out, _ = run(capsys, "validate", str(p))
    assert code == 3 and "FAIL" in out
    assert run(capsys, "solve", str(p))[0] == 3


def test_solve_csv(capsys):
    code, out, _ = run(capsys, "solve", str(FIXTURES / "lr3.tri"), "--complete", "--format", "csv", "--starts", "400")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4
    assert rows[0]["classification"] == "positive" and rows[0]["total_volume"] == "2.9891203"


def test_solve_jsj_table(capsys):
    code, out, _ = run(capsys, "solve", str(FIXTURES / "jsj.tri"), "--starts", "200")
    assert code == 0 and "partially_flat" in out and "C* violated" in out


def test_solve_word_with_filling(capsys):
    code, out, _ = run(capsys, "solve", "--word", "LR", "--filling", "5,1", "--starts", "100")
    assert code == 0 and "Solution 1" in out


def test_no_solutions_exit_code(capsys):
    code, _, _ = run(capsys, "solve", "--word", "LR", "--starts", "1", "--filling", "1,0", "--tol", "1e-300")
    assert code == 4


def test_bad_filling_exit_code(capsys):
    code, _, err = run(capsys, "solve", "--word", "LR", "--filling", "2,4")
    assert code == 1 and "coprime" in err


def test_report_analyze_round_trip(tmp_path, capsys):
    rep = tmp_path / "r.json"
    tri = str(FIXTURES / "l2r3.tri")
    assert run(capsys, "solve", tri, "--format", "report", "-o", str(rep), "--starts", "600")[0] == 0
    data = json.loads(rep.read_text())
    assert data["solutions"][0]["classification"] == "positive"
    _, first, _ = run(capsys, "solve", tri, "--format", "csv", "--starts", "600")
    _, second, _ = run(capsys, "analyze", tri, "--solutions", str(rep), "--format", "csv")
    assert first == second


def test_holonomy_pinned_domain(capsys):
    code, out, _ = run(capsys, "holonomy", str(FIXTURES / "lr3.tri"), "--starts", "200", "--index", "2",
                       "--base", "D", "--tree", "A:1/0,B:1/1,C:1/1", "--place", "3/2=0,0=1,4/3=inf")
    assert code == 0
    assert out.count("pairing ") == 5
    assert "no invariant line found" in out


def test_holonomy_fig8_parabolic(capsys):
    code, out, _ = run(capsys, "holonomy", "--word", "LR", "--starts", "50")
    assert code == 0 and out.count("parabolic = True") == 2


def test_run_config_requires_one_input():
    with pytest.raises(ValueError):
        RunConfig()
    with pytest.raises(ValueError):
        RunConfig(path="x.tri", word="LR")
