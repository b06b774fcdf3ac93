import json
import math

import numpy as np
import pytest

from dehnfill.bundle import build_from_word
from dehnfill.equations import assemble_system
from dehnfill.solver import (Divergence, SolverOptions, classify_point, load_report, multistart_solve,
                             newton_solve, polynomial_check, random_starts, solution_report)

from support import LR3_TABLE, best_match, fixture, max_abs, solved

EIPI3 = complex(0.5, math.sqrt(3) / 2)


def test_newton_from_nearby_start():
    system = assemble_system(fixture("lr3"))
    s = newton_solve(system, np.array(LR3_TABLE[0]) + 1e-4)
    assert s and s.kind == "positive"
    assert s.residual_mult < 1e-9
    assert max_abs(s.z, LR3_TABLE[0]) < 1e-6


def test_newton_start_at_degenerate_point():
    system = assemble_system(fixture("fig8"))
    r = newton_solve(system, [1.0, 0.5 + 0.5j])
    assert isinstance(r, Divergence) and not r
    assert "degenerate" in r.reason


def test_newton_rejects_wrong_length():
    with pytest.raises(ValueError):
        newton_solve(assemble_system(fixture("fig8")), [0.5 + 0.5j])


def test_random_starts_deterministic():
    opts = SolverOptions(starts=10, seed=7)
    a, b = random_starts(3, 10, opts), random_starts(3, 10, opts)
    assert np.array_equal(a, b)
    assert np.allclose(a[0], EIPI3)


def test_solve_deterministic_under_seed():
    system = assemble_system(fixture("lr3"))
    opts = SolverOptions(starts=200, seed=3)
    a, b = multistart_solve(system, opts), multistart_solve(system, opts)
    assert [s.z.tolist() for s in a] == [s.z.tolist() for s in b]


def test_classify_point():
    assert classify_point([0.5 + 1j, 0.2 + 0.1j]) == "positive"
    assert classify_point([0.5 + 1j, -1.0]) == "partially_flat"
    assert classify_point([0.5 + 1j, 0.5 - 1j]) == "mixed"
    assert classify_point([0.5 + 1j, 1.0]) == "mixed"


def test_lr3_classification_and_conjugates():
    sols = solved("lr3").solutions
    assert [s.classification for s in sols] == ["positive", "mixed", "conjugate_of(2)", "conjugate_of(1)"]
    for s in sols:
        if s.conjugate_of:
            assert max_abs(np.conj(s.z), sols[s.conjugate_of - 1].z) < 1e-8
            assert s.volume == pytest.approx(-sols[s.conjugate_of - 1].volume, abs=1e-10)


def test_fig8_complete():
    sols = solved("fig8").solutions
    assert len(sols) == 2
    assert max_abs(sols[0].z, [EIPI3, EIPI3]) < 1e-12


def test_jsj_solutions():
    sols = solved("jsj").solutions
    assert [s.kind for s in sols] == ["partially_flat", "mixed"]


def test_l2r3_degenerate_limits_found():
    tri = fixture("l2r3")
    sols = solved("l2r3").solutions
    limits = [s for s in sols if s.degenerate]
    assert len(limits) == 2
    for s in limits:
        assert s.kind == "degenerate_limit" or s.conjugate_of
        assert np.allclose(s.z[3:], 1)
    assert sum(s.kind == "positive" for s in sols) == 1
    for s in sols:
        if not s.degenerate:
            assert assemble_system(tri).residuals(s.z)["mult"] < 1e-9


def test_bundle_volume_is_invariant_under_rotation_and_mirror():
    opts = SolverOptions(starts=400)
    vols = []
    for word in ("LLRRR", "LRRRL", "RRRLL", "RRLLL"):
        tri = build_from_word(word)
        sols = multistart_solve(assemble_system(tri), opts).solutions
        vols.append(next(s.volume for s in sols if s.kind == "positive"))
    assert max(vols) - min(vols) < 1e-9


def test_filling_solution_satisfies_filling_equation():
    tri = fixture("fig8")
    system = assemble_system(tri, ["5,1"])
    sols = multistart_solve(system, SolverOptions(starts=200)).solutions
    pos = [s for s in sols if s.kind == "positive"]
    assert len(pos) == 1
    assert system.residuals(pos[0].z)["log"] < 1e-9
    # a filled structure has smaller volume than the complete one
    assert 0 < pos[0].volume < solved("fig8").solutions[0].volume


def test_polynomial_check():
    r = polynomial_check([2.0 + 0j, 4.0 + 0j], [1, 0, -4], 0, {1: ([1, 0, 0], [1])})
    assert r["P"] == pytest.approx(0) and r[1] == pytest.approx(0) and r["max"] == pytest.approx(0)


def test_report_round_trip():
    tri = fixture("l2r3")
    system = assemble_system(tri)
    res = solved("l2r3")
    text = json.dumps(solution_report(system, res))
    back = load_report(text, tri)
    assert len(back) == len(res.solutions)
    for a, b in zip(back, res.solutions):
        assert np.array_equal(a.z, b.z)
        assert a.degenerate == b.degenerate and a.classification == b.classification


def test_best_match_helper():
    sols = solved("lr3").solutions
    k, err = best_match(sols[2].z, sols)
    assert k == 2 and err == 0
