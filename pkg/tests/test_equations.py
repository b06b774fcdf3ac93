import cmath
import math

import numpy as np
import pytest

from dehnfill.equations import (DegenerateModulus, ExponentRow, assemble_system, cusp_row, edge_equation_rows,
                                evaluate, log_evaluate, parse_filling)
from dehnfill.solver import SolverOptions, multistart_solve
from dehnfill.triangulation import TriangulationError

from support import fixture, max_abs, solved


def test_corner_variants_evaluate():
    z = np.array([0.3 + 0.7j])
    assert evaluate(ExponentRow.corner(1, 0, 0), z) == pytest.approx(z[0])
    assert evaluate(ExponentRow.corner(1, 0, 1), z) == pytest.approx(1 / (1 - z[0]))
    assert evaluate(ExponentRow.corner(1, 0, 2), z) == pytest.approx(1 - 1 / z[0])


def test_variant_product_is_minus_one():
    r = sum((ExponentRow.corner(1, 0, v) for v in range(3)), ExponentRow.zero(1))
    assert r.is_zero() and r.sign == -1
    assert evaluate(r, [2.5 - 1j]) == pytest.approx(-1)


def test_log_evaluate_branch():
    row = ExponentRow.corner(1, 0, 2)
    z = [0.2 + 0.1j]
    assert cmath.exp(log_evaluate(row, z)) == pytest.approx(evaluate(row, z))
    shifted = log_evaluate(row, z, winding=3) - log_evaluate(row, z, winding=0)
    assert shifted == pytest.approx(6j * math.pi)


@pytest.mark.parametrize("bad", [0, 1])
def test_degenerate_modulus_raises(bad):
    with pytest.raises(DegenerateModulus):
        evaluate(ExponentRow.corner(1, 0, 0), [bad])
    with pytest.raises(DegenerateModulus):
        log_evaluate(ExponentRow.corner(1, 0, 0), [bad])


def test_fig8_edge_equation():
    tri = fixture("fig8")
    z = np.full(2, cmath.exp(1j * math.pi / 3))
    for r in edge_equation_rows(tri):
        assert abs(evaluate(r, z) - 1) < 1e-12


def test_parse_filling():
    assert parse_filling(None) is None
    assert parse_filling("inf") is None
    assert parse_filling("5,1") == (5, 1)
    assert parse_filling((-1, 3)) == (-1, 3)
    with pytest.raises(ValueError):
        parse_filling("2,4")


def test_assemble_counts():
    tri = fixture("lr3")
    s = assemble_system(tri)
    assert len(s.edges) == 4 and len(s.dropped) == 1
    assert len(s.active) == 3 + 2
    f = assemble_system(tri, ["3,1"])
    assert [e.kind for e in f.cusps] == ["filling"] and f.cusps[0].fixed_branch


def test_assemble_rejects_bad_filling_count():
    with pytest.raises(ValueError):
        assemble_system(fixture("lr3"), [None, None])


def test_cusp_row_rejects_open_path():
    tri = fixture("lr3")
    mu, _ = tri.peripheral[0]
    from dehnfill.triangulation import CornerPath
    with pytest.raises(TriangulationError):
        cusp_row(tri, CornerPath(mu.steps[:-1]))


def test_filling_row_combines_peripheral_rows():
    tri = fixture("lr3")
    mu, lam = (cusp_row(tri, c) for c in tri.peripheral[0])
    s = assemble_system(tri, [(2, 3)])
    assert s.cusps[0].row == mu.scaled(2) + lam.scaled(3)


def test_dropped_row_does_not_change_solutions():
    tri = fixture("lr3")
    opts = SolverOptions(starts=300)
    base = solved("lr3").solutions
    for drop in [(0,), (1,), (2,)]:
        other = multistart_solve(assemble_system(tri, drop=drop), opts).solutions
        assert len(other) == len(base)
        for s in base:
            assert min(max_abs(s.z, t.z) for t in other) < 1e-8


def test_csv_export_has_one_line_per_equation():
    s = assemble_system(fixture("lr3"))
    lines = s.to_csv().strip().splitlines()
    assert len(lines) == 1 + len(s.all_equations)
