import cmath
import math

import numpy as np
import pytest

from dehnfill.equations import assemble_system, cusp_row, evaluate
from dehnfill.holonomy import (INF, DevelopmentError, MoebiusMatrix, cross_ratio, develop, edge_relation_check,
                               face_isometry, fourth_vertex, generators_text, holonomy_generators,
                               invariant_circle_heuristic, peripheral_holonomy, spanning_tree, word_traces)
from dehnfill.solver import SolverOptions, multistart_solve

from support import LR3_TABLE, best_match, fixture, solved

EIPI3 = cmath.exp(1j * math.pi / 3)


def test_moebius_normalized():
    m = MoebiusMatrix.from_array([[2, 1], [1, 3]])
    assert abs(m.det - 1) < 1e-12
    with pytest.raises(DevelopmentError):
        MoebiusMatrix.from_array([[1, 2], [2, 4]])


def test_moebius_infinity():
    m = MoebiusMatrix.from_array([[1, 2], [0, 1]])
    assert m(INF) is INF
    inv = MoebiusMatrix.from_array([[0, 1], [1, 0]])
    assert inv(0j) is INF and inv(INF) == 0


def test_face_isometry_examples():
    ident = face_isometry((0j, 1 + 0j, INF), (0j, 1 + 0j, INF))
    assert ident.distance(MoebiusMatrix.identity()) < 1e-12
    flip = face_isometry((0j, 1 + 0j, INF), (1 + 0j, 0j, INF))
    assert flip.distance(MoebiusMatrix.from_array([[-1, 1], [0, 1]])) < 1e-12
    with pytest.raises(DevelopmentError):
        face_isometry((0j, 0j, INF), (0j, 1 + 0j, INF))


def test_face_isometry_maps_triples():
    p = (0.3 + 0.1j, -2 + 1j, 4 - 0.5j)
    q = (INF, 1j, -1 + 0j)
    m = face_isometry(p, q)
    assert m(p[0]) is INF or abs(m(p[0])) > 1e12
    assert abs(m(p[1]) - q[1]) < 1e-12 and abs(m(p[2]) - q[2]) < 1e-12


def test_cross_ratio_infinity_cases_agree_with_limits():
    pts = [0.3 + 0.2j, -1 + 1j, 2 - 1j, 0.5 + 3j]
    big = 1e9 + 1e9j
    for k in range(4):
        with_inf = list(pts)
        with_inf[k] = INF
        near = list(pts)
        near[k] = big
        assert abs(cross_ratio(*with_inf) - cross_ratio(*near)) < 1e-6


def test_fourth_vertex_realizes_modulus():
    order = (0, 1, 2, 3)
    z = 0.4 + 0.9j
    for missing in range(4):
        known = {i: p for i, p in zip(order, (0j, 1 + 0j, INF, z)) if i != missing}
        pts = dict(known)
        pts[missing] = fourth_vertex(order, known, z)
        assert abs(cross_ratio(*(pts[i] for i in order)) - z) < 1e-12


def test_single_tetrahedron_placement():
    tri = fixture("fig8")
    dev = develop(tri, [EIPI3, EIPI3])
    o = tri.tetrahedra[0].positive_order
    pos = [dev[0].positions[i] for i in o]
    assert pos[0] == 0 and pos[1] == 1 and pos[2] is INF
    assert abs(pos[3] - EIPI3) < 1e-15


@pytest.mark.parametrize("name", ["fig8", "lr3", "jsj"])
def test_developed_cross_ratios_match_moduli(name):
    tri = fixture(name)
    z = solved(name).solutions[0].z
    for d in develop(tri, z):
        assert abs(d.cross_ratio(tri) - z[d.tet]) < 1e-9


def test_tree_pairings_share_faces_exactly():
    tri = fixture("lr3")
    z = solved("lr3").solutions[0].z
    dev = develop(tri, z)
    for t, f in spanning_tree(tri, 0):
        p = tri.gluing[(t, f)]
        for i in range(4):
            if i != f:
                a, b = dev[t].positions[i], dev[p.other].positions[p.perm[i]]
                assert a is b or a == b


def test_generator_count():
    tri = fixture("lr3")
    z = solved("lr3").solutions[0].z
    gens = holonomy_generators(tri, z)
    assert len(gens) == len(tri.pairings) - (tri.num_tetrahedra - 1)
    assert all(abs(m.det - 1) < 1e-10 for _, m in gens)
    assert len(generators_text(tri, gens).splitlines()) == len(gens)


def test_fig8_elliptic_rotation():
    tri = fixture("fig8")
    d = develop(tri, [EIPI3, EIPI3])[0].positions
    tri_pts = tuple(p for p in d if p is not INF)[:3]
    m = face_isometry(tri_pts, tri_pts[1:] + tri_pts[:1])
    assert abs(m.trace ** 2 - 1) < 1e-9


@pytest.mark.parametrize("name", ["lr3", "jsj", "fig8"])
def test_edge_relation_at_solutions(name):
    tri = fixture(name)
    for s in solved(name).solutions:
        assert edge_relation_check(tri, s.z) < 1e-8


def test_edge_relation_fails_off_solutions():
    tri = fixture("lr3")
    rng = np.random.default_rng(1)
    z = rng.uniform(0.1, 1, 4) + 1j * rng.uniform(0.1, 1, 4)
    assert edge_relation_check(tri, z) > 1e-3


@pytest.mark.parametrize("name, filling", [("fig8", "5,1"), ("lr3", "1,4")])
def test_rho_matches_cusp_rows_at_filled_solutions(name, filling):
    tri = fixture(name)
    sols = multistart_solve(assemble_system(tri, [filling]), SolverOptions(starts=200)).solutions
    assert sols
    for s in sols:
        for c in tri.peripheral[0]:
            for base in range(tri.num_tetrahedra):
                ph = peripheral_holonomy(tri, s.z, c, base)
                assert abs(ph.matrix.c) < 1e-9
                assert abs(ph.rho - evaluate(cusp_row(tri, c), s.z)) < 1e-9


def test_complete_cusps_are_parabolic():
    for name in ("lr3", "fig8"):
        tri = fixture(name)
        s = solved(name).solutions[0]
        for c in tri.peripheral[0]:
            ph = peripheral_holonomy(tri, s.z, c)
            assert ph.parabolic and abs(ph.rho - 1) < 1e-6


def test_traces_independent_of_base():
    tri = fixture("lr3")
    z = solved("lr3").solutions[1].z
    tree = spanning_tree(tri, 0)
    a = word_traces([m for _, m in holonomy_generators(tri, z, 0, tree=tree)])
    for base in (1, 2, 3):
        b = word_traces([m for _, m in holonomy_generators(tri, z, base, tree=tree)])
        assert np.max(np.abs(np.array(a) - np.array(b))) < 1e-8


def test_invariant_circle_heuristic():
    real = [MoebiusMatrix.from_array([[2, 1], [1, 1]]), MoebiusMatrix.from_array([[1, 3], [0, 1]])]
    assert invariant_circle_heuristic(real)["invariant_circle_possible"]
    tri = fixture("lr3")
    k, _ = best_match(LR3_TABLE[1], solved("lr3").solutions)
    z = solved("lr3").solutions[k].z
    h = invariant_circle_heuristic([m for _, m in holonomy_generators(tri, z)])
    assert not h["invariant_circle_possible"] and h["heuristic"]
