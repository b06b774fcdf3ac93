"""Developing map and PSL(2,C) holonomy.

Points of the sphere at infinity are complex numbers or the sentinel
``INF``.  A tetrahedron with positive ordering (v1, v2, v3, v4) and
modulus z is realized with cross-ratio

    [v1:v2:v3:v4] = (v4 - v1)(v2 - v3) / ((v4 - v3)(v2 - v1)) = z,

so the default placement of the base tetrahedron is v1, v2, v3 = 0, 1, INF
and then v4 = z.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

import numpy as np

from .triangulation import CornerPath, Triangulation


class _Infinity:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


class DevelopmentError(ValueError):
    pass


def is_inf(p) -> bool:
    return p is INF


def same_point(p, q, tol: float = 1e-9) -> bool:
    if is_inf(p) or is_inf(q):
        return is_inf(p) and is_inf(q)
    return abs(p - q) <= tol * max(1.0, abs(p), abs(q))


@dataclass(frozen=True)
class MoebiusMatrix:
    a: complex
    b: complex
    c: complex
    d: complex

    @staticmethod
    def from_array(m) -> "MoebiusMatrix":
        m = np.asarray(m, dtype=complex)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det) == 0:
            raise DevelopmentError("singular Moebius matrix")
        m = m / np.sqrt(det)
        return MoebiusMatrix(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))

    @staticmethod
    def identity() -> "MoebiusMatrix":
        return MoebiusMatrix(1, 0, 0, 1)

    def array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def __matmul__(self, other: "MoebiusMatrix") -> "MoebiusMatrix":
        return MoebiusMatrix.from_array(self.array() @ other.array())

    def inverse(self) -> "MoebiusMatrix":
        return MoebiusMatrix(self.d, -self.b, -self.c, self.a)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> complex:
        return self.a + self.d

    def __call__(self, p):
        if is_inf(p):
            return INF if self.c == 0 else self.a / self.c
        den = self.c * p + self.d
        if den == 0:
            return INF
        return (self.a * p + self.b) / den

    def distance(self, other: "MoebiusMatrix") -> float:
        """Operator-norm distance up to the projective sign."""
        x, y = self.array(), other.array()
        return float(min(np.linalg.norm(x - y, 2), np.linalg.norm(x + y, 2)))

    def format(self, digits: int = 12) -> str:
        f = lambda x: f"{x.real:.{digits}g}{x.imag:+.{digits}g}j"
        return f"[[{f(self.a)}, {f(self.b)}], [{f(self.c)}, {f(self.d)}]]"


def cross_ratio(a, b, c, d) -> complex:
    """[a:b:c:d] = (d - a)(b - c) / ((d - c)(b - a))."""
    if is_inf(a):
        return (b - c) / (d - c)
    if is_inf(b):
        return (d - a) / (d - c)
    if is_inf(c):
        return (d - a) / (b - a)
    if is_inf(d):
        return (b - c) / (b - a)
    return (d - a) * (b - c) / ((d - c) * (b - a))


def _to_standard(a, b, c) -> MoebiusMatrix:
    """The map sending (a, b, c) to (0, 1, INF)."""
    pts = (a, b, c)
    for i, j in itertools.combinations(range(3), 2):
        if same_point(pts[i], pts[j], 0.0):
            raise DevelopmentError("repeated points in triple")
    if is_inf(a):
        m = [[0, b - c], [1, -c]]
    elif is_inf(b):
        m = [[1, -a], [1, -c]]
    elif is_inf(c):
        m = [[1, -a], [0, b - a]]
    else:
        m = [[b - c, -a * (b - c)], [b - a, -c * (b - a)]]
    return MoebiusMatrix.from_array(m)


def face_isometry(p, q) -> MoebiusMatrix:
    """The Moebius map sending the triple ``p`` to the triple ``q`` in order."""
    return _to_standard(*q).inverse() @ _to_standard(*p)


def fourth_vertex(order, known: dict, z: complex):
    """Position of the missing vertex of a tetrahedron with positive
    ordering ``order`` and modulus ``z`` given the other three."""
    missing = [v for v in order if v not in known]
    if len(missing) != 1:
        raise DevelopmentError("need exactly three known vertices")
    o1, o2, o3, o4 = order
    # Klein four-group rearrangements keep the cross-ratio
    for arr in ((o1, o2, o3, o4), (o2, o1, o4, o3), (o3, o4, o1, o2), (o4, o3, o2, o1)):
        if arr[3] == missing[0]:
            break
    m = _to_standard(known[arr[0]], known[arr[1]], known[arr[2]])
    return m.inverse()(complex(z))


@dataclass(frozen=True)
class DevelopedTet:
    tet: int
    positions: tuple

    def cross_ratio(self, tri: Triangulation) -> complex:
        o = tri.tetrahedra[self.tet].positive_order
        return cross_ratio(*(self.positions[i] for i in o))


def _cross_face(tri: Triangulation, z, tet: int, positions, face: int):
    """Develop the neighbour across ``face`` of a placed tetrahedron."""
    p = tri.gluing[(tet, face)]
    known = {p.perm[i]: positions[i] for i in range(4) if i != face}
    other = tri.tetrahedra[p.other]
    new = dict(known)
    new[p.other_face] = fourth_vertex(other.positive_order, known, z[p.other])
    pts = [new[i] for i in range(4)]
    for i, j in itertools.combinations(range(4), 2):
        if same_point(pts[i], pts[j], 1e-13):
            raise DevelopmentError(
                f"degenerate developed tetrahedron {other.name} crossing {tri.face_name(tet, face)}")
    return p.other, tuple(pts)


def default_placement(tri: Triangulation, base_tet: int) -> dict:
    v1, v2, v3, _ = tri.tetrahedra[base_tet].positive_order
    return {v1: 0j, v2: 1 + 0j, v3: INF}


def spanning_tree(tri: Triangulation, base_tet: int) -> list[tuple[int, int]]:
    """Breadth-first tree of the face-pairing graph as (tet, face) keys,
    ties broken by pairing order."""
    seen = {base_tet}
    queue = deque([base_tet])
    tree = []
    while queue:
        t = queue.popleft()
        for f in range(4):
            p = tri.gluing[(t, f)]
            if p.other not in seen:
                seen.add(p.other)
                tree.append((t, f))
                queue.append(p.other)
    return tree


def develop(tri: Triangulation, z, base_tet: int = 0, placement: dict | None = None,
            tree: list[tuple[int, int]] | None = None) -> list[DevelopedTet]:
    """Place one copy of every tetrahedron, propagating along a spanning tree.

    ``placement`` maps three local vertices of the base tetrahedron to
    points; ``tree`` is a list of (tet, face) keys (either side of each
    pairing may be given).
    """
    z = np.asarray(z, dtype=complex)
    placement = placement or default_placement(tri, base_tet)
    base = tri.tetrahedra[base_tet]
    pos = {base_tet: tuple(placement.get(i) for i in range(4))}
    missing = [i for i in range(4) if i not in placement]
    if len(missing) != 1:
        raise DevelopmentError("placement must fix exactly three vertices")
    known = dict(placement)
    known[missing[0]] = fourth_vertex(base.positive_order, placement, z[base_tet])
    pos[base_tet] = tuple(known[i] for i in range(4))

    if tree is None:
        tree = spanning_tree(tri, base_tet)
    edges = set()
    for t, f in tree:
        p = tri.gluing[(t, f)]
        edges.add((t, f))
        edges.add((p.other, p.other_face))
    queue = deque([base_tet])
    while queue:
        t = queue.popleft()
        for f in range(4):
            if (t, f) not in edges:
                continue
            other = tri.gluing[(t, f)].other
            if other in pos:
                continue
            _, pos[other] = _cross_face(tri, z, t, pos[t], f)
            queue.append(other)
    if len(pos) != tri.num_tetrahedra:
        raise DevelopmentError("spanning tree does not reach every tetrahedron")
    return [DevelopedTet(t, pos[t]) for t in range(tri.num_tetrahedra)]


def tree_keys(tri: Triangulation, tree) -> set:
    keys = set()
    for t, f in tree:
        p = tri.gluing[(t, f)]
        keys.add(frozenset({(t, f), (p.other, p.other_face)}))
    return keys


def _face_points(positions, face):
    return tuple(positions[i] for i in range(4) if i != face)


def pairing_generator(tri: Triangulation, dev: list[DevelopedTet], tet: int, face: int) -> MoebiusMatrix:
    """Isometry realizing the pairing that leaves ``tet`` through ``face``:
    it carries the developed face of ``tet`` onto the matching face of the
    developed copy of the neighbour."""
    p = tri.gluing[(tet, face)]
    src = tuple(dev[tet].positions[i] for i in range(4) if i != face)
    dst = tuple(dev[p.other].positions[p.perm[i]] for i in range(4) if i != face)
    return face_isometry(src, dst)


def holonomy_generators(tri: Triangulation, z, base_tet: int = 0, placement=None, tree=None):
    """One matrix per pairing outside the spanning tree, as (pairing index, matrix).

    The matrix for pairing ``tet^face <-> other^face'`` (as stored) maps
    the developed face of ``tet`` onto the developed face of ``other``.
    """
    if tree is None:
        tree = spanning_tree(tri, base_tet)
    dev = develop(tri, z, base_tet, placement, tree)
    in_tree = tree_keys(tri, tree)
    out = []
    for k, p in enumerate(tri.pairings):
        if frozenset({(p.tet, p.face), (p.other, p.other_face)}) in in_tree:
            continue
        out.append((k, pairing_generator(tri, dev, p.tet, p.face)))
    return out


def continue_along(tri: Triangulation, z, tet: int, positions, faces) -> tuple[int, tuple]:
    """Develop successive neighbours leaving through ``faces`` (local
    indices in the current tetrahedron)."""
    z = np.asarray(z, dtype=complex)
    cur, pos = tet, positions
    for f in faces:
        cur, pos = _cross_face(tri, z, cur, pos, f)
    return cur, pos


def _loop_holonomy(tri, z, tet, positions, faces) -> MoebiusMatrix:
    end, pos = continue_along(tri, z, tet, positions, faces)
    if end != tet:
        raise DevelopmentError("path does not return to its starting tetrahedron")
    return face_isometry(positions[:3], pos[:3])


def edge_relation_check(tri: Triangulation, z, base_tet: int = 0) -> float:
    """Max distance from +-I of the holonomy around each edge class."""
    dev = develop(tri, z, base_tet)
    worst = 0.0
    for ec in tri.edge_classes:
        c0 = ec.corners[0]
        a, b = c0.edge
        _, d = (i for i in range(4) if i not in (a, b))
        faces = []
        # rotate around the edge: leave through the face opposite d
        state = (c0.tet, a, b, d)
        for _ in ec.corners:
            t, aa, bb, dd = state
            p = tri.gluing[(t, dd)]
            faces.append(dd)
            cc = next(i for i in range(4) if i not in (aa, bb, dd))
            state = (p.other, p.perm[aa], p.perm[bb], p.perm[cc])
        try:
            h = _loop_holonomy(tri, z, c0.tet, dev[c0.tet].positions, faces)
        except DevelopmentError:
            return float("inf")
        worst = max(worst, h.distance(MoebiusMatrix.identity()))
    return worst


@dataclass
class PeripheralHolonomy:
    matrix: MoebiusMatrix
    rho: complex
    trace: complex
    parabolic: bool


def peripheral_holonomy(tri: Triangulation, z, curve: CornerPath, base_tet: int = 0,
                        tol: float = 1e-9) -> PeripheralHolonomy:
    """Holonomy of a peripheral path, conjugated so the cusp point is INF.

    The developed copy of the first tetrahedron on the path is continued
    around the path; the returned matrix maps the initial copy onto the
    final one, and its dilation a/d equals the corner-product row value.
    """
    if not curve.steps:
        return PeripheralHolonomy(MoebiusMatrix.identity(), 1 + 0j, 2 + 0j, True)
    dev = develop(tri, z, base_tet)
    s0 = curve.steps[0]
    start = dev[s0.tet].positions
    h = _loop_holonomy(tri, z, s0.tet, start, [s.exit for s in curve.steps])
    cusp = start[s0.vertex]
    if is_inf(cusp):
        conj = MoebiusMatrix.identity()
    else:
        conj = MoebiusMatrix.from_array([[0, 1], [1, -cusp]])
    m = conj @ h @ conj.inverse()
    if abs(m.c) > 1e-6 * max(1.0, abs(m.a), abs(m.d)):
        raise DevelopmentError("peripheral holonomy does not fix the cusp point")
    rho = m.a / m.d
    tr = m.trace
    return PeripheralHolonomy(m, rho, tr, bool(abs(tr * tr - 4) < tol))


def invariant_circle_heuristic(gens: list[MoebiusMatrix], max_len: int = 3, tol: float = 1e-6) -> dict:
    """Heuristic: a group preserving a round circle has real squared
    traces; a word with clearly non-real trace^2 rules one out."""
    mats = gens + [g.inverse() for g in gens]
    worst = 0.0
    witness = None
    for n in range(1, max_len + 1):
        for word in itertools.product(range(len(mats)), repeat=n):
            m = MoebiusMatrix.identity()
            for i in word:
                m = m @ mats[i]
            im = abs((m.trace ** 2).imag)
            if im > worst:
                worst, witness = im, word
    return {"invariant_circle_possible": worst <= tol, "max_imag_trace_squared": worst,
            "witness_word": witness, "heuristic": True}


def generators_text(tri: Triangulation, gens) -> str:
    """Matrix-list block keyed by pairing."""
    lines = []
    for k, m in gens:
        lines.append(f"pairing {k} {tri.pairing_name(tri.pairings[k])}: {m.format(12)}")
    return "\n".join(lines)


def word_traces(gens: list[MoebiusMatrix], max_len: int = 2) -> list[complex]:
    """trace^2 of every word of length <= max_len in the generators and
    their inverses, in a fixed enumeration order."""
    mats = gens + [g.inverse() for g in gens]
    out = []
    for n in range(1, max_len + 1):
        for word in itertools.product(range(len(mats)), repeat=n):
            m = MoebiusMatrix.identity()
            for i in word:
                m = m @ mats[i]
            out.append(m.trace ** 2)
    return out
