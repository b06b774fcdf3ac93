"""Combinatorial ideal triangulations.

A tetrahedron has four local vertices ``0..3``; face ``f`` is the face
opposite vertex ``f`` and the corner triangle ``(tet, v)`` is the one cut
off near vertex ``v``.  A face pairing stores the full vertex permutation
``perm`` (``perm[i]`` is the image of local vertex ``i``), so the face of
the target tetrahedron is ``perm[face]``.

Modulus bookkeeping: if ``(v1, v2, v3, v4)`` is a positively oriented
ordering with the preferred edge ``v1 v3``, the edges ``v1v3``/``v2v4``
carry ``z``, ``v2v3``/``v1v4`` carry ``1/(1-z)`` and ``v3v4``/``v1v2``
carry ``1 - 1/z``.
"""

from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

# modulus variants carried by an edge
Z, INV_ONE_MINUS, ONE_MINUS_INV = 0, 1, 2
VARIANT_NAMES = ("z", "1/(1-z)", "1-1/z")


def perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


_EVEN_PERMS = [p for p in itertools.permutations(range(4)) if perm_sign(p) == 1]


@dataclass(frozen=True)
class Tetrahedron:
    name: str
    labels: tuple[str, str, str, str]
    preferred_edge: tuple[int, int]
    # +1 when the ordering (0, 1, 2, 3) is in the positive class
    orientation: int = 1

    def __post_init__(self):
        a, b = self.preferred_edge
        if a == b or not (0 <= a < 4 and 0 <= b < 4):
            raise ValueError(f"tetrahedron {self.name}: bad preferred edge {self.preferred_edge}")
        if self.orientation not in (1, -1):
            raise ValueError(f"tetrahedron {self.name}: orientation must be +1 or -1")
        if len(set(self.labels)) != 4:
            raise ValueError(f"tetrahedron {self.name}: vertex labels must be distinct")

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"tetrahedron {self.name} has no vertex {label!r}") from None

    @cached_property
    def positive_order(self) -> tuple[int, int, int, int]:
        """(v1, v2, v3, v4): positively oriented, preferred edge is v1 v3."""
        a, c = self.preferred_edge
        b, d = (i for i in range(4) if i not in (a, c))
        order = (a, b, c, d)
        if perm_sign(order) != self.orientation:
            order = (a, d, c, b)
        return order

    @cached_property
    def _variants(self) -> dict[frozenset, int]:
        v1, v2, v3, v4 = self.positive_order
        return {
            frozenset((v1, v3)): Z, frozenset((v2, v4)): Z,
            frozenset((v2, v3)): INV_ONE_MINUS, frozenset((v1, v4)): INV_ONE_MINUS,
            frozenset((v3, v4)): ONE_MINUS_INV, frozenset((v1, v2)): ONE_MINUS_INV,
        }

    def edge_variant(self, a: int, b: int) -> int:
        return self._variants[frozenset((a, b))]

    def cusp_ccw(self, v: int) -> tuple[int, int, int]:
        """Counterclockwise order of the corners of the corner triangle at ``v``.

        Seen from the ideal vertex ``v`` placed at infinity.  For the
        positive ordering with ``v3`` at infinity the triangle is
        ``(0, 1, z)`` = ``(v1, v2, v4)``.
        """
        o = self.positive_order
        for p in _EVEN_PERMS:
            q = tuple(o[i] for i in p)
            if q[2] == v:
                return (q[0], q[1], q[3])
        raise AssertionError("unreachable")

    def is_left_turn(self, v: int, corner: int, entry: int, exit: int) -> bool:
        """True when a path through triangle ``v`` from side ``entry`` to side
        ``exit`` leaves ``corner`` on its left."""
        ccw = self.cusp_ccw(v)
        i = ccw.index(corner)
        return (ccw[(i + 1) % 3], ccw[(i + 2) % 3]) == (exit, entry)


@dataclass(frozen=True)
class FacePairing:
    tet: int
    face: int
    other: int
    perm: tuple[int, int, int, int]

    @property
    def other_face(self) -> int:
        return self.perm[self.face]

    def inverse(self) -> "FacePairing":
        inv = [0] * 4
        for i, j in enumerate(self.perm):
            inv[j] = i
        return FacePairing(self.other, self.other_face, self.tet, tuple(inv))


@dataclass(frozen=True)
class CornerStep:
    """One passage of a peripheral path through the corner triangle ``(tet, vertex)``.

    ``entry`` and ``exit`` name triangle sides by the tetrahedron face they
    lie in; the corner passed is the remaining local vertex.
    """

    tet: int
    vertex: int
    entry: int
    exit: int

    @property
    def corner(self) -> int:
        (c,) = {0, 1, 2, 3} - {self.vertex, self.entry, self.exit}
        return c


@dataclass(frozen=True)
class CornerPath:
    steps: tuple[CornerStep, ...] = ()

    def reversed(self) -> "CornerPath":
        return CornerPath(tuple(CornerStep(s.tet, s.vertex, s.exit, s.entry)
                                for s in reversed(self.steps)))

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class Corner:
    tet: int
    edge: tuple[int, int]
    variant: int


@dataclass(frozen=True)
class EdgeClass:
    corners: tuple[Corner, ...]

    @property
    def degree(self) -> int:
        return len(self.corners)


@dataclass(frozen=True)
class Reduction:
    """Substitute gluing used when the tetrahedra ``removed`` degenerate to z = 1.

    ``pairings`` and ``peripheral`` refer to tetrahedra by their index in
    the full triangulation.
    """

    removed: tuple[int, ...]
    pairings: tuple[FacePairing, ...]
    peripheral: tuple[tuple["CornerPath", "CornerPath"], ...] = ()


@dataclass
class ValidationReport:
    checks: dict[str, bool] = field(default_factory=dict)
    defects: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.checks.values()) and not self.defects

    def fail(self, check: str, message: str) -> None:
        self.checks[check] = False
        self.defects.append(message)

    def __str__(self):
        lines = [f"{name}: {'pass' if ok else 'FAIL'}" for name, ok in self.checks.items()]
        lines += [f"  defect: {d}" for d in self.defects]
        return "\n".join(lines)


class TriangulationError(ValueError):
    pass


@dataclass(frozen=True)
class Triangulation:
    tetrahedra: tuple[Tetrahedron, ...]
    pairings: tuple[FacePairing, ...]
    # per cusp: (mu, lambda)
    peripheral: tuple[tuple[CornerPath, CornerPath], ...] = ()
    name: str = ""
    reductions: tuple[Reduction, ...] = ()

    @property
    def num_tetrahedra(self) -> int:
        return len(self.tetrahedra)

    def tet_index(self, name: str) -> int:
        for i, t in enumerate(self.tetrahedra):
            if t.name == name:
                return i
        raise KeyError(f"no tetrahedron named {name!r}")

    @cached_property
    def gluing(self) -> dict[tuple[int, int], FacePairing]:
        """(tet, face) -> pairing leaving through that face.  Requires a
        structurally valid triangulation."""
        table: dict[tuple[int, int], FacePairing] = {}
        for p in self.pairings:
            for q in (p, p.inverse()):
                key = (q.tet, q.face)
                if key in table:
                    raise TriangulationError(
                        f"face glued more than once: {self.tetrahedra[q.tet].name}"
                        f"^{self.tetrahedra[q.tet].labels[q.face]}")
                table[key] = q
        missing = [(t, f) for t in range(self.num_tetrahedra) for f in range(4) if (t, f) not in table]
        if missing:
            t, f = missing[0]
            raise TriangulationError(
                f"unglued face {self.tetrahedra[t].name}^{self.tetrahedra[t].labels[f]}")
        return table

    def face_name(self, tet: int, face: int) -> str:
        t = self.tetrahedra[tet]
        return f"{t.name}^{t.labels[face]}"

    def pairing_name(self, p: FacePairing) -> str:
        return f"{self.face_name(p.tet, p.face)} <-> {self.face_name(p.other, p.other_face)}"

    @cached_property
    def edge_classes(self) -> tuple[EdgeClass, ...]:
        return tuple(edge_classes(self))

    @cached_property
    def cusps(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Vertex classes, each a sorted tuple of (tet, vertex)."""
        parent = {(t, v): (t, v) for t in range(self.num_tetrahedra) for v in range(4)}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (t, f), p in self.gluing.items():
            for v in range(4):
                if v != f:
                    a, b = find((t, v)), find((p.other, p.perm[v]))
                    if a != b:
                        parent[max(a, b)] = min(a, b)
        classes = defaultdict(list)
        for x in parent:
            classes[find(x)].append(x)
        return tuple(tuple(sorted(c)) for _, c in sorted(classes.items()))

    def cusp_of(self, tet: int, vertex: int) -> int:
        for i, c in enumerate(self.cusps):
            if (tet, vertex) in c:
                return i
        raise KeyError((tet, vertex))

    @property
    def num_cusps(self) -> int:
        return len(self.cusps)

    def with_peripheral(self, peripheral) -> "Triangulation":
        return Triangulation(self.tetrahedra, self.pairings, tuple(peripheral), self.name, self.reductions)

    def with_reductions(self, reductions) -> "Triangulation":
        return Triangulation(self.tetrahedra, self.pairings, self.peripheral, self.name, tuple(reductions))

    def reduced(self, red: Reduction) -> tuple["Triangulation", list[int]]:
        """The triangulation left after collapsing ``red.removed``, and the
        indices of its tetrahedra in ``self``."""
        keep = [i for i in range(self.num_tetrahedra) if i not in red.removed]
        new = {old: k for k, old in enumerate(keep)}
        pairs = [FacePairing(new[p.tet], p.face, new[p.other], p.perm)
                 for p in self.pairings + red.pairings
                 if p.tet in new and p.other in new]
        periph = tuple(
            tuple(CornerPath(tuple(CornerStep(new[s.tet], s.vertex, s.entry, s.exit) for s in c.steps))
                  for c in pair)
            for pair in red.peripheral)
        tets = tuple(self.tetrahedra[i] for i in keep)
        return Triangulation(tets, tuple(pairs), periph, self.name + "-reduced"), keep

    def relabeled(self, order: Sequence[int]) -> "Triangulation":
        """Reorder tetrahedra: new tetrahedron ``i`` is old ``order[i]``."""
        new_index = {old: new for new, old in enumerate(order)}
        tets = tuple(self.tetrahedra[o] for o in order)
        pairs = tuple(FacePairing(new_index[p.tet], p.face, new_index[p.other], p.perm)
                      for p in self.pairings)
        periph = tuple(
            tuple(CornerPath(tuple(CornerStep(new_index[s.tet], s.vertex, s.entry, s.exit)
                                   for s in c.steps)) for c in pair)
            for pair in self.peripheral)
        return Triangulation(tets, pairs, periph, self.name)


def make_pairing(tri_tets: Sequence[Tetrahedron], a: str, face_a: str, b: str, face_b: str,
                 vertex_map: dict[str, str]) -> FacePairing:
    """Build a pairing from labels: ``(a, face_a) <-> (b, face_b)``."""
    names = [t.name for t in tri_tets]
    ia, ib = names.index(a), names.index(b)
    ta, tb = tri_tets[ia], tri_tets[ib]
    perm = [None] * 4
    fa, fb = ta.index(face_a), tb.index(face_b)
    perm[fa] = fb
    for src, dst in vertex_map.items():
        perm[ta.index(src)] = tb.index(dst)
    if None in perm or sorted(perm) != [0, 1, 2, 3]:
        raise TriangulationError(f"bad vertex bijection for {a}^{face_a} <-> {b}^{face_b}")
    return FacePairing(ia, fa, ib, tuple(perm))


def edge_classes(tri: Triangulation) -> list[EdgeClass]:
    """Orbits of tetrahedron edges under the face pairings, in cyclic order."""
    glue = tri.gluing
    seen: set[tuple[int, frozenset]] = set()
    classes = []
    for t in range(tri.num_tetrahedra):
        for a, b in itertools.combinations(range(4), 2):
            if (t, frozenset((a, b))) in seen:
                continue
            c, d = (i for i in range(4) if i not in (a, b))
            start = (t, a, b, c, d)
            state = start
            corners = []
            while True:
                tt, aa, bb, cc, dd = state
                key = (tt, frozenset((aa, bb)))
                if key in seen:
                    raise TriangulationError(
                        f"edge {tri.tetrahedra[tt].name}:{aa}{bb} identified with itself in reverse")
                seen.add(key)
                corners.append(Corner(tt, (min(aa, bb), max(aa, bb)),
                                      tri.tetrahedra[tt].edge_variant(aa, bb)))
                p = glue[(tt, dd)]
                s = p.perm
                state = (p.other, s[aa], s[bb], s[dd], s[cc])
                if state == start:
                    break
                if (state[0], frozenset(state[1:3])) == (t, frozenset((a, b))):
                    raise TriangulationError(
                        f"edge {tri.tetrahedra[t].name}:{a}{b} identified with itself in reverse")
            classes.append(EdgeClass(tuple(corners)))
    return classes


# ---------------------------------------------------------------------------
# cusp cross-sections

Triangle = tuple[int, int]  # (tet, chopped vertex)


@dataclass(frozen=True)
class CuspTriangulation:
    triangles: tuple[Triangle, ...]
    # per triangle: corner vertex -> modulus variant of the edge (vertex, corner)
    corner_variants: tuple[dict[int, int], ...]
    # (triangle index, side) -> (triangle index, side)
    adjacency: dict[tuple[int, int], tuple[int, int]]
    num_vertices: int

    @property
    def num_edges(self) -> int:
        return len(self.adjacency) // 2

    @property
    def euler_characteristic(self) -> int:
        return self.num_vertices - self.num_edges + len(self.triangles)


def _corner_classes(tri: Triangulation, triangles: Iterable[Triangle]) -> dict:
    """Union-find over triangle corners (tet, v, w); returns corner -> representative."""
    parent = {}
    for t, v in triangles:
        for w in range(4):
            if w != v:
                parent[(t, v, w)] = (t, v, w)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    glue = tri.gluing
    for (t, v, w) in list(parent):
        for f in range(4):
            if f in (v, w):
                continue
            p = glue[(t, f)]
            other = (p.other, p.perm[v], p.perm[w])
            a, b = find((t, v, w)), find(other)
            if a != b:
                parent[max(a, b)] = min(a, b)
    return {x: find(x) for x in parent}


def cusp_triangulation(tri: Triangulation, cusp_index: int) -> CuspTriangulation:
    if not 0 <= cusp_index < tri.num_cusps:
        raise IndexError(f"cusp index {cusp_index} out of range (0..{tri.num_cusps - 1})")
    triangles = tri.cusps[cusp_index]
    position = {tr: i for i, tr in enumerate(triangles)}
    variants = tuple({w: tri.tetrahedra[t].edge_variant(v, w) for w in range(4) if w != v}
                     for t, v in triangles)
    adjacency = {}
    for i, (t, v) in enumerate(triangles):
        for w in range(4):
            if w == v:
                continue
            p = tri.gluing[(t, w)]
            adjacency[(i, w)] = (position[(p.other, p.perm[v])], p.perm[w])
    reps = _corner_classes(tri, triangles)
    return CuspTriangulation(triangles, variants, adjacency, len(set(reps.values())))


# ---------------------------------------------------------------------------
# peripheral paths

def path_is_closed(tri: Triangulation, path: CornerPath) -> bool:
    steps = path.steps
    if not steps:
        return True
    for s in steps:
        if len({s.vertex, s.entry, s.exit}) != 3:
            return False
    for cur, nxt in zip(steps, steps[1:] + steps[:1]):
        p = tri.gluing[(cur.tet, cur.exit)]
        if (p.other, p.perm[cur.vertex], p.perm[cur.exit]) != (nxt.tet, nxt.vertex, nxt.entry):
            return False
    return True


Crossing = tuple[int, int, int]  # (tet, vertex, side exited)


def _cross(tri: Triangulation, c: Crossing) -> Crossing:
    """The same side seen from the neighbouring triangle."""
    t, v, w = c
    p = tri.gluing[(t, w)]
    return (p.other, p.perm[v], p.perm[w])


def reduce_crossings(tri: Triangulation, crossings: list[Crossing], cyclic: bool = True) -> list[Crossing]:
    """Cancel immediate back-tracks (also across the base point if ``cyclic``)."""
    out: list[Crossing] = []
    for c in crossings:
        if out and _cross(tri, out[-1]) == c:
            out.pop()
        else:
            out.append(c)
    while cyclic and len(out) >= 2 and _cross(tri, out[-1]) == out[0]:
        out = out[1:-1]
    return out


def word_in_loops(tri: Triangulation, loops: Sequence[list[Crossing]], powers: Sequence[int]) -> list[Crossing]:
    """Freely reduced product of based loops given as crossing lists."""
    out: list[Crossing] = []
    for loop, k in zip(loops, powers):
        piece = loop if k > 0 else [_cross(tri, c) for c in reversed(loop)]
        out += piece * abs(k)
    return reduce_crossings(tri, out, cyclic=False)


def crossings_to_path(tri: Triangulation, crossings: list[Crossing]) -> CornerPath:
    if not crossings:
        return CornerPath()
    steps = []
    for prev, cur in zip(crossings[-1:] + crossings[:-1], crossings):
        t, v, entry = _cross(tri, prev)
        if (t, v) != cur[:2]:
            raise TriangulationError("crossing sequence is not a closed path")
        steps.append(CornerStep(t, v, entry, cur[2]))
    return CornerPath(tuple(steps))


def path_to_crossings(path: CornerPath) -> list[Crossing]:
    return [(s.tet, s.vertex, s.exit) for s in path.steps]


def concatenate(tri: Triangulation, *paths: CornerPath, powers: Sequence[int] | None = None) -> CornerPath:
    """Product of loops that share their first triangle."""
    powers = powers or [1] * len(paths)
    crossings: list[Crossing] = []
    base = None
    for path, k in zip(paths, powers):
        if not path.steps or k == 0:
            continue
        loop = path if k > 0 else path.reversed()
        first = (loop.steps[0].tet, loop.steps[0].vertex)
        if base is None:
            base = first
        elif first != base:
            raise TriangulationError("loops must start in the same triangle")
        crossings += path_to_crossings(loop) * abs(k)
    return crossings_to_path(tri, reduce_crossings(tri, crossings))


def intersection_number(tri: Triangulation, a: CornerPath, b: CornerPath) -> int:
    """Algebraic intersection of two closed peripheral paths.

    ``b`` is pushed to its left onto the 1-skeleton of the cusp
    triangulation, then signed crossings of ``a`` with that edge cycle
    are counted.  Sign convention: for the positively oriented basis
    (mu, lambda) of a cusp torus seen from the cusp, ``i(mu, lambda) = +1``.
    """
    primal: dict[Crossing, int] = {}
    for s in b.steps:
        tet = tri.tetrahedra[s.tet]
        c = s.corner
        if tet.is_left_turn(s.vertex, c, s.entry, s.exit):
            continue
        # right-hand corner: b runs along side c from corner s.exit to corner s.entry
        ccw = tet.cusp_ccw(s.vertex)
        i = ccw.index(s.exit)
        interior_left = ccw[(i + 1) % 3] == s.entry
        key = (s.tet, s.vertex, c)
        primal[key] = primal.get(key, 0) + (1 if interior_left else -1)
    total = 0
    for t, v, w in path_to_crossings(a):
        total -= primal.get((t, v, w), 0)
        total += primal.get(_cross(tri, (t, v, w)), 0)
    return total


def _cusp_graph(tri: Triangulation, cusp: int):
    triangles = tri.cusps[cusp]
    sides = {}  # canonical side key -> (crossing, crossing)
    for t, v in triangles:
        for w in range(4):
            if w == v:
                continue
            c = (t, v, w)
            d = _cross(tri, c)
            key = min(c, d)
            sides[key] = (c, d)
    return triangles, sides


def homology_basis(tri: Triangulation, cusp: int) -> tuple[CornerPath, CornerPath]:
    """Two dual loops generating H_1 of the cusp torus (tree-cotree construction)."""
    a, b = based_generators(tri, cusp)
    return (crossings_to_path(tri, reduce_crossings(tri, a)),
            crossings_to_path(tri, reduce_crossings(tri, b)))


def based_generators(tri: Triangulation, cusp: int) -> tuple[list[Crossing], list[Crossing]]:
    """Crossing lists of two loops based at the first triangle of the cusp
    whose classes generate H_1 of the cusp torus."""
    triangles, sides = _cusp_graph(tri, cusp)
    reps = _corner_classes(tri, triangles)

    def side_ends(c):
        t, v, w = c
        x, y = (i for i in range(4) if i not in (v, w))
        return reps[(t, v, x)], reps[(t, v, y)]

    # primal spanning tree by BFS over cusp vertices
    adj = defaultdict(list)
    for key in sorted(sides):
        x, y = side_ends(key)
        adj[x].append((y, key))
        adj[y].append((x, key))
    root_v = min(adj)
    tree, seen, queue = set(), {root_v}, deque([root_v])
    while queue:
        x = queue.popleft()
        for y, key in adj[x]:
            if y not in seen:
                seen.add(y)
                tree.add(key)
                queue.append(y)
    # dual spanning tree avoiding primal tree edges
    root_t = triangles[0]
    parent: dict[Triangle, Crossing | None] = {root_t: None}
    queue = deque([root_t])
    cotree = set()
    while queue:
        tr = queue.popleft()
        for w in range(4):
            if w == tr[1]:
                continue
            c = (tr[0], tr[1], w)
            d = _cross(tri, c)
            key = min(c, d)
            if key in tree:
                continue
            nxt = d[:2]
            if nxt not in parent:
                parent[nxt] = c
                cotree.add(key)
                queue.append(nxt)
    leftover = [k for k in sorted(sides) if k not in tree and k not in cotree]
    if len(leftover) != 2:
        raise TriangulationError(f"cusp {cusp} is not a torus ({len(leftover)} generators)")

    def path_from_root(tr):
        out = []
        while parent[tr] is not None:
            c = parent[tr]
            out.append(c)
            tr = (c[0], c[1])
        return out[::-1]

    loops = []
    for key in leftover:
        c, d = sides[key]
        there = path_from_root(c[:2])
        back = [_cross(tri, x) for x in reversed(path_from_root(d[:2]))]
        loops.append(reduce_crossings(tri, there + [c] + back, cyclic=False))
    return loops[0], loops[1]


def rebase(tri: Triangulation, path: CornerPath, triangle: Triangle) -> CornerPath:
    """Rotate a closed path so it starts in ``triangle``."""
    for i, s in enumerate(path.steps):
        if (s.tet, s.vertex) == triangle:
            return CornerPath(path.steps[i:] + path.steps[:i])
    raise TriangulationError("path does not visit the requested triangle")


def degree(path: CornerPath, weight: Callable[[int, int], int]) -> int:
    """Sum of ``weight(tet, face)`` over the faces the path exits through."""
    return sum(weight(s.tet, s.exit) for s in path.steps)


# ---------------------------------------------------------------------------
# validation

def validate(tri: Triangulation) -> ValidationReport:
    report = ValidationReport()
    n = tri.num_tetrahedra
    if n == 0:
        report.fail("nonempty", "triangulation has no tetrahedra")
        return report
    report.checks["nonempty"] = True

    # faces glued exactly once, permutations well formed
    count = defaultdict(int)
    structural = True
    for p in tri.pairings:
        if sorted(p.perm) != [0, 1, 2, 3] or not (0 <= p.tet < n and 0 <= p.other < n):
            report.fail("faces_glued_once", f"malformed pairing {p}")
            structural = False
            continue
        count[(p.tet, p.face)] += 1
        count[(p.other, p.other_face)] += 1
    if structural:
        report.checks["faces_glued_once"] = True
        for t in range(n):
            for f in range(4):
                k = count.get((t, f), 0)
                if k > 1:
                    report.fail("faces_glued_once", f"face glued more than once: {tri.face_name(t, f)}")
                elif k == 0:
                    report.fail("faces_glued_once", f"unglued face: {tri.face_name(t, f)}")
        if 2 * len(tri.pairings) != 4 * n:
            report.fail("faces_glued_once", f"{len(tri.pairings)} pairings for {n} tetrahedra")
        structural = report.checks["faces_glued_once"]

    if structural:
        report.checks["orientation_reversing"] = True
        for p in tri.pairings:
            s = perm_sign(p.perm) * tri.tetrahedra[p.tet].orientation * tri.tetrahedra[p.other].orientation
            if s != -1:
                report.fail("orientation_reversing", f"pairing {tri.pairing_name(p)} preserves orientation")
    else:
        report.checks["orientation_reversing"] = False

    if not structural:
        for name in ("edges_equal_tetrahedra", "cusps_are_tori", "peripheral_curves"):
            report.checks[name] = False
        report.defects.append("combinatorial checks skipped: face gluing is not structurally valid")
        return report

    try:
        edges = tri.edge_classes
    except TriangulationError as exc:
        report.fail("edges_equal_tetrahedra", str(exc))
        edges = None
    if edges is not None:
        report.checks["edges_equal_tetrahedra"] = len(edges) == n
        if len(edges) != n:
            report.defects.append(f"{len(edges)} edge classes for {n} tetrahedra")

    report.checks["cusps_are_tori"] = True
    for i in range(tri.num_cusps):
        chi = cusp_triangulation(tri, i).euler_characteristic
        if chi != 0:
            report.fail("cusps_are_tori", f"cusp {i} has Euler characteristic {chi}")

    report.checks["peripheral_curves"] = True
    if tri.peripheral and len(tri.peripheral) != tri.num_cusps:
        report.fail("peripheral_curves", f"{len(tri.peripheral)} curve pairs for {tri.num_cusps} cusps")
    for i, pair in enumerate(tri.peripheral):
        for name, curve in zip(("mu", "lambda"), pair):
            if not curve.steps:
                report.fail("peripheral_curves", f"cusp {i}: {name} is empty")
            elif not path_is_closed(tri, curve):
                report.fail("peripheral_curves", f"cusp {i}: {name} is not closed")
            elif any(tri.cusp_of(s.tet, s.vertex) != i for s in curve.steps):
                report.fail("peripheral_curves", f"cusp {i}: {name} leaves the cusp")
        if report.checks["peripheral_curves"] and i < tri.num_cusps:
            k = intersection_number(tri, *pair)
            if abs(k) != 1:
                report.fail("peripheral_curves", f"cusp {i}: mu.lambda = {k}, expected +-1")
    return report
