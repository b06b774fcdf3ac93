"""Layered triangulations of once-punctured torus bundles.

The fiber is the torus R^2/Z^2 punctured at the lattice points.  A
triangulation of the fiber is a lattice basis (u, v) together with the
diagonal u + v; it is drawn with vertices 0, u, u+v, v.  Each letter
adds one tetrahedron whose bottom is the current triangulation and whose
top is the next one:

    L: u <- u + v        R: v <- u + v

Vertices are labelled by the Farey names of the lattice vectors, e.g.
(2, 1) is "2/1" and the origin is "0".  The top of the last tetrahedron
is identified with the bottom of the first by the inverse of the
monodromy M = product of letter matrices (L = [[1,1],[0,1]],
R = [[1,0],[1,1]] acting on (v, u) as columns).
"""

from __future__ import annotations

import math
import string

import numpy as np

from .triangulation import (CornerPath, FacePairing, Tetrahedron, Triangulation,
                            TriangulationError, based_generators, crossings_to_path,
                            intersection_number, reduce_crossings, word_in_loops)

LETTER_MATRIX = {"L": np.array([[1, 1], [0, 1]]), "R": np.array([[1, 0], [1, 1]])}

# local faces of a layer tetrahedron (vertices 0, u, u+v, v)
BOTTOM_FACES = (2, 0)
TOP_FACES = (3, 1)

# global orientation sign shared by every layer; fixed so that the edge
# equations come out in the positive-shape convention
LAYER_ORIENTATION = 1


class ReducibleMonodromy(TriangulationError):
    pass


def normalize_word(word: str) -> str:
    w = word.strip().upper()
    if not w or set(w) - {"L", "R"}:
        raise TriangulationError(f"monodromy word must be a nonempty string over L, R: {word!r}")
    if "L" not in w or "R" not in w:
        raise ReducibleMonodromy(f"reducible monodromy: word {word!r} must contain both L and R")
    return w


def monodromy_matrix(word: str) -> np.ndarray:
    m = np.eye(2, dtype=int)
    for c in normalize_word(word):
        m = m @ LETTER_MATRIX[c]
    return m


def farey_label(vec) -> str:
    p, q = int(vec[0]), int(vec[1])
    if p == 0 and q == 0:
        return "0"
    return f"{p}/{q}"


def tet_names(n: int) -> list[str]:
    letters = string.ascii_uppercase
    if n <= len(letters):
        return list(letters[:n])
    return [f"T{i}" for i in range(n)]


def _runs(word: str) -> list[int]:
    """Length of the cyclic maximal run containing each letter."""
    n = len(word)
    out = []
    for i in range(n):
        length = 1
        j = i - 1
        while length < n and word[j % n] == word[i]:
            length += 1
            j -= 1
        j = i + 1
        while length < n and word[j % n] == word[i]:
            length += 1
            j += 1
        out.append(length)
    return out


def default_preferred_edges(word: str) -> list[tuple[int, int]]:
    """Preferred edge of each layer.

    Inside a run of two or more equal letters the preferred edge is the
    one joining 0 to the basis vector the run keeps fixed (v for L, u for
    R); an isolated letter uses the diagonal 0 -- u+v.
    """
    edges = []
    for c, r in zip(word, _runs(word)):
        if r == 1:
            edges.append((0, 2))
        else:
            edges.append((0, 3) if c == "L" else (0, 1))
    return edges


def _match_faces(verts, nxt_verts):
    """Pair the top faces of a layer with the bottom faces of the next.

    ``verts`` and ``nxt_verts`` are the lattice positions of the four
    local vertices, both in the frame of the lower layer.  Faces are
    matched up to a lattice translation.
    """
    out = []
    for f in TOP_FACES:
        src = {i: tuple(verts[i]) for i in range(4) if i != f}
        for g in BOTTOM_FACES:
            dst = {j: tuple(nxt_verts[j]) for j in range(4) if j != g}
            found = None
            for base in dst.values():
                shift = np.subtract(base, next(iter(src.values())))
                lookup = {tuple(np.add(p, shift)): i for i, p in src.items()}
                if set(lookup) == set(dst.values()):
                    found = lookup
                    break
            if found is None:
                continue
            perm = [0] * 4
            perm[f] = g
            for j, p in dst.items():
                perm[found[p]] = j
            out.append((f, g, tuple(perm)))
            break
    if len(out) != 2:
        raise AssertionError("layer faces do not match")
    return out


def build_from_word(word: str, preferred_edges=None, names=None) -> Triangulation:
    """Layered triangulation of the punctured torus bundle with monodromy ``word``.

    Peripheral curves: mu crosses the fiber once and lambda is the
    boundary of the fiber (see :func:`bundle_peripheral_curves`).
    """
    w = normalize_word(word)
    n = len(w)
    names = names or tet_names(n)
    preferred_edges = preferred_edges or default_preferred_edges(w)

    u, v = np.array([0, 1]), np.array([1, 0])
    states = []
    for c in w:
        states.append((u, v))
        if c == "L":
            u = u + v
        else:
            v = u + v
    final = (u, v)

    def positions(st):
        a, b = st
        return [np.zeros(2, dtype=int), a, a + b, b]

    tets = []
    for k, st in enumerate(states):
        labels = tuple(farey_label(p) for p in positions(st))
        tets.append(Tetrahedron(names[k], labels, tuple(preferred_edges[k]), LAYER_ORIENTATION))

    pairings = []
    for k in range(n):
        nxt = states[k + 1] if k + 1 < n else final
        for f, g, perm in _match_faces(positions(states[k]), positions(nxt)):
            pairings.append(FacePairing(k, f, (k + 1) % n, perm))

    tri = Triangulation(tuple(tets), tuple(pairings), name=w)
    return tri.with_peripheral([bundle_peripheral_curves(tri)])


def fiber_weight(n: int):
    """Signed intersection with the fiber between the last and first layer."""
    def weight(tet: int, face: int) -> int:
        if tet == n - 1 and face in TOP_FACES:
            return 1
        if tet == 0 and face in BOTTOM_FACES:
            return -1
        return 0
    return weight


def bundle_peripheral_curves(tri: Triangulation) -> tuple[CornerPath, CornerPath]:
    """(mu, lambda) for a layered triangulation with one cusp.

    lambda is the boundary of the fiber (fiber degree 0).  mu crosses the
    fiber once, downward (fiber degree -1); among mu + k lambda for
    |k| <= 4 the shortest path is kept.  lambda is oriented so that the
    intersection number mu.lambda is +1.
    """
    d1, d2 = based_generators(tri, 0)
    weight = fiber_weight(tri.num_tetrahedra)
    a = sum(weight(t, w) for t, _, w in d1)
    b = sum(weight(t, w) for t, _, w in d2)
    if math.gcd(a, b) != 1:
        raise TriangulationError(f"fiber degree map is not onto (gcd {math.gcd(a, b)})")
    fib = word_in_loops(tri, [d1, d2], [b, -a])
    x, y = _bezout(a, b)
    sec = word_in_loops(tri, [d1, d2], [-x, -y])

    def closed(crossings):
        return crossings_to_path(tri, reduce_crossings(tri, crossings))

    lam = closed(fib)
    candidates = []
    for k in range(-4, 5):
        c = closed(word_in_loops(tri, [sec, fib], [1, k]))
        if c.steps:
            candidates.append((len(c), abs(k), -k, c))
    mu = min(candidates, key=lambda t: t[:3])[3]
    if not lam.steps:
        raise TriangulationError("degenerate peripheral basis")
    if intersection_number(tri, mu, lam) < 0:
        lam = lam.reversed()
    return mu, lam


def _bezout(a: int, b: int) -> tuple[int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return old_s, old_t
