"""Edge, completeness and Dehn filling equations as exponent data.

A row encodes  eps * prod z_i^alpha_i (1 - z_i)^beta_i  and, in log form,

    sum alpha_i Log z_i + beta_i Log(1 - z_i) + i pi * half_turns

with principal logs.  ``half_turns`` is an integer whose parity is the
sign (eps = (-1)^half_turns); it is bookkept corner by corner so that the
log form equals the sum of the principal logs of the corner moduli
whenever every shape has positive imaginary part.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .triangulation import (Z, INV_ONE_MINUS, ONE_MINUS_INV, CornerPath, Triangulation,
                            TriangulationError, path_is_closed)

TWO_PI_I = 2j * math.pi


class DegenerateModulus(ValueError):
    pass


@dataclass(frozen=True)
class ExponentRow:
    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    half_turns: int = 0

    @staticmethod
    def zero(n: int) -> "ExponentRow":
        return ExponentRow((0,) * n, (0,) * n, 0)

    @staticmethod
    def corner(n: int, tet: int, variant: int, power: int = 1) -> "ExponentRow":
        a, b = [0] * n, [0] * n
        h = 0
        if variant == Z:
            a[tet] = power
        elif variant == INV_ONE_MINUS:
            b[tet] = -power
        elif variant == ONE_MINUS_INV:
            a[tet], b[tet], h = -power, power, power
        else:
            raise ValueError(f"unknown modulus variant {variant}")
        return ExponentRow(tuple(a), tuple(b), h)

    @property
    def sign(self) -> int:
        return -1 if self.half_turns % 2 else 1

    @property
    def winding(self) -> int:
        """Integer w with half_turns = [sign == -1] + 2 w."""
        return (self.half_turns - (self.half_turns % 2)) // 2

    @property
    def n(self) -> int:
        return len(self.alpha)

    def __add__(self, other: "ExponentRow") -> "ExponentRow":
        return ExponentRow(tuple(x + y for x, y in zip(self.alpha, other.alpha)),
                           tuple(x + y for x, y in zip(self.beta, other.beta)),
                           self.half_turns + other.half_turns)

    def __neg__(self) -> "ExponentRow":
        return ExponentRow(tuple(-x for x in self.alpha), tuple(-x for x in self.beta), -self.half_turns)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, k: int) -> "ExponentRow":
        return ExponentRow(tuple(k * x for x in self.alpha), tuple(k * x for x in self.beta),
                           k * self.half_turns)

    def with_winding(self, w: int) -> "ExponentRow":
        return ExponentRow(self.alpha, self.beta, self.half_turns % 2 + 2 * w)

    def is_zero(self) -> bool:
        return not any(self.alpha) and not any(self.beta)

    def describe(self, names) -> str:
        """Human-readable multiplicative form."""
        parts = []
        for name, a, b in zip(names, self.alpha, self.beta):
            if a:
                parts.append(f"z_{name}" + (f"^{a}" if a != 1 else ""))
            if b:
                parts.append(f"(1-z_{name})" + (f"^{b}" if b != 1 else ""))
        body = " ".join(parts) or "1"
        return ("-" if self.sign < 0 else "") + body


def _check(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0) or np.any(z == 1):
        raise DegenerateModulus("degenerate tetrahedron: modulus equals 0 or 1")
    return z


def evaluate(row: ExponentRow, z) -> complex:
    z = _check(z)
    a, b = np.array(row.alpha), np.array(row.beta)
    return complex(row.sign * np.prod(z ** a * (1 - z) ** b))


def log_evaluate(row: ExponentRow, z, winding: int | None = None) -> complex:
    """Log form; ``winding`` overrides the row's own winding correction."""
    z = _check(z)
    h = row.half_turns if winding is None else row.half_turns % 2 + 2 * winding
    a, b = np.array(row.alpha), np.array(row.beta)
    return complex(np.dot(a, np.log(z)) + np.dot(b, np.log(1 - z)) + 1j * math.pi * h)


def edge_equation_rows(tri: Triangulation) -> list[ExponentRow]:
    n = tri.num_tetrahedra
    rows = []
    for ec in tri.edge_classes:
        row = ExponentRow.zero(n)
        for c in ec.corners:
            row = row + ExponentRow.corner(n, c.tet, c.variant)
        rows.append(row)
    return rows


def cusp_row(tri: Triangulation, curve: CornerPath) -> ExponentRow:
    """Dilation component of a closed peripheral path.

    The product of the moduli of the corners passed on the left divided
    by the product of those passed on the right.
    """
    n = tri.num_tetrahedra
    if not path_is_closed(tri, curve):
        raise TriangulationError("peripheral path is not closed")
    row = ExponentRow.zero(n)
    for s in curve.steps:
        tet = tri.tetrahedra[s.tet]
        c = s.corner
        variant = tet.edge_variant(s.vertex, c)
        sign = 1 if tet.is_left_turn(s.vertex, c, s.entry, s.exit) else -1
        row = row + ExponentRow.corner(n, s.tet, variant, sign)
    return row


@dataclass(frozen=True)
class Equation:
    row: ExponentRow
    # log target is 2 pi i * target
    target: int
    kind: str  # "edge", "complete", "filling"
    label: str
    # filling equations keep their branch fixed; the others are multiplicative
    fixed_branch: bool = False


@dataclass(frozen=True)
class EquationSystem:
    tri: Triangulation
    edges: tuple[Equation, ...]
    cusps: tuple[Equation, ...]
    fillings: tuple[object, ...]
    dropped: tuple[int, ...] = ()

    @property
    def n(self) -> int:
        return self.tri.num_tetrahedra

    @property
    def active(self) -> list[Equation]:
        """Equations handed to the solver."""
        return [e for i, e in enumerate(self.edges) if i not in self.dropped] + list(self.cusps)

    @property
    def all_equations(self) -> list[Equation]:
        return list(self.edges) + list(self.cusps)

    def residuals(self, z) -> dict[str, float]:
        """Max multiplicative and log deviations over every equation,
        dropped rows included."""
        mult = logr = 0.0
        for e in self.all_equations:
            if e.fixed_branch:
                d = abs(log_evaluate(e.row, z) - TWO_PI_I * e.target)
                mult = max(mult, abs(np.exp(log_evaluate(e.row, z)) - 1))
                logr = max(logr, d)
            else:
                mult = max(mult, abs(evaluate(e.row, z) - 1))
                d = log_evaluate(e.row, z) - TWO_PI_I * e.target
                logr = max(logr, abs(d - TWO_PI_I * round(d.imag / (2 * math.pi))))
        return {"mult": mult, "log": logr}

    def to_csv(self) -> str:
        names = [t.name for t in self.tri.tetrahedra]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "kind", "active"] + [f"alpha_{x}" for x in names]
                   + [f"beta_{x}" for x in names] + ["eps", "half_turns", "target_2pi_i"])
        active = {id(e) for e in self.active}
        for e in self.all_equations:
            w.writerow([e.label, e.kind, int(id(e) in active)] + list(e.row.alpha) + list(e.row.beta)
                       + [e.row.sign, e.row.half_turns, e.target])
        return buf.getvalue()


def _components(rows: list[ExponentRow]) -> list[list[int]]:
    """Group edge rows whose supports share a tetrahedron."""
    n = rows[0].n if rows else 0
    parent = list(range(len(rows)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    owner = {}
    for i, r in enumerate(rows):
        for t in range(n):
            if r.alpha[t] or r.beta[t]:
                if t in owner:
                    a, b = find(owner[t]), find(i)
                    parent[max(a, b)] = min(a, b)
                else:
                    owner[t] = i
    groups = {}
    for i in range(len(rows)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def parse_filling(value) -> tuple[int, int] | None:
    """``None``/"inf" for a complete cusp, else a coprime pair."""
    if value is None or (isinstance(value, str) and value.strip().lower() in ("inf", "oo", "complete")):
        return None
    if isinstance(value, str):
        p, q = (int(x) for x in value.split(","))
    else:
        p, q = value
    if math.gcd(p, q) != 1:
        raise ValueError(f"filling coefficients must be coprime, got ({p},{q})")
    return (p, q)


def assemble_system(tri: Triangulation, fillings=None, drop=None) -> EquationSystem:
    """Edge rows plus per-cusp completeness or filling rows.

    ``fillings`` is a list with one entry per cusp (``None`` = complete).
    ``drop`` overrides the redundant edge rows removed before solving; by
    default the last row of each connected component is dropped.
    """
    if tri.peripheral and len(tri.peripheral) != tri.num_cusps:
        raise TriangulationError("peripheral curves do not match the cusp count")
    fillings = [parse_filling(f) for f in (fillings or [None] * tri.num_cusps)]
    if len(fillings) != tri.num_cusps:
        raise ValueError(f"{len(fillings)} filling specs for {tri.num_cusps} cusps")
    if not tri.peripheral:
        raise TriangulationError("triangulation has no peripheral curves")

    rows = edge_equation_rows(tri)
    edges = tuple(Equation(r, 1, "edge", f"edge{i}") for i, r in enumerate(rows))
    if drop is None:
        drop = tuple(sorted(max(g) for g in _components(rows)))
    cusps = []
    for k, (f, (mu, lam)) in enumerate(zip(fillings, tri.peripheral)):
        rm, rl = cusp_row(tri, mu), cusp_row(tri, lam)
        if f is None:
            cusps.append(Equation(rm, 0, "complete", f"cusp{k}.mu"))
            cusps.append(Equation(rl, 0, "complete", f"cusp{k}.lambda"))
        else:
            p, q = f
            cusps.append(Equation(rm.scaled(p) + rl.scaled(q), 1, "filling",
                                  f"cusp{k}.fill({p},{q})", fixed_branch=True))
    return EquationSystem(tri, edges, tuple(cusps), tuple(fillings), tuple(drop))
