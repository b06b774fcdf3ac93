"""Multistart damped Newton solver for gluing equation systems.

Unknowns are the moduli z; residuals are the log forms of the active
equations.  Edge and completeness equations are multiplicative, so their
residual is reduced modulo 2 pi i at every iterate; filling equations
keep their branch.  The system may be overdetermined (completeness gives
two rows per cusp), so each step is a least-squares solve.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .equations import TWO_PI_I, EquationSystem, assemble_system
from .geometry import FLAT_TOL, tet_volume

CANONICAL_START = complex(math.cos(math.pi / 3), math.sin(math.pi / 3))


@dataclass(frozen=True)
class SolverOptions:
    tolerance: float = 1e-12
    mult_tolerance: float = 1e-9
    max_iterations: int = 100
    starts: int = 2000
    seed: int = 20240611
    dedup_distance: float = 1e-8
    box_re: float = 3.0
    box_im: float = math.pi
    max_halvings: int = 30
    condition_limit: float = 1e14
    degenerate_radius: float = 1e-14
    flat_tol: float = FLAT_TOL
    # a diverged run ending within this distance of 1 hints at a degenerate limit
    limit_radius: float = 1e-3
    # converged points this close to 0 or 1 are degenerate, not solutions
    degenerate_solution_tol: float = 1e-7

    def __post_init__(self):
        if self.tolerance <= 0 or self.mult_tolerance <= 0 or self.dedup_distance <= 0:
            raise ValueError("tolerances must be positive")
        if self.starts < 1 or self.max_iterations < 1:
            raise ValueError("starts and max_iterations must be at least 1")


@dataclass
class Solution:
    z: np.ndarray
    residual_mult: float
    residual_log: float
    kind: str = ""
    conjugate_of: int | None = None
    iterations: int = 0
    damping_events: int = 0
    start_index: int = -1
    degenerate: tuple[int, ...] = ()
    note: str = ""

    @property
    def classification(self) -> str:
        if self.conjugate_of is not None:
            return f"conjugate_of({self.conjugate_of})"
        return self.kind

    @property
    def volume(self) -> float:
        return float(sum(tet_volume(x) for i, x in enumerate(self.z) if i not in self.degenerate))


@dataclass
class Divergence:
    reason: str
    z: np.ndarray
    iterations: int = 0

    def __bool__(self):
        return False


class _Compiled:
    """Dense arrays for the active equations of a system."""

    def __init__(self, system: EquationSystem, equations=None):
        eqs = system.active if equations is None else equations
        self.A = np.array([e.row.alpha for e in eqs], dtype=float)
        self.B = np.array([e.row.beta for e in eqs], dtype=float)
        self.const = np.array([1j * math.pi * e.row.half_turns - TWO_PI_I * e.target for e in eqs])
        self.fixed = np.array([e.fixed_branch for e in eqs], dtype=bool)

    def residual(self, z: np.ndarray) -> np.ndarray:
        """z has shape (..., n); returns (..., m)."""
        r = np.log(z) @ self.A.T + np.log(1 - z) @ self.B.T + self.const
        wrap = np.round(r.imag / (2 * math.pi))
        return np.where(self.fixed, r, r - TWO_PI_I * wrap)

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        """(..., m, n)."""
        return self.A / z[..., None, :] - self.B / (1 - z)[..., None, :]


def _lstsq_steps(J: np.ndarray, F: np.ndarray, cond_limit: float):
    """Minimum-norm least-squares solutions of J dz = -F for a batch."""
    U, s, Vh = np.linalg.svd(J, full_matrices=False)
    smax = s[..., 0]
    smin = s[..., -1]
    n = J.shape[-1]
    rank_ok = (s.shape[-1] == n) & (smin * cond_limit > smax)
    s_safe = np.where(s > 0, s, 1.0)
    coef = np.einsum("...ji,...j->...i", U.conj(), F) / s_safe
    dz = -np.einsum("...ij,...i->...j", Vh.conj(), coef)
    return dz, rank_ok


def _batch_newton(comp: _Compiled, Z0: np.ndarray, opts: SolverOptions):
    """Run damped Newton on every row of Z0.

    Returns final iterates, status strings ("converged" or a divergence
    reason), iteration counts and damping event counts.
    """
    Z = np.array(Z0, dtype=complex)
    m = Z.shape[0]
    status = np.zeros(m, dtype=object)
    status[:] = ""
    done = np.zeros(m, dtype=bool)
    iters = np.zeros(m, dtype=int)
    damp = np.zeros(m, dtype=int)

    def degenerate(z):
        return np.any((np.abs(z) < opts.degenerate_radius) | (np.abs(z - 1) < opts.degenerate_radius), axis=-1)

    bad = degenerate(Z)
    status[bad] = "start in degenerate neighborhood of 0 or 1"
    done |= bad
    with np.errstate(all="ignore"):
        F = np.zeros((m, comp.A.shape[0]), dtype=complex)
        F[~done] = comp.residual(Z[~done])
        norm = np.max(np.abs(F), axis=-1)
        conv = ~done & (norm < opts.tolerance)
        status[conv] = "converged"
        done |= conv
        for it in range(opts.max_iterations):
            idx = np.flatnonzero(~done)
            if idx.size == 0:
                break
            z, f, nf = Z[idx], F[idx], norm[idx]
            dz, ok = _lstsq_steps(comp.jacobian(z), f, opts.condition_limit)
            sing = ~ok | ~np.all(np.isfinite(dz), axis=-1)
            status[idx[sing]] = "singular Jacobian"
            done[idx[sing]] = True
            iters[idx] += 1
            live = ~sing
            t = np.ones(idx.size)
            accepted = np.zeros(idx.size, dtype=bool)
            znew = z.copy()
            fnew = f.copy()
            nfnew = nf.copy()
            halvings = np.zeros(idx.size, dtype=int)
            for _ in range(opts.max_halvings + 1):
                todo = live & ~accepted
                if not todo.any():
                    break
                cand = z[todo] + t[todo, None] * dz[todo]
                fc = comp.residual(cand)
                nc = np.max(np.abs(fc), axis=-1)
                good = np.isfinite(nc) & (nc < nf[todo])
                sel = np.flatnonzero(todo)
                take = sel[good]
                znew[take], fnew[take], nfnew[take] = cand[good], fc[good], nc[good]
                accepted[take] = True
                t[sel[~good]] *= 0.5
                halvings[sel[~good]] += 1
            failed = live & ~accepted
            status[idx[failed]] = f"damping failed after {opts.max_halvings} halvings"
            done[idx[failed]] = True
            damp[idx] += (halvings > 0) & accepted
            acc = idx[accepted]
            Z[acc], F[acc], norm[acc] = znew[accepted], fnew[accepted], nfnew[accepted]
            degen = degenerate(Z[acc])
            status[acc[degen]] = "step into degenerate neighborhood of 0 or 1"
            done[acc[degen]] = True
            conv = norm[acc] < opts.tolerance
            conv &= ~degen
            status[acc[conv]] = "converged"
            done[acc[conv]] = True
    status[~done] = "maximum iterations reached"
    return Z, status, iters, damp


def _finish(system: EquationSystem, z, status, iters, damp, start_index, opts):
    if status != "converged":
        return Divergence(status, z, int(iters))
    if np.any((np.abs(z) < opts.degenerate_solution_tol) | (np.abs(z - 1) < opts.degenerate_solution_tol)):
        return Divergence("converged to a degenerate modulus (0 or 1)", z, int(iters))
    res = system.residuals(z)
    if res["mult"] >= opts.mult_tolerance:
        return Divergence(f"multiplicative residual {res['mult']:.2e} above tolerance", z, int(iters))
    return Solution(np.array(z), res["mult"], res["log"], iterations=int(iters),
                    damping_events=int(damp), start_index=start_index)


def newton_solve(system: EquationSystem, start, opts: SolverOptions = SolverOptions()):
    """Damped Newton from one start; returns a Solution or a Divergence."""
    start = np.asarray(start, dtype=complex).reshape(1, -1)
    if start.shape[1] != system.n:
        raise ValueError(f"start has {start.shape[1]} entries, expected {system.n}")
    Z, st, it, dm = _batch_newton(_Compiled(system), start, opts)
    sol = _finish(system, Z[0], st[0], it[0], dm[0], 0, opts)
    if sol:
        sol.kind = classify_point(sol.z, opts.flat_tol)
    return sol


def random_starts(n: int, count: int, opts: SolverOptions) -> np.ndarray:
    """The canonical start followed by ``count - 1`` uniform samples in log space."""
    rng = np.random.default_rng(opts.seed)
    logs = (rng.uniform(-opts.box_re, opts.box_re, size=(count - 1, n))
            + 1j * rng.uniform(-opts.box_im, opts.box_im, size=(count - 1, n)))
    return np.vstack([np.full((1, n), CANONICAL_START), np.exp(logs)])


def classify_point(z, flat_tol: float = FLAT_TOL) -> str:
    z = np.asarray(z)
    im = z.imag
    if np.all(im > flat_tol):
        return "positive"
    if np.all(im >= -flat_tol):
        flat = np.abs(im) <= flat_tol
        if np.all((np.abs(z[flat]) > flat_tol) & (np.abs(z[flat] - 1) > flat_tol)):
            return "partially_flat"
    return "mixed"


def classify(solutions: list[Solution], opts: SolverOptions = SolverOptions()) -> list[Solution]:
    """Set ``kind`` and conjugate links (1-based numbers, later points to earlier)."""
    for k, s in enumerate(solutions):
        if not s.degenerate:
            s.kind = classify_point(s.z, opts.flat_tol)
        else:
            s.kind = "degenerate_limit"
        s.conjugate_of = None
        for j in range(k):
            if solutions[j].conjugate_of is None and \
                    np.max(np.abs(solutions[j].z.conj() - s.z)) < opts.dedup_distance and \
                    np.max(np.abs(s.z.imag)) > opts.flat_tol:
                s.conjugate_of = j + 1
                break
    return solutions


def _dedup(solutions: list[Solution], dist: float) -> list[Solution]:
    kept: list[Solution] = []
    for s in solutions:
        if all(np.max(np.abs(s.z - k.z)) >= dist for k in kept):
            kept.append(s)
    return kept


def _sort_key(s: Solution):
    return (-round(s.volume, 9),) + tuple(v for x in s.z for v in (round(x.real, 9), round(x.imag, 9)))


@dataclass
class SolveResult:
    solutions: list[Solution]
    starts: int
    divergences: dict[str, int] = field(default_factory=dict)
    # candidate degenerate limits: tetrahedra found near modulus 1 -> count
    limit_hints: dict[tuple[int, ...], int] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self):
        return len(self.solutions)

    def __getitem__(self, k):
        return self.solutions[k]


def multistart_solve(system: EquationSystem, opts: SolverOptions = SolverOptions(),
                     resolve_limits: bool = True) -> SolveResult:
    """All solutions found from ``opts.starts`` starts, deduplicated and sorted.

    Runs that drift toward modulus 1 on a set of tetrahedra for which the
    triangulation declares a reduction are followed up by solving the
    reduced triangulation; those solutions are lifted back with z = 1 on
    the collapsed tetrahedra and labelled ``degenerate_limit``.
    """
    comp = _Compiled(system)
    starts = random_starts(system.n, opts.starts, opts)
    Z, status, iters, damp = _batch_newton(comp, starts, opts)
    found, div, hints = [], {}, {}
    for k in range(len(starts)):
        r = _finish(system, Z[k], status[k], iters[k], damp[k], k, opts)
        if r:
            found.append(r)
            continue
        div[r.reason] = div.get(r.reason, 0) + 1
        if np.all(np.isfinite(r.z)):
            near = tuple(int(i) for i in np.flatnonzero(np.abs(r.z - 1) < opts.limit_radius))
            if near:
                hints[near] = hints.get(near, 0) + 1
    sols = _dedup(found, opts.dedup_distance)

    result = SolveResult([], len(starts), div, hints)
    tri = system.tri
    if resolve_limits and tri.reductions:
        for red in tri.reductions:
            if not any(set(red.removed) <= set(key) for key in hints):
                continue
            sub, keep = tri.reduced(red)
            sub_system = assemble_system(sub, list(system.fillings))
            sub_result = multistart_solve(sub_system, opts, resolve_limits=False)
            for s in sub_result:
                z = np.ones(tri.num_tetrahedra, dtype=complex)
                z[keep] = s.z
                s.z = z
                s.degenerate = tuple(red.removed)
                s.note = ("degenerate limit: " + ", ".join(tri.tetrahedra[i].name for i in red.removed)
                          + " collapsed to modulus 1; solved on the substitute gluing")
                sols.append(s)
            result.notes.append(
                f"{len(sub_result)} degenerate-limit solutions from the reduction removing "
                + ", ".join(tri.tetrahedra[i].name for i in red.removed))
    sols = _dedup(sols, opts.dedup_distance)
    sols.sort(key=_sort_key)
    result.solutions = classify(sols, opts)
    return result


def _poly(coeffs, w):
    return np.polyval(np.asarray(coeffs, dtype=complex), w)


def polynomial_check(z, poly, variable: int, expressions: dict | None = None) -> dict:
    """Residuals of a one-variable parametrization of a solution.

    ``poly``: integer coefficients, highest degree first, of the
    polynomial satisfied by w = z[variable].  ``expressions`` maps a
    tetrahedron index to (numerator, denominator) coefficient lists of
    the rational function of w that should equal its modulus.
    """
    z = np.asarray(z, dtype=complex)
    w = z[variable]
    out = {"P": abs(_poly(poly, w))}
    for i, (num, den) in (expressions or {}).items():
        out[i] = abs(z[i] - _poly(num, w) / _poly(den, w))
    out["max"] = max(out.values())
    return out


def _fmt(x: complex) -> str:
    return f"{x.real:.17g}{x.imag:+.17g}j"


def solution_report(system: EquationSystem, result: SolveResult, analyses=None) -> dict:
    """Structured report (JSON-ready, moduli at full precision)."""
    tri = system.tri
    out = {
        "triangulation": tri.name,
        "fillings": ["inf" if f is None else list(f) for f in system.fillings],
        "starts": result.starts,
        "divergences": result.divergences,
        "notes": result.notes + [
            f"no further solutions found from {result.starts} starts (not a proof of completeness)",
            "log determination hypothesis on developed peripheral curves is not verified",
        ],
        "solutions": [],
    }
    for k, s in enumerate(result.solutions):
        block = {
            "number": k + 1,
            "moduli": {t.name: _fmt(x) for t, x in zip(tri.tetrahedra, s.z)},
            "classification": s.classification,
            "kind": s.kind,
            "residual_mult": s.residual_mult,
            "residual_log": s.residual_log,
            "iterations": s.iterations,
            "damping_events": s.damping_events,
        }
        if s.degenerate:
            block["degenerate"] = [tri.tetrahedra[i].name for i in s.degenerate]
            block["note"] = s.note
        if analyses is not None:
            an = analyses[k]
            block["volumes"] = {t.name: (None if v is None else v)
                                for t, v in zip(tri.tetrahedra, an.per_tet_volume)}
            block["total_volume"] = an.total_volume
            block["edge_angle_sums"] = an.edge_angle_sums
            block["angle_sums_2pi"] = an.angles_ok
            block["cusps"] = [{"rho_mu": _fmt(c.rho_mu), "rho_lambda": _fmt(c.rho_lambda),
                               "euclidean": c.euclidean, "algebraic_area": c.algebraic_area}
                              for c in an.cusp_summaries]
            block["flags"] = an.flags
        out["solutions"].append(block)
    return out


def parse_complex(s: str) -> complex:
    return complex(s.replace(" ", ""))


def load_report(text: str, tri) -> list[Solution]:
    data = json.loads(text)
    sols = []
    names = [t.name for t in tri.tetrahedra]
    for b in data["solutions"]:
        z = np.array([parse_complex(b["moduli"][n]) for n in names])
        deg = tuple(names.index(n) for n in b.get("degenerate", []))
        m = re.fullmatch(r"conjugate_of\((\d+)\)", b.get("classification", ""))
        sols.append(Solution(z, b["residual_mult"], b["residual_log"], kind=b["kind"],
                             conjugate_of=int(m.group(1)) if m else None,
                             iterations=b.get("iterations", 0), damping_events=b.get("damping_events", 0),
                             degenerate=deg, note=b.get("note", "")))
    return sols
