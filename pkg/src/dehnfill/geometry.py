"""Volumes, dihedral angles and cusp summaries of a moduli assignment."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import spence

from .equations import DegenerateModulus, cusp_row, evaluate
from .triangulation import Triangulation, cusp_triangulation

FLAT_TOL = 1e-9
ANGLE_TOL = 1e-9
EUCLIDEAN_TOL = 1e-9


def variants(z: complex) -> tuple[complex, complex, complex]:
    """(z, 1/(1-z), 1-1/z)."""
    return z, 1 / (1 - z), 1 - 1 / z


def bloch_wigner(z: complex) -> float:
    """D(z) = Im Li2(z) + arg(1 - z) log|z|."""
    z = complex(z)
    # scipy's spence(w) is Li2(1 - w)
    li2 = complex(spence(1 - z))
    return li2.imag + np.angle(1 - z) * math.log(abs(z))


def tet_volume(z: complex) -> float:
    """Signed volume of the ideal tetrahedron of modulus z (negative when Im z < 0)."""
    z = complex(z)
    if z == 0 or z == 1:
        raise DegenerateModulus(f"degenerate tetrahedron: modulus {z}")
    if z.imag == 0:
        return 0.0
    return float(bloch_wigner(z))


def lobachevsky(theta, terms: int = 200_000):
    """Lobachevsky function by its Fourier series, sum sin(2 n t) / (2 n^2)."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    out = np.zeros_like(theta)
    n = np.arange(1, terms + 1, dtype=float)
    w = 0.5 / n ** 2
    for k, t in enumerate(theta):
        out[k] = np.dot(np.sin(2 * n * t), w)
    return out


def tet_volume_series(z: complex, terms: int = 200_000) -> float:
    """Volume as the sum of the Lobachevsky function over the three angles."""
    return float(lobachevsky([np.angle(v) for v in variants(complex(z))], terms).sum())


def corner_angles(z: complex) -> tuple[float, float, float]:
    """Dihedral angles at the edges carrying z, 1/(1-z), 1-1/z.

    Principal arguments off the real line; a flat tetrahedron gets angle
    pi at the variant with negative value and 0 at the other two (the
    limit from Im z -> 0+).
    """
    vs = variants(complex(z))
    if abs(complex(z).imag) > FLAT_TOL:
        return tuple(float(np.angle(v)) for v in vs)
    return tuple(math.pi if v.real < 0 else 0.0 for v in vs)


@dataclass
class CuspSummary:
    rho_mu: complex
    rho_lambda: complex
    euclidean: bool
    algebraic_area: float


@dataclass
class SolutionAnalysis:
    per_tet_volume: list
    total_volume: float
    edge_angle_sums: list[float]
    edge_angles_ok: list[bool]
    cusp_summaries: list[CuspSummary]
    flags: list[str] = field(default_factory=list)

    @property
    def angles_ok(self) -> bool:
        return all(self.edge_angles_ok)

    @property
    def max_angle_deviation(self) -> float:
        return max(abs(s - 2 * math.pi) for s in self.edge_angle_sums)


def analyze(tri: Triangulation, z, reference_volume: float | None = None,
            degenerate: tuple[int, ...] = ()) -> SolutionAnalysis:
    """Volumes, angle sums, angle-sum verdicts and cusp data.

    ``degenerate`` lists tetrahedra collapsed to modulus 1 (degenerate
    limits); their volume is reported as None and cusp data is skipped.
    ``reference_volume`` is the volume of the positive solution, if known.
    """
    z = np.asarray(z, dtype=complex)
    vols = [None if i in degenerate else tet_volume(zi) for i, zi in enumerate(z)]
    total = float(sum(v for v in vols if v is not None))

    sums, ok = [], []
    for ec in tri.edge_classes:
        s = 0.0
        for c in ec.corners:
            if c.tet in degenerate:
                s = math.nan
                break
            s += corner_angles(z[c.tet])[c.variant]
        sums.append(s)
        ok.append(bool(abs(s - 2 * math.pi) < ANGLE_TOL))

    cusps = []
    if not degenerate:
        for k, (mu, lam) in enumerate(tri.peripheral):
            rm, rl = evaluate(cusp_row(tri, mu), z), evaluate(cusp_row(tri, lam), z)
            ct = cusp_triangulation(tri, k)
            area = float(sum(z[t].imag / 2 for t, _ in ct.triangles))
            cusps.append(CuspSummary(rm, rl, abs(rm - 1) < EUCLIDEAN_TOL and abs(rl - 1) < EUCLIDEAN_TOL,
                                     area))

    flags = []
    if not all(ok):
        flags.append("C* violated")
    if reference_volume is not None and abs(total) < reference_volume - 1e-6:
        flags.append("volume too small relative to positive solution")
    return SolutionAnalysis(vols, total, sums, ok, cusps, flags)


def analysis_csv(tri: Triangulation, rows) -> str:
    """One line per (solution, tetrahedron): modulus and volume.

    ``rows`` is an iterable of (solution number, z, SolutionAnalysis).
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["solution", "tet", "re_z", "im_z", "volume"])
    for number, z, an in rows:
        for t, zi, v in zip(tri.tetrahedra, z, an.per_tet_volume):
            w.writerow([number, t.name, f"{zi.real:.7f}", f"{zi.imag:.7f}",
                        "*" if v is None else f"{v:.7f}"])
    return buf.getvalue()
