"""Shared fixtures data and cached solves for the test suite."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

import numpy as np

from dehnfill.equations import assemble_system
from dehnfill.fileformat import load
from dehnfill.solver import SolverOptions, multistart_solve

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"
FIXTURE_NAMES = ("lr3", "l2r3", "fig8", "jsj")

# Published tables, transcribed to 7 decimals (tetrahedra in A, B, C, ... order).
LR3_TABLE = [
    [0.4275047 + 1.5755666j, 0.8395957 + 0.5911691j, 0.7271548 + 0.2284421j, 0.7271548 + 0.2284421j],
    [1.0724942 + 0.5921114j, 0.2854042 + 0.3945194j, -1.7271548 - 0.6779619j, -1.7271548 - 0.6779619j],
]
LR3_VOLUMES = [
    [0.9158907, 0.9158907, 0.5786694, 0.5786694],
    [0.8144270, 0.8144270, -0.2398640, -0.2398640],
]
LR3_TOTALS = [2.9891202, 1.1491260]

L2R3_TABLE = [
    [0.75 + 0.6614378j, 1.25 + 0.6614378j, 0.5 + 1.3228756j, 1, 1],
    [0.75 - 0.6614378j, 1.25 - 0.6614378j, 0.5 - 1.3228756j, 1, 1],
    [1.588633261, 1.370528159, -1.69885025, 0.3783840018, -3.387066549],
    [1.127804076, 1.113321168, -7.824476637, 0.2518509745, -0.6371698130],
    [0.4950484 + 0.3298695j, 0.6011109 + 0.9321327j, 1.3880304 + 0.9067580j, 0.5022247 + 0.2691269j,
     0.6077815 + 0.3441339j],
    [0.4950484 - 0.3298695j, 0.6011109 - 0.9321327j, 1.3880304 - 0.9067580j, 0.5022247 - 0.2691269j,
     0.6077815 - 0.3441339j],
    [0.1467328 + 1.2472524j, 1.9069644 + 0.7908171j, 0.3736330 + 0.5461534j, 1.1826577 - 2.5849142j,
     -0.5956636 + 1.2429350j],
    [0.1467328 - 1.2472524j, 1.9069644 - 0.7908171j, 0.3736330 - 0.5461534j, 1.1826577 + 2.5849142j,
     -0.5956636 - 1.2429350j],
]
# one-variable parametrization, w = z_E, coefficients highest degree first
L2R3_POLY = [1, 4, 3, 3, -4, 0, 2]
L2R3_EXPRESSIONS = {
    0: ([5, 19, 9, 6, -8, 17], [22]),
    1: ([10, 49, 62, 34, -16, 34], [44]),
    2: ([-12, -39, -4, -10, 72, -32], [11]),
    3: ([-4, -13, 6, 15, 2, 4], [22]),
}

LR3_POLY = [1, 2, -1, -3, 2]
# z_A = w^2/(1-w), z_B = (w^2+w-1)/w^2 with w = z_C
LR3_EXPRESSIONS = {0: ([1, 0, 0], [-1, 1]), 1: ([1, 1, -1], [1, 0, 0])}

# pinned fundamental domain for the LR^3 generators: tree pairings and base placement
LR3_TREE = (("A", "1/0"), ("B", "1/1"), ("C", "1/1"))
LR3_PLACEMENT = (("3/2", 0j), ("0", 1 + 0j), ("4/3", None))  # None = infinity


def lr3_generator_targets(w: complex):
    """Expected generator matrices (up to sign) as functions of w = z_C."""
    return [
        np.array([[1, w * w / (w * w + w - 1)], [0, 1]]),
        np.array([[0, -w], [1 / w, -w - 1]]),
        np.array([[1, -w * w], [-1, w * w + w - 1]]),
    ]


@lru_cache(maxsize=None)
def fixture(name: str):
    return load(FIXTURES / f"{name}.tri")


@lru_cache(maxsize=None)
def solved(name: str, starts: int = 2000, seed: int = SolverOptions().seed):
    tri = fixture(name)
    return multistart_solve(assemble_system(tri), SolverOptions(starts=starts, seed=seed))


def max_abs(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex))))


def best_match(target, solutions):
    """(index, error) of the solution closest to ``target`` in max norm."""
    errs = [max_abs(s.z, target) for s in solutions]
    k = int(np.argmin(errs))
    return k, errs[k]


ACCEPTANCE_LINES: list[str] = []


def record(number: int, ok: bool, detail: str) -> str:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line
