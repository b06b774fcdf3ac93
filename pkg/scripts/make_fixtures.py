"""Regenerate the shipped triangulation fixtures in ../fixtures.

lr3, l2r3 and fig8 come from the layered-bundle builder; jsj is
transcribed by hand below and only its peripheral curves are generated.
"""

from pathlib import Path

from dehnfill import fileformat
from dehnfill.bundle import build_from_word, bundle_peripheral_curves
from dehnfill.triangulation import (CornerPath, CornerStep, Reduction, homology_basis,
                                    intersection_number, make_pairing, validate)

OUT = Path(__file__).resolve().parent.parent / "fixtures"

JSJ = """\
name jsj
tet A labels 0 0/1 1/1 1/0 preferred 0 1/1 orientation +1
tet B labels 0 1/1 2/1 1/0 preferred 0 1/1 orientation +1
tet F labels t alpha beta gamma preferred alpha beta orientation +1
tet G labels b alpha beta gamma preferred alpha beta orientation -1
pair (A, 0/1) <-> (B, 2/1) : 0=0, 1/0=1/0, 1/1=1/1
pair (A, 1/0) <-> (B, 0) : 0=1/0, 0/1=1/1, 1/1=2/1
pair (A, 1/1) <-> (B, 1/0) : 0=0, 0/1=1/1, 1/0=2/1
pair (A, 0) <-> (F, gamma) : 0/1=t, 1/1=alpha, 1/0=beta
pair (B, 1/1) <-> (G, gamma) : 0=b, 1/0=beta, 2/1=alpha
pair (F, t) <-> (G, b) : alpha=alpha, beta=beta, gamma=gamma
pair (F, alpha) <-> (G, beta) : beta=gamma, gamma=alpha, t=b
pair (F, beta) <-> (G, alpha) : alpha=gamma, t=b, gamma=beta
"""


def l2r3():
    tri = build_from_word("LLRRR")
    tets = tri.tetrahedra
    subst = (make_pairing(tets, "C", "1/0", "A", "1/1", {"0": "0", "3/1": "1/0", "2/1": "0/1"}),
             make_pairing(tets, "C", "2/1", "A", "0", {"0": "0/1", "1/0": "1/0", "3/1": "1/1"}))
    removed = (tri.tet_index("D"), tri.tet_index("E"))
    sub, keep = tri.reduced(Reduction(removed, subst))
    mu, lam = bundle_peripheral_curves(sub)

    def lift(c):
        return CornerPath(tuple(CornerStep(keep[s.tet], s.vertex, s.entry, s.exit) for s in c.steps))

    return tri.with_reductions([Reduction(removed, subst, ((lift(mu), lift(lam)),))])


def jsj():
    tri = fileformat.parse(JSJ)
    mu, lam = homology_basis(tri, 0)
    if intersection_number(tri, mu, lam) < 0:
        mu = mu.reversed()
    return tri.with_peripheral([(mu, lam)])


def main():
    OUT.mkdir(exist_ok=True)
    fixtures = {"lr3": build_from_word("LRRR"), "l2r3": l2r3(),
                "fig8": build_from_word("LR"), "jsj": jsj()}
    for name, tri in fixtures.items():
        report = validate(tri)
        assert report.ok, (name, str(report))
        fileformat.save(tri, OUT / f"{name}.tri")
        print(f"wrote {name}.tri")


if __name__ == "__main__":
    main()
