"""Plain-text triangulation files (``.tri``).

Grammar (one statement per line, ``#`` starts a comment)::

    name <text>
    tet <Name> labels <l0> <l1> <l2> <l3> preferred <la> <lb> orientation <+1|-1>
    pair (<TetA>, <faceA>) <-> (<TetB>, <faceB>) : <a>=<b>, <a>=<b>, <a>=<b>
    curve <cusp> <mu|lambda> = <step> <step> ...
    reduction <TetX> [<TetY> ...]
      pair ...
      curve ...
    end

Faces are named by the label of the opposite vertex.  A curve step
``A@v[f>g]`` passes through the corner triangle of tetrahedron ``A`` at
vertex ``v``, entering through face ``f`` and leaving through face ``g``.
A ``reduction`` block lists tetrahedra that may degenerate to modulus 1
together with the substitute gluing (pairings between the remaining
tetrahedra) and optional curves for it.  Labels may not contain
whitespace or any of ``()[],=>@#``.
"""

from __future__ import annotations

import re
from pathlib import Path

from .triangulation import (CornerPath, CornerStep, FacePairing, Reduction, Tetrahedron,
                            Triangulation, TriangulationError, make_pairing)

_FORBIDDEN = set("()[],=>@#")


class ParseError(TriangulationError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


_PAIR = re.compile(r"pair\s*\(\s*(\S+?)\s*,\s*(\S+?)\s*\)\s*<->\s*\(\s*(\S+?)\s*,\s*(\S+?)\s*\)\s*:\s*(.*)$")
_STEP = re.compile(r"^([^@\s]+)@([^\[\s]+)\[([^>\]]+)>([^\]]+)\]$")


def _check_label(s: str, lineno: int) -> str:
    if not s or _FORBIDDEN & set(s) or any(c.isspace() for c in s):
        raise ParseError(lineno, f"invalid label {s!r}")
    return s


def _parse_pair(tets, line: str, lineno: int) -> FacePairing:
    m = _PAIR.match(line)
    if not m:
        raise ParseError(lineno, "malformed pair statement")
    a, fa, b, fb, rest = m.groups()
    vmap = {}
    for item in rest.split(","):
        if "=" not in item:
            raise ParseError(lineno, f"malformed vertex correspondence {item.strip()!r}")
        x, y = (t.strip() for t in item.split("="))
        vmap[x] = y
    if len(vmap) != 3:
        raise ParseError(lineno, "a pairing needs exactly three vertex correspondences")
    try:
        return make_pairing(tets, a, fa, b, fb, vmap)
    except (KeyError, ValueError) as exc:
        raise ParseError(lineno, str(exc)) from None


def _parse_curve(tets, rest: str, lineno: int):
    m = re.match(r"(\d+)\s+(mu|lambda)\s*=\s*(.*)$", rest)
    if not m:
        raise ParseError(lineno, "malformed curve statement")
    cusp, which, body = int(m.group(1)), m.group(2), m.group(3)
    names = [t.name for t in tets]
    steps = []
    for tok in body.split():
        sm = _STEP.match(tok)
        if not sm:
            raise ParseError(lineno, f"malformed curve step {tok!r}")
        t, v, f, g = sm.groups()
        if t not in names:
            raise ParseError(lineno, f"unknown tetrahedron {t!r}")
        tet = tets[names.index(t)]
        try:
            steps.append(CornerStep(names.index(t), tet.index(v), tet.index(f), tet.index(g)))
        except KeyError as exc:
            raise ParseError(lineno, str(exc)) from None
    return cusp, which, CornerPath(tuple(steps))


def _assemble_curves(found: dict, lineno: int):
    if not found:
        return ()
    out = []
    for k in range(max(found) + 1):
        pair = found.get(k, {})
        if set(pair) != {"mu", "lambda"}:
            raise ParseError(lineno, f"cusp {k} needs both a mu and a lambda curve")
        out.append((pair["mu"], pair["lambda"]))
    return tuple(out)


def parse(text: str) -> Triangulation:
    name = ""
    tets: list[Tetrahedron] = []
    pairings: list[FacePairing] = []
    curves: dict[int, dict[str, CornerPath]] = {}
    reductions = []
    block = None  # open reduction: [removed, pairings, curves, lineno]
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word = line.split()[0]
        if word == "name":
            name = line[4:].strip()
        elif word == "tet":
            if block is not None:
                raise ParseError(lineno, "tet statement inside a reduction block")
            m = re.match(r"tet\s+(\S+)\s+labels\s+(\S+)\s+(\S+)\s+(\S+)\s+(\S+)\s+preferred\s+(\S+)\s+(\S+)"
                         r"\s+orientation\s+([+-]?1)$", line)
            if not m:
                raise ParseError(lineno, "malformed tet statement")
            g = m.groups()
            labels = tuple(_check_label(x, lineno) for x in g[1:5])
            try:
                pref = (labels.index(g[5]), labels.index(g[6]))
                tets.append(Tetrahedron(_check_label(g[0], lineno), labels, pref, int(g[7])))
            except ValueError as exc:
                raise ParseError(lineno, str(exc)) from None
        elif word == "pair":
            p = _parse_pair(tets, line, lineno)
            (block[1] if block is not None else pairings).append(p)
        elif word == "curve":
            cusp, which, path = _parse_curve(tets, line[5:].strip(), lineno)
            target = block[2] if block is not None else curves
            if which in target.get(cusp, {}):
                raise ParseError(lineno, f"duplicate {which} curve for cusp {cusp}")
            target.setdefault(cusp, {})[which] = path
        elif word == "reduction":
            if block is not None:
                raise ParseError(lineno, "nested reduction block")
            names = [t.name for t in tets]
            removed = []
            for t in line.split()[1:]:
                if t not in names:
                    raise ParseError(lineno, f"unknown tetrahedron {t!r}")
                removed.append(names.index(t))
            block = [tuple(removed), [], {}, lineno]
        elif word == "end":
            if block is None:
                raise ParseError(lineno, "end without reduction")
            reductions.append(Reduction(block[0], tuple(block[1]), _assemble_curves(block[2], lineno)))
            block = None
        else:
            raise ParseError(lineno, f"unknown statement {word!r}")
    if block is not None:
        raise ParseError(lineno, "unterminated reduction block")
    return Triangulation(tuple(tets), tuple(pairings), _assemble_curves(curves, lineno), name,
                         tuple(reductions))


def _fmt_pair(tets, p: FacePairing) -> str:
    ta, tb = tets[p.tet], tets[p.other]
    corr = ", ".join(f"{ta.labels[i]}={tb.labels[p.perm[i]]}" for i in range(4) if i != p.face)
    return f"pair ({ta.name}, {ta.labels[p.face]}) <-> ({tb.name}, {tb.labels[p.other_face]}) : {corr}"


def _fmt_curves(tets, curves) -> list[str]:
    out = []
    for k, pair in enumerate(curves):
        for which, path in zip(("mu", "lambda"), pair):
            steps = " ".join(
                f"{tets[s.tet].name}@{tets[s.tet].labels[s.vertex]}"
                f"[{tets[s.tet].labels[s.entry]}>{tets[s.tet].labels[s.exit]}]" for s in path.steps)
            out.append(f"curve {k} {which} = {steps}")
    return out


def serialize(tri: Triangulation) -> str:
    tets = tri.tetrahedra
    lines = []
    if tri.name:
        lines.append(f"name {tri.name}")
    for t in tets:
        a, b = t.preferred_edge
        lines.append(f"tet {t.name} labels {' '.join(t.labels)} preferred {t.labels[a]} {t.labels[b]} "
                     f"orientation {t.orientation:+d}")
    lines += [_fmt_pair(tets, p) for p in tri.pairings]
    lines += _fmt_curves(tets, tri.peripheral)
    for red in tri.reductions:
        lines.append("reduction " + " ".join(tets[i].name for i in red.removed))
        lines += ["  " + _fmt_pair(tets, p) for p in red.pairings]
        lines += ["  " + c for c in _fmt_curves(tets, red.peripheral)]
        lines.append("end")
    return "\n".join(lines) + "\n"


def load(path) -> Triangulation:
    return parse(Path(path).read_text())


def save(tri: Triangulation, path) -> None:
    Path(path).write_text(serialize(tri))
