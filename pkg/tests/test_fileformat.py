import pytest

from dehnfill.bundle import build_from_word
from dehnfill.fileformat import ParseError, load, parse, save, serialize

from support import FIXTURE_NAMES, FIXTURES


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_round_trip_fixture(name):
    text = (FIXTURES / f"{name}.tri").read_text()
    tri = parse(text)
    assert serialize(parse(serialize(tri))) == serialize(tri)
    assert parse(serialize(tri)) == tri


def test_save_load(tmp_path):
    tri = build_from_word("LLRLR")
    p = tmp_path / "x.tri"
    save(tri, p)
    assert load(p) == tri


def test_reduction_block_survives():
    tri = load(FIXTURES / "l2r3.tri")
    assert len(tri.reductions) == 1
    assert [tri.tetrahedra[i].name for i in tri.reductions[0].removed] == ["D", "E"]


@pytest.mark.parametrize("text, lineno", [
    ("tet A labels a b c d preferred a b orientation +1\nbogus\n", 2),
    ("tet A labels a b c d preferred a x orientation +1\n", 1),
    ("tet A labels a b c d preferred a b orientation +1\npair (A, a) <-> (A, b) : b=a\n", 2),
    ("reduction A\n", 1),
    ("tet A labels a b c d preferred a b orientation +1\nend\n", 2),
    ("tet A labels a b c d preferred a b orientation +1\ncurve 0 mu = A@a[b>c]\n", 2),
])
def test_parse_errors_carry_line_numbers(text, lineno):
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert exc.value.lineno == lineno


def test_comments_and_blank_lines_ignored():
    tri = build_from_word("LR")
    text = "# header\n\n" + serialize(tri).replace("\n", "  # trailing\n", 1)
    assert parse(text) == tri
