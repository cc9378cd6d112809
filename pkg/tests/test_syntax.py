import pytest
from hypothesis import given

from gen import FIXTURES, udrs_strategy
from udrs.sexpr import loads
from udrs.syntax import (ParseError, load_database, parse_udrs, print_database, print_udrs, read_forms,
                         udrs_from_sexpr, udrs_to_sexpr)

UDRS_FILES = sorted(FIXTURES.glob("*.udrs"))


@pytest.mark.parametrize("path", UDRS_FILES, ids=lambda p: p.stem)
def test_fixture_roundtrip(path):
    for form in read_forms(path):
        if form[0] != "udrs":
            continue
        u = udrs_from_sexpr(form)
        text = print_udrs(u)
        assert parse_udrs(text) == u
        assert print_udrs(parse_udrs(text)) == text


@given(udrs_strategy())
def test_random_roundtrip(u):
    assert parse_udrs(print_udrs(u)) == u
    assert parse_udrs(print_udrs(u, compact=True)) == u


def test_database_print_parse(tmp_path):
    db, _ = load_database(FIXTURES / "ex18.udrs")
    p = tmp_path / "db.udrs"
    p.write_text(print_database(db))
    again, _ = load_database(p)
    assert again.entries == db.entries


def test_reading_set_extension_roundtrip():
    text = """(udrs :top t (clause :upper t :lower l0
      (comp :label l1 (quant some x :res l11 (drs () ((p x))) :scope l12))
      (comp :label l2 (quant every y :res l21 (drs () ((q y))) :scope l22))
      (base :label l0 ((r x y)))
      (ord (one-of (l2 l1)))))"""
    u = parse_udrs(text)
    assert u.clause.only == (("l2", "l1"),)
    assert parse_udrs(print_udrs(u)) == u


@pytest.mark.parametrize("text,fragment", [
    ("(udrs :top t (clause :upper t :lower l0 (base :label l9 ()) (ord)))", "differs from lower"),
    ("(udrs :top t (clause :upper t :lower l0 (comp :label l1 (blah)) (base :label l0 ()) (ord)))", "unknown"),
    ("(udrs :top t (clause :upper t :lower l0 (base :label l0 ()) (ord (leq l0 (scope l7)))))", ""),
    ("(udrs :top t)", ""),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError) as e:
        parse_udrs(text)
    assert fragment in str(e.value)


def test_parse_error_has_position():
    with pytest.raises(ParseError) as e:
        parse_udrs("(udrs :top t\n  (clause :upper t :lower l0 (base :label l9 ()) (ord)))")
    assert e.value.line == 2


def test_sexpr_form_of_udrs(goal_file):
    u = goal_file("ex15")
    assert udrs_from_sexpr(loads(print_udrs(u))) == u
    assert udrs_to_sexpr(u)[0] == "udrs"
