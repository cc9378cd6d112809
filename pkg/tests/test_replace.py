import pytest

from udrs.core import Atom, Database, Drs
from udrs.disambig import alpha_equal, count_readings
from udrs.lexicon import LexError, LexTheory
from udrs.modelsem import Oracle
from udrs.replace import (Context, Cond, db_hyponyms, gg_cond, gg_det, gg_drs, move_from_sexpr, move_to_sexpr,
                          propose_moves, rr, validate_detrules, validate_pi)
from udrs.rules import RuleError
from udrs.syntax import parse_udrs

LEX = LexTheory(hypo=frozenset({("snore", "sleep")}))
ORACLE = Oracle(LEX, 3)


def ctx(db=Database(), lex=LEX):
    return Context(db, lex, Oracle(lex, 3))


def test_gg_drs_direction():
    snore = Drs(("x",), (Atom("snore", ("x",)),))
    sleep = Drs(("x",), (Atom("sleep", ("x",)),))
    j = gg_drs(ctx(), snore, sleep)
    assert j and j.uses == (("snore", "sleep"),)
    assert not gg_drs(ctx(), sleep, snore)
    more = Drs(("x",), (Atom("snore", ("x",)), Atom("loud", ("x",))))
    assert gg_drs(ctx(), more, sleep)          # dropping a condition is always fine


def test_gg_cond_follows_persistence():
    a = Cond("quant", "some", Drs(("x",), (Atom("snore", ("x",)),)))
    b = Cond("quant", "some", Drs(("x",), (Atom("sleep", ("x",)),)))
    assert gg_cond(ctx(), a, b)                # persistent: widen the restrictor
    assert not gg_cond(ctx(), b, a)
    e1 = Cond("quant", "every", a.arg)
    e2 = Cond("quant", "every", b.arg)
    assert gg_cond(ctx(), e2, e1) and not gg_cond(ctx(), e1, e2)
    m1, m2 = Cond("quant", "more-than-half", a.arg), Cond("quant", "more-than-half", b.arg)
    assert not gg_cond(ctx(), m1, m2) and not gg_cond(ctx(), m2, m1)


def test_gg_cond_falls_back_to_oracle():
    rich = LexTheory(compl=frozenset({("awake", "sleep")}))
    a = Cond("quant", "some", Drs(("x",), (Atom("awake", ("x",)),)))
    b = Cond("quant", "some", Drs(("x",), (Atom("awake", ("x",)), Atom("awake", ("x",)))))
    j = gg_cond(ctx(lex=rich), b, a)
    assert j and j.branch == "1"


def test_gg_det_table():
    lex = LexTheory(detrules=frozenset({("no", "few")}))
    assert gg_det(ctx(lex=lex), "no", "few") and not gg_det(ctx(lex=lex), "few", "no")
    assert gg_det(ctx(), "every", "every").branch == "refl"


def test_detrule_validation():
    validate_detrules(LexTheory(detrules=frozenset({("no", "few")})))
    with pytest.raises(LexError):
        validate_detrules(LexTheory(detrules=frozenset({("every", "some")})))
    validate_pi(LexTheory())
    with pytest.raises(LexError):
        validate_pi(LexTheory(pi=frozenset({("every", "a")})))


def test_database_hyponyms(db_file):
    db, _ = db_file("ex18")
    assert db_hyponyms(db) == {("snore", "sleep")}


def test_rr_base_at_negative_label(db_file, goal_file):
    db, lex = db_file("ex18")
    step = rr(db, 0, ("base", "l3", (Atom("snore", ("x",)),)), lex, ORACLE)
    assert ("subst", "l3", "-") in step.discharges
    assert ("lex", "snore", "sleep") in step.discharges
    assert step.output.index == "i"
    assert alpha_equal(step.output, goal_file("ex18-goal"))
    assert ORACLE.entails(step.db.entries[:-1], step.output).holds


def test_rr_refuses_wrong_direction(db_file):
    db, lex = db_file("ex16-atleast")
    with pytest.raises(RuleError) as e:       # at a '+' label the new material must follow from the old
        rr(db, 0, ("base", "l3", (Atom("preoccupy", ("y", "x")), Atom("worry", ("y", "x")))), lex, ORACLE)
    assert e.value.code == "no-derivation"


def test_rr_undefined_polarity_blocks():
    u = parse_udrs("""(udrs :top t :index i (clause :upper t :lower l3
      (comp :label l1 (quant every x :res l11 (drs () ((sleep x))) :scope l12))
      (comp :label l2 (neg :body l21))
      (base :label l3 ((talk x))) (ord)))""")
    with pytest.raises(RuleError) as e:
        rr(Database().add(u), 0, ("res", "l1", Drs(("x",), (Atom("snore", ("x",)),))), LEX, ORACLE)
    assert e.value.code == "polarity"


def test_rr_structural_moves_get_fresh_index():
    u = parse_udrs("""(udrs :top t :index i (clause :upper t :lower l0
      (comp :label l1 (quant a x :res l11 (drs () ((p x))) :scope l12))
      (comp :label l2 (quant every y :res l21 (drs () ((q y))) :scope l22))
      (base :label l0 ((r x y))) (ord (leq l2 (scope l1)) (leq l0 (scope l2)))))""")
    db = Database().add(u)
    step = rr(db, 0, ("pi", "l1", "l2"), LexTheory(), Oracle(LexTheory(), 3))
    assert step.output.index not in (None, "i")
    assert ORACLE.entails(step.db.entries[:-1], step.output).holds
    with pytest.raises(RuleError):
        rr(db, 0, ("pi", "l2", "l1"), LexTheory(), Oracle(LexTheory(), 3))


def test_no_every_and_some_not():
    no = parse_udrs("""(udrs :top t (clause :upper t :lower l0
      (comp :label l1 (quant no x :res l11 (drs () ((p x))) :scope l12))
      (base :label l0 ((q x))) (ord)))""")
    step = rr(Database().add(no), 0, ("no-every", "l1"), LexTheory(), Oracle(LexTheory(), 3))
    assert {n.qname for n in step.output.clause.nodes} == {"every", "not"}
    assert count_readings(step.output) == 1
    sn = parse_udrs("""(udrs :top t (clause :upper t :lower l0
      (comp :label l1 (quant some x :res l11 (drs () ((p x))) :scope l12))
      (comp :label l2 (neg :body l21))
      (base :label l0 ((q x))) (ord (leq l2 (scope l1)))))""")
    step = rr(Database().add(sn), 0, ("some-not", "l1"), LexTheory(), Oracle(LexTheory(), 3))
    assert ORACLE.entails([sn], step.output).holds
    assert ORACLE.entails([step.output], sn).holds


@pytest.mark.parametrize("move", [
    ("base", "l3", (Atom("snore", ("x",)),)),
    ("res", "l1", Drs(("x",), (Atom("p", ("x",)),))),
    ("det", "l1", "few"), ("pi", "l1", "l2"), ("inst", "l2", "john"),
])
def test_move_sexpr_roundtrip(move):
    assert move_from_sexpr(move_to_sexpr(move)) == move


def test_propose_moves_finds_base_change(db_file, goal_file):
    db, _ = db_file("ex18")
    moves = propose_moves(db[0], goal_file("ex18-goal"))
    assert ("base", "l3", (Atom("snore", ("x",)),)) in moves
