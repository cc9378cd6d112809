import re
from dataclasses import replace

import pytest
from hypothesis import given, settings

from gen import udrs_strategy
from udrs.core import Database, validate
from udrs.disambig import count_readings, enumerate_scopings
from udrs.lexicon import LexTheory
from udrs.modelsem import Oracle, checked_determiners
from udrs.rules import (Inconsistent, RuleError, ai, base_persistence, det_conditional, det_universal, diff,
                        find_embeddings, negated_clause, neu_step, persistent_in_clause, polarity,
                        polarity_by_enumeration, right_effect, structural_difference)
from udrs.syntax import parse_udrs

DETS = checked_determiners(2)
ORACLE = Oracle(LexTheory(), 3)


@settings(max_examples=300)
@given(udrs_strategy(4))
def test_polarity_path_rule_matches_enumeration(u):
    assert polarity(u) == polarity_by_enumeration(u)


def test_polarity_of_everybody_didnt(db_file):
    db, _ = db_file("ex18")
    p = polarity(db[0])
    assert p["l3"] == "-"                    # the verb sits under the negation in every reading
    assert p["l11"] == "?"                   # restrictor polarity depends on the scope of not
    assert p["l1"] == "?" and p["l2"] == "+"


def test_node_effects():
    u = parse_udrs("""(udrs :top t (clause :upper t :lower l0
      (comp :label l1 (quant few x :res l11 (drs () ((p x))) :scope l12))
      (comp :label l2 (quant more-than-half y :res l21 (drs () ((q y))) :scope l22))
      (base :label l0 ((r x y))) (ord (leq l2 (scope l1)))))""")
    n1, n2 = u.clause.nodes
    assert right_effect(n1, DETS) == "down" and right_effect(n2, DETS) == "up"
    assert base_persistence(n1, DETS) == "anti-persistent"
    assert base_persistence(n2, DETS) == "none"
    p = polarity(u)
    assert p["l12"] == "-" and p["l21"] == "?" and p["l11"] == "-"


@pytest.mark.parametrize("name,node,want", [
    ("ex19a", "l1", "none"), ("ex19d", "l4", "none"), ("ex19e", "l2", "anti-persistent"),
])
def test_persistence_in_context(goal_file, name, node, want):
    assert persistent_in_clause(goal_file(name), node) == want


def test_neu_adds_fresh_referent():
    u = parse_udrs("(udrs :top t (clause :upper t :lower l0 (base :label l0 ((p c))) (ord)))")
    st = neu_step(Database().add(u), 0, 2)
    assert len(st.output.universe) == 2 and validate(st.output) is None


def test_det_universal_to_constant(db_file):
    db, lex = db_file("ex16-atleast")
    embs = find_embeddings(db, 0, "l2", lex)
    assert [e.refs for e in embs] == [(("x", "john"),)]
    st = det_universal(db, 0, "l2", embs[0], lex, DETS)
    assert st.output.index == st.db[0].index is not None
    assert [n.label for n in st.output.clause.nodes] and "john" in str(st.output)
    assert ORACLE.entails(st.db.entries[:-1], st.output).holds


@pytest.mark.parametrize("name", ["ex16-few", "ex16-not"])
def test_det_refused_by_polarity(db_file, name):
    db, lex = db_file(name)
    node = next(n for n in db[0].clause.nodes if n.qname == "every" or n.kind == "quant" and n.cond.implicative)
    embs = find_embeddings(db, 0, node.label, lex)
    assert embs
    with pytest.raises(RuleError) as e:
        det_universal(db, 0, node.label, embs[0], lex, DETS)
    assert e.value.code == "polarity"


@pytest.mark.parametrize("name,ok", [
    ("ex6-coindexed", True), ("ex6-contraindexed", False), ("ex6-contraindexed-equivalent", True),
])
def test_det_conditional_side_condition(db_file, name, ok):
    db, lex = db_file(name)
    if ok:
        st = det_conditional(db, 0, 1, Oracle(lex, 3))
        assert ORACLE.entails(st.db.entries[:-1], st.output).holds
    else:
        with pytest.raises(RuleError) as e:
            det_conditional(db, 0, 1, Oracle(lex, 3))
        assert e.value.code == "equivalence"


def test_det_conditional_keeps_consequent_index(db_file):
    db, lex = db_file("ex17")
    st = det_conditional(db, 0, 1, Oracle(lex, 3))
    assert st.output.index == "j" and count_readings(st.output) == 2


def _readings(u):
    """Main-clause orders with freshening suffixes dropped."""
    return [tuple(re.sub(r"_\d+$", "", x) for x in s[()]) for s in enumerate_scopings(u)]


def test_ai_merges_two_readings():
    base = """(udrs :top t (clause :upper t :lower l0
      (comp :label l1 (quant some x :res l11 (drs () ((p x))) :scope l12))
      (comp :label l2 (quant every y :res l21 (drs () ((q y))) :scope l22))
      (base :label l0 ((r x y))) (ord {edge})))"""
    a = parse_udrs(base.format(edge="(leq l2 (scope l1))"))
    b = parse_udrs(base.format(edge="(leq l1 (scope l2))"))
    db = Database().add(a).add(b)
    st = ai(db, 0, 1)
    assert count_readings(st.output) == 2 and st.output.index is not None
    assert ORACLE.entails(db.entries, st.output).holds


def test_ai_refuses_over_generation():
    base = """(udrs :top t (clause :upper t :lower l0
      (comp :label l1 (quant some x :res l11 (drs () ((p x))) :scope l12))
      (comp :label l2 (quant every y :res l21 (drs () ((q y))) :scope l22))
      (comp :label l3 (neg :body l31))
      (base :label l0 ((r x y))) (ord {edges})))"""
    a = parse_udrs(base.format(edges="(leq l2 (scope l1)) (leq l3 (scope l2))"))
    b = parse_udrs(base.format(edges="(leq l1 (scope l3)) (leq l3 (scope l2))"))
    with pytest.raises(RuleError) as e:
        ai(Database().add(a).add(b), 0, 1)
    assert e.value.code == "over-generation"


def test_diff_narrows_to_single_reading(db_file):
    db, _ = db_file("diff3")
    assert count_readings(db[0]) == 3
    assert negated_clause(db[1]) == (0,)
    st = diff(db, 0, 1)
    assert _readings(st.output) == [("l3", "l2", "l1")]
    assert ORACLE.entails(db.entries, st.output).holds


def test_diff_identical_orders_is_falsity(db_file):
    db, _ = db_file("diff3-same")
    with pytest.raises(Inconsistent):
        diff(db, 0, 1)


def test_diff_needs_coindexing(db_file):
    db, _ = db_file("diff3")
    free = replace(db[1], clause=replace(db[1].clause, subs=tuple(
        replace(s, clause=replace(s.clause, index=None)) for s in db[1].clause.subs)))
    with pytest.raises(RuleError) as e:
        diff(db.replace_entry(1, free), 0, 1)
    assert e.value.code == "index"


def test_structural_difference_kinds():
    nodes = ["a", "b", "c"]
    d = structural_difference(set(), {("a", "b")}, nodes)
    assert d.kind == "order" and d.order == {("b", "a")}
    assert structural_difference({("a", "b")}, set(), nodes).kind == "falsity"
    d = structural_difference(set(), {("a", "b"), ("b", "c")}, nodes)
    assert d.kind == "readings" and len(d.readings) == 5
