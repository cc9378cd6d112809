import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from gen import FIXTURES, random_udrs
from udrs.disambig import enumerate_scopings
from udrs.modelsem import (EvalError, FiniteModel, ModelSpace, Oracle, SAtom, SFalse, SNeg,
                           Vocabulary, drs_terms, evaluate, model_from_sexpr, model_to_sexpr, resolve)
from udrs.lexicon import LexTheory
from udrs.syntax import read_forms

# --------------------------------------------------------------- a naive reference evaluator

COUNT = {
    "every": lambda a, k: k == a, "some": lambda a, k: k >= 1, "a": lambda a, k: k >= 1,
    "at-least-one": lambda a, k: k >= 1, "no": lambda a, k: k == 0, "few": lambda a, k: k <= 2,
    "more-than-half": lambda a, k: 2 * k > a,
}


def _term(m, g, t):
    return g[t] if t in g else m.constants[t]


def _holds(m, g, c):
    if isinstance(c, SAtom):
        return tuple(_term(m, g, t) for t in c.args) in m.extensions.get(c.pred, frozenset())
    if isinstance(c, SNeg):
        return not _drs(m, g, c.body)
    if isinstance(c, SFalse):
        return False
    r = c.restrictor
    if c.var is None:
        for vals in itertools.product(m.domain, repeat=len(r.universe)):
            h = {**g, **dict(zip(r.universe, vals))}
            if all(_holds(m, h, x) for x in r.conds) and not _drs(m, h, c.scope):
                return False
        return True
    a = k = 0
    for d in m.domain:
        h0 = {**g, c.var: d}
        in_a = in_ab = False
        for vals in itertools.product(m.domain, repeat=len(r.universe)):
            h = {**h0, **dict(zip(r.universe, vals))}
            if all(_holds(m, h, x) for x in r.conds):
                in_a = True
                if _drs(m, h, c.scope):
                    in_ab = True
        a += in_a
        k += in_ab
    return COUNT[c.name](a, k)


def _drs(m, g, d):
    for vals in itertools.product(m.domain, repeat=len(d.universe)):
        h = {**g, **dict(zip(d.universe, vals))}
        if all(_holds(m, h, c) for c in d.conds):
            return True
    return False


def random_model(rng, n):
    dom = tuple(f"e{i}" for i in range(n))
    ext = {"p": frozenset((d,) for d in dom if rng.random() < 0.5),
           "q": frozenset((d,) for d in dom if rng.random() < 0.5),
           "r": frozenset((a, b) for a in dom for b in dom if rng.random() < 0.4)}
    return FiniteModel(dom, {"c": rng.choice(dom)}, ext, {"p": 1, "q": 1, "r": 2})


@settings(max_examples=150)
@given(st.integers(0, 10**9), st.integers(1, 3))
def test_vectorised_evaluator_matches_reference(seed, n):
    rng = random.Random(seed)
    u = random_udrs(rng, 3, sub=True)
    m = random_model(rng, n)
    for s in enumerate_scopings(u):
        d = resolve(u, s)
        if drs_terms(d)[1] - {"c"}:
            continue      # a subclause mentions a variable its reading leaves unbound
        want = _drs(m, {}, d)
        assert evaluate(m, d) == want


# --------------------------------------------------------------- model space


def test_model_space_counts_and_lexicon():
    voc = Vocabulary((("p", 1), ("q", 1)), ("c",))
    free = ModelSpace(voc, None, 2)
    assert free.size() == 4 + 16      # one constant: one placement up to renaming
    assert sum(b.size for b in free.batches()) == free.size()
    hyp = ModelSpace(voc, LexTheory(hypo=frozenset({("p", "q")})), 2)
    assert sum(b.size for b in hyp.batches()) == 3 + 9
    comp = ModelSpace(Vocabulary((("p", 1), ("q", 1)), ()), LexTheory(compl=frozenset({("p", "q")})), 2)
    for b in comp.batches():
        assert (b.ext["p"] == ~b.ext["q"]).all()


def test_model_file_roundtrip():
    m = model_from_sexpr(read_forms(FIXTURES / "ex-model.sexp")[0])
    assert model_from_sexpr(model_to_sexpr(m)) == m
    with pytest.raises(EvalError):
        FiniteModel(("a",), {"c": "b"})


# --------------------------------------------------------------- consequence relations


def _report(load_db, load_goal, db, goal, bound=3):
    d, lex = load_db(db)
    return Oracle(lex, bound).report(d, load_goal(goal), ("r1", "r3", "r4", "r8"))


def test_ex5b_relations(db_file, goal_file):
    r = _report(db_file, goal_file, "ex5b", "ex5b-goal")
    assert not r["r8"].holds and r["r4"].holds and not r["r1"].holds
    w = r["r8"].witness
    assert w is not None and not evaluate(w.model, resolve(goal_file("ex5b-goal"), w.goal_reading))


def test_reflexivity(db_file):
    db, lex = db_file("reflexivity")
    r = Oracle(lex, 3).report(db, db[0], ("r3", "r8"))
    assert r["r8"].holds and not r["r3"].holds


def test_explicit_models(db_file, goal_file, tmp_path):
    db, lex = db_file("ex5b")
    (tmp_path / "m.sexp").write_text("(model (domain a b) (pred sleep 1 (b)) (pred awake 1 (a)))")
    models = [model_from_sexpr(f) for f in read_forms(tmp_path / "m.sexp")]
    v = Oracle(lex, 3).entails(db, goal_file("ex5b-goal"), "r8", models)
    assert v.models == 1 and not v.holds


def test_equivalence(db_file):
    db, lex = db_file("ex6-contraindexed-equivalent")
    o = Oracle(lex, 3)
    from udrs.core import standalone
    ante = standalone(db[0], (0,))
    assert o.equivalent([], ante, db[1])
