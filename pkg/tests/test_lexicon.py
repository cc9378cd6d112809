import pytest

from udrs.lexicon import DEFAULT_PI, LexError, LexTheory, lex_from_sexpr, lex_to_sexpr
from udrs.sexpr import loads
from udrs.syntax import ParseError


def test_hyponymy_closure_is_transitive():
    lex = LexTheory(hypo=frozenset({("snore", "sleep"), ("sleep", "rest")}))
    assert lex.below("snore", "rest")
    assert lex.below("rest", "rest")
    assert not lex.below("rest", "snore")


def test_cycles_and_bad_complements_rejected():
    with pytest.raises(LexError):
        LexTheory(hypo=frozenset({("a", "b"), ("b", "a")}))
    with pytest.raises(LexError):
        LexTheory(compl=frozenset({("a", "a")}))
    with pytest.raises(LexError):
        LexTheory(compl=frozenset({("a", "b"), ("a", "c")}))


def test_with_hypo_skips_cycle_closing_pairs():
    lex = LexTheory(hypo=frozenset({("p", "q")})).with_hypo({("q", "p"), ("q", "r")})
    assert lex.below("p", "r") and not lex.below("q", "p")


def test_sexpr_roundtrip():
    lex = lex_from_sexpr(loads("(lex (hypo snore sleep) (compl awake sleep) (detrule no few) (pi a every))"))
    assert ("snore", "sleep") in lex.hypo and ("awake", "sleep") in lex.compl
    assert ("no", "few") in lex.detrules and lex.pi == DEFAULT_PI
    assert lex_from_sexpr(lex_to_sexpr(lex)) == lex


def test_bad_entry():
    with pytest.raises(ParseError):
        lex_from_sexpr(loads("(lex (synonym a b))"))
