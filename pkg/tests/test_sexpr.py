import pytest
from hypothesis import given, strategies as st

from udrs.sexpr import SExprError, dumps, loads, loads_all, pretty, where

symbols = st.from_regex(r"[a-z:@][a-z0-9_\-]{0,6}", fullmatch=True)
sexprs = st.recursive(symbols, lambda inner: st.lists(inner, max_size=4), max_leaves=25)


@given(sexprs)
def test_dumps_loads_roundtrip(x):
    assert loads(dumps(x)) == x


@given(sexprs, st.integers(10, 80))
def test_pretty_is_readable_back(x, width):
    assert loads(pretty(x, width)) == x


def test_comments_and_positions():
    forms = loads_all("; heading\n(a (b c)) ; trailing\n(d)")
    assert forms == [["a", ["b", "c"]], ["d"]]
    assert where(forms[1]) == (3, 1)


@pytest.mark.parametrize("text", ["(a", "a)", "(a))", ""])
def test_malformed_input_reports_position(text):
    with pytest.raises(SExprError):
        loads(text)


def test_error_carries_line_and_column():
    with pytest.raises(SExprError) as e:
        loads("(a\n  (b)")
    assert e.value.line >= 1 and e.value.col >= 1
