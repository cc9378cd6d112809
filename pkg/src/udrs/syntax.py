"""Textual formats: UDRS files, database files, model files, lexicon files.

UDRS grammar (s-expressions)::

    udrs   := (udrs :top LABEL [:index IDENT] [:universe (VAR*)] clause)
    clause := (clause :upper LABEL :lower LABEL [:index IDENT] comp* base ord)
    comp   := (comp :label LABEL kind)
    kind   := (quant NAME VAR :res LABEL drs :scope LABEL)
            | (neg :body LABEL)
            | (impl :ante LABEL drs :cons LABEL)
            | (sub clause)
    base   := (base :label LABEL (atom*))
    drs    := (drs (VAR*) (atom*))
    atom   := (NAME term+)
    ord    := (ord edge* [(one-of (LABEL*)+)])     edge := (leq LABEL scopeof)
    scopeof:= LABEL | (scope LABEL) | (res LABEL)

A term is a variable when some universe (or quantifier) of the UDRS
declares it, otherwise it is an individual constant.
"""
from __future__ import annotations

from pathlib import Path

from .core import Atom, Clause, Drs, Edge, Neg, Node, Quant, Sub, Udrs, UdrsError, labels
from .sexpr import SExpr, SExprError, dumps, loads, loads_all, pretty, where


class ParseError(UdrsError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        loc = f" at line {line}, column {col}" if line else ""
        super().__init__(msg + loc)
        self.line = line
        self.col = col


def _fail(msg: str, x: SExpr) -> ParseError:
    return ParseError(msg, *where(x))


def _sym(x: SExpr, what: str) -> str:
    if not isinstance(x, str):
        raise _fail(f"expected {what}, found a list", x)
    return x


def _head(x: SExpr, name: str) -> list:
    if not isinstance(x, list) or not x or x[0] != name:
        raise _fail(f"expected ({name} ...)", x)
    return x


def _take_kw(items: list, i: int, kw: str, ctx: SExpr) -> tuple[SExpr, int]:
    if i + 1 >= len(items) + 0 or items[i] != kw:
        found = items[i] if i < len(items) else "end of form"
        raise _fail(f"expected {kw}, found {dumps(found)}", ctx)
    return items[i + 1], i + 2


def _opt_kw(items: list, i: int, kw: str) -> tuple[SExpr | None, int]:
    if i < len(items) and items[i] == kw and i + 1 < len(items):
        return items[i + 1], i + 2
    return None, i


# ---------------------------------------------------------------- reading


def _atom(x: SExpr) -> Atom:
    if not isinstance(x, list) or len(x) < 2:
        raise _fail("atom needs a predicate and at least one term", x)
    return Atom(_sym(x[0], "predicate"), tuple(_sym(t, "term") for t in x[1:]))


def _atoms(x: SExpr) -> tuple[Atom, ...]:
    if not isinstance(x, list):
        raise _fail("expected a list of atoms", x)
    return tuple(_atom(a) for a in x)


def _drs(x: SExpr) -> Drs:
    f = _head(x, "drs")
    if len(f) != 3 or not isinstance(f[1], list):
        raise _fail("drs is (drs (VAR*) (atom*))", x)
    return Drs(tuple(_sym(v, "referent") for v in f[1]), _atoms(f[2]))


def _clause(x: SExpr) -> Clause:
    f = _head(x, "clause")
    upper, i = _take_kw(f, 1, ":upper", x)
    lower, i = _take_kw(f, i, ":lower", x)
    index, i = _opt_kw(f, i, ":index")
    nodes: list[Node] = []
    subs: list[Sub] = []
    rest = f[i:]
    if len(rest) < 2:
        raise _fail("clause needs a base and an ord form", x)
    for comp in rest[:-2]:
        c = _head(comp, "comp")
        lab, j = _take_kw(c, 1, ":label", comp)
        if len(c) != j + 1:
            raise _fail("comp holds exactly one kind form", comp)
        kind = c[j]
        if not isinstance(kind, list) or not kind:
            raise _fail("bad comp kind", comp)
        k = kind[0]
        if k == "quant":
            if len(kind) != 8:
                raise _fail("quant is (quant NAME VAR :res L drs :scope L)", kind)
            name, var = _sym(kind[1], "quantifier"), _sym(kind[2], "variable")
            res, j = _take_kw(kind, 3, ":res", kind)
            d = _drs(kind[j])
            scope, _ = _take_kw(kind, j + 1, ":scope", kind)
            d = Drs(tuple(v for v in d.universe if v != var), d.atoms)
            nodes.append(Node(_sym(lab, "label"), Quant(name, var, _sym(res, "label"), d, _sym(scope, "label"))))
        elif k == "impl":
            if len(kind) != 6:
                raise _fail("impl is (impl :ante L drs :cons L)", kind)
            ante, j = _take_kw(kind, 1, ":ante", kind)
            d = _drs(kind[j])
            cons, _ = _take_kw(kind, j + 1, ":cons", kind)
            nodes.append(Node(_sym(lab, "label"), Quant("every", None, _sym(ante, "label"), d, _sym(cons, "label"))))
        elif k == "neg":
            body, _ = _take_kw(kind, 1, ":body", kind)
            if len(kind) != 3:
                raise _fail("neg is (neg :body L)", kind)
            nodes.append(Node(_sym(lab, "label"), Neg(_sym(body, "label"))))
        elif k == "sub":
            if len(kind) != 2:
                raise _fail("sub holds one clause", kind)
            subs.append(Sub(_sym(lab, "label"), _clause(kind[1])))
        else:
            raise _fail(f"unknown component kind {k}", kind)
    b = _head(rest[-2], "base")
    blab, j = _take_kw(b, 1, ":label", b)
    if blab != lower:
        raise _fail(f"base label {blab} differs from lower bound {lower}", b)
    if len(b) != j + 1:
        raise _fail("base is (base :label L (atom*))", b)
    base = _atoms(b[j])
    o = _head(rest[-1], "ord")
    edges = []
    only = None
    items = list(o[1:])
    if items and isinstance(items[-1], list) and items[-1] and items[-1][0] == "one-of":
        alts = items.pop()[1:]
        if not alts or not all(isinstance(r, list) and all(isinstance(t, str) for t in r) for r in alts):
            raise _fail("one-of lists node orders, e.g. (one-of (l1 l2) (l2 l1))", o)
        only = tuple(tuple(r) for r in alts)
    for e in items:
        ef = _head(e, "leq")
        if len(ef) != 3:
            raise _fail("edge is (leq LABEL scopeof)", e)
        lo = _sym(ef[1], "label")
        hi = ef[2]
        if isinstance(hi, list):
            if len(hi) != 2 or hi[0] not in ("scope", "res"):
                raise _fail("scopeof is LABEL, (scope L) or (res L)", hi)
            edges.append(Edge(lo, _sym(hi[1], "label"), hi[0]))
        else:
            edges.append(Edge(lo, hi))
    return Clause(_sym(upper, "label"), _sym(lower, "label"), tuple(nodes), base,
                  tuple(edges), tuple(subs), None if index is None else _sym(index, "index"), only)


def _check_edges(u: Udrs, x: SExpr) -> None:
    from .core import clauses

    labs = labels(u)
    for _, c in clauses(u):
        nodes = set(c.node_labels)
        for e in c.ord:
            if e.lo not in labs:
                raise _fail(f"ORD edge mentions unknown label {e.lo}", x)
            if e.fn == "label" and e.hi not in labs:
                raise _fail(f"ORD edge mentions unknown label {e.hi}", x)
            if e.fn != "label" and e.hi not in nodes:
                raise _fail(f"ORD edge takes {e.fn} of {e.hi}, which is no node of clause {c.upper}", x)


def udrs_from_sexpr(x: SExpr) -> Udrs:
    f = _head(x, "udrs")
    top, i = _take_kw(f, 1, ":top", x)
    index, i = _opt_kw(f, i, ":index")
    uni, i = _opt_kw(f, i, ":universe")
    if len(f) != i + 1:
        raise _fail("udrs holds exactly one clause after its keywords", x)
    universe: tuple[str, ...] = ()
    if uni is not None:
        if not isinstance(uni, list):
            raise _fail(":universe takes a list", x)
        universe = tuple(_sym(v, "referent") for v in uni)
    u = Udrs(_sym(top, "label"), _clause(f[i]), None if index is None else _sym(index, "index"), universe)
    _check_edges(u, x)
    return u


def parse_udrs(text: str) -> Udrs:
    try:
        return udrs_from_sexpr(loads(text))
    except SExprError as e:
        raise ParseError(str(e).rsplit(" at line", 1)[0], e.line, e.col) from None


# ---------------------------------------------------------------- writing


def _atom_sx(a: Atom) -> list:
    return [a.pred, *a.args]


def _drs_sx(d: Drs) -> list:
    return ["drs", list(d.universe), [_atom_sx(a) for a in d.atoms]]


def _clause_sx(c: Clause) -> list:
    out: list = ["clause", ":upper", c.upper, ":lower", c.lower]
    if c.index is not None:
        out += [":index", c.index]
    for n in c.nodes:
        if isinstance(n.cond, Neg):
            kind: list = ["neg", ":body", n.cond.body]
        elif n.cond.implicative:
            q = n.cond
            kind = ["impl", ":ante", q.res, _drs_sx(q.restrictor), ":cons", q.scope]
        else:
            q = n.cond
            kind = ["quant", q.name, q.var, ":res", q.res, _drs_sx(q.restrictor), ":scope", q.scope]
        out.append(["comp", ":label", n.label, kind])
    for s in c.subs:
        out.append(["comp", ":label", s.host, ["sub", _clause_sx(s.clause)]])
    out.append(["base", ":label", c.lower, [_atom_sx(a) for a in c.base]])
    edges = []
    for e in c.ord:
        edges.append(["leq", e.lo, e.hi if e.fn == "label" else [e.fn, e.hi]])
    if c.only is not None:
        edges.append(["one-of", *[list(r) for r in c.only]])
    out.append(["ord", *edges])
    return out


def udrs_to_sexpr(u: Udrs) -> list:
    out: list = ["udrs", ":top", u.top]
    if u.index is not None:
        out += [":index", u.index]
    if u.universe:
        out += [":universe", list(u.universe)]
    out.append(_clause_sx(u.clause))
    return out


def print_udrs(u: Udrs, *, compact: bool = False) -> str:
    sx = udrs_to_sexpr(u)
    return dumps(sx) if compact else pretty(sx)


# ---------------------------------------------------------------- files


def read_forms(path: str | Path) -> list[SExpr]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        forms = loads_all(text)
    except SExprError as e:
        raise ParseError(f"{path}: " + str(e).rsplit(" at line", 1)[0], e.line, e.col) from None
    if len(forms) == 1 and isinstance(forms[0], list) and forms[0] and forms[0][0] == "database":
        forms = list(forms[0][1:])
    return forms


def load_udrs(path: str | Path) -> Udrs:
    forms = [f for f in read_forms(path) if isinstance(f, list) and f and f[0] == "udrs"]
    if len(forms) != 1:
        raise ParseError(f"{path}: expected one udrs form, found {len(forms)}")
    return udrs_from_sexpr(forms[0])


def load_database(path: str | Path):
    """Read a database file: ``udrs`` forms plus optional ``lex`` forms.

    Returns ``(Database, LexTheory)``.
    """
    from .core import Database
    from .lexicon import LexTheory, lex_from_sexpr

    db = Database()
    lex = LexTheory()
    for f in read_forms(path):
        if isinstance(f, list) and f and f[0] == "udrs":
            db = db.add(udrs_from_sexpr(f))
        elif isinstance(f, list) and f and f[0] == "lex":
            lex = lex.merge(lex_from_sexpr(f))
        else:
            raise _fail("database files hold udrs and lex forms only", f)
    return db, lex


def print_database(db) -> str:
    return "\n".join(print_udrs(u) for u in db.entries) + "\n"
