"""Finite-model semantics for resolved readings and the bounded consequence oracle.

Readings are turned into ordinary DRSs by :func:`resolve` and evaluated in
batches of finite models.  Every bound variable gets its own array axis, so
a batch of ``B`` models over an ``n``-element domain is evaluated with plain
numpy broadcasting on arrays of shape ``(B, n, ..., n)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import kernels
from .core import Database, Neg, Udrs, UdrsError, clauses, node_precedence
from .disambig import Scoping, correlated_assignments
from .lexicon import LexTheory


class EvalError(UdrsError):
    """A symbol the model does not interpret."""


# ---------------------------------------------------------------- resolved DRSs


@dataclass(frozen=True)
class SAtom:
    pred: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class SDrs:
    universe: tuple[str, ...] = ()
    conds: tuple = ()


@dataclass(frozen=True)
class SNeg:
    body: SDrs


@dataclass(frozen=True)
class SQuant:
    """Duplex condition; ``var=None`` quantifies over the whole restrictor universe."""

    name: str
    var: str | None
    restrictor: SDrs
    scope: SDrs


@dataclass(frozen=True)
class SFalse:
    """The reading of a clause whose correlation partner forced an order it lacks."""


@dataclass(frozen=True)
class Hole:
    """Placeholder for an unresolved label (used by the replacement judgements)."""

    label: str


SCond = SAtom | SNeg | SQuant | SFalse | Hole


def resolve(u: Udrs, s: Scoping) -> SDrs:
    """Nest the nodes of every clause in the order chosen by ``s``.

    A clause whose permutation is ``None`` contributes falsity.
    """
    perms = dict(s.per_clause)
    for path, c in clauses(u):
        if path not in perms:
            raise UdrsError(f"scoping has no entry for clause {c.upper}")
        p = perms[path]
        if p is not None and not _admits(u, c, p):
            raise UdrsError(f"order {p} is not a reading of clause {c.upper}")

    def clause_conds(path, c) -> list:
        perm = perms[path]
        if perm is None:
            return [SFalse()]
        hosted: dict[str, list] = {}
        for k, sub in enumerate(c.subs):
            hosted.setdefault(sub.host, []).extend(clause_conds(path + (k,), sub.clause))

        def chain(i: int) -> list:
            if i == len(perm):
                return [SAtom(a.pred, a.args) for a in c.base]
            n = c.node(perm[i])
            inner = SDrs((), tuple(chain(i + 1) + hosted.get(n.scope, [])))
            if isinstance(n.cond, Neg):
                cond: SCond = SNeg(inner)
            else:
                q = n.cond
                r = SDrs(q.restrictor.universe,
                         tuple(SAtom(a.pred, a.args) for a in q.restrictor.atoms) + tuple(hosted.get(q.res, [])))
                cond = SQuant(q.name, q.var, r, inner)
            return [cond] + hosted.get(n.label, [])

        return hosted.get(c.upper, []) + chain(0)

    return SDrs(u.universe, tuple(clause_conds((), u.clause)))


def _admits(u: Udrs, c, perm) -> bool:
    if sorted(perm) != sorted(c.node_labels):
        return False
    at = {l: i for i, l in enumerate(perm)}
    return all(at[a] < at[b] for a, b in node_precedence(u, c))


def drs_terms(d: SDrs) -> tuple[dict[str, int], set[str]]:
    """Predicates (with arity) and free terms, i.e. individual constants, of ``d``."""
    preds: dict[str, int] = {}
    consts: set[str] = set()

    def walk(x, bound: frozenset):
        if isinstance(x, SDrs):
            b = bound | set(x.universe)
            for c in x.conds:
                walk(c, b)
        elif isinstance(x, SAtom):
            if preds.setdefault(x.pred, len(x.args)) != len(x.args):
                raise EvalError(f"predicate {x.pred} used with two arities")
            consts.update(t for t in x.args if t not in bound)
        elif isinstance(x, SNeg):
            walk(x.body, bound)
        elif isinstance(x, SQuant):
            b = bound | ({x.var} if x.var else set()) | set(x.restrictor.universe)
            walk(SDrs((), x.restrictor.conds), b)
            walk(x.scope, b)
        elif isinstance(x, Hole):
            raise EvalError(f"cannot evaluate unresolved label {x.label}")

    walk(d, frozenset())
    return preds, consts


def drs_vars(d: SDrs) -> list[str]:
    out: list[str] = []

    def add(v):
        if v not in out:
            out.append(v)

    def walk(x):
        if isinstance(x, SDrs):
            for v in x.universe:
                add(v)
            for c in x.conds:
                walk(c)
        elif isinstance(x, SNeg):
            walk(x.body)
        elif isinstance(x, SQuant):
            if x.var:
                add(x.var)
            walk(x.restrictor)
            walk(x.scope)

    walk(d)
    return out


def sdrs_to_sexpr(d) -> list:
    """Resolved DRS as an s-expression: ``(drs (x ...) cond ...)``."""
    if isinstance(d, SDrs):
        return ["drs", list(d.universe), *[sdrs_to_sexpr(c) for c in d.conds]]
    if isinstance(d, SAtom):
        return [d.pred, *d.args]
    if isinstance(d, SNeg):
        return ["not", sdrs_to_sexpr(d.body)]
    if isinstance(d, SQuant):
        if d.var is None:
            return ["=>", sdrs_to_sexpr(d.restrictor), sdrs_to_sexpr(d.scope)]
        return [d.name, d.var, sdrs_to_sexpr(d.restrictor), sdrs_to_sexpr(d.scope)]
    if isinstance(d, SFalse):
        return ["false"]
    raise TypeError(d)


def show(d) -> str:
    """Compact linear notation, for messages and the CLI."""
    if isinstance(d, SDrs):
        inner = ", ".join(show(c) for c in d.conds)
        return f"[{' '.join(d.universe)} | {inner}]" if d.universe else f"[{inner}]"
    if isinstance(d, SAtom):
        return f"{d.pred}({','.join(d.args)})"
    if isinstance(d, SNeg):
        return f"not {show(d.body)}"
    if isinstance(d, SQuant):
        head = d.name if d.var is None else f"{d.name} {d.var}"
        if d.var is None:
            return f"({show(d.restrictor)} => {show(d.scope)})"
        return f"<{head}: {show(d.restrictor)}, {show(d.scope)}>"
    if isinstance(d, SFalse):
        return "FALSE"
    if isinstance(d, Hole):
        return f"?{d.label}"
    raise TypeError(d)


# ---------------------------------------------------------------- determiners


@dataclass(frozen=True)
class QuantifierSemantics:
    """A conservative determiner given by ``truth(|A|, |A & B|)``."""

    name: str
    truth: object  # callable (a, k) -> bool
    right: str        # up | down | none
    persistence: str  # persistent | anti-persistent | none

    def table(self, n: int) -> np.ndarray:
        t = np.zeros((n + 1, n + 1), dtype=np.bool_)
        for a in range(n + 1):
            for k in range(a + 1):
                t[a, k] = bool(self.truth(a, k))
        return t

    @property
    def decreasing(self) -> bool:
        return self.right == "down"


def determiner_table(few_k: int = 2) -> dict[str, QuantifierSemantics]:
    some = lambda a, k: k >= 1  # noqa: E731
    tab = [
        QuantifierSemantics("every", lambda a, k: k == a, "up", "anti-persistent"),
        QuantifierSemantics("some", some, "up", "persistent"),
        QuantifierSemantics("a", some, "up", "persistent"),
        QuantifierSemantics("at-least-one", some, "up", "persistent"),
        QuantifierSemantics("no", lambda a, k: k == 0, "down", "anti-persistent"),
        QuantifierSemantics("few", lambda a, k: k <= few_k, "down", "anti-persistent"),
        QuantifierSemantics("more-than-half", lambda a, k: 2 * k > a, "up", "none"),
    ]
    return {q.name: q for q in tab}


def validate_determiners(table: Mapping[str, QuantifierSemantics], max_n: int = 4) -> None:
    """Check every declared monotonicity flag against the truth function.

    Declared properties must hold on all domains up to ``max_n``; properties
    declared absent must fail on some domain of at most that size.
    """
    for q in table.values():
        found = np.ones(4, dtype=bool)
        for n in range(max_n + 1):
            found &= kernels.gq_properties(q.table(n), n)
        want = np.array([q.right == "up", q.right == "down",
                         q.persistence == "persistent", q.persistence == "anti-persistent"])
        if not np.array_equal(found, want):
            names = ["right-up", "right-down", "persistent", "anti-persistent"]
            bad = [names[i] for i in range(4) if found[i] != want[i]]
            raise UdrsError(f"determiner {q.name}: declared flags disagree with its truth function on {bad}")


@lru_cache(maxsize=16)
def checked_determiners(few_k: int = 2) -> dict[str, QuantifierSemantics]:
    if few_k < 0:
        raise UdrsError("few threshold must be non-negative")
    tab = determiner_table(few_k)
    validate_determiners(tab, max(4, few_k + 2))
    return tab


DECREASING = {"no", "few"}


# ---------------------------------------------------------------- models


@dataclass(frozen=True)
class FiniteModel:
    domain: tuple[str, ...]
    constants: Mapping[str, str] = field(default_factory=dict)
    extensions: Mapping[str, frozenset] = field(default_factory=dict)
    arities: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.domain:
            raise EvalError("models have non-empty domains")
        dom = set(self.domain)
        for c, d in self.constants.items():
            if d not in dom:
                raise EvalError(f"constant {c} denotes {d}, which is outside the domain")
        for p, ext in self.extensions.items():
            k = self.arities.get(p)
            for t in ext:
                if k is not None and len(t) != k:
                    raise EvalError(f"tuple {t} of {p} has the wrong arity")
                if not set(t) <= dom:
                    raise EvalError(f"tuple {t} of {p} leaves the domain")

    def __hash__(self):
        return hash((self.domain, tuple(sorted(self.constants.items())),
                     tuple(sorted((p, tuple(sorted(e))) for p, e in self.extensions.items()))))

    def batch(self, preds: Mapping[str, int] | None = None) -> "Batch":
        n = len(self.domain)
        pos = {d: i for i, d in enumerate(self.domain)}
        ext = {}
        want = dict(self.arities)
        if preds:
            want.update(preds)
        for p, k in want.items():
            arr = np.zeros((1,) + (n,) * k, dtype=np.bool_)
            for t in self.extensions.get(p, ()):
                arr[(0,) + tuple(pos[d] for d in t)] = True
            ext[p] = arr
        return Batch(n, {c: pos[d] for c, d in self.constants.items()}, ext)


@dataclass
class Batch:
    n: int
    consts: dict[str, int]
    ext: dict[str, np.ndarray]
    size: int = 1
    first_id: int = 0

    def __post_init__(self):
        for a in self.ext.values():
            self.size = a.shape[0]
            break

    def model(self, row: int, names: Sequence[str] | None = None) -> FiniteModel:
        dom = tuple(f"e{i}" for i in range(self.n))
        exts, ar = {}, {}
        for p, a in self.ext.items():
            ar[p] = a.ndim - 1
            exts[p] = frozenset(tuple(dom[i] for i in idx) for idx in zip(*np.nonzero(a[row])))
        return FiniteModel(dom, {c: dom[i] for c, i in self.consts.items()}, exts, ar)


# ---------------------------------------------------------------- evaluation


class Evaluator:
    """Evaluates resolved DRSs over every model of a batch at once."""

    def __init__(self, batch: Batch, dets: Mapping[str, QuantifierSemantics]):
        self.b = batch
        self.dets = dets
        self._tables: dict[str, np.ndarray] = {}

    def table(self, name: str) -> np.ndarray:
        t = self._tables.get(name)
        if t is None:
            q = self.dets.get(name)
            if q is None:
                raise EvalError(f"no truth conditions for determiner {name}")
            t = self._tables[name] = q.table(self.b.n)
        return t

    def truth(self, d: SDrs, free: Sequence[str] = ()) -> np.ndarray:
        """``(B,)`` truth values; variables in ``free`` are closed universally."""
        order = list(free) + [v for v in drs_vars(d) if v not in free]
        self.ax = {v: i + 1 for i, v in enumerate(order)}
        self.nd = 1 + len(order)
        self.bound: frozenset = frozenset(free)
        if free:
            r = self._drs(d, frozenset(free))
            r = np.broadcast_to(r, (r.shape[0],) + (self.b.n,) * len(free) + r.shape[1 + len(free):])
            r = r.all(axis=tuple(range(1, 1 + len(free))), keepdims=True)
        else:
            r = self._drs(d, frozenset())
        return r.reshape(r.shape[0], -1)[:, 0] if r.ndim > 1 else r

    def _ones(self) -> np.ndarray:
        return np.ones((self.b.size,) + (1,) * (self.nd - 1), dtype=np.bool_)

    def _conj(self, conds, bound) -> np.ndarray:
        acc = self._ones()
        for c in conds:
            acc = acc & self._cond(c, bound)
        return acc

    def _exists(self, arr, vars_) -> np.ndarray:
        axes = tuple(self.ax[v] for v in vars_)
        return arr.any(axis=axes, keepdims=True) if axes else arr

    def _drs(self, d: SDrs, bound) -> np.ndarray:
        b = bound | set(d.universe)
        return self._exists(self._conj(d.conds, b), d.universe)

    def _atom(self, a: SAtom, bound) -> np.ndarray:
        arr = self.b.ext.get(a.pred)
        if arr is None:
            raise EvalError(f"predicate {a.pred} is not interpreted")
        if arr.ndim - 1 != len(a.args):
            raise EvalError(f"predicate {a.pred} has arity {arr.ndim - 1}, used with {len(a.args)}")
        idx: list = [slice(None)]
        vars_ = []
        for t in a.args:
            if t in bound:
                idx.append(slice(None))
                vars_.append(t)
            else:
                c = self.b.consts.get(t)
                if c is None:
                    raise EvalError(f"constant {t} is not interpreted")
                idx.append(c)
        sub = arr[tuple(idx)]
        if not vars_:
            return sub.reshape((self.b.size,) + (1,) * (self.nd - 1))
        uniq = sorted(set(vars_), key=lambda v: self.ax[v])
        letters = {v: chr(ord("a") + i) for i, v in enumerate(uniq)}
        spec = "Z" + "".join(letters[v] for v in vars_) + "->Z" + "".join(letters[v] for v in uniq)
        sub = np.einsum(spec, sub)
        shape = [self.b.size] + [1] * (self.nd - 1)
        for v in uniq:
            shape[self.ax[v]] = self.b.n
        return sub.reshape(shape)

    def _cond(self, c, bound) -> np.ndarray:
        if isinstance(c, SAtom):
            return self._atom(c, bound)
        if isinstance(c, SNeg):
            return ~self._drs(c.body, bound)
        if isinstance(c, SFalse):
            return ~self._ones()
        if isinstance(c, SQuant):
            r = c.restrictor
            if c.var is None:
                b = bound | set(r.universe)
                body = self._conj(r.conds, b)
                scope = self._drs(c.scope, b)
                out = ~body | scope
                axes = tuple(self.ax[v] for v in r.universe)
                return out.all(axis=axes, keepdims=True) if axes else out
            b = bound | {c.var} | set(r.universe)
            body = self._conj(r.conds, b)
            A = self._exists(body, r.universe)
            AB = self._exists(body & self._drs(c.scope, b), r.universe)
            x = self.ax[c.var]
            ca, cab = np.broadcast_arrays(_count(A, x, self.b.n), _count(AB, x, self.b.n))
            return self.table(c.name)[ca, cab]
        if isinstance(c, Hole):
            raise EvalError(f"cannot evaluate unresolved label {c.label}")
        raise TypeError(c)


def _count(arr: np.ndarray, axis: int, n: int) -> np.ndarray:
    """Number of true cells along ``axis`` (kept as a length-1 axis)."""
    u = arr.view(np.uint8)
    if u.shape[axis] == 1:
        return u.astype(np.intp) * n
    out = np.zeros(u.shape[:axis] + (1,) + u.shape[axis + 1:], dtype=np.intp)
    for i in range(u.shape[axis]):
        out += u[(slice(None),) * axis + (slice(i, i + 1),)]
    return out


def evaluate(m: FiniteModel, d: SDrs, few_k: int = 2) -> bool:
    """Truth of ``d`` in ``m`` (some verifying embedding of the top universe)."""
    preds, consts = drs_terms(d)
    for c in consts:
        if c not in m.constants:
            raise EvalError(f"constant {c} is not interpreted")
    for p, k in preds.items():
        if p in m.arities and m.arities[p] != k:
            raise EvalError(f"predicate {p} has arity {m.arities[p]} in the model")
        if p not in m.extensions and p not in m.arities:
            raise EvalError(f"predicate {p} is not interpreted")
    batch = m.batch(preds)
    return bool(Evaluator(batch, checked_determiners(few_k)).truth(d)[0])


# ---------------------------------------------------------------- model spaces


def _restricted_growth(k: int, n: int) -> Iterator[tuple[int, ...]]:
    """Assignments of ``k`` constants to ``n`` elements up to renaming of elements."""
    def rec(prefix, top):
        if len(prefix) == k:
            yield tuple(prefix)
            return
        for v in range(min(top + 2, n)):
            yield from rec(prefix + [v], max(top, v))
    yield from rec([], -1)


@dataclass(frozen=True)
class Vocabulary:
    preds: tuple[tuple[str, int], ...]
    consts: tuple[str, ...]

    @staticmethod
    def of(formulas: Iterable[SDrs], lex: LexTheory | None = None, extra: Mapping[str, int] = {}) -> "Vocabulary":
        preds: dict[str, int] = dict(extra)
        consts: set[str] = set()
        for f in formulas:
            p, c = drs_terms(f)
            for name, k in p.items():
                if preds.setdefault(name, k) != k:
                    raise EvalError(f"predicate {name} used with two arities")
            consts |= c
        if lex is not None:
            for a, b in lex.compl:
                if a in preds or b in preds:
                    k = preds.get(a, preds.get(b))
                    preds.setdefault(a, k)
                    preds.setdefault(b, k)
        return Vocabulary(tuple(sorted(preds.items())), tuple(sorted(consts)))


class ModelSpace:
    """All models with domain size ``1..bound`` over a vocabulary, up to isomorphism
    of the constant assignment, honouring the lexical postulates."""

    def __init__(self, vocab: Vocabulary, lex: LexTheory | None, bound: int, chunk: int = 1 << 14):
        if bound < 1:
            raise UdrsError("bound must be at least 1")
        self.vocab = vocab
        self.bound = bound
        self.chunk = chunk
        lex = lex or LexTheory()
        ar = dict(vocab.preds)
        self.derived = {a: b for a, b in lex.compl if a in ar}
        self.free = [p for p, _ in vocab.preds if p not in self.derived]
        self.arity = ar
        self.hypo = [(p, q) for p, q in lex.hyponymy_closure() if p != q and p in ar and q in ar]
        for p, q in self.hypo:
            if ar[p] != ar[q]:
                raise EvalError(f"hyponyms {p} and {q} differ in arity")

    def nbits(self, n: int) -> int:
        return sum(n ** self.arity[p] for p in self.free)

    def size(self) -> int:
        total = 0
        for n in range(1, self.bound + 1):
            total += sum(1 for _ in _restricted_growth(len(self.vocab.consts), n)) << self.nbits(n)
        return total

    def batches(self) -> Iterator[Batch]:
        for n in range(1, self.bound + 1):
            nb = self.nbits(n)
            total = 1 << nb
            for assign in _restricted_growth(len(self.vocab.consts), n):
                consts = dict(zip(self.vocab.consts, assign))
                for start in range(0, total, self.chunk):
                    count = min(self.chunk, total - start)
                    bits = kernels.decode_bits(start, count, nb)
                    ext, col = {}, 0
                    for p in self.free:
                        k = n ** self.arity[p]
                        ext[p] = bits[:, col:col + k].reshape((count,) + (n,) * self.arity[p])
                        col += k
                    for a in self._derived_order():
                        ext[a] = ~ext[self.derived[a]]
                    if self.hypo:
                        keep = np.ones(count, dtype=np.bool_)
                        for p, q in self.hypo:
                            keep &= ~(ext[p] & ~ext[q]).reshape(count, -1).any(axis=1)
                        if not keep.all():
                            ext = {p: a[keep] for p, a in ext.items()}
                    size = next(iter(ext.values())).shape[0] if ext else count
                    if size:
                        yield Batch(n, consts, ext, size=size, first_id=start)

    def _derived_order(self) -> list[str]:
        out: list[str] = []
        def visit(a):
            if a in out:
                return
            if self.derived[a] in self.derived:
                visit(self.derived[a])
            out.append(a)
        for a in sorted(self.derived):
            visit(a)
        return out


# ---------------------------------------------------------------- consequence


RELATIONS = ("r1", "r3", "r4", "r8")


@dataclass(frozen=True)
class Witness:
    model: FiniteModel
    premise_readings: tuple[Scoping, ...]
    goal_reading: Scoping


@dataclass(frozen=True)
class Verdict:
    relation: str
    holds: bool
    bound: int
    models: int
    witness: Witness | None = None

    def to_sexpr(self) -> list:
        out: list = ["verdict", ":relation", self.relation, ":holds", "yes" if self.holds else "no",
                     ":bound", str(self.bound), ":models", str(self.models)]
        if self.witness is not None:
            out += [":countermodel", model_to_sexpr(self.witness.model)]
            out += [":goal-reading", scoping_sexpr(self.witness.goal_reading)]
        return out


def scoping_sexpr(s: Scoping) -> list:
    out: list = ["scoping"]
    for path, perm in s.per_clause:
        key = "/".join(map(str, path)) or "main"
        out.append([key, *(perm if perm is not None else ["FALSE"])])
    return out


def model_to_sexpr(m: FiniteModel) -> list:
    out: list = ["model", ["domain", *m.domain]]
    for c in sorted(m.constants):
        out.append(["const", c, m.constants[c]])
    for p in sorted(m.extensions):
        k = m.arities.get(p, 1)
        tuples = sorted(m.extensions[p])
        if k == 1:
            out.append(["pred", p, "1", [t[0] for t in tuples]])
        else:
            out.append(["pred", p, str(k), [list(t) for t in tuples]])
    return out


def model_from_sexpr(x) -> FiniteModel:
    from .syntax import _fail

    if not isinstance(x, list) or not x or x[0] != "model":
        raise _fail("expected (model ...)", x)
    dom: tuple[str, ...] = ()
    consts, exts, ar = {}, {}, {}
    for item in x[1:]:
        if not isinstance(item, list) or not item:
            raise _fail("bad model entry", item)
        if item[0] == "domain":
            dom = tuple(item[1:])
        elif item[0] == "const" and len(item) == 3:
            consts[item[1]] = item[2]
        elif item[0] == "pred" and len(item) == 4:
            name, k = item[1], int(item[2])
            ar[name] = k
            if k == 1:
                exts[name] = frozenset((t,) if isinstance(t, str) else tuple(t) for t in item[3])
            else:
                exts[name] = frozenset(tuple(t) for t in item[3])
        else:
            raise _fail("model entries are (domain ...), (const NAME ELT) or (pred NAME ARITY (...))", item)
    try:
        return FiniteModel(dom, consts, exts, ar)
    except EvalError as e:
        raise _fail(str(e), x) from None


def _entries(db: Database | Sequence[Udrs]) -> list[Udrs]:
    return list(db.entries) if isinstance(db, Database) else list(db)


@dataclass(frozen=True)
class Oracle:
    """Bounded-model checker shared by the rules and the CLI."""

    lex: LexTheory = field(default_factory=LexTheory)
    bound: int = 4
    few_k: int = 2
    chunk: int = 1 << 14

    def __post_init__(self):
        if self.lex is None:
            object.__setattr__(self, "lex", LexTheory())
        checked_determiners(self.few_k)

    @property
    def dets(self) -> dict[str, QuantifierSemantics]:
        return checked_determiners(self.few_k)

    def with_bound(self, bound: int) -> "Oracle":
        return Oracle(self.lex, bound, self.few_k, self.chunk)

    # -- generic scan ---------------------------------------------------

    def _scan(self, formulas: Sequence[tuple[SDrs, tuple[str, ...]]], models: Sequence[FiniteModel] | None):
        if models is not None:
            preds, _ = {}, set()
            for f, _free in formulas:
                preds.update(drs_terms(f)[0])
            for m in models:
                b = m.batch(preds)
                ev = Evaluator(b, self.dets)
                yield b, [ev.truth(f, free) for f, free in formulas]
            return
        vocab = Vocabulary.of([f for f, _ in formulas], self.lex)
        space = ModelSpace(vocab, self.lex, self.bound, self.chunk)
        for b in space.batches():
            ev = Evaluator(b, self.dets)
            yield b, [ev.truth(f, free) for f, free in formulas]

    def implies(self, premises: Sequence[SDrs], conclusion: SDrs, free: tuple[str, ...] = (),
                models: Sequence[FiniteModel] | None = None) -> tuple[bool, FiniteModel | None]:
        """Every model (and assignment to ``free``) verifying all premises verifies the conclusion."""
        return _implies_cached(self, tuple(premises), conclusion, free, None if models is None else tuple(models))

    def _implies(self, premises, conclusion, free, models):
        if free:
            conds = tuple(c for p in premises for c in p.conds)
            uni = tuple(v for p in premises for v in p.universe)
            f = SQuant("every", None, SDrs(free + uni, conds), conclusion)
            return self._implies((), SDrs((), (f,)), (), models)
        forms = [(p, ()) for p in premises] + [(conclusion, ())]
        for b, t in self._scan(forms, models):
            prem = np.ones(b.size, dtype=np.bool_)
            for v in t[:-1]:
                prem &= v
            bad = prem & ~t[-1]
            if bad.any():
                return False, b.model(int(np.argmax(bad)))
        return True, None

    def satisfiable(self, formulas: Sequence[SDrs]) -> FiniteModel | None:
        for b, t in self._scan([(f, ()) for f in formulas], None):
            ok = np.ones(b.size, dtype=np.bool_)
            for v in t:
                ok &= v
            if ok.any():
                return b.model(int(np.argmax(ok)))
        return None

    # -- consequence relations -----------------------------------------

    def report(self, db: Database | Sequence[Udrs], goal: Udrs, relations: Sequence[str] = RELATIONS,
               models: Sequence[FiniteModel] | None = None) -> dict[str, Verdict]:
        """Decide several consequence relations in a single pass over the models."""
        return dict(_report_cached(self, tuple(_entries(db)), goal, tuple(relations),
                                   None if models is None else tuple(models)))

    def _report(self, entries: list[Udrs], goal: Udrs, relations: Sequence[str],
                models: Sequence[FiniteModel] | None) -> dict[str, Verdict]:
        entries = list(entries)
        m = len(entries)
        for r in relations:
            if r not in RELATIONS:
                raise UdrsError(f"unknown relation {r}")
        keyed: dict[tuple[int, Scoping], int] = {}
        forms: list[tuple[SDrs, tuple]] = []

        def key(e: int, u: Udrs, s: Scoping) -> int:
            k = (e, s)
            if k not in keyed:
                keyed[k] = len(forms)
                forms.append((resolve(u, s), ()))
            return keyed[k]

        sep = any(r in relations for r in ("r1", "r3", "r4"))
        if sep:
            premise_asg = correlated_assignments(entries) if entries else []
            prem_keys = [tuple(key(e, entries[e], a.by_entry[e]) for e in range(m)) for a in premise_asg]
            if not entries:
                prem_keys = [()]
                premise_asg = [None]
            goal_asg = correlated_assignments([goal])
            goal_keys = [key(m, goal, a.by_entry[0]) for a in goal_asg]
        if "r8" in relations:
            joint = correlated_assignments(entries + [goal])
            joint_keys = [(tuple(key(e, entries[e], a.by_entry[e]) for e in range(m)),
                           key(m, goal, a.by_entry[m])) for a in joint]

        pair_bad: dict[tuple[int, int], Witness] = {}
        joint_bad: dict[int, Witness] = {}
        count = 0
        for b, t in self._scan(forms, models):
            count += b.size
            if sep:
                for i, pk in enumerate(prem_keys):
                    prem = np.ones(b.size, dtype=np.bool_)
                    for k in pk:
                        prem &= t[k]
                    if not prem.any():
                        continue
                    for j, gk in enumerate(goal_keys):
                        if (i, j) in pair_bad:
                            continue
                        bad = prem & ~t[gk]
                        if bad.any():
                            pa = premise_asg[i]
                            pair_bad[(i, j)] = Witness(b.model(int(np.argmax(bad))),
                                                       pa.by_entry if pa else (), goal_asg[j].by_entry[0])
            if "r8" in relations:
                for i, (pk, gk) in enumerate(joint_keys):
                    if i in joint_bad:
                        continue
                    prem = np.ones(b.size, dtype=np.bool_)
                    for k in pk:
                        prem &= t[k]
                    bad = prem & ~t[gk]
                    if bad.any():
                        a = joint[i]
                        joint_bad[i] = Witness(b.model(int(np.argmax(bad))), a.by_entry[:m], a.by_entry[m])
        out: dict[str, Verdict] = {}
        if sep:
            P, G = range(len(prem_keys)), range(len(goal_keys))
            first = lambda pairs: next((pair_bad[p] for p in pairs if p in pair_bad), None)  # noqa: E731
            if "r1" in relations:
                failing = [i for i in P if all((i, j) in pair_bad for j in G)]
                w = first([(failing[0], j) for j in G]) if failing else None
                out["r1"] = Verdict("r1", not failing, self.bound, count, w)
            if "r3" in relations:
                ok = not pair_bad
                out["r3"] = Verdict("r3", ok, self.bound, count,
                                    None if ok else first(sorted(pair_bad)))
            if "r4" in relations:
                ok = any((i, j) not in pair_bad for i in P for j in G)
                out["r4"] = Verdict("r4", ok, self.bound, count,
                                    None if ok else first(sorted(pair_bad)))
        if "r8" in relations:
            ok = not joint_bad
            out["r8"] = Verdict("r8", ok, self.bound, count,
                                None if ok else joint_bad[min(joint_bad)])
        return {r: out[r] for r in relations}

    def entails(self, db: Database | Sequence[Udrs], goal: Udrs, relation: str = "r8",
                models: Sequence[FiniteModel] | None = None) -> Verdict:
        return self.report(db, goal, (relation,), models)[relation]

    def equivalent(self, db: Database | Sequence[Udrs], a: Udrs, b: Udrs) -> bool:
        """``db`` proves ``a <=> b`` under the index-respecting relation, both directions."""
        entries = _entries(db)
        return self.entails(entries + [a], b).holds and self.entails(entries + [b], a).holds


@lru_cache(maxsize=1024)
def _report_cached(oracle, entries, goal, relations, models):
    return oracle._report(entries, goal, relations, models)


@lru_cache(maxsize=4096)
def _implies_cached(oracle, premises, conclusion, free, models):
    return oracle._implies(premises, conclusion, free, models)


def entails(db: Database | Sequence[Udrs], goal: Udrs, relation: str = "r8", bound: int = 4,
            lex: LexTheory | None = None, few_k: int = 2,
            models: Sequence[FiniteModel] | None = None) -> Verdict:
    """Bounded-model check of one consequence relation (see :class:`Oracle`)."""
    return Oracle(lex, bound, few_k).entails(db, goal, relation, models)


def readings_differ(u: Udrs, m: FiniteModel, few_k: int = 2) -> list[bool]:
    """Truth value of every reading of ``u`` in ``m``."""
    from .disambig import enumerate_scopings
    return [evaluate(m, resolve(u, s), few_k) for s in enumerate_scopings(u)]


__all__ = [
    "SAtom", "SDrs", "SNeg", "SQuant", "SFalse", "Hole", "resolve", "show", "sdrs_to_sexpr", "FiniteModel",
    "QuantifierSemantics", "determiner_table", "checked_determiners", "validate_determiners",
    "Evaluator", "evaluate", "Vocabulary", "ModelSpace", "Oracle", "Verdict", "Witness",
    "entails", "model_to_sexpr", "model_from_sexpr", "RELATIONS", "DECREASING",
]
