"""First-order syntax trees and the operations every other module leans on.

Formulas are immutable dataclasses.  Negation is not a node of its own:
``~A`` is ``Implies(A, Bottom())``.  Variables and function symbols live in
separate namespaces; a function symbol of arity zero is a constant.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Union


# --- terms -----------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


@dataclass(frozen=True)
class Fn:
    symbol: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def __repr__(self) -> str:
        if not self.args:
            return f"Fn({self.symbol!r})"
        return f"Fn({self.symbol!r}, {self.args!r})"


Term = Union[Var, Fn]


def const(name: str) -> Fn:
    return Fn(name, ())


# --- formulas --------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Atom, Bottom, Top, And, Or, Implies, Forall, Exists]
BINARY = (And, Or, Implies)
QUANTIFIERS = (Forall, Exists)

BOTTOM = Bottom()
TOP = Top()


def neg(f: Formula) -> Formula:
    return Implies(f, BOTTOM)


def is_neg(f: Formula) -> bool:
    return isinstance(f, Implies) and isinstance(f.right, Bottom)


def is_atomic(f: Formula) -> bool:
    return isinstance(f, (Atom, Bottom, Top))


def conj(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is T."""
    out = None
    for p in parts:
        out = p if out is None else And(out, p)
    return TOP if out is None else out


def disj(parts: Iterable[Formula]) -> Formula:
    out = None
    for p in parts:
        out = p if out is None else Or(out, p)
    return BOTTOM if out is None else out


def children(f: Formula) -> tuple:
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, QUANTIFIERS):
        return (f.body,)
    return ()


def with_children(f: Formula, kids: tuple) -> Formula:
    if isinstance(f, BINARY):
        return type(f)(kids[0], kids[1])
    if isinstance(f, QUANTIFIERS):
        return type(f)(f.var, kids[0])
    return f


def subformula(f: Formula, path: Iterable[int]) -> Formula:
    for i in path:
        f = children(f)[i]
    return f


def replace_at(f: Formula, path: tuple, new: Formula) -> Formula:
    if not path:
        return new
    kids = list(children(f))
    kids[path[0]] = replace_at(kids[path[0]], tuple(path[1:]), new)
    return with_children(f, tuple(kids))


def positions(f: Formula, path: tuple = ()) -> Iterator[tuple]:
    """All paths of ``f`` in pre-order (left to right, parents first)."""
    yield path
    for i, k in enumerate(children(f)):
        yield from positions(k, path + (i,))


def size(f: Formula) -> int:
    return 1 + sum(size(k) for k in children(f))


def depth(f: Formula) -> int:
    kids = children(f)
    return 1 + max(depth(k) for k in kids) if kids else 0


# --- variables and symbols -------------------------------------------------


def term_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    out: set = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def free_vars(f: Formula) -> set:
    if isinstance(f, Atom):
        out: set = set()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, BINARY):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, QUANTIFIERS):
        return free_vars(f.body) - {f.var}
    return set()


def is_closed(f: Formula) -> bool:
    return not free_vars(f)


def all_vars(f: Formula) -> set:
    """Every variable name occurring in ``f``, free or bound (binders included)."""
    if isinstance(f, Atom):
        out: set = set()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, QUANTIFIERS):
        return all_vars(f.body) | {f.var}
    out = set()
    for k in children(f):
        out |= all_vars(k)
    return out


def _term_symbols(t: Term, out: dict) -> None:
    if isinstance(t, Fn):
        out.setdefault(t.symbol, t.arity)
        for a in t.args:
            _term_symbols(a, out)


def function_symbols(f) -> dict:
    """Map of function symbol to arity (constants included)."""
    out: dict = {}
    for atom in atoms(f):
        for a in atom.args:
            _term_symbols(a, out)
    return out


def predicate_symbols(f) -> dict:
    return {a.pred: a.arity for a in atoms(f)}


def atoms(f) -> Iterator[Atom]:
    if isinstance(f, Sequent):
        for g in f.formulas():
            yield from atoms(g)
        return
    if isinstance(f, Atom):
        yield f
    for k in children(f):
        yield from atoms(k)


def term_subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, Fn):
        for a in t.args:
            yield from term_subterms(a)


def formula_terms(f: Formula) -> Iterator[Term]:
    for a in atoms(f):
        for t in a.args:
            yield from term_subterms(t)


_SUFFIX = re.compile(r"^(.*?)_(\d+)$")


def fresh_name(base: str, avoid: set) -> str:
    """``base_k`` for the smallest k >= 1 not in ``avoid``."""
    m = _SUFFIX.match(base)
    stem = m.group(1) if m and m.group(1) else base
    k = 1
    while f"{stem}_{k}" in avoid:
        k += 1
    return f"{stem}_{k}"


# --- substitution ----------------------------------------------------------


def subst_term(t: Term, mapping: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if not t.args:
        return t
    return Fn(t.symbol, tuple(subst_term(a, mapping) for a in t.args))


def substitute_many(f: Formula, mapping: Mapping[str, Term], avoid: set | None = None) -> Formula:
    """Simultaneous capture-avoiding substitution of free variables."""
    mapping = {k: v for k, v in mapping.items() if not (isinstance(v, Var) and v.name == k)}
    if not mapping:
        return f
    if avoid is None:
        avoid = set(all_vars(f))
        for t in mapping.values():
            avoid |= term_vars(t)
    return _subst(f, dict(mapping), avoid)


def _subst(f: Formula, mapping: dict, avoid: set) -> Formula:
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(subst_term(a, mapping) for a in f.args))
    if isinstance(f, BINARY):
        return type(f)(_subst(f.left, mapping, avoid), _subst(f.right, mapping, avoid))
    if isinstance(f, QUANTIFIERS):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        fv = free_vars(f.body)
        inner = {k: v for k, v in inner.items() if k in fv}
        if not inner:
            return f
        captured = any(f.var in term_vars(t) for t in inner.values())
        var, body = f.var, f.body
        if captured:
            var = fresh_name(f.var, avoid)
            avoid.add(var)
            body = _subst(body, {f.var: Var(var)}, avoid)
        return type(f)(var, _subst(body, inner, avoid))
    return f


def substitute(f: Formula, var: str, t: Term) -> Formula:
    return substitute_many(f, {var: t})


def instantiate(q: Formula, t: Term) -> Formula:
    """Body of quantified formula ``q`` with its bound variable replaced by ``t``."""
    return substitute(q.body, q.var, t)


def captures(f: Formula, var: str, t: Term) -> bool:
    """Would plain replacement of ``var`` by ``t`` in ``f`` capture a variable of ``t``?"""
    tv = term_vars(t)

    def go(g: Formula, bound: frozenset) -> bool:
        if isinstance(g, Atom):
            return any(var in term_vars(a) for a in g.args) and bool(bound & tv)
        if isinstance(g, QUANTIFIERS):
            if g.var == var:
                return False
            return go(g.body, bound | {g.var})
        return any(go(k, bound) for k in children(g))

    return go(f, frozenset())


# --- alpha equivalence and symbol renaming ---------------------------------


def _alpha_key(f: Formula, env: dict, level: int):
    if isinstance(f, Atom):
        return ("A", f.pred, tuple(_alpha_term(a, env) for a in f.args))
    if isinstance(f, BINARY):
        return (type(f).__name__, _alpha_key(f.left, env, level), _alpha_key(f.right, env, level))
    if isinstance(f, QUANTIFIERS):
        inner = dict(env)
        inner[f.var] = level
        return (type(f).__name__, _alpha_key(f.body, inner, level + 1))
    return (type(f).__name__,)


def _alpha_term(t: Term, env: dict):
    if isinstance(t, Var):
        return ("b", env[t.name]) if t.name in env else ("v", t.name)
    return ("f", t.symbol, tuple(_alpha_term(a, env) for a in t.args))


def alpha_key(f: Formula):
    return _alpha_key(f, {}, 0)


def alpha_equal(f: Formula, g: Formula) -> bool:
    return alpha_key(f) == alpha_key(g)


def rename_symbols_term(t: Term, ren: Mapping[str, str]) -> Term:
    if isinstance(t, Var):
        return t
    return Fn(ren.get(t.symbol, t.symbol), tuple(rename_symbols_term(a, ren) for a in t.args))


def rename_symbols(f: Formula, ren: Mapping[str, str]) -> Formula:
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(rename_symbols_term(a, ren) for a in f.args))
    return with_children(f, tuple(rename_symbols(k, ren) for k in children(f)))


def match_symbols(a: Formula, b: Formula, renamable: set, ren: dict | None = None) -> dict | None:
    """Find an injective renaming of the ``renamable`` symbols of ``a`` that makes it
    alpha-equal to ``b``; other symbols must coincide.  Extends ``ren`` in place."""
    ren = {} if ren is None else ren
    snapshot = dict(ren)
    if _match(a, b, renamable, ren, {}, {}, 0):
        return ren
    ren.clear()
    ren.update(snapshot)
    return None


def _match(a, b, renamable, ren, ea, eb, level) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Atom):
        if a.pred != b.pred or a.arity != b.arity:
            return False
        return all(_match_term(x, y, renamable, ren, ea, eb) for x, y in zip(a.args, b.args))
    if isinstance(a, QUANTIFIERS):
        ea2 = dict(ea)
        eb2 = dict(eb)
        ea2[a.var] = level
        eb2[b.var] = level
        return _match(a.body, b.body, renamable, ren, ea2, eb2, level + 1)
    return all(_match(x, y, renamable, ren, ea, eb, level) for x, y in zip(children(a), children(b)))


def _match_term(s, t, renamable, ren, ea, eb) -> bool:
    if isinstance(s, Var):
        if not isinstance(t, Var):
            return False
        if s.name in ea or t.name in eb:
            return ea.get(s.name) == eb.get(t.name)
        return s.name == t.name
    if not isinstance(t, Fn) or s.arity != t.arity:
        return False
    if s.symbol in renamable:
        target = ren.get(s.symbol)
        if target is None:
            if t.symbol in ren.values():
                return False
            ren[s.symbol] = t.symbol
        elif target != t.symbol:
            return False
    elif s.symbol != t.symbol:
        return False
    return all(_match_term(x, y, renamable, ren, ea, eb) for x, y in zip(s.args, t.args))


# --- polarity and strength -------------------------------------------------


@dataclass(frozen=True)
class Occurrence:
    path: tuple
    polarity: str  # "positive" | "negative"
    strength: str  # "strong" | "weak"
    quantifier: str  # "forall" | "exists"
    bound_var: str
    dominating_weak_vars: tuple
    dominating_weak_paths: tuple = field(default=(), compare=False)

    @property
    def strong(self) -> bool:
        return self.strength == "strong"


def strength_of(quantifier: str, positive: bool) -> str:
    strong = (positive and quantifier == "forall") or (not positive and quantifier == "exists")
    return "strong" if strong else "weak"


def classify_quantifiers(f: Formula, negative: bool = False) -> list:
    """Every quantifier occurrence of ``f`` in left-to-right (pre-order) order.

    ``negative=True`` classifies ``f`` as if it sat in an antecedent, which is
    how strength-in-a-sequent is computed for the left-hand side.
    """
    out: list = []

    def go(g, path, positive, weak_vars, weak_paths):
        if isinstance(g, QUANTIFIERS):
            q = "forall" if isinstance(g, Forall) else "exists"
            s = strength_of(q, positive)
            out.append(Occurrence(path, "positive" if positive else "negative", s, q, g.var,
                                  tuple(weak_vars), tuple(weak_paths)))
            if s == "weak":
                go(g.body, path + (0,), positive, weak_vars + [g.var], weak_paths + [path])
            else:
                go(g.body, path + (0,), positive, weak_vars, weak_paths)
        elif isinstance(g, Implies):
            go(g.left, path + (0,), not positive, weak_vars, weak_paths)
            go(g.right, path + (1,), positive, weak_vars, weak_paths)
        elif isinstance(g, BINARY):
            go(g.left, path + (0,), positive, weak_vars, weak_paths)
            go(g.right, path + (1,), positive, weak_vars, weak_paths)

    go(f, (), not negative, [], [])
    return out


def polarity_at(f: Formula, path: tuple, negative: bool = False) -> bool:
    """True when the position ``path`` is positive."""
    positive = not negative
    for i in path:
        if isinstance(f, Implies) and i == 0:
            positive = not positive
        f = children(f)[i]
    return positive


# --- sequents --------------------------------------------------------------


class Sequent:
    """Two multisets of formulas.  Listing order is kept for printing and for the
    principal indices used by proof files, but equality ignores it."""

    __slots__ = ("antecedent", "succedent", "_key")

    def __init__(self, antecedent: Iterable[Formula] = (), succedent: Iterable[Formula] = ()):
        object.__setattr__(self, "antecedent", tuple(antecedent))
        object.__setattr__(self, "succedent", tuple(succedent))
        object.__setattr__(self, "_key", None)

    def __setattr__(self, name, value):
        raise AttributeError("Sequent is immutable")

    def key(self):
        if self._key is None:
            object.__setattr__(self, "_key", (frozenset(Counter(self.antecedent).items()),
                                              frozenset(Counter(self.succedent).items())))
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, Sequent) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Sequent({list(self.antecedent)!r}, {list(self.succedent)!r})"

    def side(self, name: str) -> tuple:
        return self.antecedent if name == "L" else self.succedent

    def formulas(self) -> Iterator[Formula]:
        yield from self.antecedent
        yield from self.succedent

    def free_vars(self) -> set:
        out: set = set()
        for g in self.formulas():
            out |= free_vars(g)
        return out

    def as_formula(self) -> Formula:
        return Implies(conj(self.antecedent), disj(self.succedent))

    def add(self, left: Iterable[Formula] = (), right: Iterable[Formula] = ()) -> "Sequent":
        return Sequent(self.antecedent + tuple(left), self.succedent + tuple(right))

    def map(self, fn: Callable[[Formula], Formula]) -> "Sequent":
        return Sequent([fn(g) for g in self.antecedent], [fn(g) for g in self.succedent])


# --- quantifier shift axioms ------------------------------------------------


class SideConditionError(ValueError):
    pass


SHIFT_KINDS = ("CD", "ED", "SW")


def shift_axiom(kind: str, a: Formula, b: Formula, x: str) -> Formula:
    """Instance of a shift schema; ``a`` is A(x), with ``x`` marking the hole."""
    if x in free_vars(b):
        raise SideConditionError(f"variable {x} occurs free in {b!r}")
    if kind == "CD":
        return Implies(Forall(x, Or(a, b)), Or(Forall(x, a), b))
    if kind == "ED":
        return Implies(Implies(b, Exists(x, a)), Exists(x, Implies(b, a)))
    if kind == "SW":
        return Implies(Implies(Forall(x, a), b), Exists(x, Implies(a, b)))
    raise ValueError(f"unknown shift kind {kind!r}")


def shift_instance_kind(f: Formula) -> str | None:
    """Which schema ``f`` instantiates, ignoring a prefix of universal closure."""
    while isinstance(f, Forall) and shift_instance_kind_exact(f) is None:
        f = f.body
    return shift_instance_kind_exact(f)


def shift_instance_kind_exact(f: Formula) -> str | None:
    if not isinstance(f, Implies):
        return None
    lhs, rhs = f.left, f.right
    # CD: forall x (A | B) -> forall y A' | B
    if (isinstance(lhs, Forall) and isinstance(lhs.body, Or) and isinstance(rhs, Or)
            and isinstance(rhs.left, Forall)):
        b = lhs.body.right
        if (rhs.right == b and lhs.var not in free_vars(b)
                and alpha_equal(Forall(lhs.var, lhs.body.left), rhs.left)):
            return "CD"
    # ED: (B -> exists x A) -> exists y (B -> A')
    if (isinstance(lhs, Implies) and isinstance(lhs.right, Exists) and isinstance(rhs, Exists)
            and isinstance(rhs.body, Implies)):
        b = lhs.left
        ex = lhs.right
        if (rhs.body.left == b and ex.var not in free_vars(b) and rhs.var not in free_vars(b)
                and alpha_equal(Exists(ex.var, Implies(b, ex.body)), rhs)):
            return "ED"
    # SW: (forall x A -> B) -> exists y (A' -> B)
    if (isinstance(lhs, Implies) and isinstance(lhs.left, Forall) and isinstance(rhs, Exists)
            and isinstance(rhs.body, Implies)):
        b = lhs.right
        fa = lhs.left
        if (rhs.body.right == b and fa.var not in free_vars(b) and rhs.var not in free_vars(b)
                and alpha_equal(Exists(fa.var, Implies(fa.body, b)), rhs)):
            return "SW"
    return None


class ResourceLimitError(RuntimeError):
    """An enumeration exceeded its configured budget."""
