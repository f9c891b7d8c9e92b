"""The five-valued lattice logic CD5.

Truth values are triples of bits ordered componentwise.  Only five triples
are allowed.  They are the up-sets of a three-world fork: the first two bits
are the maximal worlds and the last bit is the root.  Implication is the
Heyting implication of the lattice.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import (
    Atom, Bottom, Top, And, Or, Implies, Forall, Exists, Var, Fn, ResourceLimitError,
    predicate_symbols, function_symbols, instantiate,
)
from .skolem import skolemize_parallel


@dataclass(frozen=True)
class CD5Value:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if (self.a, self.b, self.c) not in _POINTS:
            raise ValueError(f"({self.a},{self.b},{self.c}) is not a point of the CD5 lattice")

    @property
    def bits(self) -> str:
        return f"{self.a}{self.b}{self.c}"

    def __le__(self, other) -> bool:
        return self.a <= other.a and self.b <= other.b and self.c <= other.c

    def __str__(self):
        return self.bits

    def __repr__(self):
        return f"CD5Value({self.a},{self.b},{self.c})"


_POINTS = {(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0), (1, 1, 1)}
ZERO = CD5Value(0, 0, 0)
ONE = CD5Value(1, 1, 1)
# enumeration order used for countermodel search
VALUES = tuple(CD5Value(*p) for p in sorted(_POINTS))


def value_from_bits(text: str) -> CD5Value:
    s = text.strip().strip("()").replace(",", "").replace(" ", "")
    if len(s) != 3 or set(s) - {"0", "1"}:
        raise ValueError(f"expected three bits such as 110, got {text!r}")
    return CD5Value(*(int(ch) for ch in s))


def sup(x: CD5Value, y: CD5Value) -> CD5Value:
    return CD5Value(x.a | y.a, x.b | y.b, x.c | y.c)


def inf(x: CD5Value, y: CD5Value) -> CD5Value:
    return CD5Value(x.a & y.a, x.b & y.b, x.c & y.c)


def imp(x: CD5Value, y: CD5Value) -> CD5Value:
    """Largest z with inf(z, x) <= y."""
    best = ZERO
    for z in VALUES:
        if inf(z, x) <= y and best <= z:
            best = z
    return best


class Interpretation:
    def __init__(self, domain, preds: dict, funcs: dict | None = None):
        self.domain = list(dict.fromkeys(domain))
        if not self.domain:
            raise ValueError("domain must be non-empty")
        self.preds = {p: {tuple(k): v for k, v in tab.items()} for p, tab in preds.items()}
        self.funcs = {f: {tuple(k): v for k, v in tab.items()} for f, tab in (funcs or {}).items()}
        dom = set(self.domain)
        for p, tab in self.preds.items():
            arity = {len(k) for k in tab}
            if len(arity) != 1:
                raise ValueError(f"predicate {p} used with several arities")
            (n,) = arity
            for args in itertools.product(self.domain, repeat=n):
                if args not in tab:
                    raise ValueError(f"predicate {p} has no value at ({','.join(args)})")
            for k in tab:
                if set(k) - dom:
                    raise ValueError(f"predicate {p} mentions elements outside the domain")
        for f, tab in self.funcs.items():
            (n,) = {len(k) for k in tab} or {0}
            for args in itertools.product(self.domain, repeat=n):
                if args not in tab:
                    raise ValueError(f"function {f} has no value at ({','.join(args)})")
                if tab[args] not in dom:
                    raise ValueError(f"function {f} leaves the domain at ({','.join(args)})")

    def __repr__(self):
        return f"Interpretation({self.domain!r}, {self.preds!r}, {self.funcs!r})"

    def describe(self) -> str:
        lines = ["domain: " + " ".join(self.domain)]
        for p in sorted(self.preds):
            for k in sorted(self.preds[p]):
                lhs = p + (f"({','.join(k)})" if k else "")
                lines.append(f"{lhs} = {self.preds[p][k].bits}")
        for f in sorted(self.funcs):
            for k in sorted(self.funcs[f]):
                lhs = f + (f"({','.join(k)})" if k else "")
                lines.append(f"{lhs} = {self.funcs[f][k]}")
        return "\n".join(lines) + "\n"

    def term(self, t, env: dict) -> str:
        if isinstance(t, Var):
            if t.name in env:
                return env[t.name]
            if t.name in self.domain:
                return t.name
            raise ValueError(f"unbound variable {t.name}")
        args = tuple(self.term(a, env) for a in t.args)
        if t.symbol in self.funcs:
            return self.funcs[t.symbol][args]
        if not args and t.symbol in self.domain:
            return t.symbol
        raise ValueError(f"unbound function symbol {t.symbol}")


def evaluate(i: Interpretation, f, env: dict | None = None) -> CD5Value:
    env = env or {}
    if isinstance(f, Atom):
        if f.pred not in i.preds:
            raise ValueError(f"unbound predicate symbol {f.pred}")
        return i.preds[f.pred][tuple(i.term(a, env) for a in f.args)]
    if isinstance(f, Bottom):
        return ZERO
    if isinstance(f, Top):
        return ONE
    if isinstance(f, And):
        return inf(evaluate(i, f.left, env), evaluate(i, f.right, env))
    if isinstance(f, Or):
        return sup(evaluate(i, f.left, env), evaluate(i, f.right, env))
    if isinstance(f, Implies):
        return imp(evaluate(i, f.left, env), evaluate(i, f.right, env))
    vals = [evaluate(i, f.body, {**env, f.var: d}) for d in i.domain]
    acc = vals[0]
    for v in vals[1:]:
        acc = inf(acc, v) if isinstance(f, Forall) else sup(acc, v)
    return acc


eval_formula = evaluate


def evaluate_naive(i: Interpretation, f) -> CD5Value:
    """Evaluation by substituting elements as constants; a test oracle."""
    if isinstance(f, (Forall, Exists)):
        vals = [evaluate_naive(i, instantiate(f, Fn(d))) for d in i.domain]
        op = inf if isinstance(f, Forall) else sup
        acc = vals[0]
        for v in vals[1:]:
            acc = op(acc, v)
        return acc
    if isinstance(f, (And, Or, Implies)):
        x, y = evaluate_naive(i, f.left), evaluate_naive(i, f.right)
        return {And: inf, Or: sup, Implies: imp}[type(f)](x, y)
    return evaluate(i, f)


ELEMENT_NAMES = "abcdefgh"


def interpretations(f, size: int, budget: int = 2_000_000):
    """Every interpretation of the symbols of ``f`` over a domain of ``size``
    elements, predicate tables varying slowest, in lexicographic order."""
    dom = list(ELEMENT_NAMES[:size])
    preds = sorted(predicate_symbols(f).items())
    funcs = sorted((s, n) for s, n in function_symbols(f).items())
    pslots = [(p, args) for p, n in preds for args in itertools.product(dom, repeat=n)]
    fslots = [(s, args) for s, n in funcs for args in itertools.product(dom, repeat=n)]
    total = len(VALUES) ** len(pslots) * size ** len(fslots)
    if total > budget:
        raise ResourceLimitError(f"{total} interpretations at domain size {size} exceeds the budget of {budget}")
    for pv in itertools.product(VALUES, repeat=len(pslots)):
        ptab: dict = {p: {} for p, _ in preds}
        for (p, args), v in zip(pslots, pv):
            ptab[p][args] = v
        for fv in itertools.product(dom, repeat=len(fslots)):
            ftab: dict = {s: {} for s, _ in funcs}
            for (s, args), e in zip(fslots, fv):
                ftab[s][args] = e
            yield Interpretation(dom, ptab, ftab)


def valid_bounded(f, max_domain: int = 2, budget: int = 2_000_000) -> tuple:
    """(valid up to the bound, first countermodel or None).  Function symbols are
    quantified universally, so a countermodel may pick any of their values."""
    if max_domain < 1:
        raise ValueError("max_domain must be at least 1")
    for size in range(1, max_domain + 1):
        for i in interpretations(f, size, budget):
            if evaluate(i, f) != ONE:
                return False, i
    return True, None


@dataclass
class CrosscheckReport:
    formula: object
    skolemized: object
    degree: int
    bound: int
    original_valid: bool
    skolemized_valid: bool
    original_countermodel: Interpretation | None = None
    skolemized_countermodel: Interpretation | None = None

    @property
    def agree(self) -> bool:
        return self.original_valid == self.skolemized_valid

    def to_dict(self) -> dict:
        from .parser import render

        return {
            "kind": "cd5-crosscheck",
            "formula": render(self.formula),
            "skolemized": render(self.skolemized),
            "degree": self.degree,
            "bound": self.bound,
            "original_valid": self.original_valid,
            "skolemized_valid": self.skolemized_valid,
            "agree": self.agree,
        }


def crosscheck_parallel(f, n: int = 2, max_domain: int = 2, budget: int = 2_000_000) -> CrosscheckReport:
    sp, _ = skolemize_parallel(f, n)
    ov, oc = valid_bounded(f, max_domain, budget)
    sv, sc = valid_bounded(sp, max_domain, budget)
    return CrosscheckReport(f, sp, n, max_domain, ov, sv, oc, sc)
