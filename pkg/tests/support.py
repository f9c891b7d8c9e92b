"""Generators and brute-force oracles shared by the test modules."""

from __future__ import annotations

import itertools
import random
from pathlib import Path

from hypothesis import strategies as st

from qshift.core import (
    Var, Fn, Atom, Bottom, Top, And, Or, Implies, Forall, Exists, BOTTOM, TOP,
    predicate_symbols, function_symbols, free_vars,
)

CORPUS = Path(__file__).resolve().parents[1] / "src" / "qshift" / "corpus"

VARS = ("x", "y", "z")
CONSTS = ("c", "d")


# --- hypothesis strategies ----------------------------------------------------

terms = st.recursive(
    st.sampled_from([Var(v) for v in VARS] + [Fn(c) for c in CONSTS]),
    lambda sub: st.builds(lambda s, args: Fn(s, tuple(args)), st.sampled_from(["f", "g"]),
                          st.lists(sub, min_size=1, max_size=2)),
    max_leaves=4,
)

atoms = st.one_of(
    st.just(Atom("Q", ())),
    st.builds(lambda t: Atom("P", (t,)), terms),
    st.builds(lambda s, t: Atom("R", (s, t)), terms, terms),
    st.just(BOTTOM),
    st.just(TOP),
)


def _extend(sub):
    return st.one_of(
        st.builds(And, sub, sub),
        st.builds(Or, sub, sub),
        st.builds(Implies, sub, sub),
        st.builds(Forall, st.sampled_from(VARS), sub),
        st.builds(Exists, st.sampled_from(VARS), sub),
    )


formulas = st.recursive(atoms, _extend, max_leaves=12)

# function-free formulas over P/1, Q/0, R/1 for Kripke tests
kripke_atoms = st.one_of(
    st.just(Atom("Q", ())),
    st.builds(lambda v: Atom("P", (Var(v),)), st.sampled_from(["x", "y", "a", "b"])),
    st.builds(lambda v: Atom("R", (Var(v),)), st.sampled_from(["x", "y", "a", "b"])),
    st.just(BOTTOM),
    st.just(TOP),
)
kripke_formulas = st.recursive(
    kripke_atoms,
    lambda sub: st.one_of(
        st.builds(And, sub, sub), st.builds(Or, sub, sub), st.builds(Implies, sub, sub),
        st.builds(Forall, st.sampled_from(["x", "y"]), sub),
        st.builds(Exists, st.sampled_from(["x", "y"]), sub),
    ),
    max_leaves=8,
)


def close(f):
    """Universal closure over free variables, in sorted order."""
    for v in sorted(free_vars(f), reverse=True):
        f = Forall(v, f)
    return f


def close_elements(f, elems=("a", "b")):
    """Bind every free variable that is not a domain element."""
    for v in sorted(free_vars(f) - set(elems), reverse=True):
        f = Forall(v, f)
    return f


# --- a seeded generator for fixed suites --------------------------------------


def random_closed_formula(rng: random.Random, depth: int, bound=()):
    """Closed formula over P/1, Q/0, R/2 and constant c, at most ``depth`` deep."""
    names = list(bound) + ["c"]

    def term():
        n = rng.choice(names)
        return Fn("c") if n == "c" else Var(n)

    if depth == 0 or rng.random() < 0.2:
        k = rng.randrange(3)
        if k == 0:
            return Atom("Q", ())
        if k == 1:
            return Atom("P", (term(),))
        return Atom("R", (term(), term()))
    k = rng.randrange(5)
    if k < 3:
        op = (And, Or, Implies)[k]
        return op(random_closed_formula(rng, depth - 1, bound), random_closed_formula(rng, depth - 1, bound))
    v = rng.choice(VARS)
    q = Forall if k == 3 else Exists
    return q(v, random_closed_formula(rng, depth - 1, tuple(bound) + (v,)))


def formula_suite(n: int = 50, depth: int = 5, seed: int = 20240607) -> list:
    rng = random.Random(seed)
    return [random_closed_formula(rng, rng.randint(1, depth)) for _ in range(n)]


# --- classical semantics --------------------------------------------------------


def classical_value(f, dom, preds, funcs, env=None) -> bool:
    env = env or {}

    def term(t):
        if isinstance(t, Var):
            return env[t.name]
        return funcs[t.symbol][tuple(term(a) for a in t.args)]

    if isinstance(f, Atom):
        return tuple(term(a) for a in f.args) in preds[f.pred]
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Top):
        return True
    if isinstance(f, And):
        return classical_value(f.left, dom, preds, funcs, env) and classical_value(f.right, dom, preds, funcs, env)
    if isinstance(f, Or):
        return classical_value(f.left, dom, preds, funcs, env) or classical_value(f.right, dom, preds, funcs, env)
    if isinstance(f, Implies):
        return (not classical_value(f.left, dom, preds, funcs, env)) or classical_value(f.right, dom, preds, funcs, env)
    vals = (classical_value(f.body, dom, preds, funcs, {**env, f.var: d}) for d in dom)
    return all(vals) if isinstance(f, Forall) else any(vals)


def classical_structures(signature_of, sizes=(1, 2), fixed_funcs=()):
    """All structures for the symbols of the given formulas.  Function symbols
    listed in ``fixed_funcs`` are left out; the caller ranges over them."""
    preds, funcs = {}, {}
    for f in signature_of:
        preds.update(predicate_symbols(f))
        funcs.update(function_symbols(f))
    for s in fixed_funcs:
        funcs.pop(s, None)
    preds, funcs = sorted(preds.items()), sorted(funcs.items())
    for size in sizes:
        dom = list(range(size))
        pslots = [(p, args) for p, n in preds for args in itertools.product(dom, repeat=n)]
        fslots = [(s, args) for s, n in funcs for args in itertools.product(dom, repeat=n)]
        for pbits in itertools.product((False, True), repeat=len(pslots)):
            ptab = {p: set() for p, _ in preds}
            for (p, args), b in zip(pslots, pbits):
                if b:
                    ptab[p].add(args)
            for fv in itertools.product(dom, repeat=len(fslots)):
                ftab = {s: {} for s, _ in funcs}
                for (s, args), e in zip(fslots, fv):
                    ftab[s][args] = e
                yield dom, ptab, ftab


def classically_equivalent(f, g, sizes=(1, 2)) -> bool:
    for dom, p, fn in classical_structures([f, g], sizes):
        if classical_value(f, dom, p, fn) != classical_value(g, dom, p, fn):
            return False
    return True


def function_assignments(dom, symbols: dict):
    slots = [(s, args) for s, n in sorted(symbols.items()) for args in itertools.product(dom, repeat=n)]
    for vals in itertools.product(dom, repeat=len(slots)):
        tab = {s: {} for s in symbols}
        for (s, args), e in zip(slots, vals):
            tab[s][args] = e
        yield tab
