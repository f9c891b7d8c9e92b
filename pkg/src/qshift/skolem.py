"""Structural, Andrews and parallel Skolemization of closed formulas and sequents.

All three variants work the same way.  Find the first strong quantifier, reading
left to right.  Remove it and replace its variable by a fresh Skolem term.
Then start over on the whole result.  The variants differ only in the
arguments of the Skolem term and, for the parallel variant, in how many
instances replace the quantifier:

* structural: every weak variable whose scope contains the quantifier;
* andrews: only those weak variables that occur free below it;
* parallel of degree n: n copies joined by ``|`` (strong exists) or ``&``
  (strong forall), each with its own symbol.

Symbols are named ``sk0, sk1, ...`` in elimination order, skipping any name
already present.  The parallel variant appends ``_1 .. _n``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    Fn, Var, Sequent, Forall, classify_quantifiers, free_vars, function_symbols,
    subformula, replace_at, substitute_many, all_vars, conj, disj,
)

VARIANTS = ("structural", "andrews", "parallel")


class SkolemError(ValueError):
    pass


@dataclass(frozen=True)
class SkolemEntry:
    symbol: str
    arity: int
    path: tuple
    deps: tuple
    variant: str
    dep_paths: tuple = ()
    side: str | None = None
    index: int | None = None

    def term(self, args) -> Fn:
        return Fn(self.symbol, tuple(args))


class SkolemSignature(dict):
    """Skolem symbol -> SkolemEntry, in introduction order."""

    def table(self) -> list:
        rows = []
        for sym, e in self.items():
            where = "" if e.side is None else f"{e.side}{e.index}:"
            rows.append((sym, e.arity, where + ".".join(map(str, e.path)) or "root",
                         ",".join(e.deps), e.variant))
        return rows


class _Names:
    def __init__(self, used: set):
        self.used = set(used)
        self.k = 0

    def next(self) -> str:
        while f"sk{self.k}" in self.used or any(u.startswith(f"sk{self.k}_") for u in self.used):
            self.k += 1
        name = f"sk{self.k}"
        self.used.add(name)
        self.k += 1
        return name


def _check_closed(f) -> None:
    fv = sorted(free_vars(f))
    if fv:
        raise SkolemError(f"formula is not closed: free variable {fv[0]}")


def _dependencies(occ, current, variant: str) -> tuple:
    """(names, binder paths) of the Skolem arguments for ``occ``."""
    latest: dict = {}
    order: list = []
    for name, path in zip(occ.dominating_weak_vars, occ.dominating_weak_paths):
        if name not in latest:
            order.append(name)
        latest[name] = path
    if variant == "andrews":
        below = free_vars(subformula(current, occ.path))
        order = [v for v in order if v in below]
    return tuple(order), tuple(latest[v] for v in order)


def _skolemize(f, variant: str, n: int, negative: bool, names: _Names, sig: SkolemSignature,
               side=None, index=None):
    original = [o for o in classify_quantifiers(f, negative) if o.strong]
    current = f
    k = 0
    while True:
        occ = next((o for o in classify_quantifiers(current, negative) if o.strong), None)
        if occ is None:
            return current
        deps, dep_paths = _dependencies(occ, current, "andrews" if variant == "andrews" else "structural")
        # Elimination order matches the pre-order of the input's strong quantifiers,
        # and the weak prefix above each is unchanged, so positions line up.
        if (variant != "parallel" and k < len(original)
                and len(original[k].dominating_weak_paths) == len(occ.dominating_weak_vars)):
            last = {name: i for i, name in enumerate(occ.dominating_weak_vars)}
            src_path = original[k].path
            src_paths = tuple(original[k].dominating_weak_paths[last[d]] for d in deps)
        else:
            src_path, src_paths = occ.path, dep_paths
        k += 1
        q = subformula(current, occ.path)
        avoid = set(all_vars(current))
        args = tuple(Var(d) for d in deps)
        base = names.next()
        if variant == "parallel":
            copies = []
            for i in range(1, n + 1):
                sym = f"{base}_{i}"
                names.used.add(sym)
                sig[sym] = SkolemEntry(sym, len(args), src_path, deps, f"parallel {i}/{n}", src_paths, side, index)
                copies.append(substitute_many(q.body, {q.var: Fn(sym, args)}, set(avoid)))
            new = conj(copies) if isinstance(q, Forall) else disj(copies)
        else:
            sig[base] = SkolemEntry(base, len(args), src_path, deps, variant, src_paths, side, index)
            new = substitute_many(q.body, {q.var: Fn(base, args)}, avoid)
        current = replace_at(current, occ.path, new)


def skolemize(f, variant: str = "structural", n: int = 1):
    if variant not in VARIANTS:
        raise SkolemError(f"unknown Skolemization variant {variant!r}")
    if variant == "parallel" and n < 1:
        raise SkolemError("parallel degree must be at least 1")
    _check_closed(f)
    sig = SkolemSignature()
    out = _skolemize(f, variant, n, False, _Names(function_symbols(f)), sig)
    return out, sig


def skolemize_structural(f):
    return skolemize(f, "structural")


def skolemize_andrews(f):
    return skolemize(f, "andrews")


def skolemize_parallel(f, n: int):
    return skolemize(f, "parallel", n)


def skolemize_sequent(s: Sequent, variant: str = "structural", n: int = 1):
    """Eliminate the strong-in-sequent quantifiers of every formula.

    Antecedent formulas are classified with flipped polarity.  Each formula
    gets its own Skolem symbols.
    """
    if variant not in VARIANTS:
        raise SkolemError(f"unknown Skolemization variant {variant!r}")
    if variant == "parallel" and n < 1:
        raise SkolemError("parallel degree must be at least 1")
    for g in s.formulas():
        _check_closed(g)
    used: set = set()
    for g in s.formulas():
        used |= set(function_symbols(g))
    names = _Names(used)
    sig = SkolemSignature()
    left = [_skolemize(g, variant, n, True, names, sig, "L", i) for i, g in enumerate(s.antecedent)]
    right = [_skolemize(g, variant, n, False, names, sig, "R", i) for i, g in enumerate(s.succedent)]
    return Sequent(left, right), sig


def has_strong_quantifier(f, negative: bool = False) -> bool:
    return any(o.strong for o in classify_quantifiers(f, negative))
