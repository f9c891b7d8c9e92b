"""Finite Kripke frames and models.

Forcing is computed with set semantics: each formula denotes the bitmask of
worlds that force it.  Worlds are indexed in the order given; bit ``i`` stands
for ``frame.worlds[i]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .core import (
    Atom, Bottom, Top, And, Or, Implies, Forall, Exists, Var, Fn, ResourceLimitError,
    BOTTOM, shift_axiom, instantiate,
)


class ModelError(ValueError):
    pass


class Frame:
    def __init__(self, worlds, pairs=(), domains=None):
        self.worlds = list(dict.fromkeys(worlds))
        if not self.worlds:
            raise ModelError("a frame needs at least one world")
        self.index = {w: i for i, w in enumerate(self.worlds)}
        n = len(self.worlds)
        up = [1 << i for i in range(n)]
        for u, v in pairs:
            for w in (u, v):
                if w not in self.index:
                    raise ModelError(f"unknown world {w!r} in order")
            up[self.index[u]] |= 1 << self.index[v]
        changed = True
        while changed:  # transitive closure
            changed = False
            for i in range(n):
                acc = up[i]
                for j in range(n):
                    if acc >> j & 1:
                        acc |= up[j]
                if acc != up[i]:
                    up[i] = acc
                    changed = True
        for i in range(n):
            for j in range(i + 1, n):
                if up[i] >> j & 1 and up[j] >> i & 1:
                    raise ModelError(f"order is not antisymmetric: {self.worlds[i]} and {self.worlds[j]}")
        self.up = up
        domains = domains or {}
        self.domains = {}
        for w in self.worlds:
            d = domains.get(w)
            if not d:
                raise ModelError(f"world {w!r} has an empty domain")
            self.domains[w] = frozenset(d)
        for u in self.worlds:
            for v in self.above(u):
                if not self.domains[u] <= self.domains[v]:
                    missing = sorted(self.domains[u] - self.domains[v])
                    raise ModelError(f"domain is not monotone: {missing[0]} in {u} but not in {v}")
        self.elements = sorted(set().union(*self.domains.values()))
        self.full = (1 << n) - 1

    def __repr__(self):
        return f"Frame({self.worlds!r}, {self.covers()!r}, {dict((w, sorted(d)) for w, d in self.domains.items())!r})"

    def leq(self, u, v) -> bool:
        return bool(self.up[self.index[u]] >> self.index[v] & 1)

    def above(self, w) -> list:
        m = self.up[self.index[w]]
        return [v for i, v in enumerate(self.worlds) if m >> i & 1]

    def mask(self, ws) -> int:
        out = 0
        for w in ws:
            out |= 1 << self.index[w]
        return out

    def worlds_of(self, m: int) -> list:
        return [w for i, w in enumerate(self.worlds) if m >> i & 1]

    def defined(self, elems) -> int:
        """Worlds whose domain contains every element of ``elems``."""
        out = 0
        for i, w in enumerate(self.worlds):
            if all(e in self.domains[w] for e in elems):
                out |= 1 << i
        return out

    def covers(self) -> list:
        """Immediate successor pairs (the Hasse diagram)."""
        out = []
        for u in self.worlds:
            for v in self.above(u):
                if u == v:
                    continue
                if not any(x not in (u, v) and self.leq(x, v) for x in self.above(u)):
                    out.append((u, v))
        return out

    def is_upset(self, m: int) -> bool:
        return all(not (m >> i & 1) or (self.up[i] & m) == self.up[i] for i in range(len(self.worlds)))

    def upsets(self, within: int | None = None) -> list:
        within = self.full if within is None else within
        return [m for m in range(self.full + 1) if m & ~within == 0 and self.is_upset(m)]

    def components(self) -> list:
        """Connected components (as lists of worlds) of the comparability graph."""
        seen: set = set()
        out = []
        for w in self.worlds:
            if w in seen:
                continue
            comp, todo = [], [w]
            while todo:
                x = todo.pop()
                if x in seen:
                    continue
                seen.add(x)
                comp.append(x)
                todo.extend(y for y in self.worlds if y not in seen and (self.leq(x, y) or self.leq(y, x)))
            out.append(sorted(comp, key=self.index.get))
        return out


class Model:
    def __init__(self, frame: Frame, valuation: dict):
        self.frame = frame
        self.valuation = {p: {w: frozenset(map(tuple, ts)) for w, ts in per.items() if ts}
                          for p, per in valuation.items()}
        for p, per in self.valuation.items():
            for w, tuples in per.items():
                if w not in frame.index:
                    raise ModelError(f"unknown world {w!r} in valuation of {p}")
                arities = {len(t) for t in tuples}
                if len(arities) > 1:
                    raise ModelError(f"predicate {p} used with several arities")
                for t in tuples:
                    for e in t:
                        if e not in frame.domains[w]:
                            raise ModelError(f"{p}({','.join(t)}) forced at {w} but {e} is not in its domain")
                for v in frame.above(w):
                    lost = tuples - per.get(v, frozenset())
                    if lost:
                        t = sorted(lost)[0]
                        raise ModelError(f"persistence fails: {p}({','.join(t)}) at {w} but not at {v}")
        self._atom_mask = {}
        for p, per in self.valuation.items():
            for w, tuples in per.items():
                for t in tuples:
                    self._atom_mask[(p, t)] = self._atom_mask.get((p, t), 0) | 1 << frame.index[w]

    @classmethod
    def from_forced(cls, frame: Frame, forced: dict) -> "Model":
        return cls(frame, forced)

    @classmethod
    def from_masks(cls, frame: Frame, masks: dict) -> "Model":
        """Build from ``{(pred, args): world bitmask}``."""
        val: dict = {}
        for (p, args), m in masks.items():
            for w in frame.worlds_of(m):
                val.setdefault(p, {}).setdefault(w, set()).add(tuple(args))
        return cls(frame, val)

    def atom_mask(self, pred: str, args: tuple) -> int:
        return self._atom_mask.get((pred, tuple(args)), 0)

    def __repr__(self):
        return f"Model({self.frame!r}, {self.valuation!r})"


# --- forcing ---------------------------------------------------------------


def _element(t, env: dict) -> str:
    if isinstance(t, Var):
        return env.get(t.name, t.name)
    if isinstance(t, Fn) and not t.args:
        return t.symbol
    raise ModelError(f"function symbols are not interpreted in Kripke models: {t!r}")


def _interior(fr: Frame, m: int) -> int:
    """Worlds all of whose successors lie in ``m``."""
    out = 0
    for i, u in enumerate(fr.up):
        if u & m == u:
            out |= 1 << i
    return out


def truth_set(m: Model, f, env: dict | None = None) -> int:
    """Bitmask of the worlds forcing ``f``.  Correct on worlds where every element
    named by ``f`` (under ``env``) exists."""
    fr = m.frame
    env = env or {}

    def go(g, env):
        if isinstance(g, Atom):
            return m.atom_mask(g.pred, tuple(_element(a, env) for a in g.args))
        if isinstance(g, Bottom):
            return 0
        if isinstance(g, Top):
            return fr.full
        if isinstance(g, And):
            return go(g.left, env) & go(g.right, env)
        if isinstance(g, Or):
            return go(g.left, env) | go(g.right, env)
        if isinstance(g, Implies):
            return _interior(fr, ~go(g.left, env) | go(g.right, env))
        out = fr.full if isinstance(g, Forall) else 0
        for d in fr.elements:
            here = fr.defined([d])
            s = go(g.body, {**env, g.var: d})
            if isinstance(g, Forall):
                out &= _interior(fr, ~here | s)
            else:
                out |= here & s
        return out & fr.full

    return go(f, env)


def _named_elements(f) -> set:
    out = set()

    def bound(g, scope):
        if isinstance(g, Atom):
            for a in g.args:
                if isinstance(a, Var) and a.name not in scope:
                    out.add(a.name)
                elif isinstance(a, Fn):
                    if a.args:
                        raise ModelError(f"function symbols are not interpreted in Kripke models: {a.symbol}")
                    out.add(a.symbol)
        elif isinstance(g, (Forall, Exists)):
            bound(g.body, scope | {g.var})
        elif isinstance(g, (And, Or, Implies)):
            bound(g.left, scope)
            bound(g.right, scope)

    bound(f, frozenset())
    return out


def forces(m: Model, w: str, f) -> bool:
    """``M, w |- f``.  Free variables and constants name domain elements."""
    fr = m.frame
    if w not in fr.index:
        raise ModelError(f"unknown world {w!r}")
    for e in sorted(_named_elements(f)):
        if e not in fr.domains[w]:
            raise ModelError(f"{e} is not in the domain of {w}")
    return bool(truth_set(m, f) >> fr.index[w] & 1)


def forces_naive(m: Model, w: str, f) -> bool:
    """Direct transcription of the forcing clauses, used as a test oracle."""
    fr = m.frame
    if isinstance(f, Atom):
        args = tuple(_element(a, {}) for a in f.args)
        return args in m.valuation.get(f.pred, {}).get(w, frozenset())
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Top):
        return True
    if isinstance(f, And):
        return forces_naive(m, w, f.left) and forces_naive(m, w, f.right)
    if isinstance(f, Or):
        return forces_naive(m, w, f.left) or forces_naive(m, w, f.right)
    if isinstance(f, Implies):
        return all(not forces_naive(m, v, f.left) or forces_naive(m, v, f.right) for v in fr.above(w))
    if isinstance(f, Exists):
        return any(forces_naive(m, w, instantiate(f, Fn(d))) for d in sorted(fr.domains[w]))
    return all(forces_naive(m, v, instantiate(f, Fn(d))) for v in fr.above(w) for d in sorted(fr.domains[v]))


def valid_in_model(m: Model, f) -> bool:
    return all(forces(m, w, f) for w in m.frame.worlds)


# --- frame properties ------------------------------------------------------


@dataclass
class FrameReport:
    constant_domain: bool
    linear: bool
    FDS: bool
    WF: bool = True
    cWF: bool = True
    classification: str = "outside"
    witnesses: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": "frame",
            "constant_domain": self.constant_domain,
            "linear": self.linear,
            "FDS": self.FDS,
            "WF": self.WF,
            "cWF": self.cWF,
            "classification": self.classification,
            "witnesses": {k: list(v) for k, v in self.witnesses.items()},
        }


CLASSES = ("in_F", "in_F_ED_only", "in_F_SW_only", "outside")


def _forks(fr: Frame):
    for w in fr.worlds:
        ab = fr.above(w)
        for u, v in itertools.combinations(ab, 2):
            if not fr.leq(u, v) and not fr.leq(v, u):
                yield w, u, v


def frame_properties(fr: Frame) -> FrameReport:
    wit: dict = {}
    cd = True
    for u in fr.worlds:
        for v in fr.above(u):
            if fr.domains[u] != fr.domains[v]:
                cd = False
                wit.setdefault("constant_domain", (u, v, sorted(fr.domains[v] - fr.domains[u])[0]))
    forks = list(_forks(fr))
    linear = not forks
    if forks:
        wit["linear"] = forks[0]
    fds = True
    for w, u, v in forks:
        if not (fr.domains[u] == fr.domains[v] == fr.domains[w] and len(fr.domains[w]) == 1):
            fds = False
            wit["FDS"] = (w, u, v)
            break
    rep = FrameReport(cd, linear, fds, witnesses=wit)
    rep.classification = classify_frame(fr)
    return rep


def classify_frame(fr: Frame) -> str:
    """Membership in the class F, per connected component.  Finite frames satisfy
    WF and cWF, so the ED-only and SW-only classes never arise here."""
    for comp in fr.components():
        doms = {fr.domains[w] for w in comp}
        if len(doms) != 1:
            return "outside"
        (dom,) = doms
        if len(dom) == 1:
            continue
        comp_set = set(comp)
        if any(w in comp_set for w, _, _ in _forks(fr)):
            return "outside"
    return "in_F"


def predicted_validity(fr: Frame, kind: str) -> bool:
    """Validity of a shift schema as predicted by the frame classification."""
    if kind == "CD":
        return frame_properties(fr).constant_domain
    return classify_frame(fr) == "in_F"


# --- schema validity by valuation enumeration ------------------------------

SCHEMA_P = Atom("P", (Var("x"),))
SCHEMA_Q = Atom("Q", ())


def schema_instance(kind: str):
    return shift_axiom(kind, SCHEMA_P, SCHEMA_Q, "x")


def valuations(fr: Frame, max_worlds: int = 10, max_domain: int = 3):
    """All persistent valuations of P (unary) and Q (nullary), as models."""
    if len(fr.worlds) > max_worlds:
        raise ResourceLimitError(f"{len(fr.worlds)} worlds exceeds the cap of {max_worlds}")
    if len(fr.elements) > max_domain:
        raise ResourceLimitError(f"{len(fr.elements)} elements exceeds the cap of {max_domain}")
    per_elem = [fr.upsets(fr.defined([d])) for d in fr.elements]
    q_sets = fr.upsets()
    for q in q_sets:
        for ps in itertools.product(*per_elem):
            masks = {("Q", ()): q}
            masks.update({("P", (d,)): p for d, p in zip(fr.elements, ps)})
            yield Model.from_masks(fr, masks)


def axiom_valid_on_frame(fr: Frame, kind: str, max_worlds: int = 10, max_domain: int = 3) -> tuple:
    """(valid, countermodel or None), deciding over atomic instances with A := P(x), B := Q."""
    f = schema_instance(kind)
    for m in valuations(fr, max_worlds, max_domain):
        if truth_set(m, f) != fr.full:
            return False, m
    return True, None


# --- frame enumeration -----------------------------------------------------


def posets(n: int) -> list:
    """Partial orders on worlds 0..n-1 up to isomorphism, as up-set bitmasks."""
    seen: set = set()
    out = []
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    perms = list(itertools.permutations(range(n)))
    for bits in range(1 << len(pairs)):
        up = [1 << i for i in range(n)]
        for k, (i, j) in enumerate(pairs):
            if bits >> k & 1:
                up[i] |= 1 << j
        ok = True
        for i in range(n):
            for j in range(n):
                if i != j and up[i] >> j & 1:
                    if up[j] >> i & 1 or up[j] & ~up[i]:
                        ok = False
        if not ok:
            continue
        keys = []
        for p in perms:
            rel = frozenset((p[i], p[j]) for i in range(n) for j in range(n) if up[i] >> j & 1)
            keys.append(tuple(sorted(rel)))
        key = min(keys)
        if key in seen:
            continue
        seen.add(key)
        out.append(up)
    return out


def frame_from_up(up: list, domains: list) -> Frame:
    names = [f"w{i}" for i in range(len(up))]
    pairs = [(names[i], names[j]) for i in range(len(up)) for j in range(len(up)) if i != j and up[i] >> j & 1]
    return Frame(names, pairs, {names[i]: domains[i] for i in range(len(up))})


def small_frames(max_worlds: int = 4, max_domain: int = 2, chain_max: int = 3):
    """Every poset with at most ``max_worlds`` worlds under each constant domain of
    size up to ``max_domain``, plus growing-domain chains up to ``chain_max``."""
    for n in range(1, max_worlds + 1):
        for up in posets(n):
            for k in range(1, max_domain + 1):
                dom = [str(i) for i in range(k)]
                yield frame_from_up(up, [dom] * n)
    for n in range(2, chain_max + 1):
        names = [f"w{i}" for i in range(n)]
        pairs = list(zip(names, names[1:]))
        yield Frame(names, pairs, {names[i]: [str(j) for j in range(i + 1)] for i in range(n)})


# --- the incompleteness witness --------------------------------------------


def lin_oep_instance():
    P, Q = Atom("P", ()), Atom("Q", ())
    R = lambda t: Atom("R", (t,))  # noqa: E731
    return Or(Or(Implies(P, Q), Implies(Q, P)), Implies(Exists("x", R(Var("x"))), Forall("x", R(Var("x")))))


def atomic_shift_instances():
    """CD, ED and SW instances with A(x) an atom of {P, Q, R} and B a closed atom."""
    hole = [Atom("R", (Var("x"),)), Atom("P", ()), Atom("Q", ())]
    rest = [Atom("P", ()), Atom("Q", ()), Atom("R", (Fn("a"),)), Atom("R", (Fn("b"),))]
    for kind in ("CD", "ED", "SW"):
        for a in hole:
            for b in rest:
                yield kind, shift_axiom(kind, a, b, "x")


@dataclass
class WitnessReport:
    lin_oep_fails: bool
    instances_hold: bool
    failing_instances: list
    depth: int
    claim_holds: bool
    classes: int
    claim_counterexample: object = None

    @property
    def ok(self) -> bool:
        return self.lin_oep_fails and self.instances_hold and self.claim_holds

    def to_dict(self) -> dict:
        from .parser import render

        return {
            "kind": "witness",
            "ok": self.ok,
            "lin_oep_fails": self.lin_oep_fails,
            "instances_hold": self.instances_hold,
            "failing_instances": [render(f) for f in self.failing_instances],
            "depth": self.depth,
            "claim_holds": self.claim_holds,
            "semantic_classes": self.classes,
        }


class _Lanes:
    """Formulas with free variables among ``vars`` over a constant-domain model,
    packed as one integer: one lane of world bits per variable assignment."""

    def __init__(self, m: Model, variables: tuple):
        fr = m.frame
        self.m, self.fr, self.vars = m, fr, variables
        doms = set(fr.domains.values())
        if len(doms) != 1:
            raise ModelError("semantic class enumeration needs a constant domain")
        self.elems = sorted(next(iter(doms)))
        self.n = len(fr.worlds)
        self.assign = list(itertools.product(range(len(self.elems)), repeat=len(variables)))
        self.lanes = len(self.assign)
        self.lane0 = sum(1 << (k * self.n) for k in range(self.lanes))
        self.full = sum(fr.full << (k * self.n) for k in range(self.lanes))
        self.upw = [sum(fr.up[i] << (k * self.n) for k in range(self.lanes)) for i in range(self.n)]

    def pack(self, masks) -> int:
        return sum(mk << (k * self.n) for k, mk in enumerate(masks))

    def unpack(self, v: int) -> list:
        lm = self.fr.full
        return [(v >> (k * self.n)) & lm for k in range(self.lanes)]

    def atom(self, f) -> int:
        out = []
        for a in self.assign:
            env = {x: self.elems[i] for x, i in zip(self.vars, a)}
            out.append(truth_set(self.m, f, env))
        return self.pack(out)

    def imp(self, a: int, b: int) -> int:
        c = a & ~b & self.full
        out = 0
        for w in range(self.n):
            t = c & self.upw[w]
            nz = 0
            for s in range(self.n):
                nz |= t >> s
            out |= (self.lane0 & ~nz) << w
        return out

    def quant(self, v: int, var: str, universal: bool) -> int:
        lanes = self.unpack(v)
        pos = self.vars.index(var)
        index = {a: k for k, a in enumerate(self.assign)}
        out = []
        for a in self.assign:
            group = [lanes[index[a[:pos] + (d,) + a[pos + 1:]]] for d in range(len(self.elems))]
            if universal:
                acc = self.fr.full
                for g in group:
                    acc &= g
                out.append(_interior(self.fr, acc))
            else:
                acc = 0
                for g in group:
                    acc |= g
                out.append(acc)
        return self.pack(out)


def semantic_classes(m: Model, depth: int, variables=("x", "y", "z"), atoms=None,
                     max_classes: int = 2_000_000) -> tuple:
    """All truth values of formulas of the given connective depth over ``atoms``.

    Returns (lanes helper, set of packed values)."""
    L = _Lanes(m, tuple(variables))
    if atoms is None:
        atoms = [Atom("P", ()), Atom("Q", ()), BOTTOM]
        atoms += [Atom("R", (Var(v),)) for v in variables]
    level = {L.atom(a) for a in atoms}
    for _ in range(depth):
        cur = sorted(level)
        new = set(level)
        for a in cur:
            for b in cur:
                new.add(a & b)
                new.add(a | b)
                new.add(L.imp(a, b))
            for v in variables:
                new.add(L.quant(a, v, True))
                new.add(L.quant(a, v, False))
            if len(new) > max_classes:
                raise ResourceLimitError(f"more than {max_classes} semantic classes")
        level = new
    return L, level




def claim_holds(m: Model, depth: int, worlds=("w2", "w3"), pair=("a", "b"), variables=("x", "y", "z")) -> tuple:
    """At each given world, every psi(x) has psi(a), psi(b) both forced or both refuted."""
    L, values = semantic_classes(m, depth, variables)
    ia, ib = (L.elems.index(e) for e in pair)
    xpos = L.vars.index("x")
    others = [v for v in L.vars if v != "x"]
    for v in sorted(values):
        if any(not _independent(L, v, o) for o in others):
            continue
        lanes = L.unpack(v)
        la = next(lanes[k] for k, a in enumerate(L.assign) if a[xpos] == ia)
        lb = next(lanes[k] for k, a in enumerate(L.assign) if a[xpos] == ib)
        for w in worlds:
            i = m.frame.index[w]
            up = m.frame.up[i]
            both = la >> i & 1 and lb >> i & 1
            neither = not (la & up) and not (lb & up)
            if not (both or neither):
                return False, len(values), (w, v)
    return True, len(values), None


def _independent(L: _Lanes, v: int, var: str) -> bool:
    lanes = L.unpack(v)
    pos = L.vars.index(var)
    index = {a: k for k, a in enumerate(L.assign)}
    for k, a in enumerate(L.assign):
        for d in range(len(L.elems)):
            if lanes[index[a[:pos] + (d,) + a[pos + 1:]]] != lanes[k]:
                return False
    return True


def check_incompleteness_witness(m: Model | None = None, depth: int = 3, root: str = "w1") -> WitnessReport:
    if m is None:
        from .parser import load
        from importlib import resources

        m, _ = load(resources.files("qshift") / "corpus" / "incompleteness.krp")
    lin = not forces(m, root, lin_oep_instance())
    failing = [f for _, f in atomic_shift_instances() if not valid_in_model(m, f)]
    ok, n, cex = claim_holds(m, depth)
    return WitnessReport(lin, not failing, failing, depth, ok, n, cex)


# --- random models for property tests --------------------------------------


def random_model(rng, max_worlds: int = 4, elements=("a", "b"), preds=(("P", 1), ("Q", 0), ("R", 1))) -> Model:
    n = rng.randint(1, max_worlds)
    names = [f"w{i}" for i in range(n)]
    pairs = [(names[i], names[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4]
    # domains grow along the order: start small at each world, then close upward
    base = {w: {elements[0]} | {e for e in elements[1:] if rng.random() < 0.5} for w in names}
    fr0 = Frame(names, pairs, {w: list(elements) for w in names})
    dom = {w: set() for w in names}
    for w in names:
        for v in fr0.above(w):
            dom[v] |= base[w]
    fr = Frame(names, pairs, dom)
    masks = {}
    for p, k in preds:
        for args in itertools.product(fr.elements, repeat=k):
            within = fr.defined(args)
            seeds = [w for w in fr.worlds_of(within) if rng.random() < 0.3]
            m = 0
            for w in seeds:
                m |= fr.up[fr.index[w]]
            masks[(p, args)] = m
    return Model.from_masks(fr, masks)


__all__ = [
    "Frame", "Model", "ModelError", "FrameReport", "forces", "forces_naive", "truth_set",
    "frame_properties", "classify_frame", "axiom_valid_on_frame", "predicted_validity",
    "check_incompleteness_witness", "WitnessReport", "small_frames", "posets", "semantic_classes",
    "claim_holds", "lin_oep_instance", "atomic_shift_instances", "random_model", "valid_in_model",
    "schema_instance", "valuations", "CLASSES",
]
