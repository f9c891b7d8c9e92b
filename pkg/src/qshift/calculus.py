"""Sequent-calculus proofs and their checkers.

Systems: ``LK``, ``LJ`` (single conclusion), and ``LKpp`` / ``LJpp``.  The last
two drop the eigenvariable condition and ask instead that all strong
quantifier inferences be *suitable*: substitutable, side-variable acyclic and
very weakly regular.

A proof node carries its rule, conclusion, premises, the index of the
principal formula on the relevant side of the conclusion, and for quantifier
rules the instantiating term or characteristic variable.  For ``Cut`` the index
points at the cut formula in the left premise's succedent.

Binary rules use a lenient context discipline.  For each formula, its
multiplicity m in the conclusion context must satisfy
``max(m1, m2) <= m <= m1 + m2``, where m1 and m2 are its multiplicities in the
two premise contexts.  This covers both shared and split contexts.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Iterator

from .core import (
    Atom, Bottom, Top, And, Or, Implies, Forall, Exists, Var, Sequent, BOTTOM, TOP,
    free_vars, term_vars, substitute, captures, all_vars, fresh_name, instantiate,
    shift_instance_kind,
)

RULES = {
    "Ax": 0, "Bot": 0, "Top": 0,
    "Lw": 1, "Rw": 1, "Lc": 1, "Rc": 1,
    "Land1": 1, "Land2": 1, "Rand": 2,
    "Ror1": 1, "Ror2": 1, "Lor": 2,
    "Limp": 2, "Rimp": 1,
    "Lforall": 1, "Rforall": 1, "Lexists": 1, "Rexists": 1,
    "Cut": 2,
}
QUANTIFIER_RULES = frozenset({"Lforall", "Rforall", "Lexists", "Rexists"})
STRONG_RULES = frozenset({"Rforall", "Lexists"})
WEAK_RULES = frozenset({"Lforall", "Rexists"})
AXIOMS = frozenset({"Ax", "Bot", "Top"})
SYSTEMS = ("LK", "LJ", "LKpp", "LJpp")

CONDITIONS = (
    "rule-shape", "single-conclusion", "eigenvariable", "weak-term-bound-variable",
    "substitutability", "side-variable-cycle", "very-weak-regularity",
    "non-atomic-axiom", "cut-present", "shift-hypothesis",
)

_PRINCIPAL_TYPE = {
    "Land1": (And, "L"), "Land2": (And, "L"), "Rand": (And, "R"),
    "Ror1": (Or, "R"), "Ror2": (Or, "R"), "Lor": (Or, "L"),
    "Limp": (Implies, "L"), "Rimp": (Implies, "R"),
    "Lforall": (Forall, "L"), "Rforall": (Forall, "R"),
    "Lexists": (Exists, "L"), "Rexists": (Exists, "R"),
    "Lw": (None, "L"), "Rw": (None, "R"), "Lc": (None, "L"), "Rc": (None, "R"),
}


@dataclass(frozen=True)
class Proof:
    rule: str
    conclusion: Sequent
    premises: tuple = ()
    index: int | None = None
    term: object = None

    def nodes(self) -> Iterator["Proof"]:
        yield self
        for k in self.premises:
            yield from k.nodes()

    def walk(self, path: tuple = ()) -> Iterator[tuple]:
        """(path, node) pairs in pre-order."""
        yield path, self
        for i, k in enumerate(self.premises):
            yield from k.walk(path + (i,))

    def at(self, path) -> "Proof":
        node = self
        for i in path:
            node = node.premises[i]
        return node

    def replace(self, path, new: "Proof") -> "Proof":
        if not path:
            return new
        kids = list(self.premises)
        kids[path[0]] = kids[path[0]].replace(tuple(path[1:]), new)
        return Proof(self.rule, self.conclusion, tuple(kids), self.index, self.term)

    @property
    def side(self) -> str | None:
        info = _PRINCIPAL_TYPE.get(self.rule)
        return info[1] if info else None

    def principal(self):
        if self.side is None or self.index is None:
            return None
        seq = self.conclusion.side(self.side)
        return seq[self.index] if 0 <= self.index < len(seq) else None

    def height(self) -> int:
        return 1 + max((k.height() for k in self.premises), default=0)

    def __len__(self) -> int:
        return sum(1 for _ in self.nodes())


@dataclass(frozen=True)
class Violation:
    path: tuple
    condition: str
    message: str

    def to_dict(self) -> dict:
        return {"path": list(self.path), "condition": self.condition, "message": self.message}


@dataclass
class CheckReport:
    system: str
    violations: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def accepted(self) -> bool:
        return not self.violations

    @property
    def verdict(self) -> str:
        return "accepted" if self.accepted else "rejected"

    def kinds(self) -> set:
        return {v.condition for v in self.violations}

    def to_dict(self) -> dict:
        return {
            "kind": "check",
            "system": self.system,
            "verdict": self.verdict,
            "violations": [v.to_dict() for v in self.violations],
            "info": self.info,
        }


# --- rule shapes ------------------------------------------------------------


def _minus(side: tuple, i: int) -> Counter:
    c = Counter(side)
    c[side[i]] -= 1
    return +c


def _remove(c: Counter, f) -> Counter | None:
    if c[f] <= 0:
        return None
    c = Counter(c)
    c[f] -= 1
    return +c


def _merge_ok(m: Counter, c1: Counter, c2: Counter) -> bool:
    for f in set(m) | set(c1) | set(c2):
        if not max(c1[f], c2[f]) <= m[f] <= c1[f] + c2[f]:
            return False
    return True


def _same(a: Counter, b: Counter) -> bool:
    return +a == +b


def shape_errors(node: Proof) -> list:
    """Why ``node`` is not a correct instance of its rule (empty when it is)."""
    rule = node.rule
    if rule not in RULES:
        return [f"unknown rule {rule!r}"]
    if len(node.premises) != RULES[rule]:
        return [f"{rule} takes {RULES[rule]} premise(s), found {len(node.premises)}"]
    c = node.conclusion
    G, D = c.antecedent, c.succedent
    if rule == "Ax":
        if len(G) == 1 and len(D) == 1 and G[0] == D[0]:
            return []
        return ["axiom must have the form A => A"]
    if rule == "Bot":
        if len(G) == 1 and isinstance(G[0], Bottom) and not D:
            return []
        return ["falsity axiom must be _|_ =>"]
    if rule == "Top":
        if not G and len(D) == 1 and isinstance(D[0], Top):
            return []
        return ["truth axiom must be => T"]

    if rule == "Cut":
        p1, p2 = (k.conclusion for k in node.premises)
        i = node.index
        if i is None or not 0 <= i < len(p1.succedent):
            return ["cut index must point into the left premise's succedent"]
        cut = p1.succedent[i]
        r2 = _remove(Counter(p2.antecedent), cut)
        if r2 is None:
            return ["cut formula missing from the right premise's antecedent"]
        ok = (_merge_ok(Counter(G), Counter(p1.antecedent), r2)
              and _merge_ok(Counter(D), _minus(p1.succedent, i), Counter(p2.succedent)))
        return [] if ok else ["contexts of the cut do not combine into the conclusion"]

    kind, side = _PRINCIPAL_TYPE[rule]
    seq = G if side == "L" else D
    i = node.index
    if i is None or not 0 <= i < len(seq):
        return [f"principal index {i} out of range"]
    P = seq[i]
    if kind is not None and not isinstance(P, kind):
        return [f"principal formula of {rule} must be a {kind.__name__}"]
    ctxL = _minus(G, i) if side == "L" else Counter(G)
    ctxR = _minus(D, i) if side == "R" else Counter(D)

    if rule in ("Lw", "Rw", "Lc", "Rc", "Land1", "Land2", "Ror1", "Ror2", "Rimp") or rule in QUANTIFIER_RULES:
        prem = node.premises[0].conclusion
        eL, eR = Counter(ctxL), Counter(ctxR)
        if rule in ("Lc", "Rc"):
            (eL if side == "L" else eR)[P] += 2
        elif rule == "Land1":
            eL[P.left] += 1
        elif rule == "Land2":
            eL[P.right] += 1
        elif rule == "Ror1":
            eR[P.left] += 1
        elif rule == "Ror2":
            eR[P.right] += 1
        elif rule == "Rimp":
            eL[P.left] += 1
            eR[P.right] += 1
        elif rule in QUANTIFIER_RULES:
            t = node.term
            if t is None:
                return [f"{rule} needs a term or variable annotation"]
            if rule in STRONG_RULES and not isinstance(t, Var):
                return [f"{rule} needs a variable, found a compound term"]
            if rule in STRONG_RULES and captures(P.body, P.var, t):
                return ["characteristic variable would be captured"]
            (eL if side == "L" else eR)[instantiate(P, t)] += 1
        if _same(Counter(prem.antecedent), eL) and _same(Counter(prem.succedent), eR):
            return []
        return [f"premise does not match the {rule} rule"]

    p1, p2 = (k.conclusion for k in node.premises)
    if rule == "Rand":
        a1 = _remove(Counter(p1.succedent), P.left)
        a2 = _remove(Counter(p2.succedent), P.right)
        if a1 is None or a2 is None:
            return ["premises lack the conjuncts"]
        okL = _merge_ok(ctxL, Counter(p1.antecedent), Counter(p2.antecedent))
        okR = _merge_ok(ctxR, a1, a2)
    elif rule == "Lor":
        a1 = _remove(Counter(p1.antecedent), P.left)
        a2 = _remove(Counter(p2.antecedent), P.right)
        if a1 is None or a2 is None:
            return ["premises lack the disjuncts"]
        okL = _merge_ok(ctxL, a1, a2)
        okR = _merge_ok(ctxR, Counter(p1.succedent), Counter(p2.succedent))
    else:  # Limp
        a1 = _remove(Counter(p1.succedent), P.left)
        a2 = _remove(Counter(p2.antecedent), P.right)
        if a1 is None or a2 is None:
            return ["premises lack the antecedent or consequent"]
        okL = _merge_ok(ctxL, Counter(p1.antecedent), a2)
        okR = _merge_ok(ctxR, a1, Counter(p2.succedent))
    return [] if okL and okR else [f"contexts of {rule} do not combine into the conclusion"]


# --- side variables ---------------------------------------------------------


def strong_inferences(p: Proof) -> list:
    """(path, node) for every strong quantifier inference with a variable annotation."""
    return [(path, n) for path, n in p.walk() if n.rule in STRONG_RULES and isinstance(n.term, Var)
            and n.principal() is not None]


@dataclass
class SideVariableGraph:
    nodes: set
    edges: set  # (a, b): b is a side variable of a

    def successors(self, a) -> set:
        return {b for x, b in self.edges if x == a}

    def find_cycle(self) -> list | None:
        for a, b in self.edges:
            if a == b:
                return [a, a]
        ts = TopologicalSorter({a: self.successors(a) for a in self.nodes})
        try:
            ts.prepare()
        except CycleError as e:
            return list(e.args[1])
        return None

    def is_acyclic(self) -> bool:
        return self.find_cycle() is None

    def topological_order(self) -> list:
        """Variables ordered so that a comes before b whenever a -> b."""
        preds = {a: set() for a in self.nodes}
        for a, b in self.edges:
            preds.setdefault(b, set()).add(a)
            preds.setdefault(a, set())
        return list(TopologicalSorter(preds).static_order())


def side_variable_graph(p: Proof) -> SideVariableGraph:
    nodes, edges = set(), set()
    for _, n in strong_inferences(p):
        a = n.term.name
        nodes.add(a)
        for b in free_vars(n.principal()):
            edges.add((a, b))
    return SideVariableGraph(nodes, edges)


# --- checking ---------------------------------------------------------------


def check(p: Proof, system: str = "LK") -> CheckReport:
    if system not in SYSTEMS:
        raise ValueError(f"unknown system {system!r}; choose from {', '.join(SYSTEMS)}")
    rep = CheckReport(system)
    add = rep.violations.append
    intuitionistic = system in ("LJ", "LJpp")
    plus = system in ("LKpp", "LJpp")
    shape_ok = True
    for path, n in p.walk():
        errs = shape_errors(n)
        for e in errs:
            add(Violation(path, "rule-shape", e))
        shape_ok = shape_ok and not errs
        if intuitionistic and len(n.conclusion.succedent) > 1:
            add(Violation(path, "single-conclusion", "more than one formula in the succedent"))
        if errs or n.rule not in QUANTIFIER_RULES:
            continue
        P = n.principal()
        if n.rule in WEAK_RULES and captures(P.body, P.var, n.term):
            add(Violation(path, "weak-term-bound-variable",
                          f"a variable of the instantiating term is bound in {P.var}'s scope"))
        if n.rule in STRONG_RULES and not plus and n.term.name in n.conclusion.free_vars():
            add(Violation(path, "eigenvariable",
                          f"variable {n.term.name} is free in the conclusion"))
    if plus and shape_ok:
        _suitability(p, rep)
    return rep


def _suitability(p: Proof, rep: CheckReport) -> None:
    add = rep.violations.append
    strong = strong_inferences(p)
    end_fv = p.conclusion.free_vars()
    for path, n in strong:
        if n.term.name in end_fv:
            add(Violation(path, "substitutability",
                          f"characteristic variable {n.term.name} is free in the end-sequent"))
    g = side_variable_graph(p)
    cycle = g.find_cycle()
    if cycle:
        add(Violation((), "side-variable-cycle", "side variables form a cycle: " + " < ".join(cycle)))
    first: dict = {}
    for path, n in strong:
        a = n.term.name
        if a in first and first[a][1].principal() != n.principal():
            add(Violation(path, "very-weak-regularity",
                          f"variable {a} is characteristic for two different principal formulas"))
        first.setdefault(a, (path, n))


def is_cut_free(p: Proof) -> bool:
    return all(n.rule != "Cut" for n in p.nodes())


def has_atomic_axioms(p: Proof) -> bool:
    for n in p.nodes():
        if n.rule == "Ax" and not isinstance(n.conclusion.antecedent[0], (Atom, Bottom, Top)):
            return False
    return True


def skeleton(p: Proof):
    """Rule-tag tree with quantifier inferences erased."""
    if p.rule in QUANTIFIER_RULES:
        return skeleton(p.premises[0])
    return (p.rule, tuple(skeleton(k) for k in p.premises))


def characteristic_variables(p: Proof) -> set:
    return {n.term.name for _, n in strong_inferences(p)}


# --- building proofs --------------------------------------------------------


def node(rule: str, conclusion: Sequent, premises=(), principal=None, term=None, cut=None) -> Proof:
    """Build a node, locating the principal (or cut) formula's index."""
    index = None
    if rule == "Cut":
        index = premises[0].conclusion.succedent.index(cut)
    elif principal is not None and rule in _PRINCIPAL_TYPE:
        side = _PRINCIPAL_TYPE[rule][1]
        index = conclusion.side(side).index(principal)
    return Proof(rule, conclusion, tuple(premises), index, term)


def _cmax(a: tuple, b: tuple) -> list:
    out = list(a)
    need = Counter(b) - Counter(a)
    for f in b:
        if need[f] > 0:
            out.append(f)
            need[f] -= 1
    return out


def _drop(seq: tuple, f) -> list:
    out = list(seq)
    out.remove(f)
    return out


def infer(rule: str, premises=(), principal=None, term=None, cut=None) -> Proof:
    """Apply ``rule`` and compute its conclusion.  Binary rules share contexts."""
    prem = [k.conclusion for k in premises]
    if rule == "Ax":
        return node(rule, Sequent([principal], [principal]), (), principal)
    if rule == "Bot":
        return node(rule, Sequent([BOTTOM], []), (), BOTTOM)
    if rule == "Top":
        return node(rule, Sequent([], [TOP]), (), TOP)
    if rule == "Cut":
        a, b = prem
        c = Sequent(_cmax(a.antecedent, _drop(b.antecedent, cut)), _cmax(_drop(a.succedent, cut), b.succedent))
        return node(rule, c, premises, cut=cut)
    side = _PRINCIPAL_TYPE[rule][1]
    P = principal
    if len(prem) == 1:
        s = prem[0]
        G, D = list(s.antecedent), list(s.succedent)
        tgt = G if side == "L" else D

        def swap(aux):
            tgt[tgt.index(aux)] = P

        if rule in ("Lw", "Rw"):
            tgt.append(P)
        elif rule in ("Lc", "Rc"):
            i = tgt.index(P)
            del tgt[tgt.index(P, i + 1)]
        elif rule == "Land1" or rule == "Ror1":
            swap(P.left)
        elif rule == "Land2" or rule == "Ror2":
            swap(P.right)
        elif rule == "Rimp":
            G.remove(P.left)
            swap(P.right)
        else:
            swap(instantiate(P, term))
        return node(rule, Sequent(G, D), premises, P, term)
    a, b = prem
    if rule == "Rand":
        G = _cmax(a.antecedent, b.antecedent)
        D = _cmax(_drop(a.succedent, P.left), _drop(b.succedent, P.right)) + [P]
    elif rule == "Lor":
        G = [P] + _cmax(_drop(a.antecedent, P.left), _drop(b.antecedent, P.right))
        D = _cmax(a.succedent, b.succedent)
    elif rule == "Limp":
        G = [P] + _cmax(a.antecedent, _drop(b.antecedent, P.right))
        D = _cmax(_drop(a.succedent, P.left), b.succedent)
    else:
        raise ValueError(f"cannot infer with rule {rule!r}")
    return node(rule, Sequent(G, D), premises, P)


def expand_axiom(f, avoid: set | None = None) -> Proof:
    """LJ proof of ``f => f`` whose axioms are all atomic."""
    avoid = set(all_vars(f)) if avoid is None else avoid
    if isinstance(f, Atom):
        return infer("Ax", principal=f)
    if isinstance(f, Bottom):
        return infer("Rw", [infer("Bot")], BOTTOM)
    if isinstance(f, Top):
        return infer("Lw", [infer("Top")], TOP)
    if isinstance(f, (Forall, Exists)):
        y = fresh_name(f.var, avoid)
        avoid.add(y)
        inner = expand_axiom(instantiate(f, Var(y)), avoid)
        if isinstance(f, Forall):
            return infer("Rforall", [infer("Lforall", [inner], f, Var(y))], f, Var(y))
        return infer("Lexists", [infer("Rexists", [inner], f, Var(y))], f, Var(y))
    pa, pb = expand_axiom(f.left, avoid), expand_axiom(f.right, avoid)
    if isinstance(f, And):
        return infer("Rand", [infer("Land1", [pa], f), infer("Land2", [pb], f)], f)
    if isinstance(f, Or):
        return infer("Lor", [infer("Ror1", [pa], f), infer("Ror2", [pb], f)], f)
    return infer("Rimp", [infer("Limp", [pa, pb], f)], f)


def check_qfs(p: Proof, declared_hypotheses=()) -> CheckReport:
    """LJ proof whose declared hypotheses are shift-axiom instances (or their
    universal closures) occurring in the end-sequent's antecedent."""
    rep = check(p, "LJ")
    rep.system = "QFS"
    remaining = Counter(p.conclusion.antecedent)
    kinds = []
    for h in declared_hypotheses:
        kind = shift_instance_kind(h)
        kinds.append(kind)
        if kind is None:
            rep.violations.append(Violation((), "shift-hypothesis", "hypothesis is not an instance of CD, ED or SW"))
        if remaining[h] <= 0:
            rep.violations.append(Violation((), "shift-hypothesis", "hypothesis missing from the end-sequent's antecedent"))
        else:
            remaining[h] -= 1
    rep.info["hypothesis_kinds"] = kinds
    return rep


# --- mutations --------------------------------------------------------------

_LOGICAL = [r for r, (k, _) in _PRINCIPAL_TYPE.items() if k is not None]


def mutation_sites(p: Proof) -> list:
    """(path, kind, detail) for every mutation that cannot leave a correct proof.

    * ``axiom``: replace one side of an axiom by a fresh atom;
    * ``retag``: swap a logical rule for one of the same arity whose principal
      formula has another connective or side (the auxiliary formula is a proper
      subformula, so no premise can match both rules);
    * ``drop``: remove a premise;
    * ``term``: instantiate a non-vacuous weak quantifier with a fresh constant.
    """
    out = []
    for path, n in p.walk():
        if n.rule in AXIOMS:
            out.append((path, "axiom", None))
            continue
        if n.premises:
            out.append((path, "drop", None))
        if n.rule in _LOGICAL:
            here = _PRINCIPAL_TYPE[n.rule]
            for r in _LOGICAL:
                if RULES[r] == RULES[n.rule] and _PRINCIPAL_TYPE[r] != here:
                    out.append((path, "retag", r))
        if n.rule in WEAK_RULES:
            P = n.principal()
            if P is not None and P.var in free_vars(P.body):
                out.append((path, "term", None))
    return out


def apply_mutation(p: Proof, site) -> Proof:
    from .core import Fn

    path, kind, detail = site
    n = p.at(path)
    if kind == "axiom":
        G, D = list(n.conclusion.antecedent), list(n.conclusion.succedent)
        fresh = Atom("Mutant", ())
        if D:
            D[0] = fresh
        else:
            G[0] = fresh
        new = Proof(n.rule, Sequent(G, D), n.premises, n.index, n.term)
    elif kind == "drop":
        new = Proof(n.rule, n.conclusion, n.premises[:-1], n.index, n.term)
    elif kind == "retag":
        new = Proof(detail, n.conclusion, n.premises, n.index, n.term)
    else:
        new = Proof(n.rule, n.conclusion, n.premises, n.index, Fn("mutant_c"))
    return p.replace(path, new)


def mutate(p: Proof, rng) -> tuple:
    """One random always-invalid mutation: (mutated proof, site)."""
    sites = mutation_sites(p)
    site = sites[rng.randrange(len(sites))]
    return apply_mutation(p, site), site
