"""Proof and formula transformations.

* ``correct_ljpp`` turns an LJ++ proof into an LJ proof from shift hypotheses.
* ``deskolemize`` lifts a cut-free proof of a Skolemized sequent back to a
  proof of the original sequent in LJ++.
* ``prenexify`` moves quantifiers to the front with quantifier shifts.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .core import (
    Atom, And, Or, Implies, Forall, Exists, Var, Fn, Sequent, BINARY, QUANTIFIERS,
    children, subformula, substitute, substitute_many, instantiate, free_vars, all_vars,
    fresh_name, classify_quantifiers, match_symbols, alpha_key, is_atomic, function_symbols,
)
from .calculus import (
    Proof, check, infer, node, side_variable_graph, is_cut_free, has_atomic_axioms,
    STRONG_RULES, WEAK_RULES,
)
from .skolem import skolemize_sequent


class TransformError(ValueError):
    pass


# --- nesting depth and prenex forms -----------------------------------------


def ndq(f) -> int:
    """Sum over quantifier occurrences of the number of binary connectives above them."""

    def go(g, d):
        if isinstance(g, QUANTIFIERS):
            return d + go(g.body, d)
        if isinstance(g, BINARY):
            return go(g.left, d + 1) + go(g.right, d + 1)
        return 0

    return go(f, 0)


def is_prenex(f) -> bool:
    return ndq(f) == 0


@dataclass(frozen=True)
class PrenexStep:
    before: object
    after: object
    shift: str  # "CD", "ED", "SW" or "IQC-shift"


# (connective, quantifier, side) -> (new quantifier, justification)
_LEFT = {
    (And, Forall): (Forall, "IQC-shift"), (And, Exists): (Exists, "IQC-shift"),
    (Or, Forall): (Forall, "CD"), (Or, Exists): (Exists, "IQC-shift"),
    (Implies, Forall): (Exists, "SW"), (Implies, Exists): (Forall, "IQC-shift"),
}
_RIGHT = {
    (And, Forall): (Forall, "IQC-shift"), (And, Exists): (Exists, "IQC-shift"),
    (Or, Forall): (Forall, "CD"), (Or, Exists): (Exists, "IQC-shift"),
    (Implies, Forall): (Forall, "IQC-shift"), (Implies, Exists): (Exists, "ED"),
}


def prenex_steps(f) -> tuple:
    """Prenex form of ``f`` and the list of shift steps that produced it."""
    steps: list = []

    def pn(g):
        if isinstance(g, QUANTIFIERS):
            return type(g)(g.var, pn(g.body))
        if isinstance(g, BINARY):
            return pull(type(g), pn(g.left), pn(g.right))
        return g

    def pull(op, left, right):
        if isinstance(left, QUANTIFIERS):
            q, why = _LEFT[(op, type(left))]
            x, body = _unclash(left, right)
            steps.append(PrenexStep(op(left, right), q(x, op(body, right)), why))
            return q(x, pull(op, body, right))
        if isinstance(right, QUANTIFIERS):
            q, why = _RIGHT[(op, type(right))]
            x, body = _unclash(right, left)
            steps.append(PrenexStep(op(left, right), q(x, op(left, body)), why))
            return q(x, pull(op, left, body))
        return op(left, right)

    return pn(f), steps


def _unclash(quant, other) -> tuple:
    x, body = quant.var, quant.body
    if x in free_vars(other):
        y = fresh_name(x, all_vars(quant) | all_vars(other))
        body = substitute(body, x, Var(y))
        x = y
    return x, body


def prenexify(f, record_iqc: bool = False) -> tuple:
    """(prenex formula, shifts used).  Only CD, ED and SW are listed unless
    ``record_iqc`` is set."""
    g, steps = prenex_steps(f)
    return g, [s.shift for s in steps if record_iqc or s.shift != "IQC-shift"]


# --- correction: LJ++ to LJ with hypotheses ----------------------------------


@dataclass
class CorrectionResult:
    proof: Proof
    alpha_hypotheses: list = field(default_factory=list)  # (node path, formula)
    beta_hypotheses: list = field(default_factory=list)
    closed_hypotheses: list = field(default_factory=list)

    def to_dict(self) -> dict:
        from .parser import render

        return {
            "kind": "correct",
            "end_sequent": render(self.proof.conclusion),
            "alpha_hypotheses": [{"path": list(p), "formula": render(f)} for p, f in self.alpha_hypotheses],
            "beta_hypotheses": [{"path": list(p), "formula": render(f)} for p, f in self.beta_hypotheses],
            "closed_hypotheses": [render(f) for f in self.closed_hypotheses],
        }


def _cmax(a, b) -> list:
    out = list(a)
    need = Counter(b) - Counter(a)
    for f in b:
        if need[f] > 0:
            out.append(f)
            need[f] -= 1
    return out


def correct_ljpp(p: Proof) -> CorrectionResult:
    """Replace every strong inference that breaks the eigenvariable condition by an
    L-> step against a hypothesis, then bind the hypotheses with Lexists."""
    rep = check(p, "LJpp")
    if not rep.accepted:
        raise TransformError("input is not accepted by LJpp: " + "; ".join(v.message for v in rep.violations))
    res = CorrectionResult(p)
    owner: dict = {}  # hypothesis formula -> characteristic variable

    def rebuild(n: Proof, path: tuple):
        if not n.premises:
            return n, []
        built = [rebuild(k, path + (i,)) for i, k in enumerate(n.premises)]
        kids = tuple(b[0] for b in built)
        hyps = built[0][1] if len(built) == 1 else _cmax(built[0][1], built[1][1])
        concl = n.conclusion.add(left=hyps)
        if n.rule in STRONG_RULES and n.term.name in concl.free_vars():
            P = n.principal()
            a = n.term
            if n.rule == "Rforall":
                h = Implies(instantiate(P, a), P)
                res.alpha_hypotheses.append((path, h))
                new = node("Limp", concl.add(left=[h]), (kids[0], infer("Ax", principal=P)), h)
            else:
                h = Implies(P, instantiate(P, a))
                res.beta_hypotheses.append((path, h))
                new = node("Limp", concl.add(left=[h]), (infer("Ax", principal=P), kids[0]), h)
            owner[h] = a.name
            return new, hyps + [h]
        return Proof(n.rule, concl, kids, n.index, n.term), hyps

    root, hyps = rebuild(p, ())
    # contract repeated hypotheses
    for h in list(Counter(hyps)):
        while root.conclusion.antecedent.count(h) > 1:
            root = infer("Lc", [root], h)
    current = list(dict.fromkeys(hyps))
    order = [v for v in side_variable_graph(p).topological_order() if v in set(owner.values())]
    order += sorted(set(owner.values()) - set(order))
    alphas = {h for _, h in res.alpha_hypotheses}
    for a in order:
        group = [h for h in current if a in free_vars(h)]
        if not group:
            continue
        combined = group[0]
        for g in group[1:]:
            both = And(combined, g)
            root = infer("Land1", [root], both)
            root = infer("Land2", [root], both)
            root = infer("Lc", [root], both)
            combined = both
        base = "y" if any(h in alphas and owner.get(h) == a for h in group) else "z"
        y = fresh_name(base, set().union(*(all_vars(g) for g in root.conclusion.formulas())) | {base})
        if y.endswith("_1") and base not in set().union(*(all_vars(g) for g in root.conclusion.formulas())):
            y = base
        closed = Exists(y, substitute(combined, a, Var(y)))
        root = infer("Lexists", [root], closed, Var(a))
        current = [h for h in current if h not in group] + [closed]
    res.proof = root
    res.closed_hypotheses = current
    return res


# --- deSkolemization ---------------------------------------------------------


@dataclass
class DeskolemizationTrace:
    variables: dict  # Skolem term -> variable name
    insertions: list  # (proof path, rule, variable, principal formula)
    proof: Proof
    variant: str
    renaming: dict  # internal Skolem symbol -> symbol used by the input proof

    def to_dict(self) -> dict:
        from .parser import render, render_term, dump_proof

        return {
            "kind": "deskolemize",
            "variant": self.variant,
            "variables": {render_term(t): v for t, v in self.variables.items()},
            "insertions": [{"path": list(p), "rule": r, "variable": v, "formula": render(f)}
                           for p, r, v, f in self.insertions],
            "proof": dump_proof(self.proof),
        }


@dataclass(frozen=True)
class _Origin:
    side: str
    index: int
    fpath: tuple
    sigma: tuple  # sorted (binder path, term) pairs

    def env(self) -> dict:
        return dict(self.sigma)

    def child(self, i: int, extra: dict | None = None) -> "_Origin":
        sig = self.env()
        if extra:
            sig.update(extra)
        return _Origin(self.side, self.index, self.fpath + (i,), tuple(sorted(sig.items())))


class _TargetMap:
    """Correspondence between one target formula and its Skolemized form."""

    def __init__(self, formula, negative: bool):
        self.formula = formula
        self.strong = {o.path: o for o in classify_quantifiers(formula, negative) if o.strong}
        self.node_of: dict = {}
        self.top_of: dict = {}

        def walk(tpath, fpath, top):
            if tpath in self.strong:
                walk(tpath + (0,), fpath, top)
                return
            self.node_of[fpath] = tpath
            self.top_of[fpath] = top
            for i, _ in enumerate(children(subformula(formula, tpath))):
                walk(tpath + (i,), fpath + (i,), tpath + (i,))

        walk((), (), ())

    def chain(self, fpath) -> list:
        """Strong quantifier paths wrapping the position, outermost first."""
        out, t = [], self.top_of[fpath]
        while t != self.node_of[fpath]:
            out.append(t)
            t = t + (0,)
        return out


def _match_end_sequent(s_sk: Sequent, end: Sequent, renamable: set):
    """Assign each end-sequent occurrence to a Skolemized target formula, finding a
    renaming of Skolem symbols.  Returns (assignment per side, renaming) or None."""
    if len(s_sk.antecedent) != len(end.antecedent) or len(s_sk.succedent) != len(end.succedent):
        return None
    slots = [("L", i, g) for i, g in enumerate(end.antecedent)] + [("R", i, g) for i, g in enumerate(end.succedent)]

    def search(k, used, ren):
        if k == len(slots):
            return {}, ren
        side, i, g = slots[k]
        pool = s_sk.antecedent if side == "L" else s_sk.succedent
        for j, h in enumerate(pool):
            if (side, j) in used:
                continue
            trial = match_symbols(h, g, renamable, dict(ren))
            if trial is None:
                continue
            got = search(k + 1, used | {(side, j)}, trial)
            if got is not None:
                assign, final = got
                assign[(side, i)] = j
                return assign, final
        return None

    return search(0, frozenset(), {})


def _mangle(text: str) -> str:
    return text.replace("(", "_").replace(",", "_").replace(")", "").replace("'", "p")


def deskolemize_trace(p: Proof, target: Sequent, variant: str | None = None) -> DeskolemizationTrace:
    from .parser import render, render_term

    if not is_cut_free(p):
        raise TransformError("input proof contains a cut")
    if not has_atomic_axioms(p):
        raise TransformError("input proof has a non-atomic axiom")
    rep = check(p, "LKpp")
    if not rep.accepted:
        raise TransformError("input proof is not accepted: " + "; ".join(v.message for v in rep.violations))

    found = None
    for var in ([variant] if variant else ["structural", "andrews"]):
        s_sk, sig = skolemize_sequent(target, var)
        got = _match_end_sequent(s_sk, p.conclusion, set(sig))
        if got is not None:
            found = (var, s_sk, sig, got)
            break
    if found is None:
        s_sk, _ = skolemize_sequent(target, variant or "structural")
        for side in ("L", "R"):
            a, b = s_sk.side(side), p.conclusion.side(side)
            for k in range(max(len(a), len(b))):
                x = render(a[k]) if k < len(a) else "(none)"
                y = render(b[k]) if k < len(b) else "(none)"
                if k >= len(a) or k >= len(b) or alpha_key(a[k]) != alpha_key(b[k]):
                    raise TransformError(f"end-sequent does not match the Skolemized target: expected {x}, found {y}")
        raise TransformError("end-sequent does not match the Skolemized target")
    var, s_sk, sig, (assign, ren) = found

    maps = {("L", j): _TargetMap(g, True) for j, g in enumerate(target.antecedent)}
    maps.update({("R", j): _TargetMap(g, False) for j, g in enumerate(target.succedent)})
    entry_at = {(e.side, e.index, e.path): e for e in sig.values()}
    taken = set()
    for g in p.conclusion.formulas():
        taken |= set(function_symbols(g))
    symbol_of = {}
    for e in sig.values():
        sym = ren.get(e.symbol)
        if sym is None:
            sym = e.symbol
            while sym in taken:
                sym = sym + "x"
        symbol_of[e.symbol] = sym
    skolem_symbols = set(symbol_of.values())

    used_names: set = set()
    for n in p.nodes():
        for g in n.conclusion.formulas():
            used_names |= all_vars(g)
    for g in target.formulas():
        used_names |= all_vars(g)
    table: dict = {}

    def avar(t) -> Var:
        if t not in table:
            name = "a_" + _mangle(render_term(t))
            if name in used_names:
                name = fresh_name(name, used_names)
            used_names.add(name)
            table[t] = name
        return Var(table[t])

    def dterm(t):
        if isinstance(t, Fn):
            if t.symbol in skolem_symbols:
                return avar(t)
            return Fn(t.symbol, tuple(dterm(a) for a in t.args))
        return t

    def skolem_term(o: _Origin, r: tuple):
        e = entry_at[(o.side, o.index, r)]
        env = o.env()
        return Fn(symbol_of[e.symbol], tuple(env[d] for d in e.dep_paths))

    def inst(o: _Origin, q: tuple):
        m = maps[(o.side, o.index)]
        env: dict = {}
        g = m.formula
        for k in range(len(q)):
            prefix = q[:k]
            if isinstance(g, QUANTIFIERS):
                if prefix in m.strong:
                    env[g.var] = avar(skolem_term(o, prefix))
                else:
                    env[g.var] = dterm(o.env()[prefix])
            g = children(g)[q[k]]
        return substitute_many(g, env)

    def lifted(o):
        return inst(o, maps[(o.side, o.index)].top_of[o.fpath])

    def body(o):
        return inst(o, maps[(o.side, o.index)].node_of[o.fpath])

    insertions: list = []

    def wrap(proof: Proof, side: str, i: int, o: _Origin, path: tuple) -> Proof:
        m = maps[(o.side, o.index)]
        for r in reversed(m.chain(o.fpath)):
            P = inst(o, r)
            a = avar(skolem_term(o, r))
            G, D = list(proof.conclusion.antecedent), list(proof.conclusion.succedent)
            (G if side == "L" else D)[i] = P
            rule = "Lexists" if side == "L" else "Rforall"
            proof = Proof(rule, Sequent(G, D), (proof,), i, a)
            insertions.append((path, rule, a.name, P))
        return proof

    def premise_origins(prem: Sequent, ctx: dict, aux: dict) -> tuple:
        out = []
        for side in ("L", "R"):
            pool = list(ctx[side]) + list(aux.get(side, []))
            used = [False] * len(pool)
            row = []
            for g in prem.side(side):
                for k, (h, o) in enumerate(pool):
                    if not used[k] and h == g:
                        used[k] = True
                        row.append(o)
                        break
                else:
                    raise TransformError(f"cannot trace {render(g)} to the end-sequent")
            out.append(row)
        return tuple(out)

    def build(n: Proof, occ: tuple, path: tuple) -> Proof:
        OL, OR = occ
        c = n.conclusion
        if n.rule in STRONG_RULES:
            raise TransformError("the Skolemized proof contains a strong quantifier inference")
        if n.rule in ("Ax", "Bot", "Top"):
            G = [body(o) for o in OL]
            D = [body(o) for o in OR]
            out = Proof(n.rule, Sequent(G, D), (), n.index, None)
            for i, o in enumerate(OL):
                out = wrap(out, "L", i, o, path)
            for i, o in enumerate(OR):
                out = wrap(out, "R", i, o, path)
            return out
        side, i = n.side, n.index
        items = {"L": list(zip(c.antecedent, OL)), "R": list(zip(c.succedent, OR))}
        P, po = items[side][i]
        ctx = {s: [x for k, x in enumerate(items[s]) if not (s == side and k == i)] for s in ("L", "R")}
        r = n.rule
        if r in ("Lw", "Rw"):
            auxes = [{}]
        elif r in ("Lc", "Rc"):
            auxes = [{side: [(P, po), (P, po)]}]
        elif r in ("Land1", "Ror1"):
            auxes = [{side: [(P.left, po.child(0))]}]
        elif r in ("Land2", "Ror2"):
            auxes = [{side: [(P.right, po.child(1))]}]
        elif r == "Rimp":
            auxes = [{"L": [(P.left, po.child(0))], "R": [(P.right, po.child(1))]}]
        elif r in WEAK_RULES:
            q = maps[(po.side, po.index)].node_of[po.fpath]
            auxes = [{side: [(instantiate(P, n.term), po.child(0, {q: n.term}))]}]
        elif r == "Rand":
            auxes = [{"R": [(P.left, po.child(0))]}, {"R": [(P.right, po.child(1))]}]
        elif r == "Lor":
            auxes = [{"L": [(P.left, po.child(0))]}, {"L": [(P.right, po.child(1))]}]
        elif r == "Limp":
            auxes = [{"R": [(P.left, po.child(0))]}, {"L": [(P.right, po.child(1))]}]
        else:
            raise TransformError(f"unsupported rule {r} in a cut-free proof")
        kids = []
        for k, (prem, aux) in enumerate(zip(n.premises, auxes)):
            kids.append(build(prem, premise_origins(prem.conclusion, ctx, aux), path + (k,)))
        G = [lifted(o) for o in OL]
        D = [lifted(o) for o in OR]
        if r not in ("Lw", "Rw", "Lc", "Rc"):
            (G if side == "L" else D)[i] = body(po)
        term = dterm(n.term) if n.term is not None else None
        out = Proof(r, Sequent(G, D), tuple(kids), i, term)
        if r not in ("Lw", "Rw", "Lc", "Rc"):
            out = wrap(out, side, i, po, path)
        return out

    root_occ = (
        [_Origin("L", assign[("L", i)], (), ()) for i in range(len(p.conclusion.antecedent))],
        [_Origin("R", assign[("R", i)], (), ()) for i in range(len(p.conclusion.succedent))],
    )
    out = build(p, root_occ, ())
    if out.conclusion != target:
        raise TransformError("reconstructed end-sequent differs from the target")
    return DeskolemizationTrace(dict(table), insertions, out, var, {k: symbol_of[k] for k in sig})


def deskolemize(p: Proof, target: Sequent, variant: str | None = None) -> Proof:
    return deskolemize_trace(p, target, variant).proof


def sequent_alpha_equal(a: Sequent, b: Sequent) -> bool:
    return (Counter(map(alpha_key, a.antecedent)) == Counter(map(alpha_key, b.antecedent))
            and Counter(map(alpha_key, a.succedent)) == Counter(map(alpha_key, b.succedent)))
