import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from qshift.core import Atom, Var, Fn, And, Or, Implies, Forall, Exists, BOTTOM, substitute_many, free_vars
from qshift.parser import load, parse_formula
from qshift.kripke import (
    Frame, Model, ModelError, forces, forces_naive, valid_in_model, frame_properties,
    classify_frame, axiom_valid_on_frame, predicted_validity, small_frames, posets, semantic_classes,
    claim_holds, check_incompleteness_witness, lin_oep_instance, random_model, schema_instance,
)

from support import CORPUS, close_elements, kripke_formulas


def model(name):
    return load(CORPUS / name)[0]


SLE = model("sle.krp")
INC = model("incompleteness.krp")


def test_fork_model_refutes_the_switch_but_forces_its_antecedent():
    sw = schema_instance("SW")
    assert forces(SLE, "w", sw.left)
    assert not forces(SLE, "w", sw.right)
    assert not forces(SLE, "w", sw)


def test_forcing_clauses_by_hand():
    fr = Frame(["r", "u"], [("r", "u")], {"r": ["a"], "u": ["a", "b"]})
    m = Model(fr, {"P": {"r": [("a",)], "u": [("a",), ("b",)]}})
    assert forces(m, "u", parse_formula("forall x. P(x)"))
    assert not forces(m, "r", parse_formula("exists x. ~P(x)"))
    # forall looks at the new element b above r
    assert forces(m, "r", parse_formula("forall x. P(x)"))
    n = Model(fr, {"P": {"u": [("a",)]}})
    assert not forces(n, "r", parse_formula("P(a) | ~P(a)"))
    assert forces(n, "r", parse_formula("~~P(a)"))


def test_named_element_must_exist_at_the_world():
    fr = Frame(["r", "u"], [("r", "u")], {"r": ["a"], "u": ["a", "b"]})
    m = Model(fr, {})
    with pytest.raises(ModelError):
        forces(m, "r", parse_formula("P(b)"))
    with pytest.raises(ModelError):
        forces(m, "nowhere", parse_formula("Q"))


@pytest.mark.parametrize("build", [
    lambda: Frame([]),
    lambda: Frame(["u", "v"], [("u", "v"), ("v", "u")], {"u": ["a"], "v": ["a"]}),
    lambda: Frame(["u", "v"], [("u", "v")], {"u": ["a", "b"], "v": ["a"]}),
    lambda: Frame(["u"], [("u", "z")], {"u": ["a"]}),
    lambda: Frame(["u"], [], {"u": []}),
    lambda: Model(Frame(["u", "v"], [("u", "v")], {"u": ["a"], "v": ["a"]}), {"Q": {"u": [()]}}),
    lambda: Model(Frame(["u"], [], {"u": ["a"]}), {"P": {"u": [("b",)]}}),
])
def test_invalid_frames_and_models_are_rejected(build):
    with pytest.raises(ModelError):
        build()


def test_order_is_closed_transitively():
    fr = Frame(["a", "b", "c"], [("a", "b"), ("b", "c")], {w: ["e"] for w in "abc"})
    assert fr.leq("a", "c")
    assert fr.covers() == [("a", "b"), ("b", "c")]


def _instantiate_elements(f, elems):
    return substitute_many(f, {v: Fn(v) for v in free_vars(f) & set(elems)})


@given(st.integers(0, 10**6), kripke_formulas)
@settings(max_examples=300)
def test_bitmask_evaluator_matches_forcing_clauses(seed, f):
    m = random_model(random.Random(seed))
    f = close_elements(f)
    g = _instantiate_elements(f, m.frame.elements)
    named = free_vars(f)
    for w in m.frame.worlds:
        if named <= m.frame.domains[w]:
            assert forces(m, w, g) == forces_naive(m, w, g)


@given(st.integers(0, 10**6), kripke_formulas)
@settings(max_examples=500)
def test_forcing_persists_upward(seed, f):
    m = random_model(random.Random(seed))
    fr = m.frame
    f = close_elements(f)
    named = free_vars(f)
    for u in fr.worlds:
        if named <= fr.domains[u] and forces(m, u, f):
            assert all(forces(m, v, f) for v in fr.above(u))


def test_poset_counts():
    assert [len(posets(n)) for n in range(1, 5)] == [1, 2, 5, 16]


def test_fork_frame_properties():
    rep = frame_properties(SLE.frame)
    assert rep.constant_domain and not rep.linear and not rep.FDS
    assert rep.classification == "outside"
    assert rep.witnesses["linear"] == ("w", "v1", "v2")


def test_singleton_fork_is_in_the_class():
    fr = Frame(["w", "u", "v"], [("w", "u"), ("w", "v")], {x: ["a"] for x in "wuv"})
    assert frame_properties(fr).FDS
    assert classify_frame(fr) == "in_F"
    for kind in ("CD", "ED", "SW"):
        assert axiom_valid_on_frame(fr, kind)[0]


def test_growing_chain_fails_every_shift():
    fr = Frame(["u", "v"], [("u", "v")], {"u": ["0"], "v": ["0", "1"]})
    valid = {k: axiom_valid_on_frame(fr, k)[0] for k in ("CD", "ED", "SW")}
    assert valid == {"CD": False, "ED": False, "SW": False}
    assert classify_frame(fr) == "outside"


def test_countermodel_is_returned():
    ok, cm = axiom_valid_on_frame(SLE.frame, "SW")
    assert not ok
    assert not valid_in_model(cm, schema_instance("SW"))


FRAMES = list(small_frames())


def test_classification_agrees_with_brute_force():
    assert len(FRAMES) == 50
    bad = []
    for fr in FRAMES:
        for kind in ("CD", "ED", "SW"):
            if axiom_valid_on_frame(fr, kind)[0] != predicted_validity(fr, kind):
                bad.append((fr, kind))
    assert bad == []


def _disjoint_union(f1, f2):
    r1 = {w: f"l{w}" for w in f1.worlds}
    r2 = {w: f"r{w}" for w in f2.worlds}
    pairs = [(r1[u], r1[v]) for u, v in f1.covers()] + [(r2[u], r2[v]) for u, v in f2.covers()]
    doms = {r1[w]: f1.domains[w] for w in f1.worlds} | {r2[w]: f2.domains[w] for w in f2.worlds}
    return Frame(list(r1.values()) + list(r2.values()), pairs, doms)


def test_validity_is_closed_under_disjoint_unions():
    rng = random.Random(5)
    small = [f for f in FRAMES if len(f.worlds) <= 2]
    for _ in range(20):
        a, b = rng.choice(small), rng.choice(small)
        u = _disjoint_union(a, b)
        for kind in ("CD", "ED", "SW"):
            both = axiom_valid_on_frame(a, kind)[0] and axiom_valid_on_frame(b, kind)[0]
            assert axiom_valid_on_frame(u, kind)[0] == both
        assert (classify_frame(u) == "in_F") == (classify_frame(a) == classify_frame(b) == "in_F")


# --- incompleteness witness ---------------------------------------------------


def test_witness_model():
    assert not forces(INC, "w1", lin_oep_instance())
    rep = check_incompleteness_witness(INC, depth=3)
    assert rep.ok, rep.to_dict()
    assert rep.instances_hold and rep.failing_instances == []


def _explicit_classes(m, depth, variables):
    """Formulas enumerated explicitly, one representative per truth-value signature;
    signatures computed with the naive forcing clauses."""
    elems = m.frame.elements
    envs = list(itertools.product(elems, repeat=len(variables)))

    def sig(f):
        out = []
        for env in envs:
            g = substitute_many(f, {v: Fn(e) for v, e in zip(variables, env)})
            out.append(tuple(forces_naive(m, w, g) for w in m.frame.worlds))
        return tuple(out)

    atoms = [Atom("P", ()), Atom("Q", ()), BOTTOM] + [Atom("R", (Var(v),)) for v in variables]
    level = {}
    for a in atoms:
        level.setdefault(sig(a), a)
    for _ in range(depth):
        new = dict(level)
        reps = list(level.values())
        for a in reps:
            for b in reps:
                for op in (And, Or, Implies):
                    g = op(a, b)
                    new.setdefault(sig(g), g)
            for v in variables:
                for q in (Forall, Exists):
                    g = q(v, a)
                    new.setdefault(sig(g), g)
        level = new
    return level


def test_claim_against_explicit_enumeration():
    variables = ("x", "y")
    explicit = _explicit_classes(INC, 2, variables)
    _, packed = semantic_classes(INC, 2, variables)
    assert len(packed) == len(explicit)
    ok, _, _ = claim_holds(INC, 2, variables=variables)
    assert ok
    # the claim itself, read off the explicit representatives
    for f in explicit.values():
        if free_vars(f) - {"x"}:
            continue
        fa = substitute_many(f, {"x": Fn("a")})
        fb = substitute_many(f, {"x": Fn("b")})
        for w in ("w2", "w3"):
            assert forces_naive(INC, w, fa) == forces_naive(INC, w, fb)


def test_components_are_classified_separately():
    # singleton-domain fork next to a two-element chain
    fr = Frame(["w", "u", "v", "p", "q"], [("w", "u"), ("w", "v"), ("p", "q")],
               {"w": ["a"], "u": ["a"], "v": ["a"], "p": ["0", "1"], "q": ["0", "1"]})
    assert classify_frame(fr) == "in_F"
    assert all(axiom_valid_on_frame(fr, k)[0] for k in ("CD", "ED", "SW"))
