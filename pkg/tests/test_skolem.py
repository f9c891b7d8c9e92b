import pytest

from qshift.core import classify_quantifiers, match_symbols, Fn, substitute_many, free_vars
from qshift.parser import parse_formula, parse_sequent, render
from qshift.skolem import (
    SkolemError, skolemize, skolemize_structural, skolemize_andrews, skolemize_parallel,
    skolemize_sequent, has_strong_quantifier,
)

from support import (
    formula_suite, classical_structures, classical_value, function_assignments,
)

ALLSK = "~(forall x. forall y. (exists z. P(x,z) | Q(y,x)))"


def same_up_to_symbols(actual, expected_text, sig):
    want = parse_formula(expected_text)
    want = substitute_many(want, {v: Fn(v) for v in free_vars(want)})
    return match_symbols(actual, want, set(sig)) is not None


def test_allsk_structural():
    f, sig = skolemize_structural(parse_formula(ALLSK))
    assert render(f) == "~forall x. forall y. (P(x,sk0(x,y)) | Q(y,x))"
    assert sig["sk0"].deps == ("x", "y")


def test_allsk_andrews_drops_unused_dependencies():
    f, sig = skolemize_andrews(parse_formula(ALLSK))
    assert render(f) == "~forall x. forall y. (P(x,sk0(x)) | Q(y,x))"
    assert sig["sk0"].arity == 1


def test_allsk_parallel():
    f, sig = skolemize_parallel(parse_formula(ALLSK), 2)
    assert render(f) == "~forall x. forall y. (P(x,sk0_1(x,y)) | P(x,sk0_2(x,y)) | Q(y,x))"
    assert set(sig) == {"sk0_1", "sk0_2"}


@pytest.mark.parametrize("src, expected", [
    ("forall x. (A(x) | B) -> forall x. A(x) | B", "forall x. (A(x) | B) -> A(c) | B"),
    ("(B -> exists x. A(x)) -> exists x. (B -> A(x))", "(B -> A(c)) -> exists x. (B -> A(x))"),
    ("(forall x. A(x) -> B) -> exists x. (A(x) -> B)", "(A(c) -> B) -> exists x. (A(x) -> B)"),
])
def test_shift_axioms(src, expected):
    f, sig = skolemize_structural(parse_formula(src))
    assert same_up_to_symbols(f, expected, sig)


def test_names_skip_symbols_in_use():
    f, sig = skolemize(parse_formula("forall x. P(x,sk0)", constants=["sk0"]))
    assert list(sig) == ["sk1"]


def test_parallel_strong_forall_becomes_a_conjunction():
    f, _ = skolemize_parallel(parse_formula("(forall y. P(y) -> Q) -> Q"), 2)
    assert render(f) == "(P(sk0_1) & P(sk0_2) -> Q) -> Q"


def test_sequent_flips_antecedent_polarity():
    s, sig = skolemize_sequent(parse_sequent("forall x. exists y. A(x,y) => forall x. exists y. A(x,y)"))
    assert render(s) == "forall x. A(x,sk0(x)) => exists y. A(sk1,y)"
    assert (sig["sk0"].side, sig["sk1"].side) == ("L", "R")


def test_open_formula_rejected():
    with pytest.raises(SkolemError):
        skolemize(parse_formula("P(x)"))
    with pytest.raises(SkolemError):
        skolemize(parse_formula("Q"), "parallel", 0)
    with pytest.raises(SkolemError):
        skolemize(parse_formula("Q"), "herbrand")


SUITE = formula_suite(40, depth=4, seed=7)


@pytest.mark.parametrize("variant", ["structural", "andrews", "parallel"])
def test_no_strong_quantifier_survives(variant):
    for f in SUITE:
        g, _ = skolemize(f, variant, 2)
        assert not has_strong_quantifier(g)
        weak_before = [o for o in classify_quantifiers(f) if not o.strong]
        assert len(classify_quantifiers(g)) == len(weak_before)


def test_andrews_arity_never_exceeds_structural():
    for f in SUITE:
        _, s = skolemize_structural(f)
        _, a = skolemize_andrews(f)
        assert all(x.arity <= y.arity for x, y in zip(a.values(), s.values()))


@pytest.mark.parametrize("variant", ["structural", "andrews", "parallel"])
def test_classical_validity_oracle(variant):
    """A holds in a structure iff its Skolem form holds under every choice of the
    Skolem functions (brute force over domains of size 1 and 2)."""
    for f in SUITE[:25]:
        g, sig = skolemize(f, variant, 2)
        symbols = {s: e.arity for s, e in sig.items()}
        for dom, preds, funcs in classical_structures([f], sizes=(1, 2)):
            want = classical_value(f, dom, preds, funcs)
            got = all(classical_value(g, dom, preds, {**funcs, **sk}) for sk in function_assignments(dom, symbols))
            assert want == got, (render(f), render(g))
