import pytest
from hypothesis import given, settings

from qshift.core import Var, Fn, Atom, And, Or, Implies, Forall, Exists, Sequent, BOTTOM
from qshift.parser import (
    ParseError, parse_formula, parse_term, parse_sequent, parse_proof, dump_proof, render,
    parse_model, dump_model, parse_interpretation, load,
)

from support import CORPUS, formulas, CONSTS


A, B = Atom("A", ()), Atom("B", ())


def test_quantifier_binds_tighter_than_implication():
    f = parse_formula("forall x. A(x) -> B")
    assert f == Implies(Forall("x", Atom("A", (Var("x"),))), B)


def test_connective_precedence():
    f = parse_formula("A & B | A -> B -> A")
    assert f == Implies(Or(And(A, B), A), Implies(B, A))


def test_negation_and_constants():
    f = parse_formula("~P(c)", constants=["c"])
    assert f == Implies(Atom("P", (Fn("c"),)), BOTTOM)
    assert parse_term("c()") == Fn("c")
    assert parse_term("c") == Var("c")


def test_allsk_formula_parses():
    f = parse_formula("~(forall x. forall y. (exists z. P(x,z) | Q(y,x)))")
    assert render(f) == "~forall x. forall y. (exists z. P(x,z) | Q(y,x))"


def test_sequent():
    s = parse_sequent("A, B => A & B")
    assert s == Sequent([A, B], [And(A, B)])
    assert parse_sequent("=>") == Sequent([], [])


@pytest.mark.parametrize("text, start", [("A &", 3), ("A ) B", 2), ("P(x", 3), ("forall . A", 7), ("A $ B", 2)])
def test_errors_carry_offsets(text, start):
    with pytest.raises(ParseError) as e:
        parse_formula(text)
    assert e.value.span.start == start


def test_error_reports_expected_tokens():
    with pytest.raises(ParseError) as e:
        parse_formula("(A")
    assert "')'" in e.value.expected


def test_file_errors_carry_line_numbers():
    with pytest.raises(ParseError) as e:
        parse_proof("Ax ; A => A\n  Ax ; A => \n  Bogus ; =>")
    assert e.value.line is not None


@given(formulas)
@settings(max_examples=1000)
def test_render_parse_round_trip(f):
    assert parse_formula(render(f), constants=CONSTS) == f


def test_proof_round_trip_on_corpus():
    for path in sorted(CORPUS.glob("*.prf")):
        p, doc = load(path)
        q, _ = parse_proof(dump_proof(p), doc.constants())
        assert q == p, path.name


def test_model_round_trip():
    m, _ = load(CORPUS / "incompleteness.krp")
    m2, _ = parse_model(dump_model(m))
    assert m2.valuation == m.valuation
    assert m2.frame.covers() == m.frame.covers()


def test_model_rejects_bad_input():
    with pytest.raises(ParseError):
        parse_model("worlds: w\nforce w: P(a) | Q\ndomain: a")
    with pytest.raises(ParseError):
        parse_model("worlds w")


def test_interpretation_rejects_points_off_the_lattice():
    with pytest.raises(ParseError):
        parse_interpretation("domain: a\nP(a) = 011")


def test_every_fixture_loads():
    for path in sorted(CORPUS.iterdir()):
        if path.suffix in (".fml", ".seq", ".prf", ".krp", ".cd5"):
            load(path)
