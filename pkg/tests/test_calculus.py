import random

import pytest
from hypothesis import given, settings

from qshift.core import Atom, Var, Sequent
from qshift.parser import load, parse_formula, parse_sequent
from qshift.calculus import (
    check, check_qfs, infer, node, expand_axiom, has_atomic_axioms, is_cut_free, side_variable_graph,
    skeleton, characteristic_variables, mutation_sites, apply_mutation, mutate,
)

from support import CORPUS, formulas


def proof(name):
    return load(CORPUS / name)[0]


@pytest.mark.parametrize("name, system, verdict, kinds", [
    ("cd_ljpp.prf", "LJpp", True, set()),
    ("cd_ljpp.prf", "LJ", False, {"eigenvariable"}),
    ("sw_ljpp.prf", "LJ", False, {"eigenvariable"}),
    ("ed_ljpp.prf", "LKpp", True, set()),
    ("unsound_ex.prf", "LJpp", True, set()),
    ("suit_side_variable.prf", "LJpp", False, {"side-variable-cycle"}),
    ("suit_substitutability.prf", "LJpp", False, {"substitutability"}),
    ("suit_vwr.prf", "LJpp", False, {"very-weak-regularity"}),
    ("cd_skolem.prf", "LJ", True, set()),
])
def test_corpus_verdicts(name, system, verdict, kinds):
    rep = check(proof(name), system)
    assert rep.accepted is verdict
    assert rep.kinds() == kinds


def test_violation_path_points_at_offending_node():
    rep = check(proof("ed_ljpp.prf"), "LJ")
    assert [v.path for v in rep.violations] == [(0, 0, 1)]


def test_lk_allows_several_conclusions_lj_does_not():
    a, b = Atom("A", ()), Atom("B", ())
    p = infer("Rw", [infer("Ax", principal=a)], b)
    assert check(p, "LK").accepted
    assert check(p, "LJ").kinds() == {"single-conclusion"}


def test_weak_term_must_not_be_captured():
    f = parse_formula("forall x. exists y. R(x,y)")
    inner = parse_formula("exists y_1. R(y,y_1)")
    ax = infer("Ax", principal=inner)
    p = node("Lforall", Sequent([f], [inner]), [ax], f, Var("y"))
    assert check(p, "LK").kinds() == {"weak-term-bound-variable"}


def test_unknown_system():
    with pytest.raises(ValueError):
        check(proof("cd_ljpp.prf"), "S4")


def test_side_variable_graph():
    g = side_variable_graph(proof("suit_side_variable.prf"))
    assert g.edges == {("a", "b"), ("b", "a")}
    assert not g.is_acyclic()
    assert characteristic_variables(proof("cd_ljpp.prf")) == {"a"}


def test_cut_detection_and_skeleton():
    assert not is_cut_free(proof("unsound_ex.prf"))
    assert skeleton(proof("suit_substitutability.prf")) == ("Ax", ())


def test_qfs_accepts_declared_shift_instance():
    p = proof("iqc_sw_cd.prf")
    h = p.conclusion.antecedent[0]
    rep = check_qfs(p, [h])
    assert rep.accepted and rep.info["hypothesis_kinds"] == ["SW"]


def test_qfs_rejects_undeclared_or_foreign_hypotheses():
    p = proof("iqc_sw_cd.prf")
    assert check_qfs(p, [parse_formula("forall x. A(x)")]).kinds() == {"shift-hypothesis"}


def test_infer_builds_the_conclusion():
    a = parse_formula("A & B")
    p = infer("Land1", [infer("Ax", principal=Atom("A", ()))], a)
    assert p.conclusion == parse_sequent("A & B => A")
    assert check(p, "LJ").accepted


@given(formulas)
@settings(max_examples=150)
def test_expanded_axioms_are_atomic_lj_proofs(f):
    p = expand_axiom(f)
    assert p.conclusion == Sequent([f], [f])
    assert has_atomic_axioms(p)
    assert check(p, "LJ").accepted, check(p, "LJ").violations


ACCEPTED = ["cd_ljpp.prf", "sw_ljpp.prf", "ed_ljpp.prf", "unsound_ex.prf", "cd_skolem.prf",
            "allx_skolem.prf", "iqc_sw_cd.prf"]


@pytest.mark.parametrize("name", ACCEPTED)
def test_every_mutation_site_is_rejected(name):
    p = proof(name)
    system = "LK" if name == "iqc_sw_cd.prf" else "LKpp"
    assert check(p, system).accepted
    for site in mutation_sites(p):
        assert not check(apply_mutation(p, site), system).accepted, site


def test_random_mutation_fuzz():
    rng = random.Random(11)
    proofs = [proof(n) for n in ACCEPTED]
    for _ in range(200):
        p = rng.choice(proofs)
        q, site = mutate(p, rng)
        assert not check(q, "LKpp").accepted, site
