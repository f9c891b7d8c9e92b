"""Acceptance checks, one test per criterion.

A summary line per criterion is printed at the end of the run (see conftest).
"""

import random
import time

from hypothesis import given, settings, strategies as st

from qshift.core import Fn, free_vars, substitute_many, match_symbols
from qshift.parser import load, parse_formula, parse_sequent, render
from qshift.skolem import skolemize, skolemize_structural
from qshift.calculus import check, check_qfs, is_cut_free, skeleton, side_variable_graph, mutate
from qshift.transform import correct_ljpp, deskolemize, ndq, prenexify, sequent_alpha_equal
from qshift.kripke import (
    forces, schema_instance, small_frames, axiom_valid_on_frame, predicted_validity,
    check_incompleteness_witness, random_model,
)
from qshift.cd5 import VALUES, value_from_bits, sup, inf, imp, evaluate, valid_bounded, crosscheck_parallel

from support import CORPUS, CONSTS, close_elements, formulas, kripke_formulas, formula_suite, classically_equivalent


def fx(name):
    return load(CORPUS / name)


def matches(actual, expected_text, renamable):
    """Syntactic equality up to renaming the freshly introduced symbols."""
    want = parse_formula(expected_text)
    want = substitute_many(want, {v: Fn(v) for v in free_vars(want)})
    return match_symbols(actual, want, set(renamable)) is not None


# 1 -------------------------------------------------------------------------

SHIFTS = {
    "CD": ("forall x. (A(x) | B) -> forall x. A(x) | B", "forall x. (A(x) | B) -> A(c) | B"),
    "ED": ("(B -> exists x. A(x)) -> exists x. (B -> A(x))", "(B -> A(c)) -> exists x. (B -> A(x))"),
    "SW": ("(forall x. A(x) -> B) -> exists x. (A(x) -> B)", "(A(c) -> B) -> exists x. (A(x) -> B)"),
}
ALLSK = "~(forall x. forall y. (exists z. P(x,z) | Q(y,x)))"
ALLSK_FORMS = {
    "structural": "~forall x. forall y. (P(x,f(x,y)) | Q(y,x))",
    "andrews": "~forall x. forall y. (P(x,g(x)) | Q(y,x))",
    "parallel": "~forall x. forall y. (P(x,f1(x,y)) | P(x,f2(x,y)) | Q(y,x))",
}


def test_criterion_1_skolem_forms():
    for kind, (src, want) in SHIFTS.items():
        got, sig = skolemize_structural(parse_formula(src))
        assert matches(got, want, sig), kind
    for variant, want in ALLSK_FORMS.items():
        got, sig = skolemize(parse_formula(ALLSK), variant, 2)
        assert matches(got, want, sig), variant


# 2 -------------------------------------------------------------------------


def test_criterion_2_checker_verdicts():
    for name in ("sw_ljpp.prf", "ed_ljpp.prf", "cd_ljpp.prf", "unsound_ex.prf"):
        assert check(fx(name)[0], "LJpp").accepted, name
    rep = check(fx("sw_ljpp.prf")[0], "LJ")
    assert [(v.path, v.condition) for v in rep.violations] == [((0, 0, 0), "eigenvariable")]
    assert fx("sw_ljpp.prf")[0].at((0, 0, 0)).rule == "Rforall"
    for name, kind in [("suit_side_variable.prf", "side-variable-cycle"),
                       ("suit_vwr.prf", "very-weak-regularity"),
                       ("suit_substitutability.prf", "substitutability")]:
        rep = check(fx(name)[0], "LJpp")
        assert not rep.accepted and rep.kinds() == {kind}, name


# 3 -------------------------------------------------------------------------


def _round_trip(name, target_name):
    p, _ = fx(name)
    target = fx(target_name)[0][0]
    q = deskolemize(p, target)
    assert check(q, "LJpp").accepted
    assert is_cut_free(q)
    assert sequent_alpha_equal(q.conclusion, target)
    assert skeleton(q) == skeleton(p)
    return q


def test_criterion_3_deskolemization_round_trips():
    _round_trip("cd_skolem.prf", "cd.seq")
    q = _round_trip("allx_skolem.prf", "allx.seq")
    g = side_variable_graph(q)
    # a_c is free in the principal formula of the inference on a_f_c
    assert g.edges == {("a_f_c", "a_c")}
    assert g.is_acyclic()


# 4 -------------------------------------------------------------------------


def test_criterion_4_correction_pipeline():
    q = _round_trip("cd_skolem.prf", "cd.seq")
    res = correct_ljpp(q)
    assert check(res.proof, "LJ").accepted
    want = parse_sequent("forall y. (A(y) | B), exists z. (A(z) -> forall x. A(x)) => forall x. A(x) | B")
    assert sequent_alpha_equal(res.proof.conclusion, want)
    p, doc = fx("iqc_sw_cd.prf")
    hyps = [parse_formula(h) for h in doc.get("hypotheses")]
    rep = check_qfs(p, hyps)
    assert rep.accepted and rep.info["hypothesis_kinds"] == ["SW"]


# 5 -------------------------------------------------------------------------


def test_criterion_5_kripke_fixtures():
    sle = fx("sle.krp")[0]
    sw = schema_instance("SW")
    assert forces(sle, "w", sw.left) is True
    assert forces(sle, "w", sw.right) is False
    t0 = time.perf_counter()
    rep = check_incompleteness_witness(fx("incompleteness.krp")[0], depth=3)
    assert rep.lin_oep_fails and rep.instances_hold and rep.claim_holds
    assert time.perf_counter() - t0 < 60


# 6 -------------------------------------------------------------------------


def test_criterion_6_frame_characterization():
    frames = list(small_frames(4, 2, 3))
    disagreements = [(fr, k) for fr in frames for k in ("CD", "ED", "SW")
                     if axiom_valid_on_frame(fr, k)[0] != predicted_validity(fr, k)]
    assert len(frames) == 50
    assert disagreements == []


# 7 -------------------------------------------------------------------------


def test_criterion_7_prenexification():
    suite = formula_suite(50, depth=5)
    for f in suite:
        g, _ = prenexify(f)
        assert ndq(g) == 0
        assert classically_equivalent(f, g, sizes=(1, 2)), render(f)
    assert prenexify(fx("prenex_cd.fml")[0][0])[1] == ["CD"]
    assert prenexify(fx("prenex_sw.fml")[0][0])[1] == ["SW"]


# 8 -------------------------------------------------------------------------


def test_criterion_8_cd5():
    assert sup(value_from_bits("100"), value_from_bits("010")) == value_from_bits("110")
    i, _ = fx("sl_countermodel.cd5")
    assert evaluate(i, parse_formula("exists x. A(c,x)", constants=["c"])).bits == "110"
    ok, cm = valid_bounded(parse_formula("exists x. (P(x) -> forall y. P(y))"), 2)
    assert not ok and cm is not None
    suite, _ = fx("cd5_suite.fml")
    assert len(suite) == 10
    assert all(crosscheck_parallel(f, 2, 2).agree for f in suite)


# 9 -------------------------------------------------------------------------


@given(formulas)
@settings(max_examples=1000)
def _parser_round_trip(f):
    assert parse_formula(render(f), constants=CONSTS) == f


@given(st.integers(0, 10**6), kripke_formulas)
@settings(max_examples=500)
def _persistence(seed, f):
    m = random_model(random.Random(seed))
    f = close_elements(f)
    for u in m.frame.worlds:
        if free_vars(f) <= m.frame.domains[u] and forces(m, u, f):
            assert all(forces(m, v, f) for v in m.frame.above(u))


def _mutation_fuzz(n=200):
    rng = random.Random(20240607)
    pool = [fx(name)[0] for name in ("cd_ljpp.prf", "sw_ljpp.prf", "ed_ljpp.prf", "unsound_ex.prf",
                                     "cd_skolem.prf", "allx_skolem.prf")]
    rejected = 0
    for _ in range(n):
        q, _ = mutate(rng.choice(pool), rng)
        rejected += not check(q, "LKpp").accepted
    assert rejected == n


def _lattice_laws():
    for x in VALUES:
        for y in VALUES:
            assert sup(x, y) == sup(y, x) and inf(x, y) == inf(y, x)
            assert sup(x, inf(x, y)) == x and inf(x, sup(x, y)) == x
            for z in VALUES:
                assert inf(x, sup(y, z)) == sup(inf(x, y), inf(x, z))
                assert (z <= imp(x, y)) == (inf(z, x) <= y)


def test_criterion_9_property_suites():
    _parser_round_trip()
    _persistence()
    _mutation_fuzz()
    _lattice_laws()
