import pytest
from hypothesis import given, settings, strategies as st

from alcomega import syntax as sx
from alcomega.harness import check_encoding, check_set_terms
from alcomega.random_gen import corpus, random_model, random_query
from alcomega.reasoner import Entailed, NotEntailed, decide
from alcomega.search import SearchConfig
from alcomega.settrans import (
    BadIndex, Empty, Inter, PowT, UnboundVariable, UnsupportedQuery, VarA, VarX, _alc_term, _lc_term,
    emit_alc_theorem, emit_lc_theorem, emit_role_axiom, encode_lc, eval_formula, eval_set_term, expand_inter,
    layout_for, render_term, to_sexp, to_tptp, translate_star, translate_star_concept, trans2,
)
from alcomega.syntax import parse_concept, parse_kb, parse_query, render

WORKED = """
RedListSpecies [= Pow(CannotHunt).
Eagle [= all hasMother . Eagle.
RedListSpecies [= all hasSciName . Name.
Eagle(harry).
Eagle in RedListSpecies.
PolarCreature and Bear in RedListSpecies.
(PolarCreature and Bear, Eagle) in moreEndangered.
"""


def alc(text, kb="A [= some r . A."):
    return render_term(_alc_term(parse_concept(text), layout_for(parse_kb(kb))))


def lc(text, kb="A [= Pow(A)."):
    return render_term(_lc_term(parse_concept(text), layout_for(parse_kb(kb), roles=False)))


def test_alc_terms():
    assert alc("Top") == "x"
    assert alc("Bot") == "0"
    assert alc("some r . A") == r"x \ Pow(((x cup y1) \ y1) cup Pow(x \ x1))"


def test_alc_rejects_pow():
    with pytest.raises(sx.DialectError):
        alc("Pow(A)")


def test_lc_terms():
    assert lc("Pow(A)") == "Pow(x1)"
    assert lc("not Top") == r"x \ x"


def test_star_terms():
    enc, _ = encode_lc(parse_kb("A [= all r . A."))
    assert render_term(translate_star_concept(parse_concept("all r . A"), enc)) == r"Pow((x \ y1) cup Pow(x1))"
    enc2, _ = encode_lc(parse_kb("A [= Pow(A). B [= some r . A. B [= some s . A."))
    assert render_term(translate_star_concept(parse_concept("Pow(A)"), enc2)) == "Pow((y1 cup y2) cup x1)"
    # no roles: the plain LC shape
    enc0, _ = encode_lc(parse_kb("A [= Pow(A)."))
    assert render_term(translate_star_concept(parse_concept("Pow(A)"), enc0)) == "Pow(x1)"


def test_role_axioms():
    assert to_sexp(emit_role_axiom("hierarchy", 1, 2)) == "(sub y1 y2)"
    assert "exists" in to_sexp(emit_role_axiom("transitive", 1))
    assert "iff" in to_sexp(emit_role_axiom("inverse", 1, 1))
    with pytest.raises(BadIndex):
        emit_role_axiom("hierarchy", 0, 2)


def test_trivial_lc_theorem():
    phi = emit_lc_theorem(parse_kb("A [= A."), parse_query("A [= A."))
    text = to_sexp(phi)
    assert text.startswith("(forall (x) (implies (forall (y) (implies (in y x) (sub y x)))")
    assert to_tptp(phi).startswith("fof(goal,conjecture,")


def test_alc_theorem_uses_two_step_transitivity():
    phi = emit_alc_theorem(parse_kb("A [= A."), parse_query("A [= A."))
    assert "(in y z) (in z x)" in to_sexp(phi)


def test_star_query_must_be_supported():
    with pytest.raises(UnsupportedQuery):
        translate_star(parse_kb("r(A, B)."), parse_query("r(A, B)."))


def test_pow_empty_on_five_nodes(five_nodes):
    assert eval_set_term(PowT(Empty()), five_nodes, {}) == {"a", "b", "c"}
    assert eval_set_term(VarX(), five_nodes, {"x": five_nodes.domain}) == five_nodes.domain
    with pytest.raises(UnboundVariable):
        eval_set_term(VarA(1), five_nodes, {})


def test_trans2_on_five_nodes(five_nodes):
    assert eval_formula(trans2(VarX()), five_nodes, {"x": five_nodes.domain}).value


def test_inter_expansion_law(five_nodes):
    beta = {"x": five_nodes.domain, "x1": frozenset({"a", "p1"}), "x2": frozenset({"p1", "p2", "c"})}
    t = Inter(VarA(1), PowT(VarA(2)))
    assert eval_set_term(t, five_nodes, beta) == eval_set_term(expand_inter(t), five_nodes, beta)
    assert "cap" not in to_sexp(emit_lc_theorem(parse_kb("A [= A."), parse_query("A [= A.")), expand=True)


def test_worked_encoding():
    enc, _ = encode_lc(parse_kb(WORKED))
    text = render(enc.kb)
    not_u = "not ($U_hasMother or $U_hasSciName or $U_moreEndangered)"
    for line in [
        f"RedListSpecies and {not_u} [= Pow($U_hasMother or $U_hasSciName or $U_moreEndangered or CannotHunt).",
        f"Eagle and {not_u} [= Pow(not $U_hasMother or Pow(Eagle)).",
        f"RedListSpecies and {not_u} [= Pow(not $U_hasSciName or Pow(Name)).",
        "$B_harry in Eagle.",
        "Eagle in RedListSpecies.",
        "PolarCreature and Bear in RedListSpecies.",
        "Eagle in $G_moreEndangered_PolarCreature_and_Bear_Eagle.",
        "$G_moreEndangered_PolarCreature_and_Bear_Eagle in PolarCreature and Bear.",
        f"Eagle [= {not_u}.",
        f"$B_harry in {not_u}.",
        f"PolarCreature and Bear in {not_u}.",
    ]:
        assert line in text.splitlines()


def test_role_free_encoding_is_identity():
    K = parse_kb("A [= Pow(B). A in B.")
    enc, _ = encode_lc(K)
    assert enc.kb.tbox == K.tbox and enc.kb.abox == K.abox


def test_reading_group_encoding(reading_kb):
    enc, _ = encode_lc(reading_kb)
    assert set(enc.u_names) == {"has_leader", "has_paid"}
    assert enc.fresh["F"] == {} and enc.fresh["G"] == {}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_set_terms_and_encoding_on_random_models(seed):
    from alcomega.random_gen import random_kb
    K = random_kb(seed)
    I = random_model(K, seed, 4)
    if I is not None:
        assert check_set_terms(K, I) == []
        assert check_encoding(K, I) == []


def _verdict(K, F, bound):
    return type(decide(K, F, SearchConfig(bound, "both")))


@pytest.mark.parametrize("kb_seed, K", [
    (s, K) for s, K in corpus(200, seed=3)
    if not K.signature.individuals
    and not any(isinstance(a, (sx.ConceptMembership, sx.RoleMembership)) for a in K.axioms)
])
def test_encoding_preserves_entailment_without_memberships(kb_seed, K):
    F = random_query(kb_seed, K)
    enc, Fe = encode_lc(K, F)
    assert _verdict(K, F, 6) is _verdict(enc.kb, Fe, 8)


def test_encoding_counterexample_membership_lhs():
    # the denotation of "not A" in K^E also collects U nodes
    K = parse_kb("not A in D. D [= all r . B.")
    F = parse_query("Top [= all r . B.")
    enc, Fe = encode_lc(K, F)
    assert _verdict(K, F, 6) is NotEntailed
    assert _verdict(enc.kb, Fe, 8) is Entailed


def test_encoding_counterexample_individual_under_pow():
    # a B_a node may have elements while an individual is an atom
    K = parse_kb("A(a).")
    F = parse_query("(Pow(Bot))(a).")
    enc, Fe = encode_lc(K, F)
    assert _verdict(K, F, 6) is Entailed
    assert _verdict(enc.kb, Fe, 8) is NotEntailed
