import pytest

from alcomega import syntax as sx
from alcomega.dltrans import (
    NotAModel, UnknownName, collapse_model, lift_model, translate_concept_T, translate_kb_T, translate_kb_Tneg,
    translate_query_T,
)
from alcomega.harness import alcoi_model, check_collapse, check_lift, check_linearity
from alcomega.random_gen import corpus, random_model
from alcomega.semantics import Interpretation, check_kb
from alcomega.syntax import parse_concept, parse_kb, parse_query, render

EAGLE_T = """\
RedListSpecies [= all $e . CannotHunt.
Eagle [= some inv($e) . {$e_Eagle}.
some inv($e) . {$e_Eagle} [= Eagle.
PolarCreature and Bear [= some inv($e) . {$e_PolarCreature_and_Bear}.
some inv($e) . {$e_PolarCreature_and_Bear} [= PolarCreature and Bear.
Eagle(harry).
RedListSpecies($e_Eagle).
RedListSpecies($e_PolarCreature_and_Bear).
(not some $e . Top)(harry).
"""


def test_eagle_translation(eagle_kb):
    ctx = translate_kb_T(eagle_kb)
    assert render(ctx.kb) == EAGLE_T
    assert ctx.kb.dialect is sx.Dialect.ALCOI
    assert ctx.individual_for(sx.Name("Eagle")) == "$e_Eagle"


def test_concept_translation():
    assert translate_concept_T(parse_concept("Pow(A) and some r . B")) == parse_concept(
        "(all $e . A) and some r . B", allow_reserved=True)


def test_tneg_uses_assertions(eagle_kb):
    ctx = translate_kb_Tneg(eagle_kb)
    assert ctx.kb.dialect is sx.Dialect.ALC_NEG
    assert "(all neg($e) . not Eagle)($e_Eagle)." in render(ctx.kb)
    assert all(not isinstance(ax.sub, sx.Exists) for ax in ctx.kb.tbox)


def test_query_translation(eagle_kb):
    F = parse_query("Eagle in Pow(CannotHunt).")
    ctx = translate_kb_T(eagle_kb, F)
    assert translate_query_T(F, ctx) == parse_query("(all $e . CannotHunt)($e_Eagle).", allow_reserved=True)
    assert translate_query_T(parse_query("CannotHunt(harry)."), ctx) == parse_query("CannotHunt(harry).")


def test_query_concept_needs_individual(eagle_kb):
    ctx = translate_kb_T(eagle_kb)
    with pytest.raises(UnknownName):
        translate_query_T(parse_query("CannotHunt in RedListSpecies."), ctx)


def test_unknown_query_name(eagle_kb):
    with pytest.raises(UnknownName):
        translate_kb_T(eagle_kb, parse_query("Lion [= Eagle."))


def test_alcoi_input_rejected():
    with pytest.raises(sx.DialectError):
        translate_kb_T(parse_kb("A [= some inv(r) . B."))


def test_lift_eagle_model(eagle_kb):
    I = Interpretation(
        pool=("h", "p", "s", "rl"),
        elems={"s": {"h"}, "rl": {"s", "p"}},
        atoms={"h"},
        concepts={"Eagle": {"h"}, "CannotHunt": {"h"}, "RedListSpecies": {"s", "p"}},
        individuals={"harry": "h"},
        denotations={sx.Name("Eagle"): "s", parse_concept("PolarCreature and Bear"): "p"},
    )
    assert check_kb(I, eagle_kb).satisfied
    assert check_lift(eagle_kb, I) == []
    J = lift_model(I, translate_kb_T(eagle_kb))
    assert J.individuals["$e_Eagle"] == "s"


def test_collapse_rejects_non_model(eagle_kb):
    ctx = translate_kb_T(eagle_kb)
    J = Interpretation(pool=("h",), individuals={"harry": "h", "$e_Eagle": "h",
                                                 "$e_PolarCreature_and_Bear": "h"})
    with pytest.raises(NotAModel):
        collapse_model(J, ctx)


def test_collapse_found_model(eagle_kb):
    ctx, J = alcoi_model(eagle_kb, 4, seed=1)
    assert J is not None
    assert check_collapse(eagle_kb, ctx, J) == []
    I, M = collapse_model(J, ctx)
    assert set(M) == set(J.pool)
    assert check_kb(I, eagle_kb).satisfied


@pytest.mark.parametrize("kb_seed, K", corpus(40, seed=7))
def test_transport_on_corpus(kb_seed, K):
    assert check_linearity(K) == []
    I = random_model(K, kb_seed, 4)
    if I is not None:
        assert check_lift(K, I) == []
