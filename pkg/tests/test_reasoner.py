import pytest

from alcomega import syntax as sx
from alcomega.dltrans import UnknownName, translate_kb_Tneg, translate_query_T
from alcomega.random_gen import corpus, random_query
from alcomega.reasoner import Entailed, NotEntailed, closure_size, concept_satisfiable, decide
from alcomega.search import SearchConfig, concept_individual_pairs, required_nodes, search_alcoi
from alcomega.semantics import check_kb, check_query, eval_concept
from alcomega.syntax import parse_concept, parse_query


def test_eagle_verdicts(eagle_kb):
    v = decide(eagle_kb, parse_query("Eagle [= CannotHunt."))
    assert v == Entailed("tableau", v.closure_size)
    assert v.theoretical_bound == 2 ** v.closure_size
    w = decide(eagle_kb, parse_query("CannotHunt [= Eagle."))
    assert isinstance(w, NotEntailed)
    assert check_kb(w.witness, eagle_kb).satisfied


@pytest.mark.parametrize("query", ["(some has_paid . Fee)(bob).", "(some has_paid . Fee)(alice).",
                                   "ScienceGroup in some has_leader . Person."])
def test_reading_group_entailed(reading_kb, query):
    assert isinstance(decide(reading_kb, parse_query(query), SearchConfig(8, "both")), Entailed)


def test_carl_not_entailed(reading_kb):
    F = parse_query("(some has_paid . Fee)(carl).")
    v = decide(reading_kb, F, SearchConfig(8, "both"))
    assert isinstance(v, NotEntailed)
    assert check_kb(v.witness, reading_kb).satisfied and not check_query(v.witness, F)


def test_bot_unsatisfiable(eagle_kb):
    assert isinstance(concept_satisfiable(eagle_kb, sx.BOT), Entailed)


def test_pow_top_satisfiable():
    K = sx.parse_kb("A [= Top.")
    assert isinstance(concept_satisfiable(K, parse_concept("Pow(Top)")), NotEntailed)


def test_red_list_pow_satisfiable(eagle_kb):
    C = parse_concept("Pow(CannotHunt) and RedListSpecies")
    v = concept_satisfiable(eagle_kb, C)
    assert isinstance(v, NotEntailed)
    assert eval_concept(v.witness, C)


def test_unknown_names_rejected(eagle_kb):
    with pytest.raises(UnknownName):
        decide(eagle_kb, parse_query("Lion(harry)."))


def test_closure_size_counts_negations():
    assert closure_size(sx.parse_kb("A [= B."), parse_query("A [= B.")) == 6


def test_determinism(eagle_kb):
    F = parse_query("CannotHunt [= Eagle.")
    cfg = SearchConfig(6, "both", seed=11)
    assert decide(eagle_kb, F, cfg) == decide(eagle_kb, F, cfg)


@pytest.mark.parametrize("kb_seed, K", corpus(60, seed=0))
def test_negated_role_translation_agrees(kb_seed, K):
    F = random_query(kb_seed, K)
    bound = max(6, required_nodes(K, F))
    v = decide(K, F, SearchConfig(bound, "both"))
    ctx = translate_kb_Tneg(K, F)
    Ft = translate_query_T(F, ctx)
    pairs = concept_individual_pairs(ctx)
    found = any(search_alcoi(ctx.kb, Ft, n, pairs) is not None
                for n in range(max(1, required_nodes(K, F)), bound + 1))
    assert found == isinstance(v, NotEntailed)
