import pytest

from alcomega import syntax as sx
from alcomega.dltrans import UnknownName
from alcomega.search import (
    SearchConfig, SearchConfigError, find_countermodel, find_direct, find_translated, required_nodes,
)
from alcomega.semantics import check_kb, check_query, eval_concept, validate_interpretation
from alcomega.syntax import Name, parse_kb, parse_query

AQUILA = parse_kb("Eagle [= Aquila. Aquila [= Eagle. Eagle in RedListSpecies.")


def test_empty_kb_top_in_bot():
    K = sx.KnowledgeBase()
    I = find_countermodel(K, parse_query("Top [= Bot."), SearchConfig(3))
    assert I is not None and len(I) == 1


def test_aquila_countermodel():
    F = parse_query("Aquila in RedListSpecies.")
    I = find_countermodel(AQUILA, F, SearchConfig(6))
    assert I is not None and len(I) <= 4
    assert check_kb(I, AQUILA).satisfied
    assert not check_query(I, F)
    assert validate_interpretation(I) == []
    # Eagle and Aquila have the same extension but different denotations
    assert eval_concept(I, Name("Eagle")) == eval_concept(I, Name("Aquila"))


def test_eagle_entailment_has_no_countermodel(eagle_kb):
    assert find_countermodel(eagle_kb, parse_query("CannotHunt(harry)."), SearchConfig(6)) is None


def test_translated_search_agrees(eagle_kb):
    F = parse_query("CannotHunt [= Eagle.")
    cfg = SearchConfig(6, "translated")
    I, J = find_translated(eagle_kb, F, cfg)
    assert check_kb(I, eagle_kb).satisfied and not check_query(I, F)
    assert find_direct(eagle_kb, F, cfg) is not None


def test_determinism():
    F = parse_query("Aquila in RedListSpecies.")
    a = find_countermodel(AQUILA, F, SearchConfig(6, seed=5))
    b = find_countermodel(AQUILA, F, SearchConfig(6, seed=5))
    assert a == b


def test_bound_too_small():
    assert required_nodes(AQUILA, parse_query("Aquila in RedListSpecies.")) == 2
    with pytest.raises(SearchConfigError):
        find_countermodel(AQUILA, parse_query("Aquila in RedListSpecies."), SearchConfig(1))


@pytest.mark.parametrize("kwargs", [{"max_domain": 0}, {"mode": "sideways"}])
def test_bad_config(kwargs):
    with pytest.raises(SearchConfigError):
        SearchConfig(**kwargs)


def test_query_outside_signature():
    with pytest.raises(UnknownName):
        find_countermodel(AQUILA, parse_query("Lion [= Eagle."), SearchConfig(4))
