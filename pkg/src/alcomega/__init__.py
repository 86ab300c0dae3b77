"""ALC^Omega: description logic with power-set concepts and membership axioms."""
from .syntax import (
    KnowledgeBase, parse_concept, parse_kb, parse_query, parse_queries, render,
)
from .semantics import Interpretation, check_kb, check_query, eval_concept, dump_model, load_model
from .dltrans import collapse_model, lift_model, translate_kb_T, translate_kb_Tneg, translate_query_T
from .search import SearchConfig, find_countermodel
from .tableau import tableau_decide
from .reasoner import Conflict, Entailed, NotEntailed, Unknown, concept_satisfiable, decide

__all__ = [
    "KnowledgeBase", "parse_concept", "parse_kb", "parse_query", "parse_queries", "render",
    "Interpretation", "check_kb", "check_query", "eval_concept", "dump_model", "load_model",
    "collapse_model", "lift_model", "translate_kb_T", "translate_kb_Tneg", "translate_query_T",
    "SearchConfig", "find_countermodel", "tableau_decide",
    "Conflict", "Entailed", "NotEntailed", "Unknown", "concept_satisfiable", "decide",
]
