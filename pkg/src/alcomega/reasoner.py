"""Entailment and satisfiability for ALC^Omega.

The tableau on K^T answers the Entailed direction; bounded countermodel
search (direct, on K^T, or both) supplies checked witnesses for NotEntailed.
In mode ``both`` the procedures are cross-checked and any disagreement is a
Conflict.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import syntax as sx
from .dltrans import NotAModel, check_query_names, collapse_model, translate_kb_T, translate_query_T
from .search import BudgetExceeded, SearchConfig, find_direct, find_translated
from .semantics import Interpretation, check_kb, check_query
from .tableau import nnf, tableau_decide


class Conflict(RuntimeError):
    """Two decision procedures disagree; always a bug, never a property of the input."""


@dataclass(frozen=True)
class Entailed:
    source: str  # "tableau" or "exhausted-bound"
    closure_size: int

    @property
    def theoretical_bound(self) -> int:
        # our filtration estimate: one node per subset of the closure
        return 2 ** self.closure_size


@dataclass(frozen=True)
class NotEntailed:
    witness: Interpretation
    source: str  # "direct", "translated" or "tableau"


@dataclass(frozen=True)
class Unknown:
    reason: str


def closure_size(Kt: sx.KnowledgeBase, Ft=None) -> int:
    concepts = set()
    items = [c for ax in Kt.axioms for c in sx.axiom_concepts(ax)]
    if isinstance(Ft, sx.Inclusion):
        items.append(sx.And(Ft.sub, sx.Not(Ft.sup)))
    elif isinstance(Ft, sx.Assertion):
        items.append(sx.Not(Ft.concept))
    for c in items:
        for sub in sx.subconcepts(nnf(c)):
            concepts.add(sub)
            concepts.add(nnf(sx.Not(sub)))
    return len(concepts)


def _checked(I: Interpretation, K, F) -> Interpretation:
    if not check_kb(I, K).satisfied or check_query(I, F):
        raise Conflict("a countermodel failed the model checker")
    return I


def decide(K: sx.KnowledgeBase, F, cfg: SearchConfig = SearchConfig(mode="both"),
           tableau_nodes: int = 5000, tableau_branches: int = 200_000):
    """Entailed, NotEntailed (with a checked witness) or Unknown."""
    check_query_names(K, F)
    ctx = translate_kb_T(K, F)
    Ft = translate_query_T(F, ctx)
    csize = closure_size(ctx.kb, Ft)

    try:
        tab = tableau_decide(ctx.kb, Ft, tableau_nodes, tableau_branches)
    except BudgetExceeded:
        tab = None
    except Exception as exc:  # noqa: BLE001 - a tableau crash must not mask the search
        if cfg.mode != "both":
            raise
        tab = None
        tab_error = exc
    else:
        tab_error = None

    direct = translated = None
    timed_out = []
    if cfg.mode in ("direct", "both"):
        try:
            direct = find_direct(K, F, cfg)
        except BudgetExceeded:
            timed_out.append("direct")
    if cfg.mode in ("translated", "both"):
        try:
            found = find_translated(K, F, cfg, ctx=ctx)
            translated = found[0] if found else None
        except BudgetExceeded:
            timed_out.append("translated")

    if cfg.mode == "both" and not timed_out and (direct is None) != (translated is None):
        raise Conflict(f"at bound {cfg.max_domain} the direct search "
                       f"{'found' if direct else 'did not find'} a countermodel and the translated search "
                       f"{'did' if translated else 'did not'}")
    witness = direct or translated
    if tab is not None and tab.entailed is True:
        if witness is not None:
            raise Conflict("tableau proves entailment but search found a countermodel")
        return Entailed("tableau", csize)
    if tab_error is not None:
        raise Conflict(f"tableau failed: {tab_error!r}")
    if witness is not None:
        return NotEntailed(_checked(witness, K, F), "direct" if direct is not None else "translated")
    if tab is not None and tab.entailed is False:
        try:
            I, _ = collapse_model(tab.model, ctx)
        except NotAModel:
            pass
        else:
            if check_kb(I, K).satisfied and not check_query(I, F):
                return NotEntailed(I, "tableau")
            raise Conflict("collapsed tableau model is not a countermodel")
    if not timed_out and cfg.max_domain >= 2 ** csize:
        return Entailed("exhausted-bound", csize)
    if timed_out:
        return Unknown(f"time budget exhausted ({', '.join(timed_out)} search)")
    return Unknown(f"no countermodel up to {cfg.max_domain} nodes and the tableau gave no answer")


def concept_satisfiable(K: sx.KnowledgeBase, C: sx.Concept, cfg: SearchConfig = SearchConfig(mode="both")):
    """NotEntailed(witness) means C is satisfiable; the witness has a node in C."""
    return decide(K, sx.Inclusion(C, sx.BOT), cfg)
