"""Round-trip checks for the translations, used by the tests and ``alcomega roundtrip``.

Every check returns a list of human-readable failures; an empty list is a pass.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import syntax as sx
from .dltrans import (
    collapse_model, lift_model, translate_concept_T, translate_kb_T,
)
from .search import concept_individual_pairs, search_alcoi
from .semantics import Interpretation, check_kb, eval_concept
from .settrans import (
    DialectError, _alc_term, _lc_term, encode_lc, encode_model, eval_set_term, layout_for, proof_assignment,
    star_layout,
)


def kb_concepts(K: sx.KnowledgeBase) -> list[sx.Concept]:
    seen: dict = {}
    for ax in K.axioms:
        for c in sx.axiom_concepts(ax):
            for sub in sx.subconcepts(c):
                seen.setdefault(sub)
    return list(seen)


def _role_free(C) -> bool:
    return not any(isinstance(s, (sx.Forall, sx.Exists, sx.Nominal)) for s in sx.subconcepts(C))


def _render_set(s) -> str:
    return "{" + ", ".join(sorted(map(str, s))) + "}"


def check_lift(K: sx.KnowledgeBase, I: Interpretation) -> list[str]:
    """Model of K -> model of K^T, with x in (C^T)^J iff x in C^I for every concept of K."""
    ctx = translate_kb_T(K)
    J = lift_model(I, ctx)
    out = [f"K^T axiom fails on the lifted model: {sx.render(v.axiom)}"
           for v in check_kb(J, ctx.kb, allow_alcoi=True).failures()]
    for C in kb_concepts(K):
        want = eval_concept(I, C)
        got = eval_concept(J, translate_concept_T(C), allow_alcoi=True)
        if want != got:
            out.append(f"lift: {sx.render(C)} is {_render_set(want)} but its translation is {_render_set(got)}")
    return out


def alcoi_model(K: sx.KnowledgeBase, n: int, seed: int):
    """A random ALCOI model of K^T with n nodes (None when there is none)."""
    ctx = translate_kb_T(K)
    J = search_alcoi(ctx.kb, None, n, concept_individual_pairs(ctx), seed=seed, random_phases=True)
    return ctx, J


def check_collapse(K: sx.KnowledgeBase, ctx, J: Interpretation) -> list[str]:
    """Model J of K^T -> model of K, with M(x) in C^I iff x in (C^T)^J."""
    out = [f"K^T axiom fails on the ALCOI model: {sx.render(v.axiom)}"
           for v in check_kb(J, ctx.kb, allow_alcoi=True).failures()]
    if out:
        return out
    I, M = collapse_model(J, ctx)
    out += [f"K axiom fails on the collapsed model: {sx.render(v.axiom)}" for v in check_kb(I, K).failures()]
    for C in kb_concepts(K):
        ext = eval_concept(I, C)
        tr = eval_concept(J, translate_concept_T(C), allow_alcoi=True)
        for x in J.pool:
            if (M[x] in ext) != (x in tr):
                out.append(f"collapse: node {x} breaks the equivalence for {sx.render(C)}")
    return out


def check_set_terms(K: sx.KnowledgeBase, I: Interpretation) -> list[str]:
    """eval_set_term(C^S) = eval_concept(C) under beta = [pool/x, A^I/x_i], role-free C."""
    L = layout_for(K, roles=False)
    beta = proof_assignment(I, L)
    pool = frozenset(I.pool)
    out = []
    for C in kb_concepts(K):
        if not _role_free(C):
            continue
        got = eval_set_term(_lc_term(C, L), I, beta) & pool
        want = eval_concept(I, C)
        if got != want:
            out.append(f"set term of {sx.render(C)}: {_render_set(got)} != {_render_set(want)}")
    return out


def check_encoding(K: sx.KnowledgeBase, I: Interpretation) -> list[str]:
    """d in C^I iff M(d) in (C^E)^J on every node of I, plus the composed C* terms
    evaluated on J with y_i bound to the role nodes."""
    encoded, _ = encode_lc(K)
    em = encode_model(I, encoded)
    J, M = em.model, em.M
    out = []
    L = star_layout(encoded)
    beta = {"x": frozenset(J.pool)}
    for name, var in L.concepts.items():
        beta[var.name] = J.concepts.get(name, frozenset())
    for u, var in L.roles.items():
        beta[var.name] = J.concepts.get(u, frozenset())
    alc = not any(isinstance(s, sx.Pow) for C in kb_concepts(K) for s in sx.subconcepts(C))
    L_alc = layout_for(K)
    beta_alc = dict(beta)
    for r, var in L_alc.roles.items():
        beta_alc[var.name] = J.concepts.get(encoded.u_names[r], frozenset())
    for name, var in L_alc.concepts.items():
        beta_alc[var.name] = J.concepts.get(name, frozenset())
    for C in kb_concepts(K):
        ext = eval_concept(I, C)
        enc = eval_concept(J, encoded.encode_concept(C))
        star = eval_set_term(_lc_term(encoded.encode_concept(C), L), J, beta)
        for d in I.pool:
            if (d in ext) != (M[d] in enc):
                out.append(f"encoding: node {d} breaks the equivalence for {sx.render(C)}")
            if (M[d] in enc) != (M[d] in star):
                out.append(f"composed term: node {d} disagrees for {sx.render(C)}")
        if alc:
            try:
                term = _alc_term(C, L_alc)
            except DialectError:
                continue
            got = eval_set_term(term, J, beta_alc)
            for d in I.pool:
                if (d in ext) != (M[d] in got):
                    out.append(f"ALC term: node {d} disagrees for {sx.render(C)}")
    return out


def linearity_bound(K: sx.KnowledgeBase) -> int:
    lhs = len(sx.membership_concepts(K.axioms))
    return 4 * sx.ast_size(K) + 6 * lhs + 3 * len(K.signature.individuals)


def check_linearity(K: sx.KnowledgeBase) -> list[str]:
    size = sx.ast_size(translate_kb_T(K).kb)
    bound = linearity_bound(K)
    return [] if size <= bound else [f"|K^T| = {size} exceeds {bound}"]


@dataclass
class RoundtripSummary:
    trials: int = 0
    models: int = 0
    alcoi_models: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _check_one(K: sx.KnowledgeBase, kb_seed: int, max_size: int, summary: RoundtripSummary) -> list[str]:
    from .random_gen import random_model

    summary.trials += 1
    rng = random.Random(kb_seed)
    problems = check_linearity(K)
    I = random_model(K, kb_seed, max_size)
    if I is not None:
        summary.models += 1
        problems += check_lift(K, I) + check_set_terms(K, I) + check_encoding(K, I)
    need = max(1, len(K.signature.individuals) + len(sx.membership_concepts(K.axioms)))
    if need <= max_size:
        ctx, J = alcoi_model(K, rng.randint(need, max_size), kb_seed)
        if J is not None:
            summary.alcoi_models += 1
            problems += check_collapse(K, ctx, J)
    return problems


def roundtrip(trials: int, seed: int = 0, max_size: int = 5, kb: sx.KnowledgeBase | None = None) -> RoundtripSummary:
    """Run every transport check on ``trials`` seeded random KBs, or on ``trials``
    random models of ``kb`` when one is given."""
    from .random_gen import corpus

    summary = RoundtripSummary()
    if kb is not None:
        need = len(kb.signature.individuals) + len(sx.membership_concepts(kb.axioms))
        max_size = max(max_size, need + 2)
        for i in range(trials):
            kb_seed = seed * 100_003 + i
            summary.failures += [f"model seed {kb_seed}: {p}" for p in _check_one(kb, kb_seed, max_size, summary)]
        return summary
    for kb_seed, K in corpus(trials, seed):
        summary.failures += [f"kb seed {kb_seed}: {p}" for p in _check_one(K, kb_seed, max_size, summary)]
    return summary
