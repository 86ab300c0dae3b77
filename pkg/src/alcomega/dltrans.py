"""Translation of ALC^Omega into ALCOI (and into ALC with one negated role).

The reserved role ``$e`` reads "has element": ``(x, y) in $e`` iff ``y in x``.
``Pow(D)`` becomes ``all $e . D``, and every concept C that has to denote a
domain element gets a concept individual ``$e_C`` with
``C == some inv($e) . {$e_C}``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .hypersets import mostowski_collapse, node_key
from .semantics import Interpretation, MissingDenotation, check_kb
from .syntax import (
    MEMBERSHIP_ROLE, TOP, And, Assertion, Bot, Concept, ConceptMembership, Dialect, DialectError,
    Diff, Exists, Forall, Inclusion, KnowledgeBase, Name, Nominal, Not, Or, Pow, Role,
    RoleAssertion, RoleMembership, Top, membership_concepts, query_signature, render,
)

E = Role(MEMBERSHIP_ROLE)
E_INV = Role(MEMBERSHIP_ROLE, inverted=True)
E_NEG = Role(MEMBERSHIP_ROLE, negated=True)
NO_ELEMENTS = Not(Exists(E, TOP))


class UnknownName(ValueError):
    pass


class NotAModel(ValueError):
    pass


def translate_concept_T(C: Concept) -> Concept:
    if isinstance(C, (Top, Bot, Name, Nominal)):
        return C
    if isinstance(C, Pow):
        return Forall(E, translate_concept_T(C.arg))
    if isinstance(C, Diff):
        return And(translate_concept_T(C.left), Not(translate_concept_T(C.right)))
    if isinstance(C, Not):
        return Not(translate_concept_T(C.arg))
    if isinstance(C, (And, Or)):
        return type(C)(translate_concept_T(C.left), translate_concept_T(C.right))
    if isinstance(C, (Forall, Exists)):
        if C.role.name == MEMBERSHIP_ROLE:
            raise DialectError("reserved role in source concept")
        return type(C)(C.role, translate_concept_T(C.arg))
    raise TypeError(f"not a concept: {C!r}")


class _Namer:
    """Deterministic ``$e_...`` names keyed on the rendering of the concept."""

    def __init__(self):
        self.by_key: dict[str, str] = {}
        self.taken: set[str] = set()

    def __call__(self, C: Concept) -> str:
        key = render(C)
        if key not in self.by_key:
            stem = "$e_" + (re.sub(r"[^A-Za-z0-9]+", "_", key).strip("_") or "c")
            name, i = stem, 2
            while name in self.taken:
                name, i = f"{stem}_{i}", i + 1
            self.taken.add(name)
            self.by_key[key] = name
        return self.by_key[key]


@dataclass(frozen=True)
class TranslationOutput:
    kb: KnowledgeBase
    concept_individuals: dict
    provenance: dict = field(default_factory=dict)
    source: KnowledgeBase | None = None

    def individual_for(self, C: Concept) -> str:
        return self.concept_individuals[C]


def _check_source(K: KnowledgeBase):
    if K.dialect not in (Dialect.ALC_OMEGA, Dialect.LC_OMEGA):
        raise DialectError(f"expected an ALC^Omega knowledge base, got {K.dialect.value}")


def check_query_names(K: KnowledgeBase, F) -> None:
    sig, qsig = K.signature, query_signature(F)
    for kind, have, want in zip(("concept", "role", "individual"), sig, qsig):
        missing = sorted(set(want) - set(have))
        if missing:
            raise UnknownName(f"{kind} name(s) not in the knowledge base: {', '.join(missing)}")


def _translate(K: KnowledgeBase, query, negated_role: bool) -> TranslationOutput:
    _check_source(K)
    if query is not None:
        check_query_names(K, query)
    namer = _Namer()
    prov: dict = {}
    tbox: list = []
    abox: list = []

    def emit(target, ax, src):
        target.append(ax)
        prov.setdefault(ax, src)

    for ax in K.tbox:
        emit(tbox, Inclusion(translate_concept_T(ax.sub), translate_concept_T(ax.sup)), ax)

    sources = list(K.axioms) + ([query] if query is not None else [])
    denoted = {C: namer(C) for C in membership_concepts(sources)}
    for C, e in denoted.items():
        CT = translate_concept_T(C)
        if negated_role:
            emit(abox, Assertion(Forall(E, CT), e), C)
            emit(abox, Assertion(Forall(E_NEG, Not(CT)), e), C)
        else:
            witness = Exists(E_INV, Nominal(e))
            emit(tbox, Inclusion(CT, witness), C)
            emit(tbox, Inclusion(witness, CT), C)

    for ax in K.abox:
        if isinstance(ax, ConceptMembership):
            new = Assertion(translate_concept_T(ax.container), denoted[ax.element])
        elif isinstance(ax, RoleMembership):
            new = RoleAssertion(ax.role, denoted[ax.first], denoted[ax.second])
        elif isinstance(ax, Assertion):
            new = Assertion(translate_concept_T(ax.concept), ax.individual)
        else:
            new = ax
        emit(abox, new, ax)
    for a in K.signature.individuals:
        emit(abox, Assertion(NO_ELEMENTS, a), a)
    return TranslationOutput(KnowledgeBase(tuple(tbox), tuple(abox)), denoted, prov, K)


def translate_kb_T(K: KnowledgeBase, query=None) -> TranslationOutput:
    """K^T in ALCOI.  Pass the query so its membership concepts get individuals."""
    return _translate(K, query, negated_role=False)


def translate_kb_Tneg(K: KnowledgeBase, query=None) -> TranslationOutput:
    """K^{T(neg)}: equivalences replaced by assertions on ``$e`` and ``neg($e)``."""
    return _translate(K, query, negated_role=True)


def translate_query_T(F, ctx: TranslationOutput):
    if ctx.source is not None:
        check_query_names(ctx.source, F)
    for C in membership_concepts([F]):
        if C not in ctx.concept_individuals:
            raise UnknownName(f"no concept individual for {render(C)}; "
                              "translate the knowledge base together with the query")
    if isinstance(F, Inclusion):
        return Inclusion(translate_concept_T(F.sub), translate_concept_T(F.sup))
    if isinstance(F, Assertion):
        return Assertion(translate_concept_T(F.concept), F.individual)
    if isinstance(F, ConceptMembership):
        return Assertion(translate_concept_T(F.container), ctx.concept_individuals[F.element])
    if isinstance(F, RoleMembership):
        return RoleAssertion(F.role, ctx.concept_individuals[F.first], ctx.concept_individuals[F.second])
    raise TypeError(f"not a query: {F!r}")


# ---------------------------------------------------------------------------
# Model constructions


def lift_model(I: Interpretation, ctx: TranslationOutput) -> Interpretation:
    """ALCOI model of K^T from a model of K: same domain, ``$e`` = reversed membership,
    ``$e_C`` = the node denoting C."""
    inds = dict(I.individuals)
    for C, e in ctx.concept_individuals.items():
        if C not in I.denotations:
            raise MissingDenotation(C)
        inds[e] = I.denotations[C]
    roles = dict(I.roles)
    roles[MEMBERSHIP_ROLE] = frozenset((x, y) for x in I.pool for y in I.elems[x])
    return I.replace(roles=roles, individuals=inds, denotations={})


def collapse_model(J: Interpretation, ctx: TranslationOutput, verify: bool = True) -> tuple[Interpretation, dict]:
    """ALC^Omega model of K from a finite ALCOI model of K^T via the collapse
    M(d) = {M(d') : (d, d') in $e}; returns the model and the map M."""
    K = ctx.source
    if verify:
        report = check_kb(J, ctx.kb, allow_alcoi=True)
        if not report.satisfied:
            raise NotAModel(f"{len(report.failures())} axiom(s) of K^T fail, e.g. "
                            f"{render(report.failures()[0].axiom)}")
    concept_nodes = {J.individuals[e] for e in ctx.concept_individuals.values()}
    standard = K.signature.individuals if K is not None else ()
    for a in standard:
        if J.individuals[a] in concept_nodes:
            raise NotAModel(f"individual {a} coincides with a concept individual")
    e_edges = set(J.roles.get(MEMBERSHIP_ROLE, ()))
    has_elems = {x for x, _ in e_edges}
    base = [d for d in J.pool if d not in has_elems and d not in concept_nodes]
    graph, M = mostowski_collapse(J.pool, e_edges, base, dup_policy=True)

    ids: dict = {}
    count = 0
    for d in sorted(J.pool, key=node_key):
        if M[d] in graph.atoms:
            ids[d] = graph.atoms[M[d]]
        else:
            ids[d] = f"s{count}"
            count += 1
    Mx = {d: ids[d] for d in J.pool}
    elems = {Mx[d]: frozenset(Mx[y] for y in graph.elements(M[d])) for d in J.pool}
    names = K.signature.concepts if K is not None else tuple(J.concepts)
    roles = K.signature.roles if K is not None else tuple(r for r in J.roles if r != MEMBERSHIP_ROLE)
    I = Interpretation(
        pool=tuple(Mx[d] for d in J.pool),
        elems=elems,
        atoms=frozenset(Mx[d] for d in base),
        concepts={A: frozenset(Mx[d] for d in J.concepts.get(A, ())) for A in names},
        roles={R: frozenset((Mx[x], Mx[y]) for x, y in J.roles.get(R, ())) for R in roles},
        individuals={a: Mx[J.individuals[a]] for a in standard},
        denotations={C: Mx[J.individuals[e]] for C, e in ctx.concept_individuals.items()},
    )
    return I, Mx
