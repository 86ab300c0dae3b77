"""Set-theoretic translations into the theory Omega.

Terms are built from variables, the empty set, union, intersection, difference
and power set; formulas use membership and inclusion.  ``x`` stands for the
domain, ``y1..yk`` for the role sets and ``x1..xn`` for concept names.

Also here: the encoding E of ALC^Omega into the role-free fragment LC^Omega,
the composed C* translation, a finite evaluator used as a test oracle, and the
model construction that transports an ALC^Omega model to a model of K^E.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import syntax as sx
from .dltrans import UnknownName
from .hypersets import mostowski_collapse
from .semantics import Interpretation, MissingDenotation
from .syntax import DialectError, render


class UnboundVariable(KeyError):
    pass


class QuantifierBlowup(RuntimeError):
    pass


class BadIndex(IndexError):
    pass


class UnsupportedQuery(ValueError):
    pass


# ---------------------------------------------------------------------------
# Terms


class SetTerm:
    __slots__ = ()


@dataclass(frozen=True)
class Var(SetTerm):
    name: str


@dataclass(frozen=True)
class Empty(SetTerm):
    pass


@dataclass(frozen=True)
class Union(SetTerm):
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class Inter(SetTerm):
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class Diff(SetTerm):
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class PowT(SetTerm):
    arg: SetTerm


EMPTY = Empty()


def VarX() -> Var:
    return Var("x")


def VarY(i: int) -> Var:
    return Var(f"y{i}")


def VarA(i: int) -> Var:
    return Var(f"x{i}")


def union_all(terms: Iterable[SetTerm]) -> SetTerm:
    terms = list(terms)
    if not terms:
        return EMPTY
    out = terms[0]
    for t in terms[1:]:
        out = Union(out, t)
    return out


def expand_inter(t: SetTerm) -> SetTerm:
    """Rewrite A cap B as A minus (A minus B), the form definable in Omega."""
    if isinstance(t, Inter):
        a, b = expand_inter(t.left), expand_inter(t.right)
        return Diff(a, Diff(a, b))
    if isinstance(t, (Union, Diff)):
        return type(t)(expand_inter(t.left), expand_inter(t.right))
    if isinstance(t, PowT):
        return PowT(expand_inter(t.arg))
    return t


# ---------------------------------------------------------------------------
# Formulas


class OmegaFormula:
    __slots__ = ()


@dataclass(frozen=True)
class Member(OmegaFormula):
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class Subset(OmegaFormula):
    left: SetTerm
    right: SetTerm


@dataclass(frozen=True)
class FNot(OmegaFormula):
    arg: OmegaFormula


@dataclass(frozen=True)
class FAnd(OmegaFormula):
    items: tuple


@dataclass(frozen=True)
class FOr(OmegaFormula):
    items: tuple


@dataclass(frozen=True)
class Implies(OmegaFormula):
    left: OmegaFormula
    right: OmegaFormula


@dataclass(frozen=True)
class Iff(OmegaFormula):
    left: OmegaFormula
    right: OmegaFormula


@dataclass(frozen=True)
class ForAll(OmegaFormula):
    variables: tuple
    body: OmegaFormula


@dataclass(frozen=True)
class Exists(OmegaFormula):
    variables: tuple
    body: OmegaFormula


TRUE = FAnd(())


def conj(items: Iterable[OmegaFormula]) -> OmegaFormula:
    items = tuple(items)
    return items[0] if len(items) == 1 else FAnd(items)


def implies(antecedents: Iterable[OmegaFormula], conclusion: OmegaFormula) -> OmegaFormula:
    antecedents = tuple(antecedents)
    return Implies(conj(antecedents), conclusion) if antecedents else conclusion


def forall(variables: Iterable[str], body: OmegaFormula) -> OmegaFormula:
    variables = tuple(variables)
    return ForAll(variables, body) if variables else body


def trans(t: SetTerm) -> OmegaFormula:
    """Trans(t): every element of t is a subset of t."""
    y = Var("y")
    return ForAll(("y",), Implies(Member(y, t), Subset(y, t)))


def trans2(t: SetTerm) -> OmegaFormula:
    """Trans^2(t): elements of elements of t are subsets of t."""
    y, z = Var("y"), Var("z")
    return ForAll(("y", "z"), Implies(FAnd((Member(y, z), Member(z, t))), Subset(y, t)))


def free_variables(phi) -> set[str]:
    if isinstance(phi, Var):
        return {phi.name}
    if isinstance(phi, Empty):
        return set()
    if isinstance(phi, (Union, Inter, Diff, Member, Subset, Implies, Iff)):
        return free_variables(phi.left) | free_variables(phi.right)
    if isinstance(phi, PowT):
        return free_variables(phi.arg)
    if isinstance(phi, FNot):
        return free_variables(phi.arg)
    if isinstance(phi, (FAnd, FOr)):
        return set().union(*(free_variables(i) for i in phi.items)) if phi.items else set()
    if isinstance(phi, (ForAll, Exists)):
        return free_variables(phi.body) - set(phi.variables)
    raise TypeError(f"not a term or formula: {phi!r}")


# ---------------------------------------------------------------------------
# Variable layout


@dataclass(frozen=True)
class Layout:
    """Which set variable stands for which concept or role name."""

    concepts: Mapping  # concept name -> Var
    roles: Mapping = field(default_factory=dict)  # role name -> Var
    domain: SetTerm = field(default_factory=VarX)

    @property
    def role_union(self) -> SetTerm:
        return union_all(self.roles.values())

    def concept_var(self, name: str) -> SetTerm:
        try:
            return self.concepts[name]
        except KeyError:
            raise UnknownName(f"concept {name} not in the knowledge base") from None

    def role_var(self, name: str) -> SetTerm:
        try:
            return self.roles[name]
        except KeyError:
            raise UnknownName(f"role {name} not in the knowledge base") from None

    def quantified(self) -> tuple[list[str], list[str]]:
        return [v.name for v in self.roles.values()], [v.name for v in self.concepts.values()]


def _ordered_concepts(names: Iterable[str]) -> list[str]:
    # user names first (sorted), generated names after them
    names = list(dict.fromkeys(names))
    plain = sorted(n for n in names if not n.startswith(sx.RESERVED_PREFIX))
    generated = [n for n in names if n.startswith(sx.RESERVED_PREFIX)]
    return plain + generated


def layout_for(K: sx.KnowledgeBase, extra=None, roles: bool = True) -> Layout:
    sig = K.signature
    names = list(sig.concepts)
    if extra is not None:
        names += [n for n in sx.query_signature(extra).concepts if n not in names]
    concepts = {n: VarA(i) for i, n in enumerate(_ordered_concepts(names), 1)}
    role_vars = {r: VarY(i) for i, r in enumerate(sig.roles, 1)} if roles else {}
    return Layout(concepts, role_vars)


# ---------------------------------------------------------------------------
# Concept translations


def _alc_term(C: sx.Concept, L: Layout) -> SetTerm:
    x = L.domain
    if isinstance(C, sx.Top):
        return x
    if isinstance(C, sx.Bot):
        return EMPTY
    if isinstance(C, sx.Name):
        return L.concept_var(C.name)
    if isinstance(C, sx.Not):
        return Diff(x, _alc_term(C.arg, L))
    if isinstance(C, sx.And):
        return Inter(_alc_term(C.left, L), _alc_term(C.right, L))
    if isinstance(C, sx.Or):
        return Union(_alc_term(C.left, L), _alc_term(C.right, L))
    if isinstance(C, sx.Diff):
        return Diff(_alc_term(C.left, L), _alc_term(C.right, L))
    if isinstance(C, sx.Forall):
        yi = L.role_var(C.role.name)
        everything = union_all([x, *L.roles.values()])
        return PowT(Union(Diff(everything, yi), PowT(_alc_term(C.arg, L))))
    if isinstance(C, sx.Exists):
        return _alc_term(sx.Not(sx.Forall(C.role, sx.Not(C.arg))), L)
    raise DialectError(f"{type(C).__name__} is not an ALC constructor")


def _check_alc(K: sx.KnowledgeBase, concepts: Iterable[sx.Concept]):
    if K.abox:
        raise DialectError("the ALC set translation needs an empty ABox")
    for C in list(concepts) + [c for ax in K.tbox for c in (ax.sub, ax.sup)]:
        for sub in sx.subconcepts(C):
            if isinstance(sub, (sx.Pow, sx.Nominal)):
                raise DialectError(f"{render(sub)} is outside ALC")
            if isinstance(sub, (sx.Forall, sx.Exists)) and (sub.role.inverted or sub.role.negated):
                raise DialectError(f"{render(sub)} is outside ALC")


def translate_alc_S(K: sx.KnowledgeBase, C: sx.Concept) -> SetTerm:
    _check_alc(K, [C])
    return _alc_term(C, layout_for(K))


def emit_alc_theorem(K: sx.KnowledgeBase, F: sx.Inclusion, role_axioms: Iterable = ()) -> OmegaFormula:
    """forall x, y1..yk (Trans2(x) [and Axiom_H] -> forall x1..xn (TBox -> C cap x sub D))."""
    if not isinstance(F, sx.Inclusion):
        raise UnsupportedQuery("the ALC theorem covers subsumption queries only")
    _check_alc(K, [F.sub, F.sup])
    L = layout_for(K, F)
    x = L.domain
    tbox = [Subset(Inter(_alc_term(ax.sub, L), x), _alc_term(ax.sup, L)) for ax in K.tbox]
    goal = Subset(Inter(_alc_term(F.sub, L), x), _alc_term(F.sup, L))
    k = len(L.roles)
    side = [trans2(x)] + [emit_role_axiom(*spec, k=k) for spec in role_axioms]
    ys, xs = L.quantified()
    return forall(["x", *ys], implies(side, forall(xs, implies(tbox, goal))))


def emit_role_axiom(kind: str, *indices: int, k: int | None = None) -> OmegaFormula:
    """Axiom_H formulas: ("hierarchy", j, i) for R_j below R_i, ("transitive", i),
    ("inverse", j, i) for R_j the inverse of R_i."""
    for i in indices:
        if i < 1 or (k is not None and i > k):
            raise BadIndex(i)
    x = VarX()
    if kind == "hierarchy":
        j, i = indices
        return Subset(VarY(j), VarY(i))
    if kind == "transitive":
        (i,) = indices
        yi = VarY(i)
        y, u, v, u1, z, u2 = (Var(n) for n in ("y", "u", "v", "u1", "z", "u2"))
        chain = FAnd((Member(u, y), Member(u, yi), Member(v, u), Member(u1, v), Member(u1, yi), Member(z, u1)))
        witness = Exists(("u2",), FAnd((Member(u2, y), Member(u2, yi), Member(z, u2))))
        return ForAll(("y", "u", "v", "u1", "z"), Implies(Member(y, x), Implies(chain, witness)))
    if kind == "inverse":
        j, i = indices
        y, v, u, u1 = Var("y"), Var("v"), Var("u"), Var("u1")
        left = Exists(("u",), FAnd((Member(u, y), Member(u, VarY(j)), Member(v, u))))
        right = Exists(("u1",), FAnd((Member(u1, v), Member(u1, VarY(i)), Member(y, u1))))
        return ForAll(("y", "v"), Implies(Member(y, x), Iff(left, right)))
    raise ValueError(f"unknown role axiom kind {kind!r}")


def _lc_term(C: sx.Concept, L: Layout) -> SetTerm:
    x = L.domain
    if isinstance(C, sx.Top):
        return x
    if isinstance(C, sx.Bot):
        return EMPTY
    if isinstance(C, sx.Name):
        if C.name in L.roles:  # U_i stands for y_i in the composed translation
            return L.roles[C.name]
        return L.concept_var(C.name)
    if isinstance(C, sx.Not):
        return Diff(x, _lc_term(C.arg, L))
    if isinstance(C, sx.And):
        return Inter(_lc_term(C.left, L), _lc_term(C.right, L))
    if isinstance(C, sx.Or):
        return Union(_lc_term(C.left, L), _lc_term(C.right, L))
    if isinstance(C, sx.Diff):
        return Diff(_lc_term(C.left, L), _lc_term(C.right, L))
    if isinstance(C, sx.Pow):
        return PowT(_lc_term(C.arg, L))
    raise DialectError(f"{type(C).__name__} is outside LC^Omega")


def _check_lc(K: sx.KnowledgeBase, F=None):
    axioms = list(K.axioms) + ([F] if F is not None else [])
    if sx.infer_dialect(axioms) is not sx.Dialect.LC_OMEGA:
        raise DialectError("expected an LC^Omega knowledge base")


def translate_lc_S(K: sx.KnowledgeBase, C: sx.Concept) -> SetTerm:
    _check_lc(K, sx.Inclusion(C, C))
    return _lc_term(C, layout_for(K, sx.Inclusion(C, C), roles=False))


def _lc_goal(F, L: Layout, scope: SetTerm):
    if isinstance(F, sx.Inclusion):
        return Subset(Inter(_lc_term(F.sub, L), scope), _lc_term(F.sup, L))
    if isinstance(F, sx.ConceptMembership):
        return Member(_lc_term(F.element, L), Inter(_lc_term(F.container, L), L.domain))
    raise UnsupportedQuery(f"{type(F).__name__} queries have no LC^Omega form")


def emit_lc_theorem(K: sx.KnowledgeBase, F) -> OmegaFormula:
    """forall x (Trans(x) -> forall x1..xn (ABox and TBox -> goal))."""
    _check_lc(K, F)
    L = layout_for(K, F, roles=False)
    x = L.domain
    abox = [Member(_lc_term(ax.element, L), Inter(_lc_term(ax.container, L), x)) for ax in K.abox]
    tbox = [Subset(Inter(_lc_term(ax.sub, L), x), _lc_term(ax.sup, L)) for ax in K.tbox]
    _, xs = L.quantified()
    return ForAll(("x",), Implies(trans(x), forall(xs, implies(abox + tbox, _lc_goal(F, L, x)))))


# ---------------------------------------------------------------------------
# Encoding into LC^Omega


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", text).strip("_") or "c"


@dataclass(frozen=True)
class EncodedKB:
    kb: sx.KnowledgeBase
    fresh: dict  # family -> {source key: generated name}
    provenance: dict
    source: sx.KnowledgeBase

    @property
    def u_names(self) -> dict:
        return self.fresh["U"]

    @property
    def not_u(self) -> sx.Concept:
        return sx.Not(sx.disjunction(sx.Name(u) for u in self.u_names.values()))

    def encode_concept(self, C: sx.Concept) -> sx.Concept:
        return _encode_concept(C, self.u_names)


def _encode_concept(C: sx.Concept, U: Mapping) -> sx.Concept:
    if isinstance(C, (sx.Top, sx.Bot, sx.Name)):
        return C
    if isinstance(C, sx.Not):
        return sx.Not(_encode_concept(C.arg, U))
    if isinstance(C, (sx.And, sx.Or, sx.Diff)):
        return type(C)(_encode_concept(C.left, U), _encode_concept(C.right, U))
    if isinstance(C, sx.Pow):
        inner = _encode_concept(C.arg, U)
        if U:
            inner = sx.disjunction([*(sx.Name(u) for u in U.values()), inner])
        return sx.Pow(inner)
    if isinstance(C, sx.Forall):
        ui = sx.Name(U[C.role.name])
        return sx.Pow(sx.Or(sx.Not(ui), sx.Pow(_encode_concept(C.arg, U))))
    if isinstance(C, sx.Exists):
        return sx.Not(_encode_concept(sx.Forall(C.role, sx.Not(C.arg)), U))
    raise DialectError(f"{type(C).__name__} cannot be encoded in LC^Omega")


def encode_lc(K: sx.KnowledgeBase, F=None) -> tuple[EncodedKB, object]:
    """K^E and F^E.  Inclusions are relativised to the non-U part of the domain,
    queries included."""
    if K.dialect not in (sx.Dialect.ALC_OMEGA, sx.Dialect.LC_OMEGA):
        raise DialectError(f"expected an ALC^Omega knowledge base, got {K.dialect.value}")
    if F is not None:
        from .dltrans import check_query_names
        check_query_names(K, F)
        if isinstance(F, sx.RoleMembership):
            raise UnsupportedQuery("role membership queries have no LC^Omega encoding")
    sig = K.signature
    taken: set[str] = set()

    def fresh(stem: str) -> str:
        name, i = sx.RESERVED_PREFIX + stem, 2
        while name in taken:
            name, i = f"{sx.RESERVED_PREFIX}{stem}_{i}", i + 1
        taken.add(name)
        return name

    U = {r: fresh(f"U_{r}") for r in sig.roles}
    B = {a: fresh(f"B_{a}") for a in sig.individuals}
    Fn: dict = {}
    Gn: dict = {}
    enc = lambda c: _encode_concept(c, U)  # noqa: E731
    not_u = sx.Not(sx.disjunction(sx.Name(u) for u in U.values())) if U else None
    prov: dict = {}
    tbox: list = []
    abox: list = []

    def emit(target, ax, src):
        target.append(ax)
        prov.setdefault(ax, src)

    def relativise(C):
        return sx.And(enc(C), not_u) if not_u is not None else enc(C)

    for ax in K.tbox:
        emit(tbox, sx.Inclusion(relativise(ax.sub), enc(ax.sup)), ax)
    for ax in K.abox:
        if isinstance(ax, sx.ConceptMembership):
            emit(abox, sx.ConceptMembership(enc(ax.element), enc(ax.container)), ax)
        elif isinstance(ax, sx.Assertion):
            emit(abox, sx.ConceptMembership(sx.Name(B[ax.individual]), enc(ax.concept)), ax)
        elif isinstance(ax, sx.RoleAssertion):
            key = (ax.role, ax.subject, ax.object)
            if key not in Fn:
                Fn[key] = fresh(f"F_{ax.role}_{ax.subject}_{ax.object}")
            f = sx.Name(Fn[key])
            emit(abox, sx.ConceptMembership(f, sx.Name(B[ax.subject])), ax)
            emit(abox, sx.ConceptMembership(sx.Name(B[ax.object]), f), ax)
            emit(abox, sx.ConceptMembership(f, sx.Name(U[ax.role])), ax)
        elif isinstance(ax, sx.RoleMembership):
            key = (ax.role, ax.first, ax.second)
            if key not in Gn:
                Gn[key] = fresh(f"G_{ax.role}_{_slug(render(ax.first))}_{_slug(render(ax.second))}")
            g = sx.Name(Gn[key])
            emit(abox, sx.ConceptMembership(g, enc(ax.first)), ax)
            emit(abox, sx.ConceptMembership(enc(ax.second), g), ax)
            emit(abox, sx.ConceptMembership(g, sx.Name(U[ax.role])), ax)
    if not_u is not None:
        for A in sig.concepts:
            emit(tbox, sx.Inclusion(sx.Name(A), not_u), A)
        for a in sig.individuals:
            emit(abox, sx.ConceptMembership(sx.Name(B[a]), not_u), a)
        lhs = sx.membership_concepts(list(K.abox) + ([F] if F is not None else []))
        for C in lhs:
            emit(abox, sx.ConceptMembership(enc(C), not_u), C)
        emit(tbox, sx.Inclusion(not_u, sx.Pow(sx.Or(not_u, sx.Pow(not_u)))), "Trans2")

    encoded = EncodedKB(sx.KnowledgeBase(tuple(tbox), tuple(abox)),
                        {"U": U, "B": B, "F": Fn, "G": Gn}, prov, K)
    return encoded, (encode_query(F, encoded) if F is not None else None)


def encode_query(F, encoded: EncodedKB):
    enc = encoded.encode_concept
    if isinstance(F, sx.Inclusion):
        sub = enc(F.sub)
        if encoded.u_names:
            sub = sx.And(sub, encoded.not_u)
        return sx.Inclusion(sub, enc(F.sup))
    if isinstance(F, sx.Assertion):
        return sx.ConceptMembership(sx.Name(encoded.fresh["B"][F.individual]), enc(F.concept))
    if isinstance(F, sx.ConceptMembership):
        return sx.ConceptMembership(enc(F.element), enc(F.container))
    raise UnsupportedQuery(f"{type(F).__name__} queries have no LC^Omega encoding")


def star_layout(encoded: EncodedKB, F_enc=None) -> Layout:
    K = encoded.source
    user = sorted(K.signature.concepts)
    generated = [*encoded.fresh["B"].values(), *encoded.fresh["F"].values(), *encoded.fresh["G"].values()]
    concepts = {n: VarA(i) for i, n in enumerate(user + generated, 1)}
    roles = {u: VarY(i) for i, u in enumerate(encoded.u_names.values(), 1)}
    return Layout(concepts, roles)


def translate_star_concept(C: sx.Concept, encoded: EncodedKB) -> SetTerm:
    return _lc_term(encoded.encode_concept(C), star_layout(encoded))


def translate_star(K: sx.KnowledgeBase, F) -> OmegaFormula:
    """The composed translation (C^E)^S with U_i read as y_i."""
    encoded, Fe = encode_lc(K, F)
    L = star_layout(encoded)
    x = L.domain
    Y = L.role_union
    scope = Diff(x, Y) if L.roles else x
    not_u = encoded.not_u if encoded.u_names else None

    def inclusion(ax):
        if not_u is not None and isinstance(ax.sub, sx.And) and ax.sub.right == not_u:
            return Subset(Inter(_lc_term(ax.sub.left, L), scope), _lc_term(ax.sup, L))
        return Subset(Inter(_lc_term(ax.sub, L), x), _lc_term(ax.sup, L))

    abox = [Member(_lc_term(ax.element, L), Inter(_lc_term(ax.container, L), x)) for ax in encoded.kb.abox]
    tbox = [inclusion(ax) for ax in encoded.kb.tbox]
    if isinstance(Fe, sx.Inclusion):
        goal = inclusion(Fe)
    else:
        goal = Member(_lc_term(Fe.element, L), Inter(_lc_term(Fe.container, L), x))
    ys, xs = L.quantified()
    return forall(["x", *ys], Implies(trans(x), forall(xs, implies(abox + tbox, goal))))


# ---------------------------------------------------------------------------
# Finite evaluation


def _as_set(value, I: Interpretation) -> frozenset:
    return value if isinstance(value, frozenset) else I.elems[value]


def eval_set_term(t: SetTerm, I: Interpretation, beta: Mapping) -> frozenset:
    """Pool-relative value of t: Pow only collects pool nodes.  Variables bound to
    a node denote that node's elements."""
    if isinstance(t, Var):
        if t.name not in beta:
            raise UnboundVariable(t.name)
        return _as_set(beta[t.name], I)
    if isinstance(t, Empty):
        return frozenset()
    if isinstance(t, Union):
        return eval_set_term(t.left, I, beta) | eval_set_term(t.right, I, beta)
    if isinstance(t, Inter):
        return eval_set_term(t.left, I, beta) & eval_set_term(t.right, I, beta)
    if isinstance(t, Diff):
        return eval_set_term(t.left, I, beta) - eval_set_term(t.right, I, beta)
    if isinstance(t, PowT):
        inner = eval_set_term(t.arg, I, beta)
        return frozenset(n for n in I.pool if I.elems[n] <= inner)
    raise TypeError(f"not a set term: {t!r}")


@dataclass(frozen=True)
class FormulaResult:
    value: bool
    restricted: bool  # some quantifier ranged over a finite sample only
    extensional_fallback: bool  # some membership was resolved by extension

    def __bool__(self):
        return self.value


class _Evaluator:
    def __init__(self, I, candidates, denote, budget):
        self.I = I
        self.range = list(I.pool) + [frozenset(c) for c in candidates]
        self.denote = dict(denote or {})
        self.budget = budget
        self.steps = 0
        self.restricted = False
        self.fallback = False

    def element(self, t, beta):
        """The node a term names when it occurs on the left of a membership."""
        if isinstance(t, Var) and t.name in beta and not isinstance(beta[t.name], frozenset):
            return [beta[t.name]]
        if t in self.denote:
            return [self.denote[t]]
        value = eval_set_term(t, self.I, beta)
        self.fallback = True
        return [n for n in self.I.pool if self.I.elems[n] == value]

    def run(self, phi, beta) -> bool:
        self.steps += 1
        if self.steps > self.budget:
            raise QuantifierBlowup(f"more than {self.budget} evaluation steps")
        if isinstance(phi, Member):
            right = eval_set_term(phi.right, self.I, beta)
            return any(n in right for n in self.element(phi.left, beta))
        if isinstance(phi, Subset):
            return eval_set_term(phi.left, self.I, beta) <= eval_set_term(phi.right, self.I, beta)
        if isinstance(phi, FNot):
            return not self.run(phi.arg, beta)
        if isinstance(phi, FAnd):
            return all(self.run(i, beta) for i in phi.items)
        if isinstance(phi, FOr):
            return any(self.run(i, beta) for i in phi.items)
        if isinstance(phi, Implies):
            return (not self.run(phi.left, beta)) or self.run(phi.right, beta)
        if isinstance(phi, Iff):
            return self.run(phi.left, beta) == self.run(phi.right, beta)
        if isinstance(phi, (ForAll, Exists)):
            self.restricted = True
            size = len(self.range) ** len(phi.variables)
            if size > self.budget:
                raise QuantifierBlowup(f"{size} assignments for {phi.variables}")
            want = isinstance(phi, ForAll)
            for values in itertools.product(self.range, repeat=len(phi.variables)):
                inner = dict(beta)
                inner.update(zip(phi.variables, values))
                if self.run(phi.body, inner) != want:
                    return not want
            return want
        raise TypeError(f"not a formula: {phi!r}")


def eval_formula(phi: OmegaFormula, I: Interpretation, beta: Mapping | None = None,
                 candidates: Iterable = (), denote: Mapping | None = None,
                 budget: int = 2_000_000) -> FormulaResult:
    """Tarskian evaluation over a finite membership graph.

    Quantifiers range over the pool nodes plus the listed candidate subsets, so
    the result is a finite check, not Omega-validity.  ``denote`` names the node
    a compound term stands for when it is the left side of a membership; other
    compound terms fall back to any node with the same extension.
    """
    beta = dict(beta or {})
    missing = free_variables(phi) - set(beta)
    if missing:
        raise UnboundVariable(sorted(missing)[0])
    ev = _Evaluator(I, candidates, denote, budget)
    value = ev.run(phi, beta)
    return FormulaResult(value, ev.restricted, ev.fallback)


def proof_assignment(I: Interpretation, L: Layout) -> dict:
    """beta = [pool/x, A_i^I/x_i]."""
    beta = {"x": frozenset(I.pool)}
    for name, var in L.concepts.items():
        beta[var.name] = I.concepts.get(name, frozenset())
    return beta


# ---------------------------------------------------------------------------
# Model transport for the encoding


@dataclass(frozen=True)
class EncodedModel:
    model: Interpretation
    M: dict
    role_nodes: dict  # (role, s, t) -> node


def encode_model(I: Interpretation, encoded: EncodedKB) -> EncodedModel:
    """A model J of K^E built from a model I of K.

    Each role pair (s, t) of R_i gets a node u with s -> u -> t; U_i collects
    those nodes.  B_i denotes an empty node standing for a_i; F and G denote
    the role nodes of the pairs they encode.
    """
    K = encoded.source
    role_nodes: dict = {}
    edges = {(s, t) for s in I.pool for t in I.elems[s]}
    for r in K.signature.roles:
        for s, t in sorted(I.roles.get(r, ()), key=lambda p: (str(p[0]), str(p[1]))):
            u = f"u:{r}:{s}:{t}"
            role_nodes[(r, s, t)] = u
            edges |= {(s, u), (u, t)}
    pool = list(I.pool) + list(role_nodes.values())
    individual_nodes = set(I.individuals.values())
    sources = {s for s, _ in edges}
    leaves = [d for d in I.pool if d in I.atoms and d not in sources and d not in individual_nodes]
    graph, M = mostowski_collapse(pool, edges, leaves, dup_policy=True)

    concepts = {A: frozenset(M[d] for d in I.concepts.get(A, ())) for A in K.signature.concepts}
    for r, u_name in encoded.u_names.items():
        concepts[u_name] = frozenset(M[u] for (rr, _, _), u in role_nodes.items() if rr == r)
    denotations = {}
    for a, b_name in encoded.fresh["B"].items():
        node = M[I.individuals[a]]
        concepts[b_name] = graph.elements(node)
        denotations[sx.Name(b_name)] = node

    def pair_node(role, s, t):
        try:
            return M[role_nodes[(role, s, t)]]
        except KeyError:
            raise MissingDenotation(sx.Name(role), "role pair absent from the model") from None

    for (r, a, b), f_name in encoded.fresh["F"].items():
        node = pair_node(r, I.individuals[a], I.individuals[b])
        concepts[f_name] = graph.elements(node)
        denotations[sx.Name(f_name)] = node
    for (r, C, D), g_name in encoded.fresh["G"].items():
        if C not in I.denotations or D not in I.denotations:
            raise MissingDenotation(C if C not in I.denotations else D)
        node = pair_node(r, I.denotations[C], I.denotations[D])
        concepts[g_name] = graph.elements(node)
        denotations[sx.Name(g_name)] = node
    for C, node in I.denotations.items():
        denotations.setdefault(encoded.encode_concept(C), M[node])

    J = Interpretation(
        pool=tuple(M[d] for d in pool),
        elems={M[d]: frozenset(M[e] for e in graph.elements(d)) for d in pool},
        atoms=frozenset(M[d] for d in leaves),
        concepts=concepts,
        denotations=denotations,
    )
    return EncodedModel(J, M, role_nodes)


# ---------------------------------------------------------------------------
# Output formats


_SEXP_OPS = {Union: "cup", Inter: "cap", Diff: "diff", Member: "in", Subset: "sub",
             Implies: "implies", Iff: "iff"}


def to_sexp(phi, expand: bool = False) -> str:
    if isinstance(phi, SetTerm) and expand:
        phi = expand_inter(phi)
    if isinstance(phi, Var):
        return phi.name
    if isinstance(phi, Empty):
        return "empty"
    if isinstance(phi, PowT):
        return f"(pow {to_sexp(phi.arg, expand)})"
    if type(phi) in _SEXP_OPS:
        return f"({_SEXP_OPS[type(phi)]} {to_sexp(phi.left, expand)} {to_sexp(phi.right, expand)})"
    if isinstance(phi, FNot):
        return f"(not {to_sexp(phi.arg, expand)})"
    if isinstance(phi, (FAnd, FOr)):
        if not phi.items:
            return "true" if isinstance(phi, FAnd) else "false"
        op = "and" if isinstance(phi, FAnd) else "or"
        return f"({op} {' '.join(to_sexp(i, expand) for i in phi.items)})"
    if isinstance(phi, (ForAll, Exists)):
        q = "forall" if isinstance(phi, ForAll) else "exists"
        return f"({q} ({' '.join(phi.variables)}) {to_sexp(phi.body, expand)})"
    raise TypeError(f"not a term or formula: {phi!r}")


def _tptp_var(name: str) -> str:
    return name.upper()


def _tptp_term(t: SetTerm) -> str:
    if isinstance(t, Var):
        return _tptp_var(t.name)
    if isinstance(t, Empty):
        return "emptyset"
    if isinstance(t, PowT):
        return f"pow({_tptp_term(t.arg)})"
    if isinstance(t, Union):
        return f"cup({_tptp_term(t.left)},{_tptp_term(t.right)})"
    if isinstance(t, Diff):
        return f"diff({_tptp_term(t.left)},{_tptp_term(t.right)})"
    if isinstance(t, Inter):
        return _tptp_term(expand_inter(t))
    raise TypeError(f"not a set term: {t!r}")


def _tptp(phi) -> str:
    if isinstance(phi, Member):
        return f"member({_tptp_term(phi.left)},{_tptp_term(phi.right)})"
    if isinstance(phi, Subset):
        return f"subset({_tptp_term(phi.left)},{_tptp_term(phi.right)})"
    if isinstance(phi, FNot):
        return f"~ {_tptp(phi.arg)}"
    if isinstance(phi, (FAnd, FOr)):
        if not phi.items:
            return "$true" if isinstance(phi, FAnd) else "$false"
        op = " & " if isinstance(phi, FAnd) else " | "
        return "(" + op.join(_tptp(i) for i in phi.items) + ")"
    if isinstance(phi, Implies):
        return f"({_tptp(phi.left)} => {_tptp(phi.right)})"
    if isinstance(phi, Iff):
        return f"({_tptp(phi.left)} <=> {_tptp(phi.right)})"
    if isinstance(phi, (ForAll, Exists)):
        q = "!" if isinstance(phi, ForAll) else "?"
        return f"{q} [{','.join(map(_tptp_var, phi.variables))}] : {_tptp(phi.body)}"
    raise TypeError(f"not a formula: {phi!r}")


def to_tptp(phi: OmegaFormula, name: str = "goal", role: str = "conjecture") -> str:
    """TPTP FOF; intersections are always expanded since the signature lacks them."""
    return f"fof({name},{role},{_tptp(phi)})."


def render_term(t: SetTerm) -> str:
    """Infix rendering used for human-readable output and docs."""
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Empty):
        return "0"
    if isinstance(t, PowT):
        return f"Pow({render_term(t.arg)})"
    sym = {Union: " cup ", Inter: " cap ", Diff: " \\ "}[type(t)]

    def side(s):
        return render_term(s) if isinstance(s, (Var, Empty, PowT)) else f"({render_term(s)})"
    return side(t.left) + sym + side(t.right)
