"""Finite interpretations of ALC^Omega over transitive membership-graph domains."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .syntax import (
    And, Assertion, Bot, Concept, ConceptMembership, DialectError, Diff, Exists, Forall,
    Inclusion, KnowledgeBase, Name, Nominal, Not, Or, Pow, Role, RoleAssertion, RoleMembership,
    Top, parse_concept, render,
)


class MissingDenotation(LookupError):
    def __init__(self, concept: Concept, reason: str = "no denoting node"):
        self.concept = concept
        super().__init__(f"{render(concept)}: {reason}")


class UnknownIndividual(KeyError):
    pass


def _freeze_map(m: Mapping | None, conv) -> dict:
    return {k: conv(v) for k, v in (m or {}).items()}


@dataclass(frozen=True, eq=False)
class Interpretation:
    """Domain ``pool`` plus the membership graph ``elems`` (node -> its elements).

    ``denotations`` names, for selected concepts C, the node whose elements are
    exactly C's extension; membership axioms are checked through it.
    """

    pool: tuple
    elems: Mapping = field(default_factory=dict)
    atoms: frozenset = frozenset()
    concepts: Mapping = field(default_factory=dict)
    roles: Mapping = field(default_factory=dict)
    individuals: Mapping = field(default_factory=dict)
    denotations: Mapping = field(default_factory=dict)
    _succ: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "pool", tuple(dict.fromkeys(self.pool)))
        elems = {n: frozenset() for n in self.pool}
        elems.update(_freeze_map(self.elems, frozenset))
        set_(self, "elems", elems)
        set_(self, "atoms", frozenset(self.atoms))
        set_(self, "concepts", _freeze_map(self.concepts, frozenset))
        set_(self, "roles", _freeze_map(self.roles, lambda ps: frozenset(map(tuple, ps))))
        set_(self, "individuals", dict(self.individuals))
        set_(self, "denotations", dict(self.denotations))

    def __eq__(self, other):
        if not isinstance(other, Interpretation):
            return NotImplemented
        return (set(self.pool) == set(other.pool) and self.elems == other.elems
                and self.atoms == other.atoms and _nonempty(self.concepts) == _nonempty(other.concepts)
                and _nonempty(self.roles) == _nonempty(other.roles)
                and self.individuals == other.individuals and self.denotations == other.denotations)

    __hash__ = None

    @property
    def domain(self) -> frozenset:
        return frozenset(self.pool)

    def __len__(self):
        return len(self.pool)

    def role_successors(self, role: Role) -> dict:
        key = (role.name, role.inverted, role.negated)
        if key not in self._succ:
            succ = {n: set() for n in self.pool}
            for x, y in self.roles.get(role.name, ()):
                if role.inverted:
                    x, y = y, x
                succ[x].add(y)
            if role.negated:
                everything = set(self.pool)
                succ = {n: everything - s for n, s in succ.items()}
            self._succ[key] = {n: frozenset(s) for n, s in succ.items()}
        return self._succ[key]

    def replace(self, **changes) -> "Interpretation":
        data = {k: getattr(self, k) for k in
                ("pool", "elems", "atoms", "concepts", "roles", "individuals", "denotations")}
        data.update(changes)
        return Interpretation(**data)


def _nonempty(m: Mapping) -> dict:
    return {k: v for k, v in m.items() if v}


# ---------------------------------------------------------------------------
# Evaluation


def eval_concept(I: Interpretation, C: Concept, allow_alcoi: bool = False,
                 cache: dict | None = None) -> frozenset:
    """Extension of C in I.  Nominals and inverse/negated roles need ``allow_alcoi``."""
    cache = {} if cache is None else cache
    return _eval(I, C, allow_alcoi, cache)


def _eval(I, C, alcoi, cache) -> frozenset:
    hit = cache.get(C)
    if hit is not None:
        return hit
    pool = I.domain
    if isinstance(C, Top):
        out = pool
    elif isinstance(C, Bot):
        out = frozenset()
    elif isinstance(C, Name):
        out = I.concepts.get(C.name, frozenset())
    elif isinstance(C, Not):
        out = pool - _eval(I, C.arg, alcoi, cache)
    elif isinstance(C, And):
        out = _eval(I, C.left, alcoi, cache) & _eval(I, C.right, alcoi, cache)
    elif isinstance(C, Or):
        out = _eval(I, C.left, alcoi, cache) | _eval(I, C.right, alcoi, cache)
    elif isinstance(C, Diff):
        out = _eval(I, C.left, alcoi, cache) - _eval(I, C.right, alcoi, cache)
    elif isinstance(C, Pow):
        inner = _eval(I, C.arg, alcoi, cache)
        out = frozenset(x for x in I.pool if I.elems[x] <= inner)
    elif isinstance(C, (Forall, Exists)):
        if (C.role.inverted or C.role.negated) and not alcoi:
            raise DialectError(f"role {C.role} outside ALC^Omega")
        inner = _eval(I, C.arg, alcoi, cache)
        succ = I.role_successors(C.role)
        if isinstance(C, Forall):
            out = frozenset(x for x in I.pool if succ[x] <= inner)
        else:
            out = frozenset(x for x in I.pool if succ[x] & inner)
    elif isinstance(C, Nominal):
        if not alcoi:
            raise DialectError("nominals are outside ALC^Omega")
        if C.individual not in I.individuals:
            raise UnknownIndividual(C.individual)
        out = frozenset({I.individuals[C.individual]})
    else:
        raise TypeError(f"not a concept: {C!r}")
    cache[C] = out
    return out


# ---------------------------------------------------------------------------
# Model checking


@dataclass(frozen=True)
class Verdict:
    axiom: object
    kind: str  # satisfied | violated | missing-denotation | denotation-mismatch
    witnesses: tuple = ()

    @property
    def ok(self) -> bool:
        return self.kind == "satisfied"


@dataclass(frozen=True)
class CheckReport:
    verdicts: tuple

    @property
    def satisfied(self) -> bool:
        return all(v.ok for v in self.verdicts)

    def __bool__(self):
        return self.satisfied

    def failures(self) -> list[Verdict]:
        return [v for v in self.verdicts if not v.ok]


def _individual(I, a):
    try:
        return I.individuals[a]
    except KeyError:
        raise UnknownIndividual(a) from None


def _denotation(I, C, alcoi, cache):
    node = I.denotations.get(C)
    if node is None:
        return None, "missing-denotation", ()
    ext = _eval(I, C, alcoi, cache)
    if I.elems.get(node) != ext:
        diff = (I.elems.get(node, frozenset()) ^ ext)
        return None, "denotation-mismatch", tuple(sorted(map(str, diff)))
    return node, None, ()


def check_axiom(I: Interpretation, ax, allow_alcoi: bool = False, cache: dict | None = None) -> Verdict:
    cache = {} if cache is None else cache
    ev = lambda c: _eval(I, c, allow_alcoi, cache)  # noqa: E731
    if isinstance(ax, Inclusion):
        bad = ev(ax.sub) - ev(ax.sup)
        return Verdict(ax, "violated", tuple(sorted(map(str, bad)))) if bad else Verdict(ax, "satisfied")
    if isinstance(ax, Assertion):
        node = _individual(I, ax.individual)
        return Verdict(ax, "satisfied" if node in ev(ax.concept) else "violated", (node,))
    if isinstance(ax, RoleAssertion):
        pair = (_individual(I, ax.subject), _individual(I, ax.object))
        ok = pair in I.roles.get(ax.role, ())
        return Verdict(ax, "satisfied" if ok else "violated", pair)
    if isinstance(ax, ConceptMembership):
        node, problem, wit = _denotation(I, ax.element, allow_alcoi, cache)
        if problem:
            return Verdict(ax, problem, wit)
        return Verdict(ax, "satisfied" if node in ev(ax.container) else "violated", (node,))
    if isinstance(ax, RoleMembership):
        n1, problem, wit = _denotation(I, ax.first, allow_alcoi, cache)
        if problem:
            return Verdict(ax, problem, wit)
        n2, problem, wit = _denotation(I, ax.second, allow_alcoi, cache)
        if problem:
            return Verdict(ax, problem, wit)
        ok = (n1, n2) in I.roles.get(ax.role, ())
        return Verdict(ax, "satisfied" if ok else "violated", (n1, n2))
    raise TypeError(f"not an axiom: {ax!r}")


def check_kb(I: Interpretation, K: KnowledgeBase | Iterable, allow_alcoi: bool = False) -> CheckReport:
    axioms = K.axioms if isinstance(K, KnowledgeBase) else tuple(K)
    cache: dict = {}
    return CheckReport(tuple(check_axiom(I, ax, allow_alcoi, cache) for ax in axioms))


def check_query(I: Interpretation, F, allow_alcoi: bool = False) -> bool:
    """Whether I satisfies the query F; a membership query whose left-hand
    concept has no coherent denotation raises MissingDenotation."""
    v = check_axiom(I, F, allow_alcoi)
    if v.kind in ("missing-denotation", "denotation-mismatch"):
        concept = F.element if isinstance(F, ConceptMembership) else F.first
        raise MissingDenotation(concept, v.kind)
    return v.ok


@dataclass(frozen=True)
class Violation:
    kind: str
    subject: object


def validate_interpretation(I: Interpretation, alcoi: bool = False) -> list[Violation]:
    """Structural invariants; returns violations rather than raising."""
    out: list[Violation] = []
    pool = I.domain
    if not pool:
        out.append(Violation("EmptyDomain", None))
    for n, es in I.elems.items():
        if n not in pool:
            out.append(Violation("NodeNotInPool", n))
        if not es <= pool:
            out.append(Violation("NotTransitive", n))
    for a in sorted(I.atoms, key=str):
        if a not in pool:
            out.append(Violation("AtomNotInPool", a))
        elif I.elems[a]:
            out.append(Violation("AtomNotEmpty", a))
    for name, ext in I.concepts.items():
        if not ext <= pool:
            out.append(Violation("ConceptOutsidePool", name))
    for name, pairs in I.roles.items():
        if any(x not in pool or y not in pool for x, y in pairs):
            out.append(Violation("RoleOutsidePool", name))
    for a, node in I.individuals.items():
        if node not in pool:
            out.append(Violation("IndividualOutsidePool", a))
        elif not alcoi and node not in I.atoms:
            out.append(Violation("IndividualNotAtom", a))
    cache: dict = {}
    for C, node in I.denotations.items():
        if node not in pool:
            out.append(Violation("DenotationOutsidePool", C))
            continue
        if node in I.atoms:
            out.append(Violation("DenotationIsAtom", C))
        try:
            ext = _eval(I, C, alcoi, cache)
        except (DialectError, UnknownIndividual):
            out.append(Violation("DenotationUnevaluable", C))
            continue
        if I.elems[node] != ext:
            out.append(Violation("DenotationMismatch", C))
    return out


# ---------------------------------------------------------------------------
# JSON model files


def _sorted(nodes):
    return sorted(nodes, key=str)


def to_json(I: Interpretation) -> dict:
    return {
        "atoms": _sorted(I.atoms),
        "nodes": list(I.pool),
        "elems": {n: _sorted(I.elems[n]) for n in I.pool},
        "concepts": {k: _sorted(v) for k, v in sorted(I.concepts.items())},
        "roles": {k: sorted([list(p) for p in v], key=lambda p: (str(p[0]), str(p[1])))
                  for k, v in sorted(I.roles.items())},
        "individuals": dict(sorted(I.individuals.items())),
        "denotations": {render(C): n for C, n in sorted(I.denotations.items(), key=lambda kv: render(kv[0]))},
    }


def from_json(data: Mapping) -> Interpretation:
    s = str
    return Interpretation(
        pool=tuple(s(n) for n in data.get("nodes", ())),
        elems={s(n): frozenset(s(m) for m in ms) for n, ms in data.get("elems", {}).items()},
        atoms=frozenset(s(a) for a in data.get("atoms", ())),
        concepts={k: frozenset(s(n) for n in v) for k, v in data.get("concepts", {}).items()},
        roles={k: frozenset((s(x), s(y)) for x, y in v) for k, v in data.get("roles", {}).items()},
        individuals={k: s(v) for k, v in data.get("individuals", {}).items()},
        denotations={parse_concept(k, allow_reserved=True): s(v)
                     for k, v in data.get("denotations", {}).items()},
    )


def dump_model(I: Interpretation) -> str:
    return json.dumps(to_json(I), indent=2, sort_keys=False) + "\n"


def load_model(text: str) -> Interpretation:
    return from_json(json.loads(text))
