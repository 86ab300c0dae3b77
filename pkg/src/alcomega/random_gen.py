"""Seeded random knowledge bases, queries, models and membership graphs."""
from __future__ import annotations

import random
from dataclasses import dataclass

from . import syntax as sx
from .hypersets import MembershipGraph
from .search import required_nodes, sample_model

CONCEPT_POOL = ("A", "B", "C")
ROLE = "r"
INDIVIDUAL_POOL = ("a", "b")


@dataclass(frozen=True)
class CorpusShape:
    max_concepts: int = 3
    max_roles: int = 1
    max_memberships: int = 2
    max_inclusions: int = 2
    max_assertions: int = 2
    depth: int = 2


def random_concept(rng: random.Random, names, roles, depth: int, allow_pow: bool = True) -> sx.Concept:
    leaves = [sx.Name(n) for n in names] or [sx.TOP]
    if depth <= 0 or rng.random() < 0.3:
        pick = rng.random()
        if pick < 0.1:
            return sx.TOP
        if pick < 0.15:
            return sx.BOT
        return rng.choice(leaves)
    ops = ["not", "and", "or", "diff"] + (["pow"] if allow_pow else []) + (["all", "some"] if roles else [])
    op = rng.choice(ops)
    sub = lambda: random_concept(rng, names, roles, depth - 1, allow_pow)  # noqa: E731
    if op == "not":
        return sx.Not(sub())
    if op == "pow":
        return sx.Pow(sub())
    if op in ("all", "some"):
        cls = sx.Forall if op == "all" else sx.Exists
        return cls(sx.Role(rng.choice(roles)), sub())
    cls = {"and": sx.And, "or": sx.Or, "diff": sx.Diff}[op]
    return cls(sub(), sub())


def random_kb(seed: int, shape: CorpusShape = CorpusShape()) -> sx.KnowledgeBase:
    rng = random.Random(seed)
    names = list(CONCEPT_POOL[:rng.randint(1, shape.max_concepts)])
    roles = [ROLE] if shape.max_roles and rng.random() < 0.6 else []
    inds = list(INDIVIDUAL_POOL[:rng.randint(0, len(INDIVIDUAL_POOL))])
    concept = lambda: random_concept(rng, names, roles, shape.depth)  # noqa: E731
    axioms: list = []
    for _ in range(rng.randint(1, shape.max_inclusions)):
        axioms.append(sx.Inclusion(concept(), concept()))
    for _ in range(rng.randint(0, shape.max_memberships)):
        if roles and rng.random() < 0.25:
            axioms.append(sx.RoleMembership(concept(), concept(), rng.choice(roles)))
        else:
            axioms.append(sx.ConceptMembership(concept(), concept()))
    for a in inds:
        for _ in range(rng.randint(0, shape.max_assertions)):
            axioms.append(sx.Assertion(concept(), a))
    if roles and inds and rng.random() < 0.5:
        axioms.append(sx.RoleAssertion(ROLE, rng.choice(inds), rng.choice(inds)))
    return sx.KnowledgeBase.of(axioms)


def random_query(seed: int, K: sx.KnowledgeBase, depth: int = 2):
    rng = random.Random(seed)
    sig = K.signature
    names, roles, inds = list(sig.concepts), list(sig.roles), list(sig.individuals)
    concept = lambda: random_concept(rng, names, roles, depth)  # noqa: E731
    kinds = ["inclusion", "membership"] + (["assertion"] if inds else [])
    kind = rng.choice(kinds)
    if kind == "inclusion":
        return sx.Inclusion(concept(), concept())
    if kind == "assertion":
        return sx.Assertion(concept(), rng.choice(inds))
    return sx.ConceptMembership(concept(), concept())


def random_model(K: sx.KnowledgeBase, seed: int, max_size: int = 5, F=None):
    """A model of K with at most max_size nodes, or None if none was found."""
    rng = random.Random(seed)
    lo = max(1, required_nodes(K, F))
    if lo > max_size:
        return None
    sizes = list(range(lo, max_size + 1))
    rng.shuffle(sizes)
    for n in sizes:
        I = sample_model(K, n, seed=rng.randrange(1 << 30), F=F)
        if I is not None:
            return I
    return None


def random_graph(seed: int, max_nodes: int = 8, atom_rate: float = 0.25) -> MembershipGraph:
    rng = random.Random(seed)
    n = rng.randint(1, max_nodes)
    nodes = list(range(n))
    atoms = {}
    for v in nodes:
        if rng.random() < atom_rate:
            atoms[v] = f"at{len(atoms)}"
    density = rng.uniform(0.1, 0.5)
    edges = {(x, y) for x in nodes if x not in atoms for y in nodes if rng.random() < density}
    return MembershipGraph(tuple(nodes), edges, atoms)


def corpus(count: int, seed: int = 0, shape: CorpusShape = CorpusShape()):
    """``count`` (kb_seed, K) pairs; KBs are independent of ``count``."""
    return [(seed * 100_003 + i, random_kb(seed * 100_003 + i, shape)) for i in range(count)]
