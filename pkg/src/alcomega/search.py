"""Bounded finite-model search by SAT.

A model with ``n`` nodes is described by boolean variables for membership edges,
concept and role extensions, the node of each individual and the node
denoting each membership concept.  Concepts are encoded with one Tseitin
variable per (subconcept, node).  The same encoder handles ALCOI input (roles
may be inverted or negated, nominals allowed, no membership edges), which is
what the search over K^T uses.
"""
from __future__ import annotations

import random
import threading
from dataclasses import dataclass

from pysat.solvers import Solver

from . import syntax as sx
from .dltrans import TranslationOutput, check_query_names, collapse_model, translate_kb_T, translate_query_T
from .semantics import Interpretation, check_kb, check_query, validate_interpretation

SOLVER = "glucose4"


class BudgetExceeded(RuntimeError):
    pass


class SearchConfigError(ValueError):
    pass


class WitnessRejected(AssertionError):
    """A model produced by the solver failed the independent model checker."""


@dataclass(frozen=True)
class SearchConfig:
    max_domain: int = 6
    mode: str = "direct"  # direct | translated | both
    seed: int = 0
    time_budget: int | None = None  # milliseconds per solver call

    def __post_init__(self):
        if self.max_domain < 1:
            raise SearchConfigError("max_domain must be positive")
        if self.mode not in ("direct", "translated", "both"):
            raise SearchConfigError(f"unknown mode {self.mode!r}")


def required_nodes(K: sx.KnowledgeBase, F=None) -> int:
    axioms = list(K.axioms) + ([F] if F is not None else [])
    inds = set(K.signature.individuals) | set(sx.query_signature(F).individuals if F is not None else ())
    return len(inds) + len(sx.membership_concepts(axioms))


def check_bound(K, F, cfg: SearchConfig):
    need = required_nodes(K, F)
    if cfg.max_domain < need:
        raise SearchConfigError(
            f"max_domain {cfg.max_domain} is below {need} "
            "(individuals plus membership concepts); the search would be vacuous")


# ---------------------------------------------------------------------------
# CNF encoding


class _Encoder:
    def __init__(self, n: int, K_axioms, query, *, membership: bool, individuals, denoted,
                 distinct_pairs=(), rng=None):
        self.n = n
        self.nodes = range(n)
        self.top = 0
        self.clauses: list[list[int]] = []
        self.membership = membership
        self.true = self.new()
        self.add([self.true])
        sig = sx.signature(sx.KnowledgeBase.of(list(K_axioms) + ([query] if query is not None else [])))
        self.concept_names = sig.concepts
        self.role_names = sig.roles
        self.individuals = list(individuals)
        self.denoted = list(denoted)
        self.V = {A: [self.new() for _ in self.nodes] for A in self.concept_names}
        self.R = {r: [[self.new() for _ in self.nodes] for _ in self.nodes] for r in self.role_names}
        self.E = [[self.new() for _ in self.nodes] for _ in self.nodes] if membership else None
        self.Ind = {a: [self.new() for _ in self.nodes] for a in self.individuals}
        self.Den = {C: [self.new() for _ in self.nodes] for C in self.denoted}
        self.cache: dict = {}
        self._placement()
        for a, b in distinct_pairs:
            for x in self.nodes:
                self.add([-self.Ind[a][x], -self.Ind[b][x]])
        for ax in K_axioms:
            self.axiom(ax)
        if query is not None:
            self.negated(query)

    def new(self) -> int:
        self.top += 1
        return self.top

    def add(self, clause):
        self.clauses.append(list(clause))

    def exactly_one(self, lits):
        self.add(lits)
        for i in range(len(lits)):
            for j in range(i + 1, len(lits)):
                self.add([-lits[i], -lits[j]])

    def _placement(self):
        # item t (individuals first, then denoted concepts) sits on a node <= t:
        # any model can be relabelled by order of first use.
        items = [self.Ind[a] for a in self.individuals] + [self.Den[C] for C in self.denoted]
        for t, row in enumerate(items):
            self.exactly_one(row)
            for x in range(t + 1, self.n):
                self.add([-row[x]])
        if self.membership:
            for a in self.individuals:
                for x in self.nodes:
                    for y in self.nodes:
                        self.add([-self.Ind[a][x], -self.E[x][y]])
            for C in self.denoted:
                for x in self.nodes:
                    for a in self.individuals:
                        self.add([-self.Den[C][x], -self.Ind[a][x]])
                    for y in self.nodes:
                        c = self.lit(C, y)
                        self.add([-self.Den[C][x], -self.E[x][y], c])
                        self.add([-self.Den[C][x], self.E[x][y], -c])

    def rel(self, role: sx.Role, x: int, y: int) -> int:
        if role.name == sx.MEMBERSHIP_ROLE and self.membership:
            raise sx.DialectError("reserved role in direct search")
        if role.inverted:
            x, y = y, x
        v = self.R[role.name][x][y]
        return -v if role.negated else v

    def lit(self, C: sx.Concept, x: int) -> int:
        key = (C, x)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        out = self._lit(C, x)
        self.cache[key] = out
        return out

    def _lit(self, C, x) -> int:
        if isinstance(C, sx.Top):
            return self.true
        if isinstance(C, sx.Bot):
            return -self.true
        if isinstance(C, sx.Name):
            return self.V[C.name][x]
        if isinstance(C, sx.Not):
            return -self.lit(C.arg, x)
        if isinstance(C, sx.Nominal):
            return self.Ind[C.individual][x]
        if isinstance(C, (sx.And, sx.Or, sx.Diff)):
            a = self.lit(C.left, x)
            b = self.lit(C.right, x)
            if isinstance(C, sx.Diff):
                b = -b
            t = self.new()
            if isinstance(C, sx.Or):
                self.add([-t, a, b])
                self.add([t, -a])
                self.add([t, -b])
            else:
                self.add([-t, a])
                self.add([-t, b])
                self.add([t, -a, -b])
            return t
        if isinstance(C, (sx.Pow, sx.Forall)):
            t = self.new()
            witnesses = [t]
            for y in self.nodes:
                edge = self.E[x][y] if isinstance(C, sx.Pow) else self.rel(C.role, x, y)
                d = self.lit(C.arg, y)
                self.add([-t, -edge, d])
                w = self.new()
                self.add([-w, edge])
                self.add([-w, -d])
                witnesses.append(w)
            self.add(witnesses)
            return t
        if isinstance(C, sx.Exists):
            t = self.new()
            witnesses = [-t]
            for y in self.nodes:
                edge = self.rel(C.role, x, y)
                d = self.lit(C.arg, y)
                self.add([-edge, -d, t])
                w = self.new()
                self.add([-w, edge])
                self.add([-w, d])
                witnesses.append(w)
            self.add(witnesses)
            return t
        raise TypeError(f"not a concept: {C!r}")

    def _rel_name(self, name, x, y):
        return self.R[name][x][y]

    def axiom(self, ax):
        if isinstance(ax, sx.Inclusion):
            for x in self.nodes:
                self.add([-self.lit(ax.sub, x), self.lit(ax.sup, x)])
        elif isinstance(ax, sx.Assertion):
            for x in self.nodes:
                self.add([-self.Ind[ax.individual][x], self.lit(ax.concept, x)])
        elif isinstance(ax, sx.RoleAssertion):
            for x in self.nodes:
                for y in self.nodes:
                    self.add([-self.Ind[ax.subject][x], -self.Ind[ax.object][y], self._rel_name(ax.role, x, y)])
        elif isinstance(ax, sx.ConceptMembership):
            for x in self.nodes:
                self.add([-self.Den[ax.element][x], self.lit(ax.container, x)])
        elif isinstance(ax, sx.RoleMembership):
            for x in self.nodes:
                for y in self.nodes:
                    self.add([-self.Den[ax.first][x], -self.Den[ax.second][y], self._rel_name(ax.role, x, y)])
        else:
            raise TypeError(f"not an axiom: {ax!r}")

    def negated(self, F):
        if isinstance(F, sx.Inclusion):
            ws = []
            for x in self.nodes:
                w = self.new()
                self.add([-w, self.lit(F.sub, x)])
                self.add([-w, -self.lit(F.sup, x)])
                ws.append(w)
            self.add(ws)
        elif isinstance(F, sx.Assertion):
            for x in self.nodes:
                self.add([-self.Ind[F.individual][x], -self.lit(F.concept, x)])
        elif isinstance(F, sx.RoleAssertion):
            for x in self.nodes:
                for y in self.nodes:
                    self.add([-self.Ind[F.subject][x], -self.Ind[F.object][y], -self._rel_name(F.role, x, y)])
        elif isinstance(F, sx.ConceptMembership):
            for x in self.nodes:
                self.add([-self.Den[F.element][x], -self.lit(F.container, x)])
        elif isinstance(F, sx.RoleMembership):
            for x in self.nodes:
                for y in self.nodes:
                    self.add([-self.Den[F.first][x], -self.Den[F.second][y], -self._rel_name(F.role, x, y)])
        else:
            raise TypeError(f"not a query: {F!r}")

    # -- decoding -----------------------------------------------------------

    def decode(self, model: list[int], alcoi: bool) -> Interpretation:
        true = {v for v in model if v > 0}
        name = [f"n{x}" for x in self.nodes]
        inds = {a: name[next(x for x in self.nodes if self.Ind[a][x] in true)] for a in self.individuals}
        elems = {}
        if self.membership:
            elems = {name[x]: {name[y] for y in self.nodes if self.E[x][y] in true} for x in self.nodes}
        return Interpretation(
            pool=tuple(name),
            elems=elems,
            atoms=frozenset() if alcoi else frozenset(inds.values()),
            concepts={A: {name[x] for x in self.nodes if vs[x] in true} for A, vs in self.V.items()},
            roles={r: {(name[x], name[y]) for x in self.nodes for y in self.nodes if m[x][y] in true}
                   for r, m in self.R.items()},
            individuals=inds,
            denotations={C: name[next(x for x in self.nodes if self.Den[C][x] in true)] for C in self.denoted},
        )


def _solve(enc: _Encoder, seed: int, time_budget: int | None, random_phases: bool):
    clauses = enc.clauses
    rng = random.Random(seed)
    if seed:
        clauses = list(clauses)
        rng.shuffle(clauses)
    with Solver(name=SOLVER, bootstrap_with=clauses) as s:
        if random_phases:
            s.set_phases([v if rng.random() < 0.5 else -v for v in range(1, enc.top + 1)])
        if time_budget is None:
            ok = s.solve()
        else:
            timer = threading.Timer(time_budget / 1000.0, s.interrupt)
            timer.start()
            try:
                ok = s.solve_limited(expect_interrupt=True)
            finally:
                timer.cancel()
            if ok is None:
                raise BudgetExceeded(f"solver exceeded {time_budget} ms")
        return s.get_model() if ok else None


# ---------------------------------------------------------------------------
# Direct search


def _direct_encoder(K, F, n):
    axioms = list(K.axioms)
    denoted = sx.membership_concepts(axioms + ([F] if F is not None else []))
    inds = list(K.signature.individuals)
    if F is not None:
        inds += [a for a in sx.query_signature(F).individuals if a not in inds]
    return _Encoder(n, axioms, F, membership=True, individuals=inds, denoted=denoted)


def search_direct(K: sx.KnowledgeBase, F, n: int, seed: int = 0, time_budget=None,
                  random_phases: bool = False) -> Interpretation | None:
    """A model of K with exactly n nodes falsifying F (or just a model when F is None)."""
    enc = _direct_encoder(K, F, n)
    model = _solve(enc, seed, time_budget, random_phases)
    return None if model is None else enc.decode(model, alcoi=False)


def _verify_direct(I, K, F):
    problems = validate_interpretation(I)
    report = check_kb(I, K)
    if problems or not report.satisfied or (F is not None and check_query(I, F)):
        raise WitnessRejected(f"direct search produced a bad model: {problems or report.failures()}")
    return I


def find_direct(K, F, cfg: SearchConfig, random_phases: bool = False) -> Interpretation | None:
    """Smallest countermodel up to cfg.max_domain.

    Models of ALC^Omega KBs stay models when a node is duplicated (a copy joins
    every set its original belongs to), so one call at max_domain settles
    existence; smaller sizes are tried only to shrink the witness.
    """
    check_bound(K, F, cfg)
    top = search_direct(K, F, cfg.max_domain, cfg.seed, cfg.time_budget, random_phases)
    if top is None:
        return None
    for n in range(max(1, required_nodes(K, F)), cfg.max_domain):
        I = search_direct(K, F, n, cfg.seed, cfg.time_budget, random_phases)
        if I is not None:
            return _verify_direct(I, K, F)
    return _verify_direct(top, K, F)


# ---------------------------------------------------------------------------
# Search on the ALCOI translation


def search_alcoi(Kt: sx.KnowledgeBase, Ft, n: int, distinct_pairs=(), seed: int = 0,
                 time_budget=None, random_phases: bool = False) -> Interpretation | None:
    inds = list(Kt.signature.individuals)
    if Ft is not None:
        inds += [a for a in sx.query_signature(Ft).individuals if a not in inds]
    enc = _Encoder(n, list(Kt.axioms), Ft, membership=False, individuals=inds, denoted=(),
                   distinct_pairs=distinct_pairs)
    model = _solve(enc, seed, time_budget, random_phases)
    return None if model is None else enc.decode(model, alcoi=True)


def concept_individual_pairs(ctx: TranslationOutput):
    standard = ctx.source.signature.individuals if ctx.source is not None else ()
    return [(a, e) for a in standard for e in ctx.concept_individuals.values()]


def find_translated(K, F, cfg: SearchConfig, random_phases: bool = False,
                    ctx: TranslationOutput | None = None) -> tuple[Interpretation, Interpretation] | None:
    """Countermodel via K^T: search an ALCOI model, then collapse it.

    Returns (collapsed model of K, ALCOI model of K^T) or None.  Standard
    individuals are kept apart from concept individuals; see collapse_model.
    """
    check_bound(K, F, cfg)
    ctx = ctx or translate_kb_T(K, F)
    Ft = translate_query_T(F, ctx) if F is not None else None
    pairs = concept_individual_pairs(ctx)
    for n in range(max(1, required_nodes(K, F)), cfg.max_domain + 1):
        J = search_alcoi(ctx.kb, Ft, n, pairs, cfg.seed, cfg.time_budget, random_phases)
        if J is None:
            continue
        if not check_kb(J, ctx.kb, allow_alcoi=True).satisfied or (Ft is not None and check_query(J, Ft, True)):
            raise WitnessRejected("translated search produced a bad ALCOI model")
        I, _ = collapse_model(J, ctx)
        return _verify_direct(I, K, F), J
    return None


def find_countermodel(K: sx.KnowledgeBase, F, cfg: SearchConfig = SearchConfig()) -> Interpretation | None:
    check_query_names(K, F)
    if cfg.mode == "translated":
        found = find_translated(K, F, cfg)
        return found[0] if found else None
    return find_direct(K, F, cfg)


def sample_model(K: sx.KnowledgeBase, n: int, seed: int, F=None) -> Interpretation | None:
    """A pseudo-random model of K with n nodes (random solver phases)."""
    I = search_direct(K, F, n, seed=seed, random_phases=True)
    return None if I is None else _verify_direct(I, K, F)
