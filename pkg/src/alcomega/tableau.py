"""Refutation tableau for ALCOI knowledge bases.

Completion graphs with nominal nodes (one per individual, never blocked) and
tree nodes created by the exists-rule.  Rules: and, or (semantic branching with
dependency-directed backjumping), exists, forall over roles and inverse roles,
lazy unfolding of absorbed axioms, merging for positive nominals, and pairwise
anywhere blocking.  Every label entry and edge carries the set of branch points
it depends on, so a clash that does not involve a choice skips its siblings.

Absorption keeps most axioms local:
  A [= D                     fires only on nodes labelled A;
  A and X [= D               becomes A [= not X or D;
  C1 or C2 [= D              splits into C1 [= D and C2 [= D;
  some R . C [= D            becomes C [= all inv(R) . D (on the node of o when C is {o});
  X [= D with no handle      is tried as not D [= not X before being internalised.
``some R . {o}`` on the right is satisfied by an edge to o, never a new node.

An open saturated branch is folded into a finite interpretation and re-checked
with the model checker before it is reported.
"""
from __future__ import annotations

import sys
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

from . import syntax as sx
from .search import BudgetExceeded
from .semantics import Interpretation, check_kb, check_query

QUERY_NOMINAL = "$q"
NO_DEPS: frozenset = frozenset()


def inverse(r: sx.Role) -> sx.Role:
    return sx.Role(r.name, inverted=not r.inverted)


def nnf(C: sx.Concept, negate: bool = False) -> sx.Concept:
    if isinstance(C, sx.Not):
        return nnf(C.arg, not negate)
    if isinstance(C, sx.Top):
        return sx.BOT if negate else C
    if isinstance(C, sx.Bot):
        return sx.TOP if negate else C
    if isinstance(C, (sx.Name, sx.Nominal)):
        return sx.Not(C) if negate else C
    if isinstance(C, sx.And):
        op = sx.Or if negate else sx.And
        return op(nnf(C.left, negate), nnf(C.right, negate))
    if isinstance(C, sx.Or):
        op = sx.And if negate else sx.Or
        return op(nnf(C.left, negate), nnf(C.right, negate))
    if isinstance(C, sx.Diff):
        return nnf(sx.And(C.left, sx.Not(C.right)), negate)
    if isinstance(C, (sx.Forall, sx.Exists)):
        if C.role.negated:
            raise sx.DialectError("negated roles are not supported by the tableau")
        flip = isinstance(C, sx.Forall) == negate
        op = sx.Exists if flip else sx.Forall
        return op(C.role, nnf(C.arg, negate))
    if isinstance(C, sx.Pow):
        raise sx.DialectError("translate Pow before running the tableau")
    raise TypeError(f"not a concept: {C!r}")


def _flatten(C, kind):
    if isinstance(C, kind):
        return _flatten(C.left, kind) + _flatten(C.right, kind)
    return [C]


@lru_cache(maxsize=None)
def _options(C: sx.Or) -> tuple:
    return tuple((D, nnf(D, negate=True)) for D in _flatten(C, sx.Or))


def _has_handle(C) -> bool:
    if isinstance(C, (sx.Name, sx.Exists, sx.Or, sx.Bot)):
        return True
    return isinstance(C, sx.And) and any(isinstance(p, (sx.Name, sx.Exists)) for p in _flatten(C, sx.And))


@dataclass
class Rules:
    positive: dict = field(default_factory=dict)  # name -> [concept]
    nominal: dict = field(default_factory=dict)  # individual -> [concept]
    universal: list = field(default_factory=list)

    def absorb(self, ax: sx.Inclusion):
        self._absorb(nnf(ax.sub), nnf(ax.sup), flipped=False)

    def _absorb(self, sub, sup, flipped):
        if isinstance(sub, sx.Bot) or isinstance(sup, sx.Top):
            return
        if isinstance(sub, sx.Top):
            self._add_universal(sup)
        elif isinstance(sub, sx.Or):
            for part in _flatten(sub, sx.Or):
                self._absorb(part, sup, flipped)
        elif isinstance(sub, sx.Name):
            self.positive.setdefault(sub.name, []).append(sup)
        elif isinstance(sub, sx.Exists):
            self._absorb_exists(sub, sup, flipped)
        elif isinstance(sub, sx.And) and _has_handle(sub):
            parts = _flatten(sub, sx.And)
            i = next((i for i, p in enumerate(parts) if isinstance(p, sx.Name)), None)
            if i is None:
                i = next(i for i, p in enumerate(parts) if isinstance(p, sx.Exists))
            rest = parts[:i] + parts[i + 1:]
            body = nnf(sx.Or(sx.Not(sx.conjunction(rest)), sup)) if rest else sup
            self._absorb(parts[i], body, flipped)
        elif not flipped and _has_handle(nnf(sup, negate=True)):
            self._absorb(nnf(sup, negate=True), nnf(sub, negate=True), flipped=True)
        else:
            self._add_universal(nnf(sx.Or(sx.Not(sub), sup)))

    def _absorb_exists(self, sub: sx.Exists, sup, flipped):
        body = sx.Forall(inverse(sub.role), sup)
        if isinstance(sub.arg, sx.Nominal):
            self.nominal.setdefault(sub.arg.individual, []).append(body)
        else:
            self._absorb(sub.arg, body, flipped)

    def _add_universal(self, C):
        if C not in self.universal:
            self.universal.append(C)


def _option_cost(D) -> int:
    # cheapest first: no new edges, then an edge to a nominal, then a new node
    if isinstance(D, sx.Exists):
        return 1 if isinstance(D.arg, sx.Nominal) else 2
    return 0


class _State:
    """Completion graph of one branch.  Edges are stored forward."""

    def __init__(self):
        self.labels: dict[int, dict] = {}
        self.out: dict[int, dict] = {}
        self.inc: dict[int, dict] = {}
        self.parent: dict[int, int | None] = {}
        self.nominal_of: dict[str, int] = {}
        self.is_nominal: set[int] = set()
        self.counter = 0
        self.alive: dict[int, None] = {}
        self.todo: deque = deque()
        self.clash: frozenset | None = None

    def copy(self) -> "_State":
        s = _State.__new__(_State)
        s.labels = {k: dict(v) for k, v in self.labels.items()}
        s.out = {k: {r: dict(m) for r, m in v.items()} for k, v in self.out.items()}
        s.inc = {k: {r: dict(m) for r, m in v.items()} for k, v in self.inc.items()}
        s.parent = dict(self.parent)
        s.nominal_of = dict(self.nominal_of)
        s.is_nominal = set(self.is_nominal)
        s.counter = self.counter
        s.alive = dict(self.alive)
        s.todo = deque(self.todo)
        s.clash = self.clash
        return s

    def neighbours(self, x, role: sx.Role) -> dict:
        table = self.inc if role.inverted else self.out
        return table[x].get(role.name, {})

    def edge_signature(self, p, x) -> frozenset:
        sig = {(r, False) for r, m in self.out[p].items() if x in m}
        sig |= {(r, True) for r, m in self.inc[p].items() if x in m}
        return frozenset(sig)


@dataclass
class TableauResult:
    entailed: bool | None  # None: the open branch did not survive the model check
    model: Interpretation | None = None
    nodes: int = 0
    branches: int = 0


class _Prover:
    def __init__(self, rules: Rules, max_nodes: int, max_branches: int):
        self.rules = rules
        self.max_nodes = max_nodes
        self.max_branches = max_branches
        self.branches = 0
        self.peak = 0

    # -- graph updates ---------------------------------------------------

    def new_node(self, s: _State, parent=None, nominal=False) -> int:
        x = s.counter
        s.counter += 1
        s.labels[x], s.out[x], s.inc[x] = {}, {}, {}
        s.parent[x] = parent
        s.alive[x] = None
        if nominal:
            s.is_nominal.add(x)
        else:
            self.peak = max(self.peak, len(s.alive))
            if len(s.alive) > self.max_nodes:
                raise BudgetExceeded(f"more than {self.max_nodes} nodes")
        for C in self.rules.universal:
            self.add(s, x, C, NO_DEPS)
        return x

    def node_of(self, s: _State, a: str) -> int:
        if a not in s.nominal_of:
            x = self.new_node(s, nominal=True)
            s.nominal_of[a] = x
            for C in self.rules.nominal.get(a, ()):
                self.add(s, x, C, NO_DEPS)
        return s.nominal_of[a]

    def add(self, s: _State, x, C, deps):
        lab = s.labels[x]
        if C in lab or s.clash is not None:
            return
        lab[C] = deps
        if isinstance(C, sx.Bot):
            s.clash = deps
        elif isinstance(C, sx.Not):
            if C.arg in lab:
                s.clash = deps | lab[C.arg]
            elif isinstance(C.arg, sx.Nominal) and s.nominal_of.get(C.arg.individual) == x:
                s.clash = deps
        elif sx.Not(C) in lab:
            s.clash = deps | lab[sx.Not(C)]
        s.todo.append((x, C))

    def add_edge(self, s: _State, x, role: sx.Role, y, deps):
        if role.inverted:
            x, y = y, x
        m = s.out[x].setdefault(role.name, {})
        if y in m:
            return
        m[y] = deps
        s.inc[y].setdefault(role.name, {})[x] = deps
        for C, d in list(s.labels[x].items()):
            if isinstance(C, sx.Forall) and C.role.name == role.name and not C.role.inverted:
                self.add(s, y, C.arg, d | deps)
        for C, d in list(s.labels[y].items()):
            if isinstance(C, sx.Forall) and C.role.name == role.name and C.role.inverted:
                self.add(s, x, C.arg, d | deps)

    def merge(self, s: _State, x, z, deps):
        """Merge node x into the nominal node z."""
        labels = s.labels.pop(x)
        out, inc = s.out.pop(x), s.inc.pop(x)
        del s.alive[x]
        for r, m in out.items():
            for y in m:
                if y != x:
                    del s.inc[y][r][x]
        for r, m in inc.items():
            for y in m:
                if y != x:
                    del s.out[y][r][x]
        for a, n in list(s.nominal_of.items()):
            if n == x:
                s.nominal_of[a] = z
        for c, p in s.parent.items():
            if p == x:
                s.parent[c] = z
        for C, d in labels.items():
            self.add(s, z, C, d | deps)
        for r, m in out.items():
            for y, d in m.items():
                self.add_edge(s, z, sx.Role(r), z if y == x else y, d | deps)
        for r, m in inc.items():
            for y, d in m.items():
                if y != x:
                    self.add_edge(s, y, sx.Role(r), z, d | deps)

    # -- deterministic rules ---------------------------------------------

    def saturate(self, s: _State) -> bool:
        while s.todo and s.clash is None:
            x, C = s.todo.popleft()
            if x not in s.alive or C not in s.labels[x]:
                continue
            d = s.labels[x][C]
            if isinstance(C, sx.And):
                self.add(s, x, C.left, d)
                self.add(s, x, C.right, d)
            elif isinstance(C, sx.Name):
                for D in self.rules.positive.get(C.name, ()):
                    self.add(s, x, D, d)
            elif isinstance(C, sx.Forall):
                for y, ed in list(s.neighbours(x, C.role).items()):
                    self.add(s, y, C.arg, d | ed)
            elif isinstance(C, sx.Exists) and isinstance(C.arg, sx.Nominal):
                self.add_edge(s, x, C.role, self.node_of(s, C.arg.individual), d)
            elif isinstance(C, sx.Nominal):
                z = self.node_of(s, C.individual)
                if z != x:
                    self.merge(s, x, z, d)
        return s.clash is None

    # -- search ----------------------------------------------------------

    def expand(self, s: _State):
        """(open saturated state, None) or (None, dependency set of the clash)."""
        while True:
            if not self.saturate(s):
                return None, s.clash
            pick = self._propagate_ors(s)
            if s.clash is not None:
                return None, s.clash
            if pick is not None:
                return self._branch(s, *pick)
            if not self._generate(s):
                return s, None

    def _branch(self, s: _State, x, C, deps):
        self.branches += 1
        if self.branches > self.max_branches:
            raise BudgetExceeded(f"more than {self.max_branches} branches")
        b = self.branches
        options = [D for D, _ in _options(C)]
        options.sort(key=_option_cost)
        refuted: list = []
        acc = deps
        for i, D in enumerate(options):
            h = s.copy()
            for E, ed in refuted:
                self.add(h, x, nnf(E, negate=True), ed)
            self.add(h, x, D, deps | {b})
            res, cd = self.expand(h)
            if res is not None:
                return res, None
            if b not in cd:
                return None, cd
            cd = cd - {b}
            refuted.append((D, cd | deps))
            acc = acc | cd
        return None, acc

    def _propagate_ors(self, s: _State):
        """Unit propagation over disjunctions.  Returns the open disjunction with
        the fewest live options as (node, concept, deps), or None."""
        while s.clash is None:
            best, best_size, progress = None, None, False
            for x in list(s.alive):
                if x not in s.alive:
                    continue
                lab = s.labels[x]
                for C, d in list(lab.items()):
                    if not isinstance(C, sx.Or):
                        continue
                    opts = _options(C)
                    if any(D in lab for D, _ in opts):
                        continue
                    live, why = [], d
                    for D, neg in opts:
                        if neg in lab:
                            why = why | lab[neg]
                        else:
                            live.append(D)
                    if not live:
                        s.clash = why
                        return None
                    if len(live) == 1:
                        self.add(s, x, live[0], why)
                        progress = True
                    elif best_size is None or len(live) < best_size:
                        best, best_size = (x, C, d), len(live)
            if not progress:
                return best
            if not self.saturate(s):
                return None
        return None

    def blocked(self, s: _State) -> dict:
        """Blocked tree nodes mapped to their blocker (None when an ancestor is blocked)."""
        status: dict = {}
        seen: dict = {}
        for x in sorted(s.alive):
            p = s.parent[x]
            if x in s.is_nominal or p is None:
                continue
            if p in status:
                status[x] = None
                continue
            key = (frozenset(s.labels[x]), frozenset(s.labels[p]), s.edge_signature(p, x))
            if key in seen:
                status[x] = seen[key]
            else:
                seen[key] = x
        return status

    def _generate(self, s: _State) -> bool:
        blocked = self.blocked(s)
        for x in sorted(s.alive):
            if x in blocked:
                continue
            for C, d in list(s.labels[x].items()):
                if not isinstance(C, sx.Exists) or isinstance(C.arg, sx.Nominal):
                    continue
                if any(C.arg in s.labels[y] for y in s.neighbours(x, C.role)):
                    continue
                y = self.new_node(s, parent=x)
                self.add(s, y, C.arg, d)
                self.add_edge(s, x, C.role, y, d)
                return True
        return False


def _fold(s: _State, prover: _Prover) -> Interpretation:
    blocked = prover.blocked(s)
    keep = [x for x in sorted(s.alive) if x not in blocked]
    rep = {x: x for x in keep}
    for x, b in blocked.items():
        if b is not None:
            rep[x] = b
    name = {x: f"t{x}" for x in keep}
    concepts: dict = {}
    roles: dict = {}
    for x in keep:
        for C in s.labels[x]:
            if isinstance(C, sx.Name):
                concepts.setdefault(C.name, set()).add(name[x])
    for x in keep:
        for r, m in s.out[x].items():
            for y in m:
                if y in rep:
                    roles.setdefault(r, set()).add((name[x], name[rep[y]]))
        for r, m in s.inc[x].items():
            for y in m:
                if y in rep and y not in keep:
                    roles.setdefault(r, set()).add((name[rep[y]], name[x]))
    return Interpretation(
        pool=tuple(name[x] for x in keep),
        concepts=concepts,
        roles=roles,
        individuals={a: name[x] for a, x in s.nominal_of.items()},
    )


def _negated_query(Ft):
    """(individual, concept) constraints that force Ft to fail."""
    if Ft is None:
        return []
    if isinstance(Ft, sx.Inclusion):
        return [(QUERY_NOMINAL, nnf(sx.And(Ft.sub, sx.Not(Ft.sup))))]
    if isinstance(Ft, sx.Assertion):
        return [(Ft.individual, nnf(sx.Not(Ft.concept)))]
    if isinstance(Ft, sx.RoleAssertion):
        return [(Ft.subject, sx.Forall(sx.Role(Ft.role), sx.Not(sx.Nominal(Ft.object))))]
    raise TypeError(f"not an ALCOI query: {Ft!r}")


def tableau_decide(Kt: sx.KnowledgeBase, Ft=None, max_nodes: int = 5000,
                   max_branches: int = 200_000) -> TableauResult:
    """Does Kt entail Ft?  With Ft None: is Kt inconsistent?"""
    if sx.infer_dialect(Kt.axioms) not in (sx.Dialect.ALCOI, sx.Dialect.ALC_OMEGA, sx.Dialect.LC_OMEGA):
        raise sx.DialectError("the tableau handles ALCOI input")
    rules = Rules()
    for ax in Kt.tbox:
        rules.absorb(ax)
    prover = _Prover(rules, max_nodes, max_branches)
    s = _State()
    inds = list(Kt.signature.individuals)
    if Ft is not None:
        inds += [a for a in sx.query_signature(Ft).individuals if a not in inds]
    for a in inds:
        prover.node_of(s, a)
    for ax in Kt.abox:
        if isinstance(ax, sx.Assertion):
            prover.add(s, s.nominal_of[ax.individual], nnf(ax.concept), NO_DEPS)
        elif isinstance(ax, sx.RoleAssertion):
            prover.add_edge(s, s.nominal_of[ax.subject], sx.Role(ax.role), s.nominal_of[ax.object], NO_DEPS)
        else:
            raise sx.DialectError(f"{type(ax).__name__} is not an ALCOI axiom")
    for a, C in _negated_query(Ft):
        prover.add(s, prover.node_of(s, a), C, NO_DEPS)
    if not s.alive:
        prover.node_of(s, QUERY_NOMINAL)

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 50_000))
    try:
        open_branch, _ = prover.expand(s)
    finally:
        sys.setrecursionlimit(limit)
    if open_branch is None:
        return TableauResult(True, None, prover.peak, prover.branches)
    J = _fold(open_branch, prover)
    ok = check_kb(J, Kt, allow_alcoi=True).satisfied
    if ok and Ft is not None:
        ok = not check_query(J, Ft, allow_alcoi=True)
    return TableauResult(False if ok else None, J if ok else None, prover.peak, prover.branches)
