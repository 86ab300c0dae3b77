"""Finite hypersets as membership graphs.

An edge ``x -> y`` means ``y`` is an element of ``x``.  Atoms (urelements) are
edge-less nodes carrying a label; tags are opaque labels that keep otherwise
bisimilar nodes apart, which is how non-extensional duplicates are modelled.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping

Node = Hashable


class UndeclaredVariable(ValueError):
    pass


class UnknownNode(KeyError):
    pass


class AtomWithSuccessors(ValueError):
    pass


def node_key(n) -> tuple:
    """Sort key for heterogeneous node ids: ints before strings."""
    return (not isinstance(n, int), n if isinstance(n, int) else str(n))


@dataclass(frozen=True)
class MembershipGraph:
    nodes: tuple
    edges: frozenset
    atoms: Mapping = field(default_factory=dict)
    tags: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(sorted(set(self.nodes), key=node_key)))
        object.__setattr__(self, "edges", frozenset(self.edges))
        object.__setattr__(self, "atoms", dict(self.atoms))
        object.__setattr__(self, "tags", dict(self.tags))
        known = set(self.nodes)
        for x, y in self.edges:
            if x not in known or y not in known:
                raise UnknownNode((x, y))
            if x in self.atoms:
                raise AtomWithSuccessors(x)
        labels = list(self.atoms.values())
        if len(set(labels)) != len(labels):
            raise ValueError("atom labels must be injective")

    def __hash__(self):
        return hash((self.nodes, self.edges))

    @cached_property
    def successors(self) -> dict:
        succ = {n: set() for n in self.nodes}
        for x, y in self.edges:
            succ[x].add(y)
        return {n: frozenset(s) for n, s in succ.items()}

    def elements(self, n) -> frozenset:
        try:
            return self.successors[n]
        except KeyError:
            raise UnknownNode(n) from None

    def label(self, n) -> str:
        return str(self.atoms.get(n, n))


@dataclass(frozen=True)
class Bisimulation:
    partition: dict

    def classes(self) -> list[list]:
        groups: dict[int, list] = {}
        for n, c in self.partition.items():
            groups.setdefault(c, []).append(n)
        return [sorted(groups[c], key=node_key) for c in sorted(groups)]

    def is_identity(self) -> bool:
        return len(set(self.partition.values())) == len(self.partition)


@dataclass(frozen=True)
class Atom:
    label: str


@dataclass
class EquationSystem:
    variables: list
    rhs: dict

    def __post_init__(self):
        declared = set(self.variables)
        for v in self.variables:
            self.rhs.setdefault(v, [])
        for v, items in self.rhs.items():
            if v not in declared:
                raise UndeclaredVariable(v)
            for item in items:
                if not isinstance(item, Atom) and item not in declared:
                    raise UndeclaredVariable(item)

    @property
    def atom_labels(self) -> list[str]:
        seen: dict[str, None] = {}
        for v in self.variables:
            for item in self.rhs[v]:
                if isinstance(item, Atom):
                    seen.setdefault(item.label)
        return list(seen)

    @property
    def well_founded(self) -> bool:
        """True iff the variable dependency graph is acyclic (an HF^0 system)."""
        deps = {v: [i for i in self.rhs[v] if not isinstance(i, Atom)] for v in self.variables}
        return _acyclic(self.variables, deps)


def _acyclic(nodes: Iterable, succ: Mapping) -> bool:
    WHITE, GREY, BLACK = 0, 1, 2
    color = {n: WHITE for n in nodes}
    for root in color:
        if color[root] != WHITE:
            continue
        stack = [(root, iter(succ.get(root, ())))]
        color[root] = GREY
        while stack:
            n, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[n] = BLACK
                stack.pop()
            elif color[nxt] == GREY:
                return False
            elif color[nxt] == WHITE:
                color[nxt] = GREY
                stack.append((nxt, iter(succ.get(nxt, ()))))
    return True


def is_well_founded(g: MembershipGraph) -> bool:
    return _acyclic(g.nodes, g.successors)


_EQ_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*\{(.*)\}\s*;?\s*$")


def parse_equations(text: str) -> EquationSystem:
    """Parse ``var = { item, ... }`` lines; quoted items such as ``'a0'`` are atoms."""
    variables: list[str] = []
    rhs: dict[str, list] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _EQ_LINE.match(line)
        if m is None:
            raise ValueError(f"line {lineno}: expected 'var = {{ item, ... }}'")
        var, body = m.group(1), m.group(2).strip()
        if var in rhs:
            raise ValueError(f"line {lineno}: variable {var!r} defined twice")
        items = []
        for part in filter(None, (p.strip() for p in body.split(","))):
            if len(part) >= 2 and part[0] == part[-1] and part[0] in "'\"":
                items.append(Atom(part[1:-1]))
            elif re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", part):
                items.append(part)
            else:
                raise ValueError(f"line {lineno}: bad item {part!r}")
        variables.append(var)
        rhs[var] = items
    return EquationSystem(variables, rhs)


def bisimulation_partition(g: MembershipGraph) -> Bisimulation:
    """Coarsest bisimulation respecting atom labels and tags (partition refinement)."""
    block = {n: (g.atoms.get(n), g.tags.get(n)) for n in g.nodes}
    ids = _number(block, g.nodes)
    while True:
        sig = {n: (ids[n], frozenset(ids[m] for m in g.successors[n])) for n in g.nodes}
        new_ids = _number(sig, g.nodes)
        if len(set(new_ids.values())) == len(set(ids.values())):
            return Bisimulation(new_ids)
        ids = new_ids


def _number(keys: Mapping, nodes: Iterable) -> dict:
    # class numbering follows the smallest member in node order
    first: dict = {}
    out = {}
    for n in sorted(nodes, key=node_key):
        k = keys[n]
        if k not in first:
            first[k] = len(first)
        out[n] = first[k]
    return out


def quotient(g: MembershipGraph, bis: Bisimulation | None = None) -> tuple[MembershipGraph, dict]:
    """Merge bisimilar nodes; each class is represented by its smallest member."""
    bis = bis or bisimulation_partition(g)
    rep = {}
    for cls in bis.classes():
        for n in cls:
            rep[n] = cls[0]
    nodes = set(rep.values())
    edges = {(rep[x], rep[y]) for x, y in g.edges}
    atoms = {n: lab for n, lab in g.atoms.items() if n in nodes}
    tags = {n: t for n, t in g.tags.items() if n in nodes}
    return MembershipGraph(tuple(nodes), edges, atoms, tags), rep


def solve_equations(sys: EquationSystem, keep_duplicates: bool = False) -> tuple[MembershipGraph, dict]:
    """Solve a finite system of set equations in HF^{1/2}(A).

    Returns the solution graph and the node assigned to every variable.  Unless
    ``keep_duplicates`` is set, bisimilar variables share one node.
    """
    labels = sys.atom_labels
    clash = set(labels) & set(sys.variables)
    if clash:
        raise ValueError(f"names used both as variable and atom: {sorted(clash)}")
    nodes = list(sys.variables) + labels
    edges = set()
    for v in sys.variables:
        for item in sys.rhs[v]:
            edges.add((v, item.label if isinstance(item, Atom) else item))
    g = MembershipGraph(tuple(nodes), edges, {lab: lab for lab in labels})
    mapping = {v: v for v in sys.variables}
    if keep_duplicates:
        return g, mapping
    q, rep = quotient(g)
    return q, {v: rep[v] for v in sys.variables}


def transitive_closure(g: MembershipGraph, n) -> frozenset:
    """Least set containing the elements of ``n`` and closed under elements."""
    if n not in g.successors:
        raise UnknownNode(n)
    seen: set = set()
    todo = deque(g.successors[n])
    while todo:
        m = todo.popleft()
        if m in seen:
            continue
        seen.add(m)
        todo.extend(g.successors[m] - seen)
    return frozenset(seen)


def is_transitive(g: MembershipGraph, universe: Iterable) -> bool:
    universe = set(universe)
    for n in universe:
        if not g.elements(n) <= universe:
            return False
    return True


def mostowski_collapse(domain: Iterable, e_edges: Iterable, atom_pick: Iterable,
                       dup_policy: bool = True) -> tuple[MembershipGraph, dict]:
    """Collapse an e-graph into hypersets: M(d) = {M(d') : (d, d') in e_edges}.

    Nodes in ``atom_pick`` become fresh atoms ``a0, a1, ...`` (numbered in node
    order).  With ``dup_policy`` on, extensionally equal nodes are tagged apart so
    that M is injective; otherwise bisimilar nodes are merged.
    """
    domain = sorted(set(domain), key=node_key)
    e_edges = set(e_edges)
    atom_pick = set(atom_pick)
    sources = {x for x, _ in e_edges}
    for d in sorted(atom_pick, key=node_key):
        if d in sources:
            raise AtomWithSuccessors(d)
    atoms = {d: f"a{i}" for i, d in enumerate(d for d in domain if d in atom_pick)}
    g = MembershipGraph(tuple(domain), e_edges, atoms)
    if not dup_policy:
        q, rep = quotient(g)
        return q, rep
    tags = {}
    for cls in bisimulation_partition(g).classes():
        if len(cls) > 1:
            for i, d in enumerate(cls):
                tags[d] = i
    tagged = MembershipGraph(g.nodes, g.edges, g.atoms, tags)
    return tagged, {d: d for d in domain}


def to_dot(g: MembershipGraph, name: str = "G", point=None) -> str:
    lines = [f"digraph {name} {{"]
    for n in g.nodes:
        label = g.label(n)
        if n in g.tags:
            label += f" #{g.tags[n]}"
        attrs = [f'label="{label}"']
        if n in g.atoms:
            attrs.append("shape=box")
        if point is not None and n == point:
            attrs.append("style=filled")
        lines.append(f'  "{n}" [{", ".join(attrs)}];')
    for x, y in sorted(g.edges, key=lambda e: (node_key(e[0]), node_key(e[1]))):
        lines.append(f'  "{x}" -> "{y}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
