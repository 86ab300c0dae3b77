"""Abstract syntax, concrete-syntax parser and printer for ALC^Omega knowledge bases.

The same AST covers four dialects: ALC^Omega, its role-free fragment LC^Omega,
ALCOI (inverse roles and nominals, used as translation target) and ALC(neg)
(one negated role).  Concrete syntax::

    RedListSpecies [= Pow(CannotHunt).
    Eagle(harry).
    Eagle in RedListSpecies.
    (PolarCreature and Bear, Eagle) in moreEndangered.

Prefix operators (``not``, ``Pow``, ``all R .``, ``some R .``) bind tightest,
then ``\\``, then ``and``, then ``or``.  All binary operators associate left.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Union

RESERVED_PREFIX = "$"
MEMBERSHIP_ROLE = "$e"

KEYWORDS = frozenset({"not", "all", "some", "and", "or", "in", "inv", "neg"})
CONCEPT_KEYWORDS = frozenset({"Top", "Bot", "Pow"})


class KBSyntaxError(SyntaxError):
    """A positioned parse failure."""

    def __init__(self, message: str, line: int, col: int, expected: str = ""):
        self.line = line
        self.col = col
        self.expected = expected
        text = f"{message} at line {line}, column {col}"
        if expected:
            text += f" (expected {expected})"
        super().__init__(text)
        self.lineno = line
        self.offset = col


class ReservedName(KBSyntaxError):
    def __init__(self, name: str, line: int = 0, col: int = 0):
        self.name = name
        super().__init__(f"reserved name {name!r}", line, col)


class DialectError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Roles and concepts


@dataclass(frozen=True)
class Role:
    name: str
    inverted: bool = False
    negated: bool = False

    def inverse(self) -> "Role":
        return Role(self.name, not self.inverted, self.negated)


class Concept:
    """Base class of concept expressions (structural equality, hashable)."""

    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, repr=False)
class Top(Concept):
    def __repr__(self):
        return "Top()"


@dataclass(frozen=True, repr=False)
class Bot(Concept):
    def __repr__(self):
        return "Bot()"


@dataclass(frozen=True)
class Name(Concept):
    name: str


@dataclass(frozen=True)
class Not(Concept):
    arg: Concept


@dataclass(frozen=True)
class And(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class Or(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class Diff(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class Pow(Concept):
    arg: Concept


@dataclass(frozen=True)
class Forall(Concept):
    role: Role
    arg: Concept


@dataclass(frozen=True)
class Exists(Concept):
    role: Role
    arg: Concept


@dataclass(frozen=True)
class Nominal(Concept):
    individual: str


TOP = Top()
BOT = Bot()

_BINARY = (And, Or, Diff)
_UNARY = (Not, Pow)
_RESTRICTIONS = (Forall, Exists)


def children(c: Concept) -> tuple[Concept, ...]:
    if isinstance(c, _BINARY):
        return (c.left, c.right)
    if isinstance(c, (Not, Pow, Forall, Exists)):
        return (c.arg,)
    return ()


def subconcepts(c: Concept) -> Iterator[Concept]:
    """Pre-order traversal, duplicates included."""
    stack = [c]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def conjunction(items: Iterable[Concept]) -> Concept:
    items = list(items)
    if not items:
        return TOP
    out = items[0]
    for c in items[1:]:
        out = And(out, c)
    return out


def disjunction(items: Iterable[Concept]) -> Concept:
    items = list(items)
    if not items:
        return BOT
    out = items[0]
    for c in items[1:]:
        out = Or(out, c)
    return out


# ---------------------------------------------------------------------------
# Axioms, queries, knowledge bases


@dataclass(frozen=True)
class Inclusion:
    sub: Concept
    sup: Concept


@dataclass(frozen=True)
class Assertion:
    concept: Concept
    individual: str


@dataclass(frozen=True)
class RoleAssertion:
    role: str
    subject: str
    object: str


@dataclass(frozen=True)
class ConceptMembership:
    element: Concept
    container: Concept


@dataclass(frozen=True)
class RoleMembership:
    first: Concept
    second: Concept
    role: str


Axiom = Union[Inclusion, Assertion, RoleAssertion, ConceptMembership, RoleMembership]
Query = Union[Inclusion, Assertion, ConceptMembership, RoleMembership]
QUERY_TYPES = (Inclusion, Assertion, ConceptMembership, RoleMembership)


class Dialect(enum.Enum):
    LC_OMEGA = "LC^Omega"
    ALC_OMEGA = "ALC^Omega"
    ALCOI = "ALCOI"
    ALC_NEG = "ALC(neg)"


class Signature(NamedTuple):
    concepts: tuple[str, ...]
    roles: tuple[str, ...]
    individuals: tuple[str, ...]


def axiom_concepts(ax) -> tuple[Concept, ...]:
    if isinstance(ax, Inclusion):
        return (ax.sub, ax.sup)
    if isinstance(ax, Assertion):
        return (ax.concept,)
    if isinstance(ax, ConceptMembership):
        return (ax.element, ax.container)
    if isinstance(ax, RoleMembership):
        return (ax.first, ax.second)
    return ()


def _collect_names(axioms: Iterable) -> Signature:
    concepts: set[str] = set()
    roles: set[str] = set()
    inds: set[str] = set()
    for ax in axioms:
        if isinstance(ax, Assertion):
            inds.add(ax.individual)
        elif isinstance(ax, RoleAssertion):
            roles.add(ax.role)
            inds.update((ax.subject, ax.object))
        elif isinstance(ax, RoleMembership):
            roles.add(ax.role)
        for c in axiom_concepts(ax):
            for sub in subconcepts(c):
                if isinstance(sub, Name):
                    concepts.add(sub.name)
                elif isinstance(sub, (Forall, Exists)):
                    roles.add(sub.role.name)
                elif isinstance(sub, Nominal):
                    inds.add(sub.individual)
    return Signature(tuple(sorted(concepts)), tuple(sorted(roles)), tuple(sorted(inds)))


def _features(axioms: Iterable) -> set[str]:
    feats: set[str] = set()
    for ax in axioms:
        if isinstance(ax, (Assertion, RoleAssertion)):
            feats.add("individuals")
        if isinstance(ax, (RoleAssertion, RoleMembership)):
            feats.add("roles")
        if isinstance(ax, (ConceptMembership, RoleMembership)):
            feats.add("membership")
        for c in axiom_concepts(ax):
            for sub in subconcepts(c):
                if isinstance(sub, Pow):
                    feats.add("pow")
                elif isinstance(sub, Diff):
                    feats.add("diff")
                elif isinstance(sub, Nominal):
                    feats.add("nominal")
                elif isinstance(sub, (Forall, Exists)):
                    feats.add("roles")
                    if sub.role.inverted:
                        feats.add("inverse")
                    if sub.role.negated:
                        feats.add("negrole")
    return feats


def infer_dialect(axioms: Iterable) -> Dialect:
    feats = _features(axioms)
    omega = feats & {"pow", "diff", "membership"}
    if feats & {"nominal", "inverse"}:
        if "negrole" in feats or omega:
            raise DialectError(f"constructs cannot be combined: {sorted(feats)}")
        return Dialect.ALCOI
    if "negrole" in feats:
        if omega:
            raise DialectError(f"constructs cannot be combined: {sorted(feats)}")
        return Dialect.ALC_NEG
    if feats & {"roles", "individuals"}:
        return Dialect.ALC_OMEGA
    return Dialect.LC_OMEGA


def concept_dialect(c: Concept) -> Dialect:
    return infer_dialect([Inclusion(c, TOP)])


@dataclass(frozen=True)
class KnowledgeBase:
    tbox: tuple[Inclusion, ...] = ()
    abox: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "tbox", tuple(self.tbox))
        object.__setattr__(self, "abox", tuple(self.abox))
        for ax in self.tbox:
            if not isinstance(ax, Inclusion):
                raise TypeError(f"TBox holds inclusions only, got {ax!r}")
        for ax in self.abox:
            if isinstance(ax, Inclusion):
                raise TypeError("inclusions belong to the TBox")

    @classmethod
    def of(cls, axioms: Iterable) -> "KnowledgeBase":
        axioms = list(axioms)
        return cls(tuple(a for a in axioms if isinstance(a, Inclusion)),
                   tuple(a for a in axioms if not isinstance(a, Inclusion)))

    @property
    def axioms(self) -> tuple:
        return self.tbox + self.abox

    @cached_property
    def signature(self) -> Signature:
        return _collect_names(self.axioms)

    @cached_property
    def dialect(self) -> Dialect:
        return infer_dialect(self.axioms)

    def __len__(self):
        return len(self.tbox) + len(self.abox)

    def __str__(self):
        return render(self)


def signature(kb: KnowledgeBase) -> Signature:
    return kb.signature


def query_signature(q) -> Signature:
    return _collect_names([q])


def membership_concepts(axioms: Iterable) -> list[Concept]:
    """Concepts that must denote a domain element, in first-occurrence order.

    Both arguments of a role membership are included: the translation refers
    to a concept individual for each of them.
    """
    seen: dict[Concept, None] = {}
    for ax in axioms:
        if isinstance(ax, ConceptMembership):
            seen.setdefault(ax.element)
        elif isinstance(ax, RoleMembership):
            seen.setdefault(ax.first)
            seen.setdefault(ax.second)
    return list(seen)


def ast_size(entity) -> int:
    """Node count used by the linearity bound: one per constructor, leaf, axiom
    and name argument of an axiom."""
    if isinstance(entity, KnowledgeBase):
        return sum(ast_size(ax) for ax in entity.axioms)
    if isinstance(entity, Concept):
        return sum(1 for _ in subconcepts(entity))
    if isinstance(entity, Inclusion):
        return 1 + ast_size(entity.sub) + ast_size(entity.sup)
    if isinstance(entity, Assertion):
        return 2 + ast_size(entity.concept)
    if isinstance(entity, RoleAssertion):
        return 4
    if isinstance(entity, ConceptMembership):
        return 1 + ast_size(entity.element) + ast_size(entity.container)
    if isinstance(entity, RoleMembership):
        return 2 + ast_size(entity.first) + ast_size(entity.second)
    raise TypeError(f"no size for {entity!r}")


# ---------------------------------------------------------------------------
# Printer

_PREC = {Or: 1, And: 2, Diff: 3}
_OPS = {Or: "or", And: "and", Diff: "\\"}
_UNARY_PREC = 4
_ATOM_PREC = 5


def _prec(c: Concept) -> int:
    if isinstance(c, _BINARY):
        return _PREC[type(c)]
    if isinstance(c, (Not, Forall, Exists)):
        return _UNARY_PREC
    return _ATOM_PREC


def render_role(r: Role) -> str:
    text = r.name
    if r.inverted:
        text = f"inv({text})"
    if r.negated:
        text = f"neg({text})"
    return text


def _wrap(c: Concept, min_prec: int) -> str:
    text = render_concept(c)
    return f"({text})" if _prec(c) < min_prec else text


def render_concept(c: Concept) -> str:
    if isinstance(c, Top):
        return "Top"
    if isinstance(c, Bot):
        return "Bot"
    if isinstance(c, Name):
        return c.name
    if isinstance(c, Nominal):
        return "{" + c.individual + "}"
    if isinstance(c, Not):
        return "not " + _wrap(c.arg, _UNARY_PREC)
    if isinstance(c, Pow):
        return f"Pow({render_concept(c.arg)})"
    if isinstance(c, Forall):
        return f"all {render_role(c.role)} . " + _wrap(c.arg, _UNARY_PREC)
    if isinstance(c, Exists):
        return f"some {render_role(c.role)} . " + _wrap(c.arg, _UNARY_PREC)
    if isinstance(c, _BINARY):
        p = _PREC[type(c)]
        return f"{_wrap(c.left, p)} {_OPS[type(c)]} {_wrap(c.right, p + 1)}"
    raise TypeError(f"not a concept: {c!r}")


def render_axiom(ax) -> str:
    if isinstance(ax, Inclusion):
        return f"{render_concept(ax.sub)} [= {render_concept(ax.sup)}."
    if isinstance(ax, Assertion):
        return f"{_wrap(ax.concept, _ATOM_PREC)}({ax.individual})."
    if isinstance(ax, RoleAssertion):
        return f"{ax.role}({ax.subject}, {ax.object})."
    if isinstance(ax, ConceptMembership):
        return f"{render_concept(ax.element)} in {render_concept(ax.container)}."
    if isinstance(ax, RoleMembership):
        return f"({render_concept(ax.first)}, {render_concept(ax.second)}) in {ax.role}."
    raise TypeError(f"not an axiom: {ax!r}")


def render(entity) -> str:
    if isinstance(entity, KnowledgeBase):
        return "".join(render_axiom(ax) + "\n" for ax in entity.axioms)
    if isinstance(entity, Concept):
        return render_concept(entity)
    if isinstance(entity, Role):
        return render_role(entity)
    return render_axiom(entity)


# ---------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>#[^\n]*)"
    r"|(?P<ident>\$?[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<sym>\[=|==|\\|\.|\(|\)|,|\{|\})"
)


class Token(NamedTuple):
    kind: str  # "ident", "sym" or "eof"
    value: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise KBSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1,
                                "identifier or symbol")
        kind = m.lastgroup
        if kind in ("ident", "sym"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def _bare(name: str) -> str:
    return name[1:] if name.startswith(RESERVED_PREFIX) else name


def is_concept_name(ident: str) -> bool:
    bare = _bare(ident)
    return bool(bare) and bare[0].isupper() and ident not in CONCEPT_KEYWORDS


def is_lower_name(ident: str) -> bool:
    bare = _bare(ident)
    return bool(bare) and bare[0].islower() and ident not in KEYWORDS


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, text: str, allow_reserved: bool):
        self.tokens = tokenize(text)
        self.i = 0
        self.allow_reserved = allow_reserved

    # token helpers
    def peek(self, k: int = 0) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at(self, value: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok.kind != "eof" and tok.value == value

    def advance(self) -> Token:
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, expected: str):
        tok = self.peek()
        found = "end of input" if tok.kind == "eof" else repr(tok.value)
        raise KBSyntaxError(f"unexpected {found}", tok.line, tok.col, expected)

    def expect(self, value: str) -> Token:
        if not self.at(value):
            self.fail(repr(value))
        return self.advance()

    def check_name(self, tok: Token, kind: str) -> str:
        name = tok.value
        if not self.allow_reserved:
            if name.startswith(RESERVED_PREFIX) or (kind == "role" and name == "e"):
                raise ReservedName(name, tok.line, tok.col)
        return name

    def lower_name(self, kind: str) -> str:
        tok = self.peek()
        if tok.kind != "ident" or not is_lower_name(tok.value):
            self.fail(f"{kind} name")
        self.advance()
        return self.check_name(tok, kind)

    # grammar
    def role(self) -> Role:
        for word, attr in (("inv", "inverted"), ("neg", "negated")):
            if self.at(word):
                self.advance()
                self.expect("(")
                inner = self.role()
                self.expect(")")
                return Role(inner.name, inner.inverted or attr == "inverted",
                            inner.negated or attr == "negated")
        return Role(self.lower_name("role"))

    def unary(self) -> Concept:
        tok = self.peek()
        if tok.kind == "ident":
            if tok.value == "not":
                self.advance()
                return Not(self.unary())
            if tok.value in ("all", "some"):
                self.advance()
                r = self.role()
                self.expect(".")
                body = self.unary()
                return Forall(r, body) if tok.value == "all" else Exists(r, body)
        return self.primary()

    def primary(self) -> Concept:
        tok = self.peek()
        if tok.kind == "ident":
            if tok.value == "Top":
                self.advance()
                return TOP
            if tok.value == "Bot":
                self.advance()
                return BOT
            if tok.value == "Pow":
                self.advance()
                self.expect("(")
                inner = self.concept()
                self.expect(")")
                return Pow(inner)
            if is_concept_name(tok.value):
                self.advance()
                return Name(self.check_name(tok, "concept"))
        elif tok.value == "(":
            self.advance()
            inner = self.concept()
            self.expect(")")
            return inner
        elif tok.value == "{":
            self.advance()
            ind = self.lower_name("individual")
            self.expect("}")
            return Nominal(ind)
        self.fail("concept")

    def binary(self, min_prec: int, left: Concept | None = None) -> Concept:
        if left is None:
            left = self.unary()
        while True:
            tok = self.peek()
            op = {"or": Or, "and": And, "\\": Diff}.get(tok.value) if tok.kind != "eof" else None
            if op is None or _PREC[op] < min_prec:
                return left
            self.advance()
            right = self.binary(_PREC[op] + 1)
            left = op(left, right)

    def concept(self) -> Concept:
        return self.binary(1)

    def statement(self) -> list:
        tok = self.peek()
        if tok.kind == "ident" and is_lower_name(tok.value):
            if self.at("in", 1):
                ind = self.lower_name("individual")
                self.advance()
                c = self.concept()
                self.expect(".")
                return [Assertion(c, ind)]
            if self.at("(", 1):
                return [self.role_statement()]
            self.advance()
            self.fail("'(' or 'in'")
        if tok.value == "(" and tok.kind == "sym":
            self.advance()
            first = self.concept()
            if self.at(","):
                self.advance()
                second = self.concept()
                self.expect(")")
                self.expect("in")
                role = self.lower_name("role")
                self.expect(".")
                return [RoleMembership(first, second, role)]
            self.expect(")")
            lhs = self.binary(1, first)
        else:
            lhs = self.concept()
        return self.statement_tail(lhs)

    def role_statement(self):
        role = self.lower_name("role")
        self.expect("(")
        nxt = self.peek()
        if nxt.kind == "ident" and is_lower_name(nxt.value):
            a = self.lower_name("individual")
            self.expect(",")
            b = self.lower_name("individual")
            self.expect(")")
            self.expect(".")
            return RoleAssertion(role, a, b)
        first = self.concept()
        self.expect(",")
        second = self.concept()
        self.expect(")")
        self.expect(".")
        return RoleMembership(first, second, role)

    def statement_tail(self, lhs: Concept) -> list:
        tok = self.peek()
        if tok.value == "[=" and tok.kind == "sym":
            self.advance()
            rhs = self.concept()
            self.expect(".")
            return [Inclusion(lhs, rhs)]
        if tok.value == "==" and tok.kind == "sym":
            self.advance()
            rhs = self.concept()
            self.expect(".")
            return [Inclusion(lhs, rhs), Inclusion(rhs, lhs)]
        if self.at("in"):
            self.advance()
            rhs = self.concept()
            self.expect(".")
            return [ConceptMembership(lhs, rhs)]
        if tok.value == "(" and tok.kind == "sym":
            self.advance()
            ind = self.lower_name("individual")
            self.expect(")")
            self.expect(".")
            return [Assertion(lhs, ind)]
        self.fail("'[=', '==', 'in' or '(' individual ')'")

    def statements(self) -> list:
        out = []
        while self.peek().kind != "eof":
            out.extend(self.statement())
        return out


def _decode(text: str | bytes) -> str:
    if isinstance(text, bytes):
        try:
            return text.decode("utf-8")
        except UnicodeDecodeError as exc:
            prefix = text[: exc.start].decode("utf-8")
            line = prefix.count("\n") + 1
            col = len(prefix) - (prefix.rfind("\n") + 1) + 1
            raise KBSyntaxError("invalid UTF-8", line, col, "UTF-8 text") from None
    return text


def parse_statements(text: str | bytes, allow_reserved: bool = False) -> list:
    return _Parser(_decode(text), allow_reserved).statements()


def parse_kb(text: str | bytes, allow_reserved: bool = False) -> KnowledgeBase:
    kb = KnowledgeBase.of(parse_statements(text, allow_reserved))
    kb.dialect  # raises DialectError on incompatible constructs
    return kb


def parse_concept(text: str, allow_reserved: bool = False) -> Concept:
    p = _Parser(text, allow_reserved)
    c = p.concept()
    if p.peek().kind != "eof":
        p.fail("end of input")
    return c


def parse_query(text: str | bytes, allow_reserved: bool = False):
    """Parse one query statement; the trailing period may be omitted."""
    text = _decode(text).strip()
    if not text.endswith("."):
        text += "."
    p = _Parser(text, allow_reserved)
    if p.peek().kind == "eof":
        p.fail("query")
    stmts = p.statement()
    if p.peek().kind != "eof":
        p.fail("end of input")
    if len(stmts) != 1 or not isinstance(stmts[0], QUERY_TYPES):
        tok = p.tokens[0]
        raise KBSyntaxError("not a query statement", tok.line, tok.col,
                            "inclusion, assertion or membership")
    return stmts[0]


def parse_queries(text: str | bytes, allow_reserved: bool = False) -> list:
    stmts = parse_statements(text, allow_reserved)
    for q in stmts:
        if not isinstance(q, QUERY_TYPES):
            raise ValueError(f"not a query: {render(q)}")
    return stmts
