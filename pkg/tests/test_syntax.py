import pytest
from hypothesis import given, settings, strategies as st

from alcomega import syntax as sx
from alcomega.syntax import (
    And, Assertion, ConceptMembership, Dialect, Exists, Forall, Inclusion, KBSyntaxError, Name, Not, Or,
    Pow, ReservedName, Role, RoleMembership, parse_concept, parse_kb, parse_query, parse_queries, render,
)

names = st.sampled_from(["A", "B", "Eagle", "Red_List"])
roles = st.sampled_from(["r", "has_paid"])

concepts = st.recursive(
    st.one_of(names.map(Name), st.just(sx.TOP), st.just(sx.BOT)),
    lambda inner: st.one_of(
        inner.map(Not),
        inner.map(Pow),
        st.tuples(inner, inner).map(lambda p: And(*p)),
        st.tuples(inner, inner).map(lambda p: Or(*p)),
        st.tuples(inner, inner).map(lambda p: sx.Diff(*p)),
        st.tuples(roles, inner).map(lambda p: Forall(Role(p[0]), p[1])),
        st.tuples(roles, inner).map(lambda p: Exists(Role(p[0]), p[1])),
    ),
    max_leaves=8,
)

axioms = st.one_of(
    st.tuples(concepts, concepts).map(lambda p: Inclusion(*p)),
    st.tuples(concepts, concepts).map(lambda p: ConceptMembership(*p)),
    st.tuples(concepts, st.sampled_from(["a", "harry"])).map(lambda p: Assertion(*p)),
    st.tuples(concepts, concepts, roles).map(lambda p: RoleMembership(*p)),
)


@settings(max_examples=300, deadline=None)
@given(concepts)
def test_concept_roundtrip(C):
    assert parse_concept(render(C)) == C


@settings(max_examples=200, deadline=None)
@given(st.lists(axioms, min_size=1, max_size=5))
def test_kb_roundtrip(axs):
    K = sx.KnowledgeBase.of(axs)
    again = parse_kb(render(K))
    assert again.tbox == K.tbox and again.abox == K.abox


def test_eagle_kb(eagle_kb):
    assert eagle_kb.dialect is Dialect.ALC_OMEGA
    assert len(eagle_kb.tbox) == 1 and len(eagle_kb.abox) == 3
    assert eagle_kb.tbox[0] == Inclusion(Name("RedListSpecies"), Pow(Name("CannotHunt")))
    assert eagle_kb.signature.individuals == ("harry",)


def test_reading_group_kb(reading_kb):
    assert reading_kb.dialect is Dialect.ALC_OMEGA
    assert set(reading_kb.signature.roles) == {"has_leader", "has_paid"}
    assert set(reading_kb.signature.individuals) == {"alice", "bob", "carl"}


@pytest.mark.parametrize("text, dialect", [
    ("A [= Pow(B). A in B.", Dialect.LC_OMEGA),
    ("A [= some r . B.", Dialect.ALC_OMEGA),
    ("A [= some inv(r) . {a}.", Dialect.ALCOI),
    ("A [= all neg(r) . B.", Dialect.ALC_NEG),
])
def test_dialects(text, dialect):
    assert parse_kb(text).dialect is dialect


def test_equivalence_is_two_inclusions():
    K = parse_kb("A == B.")
    assert K.tbox == (Inclusion(Name("A"), Name("B")), Inclusion(Name("B"), Name("A")))


def test_role_membership_forms_agree():
    assert parse_kb("r(A, B).").abox == parse_kb("(A, B) in r.").abox


def test_individual_membership_is_assertion():
    assert parse_kb("a in A.").abox == (Assertion(Name("A"), "a"),)


@pytest.mark.parametrize("text", ["$U [= A.", "A [= $B.", "A($a)."])
def test_reserved_names_rejected(text):
    with pytest.raises(ReservedName):
        parse_kb(text)


def test_reserved_names_allowed_on_request():
    K = parse_kb("$U [= A.", allow_reserved=True)
    assert K.tbox[0].sub == Name("$U")


def test_error_position():
    with pytest.raises(KBSyntaxError) as info:
        parse_kb("A [= B.\nA [= .")
    assert (info.value.line, info.value.col) == (2, 6)
    assert "concept" in info.value.expected


def test_missing_period():
    with pytest.raises(KBSyntaxError):
        parse_kb("A [= B")


def test_comments_ignored():
    assert len(parse_kb("# nothing here\nA [= B. # trailing\n")) == 1


def test_queries():
    assert parse_query("Eagle [= CannotHunt") == Inclusion(Name("Eagle"), Name("CannotHunt"))
    qs = parse_queries("A [= B.\nA(a).\n")
    assert len(qs) == 2


def test_ast_size_and_membership_concepts():
    K = parse_kb("A [= Pow(B). not A in B. r(A, C).")
    assert sx.membership_concepts(K.axioms) == [Not(Name("A")), Name("A"), Name("C")]
    assert sx.ast_size(Pow(Name("B"))) == 2
