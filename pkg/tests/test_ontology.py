from __future__ import annotations

import pytest
from hypothesis import given, settings

from _gen import ontologies
from hornify.ontology import (
    BOT,
    TOP,
    AtMostOne,
    Concept,
    ConceptInclusion,
    Dataset,
    Fact,
    ForallRight,
    NormalFormError,
    Ontology,
    OntologyError,
    Role,
    RoleInclusion,
    inv,
    is_horn_ontology,
    parse_dataset,
    parse_ontology,
    parse_profile,
    profile_of,
    serialize_ontology,
    subrole_closure,
)

R, S, T = Role("R"), Role("S"), Role("T")


def test_parse_union():
    o = parse_ontology("SubClassOf(A Or(B C))")
    assert o.axioms == (ConceptInclusion((Concept("A"),), (Concept("B"), Concept("C"))),)


def test_tautology_accepted():
    o = parse_ontology("SubClassOf(A A)")
    assert o.axioms[0] == ConceptInclusion((Concept("A"),), (Concept("A"),))


def test_nested_filler_rejected():
    with pytest.raises(OntologyError):
        parse_ontology("SubClassOf(Some(R And(A B)) C)")


@pytest.mark.parametrize("text", [
    "SubClassOf(A Top)",
    "SubClassOf(Bot A)",
    "SubClassOf(A Some(R Top))",
    "SubClassOf(A",
    "SubClassOf(A B) junk",
    "EquivalentClasses(A B)",
    "SubRoleOf(Inv(S) R)",
])
def test_malformed_rejected(text):
    with pytest.raises(OntologyError):
        parse_ontology(text)


def test_error_carries_line():
    with pytest.raises(OntologyError, match="2"):
        parse_ontology("SubClassOf(A B)\nSubClassOf(A\n")


def test_comments_and_blank_lines(oex):
    text = "# header\n\n" + serialize_ontology(oex) + "  # trailing\n"
    assert parse_ontology(text) == oex


def test_inverse_role_rendering():
    o = Ontology((RoleInclusion("S", inv(R)),))
    assert serialize_ontology(o).strip() == "SubRoleOf(S Inv(R))"


def test_empty_ontology_serializes_empty():
    assert serialize_ontology(Ontology()) == ""


def test_oex_round_trip(oex):
    text = serialize_ontology(oex)
    assert len(text.splitlines()) == 5
    assert parse_ontology(text) == oex


def test_inv_idempotent():
    assert inv(inv(R)) == R
    assert inv(R) != R


def test_profiles(oex):
    assert str(profile_of(oex)) == "ELU"
    assert profile_of(oex).horn is False
    assert str(profile_of(Ontology())) == "EL"
    o = Ontology((ForallRight(Concept("A"), R, Concept("B")), RoleInclusion("S", inv(R)),
                  AtMostOne(Concept("A"), R, Concept("B"))))
    p = profile_of(o)
    assert (p.base, p.features, p.horn) == ("ALC", frozenset("IHF"), True)
    assert str(p) == "Horn-ALCHIF"


@pytest.mark.parametrize("name", ["EL", "ELU", "ALC", "Horn-ALC", "Horn-ALCHIF", "ELUH"])
def test_profile_text_round_trip(name):
    assert str(parse_profile(name)) == name


def test_is_horn(oex):
    assert not is_horn_ontology(oex)
    assert is_horn_ontology(Ontology())
    assert is_horn_ontology(parse_ontology("SubClassOf(And(A B) C)"))


def test_subrole_closure_chain():
    c = subrole_closure(Ontology((RoleInclusion("S", R), RoleInclusion("R", T))))
    assert (S, T) in c and (inv(S), inv(T)) in c
    assert (T, S) not in c


def test_subrole_closure_reflexive_only():
    o = parse_ontology("SubClassOf(A Some(R B))")
    assert subrole_closure(o) == {(R, R), (inv(R), inv(R))}


def test_subrole_closure_inverse_super():
    c = subrole_closure(Ontology((RoleInclusion("S", inv(R)),)))
    assert (S, inv(R)) in c and (inv(S), R) in c


def test_dataset_parsing():
    d = parse_dataset("A(a)\nR(a, b).\n# note\n")
    assert d == Dataset((Fact("A", ("a",)), Fact("R", ("a", "b"))))
    assert d.constants == ("a", "b")


@pytest.mark.parametrize("text", ["A(B)", "A(a,b,c)", "Top(a)", "Eq(a,b)", "A(f(a))"])
def test_dataset_rejects(text):
    with pytest.raises(OntologyError):
        parse_dataset(text)


def test_normal_form_error_is_ontology_error():
    assert issubclass(NormalFormError, OntologyError)
    assert TOP.is_top and BOT.is_bot and Concept("A").is_named


@settings(max_examples=150, deadline=None)
@given(ontologies())
def test_round_trip_property(o):
    assert parse_ontology(serialize_ontology(o)) == o


@settings(max_examples=150, deadline=None)
@given(ontologies())
def test_horn_profile_property(o):
    assert profile_of(o).horn == is_horn_ontology(o)


@settings(max_examples=100, deadline=None)
@given(ontologies())
def test_closure_properties(o):
    c = subrole_closure(o)
    roles = {r for pair in c for r in pair}
    assert all((r, r) in c for r in roles)
    assert all((inv(a), inv(b)) in c for a, b in c)
    succ = {}
    for a, b in c:
        succ.setdefault(a, set()).add(b)
    for a, b in c:
        assert succ[b] <= succ[a]
