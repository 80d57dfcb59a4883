import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doxepi.formulas import (
    And,
    Atom,
    Belief,
    Bottom,
    CommonBelief,
    CommonKnowledge,
    DistBelief,
    DistKnowledge,
    Iff,
    Implies,
    Knowledge,
    Not,
    Or,
    ParseError,
    depth,
    parse,
    random_formula,
    read_formulas,
    render,
    subformulas,
)

P, Q, R = Atom("P"), Atom("Q"), Atom("R")


@pytest.mark.parametrize("text, tree", [
    ("K[a] P -> B[a] P", Implies(Knowledge("a", P), Belief("a", P))),
    ("~B[a] false", Not(Belief("a", Bottom()))),
    ("~B[a] P -> B[a] ~P", Implies(Not(Belief("a", P)), Belief("a", Not(P)))),
    ("P -> Q -> R", Implies(P, Implies(Q, R))),
    ("P & Q & R", And(And(P, Q), R)),
    ("P | Q & R", Or(P, And(Q, R))),
    ("P <-> Q -> R", Iff(P, Implies(Q, R))),
    ("P -> Q <-> R", Iff(Implies(P, Q), R)),
    ("~P & Q", And(Not(P), Q)),
    ("B[a] P & Q", And(Belief("a", P), Q)),
    ("DB{a, b} P", DistBelief(("a", "b"), P)),
    ("CB{a} P", CommonBelief(("a",), P)),
    ("DK{x,y} ~P", DistKnowledge(("x", "y"), Not(P))),
    ("CK{a,b} (P | Q)", CommonKnowledge(("a", "b"), Or(P, Q))),
    ("B & K", And(Atom("B"), Atom("K"))),
    ("B[a1] K[b_2] P", Belief("a1", Knowledge("b_2", P))),
])
def test_parse(text, tree):
    assert parse(text) == tree


@pytest.mark.parametrize("tree, text", [
    (P, "P"),
    (Not(And(P, Q)), "~(P & Q)"),
    (Belief("a", Implies(P, Q)), "B[a] (P -> Q)"),
    (Implies(Implies(P, Q), R), "(P -> Q) -> R"),
    (Implies(P, Implies(Q, R)), "P -> Q -> R"),
    (And(P, And(Q, R)), "P & (Q & R)"),
    (DistBelief(("a", "b"), P), "DB{a,b} P"),
    (Bottom(), "false"),
])
def test_render(tree, text):
    assert render(tree) == text


@pytest.mark.parametrize("text", ["", "P &", "(P", "P Q", "B[] P", "DB{} P", "B[a P",
                                  "P -> ", "~", "P @ Q", "CK{a,} P"])
def test_syntax_errors(text):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert 0 <= err.value.position <= len(text)


def test_error_position_points_at_the_problem():
    with pytest.raises(ParseError) as err:
        parse("P & & Q")
    assert err.value.position == 4


def test_depth_and_subformulas():
    phi = parse("B[a] (P -> K[b] Q)")
    assert depth(phi) == 3
    assert Knowledge("b", Q) in set(subformulas(phi))


def test_read_formulas(tmp_path):
    path = tmp_path / "f.txt"
    path.write_text("# header\nP\n\n  K[a] P -> P  # trailing\n", encoding="utf-8")
    got = read_formulas(path)
    assert [line for line, _ in got] == [2, 4]
    assert got[1][1] == parse("K[a] P -> P")


labels = st.sampled_from(["a", "b", "c1"])
groups = st.lists(labels, min_size=1, max_size=3, unique=True).map(tuple)
leaves = st.one_of(st.sampled_from(["P", "Q", "R", "x_1"]).map(Atom), st.just(Bottom()))


def _extend(children):
    return st.one_of(
        children.map(Not),
        st.tuples(children, children).map(lambda t: And(*t)),
        st.tuples(children, children).map(lambda t: Or(*t)),
        st.tuples(children, children).map(lambda t: Implies(*t)),
        st.tuples(children, children).map(lambda t: Iff(*t)),
        st.tuples(labels, children).map(lambda t: Belief(*t)),
        st.tuples(labels, children).map(lambda t: Knowledge(*t)),
        st.tuples(groups, children).map(lambda t: DistBelief(*t)),
        st.tuples(groups, children).map(lambda t: CommonBelief(*t)),
        st.tuples(groups, children).map(lambda t: DistKnowledge(*t)),
        st.tuples(groups, children).map(lambda t: CommonKnowledge(*t)),
    )


formulas = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=1500)
@given(formulas)
def test_parse_render_round_trip(phi):
    assert parse(render(phi)) == phi


def test_random_formula_respects_depth():
    rng = random.Random(0)
    for _ in range(500):
        phi = random_formula(rng, ["P", "Q"], ["a"], ["a", "b"], 4)
        assert depth(phi) <= 4
        assert parse(render(phi)) == phi
