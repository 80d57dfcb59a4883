import pytest

import oracles as O
from doxepi.funcpair import InvalidPair, StateFunction, epistemic, validate_pair
from doxepi.relalg import Relation, classify, kernel
from doxepi.traces import (
    Converse,
    IdTerm,
    Power,
    Prim,
    Star,
    TraceSpace,
    Union,
    action,
    action_bias_diagnostics,
    back_and_forth,
    constructed_projection,
    indistinguishability,
    pdl_relation,
    project,
    projection,
    projection_pair,
    trace_name,
    verify_indist_correspondence,
    verify_pdl_correspondence,
)

GRID = [(k, d) for k in (1, 2, 3) for d in range(5)]


def space(k, d):
    return TraceSpace(tuple(str(i + 1) for i in range(k)), d)


def test_trace_names_and_order():
    ts = space(2, 2)
    assert ts.space.states[:3] == ("0", "1(0)", "2(0)")
    assert ts.space.states[3:] == ("1(1(0))", "1(2(0))", "2(1(0))", "2(2(0))")
    assert trace_name(()) == "0"


@pytest.mark.parametrize("k, d", GRID)
def test_state_count(k, d):
    assert len(space(k, d)) == sum(k ** i for i in range(d + 1))


def test_projection_examples():
    ts = space(2, 2)
    assert ts.space.states[project(ts, "1", "2(1(0))")] == "1(0)"
    assert project(ts, "1", "0") == 0
    assert ts.space.states[project(ts, "1", "1(1(0))")] == "1(1(0))"


def test_indistinguishability_examples():
    ts = space(2, 1)
    cls = {frozenset(ts.space.names(indistinguishability(ts, "1").successors(s)))
           for s in range(len(ts))}
    assert cls == {frozenset({"0", "2(0)"}), frozenset({"1(0)"})}
    assert indistinguishability(space(2, 0), "1") == Relation.identity(space(2, 0).space)
    single = space(1, 3)
    assert indistinguishability(single, "1") == Relation.identity(single.space)


def test_pdl_examples():
    ts = space(1, 1)
    assert pdl_relation(ts, Prim("1")).named_pairs() == [("0", "1(0)")]
    assert pdl_relation(ts, Power(Prim("1"), 0)) == Relation.identity(ts.space)
    chain = space(1, 4)
    assert pdl_relation(chain, back_and_forth("1")) == Relation.full(chain.space)


def test_pdl_term_algebra():
    ts = space(2, 3)
    a, b = Prim("1"), Prim("2")
    ra, rb = pdl_relation(ts, a), pdl_relation(ts, b)
    pa, pb = O.pairs_of(ra), O.pairs_of(rb)
    assert O.pairs_of(pdl_relation(ts, Converse(a))) == O.converse(pa)
    assert O.pairs_of(pdl_relation(ts, Union(a, b))) == pa | pb
    assert O.pairs_of(pdl_relation(ts, Power(a, 2))) == O.compose(pa, pa)
    assert O.pairs_of(pdl_relation(ts, Star(Union(a, b)))) == O.rt_closure(pa | pb, len(ts))
    assert pdl_relation(ts, IdTerm()) == Relation.identity(ts.space)
    with pytest.raises(ValueError):
        pdl_relation(ts, Prim("9"))
    with pytest.raises(ValueError):
        pdl_relation(ts, Power(a, -1))


@pytest.mark.parametrize("k, d", GRID)
def test_projection_properties(k, d):
    ts = space(k, d)
    for agent in ts.agents:
        pi = projection(ts, agent)
        assert pi.is_idempotent()
        for s in range(len(ts)):
            assert len(ts.traces[pi(s)]) <= len(ts.traces[s])
        ind = indistinguishability(ts, agent)
        assert classify(ind).equivalence
        assert ind == kernel(pi) == epistemic(projection_pair(ts, agent))


@pytest.mark.parametrize("k, d", GRID)
def test_correspondences(k, d):
    ts = space(k, d)
    for agent in ts.agents:
        assert verify_indist_correspondence(ts, agent).holds
        rep = verify_pdl_correspondence(ts, agent)
        assert rep.holds, rep.as_dict()
        pair, reproduced = constructed_projection(ts, agent)
        assert reproduced
        assert validate_pair(pair.f, pair.g)


@pytest.mark.parametrize("k, d", GRID)
def test_boundary_agrees_too(k, d):
    # both sides are built from the same truncated action graph
    ts = space(k, d)
    for agent in ts.agents:
        assert verify_pdl_correspondence(ts, agent).boundary_holds is True


@pytest.mark.parametrize("k, d", [(k, d) for k, d in GRID if d >= 2])
def test_action_is_not_a_valid_bias(k, d):
    ts = space(k, d)
    for agent in ts.agents:
        kinds = {x.constraint for x in action_bias_diagnostics(ts, agent)}
        assert "idempotent" in kinds
        with pytest.raises(InvalidPair):
            validate_pair(StateFunction.identity(ts.space), action(ts, agent))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_action_bias_rejected_at_shallow_depths(k):
    for d in (0, 1):
        ts = space(k, d)
        for agent in ts.agents:
            assert {x.constraint for x in action_bias_diagnostics(ts, agent)} == {"g-total"}


def test_bad_spaces():
    with pytest.raises(ValueError):
        TraceSpace((), 2)
    with pytest.raises(ValueError):
        TraceSpace(("a", "a"), 2)
    with pytest.raises(ValueError):
        TraceSpace(("a(",), 2)
    with pytest.raises(ValueError):
        TraceSpace(("a",), -1)
