import copy
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doxepi.funcpair import doxastic, epistemic
from doxepi.relalg import Relation, classify, kernel
from doxepi.signature import (
    LabelError,
    ModelError,
    dump_model,
    interpret,
    load_model,
    override_relation,
    random_document,
    read_model,
)

MINIMAL = {
    "states": ["s0"],
    "belief_labels": {"a": ["id_S", "id_S"]},
    "knowledge_labels": {"a": ["id_S", "id_S"]},
    "valuation": {"P": ["s0"]},
}

COLLAPSE = {
    "states": ["s0", "s1"],
    "types": {"T1": ["s0"]},
    "functions": {"f1": {"domain": "S", "codomain": "T1", "map": {"s0": "s0", "s1": "s0"}}},
    "belief_labels": {"a": ["f1", "id_T1"]},
    "knowledge_labels": {"a": ["f1", "id_T1"]},
    "valuation": {"P": []},
}


def biased(gmap):
    return {
        "states": ["s0", "s1"],
        "functions": {"g1": {"domain": "S", "codomain": "S", "map": gmap}},
        "belief_labels": {"a": ["id_S", "g1"]},
        "knowledge_labels": {},
        "valuation": {"P": ["s1"]},
    }


def test_minimal_document():
    m = load_model(MINIMAL)
    assert m.belief["a"] == m.knowledge["a"] == Relation.identity(m.space)


def test_constant_visibility_gives_full_relations():
    m = load_model(COLLAPSE)
    full = Relation.full(m.space)
    assert m.belief["a"] == full == kernel(m.instantiation.fun_interp["f1"])


def test_idempotency_is_checked_for_biases():
    m = load_model(biased({"s0": "s1", "s1": "s1"}))
    assert set(m.belief["a"].named_pairs()) == {("s0", "s1"), ("s1", "s1")}
    with pytest.raises(ModelError) as err:
        load_model(biased({"s0": "s1", "s1": "s0"}))
    assert err.value.clause == "non-idempotent bias"
    assert err.value.witness == "s0"


def test_interpret_identities_and_composites():
    doc = {
        "states": ["0", "1"],
        "types": {"T": ["0"]},
        "functions": {
            "f": {"domain": "S", "codomain": "T", "map": {"0": "0", "1": "0"}},
            "h": {"domain": "T", "codomain": "T", "map": {"0": "0"}},
            "h.f": {"compose": ["h", "f"]},
            "hf2": {"compose": ["id_T", "h.f"]},
        },
        "belief_labels": {"a": ["h.f", "h"]},
        "knowledge_labels": {"a": ["f", "id_T"]},
        "valuation": {"P": ["1"]},
    }
    m = load_model(doc)
    inst = m.instantiation
    assert interpret("id_S", inst).is_identity()
    assert interpret("h.f", inst).named() == {"0": "0", "1": "0"}
    assert interpret("hf2", inst) == interpret("h.f", inst)
    assert interpret("h.id_T", inst) == interpret("h", inst)
    with pytest.raises(ModelError):
        interpret("nope", inst)


@pytest.mark.parametrize("mutate, clause", [
    (lambda d: d["valuation"].update(P=["ghost"]), "unknown state"),
    (lambda d: d["belief_labels"].update(a=["f9", "id_S"]), "unknown name"),
    (lambda d: d["functions"].update(
        id_T1={"domain": "T1", "codomain": "T1", "map": {"s0": "s1"}}), "type mismatch"),
    (lambda d: d["belief_labels"].update(a=["f1", "id_S"]), "type mismatch"),
    (lambda d: d.pop("valuation"), "malformed"),
    (lambda d: d["types"].update(S=["s0"]), "type mismatch"),
    (lambda d: d["functions"]["f1"]["map"].pop("s1"), "type mismatch"),
])
def test_load_errors_name_the_clause(mutate, clause):
    doc = copy.deepcopy(COLLAPSE)
    mutate(doc)
    with pytest.raises(ModelError) as err:
        load_model(doc)
    assert err.value.clause == clause


def test_identity_names_cannot_be_overridden():
    doc = copy.deepcopy(COLLAPSE)
    doc["types"]["T2"] = ["s0", "s1"]
    doc["functions"]["id_T2"] = {"domain": "T2", "codomain": "T2",
                                 "map": {"s0": "s1", "s1": "s1"}}
    with pytest.raises(ModelError) as err:
        load_model(doc)
    assert err.value.clause == "identity override"


def test_invalid_label_pair():
    doc = {
        "states": ["0", "1", "2"],
        "types": {"V": ["0", "1"]},
        "functions": {
            "f": {"domain": "S", "codomain": "V", "map": {"0": "0", "1": "0", "2": "0"}},
            "g": {"domain": "V", "codomain": "V", "map": {"0": "1", "1": "1"}},
        },
        "belief_labels": {"a": ["f", "g"]},
        "knowledge_labels": {},
        "valuation": {"P": []},
    }
    # g is idempotent but sends Im(f) = {0} outside itself
    with pytest.raises(ModelError) as err:
        load_model(doc)
    assert err.value.clause == "invalid label pair"


def test_read_model_errors(tmp_path):
    with pytest.raises(ModelError) as err:
        read_model(tmp_path / "missing.json")
    assert err.value.clause == "unreadable"
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    with pytest.raises(ModelError) as err:
        read_model(bad)
    assert err.value.clause == "malformed"


def test_unknown_labels_raise_label_error():
    m = load_model(MINIMAL)
    with pytest.raises(LabelError):
        m.belief_relation("zz")
    with pytest.raises(LabelError):
        override_relation(m, "knowledge", "zz", Relation.empty(m.space))


def test_override_marks_the_model():
    m = load_model(COLLAPSE)
    bad = override_relation(m, "belief", "a", Relation.empty(m.space))
    assert bad.belief["a"] == Relation.empty(m.space)
    assert ("belief", "a") in bad.overrides
    assert m.belief["a"] == Relation.full(m.space)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(1, 3), st.integers(1, 3))
def test_random_documents_load_and_round_trip(seed, n, atoms, labels):
    doc = random_document(random.Random(seed), n, atoms, labels)
    m = load_model(doc)
    again = load_model(json.loads(json.dumps(dump_model(m))))
    assert dump_model(again) == dump_model(m)
    assert again.belief == m.belief and again.knowledge == m.knowledge
    assert again.valuation == m.valuation
    for a, pair in m.belief_pairs.items():
        assert classify(m.belief[a]).kd45
        assert m.belief[a] == doxastic(pair)
    for a, pair in m.knowledge_pairs.items():
        assert classify(m.knowledge[a]).equivalence
        assert m.knowledge[a] == epistemic(pair)
    inst = m.instantiation
    for name, decl in m.signature.functions.items():
        if decl.composite:
            expected = inst.fun_interp[decl.compose[-1]]
            for part in reversed(decl.compose[:-1]):
                expected = expected.then(inst.fun_interp[part])
            assert inst.fun_interp[name] == expected
    for name in m.signature.gnames:
        assert inst.fun_interp[name].is_idempotent()
