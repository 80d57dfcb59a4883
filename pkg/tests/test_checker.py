import random
from pathlib import Path

import pytest

import oracles as O
from doxepi import checker
from doxepi.formulas import parse, random_formula, render
from doxepi.relalg import Relation
from doxepi.signature import LabelError, load_model, override_relation, random_model, read_model

SAMPLES = Path(__file__).resolve().parents[1] / "samples"


@pytest.fixture(scope="module")
def biased():
    # S = {s0, s1}, P true at s1, belief a = (id_S, s0->s1, s1->s1)
    return read_model(SAMPLES / "biased.json")


@pytest.fixture(scope="module")
def two_agents():
    return read_model(SAMPLES / "two_agents.json")


def ext(model, text):
    return checker.extension(model, parse(text)).states


def test_satisfaction_examples(biased):
    assert set(biased.belief["a"].named_pairs()) == {("s0", "s1"), ("s1", "s1")}
    assert biased.knowledge["a"] == Relation.full(biased.space)
    assert ext(biased, "B[a] P") == ["s0", "s1"]
    assert ext(biased, "K[a] P") == []
    assert ext(biased, "P | ~P") == ["s0", "s1"]
    assert ext(biased, "false") == []


def test_validity_and_counterexample(biased):
    assert checker.valid_in_model(biased, parse("B[a] P -> ~B[a] ~P")).valid
    assert checker.valid_in_model(biased, parse("K[a] P -> P")).valid
    v = checker.valid_in_model(biased, parse("P"))
    assert not v.valid and v.counterexample == "s0"


def test_unknown_label(biased):
    with pytest.raises(LabelError):
        checker.extension(biased, parse("B[zz] P"))
    with pytest.raises(LabelError):
        checker.extension(biased, parse("Q"))


def _by_law(reports):
    out = {}
    for r in reports:
        out.setdefault(r.law, []).append(r)
    return out


def test_law_suite_on_biased_model(biased):
    reports = checker.law_suite(biased, depth=3)
    assert checker.all_hold(reports)
    laws = _by_law(reports)
    for law in ["belief.K", "belief.D", "belief.D-dual", "belief.4", "belief.5", "belief.N",
                "knowledge.K", "knowledge.T", "knowledge.4", "knowledge.5", "knowledge.N",
                "knowledge-implies-belief"]:
        assert all(r.status == checker.VALID for r in laws[law]), law
    # f = id_S, so belief is negation complete
    (nc,) = laws["negation-complete-belief"]
    assert nc.asserted and nc.status == checker.VALID
    # biased: K <-> B is probed, not asserted, and it fails with a witness
    (kb,) = laws["knowledge-as-unbiased-belief"]
    assert not kb.asserted and kb.status == checker.FALSIFIED
    cex = kb.counterexample
    assert cex["state"] in biased.space
    bad = checker.extension(biased, parse(cex["instance"]))
    assert cex["state"] not in bad


def test_iff_checks_on_biased_model(biased):
    reports = _by_law(checker.iff_condition_checks(biased))
    (bc,) = reports["bias-cancellation"]
    assert bc.status == checker.VALID
    assert bc.detail["semantic"] is False and bc.detail["functional"] is False
    (nc,) = reports["negation-complete-knowledge-iff"]
    assert nc.status == checker.VALID and nc.detail["functional"] is False
    assert all(r.status == checker.VALID for r in reports["injective-bias-is-identity"])


def test_perfect_knowledge_label(two_agents):
    laws = _by_law(checker.law_suite(two_agents, depth=2))
    perfect = [r for r in laws["perfect-knowledge"] if r.labels == ("me",)]
    assert perfect[0].asserted and perfect[0].status == checker.VALID
    precise = laws["perfect-knowledge-as-precise-belief"]
    assert [r.labels for r in precise] == [("me", "me")]
    assert precise[0].status == checker.VALID
    unbiased = [r for r in laws["knowledge-as-unbiased-belief"] if r.labels == ("b", "b")]
    assert unbiased[0].asserted and unbiased[0].status == checker.VALID
    assert checker.all_hold(checker.iff_condition_checks(two_agents))


def test_group_reports_are_informational(two_agents):
    reports = [r for r in checker.law_suite(two_agents, depth=2) if r.law.startswith("group.")]
    assert {r.law for r in reports} >= {"group.CK.T", "group.DB.K"}
    assert not any(r.asserted for r in reports)
    statuses = {r.law: r.status for r in reports}
    assert statuses["group.CK.5"] == checker.VALID and statuses["group.DK.T"] == checker.VALID


def test_fault_injection_breaks_the_d_law(biased):
    broken = override_relation(biased, "belief", "a",
                               Relation.from_pairs(biased.space, [(0, 1)]))
    reports = checker.law_suite(broken, depth=2)
    bad = checker.first_failure(reports)
    assert bad is not None and bad.law == "belief.D"
    assert bad.counterexample["state"] == "s1"
    assert bad.counterexample["instance"] == "~B[a] false"


def test_pool_level_verdict_depends_on_the_valuation():
    # biased pair, but no atom separates the states: per-model K <-> B holds
    doc = {"states": ["s0", "s1"],
           "functions": {"g": {"domain": "S", "codomain": "S", "map": {"s0": "s1", "s1": "s1"}}},
           "belief_labels": {"a": ["id_S", "g"]}, "knowledge_labels": {"a": ["id_S", "g"]},
           "valuation": {"P": []}}
    m = load_model(doc)
    laws = _by_law(checker.law_suite(m, depth=3))
    (kb,) = laws["knowledge-as-unbiased-belief"]
    assert kb.status == checker.VALID and not kb.asserted
    (bc,) = _by_law(checker.iff_condition_checks(m))["bias-cancellation"]
    assert bc.status == checker.VALID and bc.detail["semantic"] is False


def test_extension_pool_has_distinct_extensions(two_agents):
    pool = checker.extension_pool(two_agents, 3)
    masks = [m for m, _ in pool]
    assert len(masks) == len(set(masks))
    for m, phi in pool:
        assert checker.extension(two_agents, phi).mask == m


def test_necessitation_over_the_pool(two_agents):
    ev = checker.Evaluator(two_agents)
    full = two_agents.space.full_mask
    for m, phi in checker.extension_pool(two_agents, 3):
        if m == full:
            for a in two_agents.belief:
                assert checker.valid_in_model(two_agents, parse(f"B[{a}] ({render(phi)})"), ev)
            for a in two_agents.knowledge:
                assert checker.valid_in_model(two_agents, parse(f"K[{a}] ({render(phi)})"), ev)


def test_connective_equations_on_random_formulas():
    rng = random.Random(17)
    for _ in range(60):
        m = random_model(rng, rng.randint(1, 5), 2, 2)
        ev = checker.Evaluator(m)
        full = m.space.full_mask
        for _ in range(10):
            a = random_formula(rng, m.atoms, list(m.belief), list(m.knowledge), 3)
            b = random_formula(rng, m.atoms, list(m.belief), list(m.knowledge), 3)
            ma, mb = ev.mask(a), ev.mask(b)
            assert ev.mask(parse(f"~({render(a)})")) == full & ~ma
            assert ev.mask(parse(f"({render(a)}) & ({render(b)})")) == ma & mb
            assert (ev.mask(parse(f"({render(a)}) -> ({render(b)})"))
                    == ev.mask(parse(f"~({render(a)}) | ({render(b)})")))
            assert ev.mask(parse("false")) == 0


def test_agrees_with_naive_oracle():
    rng = random.Random(99)
    checked = 0
    for _ in range(40):
        m = random_model(rng, rng.randint(1, 5), rng.randint(1, 3), rng.randint(1, 2))
        ev = checker.Evaluator(m)
        for _ in range(15):
            phi = random_formula(rng, m.atoms, list(m.belief), list(m.knowledge), 4)
            got = set(checker.extension(m, phi, ev).states)
            want = {m.space.states[s] for s in O.truth_set(m, phi)}
            assert got == want, render(phi)
            checked += 1
    assert checked == 600


def test_random_models_satisfy_all_asserted_laws():
    rng = random.Random(2)
    for _ in range(25):
        m = random_model(rng, rng.randint(1, 4), rng.randint(1, 3), rng.randint(1, 2))
        reports = checker.law_suite(m, depth=2) + checker.iff_condition_checks(m, depth=2)
        bad = checker.first_failure(reports)
        assert bad is None, bad and bad.as_dict()
