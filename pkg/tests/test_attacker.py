import json

import pytest

from cosafe.attacker import (EQUAL, INCOMPARABLE, LESS_CAPABLE, MORE_CAPABLE,
                             Attack, Attacker, CapabilityReport, apply_attack,
                             capabilities, compare, hasse_dot, hierarchy,
                             reports_json)
from cosafe.closure import ClosureConfig, KnowledgeBase
from cosafe.coalgebra import behaviour_prefix
from cosafe.formula import formula_similarity
from cosafe.models import (attack_kinds, dial_model, swat_attacks, swat_model,
                           swat_properties)
from cosafe.predicate import FiniteSet
from cosafe.verify import order_properties


def test_attack_transforms_compose_after_step():
    d = dial_model()
    atk = Attack("pin3", state_transform=lambda x: 3)
    a = apply_attack(d, atk)
    # the initial observation is truthful; tampering shows from the
    # successor on
    assert a.observe(7) == d.observe(7)
    assert a.step(7, "*") == 3
    assert a.observe_value is d.observe_value


def test_obs_attack_disables_raw_observation_path():
    d = dial_model()
    forced = FiniteSet(d.observation_space, frozenset((0,)))
    a = apply_attack(d, Attack("blind", obs_transform=lambda p: forced))
    assert a.observe_value is None
    assert a.observe(7) == forced
    assert a.step(7, "*") == 8  # transitions untouched


def test_identity_attack_preserves_behaviour():
    d = dial_model()
    a = apply_attack(d, Attack("noop"))
    for x in range(10):
        assert behaviour_prefix(a, x, 4) == behaviour_prefix(d, x, 4)


def test_obs_forcing_equals_transition_forcing_from_zero():
    # two different tamperings with the same observable effect: forcing
    # every reading to 0 versus redirecting every transition to state 0
    d = dial_model()
    kinds = attack_kinds(d)
    alpha = apply_attack(d, kinds["force_obs"]({"value": 0}))
    beta = apply_attack(d, kinds["force_state"]({"value": 0}))
    for k in range(6):
        assert behaviour_prefix(alpha, 0, k) == behaviour_prefix(beta, 0, k)
    # from a nonzero start they differ at depth 0 already
    assert behaviour_prefix(alpha, 5, 0) != behaviour_prefix(beta, 5, 0)


def swat_setup():
    s = swat_model()
    props = swat_properties(s)
    plist = [props["Lvl"], props["Hg"], props["Con"]]
    impl = formula_similarity([p.body for p in plist], s.inputs)
    cfg = ClosureConfig(implication=impl)
    return s, order_properties(plist, impl), cfg


@pytest.fixture(scope="module")
def swat_reports():
    s, plist, cfg = swat_setup()
    atk = swat_attacks(s)
    reports = []
    for name in ("alpha", "beta", "gamma"):
        attacker = Attacker(name, [atk[name]])
        reports.append(capabilities(attacker, s, s.initial, plist, cfg))
    return reports


def test_swat_capability_sets(swat_reports):
    caps = {r.attacker_name: r.capability_set for r in swat_reports}
    assert caps["alpha"] == {"Lvl", "Hg", "Con"}
    assert caps["beta"] == {"Con"}
    assert caps["gamma"] == {"Lvl", "Hg"}
    for r in swat_reports:
        assert not r.undetermined


def test_swat_hierarchy(swat_reports):
    h = hierarchy(swat_reports)
    assert h["edges"] == [("beta", "alpha"), ("gamma", "alpha")]
    assert h["hasse"] == [("beta", "alpha"), ("gamma", "alpha")]
    assert h["matrix"][("beta", "gamma")] == INCOMPARABLE
    assert h["matrix"][("alpha", "beta")] == MORE_CAPABLE
    assert h["filter"]("Con") == ["alpha", "beta"]
    assert h["filter"]("Lvl") == ["alpha", "gamma"]


def test_unattacked_swat_satisfies_all(swat_reports):
    s, plist, cfg = swat_setup()
    rep = capabilities(Attacker("none", [Attack("id")]), s, s.initial,
                       plist, cfg)
    assert rep.capability_set == frozenset()


def test_compare_cases():
    def rep(name, caps):
        return CapabilityReport(name, caps, {})

    a = rep("a", {"P", "Q"})
    b = rep("b", {"P"})
    c = rep("c", {"Q", "R"})
    assert compare(a, a) == EQUAL
    assert compare(b, a) == LESS_CAPABLE
    assert compare(a, b) == MORE_CAPABLE
    assert compare(a, c) == INCOMPARABLE
    with pytest.raises(ValueError):
        compare(a, b, property_universe=("P",))


def test_hierarchy_transitive_reduction():
    def rep(name, caps):
        return CapabilityReport(name, caps, {})

    rs = [rep("a", {"P"}), rep("b", {"P", "Q"}), rep("c", {"P", "Q", "R"})]
    h = hierarchy(rs)
    assert ("a", "c") in h["edges"]
    assert h["hasse"] == [("a", "b"), ("b", "c")]


def test_attacker_requires_name():
    with pytest.raises(ValueError):
        Attacker("")


def test_dot_and_json_outputs(swat_reports):
    h = hierarchy(swat_reports)
    dot = hasse_dot(swat_reports, h["hasse"])
    assert '"beta" -> "alpha";' in dot
    assert '"gamma" -> "alpha";' in dot
    doc = json.loads(reports_json(swat_reports, h["hasse"]))
    assert [list(e) for e in h["hasse"]] == doc["hasse"]
    by_name = {r["attacker"]: r for r in doc["reports"]}
    assert by_name["beta"]["capabilities"] == ["Con"]
    assert by_name["beta"]["matrix"]["beta"]["Hg"]["outcome"] == \
        "InferredHolds"
