import pytest

from cosafe.closure import ClosureConfig, KnowledgeBase
from cosafe.coalgebra import System
from cosafe.formula import ASSERT, REFUTE, TABLE, Property, formula_similarity
from cosafe.models import (dial_model, dial_eventually, lock_model,
                           lock_operators, lock_properties, swat_model,
                           swat_properties)
from cosafe.predicate import Complement, FiniteSet, member
from cosafe.verify import (FAILS, HOLDS, INFERRED_FAILS, INFERRED_HOLDS,
                           UNKNOWN, Verdict, check_many, check_property,
                           order_properties, verify)


def neq_body(sys, v):
    space = sys.observation_space
    return TABLE.mk_always(
        TABLE.mk_obs(Complement(space, FiniteSet(space, frozenset((v,))))),
        sys.input_pred)


def fresh(ops=(), **kw):
    return KnowledgeBase(), ClosureConfig(operators=ops, **kw)


def test_dial_always_tt_holds_and_explores_all_states():
    d = dial_model()
    kb, cfg = fresh()
    body = TABLE.mk_always(TABLE.tt(d.observation_space), d.input_pred)
    v, kb = verify(d, 0, body, kb, cfg)
    assert v.outcome == HOLDS
    assert v.stats.pairs_explored == 10
    assert len(kb.R) == 10


def test_dial_never_n_fails_with_counterexample():
    d = dial_model()
    kb, cfg = fresh()
    body = neq_body(d, 7)
    v, kb = verify(d, 0, body, kb, cfg)
    assert v.outcome == FAILS
    assert v.counterexample == (7, body)
    assert kb.F == {(7, body)}
    assert not kb.R  # tentative pairs are discarded on failure


def test_dial_eventually_property_negates():
    d = dial_model()
    kb, cfg = fresh()
    v, kb = check_property(d, 0, dial_eventually(d, 7), kb, cfg)
    assert v.outcome == HOLDS
    assert v.witness == (7, neq_body(d, 7))


def test_refute_of_holding_formula_fails():
    d = dial_model()
    kb, cfg = fresh()
    body = TABLE.mk_always(TABLE.tt(d.observation_space), d.input_pred)
    v, kb = check_property(d, 0, Property("p", REFUTE, body), kb, cfg)
    assert v.outcome == FAILS


def test_unknown_on_pair_budget():
    lock = lock_model(4)
    kb, cfg = fresh()
    v, kb = verify(lock, 0, neq_body(lock, 9999), kb, cfg, max_pairs=50)
    assert v.outcome == UNKNOWN
    assert not kb.R and not kb.F


def brute_force_holds(sys, states, x0, psi):
    """The greatest simulation between system states and formula states,
    computed by naive fixpoint refinement."""
    reach = TABLE.reachable(psi, sys.inputs)
    rel = {(x, f) for x in states for f in reach}
    changed = True
    while changed:
        changed = False
        for (x, f) in sorted(rel, key=repr):
            allowed = TABLE.obs(f)
            ok = all(member(allowed, v)
                     for v in sys.observe(x).values) and all(
                (sys.step(x, i), TABLE.next(f, i)) in rel
                for i in sys.inputs)
            if not ok:
                rel.discard((x, f))
                changed = True
    return (x0, psi) in rel


def test_verify_matches_brute_force_on_dial():
    d = dial_model()
    space = d.observation_space
    formulas = [
        TABLE.mk_always(TABLE.tt(space), d.input_pred),
        neq_body(d, 3),
        TABLE.mk_obs(FiniteSet(space, frozenset((0, 1)))),
        TABLE.mk_box(d.input_pred,
                     TABLE.mk_obs(FiniteSet(space, frozenset((1,))))),
        TABLE.mk_and([
            TABLE.mk_obs(FiniteSet(space, frozenset((0,)))),
            TABLE.mk_box(d.input_pred,
                         TABLE.mk_obs(Complement(
                             space, FiniteSet(space, frozenset((5,)))))),
        ]),
    ]
    for psi in formulas:
        for x0 in range(10):
            kb, cfg = fresh()
            v, _ = verify(d, x0, psi, kb, cfg)
            assert v.holds() == brute_force_holds(d, range(10), x0, psi), \
                (x0, psi)


def test_verify_matches_brute_force_on_small_lock():
    lock = lock_model(2)
    for code in (0, 7, 42, 99):
        kb, cfg = fresh()
        v, _ = verify(lock, 0, neq_body(lock, code), kb, cfg)
        assert v.holds() == brute_force_holds(lock, range(100), 0,
                                              neq_body(lock, code))


def test_knowledge_reuse_infers_shifted_failures():
    lock = lock_model(2)
    ops = lock_operators(2, ("shift",))
    kb, cfg = fresh(tuple(ops.values()))
    props = lock_properties(lock)
    # checking F[.=01] directly records the counterexample at code 1;
    # F[.=10] is its image under the dial swap and is inferred
    v1, kb = check_property(lock, 0, props[1], kb, cfg)
    assert v1.outcome == HOLDS
    results, kb, inferred = check_many(lock, 0, [props[10]], kb, cfg)
    assert results[0][1].outcome == INFERRED_HOLDS
    assert inferred == 1


def test_operator_soundness_differential_small_lock():
    lock = lock_model(2)
    props = lock_properties(lock)

    def run(ops):
        kb = KnowledgeBase()
        cfg = ClosureConfig(operators=ops)
        results, _, _ = check_many(lock, 0, props, kb, cfg)
        return [v.holds() for (_, v) in results]

    plain = run(())
    assert all(plain)  # every code is reachable from 0000
    assert run(tuple(lock_operators(2).values())) == plain


def test_fast_path_agrees_with_general_loop():
    d = dial_model()
    body = neq_body(d, 6)
    kb1, cfg1 = fresh()
    v1, _ = verify(d, 0, body, kb1, cfg1)
    # an extra implication entry disables the specialized loop
    kb2 = KnowledgeBase()
    cfg2 = ClosureConfig(
        implication=[(TABLE.mk_always(TABLE.tt(d.observation_space),
                                      d.input_pred), body)])
    v2, _ = verify(d, 0, body, kb2, cfg2)
    assert v1.outcome == v2.outcome == FAILS
    assert v1.counterexample == v2.counterexample
    assert v1.stats.pairs_explored == v2.stats.pairs_explored


def test_fast_path_without_observe_value():
    d = dial_model()
    plain = System("dial-noval", d.inputs, d.observe, d.step,
                   observation_space=d.observation_space)
    plain.input_pred = d.input_pred
    for target in (0, 6):
        body = neq_body(d, target)
        ka, ca = fresh()
        kbb, cb = fresh()
        va, _ = verify(d, 1, body, ka, ca)
        vb, _ = verify(plain, 1, body, kbb, cb)
        assert va.outcome == vb.outcome
        assert va.stats.pairs_explored == vb.stats.pairs_explored


def test_check_many_prescreen_uses_committed_knowledge():
    d = dial_model()
    body = TABLE.mk_always(TABLE.tt(d.observation_space), d.input_pred)
    prop = Property("p", ASSERT, body)
    kb, cfg = fresh()
    results, kb, inferred = check_many(d, 0, [prop, prop], kb, cfg)
    assert results[0][1].outcome == HOLDS
    assert results[1][1].outcome == INFERRED_HOLDS
    assert results[1][1].stats.pairs_explored == 1
    assert inferred == 1


def test_verdict_helpers():
    assert Verdict(HOLDS).holds() and not Verdict(HOLDS).inferred()
    assert Verdict(INFERRED_HOLDS).holds() and Verdict(INFERRED_HOLDS).inferred()
    assert Verdict(FAILS).fails() and Verdict(INFERRED_FAILS).fails()
    u = Verdict(UNKNOWN)
    assert not u.holds() and not u.fails()


def test_order_properties_puts_implicants_first():
    s = swat_model()
    props = swat_properties(s)
    impl = formula_similarity([p.body for p in props.values()], s.inputs)
    ordered = order_properties([props["Con"], props["Hg"], props["Lvl"]],
                               impl)
    names = [p.name for p in ordered]
    assert names.index("Lvl") < names.index("Hg")
    assert names == ["Lvl", "Hg", "Con"]


def test_order_properties_stable_without_implications():
    d = dial_model()
    props = [dial_eventually(d, n) for n in (4, 1, 8)]
    assert order_properties(props, frozenset()) == props
