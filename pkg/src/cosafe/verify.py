"""The core worklist verifier and the multi-property driver.

One run decides whether a state satisfies a safety formula by trying to
build a simulation up-to-precongruence: a worklist (a stack, so the
search is depth-first) of (state, formula) pairs is processed one at a
time; a pair already derivable from accumulated knowledge is skipped, a
pair whose closure meets the failing set refutes the query, an
observation mismatch is a direct counterexample, and otherwise the pair
joins the tentative satisfying relation and its successors are scheduled
(suspected-failing successors are pushed on top so the counterexample
path is prioritized).

On success the tentative relation is committed to the knowledge base; on
failure it is discarded and only the direct counterexample persists --
so failing properties re-explore states across runs, which is exactly
what the exploration statistics measure.
"""

from collections import deque
from dataclasses import dataclass, field

from .closure import BOTH, IMAGE, LITERAL, ClosureEngine
from .formula import ASSERT, REFUTE, TABLE
from .predicate import FiniteSet, member, member_fn, subset

HOLDS = "Holds"
FAILS = "Fails"
INFERRED_HOLDS = "InferredHolds"
INFERRED_FAILS = "InferredFails"
UNKNOWN = "Unknown"

DEFAULT_MAX_PAIRS = 10 ** 7


@dataclass
class Stats:
    pairs_explored: int = 0
    closure_hits: int = 0
    subset_checks: int = 0


@dataclass
class Verdict:
    outcome: str
    counterexample: object = None
    witness: object = None
    stats: Stats = field(default_factory=Stats)

    def holds(self):
        return self.outcome in (HOLDS, INFERRED_HOLDS)

    def fails(self):
        return self.outcome in (FAILS, INFERRED_FAILS)

    def inferred(self):
        return self.outcome in (INFERRED_HOLDS, INFERRED_FAILS)


class ResourceLimit(Exception):
    pass


def _observe_member_fn(obs_pred):
    """Fast membership test for the common singleton-observation case."""
    def check(state_obs):
        if isinstance(state_obs, FiniteSet):
            return all(member(obs_pred, v) for v in state_obs.values)
        return subset(state_obs, obs_pred)
    return check


def verify(sys, x0, psi0, kb, cfg, engine=None, max_pairs=DEFAULT_MAX_PAIRS):
    """Decide (sys, x0) |= psi0 under the given knowledge and closure
    configuration.  Returns (Verdict, kb); kb is updated per the
    algorithm's contract (commit R on success, record only direct
    counterexamples in F on failure)."""
    table = cfg.table
    if engine is None:
        engine = ClosureEngine(cfg)
        engine.load(kb)

    stats = Stats()
    reach = table.reachable(psi0, sys.inputs)
    implied = {f: cfg.implied_by(f) for f in reach}
    implicants = {f: cfg.implicants_of(f) for f in reach}
    obs_check = {f: _observe_member_fn(table.obs(f)) for f in reach}
    next_of = {f: tuple(table.next(f, i) for i in sys.inputs) for f in reach}

    # Failure knowledge is frozen for the duration of one run (the run
    # ends the moment anything is added), so snapshot the failing-state
    # sets per reachable formula.
    fail_states = {}
    for f in reach:
        s = set()
        for g in implied[f]:
            s |= engine.fail_index.get(g, set())
        fail_states[f] = s or None

    mode = cfg.failure_mode
    use_lit = mode == LITERAL or (mode == BOTH and
                                  (engine.literal_ops or cfg.state_sim))
    use_img = mode in (IMAGE, BOTH)

    def suspect_failing(pair):
        if use_img:
            s = fail_states[pair[1]]
            if s is not None and pair[0] in s:
                return True
        if use_lit:
            return engine.fail_hit_literal(pair)
        return False

    # Operators eligible for the tentative-relation closure: equivariant
    # only (skipping an unexplored subtree on the strength of an
    # unconfirmed pair needs an operator that also reflects
    # satisfaction).  Operators whose formula images can never match a
    # query of this run are dropped up front -- an exact optimization.
    queryable = set()
    for f in reach:
        queryable |= implicants[f]
    tent_ops = []
    for op in cfg.operators:
        if not (op.preserves() and op.reflects()):
            continue
        try:
            if any(op.map_formula(f) in queryable for f in reach):
                tent_ops.append(op)
        except ValueError:
            pass
    tent_depth = cfg.depth

    sat_committed = engine.sat_index
    state_sim = cfg.state_sim

    def committed_sat(x, want):
        xs = (x,) if not state_sim else (x, *state_sim.get(x, ()))
        for y in xs:
            have = sat_committed.get(y)
            if have and not want.isdisjoint(have):
                return True
        return False

    tent_index = {}
    processed = set()
    todo = deque([(x0, psi0)])
    enqueued = {(x0, psi0)}
    observe = sys.observe
    successors = sys.successors
    check_committed = bool(sat_committed)

    # A formula whose obligation is itself after every input (e.g. any
    # G-formula over the full alphabet) turns the run into a pure state
    # search: no knowledge can fire mid-run beyond the precomputed
    # failing-state set, so a specialized loop applies.
    if (len(reach) == 1 and not tent_ops and not check_committed
            and not use_lit and implicants[psi0] == {psi0}):
        return _verify_single(sys, x0, psi0, kb, engine, stats,
                              fail_states[psi0], obs_check[psi0], max_pairs)

    def finish(outcome, counterexample=None, witness=None):
        v = Verdict(outcome, counterexample, witness, stats)
        if outcome == HOLDS:
            for pair in processed:
                kb.R.add(pair)
                engine.note_satisfied(pair)
        elif outcome == FAILS:
            kb.F.add(counterexample)
            engine.note_failed(counterexample)
        return (v, kb)

    while todo:
        pair = todo.pop()
        if pair in processed:
            continue
        x, f = pair
        # suspected failing: closure of the pair meets F
        if suspect_failing(pair):
            stats.pairs_explored += 1
            stats.closure_hits += 1
            return finish(INFERRED_FAILS, witness=pair)
        # already derivable from satisfying knowledge?
        want = implicants[f]
        ti = tent_index.get(x)
        if ti is not None and not want.isdisjoint(ti):
            stats.closure_hits += 1
            continue
        if check_committed and committed_sat(x, want):
            stats.closure_hits += 1
            continue
        stats.pairs_explored += 1
        if stats.pairs_explored > max_pairs:
            return finish(UNKNOWN)
        # observation inclusion
        stats.subset_checks += 1
        if not obs_check[f](observe(x)):
            return finish(FAILS, counterexample=pair)
        # tentatively satisfying; schedule successors
        processed.add(pair)
        ts = tent_index.setdefault(x, set())
        ts.add(f)
        if tent_ops:
            frontier = [pair]
            for _ in range(tent_depth):
                nxt = []
                for p in frontier:
                    for op in tent_ops:
                        q = op.apply(p)
                        tent_index.setdefault(q[0], set()).add(q[1])
                        nxt.append(q)
                frontier = nxt
        nf = next_of[f]
        for idx, y in enumerate(successors(x)):
            g = nf[idx]
            sp = (y, g)
            if suspect_failing(sp):
                # prioritized counterexample path: push on top
                todo.append(sp)
                break
            if sp in processed:
                continue
            tj = tent_index.get(y)
            wg = implicants[g]
            if tj is not None and not wg.isdisjoint(tj):
                stats.closure_hits += 1
                continue
            if check_committed and committed_sat(y, wg):
                stats.closure_hits += 1
                continue
            if sp not in enqueued:
                enqueued.add(sp)
                todo.append(sp)
    return finish(HOLDS)


def _verify_single(sys, x0, f, kb, engine, stats, fail_set, obs_check,
                   max_pairs):
    """Specialized run for a self-obligating formula: a FIFO search over
    states only, semantically identical to the general loop (same pop
    order, same statistics, same knowledge-base updates)."""
    ov = sys.observe_value
    if ov is not None:
        m = member_fn(engine.cfg.table.obs(f))

        def ok(x):
            return m(ov(x))
    else:
        observe = sys.observe

        def ok(x):
            return obs_check(observe(x))

    successors = sys.successors
    n_states = getattr(sys, "state_count", None)
    dense = n_states is not None and isinstance(x0, int)
    pops = 0
    subs = 0

    def close(outcome, counterexample=None, witness=None, hit=0):
        stats.pairs_explored += pops
        stats.subset_checks += subs
        stats.closure_hits += hit
        if outcome == HOLDS:
            if dense:
                it = (i for i in range(n_states) if done[i])
            else:
                it = iter(done)
            for x in it:
                kb.R.add((x, f))
                engine.note_satisfied((x, f))
        elif outcome == FAILS:
            kb.F.add(counterexample)
            engine.note_failed(counterexample)
        return (Verdict(outcome, counterexample, witness, stats), kb)

    todo = [x0]
    pop = todo.pop
    append = todo.append
    if dense:
        done = bytearray(n_states)
        seen = bytearray(n_states)
        seen[x0] = 1
        fs = bytearray(n_states)
        for s in (fail_set or ()):
            fs[s] = 1
        while todo:
            x = pop()
            if done[x]:
                continue
            if fs[x]:
                pops += 1
                return close(INFERRED_FAILS, witness=(x, f), hit=1)
            pops += 1
            if pops > max_pairs:
                return close(UNKNOWN)
            subs += 1
            if not ok(x):
                return close(FAILS, counterexample=(x, f))
            done[x] = 1
            for y in successors(x):
                if fs[y]:
                    append(y)
                    break
                if not seen[y]:
                    seen[y] = 1
                    append(y)
        return close(HOLDS)

    done = set()
    seen = {x0}
    fs = fail_set or frozenset()
    while todo:
        x = pop()
        if x in done:
            continue
        if x in fs:
            pops += 1
            return close(INFERRED_FAILS, witness=(x, f), hit=1)
        pops += 1
        if pops > max_pairs:
            return close(UNKNOWN)
        subs += 1
        if not ok(x):
            return close(FAILS, counterexample=(x, f))
        done.add(x)
        for y in successors(x):
            if y in fs:
                append(y)
                break
            if y not in seen:
                seen.add(y)
                append(y)
    return close(HOLDS)


def _negate(outcome):
    return {HOLDS: FAILS, FAILS: HOLDS,
            INFERRED_HOLDS: INFERRED_FAILS, INFERRED_FAILS: INFERRED_HOLDS,
            UNKNOWN: UNKNOWN}[outcome]


def check_property(sys, x0, prop, kb, cfg, engine=None,
                   max_pairs=DEFAULT_MAX_PAIRS):
    """Check a Property: Assert delegates to verify, Refute negates the
    inner outcome; the inner counterexample becomes the witness of the
    outer satisfaction."""
    inner, kb = verify(sys, x0, prop.body, kb, cfg, engine=engine,
                       max_pairs=max_pairs)
    if prop.polarity == ASSERT:
        return inner, kb
    out = Verdict(_negate(inner.outcome), None,
                  inner.counterexample or inner.witness, inner.stats)
    return out, kb


def check_many(sys, x0, props, kb, cfg, max_pairs=DEFAULT_MAX_PAIRS):
    """Check an ordered list of properties, threading the knowledge base.

    Each property is first pre-screened at the initial pair against the
    closure of accumulated knowledge; a hit yields an Inferred verdict
    with no exploration (recorded as 1 pair).  Returns (results, kb,
    inferred_count) where results is a list of (Property, Verdict)."""
    engine = ClosureEngine(cfg)
    engine.load(kb)
    results = []
    inferred = 0
    for prop in props:
        pair = (x0, prop.body)
        if engine.sat_hit(pair):
            inner = Verdict(INFERRED_HOLDS, witness=pair,
                            stats=Stats(pairs_explored=1, closure_hits=1))
        elif engine.fail_hit(pair):
            inner = Verdict(INFERRED_FAILS, witness=pair,
                            stats=Stats(pairs_explored=1, closure_hits=1))
        else:
            inner, kb = verify(sys, x0, prop.body, kb, cfg, engine=engine,
                               max_pairs=max_pairs)
        if prop.polarity == REFUTE:
            verdict = Verdict(_negate(inner.outcome), None,
                              inner.counterexample or inner.witness,
                              inner.stats)
        else:
            verdict = inner
        if verdict.inferred():
            inferred += 1
        results.append((prop, verdict))
    return results, kb, inferred


def order_properties(props, implication):
    """Sort proof obligations so implicants precede implicands.

    Properties connected by implication form groups; each group is
    topologically ordered (stable on ties) and groups with actual
    implication structure come first, so their early successes feed the
    closure.  Properties incomparable to everything keep input order."""
    impl = set(implication or ())
    n = len(props)
    bodies = [p.body for p in props]

    def implies(a, b):
        return (bodies[a], bodies[b]) in impl

    strict = [[False] * n for _ in range(n)]
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for a in range(n):
        for b in range(n):
            if a != b and implies(a, b) and not implies(b, a):
                strict[a][b] = True
                union(a, b)
            elif a != b and implies(a, b):
                union(a, b)  # mutually implying: same group, input order

    groups = {}
    for a in range(n):
        groups.setdefault(find(a), []).append(a)
    multi = [g for g in groups.values() if len(g) > 1]
    single = [g for g in groups.values() if len(g) == 1]
    multi.sort(key=lambda g: min(g))
    single.sort(key=lambda g: g[0])

    ordered = []
    for g in multi + single:
        members = list(g)
        placed = []
        while members:
            for a in members:
                if not any(strict[b][a] for b in members if b != a):
                    placed.append(a)
                    members.remove(a)
                    break
            else:  # cycle: collapse to input order
                placed.extend(members)
                members = []
        ordered.extend(placed)
    return [props[a] for a in ordered]
