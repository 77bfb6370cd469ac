"""The benchmark systems: dial, combination lock, concurrent adding
puzzle, and the water-treatment process-1 model, together with their
algebraic operators, property families, and attacks.

All continuous quantities in the water model are scaled integers in
hundredths, so every step count and equality test is exact.
"""

from .attacker import Attack
from .closure import EQUIVARIANT, AlgebraicOperator
from .coalgebra import System
from .formula import ASSERT, REFUTE, TABLE, Property
from .predicate import (BoolSpace, Complement, FiniteSet, FiniteSpace,
                        Interval, LinearLink, Product, ProductSpace,
                        ScaledLine, Universe)


def _always(table, pred, input_space_pred):
    return table.mk_always(table.mk_obs(pred), input_space_pred)


# ---------------------------------------------------------------------------
# Dial
# ---------------------------------------------------------------------------

def dial_model():
    """Ten states 0..9, one input, +1 mod 10, observation = the value."""
    space = FiniteSpace(frozenset(range(10)))

    def observe(x):
        return FiniteSet(space, frozenset((x,)))

    def step(x, i):
        return (x + 1) % 10

    sys = System("dial", ("*",), observe, step, observation_space=space,
                 observe_value=lambda x: x)
    sys.input_pred = Universe(FiniteSpace(frozenset(sys.inputs)))
    return sys


def dial_eventually(sys, n, table=TABLE):
    """F <.= n> as Refute(G <. != n>)."""
    body = _always(table, Complement(sys.observation_space,
                                     FiniteSet(sys.observation_space,
                                               frozenset((n,)))),
                   sys.input_pred)
    return Property("F[.=%d]" % n, REFUTE, body)


# ---------------------------------------------------------------------------
# Combination lock
# ---------------------------------------------------------------------------

def lock_model(digits=4):
    """digits dials; input i increments dial i.  A code is encoded as the
    integer whose decimal digits are the dials (most significant = dial
    0), so states are dense 0..10^digits-1 and the observation is the
    displayed code itself."""
    n = 10 ** digits
    space = FiniteSpace(frozenset(range(n)))
    inputs = tuple(range(digits))
    place = [10 ** (digits - 1 - i) for i in range(digits)]

    succ = []
    for x in range(n):
        row = []
        for i in inputs:
            d = (x // place[i]) % 10
            row.append(x + (((d + 1) % 10) - d) * place[i])
        succ.append(tuple(row))

    def observe(x):
        return FiniteSet(space, frozenset((x,)))

    def step(x, i):
        return succ[x][i]

    sys = System("lock%d" % digits, inputs, observe, step,
                 observation_space=space, successors=succ.__getitem__,
                 observe_value=lambda x: x)
    sys.input_pred = Universe(FiniteSpace(frozenset(inputs)))
    sys.digits = digits
    sys.state_count = n
    return sys


def lock_decode(x, digits=4):
    return tuple((x // 10 ** (digits - 1 - i)) % 10 for i in range(digits))


def lock_encode(code):
    out = 0
    for d in code:
        out = out * 10 + d
    return out


def lock_operators(digits=4, names=None):
    """The dial symmetries: rotations of the dials and increments of the
    last dial, all equivariant bijections that commute with stepping.
    Realized as precomputed permutation tables of the integer codes."""
    n = 10 ** digits

    def table_op(label, code_map):
        arr = [lock_encode(code_map(lock_decode(x, digits)))
               for x in range(n)]
        get = arr.__getitem__
        return AlgebraicOperator(label, get, get, EQUIVARIANT)

    ops = {}
    for k in range(1, digits):
        label = "shift" if k == 1 else "shift%d" % k
        ops[label] = table_op(label, lambda c, k=k: c[-k:] + c[:-k])
    for k in range(1, 10):
        label = "add" if k == 1 else "add%d" % k
        ops[label] = table_op(label, lambda c, k=k: c[:-1] + ((c[-1] + k) % 10,))
    if names is None:
        return ops
    unknown = [m for m in names if m not in ops]
    if unknown:
        raise KeyError("unknown operators: %s" % ", ".join(unknown))
    return {m: ops[m] for m in names}


def lock_properties(sys, table=TABLE):
    """[Refute(G <. != n>) for n ascending]: 'some input sequence shows n'."""
    props = []
    for x in sorted(sys.observation_space.values):
        body = _always(table,
                       Complement(sys.observation_space,
                                  FiniteSet(sys.observation_space,
                                            frozenset((x,)))),
                       sys.input_pred)
        props.append(Property("F[.=%0*d]" % (sys.digits, x), REFUTE, body))
    return props


# ---------------------------------------------------------------------------
# Concurrent adding puzzle
# ---------------------------------------------------------------------------

Q, R, S = "Q", "R", "S"


def puzzle_model(max_c):
    """Two processes repeatedly read / add / write a shared accumulator c
    (initially 1); a process may start a new read only while c < max_c.
    State = ((pc1, n1), (pc2, n2), c); inputs 1 and 2 pick the process.
    """
    space = ScaledLine(1.0)

    def local(pc, n, c):
        if pc == Q:
            if c < max_c:
                return (R, c)
            return (pc, n)
        if pc == R:
            return (S, n + c)
        return (Q, n)  # S: leaves S, c is written back by the product

    def step(x, i):
        p1, p2, c = x
        if i == 1:
            np = local(p1[0], p1[1], c)
            nc = p1[1] if p1[0] == S else c
            return (np, p2, nc)
        np = local(p2[0], p2[1], c)
        nc = p2[1] if p2[0] == S else c
        return (p1, np, nc)

    def observe(x):
        return FiniteSet(space, frozenset((x[2],)))

    sys = System("puzzle(MAX=%d)" % max_c, (1, 2), observe, step,
                 observation_space=space, observe_value=lambda x: x[2])
    sys.input_pred = Universe(FiniteSpace(frozenset((1, 2))))
    sys.initial = ((Q, 0), (Q, 0), 1)
    sys.max_c = max_c
    return sys


def puzzle_swap():
    """Swap the two processes: the interleaving product is symmetric, so
    this is an equivariant involution that leaves the accumulator (and
    hence every formula about it) unchanged."""
    def state_map(x):
        return (x[1], x[0], x[2])

    return AlgebraicOperator("swap", state_map, lambda v: v, EQUIVARIANT)


def puzzle_property(sys, n, table=TABLE):
    """F <.= n>: the accumulator eventually shows n."""
    body = _always(table, Complement(sys.observation_space,
                                     FiniteSet(sys.observation_space,
                                               frozenset((n,)))),
                   sys.input_pred)
    return Property("F[.=%d]" % n, REFUTE, body)


# ---------------------------------------------------------------------------
# Water treatment, process 1
# ---------------------------------------------------------------------------

class SwatParams:
    """All quantities in quanta (hundredths by default).

    The tank gains `inflow` per step while the valve is open and always
    loses `outflow`; level readings lag one step behind the true level;
    the valve controller reads the stored level sensor and opens below
    `lo`, closes above `hi`, holds in between.
    """

    def __init__(self, g=5, quantum=0.01, inflow=0.46, outflow=0.44,
                 lo=500, hi=800, capacity=1200, level_lo=200, level_hi=1000,
                 pressure_lo=1000, pressure_hi=9000):
        self.g = g
        self.quantum = quantum
        scale = round(1 / quantum)
        self.scale = scale
        self.inflow_q = round(inflow * scale)
        self.outflow_q = round(outflow * scale)
        self.lo_q = lo * scale
        self.hi_q = hi * scale
        self.capacity_q = capacity * scale
        self.level_lo_q = level_lo * scale
        self.level_hi_q = level_hi * scale
        self.pressure_lo_q = pressure_lo * scale
        self.pressure_hi_q = pressure_hi * scale


def swat_model(params=None):
    """State (t, lit101, hg101, valve): true level, stored level reading,
    stored pressure reading, valve state.  Observation: (true level,
    true pressure g*t, whether the stored readings are hydrostatically
    consistent)."""
    p = params or SwatParams()
    space = ProductSpace((ScaledLine(p.quantum), ScaledLine(p.quantum),
                          BoolSpace()))
    g = p.g

    def observe(x):
        t, lit, hg, valve = x
        return FiniteSet(space, frozenset(((t, g * t, hg == g * lit),)))

    def step(x, i):
        t, lit, hg, valve = x
        inflow = p.inflow_q if valve else 0
        t2 = t + inflow - p.outflow_q
        if t2 < 0:
            t2 = 0
        elif t2 > p.capacity_q:
            t2 = p.capacity_q
        # sensors lag one step: the new readings report the old level
        lit2 = t
        hg2 = g * t
        # the controller acts on the stored reading
        if lit < p.lo_q:
            valve2 = True
        elif lit > p.hi_q:
            valve2 = False
        else:
            valve2 = valve
        return (t2, lit2, hg2, valve2)

    def observe_value(x):
        t, lit, hg, valve = x
        return (t, g * t, hg == g * lit)

    sys = System("swat", ("*",), observe, step, observation_space=space,
                 observe_value=observe_value)
    sys.input_pred = Universe(FiniteSpace(frozenset(sys.inputs)))
    sys.params = p
    sys.initial = (500 * p.scale, 500 * p.scale, g * 500 * p.scale, True)
    return sys


def swat_properties(sys, table=TABLE):
    """Hydro, Lvl, Hg, Con.  Hydro (pressure = g * level, enforced by
    physics) is bundled with Lvl into Lvl's proof obligation: it costs
    nothing extra and is exactly what lets Hg be implied."""
    p = sys.params
    space = sys.observation_space
    U = Universe

    def comp(idx, pred):
        comps = [U(space.components[j]) for j in range(3)]
        comps[idx] = pred
        return Product(space, tuple(comps))

    line = space.components[0]
    hydro = LinearLink(space, src=0, dst=1, factor=p.g)
    lvl = table.mk_and([
        table.mk_obs(comp(0, Interval(line, p.level_lo_q, p.level_hi_q))),
    ])
    hg = table.mk_obs(comp(1, Interval(space.components[1],
                                       p.pressure_lo_q, p.pressure_hi_q)))
    con = table.mk_obs(comp(2, FiniteSet(space.components[2],
                                         frozenset((True,)))))
    hydro_f = table.mk_obs(hydro)
    ip = sys.input_pred
    props = {
        "Hydro": Property("Hydro", ASSERT, table.mk_always(hydro_f, ip)),
        "Lvl": Property("Lvl", ASSERT,
                        table.mk_always(table.mk_and([hydro_f, lvl]), ip)),
        "Hg": Property("Hg", ASSERT, table.mk_always(hg, ip)),
        "Con": Property("Con", ASSERT, table.mk_always(con, ip)),
    }
    return props


def swat_attacks(sys, b_bias=200, b_stealth=500):
    """Sensor-spoofing attacks; the valve component is untouched.

    surge pins the level reading at the maximum; bias offsets it;
    stealthy offsets it and fakes a consistent pressure reading."""
    p = sys.params
    cap = p.capacity_q
    bq = b_bias * p.scale
    sq = b_stealth * p.scale
    g = p.g

    def surge(x):
        t, lit, hg, valve = x
        return (t, cap, hg, valve)

    def bias(x):
        t, lit, hg, valve = x
        return (t, lit + bq, hg, valve)

    def stealthy(x):
        t, lit, hg, valve = x
        return (t, lit + sq, hg + g * sq, valve)

    return {
        "alpha": Attack("alpha", state_transform=surge),
        "beta": Attack("beta", state_transform=bias),
        "gamma": Attack("gamma", state_transform=stealthy),
    }


def attack_kinds(sys):
    """Attack constructors available for a model, keyed by kind name;
    each takes a params dict (used by the attacker configuration file)."""
    if sys.name.startswith("swat"):
        def surge(params):
            return swat_attacks(sys)["alpha"]

        def bias(params):
            return swat_attacks(sys, b_bias=int(params.get("b", 200)))["beta"]

        def stealthy(params):
            return swat_attacks(sys,
                                b_stealth=int(params.get("b", 500)))["gamma"]

        return {"surge": surge, "bias": bias, "stealthy": stealthy}
    if sys.name == "dial":
        space = sys.observation_space

        def force_obs(params):
            v = int(params.get("value", 0))
            forced = FiniteSet(space, frozenset((v,)))
            return Attack("force_obs[%d]" % v, obs_transform=lambda p: forced)

        def force_state(params):
            v = int(params.get("value", 0))
            return Attack("force_state[%d]" % v, state_transform=lambda x: v)

        return {"force_obs": force_obs, "force_state": force_state}
    return {}
