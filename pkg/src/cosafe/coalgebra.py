"""Systems as coalgebras: an observation map into predicates plus an
input-indexed transition map, with adapters and finite behaviour prefixes.

A System is deliberately opaque to the verification engine: states only
need to be hashable and equality-comparable, `observe` returns a
Predicate over the observation space, and `step` is total on the input
alphabet for every reachable state.
"""

from .predicate import FiniteSet, Predicate


class UnknownInput(ValueError):
    pass


class System:
    """A system (X, observe, step) over a finite input alphabet.

    `successors`, when available, returns all successor states of x in
    input order with a single call; the verifier uses it as a fast path.
    """

    def __init__(self, name, inputs, observe, step, observation_space=None,
                 successors=None, observe_value=None):
        self.name = name
        self.inputs = tuple(inputs)
        self._input_set = set(self.inputs)
        self.observe = observe
        self.step = step
        self.observation_space = observation_space
        if successors is not None:
            # shadow the method with the provided callable (hot path)
            self.successors = successors
        # observe_value, when set, returns the single concrete observation
        # of a state (observe must then be FiniteSet({observe_value(x)}))
        self.observe_value = observe_value

    def successors(self, x):
        step = self.step
        return tuple(step(x, i) for i in self.inputs)

    def check_input(self, i):
        if i not in self._input_set:
            raise UnknownInput("input %r not in alphabet %r" % (i, self.inputs))


def iterate(sys, x, w):
    """Left-fold of step over the input sequence w; iterate(x, ()) = x."""
    for i in w:
        sys.check_input(i)
        x = sys.step(x, i)
    return x


class BehaviourPrefix:
    """The observable behaviour of a state truncated at depth k: a map
    from every input sequence of length <= k to an observation predicate."""

    def __init__(self, k, entries):
        self.k = k
        self.entries = dict(entries)
        self._key = (k, frozenset(self.entries.items()))

    def __getitem__(self, w):
        return self.entries[tuple(w)]

    def __eq__(self, other):
        return isinstance(other, BehaviourPrefix) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return "BehaviourPrefix(k=%d, %d entries)" % (self.k, len(self.entries))


def behaviour_prefix(sys, x, k):
    """Depth-k truncation of the observable behaviour of x."""
    if k < 0:
        raise ValueError("depth must be >= 0")
    entries = {}
    frontier = [((), x)]
    entries[()] = sys.observe(x)
    for _ in range(k):
        nxt = []
        for w, y in frontier:
            for i in sys.inputs:
                y2 = sys.step(y, i)
                w2 = w + (i,)
                entries[w2] = sys.observe(y2)
                nxt.append((w2, y2))
        frontier = nxt
    return BehaviourPrefix(k, entries)


class NondetAdapter:
    """A nondeterministic system: step yields a finite set of states."""

    def __init__(self, name, inputs, observe, step_set, observation_space=None):
        self.name = name
        self.inputs = tuple(inputs)
        self.observe = observe
        self.step_set = step_set
        self.observation_space = observation_space


def adapt_nondeterministic(nd):
    """Powerset construction: adapted states are canonical finite sets of
    underlying states, observations are unions, transitions are unions of
    member successor sets."""

    def observe(states):
        space = None
        values = set()
        for x in states:
            p = nd.observe(x)
            if not isinstance(p, FiniteSet):
                raise TypeError("nondeterministic adaptation needs finite "
                                "member observations, got %r" % (p,))
            space = p.space
            values |= p.values
        return FiniteSet(space, frozenset(values))

    def step(states, i):
        out = set()
        for x in states:
            out |= set(nd.step_set(x, i))
        return frozenset(out)

    return System("powerset(%s)" % nd.name, nd.inputs, observe, step,
                  observation_space=nd.observation_space)


def singleton_state(x):
    return frozenset((x,))


class _BehaviourState:
    """A state of the truncated-behaviour system: identity is the depth-k
    behaviour prefix, transitions are inherited from a representative
    underlying state.  For k exceeding the system diameter, prefix
    equality coincides with full behavioural equality, so the transition
    structure is well defined on these equivalence classes."""

    __slots__ = ("prefix", "rep", "_hash")

    def __init__(self, prefix, rep):
        self.prefix = prefix
        self.rep = rep
        self._hash = hash(prefix)

    def __eq__(self, other):
        return isinstance(other, _BehaviourState) and self.prefix == other.prefix

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "BehaviourState(%r)" % (self.rep,)


def behaviour_system(sys, k):
    """The system whose states are depth-k behaviour prefixes of `sys`'s
    states.  Use with k = diameter + 1 so that verdicts transfer.

    Prefixes are built recursively with memoization and interning --
    pref(x, d) = (observe(x), children at d-1) -- so shared sub-behaviours
    are represented once instead of as exponentially many sequences."""
    cache = {}
    memo = {}
    interned = {}
    inputs = sys.inputs
    base_observe = sys.observe
    base_step = sys.step

    def pref(x, d):
        key = (x, d)
        out = memo.get(key)
        if out is None:
            if d == 0:
                node = (base_observe(x),)
            else:
                node = (base_observe(x),
                        tuple(pref(base_step(x, i), d - 1) for i in inputs))
            out = interned.setdefault(node, node)
            memo[key] = out
        return out

    def wrap(x):
        st = cache.get(x)
        if st is None:
            st = _BehaviourState(pref(x, k), x)
            cache[x] = st
        return st

    def observe(st):
        return st.prefix[0]

    def step(st, i):
        return wrap(sys.step(st.rep, i))

    wrapped = System("behaviour(%s,k=%d)" % (sys.name, k), sys.inputs,
                     observe, step, observation_space=sys.observation_space)
    wrapped.wrap = wrap
    return wrapped
