"""Algebraic operators and the precongruence closure.

The closure of a relation on (state, formula) pairs is generated by four
rules: the pair itself (id), images under algebraic operators (c_beta),
left-composition with a state simulation (tu_le), and right-composition
with formula implication (tu_imp).

Two inference services are built on it:

* infer_satisfied: the pair is derivable from a confirmed-satisfying
  pair, using operators that PRESERVE satisfaction.
* infer_failed: either some pair derivable FROM the query (preserving
  operators, forward implication) is known failing -- the "literal"
  direction -- or the query is derivable from a known-failing pair using
  operators that REFLECT satisfaction and reversed implication -- the
  "image" direction.  Both are sound; `both` is the default mode.
"""

from .formula import TABLE
from .predicate import (Complement, FiniteSet, Universe, member)

PRESERVING = "preserving"
REFLECTING = "reflecting"
EQUIVARIANT = "equivariant"

LITERAL = "literal"
IMAGE = "image"
BOTH = "both"


class AlgebraicOperator:
    """A named (state, formula) transformer with a declared soundness
    direction.  Formula transformation is structural: observation
    predicates are imaged under the operator's observation-value map,
    boxes/conjunctions/fixpoints are mapped recursively."""

    def __init__(self, name, state_map, obs_value_map, direction,
                 bijective=True, table=TABLE):
        self.name = name
        self.state_map = state_map
        self.obs_value_map = obs_value_map
        self.direction = direction
        self.bijective = bijective
        self.table = table
        self._fmap_cache = {}

    def __repr__(self):
        return "AlgebraicOperator(%s)" % self.name

    def preserves(self):
        return self.direction in (PRESERVING, EQUIVARIANT)

    def reflects(self):
        return self.direction in (REFLECTING, EQUIVARIANT)

    def image_pred(self, pred):
        if isinstance(pred, (Universe,)):
            return pred
        if isinstance(pred, FiniteSet):
            return FiniteSet(pred.space,
                             frozenset(self.obs_value_map(v) for v in pred.values))
        if isinstance(pred, Complement):
            if not self.bijective:
                raise ValueError("complement image needs a bijective operator")
            return Complement(pred.space, self.image_pred(pred.inner))
        raise ValueError("no image rule for predicate %r under %s"
                         % (pred, self.name))

    def map_formula(self, fid):
        out = self._fmap_cache.get(fid)
        if out is not None:
            return out
        t = self.table
        node = t.node(fid)
        tag = node[0]
        if tag == "tt":
            out = fid
        elif tag == "var":
            out = fid
        elif tag == "obs":
            out = t.mk_obs(self.image_pred(node[1]))
        elif tag == "box":
            out = t.mk_box(node[1], self.map_formula(node[2]))
        elif tag == "and":
            out = t.mk_and([self.map_formula(f) for f in node[1]])
        elif tag == "nu":
            out = t.mk_nu(self.map_formula(node[1]))
        else:
            raise ValueError(tag)
        self._fmap_cache[fid] = out
        return out

    def apply(self, pair):
        x, f = pair
        return (self.state_map(x), self.map_formula(f))


def force_transition_operator(sys, i, table=TABLE):
    """The operator that forces the behaviour of x along input i:
    (x, f) -> (step(x,i), next(f,i) & <observe(step(x,i))>).

    Preserving only: its definition reads the concrete successor's
    observation, so no inverse exists in general."""

    def transform(pair):
        x, f = pair
        y = sys.step(x, i)
        g = table.mk_and([table.next(f, i), table.mk_obs(sys.observe(y))])
        return (y, g)

    op = AlgebraicOperator("force[%r]" % (i,), None, None, PRESERVING,
                           bijective=False, table=table)
    op.apply = transform
    op.map_formula = None
    return op


class KnowledgeBase:
    """Confirmed-satisfying pairs R and confirmed-failing pairs F,
    threaded across verification runs.  R holds only pairs committed by
    completed successful runs (or trusted input); F holds only direct
    observation-failure counterexamples."""

    def __init__(self, R=(), F=()):
        self.R = set(R)
        self.F = set(F)
        if self.R & self.F:
            raise ValueError("R and F overlap")

    def copy(self):
        return KnowledgeBase(self.R, self.F)

    def __repr__(self):
        return "KnowledgeBase(|R|=%d, |F|=%d)" % (len(self.R), len(self.F))


class ClosureConfig:
    """Configuration of the precongruence closure.

    operators: the algebraic operator set.
    depth: max operator applications in one derivation (default 1; the
      composed operators such as shift^2 are listed separately).
    state_sim: optional dict x -> states above x (default identity).
    implication: optional relation of (f, g) formula-id pairs, f implies
      g (default reflexive only).
    failure_mode: literal | image | both.
    """

    def __init__(self, operators=(), depth=1, state_sim=None,
                 implication=None, failure_mode=BOTH, table=TABLE):
        if depth < 0:
            raise ValueError("depth must be >= 0")
        self.operators = tuple(operators)
        self.depth = depth
        self.state_sim = state_sim
        self.implication = frozenset(implication or ())
        self.failure_mode = failure_mode
        self.table = table
        self._implicants = {}
        self._implied = {}
        for (f, g) in self.implication:
            self._implicants.setdefault(g, set()).add(f)
            self._implied.setdefault(f, set()).add(g)

    def implicants_of(self, f):
        """Formulae known to imply f, including f itself."""
        out = {f}
        out |= self._implicants.get(f, set())
        return out

    def implied_by(self, f):
        """Formulae f is known to imply, including f itself."""
        out = {f}
        out |= self._implied.get(f, set())
        return out

    def ops_with(self, direction_test):
        return tuple(op for op in self.operators if direction_test(op))


def _op_chains(pair, ops, depth):
    """Pairs reachable by <= depth operator applications (excluding id)."""
    seen = {pair}
    frontier = [pair]
    for _ in range(depth):
        nxt = []
        for p in frontier:
            for op in ops:
                q = op.apply(p)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    seen.discard(pair)
    return seen


def closure_members(pair, cfg, direction):
    """Lazily enumerate the pairs derivable from {pair} by the closure
    rules, using operators whose declared direction includes `direction`.
    Implication composes forward (f implies f'), the state simulation
    composes downward (x' below x)."""
    if direction == PRESERVING:
        ops = cfg.ops_with(AlgebraicOperator.preserves)
    elif direction == REFLECTING:
        ops = cfg.ops_with(AlgebraicOperator.reflects)
    else:
        raise ValueError(direction)
    base = {pair}
    base |= _op_chains(pair, ops, cfg.depth)
    emitted = set()
    for (x, f) in base:
        xs = [x]
        if cfg.state_sim:
            # tu_le: x' <= x lets x' inherit what x satisfies
            xs.extend(cfg.state_sim.get(x, ()))
        for g in cfg.implied_by(f):
            for y in xs:
                q = (y, g)
                if q not in emitted:
                    emitted.add(q)
                    yield q


def infer_satisfied(pair, kb, cfg):
    """pair in ctu(R): derivable from a confirmed-satisfying pair via
    satisfaction-preserving operators."""
    engine = ClosureEngine(cfg)
    engine.load(kb)
    return engine.sat_hit(pair)


def infer_failed(pair, kb, cfg):
    """ctu({pair}) meets F (literal direction), or pair lies in the
    reflected closure image of F (image direction), per failure_mode."""
    engine = ClosureEngine(cfg)
    engine.load(kb)
    return engine.fail_hit(pair, raw_F=kb.F)


class ClosureEngine:
    """Incremental index of the closure of R and F.

    sat_index maps state -> formula ids known satisfied there (including
    images under preserving operators); fail_index maps formula id ->
    states where it is known to fail (including images under reflecting
    operators).  Queries then only consult implication variants."""

    def __init__(self, cfg):
        self.cfg = cfg
        self.sat_index = {}
        self.fail_index = {}
        self.raw_F = set()
        self._sat_ops = cfg.ops_with(AlgebraicOperator.preserves)
        self._fail_ops = cfg.ops_with(AlgebraicOperator.reflects)
        self.literal_ops = tuple(op for op in cfg.operators
                                 if op.preserves() and not op.reflects())
        self._lit_cfg = None

    def load(self, kb):
        for pair in kb.R:
            self.note_satisfied(pair)
        for pair in kb.F:
            self.note_failed(pair)

    def note_satisfied(self, pair):
        for (x, f) in [pair, *_op_chains(pair, self._sat_ops, self.cfg.depth)]:
            self.sat_index.setdefault(x, set()).add(f)

    def note_failed(self, pair):
        self.raw_F.add(pair)
        for (x, f) in [pair, *_op_chains(pair, self._fail_ops, self.cfg.depth)]:
            self.fail_index.setdefault(f, set()).add(x)

    def sat_hit(self, pair):
        x, f = pair
        want = self.cfg.implicants_of(f)
        xs = [x]
        if self.cfg.state_sim:
            xs.extend(self.cfg.state_sim.get(x, ()))
        for y in xs:
            have = self.sat_index.get(y)
            if have and not want.isdisjoint(have):
                return True
        return False

    def fail_hit_image(self, pair):
        """Image direction: pair is an equivariant/reflecting image of a
        failing pair, possibly weakened -- if f implies g and g fails at
        x, then f fails at x."""
        x, f = pair
        for g in self.cfg.implied_by(f):
            states = self.fail_index.get(g)
            if states and x in states:
                return True
        return False

    def fail_hit_literal(self, pair, raw_F=None):
        """Literal direction: some pair derivable from the query via
        preserving-only operators is known failing."""
        F = self.raw_F if raw_F is None else raw_F
        if not F:
            return False
        if self._lit_cfg is None:
            self._lit_cfg = ClosureConfig(self.literal_ops, self.cfg.depth,
                                          self.cfg.state_sim,
                                          self.cfg.implication,
                                          table=self.cfg.table)
        for q in closure_members(pair, self._lit_cfg, PRESERVING):
            if q in F:
                return True
        return False

    def fail_hit(self, pair, raw_F=None):
        mode = self.cfg.failure_mode
        if mode in (IMAGE, BOTH) and self.fail_hit_image(pair):
            return True
        if mode == IMAGE:
            return False
        return self.fail_hit_literal(pair, raw_F)
