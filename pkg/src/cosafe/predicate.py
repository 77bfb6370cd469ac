"""Decidable predicate algebra over observation spaces.

Predicates describe sets of observations.  They are used both for state
observations (what a state emits) and for formula observations (what a
formula allows).  Everything here is immutable, hashable, and decided
exactly -- when no exact rule applies for a subset question we raise
``Undecidable`` instead of approximating.

Real-valued quantities (levels, pressures) are represented on a scaled
integer line: a value is an integer count of a declared quantum (default
0.01), so arithmetic and equality stay exact.
"""

from dataclasses import dataclass, field


class SpaceMismatch(TypeError):
    """Raised when an operation mixes predicates from different spaces."""


class Undecidable(Exception):
    """Raised when no exact decision rule covers a subset query.

    This error existing (rather than a silent approximation) is a design
    contract: every answer the algebra does give is exact.
    """


# ---------------------------------------------------------------------------
# Observation spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Space:
    def is_finite(self):
        return False

    def enumerate(self):
        raise Undecidable("cannot enumerate an infinite space")


@dataclass(frozen=True)
class FiniteSpace(Space):
    """A finite enumerated universe."""
    values: frozenset

    def is_finite(self):
        return True

    def enumerate(self):
        return self.values


@dataclass(frozen=True)
class ScaledLine(Space):
    """The integer line, each point standing for `quantum` real units."""
    quantum: float = 1.0

    def to_quanta(self, real_value):
        return round(real_value / self.quantum)

    def to_real(self, quanta):
        return quanta * self.quantum


@dataclass(frozen=True)
class BoolSpace(Space):
    def is_finite(self):
        return True

    def enumerate(self):
        return frozenset((False, True))


@dataclass(frozen=True)
class ProductSpace(Space):
    components: tuple

    @property
    def arity(self):
        return len(self.components)

    def is_finite(self):
        return all(c.is_finite() for c in self.components)

    def enumerate(self):
        import itertools
        pools = [sorted(c.enumerate(), key=repr) for c in self.components]
        return frozenset(itertools.product(*pools))


# ---------------------------------------------------------------------------
# Predicates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Predicate:
    space: Space = field(repr=False)


@dataclass(frozen=True)
class Empty(Predicate):
    pass


@dataclass(frozen=True)
class Universe(Predicate):
    pass


@dataclass(frozen=True)
class FiniteSet(Predicate):
    values: frozenset = frozenset()


@dataclass(frozen=True)
class Interval(Predicate):
    """Closed interval [lo, hi] on a ScaledLine, endpoints in quanta."""
    lo: int = 0
    hi: int = 0

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("Interval requires lo <= hi (got %r > %r)" % (self.lo, self.hi))


@dataclass(frozen=True)
class Complement(Predicate):
    inner: Predicate = None


@dataclass(frozen=True)
class Product(Predicate):
    """Component-wise predicate over a ProductSpace; Universe components
    act as wildcards."""
    components: tuple = ()

    def __post_init__(self):
        if len(self.components) != self.space.arity:
            raise ValueError("Product arity %d does not match space arity %d"
                             % (len(self.components), self.space.arity))


@dataclass(frozen=True)
class Intersection(Predicate):
    parts: tuple = ()


@dataclass(frozen=True)
class LinearLink(Predicate):
    """Observations of a product space whose component `dst` equals
    `factor` times component `src` (e.g. pressure = g * level)."""
    src: int = 0
    dst: int = 1
    factor: int = 1


def _check_space(p, q):
    if p.space != q.space:
        raise SpaceMismatch("predicates live in different spaces: %r vs %r"
                            % (p.space, q.space))


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------

def member(p, o):
    """Exact membership test o in p."""
    if isinstance(p, Empty):
        return False
    if isinstance(p, Universe):
        return True
    if isinstance(p, FiniteSet):
        return o in p.values
    if isinstance(p, Interval):
        return p.lo <= o <= p.hi
    if isinstance(p, Complement):
        return not member(p.inner, o)
    if isinstance(p, Product):
        return all(member(c, v) for c, v in zip(p.components, o))
    if isinstance(p, Intersection):
        return all(member(part, o) for part in p.parts)
    if isinstance(p, LinearLink):
        return o[p.dst] == p.factor * o[p.src]
    raise TypeError("unknown predicate %r" % (p,))


def member_fn(p):
    """Compile p into a membership closure equivalent to member(p, .);
    used on the verifier's hot path."""
    if isinstance(p, Empty):
        return lambda o: False
    if isinstance(p, Universe):
        return lambda o: True
    if isinstance(p, FiniteSet):
        return p.values.__contains__
    if isinstance(p, Interval):
        lo, hi = p.lo, p.hi
        return lambda o: lo <= o <= hi
    if isinstance(p, Complement):
        inner = member_fn(p.inner)
        return lambda o: not inner(o)
    if isinstance(p, Product):
        fns = tuple(member_fn(c) for c in p.components)
        return lambda o: all(f(v) for f, v in zip(fns, o))
    if isinstance(p, Intersection):
        fns = tuple(member_fn(part) for part in p.parts)
        return lambda o: all(f(o) for f in fns)
    if isinstance(p, LinearLink):
        src, dst, k = p.src, p.dst, p.factor
        return lambda o: o[dst] == k * o[src]
    raise TypeError("unknown predicate %r" % (p,))


# ---------------------------------------------------------------------------
# Constructors / normalizing operations
# ---------------------------------------------------------------------------

def complement(p):
    if isinstance(p, Universe):
        return Empty(p.space)
    if isinstance(p, Empty):
        return Universe(p.space)
    if isinstance(p, Complement):
        return p.inner
    return Complement(p.space, p)


def intersect(p, q):
    _check_space(p, q)
    if isinstance(p, Universe):
        return q
    if isinstance(q, Universe):
        return p
    if isinstance(p, Empty) or isinstance(q, Empty):
        return Empty(p.space)
    if p == q:
        return p
    if isinstance(p, FiniteSet) and isinstance(q, FiniteSet):
        return FiniteSet(p.space, p.values & q.values)
    if isinstance(p, FiniteSet):
        return FiniteSet(p.space, frozenset(v for v in p.values if member(q, v)))
    if isinstance(q, FiniteSet):
        return intersect(q, p)
    if isinstance(p, Interval) and isinstance(q, Interval):
        lo, hi = max(p.lo, q.lo), min(p.hi, q.hi)
        if lo > hi:
            return Empty(p.space)
        return Interval(p.space, lo, hi)
    if isinstance(p, Product) and isinstance(q, Product):
        return Product(p.space, tuple(intersect(a, b)
                                      for a, b in zip(p.components, q.components)))
    parts = []
    for r in (p, q):
        parts.extend(r.parts if isinstance(r, Intersection) else (r,))
    # duplicate elimination, order preserved
    seen, uniq = set(), []
    for part in parts:
        if part not in seen:
            seen.add(part)
            uniq.append(part)
    if len(uniq) == 1:
        return uniq[0]
    return Intersection(p.space, tuple(uniq))


# ---------------------------------------------------------------------------
# Subset decision
# ---------------------------------------------------------------------------

def _finite_extent(p):
    """The set of points of p if it is finitely enumerable, else None."""
    if isinstance(p, FiniteSet):
        return p.values
    if isinstance(p, Empty):
        return frozenset()
    if p.space.is_finite():
        return frozenset(o for o in p.space.enumerate() if member(p, o))
    if isinstance(p, Interval):
        return frozenset(range(p.lo, p.hi + 1))
    if isinstance(p, Intersection):
        for part in p.parts:
            ext = _finite_extent(part)
            if ext is not None:
                return frozenset(o for o in ext if member(p, o))
    return None


def _component_interval(p, idx):
    """A bound [lo, hi] that p imposes on component idx, or None."""
    if isinstance(p, Product):
        c = p.components[idx]
        if isinstance(c, Interval):
            ok = all(isinstance(d, Universe) or j == idx
                     for j, d in enumerate(p.components))
            if ok:
                return (c.lo, c.hi)
    if isinstance(p, Intersection):
        lo = hi = None
        for part in p.parts:
            b = _component_interval(part, idx)
            if b is not None:
                lo = b[0] if lo is None else max(lo, b[0])
                hi = b[1] if hi is None else min(hi, b[1])
        if lo is not None and hi is not None:
            return (lo, hi)
    return None


def subset(p, q):
    """Exact decision of p <= q (as sets); raises Undecidable otherwise."""
    _check_space(p, q)
    if isinstance(p, Empty) or isinstance(q, Universe):
        return True
    if p == q:
        return True
    if isinstance(q, Complement) and isinstance(q.inner, Empty):
        return True
    if isinstance(q, Intersection):
        return all(subset(p, part) for part in q.parts)
    ext = _finite_extent(p)
    if ext is not None:
        return all(member(q, o) for o in ext)
    # p is infinite from here on
    if isinstance(p, Universe):
        if isinstance(q, Complement):
            qc = _finite_extent(q.inner)
            if qc is not None:
                return len(qc) == 0
        if isinstance(q, Empty) or isinstance(q, FiniteSet) or isinstance(q, Interval):
            return False
    if isinstance(p, Interval):
        if isinstance(q, Interval):
            return q.lo <= p.lo and p.hi <= q.hi
        if isinstance(q, FiniteSet):
            return False  # an interval of >1 quanta may still be finite; handled by extent above
        if isinstance(q, Complement):
            qc = _finite_extent(q.inner)
            if qc is not None:
                return not any(p.lo <= v <= p.hi for v in qc)
    if isinstance(p, Complement):
        pc = _finite_extent(p.inner)
        if pc is not None:
            if isinstance(q, Complement):
                qc = _finite_extent(q.inner)
                if qc is not None:
                    return qc <= pc
            if isinstance(q, (FiniteSet, Interval, Empty)):
                return False  # cofinite set never fits a finite/bounded one
    if isinstance(p, Product) and isinstance(q, Product):
        return all(subset(a, b) for a, b in zip(p.components, q.components))
    if isinstance(p, Intersection):
        if any(_try_subset(part, q) for part in p.parts):
            return True
        link = _linear_link_rule(p, q)
        if link is not None:
            return link
    if isinstance(p, LinearLink) and isinstance(q, Product):
        link = _linear_link_rule(Intersection(p.space, (p,)), q)
        if link is not None:
            return link
    raise Undecidable("no exact subset rule for %r <= %r" % (p, q))


def _try_subset(p, q):
    try:
        return subset(p, q)
    except Undecidable:
        return False


def _linear_link_rule(p, q):
    """Decide Intersection(..., LinearLink(src->dst, k), bound on src) <= q
    when q constrains only the dst component with an interval."""
    links = [part for part in p.parts if isinstance(part, LinearLink)]
    if not links or not isinstance(q, Product):
        return None
    target = None
    for j, c in enumerate(q.components):
        if isinstance(c, Universe):
            continue
        if isinstance(c, Interval) and target is None:
            target = (j, c)
        else:
            return None
    if target is None:
        return None
    j, c = target
    for link in links:
        if link.dst != j:
            continue
        bound = _component_interval(p, link.src)
        if bound is None:
            continue
        lo, hi = bound
        img_lo, img_hi = sorted((link.factor * lo, link.factor * hi))
        return c.lo <= img_lo and img_hi <= c.hi
    return None
