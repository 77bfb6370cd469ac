"""Plain-text syntax for properties, safety formulae, and predicates.

Grammar (whitespace-insensitive)::

    property := 'F' '<' pred '>'          -- Refute(G <complement>)
              | '!' formula               -- Refute(formula)
              | formula                   -- Assert(formula)
    formula  := term ('&' term)*
    term     := 'G' term                  -- nu v. term & [tt]v
              | '[' pred ']' term
              | '<' pred '>'
              | 'nu' 'v' '.' term         -- one binder, referenced as 'v'
              | 'v'
              | 'tt'
              | '(' formula ')'
    pred     := 'tt'
              | '.' cmp                   -- scalar observation constraint
              | setlit | '!' setlit
              | '(' comp (',' comp)* ')'  -- product observation
              | 'link' '[' int ',' int ',' int ']'   -- dst = factor * src
    cmp      := '=' value | '!=' value | '>=' value | '<=' value
              | 'in' '[' value ',' value ']'
    comp     := '_' | cmp | setlit | '!' setlit
    setlit   := '{' value (',' value)* '}'

'>=' and '<=' require a finite component space; 'in' builds an exact
integer interval.  Values are parsed by the model context (integers by
default, 'true'/'false' on boolean components).
"""

import re

from .formula import ASSERT, REFUTE, TABLE, AND, BOX, NU, OBS, TT, VAR, Property
from .predicate import (BoolSpace, Complement, FiniteSet, Interval,
                        LinearLink, Product, ProductSpace, ScaledLine,
                        Universe, complement)

_TOKEN = re.compile(r"\s*([A-Za-z0-9\-]+|!=|>=|<=|[<>\[\]{}().&!=,_])")


class SyntaxContext:
    """What the parser needs to know about a model: its observation
    space, the full-alphabet input predicate for G, and value parsing."""

    def __init__(self, observation_space, input_pred, table=TABLE):
        self.space = observation_space
        self.input_pred = input_pred
        self.table = table

    def component_space(self, idx):
        if idx is None:
            return self.space
        return self.space.components[idx]

    def parse_value(self, token, idx=None):
        space = self.component_space(idx)
        if isinstance(space, BoolSpace):
            if token in ("true", "false"):
                return token == "true"
            raise FormulaSyntaxError("expected true/false, got %r" % token)
        try:
            return int(token)
        except ValueError:
            raise FormulaSyntaxError("expected an integer value, got %r" % token)

    def print_value(self, v, idx=None):
        if isinstance(v, bool):
            return "true" if v else "false"
        return str(v)


class FormulaSyntaxError(ValueError):
    pass


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise FormulaSyntaxError("cannot tokenize %r" % text[pos:])
            break
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text, ctx):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.ctx = ctx

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None:
            raise FormulaSyntaxError("unexpected end of input"
                                     + (", expected %r" % expected if expected else ""))
        if expected is not None and tok != expected:
            raise FormulaSyntaxError("expected %r, got %r" % (expected, tok))
        self.pos += 1
        return tok

    def done(self):
        if self.pos != len(self.tokens):
            raise FormulaSyntaxError("trailing input: %r" % self.tokens[self.pos:])

    # -- properties -----------------------------------------------------

    def property(self):
        t = self.ctx.table
        if self.peek() == "F":
            self.take()
            self.take("<")
            pred = self.pred()
            self.take(">")
            self.done()
            body = t.mk_always(t.mk_obs(complement(pred)), self.ctx.input_pred)
            return Property("F", REFUTE, body)
        if self.peek() == "!":
            self.take()
            f = self.formula()
            self.done()
            return Property("!", REFUTE, f)
        f = self.formula()
        self.done()
        return Property("assert", ASSERT, f)

    # -- formulae --------------------------------------------------------

    def formula(self):
        parts = [self.term()]
        while self.peek() == "&":
            self.take()
            parts.append(self.term())
        return self.ctx.table.mk_and(parts)

    def term(self):
        t = self.ctx.table
        tok = self.peek()
        if tok == "G":
            self.take()
            return t.mk_always(self.term(), self.ctx.input_pred)
        if tok == "[":
            self.take()
            pred = self.pred(input_space=True)
            self.take("]")
            return t.mk_box(pred, self.term())
        if tok == "<":
            self.take()
            pred = self.pred()
            self.take(">")
            return t.mk_obs(pred)
        if tok == "nu":
            self.take()
            self.take("v")
            self.take(".")
            return t.mk_nu(self.term())
        if tok == "v":
            self.take()
            return t.var(0)
        if tok == "tt":
            self.take()
            return t.tt(self.ctx.space)
        if tok == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        raise FormulaSyntaxError("unexpected token %r" % tok)

    # -- predicates -------------------------------------------------------

    def pred(self, input_space=False):
        space = self.ctx.input_pred.space if input_space else self.ctx.space
        tok = self.peek()
        if tok == "tt":
            self.take()
            return Universe(space)
        if tok == ".":
            self.take()
            return self.cmp(space, None)
        if tok == "{":
            return self.setlit(space, None)
        if tok == "!":
            self.take()
            return complement(self.setlit(space, None))
        if tok == "link":
            self.take()
            self.take("[")
            src = int(self.take())
            self.take(",")
            dst = int(self.take())
            self.take(",")
            factor = int(self.take())
            self.take("]")
            return LinearLink(space, src=src, dst=dst, factor=factor)
        if tok == "(":
            if not isinstance(space, ProductSpace):
                raise FormulaSyntaxError("product predicate over a non-product space")
            self.take()
            comps = [self.comp(0)]
            while self.peek() == ",":
                self.take()
                comps.append(self.comp(len(comps)))
            self.take(")")
            if len(comps) != space.arity:
                raise FormulaSyntaxError("product predicate arity %d, space needs %d"
                                         % (len(comps), space.arity))
            return Product(space, tuple(comps))
        raise FormulaSyntaxError("unexpected token %r in predicate" % tok)

    def comp(self, idx):
        space = self.ctx.component_space(idx)
        tok = self.peek()
        if tok == "_":
            self.take()
            return Universe(space)
        if tok == "{":
            return self.setlit(space, idx)
        if tok == "!":
            self.take()
            return complement(self.setlit(space, idx))
        return self.cmp(space, idx)

    def cmp(self, space, idx):
        op = self.take()
        if op == "in":
            self.take("[")
            lo = self.ctx.parse_value(self.take(), idx)
            self.take(",")
            hi = self.ctx.parse_value(self.take(), idx)
            self.take("]")
            if not isinstance(space, ScaledLine):
                raise FormulaSyntaxError("'in' needs an integer-line component")
            return Interval(space, lo, hi)
        if op not in ("=", "!=", ">=", "<="):
            raise FormulaSyntaxError("unknown comparison %r" % op)
        v = self.ctx.parse_value(self.take(), idx)
        if op == "=":
            return FiniteSet(space, frozenset((v,)))
        if op == "!=":
            return complement(FiniteSet(space, frozenset((v,))))
        if not space.is_finite():
            raise FormulaSyntaxError("%r needs a finite space; use 'in[lo,hi]'" % op)
        vals = frozenset(o for o in space.enumerate()
                         if (o >= v if op == ">=" else o <= v))
        return FiniteSet(space, vals)

    def setlit(self, space, idx):
        self.take("{")
        vals = [self.ctx.parse_value(self.take(), idx)]
        while self.peek() == ",":
            self.take()
            vals.append(self.ctx.parse_value(self.take(), idx))
        self.take("}")
        return FiniteSet(space, frozenset(vals))


def parse_property(text, ctx):
    return _Parser(text, ctx).property()


def parse_formula(text, ctx):
    p = _Parser(text, ctx)
    f = p.formula()
    p.done()
    return f


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def print_pred(pred, ctx, idx=None, component=False):
    pv = lambda v: ctx.print_value(v, idx)
    if isinstance(pred, Universe):
        return "_" if component else "tt"
    if isinstance(pred, FiniteSet):
        if len(pred.values) == 1:
            (v,) = pred.values
            return ("" if component else ".") + "=" + pv(v)
        return "{%s}" % ",".join(pv(v) for v in sorted(pred.values, key=repr))
    if isinstance(pred, Complement) and isinstance(pred.inner, FiniteSet):
        if len(pred.inner.values) == 1:
            (v,) = pred.inner.values
            return ("" if component else ".") + "!=" + pv(v)
        return "!" + print_pred(pred.inner, ctx, idx, component=True)
    if isinstance(pred, Interval):
        return ("" if component else ".") + "in[%s,%s]" % (pv(pred.lo), pv(pred.hi))
    if isinstance(pred, LinearLink):
        return "link[%d,%d,%d]" % (pred.src, pred.dst, pred.factor)
    if isinstance(pred, Product):
        return "(%s)" % ",".join(print_pred(c, ctx, j, component=True)
                                 for j, c in enumerate(pred.components))
    raise FormulaSyntaxError("no printable form for %r" % (pred,))


def print_formula(fid, ctx):
    t = ctx.table
    node = t.node(fid)
    tag = node[0]
    if tag == TT:
        return "tt"
    if tag == VAR:
        return "v"
    if tag == OBS:
        return "<%s>" % print_pred(node[1], ctx)
    if tag == AND:
        return " & ".join(_maybe_paren(f, ctx) for f in node[1])
    if tag == BOX:
        return "[%s] %s" % (print_pred(node[1], ctx), _maybe_paren(node[2], ctx))
    if tag == NU:
        body = t.node(node[1])
        # recognize G f = nu v. f & [I]v
        if body[0] == AND and len(body[1]) == 2:
            f, b = body[1]
            bn = t.node(b)
            if (bn[0] == BOX and isinstance(bn[1], Universe)
                    and t.node(bn[2]) == (VAR, 0)):
                return "G %s" % _maybe_paren(f, ctx)
        return "nu v. %s" % _maybe_paren(node[1], ctx)
    raise FormulaSyntaxError(tag)


def _maybe_paren(fid, ctx):
    out = print_formula(fid, ctx)
    if ctx.table.node(fid)[0] == AND:
        return "(%s)" % out
    return out


def print_property(prop, ctx):
    t = ctx.table
    if prop.polarity == ASSERT:
        return print_formula(prop.body, ctx)
    node = t.node(prop.body)
    # recognize F <Q> = Refute(G <complement Q>)
    if node[0] == NU:
        body = t.node(node[1])
        if body[0] == AND and len(body[1]) == 2:
            f, b = body[1]
            fn, bn = t.node(f), t.node(b)
            if (fn[0] == OBS and bn[0] == BOX and isinstance(bn[1], Universe)
                    and t.node(bn[2]) == (VAR, 0)):
                return "F <%s>" % print_pred(complement(fn[1]), ctx)
    return "! %s" % print_formula(prop.body, ctx)
