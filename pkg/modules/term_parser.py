"""
Prefix term language for de Rham-Witt elements.

    (teich P)            Teichmuller lift of a polynomial over F_p
    (lift NAME P)        Lazard image t_F(P) for a named Frobenius lift
    (e eta ; a1,..,an ; {i,..})   basic Witt differential, 1-based indices
    (V t) (F t) (d t)
    (+ t t ..) (- t t) (- t) (* t t ..)

Evaluation is level-aware: V evaluates its argument at the requested level and
truncates afterwards, F evaluates its argument one level higher.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from modules import drwalgebra as drw
from modules.drwalgebra import DrwElement
from modules.drwbasis import BasicDiffKey, WeightFn
from modules.errors import ConfigError, DegreeMismatch, TermSyntaxError, WdrwError
from modules.lazard import FrobLift, canonical_lift, t_F
from modules.polyring import format_polynomial, parse_polynomial, reduce_to_fp
from modules.settings import parse_fraction
from modules.wittcore import RingContext

OPERATORS = {'V': 1, 'F': 1, 'd': 1, '+': None, '-': None, '*': None}


@dataclass(frozen=True)
class Teich:
    poly: str
    position: int = 0


@dataclass(frozen=True)
class Lift:
    name: str
    poly: str
    position: int = 0


@dataclass(frozen=True)
class Basic:
    eta: int
    weights: Tuple[Fraction, ...]
    parts: Tuple[int, ...]
    position: int = 0


@dataclass(frozen=True)
class Op:
    name: str
    args: Tuple['Term', ...]
    position: int = 0


Term = Union[Teich, Lift, Basic, Op]


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str, position: Optional[int] = None) -> TermSyntaxError:
        return TermSyntaxError(message, self.pos if position is None else position, self.text)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ''

    def expect(self, ch: str):
        if self.peek() != ch:
            found = self.peek() or 'end of input'
            raise self.error(f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def word(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and not self.text[self.pos].isspace() and self.text[self.pos] not in '()':
            self.pos += 1
        return self.text[start:self.pos]

    def raw_until_close(self) -> str:
        """Text up to the parenthesis closing the current list, nested parentheses included"""
        start = self.pos
        depth = 0
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == '(':
                depth += 1
            elif ch == ')':
                if depth == 0:
                    return self.text[start:self.pos].strip()
                depth -= 1
            self.pos += 1
        raise self.error("unbalanced parentheses", start)


def parse_term(text: str) -> Term:
    reader = _Reader(text)
    term = _parse(reader)
    if reader.peek():
        raise reader.error(f"unexpected trailing input {reader.text[reader.pos:]!r}")
    return term


def _parse(reader: _Reader) -> Term:
    ch = reader.peek()
    if ch != '(':
        if not ch:
            raise reader.error("empty term")
        raise reader.error(f"bare atom {reader.word()!r}; terms are parenthesised")
    start = reader.pos
    reader.expect('(')
    head = reader.word()
    if head == 'teich':
        body = reader.raw_until_close()
        if not body:
            raise reader.error("teich needs a polynomial", start)
        reader.expect(')')
        return Teich(body, start)
    if head == 'lift':
        name = reader.word()
        body = reader.raw_until_close()
        if not name or not body:
            raise reader.error("lift needs a name and a polynomial", start)
        reader.expect(')')
        return Lift(name, body, start)
    if head == 'e':
        body = reader.raw_until_close()
        reader.expect(')')
        return _parse_basic(body, start, reader)
    if head not in OPERATORS:
        raise reader.error(f"unknown operator {head!r}", start)
    args: List[Term] = []
    while reader.peek() not in (')', ''):
        args.append(_parse(reader))
    reader.expect(')')
    arity = OPERATORS[head]
    if arity is not None and len(args) != arity:
        raise reader.error(f"{head} takes {arity} argument, got {len(args)}", start)
    if head == '-' and len(args) not in (1, 2):
        raise reader.error(f"- takes 1 or 2 arguments, got {len(args)}", start)
    if head in ('+', '*') and len(args) < 2:
        raise reader.error(f"{head} takes at least 2 arguments, got {len(args)}", start)
    return Op(head, tuple(args), start)


def _parse_basic(body: str, start: int, reader: _Reader) -> Basic:
    fields = [f.strip() for f in body.split(';')]
    if len(fields) != 3:
        raise reader.error("e needs 'eta ; weights ; {indices}'", start)
    eta_text, weight_text, index_text = fields
    try:
        eta = int(eta_text)
    except ValueError:
        raise reader.error(f"coefficient {eta_text!r} is not an integer", start)
    try:
        weights = tuple(parse_fraction(w) for w in weight_text.split(',')) if weight_text else ()
    except ConfigError as exc:
        raise reader.error(exc.message, start)
    if not (index_text.startswith('{') and index_text.endswith('}')):
        raise reader.error(f"index set {index_text!r} must be written {{i,j}}", start)
    inner = index_text[1:-1].strip()
    try:
        parts = tuple(int(i) - 1 for i in inner.split(',')) if inner else ()
    except ValueError:
        raise reader.error(f"index set {index_text!r} holds a non-integer", start)
    return Basic(eta, weights, parts, start)


# -- evaluation ------------------------------------------------------------------------

def _poly(text: str, ctx: RingContext, position: int, source: str):
    try:
        return parse_polynomial(text, ctx.zz)
    except ConfigError as exc:
        raise TermSyntaxError(exc.message, position, source)


def evaluate(term: Term, ctx: RingContext, lifts: Optional[Dict[str, FrobLift]] = None,
             source: str = '') -> DrwElement:
    """Value of term in W_m Omega over ctx, m = ctx.m"""
    lifts = dict(lifts or {})
    lifts.setdefault('frob', canonical_lift(ctx))
    return _eval(term, ctx, lifts, source)


def _eval(term: Term, ctx: RingContext, lifts: Dict[str, FrobLift], source: str) -> DrwElement:
    level = ctx.m
    if isinstance(term, Teich):
        P = _poly(term.poly, ctx, term.position, source)
        return drw.teich_element(reduce_to_fp(P, ctx.fp), ctx)
    if isinstance(term, Lift):
        F = lifts.get(term.name)
        if F is None:
            raise ConfigError(f"no Frobenius lift named {term.name!r}; known: {sorted(lifts)}")
        if F.ctx.names != ctx.names:
            raise ConfigError(f"lift {term.name!r} is over {list(F.ctx.names)}, term is over {list(ctx.names)}")
        P = _poly(term.poly, ctx, term.position, source)
        return drw.drw_from_witt(t_F(F, P, level))
    if isinstance(term, Basic):
        if len(term.weights) != ctx.n:
            raise TermSyntaxError(
                f"e has {len(term.weights)} weights, the ring has {ctx.n} variables", term.position, source,
            )
        try:
            key = BasicDiffKey(WeightFn(ctx.p, term.weights), term.parts)
        except WdrwError as exc:
            raise TermSyntaxError(exc.message, term.position, source)
        return drw.make_e(term.eta, key, ctx)
    name, args = term.name, term.args
    if name == 'V':
        inner = _eval(args[0], ctx, lifts, source)
        return drw.verschiebung_op(inner, truncate_to=level)
    if name == 'F':
        inner = _eval(args[0], ctx.with_length(level + 1), lifts, source)
        return drw.frobenius_op(inner)
    if name == 'd':
        return drw.differential(_eval(args[0], ctx, lifts, source))
    values = [_eval(a, ctx, lifts, source) for a in args]
    if name == '*':
        out = values[0]
        for v in values[1:]:
            out = drw.multiply(out, v)
        return out
    if name == '-' and len(values) == 1:
        return drw.neg(values[0])
    if name == '-':
        values = [values[0], drw.neg(values[1])]
    degrees = {v.degree for v in values if v}
    if len(degrees) > 1:
        raise DegreeMismatch(
            f"cannot add forms of degrees {sorted(degrees)}", {'position': term.position},
        )
    degree = degrees.pop() if degrees else values[0].degree
    return drw.sum_elements(values, ctx, degree)


def evaluate_text(text: str, ctx: RingContext, lifts: Optional[Dict[str, FrobLift]] = None) -> DrwElement:
    return evaluate(parse_term(text), ctx, lifts, source=text)


# -- printing ----------------------------------------------------------------------------

def format_term(term: Term) -> str:
    if isinstance(term, Teich):
        return f"(teich {term.poly})"
    if isinstance(term, Lift):
        return f"(lift {term.name} {term.poly})"
    if isinstance(term, Basic):
        weights = ','.join(str(w) for w in term.weights)
        parts = ','.join(str(i + 1) for i in term.parts)
        return f"(e {term.eta} ; {weights} ; {{{parts}}})"
    return '(' + ' '.join([term.name] + [format_term(a) for a in term.args]) + ')'


def element_to_term(x: DrwElement) -> Term:
    """A term evaluating to x: the sum of its basic differentials"""
    pieces = [Basic(eta, key.weight.entries, key.parts) for key, eta in x.sorted_terms()]
    if not pieces:
        zeros = tuple(Fraction(0) for _ in range(x.ctx.n))
        return Basic(0, zeros, ())
    if len(pieces) == 1:
        return pieces[0]
    return Op('+', tuple(pieces))


def teich_term(P) -> Teich:
    return Teich(format_polynomial(P))
