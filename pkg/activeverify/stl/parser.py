# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


"""
Recursive-descent parser and printer for bounded STL text.

Grammar (whitespace-insensitive)::

    formula   := conj ('or' conj)*
    conj      := unary ('and' unary)*
    unary     := 'not' unary | temporal | '(' formula ')' | predicate
    temporal  := ('G' | 'F') '[' number ',' number ']' '(' formula ')'
    predicate := affine ('>=' | '<=') affine
    affine    := ['-'] term (('+' | '-') term)*
    term      := number ['*' (channel | abs)] | channel | abs
    abs       := 'abs' '(' affine ')'

A predicate must reduce to `a * ch + c >= 0` or `c - abs(ch - b) >= 0`.
"""


from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import NoReturn

from ..exception import StlSyntaxError
from .formula import AbsPredicate, Always, And, Eventually, Not, Or, Predicate, StlFormula


_TOKEN = re.compile(
    r'(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)'
    r'|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)'
    r'|(?P<op>>=|<=|[\[\](),+\-*])'
)
_KEYWORDS = {'and', 'or', 'not', 'abs'}


@dataclass
class _Token:
    kind: str
    text: str
    position: int


def tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        match = _TOKEN.match(text, pos)
        if match is None:
            raise StlSyntaxError(f'Unexpected character {text[pos]!r}', pos)
        tokens.append(_Token(match.lastgroup, match.group(), pos))
        pos = match.end()
    tokens.append(_Token('end', '', len(text)))
    return tokens


@dataclass
class _Affine:
    """Linear combination collected while parsing one side of a predicate."""

    coefs: dict[str, float] = field(default_factory=dict)
    const: float = 0.0
    abs_terms: list[tuple[float, _Affine]] = field(default_factory=list)

    def add(self, other: _Affine, sign: float) -> None:
        for name, value in other.coefs.items():
            self.coefs[name] = self.coefs.get(name, 0.0) + sign * value
        self.const += sign * other.const
        self.abs_terms.extend((sign * k, inner) for k, inner in other.abs_terms)

    def scaled(self, factor: float) -> _Affine:
        return _Affine(
            {name: factor * value for name, value in self.coefs.items()},
            factor * self.const,
            [(factor * k, inner) for k, inner in self.abs_terms]
        )


class _Parser:

    def __init__(self, text: str):
        self._text = text
        self._tokens = tokenize(text)
        self._index = 0

    @property
    def _current(self) -> _Token:
        return self._tokens[self._index]

    def _peek(self, offset: int = 1) -> _Token:
        return self._tokens[min(self._index + offset, len(self._tokens) - 1)]

    def _advance(self) -> _Token:
        token = self._current
        self._index += 1
        return token

    def _expect(self, text: str) -> _Token:
        if self._current.text != text:
            self._fail(f'Expected {text!r}')
        return self._advance()

    def _fail(self, message: str) -> NoReturn:
        found = self._current.text or 'end of input'
        raise StlSyntaxError(f'{message}, found {found!r}', self._current.position)

    def parse(self) -> StlFormula:
        node = self._formula()
        if self._current.kind != 'end':
            self._fail('Expected end of formula')
        return node

    def _formula(self) -> StlFormula:
        children = [self._conj()]
        while self._current.text == 'or':
            self._advance()
            children.append(self._conj())
        return children[0] if len(children) == 1 else Or(tuple(children))

    def _conj(self) -> StlFormula:
        children = [self._unary()]
        while self._current.text == 'and':
            self._advance()
            children.append(self._unary())
        return children[0] if len(children) == 1 else And(tuple(children))

    def _unary(self) -> StlFormula:
        token = self._current
        if token.text == 'not':
            self._advance()
            return Not(self._unary())
        if token.text in ('G', 'F') and self._peek().text == '[':
            return self._temporal()
        if token.text == '(' and self._is_parenthesized_formula():
            self._advance()
            node = self._formula()
            self._expect(')')
            return node
        return self._predicate()

    def _is_parenthesized_formula(self) -> bool:
        """`(` opens a sub-formula if a comparison or connective occurs before its matching `)`."""
        depth = 0
        for token in self._tokens[self._index:]:
            if token.text == '(':
                depth += 1
            elif token.text == ')':
                depth -= 1
                if depth == 0:
                    return False
            elif depth >= 1 and token.text in ('>=', '<=', 'and', 'or', 'not'):
                return True
            elif token.kind == 'end':
                break
        return False

    def _temporal(self) -> StlFormula:
        op = self._advance().text
        self._expect('[')
        lower = self._signed_number()
        self._expect(',')
        upper_pos = self._current.position
        upper = self._signed_number()
        self._expect(']')
        if not (0 <= lower <= upper):
            raise StlSyntaxError(f'Interval [{lower}, {upper}] must satisfy 0 <= t1 <= t2', upper_pos)
        self._expect('(')
        child = self._formula()
        self._expect(')')
        return Always(lower, upper, child) if op == 'G' else Eventually(lower, upper, child)

    def _signed_number(self) -> float:
        sign = 1.0
        if self._current.text == '-':
            self._advance()
            sign = -1.0
        if self._current.kind != 'number':
            self._fail('Expected a number')
        return sign * float(self._advance().text)

    def _predicate(self) -> StlFormula:
        start = self._current.position
        lhs = self._affine()
        if self._current.text not in ('>=', '<='):
            self._fail("Expected '>=' or '<='")
        op = self._advance().text
        rhs = self._affine()
        expr = _Affine()
        if op == '>=':
            expr.add(lhs, 1.0)
            expr.add(rhs, -1.0)
        else:
            expr.add(rhs, 1.0)
            expr.add(lhs, -1.0)
        return _to_predicate(expr, start)

    def _affine(self) -> _Affine:
        expr = _Affine()
        sign = 1.0
        if self._current.text in ('-', '+'):
            sign = -1.0 if self._advance().text == '-' else 1.0
        expr.add(self._term(), sign)
        while self._current.text in ('+', '-'):
            sign = -1.0 if self._advance().text == '-' else 1.0
            expr.add(self._term(), sign)
        return expr

    def _term(self) -> _Affine:
        token = self._current
        if token.kind == 'number':
            value = float(self._advance().text)
            if self._current.text == '*':
                self._advance()
                return self._factor().scaled(value)
            return _Affine(const=value)
        return self._factor()

    def _factor(self) -> _Affine:
        token = self._current
        if token.text == 'abs':
            self._advance()
            self._expect('(')
            inner = self._affine()
            self._expect(')')
            return _Affine(abs_terms=[(1.0, inner)])
        if token.kind == 'ident' and token.text not in _KEYWORDS:
            self._advance()
            return _Affine({token.text: 1.0})
        if token.text == '(':
            self._advance()
            inner = self._affine()
            self._expect(')')
            return inner
        self._fail('Expected a channel, number or abs(...)')


def _to_predicate(expr: _Affine, position: int) -> StlFormula:
    coefs = {name: value for name, value in expr.coefs.items() if value != 0.0}
    if not expr.abs_terms:
        if len(coefs) != 1:
            raise StlSyntaxError('A predicate must be affine in exactly one channel', position)
        (channel, coef), = coefs.items()
        return Predicate(channel, coef, expr.const)
    if coefs or len(expr.abs_terms) != 1:
        raise StlSyntaxError('Absolute-value predicates must have the form c - abs(ch - b) >= 0', position)
    k, inner = expr.abs_terms[0]
    inner_coefs = {name: value for name, value in inner.coefs.items() if value != 0.0}
    if k != -1.0 or inner.abs_terms or len(inner_coefs) != 1:
        raise StlSyntaxError('Absolute-value predicates must have the form c - abs(ch - b) >= 0', position)
    (channel, coef), = inner_coefs.items()
    if abs(coef) != 1.0:
        raise StlSyntaxError('The channel inside abs(...) must have coefficient 1', position)
    # |ch - b| == |-ch + b|
    center = -inner.const if coef == 1.0 else inner.const
    return AbsPredicate(channel, expr.const, center)


def parse_formula(text: str) -> StlFormula:
    """
    Parse bounded STL text into an AST.

    Examples:
        ::

            parse_formula('G[0,40](1 - abs(e1 - 0) >= 0)')
            parse_formula('F[2,3](x1 - 0.7 >= 0) and F[2,3](1.3 - x1 >= 0)')

    Raises:
        StlSyntaxError: With the offending character position.
    """
    if not isinstance(text, str):
        raise TypeError(f'The "text" must be "str", got {type(text).__name__}.')
    if not text.strip():
        raise StlSyntaxError('Empty formula', 0)
    return _Parser(text).parse()


def _number(value: float) -> str:
    return repr(float(value))


def _signed(value: float) -> str:
    """` + v` or ` - |v|`."""
    value = float(value) + 0.0  # drops the sign of -0.0
    return f' - {_number(-value)}' if value < 0 else f' + {_number(value)}'


def format_formula(node: StlFormula) -> str:
    """Print `node` so that `parse_formula(format_formula(node)) == node`."""
    match node:
        case Predicate(channel, coef, offset):
            if coef == 1.0:
                head = channel
            elif coef == -1.0:
                return f'{_number(offset)} - {channel} >= 0'
            else:
                head = f'{_number(coef)}*{channel}'
            return f'{head}{_signed(offset)} >= 0'
        case AbsPredicate(channel, bound, center):
            return f'{_number(bound)} - abs({channel}{_signed(-center)}) >= 0'
        case Not(child):
            return f'not ({format_formula(child)})'
        case And(children):
            return ' and '.join(f'({format_formula(c)})' for c in children)
        case Or(children):
            return ' or '.join(f'({format_formula(c)})' for c in children)
        case Always(lower, upper, child):
            return f'G[{_number(lower)},{_number(upper)}]({format_formula(child)})'
        case Eventually(lower, upper, child):
            return f'F[{_number(lower)},{_number(upper)}]({format_formula(child)})'
    raise TypeError(f'Unknown formula node {type(node).__name__}.')
