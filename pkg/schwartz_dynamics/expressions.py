"""
Closed-form symbol expressions.

The grammar (see docs/grammar.md for the formal EBNF) covers numbers, the variable `x`,
the binary operators `+ - * /`, `^` with integer literal exponents, unary minus, the
functions sqrt / exp / cos / sin and parentheses:

    expression = term { ("+" | "-") term }
    term       = unary { ("*" | "/") unary }
    unary      = ("-" | "+") unary | power
    power      = primary [ "^" exponent ]
    exponent   = ["-"] integer | "(" ["-"] integer ")"
    primary    = number | "x" | function "(" expression ")" | "(" expression ")"

Nodes are frozen dataclasses, so two structurally equal trees compare (and hash) equal.
"""
import logging
import re
from dataclasses import dataclass, fields

import numpy as np

from .exceptions import DomainError, ExpressionSyntaxError, MagnitudeOverflow


logger = logging.getLogger(__name__)

FUNCTION_NAMES = ('sqrt', 'exp', 'cos', 'sin')
VARIABLE_NAME = 'x'

# binding strength used by the printer; higher binds tighter
PRECEDENCE_SUM = 1
PRECEDENCE_PRODUCT = 2
PRECEDENCE_UNARY = 3
PRECEDENCE_POWER = 4
PRECEDENCE_ATOM = 5


def format_number(value):
    if float(value).is_integer() and abs(value) < 1e15:
        text = str(int(value))
    else:
        text = repr(float(value))
    return text


def _first_offending_point(mask, points):
    mask = np.broadcast_to(mask, np.shape(points))
    if np.ndim(points) == 0:
        return float(points)
    return float(points[np.argmax(mask)])


class SymbolExpr:
    """
    Base class for expression nodes. Subclasses implement `_values` (vectorized float
    evaluation), `precedence` and `_text`.
    """
    precedence = PRECEDENCE_ATOM

    def evaluate(self, x):
        """
        Evaluate the expression at a point or an array of points. Domain violations
        raise DomainError; results too large for double precision raise MagnitudeOverflow.
        """
        points = np.asarray(x, dtype=float)
        with np.errstate(all='ignore'):
            values = self._values(points) + np.zeros_like(points)
        finite = np.isfinite(values)
        if not np.all(finite):
            raise MagnitudeOverflow(
                f"{self} is not representable in double precision",
                x=_first_offending_point(~finite, points),
            )
        if points.ndim == 0:
            return float(values)
        return values

    def __call__(self, x):
        return self.evaluate(x)

    def jet(self, x, k):
        from .jets import eval_jet
        return eval_jet(self, x, k)

    def substitute(self, replacement):
        """Return a copy of the tree with every occurrence of x replaced by `replacement`"""
        raise NotImplementedError

    def _values(self, points):
        raise NotImplementedError

    def _text(self):
        raise NotImplementedError

    def __str__(self):
        return self._text()


def _wrap(node, minimum_precedence):
    text = node._text()
    if node.precedence < minimum_precedence:
        return f"({text})"
    return text


@dataclass(frozen=True)
class Variable(SymbolExpr):
    def _values(self, points):
        return points

    def _text(self):
        return VARIABLE_NAME

    def substitute(self, replacement):
        return replacement


@dataclass(frozen=True)
class Constant(SymbolExpr):
    value: float

    @property
    def precedence(self):
        return PRECEDENCE_UNARY if self.value < 0 else PRECEDENCE_ATOM

    def _values(self, points):
        return np.full_like(points, self.value)

    def _text(self):
        return format_number(self.value)

    def substitute(self, replacement):
        return self


@dataclass(frozen=True)
class Negation(SymbolExpr):
    operand: SymbolExpr
    precedence = PRECEDENCE_UNARY

    def _values(self, points):
        return -self.operand._values(points)

    def _text(self):
        return '-' + _wrap(self.operand, PRECEDENCE_UNARY)

    def substitute(self, replacement):
        return Negation(self.operand.substitute(replacement))


@dataclass(frozen=True)
class BinaryOperation(SymbolExpr):
    left: SymbolExpr
    right: SymbolExpr
    symbol = '?'

    def substitute(self, replacement):
        return type(self)(self.left.substitute(replacement), self.right.substitute(replacement))

    def _text(self):
        # left-associative: the right operand needs brackets at equal precedence
        return (
            _wrap(self.left, self.precedence) + self.symbol
            + _wrap(self.right, self.precedence + 1)
        )


class Sum(BinaryOperation):
    symbol = '+'
    precedence = PRECEDENCE_SUM

    def _values(self, points):
        return self.left._values(points) + self.right._values(points)


class Difference(BinaryOperation):
    symbol = '-'
    precedence = PRECEDENCE_SUM

    def _values(self, points):
        return self.left._values(points) - self.right._values(points)


class Product(BinaryOperation):
    symbol = '*'
    precedence = PRECEDENCE_PRODUCT

    def _values(self, points):
        return self.left._values(points) * self.right._values(points)


class Quotient(BinaryOperation):
    symbol = '/'
    precedence = PRECEDENCE_PRODUCT

    def _values(self, points):
        denominator = self.right._values(points)
        vanishing = denominator == 0
        if np.any(vanishing):
            raise DomainError("division by zero", x=_first_offending_point(vanishing, points))
        return self.left._values(points) / denominator


@dataclass(frozen=True)
class Power(SymbolExpr):
    base: SymbolExpr
    exponent: int
    precedence = PRECEDENCE_POWER

    def _values(self, points):
        base = self.base._values(points)
        if self.exponent < 0:
            vanishing = base == 0
            if np.any(vanishing):
                raise DomainError("division by zero", x=_first_offending_point(vanishing, points))
        return base ** float(self.exponent)

    def _text(self):
        exponent = str(self.exponent) if self.exponent >= 0 else f"(-{-self.exponent})"
        return _wrap(self.base, PRECEDENCE_ATOM) + '^' + exponent

    def substitute(self, replacement):
        return Power(self.base.substitute(replacement), self.exponent)


@dataclass(frozen=True)
class FunctionCall(SymbolExpr):
    name: str
    argument: SymbolExpr

    def __post_init__(self):
        if self.name not in FUNCTION_NAMES:
            raise ValueError(f"Unknown function {self.name!r}")

    def _values(self, points):
        argument = self.argument._values(points)
        if self.name == 'sqrt':
            negative = argument < 0
            if np.any(negative):
                raise DomainError(
                    "square root of a negative number", x=_first_offending_point(negative, points)
                )
            return np.sqrt(argument)
        return getattr(np, self.name)(argument)

    def _text(self):
        return f"{self.name}({self.argument._text()})"

    def substitute(self, replacement):
        return FunctionCall(self.name, self.argument.substitute(replacement))


@dataclass(frozen=True)
class Composition(SymbolExpr):
    """
    The composition outer∘inner, kept as a node of its own so that iterates and
    compositions are evaluated by composing at runtime rather than by expanding the tree.
    `label` is a display name only and does not take part in evaluation.
    """
    outer: SymbolExpr
    inner: SymbolExpr
    label: str = ''

    @property
    def precedence(self):
        return self.expanded().precedence

    def expanded(self):
        return self.outer.substitute(self.inner)

    def _values(self, points):
        return self.outer._values(self.inner._values(points))

    def _text(self):
        return self.expanded()._text()

    def substitute(self, replacement):
        return Composition(self.outer, self.inner.substitute(replacement), self.label)


IDENTITY = Variable()


def compose(f, g, label=''):
    """Return f∘g; domain violations surface only when the composition is evaluated"""
    return Composition(f, g, label)


def iterate_expr(phi, n):
    """The n-th iterate of phi as nested Composition nodes (n=0 is the identity)"""
    result = IDENTITY
    for _ in range(n):
        result = Composition(phi, result)
    return result


# Tokenizer and recursive-descent parser

TOKEN_PATTERN = re.compile(r"""
    (?P<space>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<operator>[-+*/^()])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, col {self.position})"


def tokenize(text):
    tokens = []
    offset = 0
    while offset < len(text):
        match = TOKEN_PATTERN.match(text, offset)
        if match is None:
            raise ExpressionSyntaxError(f"unexpected character {text[offset]!r}", offset + 1)
        if match.lastgroup != 'space':
            tokens.append(Token(match.lastgroup, match.group(), offset + 1))
        offset = match.end()
    tokens.append(Token('end', '', len(text) + 1))
    return tokens


class Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.current
        self.index += 1
        return token

    def accept(self, text):
        if self.current.kind == 'operator' and self.current.text == text:
            return self.advance()
        return None

    def expect(self, text):
        token = self.accept(text)
        if token is None:
            raise self.error(f"expected {text!r}")
        return token

    def error(self, message, token=None):
        token = token or self.current
        if token.kind == 'end':
            return ExpressionSyntaxError(f"{message}, found end of input", token.position)
        return ExpressionSyntaxError(f"{message}, found {token.text!r}", token.position)

    def parse(self):
        if self.current.kind == 'end':
            raise ExpressionSyntaxError("empty expression", 1)
        tree = self.expression()
        if self.current.kind != 'end':
            raise self.error("unexpected token")
        return tree

    def expression(self):
        tree = self.term()
        while True:
            if self.accept('+'):
                tree = Sum(tree, self.term())
            elif self.accept('-'):
                tree = Difference(tree, self.term())
            else:
                return tree

    def term(self):
        tree = self.unary()
        while True:
            if self.accept('*'):
                tree = Product(tree, self.unary())
            elif self.accept('/'):
                tree = Quotient(tree, self.unary())
            else:
                return tree

    def unary(self):
        if self.accept('-'):
            return Negation(self.unary())
        if self.accept('+'):
            return self.unary()
        return self.power()

    def power(self):
        base = self.primary()
        if self.accept('^'):
            return Power(base, self.exponent())
        return base

    def exponent(self):
        bracketed = self.accept('(') is not None
        negative = self.accept('-') is not None
        token = self.current
        if token.kind != 'number' or not token.text.isdigit():
            if token.kind in ('number', 'name'):
                raise ExpressionSyntaxError(
                    f"non-integer exponent {token.text!r}; '^' takes integer literals only",
                    token.position,
                )
            raise self.error("expected an integer exponent")
        self.advance()
        if bracketed:
            self.expect(')')
        value = int(token.text)
        return -value if negative else value

    def primary(self):
        token = self.current
        if token.kind == 'number':
            self.advance()
            return Constant(float(token.text))
        if token.kind == 'name':
            self.advance()
            if token.text == VARIABLE_NAME:
                return IDENTITY
            if token.text in FUNCTION_NAMES:
                self.expect('(')
                argument = self.expression()
                self.expect(')')
                return FunctionCall(token.text, argument)
            raise ExpressionSyntaxError(f"unknown identifier {token.text!r}", token.position)
        if self.accept('('):
            tree = self.expression()
            self.expect(')')
            return tree
        raise self.error("expected a number, 'x', a function or '('")


def parse_symbol(text):
    """
    Parse symbol text into a SymbolExpr. Raises ExpressionSyntaxError (with a 1-based
    column) for syntax errors, non-integer exponents and unknown identifiers.
    """
    tree = Parser(text).parse()
    logger.debug(f"parsed {text!r} as {tree!r}")
    return tree


def print_symbol(expr):
    return str(expr)


def children(expr):
    return [
        getattr(expr, field.name) for field in fields(expr)
        if isinstance(getattr(expr, field.name), SymbolExpr)
    ]


def depends_on_x(expr):
    if isinstance(expr, Variable):
        return True
    if isinstance(expr, Composition):
        return depends_on_x(expr.outer) and depends_on_x(expr.inner)
    return any(depends_on_x(child) for child in children(expr))


def constant_value(expr):
    """The value of an expression that does not involve x, or None"""
    if depends_on_x(expr):
        return None
    try:
        return expr.evaluate(0.0)
    except DomainError:
        return None
