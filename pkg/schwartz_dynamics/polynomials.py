"""
Exact polynomial arithmetic over the rationals, Sturm sequences, real-root isolation and
fixed points of polynomial symbols. Nothing in here counts roots with floating point:
coefficients are `fractions.Fraction` throughout, and floats taken from expressions are
converted exactly.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import singledispatch

import numpy as np
from scipy.optimize import brentq

from .expressions import (Composition, Constant, Difference, FunctionCall,
                          Negation, Power, Product, Quotient, Sum, Variable)


logger = logging.getLogger(__name__)

# isolating intervals are refined until they are at most this wide
ISOLATION_WIDTH = Fraction(1, 2 ** 32)


class Poly:
    """
    A polynomial with rational coefficients, stored in ascending order of degree. The
    zero polynomial has an empty coefficient tuple.
    """
    __slots__ = ('coeffs',)

    def __init__(self, coeffs):
        coeffs = [Fraction(c) for c in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @classmethod
    def constant(cls, value):
        return cls([value])

    @classmethod
    def identity(cls):
        return cls([0, 1])

    @property
    def degree(self):
        # the zero polynomial is given degree -1
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return 'Poly([%s])' % ', '.join(str(c) for c in self.coeffs)

    def __add__(self, other):
        other = _as_poly(other)
        size = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (size - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (size - len(other.coeffs))
        return Poly([p + q for p, q in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return Poly([])
        product = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                product[i + j] += a * b
        return Poly(product)

    __rmul__ = __mul__

    def __pow__(self, exponent):
        if exponent < 0:
            raise ValueError("polynomials only take non-negative integer powers")
        result = Poly([1])
        for _ in range(exponent):
            result = result * self
        return result

    def __divmod__(self, divisor):
        divisor = _as_poly(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        remainder = list(self.coeffs)
        quotient = [Fraction(0)] * max(len(remainder) - divisor.degree, 1)
        while len(remainder) - 1 >= divisor.degree and any(remainder):
            shift = len(remainder) - 1 - divisor.degree
            factor = remainder[-1] / divisor.leading
            quotient[shift] = factor
            for i, c in enumerate(divisor.coeffs):
                remainder[shift + i] -= factor * c
            remainder.pop()
            while remainder and remainder[-1] == 0:
                remainder.pop()
        return Poly(quotient), Poly(remainder)

    def __floordiv__(self, divisor):
        return divmod(self, divisor)[0]

    def __mod__(self, divisor):
        return divmod(self, divisor)[1]

    def __call__(self, value):
        """Exact Horner evaluation at a rational (or integer) point"""
        result = Fraction(0)
        for c in reversed(self.coeffs):
            result = result * value + c
        return result

    def derivative(self):
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:])

    def compose(self, inner):
        result = Poly([])
        for c in reversed(self.coeffs):
            result = result * inner + c
        return result

    def monic(self):
        if self.is_zero():
            return self
        return Poly([c / self.leading for c in self.coeffs])

    def evaluate(self, x):
        """Float evaluation (vectorized) for reporting and plotting"""
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), self.to_float())

    def to_float(self):
        return np.array([float(c) for c in self.coeffs] or [0.0])

    def to_expr(self):
        """The polynomial as a SymbolExpr sum of monomials, in ascending degree"""
        terms = []
        for degree, c in enumerate(self.coeffs):
            if c == 0:
                continue
            monomial = Constant(float(c))
            if degree == 1:
                monomial = Product(monomial, Variable())
            elif degree > 1:
                monomial = Product(monomial, Power(Variable(), degree))
            terms.append(monomial)
        if not terms:
            return Constant(0.0)
        tree = terms[0]
        for term in terms[1:]:
            tree = Sum(tree, term)
        return tree

    def sign_at(self, value):
        v = self(value)
        return (v > 0) - (v < 0)

    def cauchy_bound(self):
        """Every real root lies in (-B, B) for the returned B"""
        if self.degree < 1:
            return Fraction(1)
        return 1 + max(abs(c / self.leading) for c in self.coeffs[:-1])


def _as_poly(value):
    if isinstance(value, Poly):
        return value
    return Poly.constant(value)


def poly_gcd(a, b):
    """Monic greatest common divisor (Euclid over the rationals)"""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def square_free_part(p):
    if p.degree < 1:
        return p.monic()
    return (p // poly_gcd(p, p.derivative())).monic()


def square_free_decomposition(p):
    """
    Yun's algorithm: returns [(factor, multiplicity), ...] with monic, square-free,
    pairwise coprime factors such that p is a constant times the product of
    factor**multiplicity. Constant factors are omitted.
    """
    if p.degree < 1:
        return []
    derivative = p.derivative()
    common = poly_gcd(p, derivative)
    b = p // common
    c = derivative // common
    d = c - b.derivative()
    multiplicity = 1
    factors = []
    while b.degree >= 1:
        a = poly_gcd(b, d)
        if a.degree >= 1:
            factors.append((a, multiplicity))
        b = b // a
        c = d // a
        d = c - b.derivative()
        multiplicity += 1
    return factors


def sturm_sequence(p):
    sequence = [p, p.derivative()]
    while not sequence[-1].is_zero():
        sequence.append(-(sequence[-2] % sequence[-1]))
    return sequence[:-1]


def sign_variations(sequence, value):
    signs = [s for s in (poly.sign_at(value) for poly in sequence) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _count_in(sequence, lo, hi):
    return sign_variations(sequence, lo) - sign_variations(sequence, hi)


def sturm_root_count(p, lo, hi):
    """Number of distinct real roots of p in the half-open interval (lo, hi]"""
    lo, hi = Fraction(lo), Fraction(hi)
    if not lo < hi:
        raise ValueError("sturm_root_count needs lo < hi")
    if p.is_zero():
        raise ValueError("the zero polynomial vanishes everywhere")
    reduced = square_free_part(p)
    if reduced.degree < 1:
        return 0
    return _count_in(sturm_sequence(reduced), lo, hi)


@dataclass(frozen=True)
class RootInterval:
    """
    (lo, hi] contains exactly one distinct real root of the polynomial it was isolated
    from. `multiplicity_hint` is the multiplicity of that root in the original
    polynomial, read off the square-free decomposition.
    """
    lo: Fraction
    hi: Fraction
    multiplicity_hint: int = 1

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def midpoint(self):
        return float((self.lo + self.hi) / 2)

    def contains(self, value):
        return self.lo < value <= self.hi

    def approximate(self, poly):
        """
        A float estimate of the root. Simple roots (sign change across the interval) are
        polished with Brent's method; even-multiplicity roots fall back on the midpoint.
        """
        lo, hi = float(self.lo), float(self.hi)
        if poly(self.hi) == 0:
            return hi
        if poly.sign_at(self.lo) * poly.sign_at(self.hi) < 0:
            return brentq(lambda t: float(poly(Fraction(t))), lo, hi, xtol=1e-15)
        return self.midpoint


def _isolate_square_free(factor, multiplicity):
    sequence = sturm_sequence(factor)
    bound = factor.cauchy_bound()
    pending = [(-bound, bound)]
    intervals = []
    while pending:
        lo, hi = pending.pop()
        count = _count_in(sequence, lo, hi)
        if count == 0:
            continue
        if count > 1:
            middle = (lo + hi) / 2
            pending.extend([(middle, hi), (lo, middle)])
            continue
        while hi - lo > ISOLATION_WIDTH:
            middle = (lo + hi) / 2
            if _count_in(sequence, lo, middle) == 1:
                hi = middle
            else:
                lo = middle
        intervals.append(RootInterval(lo, hi, multiplicity))
    return intervals


def isolate_real_roots(p):
    """Isolating intervals, sorted left to right, for every distinct real root of p"""
    if p.is_zero():
        raise ValueError("the zero polynomial vanishes everywhere")
    intervals = []
    for factor, multiplicity in square_free_decomposition(p):
        intervals.extend(_isolate_square_free(factor, multiplicity))
    return sorted(intervals, key=lambda interval: interval.lo)


def fixed_points(phi):
    """
    Isolating intervals for the real fixed points of the polynomial symbol phi, i.e. the
    distinct real roots of phi(x) - x, tangential ones included.
    """
    displacement = phi - Poly.identity()
    if displacement.is_zero():
        raise ValueError("every real number is a fixed point of the identity")
    intervals = isolate_real_roots(displacement)
    logger.debug(f"{phi!r} has {len(intervals)} real fixed point(s)")
    return intervals


def has_odd_multiplicity_root(p):
    """True when p changes sign somewhere on the real line"""
    for factor, multiplicity in square_free_decomposition(p):
        if multiplicity % 2 and _count_in(sturm_sequence(factor), -factor.cauchy_bound(), factor.cauchy_bound()):
            return True
    return False


def real_root_count(p):
    reduced = square_free_part(p)
    if reduced.degree < 1:
        return 0
    bound = reduced.cauchy_bound()
    return _count_in(sturm_sequence(reduced), -bound, bound)


# Exact coefficient extraction from expression trees

@singledispatch
def _to_poly(node):
    return None


@_to_poly.register
def _(node: Variable):
    return Poly.identity()


@_to_poly.register
def _(node: Constant):
    return Poly.constant(Fraction(node.value))


@_to_poly.register
def _(node: Negation):
    operand = _to_poly(node.operand)
    return None if operand is None else -operand


def _binary(node, combine):
    left, right = _to_poly(node.left), _to_poly(node.right)
    if left is None or right is None:
        return None
    return combine(left, right)


@_to_poly.register
def _(node: Sum):
    return _binary(node, lambda a, b: a + b)


@_to_poly.register
def _(node: Difference):
    return _binary(node, lambda a, b: a - b)


@_to_poly.register
def _(node: Product):
    return _binary(node, lambda a, b: a * b)


@_to_poly.register
def _(node: Quotient):
    # division keeps a polynomial only when the divisor is a nonzero constant
    def divide(a, b):
        if b.degree != 0:
            return None
        return Poly([c / b.leading for c in a.coeffs])
    return _binary(node, divide)


@_to_poly.register
def _(node: Power):
    base = _to_poly(node.base)
    if base is None:
        return None
    if node.exponent >= 0:
        return base ** node.exponent
    if base.degree == 0:
        return Poly.constant(base.leading ** node.exponent)
    return None


@_to_poly.register
def _(node: FunctionCall):
    return None


@_to_poly.register
def _(node: Composition):
    outer, inner = _to_poly(node.outer), _to_poly(node.inner)
    if outer is None or inner is None:
        return None
    return outer.compose(inner)


def poly_from_expr(expr):
    """
    The exact polynomial an expression denotes, or None when it is not built from
    + - * integer powers and division by constants over x and constants.
    """
    return _to_poly(expr)
