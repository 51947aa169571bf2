"""
Jets: the derivatives f(x), f'(x), ..., f^(k)(x) of a function at a point, or at every
point of an array.

Jets hold raw derivatives. Products and compositions are truncated power-series
operations on the Taylor coefficients f^(j)/j!, so arithmetic converts on the way in and
out; composing two series is the Faà di Bruno formula.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .conf import get_setting
from .exceptions import DomainError, MagnitudeOverflow
from .expressions import (Composition, Constant, Difference, FunctionCall,
                          Negation, Power, Product, Quotient, Sum, Variable)


logger = logging.getLogger(__name__)


class LogMagnitude:
    """
    Arrays of real numbers stored as a sign (-1, 0, 1) and the natural logarithm of the
    magnitude, so that iterates of fast-growing symbols can be followed past the range of
    double precision. Zero is sign 0 with log -inf; NaN marks an indeterminate result
    (for instance the difference of two values that both overflowed the log scale).
    """
    # ndarray and numpy scalar operands defer to the reflected operators below
    __array_ufunc__ = None

    def __init__(self, sign, log):
        sign = np.asarray(sign, dtype=float)
        log = np.asarray(log, dtype=float)
        self.sign = np.where(sign == 0, 0.0, sign)
        self.log = np.where(sign == 0, -np.inf, log)

    @classmethod
    def from_values(cls, values):
        values = np.asarray(values, dtype=float)
        with np.errstate(divide='ignore'):
            return cls(np.sign(values), np.log(np.abs(values)))

    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        return cls.from_values(value)

    @property
    def shape(self):
        return np.broadcast(self.sign, self.log).shape

    def to_float(self):
        with np.errstate(over='ignore', invalid='ignore'):
            return self.sign * np.exp(self.log)

    def __neg__(self):
        return LogMagnitude(-self.sign, self.log)

    def __add__(self, other):
        other = LogMagnitude.coerce(other)
        top = np.maximum(self.log, other.log)
        shift = np.where(np.isfinite(top), top, 0.0)
        with np.errstate(all='ignore'):
            total = self.sign * np.exp(self.log - shift) + other.sign * np.exp(other.log - shift)
            log = shift + np.log(np.abs(total))
        return LogMagnitude(np.sign(total), log)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-LogMagnitude.coerce(other))

    def __rsub__(self, other):
        return LogMagnitude.coerce(other) + (-self)

    def __mul__(self, other):
        other = LogMagnitude.coerce(other)
        with np.errstate(invalid='ignore'):
            return LogMagnitude(self.sign * other.sign, self.log + other.log)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = LogMagnitude.coerce(other)
        if np.any(other.sign == 0):
            raise DomainError("division by zero in log-magnitude mode")
        with np.errstate(invalid='ignore'):
            return LogMagnitude(self.sign * other.sign, self.log - other.log)

    def __rtruediv__(self, other):
        return LogMagnitude.coerce(other) / self

    def power(self, exponent):
        if exponent == 0:
            return LogMagnitude(np.ones(self.shape), np.zeros(self.shape))
        if exponent < 0 and np.any(self.sign == 0):
            raise DomainError("division by zero in log-magnitude mode")
        if float(exponent).is_integer():
            return LogMagnitude(self.sign ** int(exponent), self.log * exponent)
        if np.any(self.sign < 0):
            raise DomainError("fractional power of a negative number")
        return LogMagnitude(self.sign, self.log * exponent)

    def exp(self):
        values = self.to_float()
        sign = np.where(np.isnan(values), np.nan, np.where(values == -np.inf, 0.0, 1.0))
        return LogMagnitude(sign, values)

    def __repr__(self):
        return f"LogMagnitude(sign={self.sign!r}, log={self.log!r})"


def _filled_like(value, constant):
    if isinstance(value, LogMagnitude):
        return LogMagnitude.from_values(np.full(value.shape, constant, dtype=float))
    return np.full(np.shape(value), constant, dtype=float)


def _first_offending_point(mask, points):
    if isinstance(points, LogMagnitude):
        points = points.to_float()
    mask = np.broadcast_to(mask, np.shape(points))
    if np.ndim(points) == 0:
        return float(points)
    return float(np.asarray(points)[np.argmax(mask)])


# Truncated power series. A series is a list of order+1 coefficient arrays (or
# LogMagnitude arrays); all operations discard terms beyond `order`.

def series_product(a, b, order):
    return [
        sum((a[i] * b[j - i] for i in range(1, j + 1)), a[0] * b[j])
        for j in range(order + 1)
    ]


def series_compose(outer, inner, order):
    """
    Taylor coefficients of F∘G, given the coefficients of F at G(x) and those of G at x.
    Summing outer[m]·(G − G(x))^m over m is the Faà di Bruno formula in series form.
    """
    shifted = [_filled_like(inner[0], 0.0)] + list(inner[1:order + 1])
    result = [outer[0]] + [_filled_like(outer[0], 0.0) for _ in range(order)]
    power = shifted
    for m in range(1, order + 1):
        for j in range(m, order + 1):
            result[j] = result[j] + outer[m] * power[j]
        if m < order:
            power = series_product(power, shifted, order)
    return result


def _raise_to(value, exponent):
    if isinstance(value, LogMagnitude):
        return value.power(exponent)
    return np.power(value, float(exponent))


def _power_series(value, exponent, order):
    # Taylor coefficients of u^exponent at u = value: binom(exponent, j)·value^(exponent−j)
    coefficients = []
    binomial = 1.0
    for j in range(order + 1):
        coefficients.append(binomial * _raise_to(value, exponent - j))
        binomial *= (exponent - j) / (j + 1)
    return coefficients


def _exp_series(value, order):
    exponential = value.exp() if isinstance(value, LogMagnitude) else np.exp(value)
    return [exponential * (1.0 / math.factorial(j)) for j in range(order + 1)]


def _trig_series(name, value, order):
    if isinstance(value, LogMagnitude):
        raise DomainError(f"{name} cannot be evaluated in log-magnitude mode")
    sine, cosine = np.sin(value), np.cos(value)
    cycle = (sine, cosine, -sine, -cosine) if name == 'sin' else (cosine, -sine, -cosine, sine)
    return [cycle[j % 4] / math.factorial(j) for j in range(order + 1)]


def _reciprocal(series, points, order):
    value = series[0]
    if not isinstance(value, LogMagnitude):
        vanishing = value == 0
        if np.any(vanishing):
            raise DomainError("division by zero", x=_first_offending_point(vanishing, points))
    return series_compose(_power_series(value, -1, order), series, order)


class JetRuleRegistry:
    """
    Maps expression node classes to functions computing the node's Taylor series at an
    array of points. Lookup walks the node class's MRO, so a rule registered for a base
    class covers its subclasses unless they have a rule of their own.
    """
    def __init__(self):
        self.rules_by_node_class = {}

    def register(self, node_class):
        def decorator(rule):
            self.rules_by_node_class[node_class] = rule
            self.get_rule.cache_clear()
            return rule
        return decorator

    @lru_cache(maxsize=None)
    def get_rule(self, node_class):
        for cls in node_class.__mro__:
            if cls in self.rules_by_node_class:
                return self.rules_by_node_class[cls]
        raise TypeError(f"No jet rule registered for {node_class.__name__}")


jet_rules = JetRuleRegistry()


def taylor_series(expr, points, order):
    return jet_rules.get_rule(type(expr))(expr, points, order)


@jet_rules.register(Variable)
def _variable_series(node, points, order):
    series = [points, _filled_like(points, 1.0)] + [_filled_like(points, 0.0) for _ in range(order - 1)]
    return series[:order + 1]


@jet_rules.register(Constant)
def _constant_series(node, points, order):
    return [_filled_like(points, node.value)] + [_filled_like(points, 0.0) for _ in range(order)]


@jet_rules.register(Negation)
def _negation_series(node, points, order):
    return [-c for c in taylor_series(node.operand, points, order)]


@jet_rules.register(Sum)
def _sum_series(node, points, order):
    left = taylor_series(node.left, points, order)
    right = taylor_series(node.right, points, order)
    return [a + b for a, b in zip(left, right)]


@jet_rules.register(Difference)
def _difference_series(node, points, order):
    left = taylor_series(node.left, points, order)
    right = taylor_series(node.right, points, order)
    return [a - b for a, b in zip(left, right)]


@jet_rules.register(Product)
def _product_series(node, points, order):
    return series_product(
        taylor_series(node.left, points, order), taylor_series(node.right, points, order), order
    )


@jet_rules.register(Quotient)
def _quotient_series(node, points, order):
    numerator = taylor_series(node.left, points, order)
    denominator = taylor_series(node.right, points, order)
    return series_product(numerator, _reciprocal(denominator, points, order), order)


@jet_rules.register(Power)
def _power_node_series(node, points, order):
    base = taylor_series(node.base, points, order)
    result = [_filled_like(base[0], 1.0)] + [_filled_like(base[0], 0.0) for _ in range(order)]
    square = base
    remaining = abs(node.exponent)
    while remaining:
        if remaining & 1:
            result = series_product(result, square, order)
        remaining >>= 1
        if remaining:
            square = series_product(square, square, order)
    if node.exponent < 0:
        result = _reciprocal(result, points, order)
    return result


@jet_rules.register(FunctionCall)
def _function_series(node, points, order):
    argument = taylor_series(node.argument, points, order)
    value = argument[0]
    if node.name == 'sqrt':
        if not isinstance(value, LogMagnitude):
            negative = value < 0
            if np.any(negative):
                raise DomainError(
                    "square root of a negative number", x=_first_offending_point(negative, points)
                )
            if order >= 1 and np.any(value == 0):
                raise DomainError(
                    "square root is not differentiable at 0",
                    x=_first_offending_point(value == 0, points),
                )
        outer = _power_series(value, 0.5, order)
    elif node.name == 'exp':
        outer = _exp_series(value, order)
    else:
        outer = _trig_series(node.name, value, order)
    return series_compose(outer, argument, order)


@jet_rules.register(Composition)
def _composition_series(node, points, order):
    inner = taylor_series(node.inner, points, order)
    outer = taylor_series(node.outer, inner[0], order)
    return series_compose(outer, inner, order)


def _as_scalar(value):
    if not isinstance(value, LogMagnitude) and np.ndim(value) == 0:
        return float(value)
    return value


@dataclass(frozen=True, eq=False)
class Jet:
    """
    Derivatives of orders 0..order at `x` (a float or an array of points). `derivs` are
    raw derivatives; in log mode each entry is a LogMagnitude.
    """
    x: object
    order: int
    derivs: tuple
    log_mode: bool = False

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("jet order must be non-negative")
        if len(self.derivs) != self.order + 1:
            raise ValueError(f"a jet of order {self.order} needs {self.order + 1} derivatives, got {len(self.derivs)}")

    @property
    def value(self):
        return self.derivs[0]

    @classmethod
    def from_taylor(cls, x, coefficients, log_mode=False):
        derivs = tuple(
            _as_scalar(c * float(math.factorial(j))) for j, c in enumerate(coefficients)
        )
        return cls(_as_scalar(x), len(derivs) - 1, derivs, log_mode)

    @classmethod
    def variable(cls, x, order):
        points = np.asarray(x, dtype=float)
        return cls.from_taylor(points, _variable_series(None, points, order))

    def taylor(self):
        return [d * (1.0 / math.factorial(j)) for j, d in enumerate(self.derivs)]

    def _combine(self, other, operation):
        if not isinstance(other, Jet):
            other = Jet.from_taylor(
                self.x, [_filled_like(self.value, other)] + [_filled_like(self.value, 0.0)] * self.order
            )
        if other.order != self.order:
            raise ValueError("jets of different orders cannot be combined")
        return Jet.from_taylor(self.x, operation(self.taylor(), other.taylor()), self.log_mode)

    def __add__(self, other):
        return self._combine(other, lambda a, b: [p + q for p, q in zip(a, b)])

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, lambda a, b: [p - q for p, q in zip(a, b)])

    def __mul__(self, other):
        return self._combine(other, lambda a, b: series_product(a, b, self.order))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._combine(
            other, lambda a, b: series_product(a, _reciprocal(b, self.x, self.order), self.order)
        )

    def __neg__(self):
        return Jet(self.x, self.order, tuple(-d for d in self.derivs), self.log_mode)

    def compose(self, inner):
        """self∘inner, where self is the jet of the outer function at inner.value"""
        return compose_jets(self, inner)

    def to_log_magnitude(self):
        if self.log_mode:
            return self
        return Jet(self.x, self.order, tuple(LogMagnitude.from_values(d) for d in self.derivs), True)

    def log_abs(self):
        """log|f^(j)(x)| for every order, in either mode"""
        if self.log_mode:
            return [d.log for d in self.derivs]
        with np.errstate(divide='ignore'):
            return [np.log(np.abs(np.asarray(d, dtype=float))) for d in self.derivs]


@dataclass(frozen=True, eq=False)
class JetOverflow(Jet):
    """
    Returned by iterate_eval when an intermediate magnitude exceeded the overflow cap.
    The derivatives are LogMagnitude estimates; `iteration` is the step at which the
    cap was first crossed.
    """
    iteration: int = 0


def compose_jets(outer, inner):
    order = min(outer.order, inner.order)
    log_mode = outer.log_mode or inner.log_mode
    coefficients = series_compose(outer.taylor()[:order + 1], inner.taylor()[:order + 1], order)
    return Jet.from_taylor(inner.x, coefficients, log_mode)


def eval_jet(expr, x, k):
    """
    Jet of order k of `expr` at x (a float, an array, or a LogMagnitude for log-mode
    evaluation). Raises DomainError for domain violations and MagnitudeOverflow when a
    float evaluation leaves double precision.
    """
    if k < 0:
        raise ValueError("jet order must be non-negative")
    log_mode = isinstance(x, LogMagnitude)
    points = x if log_mode else np.asarray(x, dtype=float)
    with np.errstate(all='ignore'):
        coefficients = taylor_series(expr, points, k)
    jet = Jet.from_taylor(x if log_mode else points, coefficients, log_mode)
    if not log_mode:
        for deriv in jet.derivs:
            finite = np.isfinite(deriv)
            if not np.all(finite):
                raise MagnitudeOverflow(
                    f"jet of {expr} is not representable in double precision",
                    x=_first_offending_point(~finite, points),
                )
    return jet


def _within_cap(jet, cap):
    return all(
        np.all(np.isfinite(d)) and np.all(np.abs(d) <= cap) for d in jet.derivs
    )


def iterate_jets(phi, x, k, n, cap=None):
    """
    Yield the jets of φ_1, ..., φ_n at x, one composition at a time. `phi` is anything
    with a `jet(x, k)` method (a SymbolExpr or an implicitly defined symbol).

    When an intermediate magnitude exceeds `cap` (SCHWARTZ_OVERFLOW_CAP by default) the
    iteration carries on in log-magnitude mode, and from that step on the jets yielded
    are JetOverflow instances.
    """
    if n < 0:
        raise ValueError("iteration count must be non-negative")
    if cap is None:
        cap = get_setting('OVERFLOW_CAP')

    current = Jet.variable(x, k)
    overflow_at = None
    for step in range(1, n + 1):
        if overflow_at is None:
            try:
                candidate = compose_jets(phi.jet(current.value, k), current)
            except MagnitudeOverflow:
                candidate = None
            if candidate is not None and _within_cap(candidate, cap):
                current = candidate
                yield current
                continue
            overflow_at = step
            logger.debug(f"iterate {step} of {phi} passed {cap:g}; switching to log-magnitude mode")
            current = current.to_log_magnitude()
        current = compose_jets(phi.jet(current.value, k), current)
        yield JetOverflow(current.x, current.order, current.derivs, True, iteration=overflow_at)


def iterate_eval(phi, n, x, k, cap=None):
    """
    Jet of the n-th iterate φ_n at x, by n successive jet compositions. A JetOverflow is
    returned when the magnitudes left the overflow cap on the way.
    """
    current = Jet.variable(x, k)
    for current in iterate_jets(phi, x, k, n, cap):
        pass
    return current


def invert_jet(jet):
    """
    Jet of the inverse function at jet.value, from the jet of the function at jet.x, by
    series reversion. The first derivative must not vanish.
    """
    if jet.log_mode:
        raise DomainError("series reversion is not available in log-magnitude mode")
    order = jet.order
    forward = jet.taylor()
    if order == 0:
        return Jet(jet.value, 0, (jet.x,))
    slope = np.asarray(forward[1], dtype=float)
    if np.any(slope == 0):
        raise DomainError("the function is not invertible where its derivative vanishes")

    inverse = [np.asarray(jet.x, dtype=float) + np.zeros_like(slope), 1.0 / slope]
    inverse += [np.zeros_like(slope) for _ in range(order - 1)]
    for m in range(2, order + 1):
        composed = series_compose(forward, inverse, order)
        inverse[m] = inverse[m] - composed[m] / slope
    return Jet.from_taylor(jet.value, inverse)
