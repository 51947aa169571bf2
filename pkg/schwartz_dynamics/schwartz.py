"""
Closed-form Schwartz functions: the builtins used as test functions for orbits, Cesàro
means, resolvents and Zak transforms, each carrying a decay class that certifies a tail
majorant for seminorm estimates.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import hermite, polynomial

from .exceptions import InvalidGeometry
from .expressions import (IDENTITY, Constant, Difference, FunctionCall, Negation, Power,
                          Product, Quotient, Sum)
from .jets import Jet
from .polynomials import Poly


logger = logging.getLogger(__name__)

# transition pieces stop this fraction of their width short of the ends, where the
# value (and every derivative) is below e^-100
TRANSITION_CUTOFF = 0.01
# bumps are cut where 1 - t^2 < 1/800, i.e. where they are below e^-799
BUMP_CUTOFF = 1 / 800
QUADRATURE_NODES_PER_UNIT = 64


class DecayClass:
    """Certifies a majorant for sup over |x| >= L, j <= n of (1 + x^2)^n |f^(j)(x)|"""
    kind = None

    def tail_bound(self, n, half_width):
        raise NotImplementedError

    def covering_half_width(self):
        """Half-width of an interval outside which f vanishes identically, or None"""
        return None


@dataclass(frozen=True)
class GaussianDecay(DecayClass):
    """f = P(x) e^(-rate x^2) for the polynomial P with the given ascending coefficients"""
    coefficients: tuple = (1.0,)
    rate: float = math.pi
    kind = 'gaussian'

    def derivative_polynomials(self, n):
        current = polynomial.Polynomial(self.coefficients)
        x = polynomial.Polynomial([0.0, 1.0])
        result = []
        for _ in range(n + 1):
            result.append(current)
            current = current.deriv() - 2 * self.rate * x * current
        return result

    def tail_bound(self, n, half_width):
        # for |x| >= 1: (1 + x^2)^n |P_j(x)| <= 2^n S_j |x|^(2n + deg P_j), and t^m e^(-rate t^2)
        # decreases beyond sqrt(m / (2 rate))
        log_bound = -math.inf
        for p in self.derivative_polynomials(n):
            total = float(np.sum(np.abs(p.coef)))
            if total == 0:
                continue
            m = 2 * n + p.degree()
            t = max(half_width, 1.0, math.sqrt(m / (2 * self.rate)))
            candidate = math.log(total) + n * math.log(2) + m * math.log(t) - self.rate * t * t
            log_bound = max(log_bound, candidate)
            if half_width < 1:
                log_bound = max(log_bound, math.log(total) + n * math.log(2))
        return math.exp(log_bound) if log_bound > -math.inf else 0.0


@dataclass(frozen=True)
class CompactSupport(DecayClass):
    lo: float
    hi: float
    kind = 'bump'

    def tail_bound(self, n, half_width):
        return 0.0 if half_width >= max(abs(self.lo), abs(self.hi)) else math.inf

    def covering_half_width(self):
        return max(abs(self.lo), abs(self.hi))


@dataclass(frozen=True)
class RationalDecay(DecayClass):
    """|f^(j)(x)| <= constant·|x|^(-power) for |x| >= 1 and every j that is asked for"""
    power: float
    constant: float = 1.0
    kind = 'rational_decay'

    def tail_bound(self, n, half_width):
        if self.power < 2 * n or half_width < 1:
            return math.inf
        return self.constant * 2 ** n * half_width ** (2 * n - self.power)


@dataclass(frozen=True)
class Piece:
    """expr applies on the half-open interval [lo, hi)"""
    lo: float
    hi: float
    expr: object


@dataclass(frozen=True)
class SchwartzFn:
    """
    multiplier · expr(x), where expr is given piecewise: each piece's expression applies
    on its half-open interval and the function is zero outside every piece.
    """
    name: str
    pieces: tuple
    decay: DecayClass
    multiplier: complex = 1.0
    params: dict = field(default_factory=dict)

    @classmethod
    def from_expr(cls, expr, decay, name=None, multiplier=1.0):
        return cls(name or str(expr), (Piece(-math.inf, math.inf, expr),), decay, multiplier)

    @property
    def expr(self):
        """The closed form, for functions given by a single piece"""
        if len(self.pieces) != 1:
            raise AttributeError(f"{self.name} is defined piecewise")
        return self.pieces[0].expr

    def scaled(self, factor):
        return SchwartzFn(self.name, self.pieces, self.decay, self.multiplier * factor, self.params)

    def _masks(self, points):
        return [(piece, (points >= piece.lo) & (points < piece.hi)) for piece in self.pieces]

    def evaluate(self, x):
        points = np.asarray(x, dtype=float)
        flat = np.atleast_1d(points)
        values = np.zeros(flat.shape)
        for piece, mask in self._masks(flat):
            if np.any(mask):
                values[mask] = piece.expr.evaluate(flat[mask])
        values = values * self.multiplier
        if points.ndim == 0:
            return values[0]
        return values

    def __call__(self, x):
        return self.evaluate(x)

    def jet(self, x, k):
        points = np.asarray(x, dtype=float)
        flat = np.atleast_1d(points)
        derivs = [np.zeros(flat.shape) for _ in range(k + 1)]
        for piece, mask in self._masks(flat):
            if np.any(mask):
                piece_jet = piece.expr.jet(flat[mask], k)
                for j in range(k + 1):
                    derivs[j][mask] = piece_jet.derivs[j]
        derivs = tuple((d * self.multiplier).reshape(points.shape) for d in derivs)
        if points.ndim == 0:
            derivs = tuple(d[()] for d in derivs)
        return Jet(points if points.ndim else float(points), k, derivs)

    def tail_bound(self, n, half_width):
        return abs(self.multiplier) * self.decay.tail_bound(n, half_width)

    def describe(self):
        if self.multiplier == 1:
            return self.name
        return f"{self.multiplier}*{self.name}"


def _pi_x_squared():
    return Product(Constant(math.pi), Power(IDENTITY, 2))


def gaussian():
    """e^(-πx^2), its own Fourier transform"""
    expr = FunctionCall('exp', Negation(_pi_x_squared()))
    return SchwartzFn.from_expr(expr, GaussianDecay(), name='gaussian')


def hermite_function(k):
    """H_k(x) e^(-πx^2) with the physicists' Hermite polynomial H_k"""
    if k < 0:
        raise InvalidGeometry(f"hermite order must be non-negative, got {k}")
    coefficients = tuple(float(c) for c in hermite.herm2poly([0] * k + [1]))
    poly = Poly([int(round(c)) for c in coefficients])
    expr = Product(poly.to_expr(), FunctionCall('exp', Negation(_pi_x_squared())))
    fn = SchwartzFn.from_expr(expr, GaussianDecay(coefficients), name=f'hermite({k})')
    return SchwartzFn(fn.name, fn.pieces, fn.decay, params={'k': k})


def _affine_argument(scale, shift):
    # scale*x + shift
    return Sum(Product(Constant(scale), IDENTITY), Constant(shift))


def bump(a, b):
    """e^(1 - 1/(1 - t^2)) with t = (2x - a - b)/(b - a): 1 at the midpoint, supported on [a, b]"""
    if not a < b:
        raise InvalidGeometry(f"a bump needs a < b, got ({a}, {b})")
    t = _affine_argument(2 / (b - a), -(a + b) / (b - a))
    one_minus_t2 = Difference(Constant(1.0), Power(t, 2))
    expr = FunctionCall('exp', Difference(Constant(1.0), Quotient(Constant(1.0), one_minus_t2)))
    middle, radius = (a + b) / 2, (b - a) / 2
    reach = radius * math.sqrt(1 - BUMP_CUTOFF)
    return SchwartzFn(
        f'bump({a:g},{b:g})',
        (Piece(middle - reach, middle + reach, expr),),
        CompactSupport(a, b),
        params={'a': a, 'b': b},
    )


def _smoothstep(tau):
    # e^(-1/τ) / (e^(-1/τ) + e^(-1/(1-τ))): 0 at τ = 0, 1 at τ = 1, flat to all orders at both
    rising = FunctionCall('exp', Negation(Quotient(Constant(1.0), tau)))
    falling = FunctionCall('exp', Negation(Quotient(Constant(1.0), Difference(Constant(1.0), tau))))
    return Quotient(rising, Sum(rising, falling))


def plateau(inner, outer):
    """Equal to 1 on [-inner, inner], 0 outside (-outer, outer), smooth in between"""
    if not 0 < inner < outer:
        raise InvalidGeometry(f"a plateau needs 0 < inner < outer, got ({inner}, {outer})")
    width = outer - inner
    margin = TRANSITION_CUTOFF * width
    # τ = (outer - |x|)/width on each side
    right = _smoothstep(_affine_argument(-1 / width, outer / width))
    left = _smoothstep(_affine_argument(1 / width, outer / width))
    return SchwartzFn(
        f'plateau({inner:g},{outer:g})',
        (
            Piece(-outer + margin, -inner - margin, left),
            Piece(-inner - margin, inner + margin, Constant(1.0)),
            Piece(inner + margin, outer - margin, right),
        ),
        CompactSupport(-outer, outer),
        params={'inner': inner, 'outer': outer},
    )


BUILTINS = {
    'gaussian': (gaussian, ()),
    'hermite': (hermite_function, (int,)),
    'bump': (bump, (float, float)),
    'plateau': (plateau, (float, float)),
}


def make_builtin(name, *args):
    """
    Build one of the builtin Schwartz functions: gaussian, hermite(k), bump(a, b) or
    plateau(inner, outer). Raises InvalidGeometry for bad parameters.
    """
    try:
        factory, types = BUILTINS[name]
    except KeyError:
        raise InvalidGeometry(f"unknown builtin {name!r}; expected one of {', '.join(BUILTINS)}")
    if len(args) != len(types):
        raise InvalidGeometry(f"{name} takes {len(types)} parameter(s), got {len(args)}")
    try:
        converted = [cast(arg) for cast, arg in zip(types, args)]
    except ValueError:
        raise InvalidGeometry(f"bad parameters for {name}: {args!r}")
    return factory(*converted)


def parse_builtin(text):
    """The command-line form: 'gaussian', 'hermite:2', 'bump:-0.5:0.5', 'plateau:1:2'"""
    name, *args = text.split(':')
    return make_builtin(name.strip(), *args)


def quadrature_interval(f, tail_eps=1e-16):
    half_width = f.decay.covering_half_width()
    if half_width is not None:
        return half_width
    half_width = 4.0
    while f.tail_bound(0, half_width) > tail_eps:
        half_width *= 2
    return half_width


def gauss_legendre_nodes(lo, hi, nodes_per_unit=QUADRATURE_NODES_PER_UNIT):
    """Composite Gauss–Legendre nodes and weights on [lo, hi], one panel per unit length"""
    panels = max(1, int(math.ceil(hi - lo)))
    base_nodes, base_weights = np.polynomial.legendre.leggauss(nodes_per_unit)
    edges = np.linspace(lo, hi, panels + 1)
    half = np.diff(edges) / 2
    middle = (edges[:-1] + edges[1:]) / 2
    nodes = (middle[:, None] + half[:, None] * base_nodes[None, :]).ravel()
    weights = (half[:, None] * base_weights[None, :]).ravel()
    return nodes, weights


def fourier_transform(f, omega):
    """
    f̂(ω) = ∫ f(x) e^(-2πixω) dx. Closed form for the gaussian (which is self-dual),
    composite Gauss–Legendre quadrature otherwise.
    """
    omega = np.asarray(omega, dtype=float)
    if f.name == 'gaussian':
        result = f.multiplier * np.exp(-math.pi * omega ** 2)
    else:
        half_width = quadrature_interval(f)
        nodes, weights = gauss_legendre_nodes(-half_width, half_width)
        values = f.evaluate(nodes) * weights
        phases = np.exp(-2j * math.pi * np.multiply.outer(np.atleast_1d(omega), nodes))
        result = (phases @ values).reshape(omega.shape)
    if omega.ndim == 0:
        return complex(result)
    return result
