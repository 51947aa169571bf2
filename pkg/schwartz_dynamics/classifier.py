"""
Symbol validity checks and the power-boundedness / mean-ergodicity classification of
composition operators C_φ f = f∘φ on the Schwartz space.

`classify` runs a cascade of rules, most exact first:

    R1  affine symbols ax + b
    R2  polynomial symbols of degree >= 2 (exact, via Sturm sequences)
    R5.sqrt_shift  the family sqrt(x^2 + c), c > 0
    R3  increasing symbols
    R4  decreasing symbols
    R5  everything else (witness search and the uniform power-boundedness probe)

Every rule that contributes to a verdict is recorded with a citation, and the numeric
rules attach witnesses that can be replayed with `Witness.validate`.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from .conf import get_positive_setting, get_setting
from .exceptions import DomainError, MagnitudeOverflow, PreconditionError
from .expressions import FunctionCall, SymbolExpr
from .grids import GridSpec, Monotonicity, log_tail, monotonicity_classify, probe_points
from .jets import LogMagnitude, eval_jet, iterate_jets
from .polynomials import Poly, fixed_points, poly_from_expr, real_root_count


logger = logging.getLogger(__name__)

# candidate exponents p for |φ^(j)(x)| <= C(1 + φ(x)^2)^p
GROWTH_EXPONENTS = (1, 2, 3, 4, 6, 8, 12, 16)
# slack (as a factor) allowed between the inner and outer maxima of a growth ratio
GROWTH_SLACK = 1.01
# the quartile comparison of the uniform probe uses the same factor as orbit growth flags
UNIFORM_GROWTH_FACTOR = 1.1

INVOLUTION_TOLERANCE = 1e-9
IDENTITY_TOLERANCE = 1e-12
ESCAPE_RADIUS = 1e12
DISPLACEMENT_TAIL = (1e3, 1e6)

SUPERCYCLICITY_NOTE = (
    "Composition operators on S(R) are never supercyclic (and so never hypercyclic); "
    "this is a static statement, not a computed verdict."
)
TANGENTIAL_CAVEAT = (
    "Fixed points were searched for as sign changes of φ(x) - x on the probe; tangential "
    "fixed points narrower than the probe spacing are not detected."
)

RULES = {
    'R1': "Affine remark: for φ(x) = ax + b, C_φ is mean ergodic iff φ(x) = x or φ(x) = -x + b",
    'R1.identity': "Affine remark: φ(x) = x gives the identity operator",
    'R1.reflection': "Affine remark: φ(x) = -x + b is an involution, so C_φ is power bounded",
    'R1.translation': "Affine remark: φ_n(-nb) = 0 is a bounded image of an unbounded sequence",
    'R1.dilation': "Affine remark: for |a| != 1, φ has a fixed point and is not an involution",
    'R2': (
        "Polynomial theorem: for deg φ >= 2, C_φ is power bounded iff mean ergodic iff "
        "(3) the degree of φ is even and it has no fixed points"
    ),
    'R2.even_no_fixed_points': "Polynomial theorem (3): even degree and no real fixed point",
    'R2.odd_degree': "Polynomial theorem: every polynomial of odd degree > 1 has a fixed point",
    'R2.fixed_point': "Polynomial theorem (3): a real fixed point rules out mean ergodicity",
    'R3': "Monotone theorem: an increasing symbol gives a power bounded C_φ iff φ(x) = x",
    'R3.identity': "Monotone theorem: φ(x) = x on the probe",
    'R3.fixed_point': (
        "Increasing symbols: a fixed point together with φ != id rules out mean ergodicity"
    ),
    'R3.displaced': (
        "Displaced-symbol corollary: |φ(x) - x| > δ on a tail rules out mean ergodicity"
    ),
    'R3.open': (
        "Open case remark: increasing, no fixed point and φ(x) - x -> 0 at the relevant end "
        "(as for x + exp(-x^2)); mean ergodicity is not known"
    ),
    'R4': "Decreasing symbols: C_φ is power bounded iff mean ergodic iff φ∘φ = id",
    'R4.involution': "Decreasing symbols: φ∘φ = id on the probe",
    'R4.not_involution': "Decreasing symbols: φ∘φ != id, so C_φ is not mean ergodic",
    'R5': "General symbols: witness lemma, bounded-orbit proposition, uniform bound proposition",
    'R5.sqrt_shift': (
        "Square-root example: the iterates sqrt(x^2 + nc) satisfy the uniform bounds, "
        "so C_φ is power bounded"
    ),
    'R5.bounded_image_sequence': (
        "Witness lemma (b): |x_n|^k >= n and (φ_n(x_n)) bounded rules out mean ergodicity"
    ),
    'R5.bounded_orbit_plus_divergence': (
        "Bounded-orbit proposition: a bounded orbit with unbounded orbits beyond some k "
        "rules out mean ergodicity"
    ),
    'R5.uniform_probe_violation': (
        "Uniform bound proposition: the iterates break the uniform symbol bounds, so C_φ "
        "is not power bounded"
    ),
    'R5.uniform_probe_consistent': (
        "Uniform bound proposition: the iterates are consistent with uniform symbol bounds "
        "(heuristic evidence only)"
    ),
}


class Verdict(str, Enum):
    YES = 'yes'
    NO = 'no'
    UNKNOWN = 'unknown'


class Status(str, Enum):
    PASS = 'pass'
    FAIL = 'fail'
    HEURISTIC_PASS = 'heuristic_pass'


@dataclass(frozen=True)
class GrowthBound:
    """|φ^(j)(x)| <= C(1 + φ(x)^2)^p on the probe"""
    j: int
    C: float
    p: int


@dataclass(frozen=True)
class SymbolCheck:
    condition_i: Status
    growth_bounds: tuple
    condition_ii: Status
    k: int = None
    counterexample_i: float = None
    counterexample_ii: float = None
    notes: tuple = ()

    def __post_init__(self):
        if self.condition_i == Status.FAIL and self.counterexample_i is None:
            raise ValueError("a failed condition (i) needs a counterexample point")
        if self.condition_ii == Status.FAIL and self.counterexample_ii is None:
            raise ValueError("a failed condition (ii) needs a counterexample point")

    @property
    def failed(self):
        return Status.FAIL in (self.condition_i, self.condition_ii)

    @property
    def exact(self):
        return self.condition_i == self.condition_ii == Status.PASS


@dataclass(frozen=True)
class Shape:
    kind: str
    degree: int = None
    fixed_point_count: int = None
    a: float = None
    b: float = None
    direction: str = None

    def describe(self):
        if self.kind == 'polynomial':
            return f"polynomial(degree={self.degree}, fixed_points={self.fixed_point_count})"
        if self.kind == 'affine':
            return f"affine(a={self.a:g}, b={self.b:g})"
        if self.kind == 'monotone':
            return f"monotone({self.direction})"
        return self.kind


@dataclass(frozen=True)
class RuleCitation:
    rule: str
    citation: str

    @classmethod
    def of(cls, rule):
        return cls(rule, RULES[rule])


class WitnessKind(str, Enum):
    BOUNDED_IMAGE_SEQUENCE = 'bounded_image_sequence'
    DISPLACED_SYMBOL = 'displaced_symbol'
    BOUNDED_ORBIT_PLUS_DIVERGENCE = 'bounded_orbit_plus_divergence'
    INVOLUTION_FAILURE = 'involution_failure'
    FIXED_POINT_NON_IDENTITY = 'fixed_point_non_identity'


witness_validators = {}


def validates(kind):
    def decorator(function):
        witness_validators[kind] = function
        return function
    return decorator


@dataclass(frozen=True)
class Witness:
    """
    Numeric data realizing one of the non-mean-ergodicity (or non-involution) rules.
    `validate(phi)` replays the stored data against phi and checks the rule's inequality
    at every stored index.
    """
    kind: WitnessKind
    rule_ref: str
    data: dict

    def validate(self, phi):
        return witness_validators[self.kind](phi, self.data)


@dataclass(frozen=True)
class ClassificationReport:
    symbol_text: str
    symbol_check: SymbolCheck
    shape: Shape
    power_bounded: Verdict
    mean_ergodic: Verdict
    uniformly_mean_ergodic: Verdict
    rules_fired: tuple = ()
    witnesses: tuple = ()
    notes: tuple = ()

    def __post_init__(self):
        problems = self.consistency_errors()
        if problems:
            raise ValueError("inconsistent classification: " + "; ".join(problems))

    def consistency_errors(self):
        problems = []
        if self.power_bounded == Verdict.YES and self.mean_ergodic != Verdict.YES:
            problems.append("power bounded but not mean ergodic")
        if self.mean_ergodic == Verdict.YES and self.uniformly_mean_ergodic != Verdict.YES:
            problems.append("mean ergodic but not uniformly mean ergodic")
        if self.uniformly_mean_ergodic == Verdict.YES and self.mean_ergodic != Verdict.YES:
            problems.append("uniformly mean ergodic but not mean ergodic")
        if self.shape.kind == 'polynomial' and (self.shape.degree or 0) >= 2:
            if self.power_bounded != self.mean_ergodic:
                problems.append("polynomial of degree >= 2 with split verdicts")
        if self.shape.kind == 'monotone' and self.shape.direction == Monotonicity.DECREASING.value:
            if self.power_bounded != self.mean_ergodic:
                problems.append("decreasing symbol with split verdicts")
        return problems

    @property
    def rule_ids(self):
        return [citation.rule for citation in self.rules_fired]


@dataclass(frozen=True)
class ClassifierConfig:
    probe: GridSpec = GridSpec(half_width=100.0, points=8192, refinement_levels=0)
    tail_points: int = 128
    max_k: int = 64
    horizon: int = 100
    jmax: int = 3
    witness_horizon: int = 200
    witness_bound: float = 10.0
    witness_exponent: int = 2
    displacement_floor: float = 1e-6

    @classmethod
    def from_settings(cls, **overrides):
        values = {
            'probe': GridSpec(
                half_width=get_positive_setting('PROBE_HALF_WIDTH'),
                points=get_positive_setting('PROBE_POINTS', int),
                refinement_levels=0,
            ),
            'tail_points': int(get_setting('PROBE_TAIL_POINTS')),
            'max_k': get_positive_setting('MAX_K', int),
            'horizon': get_positive_setting('UNIFORM_HORIZON', int),
            'jmax': get_positive_setting('JMAX', int),
            'witness_horizon': get_positive_setting('WITNESS_HORIZON', int),
            'witness_bound': get_positive_setting('WITNESS_BOUND'),
            'displacement_floor': get_positive_setting('DISPLACEMENT_FLOOR'),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def points(self):
        return probe_points(self.probe, self.tail_points)


# Sampling helpers

def sample(phi, points):
    """
    phi at every point, with +inf where the value leaves double precision (or the point
    itself already escaped) and NaN where phi is undefined.
    """
    points = np.asarray(points, dtype=float)
    result = np.full(points.shape, np.inf)
    finite = np.isfinite(points)
    try:
        result[finite] = phi.evaluate(points[finite])
    except (MagnitudeOverflow, DomainError):
        for i in np.flatnonzero(finite):
            try:
                result[i] = phi.evaluate(points[i])
            except MagnitudeOverflow:
                result[i] = np.inf
            except DomainError:
                result[i] = np.nan
    return result


def replay(phi, xs, steps):
    """φ_n(x) for each pair (x, n), iterating all pairs together"""
    values = np.array(xs, dtype=float)
    steps = np.asarray(steps, dtype=int)
    for step in range(1, int(steps.max(initial=0)) + 1):
        active = steps >= step
        values[active] = sample(phi, values[active])
    return values


def log_jet(phi, points, order):
    """log|φ^(j)| at the points for j = 0..order, in log-magnitude mode where needed"""
    try:
        return phi.jet(points, order).log_abs()
    except MagnitudeOverflow:
        if not isinstance(phi, SymbolExpr):
            raise
        logger.debug(f"jet of {phi} overflows on the probe; evaluating in log-magnitude mode")
        return eval_jet(phi, LogMagnitude.from_values(points), order).log_abs()


def required_k(log_abs_phi, points):
    """
    For each point the smallest integer k for which condition (ii) holds there: either the
    point is excluded (|x| < k) or |φ(x)| >= |x|^(1/k).
    """
    size = np.abs(np.asarray(points, dtype=float))
    with np.errstate(divide='ignore', invalid='ignore'):
        by_exclusion = np.floor(size) + 1
        by_growth = np.where(log_abs_phi > 0, np.ceil(np.log(size) / log_abs_phi), np.inf)
        required = np.minimum(by_exclusion, by_growth)
    required = np.where((size < 1) | np.isnan(log_abs_phi), 1, required)
    return np.maximum(required, 1)


def _top(values):
    values = np.asarray(values, dtype=float)
    if values.size == 0 or np.all(np.isnan(values)):
        return -np.inf, None
    index = int(np.nanargmax(values))
    return float(values[index]), index


def _growth_ratio(log_derivative, log_weight, p):
    with np.errstate(invalid='ignore'):
        return log_derivative - p * log_weight


def _bounded_exp(log_value):
    return float(math.exp(min(log_value, 700.0))) if log_value > -np.inf else 0.0


def _fraction_ceil(value):
    return int(math.ceil(Fraction(value)))


# Symbol conditions

def _polynomial_k(poly):
    # for |x| >= R the lower terms are at most half the leading one, so |p(x)| >= |a_d|/2 |x|^d
    lead = abs(poly.leading)
    lower = sum(abs(c) for c in poly.coeffs[:-1])
    radius = 2 * (lower + 1) / lead + 1
    return radius, lead


def _sampled_growth_bounds(derivatives, log_weight, jmax, p=1):
    bounds = []
    for j in range(1, jmax + 1):
        log_c, _ = _top(_growth_ratio(derivatives[j], log_weight, p))
        bounds.append(GrowthBound(j, _bounded_exp(log_c), p))
    return tuple(bounds)


def _check_polynomial(poly, jmax, points):
    if poly.degree < 1:
        value = abs(float(poly.leading)) if not poly.is_zero() else 0.0
        return SymbolCheck(
            condition_i=Status.PASS,
            growth_bounds=tuple(GrowthBound(j, 0.0, 1) for j in range(1, jmax + 1)),
            condition_ii=Status.FAIL,
            counterexample_ii=value + 1.0,
            notes=("a constant symbol violates |φ(x)| >= |x|^(1/k) for every k",),
        )
    radius, lead = _polynomial_k(poly)
    k = max(2, _fraction_ceil(radius), _fraction_ceil(Fraction(4) / lead ** 2))
    derivatives = [poly.evaluate(points)]
    current = poly
    for _ in range(jmax):
        current = current.derivative()
        derivatives.append(current.evaluate(points))
    with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
        logs = [np.log(np.abs(d)) for d in derivatives]
        log_weight = np.logaddexp(0, 2 * logs[0])
    return SymbolCheck(
        condition_i=Status.PASS,
        growth_bounds=_sampled_growth_bounds(logs, log_weight, jmax),
        condition_ii=Status.PASS,
        k=k,
        notes=(
            f"polynomial of degree {poly.degree}: derivatives have lower degree than φ^2, "
            "so p = 1 works (C sampled on the probe)",
            f"|φ(x)| >= |x|^(1/{k}) for |x| >= {k} from the coefficient bound",
        ),
    )


def positive_polynomial_under_sqrt(phi):
    """q when phi is sqrt(q) for a polynomial q of even degree with no real roots, else None"""
    if not (isinstance(phi, FunctionCall) and phi.name == 'sqrt'):
        return None
    inner = poly_from_expr(phi.argument)
    if inner is None or inner.degree < 2 or inner.degree % 2 or inner.leading <= 0:
        return None
    if real_root_count(inner) != 0:
        return None
    return inner


def _check_sqrt_of_polynomial(phi, inner, jmax, points):
    radius, lead = _polynomial_k(inner)
    k = max(2, _fraction_ceil(radius), _fraction_ceil(Fraction(2) / lead))
    logs = log_jet(phi, points, jmax)
    log_weight = np.logaddexp(0, 2 * logs[0])
    return SymbolCheck(
        condition_i=Status.PASS,
        growth_bounds=_sampled_growth_bounds(logs, log_weight, jmax),
        condition_ii=Status.PASS,
        k=k,
        notes=(
            f"square root of a positive polynomial of degree {inner.degree}: φ is bounded "
            "below and its derivatives grow more slowly than φ (C sampled on the probe)",
            f"|φ(x)| >= |x|^(1/{k}) for |x| >= {k} from the coefficient bound",
        ),
    )


def _check_numerically(phi, jmax, probe, points, max_k):
    logs = log_jet(phi, points, jmax)
    log_weight = np.logaddexp(0, 2 * logs[0])
    outer = np.abs(points) > probe.half_width
    if not np.any(outer):
        outer = np.abs(points) > 0.75 * probe.half_width

    bounds, notes = [], []
    condition_i, counterexample_i = Status.HEURISTIC_PASS, None
    for j in range(1, jmax + 1):
        for p in GROWTH_EXPONENTS:
            ratio = _growth_ratio(logs[j], log_weight, p)
            inner_top, _ = _top(ratio[~outer])
            outer_top, _ = _top(ratio[outer])
            if outer_top <= inner_top + math.log(GROWTH_SLACK) or outer_top == -np.inf:
                top, _ = _top(ratio)
                bounds.append(GrowthBound(j, _bounded_exp(top), p))
                break
        else:
            ratio = _growth_ratio(logs[j], log_weight, GROWTH_EXPONENTS[-1])
            _, index = _top(np.where(outer, ratio, np.nan))
            condition_i = Status.FAIL
            counterexample_i = float(points[index if index is not None else -1])
            notes.append(
                f"|φ^({j})| outgrows (1 + φ^2)^{GROWTH_EXPONENTS[-1]} towards x = {counterexample_i:g}"
            )
            break

    required = required_k(logs[0], points)
    k = int(required.max())
    if k <= max_k:
        condition_ii, counterexample_ii = Status.HEURISTIC_PASS, None
    else:
        condition_ii, k = Status.FAIL, None
        counterexample_ii = float(points[int(np.argmax(required))])
        notes.append(
            f"|φ(x)| < |x|^(1/{max_k}) at x = {counterexample_ii:g}; no k <= {max_k} works"
        )
    notes.append("checked numerically on the probe and its log-spaced tails")
    return SymbolCheck(
        condition_i=condition_i,
        growth_bounds=tuple(bounds),
        condition_ii=condition_ii,
        k=k,
        counterexample_i=counterexample_i,
        counterexample_ii=counterexample_ii,
        notes=tuple(notes),
    )


def check_symbol_conditions(phi, jmax=None, probe=None, max_k=None, tail_points=None):
    """
    Check the two conditions characterizing symbols for S(R):

        (i)  for every j there are C, p with |φ^(j)(x)| <= C(1 + φ(x)^2)^p
        (ii) there is k with |φ(x)| >= |x|^(1/k) whenever |x| >= k

    Polynomials and square roots of positive polynomials are decided exactly; any other
    symbol is checked on the probe and its tails, giving `heuristic_pass` at best.
    """
    defaults = ClassifierConfig.from_settings()
    jmax = defaults.jmax if jmax is None else jmax
    probe = defaults.probe if probe is None else probe
    max_k = defaults.max_k if max_k is None else max_k
    if jmax < 1:
        raise ValueError("jmax must be at least 1")
    points = probe_points(probe, defaults.tail_points if tail_points is None else tail_points)

    if isinstance(phi, SymbolExpr):
        poly = poly_from_expr(phi)
        if poly is not None:
            return _check_polynomial(poly, jmax, points)
        inner = positive_polynomial_under_sqrt(phi)
        if inner is not None:
            return _check_sqrt_of_polynomial(phi, inner, jmax, points)
    return _check_numerically(phi, jmax, probe, points, max_k)


# Witnesses

@validates(WitnessKind.BOUNDED_IMAGE_SEQUENCE)
def _validate_bounded_image(phi, data):
    k, bound = data['k'], data['bound']
    triples = data['triples']
    if not triples:
        return False
    steps = [n for n, _, _ in triples]
    xs = [x for _, x, _ in triples]
    images = replay(phi, xs, steps)
    growth = all(abs(x) ** k >= n * (1 - 1e-12) for n, x, _ in triples)
    return bool(growth and np.all(np.abs(images) <= bound * (1 + 1e-9) + 1e-9))


def _has_fixed_point(phi, lo, hi):
    lo_shift = sample(phi, [lo])[0] - lo
    hi_shift = sample(phi, [hi])[0] - hi
    if lo_shift * hi_shift <= 0:
        return True
    middle = (lo + hi) / 2
    return abs(sample(phi, [middle])[0] - middle) <= 1e-9 * (1 + abs(middle))


def _escapes(phi, x, steps, radius):
    value = x
    for _ in range(steps):
        value = sample(phi, [value])[0]
        if not np.isfinite(value) or abs(value) > radius:
            return not np.isnan(value)
    return False


@validates(WitnessKind.BOUNDED_ORBIT_PLUS_DIVERGENCE)
def _validate_bounded_orbit(phi, data):
    lo, hi = data['fixed_point_bracket']
    if not _has_fixed_point(phi, lo, hi):
        return False
    return all(
        abs(x) >= data['radius'] and _escapes(phi, x, steps, data['escape_radius'])
        for x, steps in data['escaping']
    )


@validates(WitnessKind.DISPLACED_SYMBOL)
def _validate_displaced(phi, data):
    xs = np.array([x for x, _ in data['samples']])
    shift = sample(phi, xs) - xs
    return bool(np.all(data['sign'] * shift >= data['delta']))


@validates(WitnessKind.INVOLUTION_FAILURE)
def _validate_involution_failure(phi, data):
    x = data['x']
    twice = sample(phi, sample(phi, [x]))[0]
    return bool(abs(twice - x) > data['tolerance'])


@validates(WitnessKind.FIXED_POINT_NON_IDENTITY)
def _validate_fixed_point(phi, data):
    lo, hi = data['fixed_point_bracket']
    moved = data['moved_point']
    return _has_fixed_point(phi, lo, hi) and bool(sample(phi, [moved])[0] != moved)


def _first_valid(phi, witness):
    if witness is not None and witness.validate(phi):
        return witness
    if witness is not None:
        logger.debug(f"discarding a {witness.kind.value} witness for {phi} that does not replay")
    return None


def _preimage(phi, target, limit=1e12):
    """The t with φ(t) = target for a monotone φ, or None when target is not in the range"""
    def shift(t):
        value = sample(phi, [t])[0]
        return value - target if np.isfinite(value) else (np.inf if value > 0 else -np.inf)

    lo, hi = target - 1.0, target + 1.0
    while True:
        f_lo, f_hi = shift(lo), shift(hi)
        if np.isnan(f_lo) or np.isnan(f_hi):
            return None
        if f_lo == 0:
            return lo
        if f_hi == 0:
            return hi
        if f_lo * f_hi < 0:
            return brentq(shift, lo, hi, xtol=1e-14, rtol=1e-15)
        width = hi - lo
        if width > limit:
            return None
        lo, hi = lo - width, hi + width


def _backward_sequence(phi, k, horizon, bound):
    targets = [0.0]
    for _ in range(horizon):
        previous = _preimage(phi, targets[-1])
        if previous is None:
            return None
        targets.append(previous)
    steps = np.arange(1, horizon + 1)
    xs = np.array(targets[1:])
    return _sequence_witness(phi, k, bound, steps, xs)


def _sequence_witness(phi, k, bound, steps, xs):
    images = replay(phi, xs, steps)
    good = (np.abs(xs) ** k >= steps) & (np.abs(images) <= bound)
    # the inequality must hold from some index on, and over at least half the horizon
    if not good[-1]:
        return None
    start = len(good) - int(np.argmin(good[::-1])) if not np.all(good) else 0
    if start > len(good) // 2:
        return None
    triples = [
        (int(n), float(x), float(value))
        for n, x, value in zip(steps[start:], xs[start:], images[start:])
    ]
    return Witness(
        WitnessKind.BOUNDED_IMAGE_SEQUENCE,
        'R5.bounded_image_sequence',
        {'k': k, 'bound': bound, 'triples': triples},
    )


def _grid_sequence(phi, k, horizon, bound, points):
    orbit = np.array(points, dtype=float)
    size = np.abs(points) ** k
    steps, xs = [], []
    for n in range(1, horizon + 1):
        orbit = sample(phi, orbit)
        candidates = np.where(size >= n, np.abs(orbit), np.nan)
        if np.all(np.isnan(candidates)):
            return None
        index = int(np.nanargmin(candidates))
        steps.append(n)
        xs.append(points[index])
    return _sequence_witness(phi, k, bound, np.array(steps), np.array(xs))


def _sign_change(shift):
    """Index i of the first strict sign change between shift[i] and the next nonzero entry"""
    nonzero = np.flatnonzero(np.isfinite(shift) & (shift != 0))
    if nonzero.size < 2:
        return None
    signs = np.sign(shift[nonzero])
    changes = np.flatnonzero(signs[:-1] != signs[1:])
    if changes.size == 0:
        return None
    return int(nonzero[changes[0]]), int(nonzero[changes[0] + 1])


def _bounded_orbit_witness(phi, horizon, points):
    shift = sample(phi, points) - points
    bracket = _sign_change(shift)
    if bracket is None:
        return None
    lo, hi = float(points[bracket[0]]), float(points[bracket[1]])

    orbit = np.array(points, dtype=float)
    escape_step = np.zeros(points.shape, dtype=int)
    for n in range(1, horizon + 1):
        orbit = sample(phi, orbit)
        escaped = (escape_step == 0) & ~np.isnan(orbit) & (~np.isfinite(orbit) | (np.abs(orbit) > ESCAPE_RADIUS))
        escape_step[escaped] = n
    diverged = escape_step > 0
    if not np.any(diverged):
        return None
    bounded = ~diverged
    spacing = float(np.min(np.diff(points)))
    radius = float(np.max(np.abs(points[bounded]))) + spacing if np.any(bounded) else float(np.min(np.abs(points)))
    beyond = np.abs(points) >= radius
    if not np.any(beyond) or not np.all(diverged[beyond]):
        return None
    candidates = np.flatnonzero(beyond)
    chosen = sorted({candidates[0], candidates[-1], *candidates[np.argsort(np.abs(points[candidates]))[:4]]})
    escaping = [(float(points[i]), int(escape_step[i])) for i in chosen]
    return Witness(
        WitnessKind.BOUNDED_ORBIT_PLUS_DIVERGENCE,
        'R5.bounded_orbit_plus_divergence',
        {
            'fixed_point_bracket': (lo, hi),
            'fixed_point': _fixed_point_estimate(phi, lo, hi),
            'radius': radius,
            'escape_radius': ESCAPE_RADIUS,
            'escaping': escaping,
        },
    )


def _fixed_point_estimate(phi, lo, hi):
    def shift(t):
        return sample(phi, [t])[0] - t
    if shift(lo) * shift(hi) < 0:
        return float(brentq(shift, lo, hi, xtol=1e-14))
    return (lo + hi) / 2


def non_me_witness(phi, k=None, horizon=None, bound=None, probe=None, tail_points=None):
    """
    Search for evidence that C_φ is not mean ergodic:

    - a sequence x_n with |x_n|^k >= n and |φ_n(x_n)| <= bound, found by solving
      φ(x_n) = x_(n-1) backwards from x_0 = 0 when φ is monotone, and by grid search
      otherwise;
    - failing that, a fixed point (a bounded orbit) together with a radius beyond which
      every probed orbit escapes.

    Returns the first witness that replays successfully, or None.
    """
    config = ClassifierConfig.from_settings()
    k = config.witness_exponent if k is None else k
    horizon = config.witness_horizon if horizon is None else horizon
    bound = config.witness_bound if bound is None else bound
    probe = config.probe if probe is None else probe
    if horizon > 10 ** 4:
        raise ValueError("the witness horizon is capped at 10^4 iterates")
    points = probe_points(probe, config.tail_points if tail_points is None else tail_points)

    direction = monotonicity_classify(phi, probe)
    if direction in (Monotonicity.INCREASING, Monotonicity.DECREASING):
        witness = _backward_sequence(phi, k, horizon, bound)
    else:
        witness = _grid_sequence(phi, k, horizon, bound, points)
    witness = _first_valid(phi, witness)
    if witness is None:
        witness = _first_valid(phi, _bounded_orbit_witness(phi, horizon, points))
    if witness is not None:
        logger.debug(f"found a {witness.kind.value} witness for {phi}")
    return witness


# Uniform power-boundedness probe

@dataclass(frozen=True)
class UniformProbeResult:
    status: str
    n: int = None
    j: int = None
    x: float = None
    growth_bounds: tuple = ()
    k: int = None
    log_mode_from: int = None
    notes: tuple = ()

    @property
    def consistent(self):
        return self.status == 'consistent'


def _quartile_growth(series):
    split = max(1, (len(series) * 3) // 4)
    early, late = series[:split], series[split:]
    if not late:
        return False
    early_top, late_top = max(early), max(late)
    if late_top == -np.inf:
        return False
    return late_top > early_top + math.log(UNIFORM_GROWTH_FACTOR)


def uniform_pb_probe(phi, N=None, jmax=None, probe=None, max_k=None, tail_points=None):
    """
    Heuristic check of the uniform symbol bounds over the iterates φ_1..φ_N: one (C, p)
    per derivative order must serve every n, and condition (ii) must hold with one k.
    Iterates that overflow double precision are followed in log-magnitude mode.
    """
    config = ClassifierConfig.from_settings()
    N = config.horizon if N is None else N
    jmax = config.jmax if jmax is None else jmax
    probe = config.probe if probe is None else probe
    max_k = config.max_k if max_k is None else max_k
    if N > 200:
        raise ValueError("the uniform probe is capped at 200 iterates")
    points = probe_points(probe, config.tail_points if tail_points is None else tail_points)

    tops = {(j, p): [] for j in range(1, jmax + 1) for p in GROWTH_EXPONENTS}
    arg_tops = {key: [] for key in tops}
    worst_k, worst_at = 1, None
    log_mode_from = None
    for n, jet in enumerate(iterate_jets(phi, points, jmax, N), start=1):
        if jet.log_mode and log_mode_from is None:
            log_mode_from = n
        logs = jet.log_abs()
        log_weight = np.logaddexp(0, 2 * logs[0])
        for (j, p), series in tops.items():
            top, index = _top(_growth_ratio(logs[j], log_weight, p))
            series.append(top)
            arg_tops[(j, p)].append(index)
        required = required_k(logs[0], points)
        index = int(np.argmax(required))
        if required[index] > worst_k:
            worst_k, worst_at = int(required[index]), (n, float(points[index]))

    notes = []
    if log_mode_from is not None:
        notes.append(f"iterates followed in log-magnitude mode from n = {log_mode_from}")
    if worst_k > max_k:
        n, x = worst_at
        notes.append(f"|φ_{n}(x)| < |x|^(1/{max_k}) at x = {x:g}")
        return UniformProbeResult('violated', n=n, j=0, x=x, log_mode_from=log_mode_from, notes=tuple(notes))

    bounds = []
    for j in range(1, jmax + 1):
        for p in GROWTH_EXPONENTS:
            series = tops[(j, p)]
            if not _quartile_growth(series):
                bounds.append(GrowthBound(j, _bounded_exp(max(series)), p))
                break
        else:
            series = tops[(j, GROWTH_EXPONENTS[-1])]
            split = max(1, (len(series) * 3) // 4)
            n = split + int(np.argmax(series[split:])) + 1
            index = arg_tops[(j, GROWTH_EXPONENTS[-1])][n - 1]
            x = float(points[index]) if index is not None else None
            notes.append(f"the bound for derivative order {j} keeps growing with n")
            return UniformProbeResult('violated', n=n, j=j, x=x, k=worst_k, log_mode_from=log_mode_from, notes=tuple(notes))

    notes.append("consistent with uniform bounds on the probe; this is evidence, not proof")
    return UniformProbeResult(
        'consistent', growth_bounds=tuple(bounds), k=worst_k, log_mode_from=log_mode_from, notes=tuple(notes)
    )


# The classification cascade

class Classifier:
    """Runs the rule cascade for one symbol; see the module docstring for the order"""

    def __init__(self, phi, config, symbol_text):
        self.phi = phi
        self.config = config
        self.symbol_text = symbol_text
        self.poly = poly_from_expr(phi) if isinstance(phi, SymbolExpr) else None
        self.check = None

    def run(self):
        self.check = check_symbol_conditions(
            self.phi, self.config.jmax, self.config.probe, self.config.max_k, self.config.tail_points
        )
        if self.check.failed:
            raise PreconditionError(
                f"{self.symbol_text} is not a symbol for S(R): {'; '.join(self.check.notes)}",
                hypothesis="φ is a symbol: |φ^(j)| <= C(1 + φ^2)^p and |φ(x)| >= |x|^(1/k) for |x| >= k",
            )
        for rule in (self.affine, self.polynomial, self.sqrt_shift, self.monotone, self.general):
            report = rule()
            if report is not None:
                logger.debug(f"classified {self.symbol_text}: {', '.join(report.rule_ids)}")
                return report
        raise AssertionError("the general rule always applies")

    def report(self, shape, power_bounded, mean_ergodic, rules, witnesses=(), notes=()):
        return ClassificationReport(
            symbol_text=self.symbol_text,
            symbol_check=self.check,
            shape=shape,
            power_bounded=power_bounded,
            mean_ergodic=mean_ergodic,
            uniformly_mean_ergodic=mean_ergodic,
            rules_fired=tuple(RuleCitation.of(rule) for rule in rules),
            witnesses=tuple(witnesses),
            notes=tuple(notes) + (SUPERCYCLICITY_NOTE,),
        )

    def affine(self):
        if self.poly is None or self.poly.degree != 1:
            return None
        b, a = self.poly.coeffs
        shape = Shape('affine', degree=1, a=float(a), b=float(b))
        if a == 1 and b == 0:
            return self.report(shape, Verdict.YES, Verdict.YES, ['R1', 'R1.identity'])
        if a == -1:
            return self.report(shape, Verdict.YES, Verdict.YES, ['R1', 'R1.reflection'])
        if a == 1:
            return self.report(
                shape, Verdict.NO, Verdict.NO, ['R1', 'R1.translation'],
                [w for w in (self.translation_witness(float(b)),) if w is not None],
            )
        fixed = float(b / (1 - a))
        if abs(a) > 1:
            witness = Witness(
                WitnessKind.BOUNDED_ORBIT_PLUS_DIVERGENCE,
                'R1.dilation',
                {
                    'fixed_point_bracket': (fixed - 1.0, fixed + 1.0),
                    'fixed_point': fixed,
                    'radius': abs(fixed) + 1.0,
                    'escape_radius': ESCAPE_RADIUS,
                    'escaping': [
                        (x, self._escape_step(x)) for x in (-abs(fixed) - 1.0, abs(fixed) + 1.0)
                    ],
                },
            )
        elif a > 0:
            moved = fixed + 1.0
            witness = Witness(
                WitnessKind.FIXED_POINT_NON_IDENTITY,
                'R1.dilation',
                {'fixed_point_bracket': (fixed - 1.0, fixed + 1.0), 'fixed_point': fixed, 'moved_point': moved},
            )
        else:
            x = fixed + 1.0
            witness = Witness(
                WitnessKind.INVOLUTION_FAILURE,
                'R1.dilation',
                {'x': x, 'phi_phi_x': float(self.poly(self.poly(Fraction(x)))),
                 'tolerance': INVOLUTION_TOLERANCE * (1 + abs(x))},
            )
        return self.report(shape, Verdict.NO, Verdict.NO, ['R1', 'R1.dilation'], [witness])

    def _escape_step(self, x):
        value = x
        for step in range(1, self.config.witness_horizon + 1):
            value = float(self.poly.evaluate(value))
            if not math.isfinite(value) or abs(value) > ESCAPE_RADIUS:
                return step
        return self.config.witness_horizon

    def translation_witness(self, b):
        # φ_n(-nb) = 0, and |nb|^k >= n for every n >= 1/b^2 once k = 2 (every n when |b| >= 1)
        k = 1 if abs(b) >= 1 else 2
        start = 1 if abs(b) >= 1 else math.ceil(1 / b ** 2)
        if start > 10 ** 4:
            return None
        steps = np.arange(start, start + self.config.witness_horizon)
        xs = -steps * b
        images = replay(self.phi, xs, steps)
        triples = [(int(n), float(x), float(value)) for n, x, value in zip(steps, xs, images)]
        return Witness(
            WitnessKind.BOUNDED_IMAGE_SEQUENCE,
            'R1.translation',
            {'k': k, 'bound': self.config.witness_bound, 'triples': triples},
        )

    def polynomial(self):
        if self.poly is None or self.poly.degree < 2:
            return None
        intervals = fixed_points(self.poly)
        shape = Shape('polynomial', degree=self.poly.degree, fixed_point_count=len(intervals))
        if self.poly.degree % 2 == 0 and not intervals:
            return self.report(shape, Verdict.YES, Verdict.YES, ['R2', 'R2.even_no_fixed_points'])
        rules = ['R2', 'R2.odd_degree' if self.poly.degree % 2 else 'R2.fixed_point']
        displacement = self.poly - Poly.identity()
        locations = [interval.approximate(displacement) for interval in intervals]
        witness = self.polynomial_orbit_witness(intervals[0], locations[0])
        notes = ["fixed points near " + ", ".join(f"{x:.12g}" for x in locations)]
        return self.report(shape, Verdict.NO, Verdict.NO, rules, [witness], notes)

    def polynomial_orbit_witness(self, interval, location):
        # beyond this radius |φ(t)| >= 2|t|, so every orbit starting there escapes
        radius, lead = _polynomial_k(self.poly)
        growth = (Fraction(4) / lead) ** (1.0 / (self.poly.degree - 1))
        radius = max(float(radius), float(growth))
        escaping = [(x, self._escape_step(x)) for x in (-radius, radius)]
        return Witness(
            WitnessKind.BOUNDED_ORBIT_PLUS_DIVERGENCE,
            'R2.fixed_point',
            {
                'fixed_point_bracket': (float(interval.lo), float(interval.hi)),
                'fixed_point': location,
                'multiplicity_hint': interval.multiplicity_hint,
                'radius': radius,
                'escape_radius': ESCAPE_RADIUS,
                'escaping': escaping,
            },
        )

    def sqrt_shift(self):
        inner = positive_polynomial_under_sqrt(self.phi) if isinstance(self.phi, SymbolExpr) else None
        if inner is None or inner.degree != 2 or inner.coeffs[1:] != (0, 1):
            return None
        return self.report(
            Shape('general'), Verdict.YES, Verdict.YES, ['R5', 'R5.sqrt_shift'],
            notes=[f"the iterates are sqrt(x^2 + n*c) with c = {float(inner.coeffs[0]):g}"],
        )

    def monotone(self):
        direction = monotonicity_classify(self.phi, self.config.probe)
        if direction == Monotonicity.INCREASING:
            return self.increasing()
        if direction == Monotonicity.DECREASING:
            return self.decreasing()
        return None

    def increasing(self):
        shape = Shape('monotone', direction=Monotonicity.INCREASING.value)
        points = self.config.points()
        shift = sample(self.phi, points) - points
        if np.all(np.abs(shift) <= IDENTITY_TOLERANCE * (1 + np.abs(points))):
            return self.report(
                shape, Verdict.YES, Verdict.YES, ['R3', 'R3.identity'],
                notes=["φ agrees with the identity on the probe"],
            )
        bracket = _sign_change(shift)
        if bracket is not None:
            lo, hi = float(points[bracket[0]]), float(points[bracket[1]])
            moved = float(points[int(np.nanargmax(np.abs(shift)))])
            witness = Witness(
                WitnessKind.FIXED_POINT_NON_IDENTITY,
                'R3.fixed_point',
                {
                    'fixed_point_bracket': (lo, hi),
                    'fixed_point': _fixed_point_estimate(self.phi, lo, hi),
                    'moved_point': moved,
                },
            )
            return self.report(
                shape, Verdict.NO, Verdict.NO, ['R3', 'R3.fixed_point'], [witness], [TANGENTIAL_CAVEAT]
            )

        sign = 1.0 if np.nanmax(shift) > 0 else -1.0
        # φ > x pushes orbits right, so the displacement that matters is at -∞ (and vice versa)
        tail = log_tail(*DISPLACEMENT_TAIL, self.config.tail_points or 128)
        tail = -tail[::-1] if sign > 0 else tail
        tail_shift = sign * (sample(self.phi, tail) - tail)
        delta = float(np.nanmin(tail_shift))
        near, far = (tail_shift[-1], tail_shift[0]) if sign > 0 else (tail_shift[0], tail_shift[-1])
        if delta >= self.config.displacement_floor and far >= 0.5 * near:
            witness = Witness(
                WitnessKind.DISPLACED_SYMBOL,
                'R3.displaced',
                {
                    'sign': sign,
                    'delta': delta,
                    'samples': [(float(x), float(s)) for x, s in zip(tail[::16], sign * tail_shift[::16])],
                },
            )
            return self.report(
                shape, Verdict.NO, Verdict.NO, ['R3', 'R3.displaced'], [witness], [TANGENTIAL_CAVEAT]
            )
        return self.report(
            shape, Verdict.NO, Verdict.UNKNOWN, ['R3', 'R3.open'],
            notes=[
                TANGENTIAL_CAVEAT,
                f"no fixed point found and φ(x) - x decays to {delta:.3g} on the tail",
            ],
        )

    def decreasing(self):
        shape = Shape('monotone', direction=Monotonicity.DECREASING.value)
        points = self.config.points()
        twice = sample(self.phi, sample(self.phi, points))
        error = np.abs(twice - points)
        tolerance = INVOLUTION_TOLERANCE * (1 + np.abs(points))
        checked = np.isfinite(error)
        if np.all(error[checked] <= tolerance[checked]):
            notes = ["φ∘φ = id on the probe within 1e-9(1 + |x|)"]
            if not np.all(checked):
                notes.append(f"{int(np.sum(~checked))} probe points left double precision and were skipped")
            return self.report(shape, Verdict.YES, Verdict.YES, ['R4', 'R4.involution'], notes=notes)
        index = int(np.nanargmax(np.where(checked, error / tolerance, np.nan)))
        witness = Witness(
            WitnessKind.INVOLUTION_FAILURE,
            'R4.not_involution',
            {'x': float(points[index]), 'phi_phi_x': float(twice[index]), 'tolerance': float(tolerance[index])},
        )
        return self.report(shape, Verdict.NO, Verdict.NO, ['R4', 'R4.not_involution'], [witness])

    def general(self):
        shape = Shape('general')
        witness = non_me_witness(
            self.phi, self.config.witness_exponent, self.config.witness_horizon,
            self.config.witness_bound, self.config.probe, self.config.tail_points,
        )
        if witness is not None:
            return self.report(
                shape, Verdict.NO, Verdict.NO, ['R5', f'R5.{witness.kind.value}'], [witness]
            )
        probe = uniform_pb_probe(
            self.phi, self.config.horizon, self.config.jmax, self.config.probe,
            self.config.max_k, self.config.tail_points,
        )
        if probe.consistent:
            return self.report(
                shape, Verdict.UNKNOWN, Verdict.UNKNOWN, ['R5', 'R5.uniform_probe_consistent'],
                notes=probe.notes,
            )
        return self.report(
            shape, Verdict.NO, Verdict.UNKNOWN, ['R5', 'R5.uniform_probe_violation'],
            notes=probe.notes + (f"violation at n={probe.n}, j={probe.j}, x={probe.x}",),
        )


def classify(phi, config=None, symbol_text=None):
    """
    Classify C_φ as power bounded / mean ergodic / uniformly mean ergodic. Raises
    PreconditionError when φ fails the symbol conditions.
    """
    config = config or ClassifierConfig.from_settings()
    return Classifier(phi, config, symbol_text or str(phi)).run()

