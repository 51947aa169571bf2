"""
Spectral constructions for composition operators on S(R): eigenfunctions of the
square-root shift, resolvents by Neumann series, non-surjectivity witnesses for
dilations, point spectra of injective symbols and the involutions defined by
x + y = f(x - y) for even f.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from .classifier import (IDENTITY_TOLERANCE, ClassifierConfig, RuleCitation, Verdict, classify,
                         sample)
from .exceptions import DomainError, InvalidGeometry, PreconditionError
from .expressions import IDENTITY, Constant, Difference, FunctionCall, Power, Product, Sum, SymbolExpr
from .grids import GridSpec, Monotonicity, monotonicity_classify
from .jets import Jet, compose_jets, invert_jet
from .polynomials import poly_from_expr
from .schwartz import CompactSupport, Piece, SchwartzFn, bump, plateau


logger = logging.getLogger(__name__)

SQRT_SHIFT = FunctionCall('sqrt', Sum(Power(IDENTITY, 2), Constant(1.0)))
# ψ lives on I = (1/4, 1/2); φ_n(I) = (sqrt(1/16 + n), sqrt(1/4 + n))
EIGEN_INTERVAL = (0.25, 0.5)
EIGEN_TOLERANCE = 1e-12
MAX_DEPTH = 200
VALIDATION_POINTS_PER_PIECE = 64
# |f(φ(x)) - λf(x)| is also checked this far (relative to the piece width) from each end
VALIDATION_OFFSETS = (1e-6, 1e-3, 1e-2)

DEFAULT_NEUMANN_TERMS = 60
DEFAULT_DECAY_TRUNCATION = 1000
MAX_TRUNCATION = 10000
SERIES_FLOOR = 1e-14
# residuals at or below this are rounding noise and carry no convergence information
RESIDUAL_FLOOR = 1e-13
# sup_x Σ_{n<=M} (1 + |φ_n(x)|)^-p: the increment over (M/2, M] must be at most this
# fraction of the increment over (M/4, M/2]
DECAY_SHRINK = 0.9
UNIT_CIRCLE_TOLERANCE = 1e-12

# consecutive probe nodes within tolerance that count as an interval of fixed points
FIXED_RUN = 3
EVENNESS_TOLERANCE = 1e-12
BISECTION_STEPS = 64
NEWTON_STEPS = 3

SPECTRAL_RULES = {
    'S.disc_bound': (
        "Eigenvalue proposition: σ_p(C_φ) lies in the closed unit disc, and in the open "
        "disc when every orbit of φ is unbounded"
    ),
    'S.mean_ergodic_disc': "Mean ergodic corollary: if C_φ is mean ergodic then σ(C_φ) lies in the closed disc",
    'S.increasing_point': (
        "Increasing symbols: σ_p(C_φ) ⊂ {1}, with equality iff {t: φ(t) = t} has interior points"
    ),
    'S.decreasing_point': (
        "Decreasing symbols: σ_p(C_φ) is empty unless {t: φ_2(t) = t} has interior points, "
        "and then it is {-1, 1}"
    ),
    'S.sqrt_eigen': "Square-root example: every λ in the open unit disc is an eigenvalue",
    'S.sqrt_spectrum': (
        "Power-bounded corollary: sup_x Σ (1 + |φ_n(x)|)^-p < ∞ for the square-root shift, so "
        "σ(C_φ) = σ_p(C_φ) is the open unit disc"
    ),
    'S.translation': "Translation example: σ_p(C_φ) is empty and σ(C_φ) is the unit circle",
    'S.dilation': "Dilation example: σ(C_φ) = C minus {0} for φ(x) = ax + b with |a| != 1",
    'S.involution': "Involutions: C_φ^2 = I, so σ(C_φ) = σ_p(C_φ) = {-1, 1}",
    'S.identity': "Identity: C_φ = I, so σ(C_φ) = σ_p(C_φ) = {1}",
    'S.neumann': (
        "Surjectivity proposition: if p(T^n x) = O(n^l) for every seminorm p then T - λ is onto "
        "for |λ| > 1, with preimage -Σ λ^-(n+1) T^n x"
    ),
    'S.power_bounded_resolvent': (
        "Power-bounded corollary: C_φ power bounded and sup_x Σ (1 + |φ_n(x)|)^-p < ∞ put the "
        "unit circle in the resolvent set"
    ),
    'S.zak_identity': "Zak transform: ∫_0^1 Zf(x, ω) e^(-2πixω) dx = f̂(ω) for f in S(R)",
}


def spectral_citation(rule):
    return RuleCitation(rule, SPECTRAL_RULES[rule])


# Piecewise functions

@dataclass(frozen=True)
class PiecewisePiece:
    """multiplier · base(inner(x)) on the open interval (lo, hi)"""
    lo: float
    hi: float
    multiplier: complex
    base: object
    inner: SymbolExpr


@dataclass(frozen=True)
class PiecewiseFn:
    """
    A function given by disjoint pieces and zero elsewhere. With `even_reflection` the
    pieces describe f on [0, ∞) and f(-x) = f(x).
    """
    pieces: tuple
    even_reflection: bool = False

    def __post_init__(self):
        ordered = tuple(sorted(self.pieces, key=lambda piece: piece.lo))
        for piece in ordered:
            if not piece.lo < piece.hi:
                raise InvalidGeometry(f"empty piece ({piece.lo}, {piece.hi})")
        for left, right in zip(ordered, ordered[1:]):
            if right.lo < left.hi:
                raise InvalidGeometry(f"pieces ({left.lo}, {left.hi}) and ({right.lo}, {right.hi}) overlap")
        object.__setattr__(self, 'pieces', ordered)

    def evaluate(self, x):
        points = np.asarray(x, dtype=float)
        flat = np.atleast_1d(points).ravel()
        where = np.abs(flat) if self.even_reflection else flat
        values = np.zeros(flat.shape, dtype=complex)
        if self.pieces:
            los = np.array([piece.lo for piece in self.pieces])
            his = np.array([piece.hi for piece in self.pieces])
            index = np.searchsorted(los, where, side='right') - 1
            candidate = np.clip(index, 0, None)
            inside = (index >= 0) & (where > los[candidate]) & (where < his[candidate])
            for i in np.unique(index[inside]):
                mask = inside & (index == i)
                piece = self.pieces[i]
                values[mask] = piece.multiplier * piece.base.evaluate(piece.inner.evaluate(where[mask]))
        if points.ndim == 0:
            return complex(values[0])
        return values.reshape(points.shape)

    def __call__(self, x):
        return self.evaluate(x)

    def scaled(self, factor):
        return PiecewiseFn(
            tuple(PiecewisePiece(p.lo, p.hi, p.multiplier * factor, p.base, p.inner) for p in self.pieces),
            self.even_reflection,
        )

    def to_json(self):
        return {
            'even_reflection': self.even_reflection,
            'pieces': [
                {
                    'interval': [piece.lo, piece.hi],
                    'multiplier': {'re': complex(piece.multiplier).real, 'im': complex(piece.multiplier).imag},
                    'base': piece.base.describe() if hasattr(piece.base, 'describe') else str(piece.base),
                    'inner': str(piece.inner),
                }
                for piece in self.pieces
            ],
        }


# Eigenfunctions of the square-root shift

@dataclass(frozen=True)
class Eigenfunction:
    lam: complex
    function: PiecewiseFn
    depth: int
    residual: float
    sup_norm: float
    validation_points: int


def eigen_depth(lam):
    """The smallest n with |λ|^n < 1e-12, capped at MAX_DEPTH"""
    radius = abs(lam)
    if radius == 0:
        return 0
    return min(math.floor(math.log(EIGEN_TOLERANCE) / math.log(radius)) + 1, MAX_DEPTH)


def _sqrt_shift_interval(n):
    lo, hi = EIGEN_INTERVAL
    return math.sqrt(lo * lo + n), math.sqrt(hi * hi + n)


def _sqrt_shift_inverse(n):
    # (φ_n)^-1(x) = sqrt(x^2 - n) on φ_n(I)
    if n == 0:
        return IDENTITY
    return FunctionCall('sqrt', Difference(Power(IDENTITY, 2), Constant(float(n))))


def _validation_points(depth):
    chunks = [np.linspace(0.0, math.sqrt(EIGEN_INTERVAL[1] ** 2 + depth + 2), 2001)]
    for n in range(depth + 2):
        lo, hi = _sqrt_shift_interval(n)
        width = hi - lo
        offsets = width * np.array(VALIDATION_OFFSETS)
        chunks += [np.linspace(lo, hi, VALIDATION_POINTS_PER_PIECE), lo + offsets, lo - offsets, hi + offsets, hi - offsets]
    positive = np.concatenate(chunks)
    positive = positive[positive >= 0]
    return np.unique(np.concatenate([-positive, positive]))


def eigenfunction_sqrt(lam, psi=None, depth=None):
    """
    An eigenfunction of C_φ for φ(x) = sqrt(x^2 + 1) with eigenvalue λ, |λ| < 1: the even
    function equal to λ^n ψ(sqrt(x^2 - n)) on φ_n(I), I = (1/4, 1/2), and zero elsewhere.
    ψ defaults to the bump on I. The series is cut after `depth` pieces (by default the
    first n with |λ|^n < 1e-12), and the residual sup|f∘φ - λf| is measured on a
    validation grid concentrated on the pieces and their ends.
    """
    lam = complex(lam)
    if abs(lam) >= 1:
        raise PreconditionError(
            f"|λ| = {abs(lam):g}: only the open unit disc consists of eigenvalues here",
            hypothesis="|λ| < 1",
        )
    psi = psi if psi is not None else bump(*EIGEN_INTERVAL)
    decay = getattr(psi, 'decay', None)
    if not (isinstance(decay, CompactSupport) and decay.lo >= EIGEN_INTERVAL[0] and decay.hi <= EIGEN_INTERVAL[1]):
        raise PreconditionError(
            f"{getattr(psi, 'name', psi)} is not supported in (1/4, 1/2)",
            hypothesis="ψ is a test function supported in I = (1/4, 1/2)",
        )
    if depth is None:
        depth = eigen_depth(lam)
    if not 0 <= depth <= MAX_DEPTH:
        raise ValueError(f"depth must be between 0 and {MAX_DEPTH}, got {depth}")

    pieces = tuple(
        PiecewisePiece(*_sqrt_shift_interval(n), lam ** n, psi, _sqrt_shift_inverse(n))
        for n in range(depth + 1)
    )
    f = PiecewiseFn(pieces, even_reflection=True)

    xs = _validation_points(depth)
    values = f.evaluate(xs)
    residual = float(np.max(np.abs(f.evaluate(SQRT_SHIFT.evaluate(xs)) - lam * values)))
    sup_norm = float(np.max(np.abs(values)))
    logger.debug(f"eigenfunction for λ={lam}: depth {depth}, residual {residual:.3g} on {len(xs)} points")
    return Eigenfunction(lam, f, depth, residual, sup_norm, len(xs))


# Resolvents

@dataclass(frozen=True)
class ResolventResult:
    """f ≈ -Σ_{n<=terms} λ^-(n+1) g∘φ_n on the grid, solving C_φ f - λf = g"""
    lam: complex
    xs: np.ndarray
    values: np.ndarray
    residual: float
    residual_history: tuple
    terms: int
    converged: bool
    notes: tuple = ()

    @property
    def ratios(self):
        """Successive residual ratios, skipping residuals at rounding level"""
        history = self.residual_history
        return [b / a for a, b in zip(history, history[1:]) if a > RESIDUAL_FLOOR and b > RESIDUAL_FLOOR]


def _neumann_partial_sums(phi, lam, g, xs, terms):
    """
    Yield (n, f_n, C_φ f_n, sup|g∘φ_n|) for the partial sums f_n = -Σ_{m<=n} λ^-(m+1) g∘φ_m.
    C_φ f_n is summed from the same orbit, one step ahead.
    """
    orbit = np.asarray(xs, dtype=float)
    ahead = sample(phi, orbit)
    partial = np.zeros(orbit.shape, dtype=complex)
    shifted = np.zeros(orbit.shape, dtype=complex)
    for n in range(terms + 1):
        coefficient = -lam ** -(n + 1)
        current = g.evaluate(orbit)
        partial = partial + coefficient * current
        shifted = shifted + coefficient * g.evaluate(ahead)
        yield n, partial, shifted, float(np.max(np.abs(current)))
        orbit, ahead = ahead, sample(phi, ahead)


def _resolvent(phi, lam, g, xs, terms, stop_below=None):
    target = g.evaluate(xs)
    history = []
    partial, n = np.zeros(len(xs), dtype=complex), -1
    for n, partial, shifted, term in _neumann_partial_sums(phi, lam, g, xs, terms):
        history.append(float(np.max(np.abs(shifted - lam * partial - target))))
        if stop_below is not None and term < stop_below:
            break
    return partial, history, n


def _decreased(history, g_size):
    floor = max(RESIDUAL_FLOOR, SERIES_FLOOR * g_size)
    return history[-1] <= floor or history[-1] < history[0]


def neumann_resolvent(phi, lam, g, trunc=None, grid=None):
    """
    Solve C_φ f - λf = g for |λ| > 1 with the Neumann series f = -Σ λ^-(n+1) g∘φ_n,
    summed up to n = trunc on the grid. The series converges when the orbit seminorms of
    C_φ grow polynomially (translations and the square-root shift do); the residual
    sup|C_φ f_N - λ f_N - g| is recorded for every N, and a residual that does not
    decrease is flagged.
    """
    lam = complex(lam)
    if abs(lam) <= 1:
        raise PreconditionError(f"|λ| = {abs(lam):g} is not outside the closed unit disc", hypothesis="|λ| > 1")
    trunc = DEFAULT_NEUMANN_TERMS if trunc is None else trunc
    if not 0 <= trunc <= MAX_TRUNCATION:
        raise ValueError(f"truncation must be between 0 and {MAX_TRUNCATION}, got {trunc}")
    grid = grid or GridSpec.from_settings()
    xs = grid.nodes()

    values, history, terms = _resolvent(phi, lam, g, xs, trunc)
    converged = _decreased(history, float(np.max(np.abs(g.evaluate(xs)))))
    notes = ("the orbit seminorms of C_φ are assumed to grow polynomially",)
    if not converged:
        notes += (f"the residual did not decrease over {terms + 1} terms",)
        logger.warning(f"Neumann series for {phi} at λ={lam} did not converge")
    return ResolventResult(lam, xs, values, history[-1], tuple(history), terms, converged, notes)


def decay_sums(phi, xs, p, truncations):
    """sup over xs of Σ_{n=1}^{M} (1 + |φ_n(x)|)^-p for each M in the ascending `truncations`"""
    orbit = np.asarray(xs, dtype=float)
    total = np.zeros(orbit.shape)
    sums = []
    wanted = iter(sorted(truncations))
    target = next(wanted)
    for n in range(1, max(truncations) + 1):
        orbit = sample(phi, orbit)
        with np.errstate(over='ignore'):
            total += (1 + np.abs(orbit)) ** -p
        if n == target:
            sums.append(float(np.max(total)))
            target = next(wanted, None)
    return sums


def power_bounded_resolvent(phi, lam, g, p=3.0, trunc=None, grid=None, config=None):
    """
    Solve C_φ f - λf = g for |λ| = 1 when C_φ is power bounded and
    sup_x Σ (1 + |φ_n(x)|)^-p < ∞ for some p > 1: then the unit circle lies in the
    resolvent set and f = -Σ λ^-(n+1) g∘φ_n. Both hypotheses are checked (the second by
    the shrinking of the dyadic increments of the decay sums up to `trunc`); a failure
    raises PreconditionError. The series is cut once sup|g∘φ_n| < 1e-14.
    """
    lam = complex(lam)
    if abs(abs(lam) - 1) > UNIT_CIRCLE_TOLERANCE:
        raise PreconditionError(f"|λ| = {abs(lam):g} is not on the unit circle", hypothesis="|λ| = 1")
    if not p > 1:
        raise ValueError(f"the decay power must exceed 1, got {p}")
    trunc = DEFAULT_DECAY_TRUNCATION if trunc is None else trunc
    if not 8 <= trunc <= MAX_TRUNCATION:
        raise ValueError(f"truncation must be between 8 and {MAX_TRUNCATION}, got {trunc}")
    grid = grid or GridSpec.from_settings()
    xs = grid.nodes()

    report = classify(phi, config)
    if report.power_bounded != Verdict.YES:
        raise PreconditionError(
            f"C_φ is not known to be power bounded for φ = {phi} (power_bounded={report.power_bounded.value})",
            hypothesis="C_φ is power bounded",
        )
    quarter, half, full = decay_sums(phi, xs, p, (trunc // 4, trunc // 2, trunc))
    early, late = half - quarter, full - half
    if not (late <= RESIDUAL_FLOOR or late <= DECAY_SHRINK * early):
        raise PreconditionError(
            f"the decay sums for p={p:g} do not settle: {quarter:.6g}, {half:.6g}, {full:.6g} "
            f"at M={trunc // 4}, {trunc // 2}, {trunc}",
            hypothesis=f"sup_x Σ (1 + |φ_n(x)|)^-{p:g} < ∞",
        )

    values, history, terms = _resolvent(phi, lam, g, xs, trunc, stop_below=SERIES_FLOOR)
    converged = terms < trunc
    notes = (f"decay sums {quarter:.6g}, {half:.6g}, {full:.6g} at M={trunc // 4}, {trunc // 2}, {trunc}",)
    if not converged:
        notes += (f"the terms stayed above {SERIES_FLOOR:g} for all {trunc} iterations",)
        logger.warning(f"power-bounded resolvent for {phi} at λ={lam} was truncated at {trunc} terms")
    return ResolventResult(lam, xs, values, history[-1], tuple(history), terms, converged, notes)


# Dilations

@dataclass(frozen=True)
class DilationWitness:
    """
    For the dilation φ(x) = ax (after inverting when |a| < 1), the solution of
    C_φ f - λf = g for the chosen g would take `values` at `points`: derivatives
    f^(j)(a^-m) when |λ| >= 1 and the weighted values (a^m)^j f(a^m) when |λ| < 1. Their
    magnitudes grow geometrically with `ratio`, so f cannot lie in S(R).
    """
    a: float
    lam: complex
    effective_a: float
    effective_lam: complex
    j: int
    case: str
    ratio: complex
    points: tuple
    values: tuple
    inverted: bool
    cross_check_error: float

    @property
    def magnitudes(self):
        return [abs(value) for value in self.values]


def _monomial_plateau(j, outer):
    """x^j/j! times the plateau equal to 1 on [-1, 1] and vanishing outside (-outer, outer)"""
    window = plateau(1.0, outer)
    monomial = Power(IDENTITY, j) if j else Constant(1.0)
    scale = Constant(1.0 / math.factorial(j))
    pieces = tuple(Piece(piece.lo, piece.hi, Product(Product(scale, monomial), piece.expr)) for piece in window.pieces)
    return SchwartzFn(f'x^{j}/{j}!*{window.name}', pieces, window.decay, params={'j': j})


def _derivative_case(a, lam, j, mmax):
    ratio = a ** j / lam
    points = [a ** -m for m in range(mmax + 1)]
    values = list(-np.cumsum([ratio ** k for k in range(mmax + 1)]) / lam)

    # the defining series -Σ_k λ^-(k+1) a^(kj) g^(j)(a^k x) has only the terms k <= m at a^-m
    g = _monomial_plateau(j, abs(a))
    error = 0.0
    for m, (x, closed) in enumerate(zip(points, values)):
        ks = np.arange(m + 3)
        derivatives = g.jet(a ** ks * x, j).derivs[j]
        series = -np.sum(lam ** -(ks + 1.0) * (a ** j) ** ks * derivatives)
        error = max(error, abs(series - closed) / max(1.0, abs(closed)))
    return ratio, points, values, error


def _growth_case(a, lam, j, mmax):
    ratio = lam * a ** j
    # m >= 1: at x = 1 the sum starts at n = 1 rather than n = m
    points = [a ** m for m in range(1, mmax + 1)]
    values = [ratio ** m / (lam * (1 - lam)) for m in range(1, mmax + 1)]

    # f(x) = Σ_{n>=1} λ^(n-1) Φ(a^-n x), where Φ(a^(m-n)) = 1 exactly when n >= m
    window = plateau(1.0, abs(a))
    tail = min(MAX_TRUNCATION, int(math.ceil(math.log(1e-17) / math.log(abs(lam)))) + 1) if lam != 0 else 1
    error = 0.0
    for m, (x, closed) in enumerate(zip(points, values), start=1):
        ns = np.arange(1, m + tail + 1)
        series = (a ** j) ** m * np.sum(lam ** (ns - 1.0) * window.evaluate(a ** (m - ns)))
        error = max(error, abs(series - closed) / max(1.0, abs(closed)))
    return ratio, points, values, error


def dilation_nonsurjectivity_witness(a, lam, jmax=8, mmax=40):
    """
    Show that C_φ - λ is not surjective for φ(x) = ax, |a| != 1 and λ != 0, by exhibiting a
    g in S(R) whose would-be preimage grows geometrically: near the origin (|λ| >= 1,
    g = x^j/j! Φ with |a^j/λ| > 1) or along x = a^m (|λ| < 1, g = Φ with |λ a^j| > 1),
    Φ the plateau equal to 1 on [-1, 1]. For |a| < 1 the witness is built for
    C_φ^-1 - 1/λ with C_φ^-1 = C_{x/a}. The closed-form values are cross-checked
    against the defining series.
    """
    a = float(a)
    lam = complex(lam)
    if lam == 0:
        raise PreconditionError("C_φ is invertible for a dilation, so λ = 0 is not in its spectrum", hypothesis="λ != 0")
    if a == 0 or abs(a) == 1:
        raise PreconditionError(f"a = {a:g} is not a dilation factor", hypothesis="a != 0 and |a| != 1")
    inverted = abs(a) < 1
    effective_a, effective_lam = (1 / a, 1 / lam) if inverted else (a, lam)

    derivative_case = abs(effective_lam) >= 1
    for j in range(jmax + 1):
        size = abs(effective_a ** j / effective_lam) if derivative_case else abs(effective_lam * effective_a ** j)
        if size > 1:
            break
    else:
        raise PreconditionError(
            f"no j <= {jmax} gives a growing sequence for a={a:g}, λ={lam}",
            hypothesis=f"|a^j/λ| > 1 or |λ a^j| > 1 for some j <= {jmax}",
        )
    build = _derivative_case if derivative_case else _growth_case
    ratio, points, values, error = build(effective_a, effective_lam, j, mmax)
    logger.debug(f"dilation witness a={a:g}, λ={lam}: j={j}, ratio {ratio}, cross-check error {error:.3g}")
    return DilationWitness(
        a, lam, effective_a, effective_lam, j,
        'derivative_at_origin' if derivative_case else 'growth_at_powers',
        ratio, tuple(points), tuple(complex(v) for v in values), inverted, error,
    )


# Point spectra

@dataclass(frozen=True)
class SpectrumReport:
    symbol_text: str
    point_spectrum: str
    spectrum: str
    rules_fired: tuple = ()
    witnesses: tuple = ()
    notes: tuple = ()


def _fixed_interval(displacement, points, whole):
    """The first run of FIXED_RUN or more probe nodes where the displacement vanishes"""
    still = np.abs(displacement) <= IDENTITY_TOLERANCE * (1 + np.abs(points))
    if whole:
        return (float(points[0]), float(points[-1])) if np.all(still) else None
    run = 0
    for i, flag in enumerate(still):
        run = run + 1 if flag else 0
        if run >= FIXED_RUN:
            end = i
            while end + 1 < len(still) and still[end + 1]:
                end += 1
            return float(points[i - FIXED_RUN + 1]), float(points[end])
    return None


def injective_point_spectrum(phi, probe=None, symbol_text=None):
    """
    σ_p(C_φ) for a strictly monotone φ: {1} or empty for increasing symbols, {-1, 1} or
    empty for decreasing ones, depending on whether φ (resp. φ∘φ) fixes an interval.
    Expression symbols are real-analytic, so for them a fixed interval means φ = id (resp.
    φ∘φ = id) and the test is made on the whole probe.
    """
    probe = probe or ClassifierConfig.from_settings().probe
    symbol_text = symbol_text or str(phi)
    direction = monotonicity_classify(phi, probe)
    if direction not in (Monotonicity.INCREASING, Monotonicity.DECREASING):
        raise PreconditionError(f"{symbol_text} is {direction.value}", hypothesis="φ is strictly monotone")

    points = probe.nodes()
    image = sample(phi, points)
    if direction == Monotonicity.DECREASING:
        image = sample(phi, image)
    interval = _fixed_interval(image - points, points, whole=isinstance(phi, SymbolExpr))
    if direction == Monotonicity.INCREASING:
        rule, found = 'S.increasing_point', '{1}'
    else:
        rule, found = 'S.decreasing_point', '{-1, 1}'
    point_spectrum = found if interval is not None else 'empty'
    witnesses = ({'fixed_interval': interval},) if interval is not None else ()
    logger.debug(f"point spectrum of {symbol_text}: {point_spectrum}")
    return SpectrumReport(
        symbol_text, point_spectrum, f"σ_p = {point_spectrum}", (spectral_citation(rule),), witnesses,
    )


def spectrum_report(phi, config=None, symbol_text=None):
    """
    What is known about σ(C_φ) and σ_p(C_φ): exact statements for the identity,
    translations, dilations, involutions and the square-root shift, and otherwise the
    disc bounds that follow from the classification.
    """
    config = config or ClassifierConfig.from_settings()
    symbol_text = symbol_text or str(phi)
    classification = classify(phi, config, symbol_text)
    rules = classification.rule_ids
    poly = poly_from_expr(phi) if isinstance(phi, SymbolExpr) else None

    def report(point_spectrum, spectrum, rule_ids, witnesses=(), notes=()):
        return SpectrumReport(
            symbol_text, point_spectrum, spectrum, tuple(spectral_citation(rule) for rule in rule_ids),
            tuple(witnesses), tuple(notes),
        )

    if 'R1.identity' in rules or 'R3.identity' in rules:
        return report('{1}', 'σ = σ_p = {1}', ['S.identity'])
    if 'R1.translation' in rules:
        return report('empty', 'σ = unit circle', ['S.increasing_point', 'S.translation'])
    if 'R1.reflection' in rules or 'R4.involution' in rules:
        return report('{-1, 1}', 'σ = σ_p = {-1, 1}', ['S.decreasing_point', 'S.involution'])
    if 'R5.sqrt_shift' in rules:
        return report('open_disc', 'σ = σ_p = open unit disc', ['S.sqrt_eigen', 'S.sqrt_spectrum'])
    if poly is not None and poly.degree == 1:
        point = injective_point_spectrum(phi, config.probe, symbol_text)
        return report(
            point.point_spectrum, 'σ = C minus {0}', ['S.dilation'] + [c.rule for c in point.rules_fired],
            point.witnesses,
        )

    spectrum = 'σ within the closed unit disc' if classification.mean_ergodic == Verdict.YES else 'not determined'
    extra = ['S.mean_ergodic_disc'] if classification.mean_ergodic == Verdict.YES else []
    if classification.shape.kind == 'monotone':
        point = injective_point_spectrum(phi, config.probe, symbol_text)
        return report(
            point.point_spectrum, spectrum, [c.rule for c in point.rules_fired] + extra, point.witnesses,
        )
    return report(
        'within_closed_disc', spectrum, ['S.disc_bound'] + extra,
        notes=["σ_p lies in the open disc if every orbit of φ is unbounded"],
    )


# Involutions from even functions

class InvolutionSymbol:
    """
    The decreasing symbol y = φ(x) defined by x + y = f(x - y), for an even f with
    |f'| <= a < 1; φ∘φ = id and -(1 + a)/(1 - a) <= φ' <= -(1 - a)/(1 + a). Supports the
    evaluate/jet protocol of expressions, so it can be classified and iterated like one.
    """

    def __init__(self, f, probe=None):
        self.f = f
        probe = probe or ClassifierConfig.from_settings().probe
        nodes = probe.nodes()
        asymmetry = float(np.max(np.abs(f.evaluate(nodes) - f.evaluate(-nodes))))
        if asymmetry > EVENNESS_TOLERANCE:
            raise PreconditionError(f"{f} is not even: |f(x) - f(-x)| reaches {asymmetry:.3g}", hypothesis="f is even")
        self.contraction = float(np.max(np.abs(f.jet(nodes, 1).derivs[1])))
        if self.contraction >= 1:
            raise PreconditionError(
                f"sup|f'| = {self.contraction:.6g} on the probe", hypothesis="sup|f'| <= a < 1",
            )
        self.offset = abs(float(f.evaluate(0.0)))

    def __str__(self):
        return f"involution(x + y = f(x - y), f = {self.f})"

    @property
    def slope_bounds(self):
        a = self.contraction
        return -(1 + a) / (1 - a), -(1 - a) / (1 + a)

    def _shift(self, x):
        # t = y + x solves t = f(t - 2x); h(t) = f(t - 2x) - t is strictly decreasing and
        # changes sign on [-R, R]
        radius = (self.offset + 2 * self.contraction * np.abs(x) + 1) / (1 - self.contraction)
        lo, hi = -radius, radius

        def h(t):
            return self.f.evaluate(t - 2 * x) - t

        bracketed = (h(lo) > 0) & (h(hi) < 0)
        if not np.all(bracketed):
            raise DomainError("could not bracket the root of f(u) - u = 2x", x=float(x[np.argmin(bracketed)]))
        for _ in range(BISECTION_STEPS):
            middle = (lo + hi) / 2
            above = h(middle) > 0
            lo, hi = np.where(above, middle, lo), np.where(above, hi, middle)
        t = (lo + hi) / 2
        for _ in range(NEWTON_STEPS):
            jet = self.f.jet(t - 2 * x, 1)
            t = t - (jet.derivs[0] - t) / (jet.derivs[1] - 1)
        return t

    def evaluate(self, x):
        points = np.asarray(x, dtype=float)
        flat = np.atleast_1d(points).ravel()
        values = self._shift(flat) - flat
        if points.ndim == 0:
            return float(values[0])
        return values.reshape(points.shape)

    def __call__(self, x):
        return self.evaluate(x)

    def jet(self, x, k):
        """u = y - x solves f(u) - u = 2x, so u is the inverse of f - id evaluated at 2x"""
        points = np.asarray(x, dtype=float)
        flat = np.atleast_1d(points).ravel()
        u = self._shift(flat) - 2 * flat
        forward = self.f.jet(u, k) - Jet.variable(u, k)
        u_jet = compose_jets(invert_jet(forward), Jet.variable(flat, k) * 2.0)
        result = u_jet + Jet.variable(flat, k)
        if points.ndim == 0:
            return Jet(float(points), k, tuple(float(np.asarray(d)[0]) for d in result.derivs))
        return Jet(points, k, tuple(np.asarray(d).reshape(points.shape) for d in result.derivs))


def involution_from_even(f, x, probe=None):
    """φ(x) for the involution x + y = f(x - y); `x` may be a point or an array"""
    return InvolutionSymbol(f, probe).evaluate(x)
