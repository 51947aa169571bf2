"""
Orbits of composition operators: the seminorms π_n, seminorm profiles along an orbit
C_φ^k f, Cesàro means and the limits φ* of increasing symbols.

Throughout, π_n(f) = sup_x sup_{0<=j<=n} (1 + x^2)^n |f^(j)(x)|. The j = 0 term is
included so that the seminorms dominate sup|f|.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from .classifier import ClassifierConfig, check_symbol_conditions
from .conf import get_setting
from .exceptions import MagnitudeOverflow, PreconditionError
from .grids import GridSpec, Monotonicity, monotonicity_classify, probe_points
from .jets import compose_jets, iterate_eval, iterate_jets


logger = logging.getLogger(__name__)

MAX_SEMINORM_INDEX = 8
MAX_HORIZON = 500
GROWTH_FLAG_FACTOR = 1.1
REFINEMENT_FACTOR = 8
# local maxima refined at each level
REFINEMENT_CANDIDATES = 4

SEMINORM_NOTE = "π_n takes the supremum over derivative orders 0 <= j <= n (j = 0 included)"


@dataclass(frozen=True)
class SeminormEstimate:
    n: int
    value: float
    argmax_x: float
    argmax_j: int
    tail_bound: float


def _weighted(jet, points, n):
    weight = (1 + np.asarray(points, dtype=float) ** 2) ** n
    return np.stack([weight * np.abs(np.broadcast_to(d, np.shape(points))) for d in jet.derivs])


def _maximize(jet_at, grid, n, points=None):
    """
    Maximize (1 + x^2)^n |g^(j)(x)| over the grid nodes and 0 <= j <= n, then refine around
    the best local maxima, each level REFINEMENT_FACTOR times denser than the last.
    Returns (value, x, j, weighted values at the two grid ends).
    """
    points = grid.nodes() if points is None else points
    weighted = _weighted(jet_at(points), points, n)
    envelope = weighted.max(axis=0)
    edge = float(max(envelope[0], envelope[-1]))
    best = int(np.argmax(envelope))
    value, x, j = float(envelope[best]), float(points[best]), int(np.argmax(weighted[:, best]))

    is_peak = np.r_[True, envelope[1:] >= envelope[:-1]] & np.r_[envelope[:-1] >= envelope[1:], True]
    peaks = np.flatnonzero(is_peak)
    centers = list(points[peaks[np.argsort(envelope[peaks])[::-1][:REFINEMENT_CANDIDATES]]])
    spacing = grid.spacing
    for _ in range(grid.refinement_levels):
        spacing /= REFINEMENT_FACTOR
        offsets = spacing * np.arange(-REFINEMENT_FACTOR, REFINEMENT_FACTOR + 1)
        local = np.clip(np.add.outer(np.array(centers), offsets).ravel(), -grid.half_width, grid.half_width)
        local_weighted = _weighted(jet_at(local), local, n)
        local_envelope = local_weighted.max(axis=0)
        windows = local_envelope.reshape(len(centers), -1)
        centers = [float(local.reshape(len(centers), -1)[i, np.argmax(row)]) for i, row in enumerate(windows)]
        top = int(np.argmax(local_envelope))
        if local_envelope[top] > value:
            value, x, j = float(local_envelope[top]), float(local[top]), int(np.argmax(local_weighted[:, top]))
    return value, x, j, edge


def _check_index(n):
    if not 0 <= n <= MAX_SEMINORM_INDEX:
        raise ValueError(f"seminorm index must be between 0 and {MAX_SEMINORM_INDEX}, got {n}")


def _check_horizon(N):
    if not 1 <= N <= MAX_HORIZON:
        raise ValueError(f"horizon must be between 1 and {MAX_HORIZON}, got {N}")


def _support_grid(f, grid):
    support = f.decay.covering_half_width()
    return grid.covering(support) if support is not None else grid


def seminorm(f, n, grid=None):
    """
    Estimate π_n(f) on the grid (with local refinement), and certify the part of the
    supremum outside the grid with f's decay class. The reported value is the larger of
    the two.
    """
    _check_index(n)
    grid = _support_grid(f, grid or GridSpec.from_settings())
    value, x, j, _ = _maximize(lambda points: f.jet(points, n), grid, n)
    tail = f.tail_bound(n, grid.half_width)
    logger.debug(f"π_{n}({f.describe()}) ~ {value:.6g} at x={x:.6g}, j={j}; tail bound {tail:.3g}")
    return SeminormEstimate(n, max(value, tail), x, j, tail)


def _orbit_jets(phi, points, order, N):
    """The jets of φ_1..φ_N at the points; overflowing symbols are an error here"""
    for k, jet in enumerate(iterate_jets(phi, points, order, N), start=1):
        if jet.log_mode:
            raise MagnitudeOverflow(
                f"the iterate φ_{k} of {phi} leaves double precision on the grid "
                f"(|φ_k| > {get_setting('OVERFLOW_CAP'):g})"
            )
        yield jet


def _growth_flag(values):
    quarter = max(1, len(values) // 4)
    return max(values[-quarter:]) >= GROWTH_FLAG_FACTOR * max(values[:quarter])


@dataclass(frozen=True)
class OrbitProfile:
    estimates: tuple
    growth_flag: bool
    grid: GridSpec
    extensions: int = 0
    notes: tuple = ()

    @property
    def values(self):
        return [estimate.value for estimate in self.estimates]


class _GridTooNarrow(Exception):
    pass


def _extending(grid, compute):
    """Run compute(grid), doubling the grid's half-width while the orbit reaches its edge"""
    extensions = 0
    limit = int(get_setting('GRID_MAX_EXTENSIONS'))
    while True:
        try:
            return compute(grid, strict=extensions < limit), grid, extensions
        except _GridTooNarrow:
            grid = grid.doubled()
            extensions += 1
            logger.debug(f"orbit reaches the grid edge; extending to L={grid.half_width:g}")


def orbit_seminorm_profile(phi, f, n, N, grid=None):
    """
    π_n(C_φ^k f) for k = 1..N, with C_φ^k f differentiated through the jets of the
    iterates. growth_flag is set when the largest value over the last quartile is at
    least 1.1 times the largest over the first quartile.
    """
    _check_index(n)
    _check_horizon(N)
    grid = _support_grid(f, grid or GridSpec.from_settings())
    notes = [SEMINORM_NOTE]

    def compute(grid, strict):
        estimates = []
        points = grid.nodes()
        for k, phi_k in enumerate(_orbit_jets(phi, points, n, N), start=1):

            def composed(xs, phi_k=phi_k, k=k):
                inner = phi_k if xs is points else iterate_eval(phi, k, xs, n)
                return compose_jets(f.jet(inner.value, n), inner)

            value, x, j, edge = _maximize(composed, grid, n, points)
            if edge > grid.tail_eps:
                if strict:
                    raise _GridTooNarrow()
                notes.append(f"C_φ^{k} f is not negligible at the grid edge ({edge:.3g})")
            # off the grid nothing is certified for f∘φ_k; the edge value stands in
            estimates.append(SeminormEstimate(n, value, x, j, edge))
        return estimates

    estimates, grid, extensions = _extending(grid, compute)
    values = [estimate.value for estimate in estimates]
    flag = _growth_flag(values)
    logger.debug(f"profile of π_{n} along the orbit of {f.describe()} under {phi}: growth_flag={flag}")
    return OrbitProfile(tuple(estimates), flag, grid, extensions, tuple(dict.fromkeys(notes)))


@dataclass(frozen=True)
class CesaroResult:
    """
    The Cesàro mean (1/N) Σ_{k=1..N} f∘φ_k on the grid nodes, with the sup norm and
    π_{seminorm_index} of every mean T_[1]..T_[N] and the increments between
    successive means.
    """
    xs: np.ndarray
    values: np.ndarray
    N: int
    seminorm_index: int
    sup_norms: tuple
    seminorms: tuple
    sup_increments: tuple
    seminorm_increments: tuple
    grid: GridSpec
    extensions: int = 0
    notes: tuple = ()

    @property
    def sup_norm(self):
        return self.sup_norms[-1]

    @property
    def seminorm(self):
        return self.seminorms[-1]


def cesaro_mean(phi, f, N, grid=None, seminorm_index=1):
    """Cesàro means of the orbit of f under C_φ, with convergence diagnostics"""
    _check_horizon(N)
    _check_index(seminorm_index)
    grid = _support_grid(f, grid or GridSpec.from_settings())
    order = seminorm_index
    notes = [SEMINORM_NOTE]

    def compute(grid, strict):
        points = grid.nodes()
        weight = (1 + points ** 2) ** order
        total = None
        previous = None
        sup_norms, seminorms, sup_increments, seminorm_increments = [], [], [], []
        for k, phi_k in enumerate(_orbit_jets(phi, points, order, N), start=1):
            term = compose_jets(f.jet(phi_k.value, order), phi_k)
            edge = max(abs(term.derivs[0][0]), abs(term.derivs[0][-1])) * weight[0]
            if edge > grid.tail_eps:
                if strict:
                    raise _GridTooNarrow()
                notes.append(f"f∘φ_{k} is not negligible at the grid edge ({edge:.3g})")
            total = np.stack(term.derivs) if total is None else total + np.stack(term.derivs)
            mean = total / k
            sup_norms.append(float(np.max(np.abs(mean[0]))))
            seminorms.append(float(np.max(weight * np.abs(mean))))
            if previous is not None:
                sup_increments.append(float(np.max(np.abs(mean[0] - previous[0]))))
                seminorm_increments.append(float(np.max(weight * np.abs(mean - previous))))
            previous = mean
        return points, previous[0], sup_norms, seminorms, sup_increments, seminorm_increments

    (points, values, *diagnostics), grid, extensions = _extending(grid, compute)
    sup_norms, seminorms, sup_increments, seminorm_increments = diagnostics
    return CesaroResult(
        points, values, N, seminorm_index, tuple(sup_norms), tuple(seminorms),
        tuple(sup_increments), tuple(seminorm_increments), grid, extensions,
        tuple(dict.fromkeys(notes)),
    )


@dataclass(frozen=True)
class OrbitLimit:
    """φ*(x): the limit of the monotone orbit φ_n(x), possibly ±inf"""
    x: float
    value: float
    iterations: int
    reason: str


def _probe_fixed_points(phi, probe):
    points = probe_points(probe)
    with np.errstate(all='ignore'):
        try:
            shift = phi.evaluate(points) - points
        except MagnitudeOverflow:
            shift = np.array([_safe_shift(phi, x) for x in points])
    signs = np.sign(shift)
    nonzero = np.flatnonzero(signs != 0)
    crossings = [
        (points[a] + points[b]) / 2
        for a, b in zip(nonzero, nonzero[1:]) if signs[a] != signs[b]
    ]
    crossings += list(points[signs == 0])
    return crossings


def _safe_shift(phi, x):
    try:
        return phi.evaluate(x) - x
    except MagnitudeOverflow:
        return math.copysign(math.inf, x)


def phi_star(phi, x, N=1000, tol=1e-12, probe=None):
    """
    The limit φ*(x) of the orbit of x under an increasing symbol. The orbit either
    stabilizes (|φ_(n+1)(x) - φ_n(x)| < tol) or is certified to diverge once it is past
    max(k, the outermost fixed point on the probe), k being the exponent of the symbol
    condition |φ(t)| >= |t|^(1/k).
    """
    probe = probe or ClassifierConfig.from_settings().probe
    if monotonicity_classify(phi, probe) != Monotonicity.INCREASING:
        raise PreconditionError(
            f"φ*(x) is only defined here for increasing symbols; {phi} is not increasing",
            hypothesis="φ is increasing",
        )
    check = check_symbol_conditions(phi, probe=probe)
    k = check.k if check.k is not None else probe.half_width
    fixed = _probe_fixed_points(phi, probe)
    upper = max([k, *fixed])
    lower = min([-k, *fixed])

    value = float(x)
    for n in range(1, N + 1):
        try:
            following = phi.evaluate(value)
        except MagnitudeOverflow:
            return OrbitLimit(x, math.copysign(math.inf, value), n, 'overflow')
        if abs(following - value) < tol:
            return OrbitLimit(x, float(following), n, 'stabilized')
        if following > value > upper:
            return OrbitLimit(x, math.inf, n, 'escaped beyond every fixed point')
        if following < value < lower:
            return OrbitLimit(x, -math.inf, n, 'escaped beyond every fixed point')
        value = following
    logger.debug(f"orbit of {x} under {phi} undecided after {N} iterations")
    return OrbitLimit(x, value, N, 'horizon reached')
