import logging
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .conf import get_positive_setting, get_setting
from .exceptions import InvalidGeometry
from .expressions import SymbolExpr
from .polynomials import has_odd_multiplicity_root, poly_from_expr


logger = logging.getLogger(__name__)

# log-spaced tail probes reach out to this distance from the origin
TAIL_LIMIT = 1e6


@dataclass(frozen=True)
class GridSpec:
    """
    A uniform grid of `points` nodes on [-half_width, half_width], plus the parameters
    used when sweeping it: the number of local refinement levels (each at eight times the
    density of the last) and the weighted size treated as negligible at the grid's edge.
    """
    half_width: float = 30.0
    points: int = 4096
    refinement_levels: int = 3
    tail_eps: float = 1e-14

    def __post_init__(self):
        if not self.half_width > 0:
            raise InvalidGeometry(f"grid half-width must be positive, got {self.half_width!r}")
        if self.points < 64:
            raise InvalidGeometry(f"a grid needs at least 64 points, got {self.points!r}")
        if self.refinement_levels < 0:
            raise InvalidGeometry("refinement_levels must be non-negative")
        if self.tail_eps < 0:
            raise InvalidGeometry("tail_eps must be non-negative")

    @classmethod
    def from_settings(cls, **overrides):
        values = {
            'half_width': get_positive_setting('GRID_HALF_WIDTH'),
            'points': get_positive_setting('GRID_POINTS', int),
            'refinement_levels': int(get_setting('GRID_REFINEMENT_LEVELS')),
            'tail_eps': float(get_setting('GRID_TAIL_EPS')),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    @classmethod
    def parse(cls, text, **defaults):
        """Build a grid from the command-line form 'L:N'"""
        try:
            half_width, points = text.split(':')
            return cls.from_settings(half_width=float(half_width), points=int(points), **defaults)
        except ValueError as e:
            if isinstance(e, InvalidGeometry):
                raise
            raise InvalidGeometry(f"grid must be given as L:N, got {text!r}")

    @property
    def spacing(self):
        return 2 * self.half_width / (self.points - 1)

    def nodes(self):
        return np.linspace(-self.half_width, self.half_width, self.points)

    def doubled(self):
        """The grid on twice the interval, at the same spacing"""
        return replace(self, half_width=2 * self.half_width, points=2 * self.points - 1)

    def covering(self, half_width):
        """The smallest doubling of this grid whose interval contains [-half_width, half_width]"""
        grid = self
        while grid.half_width < half_width:
            grid = grid.doubled()
        return grid


def log_tail(start, stop, count):
    return np.logspace(np.log10(start), np.log10(stop), count)


def probe_points(probe, tail_points=None, tail_limit=TAIL_LIMIT):
    """
    The probe grid's nodes together with log-spaced samples on both tails, from just past
    the probe's edge out to `tail_limit`, sorted ascending.
    """
    if tail_points is None:
        tail_points = int(get_setting('PROBE_TAIL_POINTS'))
    core = probe.nodes()
    if tail_points <= 0 or tail_limit <= probe.half_width:
        return core
    tail = log_tail(probe.half_width * 1.05, tail_limit, tail_points)
    return np.concatenate([-tail[::-1], core, tail])


class Monotonicity(str, Enum):
    INCREASING = 'increasing'
    DECREASING = 'decreasing'
    NON_MONOTONE = 'non_monotone'
    INCONCLUSIVE = 'inconclusive'


def _polynomial_monotonicity(poly):
    slope = poly.derivative()
    if slope.degree < 0:
        return Monotonicity.INCONCLUSIVE
    if has_odd_multiplicity_root(slope):
        return Monotonicity.NON_MONOTONE
    # p' keeps one sign off a finite set, so p is strictly monotone
    return Monotonicity.INCREASING if slope.leading > 0 else Monotonicity.DECREASING


def monotonicity_classify(phi, probe):
    """
    Classify phi as increasing, decreasing, non-monotone or inconclusive. Polynomials
    are decided exactly (p is strictly monotone iff p' has no real root of odd
    multiplicity); anything else is decided from the sign of phi' on the probe nodes.
    """
    if probe.points < 512:
        raise InvalidGeometry("monotonicity probes need at least 512 points")

    poly = poly_from_expr(phi) if isinstance(phi, SymbolExpr) else None
    if poly is not None:
        return _polynomial_monotonicity(poly)

    slope = np.asarray(phi.jet(probe.nodes(), 1).derivs[1])
    positive, negative = np.any(slope > 0), np.any(slope < 0)
    if positive and negative:
        result = Monotonicity.NON_MONOTONE
    elif np.any(slope == 0):
        result = Monotonicity.INCONCLUSIVE
    else:
        result = Monotonicity.INCREASING if positive else Monotonicity.DECREASING
    logger.debug(f"monotonicity of {phi}: {result.value}")
    return result
