"""
The Zak transform Zf(x, ω) = Σ_k f(x - k) e^(2πikω) of a Schwartz function, its
inversion ∫_0^1 Zf(x, ω) e^(-2πixω) dx = f̂(ω), and the witness it gives for unit-circle
points in the spectrum of the translation x + 1.
"""
import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np

from .schwartz import fourier_transform, gauss_legendre_nodes


logger = logging.getLogger(__name__)

DEFAULT_TERMS = 10
WITNESS_POINTS = 64
# |Zg(x, ω)| must exceed this multiple of the truncation error bar
WITNESS_MARGIN = 10
WITNESS_FLOOR = 1e-12


@dataclass(frozen=True)
class ZakSample:
    value: complex
    error: float


def zak_error(f, x, K):
    """
    A bound for Σ_{|k|>K} |f(x - k)|, from |f(t)| <= B/(1 + t^2)^2 for |t| >= M where
    B is f's certified tail majorant and M = K + 1 - |x| is the nearest omitted distance.
    """
    nearest = K + 1 - np.abs(np.asarray(x, dtype=float))
    return np.array([_omitted_terms(f, m) for m in nearest.ravel()]).reshape(nearest.shape)


def _omitted_terms(f, nearest):
    if nearest < 2:
        return math.inf
    majorant = f.tail_bound(2, nearest)
    if majorant == math.inf:
        return math.inf
    return 2 * majorant / (3 * (nearest - 1) ** 3)


def zak_transform(f, x, omega, K=DEFAULT_TERMS):
    """
    Zf(x, ω) summed over |k| <= K, with the truncation error bound from f's decay class.
    `x` and `omega` may be arrays; they are broadcast against each other.
    """
    if K < 1:
        raise ValueError(f"the Zak sum needs K >= 1, got {K}")
    xs, omegas = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(omega, dtype=float))
    ks = np.arange(-K, K + 1)
    shifted = xs.ravel()[:, None] - ks[None, :]
    phases = np.exp(2j * math.pi * omegas.ravel()[:, None] * ks[None, :])
    values = np.sum(f.evaluate(shifted) * phases, axis=1).reshape(xs.shape)
    error = zak_error(f, xs, K)
    if xs.ndim == 0:
        return ZakSample(complex(values), float(error))
    return ZakSample(values, error)


@dataclass(frozen=True)
class ZakInversion:
    omega: float
    value: complex
    fourier: complex

    @property
    def difference(self):
        return abs(self.value - self.fourier)


def zak_inversion(f, omega, K=DEFAULT_TERMS, nodes=64):
    """∫_0^1 Zf(x, ω) e^(-2πixω) dx by Gauss-Legendre quadrature, next to f̂(ω)"""
    xs, weights = gauss_legendre_nodes(0.0, 1.0, nodes)
    samples = zak_transform(f, xs, omega, K).value
    value = complex(np.sum(weights * samples * np.exp(-2j * math.pi * xs * omega)))
    return ZakInversion(float(omega), value, fourier_transform(f, omega))


@dataclass(frozen=True)
class TranslationWitness:
    """
    status is 'in_spectrum' when Zg(x, ω) is visibly non-zero at `x`: then C_φ - λ,
    φ(x) = x + 1, λ = e^(2πiω), cannot be surjective, since a solution f of
    C_φ f - λf = g would force Zg(·, ω) to vanish identically.
    """
    status: str
    lam: complex
    omega: float
    x: float = None
    value: complex = None
    error: float = None
    fourier: complex = None
    note: str = None
    rule: str = 'S.translation'

    @property
    def in_spectrum(self):
        return self.status == 'in_spectrum'


def translation_spectrum_witness(g, omega, K=DEFAULT_TERMS, points=WITNESS_POINTS):
    if not 0 <= omega < 1:
        raise ValueError(f"ω must lie in [0, 1), got {omega}")
    lam = cmath.exp(2j * math.pi * omega)
    xs = np.linspace(0.0, 1.0, points, endpoint=False)
    sample = zak_transform(g, xs, omega, K)
    sizes = np.abs(sample.value)
    best = int(np.argmax(sizes))
    threshold = max(WITNESS_MARGIN * float(sample.error[best]), WITNESS_FLOOR)
    fourier = fourier_transform(g, omega)
    if sizes[best] > threshold:
        logger.debug(f"|Zg({xs[best]:.4g}, {omega:g})| = {sizes[best]:.6g} puts λ={lam} in the spectrum")
        return TranslationWitness(
            'in_spectrum', lam, float(omega), float(xs[best]), complex(sample.value[best]),
            float(sample.error[best]), fourier,
        )
    note = _inconclusive_note(threshold, fourier, K)
    logger.debug(f"no translation witness at ω={omega:g}: {note}")
    return TranslationWitness('inconclusive', lam, float(omega), fourier=fourier, note=note)


def _inconclusive_note(threshold, fourier, K):
    # ∫_0^1 Zg(x, ω) e^(-2πixω) dx = ĝ(ω), so |ĝ(ω)| <= threshold means Zg(·, ω) may vanish
    if not math.isfinite(threshold):
        return f"the truncation error bar is unbounded for K={K}"
    if abs(fourier) <= threshold:
        return f"ĝ(ω) ≈ 0 (|ĝ(ω)| = {abs(fourier):.3g}), so Zg(·, ω) may vanish identically"
    return f"no sample of |Zg(x, ω)| exceeded {threshold:.3g}"
