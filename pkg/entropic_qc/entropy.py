"""Unified (q,s)-entropies.

``S_(q,s)(ρ) = ((Tr ρ^q)^s - 1) / ((1-q) s)`` contains Tsallis (s=1), Rényi (s→0)
and von Neumann (q→1) entropies. Every function here works on spectra, natural log.
Functions whose name ends in ``_spectra`` or take ``p`` broadcast over leading axes.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import entr, xlogy

from .config import REGIME_TOL, SERIES_TOL, SUPPORT_EIG_TOL, SUPPORT_WEIGHT_TOL
from .exceptions import BadIndicesError, PreconditionUnmetError, SupportViolationError
from .linalg import DensityOperator, eig_hermitian, majorizes, spectrum, tensor

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


class Regime(str, Enum):
    VON_NEUMANN = 'von_neumann'
    RENYI = 'renyi'
    UNIFIED = 'unified'


@dataclass(frozen=True)
class EntropicIndices:
    """Entropic indices (q, s) of the unified family

    :raise BadIndicesError: q is not positive
    """

    q: float
    s: float = 1.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.q) or not math.isfinite(self.s) or self.q <= 0:
            raise BadIndicesError(f'entropic indices need q > 0 and finite s, got q={self.q}, s={self.s}')

    @property
    def regime(self) -> Regime:
        if abs(self.q - 1.0) <= REGIME_TOL:
            return Regime.VON_NEUMANN
        if abs(self.s) <= REGIME_TOL:
            return Regime.RENYI
        return Regime.UNIFIED

    @property
    def additive(self) -> bool:
        return self.regime is not Regime.UNIFIED

    @classmethod
    def tsallis(cls, q: float) -> 'EntropicIndices':
        return cls(q, 1.0)

    @classmethod
    def renyi(cls, q: float) -> 'EntropicIndices':
        return cls(q, 0.0)

    @classmethod
    def von_neumann(cls) -> 'EntropicIndices':
        return cls(1.0, 1.0)

    def __str__(self) -> str:
        return f'(q={self.q:g}, s={self.s:g})'


def power_sum(p: ArrayLike, q: float) -> FloatArray:
    """Σ p_i^q along the last axis, with 0^q = 0"""
    p_ = np.asarray(p, dtype=np.float64)
    positive = p_ > 0
    powered = np.zeros_like(p_)
    np.power(p_, q, out=powered, where=positive)
    return np.sum(powered, axis=-1)


def shannon(p: ArrayLike) -> FloatArray:
    """-Σ p_i ln p_i along the last axis, with 0 ln 0 = 0"""
    return np.sum(entr(np.clip(np.asarray(p, dtype=np.float64), 0.0, None)), axis=-1)


def _expm1_ratio(x: FloatArray) -> FloatArray:
    """expm1(x)/x, continued by its series at x = 0"""
    x = np.asarray(x, dtype=np.float64)
    small = np.abs(x) < SERIES_TOL
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 + x / 2, np.expm1(safe) / safe)


def _from_log_power_sum(log_t: FloatArray, idx: EntropicIndices) -> FloatArray:
    """((e^{log_t})^s - 1)/((1-q)s) written as log_t/(1-q) · expm1(s log_t)/(s log_t)"""
    if idx.regime is Regime.RENYI:
        return log_t / (1.0 - idx.q)
    return log_t / (1.0 - idx.q) * _expm1_ratio(idx.s * log_t)


def unified_entropy_spectrum(p: ArrayLike, idx: EntropicIndices) -> FloatArray:
    """Unified (q,s)-entropy of a probability vector (or a stack of them)

    :param p: probabilities along the last axis
    :param idx: entropic indices

    :return: entropy, a float for a single vector
    """
    if idx.regime is Regime.VON_NEUMANN:
        return shannon(p)
    return _from_log_power_sum(np.log(power_sum(p, idx.q)), idx)


def unified_entropy(rho: DensityOperator, idx: EntropicIndices) -> float:
    """Unified (q,s)-entropy of a state"""
    return float(unified_entropy_spectrum(spectrum(rho.matrix), idx))


def power_trace(rho: DensityOperator, q: float) -> float:
    """Tr ρ^q computed from the spectrum"""
    return float(power_sum(spectrum(rho.matrix), q))


def purity(rho: DensityOperator) -> float:
    """Tr ρ²"""
    return float(np.real(np.vdot(rho.matrix, rho.matrix)))


def max_entropy(n: int, idx: EntropicIndices) -> float:
    """Entropy of the maximally mixed state of dimension n, (n^{(1-q)s} - 1)/((1-q)s)"""
    if n < 1:
        raise ValueError(f'dimension must be positive, got {n}')
    log_n = math.log(n)
    if idx.regime is not Regime.UNIFIED:
        return log_n
    return float(log_n * _expm1_ratio(np.float64((1.0 - idx.q) * idx.s * log_n)))


def rescale_factor(p: ArrayLike, idx: EntropicIndices) -> FloatArray:
    """(Tr ρ^q)^s, defined as 1 in the von Neumann and Rényi regimes"""
    if idx.regime is not Regime.UNIFIED:
        return np.ones(np.shape(p)[:-1])
    return np.power(power_sum(p, idx.q), idx.s)


def purity_ratio_spectra(before: ArrayLike, after: ArrayLike, idx: EntropicIndices) -> FloatArray:
    """((Tr Π(ρ)^q)/(Tr ρ^q))^s from the spectra before and after a measurement"""
    if idx.regime is not Regime.UNIFIED:
        return np.ones(np.broadcast_shapes(np.shape(before)[:-1], np.shape(after)[:-1]))
    return np.power(power_sum(after, idx.q) / power_sum(before, idx.q), idx.s)


def disturbance_from_log_ratio(log_ratio: ArrayLike, idx: EntropicIndices) -> FloatArray:
    """(R^s - 1)/((1-q)s) from ln R, R = Tr Π(ρ)^q / Tr ρ^q

    Not defined in the von Neumann regime, where the ratio tends to 1.
    """
    if idx.regime is Regime.VON_NEUMANN:
        raise ValueError('the von Neumann disturbance is not a function of the purity ratio')
    return _from_log_power_sum(np.asarray(log_ratio, dtype=np.float64), idx)


def disturbance_from_spectra(
    before: ArrayLike,
    after: ArrayLike,
    idx: EntropicIndices,
    rescaled: bool = True,
) -> FloatArray:
    """(S(after) - S(before)) / (Tr before^q)^s evaluated in log-stable form.

    For the unified regime this equals (P - 1)/((1-q)s) with P the purity ratio.

    :param before: spectrum of the state
    :param after: spectrum of the measured state
    :param idx: entropic indices
    :param rescaled: divide by (Tr ρ^q)^s, otherwise the bare entropy gain

    :return: disturbance
    """
    if idx.regime is Regime.VON_NEUMANN:
        return shannon(after) - shannon(before)
    log_before = np.log(power_sum(before, idx.q))
    gap = disturbance_from_log_ratio(np.log(power_sum(after, idx.q)) - log_before, idx)
    if rescaled or idx.regime is Regime.RENYI:
        return gap
    return gap * np.exp(idx.s * log_before)


def sum_rule_residual(a: DensityOperator, b: DensityOperator, idx: EntropicIndices) -> float:
    """Deviation from S(a⊗b) = S(a) + S(b) + (1-q)s S(a)S(b)"""
    s_a = unified_entropy(a, idx)
    s_b = unified_entropy(b, idx)
    coupling = 0.0 if idx.additive else (1.0 - idx.q) * idx.s
    return abs(unified_entropy(tensor(a, b), idx) - s_a - s_b - coupling * s_a * s_b)


def relative_entropy(rho: DensityOperator, sigma: DensityOperator, strict: bool = False) -> float:
    """Quantum relative entropy S(ρ‖σ) = Tr ρ(ln ρ - ln σ), evaluated in σ's eigenbasis.

    :param strict: raise on a support violation instead of returning infinity

    :return: nonnegative value, ``math.inf`` if supp ρ is not inside supp σ

    :raise SupportViolationError: strict is set and the support condition fails
    """
    rho_values, _ = eig_hermitian(rho)
    sigma_values, sigma_vectors = eig_hermitian(sigma)
    weights = np.real(np.einsum('ik,ij,jk->k', sigma_vectors.conj(), rho.matrix, sigma_vectors))
    outside = sigma_values <= SUPPORT_EIG_TOL
    leaked = float(np.sum(np.clip(weights[outside], 0.0, None)))
    if leaked > SUPPORT_WEIGHT_TOL:
        if strict:
            raise SupportViolationError(f'ρ has weight {leaked:.3e} outside the support of σ')
        logger.warning('relative entropy is infinite: ρ has weight %.3e outside supp σ', leaked)
        return math.inf
    cross = float(np.sum(xlogy(weights[~outside], sigma_values[~outside])))
    return max(float(-shannon(rho_values)) - cross, 0.0)


def check_schur_concavity(p: ArrayLike, q_vec: ArrayLike, idx: EntropicIndices, tol: float = 1e-10) -> bool:
    """Check S(p) ≥ S(q_vec) for spectra expected to satisfy ``p ≺ q_vec``.

    :return: whether the entropy ordering holds within tol

    :raise PreconditionUnmetError: p and q_vec are not related by majorization in either direction
    """
    if not majorizes(p, q_vec) and not majorizes(q_vec, p):
        raise PreconditionUnmetError('spectra are not related by majorization')
    return bool(unified_entropy_spectrum(p, idx) >= unified_entropy_spectrum(q_vec, idx) - tol)
