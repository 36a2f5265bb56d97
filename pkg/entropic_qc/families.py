"""Pseudopure, isotropic and Werner states with their analytic correlation values.

For these families the optimal measurement does not depend on the entropic form,
and the semiquantum and total measures coincide, so every value below holds
for the sides A, B and AB alike.
"""
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import xlogy

from .entropy import EntropicIndices, Regime, disturbance_from_log_ratio, disturbance_from_spectra
from .exceptions import BadKindError, BadParameterError, DimMismatchError
from .linalg import DensityOperator, Spectrum, make_density, schmidt
from .measurement import Side

logger = logging.getLogger(__name__)

DISCREPANCY_TOL = 1e-6

# (coefficient, base) pairs standing for Σ c·b^q
_Terms = Sequence[tuple[float, float]]


class FamilyKind(str, Enum):
    PSEUDOPURE = 'pseudopure'
    ISOTROPIC = 'isotropic'
    WERNER = 'werner'


@dataclass(frozen=True, eq=False)
class FamilySpec:
    """One member of a family.

    ``parameter`` is p ∈ [0, 1] for pseudopure, y ∈ [1/N², 1] for isotropic
    and x ∈ [-1, 1] for Werner states. ``psi`` is the pure component of a pseudopure state.

    :raise BadParameterError: parameter out of range or dimensions not allowed for the kind
    """

    kind: FamilyKind
    dims: tuple[int, int]
    parameter: float
    psi: NDArray[np.complex128] | None = None

    def __post_init__(self) -> None:
        n_a, n_b = self.dims
        if n_a < 1 or n_b < 1:
            raise BadParameterError(f'dimensions must be positive, got {self.dims}')
        if self.kind is FamilyKind.PSEUDOPURE:
            if self.psi is None:
                raise BadParameterError('a pseudopure state needs its pure component')
            if not 0.0 <= self.parameter <= 1.0:
                raise BadParameterError(f'p must lie in [0, 1], got {self.parameter}')
            return
        if n_a != n_b or n_a < 2:
            raise BadParameterError(f'{self.kind.value} states need equal dimensions N ≥ 2, got {self.dims}')
        if self.kind is FamilyKind.ISOTROPIC and not 1.0 / n_a ** 2 <= self.parameter <= 1.0:
            raise BadParameterError(f'y must lie in [1/N², 1], got {self.parameter}')
        if self.kind is FamilyKind.WERNER and not -1.0 <= self.parameter <= 1.0:
            raise BadParameterError(f'x must lie in [-1, 1], got {self.parameter}')

    @property
    def n(self) -> int:
        return self.dims[0]

    @classmethod
    def pseudopure(cls, psi: ArrayLike, dims: Sequence[int], p: float) -> 'FamilySpec':
        n_a, n_b = (int(d) for d in dims)
        vector = np.asarray(psi, dtype=np.complex128).reshape(-1)
        if vector.size != n_a * n_b:
            raise DimMismatchError(f'vector of length {vector.size} for dims {(n_a, n_b)}')
        return cls(kind=FamilyKind.PSEUDOPURE, dims=(n_a, n_b), parameter=float(p), psi=vector)

    @classmethod
    def isotropic(cls, n: int, y: float) -> 'FamilySpec':
        return cls(kind=FamilyKind.ISOTROPIC, dims=(n, n), parameter=float(y))

    @classmethod
    def werner(cls, n: int, x: float) -> 'FamilySpec':
        return cls(kind=FamilyKind.WERNER, dims=(n, n), parameter=float(x))


def maximally_entangled(n: int) -> NDArray[np.complex128]:
    """|ψ⁺⟩ = Σ|ii⟩/√n"""
    return np.eye(n, dtype=np.complex128).reshape(-1) / math.sqrt(n)


def schmidt_vector(coefficients: ArrayLike, dims: Sequence[int]) -> NDArray[np.complex128]:
    """Σ √λ_k |kk⟩ for squared Schmidt coefficients λ_k

    :raise BadParameterError: coefficients are negative, do not sum to one or exceed min(dims)
    """
    weights = np.asarray(coefficients, dtype=np.float64).reshape(-1)
    n_a, n_b = (int(d) for d in dims)
    if weights.size > min(n_a, n_b) or np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-10:
        raise BadParameterError(f'invalid Schmidt coefficients {weights.tolist()} for dims {(n_a, n_b)}')
    matrix = np.zeros((n_a, n_b), dtype=np.complex128)
    k = np.arange(weights.size)
    matrix[k, k] = np.sqrt(weights)
    return matrix.reshape(-1)


def swap_operator(n: int) -> NDArray[np.complex128]:
    """F = Σ |ij⟩⟨ji|"""
    return np.eye(n * n, dtype=np.complex128).reshape(n, n, n, n).transpose(0, 1, 3, 2).reshape(n * n, n * n)


def build(spec: FamilySpec) -> DensityOperator:
    """Density operator of a family member on dims ``spec.dims``"""
    n_a, n_b = spec.dims
    size = n_a * n_b
    identity = np.eye(size, dtype=np.complex128)
    if spec.kind is FamilyKind.PSEUDOPURE:
        assert spec.psi is not None
        p = spec.parameter
        matrix = (1 - p) * identity / size + p * np.outer(spec.psi, spec.psi.conj())
    elif spec.kind is FamilyKind.ISOTROPIC:
        n, y = spec.n, spec.parameter
        psi = maximally_entangled(n)
        matrix = ((1 - y) * identity + (n * n * y - 1) * np.outer(psi, psi.conj())) / (n * n - 1)
    else:
        n, x = spec.n, spec.parameter
        matrix = ((n - x) * identity + (n * x - 1) * swap_operator(n)) / (n ** 3 - n)
    return make_density(matrix, spec.dims)


def _log_sum(terms: _Terms, q: float) -> float:
    """ln Σ c·b^q with 0^q = 0"""
    return math.log(sum(c * b ** q for c, b in terms if b > 0))


def _log_sum_slope(terms: _Terms) -> float:
    """d/dq ln Σ c·b^q at q = 1"""
    total = sum(c * b for c, b in terms)
    return float(sum(c * xlogy(b, b) for c, b in terms)) / total


def _ratio_measure(numerator: _Terms, denominator: _Terms, idx: EntropicIndices) -> float:
    """(R^s - 1)/((1-q)s) for R(q) = Σ c·b^q / Σ c'·b'^q with R(1) = 1.

    The von Neumann value is the limit -d/dq ln R at q = 1.
    """
    if idx.regime is Regime.VON_NEUMANN:
        return _log_sum_slope(denominator) - _log_sum_slope(numerator)
    log_ratio = _log_sum(numerator, idx.q) - _log_sum(denominator, idx.q)
    return float(disturbance_from_log_ratio(log_ratio, idx))


def _require(spec: FamilySpec, kind: FamilyKind) -> None:
    if spec.kind is not kind:
        raise BadKindError(f'expected a {kind.value} state, got {spec.kind.value}')


def pseudopure_closed_form(spec: FamilySpec, side: Side | str, idx: EntropicIndices) -> float:
    """Correlations of (1-p) I/N + p|ψ⟩⟨ψ|, attained at the local Schmidt bases.

    The value is side independent; side is only validated.

    :raise BadKindError: spec is not pseudopure
    """
    Side(side)
    _require(spec, FamilyKind.PSEUDOPURE)
    assert spec.psi is not None
    decomposition = schmidt(spec.psi, spec.dims)
    size = spec.dims[0] * spec.dims[1]
    p = spec.parameter
    numerator = [(size - decomposition.schmidt_number, 1 - p)]
    numerator += [(1.0, 1 + (size * lam - 1) * p) for lam in decomposition.coefficients]
    denominator = [(size - 1, 1 - p), (1.0, 1 + (size - 1) * p)]
    return _ratio_measure(numerator, denominator, idx)


def _check_isotropic(n: int, y: float) -> None:
    FamilySpec.isotropic(n, y)


def _check_werner(n: int, x: float) -> None:
    FamilySpec.werner(n, x)


def isotropic_closed_form(n: int, y: float, idx: EntropicIndices) -> float:
    """Isotropic correlations from the standard-basis measurement

    :raise BadParameterError: y ∉ [1/N², 1] or N < 2
    """
    _check_isotropic(n, y)
    numerator = [(n * (n - 1), 1 - y), (n, 1 - y + n * y - 1 / n)]
    denominator = [(1.0, (n * n - 1) * y), (n * n - 1, 1 - y)]
    return _ratio_measure(numerator, denominator, idx)


def isotropic_spectra(n: int, y: float) -> tuple[Spectrum, Spectrum]:
    """Spectra of an isotropic state before and after a standard-basis bilocal measurement"""
    _check_isotropic(n, y)
    low = (1 - y) / (n * n - 1)
    before = np.array([y] + [low] * (n * n - 1))
    after = np.array([low + (n * n * y - 1) / ((n * n - 1) * n)] * n + [low] * (n * n - n))
    return before, after


def isotropic_spectrum_form(n: int, y: float, idx: EntropicIndices) -> float:
    """Isotropic correlations evaluated through the exact spectra"""
    before, after = isotropic_spectra(n, y)
    return float(disturbance_from_spectra(before, after, idx))


def werner_spectra(n: int, x: float) -> tuple[Spectrum, Spectrum]:
    """Spectra of a Werner state before and after a standard-basis bilocal measurement

    Before: (1+x)/(N²+N) on the symmetric and (1-x)/(N²-N) on the antisymmetric subspace.
    After: a+b on the N diagonal products |ii⟩, a on the others.
    """
    _check_werner(n, x)
    symmetric = n * (n + 1) // 2
    before = np.array([(1 + x) / (n * n + n)] * symmetric + [(1 - x) / (n * n - n)] * (n * n - symmetric))
    a = (n - x) / (n ** 3 - n)
    b = (n * x - 1) / (n ** 3 - n)
    after = np.array([a + b] * n + [a] * (n * n - n))
    return np.clip(before, 0.0, None), np.clip(after, 0.0, None)


def werner_spectrum_form(n: int, x: float, idx: EntropicIndices) -> float:
    """Werner correlations evaluated through the exact spectra

    :raise BadParameterError: x ∉ [-1, 1] or N < 2
    """
    before, after = werner_spectra(n, x)
    return float(disturbance_from_spectra(before, after, idx))


def werner_printed_form(n: int, x: float, idx: EntropicIndices) -> float:
    """Literal evaluation of the published closed form for Werner states.

    Kept for comparison with :func:`werner_spectrum_form`, which it does not match in general
    (N=2, x=-1, von Neumann gives about 0.1308 instead of ln 2).
    """
    _check_werner(n, x)
    numerator = [(2.0, (n - 1) * (x + 1)), (2.0 * (n - 1), n - x)]
    denominator = [
        (2.0, (n - 1) * (x + 1)),
        (n - 1, n - x + n * x / 2 - 0.5),
        (n - 1, n - x - n * x / 2 + 0.5),
    ]
    return _ratio_measure(numerator, denominator, idx)


class WernerComparison(NamedTuple):
    printed: float
    spectrum: float
    difference: float


def werner_discrepancy(n: int, x: float, idx: EntropicIndices) -> WernerComparison:
    """Both Werner evaluations side by side, a warning is logged when they disagree"""
    printed = werner_printed_form(n, x, idx)
    exact = werner_spectrum_form(n, x, idx)
    difference = abs(printed - exact)
    if difference > DISCREPANCY_TOL:
        logger.warning('Werner N=%d x=%g %s: published form %.10g differs from spectrum value %.10g',
                       n, x, idx, printed, exact)
    return WernerComparison(printed=printed, spectrum=exact, difference=difference)


def _maximally_entangled_terms(n: int, p: float) -> tuple[_Terms, _Terms]:
    numerator = [(n * n - n, 1 - p), (n, 1 + (n - 1) * p)]
    denominator = [(n * n - 1, 1 - p), (1.0, 1 + (n * n - 1) * p)]
    return numerator, denominator


class IsotropicSpecializations(NamedTuple):
    tsallis: float
    renyi: float


def isotropic_specializations(n: int, p: float, q: float) -> IsotropicSpecializations:
    """Tsallis (s=1) and Rényi (s=0) correlations of (1-p) I/N² + p|ψ⁺⟩⟨ψ⁺|.

    The Tsallis value keeps the purity rescaling of the general form; the Rényi value uses
    ln[(N(1-p+Np)^q + (N²-N)(1-p)^q) / ((1-p+N²p)^q + (N²-1)(1-p)^q)] / (1-q).

    :raise BadParameterError: p ∉ [0, 1] or N < 2
    """
    if n < 2:
        raise BadParameterError(f'N must be at least 2, got {n}')
    if not 0.0 <= p <= 1.0:
        raise BadParameterError(f'p must lie in [0, 1], got {p}')
    numerator, denominator = _maximally_entangled_terms(n, p)
    tsallis = _ratio_measure(numerator, denominator, EntropicIndices.tsallis(q))
    renyi_numerator = [(float(n), 1 - p + n * p), (n * n - n, 1 - p)]
    renyi_denominator = [(1.0, 1 - p + n * n * p), (n * n - 1, 1 - p)]
    renyi = _ratio_measure(renyi_numerator, renyi_denominator, EntropicIndices.renyi(q))
    return IsotropicSpecializations(tsallis=tsallis, renyi=renyi)


def isotropic_p(n: int, y: float) -> float:
    """Pseudopure weight p = (N²y - 1)/(N² - 1) of an isotropic state"""
    return (n * n * y - 1) / (n * n - 1)


def closed_form(spec: FamilySpec, idx: EntropicIndices) -> float:
    """Analytic correlation value of any family member"""
    if spec.kind is FamilyKind.PSEUDOPURE:
        return pseudopure_closed_form(spec, Side.AB, idx)
    if spec.kind is FamilyKind.ISOTROPIC:
        return isotropic_closed_form(spec.n, spec.parameter, idx)
    return werner_spectrum_form(spec.n, spec.parameter, idx)
