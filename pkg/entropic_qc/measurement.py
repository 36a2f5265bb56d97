"""Local rank-one projective measurements without postselection.

All local maps work on a two-block state (dims ``(N^A, N^B)``); regroup
multipartite states with :func:`entropic_qc.linalg.bipartition` first.
Rotated blocks are computed on the reshaped ``(N^A, N^B, N^A, N^B)`` tensor,
so every helper below also accepts stacks of bases (leading batch axes).
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .config import OUTCOME_TOL, SPECTRAL_FLOOR
from .entropy import (
    EntropicIndices,
    disturbance_from_spectra,
    purity_ratio_spectra,
    rescale_factor,
    unified_entropy_spectrum,
)
from .exceptions import DimMismatchError
from .linalg import ComplexMatrix, DensityOperator, Spectrum, Unitary, eig_hermitian, is_unitary, spectrum


class Side(str, Enum):
    A = 'A'
    B = 'B'
    AB = 'AB'

    @property
    def measures_a(self) -> bool:
        return self is not Side.B

    @property
    def measures_b(self) -> bool:
        return self is not Side.A


@dataclass(frozen=True, eq=False)
class ProjectiveBasis:
    """Orthonormal basis given by the columns of a unitary, P_i = |i⟩⟨i|

    :raise DimMismatchError: the matrix is not unitary
    """

    unitary: Unitary

    def __post_init__(self) -> None:
        if not is_unitary(self.unitary):
            raise DimMismatchError('basis columns are not orthonormal')

    @classmethod
    def computational(cls, n: int) -> 'ProjectiveBasis':
        return cls(np.eye(n, dtype=np.complex128))

    @classmethod
    def eigenbasis(cls, rho: DensityOperator) -> 'ProjectiveBasis':
        """Basis diagonalizing the state"""
        return cls(eig_hermitian(rho)[1])

    @property
    def dim(self) -> int:
        return int(self.unitary.shape[0])

    @property
    def projectors(self) -> NDArray[np.complex128]:
        """Stack of the N projectors, shape (N, N, N)"""
        return np.einsum('ai,bi->iab', self.unitary, self.unitary.conj())


@dataclass(frozen=True, eq=False)
class LocalMeasurement:
    """Local measurement Π^A = {P_i ⊗ I}, Π^B = {I ⊗ P_j} or Π^AB = {P_i ⊗ P_j}

    :raise ValueError: a basis required by the side is missing
    """

    side: Side
    basis_a: ProjectiveBasis | None = None
    basis_b: ProjectiveBasis | None = None

    def __post_init__(self) -> None:
        if self.side.measures_a and self.basis_a is None:
            raise ValueError(f'side {self.side.value} needs a basis on A')
        if self.side.measures_b and self.basis_b is None:
            raise ValueError(f'side {self.side.value} needs a basis on B')

    @classmethod
    def build(cls, side: Side | str, ua: ArrayLike | None = None, ub: ArrayLike | None = None) -> 'LocalMeasurement':
        side_ = Side(side)
        return cls(
            side=side_,
            basis_a=ProjectiveBasis(np.asarray(ua, dtype=np.complex128)) if side_.measures_a else None,
            basis_b=ProjectiveBasis(np.asarray(ub, dtype=np.complex128)) if side_.measures_b else None,
        )

    @property
    def unitary_a(self) -> Unitary | None:
        return None if self.basis_a is None else self.basis_a.unitary

    @property
    def unitary_b(self) -> Unitary | None:
        return None if self.basis_b is None else self.basis_b.unitary

    def restricted(self, side: Side) -> 'LocalMeasurement':
        """The unilocal part of a bilocal measurement"""
        return LocalMeasurement(
            side=side,
            basis_a=self.basis_a if side.measures_a else None,
            basis_b=self.basis_b if side.measures_b else None,
        )

    def check_dims(self, dims: tuple[int, ...]) -> None:
        if len(dims) != 2:
            raise DimMismatchError(f'local measurements need a bipartite state, got dims {dims}')
        if self.side.measures_a and self.basis_a is not None and self.basis_a.dim != dims[0]:
            raise DimMismatchError(f'basis on A has dimension {self.basis_a.dim}, state has {dims[0]}')
        if self.side.measures_b and self.basis_b is not None and self.basis_b.dim != dims[1]:
            raise DimMismatchError(f'basis on B has dimension {self.basis_b.dim}, state has {dims[1]}')


@dataclass(frozen=True)
class ConditionalDecomposition:
    """Outcome probabilities with conditional states of the unmeasured side.

    For side AB only ``probabilities`` (shape (N^A, N^B)) is filled.
    Conditional states whose probability is below OUTCOME_TOL are ``None``.
    """

    side: Side
    probabilities: NDArray[np.float64]
    conditionals: tuple[ComplexMatrix | None, ...] = ()


@dataclass(frozen=True)
class DisturbanceReport:
    entropy_before: float
    entropy_after: float
    purity_ratio: float
    rescale: float
    disturbance: float

    @property
    def entropy_gain(self) -> float:
        """Unrescaled disturbance S(Π(ρ)) - S(ρ)"""
        return self.entropy_after - self.entropy_before


def as_tensor(rho: DensityOperator | ComplexMatrix, dims: tuple[int, ...]) -> NDArray[np.complex128]:
    matrix = rho.matrix if isinstance(rho, DensityOperator) else rho
    return matrix.reshape(dims + dims)


def blocks_a(tensor_: NDArray[np.complex128], ua: ArrayLike) -> NDArray[np.complex128]:
    """Unnormalized conditional states of B, ⟨i|ρ|i⟩_A, shape (..., N^A, N^B, N^B)"""
    u = np.asarray(ua)
    return np.einsum('...ai,abkc,...ki->...ibc', u.conj(), tensor_, u)


def blocks_b(tensor_: NDArray[np.complex128], ub: ArrayLike) -> NDArray[np.complex128]:
    """Unnormalized conditional states of A, ⟨j|ρ|j⟩_B, shape (..., N^B, N^A, N^A)"""
    u = np.asarray(ub)
    return np.einsum('...bj,abkc,...cj->...jak', u.conj(), tensor_, u)


def joint_probabilities(tensor_: NDArray[np.complex128], ua: ArrayLike, ub: ArrayLike) -> NDArray[np.float64]:
    """p_ij = ⟨i j|ρ|i j⟩, shape (..., N^A, N^B)"""
    u = np.asarray(ua)
    v = np.asarray(ub)
    return np.real(np.einsum('...ai,...bj,abkc,...ki,...cj->...ij', u.conj(), v.conj(), tensor_, u, v))


def _floor(values: NDArray[np.float64]) -> NDArray[np.float64]:
    values = np.sort(values, axis=-1)[..., ::-1]
    return np.where(values > SPECTRAL_FLOOR, values, 0.0)


def measured_spectra(
    rho: DensityOperator,
    side: Side,
    ua: ArrayLike | None = None,
    ub: ArrayLike | None = None,
) -> Spectrum:
    """Spectrum of Π^K(ρ) without building the measured state.

    ua and ub may carry leading batch axes; the output then has the same batch shape.
    """
    tensor_ = as_tensor(rho, rho.dims)
    if side is Side.AB:
        probabilities = joint_probabilities(tensor_, ua, ub)
        return _floor(probabilities.reshape(probabilities.shape[:-2] + (-1,)))
    blocks = blocks_a(tensor_, ua) if side is Side.A else blocks_b(tensor_, ub)
    values = np.linalg.eigvalsh(blocks)
    return _floor(values.reshape(values.shape[:-2] + (-1,)))


def dephase(rho: DensityOperator, basis: ProjectiveBasis) -> DensityOperator:
    """Global measurement Π(ρ) = Σ P_i ρ P_i = Σ p_i |i⟩⟨i|

    :raise DimMismatchError: basis and state dimensions differ
    """
    if basis.dim != rho.dim:
        raise DimMismatchError(f'basis of dimension {basis.dim} for a state of dimension {rho.dim}')
    u = basis.unitary
    probabilities = np.real(np.einsum('ai,ab,bi->i', u.conj(), rho.matrix, u))
    return DensityOperator(matrix=(u * probabilities) @ u.conj().T, dims=rho.dims)


def apply_local(rho: DensityOperator, m: LocalMeasurement) -> DensityOperator:
    """Post-measurement state Π^A(ρ), Π^B(ρ) or Π^AB(ρ)

    :raise DimMismatchError: state is not bipartite or bases do not fit
    """
    m.check_dims(rho.dims)
    tensor_ = as_tensor(rho, rho.dims)
    ua, ub = m.unitary_a, m.unitary_b
    if m.side is Side.A:
        out = np.einsum('ai,ibc,ki->abkc', ua, blocks_a(tensor_, ua), ua.conj())
    elif m.side is Side.B:
        out = np.einsum('bj,jak,cj->abkc', ub, blocks_b(tensor_, ub), ub.conj())
    else:
        p = joint_probabilities(tensor_, ua, ub)
        out = np.einsum('ai,bj,ij,ki,cj->abkc', ua, ub, p, ua.conj(), ub.conj())
    return DensityOperator(matrix=out.reshape(rho.dim, rho.dim), dims=rho.dims)


def conditional_decomposition(rho: DensityOperator, m: LocalMeasurement) -> ConditionalDecomposition:
    """Outcome probabilities p_i and conditional states ρ^{B|i} (or p_j, ρ^{A|j})

    :raise DimMismatchError: state is not bipartite or bases do not fit
    """
    m.check_dims(rho.dims)
    tensor_ = as_tensor(rho, rho.dims)
    if m.side is Side.AB:
        return ConditionalDecomposition(
            side=m.side,
            probabilities=joint_probabilities(tensor_, m.unitary_a, m.unitary_b),
        )
    blocks = blocks_a(tensor_, m.unitary_a) if m.side is Side.A else blocks_b(tensor_, m.unitary_b)
    probabilities = np.real(np.trace(blocks, axis1=-2, axis2=-1))
    conditionals = tuple(
        block / weight if weight >= OUTCOME_TOL else None
        for block, weight in zip(blocks, probabilities, strict=True)
    )
    return ConditionalDecomposition(side=m.side, probabilities=probabilities, conditionals=conditionals)


def _after_spectrum(rho: DensityOperator, m: LocalMeasurement | ProjectiveBasis) -> Spectrum:
    if isinstance(m, ProjectiveBasis):
        return spectrum(dephase(rho, m).matrix)
    m.check_dims(rho.dims)
    return measured_spectra(rho, m.side, m.unitary_a, m.unitary_b)


def purity_ratio(rho: DensityOperator, m: LocalMeasurement | ProjectiveBasis, idx: EntropicIndices) -> float:
    """P_Π = ((Tr Π(ρ)^q)/(Tr ρ^q))^s, exactly 1 for Rényi and von Neumann indices"""
    return float(purity_ratio_spectra(spectrum(rho.matrix), _after_spectrum(rho, m), idx))


def disturbance(
    rho: DensityOperator,
    m: LocalMeasurement | ProjectiveBasis,
    idx: EntropicIndices,
) -> DisturbanceReport:
    """Entropy disturbance (S(Π(ρ)) - S(ρ)) / (Tr ρ^q)^s.

    A :class:`ProjectiveBasis` is applied as a global measurement (:func:`dephase`),
    a :class:`LocalMeasurement` through :func:`apply_local`.
    """
    before = spectrum(rho.matrix)
    after = _after_spectrum(rho, m)
    return DisturbanceReport(
        entropy_before=float(unified_entropy_spectrum(before, idx)),
        entropy_after=float(unified_entropy_spectrum(after, idx)),
        purity_ratio=float(purity_ratio_spectra(before, after, idx)),
        rescale=float(rescale_factor(before, idx)),
        disturbance=float(disturbance_from_spectra(before, after, idx)),
    )


def lift_measurement(m: LocalMeasurement, ancilla: DensityOperator, onto: Side) -> LocalMeasurement:
    """Extend a measurement to a state with an uncorrelated ancilla appended to one party.

    The ancilla's eigenbasis is tensored onto the basis of the party that absorbs it,
    matching :func:`entropic_qc.linalg.bipartition` ordering (party first, ancilla last).

    :param m: measurement on the original bipartite state
    :param ancilla: appended state
    :param onto: party the ancilla is grouped with (A or B)
    """
    eigenbasis = eig_hermitian(ancilla)[1]
    ua, ub = m.unitary_a, m.unitary_b
    if onto is Side.A and ua is not None:
        ua = np.kron(ua, eigenbasis)
    elif onto is Side.B and ub is not None:
        ub = np.kron(ub, eigenbasis)
    return LocalMeasurement(
        side=m.side,
        basis_a=None if ua is None else ProjectiveBasis(ua),
        basis_b=None if ub is None else ProjectiveBasis(ub),
    )
