"""Dense states on small Hilbert spaces: construction, tensor structure, spectra"""
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import reduce

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .config import (
    HERMITIAN_TOL,
    MAJORIZATION_TOL,
    NORM_TOL,
    PSD_TOL,
    SCHMIDT_TOL,
    SPECTRAL_FLOOR,
    TRACE_TOL,
    UNITARY_TOL,
)
from .exceptions import (
    BadSubsystemIndexError,
    ConvergenceError,
    DimMismatchError,
    NotNormalizedError,
    NotPositiveError,
    NotSquareError,
    TraceZeroError,
)

logger = logging.getLogger(__name__)

ComplexMatrix = NDArray[np.complex128]
Unitary = NDArray[np.complex128]
Spectrum = NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Trace-one positive semidefinite matrix with a subsystem split.

    Build it with :func:`make_density`, which validates and normalizes.
    """

    matrix: ComplexMatrix
    dims: tuple[int, ...]

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def dagger(self) -> ComplexMatrix:
        return self.matrix.conj().T

    def __repr__(self) -> str:
        return f'DensityOperator(dims={self.dims})'


@dataclass(frozen=True)
class SchmidtDecomposition:
    coefficients: Spectrum
    basis_a: ComplexMatrix
    basis_b: ComplexMatrix

    @property
    def schmidt_number(self) -> int:
        return len(self.coefficients)

    def reconstruct(self) -> NDArray[np.complex128]:
        """Rebuild the state vector from its Schmidt data

        :return: vector of length N^A N^B
        """
        n = self.schmidt_number
        weights = np.sqrt(self.coefficients)
        matrix = (self.basis_a[:, :n] * weights) @ self.basis_b[:, :n].T
        return matrix.reshape(-1)


def make_density(matrix: ArrayLike, dims: Sequence[int] | None = None) -> DensityOperator:
    """Validate a matrix as a quantum state.

    The matrix is hermitized as (ρ+ρ†)/2, eigenvalues in [-PSD_TOL, 0) are clipped
    to zero and the result is renormalized to unit trace.

    :param matrix: square complex matrix
    :param dims: subsystem dimensions, product must equal the matrix size. Defaults to one system.

    :return: validated state

    :raise NotSquareError: matrix is not square
    :raise DimMismatchError: product of dims differs from the matrix size
    :raise NotPositiveError: an eigenvalue is below -PSD_TOL
    :raise TraceZeroError: trace vanishes
    """
    rho = np.array(matrix, dtype=np.complex128, copy=True)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 1:
        raise NotSquareError(f'expected a square matrix, got shape {rho.shape}')

    size = rho.shape[0]
    dims_ = (size,) if dims is None else tuple(int(d) for d in dims)
    if any(d < 1 for d in dims_) or math.prod(dims_) != size:
        raise DimMismatchError(f'dims {dims_} do not multiply to {size}')

    deviation = float(np.max(np.abs(rho - rho.conj().T)))
    if deviation > HERMITIAN_TOL:
        logger.debug('hermitizing matrix with max deviation %.3e', deviation)
    rho = (rho + rho.conj().T) / 2

    trace = float(np.real(np.trace(rho)))
    if abs(trace) <= TRACE_TOL:
        raise TraceZeroError('matrix has zero trace')
    if trace < 0:
        raise NotPositiveError(f'matrix has negative trace {trace}')

    values, vectors = _eigh(rho)
    smallest = float(values[0]) / trace
    if smallest < -PSD_TOL:
        raise NotPositiveError(f'eigenvalue {smallest:.3e} is below -{PSD_TOL}')
    if smallest < 0:
        values = np.clip(values, 0.0, None)
        rho = (vectors * values) @ vectors.conj().T
        trace = float(np.sum(values))

    return DensityOperator(matrix=rho / trace, dims=dims_)


def pure_density(psi: ArrayLike, dims: Sequence[int] | None = None) -> DensityOperator:
    """Projector onto a normalized state vector

    :raise NotNormalizedError: the vector does not have unit norm
    """
    vector = np.asarray(psi, dtype=np.complex128).reshape(-1)
    norm = float(np.linalg.norm(vector))
    if abs(norm - 1.0) > NORM_TOL:
        raise NotNormalizedError(f'state vector has norm {norm}')
    return make_density(np.outer(vector, vector.conj()), dims)


def maximally_mixed(dims: Sequence[int]) -> DensityOperator:
    size = math.prod(dims)
    return make_density(np.eye(size) / size, dims)


def tensor(*states: DensityOperator) -> DensityOperator:
    """Kronecker product of states, dims concatenated

    :return: joint state
    """
    matrix = reduce(np.kron, (state.matrix for state in states))
    dims = tuple(d for state in states for d in state.dims)
    return DensityOperator(matrix=matrix, dims=dims)


def _check_subsystems(dims: tuple[int, ...], indices: Sequence[int]) -> tuple[int, ...]:
    indices_ = tuple(int(i) for i in indices)
    if not indices_:
        raise BadSubsystemIndexError('at least one subsystem must be selected')
    if any(i < 0 or i >= len(dims) for i in indices_) or len(set(indices_)) != len(indices_):
        raise BadSubsystemIndexError(f'bad subsystem indices {indices_} for dims {dims}')
    return indices_


def partial_trace(rho: DensityOperator, keep: Sequence[int]) -> DensityOperator:
    """Reduced state on the kept subsystems (in their original order)

    :param rho: state
    :param keep: indices of subsystems to keep

    :return: reduced state

    :raise BadSubsystemIndexError: keep is empty or contains invalid indices
    """
    keep_ = tuple(sorted(_check_subsystems(rho.dims, keep)))
    n = len(rho.dims)
    traced = [i for i in range(n) if i not in keep_]
    tensor_ = rho.matrix.reshape(rho.dims + rho.dims)
    for offset, index in enumerate(traced):
        axis = index - offset
        tensor_ = np.trace(tensor_, axis1=axis, axis2=axis + n - offset)
    kept_dims = tuple(rho.dims[i] for i in keep_)
    size = math.prod(kept_dims)
    return DensityOperator(matrix=tensor_.reshape(size, size), dims=kept_dims)


def permute_subsystems(rho: DensityOperator, order: Sequence[int]) -> DensityOperator:
    """Reorder subsystems, ``order[k]`` is the old index of the new k-th subsystem"""
    order_ = _check_subsystems(rho.dims, order)
    if len(order_) != len(rho.dims):
        raise BadSubsystemIndexError(f'order {order_} is not a permutation of {len(rho.dims)} subsystems')
    n = len(order_)
    tensor_ = rho.matrix.reshape(rho.dims + rho.dims)
    tensor_ = tensor_.transpose(order_ + tuple(i + n for i in order_))
    dims = tuple(rho.dims[i] for i in order_)
    return DensityOperator(matrix=tensor_.reshape(rho.dim, rho.dim), dims=dims)


def bipartition(rho: DensityOperator, block_a: Sequence[int]) -> DensityOperator:
    """Regroup a multipartite state into two blocks.

    Subsystems listed in block_a form the first party, the rest (in order) form the second.

    :return: state with dims (N^A, N^B)
    """
    block_a_ = _check_subsystems(rho.dims, block_a)
    block_b = tuple(i for i in range(len(rho.dims)) if i not in block_a_)
    if not block_b:
        raise BadSubsystemIndexError('the second block would be empty')
    permuted = permute_subsystems(rho, block_a_ + block_b)
    dim_a = math.prod(rho.dims[i] for i in block_a_)
    return DensityOperator(matrix=permuted.matrix, dims=(dim_a, rho.dim // dim_a))


def local_unitary(rho: DensityOperator, *unitaries: ArrayLike) -> DensityOperator:
    """Conjugate by a product of local unitaries, one per subsystem"""
    if len(unitaries) != len(rho.dims):
        raise DimMismatchError(f'{len(unitaries)} unitaries for {len(rho.dims)} subsystems')
    u = reduce(np.kron, (np.asarray(v, dtype=np.complex128) for v in unitaries))
    if u.shape != rho.matrix.shape:
        raise DimMismatchError(f'unitary of shape {u.shape} for state of dimension {rho.dim}')
    return DensityOperator(matrix=u @ rho.matrix @ u.conj().T, dims=rho.dims)


def _eigh(matrix: ComplexMatrix) -> tuple[NDArray[np.float64], ComplexMatrix]:
    try:
        return np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as err:
        raise ConvergenceError(f'eigendecomposition did not converge: {err}') from err


def eig_hermitian(rho: DensityOperator) -> tuple[Spectrum, Unitary]:
    """Spectral decomposition with eigenvalues in decreasing order

    :return: (spectrum, unitary whose columns are the eigenvectors)

    :raise ConvergenceError: the eigensolver failed
    """
    values, vectors = _eigh(rho.matrix)
    values = np.clip(values[::-1], 0.0, None)
    return values, vectors[:, ::-1]


def spectrum(matrix: ArrayLike) -> Spectrum:
    """Decreasing, floored eigenvalues of a Hermitian matrix (or a stack of them)

    Values at or below SPECTRAL_FLOOR are set to exactly zero.
    """
    values = np.linalg.eigvalsh(np.asarray(matrix))[..., ::-1]
    return np.where(values > SPECTRAL_FLOOR, values, 0.0)


def to_spectrum(values: ArrayLike) -> Spectrum:
    """Sort a probability vector in decreasing order and clip negatives"""
    return np.sort(np.clip(np.asarray(values, dtype=np.float64), 0.0, None))[::-1]


def hs_norm_sq(a: ArrayLike) -> float:
    """Squared Hilbert-Schmidt norm Tr(A†A)"""
    matrix = np.asarray(a)
    return float(np.real(np.vdot(matrix, matrix)))


def is_unitary(u: ArrayLike, tol: float = UNITARY_TOL) -> bool:
    matrix = np.asarray(u)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return bool(np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0]))) <= tol)


def schmidt(psi: ArrayLike, dims: Sequence[int]) -> SchmidtDecomposition:
    """Schmidt decomposition of a bipartite pure state.

    Both bases are completed to full orthonormal bases; the first
    ``schmidt_number`` columns carry the decomposition.

    :param psi: unit vector of length N^A N^B
    :param dims: (N^A, N^B)

    :return: Schmidt data

    :raise NotNormalizedError: psi is not a unit vector
    :raise DimMismatchError: dims do not match the vector length
    """
    vector = np.asarray(psi, dtype=np.complex128).reshape(-1)
    dims_ = tuple(int(d) for d in dims)
    if len(dims_) != 2 or math.prod(dims_) != vector.size:
        raise DimMismatchError(f'dims {dims_} do not match a vector of length {vector.size}')
    norm = float(np.linalg.norm(vector))
    if abs(norm - 1.0) > NORM_TOL:
        raise NotNormalizedError(f'state vector has norm {norm}')

    try:
        u, singular, vh = np.linalg.svd(vector.reshape(dims_), full_matrices=True)
    except np.linalg.LinAlgError as err:
        raise ConvergenceError(f'SVD did not converge: {err}') from err
    coefficients = singular ** 2
    n = int(np.count_nonzero(coefficients > SCHMIDT_TOL))
    kept = coefficients[:n] / np.sum(coefficients[:n])
    return SchmidtDecomposition(coefficients=kept, basis_a=u, basis_b=vh.T)


def majorizes(p: ArrayLike, q_vec: ArrayLike, tol: float = MAJORIZATION_TOL) -> bool:
    """Check ``p ≺ q_vec``: every partial sum of q_vec dominates the one of p.

    Vectors are sorted decreasingly and the shorter one is completed with zeros.

    :return: True if p is majorized by q_vec
    """
    p_ = to_spectrum(p)
    q_ = to_spectrum(q_vec)
    length = max(p_.size, q_.size)
    p_ = np.pad(p_, (0, length - p_.size))
    q_ = np.pad(q_, (0, length - q_.size))
    if abs(p_.sum() - q_.sum()) > tol:
        return False
    return bool(np.all(np.cumsum(p_) <= np.cumsum(q_) + tol))
