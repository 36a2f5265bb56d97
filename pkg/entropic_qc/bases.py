"""Angle coordinates for measurement bases.

A basis on C^N is the unitary ``exp(i Σ θ_k G_k)`` with ``G_k`` the N²-1
generalized Gell-Mann matrices (Hermitian, traceless, ``Tr G_j G_k = 2δ_jk``).
Column phases and permutations are not fixed, they leave the measurement unchanged.
"""
from functools import lru_cache

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from .exceptions import BadLengthError, DimMismatchError
from .linalg import Unitary, is_unitary
from .measurement import ProjectiveBasis


@lru_cache(maxsize=16)
def gell_mann(n: int) -> NDArray[np.complex128]:
    """Generalized Gell-Mann matrices of dimension n, shape (n²-1, n, n)

    Order: symmetric pairs, antisymmetric pairs, then the diagonal ones.
    """
    if n < 1:
        raise ValueError(f'dimension must be positive, got {n}')
    generators = []
    for j in range(n):
        for k in range(j + 1, n):
            g = np.zeros((n, n), dtype=np.complex128)
            g[j, k] = g[k, j] = 1.0
            generators.append(g)
    for j in range(n):
        for k in range(j + 1, n):
            g = np.zeros((n, n), dtype=np.complex128)
            g[j, k] = -1j
            g[k, j] = 1j
            generators.append(g)
    for level in range(1, n):
        diagonal = np.zeros(n)
        diagonal[:level] = 1.0
        diagonal[level] = -level
        generators.append(np.diag(diagonal * np.sqrt(2.0 / (level * (level + 1)))).astype(np.complex128))
    out = np.array(generators, dtype=np.complex128).reshape(n * n - 1, n, n)
    out.setflags(write=False)
    return out


def angle_count(n: int) -> int:
    return n * n - 1


def dim_from_count(count: int) -> int:
    """Inverse of :func:`angle_count`

    :raise BadLengthError: count is not of the form N²-1
    """
    n = int(round(np.sqrt(count + 1)))
    if n * n - 1 != count:
        raise BadLengthError(f'{count} angles do not parametrize any dimension')
    return n


def generator(angles: ArrayLike, n: int) -> NDArray[np.complex128]:
    """Hermitian traceless matrix Σ θ_k G_k

    :raise BadLengthError: len(angles) != n²-1
    """
    theta = np.asarray(angles, dtype=np.float64).reshape(-1)
    if theta.size != angle_count(n):
        raise BadLengthError(f'expected {angle_count(n)} angles for dimension {n}, got {theta.size}')
    return np.tensordot(theta, gell_mann(n), axes=1)


def decode_unitary(angles: ArrayLike, n: int) -> Unitary:
    """exp(i Σ θ_k G_k) as a plain matrix, exponentiated in the eigenbasis of the generator"""
    h = generator(angles, n)
    if n == 1:
        return np.ones((1, 1), dtype=np.complex128)
    values, vectors = np.linalg.eigh(h)
    return (vectors * np.exp(1j * values)) @ vectors.conj().T


def decode_basis(angles: ArrayLike, n: int) -> ProjectiveBasis:
    """Measurement basis with the given angle coordinates

    :param angles: real vector of length n²-1
    :param n: dimension of the measured side

    :return: orthonormal basis

    :raise BadLengthError: wrong number of angles
    """
    return ProjectiveBasis(decode_unitary(angles, n))


def encode_basis(basis: ProjectiveBasis | ArrayLike) -> NDArray[np.float64]:
    """Angle coordinates of a basis, up to its global phase.

    The unitary is diagonalized by a complex Schur form, its eigenphases give
    the Hermitian logarithm, which is then projected onto the generators.

    :raise DimMismatchError: the matrix is not unitary
    """
    u = basis.unitary if isinstance(basis, ProjectiveBasis) else np.asarray(basis, dtype=np.complex128)
    if not is_unitary(u):
        raise DimMismatchError('only unitaries have angle coordinates')
    n = u.shape[0]
    if n == 1:
        return np.zeros(0)
    triangular, vectors = scipy.linalg.schur(u, output='complex')
    phases = np.angle(np.diag(triangular))
    log_u = (vectors * phases) @ vectors.conj().T
    return np.real(np.einsum('ab,kba->k', log_u, gell_mann(n))) / 2


def bloch_basis(theta: ArrayLike, phi: ArrayLike) -> NDArray[np.complex128]:
    """Qubit bases |0'⟩ = (cos θ/2, e^{iφ} sin θ/2), |1'⟩ = (-e^{-iφ} sin θ/2, cos θ/2)

    theta and phi broadcast; the result has shape (..., 2, 2) with the kets as columns.
    """
    theta_, phi_ = np.broadcast_arrays(np.asarray(theta, dtype=np.float64), np.asarray(phi, dtype=np.float64))
    cos = np.cos(theta_ / 2)
    sin = np.sin(theta_ / 2)
    phase = np.exp(1j * phi_)
    out = np.empty(theta_.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = cos
    out[..., 1, 0] = phase * sin
    out[..., 0, 1] = -phase.conj() * sin
    out[..., 1, 1] = cos
    return out
