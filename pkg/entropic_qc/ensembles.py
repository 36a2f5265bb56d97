"""Seeded random ensembles: Haar unitaries, Hilbert-Schmidt states, pure states"""
import math
from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray

from .linalg import DensityOperator, Unitary, make_density


def task_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one task of a seeded run.

    The stream depends only on (seed, key), never on execution order.

    :param seed: master seed of the run
    :param key: task coordinates, e.g. (state index,) or (state index, restart index)
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)))


def ginibre(rows: int, cols: int, rng: np.random.Generator) -> NDArray[np.complex128]:
    """Matrix with i.i.d. standard complex Gaussian entries"""
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / math.sqrt(2)


def haar_unitary(n: int, rng: np.random.Generator) -> Unitary:
    """Haar-distributed unitary of dimension n.

    QR of a Ginibre matrix with the phases fixed so that R has a positive real diagonal.
    """
    if n < 1:
        raise ValueError(f'dimension must be positive, got {n}')
    q, r = np.linalg.qr(ginibre(n, n, rng))
    diagonal = np.diag(r)
    return q * (diagonal / np.abs(diagonal))


def random_density(n: int, rng: np.random.Generator, dims: Sequence[int] | None = None) -> DensityOperator:
    """State from the Hilbert-Schmidt induced measure, GG†/Tr(GG†)

    :param n: total dimension
    :param dims: optional subsystem split of n
    """
    if n < 1:
        raise ValueError(f'dimension must be positive, got {n}')
    g = ginibre(n, n, rng)
    return make_density(g @ g.conj().T, dims)


def random_pure(dims: Sequence[int], rng: np.random.Generator) -> NDArray[np.complex128]:
    """Normalized complex Gaussian vector on the product space of dims"""
    size = math.prod(dims)
    vector = ginibre(size, 1, rng).reshape(-1)
    return vector / np.linalg.norm(vector)


def random_probabilities(n: int, rng: np.random.Generator) -> NDArray[np.float64]:
    """Uniform point of the probability simplex"""
    return rng.dirichlet(np.ones(n))


def random_cq(dims: Sequence[int], rng: np.random.Generator) -> DensityOperator:
    """Σ p_i |i⟩⟨i| ⊗ ρ^{B|i} with |i⟩ a Haar-random basis of A, undisturbed by that measurement on A"""
    n_a, n_b = (int(d) for d in dims)
    u = haar_unitary(n_a, rng)
    weights = random_probabilities(n_a, rng)
    matrix = sum(
        weights[i] * np.kron(np.outer(u[:, i], u[:, i].conj()), random_density(n_b, rng).matrix)
        for i in range(n_a)
    )
    return make_density(matrix, (n_a, n_b))


def random_cc(dims: Sequence[int], rng: np.random.Generator) -> DensityOperator:
    """Σ p_ij |i⟩⟨i| ⊗ |j⟩⟨j| in Haar-random local bases"""
    n_a, n_b = (int(d) for d in dims)
    u = haar_unitary(n_a, rng)
    v = haar_unitary(n_b, rng)
    weights = random_probabilities(n_a * n_b, rng)
    w = np.kron(u, v)
    return make_density((w * weights) @ w.conj().T, (n_a, n_b))
