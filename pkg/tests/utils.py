import math

import numpy as np

from entropic_qc.ensembles import random_density, task_rng
from entropic_qc.entropy import EntropicIndices
from entropic_qc.linalg import DensityOperator, make_density, pure_density, tensor

INDEX_GRID = (
    EntropicIndices(1.0, 1.0),
    EntropicIndices(2.0, 1.0),
    EntropicIndices(0.5, 1.0),
    EntropicIndices(2.0, 0.0),
    EntropicIndices(3.0, 0.5),
)


def bell_state() -> DensityOperator:
    return pure_density(np.array([1, 0, 0, 1]) / math.sqrt(2), (2, 2))


def plus_state() -> DensityOperator:
    return pure_density(np.array([1, 1]) / math.sqrt(2))


def ket_state(*bits: int) -> DensityOperator:
    """Computational basis state |b_1 b_2 ...⟩ of qubits"""
    vector = np.zeros(2 ** len(bits))
    vector[int(''.join(str(b) for b in bits), 2)] = 1.0
    return pure_density(vector, (2,) * len(bits))


def diagonal_state(*values: float) -> DensityOperator:
    return make_density(np.diag(values))


def random_state(seed: int, dims: tuple[int, ...] = (2, 2)) -> DensityOperator:
    return random_density(math.prod(dims), task_rng(seed), dims=dims)


def random_product(seed: int, dims: tuple[int, int] = (2, 2)) -> DensityOperator:
    rng = task_rng(seed)
    return tensor(random_density(dims[0], rng), random_density(dims[1], rng))


def projector_set(unitary: np.ndarray) -> np.ndarray:
    """Projectors of a basis in a canonical order, for comparing bases up to phases and permutations"""
    projectors = np.einsum('ai,bi->iab', unitary, unitary.conj())
    keys = [tuple(np.round(np.real(np.diag(p)), 8)) + tuple(np.round(np.ascontiguousarray(p).reshape(-1).view(float), 8)) for p in projectors]
    order = sorted(range(len(keys)), key=lambda k: keys[k])
    return projectors[order]
