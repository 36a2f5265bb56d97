"""Quantum correlation measures: disturbance minimized over local measurements.

``D^K(ρ) = min over Π^K of (S(Π^K(ρ)) - S(ρ)) / (Tr ρ^q)^s`` for K ∈ {A, B, AB}.
The search is a multistart simplex descent over the angle coordinates of
:mod:`entropic_qc.bases`; the qubit grid oracle gives an independent upper bound.
"""
import logging
import math
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.optimize
from numpy.typing import NDArray

from .bases import angle_count, bloch_basis, decode_basis, decode_unitary, dim_from_count, encode_basis
from .config import INEQUALITY_TOL
from .ensembles import haar_unitary, task_rng
from .entropy import (
    EntropicIndices,
    disturbance_from_spectra,
    purity_ratio_spectra,
    rescale_factor,
    unified_entropy,
    unified_entropy_spectrum,
)
from .exceptions import BadParameterError, DimMismatchError, OptimizerDivergenceError
from .linalg import DensityOperator, Spectrum, partial_trace, spectrum
from .measurement import LocalMeasurement, ProjectiveBasis, Side, apply_local, measured_spectra

logger = logging.getLogger(__name__)

SIMPLEX_STEP = 0.25
GRID_REFINE_POINTS = 33
GRID_JOINT_REFINE_POINTS = 17
TRIANGLE_RECONCILE_PASSES = 3

_Bases = NDArray[np.complex128]


@dataclass(frozen=True)
class MeasureOptions:
    """Settings of the multistart search

    :param restarts: number of Haar-random starting points
    :param seed: master seed, restart r draws from ``task_rng(seed, r)``
    :param tol: simplex tolerance on the objective
    :param max_iter: iteration cap per start
    :param rescaled: minimize the purity-rescaled disturbance, otherwise the bare entropy gain
    :param refine: one alternating pass over the two bases after a bilocal search
    :param warm_starts: extra deterministic starting measurements
    :param strict: raise when no start converged instead of warning
    :param agree: stop once this many converged starts reached the running minimum, 0 runs every start
    :param agree_tol: distance from the running minimum that still counts as agreeing
    """

    restarts: int = 32
    seed: int = 0
    tol: float = 1e-10
    max_iter: int = 2000
    rescaled: bool = True
    refine: bool = True
    warm_starts: tuple[LocalMeasurement, ...] = ()
    strict: bool = False
    agree: int = 3
    agree_tol: float = 1e-8

    def __post_init__(self) -> None:
        if self.restarts < 0:
            raise BadParameterError(f'restarts must be nonnegative, got {self.restarts}')
        if not self.tol > 0:
            raise BadParameterError(f'tol must be positive, got {self.tol}')
        if self.max_iter < 1:
            raise BadParameterError(f'max_iter must be positive, got {self.max_iter}')
        if self.agree < 0:
            raise BadParameterError(f'agree must be nonnegative, got {self.agree}')


@dataclass(frozen=True)
class MeasurementParams:
    """Angle coordinates of a local measurement, empty on unmeasured sides"""

    side: Side
    angles_a: tuple[float, ...] = ()
    angles_b: tuple[float, ...] = ()

    @classmethod
    def from_vector(cls, side: Side, vector: NDArray[np.float64], count_a: int) -> 'MeasurementParams':
        return cls(
            side=side,
            angles_a=tuple(float(v) for v in vector[:count_a]),
            angles_b=tuple(float(v) for v in vector[count_a:]),
        )

    @property
    def vector(self) -> NDArray[np.float64]:
        return np.array(self.angles_a + self.angles_b, dtype=np.float64)

    def measurement(self) -> LocalMeasurement:
        """Decode both angle vectors into a :class:`LocalMeasurement`"""
        basis_a = decode_basis(self.angles_a, dim_from_count(len(self.angles_a))) if self.side.measures_a else None
        basis_b = decode_basis(self.angles_b, dim_from_count(len(self.angles_b))) if self.side.measures_b else None
        return LocalMeasurement(side=self.side, basis_a=basis_a, basis_b=basis_b)


@dataclass(frozen=True)
class CorrelationResult:
    value: float
    argmin: MeasurementParams
    restarts_used: int
    iterations: int
    spread: float
    converged: bool

    @property
    def measurement(self) -> LocalMeasurement:
        return self.argmin.measurement()


class _Objective:
    """Disturbance as a function of the stacked angle vector"""

    def __init__(self, rho: DensityOperator, side: Side, idx: EntropicIndices, rescaled: bool) -> None:
        self.rho = rho
        self.side = side
        self.idx = idx
        self.rescaled = rescaled
        self.before = spectrum(rho.matrix)
        self.dim_a, self.dim_b = rho.dims
        self.count_a = angle_count(self.dim_a) if side.measures_a else 0
        self.count_b = angle_count(self.dim_b) if side.measures_b else 0

    @property
    def size(self) -> int:
        return self.count_a + self.count_b

    def __call__(self, x: NDArray[np.float64]) -> float:
        ua = decode_unitary(x[:self.count_a], self.dim_a) if self.side.measures_a else None
        ub = decode_unitary(x[self.count_a:], self.dim_b) if self.side.measures_b else None
        after = measured_spectra(self.rho, self.side, ua, ub)
        return float(disturbance_from_spectra(self.before, after, self.idx, self.rescaled))

    def encode(self, m: LocalMeasurement) -> NDArray[np.float64]:
        parts = []
        if self.side.measures_a:
            parts.append(encode_basis(m.basis_a) if m.basis_a is not None else np.zeros(self.count_a))
        if self.side.measures_b:
            parts.append(encode_basis(m.basis_b) if m.basis_b is not None else np.zeros(self.count_b))
        return np.concatenate(parts) if parts else np.zeros(0)


@dataclass
class _Descent:
    x: NDArray[np.float64]
    value: float
    iterations: int
    success: bool


def _simplex(func: Callable[[NDArray[np.float64]], float], x0: NDArray[np.float64], opts: MeasureOptions) -> _Descent:
    if x0.size == 0:
        return _Descent(x=x0, value=func(x0), iterations=0, success=True)
    initial_simplex = np.vstack([x0, x0 + SIMPLEX_STEP * np.eye(x0.size)])
    res = scipy.optimize.minimize(
        func,
        x0,
        method='Nelder-Mead',
        options={
            'maxiter': opts.max_iter,
            'fatol': opts.tol,
            'xatol': math.sqrt(opts.tol),
            'adaptive': True,
            'initial_simplex': initial_simplex,
        },
    )
    return _Descent(x=np.asarray(res.x, dtype=np.float64), value=float(res.fun), iterations=int(res.nit),
                    success=bool(res.success))


def _starting_points(objective: _Objective, opts: MeasureOptions) -> Iterator[NDArray[np.float64]]:
    rho = objective.rho
    eigen_seed = LocalMeasurement(
        side=Side.AB,
        basis_a=ProjectiveBasis.eigenbasis(partial_trace(rho, [0])),
        basis_b=ProjectiveBasis.eigenbasis(partial_trace(rho, [1])),
    )
    for m in opts.warm_starts:
        yield objective.encode(m)
    yield objective.encode(eigen_seed)
    for restart in range(opts.restarts):
        rng = task_rng(opts.seed, restart)
        ua = haar_unitary(objective.dim_a, rng)
        ub = haar_unitary(objective.dim_b, rng)
        yield objective.encode(LocalMeasurement(Side.AB, ProjectiveBasis(ua), ProjectiveBasis(ub)))


def _alternate(objective: _Objective, best: _Descent, opts: MeasureOptions) -> _Descent:
    """Descend over one basis with the other fixed, A first then B"""
    count_a = objective.count_a
    x = best.x.copy()
    iterations = 0
    for block in (slice(0, count_a), slice(count_a, objective.size)):
        def partial(y: NDArray[np.float64], block: slice = block) -> float:
            z = x.copy()
            z[block] = y
            return objective(z)

        step = _simplex(partial, x[block].copy(), opts)
        iterations += step.iterations
        if step.value < best.value:
            x[block] = step.x
            best = _Descent(x=x.copy(), value=step.value, iterations=best.iterations, success=best.success)
    return _Descent(x=best.x, value=best.value, iterations=best.iterations + iterations, success=best.success)


def measure_correlations(
    rho: DensityOperator,
    side: Side | str,
    idx: EntropicIndices,
    opts: MeasureOptions | None = None,
) -> CorrelationResult:
    """Minimal disturbance over local rank-one projective measurements on the given side.

    Starting points: the ``opts.warm_starts``, the eigenbases of both reduced states,
    then ``opts.restarts`` Haar-random bases. The first start reaching the lowest value wins.
    The search stops early once ``opts.agree`` converged starts sit within ``opts.agree_tol``
    of the running minimum.

    :param rho: bipartite state
    :param side: A, B or AB
    :param idx: entropic indices
    :param opts: search settings

    :return: minimum with its measurement and search diagnostics

    :raise DimMismatchError: the state is not bipartite
    :raise OptimizerDivergenceError: ``opts.strict`` and no start converged
    """
    opts = opts or MeasureOptions()
    side_ = Side(side)
    if len(rho.dims) != 2:
        raise DimMismatchError(f'correlations need a bipartite state, got dims {rho.dims}')
    objective = _Objective(rho, side_, idx, opts.rescaled)

    best: _Descent | None = None
    converged_values = []
    all_values = []
    iterations = 0
    for number, x0 in enumerate(_starting_points(objective, opts)):
        descent = _simplex(objective, x0, opts)
        iterations += descent.iterations
        all_values.append(descent.value)
        if descent.success:
            converged_values.append(descent.value)
        logger.debug('start %d on side %s: value %.12g after %d iterations (converged: %s)',
                     number, side_.value, descent.value, descent.iterations, descent.success)
        if best is None or descent.value < best.value:
            best = descent
        agreeing = sum(1 for value in converged_values if value <= best.value + opts.agree_tol)
        if opts.agree and agreeing >= opts.agree:
            logger.debug('%d starts agree on side %s, stopping after %d', agreeing, side_.value, number + 1)
            break
    assert best is not None

    if opts.refine and side_ is Side.AB and objective.count_a and objective.count_b:
        refined = _alternate(objective, best, opts)
        iterations += refined.iterations - best.iterations
        best = refined

    converged = bool(converged_values)
    values = converged_values if converged else all_values
    result = CorrelationResult(
        value=best.value,
        argmin=MeasurementParams.from_vector(side_, best.x, objective.count_a),
        restarts_used=len(all_values),
        iterations=iterations,
        spread=float(max(values) - min(values)),
        converged=converged,
    )
    if not converged:
        message = f'no start converged on side {side_.value} for {idx}, best value {best.value:.12g}'
        if opts.strict:
            raise OptimizerDivergenceError(message, result)
        logger.warning(message)
    return result


def _grid_values(rho: DensityOperator, side: Side, idx: EntropicIndices, before: Spectrum,
                 ua: NDArray[np.complex128] | None, ub: NDArray[np.complex128] | None) -> NDArray[np.float64]:
    return disturbance_from_spectra(before, measured_spectra(rho, side, ua, ub), idx)


def _angle_grid(n_theta: int, n_phi: int) -> tuple[NDArray[np.float64], NDArray[np.float64], float, float]:
    theta = np.linspace(0.0, np.pi, n_theta)
    phi = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    t, f = np.meshgrid(theta, phi, indexing='ij')
    return t.reshape(-1), f.reshape(-1), np.pi / max(n_theta - 1, 1), 2 * np.pi / n_phi


def _local_grid(theta: float, phi: float, d_theta: float, d_phi: float,
                points: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    t, f = np.meshgrid(
        np.linspace(theta - d_theta, theta + d_theta, points),
        np.linspace(phi - d_phi, phi + d_phi, points),
        indexing='ij',
    )
    return t.reshape(-1), f.reshape(-1)


def grid_oracle_qubit(
    rho: DensityOperator,
    side: Side | str,
    idx: EntropicIndices,
    resolution: tuple[int, int] = (64, 128),
) -> float:
    """Brute-force minimum over Bloch-sphere grids, refined once around the best cell.

    Unilocal sides scan a (θ, φ) grid of the given resolution. The bilocal side scans
    the product of two grids at a quarter of the resolution before its refinement.
    Every evaluated point is an actual measurement, so the result upper-bounds the minimum.

    :raise DimMismatchError: not a two-qubit state
    """
    side_ = Side(side)
    if rho.dims != (2, 2):
        raise DimMismatchError(f'the grid oracle needs a two-qubit state, got dims {rho.dims}')
    n_theta, n_phi = resolution
    before = spectrum(rho.matrix)

    if side_ is not Side.AB:
        theta, phi, d_theta, d_phi = _angle_grid(n_theta, n_phi)
        values = _grid_values(rho, side_, idx, before, *_single(side_, bloch_basis(theta, phi)))
        k = int(np.argmin(values))
        theta, phi = _local_grid(theta[k], phi[k], d_theta, d_phi, GRID_REFINE_POINTS)
        refined = _grid_values(rho, side_, idx, before, *_single(side_, bloch_basis(theta, phi)))
        return float(min(values[k], np.min(refined)))

    theta, phi, d_theta, d_phi = _angle_grid(max(n_theta // 4, 2), max(n_phi // 4, 2))
    bases = bloch_basis(theta, phi)
    values = _grid_values(rho, side_, idx, before, bases[:, None], bases[None, :])
    i, j = np.unravel_index(int(np.argmin(values)), values.shape)
    coarse = float(values[i, j])
    theta_a, phi_a = _local_grid(theta[i], phi[i], d_theta, d_phi, GRID_JOINT_REFINE_POINTS)
    theta_b, phi_b = _local_grid(theta[j], phi[j], d_theta, d_phi, GRID_JOINT_REFINE_POINTS)
    refined = _grid_values(rho, side_, idx, before,
                           bloch_basis(theta_a, phi_a)[:, None], bloch_basis(theta_b, phi_b)[None, :])
    return float(min(coarse, np.min(refined)))


def _single(side: Side, bases: _Bases) -> tuple[_Bases | None, _Bases | None]:
    return (bases, None) if side is Side.A else (None, bases)


def entanglement_lower_bound(rho: DensityOperator, idx: EntropicIndices) -> float:
    """max over L of (S(ρ^L) - S(ρ)) / (Tr ρ^q)^s, negative for many separable states

    :raise DimMismatchError: the state is not bipartite
    """
    if len(rho.dims) != 2:
        raise DimMismatchError(f'the bound needs a bipartite state, got dims {rho.dims}')
    values = spectrum(rho.matrix)
    joint = float(unified_entropy_spectrum(values, idx))
    rescale = float(rescale_factor(values, idx))
    reduced = max(unified_entropy(partial_trace(rho, [k]), idx) for k in (0, 1))
    return (reduced - joint) / rescale


@dataclass(frozen=True)
class SequentialTerms:
    """Bilocal and unilocal disturbances of one pair of bases.

    ``d_b_after_a`` is D^{Π^B} evaluated on Π^A(ρ), ``p_a`` the purity ratio of Π^A.
    """

    d_ab: float
    d_a: float
    d_b: float
    p_a: float
    p_b: float
    d_a_after_b: float
    d_b_after_a: float

    @property
    def delta(self) -> float:
        """D^{Π^AB} - P_{Π^B} D^{Π^A}(Π^B ρ) - P_{Π^A} D^{Π^B}(Π^A ρ)"""
        return self.d_ab - self.p_b * self.d_a_after_b - self.p_a * self.d_b_after_a


def sequential_terms(rho: DensityOperator, m: LocalMeasurement, idx: EntropicIndices) -> SequentialTerms:
    """All terms of the bilocal decomposition for the bases of a bilocal measurement"""
    if m.side is not Side.AB:
        raise BadParameterError(f'sequential terms need a bilocal measurement, got side {m.side.value}')
    m.check_dims(rho.dims)
    ua, ub = m.unitary_a, m.unitary_b
    before = spectrum(rho.matrix)
    after_a = measured_spectra(rho, Side.A, ua, None)
    after_b = measured_spectra(rho, Side.B, None, ub)
    after_ab = measured_spectra(rho, Side.AB, ua, ub)
    return SequentialTerms(
        d_ab=float(disturbance_from_spectra(before, after_ab, idx)),
        d_a=float(disturbance_from_spectra(before, after_a, idx)),
        d_b=float(disturbance_from_spectra(before, after_b, idx)),
        p_a=float(purity_ratio_spectra(before, after_a, idx)),
        p_b=float(purity_ratio_spectra(before, after_b, idx)),
        d_a_after_b=float(disturbance_from_spectra(after_b, after_ab, idx)),
        d_b_after_a=float(disturbance_from_spectra(after_a, after_ab, idx)),
    )


def bilocal_decomposition_check(
    rho: DensityOperator,
    basis_a: ProjectiveBasis,
    basis_b: ProjectiveBasis,
    idx: EntropicIndices,
) -> tuple[float, float]:
    """Residuals of D^{AB} = D^{Π^A} + P_{Π^A} D^{Π^B}(Π^A ρ) and of its B-first analogue.

    The measured states are built explicitly with :func:`apply_local`, so the check does not
    reuse the spectra shortcut of :func:`sequential_terms`.
    """
    bilocal = LocalMeasurement(Side.AB, basis_a, basis_b)
    bilocal.check_dims(rho.dims)
    before = spectrum(rho.matrix)
    d_ab = float(disturbance_from_spectra(before, spectrum(apply_local(rho, bilocal).matrix), idx))
    residuals = []
    for first, second in ((Side.A, Side.B), (Side.B, Side.A)):
        measured = apply_local(rho, bilocal.restricted(first))
        after_first = spectrum(measured.matrix)
        after_both = spectrum(apply_local(measured, bilocal.restricted(second)).matrix)
        d_first = float(disturbance_from_spectra(before, after_first, idx))
        p_first = float(purity_ratio_spectra(before, after_first, idx))
        d_second = float(disturbance_from_spectra(after_first, after_both, idx))
        residuals.append(abs(d_ab - d_first - p_first * d_second))
    return residuals[0], residuals[1]


@dataclass(frozen=True)
class TriangleReport:
    """The three minimized measures with the Δ quantities and the inequalities between them.

    Π₀ is the bilocal argmin factorized into its two local parts, Π₁ the pair of
    unilocal argmins.
    """

    m_a: float
    m_b: float
    m_ab: float
    delta0: float
    delta1: float
    lower_bound: float
    upper_bound: float
    optimal_a: LocalMeasurement = field(repr=False)
    optimal_b: LocalMeasurement = field(repr=False)
    optimal_ab: LocalMeasurement = field(repr=False)
    tol: float = INEQUALITY_TOL

    @property
    def triangle_holds(self) -> bool:
        """mA + mB ≥ mAB"""
        return self.m_a + self.m_b >= self.m_ab - self.tol

    @property
    def dadb_holds(self) -> bool:
        """mAB + Δ₀ ≥ mA + mB ≥ mAB + Δ₁"""
        total = self.m_a + self.m_b
        return self.m_ab + self.delta0 >= total - self.tol and total >= self.m_ab + self.delta1 - self.tol

    @property
    def ordering_holds(self) -> bool:
        """mAB ≥ max(mA, mB)"""
        return self.m_ab >= max(self.m_a, self.m_b) - self.tol

    @property
    def bounds_hold(self) -> bool:
        return self.lower_bound <= self.m_ab + self.tol and self.m_ab <= self.upper_bound + self.tol


def triangle_analysis(
    rho: DensityOperator,
    idx: EntropicIndices,
    opts: MeasureOptions | None = None,
) -> TriangleReport:
    """Minimize on all three sides and evaluate the Δ quantities and the sandwich bounds.

    The bilocal search is warm-started from the unilocal argmins. Afterwards the argmins are
    reconciled: each minimum is lowered to any value the other searches found for the same
    side, so mA ≤ D^{Π₀^A}, mB ≤ D^{Π₀^B} and mAB ≤ D^{Π₁^AB} hold by construction.
    """
    opts = opts or MeasureOptions()
    res_a = measure_correlations(rho, Side.A, idx, opts)
    res_b = measure_correlations(rho, Side.B, idx, opts)
    measure_a = res_a.measurement
    measure_b = res_b.measurement
    warm = LocalMeasurement(Side.AB, measure_a.basis_a, measure_b.basis_b)
    res_ab = measure_correlations(rho, Side.AB, idx, replace(opts, warm_starts=opts.warm_starts + (warm,)))
    m_a, m_b, m_ab = res_a.value, res_b.value, res_ab.value
    optimal_ab = res_ab.measurement

    terms0 = sequential_terms(rho, optimal_ab, idx)
    for _ in range(TRIANGLE_RECONCILE_PASSES):
        if terms0.d_a < m_a:
            m_a, measure_a = terms0.d_a, optimal_ab.restricted(Side.A)
        if terms0.d_b < m_b:
            m_b, measure_b = terms0.d_b, optimal_ab.restricted(Side.B)
        pair = LocalMeasurement(Side.AB, measure_a.basis_a, measure_b.basis_b)
        terms1 = sequential_terms(rho, pair, idx)
        if terms1.d_ab >= m_ab:
            break
        logger.debug('unilocal argmins improve the bilocal minimum from %.12g to %.12g', m_ab, terms1.d_ab)
        m_ab, optimal_ab = terms1.d_ab, pair
        terms0 = terms1

    return TriangleReport(
        m_a=m_a,
        m_b=m_b,
        m_ab=m_ab,
        delta0=terms0.delta,
        delta1=terms1.delta,
        lower_bound=max(m_a + terms0.p_a * terms0.d_b_after_a, m_b + terms0.p_b * terms0.d_a_after_b),
        upper_bound=min(m_a + terms1.p_a * terms1.d_b_after_a, m_b + terms1.p_b * terms1.d_a_after_b),
        optimal_a=measure_a,
        optimal_b=measure_b,
        optimal_ab=optimal_ab,
    )


@dataclass(frozen=True)
class _ProbeSpectra:
    before: Spectrum
    after_a: Spectrum
    after_b: Spectrum
    after_ab: Spectrum


def _probe_spectra(rho: DensityOperator, trials: int, seed: int) -> _ProbeSpectra:
    if len(rho.dims) != 2:
        raise DimMismatchError(f'the contractivity probe needs a bipartite state, got dims {rho.dims}')
    if trials < 1:
        raise BadParameterError(f'trials must be positive, got {trials}')
    rng = np.random.default_rng(seed)
    dim_a, dim_b = rho.dims
    ua = np.empty((trials, dim_a, dim_a), dtype=np.complex128)
    ub = np.empty((trials, dim_b, dim_b), dtype=np.complex128)
    for t in range(trials):
        ua[t] = haar_unitary(dim_a, rng)
        ub[t] = haar_unitary(dim_b, rng)
    return _ProbeSpectra(
        before=spectrum(rho.matrix),
        after_a=measured_spectra(rho, Side.A, ua, None),
        after_b=measured_spectra(rho, Side.B, None, ub),
        after_ab=measured_spectra(rho, Side.AB, ua, ub),
    )


def _min_difference(spectra: _ProbeSpectra, idx: EntropicIndices) -> float:
    unilocal = disturbance_from_spectra(spectra.before, spectra.after_a, idx)
    ratio = purity_ratio_spectra(spectra.before, spectra.after_b, idx)
    after_other = disturbance_from_spectra(spectra.after_b, spectra.after_ab, idx)
    return float(np.min(unilocal - ratio * after_other))


def contractivity_probe(rho: DensityOperator, idx: EntropicIndices, trials: int = 1000, seed: int = 0) -> float:
    """min over random (Π^A, Π^B) of D^{Π^A}(ρ) - P_{Π^B} D^{Π^A}(Π^B ρ)

    A negative value is a violation of local contractivity.

    :param trials: number of random measurement pairs
    :param seed: seed of the measurement draws
    """
    return _min_difference(_probe_spectra(rho, trials, seed), idx)


def contractivity_profile(
    rho: DensityOperator,
    indices: Sequence[EntropicIndices],
    trials: int = 1000,
    seed: int = 0,
) -> list[float]:
    """:func:`contractivity_probe` for many indices on one shared set of random measurements"""
    spectra = _probe_spectra(rho, trials, seed)
    return [_min_difference(spectra, idx) for idx in indices]
