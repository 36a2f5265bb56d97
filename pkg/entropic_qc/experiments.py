"""Experiment drivers behind the CLI subcommands.

Every ``cmd_*`` takes a :class:`RunConfig` and returns a :class:`Table`; nothing here
writes files. Randomized commands draw sample k from ``task_rng(config.seed, k)`` and
run samples through :meth:`Sweep.parallel_map`, so rows do not depend on ``workers``.
"""
import logging
from collections.abc import Callable, Iterator
from dataclasses import replace

import numpy as np

from .config import CONTRACTIVITY_TOL, RunConfig
from .correlations import (
    MeasureOptions,
    contractivity_profile,
    entanglement_lower_bound,
    grid_oracle_qubit,
    measure_correlations,
    triangle_analysis,
)
from .ensembles import random_cc, random_density, random_pure, task_rng
from .entropy import EntropicIndices, max_entropy, unified_entropy
from .exceptions import BadParameterError
from .families import (
    FamilyKind,
    FamilySpec,
    build,
    closed_form,
    schmidt_vector,
    werner_discrepancy,
)
from .fileio import Table, cells, read_state_file
from .linalg import DensityOperator, bipartition, maximally_mixed, partial_trace, pure_density, tensor
from .measurement import LocalMeasurement, Side, lift_measurement
from .sweep import Sweep, sweep

logger = logging.getLogger(__name__)

FIG1_Q_GRID = tuple(round(0.1 + 0.05 * k, 2) for k in range(119))
FIG1_FAMILIES = (('tsallis', 1.0), ('renyi', 0.0))
# fig1 always runs the Tsallis and Rényi lines, so --s is not echoed
FIG1_UNUSED = ('s',)
GROUPINGS = {'A|BC': (0,), 'B|AC': (1,)}
ANCILLA_KINDS = ('random', 'mixed', 'pure')


def index_grid(config: RunConfig) -> list[EntropicIndices]:
    """Every (q, s) pair of the config, q-major"""
    return [EntropicIndices(q, s) for q in config.q for s in config.s]


def measure_options(config: RunConfig, **changes: object) -> MeasureOptions:
    return replace(MeasureOptions(restarts=config.restarts, seed=config.seed), **changes)


def family_kind(config: RunConfig) -> FamilyKind:
    try:
        return FamilyKind(config.family)
    except ValueError as err:
        raise BadParameterError(f'unknown family {config.family!r}') from err


def family_dim(config: RunConfig) -> int:
    return config.n if config.n is not None else config.dims[0]


def family_spec(config: RunConfig, parameter: float | None = None) -> FamilySpec:
    """Family member described by the config, parameter overrides p/y/x

    :raise BadParameterError: unknown family or missing parameter
    """
    kind = family_kind(config)
    n = family_dim(config)
    if kind is FamilyKind.PSEUDOPURE:
        dims = config.dims if config.schmidt is not None else (n, n)
        coefficients = config.schmidt if config.schmidt is not None else (1.0 / min(dims),) * min(dims)
        value = config.p if parameter is None else parameter
        if value is None:
            raise BadParameterError('pseudopure states need --p')
        return FamilySpec.pseudopure(schmidt_vector(coefficients, dims), dims, value)
    if kind is FamilyKind.ISOTROPIC:
        value = config.y if parameter is None else parameter
        if value is None:
            raise BadParameterError('isotropic states need --y')
        return FamilySpec.isotropic(n, value)
    value = config.x if parameter is None else parameter
    if value is None:
        raise BadParameterError('Werner states need --x')
    return FamilySpec.werner(n, value)


def load_state(config: RunConfig) -> DensityOperator:
    """State from --state-file or from the family flags

    :raise BadParameterError: neither source is given
    """
    if config.state_file is not None:
        return read_state_file(config.state_file)
    if config.family is not None:
        return build(family_spec(config))
    raise BadParameterError('a state source is required: --state-file or --family')


def _sides(config: RunConfig) -> list[Side]:
    return [Side(side) for side in config.sides]


def cmd_entropy(config: RunConfig) -> Table:
    """Entropies of the state and its marginals, the upper bound and the entanglement bound"""
    rho = load_state(config)
    table = Table(columns=('q', 's', 'entropy', 'entropy_a', 'entropy_b', 'max_entropy', 'entanglement_bound'))
    bipartite = len(rho.dims) == 2
    for idx in index_grid(config):
        reduced = [unified_entropy(partial_trace(rho, [k]), idx) for k in (0, 1)] if bipartite else [np.nan] * 2
        table.add(
            idx.q,
            idx.s,
            unified_entropy(rho, idx),
            *reduced,
            max_entropy(rho.dim, idx),
            entanglement_lower_bound(rho, idx) if bipartite else np.nan,
        )
    return table


def cmd_measure(config: RunConfig) -> Table:
    """Minimized disturbance of one state for every requested side and (q, s)"""
    rho = load_state(config)
    table = Table(columns=(
        'side', 'q', 's', 'value', 'spread', 'converged', 'restarts_used', 'iterations', 'angles_a', 'angles_b',
        'grid_value',
    ))
    qubits = rho.dims == (2, 2)
    opts = measure_options(config)
    for side in _sides(config):
        for idx in index_grid(config):
            result = measure_correlations(rho, side, idx, opts)
            table.add(
                side.value, idx.q, idx.s, result.value, result.spread, result.converged,
                result.restarts_used, result.iterations, cells(result.argmin.angles_a), cells(result.argmin.angles_b),
                grid_oracle_qubit(rho, side, idx, config.resolution) if qubits else np.nan,
            )
    return table


def parameter_grid(kind: FamilyKind, n: int, points: int) -> list[float]:
    """Evenly spaced family parameters covering the whole allowed range"""
    if points < 2:
        raise BadParameterError(f'a family grid needs at least 2 points, got {points}')
    low = {FamilyKind.PSEUDOPURE: 0.0, FamilyKind.ISOTROPIC: 1.0 / n ** 2, FamilyKind.WERNER: -1.0}[kind]
    return [float(v) for v in np.linspace(low, 1.0, points)]


def cmd_family_curve(config: RunConfig) -> Table:
    """Closed form against the optimizer along a family, with the Werner published-form comparison"""
    kind = family_kind(config)
    columns = ('parameter', 'side', 'q', 's', 'closed_form', 'optimizer_value', 'abs_diff')
    if kind is FamilyKind.WERNER:
        columns += ('printed_form', 'printed_diff')
    table = Table(columns=columns)
    opts = measure_options(config)
    for parameter in parameter_grid(kind, family_dim(config), config.grid):
        spec = family_spec(config, parameter=parameter)
        rho = build(spec)
        for side in _sides(config):
            for idx in index_grid(config):
                exact = closed_form(spec, idx)
                value = measure_correlations(rho, side, idx, opts).value
                row: tuple = (parameter, side.value, idx.q, idx.s, exact, value, abs(exact - value))
                if kind is FamilyKind.WERNER:
                    comparison = werner_discrepancy(spec.n, parameter, idx)
                    row += (comparison.printed, comparison.difference)
                table.add(*row)
    logger.info('family curve %s: %d rows', kind.value, len(table.rows))
    return table


@sweep
def random_states(config: RunConfig) -> Iterator[tuple[int, RunConfig]]:
    """Sample tasks (k, config); the state itself is drawn inside the worker"""
    for k in range(config.samples):
        yield k, config


def _two_qubit_sample(config: RunConfig, k: int) -> DensityOperator:
    n_a, n_b = config.dims[:2]
    return random_density(n_a * n_b, task_rng(config.seed, k), dims=(n_a, n_b))


def _run(config: RunConfig, worker: Callable[[tuple[int, RunConfig]], list[tuple]]) -> list[tuple]:
    return random_states(config).parallel_map(worker, workers=config.workers).flatten().to_list()


def _fig1_rows(task: tuple[int, RunConfig]) -> list[tuple]:
    k, config = task
    rho = _two_qubit_sample(config, k)
    measurement_seed = int(task_rng(config.seed, k, 1).integers(2 ** 63))
    indices = [EntropicIndices(q, s) for _, s in FIG1_FAMILIES for q in config.q]
    minima = iter(contractivity_profile(rho, indices, trials=config.trials, seed=measurement_seed))
    rows = []
    for family, _ in FIG1_FAMILIES:
        for q in config.q:
            value = next(minima)
            rows.append((k, family, q, value, value < -CONTRACTIVITY_TOL))
    logger.debug('contractivity sample %d done', k)
    return rows


def cmd_fig1(config: RunConfig) -> Table:
    """Minimal local-contractivity differences over random measurements, Tsallis and Rényi lines"""
    table = Table(columns=('state_id', 'family', 'q', 'min_difference', 'violated'), unused=FIG1_UNUSED)
    for row in _run(config, _fig1_rows):
        table.add(*row)
    table.footer.append(('violations', Sweep(table.column('violated')).count_where(bool)))
    logger.info('fig1: %d states, %d rows', config.samples, len(table.rows))
    return table


def make_ancilla(kind: str, dim: int, rng: np.random.Generator) -> DensityOperator:
    """Ancilla state: Hilbert-Schmidt random, maximally mixed or random pure"""
    if kind == 'random':
        return random_density(dim, rng)
    if kind == 'mixed':
        return maximally_mixed([dim])
    if kind == 'pure':
        return pure_density(random_pure([dim], rng))
    raise BadParameterError(f'unknown ancilla kind {kind!r}, expected one of {ANCILLA_KINDS}')


def regroup_measurement(m: LocalMeasurement, grouping: str) -> LocalMeasurement:
    """Rewrite a measurement of ρ^AB for the first party of the grouping"""
    if grouping == 'A|BC':
        return m
    side = {Side.A: Side.B, Side.B: Side.A, Side.AB: Side.AB}[m.side]
    return LocalMeasurement(side=side, basis_a=m.basis_b, basis_b=m.basis_a)


def regroup_side(side: Side, grouping: str) -> Side:
    if grouping == 'A|BC':
        return side
    return {Side.A: Side.B, Side.B: Side.A, Side.AB: Side.AB}[side]


def _extended_minimum(extended: DensityOperator, side: Side, idx: EntropicIndices, config: RunConfig,
                      m: LocalMeasurement, ancilla: DensityOperator, rescaled: bool) -> float:
    warm = lift_measurement(regroup_measurement(m, config.grouping), ancilla, onto=Side.B)
    opts = measure_options(config, rescaled=rescaled, warm_starts=(warm,))
    return measure_correlations(extended, regroup_side(side, config.grouping), idx, opts).value


def _ancilla_rows(task: tuple[int, RunConfig]) -> list[tuple]:
    k, config = task
    rng = task_rng(config.seed, k)
    n_a, n_b = config.dims[:2]
    rho = random_density(n_a * n_b, rng, dims=(n_a, n_b))
    ancilla = make_ancilla(config.ancilla, config.ancilla_dim, rng)
    extended = bipartition(tensor(rho, ancilla), GROUPINGS[config.grouping])
    rows = []
    for side in _sides(config):
        for idx in index_grid(config):
            before = measure_correlations(rho, side, idx, measure_options(config))
            after = _extended_minimum(extended, side, idx, config, before.measurement, ancilla, rescaled=True)
            bare = measure_correlations(rho, side, idx, measure_options(config, rescaled=False))
            bare_after = _extended_minimum(extended, side, idx, config, bare.measurement, ancilla, rescaled=False)
            rows.append((
                k, side.value, idx.q, idx.s, before.value, after, abs(after - before.value),
                bare.value, bare_after, abs(bare_after - bare.value),
            ))
    logger.debug('ancilla sample %d done', k)
    return rows


def cmd_ancilla_check(config: RunConfig) -> Table:
    """Correlations before and after appending an uncorrelated ancilla, rescaled and bare"""
    if config.grouping not in GROUPINGS:
        raise BadParameterError(f'unknown grouping {config.grouping!r}, expected one of {tuple(GROUPINGS)}')
    if config.ancilla not in ANCILLA_KINDS:
        raise BadParameterError(f'unknown ancilla kind {config.ancilla!r}, expected one of {ANCILLA_KINDS}')
    table = Table(columns=(
        'sample_id', 'side', 'q', 's', 'd_before', 'd_after_ancilla', 'rescaled_diff',
        'unrescaled_before', 'unrescaled_after', 'unrescaled_diff',
    ))
    for row in _run(config, _ancilla_rows):
        table.add(*row)
    table.footer.append(('max_rescaled_diff', max((row[6] for row in table.rows), default=0.0)))
    table.footer.append(('max_unrescaled_diff', max((row[9] for row in table.rows), default=0.0)))
    return table


def _triangle_row(k: int, kind: str, rho: DensityOperator, idx: EntropicIndices, config: RunConfig) -> tuple:
    report = triangle_analysis(rho, idx, measure_options(config))
    return (
        k, kind, idx.q, idx.s, report.m_a, report.m_b, report.m_ab, report.delta0, report.delta1,
        report.triangle_holds, report.dadb_holds, report.ordering_holds, report.bounds_hold,
    )


def _triangle_rows(task: tuple[int, RunConfig]) -> list[tuple]:
    k, config = task
    rho = _two_qubit_sample(config, k)
    return [_triangle_row(k, 'random', rho, idx, config) for idx in index_grid(config)]


TRIANGLE_FLAGS = ('triangle_holds', 'sandwich_holds', 'ordering_holds', 'bounds_hold')


def cmd_triangle_scan(config: RunConfig) -> Table:
    """Triangle-like, sandwich and ordering inequalities on random states and CC smoke states"""
    table = Table(columns=('state_id', 'kind', 'q', 's', 'm_a', 'm_b', 'm_ab', 'delta0', 'delta1') + TRIANGLE_FLAGS)
    for row in _run(config, _triangle_rows):
        table.add(*row)
    n_a, n_b = config.dims[:2]
    for j in range(config.cc_states):
        rho = random_cc((n_a, n_b), task_rng(config.seed, config.samples + j))
        for idx in index_grid(config):
            table.add(*_triangle_row(config.samples + j, 'cc', rho, idx, config))
    table.footer.append(('rows', len(table.rows)))
    for flag in TRIANGLE_FLAGS:
        violations = Sweep(table.column(flag)).count_where(lambda holds: not holds)
        table.footer.append((f'{flag.removesuffix("_holds").removesuffix("_hold")}_violations', violations))
    logger.info('triangle scan: %d rows', len(table.rows))
    return table


COMMANDS: dict[str, Callable[[RunConfig], Table]] = {
    'entropy': cmd_entropy,
    'measure': cmd_measure,
    'family-curve': cmd_family_curve,
    'fig1': cmd_fig1,
    'ancilla-check': cmd_ancilla_check,
    'triangle-scan': cmd_triangle_scan,
}
