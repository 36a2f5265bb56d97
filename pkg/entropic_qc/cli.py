"""``entropic-qc`` command line: one subcommand per experiment, CSV on stdout or --out"""
import argparse
import logging
import sys
from collections.abc import Sequence
from typing import Any

from .config import RunConfig
from .exceptions import EntropicQCError
from .experiments import ANCILLA_KINDS, COMMANDS, FIG1_Q_GRID, GROUPINGS
from .fileio import save_table, write_table

logger = logging.getLogger(__name__)

# values used when a flag is not given, per subcommand
DEFAULTS: dict[str, dict[str, Any]] = {
    'entropy': {},
    'measure': {'sides': ('A', 'B', 'AB')},
    'family-curve': {'sides': ('A', 'B', 'AB')},
    'fig1': {'q': FIG1_Q_GRID, 'samples': 20, 'trials': 1000},
    'ancilla-check': {'q': (2.0, 3.0), 'restarts': 4, 'samples': 20},
    'triangle-scan': {'q': (1.0, 2.0), 'restarts': 8, 'samples': 200},
}

HELP = {
    'entropy': 'unified entropies of a state and its marginals',
    'measure': 'minimized disturbance (correlation measure) of a state',
    'family-curve': 'closed forms against the optimizer along a state family',
    'fig1': 'local contractivity sweep over random states and measurements',
    'ancilla-check': 'invariance under an appended uncorrelated ancilla',
    'triangle-scan': 'triangle-like, sandwich and ordering inequalities on random states',
}


def _common_arguments() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--q', type=float, nargs='+', help='entropic index q (one or more)')
    common.add_argument('--s', type=float, nargs='+', help='entropic index s (one or more), 0 is Rényi')
    common.add_argument('--side', choices=('A', 'B', 'AB'), nargs='+', dest='sides', help='measured side(s)')
    common.add_argument('--dims', type=int, nargs='+', help='subsystem dimensions N_A N_B')
    common.add_argument('--seed', type=int, default=0, help='master seed of every random draw')
    common.add_argument('--trials', type=int, help='random measurement pairs per state')
    common.add_argument('--restarts', type=int, help='random starts of the optimizer')
    common.add_argument('--resolution', type=int, nargs=2, help='grid resolution (theta, phi)')
    common.add_argument('--samples', type=int, help='number of random states')
    common.add_argument('--out', help='CSV path, stdout when omitted')
    common.add_argument('--family', choices=('pseudopure', 'isotropic', 'werner'), help='state family')
    common.add_argument('--N', type=int, dest='n', help='local dimension of the family')
    common.add_argument('--p', type=float, help='pseudopure weight')
    common.add_argument('--x', type=float, help='Werner parameter')
    common.add_argument('--y', type=float, help='isotropic parameter')
    common.add_argument('--schmidt', type=float, nargs='+', help='squared Schmidt coefficients of the pure component')
    common.add_argument('--state-file', help='state in the "dims:" / "row col real imag" format')
    common.add_argument('--grid', type=int, help='points of a family parameter grid')
    common.add_argument('--ancilla', choices=ANCILLA_KINDS, help='ancilla state')
    common.add_argument('--ancilla-dim', type=int, help='ancilla dimension')
    common.add_argument('--grouping', choices=tuple(GROUPINGS), help='party that absorbs the ancilla')
    common.add_argument('--cc-states', type=int, help='classically correlated smoke states')
    common.add_argument('--workers', type=int, help='processes used for the samples')
    common.add_argument('--log-level', default='WARNING', choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'))
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='entropic-qc',
        description='Unified (q,s)-entropic measures of quantum correlations.',
    )
    subparsers = parser.add_subparsers(dest='command', required=True)
    common = _common_arguments()
    for name in COMMANDS:
        subparsers.add_parser(name, parents=[common], help=HELP[name], description=HELP[name])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Merge parsed flags over the per-command defaults"""
    values: dict[str, Any] = {'command': args.command, 'seed': args.seed}
    values.update(DEFAULTS[args.command])
    flags = (
        'q', 's', 'sides', 'dims', 'trials', 'restarts', 'resolution', 'samples', 'out', 'family', 'n', 'p', 'x',
        'y', 'schmidt', 'state_file', 'grid', 'ancilla', 'ancilla_dim', 'grouping', 'cc_states', 'workers',
    )
    for flag in flags:
        value = getattr(args, flag)
        if value is None:
            continue
        values[flag] = tuple(value) if isinstance(value, list) else value
    return RunConfig(**values)


def main(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand

    :return: 0 on success, 2 on a library or I/O error
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')
    try:
        config = config_from_args(args)
        table = COMMANDS[config.command](config)
        if config.out is None:
            write_table(sys.stdout, config, table)
        else:
            save_table(config.out, config, table)
    except (EntropicQCError, OSError) as err:
        logger.error('%s failed: %s', args.command, err)
        return 2
    logger.info('%s: %d rows written', args.command, len(table.rows))
    return 0
