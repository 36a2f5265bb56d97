"""Tolerances and run configuration"""
from dataclasses import dataclass, fields

from .exceptions import BadParameterError

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
UNITARY_TOL = 1e-10
NORM_TOL = 1e-10
SCHMIDT_TOL = 1e-12
MAJORIZATION_TOL = 1e-10

# q within REGIME_TOL of 1 is von Neumann, s within REGIME_TOL of 0 is Renyi
REGIME_TOL = 1e-8
SERIES_TOL = 1e-12

SUPPORT_EIG_TOL = 1e-12
SUPPORT_WEIGHT_TOL = 1e-9
OUTCOME_TOL = 1e-12

# eigenvalues at or below this are rounding noise and count as exact zeros
SPECTRAL_FLOOR = 1e-14

INEQUALITY_TOL = 1e-8
# a contractivity difference below -CONTRACTIVITY_TOL counts as a violation
CONTRACTIVITY_TOL = 1e-6

CSV_SCHEMA = 'entropic-qc/1'


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation depends on.

    Two equal configs produce byte-identical CSV bodies.
    """

    command: str
    q: tuple[float, ...] = (1.0,)
    s: tuple[float, ...] = (1.0,)
    sides: tuple[str, ...] = ('A',)
    dims: tuple[int, ...] = (2, 2)
    seed: int = 0
    trials: int = 1000
    restarts: int = 32
    resolution: tuple[int, int] = (64, 128)
    samples: int = 20
    out: str | None = None
    family: str | None = None
    n: int | None = None
    p: float | None = None
    x: float | None = None
    y: float | None = None
    schmidt: tuple[float, ...] | None = None
    state_file: str | None = None
    grid: int = 5
    ancilla: str = 'random'
    ancilla_dim: int = 2
    grouping: str = 'A|BC'
    cc_states: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if len(self.dims) != 2 or any(d < 1 for d in self.dims):
            raise BadParameterError(f'dims must be two positive dimensions "N_A N_B", got {self.dims}')

    def echo(self, skip: tuple[str, ...] = ()) -> list[tuple[str, str]]:
        """Ordered ``key=value`` pairs for the CSV metadata block

        :param skip: fields the command does not read
        :return: list of (key, value), without the output path
        """
        pairs = []
        for item in fields(self):
            if item.name == 'out' or item.name in skip:
                continue
            value = getattr(self, item.name)
            if value is None:
                continue
            if isinstance(value, tuple):
                value = ' '.join(str(v) for v in value)
            pairs.append((item.name, str(value)))
        return pairs
