"""State files in, CSV tables out.

State file::

    dims: 2 2
    0 0 0.5 0
    3 3 0.5 0
    0 3 0.5 0
    3 0 0.5 0

one ``row col real imag`` line per nonzero entry, ``#`` starts a comment.
"""
import csv
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO

import numpy as np

from .config import CSV_SCHEMA, HERMITIAN_TOL, RunConfig
from .exceptions import EntropicQCError, StateParseError
from .linalg import DensityOperator, make_density

CellValue = str | int | float | bool


@dataclass
class Table:
    """Rows of one experiment, written after a ``#`` metadata block.

    ``footer`` holds summary ``key=value`` pairs written as ``#`` lines after the rows.
    ``unused`` names config fields the command ignores, left out of the metadata.
    """

    columns: tuple[str, ...]
    rows: list[tuple[CellValue, ...]] = field(default_factory=list)
    footer: list[tuple[str, CellValue]] = field(default_factory=list)
    unused: tuple[str, ...] = ()

    def add(self, *row: CellValue) -> None:
        if len(row) != len(self.columns):
            raise ValueError(f'row of length {len(row)} for {len(self.columns)} columns')
        self.rows.append(row)

    def column(self, name: str) -> list[CellValue]:
        k = self.columns.index(name)
        return [row[k] for row in self.rows]


def format_value(value: CellValue) -> str:
    """17 significant digits for reals, lowercase booleans"""
    if isinstance(value, bool | np.bool_):
        return 'true' if value else 'false'
    if isinstance(value, int | np.integer):
        return str(int(value))
    if isinstance(value, float | np.floating):
        number = float(value)
        if math.isinf(number):
            return 'inf' if number > 0 else '-inf'
        return f'{number:.17g}'
    return str(value)


def write_table(stream: TextIO, config: RunConfig, table: Table) -> None:
    """Metadata lines, header row, rows and the summary footer

    The output depends only on config and table, so equal runs give identical bytes.
    """
    stream.write(f'# schema={CSV_SCHEMA}\n')
    for key, value in config.echo(skip=table.unused):
        stream.write(f'# {key}={value}\n')
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(v) for v in row])
    for key, value in table.footer:
        stream.write(f'# {key}={format_value(value)}\n')


def save_table(path: str | Path, config: RunConfig, table: Table) -> None:
    with Path(path).open('w', newline='', encoding='utf-8') as f:
        write_table(f, config, table)


def parse_state(text: str, source: str = '<string>') -> DensityOperator:
    """Parse the state file format

    :raise StateParseError: malformed content or a matrix that is not a valid state
    """
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if line:
            lines.append((number, line))
    if not lines:
        raise StateParseError(f'{source}: empty state file')

    number, header = lines[0]
    key, _, rest = header.partition(':')
    if key.strip().lower() != 'dims' or not rest.strip():
        raise StateParseError(f'{source}:{number}: expected "dims: d1 d2", got {header!r}')
    try:
        dims = tuple(int(d) for d in rest.split())
    except ValueError as err:
        raise StateParseError(f'{source}:{number}: bad dimensions {rest.strip()!r}') from err
    if any(d < 1 for d in dims):
        raise StateParseError(f'{source}:{number}: dimensions must be positive, got {dims}')

    size = math.prod(dims)
    matrix = np.zeros((size, size), dtype=np.complex128)
    seen: dict[tuple[int, int], int] = {}
    for number, line in lines[1:]:
        fields_ = line.split()
        if len(fields_) != 4:
            raise StateParseError(f'{source}:{number}: expected "row col real imag", got {line!r}')
        try:
            row, col = int(fields_[0]), int(fields_[1])
            value = complex(float(fields_[2]), float(fields_[3]))
        except ValueError as err:
            raise StateParseError(f'{source}:{number}: {err}') from err
        if not (0 <= row < size and 0 <= col < size):
            raise StateParseError(f'{source}:{number}: entry ({row}, {col}) outside a {size}x{size} matrix')
        if (row, col) in seen:
            raise StateParseError(f'{source}:{number}: entry ({row}, {col}) already given on line {seen[row, col]}')
        seen[row, col] = number
        matrix[row, col] = value

    deviation = float(np.max(np.abs(matrix - matrix.conj().T)))
    if deviation > HERMITIAN_TOL:
        raise StateParseError(f'{source}: matrix is not Hermitian, max deviation {deviation:.3e}')
    try:
        return make_density(matrix, dims)
    except EntropicQCError as err:
        raise StateParseError(f'{source}: not a valid density operator: {err}') from err


def read_state_file(path: str | Path) -> DensityOperator:
    """Load a state file

    :raise StateParseError: malformed content
    :raise OSError: the file cannot be read
    """
    path_ = Path(path)
    return parse_state(path_.read_text(encoding='utf-8'), source=str(path_))


def format_state(rho: DensityOperator, tol: float = 0.0) -> str:
    """Inverse of :func:`parse_state`, writing entries with modulus above tol"""
    lines = ['dims: ' + ' '.join(str(d) for d in rho.dims)]
    for row, col in zip(*np.nonzero(np.abs(rho.matrix) > tol), strict=True):
        value = rho.matrix[row, col]
        lines.append(f'{row} {col} {value.real:.17g} {value.imag:.17g}')
    return '\n'.join(lines) + '\n'


def cells(values: Sequence[float]) -> str:
    """Space-joined reals for a single CSV cell (argmin angles)"""
    return ' '.join(f'{v:.17g}' for v in values)
