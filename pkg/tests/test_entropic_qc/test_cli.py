import math

import pytest

from entropic_qc.cli import DEFAULTS, build_parser, config_from_args, main
from entropic_qc.experiments import FIG1_Q_GRID
from entropic_qc.fileio import format_state
from tests.utils import bell_state


def _body(text: str) -> list[dict[str, str]]:
    lines = [line for line in text.splitlines() if not line.startswith('#')]
    header = lines[0].split(',')
    return [dict(zip(header, line.split(','))) for line in lines[1:]]


class TestConfig:

    @pytest.mark.parametrize('command', tuple(DEFAULTS))
    def test_defaults(self, command):
        config = config_from_args(build_parser().parse_args([command]))
        assert config.command == command
        for key, value in DEFAULTS[command].items():
            assert getattr(config, key) == value

    def test_fig1_defaults(self):
        config = config_from_args(build_parser().parse_args(['fig1']))
        assert config.q == FIG1_Q_GRID
        assert config.samples == 20
        assert config.trials == 1000

    def test_flags_override_defaults(self):
        args = build_parser().parse_args(['triangle-scan', '--q', '3', '--samples', '4', '--dims', '2', '3'])
        config = config_from_args(args)
        assert config.q == (3.0,)
        assert config.samples == 4
        assert config.dims == (2, 3)
        assert config.restarts == 8

    def test_unknown_flag(self):
        with pytest.raises(SystemExit) as info:
            build_parser().parse_args(['measure', '--bogus'])
        assert info.value.code == 2

    def test_command_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestMain:

    def test_werner_one_sixth(self, capsys):
        code = main([
            'family-curve', '--family', 'werner', '--N', '2', '--x', '1', '--q', '2', '--s', '1',
            '--grid', '2', '--side', 'AB', '--restarts', '2',
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith('# schema=entropic-qc/1\n')
        row = [row for row in _body(out) if float(row['parameter']) == 1.0][0]
        assert float(row['optimizer_value']) == pytest.approx(1 / 6, abs=1e-6)
        assert float(row['closed_form']) == pytest.approx(1 / 6, abs=1e-12)

    def test_entropy_to_file(self, tmp_path):
        state = tmp_path / 'bell.txt'
        state.write_text(format_state(bell_state()), encoding='utf-8')
        out = tmp_path / 'entropy.csv'
        assert main(['entropy', '--state-file', str(state), '--q', '1', '--out', str(out)]) == 0
        text = out.read_text(encoding='utf-8')
        assert '# out=' not in text
        (row,) = _body(text)
        assert float(row['entropy_a']) == pytest.approx(math.log(2))

    def test_same_flags_same_bytes(self, tmp_path):
        outs = [tmp_path / 'a.csv', tmp_path / 'b.csv']
        for out in outs:
            assert main(['fig1', '--q', '2', '--samples', '2', '--trials', '20', '--seed', '3', '--out', str(out)]) == 0
        assert outs[0].read_bytes() == outs[1].read_bytes()

    def test_missing_state(self, caplog):
        assert main(['measure']) == 2
        assert 'state source' in caplog.text

    def test_missing_family_parameter(self):
        assert main(['measure', '--family', 'werner', '--N', '2']) == 2

    def test_missing_state_file(self, tmp_path):
        assert main(['entropy', '--state-file', str(tmp_path / 'missing.txt')]) == 2

    @pytest.mark.parametrize('command', ('fig1', 'ancilla-check', 'triangle-scan'))
    def test_single_dimension(self, command, caplog):
        assert main([command, '--dims', '2']) == 2
        assert 'dims' in caplog.text

    def test_malformed_state_file(self, tmp_path):
        state = tmp_path / 'bad.txt'
        state.write_text('dims: 2\n0 0 one 0\n', encoding='utf-8')
        assert main(['entropy', '--state-file', str(state)]) == 2
