"""
Command line: subcommands, CSV contents and exit codes
"""

import numpy as np
import pytest
from click.testing import CliRunner

from slitpaths.cli import cli
from slitpaths.commands import summary_path
from slitpaths.config import RunConfig, load_config
from slitpaths.report import config_echo, read_table, write_table


@pytest.fixture
def runner():
    return CliRunner()


def _run(runner, *args):
    return runner.invoke(cli, [str(arg) for arg in args])


def test_simulate(runner, small_config, tmp_path):
    """Test simulate writes normalized profiles and a config echo"""
    out = tmp_path / 'simulate.csv'
    result = _run(runner, 'simulate', '--config', small_config, '--out', out)
    assert result.exit_code == 0, result.output

    header, data = read_table(out)
    assert list(data) == ['y_m', 'P_AB', 'P_DA', 'P_DB', 'P_DADB', 'P_DAB', 'Delta1', 'Delta2', 'I_AB']
    center = np.argmin(np.abs(data['y_m']))
    assert data['P_AB'][center] == 1.0
    assert np.max(np.abs(data['I_AB'])) < 1e-12
    assert 1e-3 <= np.max(np.abs(data['Delta1'])) <= 1e-1
    for name in ('P_AB', 'P_DA', 'P_DB', 'P_DADB', 'P_DAB'):
        assert np.all(data[name] >= 0)

    expected = load_config(small_config, {'OUT': str(out)})
    assert RunConfig.from_echo(config_echo(header)) == expected
    assert any(line.startswith('self_convergence = ') for line in header)


def test_simulate_is_byte_reproducible(runner, small_config, tmp_path):
    out = tmp_path / 'again.csv'
    assert _run(runner, 'simulate', '--config', small_config, '--out', out).exit_code == 0
    first = out.read_bytes()
    assert _run(runner, 'simulate', '--config', small_config, '--out', out, '--workers', 1).exit_code == 0
    assert out.read_bytes() == first


def test_simulate_exact_mode(runner, small_config, tmp_path):
    out = tmp_path / 'exact.csv'
    result = _run(runner, 'simulate', '--config', small_config, '--out', out, '--mode', 'exact')
    assert result.exit_code == 0, result.output
    header, data = read_table(out)
    assert 'mode = "exact"' in config_echo(header)
    assert any('validation only' in line for line in header)
    assert np.max(np.abs(data['I_AB'])) < 1e-10


def test_sweep_efficiency(runner, small_config, tmp_path):
    """Test the sweep writes both profile blocks and the summary"""
    out = tmp_path / 'sweep.csv'
    result = _run(runner, 'sweep-efficiency', '--config', small_config, '--out', out,
                  '--efficiency', '0,0.25,0.5,0.75,1')
    assert result.exit_code == 0, result.output

    _, profile = read_table(out)
    assert list(profile) == [
        'higher_order', 'n', 'y_m', 'P_AB',
        'P_DA_prime', 'P_DB_prime', 'P_DADB_prime', 'P_DAB_prime',
    ]
    blocks = set(zip(profile['higher_order'], profile['n']))
    assert blocks == {(h, n) for h in (0.0, 1.0) for n in (0.0, 0.25, 0.5, 0.75, 1.0)}
    assert profile['y_m'].size == 10 * 201

    header, summary = read_table(summary_path(out))
    assert len(summary) == 12
    assert any(line.startswith('threshold = ') for line in header)
    assert any(line.startswith('crossing higher_order=1 dav_DA_DADB') for line in header)

    zero = summary['n'] == 0.0
    for name, values in summary.items():
        if name.startswith('dav_'):
            assert np.all(values[zero] == 0.0)

    classical_full = (summary['higher_order'] == 0) & (summary['n'] == 1.0)
    assert summary['dav_DA_DADB'][classical_full] == [0.0]
    full_half = (summary['higher_order'] == 1) & (summary['n'] == 0.5)
    assert summary['dav_DA_DADB'][full_half][0] > 0


def test_classical_only_sweep_has_one_block(runner, small_config, tmp_path):
    out = tmp_path / 'classical.csv'
    result = _run(runner, 'sweep-efficiency', '--config', small_config, '--out', out,
                  '--efficiency', '0.5,1', '--classical-only')
    assert result.exit_code == 0, result.output
    _, profile = read_table(out)
    assert set(profile['higher_order']) == {0.0}


def _sweep(runner, small_config, tmp_path, efficiencies='0.75'):
    out = tmp_path / 'measured.csv'
    result = _run(runner, 'sweep-efficiency', '--config', small_config, '--out', out,
                  '--efficiency', efficiencies)
    assert result.exit_code == 0, result.output
    return out


def test_invert_recovers_born_identity(runner, small_config, tmp_path):
    measured = _sweep(runner, small_config, tmp_path, '0.5,0.75')
    out = tmp_path / 'inverted.csv'
    result = _run(runner, 'invert', '--config', small_config, '--measured', measured,
                  '--efficiency', 0.75, '--out', out)
    assert result.exit_code == 0, result.output

    _, data = read_table(out)
    assert list(data) == ['y_m', 'P_AB', 'P_DA', 'P_DB', 'P_DADB', 'P_DAB', 'I_AB']
    assert data['y_m'].size == 201
    assert np.max(np.abs(data['I_AB'])) < 1e-10


def test_invert_detects_corrupted_measurement(runner, small_config, tmp_path):
    """Test a corrupted P'_DA row shows up in I_AB"""
    measured = _sweep(runner, small_config, tmp_path)
    _, sweep = read_table(measured)
    rows = sweep['higher_order'] == 1
    columns = {name: sweep[name][rows] for name in
               ('y_m', 'P_AB', 'P_DA_prime', 'P_DB_prime', 'P_DADB_prime', 'P_DAB_prime')}
    columns['P_DA_prime'] = columns['P_DA_prime'].copy()
    columns['P_DA_prime'][40] += 0.1
    corrupted = write_table(tmp_path / 'corrupted.csv', columns)

    out = tmp_path / 'recovered.csv'
    result = _run(runner, 'invert', '--config', small_config, '--measured', corrupted,
                  '--efficiency', 0.75, '--out', out)
    assert result.exit_code == 0, result.output
    _, data = read_table(out)
    assert abs(data['I_AB'][40]) > 1e-3
    assert np.max(np.abs(np.delete(data['I_AB'], 40))) < 1e-10


def test_invert_rejects_zero_efficiency(runner, small_config, tmp_path):
    measured = _sweep(runner, small_config, tmp_path)
    result = _run(runner, 'invert', '--config', small_config, '--measured', measured,
                  '--efficiency', 0, '--out', tmp_path / 'x.csv')
    assert result.exit_code == 1


def test_invert_missing_columns(runner, small_config, tmp_path):
    measured = write_table(tmp_path / 'partial.csv', {'y_m': [0.0, 1.0], 'P_AB': [1.0, 0.5]})
    result = _run(runner, 'invert', '--config', small_config, '--measured', measured,
                  '--efficiency', 0.5, '--out', tmp_path / 'x.csv')
    assert result.exit_code == 3
    assert 'P_DA_prime' in result.output


def test_invert_unknown_efficiency(runner, small_config, tmp_path):
    measured = _sweep(runner, small_config, tmp_path)
    result = _run(runner, 'invert', '--config', small_config, '--measured', measured,
                  '--efficiency', 0.3, '--out', tmp_path / 'x.csv')
    assert result.exit_code == 1
    assert 'efficiency' in result.output


def test_sorkin(runner, small_config, tmp_path):
    out = tmp_path / 'sorkin.csv'
    result = _run(runner, 'sorkin', '--config', small_config, '--out', out)
    assert result.exit_code == 0, result.output
    header, data = read_table(out)
    assert list(data) == ['y_m', 'P_ABC', 'P_AB', 'P_AC', 'P_BC', 'P_A', 'P_B', 'P_C', 'I_ABC']
    assert any('psi_ABC = 0' in line for line in header)
    assert np.max(np.abs(data['I_ABC'])) > 1e-4
    assert np.max(np.abs(data['I_ABC'] - data['I_ABC'][::-1])) < 1e-10

    out = tmp_path / 'sorkin_classical.csv'
    result = _run(runner, 'sorkin', '--config', small_config, '--out', out, '--classical-only')
    assert result.exit_code == 0, result.output
    _, data = read_table(out)
    assert np.max(np.abs(data['I_ABC'])) < 1e-12


def test_config_error_exit_code(runner, tmp_path):
    bad = tmp_path / 'bad.toml'
    bad.write_text('slit_separation = "400nm"\n')
    result = _run(runner, 'simulate', '--config', bad, '--out', tmp_path / 'x.csv')
    assert result.exit_code == 1
    assert 'slit_separation' in result.output


def test_flag_validation_exit_code(runner, small_config, tmp_path):
    result = _run(runner, 'simulate', '--config', small_config, '--out', tmp_path / 'x.csv',
                  '--nodes-per-wavelength', 2)
    assert result.exit_code == 1
    assert 'nodes_per_wavelength' in result.output


def test_usage_error_exit_code(runner):
    assert _run(runner, 'simulate', '--no-such-flag').exit_code == 1
    assert _run(runner, 'simulate', '--mode', 'paraxial').exit_code == 1


def test_convergence_failure_exit_code(runner, tmp_path):
    """Test an unreachable tolerance exits with code 2 unless --no-verify is given"""
    strict = tmp_path / 'strict.toml'
    strict.write_text('n_points = 21\ntolerance = 1e-30\n')
    result = _run(runner, 'simulate', '--config', strict, '--out', tmp_path / 'x.csv')
    assert result.exit_code == 2
    assert 'tolerance' in result.output
    assert not (tmp_path / 'x.csv').exists()

    result = _run(runner, 'simulate', '--config', strict, '--out', tmp_path / 'x.csv', '--no-verify')
    assert result.exit_code == 0, result.output
    assert (tmp_path / 'x.csv').exists()


def test_unwritable_output_exit_code(runner, small_config, tmp_path):
    result = _run(runner, 'simulate', '--config', small_config,
                  '--out', tmp_path / 'missing' / 'dir' / 'out.csv')
    assert result.exit_code == 3


def test_cache_dir_reuses_fields(runner, small_config, tmp_path):
    cache = tmp_path / 'cache'
    out = tmp_path / 'cached.csv'
    result = _run(runner, 'simulate', '--config', small_config, '--out', out, '--cache-dir', cache)
    assert result.exit_code == 0, result.output
    assert (cache / 'index.json').exists()
    assert list(cache.glob('*.npz'))


def test_bad_cache_ttl_exit_code(runner, small_config, tmp_path, monkeypatch):
    monkeypatch.setenv('SLITPATHS_CACHE_TTL_HOURS', 'forever')
    result = _run(runner, 'simulate', '--config', small_config, '--out', tmp_path / 'x.csv',
                  '--cache-dir', tmp_path / 'cache')
    assert result.exit_code == 1
    assert 'cache_ttl_hours' in result.output


def test_help_and_version(runner):
    assert _run(runner, '--help').exit_code == 0
    result = _run(runner, '--version')
    assert result.exit_code == 0
    assert 'slitpaths' in result.output


@pytest.mark.slow
def test_full_grid_simulation(runner, tmp_path):
    """Test the full 7001-point run on the case-study geometry"""
    out = tmp_path / 'full_grid.csv'
    result = _run(runner, 'simulate', '--out', out, '--workers', 4)
    assert result.exit_code == 0, result.output
    header, data = read_table(out)
    assert data['y_m'].size == 7001
    assert data['P_AB'][3500] == 1.0
    assert np.max(np.abs(data['I_AB'])) < 1e-12
    assert 1e-3 <= np.max(np.abs(data['Delta1'])) <= 1e-1
    convergence = next(line for line in header if line.startswith('self_convergence'))
    assert float(convergence.split('=')[1]) < 1e-6
