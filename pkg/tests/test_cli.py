import json

from click.testing import CliRunner

from bergnorm.cli.main import main
from bergnorm.yaml import write_yaml

QUIET = ['--loglevel', 'critical']

def invoke(*args):
    return CliRunner().invoke(main, QUIET + list(args))

def report(tmp_path, *args, name='report.json'):
    path = tmp_path / name
    result = invoke(*args, '--out', str(path))
    return result, path

def test_constants_single_point(tmp_path):
    result, path = report(tmp_path, 'constants')
    assert result.exit_code == 0
    doc = json.loads(path.read_text())
    assert doc['command'] == 'constants'
    assert len(doc['rows']) == 1
    row = doc['rows'][0]
    assert (row['n'], row['m']) == (2, 1)
    assert abs(row['A.certified'] ** 2 - 0.3125) < 1e-10

def test_constants_sweep_is_a_cartesian_product(tmp_path):
    result, path = report(tmp_path, 'constants', '--p', '1.5,2,4',
                          '--alpha', '0.5,1')
    assert result.exit_code == 0
    rows = json.loads(path.read_text())['rows']
    assert len(rows) == 6
    assert [(r['alpha'], r['p']) for r in rows[:3]] == [
        (0.5, 1.5), (0.5, 2.0), (0.5, 4.0),
    ]

def test_reruns_are_byte_identical(tmp_path):
    args = ('constants', '--n', '2,3', '--workers', '2', '--format', 'csv')
    _, path = report(tmp_path, *args, name='run.csv')
    first = path.read_bytes()
    report(tmp_path, *args, name='run.csv')
    assert path.read_bytes() == first
    assert first.startswith(b'# bergnorm ')

def test_empty_sweep_is_a_usage_error():
    assert invoke('constants', '--p', '').exit_code == 2

def test_bad_values_are_usage_errors():
    assert invoke('constants', '--radius', '1.5').exit_code == 2
    assert invoke('constants', '--n', '2.5').exit_code == 2

def test_unknown_suite_is_a_usage_error():
    assert invoke('verify', 'nonsense').exit_code == 2

def test_failed_points_become_error_rows(tmp_path):
    # m = 0 has no Schur constant; the other point still reports
    result, path = report(tmp_path, 'constants', '--m', '0,1')
    assert result.exit_code == 0
    rows = json.loads(path.read_text())['rows']
    assert 'error' in rows[0] and 'DomainError' in rows[0]['error']
    assert 'error' not in rows[1]

def test_every_point_failing_exits_1(tmp_path):
    result, _ = report(tmp_path, 'constants', '--m', '0')
    assert result.exit_code == 1

def test_config_file_is_overridden_by_flags(tmp_path):
    config = tmp_path / 'run.yaml'
    write_yaml(config, {'alpha': [0.5, 2.0], 'seed': 7, 'p': '2,4'})
    result, path = report(tmp_path, 'constants', '--config', str(config),
                          '--p', '3')
    assert result.exit_code == 0
    doc = json.loads(path.read_text())
    assert doc['config']['seed'] == 7
    assert doc['config']['alpha'] == [0.5, 2.0]
    assert [r['p'] for r in doc['rows']] == [3.0, 3.0]

def test_verify_identities_passes(tmp_path):
    result, path = report(tmp_path, 'verify', 'identities')
    doc = json.loads(path.read_text())
    assert result.exit_code == 0
    assert doc['passed'] is True
    assert all('passed' in row for row in doc['rows'])

def test_witness_only_bracket_is_reproducible(tmp_path):
    args = ('bracket', 'T', '--trials', '0', '--radial-order', '16',
            '--sphere-order', '8')
    result, path = report(tmp_path, *args)
    first = path.read_bytes()
    report(tmp_path, *args)
    assert result.exit_code == 0
    assert path.read_bytes() == first
    row, = json.loads(first)['rows']
    assert row['operator'] == 'T' and row['lower_empirical'] > 0
    assert row['witnesses'][0]['label'] == 'psi_k'

def test_verify_lemma1_passes(tmp_path):
    result, path = report(tmp_path, 'verify', 'lemma1', '--n', '2')
    assert result.exit_code == 0
    assert json.loads(path.read_text())['passed'] is True
