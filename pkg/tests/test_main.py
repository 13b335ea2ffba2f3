import csv
import json

import pytest

from caqr.main import EXIT_ERROR, EXIT_INFEASIBLE, EXIT_OK, main
from caqr.qasm import emit_qasm, parse_qasm

from conftest import k5_circuit


@pytest.fixture
def bv_file(tmp_path):
    assert main(['gen', 'bv', '--n', '5', '--out', str(tmp_path)]) == EXIT_OK
    return tmp_path / 'bv_5.qasm'


def test_gen_writes_a_parseable_circuit(bv_file):
    circuit = parse_qasm(bv_file.read_text(encoding='utf-8'))
    assert circuit.num_qubits == 5
    assert circuit.num_clbits == 4


def test_gen_random_is_deterministic(tmp_path):
    for sub in ('a', 'b'):
        args = ['gen', 'random', '--n', '4', '--gates', '12', '--seed', '9', '--out', str(tmp_path / sub)]
        assert main(args) == EXIT_OK
    first = (tmp_path / 'a' / 'random_4_9.qasm').read_text(encoding='utf-8')
    assert first == (tmp_path / 'b' / 'random_4_9.qasm').read_text(encoding='utf-8')


def test_gen_qaoa_writes_the_graph_too(tmp_path):
    assert main(['gen', 'qaoa', '--n', '8', '--graph-kind', 'powerlaw', '--out', str(tmp_path)]) == EXIT_OK
    graphs = list(tmp_path.glob('*.json'))
    assert len(graphs) == 1
    assert json.loads(graphs[0].read_text(encoding='utf-8'))['n'] == 8
    assert len(list(tmp_path.glob('*.qasm'))) == 1


def test_gen_rejects_bad_sizes(tmp_path):
    assert main(['gen', 'bv', '--n', '1', '--out', str(tmp_path)]) == EXIT_ERROR


def test_transpile_writes_circuit_report_and_dag(bv_file, tmp_path):
    out = tmp_path / 'out'
    dot = tmp_path / 'bv.dot'
    code = main(['transpile', str(bv_file), '--qubit-limit', '2', '--out', str(out), '--emit-dag', str(dot)])
    assert code == EXIT_OK
    assert parse_qasm((out / 'bv_5_qs.qasm').read_text(encoding='utf-8')).num_qubits == 2
    report = json.loads((out / 'bv_5_qs.json').read_text(encoding='utf-8'))
    assert len(report['pairs']) == 3
    assert 'MR q' in dot.read_text(encoding='utf-8')


def test_transpile_sr(bv_file, tmp_path):
    code = main(['transpile', str(bv_file), '--mode', 'sr', '--arch', 'heavy-hex-27', '--out', str(tmp_path)])
    assert code == EXIT_OK
    report = json.loads((tmp_path / 'bv_5_sr.json').read_text(encoding='utf-8'))
    assert report['swaps'] == 0
    assert report['violations'] == []


def test_transpile_infeasible_limit(tmp_path, capsys):
    path = tmp_path / 'k5.qasm'
    path.write_text(emit_qasm(k5_circuit()), encoding='utf-8')
    assert main(['transpile', str(path), '--qubit-limit', '4', '--out', str(tmp_path)]) == EXIT_INFEASIBLE
    assert 'infeasible' in capsys.readouterr().err
    assert not (tmp_path / 'k5_qs.qasm').exists()


@pytest.mark.parametrize('extra', [
    ['--mode', 'sr'],
    ['--qubit-range', '5:1'],
    ['--arch', 'falcon'],
], ids=['sr-without-arch', 'bad-range', 'unknown-arch'])
def test_transpile_input_errors(bv_file, tmp_path, extra):
    assert main(['transpile', str(bv_file), '--out', str(tmp_path), *extra]) == EXIT_ERROR


def test_bad_calibration_value_is_an_input_error(bv_file, tmp_path, capsys):
    arch = tmp_path / 'line.json'
    arch.write_text(json.dumps({'n': 5, 'edges': [[0, 1], [1, 2], [2, 3], [3, 4]], 'cx_error': {'0-1': 'high'}}),
                    encoding='utf-8')
    assert main(['transpile', str(bv_file), '--arch', str(arch), '--out', str(tmp_path)]) == EXIT_ERROR
    assert 'cx_error[0-1]' in capsys.readouterr().err


def test_missing_input_file(tmp_path):
    assert main(['transpile', str(tmp_path / 'nope.qasm'), '--out', str(tmp_path)]) == EXIT_ERROR


def test_sweep_writes_csv_and_chart(bv_file, tmp_path):
    assert main(['sweep', str(bv_file), '--html', '--out', str(tmp_path)]) == EXIT_OK
    with open(tmp_path / 'bv_5_sweep.csv', newline='', encoding='utf-8') as f:
        rows = list(csv.DictReader(f))
    assert [int(r['qubits']) for r in rows] == [5, 4, 3, 2]
    assert (tmp_path / 'bv_5_sweep.html').exists()


def test_simulate_checks_equivalence(bv_file, tmp_path, capsys):
    out = tmp_path / 'out'
    assert main(['transpile', str(bv_file), '--qubit-limit', '2', '--out', str(out)]) == EXIT_OK
    capsys.readouterr()
    code = main(['simulate', str(bv_file), str(out / 'bv_5_qs.qasm'), '--wire-map', str(out / 'bv_5_qs.json')])
    assert code == EXIT_OK
    assert 'PASS' in capsys.readouterr().out


def test_simulate_accepts_an_sr_report(bv_file, tmp_path, capsys):
    code = main(['transpile', str(bv_file), '--mode', 'sr', '--arch', 'heavy-hex-27', '--qubit-limit', '2',
                 '--out', str(tmp_path)])
    assert code == EXIT_OK
    capsys.readouterr()
    code = main(['simulate', str(bv_file), str(tmp_path / 'bv_5_sr.qasm'), '--wire-map', str(tmp_path / 'bv_5_sr.json')])
    assert code == EXIT_OK
    assert 'PASS' in capsys.readouterr().out


def test_transpile_samples_with_the_seed(bv_file, tmp_path):
    code = main(['transpile', str(bv_file), '--qubit-limit', '2', '--shots', '30', '--seed', '5', '--out', str(tmp_path)])
    assert code == EXIT_OK
    report = json.loads((tmp_path / 'bv_5_qs.json').read_text(encoding='utf-8'))
    assert report['counts'] == {'1111': 30}


def test_simulate_reports_a_mismatch(bv_file, tmp_path, capsys):
    other = tmp_path / 'other'
    assert main(['gen', 'bv', '--n', '5', '--secret', '1011', '--out', str(other)]) == EXIT_OK
    capsys.readouterr()
    assert main(['simulate', str(bv_file), str(other / 'bv_5.qasm')]) == EXIT_ERROR
    assert 'FAIL' in capsys.readouterr().out


def test_simulate_prints_the_distribution(bv_file, capsys):
    assert main(['simulate', str(bv_file), '--shots', '10']) == EXIT_OK
    printed = capsys.readouterr().out
    assert '"1111": 1.0' in printed
    assert '"1111": 10' in printed
