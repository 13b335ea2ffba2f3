import pytest

from caqr.circuit import CaqrError
from caqr.generators import gen_bv
from caqr.qasm import emit_qasm
from caqr.qs_caqr import TradeoffPoint, reduce_to_limit, sweep
from caqr.reports import (
    SWEEP_COLUMNS, benchmark_corpus, benchmark_tables, sweep_frame, tradeoff_figure, transform_report,
)
from caqr.sr_caqr import map_baseline

POINTS = [
    TradeoffPoint(3, depth=14, duration=150.0),
    TradeoffPoint(5, depth=10, duration=100.0),
    TradeoffPoint(4, depth=10, duration=120.0),
]


def test_sweep_frame_is_sorted_by_qubits():
    frame = sweep_frame(POINTS)
    assert list(frame.columns) == SWEEP_COLUMNS
    assert list(frame['qubits']) == [5, 4, 3]
    assert frame['swaps'].isna().all()


def test_tradeoff_figure_traces():
    fig = tradeoff_figure(POINTS, title='bv')
    assert [t.name for t in fig.data] == ['Depth', 'Duration (dt)']
    assert fig.layout.title.text == 'bv'

    routed = [TradeoffPoint(p.qubits, p.depth, p.duration, swaps=2, esp=0.9) for p in POINTS]
    assert [t.name for t in tradeoff_figure(routed).data][-1] == 'SWAPs'


def test_tradeoff_figure_without_points():
    assert tradeoff_figure([]).layout.title.text.endswith('(No Data)')


def test_transform_report(bv5, heavy_hex27, calibration27):
    result = reduce_to_limit(bv5, 3)
    assert 'routed' not in transform_report(result)
    report = transform_report(result, map_baseline(result.circuit, heavy_hex27, calibration27))
    assert report['qubits'] == 3
    assert set(report['routed']) == {'swaps', 'esp', 'depth', 'duration_dt'}


def test_benchmark_corpus(tmp_path):
    corpus = benchmark_corpus()
    assert list(corpus) == ['BV_10', 'CC_10', 'XOR_5', 'QAOA10-0.3', 'QAOA15-0.3', 'QAOA20-0.3']
    assert all(corpus[f"QAOA{n}-0.3"].is_commuting for n in (10, 15, 20))

    (tmp_path / 'bv_6.qasm').write_text(emit_qasm(gen_bv(6, '10101')), encoding='utf-8')
    assert benchmark_corpus(corpus_dir=tmp_path)['bv_6'].num_qubits == 6

    with pytest.raises(CaqrError, match='does not exist'):
        benchmark_corpus(corpus_dir=tmp_path / 'missing')


def test_benchmark_tables(bv5, qaoa5, heavy_hex27, calibration27):
    qs_table, sr_table = benchmark_tables({'bv5': bv5, 'qaoa5': qaoa5}, heavy_hex27, calibration27)
    assert list(qs_table['benchmark']) == ['bv5', 'qaoa5']
    assert list(qs_table['baseline_qubits']) == [5, 5]
    assert qs_table.loc[0, 'max_reuse_qubits'] == 2
    assert {'qs_min_swap_swaps', 'sr_swaps', 'sr_qubits', 'sr_duration_dt'} <= set(sr_table.columns)
    assert (sr_table['sr_swaps'] <= sr_table['qs_min_swap_swaps']).all()


@pytest.mark.slow
def test_generated_corpus_tables(heavy_hex27, calibration27):
    points = sweep(benchmark_corpus()['BV_10'], coupling=heavy_hex27, calibration=calibration27)
    assert points[-1].swaps == 0
    _, sr_table = benchmark_tables(benchmark_corpus(), heavy_hex27, calibration27)
    assert (sr_table['sr_swaps'] <= sr_table['qs_min_swap_swaps']).all()
