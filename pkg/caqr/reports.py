"""
Tabular and chart reports: sweep CSV, tradeoff chart, benchmark tables
"""
from __future__ import annotations

import logging
import pathlib
from typing import Dict, Optional, Sequence, Tuple

import pandas as pd
import plotly.graph_objects as go
from plotly.subplots import make_subplots

from .circuit import CaqrError, Circuit
from .config import (
    CHART_COLORS, CHART_FONT, CHART_FONT_SIZE, CHART_HEIGHT, CHART_MARGIN, DEFAULT_BETA, DEFAULT_GAMMA, DEFAULT_SEED,
    TITLE_FONT_SIZE,
)
from .generators import gen_bv, gen_cc, gen_problem_graph, gen_qaoa_maxcut, gen_xor
from .hardware import Calibration, CouplingGraph
from .qasm import parse_qasm
from .qs_caqr import TradeoffPoint, TransformResult, select_point, sweep
from .sr_caqr import MappedResult

SWEEP_COLUMNS = ['qubits', 'depth', 'duration_dt', 'swaps', 'esp']


def transform_report(result: TransformResult, mapped: Optional[MappedResult] = None) -> dict:
    """JSON artifact of a QS transform, with routed figures when it was mapped"""
    report = result.to_json()
    if mapped is not None:
        report['routed'] = {
            'swaps': mapped.swaps,
            'esp': mapped.metrics.esp,
            'depth': mapped.metrics.depth,
            'duration_dt': mapped.metrics.duration,
        }
    return report


def sweep_frame(points: Sequence[TradeoffPoint]) -> pd.DataFrame:
    frame = pd.DataFrame([p.to_row() for p in points], columns=SWEEP_COLUMNS)
    return frame.sort_values('qubits', ascending=False, ignore_index=True)


def tradeoff_figure(points: Sequence[TradeoffPoint], title: str = 'Qubit Saving Tradeoff') -> go.Figure:
    """Depth and duration against the qubit count, duration on a secondary axis"""
    frame = sweep_frame(points)
    fig = make_subplots(specs=[[{'secondary_y': True}]])
    fig.add_trace(go.Scatter(
        x=frame['qubits'],
        y=frame['depth'],
        mode='lines+markers',
        name='Depth',
        line=dict(color=CHART_COLORS['depth'])
    ), secondary_y=False)
    fig.add_trace(go.Scatter(
        x=frame['qubits'],
        y=frame['duration_dt'],
        mode='lines+markers',
        name='Duration (dt)',
        line=dict(color=CHART_COLORS['duration'], dash='dash')
    ), secondary_y=True)
    if frame['swaps'].notna().any():
        fig.add_trace(go.Bar(
            x=frame['qubits'],
            y=frame['swaps'],
            name='SWAPs',
            marker_color=CHART_COLORS['swaps'],
            opacity=0.4
        ), secondary_y=False)

    fig.update_layout(
        title=dict(
            text=title if len(frame) else f"{title} (No Data)",
            font=dict(color=CHART_COLORS['text'], size=TITLE_FONT_SIZE, family=CHART_FONT)
        ),
        xaxis=dict(title='Qubits', autorange='reversed', gridcolor=CHART_COLORS['grid'], dtick=1),
        height=CHART_HEIGHT,
        margin=CHART_MARGIN,
        plot_bgcolor='rgba(0,0,0,0)',
        paper_bgcolor='rgba(0,0,0,0)',
        font=dict(color=CHART_COLORS['text'], family=CHART_FONT, size=CHART_FONT_SIZE),
        legend=dict(font=dict(color=CHART_COLORS['text'], family=CHART_FONT))
    )
    fig.update_yaxes(title_text='Depth', gridcolor=CHART_COLORS['grid'], secondary_y=False)
    fig.update_yaxes(title_text='Duration (dt)', showgrid=False, secondary_y=True)
    return fig


def benchmark_corpus(seed: int = DEFAULT_SEED, corpus_dir: Optional[pathlib.Path] = None) -> Dict[str, Circuit]:
    """Generated benchmarks plus every *.qasm file in corpus_dir"""
    corpus = {
        'BV_10': gen_bv(10, '1' * 9),
        'CC_10': gen_cc(10),
        'XOR_5': gen_xor(5),
    }
    for n in (10, 15, 20):
        graph = gen_problem_graph(n, 0.3, 'random', seed)
        corpus[f"QAOA{n}-0.3"] = gen_qaoa_maxcut(graph, DEFAULT_GAMMA, DEFAULT_BETA)
    if corpus_dir is not None:
        corpus_dir = pathlib.Path(corpus_dir)
        if not corpus_dir.is_dir():
            raise CaqrError(f"corpus directory '{corpus_dir}' does not exist")
        for path in sorted(corpus_dir.glob('*.qasm')):
            corpus[path.stem] = parse_qasm(path.read_text(encoding='utf-8'), name=path.stem)
    logging.info(f"Benchmark corpus: {', '.join(corpus)}")
    return corpus


def _point_cells(prefix: str, point: Optional[TradeoffPoint]) -> dict:
    if point is None:
        return {f"{prefix}_{k}": None for k in ('qubits', 'depth', 'duration_dt', 'swaps')}
    return {
        f"{prefix}_qubits": point.qubits,
        f"{prefix}_depth": point.depth,
        f"{prefix}_duration_dt": point.duration,
        f"{prefix}_swaps": point.swaps,
    }


def _min_swap_point(points: Sequence[TradeoffPoint]) -> Optional[TradeoffPoint]:
    try:
        return select_point(points, 'swaps')
    except CaqrError:
        return None


def benchmark_tables(corpus: Dict[str, Circuit], coupling: CouplingGraph,
                     calibration: Calibration) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """(QS table, SR table), one row per benchmark

    QS: no reuse / maximal reuse / minimal depth sweep points.
    SR: the fewest-SWAP QS point against the SR mapping.
    """
    from .pipeline import sr_min_swap

    qs_rows, sr_rows = [], []
    for name, circuit in corpus.items():
        points = sweep(circuit, coupling=coupling, calibration=calibration)
        qs_rows.append({
            'benchmark': name,
            **_point_cells('baseline', points[0]),
            **_point_cells('max_reuse', points[-1]),
            **_point_cells('min_depth', select_point(points, 'depth')),
        })

        min_swap = _min_swap_point(points)
        mapped = sr_min_swap(circuit, coupling, calibration, points)
        sr_rows.append({
            'benchmark': name,
            **_point_cells('qs_min_swap', min_swap),
            'sr_qubits': mapped.physical_qubits_used,
            'sr_depth': mapped.metrics.depth,
            'sr_duration_dt': mapped.metrics.duration,
            'sr_swaps': mapped.swaps,
        })
        logging.info(f"Benchmark {name}: QS min swaps {min_swap.swaps if min_swap else None}, "
                     f"SR swaps {mapped.swaps}")
    return pd.DataFrame(qs_rows), pd.DataFrame(sr_rows)
