"""
Physical coupling graphs, calibration data and gate durations
"""
from __future__ import annotations

import json
import logging
import pathlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Tuple, Union

import networkx as nx
import numpy as np

from .circuit import ArchitectureError
from .config import (
    BUILTIN_ARCHITECTURES, BUILTIN_RESET_DURATION_DT, CX_DURATION_DT, CX_ERROR,
    MEASURE_DURATION_DT, MR_DURATION_DT, READOUT_ERROR, SQ_DURATION_DT, SQ_ERROR,
)

Edge = Tuple[int, int]


def edge_key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Durations:
    """Uniform gate durations for logical (unmapped) circuits"""
    sq: int = SQ_DURATION_DT
    cx: int = CX_DURATION_DT
    measure: int = MEASURE_DURATION_DT
    mr: int = MR_DURATION_DT

    def two_qubit(self, u: int, v: int) -> int:
        return self.cx

    @classmethod
    def unit(cls) -> 'Durations':
        return cls(sq=1, cx=1, measure=1, mr=1)

    @classmethod
    def for_reset(cls, builtin_reset: bool = False) -> 'Durations':
        return cls(mr=BUILTIN_RESET_DURATION_DT if builtin_reset else MR_DURATION_DT)

    @classmethod
    def from_calibration(cls, calibration: 'Calibration') -> 'Durations':
        """Uniform logical durations; cx is the median edge duration"""
        cx = calibration.cx_duration.values()
        return cls(
            sq=calibration.sq_duration,
            cx=int(np.median(list(cx))) if cx else CX_DURATION_DT,
            measure=calibration.measure_duration,
            mr=calibration.mr_duration,
        )


@dataclass(frozen=True)
class CouplingGraph:
    num_physical: int
    edges: frozenset = field(default_factory=frozenset)
    name: str = 'custom'

    def __post_init__(self):
        normalized = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ArchitectureError(f"self-loop on physical qubit {u}")
            if not (0 <= u < self.num_physical and 0 <= v < self.num_physical):
                raise ArchitectureError(f"edge ({u}, {v}) out of range for {self.num_physical} qubits")
            normalized.add(edge_key(u, v))
        object.__setattr__(self, 'edges', frozenset(normalized))
        if self.num_physical < 1:
            raise ArchitectureError("coupling graph needs at least one qubit")
        if not nx.is_connected(self.graph):
            raise ArchitectureError(f"coupling graph '{self.name}' is disconnected")

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.num_physical))
        g.add_edges_from(self.edges)
        return g

    @cached_property
    def distance(self) -> np.ndarray:
        return all_pairs_distance(self)

    def has_edge(self, u: int, v: int) -> bool:
        return edge_key(u, v) in self.edges

    def neighbors(self, p: int) -> List[int]:
        return sorted(self.graph.neighbors(p))

    def max_degree(self) -> int:
        return max((d for _, d in self.graph.degree()), default=0)


@dataclass(frozen=True)
class Calibration:
    readout_error: Dict[int, float]
    cx_error: Dict[Edge, float]
    cx_duration: Dict[Edge, int]
    sq_duration: int = SQ_DURATION_DT
    mr_duration: int = MR_DURATION_DT
    measure_duration: int = MEASURE_DURATION_DT
    sq_error: float = SQ_ERROR

    # duration-model interface shared with Durations
    @property
    def sq(self) -> int:
        return self.sq_duration

    @property
    def measure(self) -> int:
        return self.measure_duration

    @property
    def mr(self) -> int:
        return self.mr_duration

    def two_qubit(self, u: int, v: int) -> int:
        try:
            return self.cx_duration[edge_key(u, v)]
        except KeyError:
            raise ArchitectureError(f"missing edge calibration for ({u}, {v})") from None

    def two_qubit_error(self, u: int, v: int) -> float:
        try:
            return self.cx_error[edge_key(u, v)]
        except KeyError:
            raise ArchitectureError(f"missing edge calibration for ({u}, {v})") from None

    def readout(self, p: int) -> float:
        return self.readout_error.get(p, READOUT_ERROR)

    @classmethod
    def uniform(cls, coupling: CouplingGraph, builtin_reset: bool = False, **overrides) -> 'Calibration':
        values = dict(
            readout_error={p: READOUT_ERROR for p in range(coupling.num_physical)},
            cx_error={e: CX_ERROR for e in coupling.edges},
            cx_duration={e: CX_DURATION_DT for e in coupling.edges},
            mr_duration=BUILTIN_RESET_DURATION_DT if builtin_reset else MR_DURATION_DT,
        )
        values.update(overrides)
        return cls(**values)

    @classmethod
    def error_free(cls, coupling: CouplingGraph) -> 'Calibration':
        return cls.uniform(
            coupling,
            readout_error={p: 0.0 for p in range(coupling.num_physical)},
            cx_error={e: 0.0 for e in coupling.edges},
        )


DurationModel = Union[Durations, Calibration]


# Falcon r4 coupling map
_FALCON_27 = [
    (0, 1), (1, 2), (1, 4), (2, 3), (3, 5), (4, 7), (5, 8), (6, 7), (7, 10), (8, 9),
    (8, 11), (10, 12), (11, 14), (12, 13), (12, 15), (13, 14), (14, 16), (15, 18), (16, 19),
    (17, 18), (18, 21), (19, 20), (19, 22), (21, 23), (22, 25), (23, 24), (24, 25), (25, 26),
]

# size -> (row width, rows)
_HEAVY_HEX_TILING = {65: (10, 5), 127: (14, 7)}


def _tiled_heavy_hex(width: int, rows: int) -> List[Edge]:
    """Rows of linked qubits joined by bridge qubits every fourth column

    Row 0 spans columns 0..width-1, the last row 1..width, the others 0..width.
    Bridges sit at columns 0, 4, 8, ... below even rows and 2, 6, 10, ...
    below odd rows.
    """
    def columns(r):
        if r == 0:
            return range(0, width)
        if r == rows - 1:
            return range(1, width + 1)
        return range(0, width + 1)

    edges: List[Edge] = []
    index = 0
    pending_bridges: List[Tuple[int, int]] = []  # (bridge qubit, column)
    for r in range(rows):
        cols = {c: index + i for i, c in enumerate(columns(r))}
        index += len(cols)
        ordered = sorted(cols)
        edges.extend((cols[a], cols[b]) for a, b in zip(ordered, ordered[1:]))
        for bridge, c in pending_bridges:
            edges.append((bridge, cols[c]))

        pending_bridges = []
        if r < rows - 1:
            below = set(columns(r + 1))
            for c in range(0 if r % 2 == 0 else 2, width + 1, 4):
                if c in cols and c in below:
                    edges.append((cols[c], index))
                    pending_bridges.append((index, c))
                    index += 1
    return edges


def build_heavy_hex(size: int) -> CouplingGraph:
    """Heavy-hex lattice for 27 (Falcon), 65 (Hummingbird) or 127 (Eagle) qubits"""
    if size == 27:
        edges = _FALCON_27
    elif size in _HEAVY_HEX_TILING:
        edges = _tiled_heavy_hex(*_HEAVY_HEX_TILING[size])
    else:
        raise ArchitectureError(f"unsupported heavy-hex size {size}, expected 27, 65 or 127")
    return CouplingGraph(num_physical=size, edges=frozenset(edges), name=f"heavy-hex-{size}")


def all_pairs_distance(coupling: CouplingGraph) -> np.ndarray:
    """BFS hop distances between every pair of physical qubits"""
    n = coupling.num_physical
    table = np.full((n, n), -1, dtype=int)
    for src, lengths in nx.all_pairs_shortest_path_length(coupling.graph):
        for dst, d in lengths.items():
            table[src, dst] = d
    if (table < 0).any():
        raise ArchitectureError(f"coupling graph '{coupling.name}' is disconnected")
    return table


def _parse_edge(text: str) -> Edge:
    try:
        u, v = (int(x) for x in str(text).split('-'))
    except ValueError:
        raise ArchitectureError(f"malformed edge key '{text}', expected 'u-v'") from None
    return edge_key(u, v)


def _number(convert, value, what: str):
    try:
        return convert(value)
    except (TypeError, ValueError):
        raise ArchitectureError(f"{what} = {value!r} is not a number") from None


def _probability(value, what: str) -> float:
    p = _number(float, value, what)
    if not 0.0 <= p < 1.0:
        raise ArchitectureError(f"{what} = {p} is outside [0, 1)")
    return p


def _positive(value, what: str) -> int:
    d = _number(int, value, what)
    if d <= 0:
        raise ArchitectureError(f"{what} must be positive, got {d}")
    return d


def load_architecture(source: Union[str, dict], builtin_reset: bool = False) -> Tuple[CouplingGraph, Calibration]:
    """Validate an architecture JSON document; missing calibration gets defaults"""
    if isinstance(source, str):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as e:
            raise ArchitectureError(f"architecture is not valid JSON: {e}") from e
    else:
        data = source
    try:
        n = int(data['n'])
        raw_edges = [tuple(e) for e in data.get('edges', [])]
    except (KeyError, TypeError, ValueError) as e:
        raise ArchitectureError(f"architecture needs 'n' and 'edges': {e}") from e

    seen = set()
    for edge in raw_edges:
        if len(edge) != 2:
            raise ArchitectureError(f"edge {list(edge)} must have two endpoints")
        key = edge_key(_number(int, edge[0], 'edge endpoint'), _number(int, edge[1], 'edge endpoint'))
        if key in seen:
            raise ArchitectureError(f"duplicate edge {key}")
        seen.add(key)
    coupling = CouplingGraph(num_physical=n, edges=frozenset(seen), name=data.get('name', 'custom'))

    readout = {p: READOUT_ERROR for p in range(n)}
    for q, p in data.get('readout_error', {}).items():
        q = _number(int, q, 'readout_error key')
        if not 0 <= q < n:
            raise ArchitectureError(f"readout_error for unknown qubit {q}")
        readout[q] = _probability(p, f"readout_error[{q}]")

    cx_error = {e: CX_ERROR for e in coupling.edges}
    for key, p in data.get('cx_error', {}).items():
        e = _parse_edge(key)
        if e not in coupling.edges:
            raise ArchitectureError(f"cx_error given for non-edge {key}")
        cx_error[e] = _probability(p, f"cx_error[{key}]")

    cx_duration = {e: CX_DURATION_DT for e in coupling.edges}
    for key, d in data.get('cx_duration_dt', {}).items():
        e = _parse_edge(key)
        if e not in coupling.edges:
            raise ArchitectureError(f"cx_duration_dt given for non-edge {key}")
        cx_duration[e] = _positive(d, f"cx_duration_dt[{key}]")

    default_mr = BUILTIN_RESET_DURATION_DT if builtin_reset else MR_DURATION_DT
    calibration = Calibration(
        readout_error=readout,
        cx_error=cx_error,
        cx_duration=cx_duration,
        sq_duration=_positive(data.get('sq_duration_dt', SQ_DURATION_DT), 'sq_duration_dt'),
        mr_duration=_positive(data.get('mr_duration_dt', default_mr), 'mr_duration_dt'),
    )
    logging.info(f"Loaded architecture '{coupling.name}' with {n} qubits and {len(coupling.edges)} edges")
    return coupling, calibration


def emit_architecture(coupling: CouplingGraph, calibration: Calibration) -> dict:
    return {
        'name': coupling.name,
        'n': coupling.num_physical,
        'edges': [list(e) for e in sorted(coupling.edges)],
        'readout_error': {str(q): p for q, p in sorted(calibration.readout_error.items())},
        'cx_error': {f"{u}-{v}": p for (u, v), p in sorted(calibration.cx_error.items())},
        'cx_duration_dt': {f"{u}-{v}": d for (u, v), d in sorted(calibration.cx_duration.items())},
        'sq_duration_dt': calibration.sq_duration,
        'mr_duration_dt': calibration.mr_duration,
    }


def resolve_architecture(arch: str, builtin_reset: bool = False) -> Tuple[CouplingGraph, Calibration]:
    """Builtin heavy-hex name or path to an architecture JSON file"""
    if arch in BUILTIN_ARCHITECTURES:
        coupling = build_heavy_hex(BUILTIN_ARCHITECTURES[arch])
        return coupling, Calibration.uniform(coupling, builtin_reset=builtin_reset)
    path = pathlib.Path(arch)
    if not path.is_file():
        raise ArchitectureError(f"unknown architecture '{arch}' (not a builtin name or a file)")
    return load_architecture(path.read_text(encoding='utf-8'), builtin_reset=builtin_reset)

