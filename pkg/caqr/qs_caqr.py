"""
Qubit-saving reuse: greedy pair selection, tradeoff sweep and minimum-qubit estimates

Regular circuits take the pair that keeps the critical path shortest,
skipping pairs that would strand another qubit while the limit is still
more than one step away.
Commuting circuits draw their pairs from a wire layout of the interaction
graph and order them by the duration of the matching schedule, falling
back to a wire-load estimate on large gate groups.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from .circuit import CaqrError, Circuit, CircuitError, InfeasibleError, ReuseError, interaction_graph
from .coloring import color_interaction_graph, layout_pairs
from .config import COMMUTING_CANDIDATE_POOL, EXACT_SCORING_EDGE_LIMIT
from .dag import DependencyDag, build_dag, critical_path_length, dummy_weight, node_weights, path_profile
from .hardware import Calibration, CouplingGraph, DurationModel, Durations
from .metrics import Metrics, measure
from .reuse import (
    ReusePair, WireMap, _as_pair, apply_reuse_pair, enumerate_candidates, materialize, qubit_reach, reuse_chains,
)
from .scheduling import schedule_commuting
from .sr_caqr import map_baseline

OBJECTIVES = ('depth', 'duration', 'esp', 'swaps')


@dataclass(frozen=True)
class TransformResult:
    original: Circuit
    circuit: Circuit
    pairs: Tuple[Tuple[int, int], ...]
    wire_map: WireMap
    metrics: Metrics

    @property
    def num_qubits(self) -> int:
        return self.circuit.num_qubits

    def to_json(self) -> dict:
        return {
            'name': self.original.name,
            'original_qubits': self.original.num_qubits,
            'qubits': self.num_qubits,
            'pairs': [list(p) for p in self.pairs],
            'metrics': self.metrics.to_json(),
            'wire_map': self.wire_map.to_json(),
        }


@dataclass(frozen=True)
class Infeasible:
    limit: int
    reached: int
    pairs: Tuple[Tuple[int, int], ...] = ()
    reason: str = ''

    def __str__(self) -> str:
        return f"cannot reach {self.limit} qubits (stopped at {self.reached}): {self.reason}"


@dataclass(frozen=True)
class TradeoffPoint:
    qubits: int
    depth: int
    duration: float
    swaps: Optional[int] = None
    esp: Optional[float] = None
    result: Optional[TransformResult] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.qubits < 1:
            raise CircuitError(f"a tradeoff point needs at least one qubit, got {self.qubits}")

    def to_row(self) -> dict:
        return {
            'qubits': self.qubits,
            'depth': self.depth,
            'duration_dt': self.duration,
            'swaps': self.swaps,
            'esp': self.esp,
        }


def _logical(durations: Optional[DurationModel]) -> Durations:
    if durations is None:
        return Durations()
    if isinstance(durations, Calibration):
        return Durations.from_calibration(durations)
    return durations


def evaluate_pair(dag: DependencyDag, pair, durations: Optional[DurationModel] = None) -> float:
    """Critical path with the pair tentatively applied; dag is left as it was"""
    tentative = apply_reuse_pair(dag, pair, None if durations is None else durations.mr)
    weights = None if durations is None else node_weights(tentative, durations)
    return critical_path_length(tentative, weights)


def _precedes(reach: Dict[int, int], a: int, b: int) -> bool:
    return bool((reach[a] >> b) & 1) and not (reach[b] >> a) & 1


def skips_over(pair: ReusePair, reach: Dict[int, int]) -> bool:
    """Some other qubit is forced after the producer and before the consumer

    That qubit can never join the wire afterwards.
    """
    i, j = pair.producer, pair.consumer
    return any(_precedes(reach, i, k) and _precedes(reach, k, j) for k in reach if k not in (i, j))


def _regular_step(dag: DependencyDag, limit: int = 1) -> Optional[ReusePair]:
    candidates = enumerate_candidates(dag.circuit, dag)
    if not candidates:
        return None
    if dag.circuit.num_qubits - len(dag.pairs) - 1 > limit:
        reach = qubit_reach(dag)
        candidates = [p for p in candidates if not skips_over(p, reach)] or candidates
    head, tail = path_profile(dag)
    current = max(head.values(), default=0)
    mr, meas = dag.durations.mr, dag.durations.measure

    def key(pair: ReusePair):
        src = dag.qubit_nodes(pair.producer)
        dst = dag.qubit_nodes(pair.consumer)
        # only paths through the new dummy node can lengthen the critical path
        through = (max((head[n] for n in src), default=0) + dummy_weight(dag, pair.producer, mr, meas)
                   + max((tail[n] for n in dst), default=0))
        return (max(current, through), len(dst), pair.as_tuple())

    return min(candidates, key=key)


def _degrees(circuit: Circuit) -> Dict[int, int]:
    g = interaction_graph(circuit)
    return {q: g.degree(q) for q in g.nodes}


def _chain_loads(circuit: Circuit, pairs: Sequence[Tuple[int, int]], durations: Durations,
                 degree: Dict[int, int]) -> Dict[int, float]:
    """Estimated busy time per wire keyed by the wire's tail qubit"""
    loads = {}
    for chain in reuse_chains(circuit.num_qubits, pairs):
        loads[chain[-1]] = (sum(degree[q] for q in chain) * durations.cx
                            + (len(chain) - 1) * durations.mr)
    return loads


def _commuting_step(dag: DependencyDag, durations: Durations,
                    plan: FrozenSet[Tuple[int, int]] = frozenset()) -> Optional[ReusePair]:
    circuit = dag.circuit
    candidates = enumerate_candidates(circuit, dag)
    # pairs outside the wire layout only once the layout is used up
    candidates = [p for p in candidates if p.as_tuple() in plan] or candidates
    if not candidates:
        return None
    degree = _degrees(circuit)
    candidates.sort(key=lambda p: (degree[p.consumer], p.as_tuple()))
    pairs = list(dag.pairs)

    if len(circuit.two_qubit_gates()) > EXACT_SCORING_EDGE_LIMIT:
        loads = _chain_loads(circuit, pairs, durations, degree)
        heads = {chain[0]: chain[-1] for chain in reuse_chains(circuit.num_qubits, pairs)}
        worst = max(loads.values(), default=0)

        def proxy(pair: ReusePair):
            merged = loads[pair.producer] + loads[heads[pair.consumer]] + durations.mr
            return (max(worst, merged), merged, degree[pair.consumer], pair.as_tuple())

        return min(candidates, key=proxy)

    best, best_key = None, None
    scored = 0
    for pair in candidates:
        if scored == COMMUTING_CANDIDATE_POOL:
            break
        try:
            duration = schedule_commuting(circuit, pairs + [pair.as_tuple()], durations).duration
        except ReuseError as e:
            logging.debug(f"Skipping {pair}: {e}")
            continue
        scored += 1
        key = (duration, degree[pair.consumer], pair.as_tuple())
        if best_key is None or key < best_key:
            best, best_key = pair, key
    return best


def reduction_trajectory(circuit: Circuit, durations: Optional[DurationModel] = None,
                         limit: int = 1) -> Iterator[Tuple[Tuple[int, int], ...]]:
    """Greedy path as successive pair lists, starting from no reuse

    Regular circuits only take pairs that skip over another qubit on the
    step that reaches the limit, or when nothing else is left.
    """
    durations = _logical(durations)
    dag = build_dag(circuit, durations)
    plan = frozenset(layout_pairs(interaction_graph(circuit))) if circuit.is_commuting else frozenset()
    yield ()
    while True:
        if circuit.is_commuting:
            pair = _commuting_step(dag, durations, plan)
        else:
            pair = _regular_step(dag, limit)
        if pair is None:
            return
        dag = apply_reuse_pair(dag, pair)
        logging.debug(f"Greedy step {len(dag.pairs)}: chose {pair}, "
                      f"{circuit.num_qubits - len(dag.pairs)} qubits left")
        yield dag.pairs


def transform(circuit: Circuit, pairs: Sequence, durations: Optional[DurationModel] = None) -> TransformResult:
    """Realize a pair list; commuting circuits are ordered by the matching scheduler first"""
    durations = _logical(durations)
    pairs = tuple(_as_pair(p).as_tuple() for p in pairs)
    if circuit.is_commuting:
        schedule = schedule_commuting(circuit, pairs, durations)
        out, wire_map = schedule.circuit, schedule.wire_map
    else:
        out, wire_map = materialize(circuit, pairs)
    return TransformResult(circuit, out, pairs, wire_map, measure(out, durations))


def maximal_reuse(circuit: Circuit, durations: Optional[DurationModel] = None) -> TransformResult:
    """Follow the greedy path to its end"""
    last: Tuple[Tuple[int, int], ...] = ()
    for last in reduction_trajectory(circuit, durations):
        pass
    return transform(circuit, last, durations)


def _check_limit(circuit: Circuit, limit: int):
    if not 1 <= limit <= max(circuit.num_qubits, 1):
        raise CircuitError(f"qubit limit {limit} is outside 1..{circuit.num_qubits}")


def reduce_to_limit(circuit: Circuit, limit: int,
                    durations: Optional[DurationModel] = None) -> Union[TransformResult, Infeasible]:
    _check_limit(circuit, limit)
    pairs: Tuple[Tuple[int, int], ...] = ()
    for pairs in reduction_trajectory(circuit, durations, limit):
        if circuit.num_qubits - len(pairs) <= limit:
            result = transform(circuit, pairs, durations)
            logging.info(f"Reduced '{circuit.name}' from {circuit.num_qubits} to {result.num_qubits} qubits")
            return result
    reached = circuit.num_qubits - len(pairs)
    logging.info(f"Reduction of '{circuit.name}' stalled at {reached} qubits (limit {limit})")
    return Infeasible(limit, reached, pairs, 'no valid reuse pair left')


def _route(result: TransformResult, coupling: CouplingGraph, calibration: Calibration) -> Tuple[Optional[int], Optional[float]]:
    try:
        mapped = map_baseline(result.circuit, coupling, calibration)
    except InfeasibleError as e:
        logging.warning(f"Point with {result.num_qubits} qubits not routed: {e}")
        return None, None
    return mapped.swaps, mapped.metrics.esp


def sweep(circuit: Circuit, durations: Optional[DurationModel] = None,
          coupling: Optional[CouplingGraph] = None, calibration: Optional[Calibration] = None,
          qubit_counts: Optional[Iterable[int]] = None) -> List[TradeoffPoint]:
    """One point per qubit count along the greedy path, most qubits first"""
    if calibration is not None and durations is None:
        durations = Durations.from_calibration(calibration)
    wanted = None if qubit_counts is None else set(qubit_counts)
    points = []
    for pairs in reduction_trajectory(circuit, durations):
        count = circuit.num_qubits - len(pairs)
        if wanted is not None and count not in wanted:
            continue
        result = transform(circuit, pairs, durations)
        swaps = esp = None
        if coupling is not None:
            swaps, esp = _route(result, coupling, calibration or Calibration.uniform(coupling))
        points.append(TradeoffPoint(
            qubits=max(result.num_qubits, 1),
            depth=result.metrics.depth,
            duration=result.metrics.duration,
            swaps=swaps,
            esp=esp,
            result=result,
        ))
        logging.info(f"Sweep '{circuit.name}': {count} qubits, depth {result.metrics.depth}, "
                     f"duration {result.metrics.duration} dt")
    return points


def select_point(points: Sequence[TradeoffPoint], objective: str,
                 qubit_range: Optional[Tuple[int, int]] = None) -> TradeoffPoint:
    """Best point for the objective inside the qubit range; ties go to fewer qubits"""
    if objective not in OBJECTIVES:
        raise CaqrError(f"unknown objective '{objective}', expected one of {', '.join(OBJECTIVES)}")
    pool = [p for p in points if getattr(p, objective) is not None]
    if qubit_range is not None:
        lo, hi = qubit_range
        pool = [p for p in pool if lo <= p.qubits <= hi]
    if not pool:
        raise CaqrError(f"no sweep point carries '{objective}' in the requested range")
    if objective == 'esp':
        return min(pool, key=lambda p: (-p.esp, p.qubits))
    return min(pool, key=lambda p: (getattr(p, objective), p.qubits))


def min_qubits(circuit: Circuit, durations: Optional[DurationModel] = None) -> int:
    """Fewest qubits the reduction path reaches

    For commuting circuits the color count is a lower bound; the two agree
    whenever the interaction graph can be laid out on that many wires.
    """
    last: Tuple[Tuple[int, int], ...] = ()
    for last in reduction_trajectory(circuit, durations):
        pass
    reached = max(circuit.num_qubits - len(last), 1)
    if circuit.is_commuting:
        colors = color_interaction_graph(interaction_graph(circuit)).num_colors
        if reached > colors:
            logging.info(f"'{circuit.name}' needs {reached} wires, above its {colors}-color bound")
    return reached


def has_reuse_opportunity(circuit: Circuit) -> bool:
    return bool(enumerate_candidates(circuit, build_dag(circuit)))
