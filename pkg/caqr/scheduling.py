"""
Layer-by-layer scheduling of a commuting gate group under reuse pairs

Each round drops the gates whose qubits still wait on a producer, weights
the gates of qubits that others wait on, and schedules a maximum-weight
matching of what is left as one layer.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from .circuit import Circuit, CircuitError, Instruction, ReuseError
from .config import MATCHING_GREEDY_ABOVE
from .hardware import DurationModel, Durations
from .metrics import circuit_duration
from .reuse import WireMap, _as_pair, apply_pairs, materialize


@dataclass(frozen=True)
class CommutingSchedule:
    circuit: Circuit
    duration: float
    layers: Tuple[Tuple[int, ...], ...]
    wire_map: WireMap
    ordered: Circuit

    @property
    def num_layers(self) -> int:
        return len(self.layers)


def _matching_graph(gates: Sequence[Instruction], weight: Dict[int, float]) -> Tuple[nx.Graph, Dict[Tuple[int, int], int]]:
    """Simple graph over the gates; a repeated qubit pair keeps its heaviest, then lowest-id, gate"""
    best: Dict[Tuple[int, int], int] = {}
    for inst in gates:
        key = tuple(sorted(inst.qubits))
        held = best.get(key)
        if held is None or (-weight[inst.id], inst.id) < (-weight[held], held):
            best[key] = inst.id
    g = nx.Graph()
    g.add_nodes_from(q for inst in gates for q in inst.qubits)
    m = g.number_of_nodes()
    for (u, v), gid in best.items():
        # +1 per edge prefers larger matchings among equal-weight ones
        g.add_edge(u, v, weight=weight[gid] * m + 1)
    return g, best


def _greedy_matching(g: nx.Graph, best: Dict[Tuple[int, int], int]) -> List[Tuple[int, int]]:
    edges = sorted(g.edges(data='weight'), key=lambda e: (-e[2], best[tuple(sorted(e[:2]))]))
    used = set()
    out = []
    for u, v, _ in edges:
        if u in used or v in used:
            continue
        used.update((u, v))
        out.append((u, v))
    return out


def select_layer(gates: Sequence[Instruction], weight: Dict[int, float]) -> List[int]:
    """Gate ids of a maximum-weight matching; greedy on very large frontiers"""
    if not gates:
        return []
    g, best = _matching_graph(gates, weight)
    if g.number_of_nodes() > MATCHING_GREEDY_ABOVE:
        matched = _greedy_matching(g, best)
    else:
        matched = nx.max_weight_matching(g, maxcardinality=False, weight='weight')
    return sorted(best[tuple(sorted(e))] for e in matched)


def _chain_ancestors(pairs: Sequence[Tuple[int, int]]) -> Dict[int, List[int]]:
    producer_of = {c: p for p, c in pairs}
    ancestors: Dict[int, List[int]] = {}
    for q in producer_of:
        walk, cur = [], q
        while cur in producer_of:
            cur = producer_of[cur]
            walk.append(cur)
        ancestors[q] = walk
    return ancestors


def _layers(group: List[Instruction], pairs: Sequence[Tuple[int, int]]) -> List[List[Instruction]]:
    ancestors = _chain_ancestors(pairs)
    producers = {p for p, _ in pairs}
    remaining: Dict[int, Instruction] = {inst.id: inst for inst in group}
    pending: Dict[int, int] = {}
    for inst in group:
        for q in inst.qubits:
            pending[q] = pending.get(q, 0) + 1

    def blocked(inst: Instruction) -> bool:
        return any(pending.get(a, 0) for q in inst.qubits for a in ancestors.get(q, ()))

    layers = []
    while remaining:
        frontier = [inst for inst in remaining.values() if not blocked(inst)]
        if not frontier:
            raise ReuseError("reuse pairs deadlock the commuting group")
        big = len(remaining)
        weight = {inst.id: big if any(q in producers for q in inst.qubits) else 1 for inst in frontier}
        chosen = select_layer(frontier, weight)
        layer = [remaining.pop(gid) for gid in chosen]
        for inst in layer:
            for q in inst.qubits:
                pending[q] -= 1
        layers.append(layer)
    return layers


def schedule_commuting(circuit: Circuit, pairs: Sequence = (),
                       durations: Optional[DurationModel] = None) -> CommutingSchedule:
    """Order the commuting group into matching layers, then realize the reuse pairs"""
    durations = durations or Durations()
    groups = circuit.commuting_groups
    if len(groups) > 1:
        raise CircuitError(f"expected one commuting group, found {len(groups)}")
    pairs = [_as_pair(p).as_tuple() for p in pairs]
    # rejects pairs that break either reuse condition or the wire chains
    apply_pairs(circuit, pairs, durations)

    group = [inst for inst in circuit.instructions if inst.commuting_group is not None]
    layers = _layers(group, pairs) if group else []

    ordered: List[Instruction] = []
    placed = False
    for inst in circuit.instructions:
        if inst.commuting_group is None:
            ordered.append(inst)
        elif not placed:
            ordered.extend(replace(g, commuting_group=None) for layer in layers for g in layer)
            placed = True
    ordered_circuit = circuit.with_instructions(ordered, renumber=True)

    materialized, wire_map = materialize(ordered_circuit, pairs)
    duration = circuit_duration(materialized, durations)
    logging.debug(f"Scheduled '{circuit.name}' into {len(layers)} commuting layers with {len(pairs)} pairs")
    return CommutingSchedule(
        circuit=materialized,
        duration=duration,
        layers=tuple(tuple(g.id for g in layer) for layer in layers),
        wire_map=wire_map,
        ordered=ordered_circuit,
    )
