"""
Circuit metrics: depth, duration, estimated success probability, TVD, max-cut value
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Union

from .circuit import Circuit, CircuitError, GateKind, ProblemGraph, SimulationError
from .dag import build_dag, critical_path_length, fused_reset_ids
from .hardware import Calibration, DurationModel, edge_key
from .simulator import Distribution


@dataclass(frozen=True)
class Metrics:
    depth: int
    duration: float
    swaps: int = 0
    esp: Optional[float] = None
    two_qubit_gates: int = 0

    def to_json(self) -> dict:
        return {
            'depth': self.depth,
            'duration_dt': self.duration,
            'swaps': self.swaps,
            'esp': self.esp,
            'two_qubit_gates': self.two_qubit_gates,
        }


def circuit_depth(circuit: Circuit) -> int:
    """ASAP layer count; a fused MEASURE + CX_CLASSICAL reset is one layer element"""
    fused = fused_reset_ids(circuit)
    level: Dict = {}
    depth = 0
    for inst in circuit.instructions:
        wires = [('q', q) for q in inst.qubits] + [('c', c) for c in inst.clbits]
        start = max((level.get(w, 0) for w in wires), default=0)
        layer = start if inst.id in fused else start + 1
        for w in wires:
            level[w] = layer
        depth = max(depth, layer)
    return depth


def circuit_duration(circuit: Circuit, durations: DurationModel) -> float:
    """Weighted critical path in dt"""
    return critical_path_length(build_dag(circuit, durations))


def two_qubit_gate_count(circuit: Circuit) -> int:
    return sum(3 if inst.kind is GateKind.SWAP else 1 for inst in circuit.two_qubit_gates())


def estimated_success_probability(circuit: Circuit, calibration: Calibration) -> float:
    """Product of gate and readout success probabilities on a mapped circuit"""
    esp = 1.0
    for inst in circuit.instructions:
        for q in inst.qubits:
            if q not in calibration.readout_error:
                raise CircuitError(f"circuit is not mapped: qubit {q} has no calibration")
        kind = inst.kind
        if kind.is_two_qubit:
            u, v = inst.qubits
            if edge_key(u, v) not in calibration.cx_error:
                raise CircuitError(f"circuit is not mapped: ({u}, {v}) is not a coupling edge")
            success = 1.0 - calibration.cx_error[edge_key(u, v)]
            esp *= success ** 3 if kind is GateKind.SWAP else success
        elif kind is GateKind.MEASURE:
            esp *= 1.0 - calibration.readout(inst.qubit)
        elif kind is not GateKind.RESET:
            esp *= 1.0 - calibration.sq_error
    return esp


def measure(circuit: Circuit, durations: DurationModel, swaps: int = 0,
            calibration: Optional[Calibration] = None) -> Metrics:
    return Metrics(
        depth=circuit_depth(circuit),
        duration=circuit_duration(circuit, durations),
        swaps=swaps,
        esp=estimated_success_probability(circuit, calibration) if calibration is not None else None,
        two_qubit_gates=two_qubit_gate_count(circuit),
    )


def _probs(dist: Union[Distribution, Mapping[str, float]]) -> Mapping[str, float]:
    return dist.probs if isinstance(dist, Distribution) else dist


def total_variation_distance(p: Union[Distribution, Mapping[str, float]],
                             q: Union[Distribution, Mapping[str, float]]) -> float:
    """Half the L1 distance between two outcome distributions"""
    pp, qq = _probs(p), _probs(q)
    lengths = {len(k) for k in pp} | {len(k) for k in qq}
    if len(lengths) > 1:
        raise SimulationError(f"distributions have mismatched key lengths {sorted(lengths)}")
    keys = set(pp) | set(qq)
    return 0.5 * sum(abs(pp.get(k, 0.0) - qq.get(k, 0.0)) for k in keys)


def cut_value(bits: str, graph: ProblemGraph) -> int:
    return sum(1 for u, v in graph.edges if bits[u] != bits[v])


def maxcut_expectation(dist: Union[Distribution, Mapping[str, float]], graph: ProblemGraph) -> float:
    """Expected number of cut edges; character k of an outcome is vertex k"""
    probs = _probs(dist)
    for key in probs:
        if len(key) != graph.n:
            raise SimulationError(f"outcome '{key}' does not match a {graph.n}-vertex graph")
    return sum(p * cut_value(bits, graph) for bits, p in probs.items())
