"""
Exact branch-enumerating statevector simulator for dynamic circuits

Every mid-circuit MEASURE forks the running branches by outcome, so the
returned distribution is exact rather than sampled.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from math import cos, pi, sin, sqrt
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from .circuit import Circuit, GateKind, Instruction, SimulationError
from .config import MAX_SIM_WIRES, PROB_DIGITS

_SQRT2_INV = 1 / sqrt(2)
_PRUNE = 1e-15

_FIXED_1Q = {
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.SX: np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex) / 2,
    GateKind.T: np.array([[1, 0], [0, np.exp(1j * pi / 4)]], dtype=complex),
}

_PARAM_1Q = {
    GateKind.RZ: lambda t: np.array([[np.exp(-1j * t / 2), 0], [0, np.exp(1j * t / 2)]], dtype=complex),
    GateKind.RX: lambda t: np.array([[cos(t / 2), -1j * sin(t / 2)], [-1j * sin(t / 2), cos(t / 2)]], dtype=complex),
}


@dataclass(frozen=True)
class Distribution:
    """Outcome probabilities keyed by bitstrings; character k is clbit k"""
    bits: int
    probs: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for key in self.probs:
            if len(key) != self.bits:
                raise SimulationError(f"outcome '{key}' does not have {self.bits} bits")

    def __getitem__(self, key: str) -> float:
        return self.probs.get(key, 0.0)

    def total(self) -> float:
        return float(sum(self.probs.values()))

    def to_json(self) -> dict:
        return {'bits': self.bits, 'probs': dict(sorted(self.probs.items()))}

    @classmethod
    def from_json(cls, data: dict) -> 'Distribution':
        try:
            return cls(int(data['bits']), {str(k): float(v) for k, v in data['probs'].items()})
        except (KeyError, TypeError, ValueError) as e:
            raise SimulationError(f"malformed distribution JSON: {e}") from e


def _apply_single_qubit(state: np.ndarray, matrix: np.ndarray, qubit: int, n: int) -> np.ndarray:
    axes = list(range(n))
    axes[qubit], axes[-1] = axes[-1], axes[qubit]
    state = np.transpose(state, axes)
    state = np.tensordot(state, matrix, axes=([-1], [1]))
    return np.transpose(state, axes)


def _apply_two_qubit(state: np.ndarray, inst: Instruction, n: int) -> np.ndarray:
    q0, q1 = inst.qubits
    new = state.copy()

    def idx(v0, v1):
        i = [slice(None)] * n
        i[q0], i[q1] = v0, v1
        return tuple(i)

    kind = inst.kind
    if kind is GateKind.CX:
        new[idx(1, 0)], new[idx(1, 1)] = state[idx(1, 1)], state[idx(1, 0)]
    elif kind is GateKind.CZ:
        new[idx(1, 1)] = -state[idx(1, 1)]
    elif kind is GateKind.CP:
        new[idx(1, 1)] = state[idx(1, 1)] * np.exp(1j * inst.params[0])
    elif kind is GateKind.SWAP:
        new[idx(0, 1)], new[idx(1, 0)] = state[idx(1, 0)], state[idx(0, 1)]
    return new


def _apply_unitary(state: np.ndarray, inst: Instruction, n: int) -> np.ndarray:
    if inst.kind.is_two_qubit:
        return _apply_two_qubit(state, inst, n)
    if inst.kind in _FIXED_1Q:
        matrix = _FIXED_1Q[inst.kind]
    else:
        matrix = _PARAM_1Q[inst.kind](inst.params[0])
    return _apply_single_qubit(state, matrix, inst.qubit, n)


def _project(state: np.ndarray, qubit: int, n: int) -> List[Tuple[int, float, np.ndarray]]:
    """(outcome, probability, renormalized post-measurement state) for each possible outcome"""
    out = []
    for outcome in (0, 1):
        idx = [slice(None)] * n
        idx[qubit] = 1 - outcome
        projected = state.copy()
        projected[tuple(idx)] = 0
        p = float(np.sum(np.abs(projected) ** 2))
        if p > _PRUNE:
            out.append((outcome, p, projected / np.sqrt(p)))
    return out


@dataclass
class _Branch:
    weight: float
    state: np.ndarray
    clbits: List[int]


def _drop_idle_wires(circuit: Circuit) -> Circuit:
    used = circuit.used_qubits()
    if len(used) == circuit.num_qubits:
        return circuit
    index = {q: i for i, q in enumerate(used)}
    instructions = tuple(replace(inst, qubits=tuple(index[q] for q in inst.qubits)) for inst in circuit.instructions)
    return Circuit(len(used), circuit.num_clbits, instructions, circuit.name)


def simulate_exact(circuit: Circuit, scratch: Iterable[int] = (), output_clbits: Optional[int] = None) -> Distribution:
    """Exact outcome distribution over the non-scratch clbits

    Wires no instruction touches are dropped first, so a routed circuit on a
    large device only counts its busy physical qubits against the budget.
    """
    circuit = _drop_idle_wires(circuit)
    n = circuit.num_qubits
    if n > MAX_SIM_WIRES:
        raise SimulationError(f"{n} wires exceed the simulator budget of {MAX_SIM_WIRES}")

    initial = np.zeros([2] * n, dtype=complex) if n else np.ones((), dtype=complex)
    initial[(0,) * n] = 1.0
    branches = [_Branch(1.0, initial, [0] * circuit.num_clbits)]

    for inst in circuit.instructions:
        kind = inst.kind
        if kind.is_unitary:
            for b in branches:
                b.state = _apply_unitary(b.state, inst, n)
        elif kind is GateKind.CX_CLASSICAL:
            for b in branches:
                if b.clbits[inst.clbit]:
                    b.state = _apply_single_qubit(b.state, _FIXED_1Q[GateKind.X], inst.qubit, n)
        else:
            forked = []
            for b in branches:
                for outcome, p, state in _project(b.state, inst.qubit, n):
                    clbits = list(b.clbits)
                    if kind is GateKind.MEASURE:
                        clbits[inst.clbit] = outcome
                    elif outcome:
                        state = _apply_single_qubit(state, _FIXED_1Q[GateKind.X], inst.qubit, n)
                    forked.append(_Branch(b.weight * p, state, clbits))
            branches = forked

    excluded = set(scratch)
    if output_clbits is not None:
        excluded.update(range(output_clbits, circuit.num_clbits))
    kept = [c for c in range(circuit.num_clbits) if c not in excluded]
    probs: Dict[str, float] = {}
    for b in branches:
        key = ''.join(str(b.clbits[c]) for c in kept)
        probs[key] = probs.get(key, 0.0) + b.weight
    # drop float drift from the branch products
    probs = {k: round(p, PROB_DIGITS) for k, p in probs.items() if round(p, PROB_DIGITS) > 0}
    logging.debug(f"Simulated '{circuit.name}': {len(branches)} branches, {len(probs)} outcomes")
    return Distribution(len(kept), probs)


def sample_shots(dist: Distribution, shots: int, seed: Optional[int] = None) -> Dict[str, int]:
    """Draw shot counts from an exact distribution"""
    if shots < 1:
        raise SimulationError(f"shots must be positive, got {shots}")
    rng = np.random.default_rng(seed)
    keys = sorted(dist.probs)
    probs = np.array([dist.probs[k] for k in keys], dtype=float)
    probs /= probs.sum()
    draws = rng.choice(len(keys), size=shots, p=probs)
    values, counts = np.unique(draws, return_counts=True)
    return {keys[v]: int(c) for v, c in zip(values, counts)}
