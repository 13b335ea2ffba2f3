"""
Circuit intermediate representation shared by every pass

Contains:
    - the exception hierarchy
    - GateKind: closed gate enumeration
    - Instruction / Circuit: immutable, validated on construction
    - ProblemGraph: max-cut input graphs for the QAOA generator
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

import networkx as nx


class CaqrError(Exception):
    """Base class for every error raised by the transpiler"""


class CircuitError(CaqrError, ValueError):
    """Invalid instruction or circuit"""


class QasmError(CircuitError):
    """QASM input problem with its source position"""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class DagCycleError(CaqrError):
    """Dependency graph contains a directed cycle"""


class ReuseError(CaqrError):
    """Invalid reuse pair or inconsistent reuse chain"""


class ArchitectureError(CaqrError, ValueError):
    """Bad coupling graph or calibration data"""


class InfeasibleError(CaqrError):
    """The request cannot be met on the given qubit budget"""


class SimulationError(CaqrError):
    """Simulator budget or distribution shape problem"""


class GateKind(Enum):
    H = 'h'
    X = 'x'
    Z = 'z'
    SX = 'sx'
    T = 't'
    RZ = 'rz'
    RX = 'rx'
    CX = 'cx'
    CZ = 'cz'
    CP = 'cp'
    SWAP = 'swap'
    MEASURE = 'measure'
    RESET = 'reset'
    CX_CLASSICAL = 'if_x'

    @property
    def num_qubits(self) -> int:
        return 2 if self in _TWO_QUBIT else 1

    @property
    def num_clbits(self) -> int:
        return 1 if self in (GateKind.MEASURE, GateKind.CX_CLASSICAL) else 0

    @property
    def num_params(self) -> int:
        return 1 if self in (GateKind.RZ, GateKind.RX, GateKind.CP) else 0

    @property
    def is_two_qubit(self) -> bool:
        return self in _TWO_QUBIT

    @property
    def is_diagonal(self) -> bool:
        return self in (GateKind.CZ, GateKind.CP)

    @property
    def is_unitary(self) -> bool:
        return self not in (GateKind.MEASURE, GateKind.RESET, GateKind.CX_CLASSICAL)


_TWO_QUBIT = frozenset({GateKind.CX, GateKind.CZ, GateKind.CP, GateKind.SWAP})

QASM_GATES: Dict[str, GateKind] = {
    kind.value: kind for kind in GateKind if kind.is_unitary
}


@dataclass(frozen=True)
class Instruction:
    id: int
    kind: GateKind
    qubits: Tuple[int, ...]
    clbits: Tuple[int, ...] = ()
    params: Tuple[float, ...] = ()
    commuting_group: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, 'qubits', tuple(self.qubits))
        object.__setattr__(self, 'clbits', tuple(self.clbits))
        object.__setattr__(self, 'params', tuple(float(p) for p in self.params))
        if len(self.qubits) != self.kind.num_qubits:
            raise CircuitError(f"{self.kind.name} takes {self.kind.num_qubits} qubit(s), got {len(self.qubits)}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{self.kind.name} has identical operands {self.qubits}")
        if len(self.clbits) != self.kind.num_clbits:
            raise CircuitError(f"{self.kind.name} takes {self.kind.num_clbits} clbit(s), got {len(self.clbits)}")
        if len(self.params) != self.kind.num_params:
            raise CircuitError(f"{self.kind.name} takes {self.kind.num_params} parameter(s), got {len(self.params)}")
        if self.commuting_group is not None and not self.kind.is_diagonal:
            raise CircuitError(f"{self.kind.name} cannot join a commuting group (only CZ/CP)")

    @property
    def qubit(self) -> int:
        return self.qubits[0]

    @property
    def clbit(self) -> int:
        return self.clbits[0]

    def relabeled(self, qubit_map: Dict[int, int], clbit_map: Optional[Dict[int, int]] = None,
                  new_id: Optional[int] = None) -> 'Instruction':
        clbit_map = clbit_map or {}
        return replace(
            self,
            id=self.id if new_id is None else new_id,
            qubits=tuple(qubit_map.get(q, q) for q in self.qubits),
            clbits=tuple(clbit_map.get(c, c) for c in self.clbits),
        )

    def signature(self) -> tuple:
        """Structural identity, ignoring the instruction id"""
        return (self.kind, self.qubits, self.clbits, self.params, self.commuting_group)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    num_clbits: int
    instructions: Tuple[Instruction, ...] = ()
    name: str = 'circuit'

    def __post_init__(self):
        object.__setattr__(self, 'instructions', tuple(self.instructions))
        _validate(self)

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)

    @property
    def commuting_groups(self) -> List[int]:
        groups = []
        for inst in self.instructions:
            if inst.commuting_group is not None and inst.commuting_group not in groups:
                groups.append(inst.commuting_group)
        return groups

    @property
    def is_commuting(self) -> bool:
        return bool(self.commuting_groups)

    def on_qubit(self, qubit: int) -> List[Instruction]:
        return [inst for inst in self.instructions if qubit in inst.qubits]

    def two_qubit_gates(self) -> List[Instruction]:
        return [inst for inst in self.instructions if inst.kind.is_two_qubit]

    def used_qubits(self) -> List[int]:
        return sorted({q for inst in self.instructions for q in inst.qubits})

    def measured_qubits(self) -> Dict[int, int]:
        """Qubit -> clbit of its last MEASURE"""
        out = {}
        for inst in self.instructions:
            if inst.kind is GateKind.MEASURE:
                out[inst.qubit] = inst.clbit
        return out

    def with_instructions(self, instructions: Iterable[Instruction], renumber: bool = False, **changes) -> 'Circuit':
        instructions = list(instructions)
        if renumber:
            instructions = [replace(inst, id=i) for i, inst in enumerate(instructions)]
        return replace(self, instructions=tuple(instructions), **changes)


def _validate(circuit: Circuit):
    if circuit.num_qubits < 0 or circuit.num_clbits < 0:
        raise CircuitError("register sizes must be non-negative")
    seen_ids = set()
    measured = set()
    closed_groups = set()
    current_group = None
    for inst in circuit.instructions:
        if inst.id in seen_ids:
            raise CircuitError(f"duplicate instruction id {inst.id}")
        seen_ids.add(inst.id)
        for q in inst.qubits:
            if not 0 <= q < circuit.num_qubits:
                raise CircuitError(f"qubit {q} out of range for {circuit.num_qubits} qubits")
        for c in inst.clbits:
            if not 0 <= c < circuit.num_clbits:
                raise CircuitError(f"clbit {c} out of range for {circuit.num_clbits} clbits")

        # commuting groups are contiguous blocks
        if inst.commuting_group != current_group:
            if current_group is not None:
                closed_groups.add(current_group)
            if inst.commuting_group in closed_groups:
                raise CircuitError(f"commuting group {inst.commuting_group} is not contiguous")
            current_group = inst.commuting_group

        if inst.kind in (GateKind.RESET, GateKind.CX_CLASSICAL):
            measured.discard(inst.qubit)
            continue
        if inst.kind is GateKind.SWAP:
            # a SWAP moves a measured state along with it
            u, v = inst.qubits
            moved = {v} if u in measured else set()
            moved |= {u} if v in measured else set()
            measured -= {u, v}
            measured |= moved
            continue
        for q in inst.qubits:
            if q in measured:
                raise CircuitError(f"qubit {q} is used after measurement without a reset")
        if inst.kind is GateKind.MEASURE:
            measured.add(inst.qubit)


def structurally_equal(a: Circuit, b: Circuit) -> bool:
    """Same registers and instruction sequence, ignoring ids and names"""
    return (
        a.num_qubits == b.num_qubits
        and a.num_clbits == b.num_clbits
        and [i.signature() for i in a.instructions] == [i.signature() for i in b.instructions]
    )


def interaction_graph(circuit: Circuit, instructions: Optional[Iterable[Instruction]] = None) -> nx.MultiGraph:
    """One vertex per qubit, one edge per 2q gate (keyed by instruction id)"""
    g = nx.MultiGraph()
    g.add_nodes_from(range(circuit.num_qubits))
    for inst in instructions if instructions is not None else circuit.instructions:
        if inst.kind.is_two_qubit:
            u, v = inst.qubits
            g.add_edge(u, v, key=inst.id)
    return g


class CircuitBuilder:
    """Appends instructions with sequential ids"""

    def __init__(self, num_qubits: int, num_clbits: int, name: str = 'circuit'):
        self.num_qubits = num_qubits
        self.num_clbits = num_clbits
        self.name = name
        self.instructions: List[Instruction] = []

    def add(self, kind: GateKind, qubits, clbits=(), params=(), commuting_group=None) -> 'CircuitBuilder':
        self.instructions.append(Instruction(
            id=len(self.instructions),
            kind=kind,
            qubits=tuple(qubits),
            clbits=tuple(clbits),
            params=tuple(params),
            commuting_group=commuting_group,
        ))
        return self

    def build(self) -> Circuit:
        return Circuit(self.num_qubits, self.num_clbits, tuple(self.instructions), self.name)


@dataclass(frozen=True)
class ProblemGraph:
    n: int
    edges: frozenset = field(default_factory=frozenset)
    kind: str = 'random'
    density: float = 0.0
    seed: int = 0

    def __post_init__(self):
        normalized = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise CircuitError(f"self-loop on vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise CircuitError(f"edge ({u}, {v}) out of range for {self.n} vertices")
            normalized.add((min(u, v), max(u, v)))
        object.__setattr__(self, 'edges', frozenset(normalized))

    def sorted_edges(self) -> List[Tuple[int, int]]:
        return sorted(self.edges)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    def to_json(self) -> dict:
        return {
            'n': self.n,
            'edges': [list(e) for e in self.sorted_edges()],
            'kind': self.kind,
            'density': self.density,
            'seed': self.seed,
        }

    @classmethod
    def from_json(cls, data: dict) -> 'ProblemGraph':
        try:
            return cls(
                n=int(data['n']),
                edges=frozenset(tuple(e) for e in data.get('edges', [])),
                kind=data.get('kind', 'random'),
                density=float(data.get('density', 0.0)),
                seed=int(data.get('seed', 0)),
            )
        except (KeyError, TypeError) as e:
            raise CircuitError(f"malformed problem graph JSON: {e}") from e
