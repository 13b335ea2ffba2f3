"""
Hardware-aware mapping with lazy qubit allocation and reclamation

Logical qubits are placed only when their first gate has to run. Gates off
the critical path wait, so a late qubit can land on a physical qubit that
an earlier one has already finished with. Retired physical qubits are
reset with measure + conditional X right before they are used again.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from itertools import islice
from statistics import mean
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .circuit import Circuit, CircuitError, GateKind, InfeasibleError, Instruction, interaction_graph
from .config import LOOKAHEAD_ALPHA, LOOKAHEAD_LAYERS, SWAP_PATH_LIMIT
from .dag import DependencyDag, build_dag, path_profile, unit_weights
from .hardware import Calibration, CouplingGraph, Durations
from .metrics import Metrics, measure
from .qasm import emit_qasm
from .reuse import apply_pairs

Swap = Tuple[int, int]


@dataclass(frozen=True)
class PlacementEvent:
    kind: str  # place | retire | swap | reset
    step: int  # index of the next physical instruction when the event happened
    physical: int
    qubit: Optional[int] = None
    other: Optional[int] = None

    def to_json(self) -> dict:
        out = {'event': self.kind, 'step': self.step, 'physical': self.physical}
        if self.qubit is not None:
            out['qubit'] = self.qubit
        if self.other is not None:
            out['other'] = self.other
        return out


class MappingState:
    """Placement of live logical qubits, the free list and the physical schedule"""

    def __init__(self, coupling: CouplingGraph, num_clbits: int = 0):
        self.coupling = coupling
        self.placement: Dict[int, int] = {}
        self.occupant: Dict[int, int] = {}
        self.free_list: Set[int] = set(range(coupling.num_physical))
        self.retired: Set[int] = set()
        self.schedule: List[Instruction] = []
        self.origins: List[Optional[int]] = []
        self.history: List[PlacementEvent] = []
        self.num_clbits = num_clbits
        self.scratch: List[int] = []
        self.swaps = 0
        # physical -> (clbit of the retired occupant's last MEASURE, write count of that clbit)
        self.dirty: Dict[int, Tuple[Optional[int], int]] = {}
        self._last_clbit: Dict[int, Optional[int]] = {}
        self._writes: Dict[int, int] = {}

    def _record(self, kind: str, physical: int, qubit: Optional[int] = None, other: Optional[int] = None):
        self.history.append(PlacementEvent(kind, len(self.schedule), physical, qubit, other))

    def emit(self, kind: GateKind, qubits: Sequence[int], clbits: Sequence[int] = (),
             params: Sequence[float] = (), origin: Optional[int] = None) -> Instruction:
        inst = Instruction(len(self.schedule), kind, tuple(qubits), tuple(clbits), tuple(params))
        self.schedule.append(inst)
        self.origins.append(origin)
        for p in inst.qubits:
            self._last_clbit[p] = inst.clbit if kind is GateKind.MEASURE else None
        if kind is GateKind.MEASURE:
            self._writes[inst.clbit] = self._writes.get(inst.clbit, 0) + 1
        return inst

    def place(self, qubit: int, physical: int):
        if physical not in self.free_list:
            raise InfeasibleError(f"physical qubit {physical} is not free for q{qubit}")
        if physical in self.dirty:
            self.reset(physical)
        self.free_list.discard(physical)
        self.placement[qubit] = physical
        self.occupant[physical] = qubit
        self._record('place', physical, qubit)
        logging.debug(f"Placed q{qubit} on physical {physical}")

    def retire(self, qubit: int):
        physical = self.placement.pop(qubit)
        del self.occupant[physical]
        self.free_list.add(physical)
        self.retired.add(qubit)
        clbit = self._last_clbit.get(physical)
        self.dirty[physical] = (clbit, self._writes.get(clbit, 0))
        self._record('retire', physical, qubit)
        logging.debug(f"Retired q{qubit}, physical {physical} back on the free list")

    def reset(self, physical: int):
        """Measure + conditional X on a retired physical qubit"""
        clbit, stamp = self.dirty.pop(physical)
        self._record('reset', physical)
        if clbit is None or self._writes.get(clbit, 0) != stamp:
            clbit = self.num_clbits + len(self.scratch)
            self.scratch.append(clbit)
            self.emit(GateKind.MEASURE, (physical,), (clbit,))
        self.emit(GateKind.CX_CLASSICAL, (physical,), (clbit,))

    def apply_swap(self, u: int, v: int):
        for p in (u, v):
            if p in self.dirty:
                self.reset(p)
        self._record('swap', u, other=v)
        self.emit(GateKind.SWAP, (u, v))
        self.swaps += 1
        qu, qv = self.occupant.pop(u, None), self.occupant.pop(v, None)
        for q, p in ((qu, v), (qv, u)):
            if q is not None:
                self.placement[q] = p
                self.occupant[p] = q
        free_u, free_v = u in self.free_list, v in self.free_list
        self.free_list.discard(u)
        self.free_list.discard(v)
        if free_u:
            self.free_list.add(v)
        if free_v:
            self.free_list.add(u)


@dataclass(frozen=True)
class MappedResult:
    logical: Circuit
    circuit: Circuit
    history: Tuple[PlacementEvent, ...]
    origins: Tuple[Optional[int], ...]
    swaps: int
    metrics: Metrics
    scratch: Tuple[int, ...] = ()

    @property
    def physical_qubits_used(self) -> int:
        return len({e.physical for e in self.history if e.kind == 'place'})

    def to_json(self) -> dict:
        return {
            'physical_circuit': emit_qasm(self.circuit),
            'placement_history': [e.to_json() for e in self.history],
            'swaps': self.swaps,
            'depth': self.metrics.depth,
            'duration_dt': self.metrics.duration,
            'esp': self.metrics.esp,
            'two_qubit_gates': self.metrics.two_qubit_gates,
            'physical_qubits_used': self.physical_qubits_used,
            'scratch': list(self.scratch),
        }


def _edge_error(calibration: Calibration, coupling: CouplingGraph, p: int, anchor: int) -> float:
    if coupling.has_edge(p, anchor):
        return calibration.two_qubit_error(p, anchor)
    return min((calibration.two_qubit_error(p, nb) for nb in coupling.neighbors(p)), default=0.0)


def _distance_change(placement: Dict[int, int], swaps: Sequence[Swap], gates: Iterable[Instruction],
                     distance) -> int:
    """Summed distance change of the gates' operands if the swaps were applied"""
    gates = [g for g in gates if all(q in placement for q in g.qubits)]
    if not gates:
        return 0
    after = dict(placement)
    where = {p: q for q, p in after.items()}
    for u, v in swaps:
        qu, qv = where.pop(u, None), where.pop(v, None)
        if qu is not None:
            after[qu], where[v] = v, qu
        if qv is not None:
            after[qv], where[u] = u, qv
    before_total = sum(distance[placement[g.qubits[0]], placement[g.qubits[1]]] for g in gates)
    after_total = sum(distance[after[g.qubits[0]], after[g.qubits[1]]] for g in gates)
    return int(after_total - before_total)


def insert_swaps_for_gate(state: MappingState, gate: Instruction, coupling: CouplingGraph,
                          calibration: Calibration, upcoming: Iterable[Instruction] = ()) -> List[Swap]:
    """SWAPs bringing the gate's operands together along the lowest-error shortest path

    Both operands may move; the meeting edge is chosen by the distance
    change it causes for the upcoming gates. The state is not modified.
    """
    a, b = (state.placement[q] for q in gate.qubits)
    if coupling.has_edge(a, b):
        return []
    upcoming = [g for g in upcoming if g.id != gate.id and g.kind.is_two_qubit]
    best_key, best = None, []
    for path in islice(nx.all_shortest_paths(coupling.graph, a, b), SWAP_PATH_LIMIT):
        error = sum(calibration.two_qubit_error(u, v) for u, v in zip(path, path[1:]))
        k = len(path) - 1
        for meet in range(k):
            forward = [(path[i], path[i + 1]) for i in range(meet)]
            backward = [(path[j], path[j - 1]) for j in range(k, meet + 1, -1)]
            seq = forward + backward
            penalty = _distance_change(state.placement, seq, upcoming, coupling.distance)
            key = (round(error, 12), penalty, seq)
            if best_key is None or key < best_key:
                best_key, best = key, seq
    return best


class Mapper:
    """One mapping run over a dependency DAG"""

    def __init__(self, dag: DependencyDag, coupling: CouplingGraph, calibration: Calibration,
                 lazy: bool = True, pinned: Iterable[int] = ()):
        self.dag = dag
        self.circuit = dag.circuit
        self.coupling = coupling
        self.calibration = calibration
        self.lazy = lazy
        self.pinned = set(pinned)
        self.state = MappingState(coupling, self.circuit.num_clbits)
        weights = unit_weights(dag)
        for n in dag.dummy_nodes():
            weights[n] = 1
        # remaining-DAG tails equal full-DAG tails: every descendant of a ready node is unexecuted
        _, self.tail = path_profile(dag, weights)
        g = dag.graph
        self.indeg = {n: g.in_degree(n) for n in g.nodes}
        self.ready: Set[int] = {n for n, d in self.indeg.items() if d == 0}
        self.executed: Set[int] = set()
        self.remaining = {q: len(dag.qubit_nodes(q)) for q in range(self.circuit.num_qubits)}

    def _order(self, n: int):
        return (-self.tail[n], n)

    def _complete(self, n: int):
        self.executed.add(n)
        self.ready.discard(n)
        for s in self.dag.graph.successors(n):
            self.indeg[s] -= 1
            if self.indeg[s] == 0:
                self.ready.add(s)
        inst = self.dag.instruction(n)
        if inst is None:
            return
        for q in inst.qubits:
            self.remaining[q] -= 1
            if self.remaining[q] == 0 and self.lazy:
                self.state.retire(q)

    def _try_emit(self, n: int) -> bool:
        inst = self.dag.instruction(n)
        physical = [self.state.placement[q] for q in inst.qubits]
        if inst.kind.is_two_qubit and not self.coupling.has_edge(*physical):
            return False
        self.state.emit(inst.kind, physical, inst.clbits, inst.params, origin=inst.id)
        self._complete(n)
        return True

    def _emit_ready(self) -> bool:
        """Run everything ready on placed qubits until nothing changes"""
        progress = False
        changed = True
        while changed:
            changed = False
            for n in sorted(self.ready, key=self._order):
                inst = self.dag.instruction(n)
                if inst is None:
                    self._complete(n)
                    changed = True
                elif all(q in self.state.placement for q in inst.qubits) and self._try_emit(n):
                    changed = True
            progress = progress or changed
        return progress

    def _upcoming_partners(self, q: int) -> List[int]:
        partners = []
        for n in self.dag.qubit_nodes(q):
            if n in self.executed:
                continue
            inst = self.dag.instruction(n)
            if inst.kind.is_two_qubit:
                partners.append(inst.qubits[1] if inst.qubits[0] == q else inst.qubits[0])
                if len(partners) == LOOKAHEAD_LAYERS:
                    break
        return partners

    def _choose(self, q: int) -> int:
        state = self.state
        free = sorted(state.free_list)
        if not free:
            raise InfeasibleError(f"no free physical qubit left for q{q} on '{self.coupling.name}'")
        distance = self.coupling.distance
        readout = self.calibration.readout
        partners = self._upcoming_partners(q)
        if partners and partners[0] in state.placement:
            anchor = state.placement[partners[0]]
            return min(free, key=lambda p: (
                distance[p, anchor], readout(p), _edge_error(self.calibration, self.coupling, p, anchor), p,
            ))
        placed = [state.placement[r] for r in partners if r in state.placement]

        def score(p: int) -> float:
            free_nb = sum(1 for nb in self.coupling.neighbors(p) if nb in state.free_list)
            spread = mean(distance[p, a] for a in placed) if placed else 0.0
            return free_nb - LOOKAHEAD_ALPHA * spread

        return min(free, key=lambda p: (-score(p), readout(p), p))

    def _place_operands(self, inst: Instruction):
        unmapped = [q for q in inst.qubits if q not in self.state.placement]
        # the qubit with more gates goes first
        unmapped.sort(key=lambda q: (-self.remaining[q], q))
        for q in unmapped:
            self.state.place(q, self._choose(q))

    def _delayable(self, inst: Instruction) -> bool:
        return self.lazy and not any(q in self.pinned for q in inst.qubits)

    def _route(self, n: int, blocked: Sequence[int]):
        inst = self.dag.instruction(n)
        upcoming = [self.dag.instruction(m) for m in blocked if m != n]
        swaps = insert_swaps_for_gate(self.state, inst, self.coupling, self.calibration, upcoming)
        for u, v in swaps:
            logging.debug(f"SWAP ({u}, {v}) for instruction {inst.id}")
            self.state.apply_swap(u, v)
        if not self._try_emit(n):
            raise InfeasibleError(f"routing failed to make instruction {inst.id} adjacent")

    def place_all(self):
        """Up-front placement of every used qubit, highest interaction degree first"""
        used = self.circuit.used_qubits()
        if len(used) > self.coupling.num_physical:
            raise InfeasibleError(f"{len(used)} qubits do not fit on {self.coupling.num_physical} physical qubits")
        degree = interaction_graph(self.circuit).degree
        for q in sorted(used, key=lambda q: (-degree(q), q)):
            self.state.place(q, self._choose(q))

    def run(self) -> MappingState:
        while self.ready:
            progress = self._emit_ready()
            if not self.ready:
                break
            top = max(self.tail[n] for n in self.ready)
            deferred: List[int] = []
            blocked: List[int] = []
            for n in sorted(self.ready, key=self._order):
                if n not in self.ready:
                    continue
                inst = self.dag.instruction(n)
                if all(q in self.state.placement for q in inst.qubits):
                    blocked.append(n)
                    continue
                if self._delayable(inst) and self.tail[n] < top:
                    deferred.append(n)
                    continue
                self._place_operands(inst)
                if self._try_emit(n):
                    progress = True
                else:
                    blocked.append(n)
            if progress:
                continue
            if blocked:
                self._route(blocked[0], blocked)
            elif deferred:
                # stalled: start the most critical waiting gate anyway
                self._place_operands(self.dag.instruction(deferred[0]))
            else:
                raise InfeasibleError("mapping made no progress")
        return self.state


def _result(circuit: Circuit, state: MappingState, calibration: Calibration) -> MappedResult:
    physical = Circuit(
        num_qubits=state.coupling.num_physical,
        num_clbits=circuit.num_clbits + len(state.scratch),
        instructions=tuple(state.schedule),
        name=f"{circuit.name}_mapped",
    )
    metrics = measure(physical, calibration, swaps=state.swaps, calibration=calibration)
    logging.info(f"Mapped '{circuit.name}' onto '{state.coupling.name}': {state.swaps} swaps, "
                 f"depth {metrics.depth}, duration {metrics.duration} dt")
    return MappedResult(
        logical=circuit,
        circuit=physical,
        history=tuple(state.history),
        origins=tuple(state.origins),
        swaps=state.swaps,
        metrics=metrics,
        scratch=tuple(state.scratch),
    )


def map_regular(circuit: Circuit, coupling: CouplingGraph, calibration: Calibration) -> MappedResult:
    if circuit.is_commuting:
        raise CircuitError(f"'{circuit.name}' has commuting groups; map it with map_commuting")
    dag = build_dag(circuit, Durations.unit())
    state = Mapper(dag, coupling, calibration).run()
    return _result(circuit, state, calibration)


def map_commuting(circuit: Circuit, coupling: CouplingGraph, calibration: Calibration,
                  pairs: Sequence = ()) -> MappedResult:
    """Commuting gates ordered on the fly; reuse pairs impose the only cross-qubit order"""
    if not circuit.is_commuting:
        raise CircuitError(f"'{circuit.name}' has no commuting group; map it with map_regular")
    dag = apply_pairs(circuit, pairs, Durations.unit())
    degree = dict(interaction_graph(circuit).degree)
    for p, _ in dag.pairs:
        degree[p] += 1
    threshold = max(degree.values(), default=0) - 1
    pinned = {q for q, d in degree.items() if d >= threshold and d > 0}
    pinned.update(q for pair in dag.pairs for q in pair)
    state = Mapper(dag, coupling, calibration, pinned=pinned).run()
    return _result(circuit, state, calibration)


def map_baseline(circuit: Circuit, coupling: CouplingGraph, calibration: Calibration) -> MappedResult:
    """No reuse: every qubit placed up front, nothing delayed or reclaimed"""
    mapper = Mapper(build_dag(circuit, Durations.unit()), coupling, calibration, lazy=False)
    mapper.place_all()
    return _result(circuit, mapper.run(), calibration)


def _replay(result: MappedResult):
    """Yield (instruction, origin, occupant map, pending resets, event violations) step by step"""
    by_step: Dict[int, List[PlacementEvent]] = {}
    for e in result.history:
        by_step.setdefault(e.step, []).append(e)
    occupant: Dict[int, int] = {}
    needs_reset: Set[int] = set()
    for step in range(len(result.circuit.instructions) + 1):
        problems = []
        for e in by_step.get(step, []):
            if e.kind == 'place':
                if e.physical in occupant:
                    problems.append(f"physical {e.physical} hosts q{occupant[e.physical]} and q{e.qubit}")
                if e.physical in needs_reset:
                    problems.append(f"physical {e.physical} rehosted q{e.qubit} without a reset")
                occupant[e.physical] = e.qubit
            elif e.kind == 'retire':
                occupant.pop(e.physical, None)
                needs_reset.add(e.physical)
            elif e.kind == 'reset':
                needs_reset.discard(e.physical)
            elif e.kind == 'swap':
                u, v = e.physical, e.other
                if u in needs_reset or v in needs_reset:
                    problems.append(f"swap ({u}, {v}) moves an unreset qubit")
                qu, qv = occupant.pop(u, None), occupant.pop(v, None)
                if qu is not None:
                    occupant[v] = qu
                if qv is not None:
                    occupant[u] = qv
        inst = result.circuit.instructions[step] if step < len(result.circuit.instructions) else None
        origin = result.origins[step] if inst is not None else None
        yield inst, origin, occupant, needs_reset, problems


def verify_mapping(result: MappedResult, coupling: CouplingGraph) -> List[str]:
    """Coupling compliance, liveness and reset-before-rehost violations; empty when sound"""
    violations = []
    for inst, origin, occupant, needs_reset, problems in _replay(result):
        violations.extend(problems)
        if inst is None:
            continue
        if inst.kind.is_two_qubit and not coupling.has_edge(*inst.qubits):
            violations.append(f"instruction {inst.id}: {inst.kind.name} on non-edge {inst.qubits}")
        if origin is None:
            continue
        for p in inst.qubits:
            if p not in occupant:
                violations.append(f"instruction {inst.id} acts on unoccupied physical {p}")
            if p in needs_reset:
                violations.append(f"instruction {inst.id} acts on physical {p} before its reset")
    return violations


def gate_multiset(circuit: Circuit) -> Counter:
    return Counter((inst.kind, inst.qubits, inst.clbits, inst.params) for inst in circuit.instructions)


def unmap(result: MappedResult) -> Counter:
    """Logical gate multiset recovered from the physical circuit through the placement history"""
    out: Counter = Counter()
    for inst, origin, occupant, _, _ in _replay(result):
        if inst is None or origin is None:
            continue
        logical = tuple(occupant.get(p, -1) for p in inst.qubits)
        out[(inst.kind, logical, inst.clbits, inst.params)] += 1
    return out
