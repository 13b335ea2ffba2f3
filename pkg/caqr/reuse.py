"""
Qubit-reuse pairs: validity, enumeration, application and materialization
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .circuit import Circuit, DagCycleError, GateKind, Instruction, ReuseError
from .dag import DagNode, DependencyDag, DummyMR, build_dag, dummy_weight


@dataclass(frozen=True, order=True)
class ReusePair:
    producer: int
    consumer: int

    def __post_init__(self):
        if self.producer == self.consumer:
            raise ReuseError(f"a qubit cannot reuse itself (q{self.producer})")

    def as_tuple(self) -> Tuple[int, int]:
        return (self.producer, self.consumer)

    def __str__(self) -> str:
        return f"q{self.producer}->q{self.consumer}"


def _as_pair(pair) -> ReusePair:
    return pair if isinstance(pair, ReusePair) else ReusePair(*pair)


def check_condition1(circuit: Circuit, qi: int, qj: int) -> bool:
    """No instruction acts on both qubits"""
    if qi == qj:
        return False
    return not any(qi in inst.qubits and qj in inst.qubits for inst in circuit.instructions)


def check_condition2(dag: DependencyDag, qi: int, qj: int) -> bool:
    """Tentatively insert gates(qi) -> D -> gates(qj); valid iff no cycle runs through D

    The dummy node is removed again before returning.
    """
    src, dst = dag.qubit_nodes(qi), dag.qubit_nodes(qj)
    g = dag.graph
    d = dag.next_dummy_id()
    g.add_node(d)
    g.add_edges_from((n, d) for n in src)
    g.add_edges_from((d, n) for n in dst)
    try:
        targets = set(src)
        cyclic = any(n in targets for n in nx.dfs_preorder_nodes(g, d))
    finally:
        g.remove_node(d)
    return not cyclic


def chain_allows(pairs: Iterable[Tuple[int, int]], qi: int, qj: int) -> bool:
    """qi still owns the end of its wire, qj still starts one, and they are different wires"""
    producer_of: Dict[int, int] = {}
    producers = set()
    for p, c in pairs:
        producer_of[c] = p
        producers.add(p)
    if qi in producers or qj in producer_of:
        return False
    q = qi
    while q in producer_of:
        q = producer_of[q]
        if q == qj:
            return False
    return True


def _interaction_partners(circuit: Circuit) -> Dict[int, Set[int]]:
    partners: Dict[int, Set[int]] = {q: set() for q in range(circuit.num_qubits)}
    for inst in circuit.instructions:
        if len(inst.qubits) == 2:
            u, v = inst.qubits
            partners[u].add(v)
            partners[v].add(u)
    return partners


def qubit_reach(dag: DependencyDag) -> Dict[int, int]:
    """Per qubit, a bitmask of every qubit touched by a node reachable from its gates

    Inserting D for (qi -> qj) closes a cycle exactly when bit qi is set in
    the mask of qj, so one pass answers the cycle check for every pair.
    """
    g = dag.graph
    try:
        order = list(nx.topological_sort(g))
    except nx.NetworkXUnfeasible as e:
        raise DagCycleError("dependency graph contains a cycle") from e
    mask: Dict[int, int] = {}
    for n in reversed(order):
        inst = dag.instruction(n)
        m = 0
        if inst is not None:
            for q in inst.qubits:
                m |= 1 << q
        for s in g.successors(n):
            m |= mask[s]
        mask[n] = m
    reach = {}
    for q in range(dag.circuit.num_qubits):
        m = 0
        for n in dag.qubit_nodes(q):
            m |= mask[n]
        reach[q] = m
    return reach


def enumerate_candidates(circuit: Circuit, dag: DependencyDag) -> List[ReusePair]:
    """Every pair passing both conditions against the current dag, producer-major order"""
    partners = _interaction_partners(circuit)
    reach = qubit_reach(dag)
    producer_of = {c: p for p, c in dag.pairs}
    producers = set(producer_of.values())
    out = []
    for qi in range(circuit.num_qubits):
        if qi in producers:
            continue
        upstream = set()
        q = qi
        while q in producer_of:
            q = producer_of[q]
            upstream.add(q)
        for qj in range(circuit.num_qubits):
            if qi == qj or qj in partners[qi] or qj in producer_of or qj in upstream:
                continue
            if not (reach[qj] >> qi) & 1:
                out.append(ReusePair(qi, qj))
    return out


def apply_reuse_pair(dag: DependencyDag, pair, mr_duration: Optional[float] = None) -> DependencyDag:
    """New dag with dummy node D: every node on the producer -> D -> every node on the consumer"""
    pair = _as_pair(pair)
    qi, qj = pair.producer, pair.consumer
    if not check_condition1(dag.circuit, qi, qj):
        raise ReuseError(f"{pair} rejected: a gate acts on both qubits")
    if not chain_allows(dag.pairs, qi, qj):
        raise ReuseError(f"{pair} rejected: wire already handed over or chain would loop")
    if not check_condition2(dag, qi, qj):
        raise ReuseError(f"{pair} rejected: consumer gates would precede producer gates")

    mr_duration = dag.durations.mr if mr_duration is None else mr_duration
    new = dag.copy()
    d = new.next_dummy_id()
    new.graph.add_node(d, node=DagNode(d, DummyMR(qi, qj)))
    new.graph.add_edges_from((n, d) for n in new.qubit_nodes(qi))
    new.graph.add_edges_from((d, n) for n in new.qubit_nodes(qj))
    new.node_weight[d] = dummy_weight(new, qi, mr_duration, dag.durations.measure)
    new.pairs = dag.pairs + (pair.as_tuple(),)
    logging.debug(f"Applied reuse pair {pair} as dummy node {d}")
    return new


def apply_pairs(circuit: Circuit, pairs: Sequence, durations=None) -> DependencyDag:
    dag = build_dag(circuit, durations)
    for pair in pairs:
        dag = apply_reuse_pair(dag, pair)
    return dag


def reuse_chains(num_qubits: int, pairs: Iterable[Tuple[int, int]]) -> List[List[int]]:
    """Wires as ordered qubit chains, head first"""
    successor: Dict[int, int] = {}
    predecessor: Dict[int, int] = {}
    for p, c in pairs:
        if p in successor or c in predecessor:
            raise ReuseError(f"inconsistent pair chain at q{p}->q{c}")
        successor[p] = c
        predecessor[c] = p
    chains = []
    seen = set()
    for q in range(num_qubits):
        if q in predecessor:
            continue
        chain = [q]
        while chain[-1] in successor:
            chain.append(successor[chain[-1]])
        seen.update(chain)
        chains.append(chain)
    if len(seen) != num_qubits:
        raise ReuseError("inconsistent pair chain: reuse pairs form a loop")
    return sorted(chains, key=min)


@dataclass(frozen=True)
class WireMap:
    mapping: Dict[int, Tuple[int, int]]
    clbit_map: Dict[int, int]
    pairs: Tuple[Tuple[int, int], ...] = ()
    scratch: Tuple[int, ...] = ()
    num_wires: int = 0
    output_clbits: int = 0

    def wire(self, qubit: int) -> int:
        return self.mapping[qubit][0]

    def epochs(self, wire: int) -> List[int]:
        hosted = [(epoch, q) for q, (w, epoch) in self.mapping.items() if w == wire]
        return [q for _, q in sorted(hosted)]

    def to_json(self) -> dict:
        return {
            'pairs': [list(p) for p in self.pairs],
            'wires': {str(q): w for q, (w, _) in sorted(self.mapping.items())},
            'epochs': {str(q): e for q, (_, e) in sorted(self.mapping.items())},
            'clbits': {str(q): c for q, c in sorted(self.clbit_map.items())},
            'scratch': list(self.scratch),
        }

    @classmethod
    def from_json(cls, data: dict, num_clbits: int) -> 'WireMap':
        try:
            wires = {int(q): int(w) for q, w in data['wires'].items()}
            epochs = {int(q): int(e) for q, e in data.get('epochs', {}).items()}
            return cls(
                mapping={q: (w, epochs.get(q, 0)) for q, w in wires.items()},
                clbit_map={int(q): int(c) for q, c in data.get('clbits', {}).items()},
                pairs=tuple(tuple(p) for p in data.get('pairs', [])),
                scratch=tuple(int(s) for s in data.get('scratch', [])),
                num_wires=len(set(wires.values())),
                output_clbits=num_clbits,
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ReuseError(f"malformed wire map JSON: {e}") from e


def _topological_order(dag: DependencyDag) -> List[int]:
    position = {inst.id: i for i, inst in enumerate(dag.circuit.instructions)}

    def key(n):
        node = dag.node(n)
        if not node.is_dummy:
            return position[n]
        # right after the producer's last instruction
        producer_nodes = dag.qubit_nodes(node.payload.producer)
        return (position[producer_nodes[-1]] if producer_nodes else -1) + 0.5

    return list(nx.lexicographical_topological_sort(dag.graph, key=key))


def materialize(circuit: Circuit, pairs: Sequence, dag: Optional[DependencyDag] = None) -> Tuple[Circuit, WireMap]:
    """Rewrite the circuit onto shared wires, realizing each pair as MEASURE + CX_CLASSICAL"""
    pairs = [_as_pair(p).as_tuple() for p in pairs]
    chains = reuse_chains(circuit.num_qubits, pairs)
    mapping = {q: (w, epoch) for w, chain in enumerate(chains) for epoch, q in enumerate(chain)}
    wire_of = {q: w for q, (w, _) in mapping.items()}

    if not pairs:
        identity = WireMap(mapping, circuit.measured_qubits(), (), (), circuit.num_qubits, circuit.num_clbits)
        return circuit, identity

    if dag is None or list(dag.pairs) != pairs:
        dag = apply_pairs(circuit, pairs)

    out: List[Instruction] = []
    clbit_map = dict(circuit.measured_qubits())
    scratch: List[int] = []
    # a group split by a reset continues under a fresh id
    spare_group = max(circuit.commuting_groups, default=-1) + 1
    renamed: Dict[int, int] = {}
    run: Optional[int] = None
    for n in _topological_order(dag):
        node = dag.node(n)
        if not node.is_dummy:
            inst = dag.instruction(n)
            group = inst.commuting_group
            if group is not None and group != run:
                if group in renamed:
                    renamed[group] = spare_group
                    spare_group += 1
                else:
                    renamed[group] = group
            run = group
            out.append(Instruction(
                len(out), inst.kind, tuple(wire_of[q] for q in inst.qubits), inst.clbits, inst.params,
                None if group is None else renamed[group],
            ))
            continue
        run = None
        producer = node.payload.producer
        w = wire_of[producer]
        producer_nodes = dag.qubit_nodes(producer)
        last = dag.instruction(producer_nodes[-1]) if producer_nodes else None
        if last is not None and last.kind is GateKind.MEASURE:
            clbit = last.clbit
        else:
            clbit = circuit.num_clbits + len(scratch)
            scratch.append(clbit)
            out.append(Instruction(len(out), GateKind.MEASURE, (w,), (clbit,)))
        clbit_map[producer] = clbit
        out.append(Instruction(len(out), GateKind.CX_CLASSICAL, (w,), (clbit,)))

    materialized = Circuit(
        num_qubits=len(chains),
        num_clbits=circuit.num_clbits + len(scratch),
        instructions=tuple(out),
        name=f"{circuit.name}_w{len(chains)}",
    )
    wire_map = WireMap(mapping, clbit_map, tuple(pairs), tuple(scratch), len(chains), circuit.num_clbits)
    logging.info(f"Materialized '{circuit.name}': {circuit.num_qubits} -> {len(chains)} wires, "
                 f"{len(pairs)} resets, {len(scratch)} scratch clbits")
    return materialized, wire_map
