from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from caqr.circuit import CircuitBuilder, GateKind, ReuseError, interaction_graph
from caqr.dag import build_dag, critical_path_length, detect_cycle
from caqr.generators import gen_random_circuit
from caqr.qasm import emit_qasm
from caqr.reuse import (
    ReusePair, WireMap, apply_pairs, apply_reuse_pair, chain_allows, check_condition1, check_condition2,
    enumerate_candidates, materialize, reuse_chains,
)
from caqr.simulator import simulate_exact
from caqr.metrics import total_variation_distance

from conftest import cx_circuit


def brute_force_candidates(circuit, dag):
    """Tentative insertion plus cycle check for every ordered pair"""
    out = []
    for qi in range(circuit.num_qubits):
        for qj in range(circuit.num_qubits):
            if qi == qj or not check_condition1(circuit, qi, qj):
                continue
            if chain_allows(dag.pairs, qi, qj) and check_condition2(dag, qi, qj):
                out.append(ReusePair(qi, qj))
    return out


def test_condition1(bv5):
    assert check_condition1(bv5, 0, 1)
    assert not check_condition1(bv5, 0, 4)
    assert not check_condition1(bv5, 2, 2)


def test_condition2(bv5, conflict_circuit):
    assert check_condition2(build_dag(bv5), 0, 1)
    dag = build_dag(conflict_circuit)
    edges_before = set(dag.graph.edges)
    assert not check_condition2(dag, 1, 4)
    # the tentative node is rolled back
    assert set(dag.graph.edges) == edges_before
    assert len(dag) == len(conflict_circuit)


def test_disconnected_qubits_always_pass_condition2():
    circuit = cx_circuit(4, [(0, 1), (2, 3)])
    dag = build_dag(circuit)
    assert check_condition2(dag, 0, 2) and check_condition2(dag, 3, 1)


def test_bv_candidates_never_involve_the_ancilla(bv5):
    candidates = [p.as_tuple() for p in enumerate_candidates(bv5, build_dag(bv5))]
    assert (0, 1) in candidates and (0, 2) in candidates
    # CX(q0, q4) precedes CX(q1, q4) on the ancilla
    assert (1, 0) not in candidates
    assert all(4 not in pair for pair in candidates)
    assert candidates == sorted(candidates)


def test_complete_interaction_graph_has_no_candidates():
    k5 = cx_circuit(5, [(u, v) for u in range(5) for v in range(u + 1, 5)])
    assert enumerate_candidates(k5, build_dag(k5)) == []


def test_candidates_respect_applied_chains(bv5):
    dag = apply_reuse_pair(build_dag(bv5), (0, 1))
    pairs = {p.as_tuple() for p in enumerate_candidates(bv5, dag)}
    # q0 already handed its wire over and q1 already starts one
    assert not any(p == 0 for p, _ in pairs)
    assert not any(c == 1 for _, c in pairs)
    assert (1, 0) not in pairs
    assert (1, 2) in pairs


def test_apply_reuse_pair_adds_a_dummy_node(bv5):
    dag = build_dag(bv5)
    d1 = apply_reuse_pair(dag, (0, 2))
    d2 = apply_reuse_pair(d1, (2, 3))
    assert len(d2.dummy_nodes()) == 2
    assert d2.pairs == ((0, 2), (2, 3))
    assert not detect_cycle(d2)
    # the input dag is left alone
    assert dag.dummy_nodes() == []
    first = d2.dummy_nodes()[0]
    assert all(d2.graph.has_edge(n, first) for n in dag.qubit_nodes(0))
    assert all(d2.graph.has_edge(first, n) for n in dag.qubit_nodes(2))


@pytest.mark.parametrize('pair', [(0, 4), (4, 4)])
def test_apply_rejects_invalid_pairs(bv5, pair):
    with pytest.raises(ReuseError):
        apply_reuse_pair(build_dag(bv5), pair)


def test_apply_rejects_conflicting_pair(conflict_circuit):
    with pytest.raises(ReuseError, match='precede'):
        apply_reuse_pair(build_dag(conflict_circuit), (1, 4))


def test_reuse_chains():
    assert reuse_chains(5, [(0, 1), (1, 2), (2, 3)]) == [[0, 1, 2, 3], [4]]
    with pytest.raises(ReuseError):
        reuse_chains(3, [(0, 1), (0, 2)])
    with pytest.raises(ReuseError):
        reuse_chains(2, [(0, 1), (1, 0)])


def test_bv_materializes_onto_two_wires(bv5):
    wired, wire_map = materialize(bv5, [(0, 1), (1, 2), (2, 3)])
    assert wired.num_qubits == 2
    assert sum(1 for inst in wired if inst.kind is GateKind.CX_CLASSICAL) == 3
    assert wire_map.scratch == ()
    assert wire_map.epochs(wire_map.wire(0)) == [0, 1, 2, 3]
    assert simulate_exact(wired).probs == pytest.approx(simulate_exact(bv5).probs)


def test_empty_pair_list_is_identity(bv5):
    wired, wire_map = materialize(bv5, [])
    assert wired is bv5
    assert wire_map.num_wires == 5


def test_unmeasured_producer_gets_a_scratch_clbit():
    circuit = cx_circuit(3, [(0, 1)])
    wired, wire_map = materialize(circuit, [(0, 2)])
    assert wire_map.scratch == (0,)
    assert wired.num_clbits == 1
    kinds = [inst.kind for inst in wired]
    assert kinds.count(GateKind.MEASURE) == 1 and kinds.count(GateKind.CX_CLASSICAL) == 1


def test_materialize_keeps_commuting_groups():
    b = CircuitBuilder(3, 3)
    for q in range(3):
        b.add(GateKind.H, [q])
    b.add(GateKind.CZ, [0, 1], commuting_group=0)
    b.add(GateKind.CZ, [1, 2], commuting_group=0)
    for q in range(3):
        b.add(GateKind.MEASURE, [q], [q])
    circuit = b.build()
    wired, _ = materialize(circuit, [(0, 2)])
    # the reset on wire 0 splits the group in two
    assert [inst.commuting_group for inst in wired if inst.kind is GateKind.CZ] == [0, 1]
    assert wired.commuting_groups == [0, 1]
    assert '// #commuting begin 1' in emit_qasm(wired)
    assert simulate_exact(wired).probs == pytest.approx(simulate_exact(circuit).probs)


def test_wire_map_json_round_trip(bv5):
    _, wire_map = materialize(bv5, [(0, 1), (1, 2)])
    restored = WireMap.from_json(wire_map.to_json(), bv5.num_clbits)
    assert restored.pairs == wire_map.pairs
    assert {q: restored.wire(q) for q in range(5)} == {q: wire_map.wire(q) for q in range(5)}
    with pytest.raises(ReuseError):
        WireMap.from_json({'pairs': []}, 0)


def _gate_counts(circuit):
    return Counter((inst.kind, inst.params) for inst in circuit if inst.kind.is_unitary)


@st.composite
def circuits_with_chains(draw, min_qubits=3, max_qubits=6):
    n = draw(st.integers(min_qubits, max_qubits))
    circuit = gen_random_circuit(n, draw(st.integers(2, 16)), draw(st.integers(0, 10_000)), two_qubit_ratio=0.3)
    dag = build_dag(circuit)
    steps = draw(st.integers(0, n - 1))
    for _ in range(steps):
        candidates = enumerate_candidates(circuit, dag)
        if not candidates:
            break
        dag = apply_reuse_pair(dag, draw(st.sampled_from(candidates)))
    return circuit, dag


@settings(max_examples=100, deadline=None)
@given(circuits_with_chains(max_qubits=7))
def test_candidates_equal_brute_force_oracle(case):
    circuit, dag = case
    assert enumerate_candidates(circuit, dag) == brute_force_candidates(circuit, dag)


@settings(max_examples=60, deadline=None)
@given(circuits_with_chains())
def test_application_never_shortens_the_critical_path(case):
    circuit, dag = case
    plain = build_dag(circuit)
    assert critical_path_length(dag) >= critical_path_length(plain)
    assert not detect_cycle(dag)


@settings(max_examples=80, deadline=None)
@given(circuits_with_chains())
def test_materialize_preserves_gates_and_distribution(case):
    circuit, dag = case
    wired, wire_map = materialize(circuit, dag.pairs, dag)
    assert wired.num_qubits == circuit.num_qubits - len(dag.pairs)
    assert _gate_counts(wired) == _gate_counts(circuit)
    resets = sum(1 for inst in wired if inst.kind is GateKind.CX_CLASSICAL)
    assert resets == len(dag.pairs)
    original = simulate_exact(circuit)
    transformed = simulate_exact(wired, wire_map.scratch, output_clbits=circuit.num_clbits)
    assert total_variation_distance(original, transformed) <= 1e-9


def test_pairs_on_interaction_graph_partners_are_never_offered(bv5):
    g = interaction_graph(bv5)
    for pair in enumerate_candidates(bv5, build_dag(bv5)):
        assert not g.has_edge(pair.producer, pair.consumer)


def test_apply_pairs_builds_the_whole_chain(bv5):
    dag = apply_pairs(bv5, [(0, 1), (1, 2)])
    assert dag.pairs == ((0, 1), (1, 2))
