from math import pi

import pytest

from caqr.circuit import CircuitBuilder, GateKind, SimulationError
from caqr.config import MAX_SIM_WIRES
from caqr.generators import gen_bv
from caqr.simulator import Distribution, sample_shots, simulate_exact


def measured(builder, *pairs):
    for q, c in pairs:
        builder.add(GateKind.MEASURE, [q], [c])
    return builder.build()


@pytest.mark.parametrize('secret', ['1111', '1011', '0000'])
def test_bv_returns_the_secret(secret):
    dist = simulate_exact(gen_bv(5, secret))
    assert dist.probs == pytest.approx({secret: 1.0})


def test_bell_pair():
    b = CircuitBuilder(2, 2).add(GateKind.H, [0]).add(GateKind.CX, [0, 1])
    dist = simulate_exact(measured(b, (0, 0), (1, 1)))
    assert dist.probs == pytest.approx({'00': 0.5, '11': 0.5})
    assert dist['01'] == 0.0
    assert dist.total() == pytest.approx(1.0)


@pytest.mark.parametrize('gates, expected', [
    ([(GateKind.SX, [0], ()), (GateKind.SX, [0], ())], {'10': 1.0}),
    ([(GateKind.H, [0], ()), (GateKind.Z, [0], ()), (GateKind.H, [0], ())], {'10': 1.0}),
    ([(GateKind.RX, [0], (pi,))], {'10': 1.0}),
    ([(GateKind.X, [0], ()), (GateKind.SWAP, [0, 1], ())], {'01': 1.0}),
    ([(GateKind.X, [0], ()), (GateKind.H, [1], ()), (GateKind.CZ, [0, 1], ()), (GateKind.H, [1], ())],
     {'11': 1.0}),
    ([(GateKind.X, [0], ()), (GateKind.H, [1], ()), (GateKind.CP, [0, 1], (pi,)), (GateKind.H, [1], ())],
     {'11': 1.0}),
    ([(GateKind.H, [0], ()), (GateKind.T, [0], ()), (GateKind.T, [0], ()), (GateKind.T, [0], ()),
      (GateKind.T, [0], ()), (GateKind.H, [0], ())], {'10': 1.0}),
], ids=['sx-sx', 'hzh', 'rx-pi', 'swap', 'cz', 'cp-pi', 't4'])
def test_gate_semantics(gates, expected):
    b = CircuitBuilder(2, 2)
    for kind, qubits, params in gates:
        b.add(kind, qubits, params=params)
    assert simulate_exact(measured(b, (0, 0), (1, 1))).probs == pytest.approx(expected)


def test_mid_circuit_measurement_branches():
    b = CircuitBuilder(1, 2)
    b.add(GateKind.H, [0]).add(GateKind.MEASURE, [0], [0]).add(GateKind.CX_CLASSICAL, [0], [0])
    b.add(GateKind.X, [0])
    dist = simulate_exact(measured(b, (0, 1)))
    # the conditional X returns the wire to |0> on either branch
    assert dist.probs == pytest.approx({'01': 0.5, '11': 0.5})


def test_builtin_reset_clears_the_wire():
    b = CircuitBuilder(1, 1).add(GateKind.H, [0]).add(GateKind.RESET, [0])
    assert simulate_exact(measured(b, (0, 0))).probs == pytest.approx({'0': 1.0})


def test_scratch_and_extra_clbits_are_dropped():
    b = CircuitBuilder(2, 3).add(GateKind.H, [0]).add(GateKind.X, [1])
    circuit = measured(b, (0, 0), (1, 1))
    # clbit 2 is never written
    assert simulate_exact(circuit, scratch=[0]).bits == 2
    assert simulate_exact(circuit, scratch=[0]).probs == pytest.approx({'10': 1.0})
    assert simulate_exact(circuit, output_clbits=2).probs == pytest.approx({'01': 0.5, '11': 0.5})


def test_probabilities_are_free_of_float_drift():
    assert simulate_exact(gen_bv(5, '1111')).probs == {'1111': 1.0}
    b = CircuitBuilder(1, 1)
    for _ in range(7):
        b.add(GateKind.H, [0])
    assert simulate_exact(measured(b, (0, 0))).probs == {'0': 0.5, '1': 0.5}
    b = CircuitBuilder(1, 1).add(GateKind.H, [0]).add(GateKind.H, [0])
    assert simulate_exact(measured(b, (0, 0))).probs == {'0': 1.0}


def test_empty_circuit():
    assert simulate_exact(CircuitBuilder(0, 0).build()).probs == {'': 1.0}


def test_wire_budget():
    b = CircuitBuilder(MAX_SIM_WIRES + 1, 0)
    for q in range(MAX_SIM_WIRES + 1):
        b.add(GateKind.H, [q])
    with pytest.raises(SimulationError, match='exceed'):
        simulate_exact(b.build())


def test_idle_wires_do_not_count_against_the_budget():
    b = CircuitBuilder(MAX_SIM_WIRES + 13, 2).add(GateKind.X, [20]).add(GateKind.CX, [20, 3])
    assert simulate_exact(measured(b, (3, 0), (20, 1))).probs == {'11': 1.0}


def test_sampling_is_seeded():
    dist = Distribution(2, {'00': 0.5, '11': 0.5})
    first = sample_shots(dist, 1000, seed=7)
    assert first == sample_shots(dist, 1000, seed=7)
    assert sum(first.values()) == 1000
    assert set(first) <= {'00', '11'}
    with pytest.raises(SimulationError):
        sample_shots(dist, 0)


def test_distribution_json():
    dist = Distribution(2, {'11': 0.25, '00': 0.75})
    data = dist.to_json()
    assert list(data['probs']) == ['00', '11']
    assert Distribution.from_json(data) == dist
    with pytest.raises(SimulationError):
        Distribution.from_json({'probs': {}})
    with pytest.raises(SimulationError, match='does not have'):
        Distribution(2, {'1': 1.0})
