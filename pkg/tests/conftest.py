import pytest

from caqr.circuit import CircuitBuilder, GateKind, ProblemGraph
from caqr.generators import gen_bv, gen_qaoa_maxcut
from caqr.hardware import Calibration, CouplingGraph, build_heavy_hex

# five-vertex max-cut instance, edges g1..g5 in gate order
QAOA5_EDGES = [(0, 1), (1, 3), (3, 4), (1, 2), (2, 3)]


def cx_circuit(num_qubits, pairs, measure=False, name='circuit'):
    b = CircuitBuilder(num_qubits, num_qubits if measure else 0, name=name)
    for u, v in pairs:
        b.add(GateKind.CX, [u, v])
    if measure:
        for q in range(num_qubits):
            b.add(GateKind.MEASURE, [q], [q])
    return b.build()


def k5_circuit():
    return cx_circuit(5, [(u, v) for u in range(5) for v in range(u + 1, 5)], name='k5')


@pytest.fixture
def bv5():
    return gen_bv(5, '1111')


@pytest.fixture
def conflict_circuit():
    """Reusing q1 for q4 would need CX(q3, q1) before CX(q4, q2), which it depends on"""
    return cx_circuit(5, [(4, 2), (2, 3), (3, 1)], name='conflict')


@pytest.fixture
def choice_circuit():
    """Same saving, different depth: q1 -> q0 keeps depth 3, q3 -> q0 makes it 4"""
    return cx_circuit(4, [(1, 2), (2, 3), (0, 2)], name='choice')


@pytest.fixture
def qaoa5():
    b = CircuitBuilder(5, 5, name='qaoa5')
    for q in range(5):
        b.add(GateKind.H, [q])
    for u, v in QAOA5_EDGES:
        b.add(GateKind.CP, [u, v], params=[1.4], commuting_group=0)
    for q in range(5):
        b.add(GateKind.RX, [q], params=[0.8])
        b.add(GateKind.MEASURE, [q], [q])
    return b.build()


@pytest.fixture
def path_qaoa():
    graph = ProblemGraph(n=6, edges=frozenset((i, i + 1) for i in range(5)), kind='path')
    return gen_qaoa_maxcut(graph, 0.7, 0.4)


@pytest.fixture
def lazy_circuit():
    """q0 finishes early, so q3 can take its physical qubit on a four-qubit line"""
    return cx_circuit(5, [(1, 2), (4, 0), (4, 3), (1, 4)], measure=True, name='lazy')


@pytest.fixture
def line4():
    return CouplingGraph(num_physical=4, edges=frozenset({(0, 1), (1, 2), (2, 3)}), name='line4')


@pytest.fixture
def line4_calibration(line4):
    return Calibration.uniform(line4)


@pytest.fixture(scope='session')
def heavy_hex27():
    return build_heavy_hex(27)


@pytest.fixture(scope='session')
def calibration27(heavy_hex27):
    return Calibration.uniform(heavy_hex27)
