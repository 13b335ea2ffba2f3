import itertools

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from caqr.circuit import interaction_graph
from caqr.coloring import Coloring, color_interaction_graph, layout_pairs, separation_order, wire_layout
from caqr.reuse import reuse_chains


def chromatic_number(graph):
    nodes = list(graph.nodes)
    for k in range(1, len(nodes) + 1):
        for assignment in itertools.product(range(k), repeat=len(nodes)):
            color = dict(zip(nodes, assignment))
            if all(color[u] != color[v] for u, v in graph.edges()):
                return k
    return 0


def test_qaoa5_needs_three_colors(qaoa5):
    g = interaction_graph(qaoa5)
    coloring = color_interaction_graph(g)
    # the 1-2-3 triangle
    assert coloring.num_colors == 3
    assert coloring.is_proper(g)
    assert coloring.classes() == [[0, 2, 4], [1], [3]]


@pytest.mark.parametrize('n', [1, 2, 5, 7])
def test_complete_graph_needs_n_colors(n):
    coloring = color_interaction_graph(nx.complete_graph(n))
    assert coloring.num_colors == n


def test_empty_and_edgeless_graphs():
    assert color_interaction_graph(nx.Graph()) == Coloring({}, 0)
    assert color_interaction_graph(nx.empty_graph(4)).num_colors == 1


def test_multigraph_and_self_loops_are_projected():
    g = nx.MultiGraph([(0, 1), (0, 1), (1, 2), (2, 2)])
    coloring = color_interaction_graph(g)
    assert coloring.num_colors == 2


def test_odd_cycle_beats_its_clique_bound():
    assert color_interaction_graph(nx.cycle_graph(5)).num_colors == 3


def test_colors_are_renumbered_by_vertex_order():
    coloring = color_interaction_graph(nx.path_graph(4))
    assert coloring.color == {0: 0, 1: 1, 2: 0, 3: 1}


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 6), p=st.floats(0.0, 1.0), seed=st.integers(0, 10_000))
def test_small_graphs_get_the_chromatic_number(n, p, seed):
    g = nx.gnp_random_graph(n, p, seed=seed)
    coloring = color_interaction_graph(g)
    assert coloring.is_proper(g)
    assert coloring.num_colors == chromatic_number(g)


def smallest_coloring(graph, k):
    nodes = sorted(graph.nodes)
    for assignment in itertools.product(range(k), repeat=len(nodes)):
        color = dict(zip(nodes, assignment))
        if all(color[u] != color[v] for u, v in graph.edges()):
            return color


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 6), p=st.floats(0.0, 1.0), seed=st.integers(0, 10_000))
def test_small_graphs_get_the_first_fit_coloring(n, p, seed):
    g = nx.gnp_random_graph(n, p, seed=seed)
    coloring = color_interaction_graph(g)
    assert coloring.color == smallest_coloring(g, coloring.num_colors)


def test_path_layout_alternates_two_wires():
    assert wire_layout(nx.path_graph(6), range(6)) == [[0, 2, 4], [1, 3, 5]]
    pairs = layout_pairs(nx.path_graph(6))
    assert len(pairs) == 4
    assert len(reuse_chains(6, pairs)) == 2


def test_star_layout_needs_two_wires():
    star = nx.star_graph(6)
    assert len(wire_layout(star, separation_order(star))) == 2


def test_four_cycle_needs_a_third_wire():
    # two wires would need each pair of opposite vertices to outlive the other
    cycle = nx.cycle_graph(4)
    assert color_interaction_graph(cycle).num_colors == 2
    assert len(wire_layout(cycle, separation_order(cycle))) == 3


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 24), p=st.floats(0.0, 1.0), seed=st.integers(0, 10_000))
def test_layout_wires_hold_independent_sets(n, p, seed):
    g = nx.gnp_random_graph(n, p, seed=seed)
    order = separation_order(g)
    assert sorted(order) == list(range(n))
    wires = wire_layout(g, order)
    assert sorted(v for w in wires for v in w) == list(range(n))
    for w in wires:
        assert not any(g.has_edge(u, v) for u, v in itertools.combinations(w, 2))
    assert len(wires) >= color_interaction_graph(g).num_colors


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 6), p=st.floats(0.0, 1.0), seed=st.integers(0, 10_000))
def test_small_layouts_are_optimal(n, p, seed):
    g = nx.gnp_random_graph(n, p, seed=seed)
    fewest = min(len(wire_layout(g, order)) for order in itertools.permutations(range(n)))
    assert len(wire_layout(g, separation_order(g))) == fewest
