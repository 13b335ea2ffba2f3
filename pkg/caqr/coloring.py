"""
Interaction-graph coloring and wire layouts

Coloring is exact branch and bound on small graphs, DSATUR above. A wire
layout packs non-interacting qubits onto shared wires in a placement order.
"""
from __future__ import annotations

import heapq
import logging
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .config import EXACT_COLORING_MAX_VERTICES, EXACT_LAYOUT_MAX_VERTICES, LAYOUT_RESTARTS


@dataclass(frozen=True)
class Coloring:
    color: Dict[int, int]
    num_colors: int

    def classes(self) -> List[List[int]]:
        groups: Dict[int, List[int]] = {}
        for v, c in sorted(self.color.items()):
            groups.setdefault(c, []).append(v)
        return [groups[c] for c in sorted(groups)]

    def is_proper(self, graph: nx.Graph) -> bool:
        return all(self.color[u] != self.color[v] for u, v in graph.edges() if u != v)


def _canonical(color: Dict[int, int]) -> Coloring:
    """Renumber colors by first appearance in vertex order"""
    renumber: Dict[int, int] = {}
    out = {}
    for v in sorted(color):
        c = color[v]
        if c not in renumber:
            renumber[c] = len(renumber)
        out[v] = renumber[c]
    return Coloring(out, len(renumber))


def _k_coloring(graph: nx.Graph, k: int, order: Optional[Sequence[int]] = None) -> Optional[Dict[int, int]]:
    """Backtracking search for a proper k-coloring

    Colors are tried lowest first, so with vertex order the first hit is the
    lexicographically smallest coloring.
    """
    if order is None:
        order = sorted(graph.nodes, key=lambda v: (-graph.degree(v), v))
    color: Dict[int, int] = {}

    def assign(i: int, used: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        forbidden = {color[u] for u in graph[v] if u in color}
        # a new color is only ever the next unused one
        for c in range(min(used + 1, k)):
            if c in forbidden:
                continue
            color[v] = c
            if assign(i + 1, max(used, c + 1)):
                return True
            del color[v]
        return False

    return dict(color) if assign(0, 0) else None


def _simple(g: nx.Graph) -> nx.Graph:
    simple = nx.Graph()
    simple.add_nodes_from(g.nodes)
    simple.add_edges_from((u, v) for u, v in g.edges() if u != v)
    return simple


def _clique_bound(graph: nx.Graph) -> int:
    return max((len(c) for c in nx.find_cliques(graph)), default=0)


def color_interaction_graph(g: nx.Graph) -> Coloring:
    """Proper coloring of the simple projection of g; exact for small graphs"""
    simple = _simple(g)
    if simple.number_of_nodes() == 0:
        return Coloring({}, 0)

    heuristic = _canonical(nx.greedy_color(simple, strategy='saturation_largest_first'))
    if simple.number_of_nodes() > EXACT_COLORING_MAX_VERTICES:
        logging.debug(f"DSATUR coloring: {heuristic.num_colors} colors on {simple.number_of_nodes()} vertices")
        return heuristic

    k = heuristic.num_colors
    for smaller in range(max(1, _clique_bound(simple)), heuristic.num_colors):
        if _k_coloring(simple, smaller) is not None:
            k = smaller
            break
    return _canonical(_k_coloring(simple, k, order=sorted(simple.nodes)))


def wire_layout(graph: nx.Graph, order: Sequence[int]) -> List[List[int]]:
    """Pack vertices onto wires in placement order

    A vertex holds its wire from its own position until its last neighbor is
    placed; the freed wire with the lowest index goes to the next vertex.
    """
    position = {v: i for i, v in enumerate(order)}
    release = {v: max([position[v]] + [position[u] for u in graph[v]]) for v in order}
    wires: List[List[int]] = []
    free: List[int] = []
    busy: List[Tuple[int, int]] = []
    for t, v in enumerate(order):
        while busy and busy[0][0] < t:
            heapq.heappush(free, heapq.heappop(busy)[1])
        if free:
            w = heapq.heappop(free)
            wires[w].append(v)
        else:
            w = len(wires)
            wires.append([v])
        heapq.heappush(busy, (release[v], w))
    return wires


def _greedy_order(graph: nx.Graph, key) -> List[int]:
    pending = {v: graph.degree(v) for v in graph}
    placed: Set[int] = set()
    order: List[int] = []
    while len(order) < graph.number_of_nodes():
        def cost(v: int):
            closes = sum(1 for u in graph[v] if u in placed and pending[u] == 1)
            inside = sum(1 for u in graph[v] if u in placed)
            opens = 1 if graph.degree(v) > inside else 0
            return key(v, opens - closes, inside)

        v = min((u for u in graph if u not in placed), key=cost)
        placed.add(v)
        order.append(v)
        for u in graph[v]:
            pending[u] -= 1
    return order


def _exact_order(graph: nx.Graph) -> List[int]:
    """Order minimizing the peak wire count, by dynamic programming over placed sets"""
    nodes = sorted(graph.nodes)
    index = {v: i for i, v in enumerate(nodes)}
    neighbors = [sum(1 << index[u] for u in graph[v]) for v in nodes]
    size = 1 << len(nodes)
    waiting = [0] * size  # placed vertices with an unplaced neighbor
    peak = [0] * size
    last = [0] * size
    for placed in range(1, size):
        waiting[placed] = sum(1 for i in range(len(nodes)) if placed >> i & 1 and neighbors[i] & ~placed)
        best = None
        rest = placed
        while rest:
            bit = rest & -rest
            rest ^= bit
            before = placed ^ bit
            cost = max(peak[before], waiting[before] + 1)
            if best is None or cost < best:
                best, last[placed] = cost, bit.bit_length() - 1
        peak[placed] = best
    order = []
    placed = size - 1
    while placed:
        order.append(nodes[last[placed]])
        placed ^= 1 << last[placed]
    return order[::-1]


_ORDER_KEYS = (
    lambda g, v, delta, inside: (delta, -inside, v),
    lambda g, v, delta, inside: (delta, -inside, -g.degree(v), v),
    lambda g, v, delta, inside: (delta, -g.degree(v), v),
)


def separation_order(g: nx.Graph) -> List[int]:
    """Placement order that keeps few vertices waiting on unplaced neighbors

    Small graphs get an optimal order from a subset search. Above that,
    several greedy rules, seeded random tie-breaks and a reverse Cuthill-McKee
    order are packed with wire_layout; the order needing the fewest wires
    wins, earlier candidates on ties.
    """
    simple = _simple(g)
    if simple.number_of_nodes() == 0:
        return []
    if simple.number_of_nodes() <= EXACT_LAYOUT_MAX_VERTICES:
        return _exact_order(simple)
    orders = [_greedy_order(simple, lambda v, d, i, k=k: k(simple, v, d, i)) for k in _ORDER_KEYS]
    for restart in range(LAYOUT_RESTARTS):
        rng = random.Random(restart)
        rank = {v: rng.random() for v in simple}
        orders.append(_greedy_order(simple, lambda v, d, i, rank=rank: (d, -i, rank[v])))
    orders.append(list(nx.utils.reverse_cuthill_mckee_ordering(simple)))
    best = min(orders, key=lambda o: len(wire_layout(simple, o)))
    logging.debug(f"Wire layout: {len(wire_layout(simple, best))} wires for {simple.number_of_nodes()} vertices")
    return best


def layout_pairs(g: nx.Graph) -> List[Tuple[int, int]]:
    """Reuse pairs that chain each wire of the best layout, head to tail"""
    simple = _simple(g)
    wires = wire_layout(simple, separation_order(simple))
    return [(w[i], w[i + 1]) for w in wires for i in range(len(w) - 1)]
