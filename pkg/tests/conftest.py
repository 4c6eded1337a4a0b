import itertools

import pytest

from tgin.graph import CooccurrenceGraph, edge_key


def graph_from_pairs(pairs, nodes=None, window=0, use_bloom=True):
    """Build a graph from (a, b) or (a, b, w) tuples."""
    edges = {}
    for pair in pairs:
        a, b, *rest = pair
        edges[edge_key(a, b)] = rest[0] if rest else 1
    return CooccurrenceGraph(edges, nodes=nodes, window=window, use_bloom=use_bloom)


def complete_graph(names, weight=1):
    return graph_from_pairs([(a, b, weight) for a, b in itertools.combinations(names, 2)])


def path_graph(names):
    return graph_from_pairs(list(zip(names, names[1:])))


@pytest.fixture
def k4_graph():
    """Complete graph on items a, b, c, v with unit weights."""
    return complete_graph(["a", "b", "c", "v"])
