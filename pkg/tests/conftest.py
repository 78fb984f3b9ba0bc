"""Shared helpers for the test suite.

Random cases use seeded random.Random so every run sees the same data.
"""

import itertools
import random

import numpy as np
import pytest

from permcsp.core import PermCspInstance
from permcsp.reductions import GridGraph


def grid_from_edges(side, edges, kind="clique", D=None):
    """GridGraph from ((i, j), (i', j')) pairs with 1-based coordinates."""
    return GridGraph.from_edges(side, edges, kind=kind, D=D)


def all_cross_row_edges(side):
    """Every possible edge between vertices of distinct rows."""
    vs = [(i, j) for i in range(1, side + 1) for j in range(1, side + 1)]
    return [(a, b) for a, b in itertools.combinations(vs, 2) if a[0] != b[0]]


def random_instance(rng, num_vars, max_constraints, max_arity=3):
    """Random instance with the given bounds; duplicates allowed."""
    constraints = []
    for _ in range(rng.randint(0, max_constraints)):
        arity = rng.randint(1, max_arity)
        constraints.append(tuple(rng.sample(range(1, num_vars + 1),
                                            min(arity, num_vars))))
    return PermCspInstance.make(num_vars, constraints)


def edges_among(grid, vertices):
    """Number of grid edges with both endpoints in ``vertices``."""
    return sum(1 for a, b in itertools.combinations(vertices, 2)
               if grid.has_edge(a, b))


def cross_edges_among(h, selection):
    """Edges of a biclique grid induced by a full row selection."""
    n = h.side // 2
    count = 0
    for i in range(1, n + 1):
        j = selection.choice[i - 1]
        for ip in range(1, n + 1):
            jp = selection.choice[n + ip - 1] - n
            if h.has_edge((i, j), (n + ip, n + jp)):
                count += 1
    return count


@pytest.fixture
def rng():
    return random.Random(0)
