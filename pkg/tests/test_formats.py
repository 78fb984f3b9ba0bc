"""Text formats: round-trips, canonical bytes, parse errors."""

import networkx as nx
import numpy as np
import pytest

from conftest import grid_from_edges
from permcsp.core import Ordering, PermCspInstance
from permcsp.formats import (
    FormatError,
    read_certificate,
    read_dimacs,
    read_graph,
    read_grid,
    read_instance,
    read_ordering,
    write_certificate,
    write_dimacs,
    write_graph,
    write_grid,
    write_instance,
    write_ordering,
)
from permcsp.reductions import (
    CnfFormula,
    GridGraph,
    reduce_clique_to_perm6,
    reduce_dcnnb_to_perm4,
    reduce_dcnnc_to_dcnnb,
)


# ---------------------------------------------------------------------------
# DIMACS CNF
# ---------------------------------------------------------------------------

def test_dimacs_example():
    cnf = read_dimacs("p cnf 1 2\n1 0\n-1 0\n")
    assert cnf.num_vars == 1
    assert cnf.clauses == ((1,), (-1,))


def test_dimacs_round_trip_idempotent():
    text = "p cnf 3 2\n1 -2 3 0\n-1 2 0\n"
    cnf = read_dimacs(text)
    assert write_dimacs(cnf) == text
    assert write_dimacs(read_dimacs(write_dimacs(cnf))) == text


def test_dimacs_comments_and_multiline_clauses():
    cnf = read_dimacs("c a comment\np cnf 2 1\n1\n2 0\n")
    assert cnf.clauses == ((1, 2),)


def test_dimacs_missing_terminator():
    with pytest.raises(FormatError) as exc:
        read_dimacs("p cnf 2 1\n1 2\n")
    assert "terminated by 0" in str(exc.value)


def test_dimacs_errors_carry_position():
    with pytest.raises(FormatError) as exc:
        read_dimacs("p cnf 2 1\n1 x 0\n")
    assert exc.value.line == 2
    assert exc.value.found == "x"
    with pytest.raises(FormatError):
        read_dimacs("1 0\n")            # clause before header
    with pytest.raises(FormatError):
        read_dimacs("p cnf 1 1\n2 0\n")  # literal out of range
    with pytest.raises(FormatError):
        read_dimacs("")                 # no header at all
    with pytest.raises(FormatError):
        read_dimacs("p cnf 1 2\n1 0\n")  # clause count mismatch


# ---------------------------------------------------------------------------
# Graphs
# ---------------------------------------------------------------------------

def test_graph_round_trip():
    g = nx.Graph()
    g.add_nodes_from(range(1, 5))
    g.add_edges_from([(3, 1), (2, 4)])
    text = write_graph(g)
    assert text == "p edge 4 2\ne 1 3\ne 2 4\n"
    back = read_graph(text)
    assert sorted(back.nodes()) == [1, 2, 3, 4]
    assert sorted(tuple(sorted(e)) for e in back.edges()) == [(1, 3), (2, 4)]


def test_graph_zero_edges():
    g = read_graph("p edge 3 0\n")
    assert g.number_of_nodes() == 3 and g.number_of_edges() == 0


def test_graph_errors():
    with pytest.raises(FormatError):
        read_graph("e 1 2\n")
    with pytest.raises(FormatError):
        read_graph("p edge 2 1\ne 1 5\n")
    with pytest.raises(FormatError):
        read_graph("p edge 2 1\nx 1 2\n")


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------

def test_grid_round_trip_with_delta():
    g = grid_from_edges(2, [((1, 1), (2, 1)), ((1, 2), (2, 2))], D=1)
    g.delta_table = np.array([[0, 1], [1, 0]], dtype=np.int64)
    text = write_grid(g)
    back = read_grid(text)
    assert back.side == 2 and back.kind == "clique" and back.D == 1
    assert np.array_equal(back.adj, g.adj)
    assert np.array_equal(back.delta_table, g.delta_table)
    assert write_grid(back) == text


def test_grid_biclique_kind_round_trip():
    h = reduce_dcnnc_to_dcnnb(GridGraph(1, D=1))
    text = write_grid(h)
    assert "c kind biclique" in text
    back = read_grid(text)
    assert back.kind == "biclique"
    assert np.array_equal(back.adj, h.adj)


def test_grid_errors():
    with pytest.raises(FormatError):
        read_grid("e 1 1 2 2\n")
    with pytest.raises(FormatError):
        read_grid("p grid 2\ne 1 1 2\n")
    with pytest.raises(FormatError):
        read_grid("p grid 2\nc kind banana\n")
    with pytest.raises(FormatError):
        read_grid("")


# ---------------------------------------------------------------------------
# Instances, orderings
# ---------------------------------------------------------------------------

def test_instance_round_trip():
    inst = PermCspInstance.make(4, [(1, 2, 3), (4, 1)])
    text = write_instance(inst)
    assert text == "p pcsp 4 2 3\n1 2 3 0\n4 1 0\n"
    assert read_instance(text) == inst
    assert write_instance(read_instance(text)) == text


def test_instance_errors():
    with pytest.raises(FormatError):
        read_instance("p pcsp 3 1 2\n1 2\n")        # missing terminator
    with pytest.raises(FormatError):
        read_instance("p pcsp 3 1 2\n1 0 2 0\n")    # two per line
    with pytest.raises(FormatError):
        read_instance("p pcsp 3 2 2\n1 2 0\n")      # count mismatch
    with pytest.raises(FormatError):
        read_instance("p pcsp 3 1 2\n1 9 0\n")      # out of range


def test_ordering_round_trip():
    o = Ordering.from_sequence((2, 3, 1))
    text = write_ordering(o)
    assert text == "2 3 1\n"
    assert read_ordering(text) == o


def test_ordering_errors():
    with pytest.raises(FormatError):
        read_ordering("")
    with pytest.raises(FormatError):
        read_ordering("1 a 2\n")


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------

def test_certificate_round_trip_perm6():
    cert = reduce_clique_to_perm6(grid_from_edges(2, [((1, 1), (2, 2))]),
                                  dummy_count=6)
    text = write_certificate(cert)
    back = read_certificate(text)
    assert back == cert
    assert write_certificate(back) == text


def test_certificate_round_trip_perm4():
    h = reduce_dcnnc_to_dcnnb(GridGraph(1, D=1))
    cert = reduce_dcnnb_to_perm4(h, dummy_count=4)
    text = write_certificate(cert)
    back = read_certificate(text)
    assert back == cert
    assert back.D == 1 and back.delta_sum == cert.delta_sum


def test_certificate_requires_trailer():
    inst = PermCspInstance.make(2, [(1, 2)])
    with pytest.raises(FormatError):
        read_certificate(write_instance(inst))


def test_certificate_rejects_bad_role_code():
    h = reduce_dcnnc_to_dcnnb(GridGraph(1, D=1))
    cert = reduce_dcnnb_to_perm4(h, dummy_count=4)
    text = write_certificate(cert).replace("c role 1 d 1", "c role 1 z 1")
    with pytest.raises(FormatError):
        read_certificate(text)
