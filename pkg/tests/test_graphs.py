"""Core data model: graphs, edge vectors, moves, capacities, file formats."""

import random

import pytest

from fiberwalk import (
    Capacities,
    DegreeSequence,
    EdgeVector,
    Graph,
    InputFormatError,
    InvalidEdgeError,
    Move,
    apply_move,
    degree_sequence,
    is_move,
    read_degree_file,
    read_edge_list,
)
from fiberwalk.graphs import canonical_edge, read_capacity_file

K4 = Graph.complete(4)
ONE = Capacities.one()


def test_canonical_edge_orders_and_rejects_loops():
    assert canonical_edge(3, 1) == (1, 3)
    assert canonical_edge(1, 3) == (1, 3)
    with pytest.raises(InvalidEdgeError):
        canonical_edge(2, 2)


def test_graph_validation():
    g = Graph(3, [(2, 1), (2, 3)])
    assert g.edges == ((1, 2), (2, 3))
    assert g.adjacency()[2] == (1, 3)
    with pytest.raises(InvalidEdgeError):
        Graph(3, [(1, 4)])
    with pytest.raises(InvalidEdgeError):
        Graph(3, [(1, 1)])


def test_complete_graph():
    assert K4.m == 6
    assert Graph.complete(5).m == 10
    assert K4.has_edge(4, 1)


def test_degree_sequence_matching():
    x = EdgeVector(K4, {(1, 2): 1, (3, 4): 1})
    assert degree_sequence(x).degrees == (1, 1, 1, 1)


def test_degree_sequence_zero_vector():
    x = EdgeVector(K4, {})
    assert degree_sequence(x).degrees == (0, 0, 0, 0)


def test_degree_sequence_rejects_odd_total():
    with pytest.raises(ValueError):
        DegreeSequence((1, 1, 1))
    # and accepts the published food-web degrees (total 230)
    d = DegreeSequence((9, 10, 6, 2, 3, 3, 9, 11, 6, 4, 6, 7, 5, 7, 8, 4, 3, 8,
                        7, 2, 3, 11, 8, 2, 4, 5, 7, 4, 4, 4, 3, 5, 5, 2, 14, 29))
    assert sum(d.degrees) == 230


def test_degree_sequence_roundtrip_text():
    d = DegreeSequence((1, 2, 3, 4))
    assert d.to_text() == "1,2,3,4"
    assert DegreeSequence.from_text("1,2,3,4") == d
    with pytest.raises(InputFormatError):
        DegreeSequence.from_text("1,2,x")


def test_edge_vector_validation_and_sparsity():
    x = EdgeVector(K4, {(2, 1): 2, (3, 4): 0})
    assert x.weights == {(1, 2): 2}
    assert x.weight((3, 4)) == 0
    with pytest.raises(InvalidEdgeError):
        EdgeVector(Graph(3, [(1, 2)]), {(1, 3): 1})
    with pytest.raises(ValueError):
        EdgeVector(K4, {(1, 2): -1})


def test_is_move_examples():
    assert is_move(K4, {(1, 2): 1, (2, 3): -1, (3, 4): 1, (1, 4): -1})
    assert not is_move(K4, {(1, 2): 1})
    with pytest.raises(InvalidEdgeError):
        is_move(Graph(4, [(1, 2)]), {(3, 4): 1})


def test_sum_of_disjoint_cycle_moves_is_move():
    # two vertex-disjoint alternating squares on K8, summed entrywise
    g = Graph.complete(8)
    a = {(1, 2): 1, (2, 3): -1, (3, 4): 1, (1, 4): -1}
    b = {(5, 6): 1, (6, 7): -1, (7, 8): 1, (5, 8): -1}
    combined = dict(a)
    combined.update(b)
    assert is_move(g, combined)
    # signed degrees verified independently
    net = {v: 0 for v in range(1, 9)}
    for (i, j), z in combined.items():
        net[i] += z
        net[j] += z
    assert all(v == 0 for v in net.values())


def test_move_negation_symmetry():
    z = Move(K4, {(1, 2): 1, (2, 3): -1, (3, 4): 1, (1, 4): -1})
    assert is_move(K4, z.negate().entries)
    assert z.negate().negate() == z
    assert z.canonical_key() == z.negate().canonical_key()


def test_move_addition_closure():
    rng = random.Random(11)
    g = Graph.complete(6)
    cyc = [
        Move(g, {(1, 2): 1, (2, 3): -1, (3, 4): 1, (1, 4): -1}),
        Move(g, {(2, 3): 1, (3, 5): -1, (5, 6): 1, (2, 6): -1}),
        Move(g, {(1, 5): 1, (5, 4): -1, (4, 6): 1, (1, 6): -1}),
    ]
    for _ in range(50):
        z1, z2 = rng.choice(cyc), rng.choice(cyc)
        total = dict(z1.entries)
        for e, z in z2.entries.items():
            total[e] = total.get(e, 0) + z
        assert is_move(g, total)


def test_apply_move_swap():
    x = EdgeVector(K4, {(1, 2): 1, (3, 4): 1})
    z = Move(K4, {(1, 3): 1, (2, 4): 1, (1, 2): -1, (3, 4): -1})
    y = apply_move(x, z, ONE)
    assert y.weights == {(1, 3): 1, (2, 4): 1}
    assert degree_sequence(y) == degree_sequence(x)


def test_apply_move_infeasible_negative():
    x = EdgeVector(K4, {(1, 2): 1, (3, 4): 1})
    z = Move(K4, {(1, 2): 1, (3, 4): 1, (1, 3): -1, (2, 4): -1})
    assert apply_move(x, z, ONE) is None


def test_apply_move_infeasible_from_zero():
    x = EdgeVector(K4, {})
    z = Move(K4, {(1, 2): 1, (2, 3): -1, (3, 4): 1, (1, 4): -1})
    assert apply_move(x, z, Capacities.unbounded()) is None


def test_apply_move_cap_violation():
    # pushing an edge above its cap is infeasible; a looser cap admits it
    x = EdgeVector(K4, {(1, 2): 1, (1, 3): 1, (2, 4): 1})
    z = Move(K4, {(1, 2): 1, (3, 4): 1, (1, 3): -1, (2, 4): -1})
    assert apply_move(x, z, ONE) is None
    loose = Capacities.from_map({e: 2 for e in K4.edges})
    y = apply_move(x, z, loose)
    assert y is not None and y.weight((1, 2)) == 2


def test_apply_then_unapply_roundtrip():
    rng = random.Random(5)
    g = Graph.complete(5)
    caps = Capacities.unbounded()
    for _ in range(100):
        x = EdgeVector(g, {e: rng.randrange(3) for e in g.edges})
        cyc = rng.sample(range(1, 6), 4)
        entries = {}
        sign = 1
        for k in range(4):
            e = canonical_edge(cyc[k], cyc[(k + 1) % 4])
            entries[e] = sign
            sign = -sign
        z = Move(g, entries)
        y = apply_move(x, z, caps)
        if y is None:
            continue
        back = apply_move(y, z.negate(), caps)
        assert back == x
        assert degree_sequence(y) == degree_sequence(x)


def test_degree_sequence_is_linear_in_total():
    rng = random.Random(7)
    g = Graph.complete(6)
    for _ in range(50):
        x = EdgeVector(g, {e: rng.randrange(4) for e in g.edges})
        d = degree_sequence(x)
        assert sum(d.degrees) == 2 * x.total()


def test_capacities_modes():
    assert ONE.cap((1, 2)) == 1 and ONE.is_one
    assert Capacities.unbounded().cap((1, 2)) is None
    caps = Capacities.from_map({(2, 1): 3})
    assert caps.cap((1, 2)) == 3
    with pytest.raises(ValueError):
        Capacities.from_map({(1, 2): 0})


def test_edge_vector_tokens_and_key():
    x = EdgeVector(K4, {(3, 4): 2, (1, 2): 1})
    assert x.tokens() == "1-2:1 3-4:2"
    assert x.key() == ((1, 2, 1), (3, 4, 2))


def test_read_edge_list(tmp_path):
    p = tmp_path / "g.edges"
    p.write_text("# header\n1 2\n2 3  # trailing\n\n3 1\n")
    g = read_edge_list(p)
    assert g.n == 3 and g.m == 3


def test_read_edge_list_rejects_duplicates_and_loops(tmp_path):
    p = tmp_path / "dup.edges"
    p.write_text("1 2\n2 1\n")
    with pytest.raises(InputFormatError):
        read_edge_list(p)
    q = tmp_path / "loop.edges"
    q.write_text("1 2\n3 3\n2 3\n")
    with pytest.raises(InputFormatError):
        read_edge_list(q)
    g = read_edge_list(q, drop_loops=True)
    assert g.m == 2


def test_read_degree_file(tmp_path):
    p = tmp_path / "d.txt"
    p.write_text("1,1,1,1\n")
    assert read_degree_file(p).degrees == (1, 1, 1, 1)
    p.write_text("1,1,1\n")
    with pytest.raises(InputFormatError):
        read_degree_file(p)


def test_read_capacity_file(tmp_path):
    p = tmp_path / "caps.txt"
    p.write_text("1 2 3\n2 3 1\n")
    caps = read_capacity_file(p)
    assert caps.cap((1, 2)) == 3
    assert caps.cap((2, 3)) == 1
