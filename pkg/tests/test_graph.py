import numpy as np
import pytest

from percolab.errors import DuplicateEdge, InvariantViolation, OutOfRange, SelfLoop
from percolab.generators import gen_complete, gen_cycle, gen_hypercube
from percolab.graph import Graph, VertexPartition, build_graph


def test_build_canonicalizes():
    g = build_graph(4, [(2, 1), (0, 3), (1, 0)])
    assert g.edges.tolist() == [[0, 1], [0, 3], [1, 2]]
    assert g.neighbors(1).tolist() == [0, 2]
    assert g.degrees.tolist() == [2, 2, 1, 1]
    assert g.regular_degree is None
    g.check_invariants()


@pytest.mark.parametrize(
    "edges, exc",
    [([(0, 4)], OutOfRange), ([(-1, 2)], OutOfRange), ([(1, 1)], SelfLoop),
     ([(0, 1), (1, 0)], DuplicateEdge)],
)
def test_build_rejects(edges, exc):
    with pytest.raises(exc):
        build_graph(4, edges)


def test_read_only_arrays():
    g = gen_cycle(5)
    with pytest.raises(ValueError):
        g.indices[0] = 3
    with pytest.raises(ValueError):
        g.edges[0, 0] = 1


def test_regular_and_queries():
    g = gen_hypercube(3)
    assert g.regular_degree == 3
    assert g.has_edge(0, 4) and not g.has_edge(0, 3)
    assert g.induced_edge_count([0, 1, 2, 3]) == 4
    mask = np.zeros(8, dtype=bool)
    mask[[0, 1]] = True
    assert np.flatnonzero(g.external_neighborhood(mask)).tolist() == [2, 3, 4, 5]


def test_square_adjacency():
    g = gen_cycle(6)
    assert g.square_adj[0] == [1, 2, 4, 5]


def test_invariant_check_catches_corruption():
    g = gen_complete(4)
    bad = Graph(4, np.array([[0, 1], [0, 1]]))
    with pytest.raises(InvariantViolation):
        bad.check_invariants()
    g.check_invariants()


def test_partition_from_classes():
    part = VertexPartition.from_classes(4, [[3, 1], [0, 2]])
    assert part.classes == ((1, 3), (0, 2))
    assert part.class_of.tolist() == [1, 0, 1, 0]
    assert part.is_independent_in(gen_cycle(4))
    with pytest.raises(InvariantViolation):
        VertexPartition.from_classes(4, [[0, 1], [1, 2]])
    with pytest.raises(InvariantViolation):
        VertexPartition.from_classes(4, [[0, 1, 2], [3]])
