import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from percolab.errors import InvalidProbability, StreamExhausted, UniverseMismatch
from percolab.generators import gen_complete, gen_cycle, gen_hypercube
from percolab.graph import build_graph
from percolab.percolation import (
    BernoulliStream,
    UnionFind,
    VertexSubset,
    bfs_explore,
    bond_components,
    components,
    neighborhood_deficits,
    sample_site,
    two_round_exposure,
)

from conftest import random_graph


def test_vertex_subset():
    a = VertexSubset.from_indices(5, [0, 3])
    b = VertexSubset.from_indices(5, [3, 4])
    assert len(a | b) == 3 and 3 in a and 4 not in a
    assert VertexSubset.full(4).count == 4 and VertexSubset.empty(4).count == 0
    with pytest.raises(ValueError):
        a.membership[0] = False


def test_union_find():
    uf = UnionFind(5)
    assert uf.union(0, 1) and uf.union(1, 2) and not uf.union(0, 2)
    assert uf.find(2) == uf.find(0) != uf.find(3)


def test_components_basic():
    g = gen_cycle(6)
    st_ = components(g, VertexSubset.from_indices(6, [0, 1, 3, 4, 5]))
    assert st_.size_multiset() == [5]
    st_ = components(g, VertexSubset.from_indices(6, [0, 1, 3]))
    assert st_.size_multiset() == [2, 1]
    assert st_.L1 == 2 and st_.L2 == 1 and st_.component_of[2] == -1
    assert st_.members(0).tolist() == [0, 1]
    with pytest.raises(UniverseMismatch):
        components(g, VertexSubset.full(5))


def test_full_and_empty_retention():
    g = gen_hypercube(4)
    assert components(g, sample_site(g, 1.0, 0)).size_multiset() == [16]
    st_ = components(g, sample_site(g, 0.0, 0))
    assert st_.L1 == 0 and st_.num_components == 0
    with pytest.raises(InvalidProbability):
        sample_site(g, 1.2, 0)


def test_triangle_trace():
    g = build_graph(3, [(0, 1), (1, 2), (0, 2)])
    stats, tr = bfs_explore(g, stream=iter([1, 1, 0]))
    assert stats.size_multiset() == [2]
    assert tr.S.indices().tolist() == [0, 1] and tr.J.indices().tolist() == [2]
    assert tr.rounds == 3


def test_trace_conservation_and_queue_discipline():
    g = gen_hypercube(5)
    stats, tr = bfs_explore(g, stream=BernoulliStream(0.5, 3))
    for rnd, s, u, t, j in tr.samples:
        assert s + u + t + j == g.n
        assert u + j + s >= rnd - 0  # every query moved one vertex out of T
        assert t == g.n - rnd
    assert tr.rounds == g.n  # every vertex is queried exactly once
    assert tr.S.count + tr.J.count == g.n


def test_stream_exhausted():
    with pytest.raises(StreamExhausted):
        bfs_explore(gen_cycle(5), stream=iter([1, 1]))


def test_exploration_matches_union_find():
    rng = np.random.default_rng(0)
    for i in range(200):
        n = int(rng.integers(1, 40))
        g = random_graph(n, float(rng.uniform(0.02, 0.4)), rng)
        order = rng.permutation(n).tolist()
        stats, tr = bfs_explore(g, order=order, stream=BernoulliStream(0.5, i))
        oracle = components(g, tr.S)
        assert stats.size_multiset() == oracle.size_multiset()
        assert np.array_equal(stats.component_of, oracle.component_of)


def test_bond_components():
    g = gen_complete(6)
    assert bond_components(g, 1.0, 0).size_multiset() == [6]
    assert bond_components(g, 0.0, 0).size_multiset() == [1] * 6


def test_bernoulli_stream_replayable():
    a = [next(BernoulliStream(0.3, 5)) for _ in range(1)]
    s1, s2 = BernoulliStream(0.3, 5, chunk=7), BernoulliStream(0.3, 5, chunk=7)
    assert [next(s1) for _ in range(50)] == [next(s2) for _ in range(50)]
    assert a[0] in (0, 1)


def test_two_round_exposure_distribution_and_flags():
    g = gen_hypercube(10)
    rep = two_round_exposure(g, 0.3, 1.0, threshold=20, large_cutoff=40, seed=1)
    assert rep.p1 == pytest.approx((0.3 - 0.1) / 0.9)
    assert np.all(rep.g1_stats.retained.membership <= rep.g2_stats.retained.membership)
    assert rep.w1.count == int(rep.g1_stats.sizes[rep.g1_stats.sizes >= 20].sum())
    # the retained fraction tracks p over many vertices
    frac = np.mean([two_round_exposure(g, 0.3, 1.0, 20, 40, s).g2_stats.retained.count / g.n
                    for s in range(20)])
    assert frac == pytest.approx(0.3, abs=0.01)


def test_two_round_merge_detection():
    g = gen_hypercube(8)
    rep = two_round_exposure(g, 1.0, 1.0, threshold=1, large_cutoff=1, seed=0, d=8)
    assert rep.w1_merged and rep.new_large_outside_w1 == 0


def test_neighborhood_deficits():
    g = gen_hypercube(4)
    st_ = components(g, VertexSubset.full(16))
    (cid, size, nb), = neighborhood_deficits(g, st_, min_size=1)
    assert (cid, size, nb) == (0, 16, 0)
    assert neighborhood_deficits(g, st_, min_size=16) == []


@settings(max_examples=50, deadline=None)
@given(p=st.floats(0, 1), seed=st.integers(0, 2**32))
def test_component_sizes_sum_to_retained(p, seed):
    g = gen_hypercube(6)
    st_ = components(g, sample_site(g, p, seed))
    assert int(st_.sizes.sum()) == st_.retained.count
    assert list(st_.sizes) == sorted(st_.sizes, reverse=True)
