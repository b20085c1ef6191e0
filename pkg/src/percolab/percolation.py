"""Site and bond percolation, component analysis, exploration and sprinkling."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from percolab.errors import InvalidProbability, StreamExhausted, UniverseMismatch
from percolab.graph import Graph
from percolab.gw import sprinkle_split


def _check_p(p):
    if not (0.0 <= p <= 1.0):
        raise InvalidProbability(f"p must lie in [0, 1], got {p}")


@dataclass(frozen=True, eq=False)
class VertexSubset:
    membership: np.ndarray
    count: int = field(init=False)

    def __post_init__(self):
        m = np.asarray(self.membership, dtype=bool)
        m.setflags(write=False)
        object.__setattr__(self, "membership", m)
        object.__setattr__(self, "count", int(np.count_nonzero(m)))

    @property
    def n(self) -> int:
        return int(self.membership.size)

    @classmethod
    def from_indices(cls, n: int, idx: Iterable[int]) -> "VertexSubset":
        m = np.zeros(n, dtype=bool)
        m[np.fromiter(idx, dtype=np.int64)] = True
        return cls(m)

    @classmethod
    def full(cls, n: int) -> "VertexSubset":
        return cls(np.ones(n, dtype=bool))

    @classmethod
    def empty(cls, n: int) -> "VertexSubset":
        return cls(np.zeros(n, dtype=bool))

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.membership)

    def __contains__(self, v) -> bool:
        return bool(self.membership[v])

    def __len__(self) -> int:
        return self.count

    def __eq__(self, other):
        if not isinstance(other, VertexSubset):
            return NotImplemented
        return np.array_equal(self.membership, other.membership)

    def __or__(self, other: "VertexSubset") -> "VertexSubset":
        return VertexSubset(self.membership | other.membership)


class UnionFind:
    """Disjoint sets over 0..n-1 with union by size and path halving."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


@dataclass(frozen=True, eq=False)
class ComponentStats:
    """Component decomposition of an induced (or bond-percolated) subgraph.

    ``component_of[v]`` is -1 for vertices outside ``retained``; ids are
    assigned by decreasing size, ties broken by smallest member.
    """

    sizes: np.ndarray
    component_of: np.ndarray
    retained: VertexSubset

    @property
    def L1(self) -> int:
        return int(self.sizes[0]) if self.sizes.size else 0

    @property
    def L2(self) -> int:
        return int(self.sizes[1]) if self.sizes.size > 1 else 0

    @property
    def num_components(self) -> int:
        return int(self.sizes.size)

    def members(self, cid: int) -> np.ndarray:
        return np.flatnonzero(self.component_of == cid)

    def size_multiset(self) -> list[int]:
        return self.sizes.tolist()


def _label(n: int, mask: np.ndarray, pairs: np.ndarray) -> ComponentStats:
    uf = UnionFind(n)
    for a, b in pairs.tolist():
        uf.union(a, b)
    verts = np.flatnonzero(mask)
    if verts.size == 0:
        return ComponentStats(np.zeros(0, np.int64), np.full(n, -1, np.int64), VertexSubset(mask))
    find = uf.find
    roots = np.fromiter((find(v) for v in verts.tolist()), dtype=np.int64, count=verts.size)
    uniq, first, inv, counts = np.unique(roots, return_index=True, return_inverse=True,
                                         return_counts=True)
    # verts ascending, so verts[first] is each component's smallest member
    rank = np.lexsort((verts[first], -counts))
    new_id = np.empty_like(rank)
    new_id[rank] = np.arange(rank.size)
    comp = np.full(n, -1, dtype=np.int64)
    comp[verts] = new_id[inv]
    return ComponentStats(counts[rank].astype(np.int64), comp, VertexSubset(mask))


def sample_site(g: Graph, p: float, seed) -> VertexSubset:
    """V_p: every vertex kept independently with probability p."""
    _check_p(p)
    rng = np.random.default_rng(seed)
    return VertexSubset(rng.random(g.n) < p)


def components(g: Graph, retained: VertexSubset) -> ComponentStats:
    """Components of the induced subgraph G[retained] (union-find over edges)."""
    if retained.n != g.n:
        raise UniverseMismatch(f"subset universe {retained.n} != graph order {g.n}")
    mask = retained.membership
    e = g.edges
    sel = mask[e[:, 0]] & mask[e[:, 1]]
    return _label(g.n, mask, e[sel])


def bond_components(g: Graph, p: float, seed) -> ComponentStats:
    """Components after keeping each edge independently with probability p."""
    _check_p(p)
    rng = np.random.default_rng(seed)
    keep = rng.random(g.edge_count) < p
    return _label(g.n, np.ones(g.n, dtype=bool), g.edges[keep])


class BernoulliStream:
    """Replayable i.i.d. Bernoulli(p) bit source, pulled lazily in chunks."""

    def __init__(self, p: float, seed, chunk: int = 4096):
        _check_p(p)
        self.p = p
        self._rng = np.random.default_rng(seed)
        self._chunk = chunk
        self._buf: list[bool] = []
        self._pos = 0
        self.drawn = 0

    def __iter__(self):
        return self

    def __next__(self) -> int:
        if self._pos >= len(self._buf):
            self._buf = (self._rng.random(self._chunk) < self.p).tolist()
            self._pos = 0
        bit = self._buf[self._pos]
        self._pos += 1
        self.drawn += 1
        return int(bit)


@dataclass
class ExplorationTrace:
    rounds: int
    stride: int
    # rows of (round, |S|, |U|, |T|, |J|)
    samples: list[tuple[int, int, int, int, int]]
    S: VertexSubset
    J: VertexSubset


_T, _U, _S, _J = 0, 1, 2, 3


def bfs_explore(
    g: Graph,
    order: Sequence[int] | None = None,
    stream: Iterable[int] | None = None,
    stride: int = 1,
) -> tuple[ComponentStats, ExplorationTrace]:
    """Queue-based exploration that reveals G[V_p] one vertex query at a time.

    Sets: S (done), U (FIFO queue), T (untouched), J (rejected). Each round
    queries one vertex: the first T-vertex in ``order`` when U is empty,
    otherwise the first T-neighbor (in ``order``) of the head of U. The head
    moves to S, without a query, once it has no T-neighbors left. ``stream``
    supplies the answers (1 = retained).
    """
    n = g.n
    if order is None:
        order = list(range(n))
    else:
        order = [int(v) for v in order]
        if sorted(order) != list(range(n)):
            raise UniverseMismatch("order must be a permutation of the vertex set")
    if stream is None:
        raise ValueError("bfs_explore needs a bit stream")
    bits: Iterator[int] = iter(stream)
    pos = [0] * n
    for i, v in enumerate(order):
        pos[v] = i
    nbrs = [sorted(a, key=pos.__getitem__) for a in g.adj]
    ptr = [0] * n
    state = [_T] * n
    comp = [-1] * n
    counts = [0, 0, n, 0]  # indexed S, U, T, J below
    queue: deque[int] = deque()
    seed_ptr = 0
    rounds = 0
    ncomp = 0
    samples = [(0, 0, 0, n, 0)]

    def query(v: int, cid: int) -> bool:
        nonlocal rounds
        try:
            bit = next(bits)
        except StopIteration:
            raise StreamExhausted(f"bit stream ran out after {rounds} queries") from None
        rounds += 1
        counts[2] -= 1
        if bit:
            state[v] = _U
            comp[v] = cid
            queue.append(v)
            counts[1] += 1
        else:
            state[v] = _J
            counts[3] += 1
        return bool(bit)

    def record():
        if rounds % stride == 0 and samples[-1][0] != rounds:
            samples.append((rounds, counts[0], counts[1], counts[2], counts[3]))

    while True:
        if not queue:
            while seed_ptr < n and state[order[seed_ptr]] != _T:
                seed_ptr += 1
            if seed_ptr == n:
                break
            if query(order[seed_ptr], ncomp):
                ncomp += 1
            record()
            continue
        head = queue[0]
        lst = nbrs[head]
        i = ptr[head]
        while i < len(lst) and state[lst[i]] != _T:
            i += 1
        ptr[head] = i
        if i == len(lst):
            queue.popleft()
            state[head] = _S
            counts[1] -= 1
            counts[0] += 1
            continue
        query(lst[i], comp[head])
        record()

    if samples[-1][0] != rounds or samples[-1][1] != counts[0]:
        samples.append((rounds, counts[0], counts[1], counts[2], counts[3]))
    s_mask = np.fromiter((st == _S for st in state), dtype=bool, count=n)
    j_mask = np.fromiter((st == _J for st in state), dtype=bool, count=n)
    comp_arr = np.asarray(comp, dtype=np.int64)
    if ncomp:
        counts_per = np.bincount(comp_arr[s_mask], minlength=ncomp)
        first = np.full(ncomp, n, dtype=np.int64)
        np.minimum.at(first, comp_arr[s_mask], np.flatnonzero(s_mask))
        rank = np.lexsort((first, -counts_per))
        new_id = np.empty_like(rank)
        new_id[rank] = np.arange(ncomp)
        comp_arr[s_mask] = new_id[comp_arr[s_mask]]
        sizes = counts_per[rank].astype(np.int64)
    else:
        sizes = np.zeros(0, np.int64)
    S = VertexSubset(s_mask)
    stats = ComponentStats(sizes, comp_arr, S)
    return stats, ExplorationTrace(rounds, stride, samples, S, VertexSubset(j_mask))


@dataclass
class SprinklingReport:
    p: float
    s: float
    p1: float
    p2: float
    threshold: float
    large_cutoff: float
    g1_stats: ComponentStats
    g2_stats: ComponentStats
    w1: VertexSubset
    w1_components: int
    w1_merged: bool
    new_large_outside_w1: int


def two_round_exposure(
    g: Graph,
    p: float,
    s: float,
    threshold: float,
    large_cutoff: float,
    seed,
    d: int | None = None,
) -> SprinklingReport:
    """Draw V_p as V_{p1} plus a p2-sprinkle and compare G1 = G[V_{p1}] with G2 = G[V_p].

    W1 collects vertices of G1-components of size >= ``threshold``.
    ``w1_merged`` holds when W1 lies inside a single G2-component (vacuously
    when W1 is empty); ``new_large_outside_w1`` counts G2-components of size
    >= ``large_cutoff`` that avoid W1.
    """
    if threshold <= 0 or large_cutoff <= 0:
        raise ValueError("threshold and large_cutoff must be positive")
    if d is None:
        d = g.regular_degree if g.regular_degree is not None else g.max_degree
    p1, p2 = sprinkle_split(p, s, d)
    rng = np.random.default_rng(seed)
    first = rng.random(g.n) < p1
    sprinkle = rng.random(g.n) < p2
    v1 = VertexSubset(first)
    v2 = VertexSubset(first | sprinkle)
    g1 = components(g, v1)
    g2 = components(g, v2)

    big1 = np.flatnonzero(g1.sizes >= threshold)
    w1_mask = np.isin(g1.component_of, big1) & first
    hit = np.unique(g2.component_of[w1_mask])
    merged = hit.size <= 1
    large2 = np.flatnonzero(g2.sizes >= large_cutoff)
    outside = np.setdiff1d(large2, hit, assume_unique=True)
    return SprinklingReport(p, s, p1, p2, float(threshold), float(large_cutoff), g1, g2,
                            VertexSubset(w1_mask), int(big1.size), bool(merged), int(outside.size))


def neighborhood_deficits(g: Graph, stats: ComponentStats, min_size: float,
                          factor: float = 0.9, d: int | None = None) -> list[tuple[int, int, int]]:
    """Components S with |S| > min_size but |N_G(S)| < factor * d * |S|.

    Returns ``(component id, |S|, |N_G(S)|)`` per offending component.
    """
    if d is None:
        d = g.regular_degree if g.regular_degree is not None else g.max_degree
    out = []
    for cid in np.flatnonzero(stats.sizes > min_size).tolist():
        mask = stats.component_of == cid
        nb = int(np.count_nonzero(g.external_neighborhood(mask)))
        size = int(stats.sizes[cid])
        if nb < factor * d * size:
            out.append((cid, size, nb))
    return out
