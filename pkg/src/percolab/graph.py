"""Immutable undirected simple graphs in compressed (offset/values) layout."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from percolab.errors import DuplicateEdge, InvariantViolation, OutOfRange, SelfLoop


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Graph:
    """Undirected simple graph on vertices ``0..n-1``.

    ``indptr``/``indices`` hold strictly ascending neighbor lists; ``edges`` is
    the canonical ``(m, 2)`` array with ``u < v`` in lexicographic order.
    Instances are read-only and safe to share between workers.
    """

    def __init__(self, n: int, edges: np.ndarray):
        # edges must already be canonical: unique, u < v, lexicographically sorted
        self.n = int(n)
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        self.edge_count = int(edges.shape[0])
        both = np.concatenate([edges, edges[:, ::-1]])
        order = np.lexsort((both[:, 1], both[:, 0]))
        both = both[order]
        deg = np.bincount(both[:, 0], minlength=self.n) if self.n else np.zeros(0, np.int64)
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        self.indptr = _frozen(indptr)
        self.indices = _frozen(np.ascontiguousarray(both[:, 1]))
        self.edges = _frozen(np.ascontiguousarray(edges))
        if self.n and deg.min() == deg.max():
            self.regular_degree = int(deg[0])
        else:
            self.regular_degree = None

    def __repr__(self):
        reg = f", d={self.regular_degree}" if self.regular_degree is not None else ""
        return f"Graph(n={self.n}, m={self.edge_count}{reg})"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))

    @cached_property
    def degrees(self) -> np.ndarray:
        return _frozen(np.diff(self.indptr))

    @cached_property
    def row_index(self) -> np.ndarray:
        """Source vertex of every entry of ``indices``."""
        return _frozen(np.repeat(np.arange(self.n, dtype=np.int64), self.degrees))

    def external_neighborhood(self, mask: np.ndarray) -> np.ndarray:
        """Boolean mask of N(U): vertices outside U with a neighbor in U."""
        out = np.zeros(self.n, dtype=bool)
        out[self.indices[mask[self.row_index]]] = True
        out &= ~mask
        return out

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @property
    def min_degree(self) -> int:
        return int(self.degrees.min()) if self.n else 0

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    @cached_property
    def adj(self) -> list[list[int]]:
        """Neighbor lists as plain Python lists (hot loops in pure Python)."""
        ind = self.indices.tolist()
        ptr = self.indptr.tolist()
        return [ind[ptr[v] : ptr[v + 1]] for v in range(self.n)]

    @cached_property
    def square_adj(self) -> list[list[int]]:
        """Neighbor lists of the square graph (distance 1 or 2)."""
        adj = self.adj
        out = []
        for v in range(self.n):
            s = set(adj[v])
            for u in adj[v]:
                s.update(adj[u])
            s.discard(v)
            out.append(sorted(s))
        return out

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < nb.size and nb[i] == v)

    def induced_edge_count(self, vertices: Iterable[int]) -> int:
        mask = np.zeros(self.n, dtype=bool)
        mask[list(vertices)] = True
        return int(np.count_nonzero(mask[self.edges[:, 0]] & mask[self.edges[:, 1]]))

    def check_invariants(self) -> None:
        """Raise :class:`InvariantViolation` if any structural invariant fails."""
        e = self.edges
        if e.size:
            if np.any(e[:, 0] >= e[:, 1]):
                raise InvariantViolation("edge with u >= v (self-loop or unsorted pair)")
            if e.min() < 0 or e.max() >= self.n:
                raise InvariantViolation("endpoint out of range")
            key = e[:, 0] * self.n + e[:, 1]
            if np.any(np.diff(key) <= 0):
                raise InvariantViolation("edges not strictly sorted / duplicated")
        if int(self.degrees.sum()) != 2 * self.edge_count:
            raise InvariantViolation("degree sum != 2m")
        rows = np.repeat(np.arange(self.n), self.degrees)
        if rows.size:
            same_row = rows[1:] == rows[:-1]
            if np.any(same_row & (np.diff(self.indices) <= 0)):
                raise InvariantViolation("a neighbor list is not strictly ascending")
            if np.any(rows == self.indices):
                raise InvariantViolation("self-loop in adjacency")
            # symmetry: the adjacency viewed as (min, max) pairs must be every edge twice
            lo = np.minimum(rows, self.indices)
            hi = np.maximum(rows, self.indices)
            key = np.sort(lo * self.n + hi)
            if not (np.array_equal(key[0::2], key[1::2])
                    and np.array_equal(key[0::2], e[:, 0] * self.n + e[:, 1])):
                raise InvariantViolation("adjacency is not symmetric")
        if self.regular_degree is not None and np.any(self.degrees != self.regular_degree):
            raise InvariantViolation("regular_degree set but degrees differ")


def build_graph(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Validate an edge list and build a :class:`Graph`.

    Raises :class:`OutOfRange`, :class:`SelfLoop` or :class:`DuplicateEdge`.
    """
    if n < 0:
        raise OutOfRange(f"negative vertex count {n}")
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    arr = arr.reshape(-1, 2)
    if arr.size:
        bad = (arr < 0) | (arr >= n)
        if bad.any():
            i = int(np.argwhere(bad.any(axis=1))[0, 0])
            raise OutOfRange(f"edge {tuple(arr[i])} has endpoint outside [0, {n})")
        loops = arr[:, 0] == arr[:, 1]
        if loops.any():
            i = int(np.argmax(loops))
            raise SelfLoop(f"self-loop at vertex {arr[i, 0]}")
    canon = np.sort(arr, axis=1)
    canon = canon[np.lexsort((canon[:, 1], canon[:, 0]))]
    if canon.shape[0] > 1:
        dup = np.all(canon[1:] == canon[:-1], axis=1)
        if dup.any():
            i = int(np.argmax(dup))
            raise DuplicateEdge(f"duplicate edge {tuple(canon[i])}")
    return Graph(n, canon)


@dataclass(frozen=True)
class VertexPartition:
    """Equal-size vertex classes (the clusters of the counterexample construction)."""

    class_size: int
    classes: tuple[tuple[int, ...], ...]
    class_of: np.ndarray = field(repr=False)

    @classmethod
    def from_classes(cls, n: int, classes: Sequence[Sequence[int]]) -> "VertexPartition":
        class_of = np.full(n, -1, dtype=np.int64)
        canon = []
        for i, c in enumerate(classes):
            c = tuple(sorted(int(v) for v in c))
            for v in c:
                if class_of[v] != -1:
                    raise InvariantViolation(f"vertex {v} appears in two classes")
                class_of[v] = i
            canon.append(c)
        if np.any(class_of < 0):
            raise InvariantViolation("classes do not cover the vertex set")
        sizes = {len(c) for c in canon}
        if len(sizes) > 1:
            raise InvariantViolation(f"unequal class sizes {sorted(sizes)}")
        size = sizes.pop() if sizes else 0
        return cls(size, tuple(canon), _frozen(class_of))

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def is_independent_in(self, h: Graph) -> bool:
        e = h.edges
        return not bool(np.any(self.class_of[e[:, 0]] == self.class_of[e[:, 1]]))
