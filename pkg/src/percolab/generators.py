"""Host-graph generators: hypercube, random regular, and the two-layer counterexample."""

from __future__ import annotations

import math

import numpy as np

from percolab.errors import (
    DegreeTooLarge,
    DimensionTooLarge,
    NotDivisible,
    ParameterConflict,
    ParityViolation,
    RepairBudgetExceeded,
    RestartBudgetExceeded,
    TooFewClasses,
)
from percolab.graph import Graph, VertexPartition, build_graph

MAX_HYPERCUBE_DIM = 30


def gen_hypercube(d: int) -> Graph:
    """The d-dimensional binary hypercube; vertex labels are the codewords."""
    if d < 1 or d > MAX_HYPERCUBE_DIM:
        raise DimensionTooLarge(f"hypercube dimension must be in [1, {MAX_HYPERCUBE_DIM}], got {d}")
    n = 1 << d
    v = np.arange(n, dtype=np.int64)
    parts = []
    for i in range(d):
        low = v[(v >> i) & 1 == 0]
        parts.append(np.stack([low, low | (1 << i)], axis=1))
    edges = np.concatenate(parts)
    edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
    return Graph(n, edges)


def gen_complete(n: int) -> Graph:
    """K_n."""
    if n < 1:
        raise ParameterConflict(f"need n >= 1, got {n}")
    u, v = np.triu_indices(n, k=1)
    return Graph(n, np.stack([u, v], axis=1).astype(np.int64))


def gen_cycle(n: int) -> Graph:
    if n < 3:
        raise ParameterConflict(f"a cycle needs n >= 3, got {n}")
    v = np.arange(n, dtype=np.int64)
    return build_graph(n, np.stack([v, (v + 1) % n], axis=1))


def _pairing_attempt(n, d, rng):
    # Steger-Wormald style: pair shuffled stubs, keep legal pairs, re-pair the rest.
    # Returns None when the leftover stubs admit no legal pair (caller restarts).
    edges = set()
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    while stubs.size:
        rng.shuffle(stubs)
        leftover = []
        for a, b in stubs.reshape(-1, 2).tolist():
            if a > b:
                a, b = b, a
            if a != b and (a, b) not in edges:
                edges.add((a, b))
            else:
                leftover.append(a)
                leftover.append(b)
        if not leftover:
            break
        distinct = sorted(set(leftover))
        if not any(
            (a, b) not in edges for i, a in enumerate(distinct) for b in distinct[i + 1 :]
        ):
            return None
        stubs = np.asarray(leftover, dtype=np.int64)
    return edges


def gen_random_regular(n: int, d: int, seed: int, max_restarts: int = 1000) -> Graph:
    """Random simple d-regular graph from the configuration model.

    Illegal pairs (loops, repeated edges) are re-paired among themselves; a full
    restart happens only when the leftover stubs cannot be legally paired.
    Deterministic for fixed ``(n, d, seed)``.
    """
    if n < 1 or d < 0:
        raise ParameterConflict(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    if (n * d) % 2:
        raise ParityViolation(f"n*d must be even, got n={n}, d={d}")
    if d >= n:
        raise DegreeTooLarge(f"degree {d} must be smaller than n={n}")
    if d == 0:
        return Graph(n, np.zeros((0, 2), dtype=np.int64))
    rng = np.random.default_rng(seed)
    for _ in range(max_restarts):
        edges = _pairing_attempt(n, d, rng)
        if edges is not None:
            return build_graph(n, sorted(edges))
    raise RestartBudgetExceeded(
        f"no simple {d}-regular pairing on {n} vertices after {max_restarts} restarts"
    )


def equitable_partition(
    h: Graph, class_size: int, seed: int, repair_budget: int | None = None
) -> VertexPartition:
    """Split V(h) into independent sets of exactly ``class_size`` vertices.

    Greedy pass in random order (least-filled admissible class first), then a
    one-swap repair for blocked vertices; a failed repair restarts the greedy
    pass with a fresh order. Total repair/restart work is bounded by
    ``repair_budget`` (default ``50 * n``).
    """
    n, k = h.n, int(class_size)
    if k <= 0 or n % k:
        raise NotDivisible(f"class size {class_size} does not divide n={n}")
    m = n // k
    if n and k > n - h.max_degree:
        # a max-degree vertex has fewer than k-1 non-neighbors: no admissible class for it
        raise TooFewClasses(
            f"{m} classes of size {k} impossible: max degree {h.max_degree} leaves too few non-neighbors"
        )
    budget = 50 * n if repair_budget is None else int(repair_budget)
    adj = h.adj
    rng = np.random.default_rng(seed)
    spent = 0
    stuck = None
    while spent <= budget:
        order = rng.permutation(n).tolist()
        members = [set() for _ in range(m)]
        cls_of = [-1] * n
        ok = True
        for v in order:
            hit = {cls_of[u] for u in adj[v]}
            best = None
            for c in range(m):
                if len(members[c]) < k and c not in hit:
                    if best is None or len(members[c]) < len(members[best]):
                        best = c
            if best is not None:
                members[best].add(v)
                cls_of[v] = best
                continue
            spent += 1
            if spent > budget:
                stuck = v
                ok = False
                break
            if not _repair(v, adj, members, cls_of, k):
                stuck = v
                ok = False
                break
        if ok:
            return VertexPartition.from_classes(n, [sorted(c) for c in members])
    raise RepairBudgetExceeded(
        f"equitable partition failed; stuck at vertex {stuck} after {spent} repairs", vertex=stuck
    )


def _repair(v, adj, members, cls_of, k):
    # find class X and u in X so that X - u + v and Y + u are both independent, Y non-full
    m = len(members)
    nbr_v = set(adj[v])
    for x in range(m):
        inside = nbr_v & members[x]
        if len(inside) > 1:
            continue
        if inside:
            movers = list(inside)
        elif len(members[x]) >= k:
            movers = sorted(members[x])
        else:
            continue  # v fits directly; cannot happen when v is blocked
        for u in movers:
            hit_u = {cls_of[w] for w in adj[u]}
            target = None
            for y in range(m):
                if y != x and len(members[y]) < k and y not in hit_u:
                    if target is None or len(members[y]) < len(members[target]):
                        target = y
            if target is None:
                continue
            members[x].discard(u)
            members[target].add(u)
            cls_of[u] = target
            members[x].add(v)
            cls_of[v] = x
            return True
    return False


def default_cluster_size(n: int, d: int) -> int:
    """round(d^2 ln n), moved to the nearest divisor of n (smaller one on ties)."""
    target = round(d * d * math.log(n))
    divisors = [q for q in range(1, n + 1) if n % q == 0]
    return min(divisors, key=lambda q: (abs(q - target), q))


def gen_counterexample(
    n: int, d: int, b: int, k: int | None = None, seed: int = 0
) -> tuple[Graph, VertexPartition]:
    """Two-layer d-regular graph: a random 10b-regular graph H1 whose equitable
    classes each carry an independent random (d - 10b)-regular graph H2.

    Returns the graph and the class partition (the clusters).
    """
    if int(b) != b or b < 2:
        raise ParameterConflict(f"b must be an integer >= 2, got {b}")
    b = int(b)
    if d % 2:
        raise ParameterConflict(f"d must be even, got {d}")
    outer = 10 * b
    if not outer < d:
        raise ParameterConflict(f"need 10b < d, got 10b={outer}, d={d}")
    if k is None:
        k = default_cluster_size(n, d)
    if k <= 0 or n % k:
        raise ParameterConflict(f"cluster size k={k} must divide n={n}")
    inner = d - outer
    if (k * inner) % 2:
        raise ParameterConflict(f"k*(d-10b) must be even, got k={k}, d-10b={inner}")
    if inner >= k:
        raise ParameterConflict(f"inner degree d-10b={inner} needs k > {inner}, got k={k}")
    if outer >= n:
        raise ParameterConflict(f"outer degree 10b={outer} needs n > {outer}, got n={n}")

    ss = np.random.SeedSequence(seed)
    s_outer, s_part, s_inner = ss.spawn(3)
    h1 = gen_random_regular(n, outer, _seed_int(s_outer))
    part = equitable_partition(h1, k, _seed_int(s_part))
    inner_seeds = s_inner.spawn(part.num_classes)
    blocks = [h1.edges]
    for cls, s in zip(part.classes, inner_seeds):
        h2 = gen_random_regular(k, inner, _seed_int(s))
        label = np.asarray(cls, dtype=np.int64)
        blocks.append(label[h2.edges])
    g = build_graph(n, np.concatenate(blocks))
    return g, part


def outer_layer(g: Graph, part: VertexPartition) -> Graph:
    """Recover H1 from a counterexample graph: drop every intra-class edge."""
    e = g.edges
    keep = part.class_of[e[:, 0]] != part.class_of[e[:, 1]]
    return Graph(g.n, e[keep])


def _seed_int(ss: np.random.SeedSequence) -> int:
    return int(ss.generate_state(1, dtype=np.uint64)[0])
