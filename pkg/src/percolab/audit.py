"""Exact local expansion audits by connected-set enumeration.

Reductions that keep the audits exact while enumerating only connected sets:

* e(U, U^c)/|U| and e(U)/|U| are weighted means over the connected pieces of
  U, so their extremes over all sets of size <= s are attained on G-connected
  sets of size <= s.
* If U splits into pieces that are pairwise at distance >= 3 (components in
  G^2), their external neighborhoods are disjoint, so |N(U)| is additive and
  the minimum of |N(U)|/|U| is attained on a G^2-connected set.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from percolab.errors import BudgetExceeded, NotRegular, ValidationError
from percolab.graph import Graph
from percolab.spectral import SpectralEstimate, alon_milman_bound, spectral_lambda

DEFAULT_BUDGET = 10**8

EDGE, VERTEX, SPARSITY = "edge", "vertex", "sparsity"


class _Walker:
    """Depth-first connected-set enumeration (ESU-style exclusive extension).

    Every set connected in the search graph is visited exactly once: either
    anchored at its minimum vertex (default) or, with ``root`` given, every set
    containing ``root``. Incrementally tracks e(U), sum of degrees and, if
    requested, |N(U)| measured in G.
    """

    def __init__(self, g: Graph, max_size: int, square: bool, track_nbhd: bool,
                 budget: int, root: int | None = None):
        if max_size < 1:
            raise ValidationError("max_size must be >= 1")
        if root is not None and not 0 <= root < g.n:
            raise ValidationError(f"root {root} outside [0, {g.n})")
        self.g = g
        self.max_size = max_size
        self.sadj = g.square_adj if square else g.adj
        self.track_nbhd = track_nbhd
        self.budget = budget
        self.root = root
        self.visited = 0

    def run(self, visit) -> None:
        g = self.g
        n = g.n
        adj = g.adj
        sadj = self.sadj
        deg = g.degrees.tolist()
        in_sub = [False] * n
        mark = [0] * n
        cover = [0] * n
        sub: list[int] = []
        max_size = self.max_size
        track = self.track_nbhd
        budget = self.budget

        def push(w, e_in, nb):
            for u in adj[w]:
                if in_sub[u]:
                    e_in += 1
            if track:
                if cover[w]:
                    nb -= 1
                for u in adj[w]:
                    if not cover[u] and not in_sub[u]:
                        nb += 1
                    cover[u] += 1
            in_sub[w] = True
            sub.append(w)
            mark[w] += 1
            for u in sadj[w]:
                mark[u] += 1
            return e_in, nb

        def pop(w):
            sub.pop()
            in_sub[w] = False
            mark[w] -= 1
            for u in sadj[w]:
                mark[u] -= 1
            if track:
                for u in adj[w]:
                    cover[u] -= 1

        def rec(ext, e_in, sdeg, nb, floor):
            if self.visited >= budget:
                raise BudgetExceeded(f"enumeration budget {budget} exhausted",
                                     visited=self.visited)
            self.visited += 1
            visit(sub, e_in, sdeg, nb)
            if len(sub) == max_size:
                return
            ext = list(ext)
            while ext:
                w = ext.pop()
                new = [u for u in sadj[w] if not mark[u] and u > floor]
                e2, nb2 = push(w, e_in, nb)
                rec(ext + new, e2, sdeg + deg[w], nb2, floor)
                pop(w)

        limit = sys.getrecursionlimit()
        if limit < max_size + 200:
            sys.setrecursionlimit(max_size + 200)
        anchors = [self.root] if self.root is not None else range(n)
        for v in anchors:
            floor = v if self.root is None else -1
            e_in, nb = push(v, 0, 0)
            ext = [u for u in sadj[v] if u > floor]
            rec(ext, e_in, deg[v], nb, floor)
            pop(v)


def enumerate_connected_sets(g: Graph, max_size: int, connectivity: str = "G",
                             budget: int = DEFAULT_BUDGET,
                             root: int | None = None) -> Iterator[tuple[int, ...]]:
    """Yield each set of at most ``max_size`` vertices that is connected in G
    (``connectivity="G"``) or in its square (``"G2"``) exactly once, as a
    sorted tuple. Raises :class:`BudgetExceeded` after ``budget`` sets."""
    if connectivity not in ("G", "G2"):
        raise ValidationError(f"connectivity must be 'G' or 'G2', got {connectivity!r}")
    out: list[tuple[int, ...]] = []
    walker = _Walker(g, max_size, connectivity == "G2", False, budget, root)
    # materialised per anchor so the generator stays simple and ordering deterministic
    try:
        walker.run(lambda sub, *_: out.append(tuple(sorted(sub))))
    except BudgetExceeded:
        yield from out
        raise
    yield from out


@dataclass
class SizeExtreme:
    size: int
    ratio: float
    value: int
    witness: tuple[int, ...]
    count: int


@dataclass
class ExtremeTable:
    """Per-size extremes over connected sets, plus exact prefix extremes.

    ``entries[s]`` is the extreme over sets of size exactly s that are connected
    (in G or G^2, per quantity). ``upto(s)`` is the extreme over *all* sets of
    size <= s, which the connectivity reductions make exact.
    """

    quantity: str
    maximize: bool
    max_size: int
    entries: dict[int, SizeExtreme]
    visited: int
    complete: bool = True

    def upto(self, s: int) -> SizeExtreme | None:
        best = None
        for size in sorted(self.entries):
            if size > s:
                break
            e = self.entries[size]
            if best is None or (e.ratio > best.ratio if self.maximize else e.ratio < best.ratio):
                best = e
        return best

    def ratios(self) -> dict[int, float]:
        return {s: e.ratio for s, e in sorted(self.entries.items())}


def _extremes(g: Graph, max_size: int, quantity: str, budget: int,
              root: int | None) -> ExtremeTable:
    maximize = quantity == SPARSITY
    square = quantity == VERTEX
    best_val: dict[int, int] = {}
    best_wit: dict[int, tuple] = {}
    counts: dict[int, int] = {}

    if quantity == EDGE:
        def score(sub, e_in, sdeg, nb):
            return sdeg - 2 * e_in
    elif quantity == VERTEX:
        def score(sub, e_in, sdeg, nb):
            return nb
    else:
        def score(sub, e_in, sdeg, nb):
            return e_in

    def visit(sub, e_in, sdeg, nb):
        s = len(sub)
        val = score(sub, e_in, sdeg, nb)
        counts[s] = counts.get(s, 0) + 1
        cur = best_val.get(s)
        if cur is None or (val > cur if maximize else val < cur):
            best_val[s] = val
            best_wit[s] = tuple(sorted(sub))

    walker = _Walker(g, max_size, square, quantity == VERTEX, budget, root)
    complete = True
    try:
        walker.run(visit)
    except BudgetExceeded as exc:
        complete = False
        partial = _table(quantity, maximize, max_size, best_val, best_wit, counts, walker.visited,
                         False)
        raise BudgetExceeded(str(exc), visited=walker.visited, partial=partial) from None
    return _table(quantity, maximize, max_size, best_val, best_wit, counts, walker.visited, complete)


def _table(quantity, maximize, max_size, best_val, best_wit, counts, visited, complete):
    entries = {
        s: SizeExtreme(s, best_val[s] / s, best_val[s], best_wit[s], counts[s])
        for s in sorted(best_val)
    }
    return ExtremeTable(quantity, maximize, max_size, entries, visited, complete)


def min_edge_expansion(g: Graph, max_size: int, budget: int = DEFAULT_BUDGET,
                       root: int | None = None) -> ExtremeTable:
    """Minimum of e(U, U^c)/|U| per size (G-connected enumeration).

    Pass ``root`` only for vertex-transitive graphs: every set then has an
    isomorphic image through ``root`` and one anchor suffices.
    """
    return _extremes(g, max_size, EDGE, budget, root)


def min_vertex_expansion(g: Graph, max_size: int, budget: int = DEFAULT_BUDGET,
                         root: int | None = None) -> ExtremeTable:
    """Minimum of |N(U)|/|U| per size (G^2-connected enumeration)."""
    return _extremes(g, max_size, VERTEX, budget, root)


def local_sparsity_max(g: Graph, max_size: int, budget: int = DEFAULT_BUDGET,
                       root: int | None = None) -> ExtremeTable:
    """Maximum of e(U)/|U| per size (G-connected enumeration)."""
    return _extremes(g, max_size, SPARSITY, budget, root)


# --- direct evaluation (witness recomputation, brute force) -----------------

def set_measures(g: Graph, vertices) -> dict[str, int]:
    mask = np.zeros(g.n, dtype=bool)
    mask[list(vertices)] = True
    e = g.edges
    inside = int(np.count_nonzero(mask[e[:, 0]] & mask[e[:, 1]]))
    cut = int(np.count_nonzero(mask[e[:, 0]] ^ mask[e[:, 1]]))
    nb = int(np.count_nonzero(g.external_neighborhood(mask)))
    return {"size": int(mask.sum()), "e_in": inside, "e_cut": cut, "nbhd": nb}


# --- profile audit -----------------------------------------------------------

@dataclass
class ExpansionProfile:
    """Constants of one family of expansion hypotheses.

    mode "P": P1 e(U,U^c) >= c1|U| (|U| <= n/2); P2 |N(U)| >= c2 d^alpha |U|
    (|U| <= c3 d^(1-alpha) ln n); P3 e(U,U^c) >= (1 - eps^2/1000) d |U|
    (|U| <= 4 d^(4/alpha + 2) ln^C n).
    mode "Q": Q1 e(U,U^c) >= b|U| (|U| <= n/2); Q2 |N(U)| >= (1-alpha) d|U|
    (|U| <= c3 d ln n, c3 playing the small constant c); Q3 e(U,U^c) >=
    (1-alpha) d|U| (|U| <= (alpha/2) d^2 ln n).
    mode "R": R1 e(U,U^c) >= b|U| (|U| <= n/2); R2 e(U) <= (1+delta)|U|
    (|U| <= ln^C n); R2v |N(U)| >= (d/(1+delta) - 2)|U| on the same range.
    """

    mode: str
    c1: float = 1.0
    c2: float = 0.5
    c3: float = 1.0
    alpha: float = 1.0
    C: float = 1.0
    eps: float = 0.1
    b: float = 1.0
    delta: float = 0.1
    caps: dict[str, int] | int = 6
    only: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.mode not in ("P", "Q", "R"):
            raise ValidationError(f"profile mode must be P, Q or R, got {self.mode!r}")
        if not 0 < self.alpha <= 1:
            raise ValidationError(f"alpha must lie in (0, 1], got {self.alpha}")
        caps = [self.caps] if isinstance(self.caps, int) else list(self.caps.values())
        if any(int(c) < 1 for c in caps):
            raise ValidationError("caps must be >= 1")

    def cap_for(self, name: str) -> int:
        if isinstance(self.caps, int):
            return self.caps
        return int(self.caps.get(name, self.caps.get("default", 6)))


@dataclass
class PropertySpec:
    name: str
    quantity: str
    bound: float          # required ratio (lower for edge/vertex, upper for sparsity)
    scope: float          # largest |U| the property speaks about
    is_global: bool

    def holds(self, ratio: float) -> bool:
        slack = 1e-12 * max(1.0, abs(self.bound))
        if self.quantity == SPARSITY:
            return ratio <= self.bound + slack
        return ratio >= self.bound - slack


def property_specs(profile: ExpansionProfile, n: int, d: int) -> list[PropertySpec]:
    ln = math.log(n)
    half = n / 2
    pr = profile
    if pr.mode == "P":
        return [
            PropertySpec("P1", EDGE, pr.c1, half, True),
            PropertySpec("P2", VERTEX, pr.c2 * d**pr.alpha, pr.c3 * d ** (1 - pr.alpha) * ln, False),
            PropertySpec("P3", EDGE, (1 - pr.eps**2 / 1000) * d,
                         4 * d ** (4 / pr.alpha + 2) * ln**pr.C, False),
        ]
    if pr.mode == "Q":
        return [
            PropertySpec("Q1", EDGE, pr.b, half, True),
            PropertySpec("Q2", VERTEX, (1 - pr.alpha) * d, pr.c3 * d * ln, False),
            PropertySpec("Q3", EDGE, (1 - pr.alpha) * d, pr.alpha / 2 * d * d * ln, False),
        ]
    if pr.mode == "R":
        return [
            PropertySpec("R1", EDGE, pr.b, half, True),
            PropertySpec("R2", SPARSITY, 1 + pr.delta, ln**pr.C, False),
            PropertySpec("R2v", VERTEX, d / (1 + pr.delta) - 2, ln**pr.C, False),
        ]
    raise ValidationError(f"profile mode must be P, Q or R, got {pr.mode!r}")


def _safe_lam(est: SpectralEstimate) -> float:
    # pad by the eigen-residual so the certificate does not lean on estimation error
    return min(float(est.d), est.lam + est.residual)


def max_codegree(g: Graph) -> int:
    """Largest number of common neighbors of two distinct vertices."""
    adj = g.adj
    best = 0
    for v in range(g.n):
        seen: dict[int, int] = {}
        for u in adj[v]:
            for w in adj[u]:
                if w > v:
                    seen[w] = seen.get(w, 0) + 1
        if seen:
            best = max(best, max(seen.values()))
    return best


def certified_bound(quantity: str, s: int, n: int, d: int,
                    layer: SpectralEstimate | None,
                    codegree: int | None = None) -> tuple[float, str]:
    """Rigorous bound on the ratio valid for *every* set of size s in a d-regular graph.

    Lower bound for edge/vertex expansion, upper bound for e(U)/|U|. Uses the
    clique bound e(U) <= s(s-1)/2, the Alon-Milman inequality on a spanning
    regular layer when supplied, and |N(U)| >= e(U,U^c)/min(d, s).
    """
    edge_lb, how = d - (s - 1), "clique"
    if layer is not None:
        am = alon_milman_bound(n, layer.d, _safe_lam(layer), s) / s
        if am > edge_lb:
            edge_lb, how = am, "alon-milman"
    edge_lb = max(edge_lb, 0.0)
    if quantity == EDGE:
        return edge_lb, how
    if quantity == SPARSITY:
        # e(U) = (d s - e(U,U^c)) / 2 in a d-regular graph
        return min((s - 1) / 2, (d - edge_lb) / 2), how
    best, label = max((d - s + 1) / s, 0.0), "single-vertex"
    via_edges = edge_lb / min(d, s)
    if via_edges > best:
        best, label = via_edges, how + "/degree-split"
    if codegree is not None:
        e_cut = edge_lb * s
        denom = e_cut + s * (s - 1) * codegree
        if denom > 0 and e_cut * e_cut / denom / s > best:
            best, label = e_cut * e_cut / denom / s, how + "/codegree"
    return best, label


@dataclass
class PropertyResult:
    name: str
    quantity: str
    bound: float
    scope: float
    cap: int
    status: str
    worst_ratio: float | None
    worst_size: int | None
    witness: list[int] | None
    sizes_by_enumeration: list[int] = field(default_factory=list)
    sizes_by_bound: list[int] = field(default_factory=list)
    bound_methods: dict[int, str] = field(default_factory=dict)
    visited: int = 0
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "quantity": self.quantity,
            "bound": self.bound,
            "scope": self.scope,
            "cap": self.cap,
            "status": self.status,
            "worst_ratio": self.worst_ratio,
            "worst_size": self.worst_size,
            "witness": self.witness,
            "sizes_by_enumeration": self.sizes_by_enumeration,
            "sizes_by_bound": self.sizes_by_bound,
            "bound_methods": {str(k): v for k, v in sorted(self.bound_methods.items())},
            "visited": self.visited,
            "notes": self.notes,
        }


@dataclass
class AuditReport:
    mode: str
    n: int
    d: int
    profile: ExpansionProfile
    properties: list[PropertyResult]
    spectral: SpectralEstimate | None = None
    spectral_source: str | None = None

    def status(self, name: str) -> str:
        return next(p.status for p in self.properties if p.name == name)

    def __getitem__(self, name: str) -> PropertyResult:
        return next(p for p in self.properties if p.name == name)

    @property
    def passed(self) -> bool:
        return all(p.status in PASSING for p in self.properties)

    def to_dict(self) -> dict:
        pr = self.profile
        return {
            "mode": self.mode,
            "n": self.n,
            "d": self.d,
            "profile": {
                "mode": pr.mode, "c1": pr.c1, "c2": pr.c2, "c3": pr.c3, "alpha": pr.alpha,
                "C": pr.C, "eps": pr.eps, "b": pr.b, "delta": pr.delta,
                "caps": pr.caps if isinstance(pr.caps, int) else dict(sorted(pr.caps.items())),
            },
            "properties": [p.to_dict() for p in self.properties],
            "spectral": None if self.spectral is None else self.spectral.to_dict(),
            "spectral_source": self.spectral_source,
            "passed": self.passed,
        }


VERIFIED = "verified-to-cap"
SPECTRAL = "spectrally-certified"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"
PASSING = (VERIFIED, SPECTRAL)


def _is_spanning_subgraph(h: Graph, g: Graph) -> bool:
    if h.n != g.n:
        return False
    key_g = g.edges[:, 0] * g.n + g.edges[:, 1]
    key_h = h.edges[:, 0] * h.n + h.edges[:, 1]
    return bool(np.all(np.isin(key_h, key_g)))


def audit_profile(
    g: Graph,
    profile: ExpansionProfile,
    spectral: SpectralEstimate | None = None,
    spectral_layer: Graph | None = None,
    budget: int = DEFAULT_BUDGET,
    root: int | None = None,
    spectral_tol: float = 1e-6,
    seed: int = 0,
) -> AuditReport:
    """Audit the three properties of ``profile.mode`` on ``g``.

    Each size up to the property's cap is settled either by a rigorous
    certificate (:func:`certified_bound`) or by exact enumeration. Global
    properties are extended past the cap with the Alon-Milman inequality when
    a spectral estimate of ``g`` (``spectral``) or of a regular spanning
    subgraph (``spectral_layer``) is available: e_G >= e_H for H spanning.
    """
    if g.regular_degree is None:
        raise NotRegular("audit_profile expects a regular graph")
    n, d = g.n, g.regular_degree
    source = None
    layer = None
    if spectral_layer is not None:
        if not _is_spanning_subgraph(spectral_layer, g):
            raise ValidationError("spectral_layer is not a spanning subgraph of g")
        layer = spectral_lambda(spectral_layer, tol=spectral_tol, seed=seed)
        source = "spanning-layer"
    elif spectral is not None:
        if spectral.d != d:
            raise ValidationError("spectral estimate degree does not match the graph")
        layer = spectral
        source = "graph"

    specs = [sp for sp in property_specs(profile, n, d)
             if profile.only is None or sp.name in profile.only]
    codegree = max_codegree(g) if any(sp.quantity == VERTEX for sp in specs) else None
    results = []
    for spec in specs:
        results.append(_audit_one(g, spec, profile.cap_for(spec.name), layer, budget, root, n, d,
                                  codegree))
    return AuditReport(profile.mode, n, d, profile, results, layer, source)


def _audit_one(g, spec: PropertySpec, cap_req: int, layer, budget, root, n, d,
               codegree=None) -> PropertyResult:
    upper = math.floor(spec.scope + 1e-9)
    upper = min(upper, n // 2 if spec.is_global else n)
    cap = max(0, min(cap_req, upper))
    res = PropertyResult(spec.name, spec.quantity, spec.bound, spec.scope, cap, INCONCLUSIVE,
                         None, None, None)
    if cap < cap_req:
        res.notes.append(f"scope limits the audit to |U| <= {cap}")
    elif upper > cap:
        res.notes.append(f"scope reaches |U| <= {upper}; audited only to cap {cap}")

    open_sizes = []
    for s in range(1, cap + 1):
        val, how = certified_bound(spec.quantity, s, n, d, layer, codegree)
        if spec.holds(val):
            res.sizes_by_bound.append(s)
            res.bound_methods[s] = how
        else:
            open_sizes.append(s)

    settled = True
    if open_sizes:
        top = max(open_sizes)
        try:
            table = _extremes(g, top, spec.quantity, budget, root)
        except BudgetExceeded as exc:
            table = exc.partial
            settled = False
            res.notes.append(f"enumeration budget {budget} exhausted at size cap {top}")
        res.visited = table.visited
        worst = table.upto(top)
        if worst is not None:
            res.worst_ratio, res.worst_size, res.witness = worst.ratio, worst.size, list(worst.witness)
            if not spec.holds(worst.ratio):
                _confirm_witness(g, spec, worst.witness)
                res.status = VIOLATED
                return res
        if settled:
            res.sizes_by_enumeration = open_sizes

    if not settled:
        return res
    res.status = VERIFIED
    if spec.is_global and upper > cap:
        if layer is not None:
            # Alon-Milman ratio (d_H - lam)(n - s)/n is smallest at s = n/2
            worst_bound = alon_milman_bound(n, layer.d, _safe_lam(layer), upper) / upper
            if spec.holds(worst_bound):
                res.status = SPECTRAL
                res.notes.append(
                    f"Alon-Milman certifies ratio >= {worst_bound:.6g} for all |U| <= {upper}")
            else:
                res.notes.append(f"Alon-Milman gives only {worst_bound:.6g} at |U| = {upper}")
        if layer is not None and layer.lam >= layer.d - 1e-9:
            res.notes.append("lambda = d (bipartite or disconnected): spectral certificate vacuous")
    return res


def _confirm_witness(g, spec, witness):
    m = set_measures(g, witness)
    s = m["size"]
    ratio = {EDGE: m["e_cut"], VERTEX: m["nbhd"], SPARSITY: m["e_in"]}[spec.quantity] / s
    if spec.holds(ratio):
        raise AssertionError(f"witness for {spec.name} does not reproduce the violation")


# --- hypercube isoperimetry ------------------------------------------------------

@dataclass
class HarperReport:
    d: int
    max_size: int
    min_boundary: dict[int, int]
    harper_bound: dict[int, float]
    violations: list[int]
    equality_sizes: list[int]
    witnesses: dict[int, list[int]]

    @property
    def ok(self) -> bool:
        return not self.violations


def harper_audit(g: Graph, max_size: int, root: int | None = 0,
                 budget: int = DEFAULT_BUDGET) -> HarperReport:
    """Compare exact minimum edge boundaries with |U|(d - log2 |U|).

    ``root=0`` uses vertex-transitivity (valid for hypercubes); pass ``None`` to
    enumerate every anchor.
    """
    if g.regular_degree is None:
        raise NotRegular("harper_audit expects a regular graph")
    d = g.regular_degree
    table = min_edge_expansion(g, max_size, budget=budget, root=root)
    mins, bounds, viol, eq, wit = {}, {}, [], [], {}
    for s, e in table.entries.items():
        mins[s] = e.value
        bounds[s] = s * (d - math.log2(s))
        wit[s] = list(e.witness)
        if e.value < bounds[s] - 1e-9:
            viol.append(s)
        elif abs(e.value - bounds[s]) <= 1e-9:
            eq.append(s)
    return HarperReport(d, max_size, mins, bounds, viol, eq, wit)


def is_subcube(vertices) -> bool:
    """True if the labels form a subcube: size 2^j and they agree outside j free coordinates."""
    vs = list(vertices)
    k = len(vs)
    if k == 0 or k & (k - 1):
        return False
    base = vs[0]
    free = 0
    for v in vs:
        free |= v ^ base
    return bin(free).count("1") == k.bit_length() - 1 and len({v & ~free for v in vs}) == 1
