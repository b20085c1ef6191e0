"""Spectral parameter of regular graphs, mixing certificates, cycle-free balls."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from percolab.errors import InvalidLambda, NonConvergence, NotRegular, ValidationError
from percolab.graph import Graph


@dataclass(frozen=True)
class SpectralEstimate:
    d: int
    lambda2: float
    lambda_min: float
    iterations: int
    residual: float

    @property
    def lam(self) -> float:
        return max(abs(self.lambda2), abs(self.lambda_min))

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "lambda2": self.lambda2,
            "lambda_min": self.lambda_min,
            "lambda": self.lam,
            "iterations": self.iterations,
            "residual": self.residual,
        }


def _adj_matvec(g: Graph):
    rows, cols, n = g.row_index, g.indices, g.n

    def matvec(v):
        return np.bincount(rows, weights=v[cols], minlength=n)

    return matvec


def _top_deflated(op, n, tol, max_iters, rng):
    """Largest eigenvalue of the PSD operator ``op`` on the complement of the
    all-ones vector. Returns (theta, iterations, residual)."""
    v = rng.standard_normal(n)
    v -= v.mean()
    v /= np.linalg.norm(v)
    theta, res = 0.0, math.inf
    for it in range(1, max_iters + 1):
        w = op(v)
        w -= w.mean()
        theta = float(v @ w)
        res = float(np.linalg.norm(w - theta * v))
        if res <= tol:
            return theta, it, res
        norm = np.linalg.norm(w)
        if norm == 0.0:
            # op vanishes on the complement: the eigenvalue is exactly 0
            return 0.0, it, 0.0
        v = w / norm
    raise NonConvergence(f"power iteration stalled at residual {res:.3g} after {max_iters} steps")


def spectral_lambda(g: Graph, tol: float = 1e-8, max_iters: int = 200_000,
                    seed: int = 0) -> SpectralEstimate:
    """Estimate lambda2 and lambda_min of a regular graph by deflated power iteration.

    ``A + dI`` and ``dI - A`` are positive semidefinite, so plain power iteration
    converges to their top eigenvalues, d + lambda2 and d - lambda_min. The
    stopping test is the eigen-residual ||Mv - theta v|| <= tol.
    """
    d = g.regular_degree
    if d is None:
        raise NotRegular("spectral_lambda needs a regular graph")
    if g.n < 2:
        raise ValidationError("need at least two vertices for a second eigenvalue")
    if tol <= 0:
        raise ValidationError("tol must be positive")
    A = _adj_matvec(g)
    rng = np.random.default_rng(seed)
    top_plus, it1, r1 = _top_deflated(lambda v: A(v) + d * v, g.n, tol, max_iters, rng)
    top_minus, it2, r2 = _top_deflated(lambda v: d * v - A(v), g.n, tol, max_iters, rng)
    lam2 = min(max(top_plus - d, -d), d)
    lam_min = min(max(d - top_minus, -d), d)
    return SpectralEstimate(d, lam2, lam_min, it1 + it2, max(r1, r2))


def _check_lambda(n, d, lam):
    if not (0 <= lam <= d) or math.isnan(lam):
        raise InvalidLambda(f"lambda must lie in [0, d={d}], got {lam}")
    if n < 1:
        raise ValidationError("n must be positive")


def alon_milman_bound(n: int, d: float, lam: float, u: int) -> float:
    """Lower bound ((d - lambda)/n) |U| (n - |U|) on e(U, U^c)."""
    _check_lambda(n, d, lam)
    if not 0 <= u <= n:
        raise ValidationError(f"|U| = {u} outside [0, {n}]")
    return (d - lam) / n * u * (n - u)


def mixing_interval(n: int, d: float, lam: float, b: int, c: int) -> tuple[float, float]:
    """Interval certified to contain e(B, C) for disjoint B, C."""
    _check_lambda(n, d, lam)
    if not (0 <= b <= n and 0 <= c <= n):
        raise ValidationError("set sizes must lie in [0, n]")
    center = d * b * c / n
    slack = lam * math.sqrt(b * c)
    return max(0.0, center - slack), center + slack


def mixing_bounds(n: int, d: float, lam: float, set_sizes):
    """Certificates for each entry of ``set_sizes``: an int |U| gives the
    Alon-Milman value, a pair (|B|, |C|) gives the mixing interval."""
    out = []
    for item in set_sizes:
        if isinstance(item, (tuple, list)):
            out.append(mixing_interval(n, d, lam, int(item[0]), int(item[1])))
        else:
            out.append(alon_milman_bound(n, d, lam, int(item)))
    return out


def edges_between(g: Graph, b, c) -> int:
    """e(B, C) for disjoint B, C (edges with one end in each)."""
    mb = np.zeros(g.n, dtype=bool)
    mc = np.zeros(g.n, dtype=bool)
    mb[list(b)] = True
    mc[list(c)] = True
    u, v = g.edges[:, 0], g.edges[:, 1]
    return int(np.count_nonzero((mb[u] & mc[v]) | (mc[u] & mb[v])))


def short_cycle_census(g: Graph, radius: int) -> tuple[int, np.ndarray]:
    """Vertices whose radius-r ball induces a forest.

    The ball is connected, so it contains a cycle iff e(ball) >= |ball|.
    """
    if radius < 0:
        raise ValidationError("radius must be >= 0")
    adj = g.adj
    n = g.n
    flags = np.zeros(n, dtype=bool)
    dist = [-1] * n
    for v in range(n):
        ball = [v]
        dist[v] = 0
        queue = deque([v])
        while queue:
            x = queue.popleft()
            if dist[x] == radius:
                continue
            for u in adj[x]:
                if dist[u] < 0:
                    dist[u] = dist[x] + 1
                    ball.append(u)
                    queue.append(u)
        twice = 0
        for x in ball:
            for u in adj[x]:
                if dist[u] >= 0:
                    twice += 1
        flags[v] = twice // 2 < len(ball)
        for x in ball:
            dist[x] = -1
    return int(flags.sum()), flags
