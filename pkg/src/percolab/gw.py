"""Branching-process formulas for site/bond percolation on the d-regular tree.

All logarithms are natural.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from percolab.errors import (
    DegenerateDenominator,
    InvalidProbability,
    NonConvergence,
    NotSupercriticalWarning,
    SprinkleTooLarge,
    ValidationError,
)

DEFAULT_TOL = 1e-13
MAX_ITERS = 1_000_000


@dataclass(frozen=True)
class GWSolution:
    d: int
    p: float
    epsilon: float
    mode: str
    q: float
    y: float
    x: float
    iterations: int
    residual: float

    @property
    def subcritical(self) -> bool:
        return self.q == 1.0


def _check(d, p):
    if d < 2:
        raise ValidationError(f"degree must be >= 2, got {d}")
    if not (0.0 <= p <= 1.0) or math.isnan(p):
        raise InvalidProbability(f"p must lie in [0, 1], got {p}")


def _extinction(d, p, tol, max_iters, accelerate):
    """Smallest fixed point of f(q) = (1 - p + p q)^(d-1) on [0, 1]."""
    if (d - 1) * p <= 1.0:
        return 1.0, 0
    if p == 1.0:
        return 0.0, 0
    k = d - 1
    q = 0.0
    for it in range(1, max_iters + 1):
        base = 1.0 - p + p * q
        fq = base**k
        if abs(fq - q) <= tol:
            return fq, it
        if accelerate and it > 20:
            # g(q) = f(q) - q is convex and decreasing left of the root, so Newton
            # from below never overshoots the smallest root
            dg = k * p * base ** (k - 1) - 1.0
            nq = q - (fq - q) / dg
            q = min(max(nq, fq), 1.0)
        else:
            q = fq
    raise NonConvergence(f"extinction iteration did not converge for d={d}, p={p}")


def solve(d: int, p: float, tol: float = DEFAULT_TOL, mode: str = "constant",
          max_iters: int = MAX_ITERS, accelerate: bool = True) -> GWSolution:
    """Full fixed-point record (q, y, x) for offspring Bin(d-1, p).

    ``mode`` only changes how epsilon is reported: ``"constant"`` uses
    (d-1)p - 1, ``"growing"`` uses d p - 1.
    """
    _check(d, p)
    if tol <= 0:
        raise ValidationError("tol must be positive")
    if mode not in ("constant", "growing"):
        raise ValidationError(f"unknown mode {mode!r}")
    q, iters = _extinction(d, p, tol, max_iters, accelerate)
    # exact zero on extinction; elsewhere clamp rounding noise into [0, 1]
    y = 0.0 if q == 1.0 else min(max(1.0 - q * (1.0 - p) - p * q * q, 0.0), 1.0)
    x = p * y
    residual = abs(q - (1.0 - p + p * q) ** (d - 1))
    eps = (d - 1) * p - 1.0 if mode == "constant" else d * p - 1.0
    return GWSolution(d, p, eps, mode, q, y, x, iters, residual)


def solve_q(d: int, p: float, tol: float = DEFAULT_TOL) -> float:
    return solve(d, p, tol).q


def survival_y(d: int, p: float, tol: float = DEFAULT_TOL) -> float:
    """Probability that the root of the infinite d-regular tree lies in an infinite
    cluster under p-bond percolation."""
    sol = solve(d, p, tol)
    alt = 1.0 - (1.0 - p + p * sol.q) ** d
    # both closed forms must agree; slack covers rounding of the power form
    if abs(alt - sol.y) > 1e-9:
        raise NonConvergence(f"survival forms disagree: {sol.y} vs {alt}")
    return sol.y


def site_survival_x(d: int, p: float, tol: float = DEFAULT_TOL) -> float:
    """Site-percolation survival x = p * y."""
    sol = solve(d, p, tol)
    alt = p - p * sol.q * (1.0 - p) - p * p * sol.q * sol.q
    if abs(alt - sol.x) > 1e-9:
        raise NonConvergence(f"site survival forms disagree: {sol.x} vs {alt}")
    return sol.x


def solve_y_asymptotic(eps: float, tol: float = 1e-12) -> float:
    """Root in (0, 1) of 1 - y = exp(-(1 + eps) y), by bisection.

    Returns 0.0 with a :class:`NotSupercriticalWarning` when ``eps <= 0``.
    """
    if eps <= 0:
        warnings.warn(f"eps={eps} is not supercritical; returning 0", NotSupercriticalWarning,
                      stacklevel=2)
        return 0.0
    c = 1.0 + eps

    def g(y):
        return 1.0 - y - math.exp(-c * y)

    lo, hi = min(tol, 1e-300), 1.0
    # g > 0 just above 0 once c > 1; near criticality the root hugs 0 so shrink lo
    while g(lo) <= 0.0 and lo > 1e-300:
        lo *= 1e-3
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * 1e-3 and abs(gm) <= tol:
            break
    return 0.5 * (lo + hi)


def sprinkle_split(p: float, s: float, d: int) -> tuple[float, float]:
    """(p1, p2) with p2 = s/d and (1 - p1)(1 - p2) = 1 - p."""
    if not 0.0 <= p <= 1.0:
        raise InvalidProbability(f"p must lie in [0, 1], got {p}")
    p2 = s / d
    if p2 < 0:
        raise ValidationError(f"sprinkle s must be >= 0, got {s}")
    if p2 > p:
        raise SprinkleTooLarge(f"s/d = {p2} exceeds p = {p}")
    if p2 == 1.0:
        return 1.0, 1.0
    p1 = (p - p2) / (1.0 - p2)
    return p1, p2


@dataclass(frozen=True)
class ThresholdSpec:
    mode: str
    params: dict
    n: int
    value: float


def small_component_threshold(mode: str, params: dict, n: int) -> ThresholdSpec:
    """Component-size cutoff beyond which no non-giant component should exist.

    growing: (100 / eps^2) ln n, params ``{"eps": ...}``.
    constant: 9 alpha / (((1 - delta)/(1 + delta)) alpha - 1)^2 ln n,
    params ``{"alpha": ..., "delta": ...}``.
    """
    log_n = math.log(n)
    if mode == "growing":
        eps = float(params["eps"])
        if eps <= 0:
            raise ValidationError(f"eps must be positive, got {eps}")
        value = 100.0 / eps**2 * log_n
    elif mode == "constant":
        alpha = float(params["alpha"])
        delta = float(params.get("delta", 0.0))
        eff = (1.0 - delta) / (1.0 + delta) * alpha
        if eff <= 1.0:
            raise DegenerateDenominator(
                f"((1-delta)/(1+delta))*alpha = {eff} must exceed 1"
            )
        value = 9.0 * alpha / (eff - 1.0) ** 2 * log_n
    else:
        raise ValidationError(f"unknown mode {mode!r}")
    return ThresholdSpec(mode, dict(params), n, value)


@dataclass(frozen=True)
class TailBound:
    raw: float
    value: float
    in_scope: bool


def component_tail_bound(eps: float, d: int, k: float, t: float | None = None) -> TailBound:
    """3 eps k d exp(-eps^2 k / 25), clamped to [0, 1].

    ``in_scope`` is False below k = 50/eps^2 (or above t/(4d) when ``t`` is given).
    """
    if eps <= 0:
        raise ValidationError(f"eps must be positive, got {eps}")
    raw = 3.0 * eps * k * d * math.exp(-(eps**2) * k / 25.0)
    in_scope = k >= 50.0 / eps**2
    if t is not None:
        in_scope = in_scope and k <= t / (4.0 * d)
    return TailBound(raw, min(max(raw, 0.0), 1.0), in_scope)


def sparsity_vertex_expansion_factor(d: int, delta: float) -> float:
    """d/(1+delta) - 2: vertex expansion implied by local sparsity e(U) <= (1+delta)|U|."""
    return d / (1.0 + delta) - 2.0


def cycle_free_radius(delta: float) -> float:
    """1/(16 delta): radius of the cycle-free balls implied by local sparsity."""
    return 1.0 / (16.0 * delta)


def cycle_free_fraction_bound(d: int, delta: float) -> float:
    """Lower bound 1 - (d-1)^(-1/(16 delta)) on the fraction of cycle-free-ball vertices."""
    return 1.0 - (d - 1) ** (-cycle_free_radius(delta))


def counterexample_expectation(n: float, d: float, b: float) -> float:
    """n^0.9 / (200 b^2 d^4 ln^2 n): expected number of isolated mid-size cluster components."""
    return n**0.9 / (200.0 * b * b * d**4 * math.log(n) ** 2)
