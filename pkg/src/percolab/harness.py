"""Monte Carlo experiment runs and their persisted reports.

Every trial is a pure function of (graph, config, trial seed); trial seeds come
from :func:`percolab.seeding.trial_seed`, and results are folded in trial order,
so a report depends only on the config and the master seed.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Sequence

import numpy as np

from percolab import gw
from percolab.audit import ExpansionProfile, audit_profile
from percolab.errors import NotRegular, ValidationError
from percolab.generators import gen_counterexample, gen_hypercube, gen_random_regular, outer_layer
from percolab.graph import Graph
from percolab.graphio import read_edge_list
from percolab.percolation import components, neighborhood_deficits, sample_site, two_round_exposure
from percolab.seeding import DERIVATION, trial_seed

FAMILIES = ("hypercube", "random-regular", "counterexample", "file")
PROFILES = ("asymptotic", "scaled")
CI_METHOD = "normal-approximation-95"
Z95 = 1.959963984540054
SCALED_CONSTANT = 2.0


@dataclass
class ExperimentConfig:
    """One experiment plan.

    Cutoffs left as ``None`` are filled from the ``thresholds`` profile:

    * ``asymptotic``: W cutoff from :func:`gw.small_component_threshold`, large
      cutoff and gap-window top d^5 ln^C n, neighborhood check above 300 ln n.
    * ``scaled``: the same shapes with leading constant 2, i.e. W cutoff
      2 ln n / eps^2 (growing) or 2 alpha/(eff - 1)^2 ln n (constant), large
      cutoff and gap-window top max(d ln n, 2 W), neighborhood check above the
      W cutoff. The constant 2 is the smallest integer that puts W above the
      typical second-component size of hypercubes Q^12..Q^16 at eps = 0.5.
    """

    family: str = "hypercube"
    d: int = 16
    n: int | None = None
    b: int = 2
    k: int | None = None
    graph: str | None = None
    graph_seed: int | None = None
    mode: str = "growing"
    eps: float = 0.5
    alpha: float = 1.5
    delta: float = 0.0
    C: float = 1.0
    s: float = 0.1
    trials: int = 30
    master_seed: int = 0
    thresholds: str = "scaled"
    w_cutoff: float | None = None
    large_cutoff: float | None = None
    gap_lo: float | None = None
    gap_hi: float | None = None
    deficit_min: float | None = None
    out: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ValidationError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.family == "file" and not self.graph:
            raise ValidationError("family 'file' needs a graph path")
        if self.family in ("random-regular", "counterexample") and self.n is None:
            raise ValidationError(f"family {self.family!r} needs n")
        if self.mode not in ("growing", "constant"):
            raise ValidationError(f"mode must be growing or constant, got {self.mode!r}")
        if self.thresholds not in PROFILES:
            raise ValidationError(f"thresholds must be one of {PROFILES}, got {self.thresholds!r}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValidationError(f"trials must be a positive integer, got {self.trials}")
        if self.mode == "growing" and not self.eps > 0:
            raise ValidationError(f"eps must be positive in growing mode, got {self.eps}")
        if self.mode == "constant" and not self.alpha > 0:
            raise ValidationError(f"alpha must be positive, got {self.alpha}")
        if self.s < 0:
            raise ValidationError(f"sprinkle s must be >= 0, got {self.s}")
        if self.gap_lo is not None and self.gap_hi is not None and not self.gap_lo < self.gap_hi:
            raise ValidationError(f"gap window needs lo < hi, got [{self.gap_lo}, {self.gap_hi}]")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)

    def replace(self, **changes) -> "ExperimentConfig":
        data = self.to_dict()
        data.update(changes)
        return ExperimentConfig(**data)


def build_config_graph(cfg: ExperimentConfig) -> Graph:
    gseed = cfg.master_seed if cfg.graph_seed is None else cfg.graph_seed
    if cfg.family == "hypercube":
        return gen_hypercube(cfg.d)
    if cfg.family == "random-regular":
        return gen_random_regular(cfg.n, cfg.d, gseed)
    if cfg.family == "counterexample":
        return gen_counterexample(cfg.n, cfg.d, cfg.b, cfg.k, gseed)[0]
    return read_edge_list(cfg.graph)


def retention_probability(cfg: ExperimentConfig, d: int) -> float:
    if cfg.mode == "growing":
        return min(1.0, (1.0 + cfg.eps) / d)
    p = cfg.alpha / (d - 1)
    if p > 1:
        raise ValidationError(f"alpha/(d-1) = {p} exceeds 1")
    return p


@dataclass(frozen=True)
class Cutoffs:
    w: float
    large: float
    gap_lo: float
    gap_hi: float
    deficit_min: float

    def to_dict(self) -> dict:
        return asdict(self)


def resolve_cutoffs(cfg: ExperimentConfig, n: int, d: int) -> Cutoffs:
    ln = math.log(n)
    if cfg.mode == "growing":
        params = {"eps": cfg.eps}
    else:
        params = {"alpha": cfg.alpha, "delta": cfg.delta}
    base_w = gw.small_component_threshold(cfg.mode, params, n).value
    if cfg.thresholds == "asymptotic":
        w = base_w
        top = d**5 * ln**cfg.C
        l24 = 300.0 * ln
    else:
        w = SCALED_CONSTANT * base_w / (100.0 if cfg.mode == "growing" else 9.0)
        top = max(d * ln, 2.0 * w)
        l24 = w
    w = cfg.w_cutoff if cfg.w_cutoff is not None else w
    large = cfg.large_cutoff if cfg.large_cutoff is not None else top
    lo = cfg.gap_lo if cfg.gap_lo is not None else w
    hi = cfg.gap_hi if cfg.gap_hi is not None else top
    if not lo < hi:
        raise ValidationError(f"resolved gap window [{lo}, {hi}] is empty")
    l24 = cfg.deficit_min if cfg.deficit_min is not None else l24
    return Cutoffs(float(w), float(large), float(lo), float(hi), float(l24))


def _ercp_trial(args):
    g, p, s, d, cut, index, seed = args
    rep = two_round_exposure(g, p, s, cut.w, cut.large, seed, d=d)
    st = rep.g2_stats
    sizes = st.sizes
    # the largest component is tracked as L1; the window counts the rest
    gap = int(np.count_nonzero((sizes[1:] >= cut.gap_lo) & (sizes[1:] <= cut.gap_hi)))
    deficits = neighborhood_deficits(g, st, cut.deficit_min, d=d)
    row = {
        "trial": index,
        "seed": seed,
        "L1": st.L1,
        "L2": st.L2,
        "retained": st.retained.count,
        "gap_count": gap,
        "w1_components": rep.w1_components,
        "w1_merged": rep.w1_merged,
        "new_large_outside_w1": rep.new_large_outside_w1,
        "lemma24_violations": len(deficits),
    }
    sizes_u, counts = np.unique(sizes, return_counts=True)
    return row, dict(zip(sizes_u.tolist(), counts.tolist()))


def worker_count(tasks: int) -> int:
    cap = os.environ.get("PERCOLAB_THREADS")
    workers = os.cpu_count() or 1
    if cap:
        try:
            workers = min(workers, max(1, int(cap)))
        except ValueError:
            raise ValidationError(f"PERCOLAB_THREADS must be an integer, got {cap!r}") from None
    return max(1, min(workers, tasks))


def _map_trials(fn, tasks: list) -> list:
    workers = worker_count(len(tasks))
    if workers == 1 or len(tasks) < 4:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves input order, so the fold below stays deterministic
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _mean_ci(values: Sequence[float]) -> dict:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return {"mean": None, "stderr": None, "ci_low": None, "ci_high": None}
    mean = float(arr.mean())
    se = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return {"mean": mean, "stderr": se, "ci_low": mean - Z95 * se, "ci_high": mean + Z95 * se}


@dataclass
class ErcpReport:
    config: dict
    graph: dict
    p: float
    cutoffs: dict
    trials: list[dict]
    aggregate: dict
    histogram: list[list[int]]
    seeds: dict
    interrupted: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def _aggregate(rows: list[dict], n: int, x: float) -> dict:
    fr = _mean_ci([r["L1"] / n for r in rows])
    return {
        "mean_L1_frac": fr["mean"],
        "stderr": fr["stderr"],
        "ci_low": fr["ci_low"],
        "ci_high": fr["ci_high"],
        "ci_method": CI_METHOD,
        "x_predicted": x,
        "rel_error": None if fr["mean"] is None or x == 0 else (fr["mean"] - x) / x,
        "median_L2": float(np.median([r["L2"] for r in rows])) if rows else None,
        "median_L2_over_ln_n": float(np.median([r["L2"] for r in rows])) / math.log(n)
        if rows else None,
        "merge_rate": float(np.mean([r["w1_merged"] for r in rows])) if rows else None,
        "mean_gap_count": float(np.mean([r["gap_count"] for r in rows])) if rows else None,
        "lemma24_violations_total": int(sum(r["lemma24_violations"] for r in rows)),
        "new_large_outside_w1_total": int(sum(r["new_large_outside_w1"] for r in rows)),
    }


def run_ercp(cfg: ExperimentConfig, g: Graph | None = None) -> ErcpReport:
    """Site-percolation trials with the sprinkling diagnostics of every trial.

    The two-round exposure draws V_p itself (V_{p1} plus the sprinkle), so the
    reported L1/L2 are those of G[V_p].
    """
    if g is None:
        g = build_config_graph(cfg)
    d = g.regular_degree
    if d is None:
        raise NotRegular("ERCP runs need a regular graph")
    n = g.n
    p = retention_probability(cfg, d)
    cut = resolve_cutoffs(cfg, n, d)
    x = gw.site_survival_x(d, p)
    tasks = [(g, p, cfg.s, d, cut, i, trial_seed(cfg.master_seed, i)) for i in range(cfg.trials)]
    rows: list[dict] = []
    hist: dict[int, int] = {}
    interrupted = False
    try:
        for row, h in _map_trials(_ercp_trial, tasks):
            rows.append(row)
            for size, c in h.items():
                hist[size] = hist.get(size, 0) + c
    except KeyboardInterrupt:
        interrupted = True
    report = ErcpReport(
        config=cfg.to_dict(),
        graph={"family": cfg.family, "n": n, "d": d, "m": g.edge_count},
        p=p,
        cutoffs=cut.to_dict(),
        trials=rows,
        aggregate=_aggregate(rows, n, x),
        histogram=[[s, hist[s]] for s in sorted(hist)],
        seeds={"master": cfg.master_seed, "derivation": DERIVATION},
        interrupted=interrupted,
    )
    if interrupted:
        if cfg.out:
            write_report(report, cfg.out)
        raise KeyboardInterrupt
    return report


@dataclass
class ScalingReport:
    config: dict
    points: list[dict]
    diagnostics: dict
    seeds: dict

    def to_dict(self) -> dict:
        return asdict(self)


def run_scaling(cfg: ExperimentConfig, sizes: Sequence[int]) -> ScalingReport:
    """run_ercp over a size sequence (hypercube dimensions, or n for random-regular).

    Each point carries median L2 / ln n; the diagnostics compare the last point
    against the first.
    """
    sizes = [int(v) for v in sizes]
    if len(sizes) < 3:
        raise ValidationError(f"scaling needs at least 3 sizes, got {len(sizes)}")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValidationError("scaling sizes must be strictly increasing")
    if cfg.family not in ("hypercube", "random-regular"):
        raise ValidationError("scaling supports hypercube and random-regular families")
    points = []
    for v in sizes:
        sub = cfg.replace(d=v) if cfg.family == "hypercube" else cfg.replace(n=v)
        rep = run_ercp(sub)
        agg = rep.aggregate
        points.append({
            "size": v,
            "n": rep.graph["n"],
            "d": rep.graph["d"],
            "p": rep.p,
            "median_L2": agg["median_L2"],
            "median_L2_over_ln_n": agg["median_L2_over_ln_n"],
            "mean_L1_frac": agg["mean_L1_frac"],
            "ci_low": agg["ci_low"],
            "ci_high": agg["ci_high"],
            "x_predicted": agg["x_predicted"],
            "x_in_ci": bool(agg["ci_low"] <= agg["x_predicted"] <= agg["ci_high"]),
            "merge_rate": agg["merge_rate"],
        })
    points.sort(key=lambda r: r["n"])
    first, last = points[0]["median_L2_over_ln_n"], points[-1]["median_L2_over_ln_n"]
    diag = {
        "l2_ratio_last_over_first": None if not first else last / first,
        "ci_method": CI_METHOD,
    }
    return ScalingReport(cfg.to_dict(), points, diag,
                         {"master": cfg.master_seed, "derivation": DERIVATION})


@dataclass
class CounterexampleReport:
    config: dict
    construction: dict
    p: float
    size_cutoff: float
    trials: list[dict]
    expected_count: float
    audit: dict
    seeds: dict

    def to_dict(self) -> dict:
        return asdict(self)


def implied_alpha(d: int, b: int) -> float:
    """Smallest alpha the construction supports: (1 - alpha/2)(d - 10b) >= (1 - alpha) d."""
    inner = d - 10 * b
    return 10 * b / (d - inner / 2)


def _cx_trial(args):
    g, p, cutoff, index, seed = args
    st = components(g, sample_site(g, p, seed))
    return {
        "trial": index,
        "seed": seed,
        "L1": st.L1,
        "L2": st.L2,
        "large_components": int(np.count_nonzero(st.sizes >= cutoff)),
    }


def run_counterexample(cfg: ExperimentConfig, audit_cap: int = 12,
                       alpha: float | None = None, c: float = 0.1) -> CounterexampleReport:
    """Percolate the two-layer construction and attach its structural audit.

    Counts components of size >= eps d ln n per trial. The expected-count
    formula is evaluated at the actual (n, d, b) for context only.
    """
    if cfg.family != "counterexample":
        cfg = cfg.replace(family="counterexample")
    gseed = cfg.master_seed if cfg.graph_seed is None else cfg.graph_seed
    g, part = gen_counterexample(cfg.n, cfg.d, cfg.b, cfg.k, gseed)
    d, n = cfg.d, g.n
    p = min(1.0, (1.0 + cfg.eps) / d)
    cutoff = cfg.eps * d * math.log(n)
    tasks = [(g, p, cutoff, i, trial_seed(cfg.master_seed, i)) for i in range(cfg.trials)]
    rows = _map_trials(_cx_trial, tasks)

    a = implied_alpha(d, cfg.b) if alpha is None else alpha
    h1 = outer_layer(g, part)
    profile = ExpansionProfile("Q", alpha=a, c3=c, b=cfg.b, caps=audit_cap)
    audit = audit_profile(g, profile, spectral_layer=h1, seed=gseed & 0xFFFFFFFF)
    construction = {
        "n": n,
        "d": d,
        "b": cfg.b,
        "k": part.class_size,
        "classes": part.num_classes,
        "regular": g.regular_degree == d,
        "clusters_independent_in_h1": part.is_independent_in(h1),
    }
    return CounterexampleReport(
        config=cfg.to_dict(),
        construction=construction,
        p=p,
        size_cutoff=cutoff,
        trials=rows,
        expected_count=gw.counterexample_expectation(n, d, cfg.b),
        audit=audit.to_dict(),
        seeds={"master": cfg.master_seed, "derivation": DERIVATION},
    )


# --- persistence ---------------------------------------------------------------

def report_json(report) -> str:
    data = report.to_dict() if hasattr(report, "to_dict") else report
    return json.dumps(data, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_report(report, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report_json(report))


def read_report(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def histogram_csv(source) -> str:
    """``size,count`` rows sorted by size. ``source`` is a report with a
    histogram or a plain iterable of component sizes."""
    if hasattr(source, "histogram"):
        pairs = [tuple(p) for p in source.histogram]
    else:
        u, c = np.unique(np.asarray(list(source), dtype=np.int64), return_counts=True)
        pairs = list(zip(u.tolist(), c.tolist()))
    lines = ["size,count"] + [f"{s},{c}" for s, c in sorted(pairs)]
    return "\n".join(lines) + "\n"


def write_histogram(source, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(histogram_csv(source))
