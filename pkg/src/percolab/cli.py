"""Command-line front end.

Every subcommand accepts ``--config FILE`` with ``key=value`` lines whose keys
are the long flag names (dashes or underscores). Flags given on the command
line override the file; the resolved values are echoed into JSON reports.

Exit codes: 0 success, 1 invalid input or usage, 2 run-time failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings

from percolab import gw
from percolab.audit import ExpansionProfile, audit_profile
from percolab.errors import PercolabError, RuntimeFailure, ValidationError
from percolab.generators import gen_counterexample, gen_hypercube, gen_random_regular
from percolab.graphio import read_edge_list, write_edge_list
from percolab.harness import (
    ExperimentConfig,
    histogram_csv,
    report_json,
    run_counterexample,
    run_ercp,
    run_scaling,
    write_histogram,
    write_report,
)
from percolab.percolation import components, sample_site
from percolab.spectral import spectral_lambda


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in str(text).replace(",", " ").split()]
    except ValueError:
        raise ValidationError(f"expected a comma-separated integer list, got {text!r}") from None


# name -> (type, default); None defaults mean "not set"
COMMON = {"config": (str, None), "out": (str, None), "seed": (int, 0)}
OPTIONS = {
    "gw": {"d": (int, None), "p": (float, None), "eps": (float, None), "alpha": (float, None),
           "delta": (float, 0.0), "mode": (str, "growing"), "n": (int, None), "k": (float, None),
           "s": (float, None), "t": (float, None)},
    "gen": {"d": (int, None), "n": (int, None), "b": (int, 2), "k": (int, None)},
    "percolate": {"graph": (str, None), "p": (float, None), "hist": (str, None)},
    "audit": {"graph": (str, None), "profile": (str, "P"), "cap": (int, 6), "c1": (float, 1.0),
              "c2": (float, 0.5), "c3": (float, 1.0), "alpha": (float, 1.0), "C": (float, 1.0),
              "eps": (float, 0.1), "b": (float, 1.0), "delta": (float, 0.1),
              "spectral": (int, 0), "tol": (float, 1e-8), "budget": (int, 10**8),
              "root": (int, None)},
    "ercp": {"family": (str, "hypercube"), "graph": (str, None), "d": (int, 16), "n": (int, None),
             "b": (int, 2), "k": (int, None), "mode": (str, "growing"), "eps": (float, 0.5),
             "alpha": (float, 1.5), "delta": (float, 0.0), "C": (float, 1.0), "s": (float, 0.1),
             "trials": (int, 30), "graph_seed": (int, None), "thresholds": (str, "scaled"),
             "w_cutoff": (float, None), "large_cutoff": (float, None), "gap_lo": (float, None),
             "gap_hi": (float, None), "deficit_min": (float, None), "hist": (str, None)},
    "counterexample": {"n": (int, 264), "d": (int, 22), "b": (int, 2), "k": (int, 6),
                       "eps": (float, 0.5), "trials": (int, 20), "graph_seed": (int, None),
                       "cap": (int, 12), "alpha": (float, None), "c": (float, 0.1)},
}
OPTIONS["scaling"] = dict(OPTIONS["ercp"], sizes=(_int_list, None))
CHOICES = {"mode": ("growing", "constant"), "profile": ("P", "Q", "R"),
           "family": ("hypercube", "random-regular", "counterexample", "file"),
           "thresholds": ("asymptotic", "scaled")}

HELP = {
    "gw": "solve q, y, x; asymptotic y; thresholds and tail bounds",
    "gen": "generate hypercube | random-regular | counterexample edge lists",
    "percolate": "one site-percolation trial on a graph file",
    "audit": "expansion-profile audit (+ spectral estimate) as JSON",
    "ercp": "ERCP Monte Carlo run as JSON (+ CSV histogram)",
    "scaling": "ERCP runs over a size sequence",
    "counterexample": "two-layer construction: percolation counts and structural audit",
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="percolab", description="Percolation lab for d-regular graphs.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, opts in OPTIONS.items():
        sp = sub.add_parser(name, help=HELP[name])
        if name == "gen":
            sp.add_argument("family", choices=("hypercube", "random-regular", "counterexample"))
        for key, (typ, default) in {**COMMON, **opts}.items():
            flag = "--" + key.replace("_", "-")
            shown = "" if default is None else f" (default {default})"
            sp.add_argument(flag, dest=key, type=typ, default=None, choices=CHOICES.get(key),
                            help=f"{key}{shown}")
    return parser


def read_config_file(path: str) -> dict[str, str]:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def resolve(command: str, ns: argparse.Namespace) -> dict:
    """Defaults < config file < command-line flags."""
    opts = {**COMMON, **OPTIONS[command]}
    resolved = {k: default for k, (_, default) in opts.items()}
    if ns.config:
        for key, value in read_config_file(ns.config).items():
            if key not in opts or key == "config":
                raise ValidationError(f"unknown config key {key!r} for {command}")
            typ = opts[key][0]
            try:
                resolved[key] = typ(value)
            except ValueError:
                raise ValidationError(f"bad value {value!r} for {key}") from None
            if key in CHOICES and resolved[key] not in CHOICES[key]:
                raise ValidationError(f"{key} must be one of {CHOICES[key]}")
    for key in opts:
        value = getattr(ns, key, None)
        if value is not None:
            resolved[key] = value
    return resolved


def _need(cfg: dict, *keys):
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise ValidationError("missing required option(s): "
                              + ", ".join("--" + k.replace("_", "-") for k in missing))


def _emit(text: str, path: str | None, out) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)


def cmd_gw(cfg, out):
    _need(cfg, "d")
    d = cfg["d"]
    p = cfg["p"]
    if p is None:
        if cfg["mode"] == "growing" and cfg["eps"] is not None:
            p = min(1.0, (1.0 + cfg["eps"]) / d)
        elif cfg["mode"] == "constant" and cfg["alpha"] is not None:
            p = cfg["alpha"] / (d - 1)
        else:
            raise ValidationError("give --p, or --eps (growing) / --alpha (constant)")
    sol = gw.solve(d, p, mode="growing" if cfg["mode"] == "growing" else "constant")
    lines = [f"d={d}", f"p={p:.12g}", f"q={sol.q:.12f}", f"y={sol.y:.12f}", f"x={sol.x:.12f}",
             f"epsilon={sol.epsilon:.12g}"]
    if cfg["eps"] is not None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            lines.append(f"y_asymptotic={gw.solve_y_asymptotic(cfg['eps']):.12f}")
    if cfg["s"] is not None:
        p1, p2 = gw.sprinkle_split(p, cfg["s"], d)
        lines += [f"p1={p1:.12g}", f"p2={p2:.12g}"]
    if cfg["n"] is not None:
        if cfg["mode"] == "growing":
            _need(cfg, "eps")
            th = gw.small_component_threshold("growing", {"eps": cfg["eps"]}, cfg["n"])
        else:
            _need(cfg, "alpha")
            th = gw.small_component_threshold(
                "constant", {"alpha": cfg["alpha"], "delta": cfg["delta"]}, cfg["n"])
        lines.append(f"threshold={th.value:.12g}")
    if cfg["k"] is not None:
        _need(cfg, "eps")
        tb = gw.component_tail_bound(cfg["eps"], d, cfg["k"], cfg["t"])
        lines += [f"tail_bound={tb.value:.12g}", f"tail_bound_raw={tb.raw:.12g}",
                  f"tail_in_scope={str(tb.in_scope).lower()}"]
    out.write("\n".join(lines) + "\n")


def cmd_gen(cfg, out, family):
    _need(cfg, "out")
    if family == "hypercube":
        _need(cfg, "d")
        g = gen_hypercube(cfg["d"])
    elif family == "random-regular":
        _need(cfg, "n", "d")
        g = gen_random_regular(cfg["n"], cfg["d"], cfg["seed"])
    else:
        _need(cfg, "n", "d")
        g, part = gen_counterexample(cfg["n"], cfg["d"], cfg["b"], cfg["k"], cfg["seed"])
        with open(cfg["out"] + ".classes", "w", encoding="ascii", newline="\n") as fh:
            fh.write("".join(" ".join(map(str, c)) + "\n" for c in part.classes))
    write_edge_list(g, cfg["out"])
    out.write(f"wrote {cfg['out']}: n={g.n} m={g.edge_count}\n")


def cmd_percolate(cfg, out):
    _need(cfg, "graph", "p")
    g = read_edge_list(cfg["graph"])
    st = components(g, sample_site(g, cfg["p"], cfg["seed"]))
    sizes = st.sizes.tolist()
    out.write(f"n={g.n} retained={st.retained.count} components={st.num_components} "
              f"L1={st.L1} L2={st.L2}\n")
    out.write("sizes=" + " ".join(map(str, sizes)) + "\n")
    if cfg["hist"]:
        write_histogram(sizes, cfg["hist"])


def cmd_audit(cfg, out):
    _need(cfg, "graph")
    g = read_edge_list(cfg["graph"])
    profile = ExpansionProfile(cfg["profile"], c1=cfg["c1"], c2=cfg["c2"], c3=cfg["c3"],
                               alpha=cfg["alpha"], C=cfg["C"], eps=cfg["eps"], b=cfg["b"],
                               delta=cfg["delta"], caps=cfg["cap"])
    est = spectral_lambda(g, tol=cfg["tol"], seed=cfg["seed"]) if cfg["spectral"] else None
    # --root anchors enumeration at one vertex; only sound for vertex-transitive graphs
    report = audit_profile(g, profile, spectral=est, budget=cfg["budget"], root=cfg["root"],
                           seed=cfg["seed"])
    data = {"config": cfg, "audit": report.to_dict()}
    _emit(report_json(data), cfg["out"], out)


def _experiment_config(cfg) -> ExperimentConfig:
    keys = ExperimentConfig.__dataclass_fields__
    data = {k: v for k, v in cfg.items() if k in keys}
    data["master_seed"] = cfg["seed"]
    return ExperimentConfig(**data)


def cmd_ercp(cfg, out):
    report = run_ercp(_experiment_config(cfg))
    data = report.to_dict()
    data["config"] = cfg
    _emit(report_json(data), cfg["out"], out)
    if cfg["hist"]:
        write_histogram(report, cfg["hist"])


def cmd_scaling(cfg, out):
    _need(cfg, "sizes")
    report = run_scaling(_experiment_config(cfg), cfg["sizes"])
    data = report.to_dict()
    data["config"] = cfg
    _emit(report_json(data), cfg["out"], out)


def cmd_counterexample(cfg, out):
    ecfg = ExperimentConfig(family="counterexample", n=cfg["n"], d=cfg["d"], b=cfg["b"],
                            k=cfg["k"], eps=cfg["eps"], trials=cfg["trials"],
                            master_seed=cfg["seed"], graph_seed=cfg["graph_seed"])
    report = run_counterexample(ecfg, audit_cap=cfg["cap"], alpha=cfg["alpha"], c=cfg["c"])
    data = report.to_dict()
    data["config"] = cfg
    _emit(report_json(data), cfg["out"], out)


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.command is None:
            parser.print_help(err)
            return 1
        cfg = resolve(ns.command, ns)
        if ns.command == "gen":
            cmd_gen(cfg, out, ns.family)
        else:
            globals()["cmd_" + ns.command](cfg, out)
    except RuntimeFailure as exc:
        err.write(f"error: {exc}\n")
        return 2
    except PercolabError as exc:
        err.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
