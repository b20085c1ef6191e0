"""Plain-text edge-list files.

Format: header ``<n> <m>``, then ``m`` lines ``<u> <v>`` (0-based, ``u < v``,
lexicographic order). Lines starting with ``#`` are comments. ASCII, LF.
"""

from __future__ import annotations

import os

import numpy as np

from percolab.errors import InvariantViolation, ParseError, PercolabError
from percolab.graph import Graph, build_graph


def format_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.edge_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edges.tolist())
    return "\n".join(lines) + "\n"


def write_edge_list(g: Graph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_edge_list(g))


def parse_edge_list(text: str) -> Graph:
    header = None
    pairs = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 2:
            raise ParseError(f"expected two integers, got {line!r}", lineno)
        try:
            a, b = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(f"non-integer field in {line!r}", lineno) from None
        if header is None:
            if a < 0 or b < 0:
                raise ParseError("negative header values", lineno)
            header = (a, b)
            continue
        if a == b:
            raise ParseError(f"self-loop {a} {b}", lineno)
        pairs.append((a, b, lineno))
    if header is None:
        raise ParseError("missing header line")
    n, m = header
    if len(pairs) != m:
        raise ParseError(f"header declares {m} edges, found {len(pairs)}")
    for a, b, lineno in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise ParseError(f"endpoint out of range [0, {n})", lineno)
    edges = np.array([(a, b) for a, b, _ in pairs], dtype=np.int64).reshape(-1, 2)
    try:
        return build_graph(n, edges)
    except PercolabError as exc:
        raise InvariantViolation(str(exc)) from exc


def read_edge_list(path: str | os.PathLike) -> Graph:
    with open(path, "r", encoding="ascii") as fh:
        return parse_edge_list(fh.read())


def graph_io(path, direction: str, graph: Graph | None = None):
    """Single entry point: ``graph_io(path, "read")`` or ``graph_io(path, "write", g)``."""
    if direction == "read":
        return read_edge_list(path)
    if direction == "write":
        if graph is None:
            raise ValueError("write needs a graph")
        write_edge_list(graph, path)
        return None
    raise ValueError(f"direction must be 'read' or 'write', got {direction!r}")
