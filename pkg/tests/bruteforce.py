"""Exhaustive 2^n oracles for the audit quantities (small graphs only)."""

from fractions import Fraction

import numpy as np


def subset_measures(g):
    """Size, e(U), e(U,U^c) and |N(U)| for every nonempty subset (bitmask order)."""
    n = g.n
    masks = np.arange(1, 1 << n, dtype=np.int64)
    size = np.zeros(masks.size, dtype=np.int64)
    for x in range(n):
        size += (masks >> x) & 1
    e_in = np.zeros(masks.size, dtype=np.int64)
    e_cut = np.zeros(masks.size, dtype=np.int64)
    for u, v in g.edges.tolist():
        a, b = (masks >> u) & 1, (masks >> v) & 1
        e_in += a & b
        e_cut += a ^ b
    # N(U) as a bitmask: OR of neighbor masks of members, minus U
    nbr_mask = [sum(1 << y for y in g.adj[x]) for x in range(n)]
    reach = np.zeros(masks.size, dtype=np.int64)
    for x in range(n):
        reach |= np.where((masks >> x) & 1 == 1, nbr_mask[x], 0)
    outside = reach & ~masks
    nbhd = np.zeros(masks.size, dtype=np.int64)
    for x in range(n):
        nbhd += (outside >> x) & 1
    return size, e_in, e_cut, nbhd


def prefix_extremes(g, max_size):
    """For s = 1..max_size the exact min e(U,U^c)/|U|, min |N(U)|/|U| and
    max e(U)/|U| over all U with 1 <= |U| <= s, as Fractions."""
    size, e_in, e_cut, nbhd = subset_measures(g)
    per = {}
    for s in range(1, max_size + 1):
        sel = size == s
        if not sel.any():
            break
        per[s] = (Fraction(int(e_cut[sel].min()), s), Fraction(int(nbhd[sel].min()), s),
                  Fraction(int(e_in[sel].max()), s))
    out, best = {}, None
    for s in sorted(per):
        cur = per[s]
        best = cur if best is None else (min(best[0], cur[0]), min(best[1], cur[1]),
                                         max(best[2], cur[2]))
        out[s] = {"edge": best[0], "vertex": best[1], "sparsity": best[2]}
    return out
