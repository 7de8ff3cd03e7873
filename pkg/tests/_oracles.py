"""Brute-force oracles, kept independent of the code paths they check."""

from __future__ import annotations

from collections import Counter
from itertools import combinations, permutations

import numpy as np

from sigmap.graph import col, row


def trail_endpoint_counts(G, v0, s):
    """Count trails from v0 by trying every ordered sequence of s distinct edges."""
    counts = Counter()
    for seq in permutations(G.edge_list, s):
        cur = v0
        for r, c in seq:
            if cur == row(r):
                cur = col(c)
            elif cur == col(c):
                cur = row(r)
            else:
                break
        else:
            counts[cur] += 1
    return counts


def has_closed_trail(G, p):
    """Some p edges form a connected subgraph with all degrees even (an Euler circuit)."""
    for subset in combinations(G.edge_list, p):
        deg = Counter()
        parent = {}

        def find(v):
            while parent.setdefault(v, v) != v:
                v = parent[v]
            return v

        for r, c in subset:
            deg[("r", r)] += 1
            deg[("c", c)] += 1
            parent[find(("r", r))] = find(("c", c))
        if all(d % 2 == 0 for d in deg.values()) and len({find(v) for v in deg}) == 1:
            return True
    return False


def charpoly_roots(a):
    """Eigenvalues as roots of the Faddeev-LeVerrier characteristic polynomial."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    coeffs = [1.0 + 0j]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(a @ m) / k)
    return np.sort(np.roots(coeffs).real)[::-1]


def random_bipartite_edges(rng, n_rows, n_cols, density):
    return [(r, c) for r in range(n_rows) for c in range(n_cols) if rng.random() < density]
