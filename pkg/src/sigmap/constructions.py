"""Generators for the coordinate-set families and closed-form counting bounds.

Orientation convention: a set with ``m`` columns and ``n`` rows has column
ids ``0..m-1`` and row ids ``0..n-1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, MalformedInputError, PartialResultError
from .graph import BipartiteSet, from_edge_list

# ---------------------------------------------------------------------------
# Random construction


@dataclass(frozen=True)
class RandomGraphSpec:
    m: int
    n: int
    alpha: float
    seed: int
    s: int = 2
    epsilon: float = 0.0

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise DomainError("m and n must be >= 1")
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.epsilon < 0:
            raise DomainError("epsilon must be >= 0")


_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def _splitmix64(z: np.ndarray) -> np.ndarray:
    z = z + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def edge_uniforms(seed: int, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Counter-based uniforms in [0, 1), one per (seed, r, c) triple.

    Each value depends only on its own key, so the result does not depend
    on evaluation order or on how the work is split.
    """
    with np.errstate(over="ignore"):
        key = _splitmix64(np.full(np.shape(rows), np.uint64(seed & 0xFFFFFFFFFFFFFFFF)))
        key = _splitmix64(key ^ np.asarray(rows, dtype=np.uint64))
        key = _splitmix64(key ^ np.asarray(cols, dtype=np.uint64))
    return (key >> np.uint64(11)).astype(np.float64) * 2.0**-53


def random_bipartite(spec: RandomGraphSpec) -> BipartiteSet:
    """Keep each of the m*n coordinates independently with probability alpha."""
    r, c = np.meshgrid(np.arange(spec.n), np.arange(spec.m), indexing="ij")
    keep = edge_uniforms(spec.seed, r, c) < spec.alpha
    pairs = zip(r[keep].tolist(), c[keep].tolist())
    return from_edge_list(pairs, range(spec.n), range(spec.m))


def alpha_schedule(s: int, m: int, n: int, epsilon: float = 0.0, square: bool = False) -> float:
    """Edge probability m^(-1/2) n^(-1/2+1/s) N^(-epsilon), clamped to [0, 1].

    N is m*n by default.  With ``square=True`` and s even, N = m^2 (the
    endpoint pair count when both trail ends are columns).
    """
    if s < 2:
        raise DomainError("s must be >= 2")
    if m < n or n < 1:
        raise DomainError(f"need m >= n >= 1, got m={m}, n={n}")
    if not 0 <= epsilon < 0.25:
        raise DomainError("epsilon must lie in [0, 1/4)")
    pairs = m * m if (square and s % 2 == 0) else m * n
    alpha = m**-0.5 * n ** (-0.5 + 1.0 / s) * pairs**-epsilon
    return min(1.0, max(0.0, alpha))


def alpha_schedule_s2(m: int, n: int, l: int) -> float:
    """m^(-1/l) n^(-1/2), clamped; expected size n^(1/2) m^(1-1/l)."""
    if m < n or n < 1:
        raise DomainError(f"need m >= n >= 1, got m={m}, n={n}")
    if l < 2:
        raise DomainError("l must be >= 2")
    return min(1.0, m ** (-1.0 / l) * n**-0.5)


def union_bound_s2(m: int, n: int, l: int, alpha: float) -> float:
    """m^2 C(n, l) alpha^(2l): bounds P(sup c_2 >= l) for the s = 2 construction."""
    return m * m * math.comb(n, l) * alpha ** (2 * l)


def union_bound(m: int, n: int, s: int, l: int, epsilon: float, square: bool = False) -> float:
    """(ls)^(ls) N^(1 - ceil(l^(1/s)) eps) / (1 - N^(-eps)) for the general schedule."""
    pairs = m * m if (square and s % 2 == 0) else m * n
    if epsilon <= 0:
        return math.inf
    kmin = math.ceil(l ** (1.0 / s) - 1e-12)
    return (l * s) ** (l * s) * pairs ** (1 - kmin * epsilon) / (1 - pairs**-epsilon)


def a_k_upper_bound(m: int, n: int, s: int, l: int, k: int) -> float:
    """m^(k/2) n^(k/2 - k/s) (k - k/s)^(ls - l), the bound on #A_k."""
    return m ** (k / 2) * n ** (k / 2 - k / s) * (k - k / s) ** (l * s - l)


def a_k_lower_bounds_s3(m: int, n: int, l: int) -> tuple[int, int]:
    """Lower bounds (#A_{2l+1}, #A_{3l}) >= (C(m,l) n, C(m,l) C(n,l)) for s = 3."""
    return math.comb(m, l) * n, math.comb(m, l) * math.comb(n, l)


def reiman_bound(l: int, m: int, n: int) -> float:
    """(l n m (m-1) + n^2/4)^(1/2) + n/2."""
    if l < 1:
        raise DomainError("l must be >= 1")
    return math.sqrt(l * n * m * (m - 1) + n * n / 4) + n / 2


# ---------------------------------------------------------------------------
# Projective planes


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % d for d in range(2, math.isqrt(q) + 1))


def _projective_points(q: int) -> list[tuple[int, int, int]]:
    """Normalized representatives: the first nonzero coordinate is 1."""
    pts = []
    for v in np.ndindex(q, q, q):
        nz = [x for x in v if x]
        if nz and nz[0] == 1:
            pts.append(v)
    return pts


def projective_plane_incidence(q: int) -> BipartiteSet:
    """Point-line incidence graph of PG(2, q) over the prime field F_q.

    Rows are points, columns are lines; both indexed 0..q^2+q.
    """
    if not _is_prime(q):
        raise DomainError(f"q must be prime, got {q}")
    pts = _projective_points(q)
    P = np.array(pts)
    inc = (P @ P.T) % q == 0
    r, c = np.nonzero(inc)
    N = len(pts)
    return from_edge_list(zip(r.tolist(), c.tolist()), range(N), range(N))


# ---------------------------------------------------------------------------
# B_s sets and Hankel sets


@dataclass(frozen=True)
class BsSet:
    s: int
    elements: tuple[int, ...]
    bound: int

    def __len__(self):
        return len(self.elements)


def is_bs_set(elements: Sequence[int], s: int) -> bool:
    """All s-element multiset sums are pairwise distinct (exhaustive)."""
    seen = set()
    for combo in combinations_with_replacement(sorted(elements), s):
        t = sum(combo)
        if t in seen:
            return False
        seen.add(t)
    return True


def greedy_bs_set(s: int, k: int, q: int | None = None) -> BsSet:
    """Scan 0..k-1 and keep every element that preserves the B_s property.

    Stops once ``q`` elements are kept.  Raises :class:`PartialResultError`
    (with the set built so far) if the range runs out first.
    """
    if s < 2 or k < 1:
        raise DomainError("need s >= 2 and k >= 1")
    chosen: list[int] = []
    # sums[t] = set of t-multiset sums of the chosen elements
    sums = [{0}] + [set() for _ in range(s)]
    for x in range(k):
        if q is not None and len(chosen) >= q:
            break
        new = []
        for j in range(1, s + 1):
            new.extend(j * x + y for y in sums[s - j])
        if len(new) != len(set(new)) or not sums[s].isdisjoint(new):
            continue
        chosen.append(x)
        for t in range(s, 0, -1):
            for j in range(1, t + 1):
                sums[t].update(j * x + y for y in sums[t - j])
    result = BsSet(s, tuple(chosen), k)
    if not is_bs_set(result.elements, s):
        raise AssertionError("greedy scan produced a set with repeated sums")
    if q is not None and len(chosen) < q:
        raise PartialResultError(f"only {len(chosen)} of {q} elements fit below {k}", result)
    return result


def hankel_size_lower_bound(m: int, n: int, k: int, q: int) -> int:
    return n * q if n <= m - k + 1 else (m - k + 1) * q


def hankel_set(F: BsSet, m: int, n: int, k: int | None = None) -> BipartiteSet:
    """{(r, c) in [0, n) x [0, m) : r + c in F + m - k}."""
    k = F.bound if k is None else k
    if m < k:
        raise DomainError(f"need m >= k, got m={m}, k={k}")
    if not 0 <= n <= m:
        raise DomainError(f"need 0 <= n <= m, got n={n}")
    if F.elements and max(F.elements) >= k:
        raise DomainError("F must lie in {0, ..., k-1}")
    shifted = {f + m - k for f in F.elements}
    pairs = [(r, t - r) for r in range(n) for t in sorted(shifted) if 0 <= t - r < m]
    I = from_edge_list(pairs, range(n), range(m))
    assert len(I) >= hankel_size_lower_bound(m, n, k, len(F))
    return I


# ---------------------------------------------------------------------------
# Small explicit families


def quadrilaterals(count: int) -> BipartiteSet:
    """Disjoint 4-cycles {(2i,2i), (2i,2i+1), (2i+1,2i+1), (2i+1,2i)}."""
    if count < 0:
        raise DomainError("count must be >= 0")
    pairs = []
    for i in range(count):
        a, b = 2 * i, 2 * i + 1
        pairs += [(a, a), (a, b), (b, b), (b, a)]
    return from_edge_list(pairs)


def row_set(rows: Iterable[tuple[int, Sequence[int]]]) -> BipartiteSet:
    """Union of rows in which every column holds at most one entry."""
    seen: set[int] = set()
    pairs = []
    for r, cols in rows:
        for c in cols:
            if c in seen:
                raise MalformedInputError(f"column {c} used twice in a row set")
            seen.add(c)
            pairs.append((r, c))
    return from_edge_list(pairs)


def column_set(cols: Iterable[tuple[int, Sequence[int]]]) -> BipartiteSet:
    """Union of columns in which every row holds at most one entry."""
    return row_set(cols).transpose()


def diagonal(size: int) -> BipartiteSet:
    return from_edge_list((i, i) for i in range(size))


def anti_diagonal(size: int) -> BipartiteSet:
    return from_edge_list((i, size - 1 - i) for i in range(size))


def star(leaves: int, center: int = 0) -> BipartiteSet:
    """One row joined to ``leaves`` columns."""
    return from_edge_list((center, c) for c in range(leaves))


def path(edges: int) -> BipartiteSet:
    """A path r0 - c0 - r1 - c1 - ... with the given number of edges."""
    pairs = []
    for e in range(edges):
        i = e // 2
        pairs.append((i, i) if e % 2 == 0 else (i + 1, i))
    return from_edge_list(pairs)


def complete_bipartite(n_rows: int, n_cols: int) -> BipartiteSet:
    return from_edge_list((r, c) for r in range(n_rows) for c in range(n_cols))


def random_tree(n_vertices: int, seed: int) -> BipartiteSet:
    """Random bipartite tree: each new vertex attaches to an earlier vertex of the other class."""
    rng = np.random.default_rng(seed)
    rows, cols = [0], []
    pairs = []
    for _ in range(n_vertices - 1):
        if cols and rng.random() < 0.5:
            c = cols[rng.integers(len(cols))]
            r = len(rows)
            rows.append(r)
        else:
            r = rows[rng.integers(len(rows))]
            c = len(cols)
            cols.append(c)
        pairs.append((r, c))
    return from_edge_list(pairs, rows, cols)
