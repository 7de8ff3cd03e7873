"""Numerical lower bounds for sigma(p) constants and theorem-backed checks.

The estimators maximize a norm ratio by projected gradient ascent and so
only ever produce lower bounds.  Upper bounds come from closed-form results:
the trail bound max((4c)^(1/p), 9 pi p / 8) when the Rudin number c_s with
p = 2s is at most c, and 3 pi p / 2 for sets without circuits of length p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .errors import DomainError, TheoremViolation
from .graph import COL, ROW, BipartiteSet, find_circuit, induced_subgraph, rudin_sup
from .schatten import (
    BlockMatrix,
    schatten_norm_even_trace,
    support_mask,
    triple_norm,
    triple_norm_operator_valued,
)

DEFAULT_RESTARTS = 64
DEFAULT_ITERATIONS = 500
DEFAULT_STEP = 0.1
MAX_HALVINGS = 30


# ---------------------------------------------------------------------------
# Closed-form bounds


def pisier_trail_bound(c: int, p: int) -> float:
    """Upper bound on the sigma(p) constant of a set with c_s <= c, p = 2s."""
    if p < 4 or p % 2:
        raise DomainError(f"p must be an even integer >= 4, got {p}")
    if c < 0:
        raise DomainError("trail count must be non-negative")
    return max((4.0 * c) ** (1.0 / p), 9.0 * math.pi * p / 8.0)


def circuit_bound(p: int) -> float:
    if p < 4 or p % 2:
        raise DomainError(f"p must be an even integer >= 4, got {p}")
    return 3.0 * math.pi * p / 2.0


def density_bound(m: int, n: int, p: float, D: float) -> tuple[float, float]:
    """Largest admissible #I' for an m-column, n-row induced subgraph.

    Returns ``(exact, relaxed)`` with
    exact = D^2 (m^(1/p) n^(1/2) + m^(1/2) n^(1/p))^2 and
    relaxed = 4 D^2 min(m, n)^(2/p) max(m, n).
    """
    if m < 1 or n < 1:
        raise DomainError("m and n must be positive")
    if D < 1:
        raise DomainError("D must be >= 1")
    exact = D**2 * (m ** (1 / p) * n**0.5 + m**0.5 * n ** (1 / p)) ** 2
    relaxed = 4 * D**2 * min(m, n) ** (2 / p) * max(m, n)
    return exact, relaxed


def erdos_bound(m: int, n: int, p: int) -> float:
    return 9 * math.pi**2 * p**2 * min(m, n) ** (2 / p) * max(m, n)


def trail_abundance_threshold(m: int, n: int, s: int, D: float) -> float:
    return 4 * D**2 * min(m, n) ** (1 / s) * max(m, n)


def proven_constant(G: BipartiteSet, p: int) -> float:
    """Best theorem-backed upper bound on the sigma(p) constant of G.

    Uses the trail bound for both orientations (c_s of I and of its
    transpose, i.e. r_s of I) and, when G has no circuit of length p, the
    circuit bound.
    """
    s = p // 2
    best = min(
        pisier_trail_bound(rudin_sup(G, s, COL).sup, p),
        pisier_trail_bound(rudin_sup(G, s, ROW).sup, p),
    )
    if find_circuit(G, p) is None:
        best = min(best, circuit_bound(p))
    return best


# ---------------------------------------------------------------------------
# Check records


@dataclass
class CheckResult:
    check: str
    parameters: dict
    value: float | None
    bound: float | None
    holds: bool | None
    witness: object = None

    @property
    def applicable(self) -> bool:
        return self.holds is not None

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "parameters": self.parameters,
            "value": self.value,
            "bound": self.bound,
            "holds": self.holds,
            "witness": self.witness,
        }


def _class_sizes(G: BipartiteSet) -> tuple[int, int]:
    """(m, n) = (#columns, #rows)."""
    return G.n_cols, G.n_rows


@dataclass
class DensityReport:
    p: float
    D: float
    checked: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.violations


def density_check(
    G: BipartiteSet,
    p: float,
    D: float,
    subsets: Sequence[tuple[Sequence[int], Sequence[int]]] | None = None,
    samples: int = 100,
    seed: int = 0,
) -> DensityReport:
    """Compare #I' with the density bound on induced subgraphs.

    ``subsets`` is an explicit list of ``(rows, cols)`` selections; without
    it, ``samples`` random selections (uniform sizes, then uniform subsets)
    are drawn from a generator seeded with ``seed``.  Any violation shows
    that G is not a sigma(p) set with constant D.
    """
    report = DensityReport(p, D)
    if subsets is None:
        subsets = []
        if G.n_rows and G.n_cols:
            rng = np.random.default_rng(seed)
            rows, cols = np.array(G.rows), np.array(G.cols)
            for _ in range(samples):
                nr = rng.integers(1, len(rows) + 1)
                nc = rng.integers(1, len(cols) + 1)
                subsets.append(
                    (
                        sorted(rng.choice(rows, nr, replace=False).tolist()),
                        sorted(rng.choice(cols, nc, replace=False).tolist()),
                    )
                )
    for rs, cs in subsets:
        sub = induced_subgraph(G, rs, cs)
        m, n = len(set(cs)), len(set(rs))
        if m == 0 or n == 0:
            continue
        exact, _ = density_bound(m, n, p, D)
        entry = {"rows": list(rs), "cols": list(cs), "size": len(sub), "bound": exact}
        report.checked.append(entry)
        if len(sub) > exact:
            report.violations.append(entry)
    return report


def erdos_check(G: BipartiteSet, p: int) -> CheckResult:
    """Edge count of a circuit-free bipartite graph against 9 pi^2 p^2 min^(2/p) max."""
    if p < 4 or p % 2:
        raise DomainError(f"p must be an even integer >= 4, got {p}")
    m, n = _class_sizes(G)
    params = {"p": p, "m": m, "n": n, "edges": len(G)}
    circuit = find_circuit(G, p)
    if circuit is not None:
        return CheckResult("erdos", params, None, None, None, [repr(v) for v in circuit])
    if m == 0 or n == 0:
        return CheckResult("erdos", params, 0.0, 0.0, True)
    bound = erdos_bound(m, n, p)
    margin = len(G) / bound
    return CheckResult("erdos", params, margin, 1.0, margin <= 1.0)


def trail_abundance_check(G: BipartiteSet, s: int, D: float) -> CheckResult:
    """Look for a vertex pair joined by more than D^(2s)/4 trails of length s.

    Applies when e > 4 D^2 min(m, n)^(1/s) max(m, n) and D > 9 pi s / 4; on
    such graphs the pair must exist, and failing to find one raises
    :class:`TheoremViolation`.
    """
    if s < 2:
        raise DomainError("s must be >= 2")
    if D <= 9 * math.pi * s / 4:
        raise DomainError(f"D must exceed 9 pi s / 4 = {9 * math.pi * s / 4:.4f}")
    m, n = _class_sizes(G)
    params = {"s": s, "D": D, "m": m, "n": n, "edges": len(G)}
    if m == 0 or n == 0 or len(G) <= trail_abundance_threshold(m, n, s, D):
        return CheckResult("trail-abundance", params, None, None, None)
    target = D ** (2 * s) / 4
    found = _find_abundant_pair(G, s, target)
    if found is None:
        result = CheckResult("trail-abundance", params, None, target, False)
        raise TheoremViolation("no vertex pair with enough trails", result.to_json())
    v0, vs, count = found
    return CheckResult("trail-abundance", params, float(count), target, True, [repr(v0), repr(vs)])


def _find_abundant_pair(G: BipartiteSet, s: int, target: float):
    for start in (COL, ROW):
        rep = rudin_sup(G, s, start)
        if rep.sup > target:
            return rep.witness[0], rep.witness[1], rep.sup
    return None


# ---------------------------------------------------------------------------
# Ratio objectives


def _assemble(b: np.ndarray) -> np.ndarray:
    R, C, d, _ = b.shape
    return b.transpose(0, 2, 1, 3).reshape(R * d, C * d)


def _disassemble(a: np.ndarray, R: int, C: int, d: int) -> np.ndarray:
    return a.reshape(R, d, C, d).transpose(0, 2, 1, 3)


def _trace_power(b: np.ndarray, s: int) -> tuple[float, np.ndarray]:
    """tr((A* A)^s) for the assembled A and its gradient in conj(A), as blocks."""
    R, C, d, _ = b.shape
    a = _assemble(b)
    g = a.conj().T @ a
    pw = np.linalg.matrix_power(g, s - 1)
    val = float(np.real(np.sum(pw * g.T)))
    return val, _disassemble(s * (a @ pw), R, C, d)


def _column_branch(b: np.ndarray, s: int) -> tuple[float, np.ndarray]:
    gram = np.einsum("rcji,rcjk->cik", b.conj(), b)
    pw = np.linalg.matrix_power(gram, s - 1)
    val = float(np.real(np.einsum("cij,cji->", pw, gram)))
    return val, s * np.einsum("rcij,cjk->rcik", b, pw)


def _row_branch(b: np.ndarray, s: int) -> tuple[float, np.ndarray]:
    gram = np.einsum("rcij,rckj->rik", b, b.conj())
    pw = np.linalg.matrix_power(gram, s - 1)
    val = float(np.real(np.einsum("rij,rji->", pw, gram)))
    return val, s * np.einsum("rij,rcjk->rcik", pw, b)


class _RatioObjective:
    """log ||x||_p^p - log |||x|||_p^p, using the active mixed-norm branch."""

    def __init__(self, s):
        self.s = s

    def value(self, b):
        num, _ = _trace_power(b, self.s)
        col_v, _ = _column_branch(b, self.s)
        row_v, _ = _row_branch(b, self.s)
        den = max(col_v, row_v)
        if num <= 0 or den <= 0:
            return -np.inf
        return math.log(num) - math.log(den)

    def gradient(self, b):
        num, g_num = _trace_power(b, self.s)
        col_v, g_col = _column_branch(b, self.s)
        row_v, g_row = _row_branch(b, self.s)
        # ties go to the column branch
        den, g_den = (col_v, g_col) if col_v >= row_v else (row_v, g_row)
        return g_num / num - g_den / den

    def normalize(self, b):
        col_v, _ = _column_branch(b, self.s)
        row_v, _ = _row_branch(b, self.s)
        return b / max(col_v, row_v) ** (1.0 / (2 * self.s))


class _SignObjective:
    """log ||T_theta x||_p^p - log ||x||_p^p."""

    def __init__(self, s, theta):
        self.s = s
        self.theta = theta[:, :, None, None]

    def value(self, b):
        top, _ = _trace_power(self.theta * b, self.s)
        bottom, _ = _trace_power(b, self.s)
        if top <= 0 or bottom <= 0:
            return -np.inf
        return math.log(top) - math.log(bottom)

    def gradient(self, b):
        top, g_top = _trace_power(self.theta * b, self.s)
        bottom, g_bottom = _trace_power(b, self.s)
        return self.theta.conj() * g_top / top - g_bottom / bottom

    def normalize(self, b):
        return b / np.linalg.norm(b)


def _ascend(objective, b, mask, iterations, step):
    """Projected gradient ascent with backtracking; returns (blocks, value, iterations run)."""
    b = objective.normalize(b * mask)
    val = objective.value(b)
    done = 0
    for done in range(1, iterations + 1):
        g = objective.gradient(b) * mask
        gnorm = np.linalg.norm(g)
        if not np.isfinite(gnorm) or gnorm < 1e-14:
            break
        direction = g * (np.linalg.norm(b) / gnorm)
        eta = step
        for _ in range(MAX_HALVINGS):
            trial = objective.normalize(b + eta * direction)
            tval = objective.value(trial)
            if tval > val:
                break
            eta /= 2
        else:
            break
        improvement = tval - val
        b, val = trial, tval
        if improvement < 1e-15:
            break
    return b, val, done


# ---------------------------------------------------------------------------
# Estimators


@dataclass
class SigmaEstimate:
    """A lower bound on a sigma(p)-type constant together with its witnesses."""

    kind: str
    p: int
    value: float
    witness_x: object
    witness_sign: np.ndarray | None = None
    iterations: int = 0
    restarts: int = 0
    seed: int = 0
    block_dim: int = 1

    def recompute(self) -> float:
        if self.kind == "ratio":
            return ratio_of(self.witness_x, self.p)
        return sign_ratio_of(self.witness_x, self.witness_sign, self.p)

    def witness_blocks(self) -> np.ndarray:
        if isinstance(self.witness_x, BlockMatrix):
            return self.witness_x.blocks
        return np.asarray(self.witness_x, dtype=complex)[:, :, None, None]


def ratio_of(x, p: int) -> float:
    """||x||_p / |||x|||_p for even p; scalar or operator-valued x."""
    s = p // 2
    if isinstance(x, BlockMatrix):
        return schatten_norm_even_trace(x, s) / triple_norm_operator_valued(x, p)
    return schatten_norm_even_trace(x, s) / triple_norm(x, p)


def sign_ratio_of(x, theta, p: int) -> float:
    """||T_theta x||_p / ||x||_p."""
    s = p // 2
    if isinstance(x, BlockMatrix):
        tx = BlockMatrix(np.asarray(theta)[:, :, None, None] * x.blocks)
    else:
        tx = np.asarray(theta) * np.asarray(x)
    return schatten_norm_even_trace(tx, s) / schatten_norm_even_trace(x, s)


def _check_even(p):
    if p < 4 or p % 2:
        raise DomainError(f"p must be an even integer >= 4, got {p}")


def _package(blocks, d):
    return BlockMatrix(blocks) if d > 1 else blocks[:, :, 0, 0].copy()


def _canonical(I: BipartiteSet) -> tuple[BipartiteSet, bool]:
    """I or its transpose, whichever has the smaller sorted edge list.

    Both norms are invariant under transposition, so estimating on the
    canonical orientation makes the estimate for I and for its transpose
    identical.
    """
    T = I.transpose()
    return (T, True) if T.edge_list < I.edge_list else (I, False)


def _transpose_witness(x):
    """Full transpose of the assembled matrix, kept in block form."""
    if isinstance(x, BlockMatrix):
        return BlockMatrix(x.blocks.transpose(1, 0, 3, 2))
    return np.asarray(x).T


def _starting_blocks(I: BipartiteSet, mask, d, seed, restarts, init):
    """Yield starting points: injected witnesses, the indicator of I, then random draws."""
    R, C = mask.shape
    for x in init or ():
        b = x.blocks if isinstance(x, BlockMatrix) else np.asarray(x, dtype=complex)[:, :, None, None]
        if b.shape[2] != d:
            raise DomainError("injected witness has the wrong block dimension")
        pad = np.zeros((R, C, d, d), dtype=complex)
        rr, cc = min(R, b.shape[0]), min(C, b.shape[1])
        pad[:rr, :cc] = b[:rr, :cc]
        yield pad
    yield mask[:, :, None, None] * np.eye(d)[None, None]
    for k in range(restarts):
        rng = np.random.default_rng([seed, k])
        shape = (R, C, d, d)
        yield rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def ratio_constant_estimate(
    I: BipartiteSet,
    p: int,
    restarts: int = DEFAULT_RESTARTS,
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 0,
    step: float = DEFAULT_STEP,
    block_dim: int = 1,
    init: Sequence | None = None,
) -> SigmaEstimate:
    """Lower bound on the best D with ||x||_p <= D |||x|||_p on S^p_I.

    Every restart runs gradient ascent of the ratio from its own starting
    point (seeded by ``(seed, restart index)``); the indicator of I and any
    ``init`` witnesses are tried first.  With ``block_dim`` d > 1 the
    witnesses are operator valued (d x d blocks).
    """
    _check_even(p)
    if len(I) == 0:
        raise DomainError("empty coordinate set")
    I, flipped = _canonical(I)
    if flipped and init:
        init = [_transpose_witness(x) for x in init]
    s = p // 2
    mask = support_mask(I)
    d = block_dim
    bmask = mask[:, :, None, None]
    objective = _RatioObjective(s)

    q0 = I.edge_list[0]
    best_b = np.zeros(mask.shape + (d, d), dtype=complex)
    best_b[q0] = np.eye(d)
    best_val = objective.value(best_b)
    total = 0
    for b0 in _starting_blocks(I, mask, d, seed, restarts, init):
        b, val, its = _ascend(objective, b0, bmask, iterations, step)
        total += its
        if val > best_val:
            best_b, best_val = b, val
    witness = _package(best_b, d)
    if flipped:
        witness = _transpose_witness(witness)
    est = SigmaEstimate("ratio", p, 0.0, witness, None, total, restarts, seed, d)
    est.value = est.recompute()
    return est


def spanning_forest_edges(I: BipartiteSet) -> set[tuple[int, int]]:
    """Edges of a spanning forest of I (union-find over the sorted edge list)."""
    parent: dict = {}

    def find(v):
        while parent.setdefault(v, v) != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    tree = set()
    for r, c in I.edge_list:
        a, b = find(("r", r)), find(("c", c))
        if a != b:
            parent[a] = b
            tree.add((r, c))
    return tree


def sign_pattern_classes(I: BipartiteSet, limit: int | None = None):
    """One real sign pattern per orbit of the row/column flip group.

    Flipping the signs of a row or a column is an isometry of S^p, so every
    pattern is equivalent to one that is +1 on a fixed spanning forest.
    Yields dicts q -> +-1; the all-ones pattern comes first.
    """
    tree = spanning_forest_edges(I)
    free = [q for q in I.edge_list if q not in tree]
    for k, signs in enumerate(product((1, -1), repeat=len(free))):
        if limit is not None and k >= limit:
            return
        theta = {q: 1 for q in tree}
        theta.update(zip(free, signs))
        yield theta


def _theta_matrix(theta: dict, shape) -> np.ndarray:
    t = np.ones(shape, dtype=complex)
    for q, v in theta.items():
        t[q] = v
    return t


def sign_unconditionality_estimate(
    I: BipartiteSet,
    p: int,
    mode: str = "real",
    restarts: int = 8,
    iterations: int = 300,
    seed: int = 0,
    step: float = DEFAULT_STEP,
    max_patterns: int = 256,
    block_dim: int = 1,
    patterns: Sequence[dict] | None = None,
) -> SigmaEstimate:
    """Lower bound on the real or complex unconditionality constant of (e_q)_{q in I}.

    For each tested sign pattern theta, maximizes ||T_theta x||_p / ||x||_p.
    In real mode the pattern orbits under row/column flips are enumerated
    exhaustively when there are at most ``max_patterns`` of them, otherwise
    ``max_patterns`` orbit representatives are sampled.  Complex mode samples
    unimodular patterns.  Explicit ``patterns`` override both.
    """
    _check_even(p)
    if mode not in ("real", "complex"):
        raise DomainError(f"mode must be 'real' or 'complex', got {mode!r}")
    if len(I) == 0:
        raise DomainError("empty coordinate set")
    I, flipped = _canonical(I)
    if flipped and patterns is not None:
        patterns = [{(c, r): v for (r, c), v in theta.items()} for theta in patterns]
    s = p // 2
    mask = support_mask(I)
    d = block_dim
    bmask = mask[:, :, None, None]

    if patterns is None:
        patterns = _default_patterns(I, mode, max_patterns, seed)

    q0 = I.edge_list[0]
    best_b = np.zeros(mask.shape + (d, d), dtype=complex)
    best_b[q0] = np.eye(d)
    best_theta = np.ones(mask.shape, dtype=complex)
    best_val = 0.0
    total = 0
    for theta in patterns:
        tmat = _theta_matrix(theta, mask.shape)
        if np.allclose(tmat[mask], tmat[mask][0]):
            continue  # a constant unimodular multiple is an isometry
        objective = _SignObjective(s, tmat)
        for b0 in _starting_blocks(I, mask, d, seed, restarts, None):
            b, val, its = _ascend(objective, b0, bmask, iterations, step)
            total += its
            if val > best_val:
                best_b, best_val, best_theta = b, val, tmat
    witness = _package(best_b, d)
    if flipped:
        witness, best_theta = _transpose_witness(witness), best_theta.T
    est = SigmaEstimate(f"sign-{mode}", p, 0.0, witness, best_theta, total, restarts, seed, d)
    est.value = est.recompute()
    return est


def _default_patterns(I, mode, max_patterns, seed):
    tree = spanning_forest_edges(I)
    free = [q for q in I.edge_list if q not in tree]
    rng = np.random.default_rng([seed, 0x5167])
    if mode == "real":
        if len(free) <= math.log2(max_patterns):
            return list(sign_pattern_classes(I))
        out = []
        for _ in range(max_patterns):
            theta = {q: 1 for q in tree}
            theta.update(zip(free, rng.choice([-1, 1], len(free)).tolist()))
            out.append(theta)
        return out
    out = []
    for _ in range(max_patterns if free else 0):
        theta = {q: 1 for q in tree}
        theta.update(zip(free, np.exp(2j * np.pi * rng.random(len(free))).tolist()))
        out.append(theta)
    return out


# ---------------------------------------------------------------------------
# Consistency checks linking the estimators to the closed-form bounds


def pisier_check(G: BipartiteSet, p: int, estimate: SigmaEstimate, atol: float = 1e-6) -> CheckResult:
    """D_est <= min over orientations of max((4 sup c_s)^(1/p), 9 pi p / 8)."""
    _check_even(p)
    s = p // 2
    sup_c = rudin_sup(G, s, COL).sup
    sup_r = rudin_sup(G, s, ROW).sup
    bound = min(pisier_trail_bound(sup_c, p), pisier_trail_bound(sup_r, p))
    params = {"p": p, "sup_c": sup_c, "sup_r": sup_r, "edges": len(G)}
    return CheckResult("pisier", params, estimate.value, bound, estimate.value <= bound + atol)


def circuit_check(G: BipartiteSet, p: int, estimate: SigmaEstimate, atol: float = 1e-6) -> CheckResult:
    _check_even(p)
    params = {"p": p, "edges": len(G)}
    circuit = find_circuit(G, p)
    if circuit is not None:
        return CheckResult("circuit", params, estimate.value, None, None, [repr(v) for v in circuit])
    bound = circuit_bound(p)
    return CheckResult("circuit", params, estimate.value, bound, estimate.value <= bound + atol)
