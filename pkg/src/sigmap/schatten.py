"""Schatten norms, mixed column/row norms and their operator-valued versions.

Scalar matrices are plain 2-D complex numpy arrays indexed by ``(row id,
column id)``.  Operator-valued matrices are :class:`BlockMatrix` objects
holding a ``(nrows, ncols, d, d)`` array of blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConvergenceError, DomainError, MalformedInputError
from .graph import BipartiteSet, col, degree, row


@dataclass(frozen=True)
class BlockMatrix:
    blocks: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.blocks, dtype=complex)
        if b.ndim != 4 or b.shape[2] != b.shape[3]:
            raise MalformedInputError(f"blocks must have shape (R, C, d, d), got {b.shape}")
        object.__setattr__(self, "blocks", b)

    @property
    def block_dim(self) -> int:
        return self.blocks.shape[2]

    @property
    def shape(self) -> tuple[int, int]:
        return self.blocks.shape[:2]

    def assemble(self) -> np.ndarray:
        """The (R*d) x (C*d) matrix with block (r, c) at position (r, c)."""
        R, C, d, _ = self.blocks.shape
        return self.blocks.transpose(0, 2, 1, 3).reshape(R * d, C * d)

    @classmethod
    def from_scalar(cls, x: np.ndarray) -> "BlockMatrix":
        x = np.asarray(x, dtype=complex)
        return cls(x[:, :, None, None])

    @classmethod
    def from_dict(cls, blocks: dict, shape: tuple[int, int] | None = None) -> "BlockMatrix":
        if not blocks:
            raise MalformedInputError("need at least one block")
        dims = {np.shape(b) for b in blocks.values()}
        if len(dims) != 1:
            raise MalformedInputError(f"blocks have differing shapes {sorted(dims)}")
        d = dims.pop()[0]
        if shape is None:
            shape = (max(r for r, _ in blocks) + 1, max(c for _, c in blocks) + 1)
        arr = np.zeros(shape + (d, d), dtype=complex)
        for (r, c), b in blocks.items():
            arr[r, c] = b
        return cls(arr)

    def support_ok(self, support: BipartiteSet) -> bool:
        mask = support_mask(support, self.shape)
        return not np.any(np.abs(self.blocks[~mask]) > 0)


def support_mask(I: BipartiteSet, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Boolean matrix that is True exactly on the coordinates of I."""
    if shape is None:
        shape = (max(I.rows, default=-1) + 1, max(I.cols, default=-1) + 1)
    mask = np.zeros(shape, dtype=bool)
    if len(I):
        r, c = np.array(I.edge_list).T
        mask[r, c] = True
    return mask


def supported_on(x: np.ndarray, I: BipartiteSet) -> bool:
    x = np.asarray(x)
    mask = support_mask(I, x.shape)
    return not np.any(x[~mask] != 0)


def unit_matrix(q: tuple[int, int], shape: tuple[int, int]) -> np.ndarray:
    """The elementary matrix e_q."""
    e = np.zeros(shape, dtype=complex)
    e[q] = 1.0
    return e


# ---------------------------------------------------------------------------
# Eigenvalues


def hermitian_eigenvalues(a, herm_tol: float = 1e-12, tol: float = 1e-13, max_sweeps: int = 100):
    """Eigenvalues of a Hermitian matrix, in descending order.

    Cyclic Jacobi: every off-diagonal entry is annihilated in turn by a
    2x2 unitary (a phase that makes the pivot real, then a real rotation)
    until the off-diagonal Frobenius norm drops below ``tol * ||a||_F``.
    """
    a = np.array(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    scale = np.linalg.norm(a)
    if n == 0 or scale == 0.0:
        return np.zeros(n)
    if np.linalg.norm(a - a.conj().T) > herm_tol * scale:
        raise DomainError("matrix is not Hermitian")
    a = (a + a.conj().T) / 2

    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off < tol * scale:
            return np.sort(np.diag(a).real)[::-1]
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                ag = abs(g)
                if ag < 1e-300:
                    continue
                ph = g / ag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * ag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                v = np.array([[c, s], [-s * ph.conjugate(), c * ph.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ v
                a[idx, :] = v.conj().T @ a[idx, :]
                a[q, p] = 0.0
                a[p, q] = 0.0
    raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def _gram(x: np.ndarray) -> np.ndarray:
    """x* x or x x*, whichever is smaller; both carry the squared singular values."""
    return x.conj().T @ x if x.shape[1] <= x.shape[0] else x @ x.conj().T


def singular_values(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.size == 0:
        return np.zeros(0)
    lam = hermitian_eigenvalues(_gram(x))
    return np.sqrt(np.clip(lam, 0.0, None))


# ---------------------------------------------------------------------------
# Norms


def _as_matrix(x) -> np.ndarray:
    if isinstance(x, BlockMatrix):
        return x.assemble()
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2:
        raise DomainError(f"expected a matrix, got shape {x.shape}")
    return x


def schatten_norm(x, p: float) -> float:
    """(sum of sigma_i^p)^(1/p), from the eigenvalues of x* x."""
    if p < 1:
        raise DomainError(f"Schatten exponent must be >= 1, got {p}")
    sv = singular_values(_as_matrix(x))
    return float(np.sum(sv**p) ** (1.0 / p))


def schatten_norm_even_trace(x, s: int) -> float:
    """||x||_{2s} = trace((x* x)^s)^(1/2s) by repeated multiplication."""
    if s < 1 or int(s) != s:
        raise DomainError(f"need an integer s >= 1, got {s}")
    x = _as_matrix(x)
    if x.size == 0:
        return 0.0
    g = _gram(x)
    m = g
    for _ in range(int(s) - 1):
        m = m @ g
    return float(max(np.trace(m).real, 0.0) ** (1.0 / (2 * s)))


def column_mixed(x, p: float) -> float:
    """(sum_c (sum_r |x_rc|^2)^(p/2))^(1/p)"""
    x = np.asarray(x)
    return float(np.sum(np.sum(np.abs(x) ** 2, axis=0) ** (p / 2)) ** (1.0 / p))


def row_mixed(x, p: float) -> float:
    x = np.asarray(x)
    return float(np.sum(np.sum(np.abs(x) ** 2, axis=1) ** (p / 2)) ** (1.0 / p))


def triple_norm(x, p: float) -> float:
    """Max of the column-wise and row-wise l2-then-lp norms (p >= 2)."""
    if p < 2:
        raise DomainError(f"mixed norm needs p >= 2, got {p}")
    x = _as_matrix(x)
    return max(column_mixed(x, p), row_mixed(x, p))


def triple_norm_operator_valued(X: BlockMatrix, p: float) -> float:
    """Operator-valued mixed norm.

    Column branch: sum_c ||(sum_r x_rc* x_rc)^(1/2)||_p^p; row branch:
    sum_r ||(sum_c x_rc x_rc*)^(1/2)||_p^p.
    """
    if p < 2:
        raise DomainError(f"mixed norm needs p >= 2, got {p}")
    if not isinstance(X, BlockMatrix):
        X = BlockMatrix.from_scalar(X)
    b = X.blocks
    col_sq = np.einsum("rcji,rcjk->cik", b.conj(), b)
    row_sq = np.einsum("rcij,rckj->rik", b, b.conj())

    def branch(squares):
        total = 0.0
        for h in squares:
            lam = np.clip(hermitian_eigenvalues(h), 0.0, None)
            total += float(np.sum(lam ** (p / 2)))
        return total

    return max(branch(col_sq), branch(row_sq)) ** (1.0 / p)


def size_lemma_lower_bound(x, p_dual: float, support: BipartiteSet) -> float:
    """Degree-weighted lower bound for the dual mixed norm on a support I'.

    (sum over (r, c) in I' of (max(d(c), d(r))^(1/2 - 1/p') |x_rc|)^p')^(1/p'),
    with degrees taken inside I'.
    """
    if not 1 <= p_dual <= 2:
        raise DomainError(f"dual exponent must lie in [1, 2], got {p_dual}")
    x = np.asarray(x)
    total = 0.0
    for r, c in support.edge_list:
        d = max(degree(support, col(c)), degree(support, row(r)))
        total += (d ** (0.5 - 1.0 / p_dual) * abs(x[r, c])) ** p_dual
    return total ** (1.0 / p_dual)


def dual_triple_norm_upper(x, p_dual: float, alpha, beta, atol: float = 1e-12) -> float:
    """Upper bound on the dual mixed norm from a split x = alpha + beta."""
    if not 1 <= p_dual <= 2:
        raise DomainError(f"dual exponent must lie in [1, 2], got {p_dual}")
    x, alpha, beta = (np.asarray(a, dtype=complex) for a in (x, alpha, beta))
    if alpha.shape != x.shape or beta.shape != x.shape:
        raise DomainError("decomposition shapes do not match x")
    if np.max(np.abs(alpha + beta - x), initial=0.0) > atol:
        raise DomainError("alpha + beta does not reproduce x")
    return column_mixed(alpha, p_dual) + row_mixed(beta, p_dual)


# ---------------------------------------------------------------------------
# Matrix coordinate text format


def parse_matrix(text: str):
    """Parse ``dims`` header plus ``r c re im`` (or ``r c i j re im``) lines."""
    shape = None
    d = None
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "dims":
                if len(parts) == 3:
                    shape = (int(parts[1]), int(parts[2]))
                elif len(parts) == 5 and parts[3] == "blockdim":
                    shape, d = (int(parts[1]), int(parts[2])), int(parts[4])
                else:
                    raise ValueError
                continue
            width = 4 if d is None else 6
            if shape is None or len(parts) != width:
                raise ValueError
            idx = tuple(int(v) for v in parts[: width - 2])
            entries.append((idx, complex(float(parts[-2]), float(parts[-1]))))
        except ValueError:
            raise MalformedInputError(f"line {lineno}: cannot parse {raw!r}") from None
    if shape is None:
        raise MalformedInputError("missing dims header")
    arr = np.zeros(shape if d is None else shape + (d, d), dtype=complex)
    try:
        for idx, v in entries:
            if min(idx) < 0:
                raise IndexError
            arr[idx] = v
    except IndexError:
        raise MalformedInputError(f"entry {idx} outside the declared dims") from None
    return arr if d is None else BlockMatrix(arr)


def format_matrix(x) -> str:
    if isinstance(x, BlockMatrix):
        R, C, d, _ = x.blocks.shape
        lines = [f"dims {R} {C} blockdim {d}"]
        arr = x.blocks
    else:
        arr = np.asarray(x, dtype=complex)
        lines = [f"dims {arr.shape[0]} {arr.shape[1]}"]
    for idx in zip(*np.nonzero(arr)):
        v = arr[idx]
        lines.append(" ".join(str(int(i)) for i in idx) + f" {float(v.real)!r} {float(v.imag)!r}")
    return "\n".join(lines) + "\n"


def read_matrix(path: str | Path):
    return parse_matrix(Path(path).read_text())
