"""Coordinate sets I in R x C viewed as bipartite graphs.

A set of matrix coordinates ``(r, c)`` is the edge set of a bipartite graph
whose vertex classes are the rows R and the columns C.  This module counts
trails (walks with pairwise distinct edges) between two vertices, takes the
supremum of those counts over all endpoint pairs and looks for circuits
(closed trails) of a given length.

Vertices carry their class: ``Vertex("r", 3)`` is row 3, ``Vertex("c", 3)``
is column 3, and the two are different vertices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from .errors import DomainError, MalformedInputError, ResourceLimitError

ROW = "r"
COL = "c"

DEFAULT_EXPANSION_LIMIT = 10**8


class Vertex(NamedTuple):
    side: str
    id: int

    def __repr__(self):
        return f"{self.side}{self.id}"


def row(i: int) -> Vertex:
    return Vertex(ROW, i)


def col(j: int) -> Vertex:
    return Vertex(COL, j)


def _other(side: str) -> str:
    return COL if side == ROW else ROW


def _check_side(side: str) -> str:
    if side not in (ROW, COL):
        raise DomainError(f"vertex class must be {ROW!r} or {COL!r}, got {side!r}")
    return side


@dataclass(frozen=True)
class BipartiteSet:
    """A finite set of coordinates, equivalently a bipartite graph.

    ``rows`` and ``cols`` are the declared vertex ids (sorted, may contain
    isolated vertices); ``edges`` is a frozenset of ``(r, c)`` pairs.
    """

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        rows = tuple(sorted(set(int(r) for r in self.rows)))
        cols = tuple(sorted(set(int(c) for c in self.cols)))
        edges = frozenset((int(r), int(c)) for r, c in self.edges)
        if any(i < 0 for i in rows) or any(j < 0 for j in cols):
            raise MalformedInputError("vertex ids must be non-negative")
        rs, cs = set(rows), set(cols)
        for r, c in edges:
            if r not in rs or c not in cs:
                raise MalformedInputError(f"edge {(r, c)} has an undeclared endpoint")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "edges", edges)

    def __len__(self):
        return len(self.edges)

    def __contains__(self, q):
        return tuple(q) in self.edges

    def __iter__(self):
        return iter(self.edge_list)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.cols)

    @property
    def n_vertices(self) -> int:
        return len(self.rows) + len(self.cols)

    @cached_property
    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def vertices(self, side: str | None = None) -> list[Vertex]:
        if side is None:
            return [row(i) for i in self.rows] + [col(j) for j in self.cols]
        _check_side(side)
        ids = self.rows if side == ROW else self.cols
        return [Vertex(side, i) for i in ids]

    def has_vertex(self, v: Vertex) -> bool:
        return v in self._index

    def transpose(self) -> "BipartiteSet":
        """The transposed set {(c, r) : (r, c) in I}."""
        return BipartiteSet(self.cols, self.rows, frozenset((c, r) for r, c in self.edges))

    def union(self, other: "BipartiteSet") -> "BipartiteSet":
        return BipartiteSet(
            self.rows + other.rows, self.cols + other.cols, self.edges | other.edges
        )

    def add_edges(self, pairs: Iterable[tuple[int, int]]) -> "BipartiteSet":
        pairs = [(int(r), int(c)) for r, c in pairs]
        return BipartiteSet(
            self.rows + tuple(r for r, _ in pairs),
            self.cols + tuple(c for _, c in pairs),
            self.edges | frozenset(pairs),
        )

    # Array-backed adjacency: rows take indices 0..n_rows-1, columns follow.

    @cached_property
    def _index(self) -> dict[Vertex, int]:
        idx = {row(i): k for k, i in enumerate(self.rows)}
        off = len(self.rows)
        idx.update({col(j): off + k for k, j in enumerate(self.cols)})
        return idx

    @cached_property
    def _labels(self) -> list[Vertex]:
        return self.vertices()

    @cached_property
    def _adjacency(self) -> list[list[tuple[int, int]]]:
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n_vertices)]
        for e, (r, c) in enumerate(self.edge_list):
            a, b = self._index[row(r)], self._index[col(c)]
            adj[a].append((b, e))
            adj[b].append((a, e))
        for nbrs in adj:
            nbrs.sort()
        return adj

    def _vertex_index(self, v: Vertex) -> int:
        v = Vertex(_check_side(v[0]), int(v[1]))
        try:
            return self._index[v]
        except KeyError:
            raise DomainError(f"unknown vertex {v!r}") from None


def from_edge_list(
    pairs: Iterable[Sequence[int]], rows: Iterable[int] = (), cols: Iterable[int] = ()
) -> BipartiteSet:
    """Build a set from ``(r, c)`` pairs; duplicates are merged.

    The vertex classes are the projections of the pairs, plus any extra ids
    passed in ``rows``/``cols`` (isolated vertices).
    """
    clean = []
    for pair in pairs:
        if len(pair) != 2:
            raise MalformedInputError(f"expected a pair, got {pair!r}")
        r, c = pair
        if int(r) != r or int(c) != c or r < 0 or c < 0:
            raise MalformedInputError(f"ids must be non-negative integers, got {pair!r}")
        clean.append((int(r), int(c)))
    rows, cols = tuple(rows), tuple(cols)
    if any(i < 0 for i in rows + cols):
        raise MalformedInputError("vertex ids must be non-negative")
    return BipartiteSet(
        rows + tuple(r for r, _ in clean), cols + tuple(c for _, c in clean), frozenset(clean)
    )


def induced_subgraph(G: BipartiteSet, rows: Iterable[int], cols: Iterable[int]) -> BipartiteSet:
    """I' = I intersected with R' x C'."""
    rs, cs = set(rows), set(cols)
    missing = [row(i) for i in rs - set(G.rows)] + [col(j) for j in cs - set(G.cols)]
    if missing:
        raise DomainError(f"unknown vertices {sorted(missing)}")
    return BipartiteSet(
        tuple(rs), tuple(cs), frozenset((r, c) for r, c in G.edges if r in rs and c in cs)
    )


def degree(G: BipartiteSet, v: Vertex) -> int:
    return len(G._adjacency[G._vertex_index(v)])


# ---------------------------------------------------------------------------
# Trails


@dataclass(frozen=True)
class Trail:
    vertices: tuple[Vertex, ...]
    start_class: str

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def edges(self) -> list[tuple[int, int]]:
        """Traversed edges as (r, c) coordinates, in order."""
        out = []
        for a, b in zip(self.vertices, self.vertices[1:]):
            r, c = (a, b) if a.side == ROW else (b, a)
            out.append((r.id, c.id))
        return out


class _Budget:
    __slots__ = ("left", "limit")

    def __init__(self, limit):
        self.limit = limit
        self.left = limit

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise ResourceLimitError(f"trail search exceeded {self.limit} node expansions")


def _dfs(adj, start, s, used, budget, visit, path=None):
    """Depth-first walk over unused edges; ``visit(end, path)`` at depth s."""
    if path is None:
        path = [start]

    def rec(v, depth):
        if depth == s:
            visit(v, path)
            return
        for w, e in adj[v]:
            if used[e]:
                continue
            budget.spend()
            used[e] = True
            path.append(w)
            rec(w, depth + 1)
            path.pop()
            used[e] = False

    rec(start, 0)


def _endpoint_counts(G: BipartiteSet, start: int, s: int, limit: int) -> dict[int, int]:
    counts: dict[int, int] = {}

    def visit(v, _path):
        counts[v] = counts.get(v, 0) + 1

    _dfs(G._adjacency, start, s, [False] * len(G), _Budget(limit), visit)
    return counts


def _check_trail_args(G: BipartiteSet, v0: Vertex, s: int, start_class: str) -> int:
    _check_side(start_class)
    if s < 1:
        raise DomainError(f"trail length must be >= 1, got {s}")
    if v0[0] != start_class:
        raise DomainError(f"start vertex {v0!r} is not in class {start_class!r}")
    return G._vertex_index(v0)


def _end_class(start_class: str, s: int) -> str:
    return start_class if s % 2 == 0 else _other(start_class)


def count_trails(
    G: BipartiteSet,
    v0: Vertex,
    vs: Vertex,
    s: int,
    start_class: str = COL,
    limit: int = DEFAULT_EXPANSION_LIMIT,
) -> int:
    """Number of trails (v0, ..., vs) of length s with pairwise distinct edges.

    With ``start_class="c"`` this is the Rudin number c_s(I; v0, vs), with
    ``"r"`` it is r_s(I; v0, vs).  An endpoint in the wrong class for the
    parity of s simply gives 0.
    """
    start = _check_trail_args(G, v0, s, start_class)
    if vs[0] != _end_class(start_class, s):
        return 0
    target = G._vertex_index(vs)
    count = 0

    def visit(v, _path):
        nonlocal count
        if v == target:
            count += 1

    _dfs(G._adjacency, start, s, [False] * len(G), _Budget(limit), visit)
    return count


def enumerate_trails(
    G: BipartiteSet,
    v0: Vertex,
    vs: Vertex,
    s: int,
    start_class: str = COL,
    limit: int = DEFAULT_EXPANSION_LIMIT,
) -> list[Trail]:
    start = _check_trail_args(G, v0, s, start_class)
    if vs[0] != _end_class(start_class, s):
        return []
    target = G._vertex_index(vs)
    labels = G._labels
    out = []

    def visit(v, path):
        if v == target:
            out.append(Trail(tuple(labels[k] for k in path), start_class))

    _dfs(G._adjacency, start, s, [False] * len(G), _Budget(limit), visit)
    return out


@dataclass(frozen=True)
class RudinReport:
    """Trail counts over all admissible endpoint pairs.

    ``counts`` only stores pairs with a positive count; use :meth:`count`
    for the zero default.
    """

    s: int
    start_class: str
    counts: dict
    sup: int
    witness: tuple[Vertex, Vertex] | None

    def count(self, v0: Vertex, vs: Vertex) -> int:
        return self.counts.get((v0, vs), 0)


def rudin_sup(
    G: BipartiteSet, s: int, start_class: str = COL, limit: int = DEFAULT_EXPANSION_LIMIT
) -> RudinReport:
    """sup over (v0, vs) of c_s (or r_s), with the lexicographically first argmax."""
    _check_side(start_class)
    if s < 1:
        raise DomainError(f"trail length must be >= 1, got {s}")
    end_class = _end_class(start_class, s)
    labels = G._labels
    counts = {}
    for v0 in G.vertices(start_class):
        for end, k in _endpoint_counts(G, G._index[v0], s, limit).items():
            if labels[end].side == end_class:
                counts[(v0, labels[end])] = k
    sup, witness = 0, None
    for pair in sorted(counts):
        if counts[pair] > sup:
            sup, witness = counts[pair], pair
    return RudinReport(s, start_class, counts, sup, witness)


# ---------------------------------------------------------------------------
# Circuits


def find_circuit(
    G: BipartiteSet, p: int, limit: int = DEFAULT_EXPANSION_LIMIT
) -> tuple[Vertex, ...] | None:
    """A circuit (closed trail) of length p, or None.

    The search is anchored at the smallest vertex of the circuit: from each
    vertex v only vertices with index >= v are visited.  Returns the vertex
    sequence (v1, ..., vp); the closing edge is {vp, v1}.
    """
    if p < 2 or p % 2:
        raise DomainError(f"circuit length must be a positive even integer, got {p}")
    adj = G._adjacency
    used = [False] * len(G)
    budget = _Budget(limit)
    labels = G._labels

    for anchor in range(G.n_vertices):
        path = [anchor]

        def rec(v, depth):
            if depth == p:
                return v == anchor
            for w, e in adj[v]:
                if used[e] or w < anchor:
                    continue
                if depth == p - 1 and w != anchor:
                    continue
                budget.spend()
                used[e] = True
                path.append(w)
                if rec(w, depth + 1):
                    return True
                path.pop()
                used[e] = False
            return False

        if rec(anchor, 0):
            return tuple(labels[k] for k in path[:-1])
    return None


def has_circuit(G: BipartiteSet, p: int, limit: int = DEFAULT_EXPANSION_LIMIT) -> bool:
    return find_circuit(G, p, limit) is not None


# ---------------------------------------------------------------------------
# Edge-list text format


def parse_edge_list(text: str) -> BipartiteSet:
    """Parse ``r c`` lines; ``#`` comments; optional ``vertices R C`` header."""
    pairs = []
    rows: tuple[int, ...] = ()
    cols: tuple[int, ...] = ()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "vertices":
                if len(parts) != 3:
                    raise ValueError
                rows, cols = tuple(range(int(parts[1]))), tuple(range(int(parts[2])))
                continue
            if len(parts) != 2:
                raise ValueError
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise MalformedInputError(f"line {lineno}: cannot parse {raw!r}") from None
    return from_edge_list(pairs, rows, cols)


def format_edge_list(G: BipartiteSet) -> str:
    lines = []
    dense = G.rows == tuple(range(G.n_rows)) and G.cols == tuple(range(G.n_cols))
    if dense:
        lines.append(f"vertices {G.n_rows} {G.n_cols}")
    else:
        lines.append(f"# rows {' '.join(map(str, G.rows))}")
        lines.append(f"# cols {' '.join(map(str, G.cols))}")
    lines.extend(f"{r} {c}" for r, c in G.edge_list)
    return "\n".join(lines) + "\n"


def read_edge_list(path: str | Path) -> BipartiteSet:
    return parse_edge_list(Path(path).read_text())


def write_edge_list(G: BipartiteSet, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(G))
