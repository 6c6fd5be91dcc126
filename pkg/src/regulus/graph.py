"""Fixed-order simple graphs stored as per-vertex bit rows, plus graph6 I/O.

Vertices are ``0..n-1``. A vertex subset is a plain ``int`` bitmask
(bit ``v`` set means ``v`` is a member); the alias :data:`VertexSet` is used
in signatures to make that explicit.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from ._bits import words_for

MAX_ORDER = 512

VertexSet = int


class GraphError(ValueError):
    """Raised for malformed graph input."""


def vertex_set(vertices: Iterable[int]) -> VertexSet:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def members(mask: VertexSet) -> list[int]:
    """Ascending vertex indices of ``mask``."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True)
class Graph:
    order: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.order <= MAX_ORDER:
            raise GraphError(f"order must be in 1..{MAX_ORDER}, got {self.order}")
        if len(self.rows) != self.order:
            raise GraphError("need exactly one row per vertex")

    def __repr__(self):
        return f"Graph(order={self.order}, edges={self.num_edges})"

    @property
    def full(self) -> VertexSet:
        return (1 << self.order) - 1

    def adjacent(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def degrees(self) -> list[int]:
        return [r.bit_count() for r in self.rows]

    @property
    def num_edges(self) -> int:
        return sum(self.degrees()) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for u, row in enumerate(self.rows):
            for v in members(row >> (u + 1)):
                yield u, u + 1 + v

    def neighbors(self, v: int) -> list[int]:
        return members(self.rows[v])

    def to_words(self) -> np.ndarray:
        """Rows as a ``(n, W)`` uint64 array for the numba kernels."""
        w = words_for(self.order)
        out = np.zeros((self.order, w), dtype=np.uint64)
        mask = (1 << 64) - 1
        for v, row in enumerate(self.rows):
            for j in range(w):
                out[v, j] = (row >> (64 * j)) & mask
        return out

    @classmethod
    def from_words(cls, words: np.ndarray, order: int | None = None) -> "Graph":
        n = words.shape[0] if order is None else order
        rows = []
        for v in range(n):
            r = 0
            for j in range(words.shape[1]):
                r |= int(words[v, j]) << (64 * j)
            rows.append(r)
        return cls(n, tuple(rows))

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph in which vertex ``v`` becomes ``perm[v]``."""
        rows = [0] * self.order
        for v, row in enumerate(self.rows):
            r = 0
            for u in members(row):
                r |= 1 << perm[u]
            rows[perm[v]] = r
        return Graph(self.order, tuple(rows))


def _check_symmetric(n: int, rows: Sequence[int]) -> None:
    full = (1 << n) - 1
    for v, row in enumerate(rows):
        if row & ~full:
            raise GraphError(f"row {v} has bits beyond the order")
        if row >> v & 1:
            raise GraphError(f"loop at vertex {v}")
        for u in members(row):
            if not rows[u] >> v & 1:
                raise GraphError(f"asymmetric adjacency between {u} and {v}")


def from_rows(rows: Sequence[int]) -> Graph:
    """Validate raw bit rows and wrap them."""
    rows = tuple(int(r) for r in rows)
    _check_symmetric(len(rows), rows)
    return Graph(len(rows), rows)


def build(order: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Graph of the given order with exactly the listed edges."""
    if not 1 <= order <= MAX_ORDER:
        raise GraphError(f"order must be in 1..{MAX_ORDER}, got {order}")
    rows = [0] * order
    for u, v in edges:
        if not (0 <= u < order and 0 <= v < order):
            raise GraphError(f"edge ({u}, {v}) has an endpoint out of range")
        if u == v:
            raise GraphError(f"loop edge at vertex {u}")
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return Graph(order, tuple(rows))


def empty(n: int) -> Graph:
    return Graph(n, (0,) * n)


def complete(n: int) -> Graph:
    full = (1 << n) - 1
    return Graph(n, tuple(full ^ (1 << v) for v in range(n)))


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    return build(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return build(n, [(i, i + 1) for i in range(n - 1)])


def complement(g: Graph) -> Graph:
    full = g.full
    return Graph(g.order, tuple(full ^ row ^ (1 << v) for v, row in enumerate(g.rows)))


def induced_subgraph(g: Graph, s: VertexSet) -> Graph:
    """Subgraph on ``s``, relabelled by ascending vertex index."""
    verts = members(s)
    if not verts:
        raise GraphError("induced subgraph of an empty vertex set")
    if verts[-1] >= g.order:
        raise GraphError("vertex set is not contained in the graph")
    pos = {v: i for i, v in enumerate(verts)}
    rows = []
    for v in verts:
        r = 0
        for u in members(g.rows[v] & s):
            r |= 1 << pos[u]
        rows.append(r)
    return Graph(len(verts), tuple(rows))


def add_vertex(g: Graph, u: VertexSet) -> Graph:
    """``G:U`` -- append vertex ``n`` joined to exactly ``u``."""
    n = g.order
    if u >> n:
        raise GraphError("join set is not contained in the graph")
    rows = [row | ((u >> v & 1) << n) for v, row in enumerate(g.rows)]
    rows.append(u)
    return Graph(n + 1, tuple(rows))


def delete_vertex(g: Graph, v: int) -> Graph:
    return induced_subgraph(g, g.full & ~(1 << v))


def lex_product(g: Graph, h: Graph) -> Graph:
    """Lexicographic product ``G[H]``; vertex ``(u, v)`` is ``u*|H| + v``."""
    n, m = g.order, h.order
    if n * m > MAX_ORDER:
        raise GraphError(f"product order {n * m} exceeds {MAX_ORDER}")
    block = (1 << m) - 1
    rows = []
    for u in range(n):
        outer = 0
        for w in members(g.rows[u]):
            outer |= block << (w * m)
        for v in range(m):
            rows.append(outer | (h.rows[v] << (u * m)))
    return Graph(n * m, tuple(rows))


def disjoint_union(parts: Sequence[Graph]) -> Graph:
    if not parts:
        raise GraphError("disjoint union of no graphs")
    total = sum(p.order for p in parts)
    if total > MAX_ORDER:
        raise GraphError(f"union order {total} exceeds {MAX_ORDER}")
    rows = []
    offset = 0
    for p in parts:
        rows.extend(r << offset for r in p.rows)
        offset += p.order
    return Graph(total, tuple(rows))


def join_sets(g: Graph, a: Iterable[int], b: Iterable[int]) -> Graph:
    """Add every edge between vertex lists ``a`` and ``b`` (disjoint)."""
    rows = list(g.rows)
    amask, bmask = vertex_set(a), vertex_set(b)
    if amask & bmask:
        raise GraphError("join sets must be disjoint")
    for v in members(amask):
        rows[v] |= bmask
    for v in members(bmask):
        rows[v] |= amask
    return Graph(g.order, tuple(rows))


# -- graph6 -----------------------------------------------------------------


def _encode_order(n: int) -> bytes:
    if n <= 62:
        return bytes([n + 63])
    return bytes([126, 63 + (n >> 12 & 63), 63 + (n >> 6 & 63), 63 + (n & 63)])


def g6_encode(g: Graph) -> str:
    """Standard graph6 string (no header, no newline)."""
    n = g.order
    out = bytearray(_encode_order(n))
    acc = 0
    nbits = 0
    for j in range(1, n):
        row = g.rows[j]
        for i in range(j):
            acc = acc << 1 | (row >> i & 1)
            nbits += 1
            if nbits == 6:
                out.append(acc + 63)
                acc = nbits = 0
    if nbits:
        out.append((acc << (6 - nbits)) + 63)
    return out.decode("ascii")


def g6_decode(text: str) -> Graph:
    s = text.strip("\r\n")
    if s.startswith(">>graph6<<"):
        s = s[10:]
    if not s:
        raise GraphError("empty graph6 string")
    data = s.encode("ascii", errors="replace")
    if any(c < 63 or c > 126 for c in data):
        raise GraphError("graph6 contains a non-printable or out-of-range byte")
    if data[0] == 126:
        if len(data) >= 2 and data[1] == 126:
            raise GraphError(f"graph6 order > {MAX_ORDER} unsupported")
        if len(data) < 4:
            raise GraphError("truncated graph6 order field")
        n = (data[1] - 63) << 12 | (data[2] - 63) << 6 | (data[3] - 63)
        body = data[4:]
    else:
        n = data[0] - 63
        body = data[1:]
    if not 1 <= n <= MAX_ORDER:
        raise GraphError(f"graph6 order {n} unsupported")
    nbits = n * (n - 1) // 2
    if len(body) != (nbits + 5) // 6:
        raise GraphError(f"graph6 body has length {len(body)}, expected {(nbits + 5) // 6}")
    bits = 0
    for c in body:
        bits = bits << 6 | (c - 63)
    pad = 6 * len(body) - nbits
    if bits & ((1 << pad) - 1):
        raise GraphError("graph6 padding bits are not zero")
    bits >>= pad
    rows = [0] * n
    pos = nbits - 1
    for j in range(1, n):
        for i in range(j):
            if bits >> pos & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            pos -= 1
    return Graph(n, tuple(rows))


def read_g6(lines: Iterable[str]) -> Iterator[Graph]:
    for line in lines:
        if line.strip():
            yield g6_decode(line)


def all_graphs(n: int) -> Iterator[Graph]:
    """Every labelled graph on ``n`` vertices (2^C(n,2) of them)."""
    pairs = list(combinations(range(n), 2))
    for code in range(1 << len(pairs)):
        rows = [0] * n
        for b, (u, v) in enumerate(pairs):
            if code >> b & 1:
                rows[u] |= 1 << v
                rows[v] |= 1 << u
        yield Graph(n, tuple(rows))
