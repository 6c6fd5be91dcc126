"""Induced regular subgraph oracles and the blocking-pair machinery.

A blocking pair ``(U1, U2)`` says: if a new vertex is joined to exactly
``U2`` inside ``U1`` then ``U1`` plus the new vertex induces a regular
graph.  The extension sets of ``G`` are the subsets ``U`` that avoid every
blocking pair, i.e. ``U & U1 != U2`` for all of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import comb

import numpy as np
from numba import njit

from ._bits import bit, has, popcount
from .graph import Graph, VertexSet, add_vertex, members

ENGINE_MAX_ORDER = 64


class Mode(str, Enum):
    EXACT = "exact"
    AT_LEAST = "at_least"

    @classmethod
    def parse(cls, text: "str | Mode") -> "Mode":
        if isinstance(text, Mode):
            return text
        key = text.lower().replace("-", "_")
        if key in ("exact", "eq", "="):
            return cls.EXACT
        if key in ("at_least", "atleast", "ge", ">="):
            return cls.AT_LEAST
        raise ValueError(f"unknown mode {text!r}")


class BudgetExceeded(RuntimeError):
    """A search hit its node-visit budget before finishing."""

    def __init__(self, visited: int):
        super().__init__(f"search budget exhausted after {visited} nodes")
        self.visited = visited


# -- exhaustive search ----------------------------------------------------------


@njit(cache=True)
def _evaluate(rows, S, sz, deg, start, kmin, kmax, after, remaining):
    """1 = regular set found, 0 = prune, 2 = keep growing."""
    W = rows.shape[1]
    if sz == 0:
        return 2 if remaining[0] >= kmin else 0
    lo = 0
    d0 = deg[S[0]]
    allsame = True
    for t in range(sz):
        c = deg[S[t]]
        if c > lo:
            lo = c
        if c != d0:
            allsame = False
    if allsame and sz >= kmin:
        return 1
    if sz >= kmax or sz + remaining[start] < kmin:
        return 0
    rmax = kmax - sz
    for t in range(sz):
        u = S[t]
        av = 0
        for j in range(W):
            av += popcount(rows[u, j] & after[start, j])
        if av > rmax:
            av = rmax
        if deg[u] + av < lo:
            return 0
    return 2


@njit(cache=True)
def regular_search_kernel(rows, n, kmin, kmax, forced, budget):
    """Look for ``S`` with ``kmin <= |S| <= kmax``, ``forced`` in ``S``, ``G[S]`` regular.

    Subsets grow in ascending vertex order; a partial set is dropped once
    some member can no longer reach the largest degree already present.
    Returns ``(status, size, members, nodes)`` with status 1 found, 0 none,
    -1 budget exhausted.
    """
    W = rows.shape[1]
    nf = forced.shape[0]
    isforced = np.zeros(n, np.bool_)
    for i in range(nf):
        isforced[forced[i]] = True
    # after[i]: non-forced vertices with index >= i
    after = np.zeros((n + 1, W), np.uint64)
    remaining = np.zeros(n + 1, np.int64)
    for i in range(n - 1, -1, -1):
        for j in range(W):
            after[i, j] = after[i + 1, j]
        remaining[i] = remaining[i + 1]
        if not isforced[i]:
            after[i, i >> 6] |= bit(i & 63)
            remaining[i] += 1

    S = np.empty(n, np.int64)
    deg = np.zeros(n, np.int64)
    nextc = np.zeros(n + 1, np.int64)
    sz = 0
    for i in range(nf):
        w = forced[i]
        for t in range(sz):
            if has(rows, S[t], w):
                deg[S[t]] += 1
                deg[w] += 1
        S[sz] = w
        sz += 1
    base = sz
    nodes = 1
    st = _evaluate(rows, S, sz, deg, 0, kmin, kmax, after, remaining)
    if st == 1:
        return 1, sz, S, nodes
    if st == 0:
        return 0, 0, S, nodes
    nextc[sz] = 0
    while True:
        c = nextc[sz]
        while c < n and isforced[c]:
            c += 1
        if c >= n:
            if sz == base:
                return 0, 0, S, nodes
            sz -= 1
            w = S[sz]
            for t in range(sz):
                if has(rows, S[t], w):
                    deg[S[t]] -= 1
            deg[w] = 0
            continue
        nextc[sz] = c + 1
        for t in range(sz):
            if has(rows, S[t], c):
                deg[S[t]] += 1
                deg[c] += 1
        S[sz] = c
        sz += 1
        nextc[sz] = c + 1
        nodes += 1
        if budget > 0 and nodes > budget:
            return -1, 0, S, nodes
        st = _evaluate(rows, S, sz, deg, c + 1, kmin, kmax, after, remaining)
        if st == 1:
            return 1, sz, S, nodes
        if st == 0:
            sz -= 1
            for t in range(sz):
                if has(rows, S[t], c):
                    deg[S[t]] -= 1
            deg[c] = 0


def _search(g: Graph, kmin: int, kmax: int, forced=(), budget: int = 0):
    if kmin < 1:
        raise ValueError("k must be at least 1")
    kmax = min(kmax, g.order)
    if kmin > kmax:
        return None, 0
    status, size, verts, nodes = regular_search_kernel(
        g.to_words(), g.order, kmin, kmax, np.array(list(forced), np.int64), budget
    )
    if status < 0:
        raise BudgetExceeded(int(nodes))
    if status == 0:
        return None, int(nodes)
    mask = 0
    for v in verts[:size]:
        mask |= 1 << int(v)
    return mask, int(nodes)


def regular_degree(g: Graph) -> int | None:
    degs = g.degrees()
    return degs[0] if all(d == degs[0] for d in degs) else None


def find_induced_regular(g: Graph, k: int, mode: Mode | str = Mode.EXACT,
                         budget: int = 0) -> VertexSet | None:
    """A vertex set inducing a regular subgraph of order ``k`` (or ``>= k``).

    ``budget`` caps visited search nodes (0 = unlimited) and raises
    :class:`BudgetExceeded` when hit.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    mode = Mode.parse(mode)
    if k > g.order:
        return None
    if k <= 2:
        return (1 << k) - 1
    kmax = k if mode is Mode.EXACT else g.order
    return _search(g, k, kmax, budget=budget)[0]


def find_regular_through(g: Graph, v: int, k: int, mode: Mode | str = Mode.EXACT,
                         budget: int = 0) -> VertexSet | None:
    """Like :func:`find_induced_regular` but the set must contain ``v``."""
    mode = Mode.parse(mode)
    kmax = k if mode is Mode.EXACT else g.order
    return _search(g, k, kmax, forced=(v,), budget=budget)[0]


def in_req(g: Graph, k: int) -> bool:
    """No induced regular subgraph of order exactly ``k``."""
    return find_induced_regular(g, k, Mode.EXACT) is None


def in_rge(g: Graph, k: int) -> bool:
    """No induced regular subgraph of order at least ``k``."""
    return find_induced_regular(g, k, Mode.AT_LEAST) is None


def in_family(g: Graph, k: int, mode: Mode | str) -> bool:
    return in_req(g, k) if Mode.parse(mode) is Mode.EXACT else in_rge(g, k)


# -- blocking pairs and extension sets -------------------------------------------


@njit(cache=True)
def _classify(rows, u1, j):
    """``U2`` for a size-``j`` set ``u1``, or -1 when it blocks nothing."""
    lo = j
    hi = -1
    x = u1
    while x:
        low = x & (~x + np.uint64(1))
        v = popcount(low - np.uint64(1))
        c = popcount(rows[v, 0] & u1)
        if c < lo:
            lo = c
        if c > hi:
            hi = c
        x ^= low
    if hi == 0:
        return np.uint64(0), True
    if lo == j - 1:
        return u1, True
    if hi == lo + 1:
        u2 = np.uint64(0)
        x = u1
        while x:
            low = x & (~x + np.uint64(1))
            v = popcount(low - np.uint64(1))
            if popcount(rows[v, 0] & u1) == lo:
                u2 |= low
            x ^= low
        if popcount(u2) == lo + 1:
            return u2, True
    return np.uint64(0), False


@njit(cache=True)
def pairs_kernel(rows, n, jmin, jmax, touching):
    """All blocking pairs with ``jmin <= |U1| <= jmax``.

    With ``touching >= 0`` only sets containing that vertex are visited.
    """
    base = np.empty(n, np.int64)
    m = 0
    for v in range(n):
        if v != touching:
            base[m] = v
            m += 1
    fixed = np.uint64(0)
    shift = 0
    if touching >= 0:
        fixed = bit(touching)
        shift = 1
    cap = 64
    out1 = np.empty(cap, np.uint64)
    out2 = np.empty(cap, np.uint64)
    cnt = 0
    for j in range(jmin, jmax + 1):
        r = j - shift
        if r < 0 or r > m:
            continue
        # Gosper's hack over r-subsets of the m base vertices
        if r == 0:
            x = np.uint64(0)
        else:
            x = (np.uint64(1) << np.uint64(r)) - np.uint64(1)
        limit_bits = m
        while True:
            mask = fixed
            y = x
            while y:
                low = y & (~y + np.uint64(1))
                mask |= bit(base[popcount(low - np.uint64(1))])
                y ^= low
            u2, ok = _classify(rows, mask, j)
            if ok:
                if cnt == cap:
                    cap *= 2
                    n1 = np.empty(cap, np.uint64)
                    n2 = np.empty(cap, np.uint64)
                    n1[:cnt] = out1[:cnt]
                    n2[:cnt] = out2[:cnt]
                    out1 = n1
                    out2 = n2
                out1[cnt] = mask
                out2[cnt] = u2
                cnt += 1
            if r == 0:
                break
            c = x & (~x + np.uint64(1))
            rr = x + c
            x = (((rr ^ x) >> np.uint64(2)) // c) | rr
            if limit_bits < 64 and (x >> np.uint64(limit_bits)) != np.uint64(0):
                break
            if x == np.uint64(0):
                break
    return out1[:cnt], out2[:cnt]


@njit(cache=True)
def filter_kernel(cands, ncand, u1s, u2s, npairs, out):
    """Copy into ``out`` the candidates avoiding every pair; returns the count."""
    m = 0
    for i in range(ncand):
        u = cands[i]
        good = True
        for p in range(npairs):
            if (u & u1s[p]) == u2s[p]:
                good = False
                break
        if good:
            out[m] = u
            m += 1
    return m


def _size_range(k: int, n: int, mode: Mode) -> tuple[int, int]:
    return (k - 1, k - 1) if mode is Mode.EXACT else (k - 1, n)


@dataclass(frozen=True)
class BlockingPair:
    u1: VertexSet
    u2: VertexSet

    @property
    def shape(self) -> str:
        if self.u2 == 0:
            return "independent"
        if self.u2 == self.u1:
            return "clique"
        return "two-degree"


@dataclass(frozen=True)
class ExtensionFront:
    """All ``U`` with ``G:U`` in the family; ``level`` is the order of ``G``."""

    sets: tuple[VertexSet, ...]
    level: int

    def __len__(self):
        return len(self.sets)

    def __contains__(self, u):
        return u in self._lookup

    @property
    def _lookup(self):
        return frozenset(self.sets)


def _engine_words(g: Graph) -> np.ndarray:
    if g.order > ENGINE_MAX_ORDER - 1:
        raise ValueError(f"subset machinery supports orders below {ENGINE_MAX_ORDER}")
    return g.to_words()


def blocking_pairs(g: Graph, k: int, touching: int | None = None,
                   mode: Mode | str = Mode.EXACT) -> list[BlockingPair]:
    mode = Mode.parse(mode)
    if k < 3:
        raise ValueError("blocking pairs are defined for k >= 3")
    jmin, jmax = _size_range(k, g.order, mode)
    u1, u2 = pairs_kernel(_engine_words(g), g.order, jmin, jmax,
                          -1 if touching is None else touching)
    return [BlockingPair(int(a), int(b)) for a, b in zip(u1, u2)]


def extension_sets(g: Graph, prev: ExtensionFront | None = None, k: int = 3,
                   mode: Mode | str = Mode.EXACT) -> ExtensionFront:
    """Subsets ``U`` of ``V(G)`` such that ``G:U`` stays in the family.

    With ``prev`` (the front of ``G`` minus its last vertex) only sets of the
    form ``U`` or ``U + {last}`` with ``U`` in ``prev`` are candidates, and only
    pairs through the last vertex are checked.
    """
    mode = Mode.parse(mode)
    if k < 3:
        raise ValueError("extension sets are defined for k >= 3")
    n = g.order
    words = _engine_words(g)
    jmin, jmax = _size_range(k, n, mode)
    if prev is None:
        if n > 24:
            raise ValueError("refusing to scan 2^n subsets from scratch beyond n = 24")
        cands = np.arange(1 << n, dtype=np.uint64)
        u1, u2 = pairs_kernel(words, n, jmin, jmax, -1)
    else:
        if prev.level != n - 1:
            raise ValueError(f"front level {prev.level} does not match graph order {n}")
        old = np.array(prev.sets, dtype=np.uint64)
        cands = np.concatenate([old, old | np.uint64(1 << (n - 1))])
        u1, u2 = pairs_kernel(words, n, jmin, jmax, n - 1)
    out = np.empty(len(cands), np.uint64)
    m = filter_kernel(cands, len(cands), u1, u2, len(u1), out)
    return ExtensionFront(tuple(int(x) for x in out[:m]), n)


def add_and_check(g: Graph, u: VertexSet, k: int, mode: Mode | str = Mode.EXACT) -> Graph | None:
    """``G:U`` if no forbidden subgraph passes through the new vertex."""
    h = add_vertex(g, u)
    mode = Mode.parse(mode)
    if k <= 2:
        return None if h.order >= k else h
    hit = find_regular_through(h, g.order, k, mode)
    return None if hit is not None else h


def count_subsets(n: int, k: int) -> int:
    return comb(n, k)
