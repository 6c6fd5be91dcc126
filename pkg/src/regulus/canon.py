"""Canonical labelling, automorphism generators and orbits.

The canonical form is the least leaf of an individualisation-refinement
search tree.  Leaves are ordered first by the refinement trace along their
path and then by the relabelled adjacency rows; subtrees whose trace already
compares worse than the best leaf (and differs from the first path) are cut,
and siblings equivalent under automorphisms found so far are skipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from ._bits import bit, has, popcount
from .graph import Graph, VertexSet, g6_encode, members

Perm = tuple[int, ...]

_MIX = np.int64(1000003)


@njit(cache=True, inline="always")
def _mix(h, x):
    return h * _MIX + np.int64(x) + np.int64(1)


@njit(cache=True)
def refine_kernel(rows, n, lab, cstart, cend, qinit, nq0):
    """Equitable refinement in place; returns ``(trace, ncells)``.

    ``lab`` lists vertices by position, ``cend[s]`` is the end of the cell
    starting at position ``s`` and ``cstart[p]`` the start of the cell that
    holds position ``p``.  ``qinit[:nq0]`` are the starts of the initial
    splitter cells.
    """
    W = rows.shape[1]
    inq = np.zeros(n, np.bool_)
    queue = np.empty(n, np.int64)
    head = 0
    size = 0
    for i in range(nq0):
        s = qinit[i]
        if not inq[s]:
            queue[(head + size) % n] = s
            size += 1
            inq[s] = True
    cnt = np.zeros(n, np.int64)
    wmask = np.zeros(W, np.uint64)
    trace = np.int64(17)
    while size > 0:
        ws = queue[head]
        head = (head + 1) % n
        size -= 1
        inq[ws] = False
        we = cend[ws]
        for j in range(W):
            wmask[j] = 0
        for p in range(ws, we):
            v = lab[p]
            wmask[v >> 6] |= bit(v & 63)
        for v in range(n):
            c = 0
            for j in range(W):
                c += popcount(rows[v, j] & wmask[j])
            cnt[v] = c
        s = 0
        while s < n:
            e = cend[s]
            if e - s > 1:
                c0 = cnt[lab[s]]
                split = False
                for p in range(s + 1, e):
                    if cnt[lab[p]] != c0:
                        split = True
                        break
                if split:
                    for p in range(s + 1, e):
                        v = lab[p]
                        c = cnt[v]
                        q = p - 1
                        while q >= s and cnt[lab[q]] > c:
                            lab[q + 1] = lab[q]
                            q -= 1
                        lab[q + 1] = v
                    trace = _mix(trace, s)
                    p = s
                    while p < e:
                        c = cnt[lab[p]]
                        q = p
                        while q < e and cnt[lab[q]] == c:
                            q += 1
                        cend[p] = q
                        for r in range(p, q):
                            cstart[r] = p
                        trace = _mix(_mix(trace, c), q - p)
                        if not inq[p]:
                            queue[(head + size) % n] = p
                            size += 1
                            inq[p] = True
                        p = q
            s = e
    ncells = 0
    s = 0
    while s < n:
        ncells += 1
        s = cend[s]
    trace = _mix(trace, ncells)
    return trace, ncells


@njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def orbits_kernel(gens, ng, n):
    """Orbit representative (least vertex) of every vertex."""
    parent = np.arange(n)
    for g in range(ng):
        for v in range(n):
            a = _find(parent, v)
            b = _find(parent, gens[g, v])
            if a < b:
                parent[b] = a
            elif b < a:
                parent[a] = b
    for v in range(n):
        parent[v] = _find(parent, v)
    return parent


@njit(cache=True)
def _leaf_code(rows, n, lab, code):
    W = code.shape[1]
    for i in range(n):
        for j in range(W):
            code[i, j] = 0
        u = lab[i]
        for j in range(n):
            if has(rows, u, lab[j]):
                code[i, j >> 6] |= bit(j & 63)


@njit(cache=True)
def _cmp_code(a, b):
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            if a[i, j] < b[i, j]:
                return -1
            if a[i, j] > b[i, j]:
                return 1
    return 0


@njit(cache=True)
def _store_gen(gens, ng, gamma, n):
    for v in range(n):
        if gamma[v] != v:
            break
    else:
        return gens, ng
    if ng == gens.shape[0]:
        bigger = np.empty((2 * gens.shape[0], n), np.int64)
        bigger[:ng] = gens[:ng]
        gens = bigger
    gens[ng, :] = gamma
    return gens, ng + 1


@njit(cache=True)
def canon_kernel(rows, n, lab0, cend0):
    """Canonical search from an initial (unrefined) ordered partition.

    Returns ``(bestlab, bestcode, gens, ng, root_lab, root_cend)`` where
    ``bestlab[i]`` is the vertex given canonical label ``i``.
    """
    W = rows.shape[1]
    LAB = np.empty((n + 1, n), np.int64)
    CST = np.empty((n + 1, n), np.int64)
    CEN = np.empty((n + 1, n), np.int64)
    TRACE = np.zeros(n + 1, np.int64)
    NC = np.zeros(n + 1, np.int64)
    TC = np.empty((n + 1, n), np.int64)
    TCN = np.zeros(n + 1, np.int64)
    TI = np.zeros(n + 1, np.int64)
    TS = np.zeros(n + 1, np.int64)
    PATH = np.zeros(n + 1, np.int64)
    eqf = np.ones(n + 1, np.bool_)
    cmpb = np.zeros(n + 1, np.int64)
    firstpath = np.zeros(n + 1, np.int64)
    firsttrace = np.zeros(n + 1, np.int64)
    firstlab = np.zeros(n, np.int64)
    firstcode = np.zeros((n, W), np.uint64)
    firstdepth = 0
    bestpath = np.zeros(n + 1, np.int64)
    besttrace = np.zeros(n + 1, np.int64)
    bestlab = np.zeros(n, np.int64)
    bestcode = np.zeros((n, W), np.uint64)
    bestdepth = 0
    code = np.zeros((n, W), np.uint64)
    gamma = np.zeros(n, np.int64)
    gens = np.empty((max(4, n), n), np.int64)
    ng = 0

    qinit = np.empty(n, np.int64)
    nq = 0
    for p in range(n):
        LAB[0, p] = lab0[p]
        CEN[0, p] = cend0[p]
    s = 0
    while s < n:
        e = cend0[s]
        for p in range(s, e):
            CST[0, p] = s
        qinit[nq] = s
        nq += 1
        s = e
    TRACE[0], NC[0] = refine_kernel(rows, n, LAB[0], CST[0], CEN[0], qinit, nq)
    root_lab = LAB[0].copy()
    root_cend = CEN[0].copy()

    have_first = False
    d = 0
    entering = True
    while True:
        if entering:
            if d > 0:
                if have_first:
                    ef = eqf[d - 1] and d <= firstdepth and TRACE[d] == firsttrace[d]
                    eqf[d] = ef
                    cb = cmpb[d - 1]
                    if cb == 0:
                        if d > bestdepth:
                            cb = 1
                        elif TRACE[d] < besttrace[d]:
                            cb = -1
                        elif TRACE[d] > besttrace[d]:
                            cb = 1
                    cmpb[d] = cb
                    if (not ef) and cb > 0:
                        d -= 1
                        entering = False
                        continue
                else:
                    eqf[d] = True
                    cmpb[d] = 0
            if NC[d] == n:
                _leaf_code(rows, n, LAB[d], code)
                if not have_first:
                    have_first = True
                    firstdepth = d
                    bestdepth = d
                    for t in range(d):
                        firstpath[t] = PATH[t]
                        bestpath[t] = PATH[t]
                    for t in range(d + 1):
                        firsttrace[t] = TRACE[t]
                        besttrace[t] = TRACE[t]
                        eqf[t] = True
                        cmpb[t] = 0
                    firstlab[:] = LAB[d]
                    bestlab[:] = LAB[d]
                    firstcode[:, :] = code
                    bestcode[:, :] = code
                    d -= 1
                    entering = False
                    continue
                if eqf[d] and d == firstdepth and _cmp_code(code, firstcode) == 0:
                    for i in range(n):
                        gamma[LAB[d, i]] = firstlab[i]
                    gens, ng = _store_gen(gens, ng, gamma, n)
                    j = 0
                    while j < d and PATH[j] == firstpath[j]:
                        j += 1
                    if j < d and gamma[PATH[j]] == firstpath[j]:
                        d = j
                    else:
                        d -= 1
                    entering = False
                    continue
                cb = cmpb[d]
                if cb == 0:
                    if d < bestdepth:
                        cb = -1
                    else:
                        cb = _cmp_code(code, bestcode)
                if cb < 0:
                    bestdepth = d
                    for t in range(d):
                        bestpath[t] = PATH[t]
                    for t in range(d + 1):
                        besttrace[t] = TRACE[t]
                        cmpb[t] = 0
                    bestlab[:] = LAB[d]
                    bestcode[:, :] = code
                    d -= 1
                elif cb == 0:
                    for i in range(n):
                        gamma[LAB[d, i]] = bestlab[i]
                    gens, ng = _store_gen(gens, ng, gamma, n)
                    j = 0
                    while j < d and PATH[j] == bestpath[j]:
                        j += 1
                    if j < d and gamma[PATH[j]] == bestpath[j]:
                        d = j
                    else:
                        d -= 1
                else:
                    d -= 1
                entering = False
                continue
            # target cell: first smallest non-singleton
            best_s = -1
            best_len = n + 1
            s = 0
            while s < n:
                e = CEN[d, s]
                ln = e - s
                if 1 < ln < best_len:
                    best_len = ln
                    best_s = s
                s = e
            TS[d] = best_s
            TCN[d] = best_len
            for i in range(best_len):
                TC[d, i] = LAB[d, best_s + i]
            TC[d, :best_len].sort()
            TI[d] = 0
            entering = False
            continue

        # next child at depth d
        if d < 0:
            break
        w = -1
        while TI[d] < TCN[d]:
            cand = TC[d, TI[d]]
            TI[d] += 1
            if ng > 0:
                parent = np.arange(n)
                for g in range(ng):
                    fixes = True
                    for t in range(d):
                        if gens[g, PATH[t]] != PATH[t]:
                            fixes = False
                            break
                    if not fixes:
                        continue
                    for v in range(n):
                        a = _find(parent, v)
                        b = _find(parent, gens[g, v])
                        if a < b:
                            parent[b] = a
                        elif b < a:
                            parent[a] = b
                if _find(parent, cand) < cand:
                    continue
            w = cand
            break
        if w < 0:
            d -= 1
            if d < 0:
                break
            continue
        PATH[d] = w
        LAB[d + 1, :] = LAB[d]
        CST[d + 1, :] = CST[d]
        CEN[d + 1, :] = CEN[d]
        ts = TS[d]
        te = CEN[d, ts]
        for p in range(ts, te):
            if LAB[d + 1, p] == w:
                LAB[d + 1, p] = LAB[d + 1, ts]
                LAB[d + 1, ts] = w
                break
        CEN[d + 1, ts] = ts + 1
        CEN[d + 1, ts + 1] = te
        for p in range(ts + 1, te):
            CST[d + 1, p] = ts + 1
        qinit[0] = ts
        tr, nc = refine_kernel(rows, n, LAB[d + 1], CST[d + 1], CEN[d + 1], qinit, 1)
        TRACE[d + 1] = _mix(tr, ts)
        NC[d + 1] = nc
        d += 1
        entering = True

    return bestlab, bestcode, gens[:ng].copy(), ng, root_lab, root_cend


# -- Python surface -----------------------------------------------------------


@dataclass(frozen=True)
class OrderedPartition:
    """Ordered list of disjoint nonempty vertex sets covering ``0..n-1``."""

    cells: tuple[VertexSet, ...]

    @classmethod
    def unit(cls, n: int) -> "OrderedPartition":
        return cls(((1 << n) - 1,))

    @classmethod
    def of(cls, cells: Iterable[Iterable[int]]) -> "OrderedPartition":
        out = []
        for c in cells:
            m = 0
            for v in c:
                m |= 1 << v
            out.append(m)
        return cls(tuple(out))

    def validate(self, n: int) -> None:
        seen = 0
        for c in self.cells:
            if not c:
                raise ValueError("empty cell in partition")
            if c & seen:
                raise ValueError("partition cells overlap")
            seen |= c
        if seen != (1 << n) - 1:
            raise ValueError("partition does not cover the vertex set")

    def as_lists(self) -> list[list[int]]:
        return [members(c) for c in self.cells]

    def _arrays(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        lab = np.empty(n, np.int64)
        cend = np.zeros(n, np.int64)
        p = 0
        for c in self.cells:
            start = p
            for v in members(c):
                lab[p] = v
                p += 1
            cend[start] = p
        return lab, cend

    @classmethod
    def _from_arrays(cls, lab: np.ndarray, cend: np.ndarray) -> "OrderedPartition":
        n = len(lab)
        cells = []
        s = 0
        while s < n:
            e = int(cend[s])
            m = 0
            for p in range(s, e):
                m |= 1 << int(lab[p])
            cells.append(m)
            s = e
        return cls(tuple(cells))


def max_degree_partition(g: Graph) -> OrderedPartition:
    """``(rest, max-degree vertices)`` -- max-degree cell placed last."""
    degs = g.degrees()
    top = max(degs)
    hi = 0
    for v, d in enumerate(degs):
        if d == top:
            hi |= 1 << v
    rest = g.full & ~hi
    return OrderedPartition((rest, hi) if rest else (hi,))


def refine(g: Graph, p: OrderedPartition | None = None) -> OrderedPartition:
    p = p or OrderedPartition.unit(g.order)
    p.validate(g.order)
    lab, cend = p._arrays(g.order)
    cstart = np.zeros(g.order, np.int64)
    q = []
    s = 0
    while s < g.order:
        e = int(cend[s])
        cstart[s:e] = s
        q.append(s)
        s = e
    refine_kernel(g.to_words(), g.order, lab, cstart, cend, np.array(q, np.int64), len(q))
    return OrderedPartition._from_arrays(lab, cend)


def is_equitable(g: Graph, p: OrderedPartition) -> bool:
    for cell in p.cells:
        for other in p.cells:
            counts = {(g.rows[v] & other).bit_count() for v in members(cell)}
            if len(counts) > 1:
                return False
    return True


@dataclass(frozen=True)
class CanonicalResult:
    """``labeling[v]`` is the canonical label of vertex ``v``."""

    labeling: Perm
    canon_bytes: bytes
    aut_gens: tuple[Perm, ...]

    @property
    def last_vertex(self) -> int:
        return self.labeling.index(len(self.labeling) - 1)


def canonical(g: Graph, p: OrderedPartition | None = None) -> CanonicalResult:
    p = p or OrderedPartition.unit(g.order)
    p.validate(g.order)
    lab, cend = p._arrays(g.order)
    bestlab, bestcode, gens, ng, _, _ = canon_kernel(g.to_words(), g.order, lab, cend)
    labeling = [0] * g.order
    for i, v in enumerate(bestlab):
        labeling[int(v)] = i
    canon = Graph.from_words(bestcode, g.order)
    return CanonicalResult(
        labeling=tuple(labeling),
        canon_bytes=g6_encode(canon).encode("ascii"),
        aut_gens=tuple(tuple(int(x) for x in row) for row in gens[:ng]),
    )


def canon_bytes(g: Graph) -> bytes:
    return canonical(g).canon_bytes


def canonical_form(g: Graph) -> Graph:
    return g.relabel(canonical(g).labeling)


def is_isomorphic(g: Graph, h: Graph) -> bool:
    return g.order == h.order and canon_bytes(g) == canon_bytes(h)


def automorphisms(g: Graph) -> tuple[Perm, ...]:
    return canonical(g).aut_gens


# -- permutation groups --------------------------------------------------------


def _compose(a: Perm, b: Perm) -> Perm:
    """``a`` after ``b``."""
    return tuple(a[x] for x in b)


def _inverse(a: Perm) -> Perm:
    inv = [0] * len(a)
    for i, x in enumerate(a):
        inv[x] = i
    return tuple(inv)


class _StabChain:
    """Incremental Schreier-Sims stabiliser chain."""

    def __init__(self, n: int):
        self.n = n
        self.ident = tuple(range(n))
        self.bases: list[int] = []
        self.gens: list[list[Perm]] = []
        self.trans: list[dict[int, Perm]] = []

    def _sift(self, g: Perm, start: int) -> Perm:
        for i in range(start, len(self.bases)):
            img = g[self.bases[i]]
            u = self.trans[i].get(img)
            if u is None:
                return g
            g = _compose(_inverse(u), g)
        return g

    def extend(self, g: Perm, i: int = 0) -> None:
        if self._sift(g, i) == self.ident:
            return
        if i == len(self.bases):
            b = next(x for x in range(self.n) if g[x] != x)
            self.bases.append(b)
            self.gens.append([])
            self.trans.append({b: self.ident})
        b = self.bases[i]
        gens = self.gens[i]
        trans = self.trans[i]
        gens.append(g)
        old = set(trans)
        frontier = list(trans)
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = s[x]
                    if y not in trans:
                        trans[y] = _compose(s, trans[x])
                        nxt.append(y)
            frontier = nxt
        for x in list(trans):
            for s in list(gens):
                if x in old and s is not g:
                    continue
                su = _compose(s, trans[x])
                sch = _compose(_inverse(trans[su[b]]), su)
                if sch != self.ident:
                    self.extend(sch, i + 1)

    def order(self) -> int:
        out = 1
        for t in self.trans:
            out *= len(t)
        return out


def aut_order(gens: Sequence[Sequence[int]], n: int) -> int:
    """Order of the permutation group generated by ``gens``."""
    chain = _StabChain(n)
    for g in gens:
        chain.extend(tuple(g))
    return chain.order()


def vertex_orbits(gens: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    """Orbits sorted by least member, each listed ascending."""
    rep = orbits_kernel(np.array(gens, np.int64).reshape(-1, n), len(gens), n)
    groups: dict[int, list[int]] = {}
    for v in range(n):
        groups.setdefault(int(rep[v]), []).append(v)
    return [groups[r] for r in sorted(groups)]


def apply_to_set(g: Sequence[int], s: VertexSet) -> VertexSet:
    out = 0
    for v in members(s):
        out |= 1 << g[v]
    return out


def subset_orbit_reps(gens: Sequence[Sequence[int]], sets: Iterable[VertexSet]) -> list[VertexSet]:
    """Least member of each orbit of ``gens`` acting on the collection ``sets``.

    Raises ``ValueError`` if a generator maps a member outside the collection.
    """
    pool = sorted(set(sets))
    index = {s: i for i, s in enumerate(pool)}
    parent = list(range(len(pool)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for i, s in enumerate(pool):
            img = apply_to_set(g, s)
            j = index.get(img)
            if j is None:
                raise ValueError(f"set {s:#x} maps outside the collection under a generator")
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    return [s for i, s in enumerate(pool) if find(i) == i]
