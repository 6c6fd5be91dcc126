"""Isomorph-free generation of the families by canonical augmentation.

Graphs grow one vertex at a time from ``K1``.  For a graph ``G`` with
extension front ``F`` (all ``U`` with ``G:U`` in the family) we try one
``U`` per ``Aut(G)``-orbit of ``F``; the child ``G:U`` is kept only when the
new vertex lies in the automorphism orbit of the vertex its canonical
labelling puts last.  Every isomorphism class then appears exactly once.

The depth-first walk itself runs in :func:`gen_kernel`; the Python driver
splits the tree at a fixed level so subtrees can be streamed, budgeted or
farmed out to worker processes without changing any count.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Iterable, Iterator

import numpy as np
from numba import njit

from ._bits import bit, popcount
from .canon import canon_bytes, canon_kernel, orbits_kernel, refine_kernel
from .graph import Graph, complement, empty
from .regcheck import (
    ENGINE_MAX_ORDER,
    ExtensionFront,
    Mode,
    extension_sets,
    filter_kernel,
    pairs_kernel,
)

log = logging.getLogger(__name__)

STATUS_DONE = 0
STATUS_BUDGET = 2


@dataclass(frozen=True)
class GenOptions:
    max_degree_last: bool = True
    complement_closure: bool = True
    emit_level: int | None = None
    workers: int = 1
    deterministic: bool = True
    split_level: int = 7
    budget: int = 0  # child trials, 0 = unlimited

    def __post_init__(self):
        if self.emit_level is not None and self.emit_level < 1:
            raise ValueError("emit_level must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.split_level < 1:
            raise ValueError("split_level must be at least 1")


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("REGULUS_WORKERS", "1")))
    except ValueError:
        return 1


@dataclass
class CountsTable:
    mode: Mode
    k: int
    rows: dict[int, int] = field(default_factory=dict)
    edge_hist: dict[tuple[int, int], int] = field(default_factory=dict)
    incomplete: set[int] = field(default_factory=set)

    def count(self, n: int) -> int:
        return self.rows.get(n, 0)

    def series(self) -> list[int]:
        return [self.rows[n] for n in sorted(self.rows)]

    @property
    def complete(self) -> bool:
        return not self.incomplete

    def extremal_order(self) -> int | None:
        """Least ``n`` with an empty, fully generated row."""
        for n in sorted(self.rows):
            if self.rows[n] == 0 and n not in self.incomplete:
                return n
        return None

    def to_tsv(self) -> str:
        lines = []
        for n in sorted(self.rows):
            flag = "\tincomplete" if n in self.incomplete else ""
            lines.append(f"{n}\t{self.rows[n]}{flag}")
        return "\n".join(lines) + "\n"

    def edges_tsv(self) -> str:
        return "".join(f"{n}\t{e}\t{c}\n" for (n, e), c in sorted(self.edge_hist.items()))


@dataclass(frozen=True)
class GenNode:
    """A generated graph together with its extension front."""

    graph: Graph
    front: ExtensionFront

    @property
    def level(self) -> int:
        return self.graph.order


# -- kernels ------------------------------------------------------------------------


@njit(cache=True)
def _degrees(rows, n, deg):
    top = 0
    tot = 0
    for v in range(n):
        d = popcount(rows[v, 0])
        deg[v] = d
        tot += d
        if d > top:
            top = d
    return top, tot // 2


@njit(cache=True)
def accept_kernel(rows, N, t, maxdeg_last, need_gens):
    """Canonical-augmentation test for the vertex ``t`` of an ``N``-vertex graph.

    Returns ``(accepted, gens, ng)``; generators of the automorphism group
    are produced only when ``need_gens`` is set (or when the orbit test needs
    them anyway).
    """
    deg = np.empty(N, np.int64)
    top, _ = _degrees(rows, N, deg)
    empty_gens = np.empty((0, N), np.int64)
    lab = np.empty(N, np.int64)
    cend = np.zeros(N, np.int64)
    cstart = np.zeros(N, np.int64)
    qinit = np.zeros(2, np.int64)
    if maxdeg_last:
        if deg[t] != top:
            return False, empty_gens, 0
        p = 0
        for v in range(N):
            if deg[v] != top:
                lab[p] = v
                p += 1
        split = p
        for v in range(N):
            if deg[v] == top:
                lab[p] = v
                p += 1
        if split > 0:
            cend[0] = split
            cend[split] = N
            for q in range(split):
                cstart[q] = 0
            for q in range(split, N):
                cstart[q] = split
            qinit[0] = 0
            qinit[1] = split
            nq = 2
        else:
            cend[0] = N
            nq = 1
    else:
        for v in range(N):
            lab[v] = v
        cend[0] = N
        nq = 1
    init_lab = lab.copy()
    init_cend = cend.copy()
    _, ncells = refine_kernel(rows, N, lab, cstart, cend, qinit, nq)
    last_start = cstart[N - 1]
    pos_t = -1
    for p in range(N):
        if lab[p] == t:
            pos_t = p
            break
    if cstart[pos_t] != last_start:
        return False, empty_gens, 0
    if last_start == N - 1:
        if need_gens and ncells < N:
            _, _, gens, ng, _, _ = canon_kernel(rows, N, init_lab, init_cend)
            return True, gens, ng
        return True, empty_gens, 0
    bestlab, _, gens, ng, _, _ = canon_kernel(rows, N, init_lab, init_cend)
    rep = orbits_kernel(gens, ng, N)
    if rep[t] != rep[bestlab[N - 1]]:
        return False, empty_gens, 0
    return True, gens, ng


@njit(cache=True)
def aut_gens_kernel(rows, N):
    lab = np.arange(N)
    cend = np.zeros(N, np.int64)
    cend[0] = N
    _, _, gens, ng, _, _ = canon_kernel(rows, N, lab, cend)
    return gens, ng


@njit(cache=True)
def _image(u, g):
    out = np.uint64(0)
    x = u
    while x:
        low = x & (~x + np.uint64(1))
        out |= bit(g[popcount(low - np.uint64(1))])
        x ^= low
    return out


@njit(cache=True)
def _bsearch(arr, lo, hi, x):
    while lo < hi:
        mid = (lo + hi) >> 1
        if arr[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True)
def reps_kernel(rows, n, front, f0, flen, gens, ng, maxdeg_last, out, o0):
    """Write one ``U`` per orbit (least mask) into ``out[o0:]``; returns the count.

    Under ``maxdeg_last`` only sets that make the new vertex a vertex of
    maximum degree are kept.  ``front`` must be sorted ascending.
    """
    deg = np.empty(n, np.int64)
    _degrees(rows, n, deg)
    gt = np.zeros(n + 2, np.uint64)
    eq = np.zeros(n + 2, np.uint64)
    for s in range(n + 1):
        for v in range(n):
            if deg[v] > s:
                gt[s] |= bit(v)
            elif deg[v] == s:
                eq[s] |= bit(v)
    m = 0
    for i in range(f0, f0 + flen):
        u = front[i]
        if maxdeg_last:
            s = popcount(u)
            if gt[s] != np.uint64(0) or (u & eq[s]) != np.uint64(0):
                continue
        out[o0 + m] = u
        m += 1
    if ng == 0 or m <= 1:
        return m
    parent = np.arange(m)
    for g in range(ng):
        for i in range(m):
            img = _image(out[o0 + i], gens[g])
            j = _bsearch(out, o0, o0 + m, img) - o0
            if j >= m or out[o0 + j] != img:
                raise ValueError("extension front is not closed under automorphisms")
            a = i
            while parent[a] != a:
                a = parent[a]
            b = j
            while parent[b] != b:
                b = parent[b]
            if a < b:
                parent[b] = a
            elif b < a:
                parent[a] = b
    r = 0
    for i in range(m):
        if parent[i] == i:
            out[o0 + r] = out[o0 + i]
            r += 1
    return r


@njit(cache=True)
def front_kernel(rows, N, prev, p0, plen, jmin, jmax, out, o0):
    """Front of an ``N``-vertex child from its parent's front ``prev``."""
    top = N - 1
    u1, u2 = pairs_kernel(rows, N, jmin, min(jmax, N), top)
    cands = np.empty(2 * plen, np.uint64)
    for i in range(plen):
        cands[i] = prev[p0 + i]
        cands[plen + i] = prev[p0 + i] | bit(top)
    tmp = np.empty(2 * plen, np.uint64)
    m = filter_kernel(cands, 2 * plen, u1, u2, u1.shape[0], tmp)
    out[o0:o0 + m] = tmp[:m]
    return m


@njit(cache=True)
def _grow(arr, need):
    if need <= arr.shape[0]:
        return arr
    cap = arr.shape[0]
    while cap < need:
        cap *= 2
    bigger = np.empty(cap, arr.dtype)
    bigger[:arr.shape[0]] = arr
    return bigger


@njit(cache=True)
def _grow2(arr, need):
    if need <= arr.shape[0]:
        return arr
    cap = arr.shape[0]
    while cap < need:
        cap *= 2
    bigger = np.empty((cap, arr.shape[1]), arr.dtype)
    bigger[:arr.shape[0]] = arr
    return bigger


@njit(cache=True)
def gen_kernel(root_rows, n0, root_front, k, atleast, nmax, maxdeg_last, cc,
               emit_level, collect_level, budget):
    """Depth-first canonical augmentation below one root node.

    Counts (and optional emission / collection) cover levels ``> n0`` only.
    Returns ``(status, trials, counts, hist, emitted, n_emitted, coll_rows,
    coll_front_off, coll_fronts, n_coll)``.
    """
    L = nmax + 2
    ROWS = np.zeros((L, 64, 1), np.uint64)
    for v in range(n0):
        ROWS[n0, v, 0] = root_rows[v, 0]
    counts = np.zeros(L, np.int64)
    hist = np.zeros((L, nmax * (nmax - 1) // 2 + 1), np.int64)
    jmin = k - 1

    FPOOL = np.empty(max(1024, 4 * root_front.shape[0]), np.uint64)
    CPOOL = np.empty(max(1024, 4 * root_front.shape[0]), np.uint64)
    FST = np.zeros(L, np.int64)
    FLN = np.zeros(L, np.int64)
    CST = np.zeros(L, np.int64)
    CLN = np.zeros(L, np.int64)
    CIX = np.zeros(L, np.int64)

    ew = max(emit_level, 1)
    EMIT = np.empty((64, ew), np.uint64)
    n_emit = 0
    cw = max(collect_level, 1)
    COLL = np.empty((16, cw), np.uint64)
    COFF = np.zeros(17, np.int64)
    CFR = np.empty(1024, np.uint64)
    n_coll = 0

    status = 0
    trials = 0
    if n0 >= nmax:
        return (status, trials, counts, hist, EMIT[:0], 0, COLL[:0], COFF[:1], CFR[:0], 0)

    FPOOL[:root_front.shape[0]] = root_front
    FST[n0] = 0
    FLN[n0] = root_front.shape[0]
    root = ROWS[n0, :n0, :]
    gens, ng = aut_gens_kernel(root, n0)
    CPOOL = _grow(CPOOL, FLN[n0])
    CST[n0] = 0
    CLN[n0] = reps_kernel(root, n0, FPOOL, 0, FLN[n0], gens, ng, maxdeg_last, CPOOL, 0)
    CIX[n0] = 0

    m = n0
    while m >= n0:
        if CIX[m] >= CLN[m]:
            m -= 1
            continue
        u = CPOOL[CST[m] + CIX[m]]
        CIX[m] += 1
        N = m + 1
        trials += 1
        if budget > 0 and trials > budget:
            status = 2
            break
        for v in range(m):
            r = ROWS[m, v, 0]
            if (u >> np.uint64(v)) & np.uint64(1):
                r |= bit(m)
            ROWS[N, v, 0] = r
        ROWS[N, m, 0] = u
        child = ROWS[N, :N, :]
        e = 0
        for v in range(N):
            e += popcount(child[v, 0])
        e //= 2
        extend = N < nmax or N == collect_level
        if extend and cc and 2 * e > N * (N + 1) // 2:
            extend = False
        need_gens = extend and N != collect_level
        ok, gens, ng = accept_kernel(child, N, m, maxdeg_last, need_gens)
        if not ok:
            continue
        full = N * (N - 1) // 2
        if cc:
            if 2 * e < full:
                counts[N] += 2
                hist[N, e] += 1
                hist[N, full - e] += 1
            elif 2 * e == full:
                counts[N] += 1
                hist[N, e] += 1
        else:
            counts[N] += 1
            hist[N, e] += 1
        if N == emit_level and ((not cc) or 2 * e <= full):
            reps = 2 if (cc and 2 * e < full) else 1
            EMIT = _grow2(EMIT, n_emit + reps)
            for v in range(N):
                EMIT[n_emit, v] = child[v, 0]
            n_emit += 1
            if reps == 2:
                allv = (np.uint64(1) << np.uint64(N)) - np.uint64(1)
                for v in range(N):
                    EMIT[n_emit, v] = allv ^ child[v, 0] ^ bit(v)
                n_emit += 1
        if not extend:
            continue
        # front of the child, pushed on top of the parent's
        f0 = FST[m] + FLN[m]
        jmax = N if atleast else k - 1
        FPOOL = _grow(FPOOL, f0 + 2 * FLN[m])
        fl = front_kernel(child, N, FPOOL, FST[m], FLN[m], jmin, jmax, FPOOL, f0)
        if N == collect_level:
            COLL = _grow2(COLL, n_coll + 1)
            COFF = _grow(COFF, n_coll + 2)
            CFR = _grow(CFR, COFF[n_coll] + fl)
            for v in range(N):
                COLL[n_coll, v] = child[v, 0]
            CFR[COFF[n_coll]:COFF[n_coll] + fl] = FPOOL[f0:f0 + fl]
            COFF[n_coll + 1] = COFF[n_coll] + fl
            n_coll += 1
            continue
        FST[N] = f0
        FLN[N] = fl
        c0 = CST[m] + CLN[m]
        CPOOL = _grow(CPOOL, c0 + fl)
        CST[N] = c0
        CLN[N] = reps_kernel(child, N, FPOOL, f0, fl, gens, ng, maxdeg_last, CPOOL, c0)
        CIX[N] = 0
        m = N

    return (status, trials, counts, hist, EMIT[:n_emit], n_emit,
            COLL[:n_coll], COFF[:n_coll + 1], CFR[:COFF[n_coll]], n_coll)


# -- Python surface --------------------------------------------------------------------


def _rows_array(g: Graph) -> np.ndarray:
    if g.order >= ENGINE_MAX_ORDER:
        raise ValueError(f"generation supports orders below {ENGINE_MAX_ORDER}")
    return g.to_words()


def accept(parent: Graph, child: Graph, k: int | None = None, mode: Mode | str = Mode.EXACT,
           opts: GenOptions | None = None) -> bool:
    """Whether ``child`` (= ``parent:U``) is the canonical extension of ``parent``.

    ``k`` and ``mode`` are not consulted: membership of ``child`` is a
    precondition.
    """
    opts = opts or GenOptions()
    if child.order != parent.order + 1:
        raise ValueError("child must have exactly one more vertex than parent")
    ok, _, _ = accept_kernel(_rows_array(child), child.order, parent.order,
                             opts.max_degree_last, False)
    return bool(ok)


@dataclass(frozen=True)
class _Job:
    rows: np.ndarray
    front: np.ndarray
    k: int
    atleast: bool
    nmax: int
    maxdeg_last: bool
    cc: bool
    emit_level: int
    collect_level: int
    budget: int


def _run_job(job: _Job):
    n0 = job.rows.shape[0]
    return gen_kernel(job.rows, n0, job.front, job.k, job.atleast, job.nmax, job.maxdeg_last,
                      job.cc, job.emit_level, job.collect_level, job.budget)


def _graphs_from(arr: np.ndarray, n: int) -> Iterator[Graph]:
    for row in arr:
        yield Graph(n, tuple(int(x) for x in row[:n]))


def root_node(k: int, mode: Mode | str = Mode.EXACT) -> GenNode:
    g = empty(1)
    return GenNode(g, extension_sets(g, None, k, mode))


def generate(k: int, mode: Mode | str, n_max: int, opts: GenOptions | None = None,
             sink: Callable[[Graph], None] | None = None) -> CountsTable:
    """Count (and optionally emit) one representative per isomorphism class.

    Graphs at ``opts.emit_level`` are passed to ``sink`` in a deterministic
    order.  Rows beyond a budget stop are flagged ``incomplete``.
    """
    mode = Mode.parse(mode)
    opts = opts or GenOptions()
    if k < 3:
        raise ValueError("generation requires k >= 3")
    if not 1 <= n_max < ENGINE_MAX_ORDER:
        raise ValueError(f"n_max must be in 1..{ENGINE_MAX_ORDER - 1}")
    cc = opts.complement_closure
    if cc and not opts.max_degree_last:
        log.warning("complement closure needs max-degree-last parents; disabling it")
        cc = False
    atleast = mode is Mode.AT_LEAST
    emit = opts.emit_level if (opts.emit_level is not None and sink is not None) else 0

    table = CountsTable(mode, k)
    table.rows[1] = 1
    table.edge_hist[(1, 0)] = 1
    if emit == 1:
        sink(empty(1))
    if n_max == 1:
        return table

    root = root_node(k, mode)
    split = min(opts.split_level, n_max)
    spent = 0

    def merge(res, lo, hi):
        nonlocal spent
        status, trials, counts, hist, emitted, n_emit, *_ = res
        spent += int(trials)
        for n in range(lo, hi + 1):
            table.rows[n] = table.rows.get(n, 0) + int(counts[n])
            for e in np.nonzero(hist[n])[0]:
                key = (n, int(e))
                table.edge_hist[key] = table.edge_hist.get(key, 0) + int(hist[n, e])
        if emit and n_emit:
            for g in _graphs_from(emitted, emit):
                sink(g)
        return status

    root_rows = _rows_array(root.graph)
    root_front = np.array(root.front.sets, np.uint64)
    if split <= 1:
        jobs = [_Job(root_rows, root_front, k, atleast, n_max, opts.max_degree_last, cc,
                     emit if emit > 1 else 0, 0, 0)]
    else:
        first = _Job(root_rows, root_front, k, atleast, split, opts.max_degree_last, cc,
                     emit if emit <= split else 0, split if split < n_max else 0, opts.budget)
        res = _run_job(first)
        status = merge(res, 2, split)
        if status == STATUS_BUDGET:
            table.incomplete.update(range(2, n_max + 1))
            for n in range(split + 1, n_max + 1):
                table.rows.setdefault(n, 0)
            return table
        if split == n_max:
            return table
        coll_rows, coff, cfr, n_coll = res[6], res[7], res[8], int(res[9])
        jobs = [
            _Job(coll_rows[i, :split].reshape(split, 1).copy(), cfr[coff[i]:coff[i + 1]].copy(),
                 k, atleast, n_max, opts.max_degree_last, cc, emit if emit > split else 0, 0, 0)
            for i in range(n_coll)
        ]
    for n in range(split + 1, n_max + 1):
        table.rows.setdefault(n, 0)
    log.info("split at level %d into %d subtrees", split, len(jobs))

    def bounded(job: _Job) -> _Job:
        if opts.budget <= 0:
            return job
        left = max(opts.budget - spent, 1)
        return _Job(**{**job.__dict__, "budget": left})

    if opts.workers > 1 and len(jobs) > 1 and opts.budget <= 0:
        with ProcessPoolExecutor(max_workers=opts.workers) as pool:
            for res in pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (8 * opts.workers))):
                merge(res, split + 1, n_max)
        return table

    for job in jobs:
        if opts.budget > 0 and spent >= opts.budget:
            table.incomplete.update(range(split + 1, n_max + 1))
            break
        res = _run_job(bounded(job))
        if merge(res, split + 1, n_max) == STATUS_BUDGET:
            table.incomplete.update(range(split + 1, n_max + 1))
            break
    return table


def generate_level(k: int, mode: Mode | str, n: int, opts: GenOptions | None = None) -> list[Graph]:
    """All generated graphs of order ``n`` (complements filled in if enabled)."""
    base = opts or GenOptions()
    out: list[Graph] = []
    generate(k, mode, n, GenOptions(**{**base.__dict__, "emit_level": n}), out.append)
    return out


def verify_complement_closed(graphs: Iterable[Graph]) -> bool:
    """Whether the multiset of canonical forms is invariant under complement."""
    from collections import Counter

    graphs = list(graphs)
    keys = Counter(canon_bytes(g) for g in graphs)
    comp = Counter(canon_bytes(complement(g)) for g in graphs)
    return keys == comp


def count_self_complementary(graphs: Iterable[Graph]) -> int:
    return sum(1 for g in graphs if canon_bytes(g) == canon_bytes(complement(g)))
