"""Heuristic search for large members of the families.

Two moves feed a pool of same-order graphs: *back-extension* (drop a few
vertices, then re-grow them in every admissible way) and random local
edits, of which the degree-preserving switch is the useful one.  The pool
keeps one graph per isomorphism class and admits nothing that fails the
full membership oracle.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .canon import canon_bytes
from .graph import Graph, add_vertex, g6_encode, induced_subgraph, read_g6
from .regcheck import Mode, extension_sets, in_family

log = logging.getLogger(__name__)

MOVES = ("add", "remove", "move", "switch")
SCAN_LIMIT = 24  # largest order whose extension sets are scanned from scratch


class NoApplicableMove(ValueError):
    pass


@dataclass
class Pool:
    k: int
    mode: Mode
    order: int | None = None
    cap: int | None = None
    seed: int | None = None
    members: dict[bytes, Graph] = field(default_factory=dict)
    evicted: int = 0

    def __post_init__(self):
        self.mode = Mode.parse(self.mode)
        self._lock = threading.Lock()

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(list(self.members.values()))

    def __contains__(self, g: Graph):
        return canon_bytes(g) in self.members

    def add(self, g: Graph) -> bool:
        """Insert ``g`` if it is new and passes the oracle; returns whether it went in."""
        if self.order is None:
            self.order = g.order
        elif g.order != self.order:
            raise ValueError(f"pool holds order {self.order}, got {g.order}")
        key = canon_bytes(g)
        if key in self.members:
            return False
        if not in_family(g, self.k, self.mode):
            return False
        with self._lock:
            if key in self.members:
                return False
            if self.cap is not None and len(self.members) >= self.cap:
                oldest = next(iter(self.members))
                del self.members[oldest]
                self.evicted += 1
                log.info("pool cap %d reached, evicted oldest member", self.cap)
            self.members[key] = g
        return True

    def manifest(self) -> dict:
        return {"k": self.k, "mode": self.mode.value, "order": self.order,
                "count": len(self), "seed": self.seed}

    def save(self, path: str | Path) -> Path:
        """Write graph6 lines to ``path`` and the manifest to ``path.json``."""
        path = Path(path)
        path.write_text("".join(g6_encode(g) + "\n" for g in self))
        meta = path.with_name(path.name + ".json")
        meta.write_text(json.dumps(self.manifest(), sort_keys=True) + "\n")
        return meta

    @classmethod
    def load(cls, path: str | Path) -> "Pool":
        path = Path(path)
        meta = json.loads(path.with_name(path.name + ".json").read_text())
        pool = cls(meta["k"], meta["mode"], meta["order"], seed=meta.get("seed"))
        with path.open() as fh:
            for g in read_g6(fh):
                if not pool.add(g):
                    raise ValueError(f"{path}: stored graph fails the oracle or repeats")
        return pool

    @classmethod
    def of(cls, graphs: Iterable[Graph], k: int, mode: Mode | str, **kw) -> "Pool":
        pool = cls(k, mode, **kw)
        for g in graphs:
            pool.add(g)
        return pool


def _check_scan(n: int) -> None:
    if n > SCAN_LIMIT:
        raise ValueError(f"extension scans are limited to order {SCAN_LIMIT}")


def grow(g: Graph, k: int, mode: Mode | str) -> list[Graph]:
    """All one-vertex extensions of ``g`` that stay in the family."""
    _check_scan(g.order)
    return [add_vertex(g, u) for u in extension_sets(g, None, k, mode).sets]


def _regrow(h: Graph, steps: int, k: int, mode: Mode) -> dict[bytes, Graph]:
    level = {canon_bytes(h): (h, extension_sets(h, None, k, mode))}
    for _ in range(steps):
        nxt = {}
        for g, front in level.values():
            for u in front.sets:
                c = add_vertex(g, u)
                key = canon_bytes(c)
                if key not in nxt:
                    nxt[key] = (c, extension_sets(c, front, k, mode))
        level = nxt
    return {key: g for key, (g, _) in level.items()}


def back_extend(g: Graph, k: int, mode: Mode | str = Mode.EXACT, depth: int = 1,
                samples: int = 16, rng: np.random.Generator | None = None) -> list[Graph]:
    """Delete ``depth`` vertices and re-extend to the original order in all ways.

    Depth one tries every vertex; deeper deletions are sampled ``samples``
    times.  ``g`` itself is always the first graph returned.
    """
    mode = Mode.parse(mode)
    n = g.order
    if n < 2:
        raise ValueError("back-extension needs at least 2 vertices")
    if not 1 <= depth < n:
        raise ValueError("depth must be between 1 and order - 1")
    _check_scan(n)
    if depth == 1:
        drops = [g.full & ~(1 << v) for v in range(n)]
    else:
        rng = rng if rng is not None else np.random.default_rng(0)
        drops = []
        for _ in range(samples):
            gone = rng.choice(n, size=depth, replace=False)
            drops.append(g.full & ~sum(1 << int(v) for v in gone))
    found = {canon_bytes(g): g}
    seen_h = set()
    for keep in drops:
        h = induced_subgraph(g, keep)
        key = canon_bytes(h)
        if key in seen_h:
            continue
        seen_h.add(key)
        for ck, c in _regrow(h, depth, k, mode).items():
            found.setdefault(ck, c)
    return list(found.values())


# -- local edits -----------------------------------------------------------------


def _edges(g: Graph) -> list[tuple[int, int]]:
    return list(g.edges())


def _non_edges(g: Graph) -> list[tuple[int, int]]:
    return [(u, v) for u in range(g.order) for v in range(u + 1, g.order) if not g.adjacent(u, v)]


def _toggle(g: Graph, pairs: Sequence[tuple[int, int]]) -> Graph:
    rows = list(g.rows)
    for u, v in pairs:
        rows[u] ^= 1 << v
        rows[v] ^= 1 << u
    return Graph(g.order, tuple(rows))


def switch(g: Graph, u: int, v: int, x: int, y: int) -> Graph:
    """Replace edges ``uv, xy`` by ``ux, vy`` (which must be non-edges)."""
    if len({u, v, x, y}) != 4:
        raise NoApplicableMove("switch needs four distinct vertices")
    if not (g.adjacent(u, v) and g.adjacent(x, y)):
        raise NoApplicableMove("uv and xy must be edges")
    if g.adjacent(u, x) or g.adjacent(v, y):
        raise NoApplicableMove("ux and vy must be non-edges")
    return _toggle(g, [(u, v), (x, y), (u, x), (v, y)])


def _switch_options(g: Graph) -> list[tuple[int, int, int, int]]:
    es = _edges(g)
    out = []
    for i, (a, b) in enumerate(es):
        for c, d in es[i + 1:]:
            for u, v in ((a, b), (b, a)):
                for x, y in ((c, d), (d, c)):
                    if len({u, v, x, y}) == 4 and not g.adjacent(u, x) and not g.adjacent(v, y):
                        out.append((u, v, x, y))
    return out


def _move_options(g: Graph) -> list[tuple[int, int, int]]:
    # slide the far end of edge uv to a non-neighbour w of u
    out = []
    for u, v in _edges(g):
        for a, b in ((u, v), (v, u)):
            for w in range(g.order):
                if w != a and w != b and not g.adjacent(a, w):
                    out.append((a, b, w))
    return out


def apply_move(g: Graph, move: str, rng: np.random.Generator) -> Graph:
    """Apply one random instance of ``move``; raises if none exists."""
    if move == "add":
        opts = _non_edges(g)
        if not opts:
            raise NoApplicableMove("no non-edge to add")
        return _toggle(g, [opts[rng.integers(len(opts))]])
    if move == "remove":
        opts = _edges(g)
        if not opts:
            raise NoApplicableMove("no edge to remove")
        return _toggle(g, [opts[rng.integers(len(opts))]])
    if move == "move":
        opts = _move_options(g)
        if not opts:
            raise NoApplicableMove("no edge can be moved")
        a, b, w = opts[rng.integers(len(opts))]
        return _toggle(g, [(a, b), (a, w)])
    if move == "switch":
        opts = _switch_options(g)
        if not opts:
            raise NoApplicableMove("no switchable pair of edges")
        return switch(g, *opts[rng.integers(len(opts))])
    raise ValueError(f"unknown move {move!r}")


def _applicable(g: Graph, move: str) -> bool:
    n, e = g.order, g.num_edges
    full = n * (n - 1) // 2
    if move == "add":
        return e < full
    if move == "remove":
        return e > 0
    if move == "move":
        return 0 < e and bool(_move_options(g))
    return bool(_switch_options(g))


def perturb(g: Graph, k: int, mode: Mode | str, moves: Sequence[str] = MOVES,
            rng: np.random.Generator | None = None,
            weights: Sequence[float] | None = None) -> Graph | None:
    """One random local edit; the result is returned only if it stays in the family."""
    rng = rng if rng is not None else np.random.default_rng()
    live = [m for m in moves if _applicable(g, m)]
    if not live:
        raise NoApplicableMove("none of the requested moves applies")
    if weights is None:
        pick = live[rng.integers(len(live))]
    else:
        w = np.array([weights[list(moves).index(m)] for m in live], float)
        pick = live[rng.choice(len(live), p=w / w.sum())]
    h = apply_move(g, pick, rng)
    return h if in_family(h, k, mode) else None


def certify_unextendable(g: Graph, k: int, mode: Mode | str = Mode.EXACT) -> bool:
    """No single added vertex keeps ``g`` in the family."""
    _check_scan(g.order)
    return len(extension_sets(g, None, k, mode)) == 0


# -- driver ----------------------------------------------------------------------------


@dataclass
class SearchReport:
    pool: Pool
    spent: int
    stalled: bool


def hill_search(k: int, mode: Mode | str, seeds: Pool, budget: int,
                rng: np.random.Generator | int | None = 0, cap: int | None = 10000,
                perturb_rounds: int = 64) -> Pool:
    return hill_search_report(k, mode, seeds, budget, rng, cap, perturb_rounds).pool


def hill_search_report(k: int, mode: Mode | str, seeds: Pool, budget: int,
                       rng: np.random.Generator | int | None = 0, cap: int | None = 10000,
                       perturb_rounds: int = 64) -> SearchReport:
    """Grow the pool order by order; when stuck, diversify and try again.

    ``budget`` counts candidate graphs examined.  The returned pool sits at
    the largest order reached.
    """
    mode = Mode.parse(mode)
    if not len(seeds):
        raise ValueError("hill search needs a non-empty seed pool")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    pool = seeds
    spent = 0
    stalled = False
    while spent < budget and pool.order is not None and pool.order < SCAN_LIMIT:
        nxt = Pool(k, mode, cap=cap, seed=pool.seed)
        for g in pool:
            for c in grow(g, k, mode):
                spent += 1
                nxt.add(c)
                if spent >= budget:
                    break
            if spent >= budget:
                break
        if len(nxt):
            log.info("order %d reached with %d graphs", nxt.order, len(nxt))
            pool = nxt
            continue
        # stuck: widen the pool at this order
        before = len(pool)
        for g in list(pool):
            for c in back_extend(g, k, mode, 1):
                spent += 1
                pool.add(c)
            if spent >= budget:
                break
        for _ in range(perturb_rounds):
            if spent >= budget:
                break
            members = list(pool)
            g = members[rng.integers(len(members))]
            spent += 1
            try:
                h = perturb(g, k, mode, rng=rng)
            except NoApplicableMove:
                continue
            if h is not None:
                pool.add(h)
        if len(pool) == before:
            stalled = True
            break
    return SearchReport(pool, spent, stalled)
