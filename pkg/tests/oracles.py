"""Slow reference implementations that share no code with the package.

Graphs here are plain integers: bit ``b`` of the code is the ``b``-th pair of
``itertools.combinations(range(n), 2)``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations

import numpy as np


def pairs(n):
    return list(combinations(range(n), 2))


def code_to_adj(code: int, n: int) -> list[set[int]]:
    adj = [set() for _ in range(n)]
    for b, (u, v) in enumerate(pairs(n)):
        if code >> b & 1:
            adj[u].add(v)
            adj[v].add(u)
    return adj


def graph_to_code(g) -> int:
    code = 0
    for b, (u, v) in enumerate(pairs(g.order)):
        if g.rows[u] >> v & 1:
            code |= 1 << b
    return code


@lru_cache(maxsize=None)
def min_codes(n: int) -> np.ndarray:
    """Least code over all relabellings, for every labelled graph on ``n`` vertices."""
    ps = pairs(n)
    index = {p: i for i, p in enumerate(ps)}
    codes = np.arange(1 << len(ps), dtype=np.int64)
    best = codes.copy()
    for perm in permutations(range(n)):
        img = np.zeros_like(codes)
        for b, (u, v) in enumerate(ps):
            a, c = perm[u], perm[v]
            tb = index[(a, c) if a < c else (c, a)]
            img |= ((codes >> b) & 1) << tb
        np.minimum(best, img, out=best)
    return best


def class_codes(n: int) -> list[int]:
    return sorted(set(min_codes(n).tolist()))


def min_code_of(g) -> int:
    return int(min_codes(g.order)[graph_to_code(g)])


def has_regular(adj: list[set[int]], sizes) -> bool:
    n = len(adj)
    for s in sizes:
        if s > n:
            continue
        for sub in combinations(range(n), s):
            ss = set(sub)
            degs = {len(adj[v] & ss) for v in sub}
            if len(degs) == 1:
                return True
    return False


def in_family(adj, k: int, exact: bool) -> bool:
    n = len(adj)
    sizes = [k] if exact else range(k, n + 1)
    return not has_regular(adj, sizes)


def family_classes(n: int, k: int, exact: bool) -> list[int]:
    return [c for c in class_codes(n) if in_family(code_to_adj(c, n), k, exact)]
