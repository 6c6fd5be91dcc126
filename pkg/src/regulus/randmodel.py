"""Heterogeneous random graphs and numeric checks of the lower-bound argument.

Each vertex gets a weight ``a_i`` uniform on ``[alpha, 1 - alpha]`` and the
edge ``ij`` appears with probability ``(a_i + a_j) / 2``.  Random streams
are numpy ``Philox`` generators keyed by ``(seed, stream)`` so any sample
can be regenerated on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .graph import MAX_ORDER, Graph
from .regcheck import Mode, find_induced_regular

_MASK64 = (1 << 64) - 1


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & _MASK64, stream & _MASK64]))


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 0.5:
        raise ValueError(f"alpha must lie in (0, 1/2), got {alpha}")


@dataclass(frozen=True)
class HeteroParams:
    n: int
    alpha: float
    seed: int = 0

    def __post_init__(self):
        _check_alpha(self.alpha)
        if not 1 <= self.n <= MAX_ORDER:
            raise ValueError(f"n must be in 1..{MAX_ORDER}")


@dataclass(frozen=True)
class BoundParams:
    alpha: float
    eps: float
    k: int = 2

    def __post_init__(self):
        _check_alpha(self.alpha)
        if not 0 < self.eps < self.alpha:
            raise ValueError(f"eps must lie in (0, alpha), got {self.eps}")

    @property
    def c2(self) -> float:
        return 1 / (2 * (1 - self.alpha) ** 2)

    @property
    def c3(self) -> float:
        a, e = self.alpha, self.eps
        return 1 / math.sqrt(2 * math.pi * (a - e) * (1 - a + e))


def hetero_weights(alpha: float, n: int, rng: np.random.Generator) -> np.ndarray:
    return alpha + (1 - 2 * alpha) * rng.random(n)


def adjacency_to_graph(adj: np.ndarray) -> Graph:
    n = adj.shape[0]
    rows = tuple(int.from_bytes(np.packbits(adj[v], bitorder="little").tobytes(), "little")
                 for v in range(n))
    return Graph(n, rows)


def sample_with_weights(a: np.ndarray, rng: np.random.Generator) -> Graph:
    n = a.shape[0]
    prob = (a[:, None] + a[None, :]) / 2
    coin = rng.random((n, n))
    upper = np.triu(coin < prob, 1)
    return adjacency_to_graph(upper | upper.T)


def sample_hetero(p: HeteroParams, stream: int = 0) -> Graph:
    rng = rng_for(p.seed, stream)
    return sample_with_weights(hetero_weights(p.alpha, p.n, rng), rng)


def bound_constant(alpha: float, eps: float) -> float:
    """Base of the exponential error term; below 1 means the bound improves."""
    BoundParams(alpha, eps)
    num = 18 * math.e * (1 - alpha)
    den = 163 * (1 - 2 * alpha) * math.sqrt((alpha - eps) * (1 - alpha + eps))
    return num / den


def check_uv_inequality(alpha: float, grid_steps: int, c2_scale: float = 1.0,
                        chunk: int = 512) -> float:
    """Largest value of ``log(u/v) - (u-v)/v + c2 (u-v)^2`` on a square grid.

    The inequality holds when the result is at most zero (up to rounding).
    """
    _check_alpha(alpha)
    if grid_steps < 2:
        raise ValueError("grid_steps must be at least 2")
    c2 = c2_scale / (2 * (1 - alpha) ** 2)
    grid = np.linspace(alpha, 1 - alpha, grid_steps)
    worst = -np.inf
    for lo in range(0, grid_steps, chunk):
        u = grid[lo:lo + chunk, None]
        x = (u - grid[None, :]) / grid[None, :]
        val = np.log1p(x) - x + c2 * (u - grid[None, :]) ** 2
        worst = max(worst, float(val.max()))
    return worst


@dataclass(frozen=True)
class CubeCheck:
    estimate: float
    stderr: float
    bound: float

    @property
    def holds(self) -> bool:
        slack = 1 + 3 * self.stderr / self.estimate if self.estimate > 0 else 1
        return self.estimate <= self.bound * slack


def cube_bound(k: int, alpha: float, beta: float) -> float:
    return math.sqrt(k) * (math.pi / ((1 - 2 * alpha) ** 2 * beta)) ** ((k - 1) / 2)


def mc_check_cube_lemma(k: int, alpha: float, beta: float, trials: int = 10**6,
                        seed: int = 0, chunk: int = 1 << 16) -> CubeCheck:
    """Monte Carlo estimate of ``E exp(-beta * sum (z_i - zbar)^2)``.

    ``z`` has independent coordinates uniform on ``[alpha - 1/2, 1/2 - alpha]``.
    """
    _check_alpha(alpha)
    if k < 2 or beta <= 0 or trials < 1:
        raise ValueError("need k >= 2, beta > 0 and trials >= 1")
    rng = rng_for(seed, k)
    half = 0.5 - alpha
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        z = rng.uniform(-half, half, size=(m, k))
        z -= z.mean(axis=1, keepdims=True)
        vals = np.exp(-beta * np.einsum("ij,ij->i", z, z))
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        done += m
    mean = total / trials
    var = max(total_sq / trials - mean * mean, 0.0)
    return CubeCheck(mean, math.sqrt(var / trials), cube_bound(k, alpha, beta))


COUNT_REGULAR_MAX_K = 10


def count_regular(k: int, d: int) -> int:
    """Number of labelled ``d``-regular graphs on ``k`` vertices.

    Vertices are settled in turn: the first open vertex picks its remaining
    neighbours among the later ones, never exceeding anyone's degree.  Only
    the multiset of outstanding degrees matters for the rest, so it is
    memoised on that.
    """
    if k < 1 or k > COUNT_REGULAR_MAX_K:
        raise ValueError(f"k must be in 1..{COUNT_REGULAR_MAX_K}")
    if not 0 <= d <= k - 1:
        raise ValueError("need 0 <= d <= k - 1")
    if d * k % 2:
        return 0
    return _complete_degrees((d,) * k)


@lru_cache(maxsize=None)
def _complete_degrees(need: tuple[int, ...]) -> int:
    if not need:
        return 1
    first, rest = need[0], need[1:]
    if first > len(rest):
        return 0
    total = 0
    open_idx = [i for i, r in enumerate(rest) if r > 0]
    for chosen in combinations(open_idx, first):
        nxt = list(rest)
        for i in chosen:
            nxt[i] -= 1
        total += _complete_degrees(tuple(sorted(nxt, reverse=True)))
    return total


def count_regular_brute(k: int, d: int) -> int:
    """Same count by listing every labelled graph; only for small ``k``."""
    if k > 7:
        raise ValueError("brute force limited to k <= 7")
    pairs = list(combinations(range(k), 2))
    hits = 0
    for chosen in combinations(range(len(pairs)), d * k // 2) if d * k % 2 == 0 else ():
        deg = [0] * k
        for e in chosen:
            u, v = pairs[e]
            deg[u] += 1
            deg[v] += 1
        hits += all(x == d for x in deg)
    return hits


def empirical_regular_rate(n: int, k: int, alpha: float, samples: int, seed: int = 0,
                           budget: int = 0) -> float:
    """Fraction of sampled graphs with an induced regular subgraph of order >= ``k``."""
    _check_alpha(alpha)
    if k > n:
        return 0.0
    hits = 0
    for i in range(samples):
        g = sample_hetero(HeteroParams(n, alpha, seed), stream=i)
        if find_induced_regular(g, k, Mode.AT_LEAST, budget=budget) is not None:
            hits += 1
    return hits / samples
