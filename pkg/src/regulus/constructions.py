"""Explicit graphs with no induced regular subgraph of a prescribed order.

Each builder returns a plain :class:`~regulus.graph.Graph`; components are
laid out in the order they are listed in the docstrings, each clique on a
contiguous block of vertex indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import comb

from .graph import (
    MAX_ORDER,
    Graph,
    GraphError,
    complete,
    cycle,
    disjoint_union,
    join_sets,
    lex_product,
)
from .regcheck import BudgetExceeded, Mode, find_induced_regular

DEFAULT_BUDGET = 10**8

FAMILIES = ("gp", "special_p", "qp", "four_p", "lex_cycle_clique")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class ConstructionSpec:
    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")

    def build(self) -> Graph:
        p = self.params
        if self.family == "gp":
            return build_gp(p["p"])
        if self.family == "special_p":
            return build_special(p["p"])
        if self.family == "qp":
            return build_qp(p["q"], p["p"])
        if self.family == "four_p":
            return build_4p(p["p"])
        return lex_cycle_clique(p["r"], p["s"])

    def target(self) -> int:
        """Order of the regular subgraph the construction avoids."""
        p = self.params
        if self.family in ("gp", "special_p"):
            return p["p"]
        if self.family == "qp":
            return p["q"] * p["p"]
        if self.family == "four_p":
            return 4 * p["p"]
        raise ValueError("lex_cycle_clique has no single target order")

    def claimed_bound(self) -> int:
        """Lower bound on the Ramsey-type number implied by the construction."""
        return self.build_order() + 1

    def build_order(self) -> int:
        p = self.params
        if self.family == "gp":
            return gp_order(p["p"])
        if self.family == "special_p":
            return {7: 45, 11: 115}[p["p"]]
        if self.family == "qp":
            return qp_order(p["q"], p["p"])
        if self.family == "four_p":
            return p["p"] ** 2 + 11 * p["p"] - 2
        return p["r"] * p["s"]


def _check_order(n: int) -> None:
    if n > MAX_ORDER:
        raise GraphError(f"construction has {n} vertices, more than {MAX_ORDER}")


def lex_cycle_clique(r: int, s: int) -> Graph:
    """``C_r[K_s]``; block ``i`` is vertices ``i*s .. i*s+s-1``."""
    if r < 3 or s < 1:
        raise ValueError("need r >= 3 and s >= 1")
    _check_order(r * s)
    return lex_product(cycle(r), complete(s))


def gp_order(p: int) -> int:
    if p % 12 in (1, 5):
        return 9 * (p - 1) ** 2 // 8
    if p % 12 == 7:
        return (p - 1) * (9 * p - 7) // 8
    return (p - 1) * (9 * p - 11) // 8


def build_gp(p: int) -> Graph:
    """Union of lexicographic cycle-clique products chosen by ``p mod 12``."""
    if p < 5 or not is_prime(p):
        raise ValueError(f"p must be a prime >= 5, got {p}")
    t, rem = divmod(p, 12)
    if rem == 1:
        parts = [(9, 6 * t)] * (3 * t)
    elif rem == 5:
        parts = [(9, 6 * t + 2)] * (3 * t + 1)
    elif rem == 7:
        parts = [(5, 6 * t + 3)] + [(9, 6 * t + 3)] * (3 * t + 1)
    else:
        parts = [(4, 6 * t + 5)] + [(9, 6 * t + 5)] * (3 * t + 2)
    _check_order(sum(r * s for r, s in parts))
    return disjoint_union([lex_cycle_clique(r, s) for r, s in parts])


def build_special(p: int) -> Graph:
    """The smaller ad-hoc graphs for ``p`` = 7 and 11."""
    if p == 7:
        return disjoint_union([lex_cycle_clique(5, 3)] * 3)
    if p == 11:
        return disjoint_union([lex_cycle_clique(7, 5)] * 2 + [lex_cycle_clique(9, 5)])
    raise ValueError(f"special constructions exist only for p in (7, 11), got {p}")


def qp_order(q: int, p: int) -> int:
    t = min(q - 1, p - q)
    return p * p + 2 * q * q * p - 4 * q * p + 1 + (p - 1) * t


@dataclass(frozen=True)
class Layout:
    """Named vertex blocks of a construction, for audits."""

    blocks: dict[str, list[int]]

    def sizes(self, prefix: str) -> list[int]:
        return [len(v) for k, v in self.blocks.items() if k.rstrip("0123456789") == prefix]


class _Builder:
    def __init__(self):
        self.blocks: dict[str, list[int]] = {}
        self.sizes: list[int] = []
        self.joins: list[tuple[list[int], list[int]]] = []
        self.n = 0

    def clique(self, name: str, size: int) -> list[int]:
        verts = list(range(self.n, self.n + size))
        self.blocks[name] = verts
        self.sizes.append(size)
        self.n += size
        return verts

    def join(self, a: list[int], b: list[int]) -> None:
        self.joins.append((a, b))

    def graph(self) -> Graph:
        _check_order(self.n)
        g = disjoint_union([complete(s) for s in self.sizes])
        for a, b in self.joins:
            g = join_sets(g, a, b)
        return g


def _qp_builder(q: int, p: int) -> _Builder:
    if not (is_prime(q) and is_prime(p)):
        raise ValueError(f"q and p must be primes, got ({q}, {p})")
    if q >= p:
        raise ValueError(f"need q < p, got ({q}, {p})")
    _check_order(qp_order(q, p))
    t = min(q - 1, p - q)
    b = _Builder()
    bs = [b.clique(f"B{i}", q * p - 1) for i in range(1, q)]
    as_ = [b.clique(f"A{i}", p - 1) for i in range(1, p - q + 1)]
    xs = [b.clique(f"X{i}", p - 1) for i in range(1, t + 1)]
    for i in range(1, q * p - p + 1):
        b.clique(f"Y{i}", q - 1)
    for i in range(t):
        c = bs[i][: q * p - p]
        b.blocks[f"C{i + 1}"] = c
        b.blocks[f"D{i + 1}"] = bs[i][q * p - p:]
        b.join(xs[i], c + as_[i])
    return b


def build_qp(q: int, p: int) -> Graph:
    """Cliques ``B, A, X, Y`` with each ``X_i`` joined to ``C_i`` and ``A_i``.

    ``q = 2`` is accepted; the smallest case is checked by exhaustive search
    in the test suite rather than taken on trust.
    """
    return _qp_builder(q, p).graph()


def qp_layout(q: int, p: int) -> Layout:
    return Layout(dict(_qp_builder(q, p).blocks))


def _4p_builder(p: int) -> _Builder:
    if p < 7 or not is_prime(p):
        raise ValueError(f"p must be a prime >= 7, got {p}")
    _check_order(p * p + 11 * p - 2)
    b = _Builder()
    a = b.clique("A", 4 * p - 1)
    b1 = b.clique("B1", 2 * p - 1)
    b2 = b.clique("B2", 2 * p - 1)
    cs = [b.clique(f"C{i}", p - 1) for i in range(1, p - 3)]
    for i in range(1, p + 1):
        b.clique(f"D{i}", 3)
    xs = [b.clique(f"X{i}", p - 1) for i in range(1, 4)]
    for i in range(1, 2 * p + 1):
        b.clique(f"I{i}", 1)
    # lowest-indexed vertices of A, B1, B2 take the joins
    b.join(xs[0], a[: 3 * p] + cs[0])
    b.join(xs[1], b1[:p] + cs[1])
    b.join(xs[2], b2[:p] + cs[2])
    return b


def build_4p(p: int) -> Graph:
    return _4p_builder(p).graph()


def fourp_layout(p: int) -> Layout:
    return Layout(dict(_4p_builder(p).blocks))


def verify_no_regular(g: Graph, k: int, budget: int = DEFAULT_BUDGET) -> bool:
    """``True`` iff ``g`` has no induced regular subgraph of order exactly ``k``.

    Raises :class:`~regulus.regcheck.BudgetExceeded` when the search visits
    more than ``budget`` partial subsets, which is not the same as ``False``.
    """
    return find_induced_regular(g, k, Mode.EXACT, budget=budget) is None


def verdict(g: Graph, k: int, budget: int = DEFAULT_BUDGET) -> str:
    """``"true"``, ``"false"`` or ``"infeasible"``."""
    try:
        return "true" if verify_no_regular(g, k, budget) else "false"
    except BudgetExceeded:
        return "infeasible"


# -- regular subsets of C_r[K_s] ---------------------------------------------


@dataclass
class CensusEntry:
    kind: str  # "clique" or "spread"
    degree: int
    order: int
    vectors: int = 0
    subsets: int = 0


@dataclass
class Census:
    r: int
    s: int
    entries: dict[tuple[str, int, int], CensusEntry]
    violations: list[tuple[int, ...]]

    @property
    def ok(self) -> bool:
        return not self.violations

    def total_subsets(self) -> int:
        return sum(e.subsets for e in self.entries.values())

    def lines(self) -> list[str]:
        out = [f"C{self.r}[K{self.s}]"]
        for key in sorted(self.entries):
            e = self.entries[key]
            out.append(f"  {e.kind:6s} d={e.degree:<2d} order={e.order:<3d} "
                       f"vectors={e.vectors} subsets={e.subsets}")
        out.append("  no violations" if self.ok else f"  {len(self.violations)} violations")
        return out


def _support_connected(x: tuple[int, ...]) -> bool:
    r = len(x)
    on = [i for i in range(r) if x[i]]
    if not on:
        return False
    if len(on) == r:
        return True
    # the support must be one cyclic arc
    gaps = sum(1 for i in range(r) if x[i] and not x[(i + 1) % r])
    return gaps == 1


def profile_regular_degree(x: tuple[int, ...]) -> int | None:
    """Degree of the subgraph of ``C_r[K_s]`` with ``x[i]`` vertices in block ``i``."""
    r = len(x)
    d = None
    for i in range(r):
        if x[i]:
            di = x[i] - 1 + x[i - 1] + x[(i + 1) % r]
            if d is None:
                d = di
            elif d != di:
                return None
    return d


def _is_clique_profile(x: tuple[int, ...]) -> bool:
    r = len(x)
    on = [i for i in range(r) if x[i]]
    if len(on) <= 1:
        return True
    return len(on) == 2 and (on[1] - on[0]) % r in (1, r - 1)


def _dominating(x: tuple[int, ...]) -> bool:
    r = len(x)
    return all(x[i - 1] + x[i] + x[(i + 1) % r] > 0 for i in range(r))


def classify_lemma31(r: int, s: int) -> Census:
    """Census of connected induced regular subgraphs of ``C_r[K_s]``.

    Vertices within a block are twins, so a subgraph is described up to
    isomorphism by how many vertices it takes from each block.  Every
    profile is checked against the two permitted shapes.
    """
    if not (4 <= r <= 9 and 1 <= s <= 3):
        raise ValueError("census window is 4 <= r <= 9, 1 <= s <= 3")
    entries: dict[tuple[str, int, int], CensusEntry] = {}
    bad: list[tuple[int, ...]] = []
    for x in product(range(s + 1), repeat=r):
        if not _support_connected(x):
            continue
        d = profile_regular_degree(x)
        if d is None:
            continue
        order = sum(x)
        if _is_clique_profile(x):
            kind = "clique"
            fine = order == d + 1 and 0 <= d <= 2 * s - 1
        else:
            kind = "spread"
            fine = (3 * order == r * (d + 1) and 2 <= d <= 3 * s - 1 and _dominating(x))
        if not fine:
            bad.append(x)
        e = entries.setdefault((kind, d, order), CensusEntry(kind, d, order))
        e.vectors += 1
        ways = 1
        for xi in x:
            ways *= comb(s, xi)
        e.subsets += ways
    return Census(r, s, entries, bad)
