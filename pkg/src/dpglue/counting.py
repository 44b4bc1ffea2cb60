"""Exact counting of H-colorings and minimisation over cover spaces."""

from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels as K
from .cover import Cover, PermTable, identity, invert, validate
from .errors import InvalidArgument, ResourceLimit
from .graph import Edge, Graph

DEFAULT_BUDGET = 10**9
DEFAULT_NODE_CAP = 10**10
MAX_M = 8


@lru_cache(maxsize=None)
def perm_arrays(m: int) -> tuple[np.ndarray, np.ndarray]:
    """All permutations of range(m) in lex order, and their inverses."""
    P = np.array(list(permutations(range(m))), dtype=np.int64).reshape(-1, m)
    return P, np.argsort(P, axis=1).astype(np.int64)


def _check_width(n: int, m: int) -> None:
    # Kernel counters are int64; the count of any cover is at most m**n.
    if m > MAX_M:
        raise InvalidArgument(f"m={m} exceeds the supported maximum {MAX_M}")
    if m**n >= 2**62:
        raise ResourceLimit(f"m^n = {m}^{n} could overflow the 64-bit kernel counters")


def elimination_order(g: Graph, first: Sequence[int] = ()) -> list[int]:
    """``first`` in the given order, then repeatedly the vertex with most placed neighbours."""
    order = list(first)
    placed = set(order)
    back = [0] * g.n
    for v in order:
        for w in g.adjacency[v]:
            back[w] += 1
    while len(order) < g.n:
        v = max((x for x in range(g.n) if x not in placed), key=lambda x: (back[x], g.degree(x), -x))
        order.append(v)
        placed.add(v)
        for w in g.adjacency[v]:
            back[w] += 1
    return order


@dataclass
class _Plan:
    order: list[int]
    pos: dict[int, int]
    nb_start: np.ndarray
    nb_end: np.ndarray
    nb_pos: np.ndarray
    nb_row: np.ndarray
    fmap: np.ndarray
    rows: dict[Edge, tuple[int, int]]  # edge -> (row, 1 if the row is oriented v -> u)
    allowed: np.ndarray

    @property
    def n(self) -> int:
        return len(self.order)


def _plan(c: Cover, first: Sequence[int] = (), skip: Iterable[Edge] = ()) -> _Plan:
    g, m = c.host, c.m
    order = elimination_order(g, first)
    pos = {v: i for i, v in enumerate(order)}
    skip = set(skip)
    per_pos: list[list[tuple[int, int]]] = [[] for _ in order]
    fmap_rows: list[list[int]] = []
    rows: dict[Edge, tuple[int, int]] = {}
    for e in g.edges:
        if e in skip:
            continue
        u, v = e
        sigma = c.matchings.get(e, (None,) * m)
        if pos[u] < pos[v]:
            later, earlier, inv, row = v, u, 0, sigma
        else:
            later, earlier, inv, row = u, v, 1, invert(sigma, m)
        r = len(fmap_rows)
        fmap_rows.append([-1 if k is None else k for k in row])
        rows[e] = (r, inv)
        per_pos[pos[later]].append((pos[earlier], r))
    nb_start, nb_end, nb_pos, nb_row = [], [], [], []
    for lst in per_pos:
        nb_start.append(len(nb_pos))
        for q, r in lst:
            nb_pos.append(q)
            nb_row.append(r)
        nb_end.append(len(nb_pos))
    a = lambda x: np.array(x, dtype=np.int64)
    fmap = np.array(fmap_rows, dtype=np.int64).reshape(-1, m) if fmap_rows else np.zeros((1, m), np.int64)
    allowed = np.full(len(order), (1 << m) - 1, dtype=np.int64)
    return _Plan(order, pos, a(nb_start), a(nb_end), a(nb_pos), a(nb_row), fmap, rows, allowed)


def _require_valid(c: Cover) -> None:
    bad = validate(c)
    if bad:
        raise InvalidArgument("invalid cover: " + "; ".join(map(str, bad)))


def _run_table(plan: _Plan, m: int, keys: int, node_cap: int) -> tuple[np.ndarray, int]:
    table, nodes = K.count_table(plan.n, m, plan.nb_start, plan.nb_end, plan.nb_pos, plan.nb_row,
                                 plan.fmap, plan.allowed, keys, node_cap)
    if nodes < 0:
        raise ResourceLimit(f"counting exceeded {node_cap} node expansions", work=node_cap)
    return table, nodes


def count_colorings(c: Cover, node_cap: int = DEFAULT_NODE_CAP) -> int:
    """Number of H-colorings: one label per vertex, no two chosen labels joined by a cross-edge."""
    return count_report(c, node_cap=node_cap).count


def _normalize_prescribed(c: Cover, p) -> list[tuple[int, int]]:
    items = list(p.items()) if isinstance(p, Mapping) else [tuple(x) for x in p]
    for v, j in items:
        if not (0 <= v < c.host.n and 0 <= j < c.m):
            raise InvalidArgument(f"prescribed vertex ({v}, {j}) out of range")
    return items


def count_with_prescribed(c: Cover, p, node_cap: int = DEFAULT_NODE_CAP) -> int:
    """N(P, H): colorings containing every (vertex, label) pair of ``p``.

    A dependent set (two labels on one vertex, or a cross-edge) gives 0.
    """
    return count_report(c, p, node_cap=node_cap).count


def greedy_extension_exists(c: Cover, p) -> bool:
    """True iff the prescribed set extends to at least one H-coloring."""
    return count_with_prescribed(c, p) >= 1


def count_table(c: Cover, keys: Sequence[int], node_cap: int = DEFAULT_NODE_CAP) -> np.ndarray:
    """N over every label tuple on ``keys``: an m x ... x m integer array."""
    _require_valid(c)
    _check_width(c.host.n, c.m)
    if len(set(keys)) != len(keys):
        raise InvalidArgument("key vertices must be distinct")
    plan = _plan(c, first=keys)
    table, _ = _run_table(plan, c.m, len(keys), node_cap)
    return table.reshape((c.m,) * len(keys)) if keys else table.reshape(())


def enumerate_colorings(c: Cover, cap: int = 1 << 20) -> list[tuple[int, ...]]:
    """Every H-coloring as a label tuple indexed by host vertex, in lex order."""
    _require_valid(c)
    _check_width(c.host.n, c.m)
    plan = _plan(c)
    arr, k = K.enumerate_colorings(plan.n, c.m, plan.nb_start, plan.nb_end, plan.nb_pos,
                                   plan.nb_row, plan.fmap, plan.allowed, cap)
    if k < 0:
        raise ResourceLimit(f"more than {cap} colorings")
    inv = [plan.pos[v] for v in range(c.host.n)]
    return sorted(tuple(int(row[inv[v]]) for v in range(c.host.n)) for row in arr[:k])


@dataclass
class CountReport:
    count: int
    cover: Cover
    prescribed: list[tuple[int, int]] = field(default_factory=list)
    nodes_expanded: int = 0

    def to_json(self) -> dict:
        names = self.cover.host.names
        return {
            "count": str(self.count),
            "cover": self.cover.to_json(),
            "prescribed": [[names[v], j + 1] for v, j in self.prescribed],
            "nodes_expanded": self.nodes_expanded,
        }


def count_report(c: Cover, p=(), node_cap: int = DEFAULT_NODE_CAP) -> CountReport:
    _require_valid(c)
    _check_width(c.host.n, c.m)
    items = _normalize_prescribed(c, p)
    plan = _plan(c)
    for v, j in items:
        plan.allowed[plan.pos[v]] &= 1 << j
    table, nodes = _run_table(plan, c.m, 0, node_cap)
    return CountReport(int(table[0]), c, items, nodes)


# ---------------------------------------------------------------- search


@dataclass(frozen=True)
class SearchSpace:
    """Full covers fixed to the identity on ``fixed`` and free on ``free``."""

    host: Graph
    m: int
    fixed: tuple[Edge, ...]
    free: tuple[Edge, ...]
    clique: tuple[int, ...] = ()

    @property
    def size(self) -> int:
        return math.factorial(self.m) ** len(self.free)

    def cover(self, perms: Sequence[Sequence[int]]) -> Cover:
        if len(perms) != len(self.free):
            raise InvalidArgument("one permutation per free edge expected")
        mats = {e: identity(self.m) for e in self.fixed}
        mats.update({e: tuple(int(k) for k in p) for e, p in zip(self.free, perms)})
        return Cover(self.host, self.m, mats)


def spanning_forest(g: Graph, root_first: Sequence[int] = ()) -> list[Edge]:
    """BFS forest; roots are ``root_first[0]`` then the lowest unvisited index.

    Later entries of ``root_first`` are visited right after the first root,
    so a clique listed there hangs off its first vertex as a star.
    """
    seen = [False] * g.n
    tree: list[Edge] = []
    roots = ([root_first[0]] if root_first else []) + list(range(g.n))
    priority = {v: i for i, v in enumerate(root_first)}
    for root in roots:
        if seen[root]:
            continue
        seen[root] = True
        q = deque([root])
        while q:
            u = q.popleft()
            for v in sorted(g.adjacency[u], key=lambda x: (priority.get(x, len(priority)), x)):
                if not seen[v]:
                    seen[v] = True
                    tree.append((min(u, v), max(u, v)))
                    q.append(v)
    return tree


def search_space(g: Graph, m: int, clique: Sequence[int] | None = None) -> SearchSpace:
    """Tree-canonical space, or clique-and-tree canonical when ``clique`` is given."""
    if m < 1:
        raise InvalidArgument("m must be >= 1")
    clique = tuple(clique or ())
    if clique and not g.is_clique(list(clique)):
        raise InvalidArgument(f"{[g.names[v] for v in clique]} is not a clique")
    fixed = set(spanning_forest(g, clique))
    for i, a in enumerate(clique):
        for b in clique[i + 1:]:
            fixed.add((min(a, b), max(a, b)))
    free = tuple(e for e in g.edges if e not in fixed)
    return SearchSpace(g, m, tuple(sorted(fixed)), free, clique)


@dataclass
class SearchResult:
    value: int
    cover: Cover
    table: PermTable
    space: SearchSpace
    covers_examined: int
    nodes_expanded: int

    def to_json(self) -> dict:
        return {
            "value": str(self.value),
            "exact": True,
            "m": self.space.m,
            "clique": [self.space.host.names[v] for v in self.space.clique],
            "free_edges": len(self.space.free),
            "covers_examined": self.covers_examined,
            "nodes_expanded": self.nodes_expanded,
            "argmin": self.table.to_json(self.space.host.names),
            "cover": self.cover.to_json(),
        }


def chunk_bounds(total: int, chunks: int = 256) -> list[tuple[int, int]]:
    """Split range(total) into at most ``chunks`` contiguous pieces of equal size (last shorter)."""
    if total <= 0:
        return []
    size = -(-total // chunks)
    return [(lo, min(lo + size, total)) for lo in range(0, total, size)]


class _Search:
    """Kernel inputs for sweeping a search space with the tail-edge trick."""

    def __init__(self, space: SearchSpace):
        self.space = space
        m = space.m
        _check_width(space.host.n, m)
        self.P, self.Pinv = perm_arrays(m)
        self.nperm = len(self.P)
        self.tail = space.free[-1]
        self.outer = space.free[:-1]
        base = space.cover([identity(m)] * len(space.free))
        self.plan = _plan(base, first=self.tail, skip=[self.tail])
        self.free_rows = np.array([self.plan.rows[e][0] for e in self.outer], dtype=np.int64)
        self.free_inv = np.array([self.plan.rows[e][1] for e in self.outer], dtype=np.int64)
        self.nouter = len(self.outer)
        self.outer_total = self.nperm ** self.nouter

    def args(self):
        p = self.plan
        return (p.n, self.space.m, p.nb_start, p.nb_end, p.nb_pos, p.nb_row, p.fmap, p.allowed,
                self.free_rows, self.free_inv, self.P, self.Pinv)

    def digits(self, o: int) -> list[int]:
        out = []
        for _ in range(self.nouter):
            out.append(o % self.nperm)
            o //= self.nperm
        return out[::-1]

    def perms(self, o: int, s: int) -> list[tuple[int, ...]]:
        return [tuple(int(k) for k in self.P[d]) for d in self.digits(o) + [s]]


def _run_chunks(fn, bounds, shards: int):
    """Run ``fn(lo, hi)`` per chunk; contiguous groups of chunks per worker; results in chunk order."""
    if shards <= 1 or len(bounds) <= 1:
        return [fn(lo, hi) for lo, hi in bounds]
    size = -(-len(bounds) // shards)
    groups = [bounds[i:i + size] for i in range(0, len(bounds), size)]
    with ThreadPoolExecutor(max_workers=len(groups)) as pool:
        parts = list(pool.map(lambda grp: [fn(lo, hi) for lo, hi in grp], groups))
    return [r for part in parts for r in part]


def _minimize(space: SearchSpace, budget: int, shards: int) -> SearchResult:
    if budget <= 0:
        raise InvalidArgument("budget must be positive")
    if shards < 1:
        raise InvalidArgument("shards must be >= 1")
    if not space.free:
        c = space.cover([])
        rep = count_report(c)
        return SearchResult(rep.count, c, PermTable((), ()), space, 1, rep.nodes_expanded)
    s = _Search(space)
    bounds = chunk_bounds(s.outer_total)
    allowed_chunks = []
    work = 0
    for lo, hi in bounds:
        w = (hi - lo) * s.nperm
        if work + w > budget:
            break
        allowed_chunks.append((lo, hi))
        work += w
    args = s.args()
    results = _run_chunks(lambda lo, hi: K.dp_search(*args, lo, hi, s.nouter), allowed_chunks, shards)
    best = None
    nodes = 0
    for val, o, sidx, nd in results:
        nodes += int(nd)
        if o >= 0 and (best is None or val < best[0]):
            best = (int(val), int(o), int(sidx))
    if len(allowed_chunks) < len(bounds):
        cover = space.cover(s.perms(best[1], best[2])) if best else None
        raise ResourceLimit(
            f"search space of {space.size} covers exceeds budget {budget}; "
            f"examined {work}, best so far is an upper bound only",
            best=None if best is None else best[0], argmin=cover, work=work,
        )
    perms = s.perms(best[1], best[2])
    return SearchResult(best[0], space.cover(perms), PermTable(tuple(perms), space.free), space, work, nodes)


def dp_color_function(g: Graph, m: int, budget: int = DEFAULT_BUDGET, shards: int = 1) -> SearchResult:
    """P_DP(g, m) by exhaustion over full covers canonical on a BFS spanning forest.

    The argmin is the first minimiser in lex order of the free-edge permutations.
    """
    return _minimize(search_space(g, m), budget, shards)


def canonical_dp_color_function(g: Graph, k: Sequence[int], m: int, budget: int = DEFAULT_BUDGET,
                                shards: int = 1) -> SearchResult:
    """Minimum over covers conducive to clique ``k``; its edges and a spanning forest are fixed."""
    if not k:
        raise InvalidArgument("clique must be nonempty")
    return _minimize(search_space(g, m, k), budget, shards)


def collect_below(space: SearchSpace, threshold: int, budget: int = DEFAULT_BUDGET, shards: int = 1,
                  cap: int = 1 << 18) -> list[tuple[tuple[int, ...], int]]:
    """Every cover in ``space`` with fewer than ``threshold`` colorings, as (digit tuple, count)."""
    if not space.free:
        c = count_colorings(space.cover([]))
        return [((), c)] if c < threshold else []
    s = _Search(space)
    if space.size > budget:
        raise ResourceLimit(f"search space of {space.size} covers exceeds budget {budget}")
    args = s.args()
    results = _run_chunks(lambda lo, hi: K.dp_collect(*args, lo, hi, s.nouter, threshold, cap),
                          chunk_bounds(s.outer_total), shards)
    out = []
    for arr, nodes in results:
        if nodes < 0:
            raise ResourceLimit(f"more than {cap} covers below {threshold} in one chunk")
        for o, sidx, cnt in arr:
            out.append((tuple(s.digits(int(o))) + (int(sidx),), int(cnt)))
    return out
