"""Simple labeled graphs, the constructions used on them, and chromatic polynomials."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .errors import InvalidArgument, ResourceLimit
from .poly import IntPoly

Edge = tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """A finite simple undirected graph on vertices ``0..n-1``.

    ``edges`` is kept as a sorted tuple of pairs ``(u, v)`` with ``u < v``.
    """

    names: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        names = tuple(str(s) for s in self.names)
        if len(set(names)) != len(names):
            dup = [s for s, c in Counter(names).items() if c > 1]
            raise InvalidArgument(f"duplicate vertex names: {dup}")
        n = len(names)
        norm = set()
        for e in self.edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise InvalidArgument(f"self-loop at vertex {names[u] if 0 <= u < n else u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidArgument(f"edge {e} out of range for {n} vertices")
            key = (min(u, v), max(u, v))
            if key in norm:
                raise InvalidArgument(f"multi-edge {names[key[0]]}{names[key[1]]}")
            norm.add(key)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "edges", tuple(sorted(norm)))

    @classmethod
    def from_names(cls, names: Sequence[str], edges: Iterable[tuple[str, str]]) -> "Graph":
        idx = {s: i for i, s in enumerate(names)}
        try:
            return cls(tuple(names), tuple((idx[a], idx[b]) for a, b in edges))
        except KeyError as exc:
            raise InvalidArgument(f"edge mentions unknown vertex {exc.args[0]!r}") from None

    @property
    def n(self) -> int:
        return len(self.names)

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def _edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.names)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise InvalidArgument(f"no vertex named {name!r}") from None

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._edge_set

    def is_clique(self, vs: Sequence[int]) -> bool:
        if len(set(vs)) != len(vs):
            return False
        return all(self.has_edge(a, b) for a, b in combinations(vs, 2))

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        out = []
        for s in range(self.n):
            if seen[s]:
                continue
            comp, stack = [], [s]
            seen[s] = True
            while stack:
                x = stack.pop()
                comp.append(x)
                for y in self.adjacency[x]:
                    if not seen[y]:
                        seen[y] = True
                        stack.append(y)
            out.append(sorted(comp))
        return out

    def induced(self, vs: Sequence[int]) -> "Graph":
        """Induced subgraph on ``vs``; vertex ``vs[i]`` becomes index ``i``."""
        pos = {v: i for i, v in enumerate(vs)}
        if len(pos) != len(vs) or any(not 0 <= v < self.n for v in vs):
            raise InvalidArgument(f"bad vertex subset {list(vs)}")
        edges = [(pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos]
        return Graph(tuple(self.names[v] for v in vs), tuple(edges))

    def without_edges(self, drop: Iterable[Edge]) -> "Graph":
        gone = {(min(u, v), max(u, v)) for u, v in drop}
        missing = gone - self._edge_set
        if missing:
            raise InvalidArgument(f"not edges of the graph: {sorted(missing)}")
        return Graph(self.names, tuple(e for e in self.edges if e not in gone))

    def without_vertex(self, v: int) -> "Graph":
        return self.induced([x for x in range(self.n) if x != v])

    def rename(self, mapping: dict[str, str]) -> "Graph":
        return Graph(tuple(mapping.get(s, s) for s in self.names), self.edges)

    def edge_names(self) -> list[tuple[str, str]]:
        return [(self.names[u], self.names[v]) for u, v in self.edges]

    def to_json(self) -> dict:
        return {"vertices": list(self.names), "edges": [list(e) for e in self.edge_names()]}

    @classmethod
    def from_json(cls, data: dict) -> "Graph":
        try:
            names = [str(s) for s in data["vertices"]]
            edges = [(str(a), str(b)) for a, b in data["edges"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgument(f"malformed graph JSON: {exc}") from None
        return cls.from_names(names, edges)

    def dumps(self) -> str:
        return json.dumps(self.to_json()) + "\n"

    def __str__(self) -> str:
        es = " ".join(f"{a}-{b}" for a, b in self.edge_names())
        return f"Graph(n={self.n}, |E|={len(self.edges)}: {es})"


def build_path(n: int) -> Graph:
    if n < 1:
        raise InvalidArgument("path needs at least 1 vertex")
    return Graph(tuple(f"v{i + 1}" for i in range(n)), tuple((i, i + 1) for i in range(n - 1)))


def build_cycle(n: int) -> Graph:
    """C_n with vertices ``v1..vn`` in cyclic order."""
    if n < 3:
        raise InvalidArgument("a simple cycle needs at least 3 vertices")
    edges = [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    return Graph(tuple(f"v{i + 1}" for i in range(n)), tuple(edges))


def build_complete(n: int) -> Graph:
    if n < 1:
        raise InvalidArgument("complete graph needs at least 1 vertex")
    return Graph(tuple(f"v{i + 1}" for i in range(n)), tuple(combinations(range(n), 2)))


def build_theta(l1: int, l2: int, l3: int) -> Graph:
    """Ends ``a``, ``b`` joined by internally disjoint paths of lengths l1, l2, l3.

    Internal vertex ``k`` of path ``i`` is named ``p{i}_{k}``.
    """
    lengths = (l1, l2, l3)
    if min(lengths) < 1:
        raise InvalidArgument("path lengths must be >= 1")
    if sum(1 for l in lengths if l == 1) > 1:
        raise InvalidArgument("two paths of length 1 would create a multi-edge")
    names = ["a", "b"]
    edges = []
    for i, l in enumerate(lengths, start=1):
        prev = 0
        for k in range(1, l):
            names.append(f"p{i}_{k}")
            cur = len(names) - 1
            edges.append((prev, cur))
            prev = cur
        edges.append((prev, 1))
    return Graph(tuple(names), tuple(edges))


def cone(g: Graph, name: str = "w") -> tuple[Graph, int]:
    """K1 joined to ``g``. The universal vertex is placed first, at index 0."""
    if g.n == 0:
        raise InvalidArgument("cone of an empty graph")
    if name in g.names:
        raise InvalidArgument(f"vertex name {name!r} already used")
    edges = [(0, v + 1) for v in range(g.n)] + [(u + 1, v + 1) for u, v in g.edges]
    return Graph((name,) + g.names, tuple(edges)), 0


def contract_edge(g: Graph, e: Edge) -> Graph:
    """G·e. The merged vertex takes the lower index and the name ``a+b``.

    Loops are dropped and parallel edges merged, so C3·e is P2.
    """
    a, b = min(e), max(e)
    if not g.has_edge(a, b):
        raise InvalidArgument(f"{e} is not an edge")

    def img(x: int) -> int:
        if x == b:
            return a
        return x - 1 if x > b else x

    edges = {(min(img(u), img(v)), max(img(u), img(v))) for u, v in g.edges if {u, v} != {a, b}}
    edges = {(u, v) for u, v in edges if u != v}
    names = list(g.names)
    names[a] = f"{g.names[a]}+{g.names[b]}"
    del names[b]
    return Graph(tuple(names), tuple(edges))


def glue_on_clique(
    graphs: Sequence[Graph],
    cliques: Sequence[Sequence[int]],
    glued_names: Sequence[str] | None = None,
) -> tuple[Graph, list[list[int]]]:
    """K_p-gluing: identify ``cliques[i][q]`` across all inputs as one vertex ``u_{q+1}``.

    Result order is the p glued vertices, then the rest of each input graph in
    turn. Returns the glued graph and, per input, a map from its vertex indices
    into the result.
    """
    if len(graphs) < 2 or len(graphs) != len(cliques):
        raise InvalidArgument("need n >= 2 graphs, one clique each")
    p = len(cliques[0])
    if p < 1 or any(len(k) != p for k in cliques):
        raise InvalidArgument("all cliques must have the same size p >= 1")
    for i, (g, k) in enumerate(zip(graphs, cliques)):
        if not g.is_clique(list(k)):
            raise InvalidArgument(f"vertex set {list(k)} is not a clique of graph {i + 1}")
    glued_names = list(glued_names) if glued_names else [f"u{q + 1}" for q in range(p)]
    if len(glued_names) != p:
        raise InvalidArgument("need one name per glued vertex")

    rest = [[v for v in range(g.n) if v not in set(k)] for g, k in zip(graphs, cliques)]
    counts = Counter(glued_names)
    for g, r in zip(graphs, rest):
        counts.update(g.names[v] for v in r)
    names = list(glued_names)
    maps: list[list[int]] = []
    for i, (g, k, r) in enumerate(zip(graphs, cliques, rest)):
        mp = [-1] * g.n
        for q, v in enumerate(k):
            mp[v] = q
        for v in r:
            s = g.names[v]
            mp[v] = len(names)
            names.append(s if counts[s] == 1 else f"{s}_{i + 1}")
        maps.append(mp)
    edges = set()
    for g, mp in zip(graphs, maps):
        for u, v in g.edges:
            a, b = mp[u], mp[v]
            edges.add((min(a, b), max(a, b)))
    return Graph(tuple(names), tuple(edges)), maps


def tessellate(g: Graph, t: Sequence[int], name: str | None = None) -> Graph:
    """T(G, abc): append a new vertex adjacent to exactly the triangle ``t``."""
    if len(t) != 3 or not g.is_clique(list(t)):
        raise InvalidArgument(f"{list(t)} is not a triangle")
    if name is None:
        k = 1
        while f"d{k}" in g.names:
            k += 1
        name = f"d{k}"
    elif name in g.names:
        raise InvalidArgument(f"vertex name {name!r} already used")
    d = g.n
    return Graph(g.names + (name,), g.edges + tuple((x, d) for x in t))


def list_triangles(g: Graph) -> list[tuple[int, int, int]]:
    """All triangles as sorted index triples, in lexicographic order."""
    out = []
    for a, b in g.edges:
        for c in sorted(g.adjacency[a] & g.adjacency[b]):
            if c > b:
                out.append((a, b, c))
    return sorted(out)


def is_simplicial(g: Graph, v: int) -> bool:
    return g.is_clique(sorted(g.adjacency[v]))


# Deletion-contraction on compact minors ``(k, edges)`` with vertices 0..k-1.

def _drop_vertex(k: int, edges: frozenset, v: int) -> tuple[int, frozenset]:
    def sh(x):
        return x - 1 if x > v else x

    return k - 1, frozenset((sh(a), sh(b)) for a, b in edges if a != v and b != v)


def _contract(k: int, edges: frozenset, a: int, b: int) -> tuple[int, frozenset]:
    # a < b; b merges into a
    def img(x):
        if x == b:
            return a
        return x - 1 if x > b else x

    out = set()
    for u, v in edges:
        x, y = img(u), img(v)
        if x != y:
            out.add((min(x, y), max(x, y)))
    return k - 1, frozenset(out)


def chromatic_polynomial(g: Graph, max_vertices: int = 16) -> IntPoly:
    """Exact chromatic polynomial P(G, m).

    Simplicial vertices are peeled off with a factor (m - deg); otherwise an
    edge at a minimum-degree vertex is deleted and contracted. Minors are
    memoized on their edge sets.
    """
    if g.n > max_vertices:
        raise ResourceLimit(f"{g.n} vertices exceeds the bound of {max_vertices}")
    memo: dict[tuple[int, frozenset], IntPoly] = {}
    x = IntPoly.x()

    def solve(k: int, edges: frozenset) -> IntPoly:
        if not edges:
            return x**k
        key = (k, edges)
        hit = memo.get(key)
        if hit is not None:
            return hit
        adj: list[set[int]] = [set() for _ in range(k)]
        for a, b in edges:
            adj[a].add(b)
            adj[b].add(a)
        res = None
        for v in sorted(range(k), key=lambda v: len(adj[v])):
            nb = adj[v]
            if all(b in adj[a] for a, b in combinations(sorted(nb), 2)):
                res = (x - IntPoly.constant(len(nb))) * solve(*_drop_vertex(k, edges, v))
                break
        if res is None:
            v = min(range(k), key=lambda v: (len(adj[v]), v))
            u = min(adj[v])
            a, b = min(u, v), max(u, v)
            res = solve(k, edges - {(a, b)}) - solve(*_contract(k, edges, a, b))
        memo[key] = res
        return res

    return solve(g.n, frozenset(g.edges))
