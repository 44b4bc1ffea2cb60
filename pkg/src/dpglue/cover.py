"""m-fold covers of a graph, stored as one partial matching per edge.

Labels are 0-based internally (``0..m-1``); JSON files use 1-based labels.
A matching on edge ``(u, v)`` with ``u < v`` is a tuple ``sigma`` of length m
where ``sigma[j] = k`` means the cross-edge ``(u, j)(v, k)`` is present and
``None`` means ``(u, j)`` has no partner in ``L(v)``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import InvalidArgument
from .graph import Edge, Graph

Matching = tuple  # tuple[int | None, ...]
Perm = tuple[int, ...]


def identity(m: int) -> Perm:
    return tuple(range(m))


def invert(sigma: Sequence[int | None], m: int | None = None) -> Matching:
    m = len(sigma) if m is None else m
    out: list[int | None] = [None] * m
    for j, k in enumerate(sigma):
        if k is not None:
            out[k] = j
    return tuple(out)


def compose(f: Sequence[int | None], g: Sequence[int | None]) -> Matching:
    """``f ∘ g``: first apply g, then f."""
    return tuple(None if k is None else f[k] for k in g)


def is_permutation(sigma: Sequence[int | None], m: int) -> bool:
    return len(sigma) == m and sorted(k for k in sigma if k is not None) == list(range(m)) and None not in sigma


@dataclass(frozen=True)
class Violation:
    axiom: str
    edge: tuple[str, str] | None
    detail: str

    def __str__(self) -> str:
        where = f" on {self.edge[0]}{self.edge[1]}" if self.edge else ""
        return f"axiom ({self.axiom}){where}: {self.detail}"


@dataclass(frozen=True, eq=False)
class Cover:
    """An m-fold cover of ``host``.

    Parts L(u) are implicit m-cliques. Edges missing from ``matchings`` carry
    the empty matching. Construction does not validate; call :func:`validate`.
    """

    host: Graph
    m: int
    matchings: Mapping[Edge, Matching] = field(default_factory=dict)

    def __post_init__(self):
        norm = {}
        for (u, v), sigma in dict(self.matchings).items():
            sigma = tuple(sigma)
            if u > v:
                u, v, sigma = v, u, invert(sigma, self.m) if _injective(sigma) else _raw_flip(sigma, self.m)
            norm[(u, v)] = sigma
        object.__setattr__(self, "matchings", norm)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cover):
            return NotImplemented
        return self.host == other.host and self.m == other.m and self._full_map() == other._full_map()

    def __hash__(self):
        return hash((self.host, self.m, tuple(sorted(self._full_map().items()))))

    def _full_map(self) -> dict[Edge, Matching]:
        empty = (None,) * self.m
        out = {e: self.matchings.get(e, empty) for e in self.host.edges}
        out.update({e: s for e, s in self.matchings.items() if e not in out})
        return out

    def sigma(self, u: int, v: int) -> Matching:
        """Matching oriented from u to v: entry j is the partner of (u, j) in L(v)."""
        if u < v:
            return self.matchings.get((u, v), (None,) * self.m)
        return invert(self.matchings.get((v, u), (None,) * self.m), self.m)

    @property
    def is_full(self) -> bool:
        return all(is_permutation(self.matchings.get(e, ()), self.m) for e in self.host.edges)

    def cross_edges(self) -> Iterable[tuple[tuple[int, int], tuple[int, int]]]:
        for (u, v), sigma in sorted(self.matchings.items()):
            for j, k in enumerate(sigma):
                if k is not None:
                    yield (u, j), (v, k)

    def with_matching(self, u: int, v: int, sigma: Sequence[int | None]) -> "Cover":
        new = dict(self.matchings)
        if u < v:
            new[(u, v)] = tuple(sigma)
        else:
            new[(v, u)] = invert(sigma, self.m)
        return Cover(self.host, self.m, new)

    def to_json(self) -> dict:
        names = self.host.names
        rows = []
        for (u, v) in self.host.edges:
            sigma = self.matchings.get((u, v), (None,) * self.m)
            rows.append({"edge": [names[u], names[v]], "map": [None if k is None else k + 1 for k in sigma]})
        return {"m": self.m, "graph": self.host.to_json(), "matchings": rows}

    @classmethod
    def from_json(cls, data: dict) -> "Cover":
        try:
            m = int(data["m"])
            host = Graph.from_json(data["graph"])
            mats = {}
            for row in data["matchings"]:
                a, b = row["edge"]
                u, v = host.index(str(a)), host.index(str(b))
                sigma = tuple(None if k is None else int(k) - 1 for k in row["map"])
                if (min(u, v), max(u, v)) in mats:
                    raise InvalidArgument(f"edge {a}{b} listed twice")
                if u < v:
                    mats[(u, v)] = sigma
                else:
                    mats[(v, u)] = invert(sigma, m) if _injective(sigma) else _raw_flip(sigma, m)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidArgument):
                raise
            raise InvalidArgument(f"malformed cover JSON: {exc}") from None
        return cls(host, m, mats)

    def dumps(self) -> str:
        return json.dumps(self.to_json()) + "\n"


def _injective(sigma: Sequence[int | None]) -> bool:
    vals = [k for k in sigma if k is not None]
    return len(vals) == len(set(vals))


def _raw_flip(sigma: Sequence[int | None], m: int) -> Matching:
    # Non-injective data cannot be inverted; keep it as-is so validate() can report it.
    return tuple(sigma)


def canonical_cover(g: Graph, m: int) -> Cover:
    """Full cover with the identity matching on every edge."""
    if m < 1:
        raise InvalidArgument("m must be >= 1")
    return Cover(g, m, {e: identity(m) for e in g.edges})


def validate(c: Cover) -> list[Violation]:
    """Every violation of the cover axioms; an empty list means valid."""
    out: list[Violation] = []
    names = c.host.names
    if c.m < 1:
        out.append(Violation("1", None, f"fold number m={c.m} must be >= 1"))
        return out
    for (u, v), sigma in sorted(c.matchings.items()):
        pretty = (names[u] if u < len(names) else str(u), names[v] if v < len(names) else str(v))
        if not (0 <= u < c.host.n and 0 <= v < c.host.n) or not c.host.has_edge(u, v):
            out.append(Violation("3", pretty, "cross-edges between parts of non-adjacent vertices"))
            continue
        if len(sigma) != c.m:
            out.append(Violation("4", pretty, f"map has length {len(sigma)}, expected {c.m}"))
            continue
        bad = [k for k in sigma if k is not None and not (isinstance(k, int) and 0 <= k < c.m)]
        if bad:
            out.append(Violation("1", pretty, f"labels out of range: {[k + 1 for k in bad]}"))
            continue
        seen: dict[int, int] = {}
        for j, k in enumerate(sigma):
            if k is None:
                continue
            if k in seen:
                out.append(Violation(
                    "4", pretty,
                    f"not a matching: ({names[u]},{seen[k] + 1}) and ({names[u]},{j + 1}) "
                    f"both meet ({names[v]},{k + 1})",
                ))
            seen[k] = j
    return out


def subcover_induced(c: Cover, u_set: Sequence[int]) -> Cover:
    """Subcover induced by ``u_set``; vertex ``u_set[i]`` becomes index ``i``."""
    if any(not 0 <= v < c.host.n for v in u_set):
        raise InvalidArgument(f"vertex subset {list(u_set)} out of range")
    sub = c.host.induced(list(u_set))
    pos = {v: i for i, v in enumerate(u_set)}
    mats = {}
    for (u, v) in c.host.edges:
        if u in pos and v in pos:
            mats[(pos[u], pos[v])] = c.sigma(u, v)
    return Cover(sub, c.m, mats)


def subcover_corresponding(c: Cover, g_sub: Graph) -> Cover:
    """Subcover corresponding to a subgraph, matched to the host by vertex name."""
    try:
        idx = [c.host.index(s) for s in g_sub.names]
    except InvalidArgument:
        raise InvalidArgument("subgraph has vertices not in the host") from None
    mats = {}
    for (a, b) in g_sub.edges:
        u, v = idx[a], idx[b]
        if not c.host.has_edge(u, v):
            raise InvalidArgument(f"{g_sub.names[a]}{g_sub.names[b]} is not a host edge")
        mats[(a, b)] = c.sigma(u, v)
    return Cover(g_sub, c.m, mats)


Relabeling = tuple  # tuple[Perm, ...], one permutation per host vertex


def identity_relabeling(n: int, m: int) -> Relabeling:
    return tuple(identity(m) for _ in range(n))


def relabel(c: Cover, r: Sequence[Sequence[int]]) -> Cover:
    """Rename label j of part L(u) to r[u][j].

    Each matching becomes ``r_v ∘ sigma ∘ r_u^{-1}``.
    """
    if len(r) != c.host.n or any(not is_permutation(tuple(p), c.m) for p in r):
        raise InvalidArgument("relabeling needs one permutation of [m] per vertex")
    mats = {}
    for (u, v), sigma in c.matchings.items():
        inv_u = invert(r[u])
        mats[(u, v)] = compose(r[v], compose(sigma, inv_u))
    return Cover(c.host, c.m, mats)


def has_canonical_labeling(c: Cover) -> tuple[bool, Relabeling | None]:
    """Decide whether some relabeling turns every matching into the identity.

    Labels are propagated along a BFS spanning forest rooted at the lowest
    index of each component (identity at the root); the witness is valid iff
    every non-tree edge also becomes the identity.
    """
    if not c.is_full:
        raise InvalidArgument("canonical labeling is only decided for full covers")
    n, m = c.host.n, c.m
    r: list[Perm | None] = [None] * n
    for root in range(n):
        if r[root] is not None:
            continue
        r[root] = identity(m)
        q = deque([root])
        while q:
            u = q.popleft()
            for v in sorted(c.host.adjacency[u]):
                if r[v] is None:
                    r[v] = compose(r[u], invert(c.sigma(u, v)))
                    q.append(v)
    witness = tuple(r)
    out = relabel(c, witness)
    ok = all(out.matchings[e] == identity(m) for e in c.host.edges)
    return ok, (witness if ok else None)


def is_twisted(c: Cover, u: int, v: int) -> bool:
    if not c.host.has_edge(u, v):
        raise InvalidArgument(f"({u}, {v}) is not an edge")
    if not c.is_full:
        raise InvalidArgument("twistedness is defined for full covers")
    return c.sigma(u, v) != identity(c.m)


def is_conducive(c: Cover, k: Sequence[int]) -> bool:
    """Full, and the subcover induced by the clique ``k`` has a canonical labeling."""
    if not c.host.is_clique(list(k)):
        raise InvalidArgument(f"{list(k)} is not a clique")
    if not c.is_full:
        return False
    return has_canonical_labeling(subcover_induced(c, list(k)))[0]


def clique_canonical_relabeling(c: Cover, k: Sequence[int]) -> Relabeling:
    """Relabeling of the whole cover that makes every matching inside ``k`` the identity.

    Labels of ``k[0]`` are kept; vertices outside ``k`` are untouched.
    Raises if the cover is not conducive to ``k``.
    """
    if not is_conducive(c, k):
        raise InvalidArgument("cover is not conducive to the clique")
    m = c.m
    r = [identity(m) for _ in range(c.host.n)]
    for x in k[1:]:
        r[x] = invert(c.sigma(k[0], x))
    return tuple(r)


def twist_edges(c: Cover) -> list[Edge]:
    """Edges whose matching is not the identity under the current labels."""
    return [e for e in c.host.edges if c.matchings.get(e) != identity(c.m)]


def random_full_cover(g: Graph, m: int, rng) -> Cover:
    """Uniformly random permutation on every edge (``rng`` is a ``random.Random``)."""
    mats = {}
    for e in g.edges:
        p = list(range(m))
        rng.shuffle(p)
        mats[e] = tuple(p)
    return Cover(g, m, mats)


def random_conducive_cover(g: Graph, m: int, k: Sequence[int], rng) -> Cover:
    """Random full cover whose restriction to clique ``k`` is relabel-equivalent to canonical."""
    c = random_full_cover(g, m, rng)
    frame = {}
    for x in k:
        p = list(range(m))
        rng.shuffle(p)
        frame[x] = tuple(p)
    for a, b in combinations(k, 2):
        # r_b ∘ r_a^{-1} is identity in the frame where both parts are renamed by r
        c = c.with_matching(a, b, compose(invert(frame[b]), frame[a]))
    return c


@dataclass(frozen=True)
class PermTable:
    """Permutations of [m], one per slot (free edges of a search, or f_2..f_n of a gluing)."""

    perms: tuple[Perm, ...]
    edges: tuple[Edge, ...] | None = None

    def __post_init__(self):
        perms = tuple(tuple(p) for p in self.perms)
        for p in perms:
            if sorted(p) != list(range(len(p))):
                raise InvalidArgument(f"{[k + 1 for k in p]} is not a permutation")
        object.__setattr__(self, "perms", perms)
        if self.edges is not None:
            if len(self.edges) != len(perms):
                raise InvalidArgument("one permutation per edge expected")
            object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))

    def __len__(self) -> int:
        return len(self.perms)

    def to_json(self, names: Sequence[str] | None = None) -> dict:
        out: dict = {"perms": [[k + 1 for k in p] for p in self.perms]}
        if self.edges is not None:
            out["edges"] = [[names[u], names[v]] if names else [u, v] for u, v in self.edges]
        return out

    @classmethod
    def from_json(cls, data: dict, host: Graph | None = None) -> "PermTable":
        try:
            perms = tuple(tuple(int(k) - 1 for k in p) for p in data["perms"])
            edges = None
            if "edges" in data:
                if host is None:
                    edges = tuple((int(a), int(b)) for a, b in data["edges"])
                else:
                    edges = tuple(tuple(sorted((host.index(a), host.index(b)))) for a, b in data["edges"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidArgument):
                raise
            raise InvalidArgument(f"malformed permutation table: {exc}") from None
        return cls(perms, edges)
