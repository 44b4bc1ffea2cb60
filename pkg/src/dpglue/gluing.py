"""Covers of clique-gluings: separation, amalgamation and product counts."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from pathlib import Path
from typing import Sequence

import numpy as np

from .cover import (
    Cover,
    PermTable,
    clique_canonical_relabeling,
    identity,
    invert,
    is_conducive,
    relabel,
)
from .counting import count_table, dp_color_function, search_space
from .errors import InvalidArgument, ResourceLimit, VerificationFailure
from .graph import Graph, build_cycle, glue_on_clique


@dataclass(frozen=True)
class Gluing:
    """Inputs G_i with cliques K_i, and their K_p-gluing with per-input vertex maps."""

    graphs: tuple[Graph, ...]
    cliques: tuple[tuple[int, ...], ...]
    glued: Graph
    maps: tuple[tuple[int, ...], ...]

    @classmethod
    def build(cls, graphs: Sequence[Graph], cliques: Sequence[Sequence[int]],
              glued_names: Sequence[str] | None = None) -> "Gluing":
        g, maps = glue_on_clique(graphs, cliques, glued_names)
        return cls(tuple(graphs), tuple(tuple(k) for k in cliques), g, tuple(tuple(mp) for mp in maps))

    @property
    def p(self) -> int:
        return len(self.cliques[0])

    @property
    def n(self) -> int:
        return len(self.graphs)

    @classmethod
    def from_json(cls, data: dict, base: Path | None = None) -> "Gluing":
        """``{"parts": [{"graph": path-or-object, "clique": [names]}], "glued_names": [...]}``."""
        graphs, cliques = [], []
        try:
            for part in data["parts"]:
                src = part["graph"]
                if isinstance(src, str):
                    path = Path(src) if base is None else Path(base) / src
                    src = json.loads(path.read_text(encoding="utf-8"))
                g = Graph.from_json(src)
                graphs.append(g)
                cliques.append([g.index(s) for s in part["clique"]])
        except (KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
            raise InvalidArgument(f"malformed gluing description: {exc}") from None
        return cls.build(graphs, cliques, data.get("glued_names"))


def separated_cover(gl: Gluing, c: Cover, i: int) -> Cover:
    """The cover of G_i read off from a cover of the glued graph."""
    if not 0 <= i < gl.n:
        raise InvalidArgument(f"part index {i} out of range")
    if c.host != gl.glued:
        raise InvalidArgument("cover is not a cover of the glued graph")
    g, mp = gl.graphs[i], gl.maps[i]
    return Cover(g, c.m, {(a, b): c.sigma(mp[a], mp[b]) for a, b in g.edges})


def _clique_frame(c: Cover, k: Sequence[int]) -> Cover:
    # Rename labels so every matching inside k is the identity; for an edge
    # (u, v) this renames L(v) by sigma_uv^{-1}.
    if not c.is_full:
        raise InvalidArgument("amalgamation needs full covers")
    if not is_conducive(c, k):
        raise InvalidArgument("cover is not conducive to its clique")
    return relabel(c, clique_canonical_relabeling(c, k))


def _check_inputs(gl: Gluing, covers: Sequence[Cover], F: PermTable) -> int:
    if len(covers) != gl.n:
        raise InvalidArgument("one cover per glued graph expected")
    m = covers[0].m
    for c, g in zip(covers, gl.graphs):
        if c.m != m:
            raise InvalidArgument("all covers must share the fold number")
        if c.host != g:
            raise InvalidArgument("cover host does not match its graph")
    if len(F) != gl.n - 1 or any(len(f) != m for f in F.perms):
        raise InvalidArgument(f"need {gl.n - 1} permutations of [{m}]")
    return m


def amalgamate_cliques(gl: Gluing, covers: Sequence[Cover], F: PermTable) -> Cover:
    """F-amalgamated cover of the glued graph.

    Each input is first relabeled so its clique is canonical (labels of the
    first clique vertex kept). Label j of a glued vertex corresponds to j in
    the first input and to f_i(j) in input i.
    """
    m = _check_inputs(gl, covers, F)
    mats = {}
    for i, (c, k, mp) in enumerate(zip(covers, gl.cliques, gl.maps)):
        c = _clique_frame(c, k)
        if i > 0:
            r = [identity(m)] * c.host.n
            f_inv = invert(F.perms[i - 1])
            for v in k:
                r[v] = f_inv
            c = relabel(c, r)
        for a, b in c.host.edges:
            x, y = mp[a], mp[b]
            sigma = c.sigma(a, b)
            if x > y:
                x, y, sigma = y, x, invert(sigma)
            mats[(x, y)] = sigma
    for a in range(gl.p):
        for b in range(a + 1, gl.p):
            mats[(a, b)] = identity(m)
    out = Cover(gl.glued, m, mats)
    if not is_conducive(out, list(range(gl.p))):
        raise VerificationFailure("amalgamated cover is not conducive to the glued clique")
    return out


def amalgamate_edges(gl: Gluing, covers: Sequence[Cover], F: PermTable) -> Cover:
    """Edge-gluing case (p = 2); any full cover is conducive to an edge."""
    if gl.p != 2:
        raise InvalidArgument("edge amalgamation needs p = 2")
    return amalgamate_cliques(gl, covers, F)


def amalgamate_fold(gl: Gluing, covers: Sequence[Cover], F: PermTable) -> Cover:
    """The same amalgamation built as a left fold of binary steps.

    The result is a cover of an isomorphic gluing whose vertices are named as
    the binary steps produce them; only its count is meant to be compared.
    """
    _check_inputs(gl, covers, F)
    g, c, k = gl.graphs[0], covers[0], gl.cliques[0]
    for i in range(1, gl.n):
        step = Gluing.build([g, gl.graphs[i]], [k, gl.cliques[i]])
        c = amalgamate_cliques(step, [c, covers[i]], PermTable((F.perms[i - 1],)))
        g, k = step.glued, tuple(range(gl.p))
    return c


def _framed_tables(gl: Gluing, covers: Sequence[Cover]) -> list[np.ndarray]:
    return [count_table(_clique_frame(c, k), list(k)).astype(object) for c, k in zip(covers, gl.cliques)]


def _lift(table: np.ndarray, f: Sequence[int]) -> np.ndarray:
    # out[j_1..j_p] = table[f(j_1), ..., f(j_p)]
    idx = np.ix_(*([list(f)] * table.ndim))
    return table[idx]


def product_count_clique(gl: Gluing, covers: Sequence[Cover], F: PermTable) -> int:
    """D = sum over j in [m]^p of N(P_1j, H_1) * prod_i N(P_i,gamma_i(j), H_i)."""
    _check_inputs(gl, covers, F)
    tables = _framed_tables(gl, covers)
    acc = tables[0]
    for t, f in zip(tables[1:], F.perms):
        acc = acc * _lift(t, f)
    return int(acc.sum())


def product_count_edge(gl: Gluing, covers: Sequence[Cover], f: Sequence[int]) -> int:
    """Edge case of :func:`product_count_clique` for two covers and one permutation."""
    if gl.p != 2 or gl.n != 2:
        raise InvalidArgument("product_count_edge needs two covers glued on an edge")
    return product_count_clique(gl, covers, PermTable((tuple(f),)))


@dataclass
class GluingBound:
    table: PermTable
    d_min: int
    d_sum: int
    totals: tuple[int, int]
    d_all: tuple[int, ...]

    @property
    def average_bound(self) -> Fraction:
        m = len(self.table.perms[0])
        return Fraction(self.d_sum, math.factorial(m))


def best_gluing_permutation(gl: Gluing, covers: Sequence[Cover], budget: int = 10**6) -> GluingBound:
    """Scan every f in S_m (lex order) for two covers; return the first minimiser of D_f.

    Also checks sum_f D_f = (m-p)! T_1 T_2 and min D_f <= T_1 T_2 / (m)_p.
    """
    if gl.n != 2:
        raise InvalidArgument("best_gluing_permutation handles two covers; fold for more")
    m = covers[0].m
    p = gl.p
    if math.factorial(m) > budget:
        raise ResourceLimit(f"{m}! permutations exceed budget {budget}")
    _check_inputs(gl, covers, PermTable((identity(m),)))
    t1, t2 = _framed_tables(gl, covers)
    perms = list(permutations(range(m)))
    vals = [int((t1 * _lift(t2, f)).sum()) for f in perms]
    T1, T2 = int(t1.sum()), int(t2.sum())
    d_sum = sum(vals)
    if d_sum != math.factorial(m - p) * T1 * T2:
        raise VerificationFailure(f"sum of D over S_m is {d_sum}, expected {math.factorial(m - p)}*{T1}*{T2}")
    d_min = min(vals)
    falling = math.perm(m, p)
    if d_min * falling > T1 * T2:
        raise VerificationFailure("minimum D exceeds the averaging bound")
    return GluingBound(PermTable((perms[vals.index(d_min)],)), d_min, d_sum, (T1, T2), tuple(vals))


# ---------------------------------------------------------------- chorded cycles


def cycle_edge_gluing(n1: int, n2: int) -> Gluing:
    """C_{n1} and C_{n2} glued on the edge v1 v2 of each."""
    return Gluing.build([build_cycle(n1), build_cycle(n2)], [(0, 1), (0, 1)], ["u", "v"])


def shifted_cycle_cover(n: int, m: int, shift: int) -> Cover:
    """Identity on C_n except the edge v1 v2, which carries j -> j + shift (mod m)."""
    g = build_cycle(n)
    mats = {e: identity(m) for e in g.edges}
    mats[(0, 1)] = tuple((j + shift) % m for j in range(m))
    return Cover(g, m, mats)


def chorded_cycle_cover(n1: int, n2: int, m: int) -> Cover:
    """Cover of the chorded cycle built from shift-1 and shift-2 cycle covers with f = id.

    For two even cycles this attains the both-even closed form.
    """
    gl = cycle_edge_gluing(n1, n2)
    parts = [shifted_cycle_cover(n1, m, 1), shifted_cycle_cover(n2, m, 2)]
    return amalgamate_edges(gl, parts, PermTable((identity(m),)))


@dataclass
class PairBoundReport:
    holds: bool
    pdp: int
    bound: Fraction
    min_pair_count: int
    witness: dict | None
    covers_checked: int

    def __bool__(self) -> bool:
        return self.holds


def verify_pair_lower_bound(g: Graph, m: int, budget: int = 10**6) -> PairBoundReport:
    """Check N({(u,j),(v,k)}) >= P_DP(g,m) / (m(m-1)) over every tree-canonical full cover,
    edge uv and non-adjacent label pair."""
    space = search_space(g, m)
    if space.size > budget:
        raise ResourceLimit(f"{space.size} covers exceed budget {budget}", work=0)
    pdp = dp_color_function(g, m, budget=budget).value
    bound = Fraction(pdp, m * (m - 1))
    best, witness = None, None
    for perms in _all_tables(m, len(space.free)):
        c = space.cover(perms)
        for u, v in g.edges:
            tab = count_table(c, [u, v])
            sigma = c.sigma(u, v)
            for j in range(m):
                for k in range(m):
                    if sigma[j] == k:
                        continue
                    val = int(tab[j, k])
                    if best is None or val < best:
                        best = val
                        witness = {"cover": c.to_json(), "edge": [g.names[u], g.names[v]], "labels": [j + 1, k + 1]}
    best = 0 if best is None else best
    return PairBoundReport(best >= bound, pdp, bound, best, witness, space.size)


def _all_tables(m: int, k: int):
    perms = list(permutations(range(m)))
    if k == 0:
        yield []
        return
    idx = [0] * k
    while True:
        yield [perms[i] for i in idx]
        pos = k - 1
        while pos >= 0 and idx[pos] == len(perms) - 1:
            idx[pos] = 0
            pos -= 1
        if pos < 0:
            return
        idx[pos] += 1
