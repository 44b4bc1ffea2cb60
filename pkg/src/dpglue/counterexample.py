"""The triangle-gluing counterexample: G0, its special 4-fold cover, and the tessellation chain."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels as K
from .cover import Cover, canonical_cover, identity, is_conducive
from .counting import (
    DEFAULT_BUDGET,
    _Search,
    _plan,
    _run_chunks,
    canonical_dp_color_function,
    chunk_bounds,
    collect_below,
    count_colorings,
    count_with_prescribed,
    dp_color_function,
    enumerate_colorings,
    perm_arrays,
    search_space,
)
from .errors import InvalidArgument, ResourceLimit, VerificationFailure
from .gluing import Gluing, best_gluing_permutation
from .graph import Graph, build_complete, chromatic_polynomial, list_triangles, tessellate

G0_NAMES = ("w", "v1", "v2", "u1", "u2", "u3")


def build_g0() -> tuple[Graph, dict[str, int]]:
    """K1 joined with Theta(2,2,2): w universal, v1 and v2 adjacent to each of u1, u2, u3."""
    edges = [("w", x) for x in G0_NAMES[1:]]
    edges += [(v, u) for v in ("v1", "v2") for u in ("u1", "u2", "u3")]
    g = Graph.from_names(G0_NAMES, edges)
    return g, {s: i for i, s in enumerate(G0_NAMES)}


def build_g0_cover() -> Cover:
    """Identity everywhere except (v1,j)(u2,j+1) and (v1,j)(u3,j+2), labels mod 4."""
    g, ix = build_g0()
    m = 4
    mats = {e: identity(m) for e in g.edges}
    mats[(ix["v1"], ix["u2"])] = tuple((j + 1) % m for j in range(m))
    mats[(ix["v1"], ix["u3"])] = tuple((j + 2) % m for j in range(m))
    return Cover(g, m, mats)


# ---------------------------------------------------------------- counting argument


@dataclass
class DecompositionReport:
    total_tree: int
    sizes: dict[str, int]
    intersections: dict[str, int]
    union: int
    remainder: int
    direct: int
    removed_cross_edges: list

    def to_json(self) -> dict:
        return {
            "tree_colorings": self.total_tree,
            "sizes": self.sizes,
            "intersections": self.intersections,
            "union": self.union,
            "remainder": self.remainder,
            "direct_count": self.direct,
            "removed_cross_edges": self.removed_cross_edges,
        }


def _residual(c: Cover, v: int, j: int) -> tuple[Cover, list[list[int]]]:
    """Cover left after choosing (v, j) for a universal vertex v.

    Every other vertex loses exactly one label; survivors are renumbered in
    increasing order. Returns the cover of G - v and each vertex's surviving
    original labels.
    """
    g, m = c.host, c.m
    if g.degree(v) != g.n - 1:
        raise InvalidArgument("residual cover needs a universal vertex")
    keep_v = [x for x in range(g.n) if x != v]
    sub = g.induced(keep_v)
    kept = []
    for x in keep_v:
        gone = c.sigma(v, x)[j]
        kept.append([k for k in range(m) if k != gone])
    mats = {}
    for a, b in sub.edges:
        sigma = c.sigma(keep_v[a], keep_v[b])
        new = []
        for ka in kept[a]:
            kb = sigma[ka]
            new.append(kept[b].index(kb) if kb is not None and kb in kept[b] else None)
        mats[(a, b)] = tuple(new)
    return Cover(sub, m - 1, mats), kept


def verify_g0_decomposition() -> DecompositionReport:
    """Recount N((w,1)) by inclusion-exclusion over the tree G' - {v1u2, v1u3}."""
    c = build_g0_cover()
    g, ix = build_g0()
    res, kept = _residual(c, ix["w"], 0)
    sub = res.host
    sx = {s: sub.index(s) for s in sub.names}
    removed = [(sx["v1"], sx["u2"]), (sx["v1"], sx["u3"])]
    tree = sub.without_edges(removed)
    tree_cover = Cover(tree, res.m, {e: res.matchings[e] for e in tree.edges})
    if not tree_cover.is_full:
        raise VerificationFailure("tree subcover is not full")
    cols = enumerate_colorings(tree_cover)

    def orig(x: int, k: int) -> int:
        return kept[x][k] + 1

    sets: dict[str, set] = {}
    described = []
    names = iter("ABCD")
    for a, b in removed:
        for ja, jb in enumerate(res.matchings[(a, b)]):
            if jb is None:
                continue
            key = next(names)
            sets[key] = {col for col in cols if col[a] == ja and col[b] == jb}
            described.append([key, [sub.names[a], orig(a, ja)], [sub.names[b], orig(b, jb)]])
    if len(sets) != 4:
        raise VerificationFailure(f"expected 4 removed cross-edges, found {len(sets)}")
    inter = {}
    keys = sorted(sets)
    for i, x in enumerate(keys):
        for y in keys[i + 1:]:
            inter[x + y] = len(sets[x] & sets[y])
    union = len(set().union(*sets.values()))
    remainder = len(cols) - union
    direct = count_with_prescribed(c, {ix["w"]: 0})
    sizes = {k: len(v) for k, v in sets.items()}
    rep = DecompositionReport(len(cols), sizes, inter, union, remainder, direct, described)
    expected = {"tree": (rep.total_tree, 48), "union": (union, 22), "remainder": (remainder, 26),
                "direct": (direct, 26), "A∩C": (inter["AC"], 2)}
    for k in keys:
        expected[f"|{k}|"] = (sizes[k], 6)
    for pair, val in inter.items():
        if pair != "AC":
            expected[pair] = (val, 0)
    bad = {k: v for k, v in expected.items() if v[0] != v[1]}
    if bad:
        raise VerificationFailure("decomposition mismatch: " + ", ".join(f"{k}={a} (expected {b})" for k, (a, b) in bad.items()))
    return rep


# ---------------------------------------------------------------- triangle precolorings


def _pair_ok_masks(m: int) -> np.ndarray:
    """pair_ok[e, perm]: triples (a, b, c) not joined on edge e (0: ab, 1: ac, 2: bc)."""
    P, _ = perm_arrays(m)
    out = np.zeros((3, len(P)), dtype=np.uint64)
    for pi, perm in enumerate(P):
        for a in range(m):
            for b in range(m):
                for c in range(m):
                    bit = np.uint64(1) << np.uint64(a * m * m + b * m + c)
                    if perm[a] != b:
                        out[0, pi] |= bit
                    if perm[a] != c:
                        out[1, pi] |= bit
                    if perm[b] != c:
                        out[2, pi] |= bit
    return out


@dataclass
class SweepReport:
    holds: bool
    covers_checked: int
    triangles: list[list[str]]
    counterexample: dict | None = None

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        return {"holds": self.holds, "covers_checked": self.covers_checked,
                "triangles": self.triangles, "counterexample": self.counterexample}


def triangle_extension_sweep(g: Graph, m: int, budget: int = DEFAULT_BUDGET, shards: int = 1) -> SweepReport:
    """Over every tree-canonical full m-fold cover of g, does every independent
    triple on every triangle extend to an H-coloring?"""
    if m**3 > 64:
        raise InvalidArgument("triangle sweep needs m^3 <= 64")
    tris = list_triangles(g)
    space = search_space(g, m)
    if space.size > budget:
        raise ResourceLimit(f"{space.size} covers exceed budget {budget}")
    names = [[g.names[v] for v in t] for t in tris]
    if not tris:
        return SweepReport(True, space.size, names)
    pair_ok = _pair_ok_masks(m)
    if not space.free:
        return _sweep_single(space.cover([]), tris, names)
    s = _Search(space)
    slot = {e: i for i, e in enumerate(s.outer)}
    slot[s.tail] = s.nouter
    tri_pos = np.array([[s.plan.pos[v] for v in t] for t in tris], dtype=np.int64)
    tri_slot = np.array([[slot.get(e, -1) for e in ((a, b), (a, c), (b, c))] for a, b, c in tris], dtype=np.int64)
    args = s.args()
    results = _run_chunks(
        lambda lo, hi: K.triangle_sweep(*args, lo, hi, s.nouter, tri_pos, tri_slot, pair_ok),
        chunk_bounds(s.outer_total), shards,
    )
    for o, si, t in results:
        if o >= 0:
            cover = space.cover(s.perms(int(o), int(si)))
            rep = _sweep_single(cover, [tris[t]], [names[t]], covers=space.size)
            if rep.holds:
                raise VerificationFailure("sweep kernel reported a failure that does not reproduce")
            return rep
    return SweepReport(True, space.size, names)


def _sweep_single(c: Cover, tris, names, covers: int = 1) -> SweepReport:
    m = c.m
    for t, nm in zip(tris, names):
        a, b, cc = t
        for la in range(m):
            for lb in range(m):
                for lc in range(m):
                    if c.sigma(a, b)[la] == lb or c.sigma(a, cc)[la] == lc or c.sigma(b, cc)[lb] == lc:
                        continue
                    if count_with_prescribed(c, {a: la, b: lb, cc: lc}) == 0:
                        return SweepReport(False, covers, names, {
                            "cover": c.to_json(), "triangle": nm, "labels": [la + 1, lb + 1, lc + 1]})
    return SweepReport(True, covers, names)


def verify_g0_triangle_extension(budget: int = DEFAULT_BUDGET, shards: int = 1) -> SweepReport:
    """Exhaustive check on G0 at m = 4."""
    g, _ = build_g0()
    return triangle_extension_sweep(g, 4, budget, shards)


def verify_k3_twisted(m: int = 4) -> dict:
    """Smallest count among full m-fold covers of K3 without a canonical labeling."""
    g = build_complete(3)
    space = search_space(g, m)
    P, _ = perm_arrays(m)
    counts = [count_colorings(space.cover([tuple(p)])) for p in P[1:]]
    return {"m": m, "canonical": count_colorings(canonical_cover(g, m)), "min_twisted": min(counts),
            "covers": len(counts)}


# ---------------------------------------------------------------- tessellation chain


@dataclass
class ChainStep:
    k: int
    graph: Graph
    triangle: list[str] | None
    value: int | None
    lower: int
    upper: int
    provenance: list[str] = field(default_factory=list)
    argmin: Cover | None = None
    conducive_next: int | None = None  # P'_DP(G_k, t_{k+1}, m) when known exactly

    @property
    def exact(self) -> bool:
        return self.value is not None

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "graph": self.graph.to_json(),
            "triangle": self.triangle,
            "exact": self.exact,
            "value": None if self.value is None else str(self.value),
            "lower": str(self.lower),
            "upper": str(self.upper),
            "provenance": self.provenance,
            "argmin": None if self.argmin is None else self.argmin.to_json(),
            "conducive_next": None if self.conducive_next is None else str(self.conducive_next),
        }


@dataclass
class ChainReport:
    m: int
    triangles: list[list[str]]
    steps: list[ChainStep]
    candidates: int
    elapsed: float

    def violations(self) -> list[int]:
        """Indices k where P_DP(G_k) > P_DP(G_{k-1}) * P_DP(K4, m) / (m)_3 is certified.

        The factor P_DP(K4, m) / (m)_3 is m - 3.
        """
        out = []
        for prev, cur in zip(self.steps, self.steps[1:]):
            if cur.lower > prev.upper * (self.m - 3):
                out.append(cur.k)
        return out

    def first_violation(self) -> int | None:
        v = self.violations()
        return v[0] if v else None

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "triangle_order": self.triangles,
            "steps": [s.to_json() for s in self.steps],
            "g0_candidates": self.candidates,
            "violations": self.violations(),
            "verdict": (f"triangle-gluing inequality fails at k = {self.first_violation()}"
                        if self.violations() else "undecided"),
            "elapsed_seconds": round(self.elapsed, 3),
        }


class _Tessellated:
    """Counts for G0 covers extended by new vertices on chosen triangles.

    The cover of G_k is canonical on the star at w (which reaches every d_i).
    Its free part is a G0 cover plus maps phi_a, phi_b from the other two
    triangle vertices into L(d). Given an H0-coloring I, the new vertex d has
    m - |{I(w), phi_a(I(a)), phi_b(I(b))}| free labels, and the d_i are
    pairwise non-adjacent, so the count is a sum over I of a product.
    """

    def __init__(self, g0: Graph, m: int, tris: Sequence[tuple[int, int, int]]):
        self.g0, self.m, self.tris = g0, m, list(tris)
        P, _ = perm_arrays(m)
        self.P = P
        # options[q] = (identity on w, phi_a, phi_b)
        self.options = [(tuple(range(m)), tuple(int(x) for x in a), tuple(int(x) for x in b))
                        for a in P for b in P]
        opt = np.array(self.options, dtype=np.int64)
        self.G = K.free_label_counts(np.zeros(m**3, np.int64), opt, m)
        self.tri_pos = np.array(self.tris, dtype=np.int64)

    def colorings(self, c: Cover) -> np.ndarray:
        cols = np.array(enumerate_colorings(c), dtype=np.int64).reshape(-1, self.g0.n)
        return K.coloring_triples(cols, self.tri_pos, self.m)

    def twisted(self, c: Cover, t: int) -> bool:
        w, a, b = self.tris[t]
        return not is_conducive(c, [w, a, b])

    def canonical_option(self, c: Cover, t: int) -> tuple:
        # phi aligning L(d) with the triangle's canonical frame rooted at w
        w, a, b = self.tris[t]
        inv = lambda s: tuple(int(x) for x in np.argsort(s))
        return (tuple(range(self.m)), inv(c.sigma(w, a)), inv(c.sigma(w, b)))

    def min_excess(self, trip: np.ndarray, t: int) -> int:
        """min over options of sum_I (g(I) - 1): a lower bound on the extra colorings of one twist."""
        hist = np.bincount(trip[:, t], minlength=self.m**3)
        return int((self.G @ hist).min()) - int(hist.sum())

    def solve(self, trip: np.ndarray, ts: Sequence[int], upper: int) -> tuple[int, dict[int, int]] | None:
        """Exact min over options of sum_I prod_{t in ts} g_t(I), if below ``upper``."""
        if not ts:
            n = len(trip)
            return (n, {}) if n < upper else None
        per = []
        for t in ts:
            vecs = self.G[:, trip[:, t]]  # options x colorings
            uniq, first = np.unique(vecs, axis=0, return_index=True)
            keep = _pareto(uniq)
            per.append((t, uniq[keep], first[keep]))
        per.sort(key=lambda x: len(x[1]))
        floor = [np.min(v, axis=0) for _, v, _ in per]
        suffix = [np.ones(len(trip), dtype=np.int64)]
        for f in reversed(floor):
            suffix.append(suffix[-1] * f)
        suffix = suffix[::-1]
        best = [upper, None]
        choice = [0] * len(per)

        def dfs(i: int, acc: np.ndarray):
            if i == len(per):
                val = int(acc.sum())
                if val < best[0]:
                    best[0] = val
                    best[1] = list(choice)
                return
            _, vecs, idx = per[i]
            nxt = acc * vecs
            bounds = (nxt * suffix[i + 1]).sum(axis=1)
            for r in np.argsort(bounds, kind="stable"):
                if bounds[r] >= best[0]:
                    break
                choice[i] = int(idx[r])
                dfs(i + 1, nxt[r])

        dfs(0, np.ones(len(trip), dtype=np.int64))
        if best[1] is None:
            return None
        return best[0], {per[i][0]: best[1][i] for i in range(len(per))}

    def build_cover(self, gk: Graph, c0: Cover, ks: Sequence[int], options: dict[int, int]) -> Cover:
        mats = dict(c0.matchings)
        for i, t in enumerate(ks):
            d = self.g0.n + i
            w, a, b = self.tris[t]
            opt = self.options[options[t]] if t in options else self.canonical_option(c0, t)
            for x, phi in zip((w, a, b), opt):
                mats[(x, d)] = phi
        return Cover(gk, self.m, mats)


def _candidate_bounds(space, digits: np.ndarray, tess: "_Tessellated"):
    """Coloring counts and per-triangle least excess for every candidate, in one kernel call.

    A triangle w a b is twisted iff its edge ab is not the identity; that
    needs both edges at w fixed to the identity by the search space.
    """
    m = space.m
    base = space.cover([identity(m)] * len(space.free))
    plan = _plan(base)
    fixed = set(space.fixed)
    slots = []
    for w, a, b in tess.tris:
        if (w, a) not in fixed or (w, b) not in fixed or (a, b) not in space.free:
            raise InvalidArgument("triangle bounds need both edges at w fixed and ab free")
        slots.append(space.free.index((a, b)))
    P, Pinv = perm_arrays(m)
    counts, excess = K.tessellation_bounds(
        plan.n, m, plan.nb_start, plan.nb_end, plan.nb_pos, plan.nb_row, plan.fmap, plan.allowed,
        np.array([plan.rows[e][0] for e in space.free], dtype=np.int64),
        np.array([plan.rows[e][1] for e in space.free], dtype=np.int64),
        P, Pinv, digits, np.array([[plan.pos[v] for v in t] for t in tess.tris], dtype=np.int64),
        np.array(slots, dtype=np.int64), tess.G)
    return counts, excess, slots


def _pareto(vecs: np.ndarray) -> np.ndarray:
    """Indices of rows not dominated (<= everywhere, < somewhere) by another row."""
    order = np.argsort(vecs.sum(axis=1), kind="stable")
    kept: list[int] = []
    for i in order:
        v = vecs[i]
        if any(np.all(vecs[j] <= v) for j in kept):
            continue
        kept.append(int(i))
    return np.array(sorted(kept), dtype=np.int64)


def chain_graphs(kmax: int = 6) -> tuple[list[Graph], list[tuple[int, int, int]]]:
    """G_0, ..., G_kmax with triangles taken in lexicographic order (w v1 u1 first)."""
    g0, _ = build_g0()
    tris = list_triangles(g0)
    gs = [g0]
    for k in range(kmax):
        gs.append(tessellate(gs[-1], tris[k], name=f"d{k + 1}"))
    return gs, tris


def run_chain(m: int = 4, kmax: int = 6, budget: int = DEFAULT_BUDGET, shards: int = 1,
              solve_cap: int = 10**6) -> ChainReport:
    """Exact P_DP(G_k, m) for k = 0..kmax by a two-phase bound on G0 covers.

    Phase one collects every tree-canonical G0 cover with fewer colorings than
    the canonical value P(G0, m), which bounds every P_DP(G_k, m) from above.
    Phase two minimises over the new vertices' maps for each candidate in
    order of a lower bound, stopping once the bound reaches the incumbent.
    The same pass restricted to G0 covers with t_{k+1} untwisted gives the
    conducive minimum P'_DP(G_k, t_{k+1}, m).
    """
    t0 = time.perf_counter()
    gs, tris = chain_graphs(kmax)
    g0 = gs[0]
    if len(tris) < kmax:
        raise InvalidArgument(f"G0 has only {len(tris)} triangles")
    space = search_space(g0, m)
    chrom = chromatic_polynomial(g0)(m)
    cands = collect_below(space, chrom, budget=budget, shards=shards)
    tess = _Tessellated(g0, m, tris[:kmax])

    digits = np.array([d for d, _ in cands], dtype=np.int64).reshape(-1, len(space.free))
    counts_a, excess_a, slots = _candidate_bounds(space, digits, tess)
    if not np.array_equal(counts_a, np.array([c for _, c in cands], dtype=np.int64)):
        raise VerificationFailure("candidate recount disagrees with the sweep")
    twist = digits[:, slots] != 0 if len(cands) else np.zeros((0, kmax), dtype=bool)
    prov0 = f"phase 1: {len(cands)} tree-canonical G0 covers with fewer than {chrom} colorings"

    def cover_of(i: int) -> Cover:
        return space.cover([tuple(int(x) for x in tess.P[d]) for d in digits[i]])

    def minimise(k: int, mask: np.ndarray):
        upper, arg = chrom, None
        lb = counts_a + excess_a[:, :k].sum(axis=1) if k else counts_a.copy()
        solved, exact, stop_lb = 0, True, None
        for i in np.argsort(lb, kind="stable"):
            if not mask[i]:
                continue
            if lb[i] >= upper:
                stop_lb = int(lb[i])
                break
            if solved >= solve_cap:
                exact, stop_lb = False, int(lb[i])
                break
            ts = [t for t in range(k) if twist[i, t]]
            c0 = cover_of(i)
            res = tess.solve(tess.colorings(c0), ts, upper)
            solved += 1
            if res is not None:
                upper = res[0]
                arg = tess.build_cover(gs[k], c0, range(k), res[1])
        if arg is None:
            arg = canonical_cover(gs[k], m)
        check = count_colorings(arg)
        if check != upper:
            raise VerificationFailure(f"G{k}: argmin recount {check} != {upper}")
        lower = upper if exact else min(upper, stop_lb)
        return upper, lower, exact, arg, solved

    names = [[g0.names[v] for v in t] for t in tris[:kmax]]
    every = np.ones(len(cands), dtype=bool)
    steps = []
    for k in range(kmax + 1):
        upper, lower, exact, arg, solved = minimise(k, every)
        prov = [prov0, f"upper bound {chrom} from the canonical cover",
                f"phase 2: {solved} candidates solved exactly"]
        prov.append("exact: every remaining candidate has lower bound >= incumbent" if exact
                    else f"stopped at solve cap {solve_cap}; lower bound from next candidate")
        conducive = None
        if k < kmax:
            cu, _, cexact, _, _ = minimise(k, ~twist[:, k])
            conducive = cu if cexact else None
        steps.append(ChainStep(k, gs[k], names[k - 1] if k else None, upper if exact else None,
                               lower, upper, prov, arg, conducive))
    for prev, cur in zip(steps, steps[1:]):
        # each new vertex has at least one free label in every coloring
        if cur.lower < prev.lower:
            raise VerificationFailure(f"chain not monotone at k={cur.k}")
    return ChainReport(m, names, steps, len(cands), time.perf_counter() - t0)


def amalgamation_upper_bound(prev: Cover, tri: Sequence[int], m: int = 4) -> int | None:
    """Best D over f for gluing ``prev`` with a canonical K4 on ``tri``, if ``prev`` is conducive to it."""
    if not is_conducive(prev, list(tri)):
        return None
    k4 = build_complete(4)
    gl = Gluing.build([prev.host, k4], [tuple(tri), (0, 1, 2)])
    return best_gluing_permutation(gl, [prev, canonical_cover(k4, m)]).d_min


# ---------------------------------------------------------------- conducive gap


@dataclass
class GapReport:
    pdp: int
    pdp_conducive: int
    clique: list[str]
    m: int

    @property
    def gap(self) -> int:
        return self.pdp_conducive - self.pdp

    def to_json(self) -> dict:
        return {"pdp": str(self.pdp), "pdp_conducive": str(self.pdp_conducive), "gap": str(self.gap),
                "clique": self.clique, "m": self.m}


def probe_conducive_gap(g: Graph, k: Sequence[int], m: int, budget: int = DEFAULT_BUDGET,
                        shards: int = 1) -> GapReport:
    a = dp_color_function(g, m, budget, shards).value
    b = canonical_dp_color_function(g, k, m, budget, shards).value
    if b < a:
        raise VerificationFailure("conducive minimum below the unrestricted minimum")
    return GapReport(a, b, [g.names[v] for v in k], m)
