"""Reproduction suites behind ``dpglue verify``, plus seeded instance generators."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .counterexample import (
    ChainReport,
    build_g0,
    build_g0_cover,
    probe_conducive_gap,
    run_chain,
    verify_g0_decomposition,
    verify_g0_triangle_extension,
    verify_k3_twisted,
    _sweep_single,
)
from .counting import DEFAULT_BUDGET, count_colorings, count_with_prescribed, dp_color_function, search_space
from .errors import VerificationFailure
from .formulas import (
    clique_gluing_check,
    conducive_gluing_check,
    pdp_chorded_cycle,
    pdp_cycle,
    simplicial_check,
)
from .gluing import (
    best_gluing_permutation,
    chorded_cycle_cover,
    cycle_edge_gluing,
    shifted_cycle_cover,
)
from .graph import Graph, build_complete, build_cycle, chromatic_polynomial, glue_on_clique, list_triangles


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    data: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail, "data": self.data}


def _guard(name: str, fn: Callable[[], CheckResult]) -> CheckResult:
    try:
        return fn()
    except VerificationFailure as exc:
        return CheckResult(name, False, f"verification failure: {exc}")


# ---------------------------------------------------------------- instances


def random_connected_graph(rng: random.Random, n: int, density: float = 0.3,
                           seed_clique: int = 0) -> Graph:
    """Random tree on v1..vn plus each other pair with probability ``density``.

    The first ``seed_clique`` vertices are made pairwise adjacent.
    """
    edges = set()
    for i in range(1, n):
        edges.add((rng.randrange(i), i))
    for i in range(n):
        for j in range(i + 1, n):
            if j < seed_clique or rng.random() < density:
                edges.add((i, j))
    return Graph.from_names([f"v{i + 1}" for i in range(n)], [(f"v{a + 1}", f"v{b + 1}") for a, b in edges])


def _cliques_of(g: Graph, p: int) -> list[tuple[int, ...]]:
    if p == 1:
        return [(v,) for v in range(g.n)]
    if p == 2:
        return list(g.edges)
    if p == 3:
        return list_triangles(g)
    raise ValueError("p must be 1, 2 or 3")


def random_gluing_instance(rng: random.Random, p: int, m: int, parts: int = 2, min_vertices: int = 3,
                           max_vertices: int = 6, max_covers: int = 2 * 10**6,
                           density: float = 0.3) -> tuple[list[Graph], list[tuple[int, ...]]]:
    """Graphs with one chosen p-clique each whose gluing has a small search space."""
    while True:
        graphs, cliques = [], []
        for _ in range(parts):
            n = rng.randint(max(min_vertices, p), max_vertices)
            g = random_connected_graph(rng, n, density, seed_clique=p)
            k = rng.choice(_cliques_of(g, p))
            graphs.append(g)
            cliques.append(tuple(rng.sample(k, len(k))))
        glued, _ = glue_on_clique(graphs, cliques)
        if search_space(glued, m).size <= max_covers:
            return graphs, cliques


# ---------------------------------------------------------------- suites


def suite_lemma31(budget: int = DEFAULT_BUDGET, shards: int = 1, seed: int = 0) -> list[CheckResult]:
    g, idx = build_g0()
    c = build_g0_cover()
    out = []
    n = count_colorings(c)
    out.append(CheckResult("special cover count", n == 104, f"{n} colorings (expected 104)", {"count": str(n)}))
    chi = chromatic_polynomial(g)(4)
    out.append(CheckResult("chromatic value", chi == 120, f"P(G0,4) = {chi} (expected 120)", {"value": str(chi)}))
    per = [count_with_prescribed(c, {idx["w"]: j}) for j in range(4)]
    out.append(CheckResult("colorings through each label of w", per == [26] * 4, f"{per} (expected 26 each)"))

    def decomposition() -> CheckResult:
        rep = verify_g0_decomposition()
        return CheckResult("inclusion-exclusion on the tree subcover", True,
                           f"{rep.total_tree} - {rep.union} = {rep.remainder}", rep.to_json())

    out.append(_guard("inclusion-exclusion on the tree subcover", decomposition))
    return out


def suite_lemma32(budget: int = DEFAULT_BUDGET, shards: int = 1, seed: int = 0) -> list[CheckResult]:
    out = []
    g, _ = build_g0()
    tris = list_triangles(g)
    names = [[g.names[v] for v in t] for t in tris]
    one = _sweep_single(build_g0_cover(), tris, names)
    out.append(CheckResult("special cover, every triangle", one.holds, "all independent triples extend"
                           if one.holds else f"counterexample {one.counterexample}"))
    rep = verify_g0_triangle_extension(budget, shards)
    out.append(CheckResult("exhaustive sweep over tree-canonical full covers", rep.holds,
                           f"{rep.covers_checked} covers, {len(rep.triangles)} triangles",
                           {"covers_checked": rep.covers_checked, "counterexample": rep.counterexample}))
    k3 = verify_k3_twisted(4)
    out.append(CheckResult("non-canonical full 4-fold covers of K3", k3["min_twisted"] >= 25,
                           f"least count {k3['min_twisted']} over {k3['covers']} covers (canonical {k3['canonical']})", k3))
    return out


def suite_prop28(budget: int = DEFAULT_BUDGET, shards: int = 1, seed: int = 0) -> list[CheckResult]:
    out = []
    m = 3
    for n1, n2 in ((3, 3), (3, 4), (4, 4), (3, 5)):
        gl = cycle_edge_gluing(n1, n2)
        found = dp_color_function(gl.glued, m, budget, shards)
        want = pdp_chorded_cycle(n1, n2, m).value
        out.append(CheckResult(f"chorded cycle ({n1},{n2}) at m={m}", found.value == want,
                               f"search {found.value}, formula {want}, {found.covers_examined} covers",
                               {"search": str(found.value), "formula": str(want)}))
    c = chorded_cycle_cover(4, 4, m)
    n = count_colorings(c)
    out.append(CheckResult("shift-1/shift-2 amalgamation of two 4-cycles", n == 36, f"{n} colorings (expected 36)"))
    for n in (3, 4, 5, 6):
        found = dp_color_function(build_cycle(n), m, budget, shards).value
        want = pdp_cycle(n, m)
        out.append(CheckResult(f"cycle C{n} at m={m}", found == want, f"search {found}, formula {want}"))
    gl = cycle_edge_gluing(4, 4)
    parts = [shifted_cycle_cover(4, m, 1), shifted_cycle_cover(4, m, 2)]
    bound = best_gluing_permutation(gl, parts)
    out.append(CheckResult("gluing permutation scan", bound.d_min * m * (m - 1) <= bound.totals[0] * bound.totals[1],
                           f"min D = {bound.d_min}, totals {bound.totals}, sum {bound.d_sum}"))
    return out


def suite_thm12(budget: int = DEFAULT_BUDGET, shards: int = 1, seed: int = 0, instances: int = 20) -> list[CheckResult]:
    rng = random.Random(seed)
    out = []
    for i in range(instances):
        m = rng.choice((2, 3))
        graphs, cliques = random_gluing_instance(rng, 2, m, parts=rng.choice((2, 3)))
        chk = clique_gluing_check(graphs, cliques, m, budget, shards)
        ns = "+".join(str(g.n) for g in graphs)
        out.append(CheckResult(f"edge-gluing #{i + 1} ({ns} vertices, m={m})", chk.holds,
                               f"{chk.lhs} <= {chk.rhs}", chk.to_json()))
    return out


def _chain_cache(budget: int, shards: int, _memo: dict = {}) -> ChainReport:
    key = (budget, shards)
    if key not in _memo:
        _memo[key] = run_chain(4, 6, budget, shards)
    return _memo[key]


def suite_thm13(budget: int = DEFAULT_BUDGET, shards: int = 1, seed: int = 0, instances: int = 6) -> list[CheckResult]:
    out = []
    k4 = build_complete(4)
    fixed = [([k4, k4], [(0, 1, 2), (0, 1, 2)], 4), ([k4, build_complete(3)], [(1, 2, 3), (0, 1, 2)], 4)]
    rng = random.Random(seed)
    for _ in range(instances):
        graphs, cliques = random_gluing_instance(rng, 3, 3, min_vertices=4, max_vertices=6, density=0.2)
        fixed.append((graphs, cliques, 3))
    for i, (graphs, cliques, m) in enumerate(fixed):
        chk = conducive_gluing_check(graphs, cliques, m, budget, shards)
        ns = "+".join(str(g.n) for g in graphs)
        out.append(CheckResult(f"triangle-gluing #{i + 1} ({ns} vertices, m={m})", chk.holds,
                               f"{chk.lhs} <= {chk.rhs}", chk.to_json()))
    # simplicial vertices of degree 1 and 2
    c5 = build_cycle(5)
    pendant = Graph.from_names(c5.names + ("x",), c5.edge_names() + [("v1", "x")])
    c4 = build_cycle(4)
    ear = Graph.from_names(c4.names + ("x",), c4.edge_names() + [("v1", "x"), ("v2", "x")])
    for name, g in (("pendant vertex on C5", pendant), ("degree-2 ear on C4", ear)):
        chk = simplicial_check(g, g.index("x"), 3, budget, shards)
        out.append(CheckResult(f"{name}, m=3", chk.holds, f"{chk.lhs} <= {chk.rhs}", chk.to_json()))
    rep = _chain_cache(budget, shards)
    for prev, cur in zip(rep.steps, rep.steps[1:]):
        name = f"chain step G{cur.k} = G{prev.k} + K4 on {''.join(cur.triangle)}"
        if prev.conducive_next is None or cur.value is None:
            out.append(CheckResult(name, True, "undecided within budget (not counted)"))
            continue
        rhs = prev.conducive_next * (rep.m - 3)
        out.append(CheckResult(name, cur.value <= rhs, f"{cur.value} <= {prev.conducive_next} * 24 / 24"))
    return out


def suite_chain(budget: int = DEFAULT_BUDGET, shards: int = 1, seed: int = 0) -> list[CheckResult]:
    rep = _chain_cache(budget, shards)
    out = []
    g0 = rep.steps[0]
    out.append(CheckResult("exact P_DP(G0,4)", g0.exact and g0.value <= 104, f"{g0.value} (at most 104 required)"))
    k4 = dp_color_function(build_complete(4), 4, budget, shards).value
    out.append(CheckResult("P_DP(K4,4)", k4 == 24, f"{k4}, so the gluing bound for G_k is P_DP(G_(k-1),4)"))
    for s in rep.steps:
        ok = s.lower <= s.upper and (s.value is None or s.lower == s.value == s.upper)
        ok = ok and count_colorings(s.argmin) == s.upper
        val = s.value if s.exact else f"[{s.lower}, {s.upper}]"
        out.append(CheckResult(f"G{s.k} bounds", ok, f"P_DP = {val}; {s.provenance[-1]}"))
    v = rep.violations()
    out.append(CheckResult("some G_k breaks the triangle-gluing inequality", bool(v),
                           f"violations at k = {v}" if v else "no certified violation",
                           {"violations": v, "values": [None if s.value is None else str(s.value) for s in rep.steps]}))
    if v:
        k = v[0]
        d = rep.steps[k].graph.n - 1
        lhs, rest = rep.steps[k].value, rep.steps[k - 1].value
        fails = lhs is not None and rest is not None and lhs > (4 - 3) * rest
        out.append(CheckResult(f"degree-3 simplicial vertex d{k} of G{k}", fails,
                               f"P_DP(G{k},4) = {lhs} > (4 - 3) * P_DP(G{k - 1},4) = {rest}",
                               {"vertex": rep.steps[k].graph.names[d]}))
    return out


def suite_conducive_gap(budget: int = DEFAULT_BUDGET, shards: int = 1, seed: int = 0) -> list[CheckResult]:
    out = []
    g0, idx = build_g0()
    cases: list[tuple[str, Graph, Sequence[int], int, bool]] = [
        ("C4, edge", build_cycle(4), (0, 1), 3, True),
        ("C5, edge", build_cycle(5), (0, 1), 3, True),
        ("K4, edge", build_complete(4), (0, 1), 4, True),
        ("K4, triangle", build_complete(4), (0, 1, 2), 4, True),
        ("G0, triangle w v1 u1", g0, (idx["w"], idx["v1"], idx["u1"]), 4, False),
    ]
    for name, g, k, m, must_be_zero in cases:
        rep = probe_conducive_gap(g, k, m, budget, shards)
        ok = rep.gap == 0 if must_be_zero else rep.gap >= 0
        out.append(CheckResult(f"{name}, m={m}", ok, f"P_DP = {rep.pdp}, P'_DP = {rep.pdp_conducive}, gap {rep.gap}",
                               rep.to_json()))
    rep = _chain_cache(budget, shards)
    for s, nxt in zip(rep.steps, rep.steps[1:]):
        if s.conducive_next is None or s.value is None:
            continue
        gap = s.conducive_next - s.value
        out.append(CheckResult(f"G{s.k}, triangle {''.join(nxt.triangle)}, m=4", gap >= 0,
                               f"P_DP = {s.value}, P'_DP = {s.conducive_next}, gap {gap}"))
    return out


SUITES: dict[str, Callable[..., list[CheckResult]]] = {
    "lemma31": suite_lemma31,
    "lemma32": suite_lemma32,
    "prop28": suite_prop28,
    "thm12": suite_thm12,
    "thm13": suite_thm13,
    "chain": suite_chain,
    "conducive-gap": suite_conducive_gap,
}
