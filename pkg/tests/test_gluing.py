import random
from itertools import permutations

import pytest

from conftest import brute_count
from dpglue.checks import random_gluing_instance
from dpglue.cover import PermTable, canonical_cover, identity, random_conducive_cover, random_full_cover
from dpglue.counting import count_colorings, count_table
from dpglue.errors import InvalidArgument
from dpglue.gluing import (
    Gluing,
    amalgamate_cliques,
    amalgamate_edges,
    amalgamate_fold,
    best_gluing_permutation,
    chorded_cycle_cover,
    cycle_edge_gluing,
    product_count_clique,
    product_count_edge,
    separated_cover,
    shifted_cycle_cover,
    verify_pair_lower_bound,
)
from dpglue.graph import Graph, build_complete, build_cycle


def _random_perm(rng, m):
    p = list(range(m))
    rng.shuffle(p)
    return tuple(p)


@pytest.mark.parametrize("seed", range(25))
def test_edge_product_count_matches_amalgamation(seed):
    rng = random.Random(seed)
    m = rng.choice((2, 3, 4))
    graphs, cliques = random_gluing_instance(rng, 2, m, max_vertices=5)
    gl = Gluing.build(graphs, cliques)
    covers = [random_full_cover(g, m, rng) for g in graphs]
    f = _random_perm(rng, m)
    c = amalgamate_edges(gl, covers, PermTable((f,)))
    assert product_count_edge(gl, covers, f) == count_colorings(c) == brute_count(c)


@pytest.mark.parametrize("seed", range(25))
def test_clique_product_count_matches_amalgamation(seed):
    rng = random.Random(100 + seed)
    m = rng.choice((3, 4))
    parts = rng.choice((2, 3))
    graphs, cliques = random_gluing_instance(rng, 3, m, parts=parts, max_vertices=5)
    gl = Gluing.build(graphs, cliques)
    covers = [random_conducive_cover(g, m, k, rng) for g, k in zip(graphs, cliques)]
    F = PermTable(tuple(_random_perm(rng, m) for _ in range(parts - 1)))
    c = amalgamate_cliques(gl, covers, F)
    assert product_count_clique(gl, covers, F) == count_colorings(c)
    assert count_colorings(amalgamate_fold(gl, covers, F)) == count_colorings(c)


@pytest.mark.parametrize("seed", range(10))
def test_separating_an_amalgamation_recovers_counts(seed):
    rng = random.Random(200 + seed)
    graphs, cliques = random_gluing_instance(rng, 3, 4, max_vertices=5)
    gl = Gluing.build(graphs, cliques)
    covers = [random_conducive_cover(g, 4, k, rng) for g, k in zip(graphs, cliques)]
    c = amalgamate_cliques(gl, covers, PermTable((_random_perm(rng, 4),)))
    for i, orig in enumerate(covers):
        sep = separated_cover(gl, c, i)
        assert sep.host == orig.host
        assert count_colorings(sep) == count_colorings(orig)
        # the clique count table is the original up to a relabeling of its labels
        a = sorted(count_table(sep, list(cliques[i])).ravel())
        b = sorted(count_table(orig, list(cliques[i])).ravel())
        assert a == b


def test_amalgamation_rejects_non_conducive_input():
    k4 = build_complete(4)
    gl = Gluing.build([k4, k4], [(0, 1, 2), (0, 1, 2)])
    twisted = canonical_cover(k4, 3).with_matching(1, 2, (1, 2, 0))
    with pytest.raises(InvalidArgument):
        amalgamate_cliques(gl, [twisted, canonical_cover(k4, 3)], PermTable((identity(3),)))
    with pytest.raises(InvalidArgument):
        amalgamate_cliques(gl, [canonical_cover(k4, 3)] * 2, PermTable((identity(4),)))


def test_illustrated_triangle_amalgamation():
    # K4 - e and a triangle with a pendant edge, m = 3, glued on a triangle;
    # labels below are 1-based as drawn
    g1 = Graph.from_names(["u11", "u12", "u13", "v1"],
                          [("u11", "u12"), ("u12", "u13"), ("u11", "u13"), ("u11", "v1"), ("u12", "v1")])
    g2 = Graph.from_names(["u21", "u22", "u23", "v2"],
                          [("u21", "u22"), ("u22", "u23"), ("u21", "u23"), ("u23", "v2")])
    one = lambda xs: tuple(k - 1 for k in xs)
    h1 = canonical_cover(g1, 3).with_matching(0, 3, one([2, 3, 1])).with_matching(1, 3, one([3, 1, 2]))
    h2 = canonical_cover(g2, 3).with_matching(2, 3, one([3, 2, 1]))
    gl = Gluing.build([g1, g2], [(0, 1, 2), (0, 1, 2)])
    F = PermTable((one([2, 3, 1]),))
    h = amalgamate_cliques(gl, [h1, h2], F)
    names = gl.glued.names
    assert names == ("u1", "u2", "u3", "v1", "v2")
    assert h.sigma(0, 3) == one([2, 3, 1])
    assert h.sigma(1, 3) == one([3, 1, 2])
    assert h.sigma(2, 4) == one([2, 1, 3])
    for a, b in ((0, 1), (1, 2), (0, 2)):
        assert h.sigma(a, b) == identity(3)
    assert count_colorings(h) == product_count_clique(gl, [h1, h2], F) == brute_count(h) == 18


def test_best_gluing_permutation_averaging():
    gl = cycle_edge_gluing(4, 4)
    parts = [shifted_cycle_cover(4, 3, 1), shifted_cycle_cover(4, 3, 2)]
    b = best_gluing_permutation(gl, parts)
    assert len(b.d_all) == 6
    assert b.d_sum == sum(b.d_all) == 1 * b.totals[0] * b.totals[1]
    assert b.d_min == min(b.d_all)
    assert b.average_bound * 6 == b.d_sum
    d = [count_colorings(amalgamate_edges(gl, parts, PermTable((p,)))) for p in permutations(range(3))]
    assert tuple(d) == b.d_all


def test_chorded_cycle_construction():
    assert count_colorings(chorded_cycle_cover(4, 4, 3)) == 36


def test_pair_lower_bound():
    assert verify_pair_lower_bound(build_cycle(5), 3).holds
    rep = verify_pair_lower_bound(build_cycle(4), 3)
    # even cycles miss the hypothesis: some pair extends to fewer than P_DP/(m(m-1)) colorings
    assert not rep.holds and rep.min_pair_count == 2 and rep.pdp == 15


def test_gluing_from_json(tmp_path):
    (tmp_path / "c4.json").write_text(build_cycle(4).dumps())
    data = {"parts": [{"graph": "c4.json", "clique": ["v1", "v2"]},
                      {"graph": build_cycle(3).to_json(), "clique": ["v2", "v3"]}],
            "glued_names": ["u", "v"]}
    gl = Gluing.from_json(data, tmp_path)
    assert gl.glued.n == 5 and gl.p == 2 and gl.glued.names[:2] == ("u", "v")
    with pytest.raises(InvalidArgument):
        Gluing.from_json({"parts": [{"clique": []}]})
