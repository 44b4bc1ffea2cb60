from itertools import permutations, product

import pytest
from hypothesis import given, settings, strategies as st

from conftest import brute_count, brute_dp, covers
from dpglue.cover import Cover, canonical_cover, is_conducive, random_full_cover
from dpglue.counting import (
    canonical_dp_color_function,
    chunk_bounds,
    collect_below,
    count_colorings,
    count_report,
    count_table,
    count_with_prescribed,
    dp_color_function,
    enumerate_colorings,
    greedy_extension_exists,
    search_space,
    spanning_forest,
)
from dpglue.errors import InvalidArgument, ResourceLimit
from dpglue.formulas import pdp_cycle
from dpglue.graph import Graph, build_complete, build_cycle, build_path, chromatic_polynomial


def diamond() -> Graph:
    return Graph.from_names(["a", "b", "c", "d"], [("a", "b"), ("a", "c"), ("b", "c"), ("b", "d"), ("c", "d")])


@settings(max_examples=150, deadline=None)
@given(covers(max_n=5, max_m=3))
def test_count_matches_brute_force(c):
    assert count_colorings(c) == brute_count(c)


@settings(max_examples=80, deadline=None)
@given(covers(max_n=5, max_m=3), st.data())
def test_prescribed_matches_brute_force(c, data):
    v = data.draw(st.integers(0, c.host.n - 1))
    j = data.draw(st.integers(0, c.m - 1))
    assert count_with_prescribed(c, {v: j}) == brute_count(c, {v: j})
    # summing over the labels of one vertex recovers the total
    assert sum(count_with_prescribed(c, {v: k}) for k in range(c.m)) == count_colorings(c)


@settings(max_examples=60, deadline=None)
@given(covers(max_n=5, max_m=3))
def test_table_and_enumeration_agree(c):
    keys = list(range(min(2, c.host.n)))
    t = count_table(c, keys)
    assert int(t.sum()) == count_colorings(c)
    for lab in product(range(c.m), repeat=len(keys)):
        assert int(t[lab]) == brute_count(c, dict(zip(keys, lab)))
    cols = enumerate_colorings(c)
    assert len(cols) == count_colorings(c) and cols == sorted(set(cols))


@settings(max_examples=60, deadline=None)
@given(covers(max_n=5, max_m=3), st.data())
def test_removing_cross_edges_never_loses_colorings(c, data):
    if not c.matchings:
        return
    e = data.draw(st.sampled_from(sorted(c.matchings)))
    sigma = list(c.matchings[e])
    j = data.draw(st.integers(0, c.m - 1))
    sigma[j] = None
    d = c.with_matching(e[0], e[1], sigma)
    assert count_colorings(d) >= count_colorings(c)


@settings(max_examples=40, deadline=None)
@given(covers(max_n=6, max_m=4, full=True))
def test_canonical_cover_count_is_chromatic(c):
    assert count_colorings(canonical_cover(c.host, c.m)) == chromatic_polynomial(c.host)(c.m)


def test_dependent_prescription_gives_zero():
    c = canonical_cover(build_path(2), 3)
    assert count_with_prescribed(c, [(0, 1), (0, 2)]) == 0
    assert count_with_prescribed(c, {0: 1, 1: 1}) == 0
    assert not greedy_extension_exists(c, {0: 1, 1: 1})
    with pytest.raises(InvalidArgument):
        count_with_prescribed(c, {0: 5})


def test_invalid_cover_is_rejected():
    with pytest.raises(InvalidArgument):
        count_colorings(Cover(build_path(2), 2, {(0, 1): (0, 0)}))


def test_count_report_json():
    rep = count_report(canonical_cover(build_cycle(4), 3), {0: 0})
    out = rep.to_json()
    assert out["count"] == "6" and out["prescribed"] == [["v1", 1]]


@pytest.mark.parametrize("g,m", [
    (build_cycle(3), 2), (build_cycle(3), 3), (build_cycle(4), 2), (build_cycle(4), 3),
    (build_cycle(5), 2), (diamond(), 2), (diamond(), 3), (build_complete(4), 2), (build_path(3), 3),
])
def test_dp_matches_unreduced_brute_force(g, m):
    assert dp_color_function(g, m).value == brute_dp(g, m)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
@pytest.mark.parametrize("m", [2, 3])
def test_dp_cycles(n, m):
    res = dp_color_function(build_cycle(n), m)
    assert res.value == pdp_cycle(n, m)
    assert res.covers_examined <= 6
    assert count_colorings(res.cover) == res.value


def test_search_space_shape():
    g = diamond()
    sp = search_space(g, 3)
    assert len(sp.fixed) == 3 and len(sp.free) == 2
    k = search_space(g, 3, [1, 2, 3])
    assert {(1, 2), (1, 3), (2, 3)} <= set(k.fixed)
    assert len(k.free) == 1
    assert len(spanning_forest(Graph(("a", "b", "c"), ((0, 1),)))) == 1
    with pytest.raises(InvalidArgument):
        search_space(g, 3, [0, 3])


def test_canonical_search_matches_brute_force():
    g = build_complete(4)
    m = 3
    c0 = canonical_dp_color_function(g, [0, 1, 2], m).value
    best = None
    perms = list(permutations(range(m)))
    for choice in product(perms, repeat=len(g.edges)):
        c = Cover(g, m, dict(zip(g.edges, choice)))
        if is_conducive(c, [0, 1, 2]):
            n = brute_count(c)
            best = n if best is None else min(best, n)
    assert c0 == best
    assert c0 >= dp_color_function(g, m).value


def test_budget_gives_upper_bound():
    g = build_complete(4)
    full = dp_color_function(g, 4)
    with pytest.raises(ResourceLimit) as exc:
        dp_color_function(g, 4, budget=5000)
    err = exc.value
    assert err.best is not None and err.best >= full.value
    assert 0 < err.work <= 5000
    assert count_colorings(err.argmin) == err.best
    with pytest.raises(InvalidArgument):
        dp_color_function(g, 4, budget=0)


@pytest.mark.parametrize("shards", [2, 3, 4, 7])
def test_shards_do_not_change_results(shards):
    g = build_complete(4)
    a = dp_color_function(g, 4, shards=1)
    b = dp_color_function(g, 4, shards=shards)
    assert (a.value, a.table, a.covers_examined) == (b.value, b.table, b.covers_examined)


def test_argmin_is_first_in_lex_order():
    g = build_complete(4)
    res = dp_color_function(g, 3)
    sp = res.space
    perms = list(permutations(range(3)))
    for choice in product(perms, repeat=len(sp.free)):
        n = count_colorings(sp.cover(choice))
        if n == res.value:
            assert tuple(choice) == res.table.perms
            break


def test_collect_below_matches_listing():
    g = diamond()
    sp = search_space(g, 3)
    got = collect_below(sp, 10)
    perms = list(permutations(range(3)))
    want = []
    for idx in product(range(6), repeat=len(sp.free)):
        n = count_colorings(sp.cover([perms[i] for i in idx]))
        if n < 10:
            want.append((idx, n))
    assert sorted(got) == sorted(want)


@given(st.integers(0, 10**6), st.integers(1, 300))
def test_chunk_bounds_partition(total, chunks):
    b = chunk_bounds(total, chunks)
    assert len(b) <= chunks
    flat = [x for lo, hi in b for x in (lo, hi)]
    assert flat == sorted(flat)
    assert sum(hi - lo for lo, hi in b) == total
    assert all(b[i][1] == b[i + 1][0] for i in range(len(b) - 1))


def test_random_full_cover_count_bounds(rng):
    g = build_cycle(6)
    for _ in range(10):
        c = random_full_cover(g, 3, rng)
        assert pdp_cycle(6, 3) <= count_colorings(c)
