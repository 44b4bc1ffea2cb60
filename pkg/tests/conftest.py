"""Brute-force oracles and shared fixtures.

Every oracle here walks the definitions directly with itertools, sharing no
code with the kernels under test.
"""

from __future__ import annotations

import random
import sys
from itertools import permutations, product

import pytest
from hypothesis import strategies as st

from dpglue.cover import Cover
from dpglue.graph import Graph


def brute_count(c: Cover, prescribed: dict[int, int] | None = None) -> int:
    """Independent transversals of the cover graph, by listing every label tuple."""
    g = c.host
    pres = prescribed or {}
    cross = set()
    for (u, v), sigma in c.matchings.items():
        for j, k in enumerate(sigma):
            if k is not None:
                cross.add(((u, j), (v, k)))
                cross.add(((v, k), (u, j)))
    total = 0
    for labels in product(range(c.m), repeat=g.n):
        if any(labels[v] != j for v, j in pres.items()):
            continue
        if all(((u, labels[u]), (v, labels[v])) not in cross for u, v in g.edges):
            total += 1
    return total


def brute_chromatic(g: Graph, m: int) -> int:
    return sum(all(col[u] != col[v] for u, v in g.edges) for col in product(range(m), repeat=g.n))


def brute_dp(g: Graph, m: int) -> int:
    """Minimum over every full cover, no symmetry reduction."""
    perms = list(permutations(range(m)))
    best = None
    for choice in product(perms, repeat=len(g.edges)):
        n = brute_count(Cover(g, m, dict(zip(g.edges, choice))))
        best = n if best is None else min(best, n)
    return best


@st.composite
def graphs(draw, min_n: int = 1, max_n: int = 6, connected: bool = False):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = set(draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else [])
    if connected:
        for i in range(1, n):
            chosen.add((draw(st.integers(0, i - 1)), i))
    names = [f"v{i + 1}" for i in range(n)]
    return Graph.from_names(names, [(names[a], names[b]) for a, b in chosen])


@st.composite
def covers(draw, max_n: int = 5, max_m: int = 3, full: bool = False, connected: bool = False):
    """Random covers; non-full ones drop cross-edges or whole matchings."""
    g = draw(graphs(1, max_n, connected))
    m = draw(st.integers(1, max_m))
    mats = {}
    for e in g.edges:
        p = draw(st.permutations(range(m)))
        if not full:
            p = [k if draw(st.booleans()) or draw(st.booleans()) else None for k in p]
            if not any(k is not None for k in p) and draw(st.booleans()):
                continue
        mats[e] = tuple(p)
    return Cover(g, m, mats)


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture(scope="session")
def chain_report():
    from dpglue.counterexample import run_chain

    return run_chain(m=4, kmax=6)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
