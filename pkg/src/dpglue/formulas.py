"""Closed forms for chromatic and DP color functions, and the inequality checks built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .counting import DEFAULT_BUDGET, canonical_dp_color_function, dp_color_function
from .errors import InvalidArgument, VerificationFailure
from .graph import Graph, glue_on_clique, is_simplicial


@dataclass
class FormulaResult:
    name: str
    params: dict
    value: int
    divisor: int = 1  # value * divisor is the undivided numerator

    def to_json(self) -> dict:
        return {"name": self.name, "params": self.params, "value": str(self.value)}


def _exact_div(num: int, den: int, what: str) -> int:
    q, r = divmod(num, den)
    if r:
        raise VerificationFailure(f"{what}: {num} is not divisible by {den}")
    return q


def p_complete(n: int, m: int) -> int:
    if n < 0 or m < 0:
        raise InvalidArgument("n and m must be nonnegative")
    return math.prod(m - i for i in range(n))


def p_cycle(n: int, m: int) -> int:
    if n < 3 or m < 0:
        raise InvalidArgument("cycles need n >= 3")
    return (m - 1) ** n + (-1) ** n * (m - 1)


def p_tree(n: int, m: int) -> int:
    if n < 1 or m < 0:
        raise InvalidArgument("trees need n >= 1")
    return m * (m - 1) ** (n - 1)


def pdp_cycle(n: int, m: int) -> int:
    """(m-1)^n - 1 for even n, the chromatic value for odd n; 0 colorings when m = 1."""
    if n < 3 or m < 1:
        raise InvalidArgument("need n >= 3 and m >= 1")
    if m == 1:
        return 0
    return (m - 1) ** n - 1 if n % 2 == 0 else p_cycle(n, m)


def pdp_chorded_cycle(n1: int, n2: int, m: int) -> FormulaResult:
    """Two cycles glued on an edge."""
    if n1 < 3 or n2 < 3 or m < 3:
        raise InvalidArgument("need n1, n2 >= 3 and m >= 3")
    params = {"n1": n1, "n2": n2, "m": m}
    if n1 % 2 == 0 and n2 % 2 == 0:
        num = (m - 1) ** (n1 + n2 - 1) - (m - 1) ** (n1 - 1) - (m - 1) ** (n2 - 1) - m - 1
        return FormulaResult("pdp_chorded_cycle", params, _exact_div(num, m, "both-even case"), m)
    num = pdp_cycle(n1, m) * pdp_cycle(n2, m)
    return FormulaResult("pdp_chorded_cycle", params, _exact_div(num, m * (m - 1), "mixed case"), m * (m - 1))


def chromatic_gluing_formula(values: Sequence[int], p: int, m: int) -> Fraction:
    """prod P(G_i, m) / ((m)_p)^(n-1) as an exact rational."""
    n = len(values)
    if n < 1 or p < 0:
        raise InvalidArgument("need at least one value and p >= 0")
    if m < p:
        raise InvalidArgument("need m >= p")
    return Fraction(math.prod(values), math.perm(m, p) ** (n - 1))


@dataclass
class InequalityCheck:
    lhs: int
    rhs: Fraction
    holds: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"lhs": str(self.lhs), "rhs": str(self.rhs), "holds": self.holds, **self.detail}


def compare_le(lhs: int, num: int, den: int) -> bool:
    """lhs <= num / den for den > 0, by cross-multiplication."""
    if den <= 0:
        raise InvalidArgument("denominator must be positive")
    return lhs * den <= num


def clique_gluing_check(graphs: Sequence[Graph], cliques: Sequence[Sequence[int]], m: int,
                     budget: int = DEFAULT_BUDGET, shards: int = 1) -> InequalityCheck:
    """P_DP(G, m) <= prod P_DP(G_i, m) / ((m)_p)^(n-1) for the K_p-gluing G."""
    p = len(cliques[0])
    if m < p:
        raise InvalidArgument("need m >= p")
    glued, _ = glue_on_clique(graphs, cliques)
    lhs = dp_color_function(glued, m, budget, shards).value
    parts = [dp_color_function(g, m, budget, shards).value for g in graphs]
    num = math.prod(parts)
    den = math.perm(m, p) ** (len(graphs) - 1)
    return InequalityCheck(lhs, Fraction(num, den), compare_le(lhs, num, den),
                           {"parts": [str(x) for x in parts], "p": p, "m": m})


def conducive_gluing_check(graphs: Sequence[Graph], cliques: Sequence[Sequence[int]], m: int,
                           budget: int = DEFAULT_BUDGET, shards: int = 1) -> InequalityCheck:
    """P_DP(G, m) <= prod P'_DP(G_i, K_i, m) / ((m)_p)^(n-1), which holds for every p."""
    p = len(cliques[0])
    if m < p:
        raise InvalidArgument("need m >= p")
    glued, _ = glue_on_clique(graphs, cliques)
    lhs = dp_color_function(glued, m, budget, shards).value
    parts = [canonical_dp_color_function(g, k, m, budget, shards).value for g, k in zip(graphs, cliques)]
    num = math.prod(parts)
    den = math.perm(m, p) ** (len(graphs) - 1)
    return InequalityCheck(lhs, Fraction(num, den), compare_le(lhs, num, den),
                           {"parts": [str(x) for x in parts], "p": p, "m": m, "conducive": True})


def simplicial_check(g: Graph, v: int, m: int, budget: int = DEFAULT_BUDGET, shards: int = 1) -> InequalityCheck:
    """P_DP(G, m) <= (m - d(v)) P_DP(G - v, m) for a simplicial vertex v."""
    if not is_simplicial(g, v):
        raise InvalidArgument(f"{g.names[v]} is not simplicial")
    d = g.degree(v)
    if m < d:
        raise InvalidArgument("need m >= d(v)")
    lhs = dp_color_function(g, m, budget, shards).value
    rest = dp_color_function(g.without_vertex(v), m, budget, shards).value
    return InequalityCheck(lhs, Fraction((m - d) * rest), lhs <= (m - d) * rest,
                           {"degree": d, "m": m, "minus_v": str(rest)})


def formula_rows(results: Sequence[FormulaResult]) -> list[dict]:
    return [r.to_json() for r in results]

