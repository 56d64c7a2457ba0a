"""Combinatorics and blowup charts of compactified cells.

A point at infinity of a cell is described by a flag G > G_1 > ... > G_m of
proper core subgraphs with strictly decreasing rank.  The chart attached to a
flag sets one edge of G/G_1 to 1 and picks one marked edge in each graded
piece gamma_i = G_i / G_{i+1}; every edge variable of gamma_i is rescaled by
the product of the marked coordinates of levels 1..i.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import GraphValidationError
from .graphs import (Graph, Subgraph, _rank_of_edges, contract, core_subgraphs, is_core,
                     is_forest, rank, spanning_trees)
from .kinematics import parse_fraction
from .polynomials import GraphPolynomial
from .power_counting import superficial_degree


@dataclass(frozen=True)
class Flag:
    """Strictly nested chain of proper core subgraphs G_1 > G_2 > ... (parent excluded)."""

    parent: Graph
    chain: tuple[frozenset, ...] = ()

    def __post_init__(self):
        chain = tuple(frozenset(c) for c in self.chain)
        object.__setattr__(self, "chain", chain)
        all_ids = frozenset(self.parent.edge_ids)
        prev_ids, prev_rank = all_ids, rank(self.parent)
        for i, ids in enumerate(chain):
            sub = Subgraph(self.parent, ids)
            r = rank(sub)
            if not ids < prev_ids:
                raise GraphValidationError(f"flag level {i + 1}: edge sets must be strictly nested")
            if r < 1 or not is_core(sub):
                raise GraphValidationError(f"flag level {i + 1}: {sorted(ids)} is not core of positive rank")
            if r >= prev_rank:
                raise GraphValidationError(f"flag level {i + 1}: rank must strictly decrease")
            prev_ids, prev_rank = ids, r

    def __len__(self):
        return len(self.chain)

    def level_edges(self, i: int) -> frozenset:
        """Edges of gamma_i = G_i minus G_{i+1} (i = 0 is G minus G_1)."""
        outer = frozenset(self.parent.edge_ids) if i == 0 else self.chain[i - 1]
        inner = self.chain[i] if i < len(self.chain) else frozenset()
        return outer - inner

    def graded_piece(self, i: int) -> Graph:
        """gamma_0 = G/G_1 (legs kept); gamma_i = G_i/G_{i+1} without legs."""
        inner = self.chain[i] if i < len(self.chain) else frozenset()
        if i == 0:
            return contract(self.parent, inner)
        return contract(Subgraph(self.parent, self.chain[i - 1]).as_graph(), inner)

    def as_lists(self) -> list[list[int]]:
        return [sorted(c) for c in self.chain]


def flags(g: Graph) -> list[Flag]:
    """All nonempty flags, ordered by length and then by the positions of their members
    in the core-subgraph list."""
    cores = [s.edge_ids for s in core_subgraphs(g)]
    ranks = [_rank_of_edges(g.edge(e) for e in c) for c in cores]
    n = len(cores)
    chains = []

    def extend(chain):
        last = chain[-1]
        for j in range(n):
            if cores[j] < cores[last] and ranks[j] < ranks[last]:
                chains.append(chain + [j])
                extend(chain + [j])

    for i in range(n):
        chains.append([i])
        extend([i])
    chains.sort(key=lambda c: (len(c), c))
    return [Flag(g, tuple(cores[i] for i in c)) for c in chains]


@dataclass(frozen=True)
class PolytopeVertex:
    tree: frozenset
    ordering: tuple[int, ...]


def polytope_vertices(g: Graph) -> list[PolytopeVertex]:
    """Pairs (spanning tree, ordering of the non-tree edges)."""
    if not g.is_connected():
        raise GraphValidationError("polytope_vertices: graph is disconnected")
    if rank(g) < 1:
        raise GraphValidationError("polytope_vertices: graph has rank 0")
    out = []
    for t in spanning_trees(g):
        rest = sorted(set(g.edge_ids) - t)
        for perm in itertools.permutations(rest):
            out.append(PolytopeVertex(t, perm))
    return out


@dataclass(frozen=True)
class FaceDescriptor:
    """Face of a compactified cell: contract the forest, then go to infinity along the flag."""

    contracted_forest: frozenset
    flag: Flag

    def __post_init__(self):
        object.__setattr__(self, "contracted_forest", frozenset(self.contracted_forest))

    def to_json(self) -> dict:
        return {"contracted_forest": sorted(self.contracted_forest), "flag": self.flag.as_lists()}


def face(g: Graph, forest, chain=()) -> FaceDescriptor:
    forest = frozenset(forest)
    if not is_forest(g, forest):
        raise GraphValidationError(f"{sorted(forest)} is not a forest")
    return FaceDescriptor(forest, Flag(contract(g, forest), tuple(chain)))


def facets(g: Graph) -> list[FaceDescriptor]:
    """Codimension-one faces: one per non-loop edge, one per proper core subgraph."""
    if not g.is_connected():
        raise GraphValidationError("facets: graph is disconnected")
    if rank(g) < 1:
        raise GraphValidationError("facets: graph has rank 0")
    out = [face(g, {e.id}) for e in g.edges if not e.is_loop]
    out += [FaceDescriptor(frozenset(), Flag(g, (s.edge_ids,))) for s in core_subgraphs(g)]
    return out


# -- charts --------------------------------------------------------------------

@dataclass(frozen=True)
class Chart:
    """Monomial blowup chart.  Coordinates are named by edge ids (the affine edge has none)."""

    base: Graph
    flag: Flag
    affine_edge: int
    marked: tuple[int, ...]
    coordinates: tuple[int, ...]
    substitution: dict  # edge id -> {coordinate: exponent}

    def jacobian_exponents(self) -> list[int]:
        """Power of each marked coordinate in the Jacobian: |E(G_i)| - 1."""
        return [len(c) - 1 for c in self.flag.chain]

    def level_of(self, eid: int) -> int:
        for i in range(len(self.flag.chain), 0, -1):
            if eid in self.flag.chain[i - 1]:
                return i
        return 0

    def to_json(self) -> dict:
        return {
            "affine_edge": self.affine_edge,
            "marked": list(self.marked),
            "flag": self.flag.as_lists(),
            "substitution": {str(e): {str(c): k for c, k in sorted(m.items())}
                             for e, m in sorted(self.substitution.items())},
        }


def build_chart(g: Graph, flag: Flag, affine_edge: int, marked: Sequence[int] = ()) -> Chart:
    marked = tuple(marked)
    if flag.parent != g:
        raise GraphValidationError("flag belongs to a different graph")
    if len(marked) != len(flag.chain):
        raise GraphValidationError(
            f"need one marked edge per flag level ({len(flag.chain)}), got {len(marked)}")
    if affine_edge not in flag.level_edges(0):
        raise GraphValidationError(f"affine edge {affine_edge} is not an edge of G/G_1")
    for i, m in enumerate(marked, start=1):
        if m not in flag.level_edges(i):
            raise GraphValidationError(f"marked edge {m} is not in graded piece gamma_{i}")
    sub = {}
    for e in g.edge_ids:
        if e == affine_edge:
            sub[e] = {}
            continue
        lvl = 0
        for i in range(len(flag.chain), 0, -1):
            if e in flag.chain[i - 1]:
                lvl = i
                break
        mono = {m: 1 for m in marked[:lvl]}
        if e not in marked:
            mono[e] = 1
        sub[e] = mono
    coords = tuple(sorted(e for e in g.edge_ids if e != affine_edge))
    return Chart(g, flag, affine_edge, marked, coords, sub)


def default_chart(g: Graph, flag: Flag) -> Chart:
    """Chart with the least admissible affine edge and least marked edge at each level."""
    affine = min(flag.level_edges(0))
    marked = [min(flag.level_edges(i)) for i in range(1, len(flag.chain) + 1)]
    return build_chart(g, flag, affine, marked)


def all_charts(g: Graph, flag: Flag) -> list[Chart]:
    levels = [sorted(flag.level_edges(i)) for i in range(len(flag.chain) + 1)]
    return [build_chart(g, flag, a, m)
            for a in levels[0] for m in itertools.product(*levels[1:])]


def pullback(p: GraphPolynomial, chart: Chart) -> GraphPolynomial:
    images = {v: chart.substitution[v] for v in p.variables}
    return p.substitute_monomials(images, chart.coordinates)


def pullback_scaling(p: GraphPolynomial, chart: Chart) -> tuple[list[int], GraphPolynomial]:
    """Pull back along the chart and divide out the largest power of each marked coordinate."""
    if p.is_zero():
        raise ValueError("pullback_scaling: zero polynomial has no scaling exponent")
    q = pullback(p, chart)
    exps, rem = q.factor_monomial(chart.marked)
    return [exps[m] for m in chart.marked], rem


def pole_orders(g: Graph, flag: Flag, d) -> list[Fraction]:
    """s_{G_i}/2 + 1 per flag level; values <= 0 mean no pole."""
    d = parse_fraction(d)
    return [superficial_degree(Subgraph(g, c), d) / 2 + 1 for c in flag.chain]


def chart_pole_orders(chart: Chart, d, xi: Optional[GraphPolynomial] = None) -> list[Fraction]:
    """Pole orders read off from the chart: minus the y_i* exponent of the pulled-back form.

    Uses psi (and xi, when the overall degree is nonzero) together with the
    chart Jacobian, independently of the superficial-degree formula.
    """
    from .polynomials import first_symanzik

    d = parse_fraction(d)
    g = chart.base
    s_g = superficial_degree(g, d)
    a, _ = pullback_scaling(first_symanzik(g), chart)
    if s_g != 0:
        if xi is None:
            raise ValueError("non-logarithmic overall degree needs the xi polynomial")
        b, _ = pullback_scaling(xi, chart)
    else:
        b = a
    out = []
    for ai, bi, ji in zip(a, b, chart.jacobian_exponents()):
        expo = ji - d * ai / 2 - s_g * (ai - bi) / 2
        out.append(-Fraction(expo))
    return out


@dataclass(frozen=True)
class FaceRegularPart:
    """Factor graphs gamma_m, ..., gamma_1 (psi^{-d/2} each) and the quotient gamma_0."""

    factors: tuple[Graph, ...]
    quotient: Graph


def face_regular_part(g: Graph, flag: Flag) -> FaceRegularPart:
    m = len(flag.chain)
    factors = tuple(flag.graded_piece(i) for i in range(m, 0, -1))
    return FaceRegularPart(factors, flag.graded_piece(0))


def vertex_count(g: Graph) -> int:
    return len(spanning_trees(g)) * math.factorial(rank(g))


def facet_count(g: Graph) -> int:
    return sum(1 for e in g.edges if not e.is_loop) + len(core_subgraphs(g))
