"""Superficial degrees of divergence, Weinberg's criterion and divergence forests."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import DivergenceError
from .graphs import (Graph, GraphLike, Subgraph, _as_graph, contract, core_subgraphs,
                     is_connected_subgraph, rank)
from .kinematics import parse_fraction


def superficial_degree(gamma: GraphLike, d) -> Fraction:
    """s = d*rank - 2*(number of edges)."""
    d = parse_fraction(d)
    g = _as_graph(gamma)
    return d * rank(g) - 2 * g.n_edges


@dataclass(frozen=True)
class Divergent:
    """A divergent subgraph tagged with its superficial degree."""

    subgraph: Subgraph
    degree: Fraction

    @property
    def edge_ids(self) -> frozenset:
        return self.subgraph.edge_ids


def divergent_subgraphs(g: Graph, d) -> list[Divergent]:
    """Connected proper core subgraphs with rank >= 1 and s >= 0.

    Disconnected core subgraphs are left out: each is the disjoint union of
    its connected members, and those already appear (jointly) in forests.
    """
    out = []
    for sub in core_subgraphs(g):
        if not is_connected_subgraph(sub):
            continue
        s = superficial_degree(sub, d)
        if s >= 0:
            out.append(Divergent(sub, s))
    return out


def is_weinberg_convergent(g: Graph, d, projective: bool = False) -> bool:
    """Strict form demands s < 0 for G itself too; projective form checks proper subgraphs only."""
    if not projective and rank(g) > 0 and superficial_degree(g, d) >= 0:
        return False
    return all(superficial_degree(sub, d) < 0 for sub in core_subgraphs(g))


def divergence_offenders(g: Graph, d, include_overall: bool = True) -> list[tuple[list[int], Fraction]]:
    out = [(sorted(div.edge_ids), div.degree) for div in divergent_subgraphs(g, d)]
    if include_overall and rank(g) > 0:
        s = superficial_degree(g, d)
        if s >= 0:
            out.append((list(g.edge_ids), s))
    return out


@dataclass(frozen=True)
class ForestOfDivergents:
    parent: Graph
    members: tuple[Subgraph, ...]

    def __post_init__(self):
        ordered = tuple(sorted(self.members, key=lambda s: (len(s.edge_ids), s.sorted_ids)))
        object.__setattr__(self, "members", ordered)
        for a, b in itertools.combinations(ordered, 2):
            if not _nested_or_disjoint(a.edge_ids, b.edge_ids):
                raise ValueError(f"forest members {a} and {b} overlap")

    def __len__(self):
        return len(self.members)

    @property
    def edge_ids(self) -> frozenset:
        return frozenset().union(*(m.edge_ids for m in self.members))

    def as_lists(self) -> list[list[int]]:
        return [list(m.sorted_ids) for m in self.members]


def _nested_or_disjoint(a: frozenset, b: frozenset) -> bool:
    return a <= b or b <= a or not (a & b)


def divergence_forests(g: Graph, d, log_only: bool = False) -> list[ForestOfDivergents]:
    """All nested-or-disjoint families of divergent subgraphs, the empty one first.

    Ordered by size, then by the lexicographic order of member index tuples.
    """
    divs = divergent_subgraphs(g, d)
    if log_only:
        bad = [(sorted(x.edge_ids), x.degree) for x in divs if x.degree > 0]
        if rank(g) > 0 and superficial_degree(g, d) > 0:
            bad.append((list(g.edge_ids), superficial_degree(g, d)))
        if bad:
            raise DivergenceError(
                "non-logarithmic divergence: " + ", ".join(f"{ids} (s={s})" for ids, s in bad), bad)
    n = len(divs)
    compatible = [[_nested_or_disjoint(divs[i].edge_ids, divs[j].edge_ids) for j in range(n)]
                  for i in range(n)]
    out = [ForestOfDivergents(g, ())]

    def extend(start, chosen):
        for i in range(start, n):
            if all(compatible[i][j] for j in chosen):
                chosen.append(i)
                yield tuple(chosen)
                yield from extend(i + 1, chosen)
                chosen.pop()

    combos = sorted(extend(0, []), key=lambda c: (len(c), c))
    out.extend(ForestOfDivergents(g, tuple(divs[i].subgraph for i in c)) for c in combos)
    return out


def brute_force_forests(g: Graph, d) -> list[frozenset]:
    """Oracle: filter the whole power set of divergent subgraphs."""
    divs = [x.edge_ids for x in divergent_subgraphs(g, d)]
    out = []
    for k in range(len(divs) + 1):
        for combo in itertools.combinations(divs, k):
            if all(_nested_or_disjoint(a, b) for a, b in itertools.combinations(combo, 2)):
                out.append(frozenset(combo))
    return out


def _quotient_of(g: Graph, gamma: frozenset, inner: Iterable[frozenset]) -> Graph:
    """gamma as a graph without legs, with the maximal proper forest members inside it contracted."""
    sub = Subgraph(g, gamma).as_graph()
    inside = [m for m in inner if m < gamma]
    maximal = [m for m in inside if not any(m < o for o in inside)]
    union = frozenset().union(*maximal) if maximal else frozenset()
    return contract(sub, union)


def forest_quotients(f: ForestOfDivergents) -> list[Graph]:
    """One graph per member gamma: gamma / (union of maximal members strictly inside it)."""
    ids = [m.edge_ids for m in f.members]
    return [_quotient_of(f.parent, gamma, ids) for gamma in ids]


def forest_contraction(f: ForestOfDivergents) -> Graph:
    """G / F: contract the union of the maximal forest members."""
    return contract(f.parent, f.edge_ids)

