"""Cells of the moduli space of holocoloured graphs and their face poset.

Uncoloured admissible graphs (connected, bridgeless, rank n, k labelled legs,
every vertex of valence >= 3 counting legs) are generated by repeated vertex
splitting from the rose with all legs at its single vertex: contracting a
non-loop edge keeps a graph admissible, so every admissible graph is reached.
Colourings are then taken up to the edge permutations induced by graph
automorphisms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import ScaleGuardError
from .graphs import (Edge, Graph, Leg, Subgraph, _acyclic_subsets, automorphisms,
                     canonical_form, contract, core_subgraphs, is_connected_subgraph, is_core, rank)


def colour_capacity(n: int, k: int) -> int:
    """Largest edge count of an admissible rank-n graph with k legs: 3(n-1)+k."""
    if n < 1:
        raise ValueError("rank n must be at least 1")
    if k < 0:
        raise ValueError("number of legs must be non-negative")
    return 3 * (n - 1) + k


@dataclass(frozen=True)
class ModuliConfig:
    max_n: int = 3
    max_k: int = 4
    max_cells: int = 50_000
    max_valence: Optional[int] = None

    def __post_init__(self):
        for name in ("max_n", "max_k", "max_cells"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def is_admissible(g: Graph, n: int, k: int, max_valence: Optional[int] = None) -> bool:
    if rank(g) != n or g.n_legs != k or not g.is_connected() or not is_core(g):
        return False
    for v in g.vertices:
        val = g.valence(v)
        if val < 3 or (max_valence is not None and val > max_valence):
            return False
    return True


# -- uncoloured enumeration ------------------------------------------------

def _canonical_graph(g: Graph) -> tuple[tuple, Graph]:
    """Uncoloured canonical key and the graph relabelled into canonical order (edge ids 1..N)."""
    key = canonical_form(g, colours=False)
    n_vert, _, edges_enc, legs_enc = key
    edges = tuple(Edge(i + 1, (a, b), 1) for i, (a, b, _) in enumerate(edges_enc))
    legs = tuple(Leg(lab, at) for lab, at in legs_enc)
    return key, Graph(tuple(range(n_vert)), edges, legs)


def _splits(g: Graph, v: int):
    """All expansions of vertex v into an edge v--w with both ends of valence >= 3."""
    half = []  # (kind, index, end) items incident to v
    for e in g.edges:
        if e.ends[0] == v:
            half.append(("e", e.id, 0))
        if e.ends[1] == v:
            half.append(("e", e.id, 1))
    for leg in g.legs:
        if leg.at == v:
            half.append(("l", leg.label, 0))
    m = len(half)
    if m < 4:
        return
    w = max(g.vertices) + 1
    new_id = max(g.edge_ids, default=0) + 1
    # fix the first item on v's side to avoid generating each split twice
    for mask in range(0, 1 << (m - 1)):
        moved = {half[i + 1] for i in range(m - 1) if mask >> i & 1}
        if len(moved) < 2 or m - len(moved) < 2:
            continue
        edges = []
        for e in g.edges:
            ends = list(e.ends)
            for end in (0, 1):
                if ("e", e.id, end) in moved:
                    ends[end] = w
            edges.append(Edge(e.id, (ends[0], ends[1]), e.colour))
        edges.append(Edge(new_id, (v, w), 1))
        legs = [Leg(leg.label, w if ("l", leg.label, 0) in moved else leg.at) for leg in g.legs]
        yield Graph(g.vertices + (w,), tuple(edges), tuple(legs))


def enumerate_uncoloured(n: int, k: int, config: ModuliConfig = ModuliConfig()) -> list[Graph]:
    """One canonical representative per isomorphism class (legs labelled, colours ignored)."""
    _guard(n, k, config)
    if 2 * n + k < 3:
        return []
    start = Graph((0,), tuple(Edge(i + 1, (0, 0), 1) for i in range(n)),
                  tuple(Leg(i + 1, 0) for i in range(k)))
    key, start = _canonical_graph(start)
    seen = {key: start}
    frontier = [start]
    while frontier:
        nxt = []
        for g in frontier:
            for v in g.vertices:
                for h in _splits(g, v):
                    if not is_core(h):
                        continue
                    hk, hc = _canonical_graph(h)
                    if hk not in seen:
                        seen[hk] = hc
                        nxt.append(hc)
        frontier = nxt
    return [seen[key] for key in sorted(seen)
            if is_admissible(seen[key], n, k, config.max_valence)]


def _guard(n: int, k: int, config: ModuliConfig) -> None:
    if n < 1:
        raise ValueError("rank n must be at least 1")
    if k < 0:
        raise ValueError("number of legs must be non-negative")
    if n > config.max_n or k > config.max_k:
        raise ScaleGuardError(
            f"X_{{{n},{k}}} exceeds the desk-scale guard n <= {config.max_n}, k <= {config.max_k}")


# -- colourings ---------------------------------------------------------------

def edge_automorphisms(g: Graph) -> list[tuple[int, ...]]:
    """Edge permutations (as index tuples over g.edges) induced by automorphisms.

    Each vertex automorphism maps parallel classes to parallel classes; any
    bijection between the matched classes is allowed.
    """
    idx = {e.id: i for i, e in enumerate(g.edges)}
    classes: dict[tuple[int, int], list[int]] = {}
    for e in g.edges:
        classes.setdefault(e.ends, []).append(idx[e.id])
    out = set()
    for sigma in automorphisms(g, colours=False):
        choices = []
        for ends, members in sorted(classes.items()):
            img = tuple(sorted((sigma[ends[0]], sigma[ends[1]])))
            targets = classes[img]
            choices.append([(members, p) for p in itertools.permutations(targets)])
        for combo in itertools.product(*choices):
            perm = [0] * len(g.edges)
            for members, targets in combo:
                for a, b in zip(members, targets):
                    perm[a] = b
            out.add(tuple(perm))
    return sorted(out)


def colouring_orbit_reps(g: Graph, capacity: int) -> list[tuple[int, ...]]:
    """Lexicographically least injective colouring in every orbit of the edge automorphism group."""
    group = edge_automorphisms(g)
    seen = set()
    reps = []
    for col in itertools.permutations(range(1, capacity + 1), g.n_edges):
        if col in seen:
            continue
        reps.append(col)
        for perm in group:
            img = [0] * len(col)
            for i, j in enumerate(perm):
                img[j] = col[i]
            seen.add(tuple(img))
    return reps


def estimated_cells(graphs: list[Graph], capacity: int) -> int:
    total = 0
    for g in graphs:
        total += math.perm(capacity, g.n_edges) // max(1, len(edge_automorphisms(g)))
    return total


def with_colours(g: Graph, colours) -> Graph:
    edges = tuple(Edge(e.id, e.ends, c) for e, c in zip(g.edges, colours))
    return Graph(g.vertices, edges, g.legs, holocoloured=True)


@dataclass(frozen=True)
class Cell:
    graph: Graph
    index: int

    @property
    def dimension(self) -> int:
        return self.graph.n_edges - 1

    @property
    def colours(self) -> tuple[int, ...]:
        return tuple(e.colour for e in self.graph.edges)

    def key(self) -> tuple:
        return canonical_form(self.graph, colours=True)


@dataclass(frozen=True)
class ModuliPoset:
    n: int
    k: int
    cells: tuple[Cell, ...]
    covers: tuple[tuple[int, int], ...]  # (face, cell) pairs from single-edge contractions
    _lookup: dict = field(default=None, compare=False, repr=False)

    def index_of(self, g: Graph) -> Optional[int]:
        return self._lookup.get(canonical_form(g, colours=True))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "colour_capacity": colour_capacity(self.n, self.k),
            "f_vector": f_vector(self),
            "cells": [
                {"index": c.index, "dimension": c.dimension, "graph": c.graph.to_json()}
                for c in self.cells
            ],
            "covers": [list(p) for p in self.covers],
        }


def enumerate_admissible(n: int, k: int, config: ModuliConfig = ModuliConfig()) -> list[Graph]:
    """One holocoloured representative per coloured-isomorphism class, ordered by
    dimension, then uncoloured canonical form, then colour tuple."""
    graphs = enumerate_uncoloured(n, k, config)
    cap = colour_capacity(n, k)
    graphs = [g for g in graphs if g.n_edges <= cap]
    est = estimated_cells(graphs, cap)
    if est > config.max_cells:
        raise ScaleGuardError(
            f"X_{{{n},{k}}} has about {est} cells, above the guard max_cells={config.max_cells}")
    out = []
    for g in sorted(graphs, key=lambda h: (h.n_edges, canonical_form(h, colours=False))):
        for col in colouring_orbit_reps(g, cap):
            out.append(with_colours(g, col))
    return out


def build_poset(n: int, k: int, config: ModuliConfig = ModuliConfig()) -> ModuliPoset:
    graphs = enumerate_admissible(n, k, config)
    cells = tuple(Cell(g, i) for i, g in enumerate(graphs))
    lookup = {c.key(): c.index for c in cells}
    covers = set()
    for c in cells:
        for e in c.graph.edges:
            if e.is_loop:
                continue
            j = lookup.get(canonical_form(contract(c.graph, {e.id}), colours=True))
            if j is not None:
                covers.add((j, c.index))
    return ModuliPoset(n, k, cells, tuple(sorted(covers)), lookup)


def face_relation(a: Graph, b: Graph) -> bool:
    """a <= b iff contracting some forest of b gives a, colours included."""
    if isinstance(a, Cell):
        a = a.graph
    if isinstance(b, Cell):
        b = b.graph
    size = b.n_edges - a.n_edges
    if size < 0 or len(b.vertices) - len(a.vertices) != size:
        return False
    target = canonical_form(a, colours=True)
    for forest in _acyclic_subsets(b, size):
        if canonical_form(contract(b, forest), colours=True) == target:
            return True
    return False


def f_vector(poset: ModuliPoset) -> list[int]:
    if not poset.cells:
        return []
    top = max(c.dimension for c in poset.cells)
    out = [0] * (top + 1)
    for c in poset.cells:
        out[c.dimension] += 1
    return out


def faces_at_infinity(g: Graph) -> list[Subgraph]:
    """Minimal edge sets whose contraction drops the rank: the cycles of g (full set included)."""
    out = []
    subs = core_subgraphs(g)
    full = Subgraph(g, frozenset(g.edge_ids))
    if g.edges and is_core(full):
        subs = subs + [full]
    for s in subs:
        if rank(s) == 1 and is_connected_subgraph(s):
            out.append(s)
    return out


def contracts_to_infinity(g: Graph, edge_ids) -> bool:
    """True iff contracting these edges lowers the rank (the face is missing)."""
    return rank(Subgraph(g, frozenset(edge_ids))) > 0
