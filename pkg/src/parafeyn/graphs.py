"""Graphs with coloured internal edges and labelled legs.

Subgraphs are edge subsets of a parent graph; their vertex set is the set of
endpoints of the selected edges.  Everything here is immutable and every
operation returns a new object.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Union

from .errors import GraphValidationError


@dataclass(frozen=True, order=True)
class Edge:
    id: int
    ends: tuple[int, int]
    colour: int = 1

    @property
    def is_loop(self) -> bool:
        return self.ends[0] == self.ends[1]


@dataclass(frozen=True, order=True)
class Leg:
    label: int
    at: int


@dataclass(frozen=True)
class Graph:
    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]
    legs: tuple[Leg, ...] = ()
    holocoloured: bool = False
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        verts = tuple(sorted(set(self.vertices)))
        if len(verts) != len(self.vertices):
            raise GraphValidationError("vertices: duplicate vertex id")
        edges = tuple(sorted(
            Edge(e.id, tuple(sorted(e.ends)), e.colour) for e in self.edges))
        legs = tuple(sorted(self.legs))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "legs", legs)
        vset = set(verts)
        for i, e in enumerate(edges):
            for j, v in enumerate(e.ends):
                if v not in vset:
                    raise GraphValidationError(
                        f"edges[{i}].ends[{j}]: vertex {v} of edge {e.id} is not declared")
            if not isinstance(e.colour, int) or e.colour < 1:
                raise GraphValidationError(
                    f"edges[{i}].colour: colour of edge {e.id} must be a positive integer")
        ids = [e.id for e in edges]
        if len(set(ids)) != len(ids):
            raise GraphValidationError("edges: duplicate edge id")
        labels = [leg.label for leg in legs]
        if labels != list(range(1, len(labels) + 1)):
            raise GraphValidationError(
                f"legs: labels must be distinct and form 1..k, got {labels}")
        for i, leg in enumerate(legs):
            if leg.at not in vset:
                raise GraphValidationError(
                    f"legs[{i}].at: vertex {leg.at} of leg {leg.label} is not declared")
        if self.holocoloured:
            colours = [e.colour for e in edges]
            if len(set(colours)) != len(colours):
                raise GraphValidationError(
                    "edges: holocoloured graph has repeated colours")
        object.__setattr__(self, "_index", {e.id: e for e in edges})

    # -- accessors -------------------------------------------------------

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return tuple(e.id for e in self.edges)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_legs(self) -> int:
        return len(self.legs)

    @property
    def leg_labels(self) -> tuple[int, ...]:
        return tuple(leg.label for leg in self.legs)

    def edge(self, eid: int) -> Edge:
        try:
            return self._index[eid]
        except KeyError:
            raise KeyError(f"graph has no edge {eid}") from None

    def valence(self, v: int) -> int:
        """Internal half-edges at ``v`` plus attached legs."""
        n = sum(e.ends.count(v) for e in self.edges)
        return n + sum(1 for leg in self.legs if leg.at == v)

    def components(self) -> list[tuple[int, ...]]:
        """Vertex sets of the connected components, ordered by least vertex."""
        uf = _UnionFind(self.vertices)
        for e in self.edges:
            uf.union(*e.ends)
        groups: dict[int, list[int]] = {}
        for v in self.vertices:
            groups.setdefault(uf.find(v), []).append(v)
        return sorted(tuple(g) for g in groups.values())

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def induced(self, vertices: Iterable[int]) -> "Graph":
        """Component-style restriction to the given vertices and the edges among them, without legs."""
        vs = set(vertices)
        return Graph(
            tuple(sorted(vs)),
            tuple(e for e in self.edges if e.ends[0] in vs and e.ends[1] in vs),
            (),
            self.holocoloured,
        )

    # -- (de)serialisation -----------------------------------------------

    def to_json(self) -> dict:
        out = {
            "vertices": list(self.vertices),
            "edges": [{"id": e.id, "ends": list(e.ends), "colour": e.colour}
                      for e in self.edges],
            "legs": [{"label": leg.label, "at": leg.at} for leg in self.legs],
        }
        if self.holocoloured:
            out["holocoloured"] = True
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Graph":
        if not isinstance(data, dict):
            raise GraphValidationError("graph: expected a JSON object")
        try:
            verts = data["vertices"]
            raw_edges = data.get("edges", [])
            raw_legs = data.get("legs", [])
        except KeyError as exc:
            raise GraphValidationError(f"{exc.args[0]}: missing field") from None
        if not isinstance(verts, list) or not all(isinstance(v, int) for v in verts):
            raise GraphValidationError("vertices: expected a list of integers")
        edges = []
        for i, e in enumerate(raw_edges):
            for key in ("id", "ends"):
                if key not in e:
                    raise GraphValidationError(f"edges[{i}].{key}: missing field")
            ends = e["ends"]
            if not isinstance(ends, list) or len(ends) != 2:
                raise GraphValidationError(f"edges[{i}].ends: expected two vertex ids")
            edges.append(Edge(int(e["id"]), (ends[0], ends[1]), e.get("colour", 1)))
        legs = []
        for i, leg in enumerate(raw_legs):
            for key in ("label", "at"):
                if key not in leg:
                    raise GraphValidationError(f"legs[{i}].{key}: missing field")
            legs.append(Leg(int(leg["label"]), leg["at"]))
        return cls(tuple(verts), tuple(edges), tuple(legs),
                   bool(data.get("holocoloured", False)))


@dataclass(frozen=True)
class Subgraph:
    """An edge subgraph of ``parent``."""

    parent: Graph
    edge_ids: frozenset

    def __post_init__(self):
        ids = frozenset(self.edge_ids)
        object.__setattr__(self, "edge_ids", ids)
        missing = ids - set(self.parent.edge_ids)
        if missing:
            raise GraphValidationError(f"subgraph edges {sorted(missing)} not in parent")

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted({v for e in self.edges for v in e.ends}))

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(e for e in self.parent.edges if e.id in self.edge_ids)

    @property
    def n_edges(self) -> int:
        return len(self.edge_ids)

    @property
    def sorted_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self.edge_ids))

    def as_graph(self) -> Graph:
        """The subgraph as a graph in its own right, without legs."""
        return Graph(self.vertices, self.edges, (), self.parent.holocoloured)

    def __repr__(self) -> str:
        return f"Subgraph({list(self.sorted_ids)})"


GraphLike = Union[Graph, Subgraph]


def subgraph(g: Graph, edge_ids: Iterable[int]) -> Subgraph:
    return Subgraph(g, frozenset(edge_ids))


def _as_graph(g: GraphLike) -> Graph:
    return g.as_graph() if isinstance(g, Subgraph) else g


def _ids(s) -> frozenset:
    if isinstance(s, Subgraph):
        return s.edge_ids
    return frozenset(s)


class _UnionFind:
    def __init__(self, items=()):
        self.parent = {x: x for x in items}

    def find(self, x):
        parent = self.parent
        parent.setdefault(x, x)
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


# -- basic invariants ----------------------------------------------------

def rank(g: GraphLike) -> int:
    """Loop number h_1 = E - V + (number of components)."""
    g = _as_graph(g)
    return g.n_edges - len(g.vertices) + len(g.components())


def _rank_of_edges(edges: Iterable[Edge]) -> int:
    uf = _UnionFind()
    r = 0
    for e in edges:
        if not uf.union(*e.ends):
            r += 1
    return r


def contract(g: Graph, s) -> Graph:
    """Contract every connected component of the edge set ``s`` to a vertex.

    The surviving vertex of a component is its smallest vertex id.  Edges
    outside ``s`` keep their ids and colours; legs follow their vertices.
    """
    ids = _ids(s)
    uf = _UnionFind(g.vertices)
    for e in g.edges:
        if e.id in ids:
            uf.union(*e.ends)
    rep = {v: uf.find(v) for v in g.vertices}
    edges = tuple(Edge(e.id, (rep[e.ends[0]], rep[e.ends[1]]), e.colour)
                  for e in g.edges if e.id not in ids)
    legs = tuple(Leg(leg.label, rep[leg.at]) for leg in g.legs)
    return Graph(tuple(sorted(set(rep.values()))), edges, legs, g.holocoloured)


def delete(g: Graph, s) -> Graph:
    ids = _ids(s)
    return Graph(g.vertices, tuple(e for e in g.edges if e.id not in ids),
                 g.legs, g.holocoloured)


def is_core(g: GraphLike) -> bool:
    """True iff deleting any single edge lowers the rank (no bridges)."""
    edges = _as_graph(g).edges
    r = _rank_of_edges(edges)
    for e in edges:
        if _rank_of_edges(f for f in edges if f.id != e.id) == r:
            return False
    return True


def is_forest(g: Graph, s) -> bool:
    ids = _ids(s)
    return _rank_of_edges(e for e in g.edges if e.id in ids) == 0


# -- spanning structures ---------------------------------------------------

class Tree(NamedTuple):
    vertices: frozenset
    edges: frozenset


def spanning_trees(g: Graph) -> list[frozenset]:
    """All spanning trees, in lexicographic order of their sorted edge-id lists.

    Backtracking over edges in id order; branches that would close a cycle or
    cannot reach |V|-1 edges are cut.
    """
    if not g.is_connected():
        raise GraphValidationError("spanning_trees: graph is disconnected")
    return [frozenset(t) for t in _acyclic_subsets(g, len(g.vertices) - 1)]


def _acyclic_subsets(g: Graph, size: int) -> Iterator[tuple[int, ...]]:
    edges = [e for e in g.edges if not e.is_loop]
    n = len(edges)

    def rec(start, chosen, parent):
        if len(chosen) == size:
            yield tuple(chosen)
            return
        need = size - len(chosen)
        for i in range(start, n - need + 1):
            e = edges[i]
            uf = _UnionFind()
            uf.parent = dict(parent)
            if uf.union(*e.ends):
                chosen.append(e.id)
                yield from rec(i + 1, chosen, uf.parent)
                chosen.pop()

    if size < 0:
        return
    yield from rec(0, [], {})


def spanning_two_forests(g: Graph) -> list[tuple[Tree, Tree]]:
    """Spanning 2-forests as (T1, T2) with T1 the tree holding the least vertex.

    Isolated vertices count as single-vertex trees.
    """
    if not g.is_connected():
        raise GraphValidationError("spanning_two_forests: graph is disconnected")
    if len(g.vertices) < 2:
        return []
    out = []
    for ids in _acyclic_subsets(g, len(g.vertices) - 2):
        uf = _UnionFind(g.vertices)
        for eid in ids:
            uf.union(*g.edge(eid).ends)
        groups: dict[int, set] = {}
        for v in g.vertices:
            groups.setdefault(uf.find(v), set()).add(v)
        parts = sorted(groups.values(), key=min)
        trees = []
        for part in parts:
            t_edges = frozenset(eid for eid in ids if g.edge(eid).ends[0] in part)
            trees.append(Tree(frozenset(part), t_edges))
        out.append((trees[0], trees[1]))
    return out


def edge_subsets(g: Graph, proper: bool = True, nonempty: bool = True) -> Iterator[frozenset]:
    """Edge subsets ordered by size, then lexicographically."""
    ids = g.edge_ids
    lo = 1 if nonempty else 0
    hi = len(ids) - 1 if proper else len(ids)
    for k in range(lo, hi + 1):
        for combo in itertools.combinations(ids, k):
            yield frozenset(combo)


def core_subgraphs(g: Graph) -> list[Subgraph]:
    """Proper core subgraphs of positive rank, ordered by size then lexicographically."""
    out = []
    for ids in edge_subsets(g):
        sub = Subgraph(g, ids)
        if _rank_of_edges(sub.edges) > 0 and is_core(sub):
            out.append(sub)
    return out


def is_connected_subgraph(s: Subgraph) -> bool:
    return s.as_graph().is_connected()


# -- isomorphism -----------------------------------------------------------

def _refined_partition(g: Graph, colours: bool) -> list[list[int]]:
    """Ordered vertex cells from iterated neighbourhood refinement (isomorphism invariant)."""
    def col(e):
        return e.colour if colours else 0

    label = {}
    for v in g.vertices:
        inc = sorted(col(e) for e in g.edges if v in e.ends)
        loops = sorted(col(e) for e in g.edges if e.ends == (v, v))
        legs = tuple(sorted(leg.label for leg in g.legs if leg.at == v))
        label[v] = (g.valence(v), tuple(loops), legs, tuple(inc))
    label = _compress(label)
    while True:
        new = {}
        for v in g.vertices:
            nbrs = []
            for e in g.edges:
                if e.ends[0] == v and e.ends[1] != v:
                    nbrs.append((col(e), label[e.ends[1]]))
                elif e.ends[1] == v and e.ends[0] != v:
                    nbrs.append((col(e), label[e.ends[0]]))
            new[v] = (label[v], tuple(sorted(nbrs)))
        new = _compress(new)
        if len(set(new.values())) == len(set(label.values())):
            label = new
            break
        label = new
    cells: dict[int, list[int]] = {}
    for v in g.vertices:
        cells.setdefault(label[v], []).append(v)
    return [cells[k] for k in sorted(cells)]


def _compress(label: dict) -> dict:
    order = {lab: i for i, lab in enumerate(sorted(set(label.values())))}
    return {v: order[lab] for v, lab in label.items()}


def _orderings(cells: list[list[int]]) -> Iterator[tuple[int, ...]]:
    for parts in itertools.product(*(itertools.permutations(c) for c in cells)):
        yield tuple(v for part in parts for v in part)


def _encode(g: Graph, order: tuple[int, ...], colours: bool):
    pos = {v: i for i, v in enumerate(order)}
    edges = tuple(sorted(
        (min(pos[e.ends[0]], pos[e.ends[1]]), max(pos[e.ends[0]], pos[e.ends[1]]),
         e.colour if colours else 0)
        for e in g.edges))
    legs = tuple((leg.label, pos[leg.at]) for leg in g.legs)
    return edges, legs


def canonical_form(g: Graph, colours: bool = True) -> tuple:
    """Canonical labelling: the minimal encoding over all refinement-compatible vertex orders."""
    cells = _refined_partition(g, colours)
    best = min(_encode(g, o, colours) for o in _orderings(cells))
    return (len(g.vertices), g.n_edges) + best


def automorphisms(g: Graph, colours: bool = False) -> list[dict[int, int]]:
    """Vertex permutations preserving edges (with multiplicity, and colours if asked) and legs."""
    cells = _refined_partition(g, colours)
    ident = _encode(g, tuple(v for c in cells for v in c), colours)
    out = []
    base = tuple(v for c in cells for v in c)
    for o in _orderings(cells):
        if _encode(g, o, colours) == ident:
            out.append(dict(zip(o, base)))
    return out


def coloured_isomorphic(g: Graph, h: Graph) -> bool:
    return canonical_form(g, True) == canonical_form(h, True)
