"""Small named graphs used throughout the tests, scripts and CLI examples."""

from __future__ import annotations

from .graphs import Edge, Graph, Leg


def dunce() -> Graph:
    """Rank-2 graph: a bigon (e3, e4) between v1 and v2, closed by e1, e2 through v0."""
    return Graph(
        (0, 1, 2),
        (Edge(1, (0, 2), 1), Edge(2, (0, 1), 2), Edge(3, (1, 2), 3), Edge(4, (1, 2), 4)),
        (Leg(1, 0), Leg(2, 0), Leg(3, 1), Leg(4, 2)),
        holocoloured=True,
    )


def sunrise(colours=(1, 1, 1)) -> Graph:
    return Graph(
        (0, 1),
        tuple(Edge(i + 1, (0, 1), c) for i, c in enumerate(colours)),
        (Leg(1, 0), Leg(2, 1)),
    )


def bubble(colours=(1, 2)) -> Graph:
    return Graph(
        (0, 1),
        (Edge(1, (0, 1), colours[0]), Edge(2, (0, 1), colours[1])),
        (Leg(1, 0), Leg(2, 1)),
        holocoloured=colours[0] != colours[1],
    )


def triangle(colours=(1, 2, 3)) -> Graph:
    return Graph(
        (0, 1, 2),
        (Edge(1, (0, 1), colours[0]), Edge(2, (1, 2), colours[1]), Edge(3, (0, 2), colours[2])),
        (Leg(1, 0), Leg(2, 1), Leg(3, 2)),
        holocoloured=len(set(colours)) == 3,
    )


def tadpole(colour: int = 1, n_legs: int = 1) -> Graph:
    return Graph((0,), (Edge(1, (0, 0), colour),),
                 tuple(Leg(i + 1, 0) for i in range(n_legs)))


def rose(n: int, n_legs: int = 0) -> Graph:
    return Graph((0,), tuple(Edge(i + 1, (0, 0), i + 1) for i in range(n)),
                 tuple(Leg(i + 1, 0) for i in range(n_legs)))


def nested_bigons() -> Graph:
    """Rank 3: bigon {1,2} inside the rank-2 divergent {1,2,3,4}; at d=4 both are logarithmic."""
    return Graph(
        (0, 1, 2, 3),
        (Edge(1, (0, 1), 1), Edge(2, (0, 1), 2), Edge(3, (1, 2), 3),
         Edge(4, (0, 2), 4), Edge(5, (2, 3), 5), Edge(6, (0, 3), 6)),
        (Leg(1, 3), Leg(2, 1)),
        holocoloured=True,
    )


FIXTURES = {
    "dunce": dunce,
    "sunrise": sunrise,
    "bubble": bubble,
    "triangle": triangle,
    "tadpole": tadpole,
    "nested_bigons": nested_bigons,
}


def fixture(name: str) -> Graph:
    return FIXTURES[name]()
