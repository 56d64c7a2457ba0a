import json
import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from parafeyn.graphs import Edge, Graph, Leg

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def fixture_path():
    return lambda name: str(FIXTURES / f"{name}.json")


def load_fixture(name):
    return json.loads((FIXTURES / f"{name}.json").read_text())


def random_connected_graph(rng: random.Random, max_edges=8, max_vertices=5, max_legs=4,
                           loops=True, colours=3) -> Graph:
    """Random spanning tree plus extra edges; legs attached at random vertices."""
    n_v = rng.randint(1, max_vertices)
    n_v = min(n_v, max_edges + 1)
    edges = []
    for v in range(1, n_v):
        edges.append((rng.randrange(v), v))
    extra = rng.randint(0, max_edges - len(edges))
    for _ in range(extra):
        a, b = rng.randrange(n_v), rng.randrange(n_v)
        if a == b and not loops:
            continue
        edges.append((a, b))
    rng.shuffle(edges)
    n_legs = rng.randint(0, max_legs)
    return Graph(
        tuple(range(n_v)),
        tuple(Edge(i + 1, e, rng.randint(1, colours)) for i, e in enumerate(edges)),
        tuple(Leg(i + 1, rng.randrange(n_v)) for i in range(n_legs)),
    )


@st.composite
def connected_graphs(draw, max_edges=8, max_vertices=5, max_legs=4, loops=True):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_connected_graph(random.Random(seed), max_edges, max_vertices, max_legs, loops)
