import itertools
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from parafeyn.catalogue import bubble, dunce, nested_bigons, sunrise, tadpole
from parafeyn.compactified import Flag, all_charts, build_chart, flags
from parafeyn.errors import DivergenceError, KinematicsError
from parafeyn.graphs import Edge, Graph, Subgraph, is_core, rank
from parafeyn.kinematics import KinematicConfig
from parafeyn.power_counting import ForestOfDivergents, divergence_forests, divergent_subgraphs, superficial_degree
from parafeyn.renormalization import (RenormScheme, bare_integrand, forest_integrand,
                                      local_subtracted_integrand, renormalised_integral,
                                      renormalised_integrand, unsubtracted_chart_integrand)

from conftest import connected_graphs, load_fixture


def kin(name, g):
    return KinematicConfig.from_json(load_fixture(name), n_legs=g.n_legs)


def massive(g, d, scale=1.0, seed=0):
    """Masses for every colour and positive invariants for every leg subset."""
    rng = np.random.default_rng(seed)
    colours = sorted({e.colour for e in g.edges})
    masses = {c: scale * float(rng.uniform(0.5, 2.0)) for c in colours}
    inv = {}
    legs = list(range(1, g.n_legs + 1))
    for r in range(1, len(legs)):
        for sub in itertools.combinations(legs, r):
            if g.n_legs not in sub:
                inv[sub] = scale * float(rng.uniform(0.5, 2.0))
    return KinematicConfig(d, masses, inv, g.n_legs)


def test_tadpole_closed_form():
    g = tadpole()
    r = renormalised_integral(g, RenormScheme(kin("tadpole_renorm", g)), kin("tadpole_kin", g))
    assert r.value == pytest.approx(math.log(9.0 / 2.25), abs=1e-14)
    assert r.result.method == "point" and r.error_estimate == 0.0


@given(st.floats(0.1, 10.0), st.floats(0.1, 10.0))
def test_tadpole_closed_form_any_masses(m, m0):
    g = tadpole()
    r = renormalised_integral(g, RenormScheme(KinematicConfig(2, {1: m0}, {}, 1)),
                              KinematicConfig(2, {1: m}, {}, 1))
    assert r.value == pytest.approx(2 * math.log(m / m0), abs=1e-12)


def test_dunce_vanishes_at_renormalisation_point():
    g = dunce()
    point = kin("dunce_renorm", g)
    f, forests = renormalised_integrand(g, RenormScheme(point), point)
    assert [fo.as_lists() for fo in forests] == [[], [[3, 4]]]
    x = np.random.default_rng(0).dirichlet(np.ones(4), size=500)
    assert np.abs(f(x)).max() == 0.0
    r = renormalised_integral(g, RenormScheme(point), point, samples=10_000)
    assert r.value == 0.0


def test_forests_containing_whole_graph_vanish():
    # including G itself in the divergent set would add only identically zero terms
    g = dunce()
    scheme = RenormScheme(kin("dunce_renorm", g))
    x = np.random.default_rng(1).dirichlet(np.ones(4), size=300)
    whole = Subgraph(g, frozenset(g.edge_ids))
    for members in [(whole,), (Subgraph(g, frozenset({3, 4})), whole)]:
        f = forest_integrand(g, ForestOfDivergents(g, members), scheme, kin("dunce_kin", g))
        assert np.abs(f(x)).max() == 0.0


def test_dunce_sign_structure_and_forest_sum():
    g = dunce()
    r = renormalised_integral(g, RenormScheme(kin("dunce_renorm", g)), kin("dunce_kin", g),
                              samples=50_000, seed=3)
    js = r.to_json()
    assert [p["sign"] for p in js["per_forest"]] == [1, -1]
    assert [p["forest"] for p in js["per_forest"]] == [[], [[3, 4]]]
    assert sum(p["value"] for p in js["per_forest"]) == pytest.approx(r.value, rel=1e-12)


def test_dunce_mc_and_quad_agree():
    g = dunce()
    scheme, k = RenormScheme(kin("dunce_renorm", g)), kin("dunce_kin", g)
    mc = renormalised_integral(g, scheme, k, samples=200_000, seed=1)
    quad = renormalised_integral(g, scheme, k, method="quad", depth=15)
    assert abs(mc.value - quad.value) < 3 * math.hypot(mc.error_estimate, quad.error_estimate)
    # the sign tells us the change of invariants is in the expected direction
    assert mc.value > 0


def test_dunce_stable_under_more_samples():
    g = dunce()
    scheme, k = RenormScheme(kin("dunce_renorm", g)), kin("dunce_kin", g)
    a = renormalised_integral(g, scheme, k, samples=50_000, seed=7)
    b = renormalised_integral(g, scheme, k, samples=200_000, seed=8)
    assert abs(a.value - b.value) < 4 * math.hypot(a.error_estimate, b.error_estimate)
    assert b.error_estimate < a.error_estimate


def test_bare_and_renormalised_agree_without_divergences():
    g = bubble()
    k = kin("bubble_kin", g)
    r = renormalised_integral(g, RenormScheme(KinematicConfig(2, {1: 1.0, 2: 1.0}, {}, 2)), k,
                              method="quad", depth=12)
    assert r.value == pytest.approx(1.0, abs=1e-9)
    assert len(r.forests) == 1


def test_errors():
    g = sunrise()
    k = massive(g, 4)
    with pytest.raises(DivergenceError) as info:
        renormalised_integrand(g, RenormScheme(k), k)
    assert ([1, 2, 3], 2) in info.value.offenders
    with pytest.raises(KinematicsError):
        RenormScheme(KinematicConfig(4, {1: 0.0}, {}, 2))
    with pytest.raises(KinematicsError):
        RenormScheme(KinematicConfig(4, {}, {(1,): -1.0}, 2))
    d = dunce()
    with pytest.raises(KinematicsError, match="dimension"):
        forest_integrand(d, divergence_forests(d, 4)[0], RenormScheme(kin("dunce_renorm", d)),
                         kin("dunce_kin", d).with_d(6))


@settings(max_examples=25)
@given(connected_graphs(max_edges=5, max_vertices=4, max_legs=3, loops=False), st.integers(0, 1000))
def test_empty_forest_is_bare_for_convergent_graphs(g, seed):
    d = 2
    assume(rank(g) >= 1 and is_core(g) and g.n_legs >= 1)
    assume(superficial_degree(g, d) < 0 and not divergent_subgraphs(g, d))
    k = massive(g, d, seed=seed)
    bare = bare_integrand(g, k)
    forest = forest_integrand(g, divergence_forests(g, d)[0], RenormScheme(k), k)
    x = np.random.default_rng(seed).dirichlet(np.ones(g.n_edges), size=50)
    assert np.allclose(bare(x), forest(x), rtol=1e-12)


@settings(max_examples=25, suppress_health_check=[HealthCheck.filter_too_much, HealthCheck.too_slow])
@given(connected_graphs(max_edges=6, max_vertices=3, max_legs=3, loops=False), st.integers(0, 1000))
def test_renormalised_integrand_vanishes_at_its_point(g, seed):
    """For log-divergent graphs every signed forest term is zero pointwise at p = p0."""
    d = 4
    assume(rank(g) >= 1 and is_core(g) and g.n_legs >= 1)
    assume(superficial_degree(g, d) == 0)
    assume(all(x.degree <= 0 for x in divergent_subgraphs(g, d)))
    assume(len(divergence_forests(g, d)) <= 40)
    k = massive(g, d, seed=seed)
    f, _ = renormalised_integrand(g, RenormScheme(k), k)
    x = np.random.default_rng(seed).dirichlet(np.ones(g.n_edges), size=20)
    assert np.abs(f(x)).max() == 0.0


@settings(max_examples=25, suppress_health_check=[HealthCheck.filter_too_much, HealthCheck.too_slow])
@given(connected_graphs(max_edges=6, max_vertices=3, max_legs=3, loops=False), st.integers(0, 1000))
def test_forest_terms_are_homogeneous_of_degree_minus_n(g, seed):
    d = 4
    assume(rank(g) >= 1 and is_core(g) and g.n_legs >= 1)
    assume(superficial_degree(g, d) <= 0)
    assume(all(x.degree <= 0 for x in divergent_subgraphs(g, d)))
    assume(len(divergence_forests(g, d)) <= 40)
    k = massive(g, d, seed=seed)
    scheme = RenormScheme(massive(g, d, scale=1.7, seed=seed + 1))
    f, _ = renormalised_integrand(g, scheme, k)
    x = np.random.default_rng(seed).dirichlet(np.ones(g.n_edges), size=10)
    lam = 2.5
    assert np.allclose(f(lam * x), lam ** (-g.n_edges) * f(x), rtol=1e-9, atol=1e-300)


def test_local_subtraction_is_finite_on_dunce_chart():
    g = dunce()
    chart = build_chart(g, Flag(g, ({3, 4},)), 1, [3])
    k = kin("dunce_kin", g)
    sub = local_subtracted_integrand(g, chart, k, 4)
    bare = unsubtracted_chart_integrand(g, chart, k, 4)
    col = chart.coordinates.index(3)
    others = np.array([0.4, 0.7])
    vals, raw = [], []
    for j in range(1, 21):
        y = np.insert(others, col, 2.0 ** -j).reshape(1, -1)
        vals.append(sub(y)[0])
        raw.append(bare(y)[0] * 2.0 ** -j)
    assert np.isfinite(vals).all()
    # bare form has a simple pole, subtraction leaves a bounded function
    assert raw[-1] == pytest.approx(raw[-2], rel=1e-4)
    assert abs(vals[-1] - vals[-2]) < 1e-4 * max(1.0, abs(vals[-1]))


def test_local_subtraction_nested_flag():
    g = nested_bigons()
    k = massive(g, 4)
    flag = Flag(g, ({1, 2, 3, 4}, {1, 2}))
    for chart in all_charts(g, flag):
        sub = local_subtracted_integrand(g, chart, k, 4)
        cols = [chart.coordinates.index(m) for m in chart.marked]
        y = np.full((1, len(chart.coordinates)), 0.5)
        last = None
        for j in range(8, 24, 4):
            yy = y.copy()
            yy[0, cols] = 2.0 ** -j
            v = sub(yy)[0]
            assert np.isfinite(v)
            if last is not None:
                assert abs(v - last) < 1e-2 * max(1.0, abs(v))
            last = v


def test_local_subtraction_refuses_non_log_levels():
    g = Graph((0, 1), tuple(Edge(i, (0, 1)) for i in (1, 2, 3)), ())
    k = KinematicConfig(6, {1: 1.0}, {}, 0)
    chart = all_charts(g, flags(g)[0])[0]
    with pytest.raises(DivergenceError):
        local_subtracted_integrand(g, chart, k, 6)
