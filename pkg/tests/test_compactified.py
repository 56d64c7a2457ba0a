from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from parafeyn.catalogue import dunce, nested_bigons, sunrise, triangle
from parafeyn.compactified import (Flag, all_charts, build_chart, chart_pole_orders, default_chart,
                                   face, face_regular_part, facet_count, facets, flags, pole_orders,
                                   polytope_vertices, pullback, pullback_scaling, vertex_count)
from parafeyn.errors import GraphValidationError
from parafeyn.graphs import Subgraph, contract, core_subgraphs, is_core, rank
from parafeyn.polynomials import first_symanzik, parse_polynomial, second_symanzik, xi_polynomial

from conftest import connected_graphs


def test_dunce_chart_example():
    g = dunce()
    flag = Flag(g, ({3, 4},))
    chart = build_chart(g, flag, 1, [3])
    assert chart.coordinates == (2, 3, 4)
    assert chart.substitution == {1: {}, 2: {2: 1}, 3: {3: 1}, 4: {3: 1, 4: 1}}
    assert chart.jacobian_exponents() == [1]
    exps, rem = pullback_scaling(first_symanzik(g), chart)
    assert exps == [1]
    assert rem == parse_polynomial("1 + x4 + x3*x4 + x2 + x2*x4", (2, 3, 4))
    assert pole_orders(g, flag, 4) == [1]
    assert chart_pole_orders(chart, 4) == [1]


def test_chart_validation():
    g = dunce()
    flag = Flag(g, ({3, 4},))
    with pytest.raises(GraphValidationError, match="affine edge"):
        build_chart(g, flag, 3, [4])
    with pytest.raises(GraphValidationError, match="marked edge"):
        build_chart(g, flag, 1, [2])
    with pytest.raises(GraphValidationError, match="one marked edge"):
        build_chart(g, flag, 1, [])


def test_flag_validation():
    g = nested_bigons()
    Flag(g, ({1, 2, 3, 4}, {1, 2}))
    with pytest.raises(GraphValidationError, match="nested"):
        Flag(g, ({1, 2}, {1, 2, 3, 4}))
    with pytest.raises(GraphValidationError, match="core"):
        Flag(dunce(), ({1, 3, 4},))
    with pytest.raises(GraphValidationError, match="nested"):
        Flag(dunce(), (set(dunce().edge_ids),))


def test_counts():
    assert len(polytope_vertices(sunrise())) == vertex_count(sunrise()) == 6
    assert facet_count(sunrise()) == len(facets(sunrise())) == 6
    assert len(polytope_vertices(dunce())) == vertex_count(dunce()) == 10
    assert facet_count(dunce()) == len(facets(dunce())) == 7
    assert len(flags(triangle())) == 0
    assert facet_count(triangle()) == 3


def test_flags_examples():
    assert [f.as_lists() for f in flags(dunce())] == [[[3, 4]], [[1, 2, 3]], [[1, 2, 4]]]
    g = nested_bigons()
    lists = [f.as_lists() for f in flags(g)]
    assert [[1, 2, 3, 4], [1, 2]] in lists
    for f in flags(g):
        ranks = [rank(Subgraph(g, c)) for c in f.chain]
        assert ranks == sorted(ranks, reverse=True) and len(set(ranks)) == len(ranks)


def test_sunrise_phi_scaling_on_all_charts():
    # phi of the quotient vanishes (both legs meet at one vertex), so phi scales one order higher
    g = sunrise()
    for flag in flags(g):
        for chart in all_charts(g, flag):
            assert pullback_scaling(second_symanzik(g), chart)[0] == [2]
            assert pullback_scaling(first_symanzik(g), chart)[0] == [1]


def test_face_regular_part_dunce():
    g = dunce()
    part = face_regular_part(g, Flag(g, ({3, 4},)))
    (gamma,) = part.factors
    assert gamma.edge_ids == (3, 4) and rank(gamma) == 1 and not gamma.legs
    assert part.quotient.edge_ids == (1, 2) and rank(part.quotient) == 1
    assert part.quotient.n_legs == 4


def test_face_descriptors():
    g = dunce()
    f = face(g, {1}, [{3, 4}])
    assert f.to_json() == {"contracted_forest": [1], "flag": [[3, 4]]}
    with pytest.raises(GraphValidationError):
        face(g, {3, 4})
    assert facets(g)[0].to_json() == {"contracted_forest": [1], "flag": []}


def test_zero_polynomial_scaling_rejected():
    g = sunrise()
    chart = default_chart(g, flags(g)[0])
    with pytest.raises(ValueError):
        pullback_scaling(second_symanzik(sunrise()) * 0, chart)


def _levels_factorise(g, flag, chart, rng):
    """At y* = 0 the psi remainder is the product of the graded pieces' psi polynomials,
    evaluated with the affine and marked edges set to 1."""
    exps, rem = pullback_scaling(first_symanzik(g), chart)
    assert exps == [rank(Subgraph(g, c)) for c in flag.chain]
    pt = {c: float(v) for c, v in zip(chart.coordinates, rng.uniform(0.1, 2.0, len(chart.coordinates)))}
    for m in chart.marked:
        pt[m] = 0.0
    lhs = rem.evaluate([pt[c] for c in rem.variables])
    rhs = 1.0
    for i in range(len(flag.chain) + 1):
        piece = flag.graded_piece(i)
        psi = first_symanzik(piece)
        vals = []
        for e in psi.variables:
            vals.append(1.0 if e == chart.affine_edge or e in chart.marked else pt[e])
        rhs *= psi.evaluate(vals)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_nested_bigons_psi_factorises_on_all_charts():
    g = nested_bigons()
    rng = np.random.default_rng(5)
    for flag in flags(g):
        for chart in all_charts(g, flag):
            _levels_factorise(g, flag, chart, rng)


@given(connected_graphs(max_edges=6, max_vertices=4), st.integers(0, 2**31))
def test_psi_factorises_on_random_charts(g, seed):
    assume(rank(g) >= 1 and is_core(g))
    rng = np.random.default_rng(seed)
    for flag in flags(g)[:6]:
        for chart in all_charts(g, flag)[:4]:
            _levels_factorise(g, flag, chart, rng)


@given(connected_graphs(max_edges=6, max_vertices=4), st.sampled_from([2, 3, 4, 6]))
def test_pole_orders_chart_independent(g, d):
    assume(rank(g) >= 1 and is_core(g) and g.legs)
    xi = xi_polynomial(g)
    for flag in flags(g)[:6]:
        expected = pole_orders(g, flag, d)
        assert expected == [Fraction(d * rank(Subgraph(g, c)) - 2 * len(c), 2) + 1 for c in flag.chain]
        for chart in all_charts(g, flag)[:4]:
            assert chart_pole_orders(chart, d, xi) == expected


@settings(max_examples=30)
@given(connected_graphs(max_edges=6, max_vertices=4))
def test_pullback_is_a_ring_map(g):
    assume(rank(g) >= 1 and is_core(g))
    psi, phi = first_symanzik(g), xi_polynomial(g)
    for flag in flags(g)[:3]:
        chart = default_chart(g, flag)
        assert pullback(psi * phi, chart) == pullback(psi, chart) * pullback(phi, chart)
        assert pullback(psi + psi, chart) == pullback(psi, chart) + pullback(psi, chart)


@given(connected_graphs(max_edges=6, max_vertices=4))
def test_faces_functorial_under_contraction(g):
    """Contracting a non-loop edge e maps core subgraphs of G to core subgraphs of G/e with the
    same rank, so flags of G restricted away from e survive on the facet."""
    assume(rank(g) >= 1 and is_core(g))
    for e in g.edges:
        if e.is_loop:
            continue
        h = contract(g, {e.id})
        for s in core_subgraphs(g):
            ids = s.edge_ids - {e.id}
            if ids and ids != frozenset(h.edge_ids):
                sub = Subgraph(h, ids)
                if e.id in s.edge_ids:
                    assert rank(sub) == rank(s)
                    assert is_core(sub)
        for flag in flags(g)[:4]:
            chain = tuple(c - {e.id} for c in flag.chain)
            if all(c and c != frozenset(h.edge_ids) for c in chain) and all(
                    e.id in c for c in flag.chain):
                f = face(g, {e.id}, chain)
                assert len(f.flag) == len(flag)
