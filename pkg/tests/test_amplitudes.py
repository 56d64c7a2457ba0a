import math

import pytest

from parafeyn.amplitudes import IntegratorOptions, amplitude, feynman_integral
from parafeyn.catalogue import bubble, dunce, triangle
from parafeyn.errors import DivergenceError, ScaleGuardError
from parafeyn.kinematics import KinematicConfig
from parafeyn.moduli import ModuliConfig, build_poset
from parafeyn.renormalization import RenormScheme

from conftest import load_fixture


def kin(name, n_legs):
    return KinematicConfig.from_json(load_fixture(name), n_legs=n_legs)


def test_bubble_two_dimensions_is_one():
    k = kin("bubble_kin", 2)
    q = feynman_integral(bubble(), k, IntegratorOptions(method="quad", depth=14))
    assert q.value == pytest.approx(1.0, abs=1e-12)
    m = feynman_integral(bubble(), k, IntegratorOptions(samples=20_000, seed=5))
    assert abs(m.value - 1.0) <= 3 * m.error_estimate + 1e-12


def test_bubble_closed_form_with_distinct_masses():
    # Xi = s x1 x2 + (x1 + x2)(m1^2 x1 + m2^2 x2); at s = 0 the integral is log(m1^2/m2^2)/(m1^2-m2^2)
    k = KinematicConfig(2, {1: 2.0, 2: 3.0}, {(1,): 0.0}, 2)
    q = feynman_integral(bubble(), k, IntegratorOptions(method="quad", depth=16))
    assert q.value == pytest.approx(math.log(4 / 9) / (4 - 9), rel=1e-7)


def test_triangle_mc_and_quad_agree():
    k = kin("triangle_kin", 3)
    q = feynman_integral(triangle(), k, IntegratorOptions(method="quad", depth=16))
    m = feynman_integral(triangle(), k, IntegratorOptions(samples=100_000, seed=2))
    assert abs(q.value - m.value) < 3 * math.hypot(q.error_estimate, m.error_estimate)


def test_divergent_graph_refused():
    with pytest.raises(DivergenceError) as info:
        feynman_integral(dunce(), kin("dunce_kin", 4))
    assert ([3, 4], 0) in info.value.offenders


def test_amplitude_one_loop_two_legs():
    k, r = kin("amp12_kin", 2), kin("amp12_renorm", 2)
    res = amplitude(1, 2, RenormScheme(r), k, IntegratorOptions(method="quad", depth=14))
    assert [c["dimension"] for c in res.per_cell] == [0, 0, 1]
    tadpoles = sorted(c["value"] for c in res.per_cell[:2])
    assert tadpoles == [pytest.approx(math.log(4.0), abs=1e-12), pytest.approx(math.log(9.0), abs=1e-12)]
    bubble_cell = build_poset(1, 2).cells[2].graph
    direct = feynman_integral(bubble_cell, k, IntegratorOptions(method="quad", depth=14))
    assert res.per_cell[2]["value"] == pytest.approx(direct.value, rel=1e-12)
    assert res.value == pytest.approx(sum(c["value"] for c in res.per_cell), rel=1e-14)


def test_amplitude_seeds_per_cell_are_reproducible():
    k, r = kin("amp12_kin", 2), kin("amp12_renorm", 2)
    a = amplitude(1, 2, RenormScheme(r), k, IntegratorOptions(samples=5_000, seed=9))
    b = amplitude(1, 2, RenormScheme(r), k, IntegratorOptions(samples=5_000, seed=9, jobs=2))
    assert a.to_json() == b.to_json()
    assert a.error_estimate == pytest.approx(math.sqrt(sum(c["error"] ** 2 for c in a.per_cell)))


def test_amplitude_edge_cases():
    point = KinematicConfig(2, {1: 1.0}, {}, 0)
    empty = amplitude(1, 0, RenormScheme(point), point)
    assert empty.value == 0.0 and empty.per_cell == ()
    k4 = KinematicConfig(4, {1: 1.0, 2: 1.0}, {(1,): 1.0}, 2)
    with pytest.raises(DivergenceError):
        amplitude(1, 2, RenormScheme(k4), k4)
    with pytest.raises(ScaleGuardError):
        amplitude(2, 2, RenormScheme(k4), k4, config=ModuliConfig(max_cells=10))


def test_options_validation():
    with pytest.raises(ValueError):
        IntegratorOptions(method="vegas")
    with pytest.raises(ValueError):
        IntegratorOptions(samples=1)
