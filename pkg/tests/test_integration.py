import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parafeyn.errors import IntegrationError
from parafeyn.integration import (IntegrandFunction, _bisect, evaluate_point, integrate,
                                  simplex_integrate_mc, simplex_integrate_quad)


def monomial(exps):
    exps = np.asarray(exps)
    return IntegrandFunction(lambda x: np.prod(x ** exps, axis=1), len(exps))


def dirichlet(exps):
    """Exact integral of prod x_i^a_i over the standard simplex in the x_N = 1 - sum section."""
    return math.prod(math.factorial(a) for a in exps) / math.factorial(len(exps) - 1 + sum(exps))


def linear_power(a):
    """(a . x)^(-N): projective, closed form 1 / ((N-1)! prod a)."""
    a = np.asarray(a, dtype=float)
    return IntegrandFunction(lambda x: (x @ a) ** (-len(a)), len(a))


def test_constant_and_linear_are_exact_under_quad():
    assert simplex_integrate_quad(monomial([0, 0, 0]), 3, 4).value == pytest.approx(0.5, abs=1e-15)
    assert simplex_integrate_quad(monomial([1, 0, 0]), 3, 6).value == pytest.approx(1 / 6, abs=1e-14)
    assert simplex_integrate_quad(monomial([0, 1, 0, 0]), 4, 6).value == pytest.approx(1 / 24, abs=1e-14)


@pytest.mark.parametrize("exps", [(1, 1, 0), (2, 0, 1), (1, 1, 1, 0), (2, 1)])
def test_quad_matches_dirichlet(exps):
    r = simplex_integrate_quad(monomial(exps), len(exps), 12)
    assert r.value == pytest.approx(dirichlet(exps), rel=1e-4)
    # the Richardson error estimate must bound the true error (rounding floor aside)
    assert abs(r.value - dirichlet(exps)) <= r.error_estimate + 1e-15


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_mc_matches_dirichlet_within_error(seed):
    exps = (1, 2, 0)
    r = simplex_integrate_mc(monomial(exps), 3, 40_000, seed)
    assert abs(r.value - dirichlet(exps)) < 5 * r.error_estimate


def test_mc_deterministic_across_jobs():
    f = linear_power([1.0, 2.0, 3.0])
    a = simplex_integrate_mc(f, 3, 70_000, 11, jobs=1, batch_size=1 << 12)
    b = simplex_integrate_mc(f, 3, 70_000, 11, jobs=4, batch_size=1 << 12)
    assert (a.value, a.error_estimate) == (b.value, b.error_estimate)
    c = simplex_integrate_mc(f, 3, 70_000, 12, jobs=1, batch_size=1 << 12)
    assert c.value != a.value


def test_quad_deterministic_across_jobs():
    f = linear_power([1.0, 2.0, 3.0])
    a = simplex_integrate_quad(f, 3, 17, jobs=1)
    b = simplex_integrate_quad(f, 3, 17, jobs=3)
    assert a.value == b.value


def test_vector_valued_linearity():
    f, g = monomial([1, 0, 0]), monomial([0, 1, 1])
    h = IntegrandFunction.combine([f, g], [2.0, -3.0])
    r = simplex_integrate_mc(h, 3, 30_000, 4)
    rf = simplex_integrate_mc(f, 3, 30_000, 4)
    rg = simplex_integrate_mc(g, 3, 30_000, 4)
    assert r.components[0] == pytest.approx(2 * rf.value, rel=1e-12)
    assert r.components[1] == pytest.approx(-3 * rg.value, rel=1e-12)
    assert r.value == pytest.approx(sum(r.components), rel=1e-12)
    q = simplex_integrate_quad(h, 3, 10)
    assert q.value == pytest.approx(2 * dirichlet((1, 0, 0)) - 3 * dirichlet((0, 1, 1)), rel=1e-5)


@settings(max_examples=20)
@given(st.lists(st.floats(0.3, 3.0), min_size=2, max_size=4))
def test_projective_integrand_closed_form(a):
    """A degree -N integrand has the same integral on the simplex as on the x_N = 1 chart."""
    exact = 1.0 / (math.factorial(len(a) - 1) * math.prod(a))
    q = simplex_integrate_quad(linear_power(a), len(a), 3 * (len(a) - 1) + 9)
    assert q.value == pytest.approx(exact, rel=2e-4)
    m = simplex_integrate_mc(linear_power(a), len(a), 20_000, 3)
    assert abs(m.value - exact) < 5 * m.error_estimate + 1e-12 * exact


def test_point_evaluation():
    f = IntegrandFunction(lambda x: 3.0 * x[:, 0], 1)
    r = integrate(f)
    assert r.value == 3.0 and r.error_estimate == 0.0 and r.method == "point"
    assert evaluate_point(f).samples_or_depth == 0


def test_non_finite_integrand_reports_location():
    f = IntegrandFunction(lambda x: np.where(x[:, 0] > 0, np.inf, 0.0), 2)
    with pytest.raises(IntegrationError, match="at x ="):
        simplex_integrate_mc(f, 2, 100, 0)
    with pytest.raises(IntegrationError, match="at x ="):
        simplex_integrate_quad(f, 2, 4)


def test_argument_validation():
    f = monomial([1, 1, 1, 1, 1])
    with pytest.raises(ValueError):
        simplex_integrate_quad(f, 5, 10)
    with pytest.raises(ValueError):
        simplex_integrate_quad(monomial([1, 1, 1]), 3, 1)
    with pytest.raises(ValueError):
        simplex_integrate_mc(monomial([1, 1]), 2, 1, 0)
    with pytest.raises(ValueError):
        integrate(monomial([1, 1]), method="trapezoid")
    with pytest.raises(IntegrationError, match="did not converge"):
        simplex_integrate_quad(linear_power([0.01, 1.0, 1.0]), 3, 4, tol=1e-12)


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_bisection_partitions_the_simplex(dim):
    s = np.zeros((1, dim + 1, dim))
    for i in range(dim):
        s[0, i + 1, i] = 1.0
    for _ in range(3 * dim):
        s = _bisect(s)

    def vol(simp):
        return abs(np.linalg.det(simp[1:] - simp[0])) / math.factorial(dim)

    vols = np.array([vol(x) for x in s])
    assert np.allclose(vols, vols[0])
    assert vols.sum() == pytest.approx(1 / math.factorial(dim), rel=1e-12)
    # every piece stays inside the simplex
    assert (s >= -1e-15).all() and (s.sum(axis=2) <= 1 + 1e-15).all()


def test_result_json():
    r = simplex_integrate_quad(IntegrandFunction.combine([monomial([1, 0])], [1.0]), 2, 4)
    js = r.to_json()
    assert js["method"] == "quad" and js["samples_or_depth"] == 4
    assert js["components"] == [pytest.approx(0.5)]
