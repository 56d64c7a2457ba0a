"""Forest-formula renormalised integrands and chart-local subtraction.

Conventions: a forest member gamma enters through its quotient
gamma / (maximal members inside it), taken as a graph without legs, so its
Xi is psi times its mass term.  psi of an empty family is 1 and its Xi is 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .compactified import Chart, pullback_scaling
from .errors import DivergenceError, KinematicsError
from .graphs import Graph, Subgraph, rank
from .integration import IntegrandFunction, IntegrationResult, integrate
from .kinematics import KinematicConfig, parse_fraction
from .polynomials import (GraphPolynomial, NumericPolynomial, first_symanzik, mass_polynomial,
                          xi_polynomial)
from .power_counting import (ForestOfDivergents, divergence_forests, divergence_offenders,
                             forest_contraction, forest_quotients, superficial_degree)


@dataclass(frozen=True)
class RenormScheme:
    """Renormalisation point (p0, m0) and working dimension."""

    renorm_point: KinematicConfig
    d: Optional[Fraction] = None

    def __post_init__(self):
        d = self.renorm_point.d if self.d is None else parse_fraction(self.d)
        object.__setattr__(self, "d", d)
        pt = self.renorm_point
        generic = bool(pt.invariants) and pt.is_generic()
        massive = bool(pt.masses) and all(m > 0 for m in pt.masses.values())
        if not (generic or massive):
            raise KinematicsError(
                "renormalisation point needs all invariants > 0 or all masses > 0")

    @property
    def working_dimension(self) -> Fraction:
        return self.d


def _numeric(p: GraphPolynomial, variables, kin: Optional[KinematicConfig]) -> NumericPolynomial:
    return p.with_variables(variables).compile(kin)


def _check_dimension(scheme: RenormScheme, kin: KinematicConfig) -> None:
    if kin.d != scheme.d:
        raise KinematicsError(f"kinematics dimension {kin.d} differs from scheme dimension {scheme.d}")


def bare_integrand(g: Graph, kin: KinematicConfig) -> IntegrandFunction:
    """f_G = psi^{-d/2} (psi/Xi)^{-s_G/2}; Xi is not needed when s_G = 0."""
    d = kin.d
    vs = g.edge_ids
    s_g = superficial_degree(g, d)
    psi = _numeric(first_symanzik(g), vs, None)
    a = -float(d) / 2
    b = -float(s_g) / 2
    if s_g == 0:
        def fn(x):
            return psi(x) ** a
    else:
        xi = _numeric(xi_polynomial(g), vs, kin)

        def fn(x):
            p = psi(x)
            return p ** a * (p / xi(x)) ** b
    return IntegrandFunction(fn, g.n_edges, {"graph": g.to_json(), "kind": "bare", "d": str(d)})


def _forest_pieces(g: Graph, forest: ForestOfDivergents):
    """psi_{G/F}, Xi_{G/F}, psi_F and the mass polynomial over F' (all over G's variables)."""
    vs = g.edge_ids
    quotient = forest_contraction(forest)
    psi_q = first_symanzik(quotient).with_variables(vs)
    xi_q = xi_polynomial(quotient).with_variables(vs)
    psi_f = GraphPolynomial.constant(1, vs)
    mass_f = GraphPolynomial.zero(vs)
    for q in forest_quotients(forest):
        psi_f = psi_f * first_symanzik(q).with_variables(vs)
        mass_f = mass_f + mass_polynomial(q).with_variables(vs)
    return psi_q, xi_q, psi_f, mass_f


def forest_integrand(g: Graph, forest: ForestOfDivergents, scheme: RenormScheme,
                     kin: KinematicConfig) -> IntegrandFunction:
    """Forest term f_{G,F}.

    For s_G = 0:
        (psi_{G/F} psi_F)^{-d/2} log[(Xi_{G/F} psi_F + Xi0_F psi_{G/F})
                                    / (Xi0_{G/F} psi_F + Xi0_F psi_{G/F})]
    For s_G < 0 (only subdivergences are subtracted):
        (psi_{G/F} psi_F)^{-d/2} [psi_{G/F} psi_F / (Xi_{G/F} psi_F + Xi0_F psi_{G/F})]^{-s_G/2}
    Here Xi_F = psi_F * (mass term of F'), Xi0 is evaluated at the renormalisation point.
    """
    _check_dimension(scheme, kin)
    d = scheme.d
    s_g = superficial_degree(g, d)
    offenders = [(ids, s) for ids, s in divergence_offenders(g, d) if s > 0]
    if offenders:
        raise DivergenceError(
            "non-logarithmic divergence: " + ", ".join(f"{ids} (s={s})" for ids, s in offenders),
            offenders)
    vs = g.edge_ids
    psi_q, xi_q, psi_f, mass_f = _forest_pieces(g, forest)
    n_psi_q = _numeric(psi_q, vs, None)
    n_psi_f = _numeric(psi_f, vs, None)
    n_xi_q = _numeric(xi_q, vs, kin)
    n_mass0_f = _numeric(mass_f, vs, scheme.renorm_point)
    a = -float(d) / 2
    prov = {"graph": g.to_json(), "forest": forest.as_lists(), "d": str(d)}
    if s_g == 0:
        n_xi0_q = _numeric(xi_q, vs, scheme.renorm_point)

        def fn(x):
            pq, pf = n_psi_q(x), n_psi_f(x)
            xi0_f_term = pf * n_mass0_f(x) * pq
            num = n_xi_q(x) * pf + xi0_f_term
            den = n_xi0_q(x) * pf + xi0_f_term
            return (pq * pf) ** a * np.log(num / den)
        prov["kind"] = "forest-log"
    else:
        b = -float(s_g) / 2

        def fn(x):
            pq, pf = n_psi_q(x), n_psi_f(x)
            denom = n_xi_q(x) * pf + pf * n_mass0_f(x) * pq
            return (pq * pf) ** a * (pq * pf / denom) ** b
        prov["kind"] = "forest-power"
    return IntegrandFunction(fn, g.n_edges, prov)


def renormalised_integrand(g: Graph, scheme: RenormScheme, kin: KinematicConfig):
    """Vector-valued integrand with one signed component per forest, and the forest list."""
    forests = divergence_forests(g, scheme.d, log_only=True)
    if superficial_degree(g, scheme.d) > 0:
        raise DivergenceError(
            f"overall divergence of degree {superficial_degree(g, scheme.d)} is not logarithmic",
            [(list(g.edge_ids), superficial_degree(g, scheme.d))])
    parts = [forest_integrand(g, f, scheme, kin) for f in forests]
    signs = [(-1) ** len(f) for f in forests]
    combined = IntegrandFunction.combine(parts, signs, {"graph": g.to_json(), "kind": "renormalised"})
    return combined, forests


@dataclass(frozen=True)
class RenormalisedResult:
    result: IntegrationResult
    forests: tuple[ForestOfDivergents, ...]

    @property
    def value(self) -> float:
        return self.result.value

    @property
    def error_estimate(self) -> float:
        return self.result.error_estimate

    def to_json(self) -> dict:
        out = self.result.to_json()
        out.pop("components", None)
        out.pop("component_errors", None)
        out["per_forest"] = [
            {"forest": f.as_lists(), "sign": (-1) ** len(f), "value": v, "error": e}
            for f, v, e in zip(self.forests, self.result.components, self.result.component_errors)
        ]
        return out


def renormalised_integral(g: Graph, scheme: RenormScheme, kin: KinematicConfig,
                          method: str = "mc", samples: int = 100_000, seed: int = 0,
                          depth: int = 12, jobs: int = 1, tol=None) -> RenormalisedResult:
    """Sum over forests of (-1)^|F| times the integral of f_{G,F}.

    The signed forest integrands are summed pointwise before integrating, since
    individual terms may diverge; per-forest numbers are estimates on the same
    sample points.
    """
    f, forests = renormalised_integrand(g, scheme, kin)
    res = integrate(f, method=method, samples=samples, seed=seed, depth=depth, jobs=jobs, tol=tol)
    return RenormalisedResult(res, tuple(forests))


# -- chart-local subtraction --------------------------------------------------------

@dataclass(frozen=True)
class ChartIntegrand:
    """Pulled-back form  prod_i (y_i*)^{-s_i/2 - 1} * ftilde(y)  on a blowup chart."""

    chart: Chart
    d: Fraction
    level_degrees: tuple[Fraction, ...]
    psi: NumericPolynomial
    xi: Optional[NumericPolynomial]
    extra_powers: tuple[float, ...]  # (b_i - a_i) s_G / 2
    overall: Fraction

    @property
    def marked_columns(self) -> list[int]:
        return [self.chart.coordinates.index(m) for m in self.chart.marked]

    def regular(self, y: np.ndarray) -> np.ndarray:
        """ftilde(y) = psi~^{-d/2} (psi~/Xi~)^{-s_G/2} prod_i (y_i*)^{(b_i - a_i) s_G / 2}."""
        p = self.psi(y)
        out = p ** (-float(self.d) / 2)
        if self.overall != 0:
            out = out * (p / self.xi(y)) ** (-float(self.overall) / 2)
        for col, k in zip(self.marked_columns, self.extra_powers):
            if k:
                out = out * y[:, col] ** k
        return out

    def singular_factor(self, y: np.ndarray) -> np.ndarray:
        out = np.ones(y.shape[0])
        for col, s in zip(self.marked_columns, self.level_degrees):
            out = out * y[:, col] ** (-float(s) / 2 - 1)
        return out

    def unsubtracted(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return self.singular_factor(y) * self.regular(y)

    def subtracted(self, y: np.ndarray) -> np.ndarray:
        """prod (y_i*)^{-1} sum_H (-1)^|H| ftilde(y with y_i* = 0 for i in H)."""
        y = np.asarray(y, dtype=float)
        cols = self.marked_columns
        total = np.zeros(y.shape[0])
        for r in range(len(cols) + 1):
            for hset in itertools.combinations(cols, r):
                yy = y.copy()
                yy[:, list(hset)] = 0.0
                total += (-1) ** r * self.regular(yy)
        return self.singular_factor(y) * total


def chart_integrand(g: Graph, chart: Chart, kin: KinematicConfig, d0) -> ChartIntegrand:
    d0 = parse_fraction(d0)
    if chart.base != g:
        raise ValueError("chart belongs to a different graph")
    levels = tuple(superficial_degree(Subgraph(g, c), d0) for c in chart.flag.chain)
    s_g = superficial_degree(g, d0)
    psi_g = first_symanzik(g)
    a, psi_t = pullback_scaling(psi_g, chart)
    if s_g != 0:
        b, xi_t = pullback_scaling(xi_polynomial(g), chart)
        xi_n = xi_t.with_variables(chart.coordinates).compile(kin)
        extra = tuple(float((bi - ai) * s_g) / 2 for ai, bi in zip(a, b))
    else:
        xi_n = None
        extra = (0.0,) * len(a)
    psi_n = psi_t.with_variables(chart.coordinates).compile(None)
    return ChartIntegrand(chart, d0, levels, psi_n, xi_n, extra, s_g)


def local_subtracted_integrand(g: Graph, chart: Chart, kin: KinematicConfig, d0) -> IntegrandFunction:
    """R_U applied on the chart: finite as any marked coordinate tends to zero.

    Columns of the input are the chart coordinates in ``chart.coordinates`` order.
    """
    ci = chart_integrand(g, chart, kin, d0)
    bad = [(sorted(c), s) for c, s in zip(chart.flag.chain, ci.level_degrees) if s != 0]
    if bad:
        raise DivergenceError(
            "chart subtraction needs logarithmic flag levels: "
            + ", ".join(f"{ids} (s={s})" for ids, s in bad), bad)
    return IntegrandFunction(ci.subtracted, len(chart.coordinates),
                             {"graph": g.to_json(), "chart": chart.to_json(), "kind": "chart-subtracted"})


def unsubtracted_chart_integrand(g: Graph, chart: Chart, kin: KinematicConfig, d0) -> IntegrandFunction:
    ci = chart_integrand(g, chart, kin, d0)
    return IntegrandFunction(ci.unsubtracted, len(chart.coordinates),
                             {"graph": g.to_json(), "chart": chart.to_json(), "kind": "chart-bare"})


def is_log_only(g: Graph, d) -> bool:
    return rank(g) > 0 and all(s <= 0 for _, s in divergence_offenders(g, d))
