"""Feynman integrals of convergent graphs and renormalised amplitudes summed over moduli cells."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DivergenceError
from .graphs import Graph
from .integration import IntegrationResult, integrate
from .kinematics import KinematicConfig
from .moduli import ModuliConfig, build_poset
from .power_counting import divergence_offenders, is_weinberg_convergent
from .renormalization import RenormScheme, bare_integrand, renormalised_integral


@dataclass(frozen=True)
class IntegratorOptions:
    method: str = "mc"
    samples: int = 100_000
    seed: int = 0
    depth: int = 12
    jobs: int = 1
    tol: Optional[float] = None

    def __post_init__(self):
        if self.method not in ("mc", "quad"):
            raise ValueError(f"unknown integration method {self.method!r}")
        if self.samples < 2 or self.depth < 1 or self.jobs < 1:
            raise ValueError("samples >= 2, depth >= 1 and jobs >= 1 are required")

    def kwargs(self) -> dict:
        return {"method": self.method, "samples": self.samples, "seed": self.seed,
                "depth": self.depth, "jobs": self.jobs, "tol": self.tol}


def feynman_integral(g: Graph, kin: KinematicConfig,
                     opts: IntegratorOptions = IntegratorOptions()) -> IntegrationResult:
    """Projective integral of the bare integrand; refuses graphs with divergent proper subgraphs."""
    if not is_weinberg_convergent(g, kin.d, projective=True):
        offenders = divergence_offenders(g, kin.d, include_overall=False)
        raise DivergenceError(
            "divergent subgraphs: " + ", ".join(f"{ids} (s={s})" for ids, s in offenders), offenders)
    return integrate(bare_integrand(g, kin), **opts.kwargs())


@dataclass(frozen=True)
class AmplitudeResult:
    n: int
    k: int
    value: float
    error_estimate: float
    per_cell: tuple[dict, ...]
    method: str

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "value": self.value,
            "error": self.error_estimate,
            "method": self.method,
            "per_cell": list(self.per_cell),
        }


def amplitude(n: int, k: int, scheme: RenormScheme, kin: KinematicConfig,
              opts: IntegratorOptions = IntegratorOptions(),
              config: ModuliConfig = ModuliConfig()) -> AmplitudeResult:
    """Sum of renormalised cell integrals over every cell of the moduli poset (all dimensions)."""
    poset = build_poset(n, k, config)
    offenders = []
    for cell in poset.cells:
        for ids, s in divergence_offenders(cell.graph, scheme.d):
            if s > 0:
                offenders.append((cell.index, ids, s))
    if offenders:
        raise DivergenceError(
            "non-logarithmic cells: " + ", ".join(f"cell {c} {ids} (s={s})" for c, ids, s in offenders),
            [(ids, s) for _, ids, s in offenders])
    per_cell = []
    total, var = 0.0, 0.0
    for cell in poset.cells:
        # every cell gets its own seed so cells are independent and reproducible
        cell_opts = IntegratorOptions(opts.method, opts.samples, opts.seed + cell.index,
                                      opts.depth, opts.jobs, opts.tol)
        res = renormalised_integral(cell.graph, scheme, kin, **cell_opts.kwargs())
        per_cell.append({
            "index": cell.index,
            "dimension": cell.dimension,
            "colours": list(cell.colours),
            "value": res.value,
            "error": res.error_estimate,
        })
        total += res.value
        var += res.error_estimate ** 2
    return AmplitudeResult(n, k, total, math.sqrt(var), tuple(per_cell), opts.method)
