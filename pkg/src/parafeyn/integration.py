"""Monte Carlo and deterministic quadrature over the standard simplex.

The projective integral of a degree -N function f of N edge variables is
computed on the section x_N = 1 - (x_1 + ... + x_{N-1}):

    I = integral over {u_i > 0, sum u < 1} of f(u_1, ..., u_{N-1}, 1 - sum u) du.

Integrands are vectorised: they map an (M, N) array of points with rows on the
simplex to an (M,) or (M, K) array.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import IntegrationError

DEFAULT_BATCH = 1 << 14


@dataclass(frozen=True)
class IntegrandFunction:
    """Vectorised integrand plus a record of where it came from."""

    fn: Callable[[np.ndarray], np.ndarray]
    n_vars: int
    provenance: dict = field(default_factory=dict)
    n_out: int = 1  # number of output components

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.fn(np.asarray(x, dtype=float))

    def point(self, x) -> float:
        """Evaluate at a single point (first component for vector-valued integrands)."""
        out = np.asarray(self.fn(np.asarray(x, dtype=float).reshape(1, -1)))
        return float(out.reshape(1, -1)[0, 0])

    @classmethod
    def combine(cls, parts: list["IntegrandFunction"], weights, provenance=None) -> "IntegrandFunction":
        """Stack weighted scalar integrands as components of one vector-valued integrand."""
        n = parts[0].n_vars
        if any(p.n_vars != n for p in parts):
            raise ValueError("integrands act on different numbers of variables")
        weights = [float(w) for w in weights]

        def fn(x):
            return np.stack([w * np.asarray(p(x), dtype=float) for p, w in zip(parts, weights)], axis=1)

        return cls(fn, n, provenance or {}, len(parts))


@dataclass(frozen=True)
class IntegrationResult:
    value: float
    error_estimate: float
    samples_or_depth: int
    method: str
    components: tuple[float, ...] = ()
    component_errors: tuple[float, ...] = ()

    def __post_init__(self):
        if not math.isfinite(self.error_estimate) or self.error_estimate < 0:
            raise IntegrationError(f"invalid error estimate {self.error_estimate}")
        if not math.isfinite(self.value):
            raise IntegrationError(f"non-finite integral value {self.value}")

    def to_json(self) -> dict:
        out = {
            "value": self.value,
            "error": self.error_estimate,
            "method": self.method,
            "samples_or_depth": self.samples_or_depth,
        }
        if self.components:
            out["components"] = list(self.components)
            out["component_errors"] = list(self.component_errors)
        return out


def _as_2d(vals: np.ndarray, m: int) -> np.ndarray:
    vals = np.asarray(vals, dtype=float)
    if vals.ndim == 1:
        vals = vals.reshape(m, 1)
    if vals.shape[0] != m:
        raise IntegrationError(f"integrand returned {vals.shape[0]} values for {m} points")
    return vals


def _check_finite(vals: np.ndarray, x: np.ndarray) -> None:
    bad = ~np.isfinite(vals).all(axis=1)
    if bad.any():
        i = int(np.argmax(bad))
        loc = ", ".join(f"{t:.6g}" for t in x[i])
        raise IntegrationError(f"non-finite integrand value {vals[i].tolist()} at x = ({loc})")


def evaluate_point(f: IntegrandFunction) -> IntegrationResult:
    """Zero-dimensional cell: the integral is the value at x = 1."""
    vals = _as_2d(f(np.ones((1, f.n_vars))), 1)
    _check_finite(vals, np.ones((1, f.n_vars)))
    comps = tuple(float(v) for v in vals[0])
    return IntegrationResult(float(vals[0].sum()), 0.0, 0, "point", comps, (0.0,) * len(comps))


# -- Monte Carlo -----------------------------------------------------------------

def _batch_stats(f: IntegrandFunction, n_vars: int, seed: int, index: int, m: int):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    e = rng.standard_exponential((m, n_vars))
    x = e / e.sum(axis=1, keepdims=True)
    vals = _as_2d(f(x), m)
    # add the total as a final column
    vals = np.concatenate([vals, vals.sum(axis=1, keepdims=True)], axis=1)
    _check_finite(vals, x)
    mean = vals.mean(axis=0)
    m2 = ((vals - mean) ** 2).sum(axis=0)
    return m, mean, m2


def _merge(a, b):
    na, ma, qa = a
    nb, mb, qb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * (nb / n), qa + qb + delta ** 2 * (na * nb / n)


def _pairwise(stats: list):
    while len(stats) > 1:
        nxt = [_merge(stats[i], stats[i + 1]) for i in range(0, len(stats) - 1, 2)]
        if len(stats) % 2:
            nxt.append(stats[-1])
        stats = nxt
    return stats[0]


def simplex_integrate_mc(f: IntegrandFunction, n_vars: int, samples: int, seed: int,
                         jobs: int = 1, batch_size: int = DEFAULT_BATCH) -> IntegrationResult:
    """Uniform sampling via normalised exponential spacings; batch i uses seed (seed, i).

    Batches are reduced in a fixed pairwise tree, so the result does not depend
    on the number of worker threads.
    """
    if n_vars < 2:
        raise ValueError("Monte Carlo needs n_vars >= 2; use evaluate_point for a single edge")
    if samples < 2:
        raise ValueError("need at least two samples")
    sizes = [batch_size] * (samples // batch_size)
    if samples % batch_size:
        sizes.append(samples % batch_size)

    def run(i):
        return _batch_stats(f, n_vars, seed, i, sizes[i])

    if jobs > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            stats = list(pool.map(run, range(len(sizes))))
    else:
        stats = [run(i) for i in range(len(sizes))]
    n, mean, m2 = _pairwise(stats)
    vol = 1.0 / math.factorial(n_vars - 1)
    err = vol * np.sqrt(m2 / (n - 1) / n)
    value = vol * mean
    comps = tuple(float(v) for v in value[:-1])
    cerrs = tuple(float(v) for v in err[:-1])
    return IntegrationResult(float(value[-1]), float(err[-1]), samples, "mc", comps, cerrs)


# -- deterministic quadrature ------------------------------------------------------

def _bisect(simplices: np.ndarray) -> np.ndarray:
    """Split every simplex across the midpoint of its longest edge (first longest on ties)."""
    k, nv, _ = simplices.shape
    pairs = [(i, j) for i in range(nv) for j in range(i + 1, nv)]
    lengths = np.stack([((simplices[:, i] - simplices[:, j]) ** 2).sum(axis=1) for i, j in pairs], axis=1)
    # round so that ties are broken identically regardless of floating noise
    best = np.argmax(np.round(lengths, 12), axis=1)
    pi = np.array([p[0] for p in pairs])[best]
    pj = np.array([p[1] for p in pairs])[best]
    rows = np.arange(k)
    mid = 0.5 * (simplices[rows, pi] + simplices[rows, pj])
    left = simplices.copy()
    right = simplices.copy()
    left[rows, pj] = mid
    right[rows, pi] = mid
    return np.concatenate([left, right], axis=0)


def _centroid_sum(f: IntegrandFunction, simplices: np.ndarray, vol: float, jobs: int,
                  chunk: int = 1 << 15) -> np.ndarray:
    cents = simplices.mean(axis=1)
    x = np.concatenate([cents, 1.0 - cents.sum(axis=1, keepdims=True)], axis=1)
    starts = list(range(0, x.shape[0], chunk))

    def run(s):
        part = x[s:s + chunk]
        vals = _as_2d(f(part), part.shape[0])
        vals = np.concatenate([vals, vals.sum(axis=1, keepdims=True)], axis=1)
        _check_finite(vals, part)
        return vals.sum(axis=0)

    if jobs > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            sums = list(pool.map(run, starts))
    else:
        sums = [run(s) for s in starts]
    return vol * np.sum(np.stack(sums), axis=0)


def simplex_integrate_quad(f: IntegrandFunction, n_vars: int, depth: int,
                           tol: Optional[float] = None, jobs: int = 1) -> IntegrationResult:
    """Centroid rule on 2^depth pieces from longest-edge bisection, with Richardson extrapolation.

    Halving the mesh size takes n_vars - 1 bisection rounds and cuts the
    centroid-rule error by four, so the estimate is Q_D + (Q_D - Q_{D-dim}) / 3
    with error |Q_D - Q_{D-dim}| / 3.  If ``tol`` is given and the error
    estimate exceeds it, IntegrationError is raised.
    """
    dim = n_vars - 1
    if not 1 <= dim <= 3:
        raise ValueError("quadrature supports 2 <= n_vars <= 4")
    if depth < dim:
        raise ValueError(f"depth must be at least {dim} for n_vars = {n_vars}")
    simplices = np.zeros((1, dim + 1, dim))
    for i in range(dim):
        simplices[0, i + 1, i] = 1.0
    total_vol = 1.0 / math.factorial(dim)
    coarse = None
    for level in range(depth + 1):
        if level == depth - dim:
            coarse = _centroid_sum(f, simplices, total_vol / 2 ** level, jobs)
        if level == depth:
            break
        simplices = _bisect(simplices)
    fine = _centroid_sum(f, simplices, total_vol / 2 ** depth, jobs)
    value = fine + (fine - coarse) / 3.0
    err = np.abs(fine - coarse) / 3.0
    if tol is not None and err[-1] > tol:
        raise IntegrationError(
            f"quadrature did not converge at depth {depth}: error estimate {err[-1]:.3g} > {tol:.3g}")
    comps = tuple(float(v) for v in value[:-1])
    cerrs = tuple(float(v) for v in err[:-1])
    return IntegrationResult(float(value[-1]), float(err[-1]), depth, "quad", comps, cerrs)


def integrate(f: IntegrandFunction, method: str = "mc", samples: int = 100_000, seed: int = 0,
              depth: int = 12, jobs: int = 1, tol: Optional[float] = None) -> IntegrationResult:
    """Dispatch on the number of variables and the requested method."""
    if f.n_vars == 1:
        return evaluate_point(f)
    if method == "mc":
        return simplex_integrate_mc(f, f.n_vars, samples, seed, jobs=jobs)
    if method == "quad":
        return simplex_integrate_quad(f, f.n_vars, depth, tol=tol, jobs=jobs)
    raise ValueError(f"unknown integration method {method!r}")
