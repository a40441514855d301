"""Brute-force minimization of the objective along the constraint line.

Ground truth for the analytic solution.  It shares nothing with the
parametric solver except the definition of the objective: it walks the
line ``eta1 q1 + eta2 q2 = Q`` directly, scans a coarse grid, and polishes
the best cell by golden-section search.  Unimodality is only assumed inside
the refinement window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CloningProblem, effective_problem
from .errors import DomainError, InfeasibleError

DEFAULT_COARSE_POINTS = 2001
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OracleResult:
    zeta_min: float
    q1: float
    q2: float
    evaluations: int
    resolution: float
    perfect: bool = False
    raw_min: float = math.nan


def _zeta_line(p: CloningProblem, Q: float, q1):
    """Objective along the line, NaN where the split is not realizable."""
    q1 = np.asarray(q1, dtype=float)
    q2 = np.clip((Q - p.eta1 * q1) / p.eta2, 0.0, 1.0)
    s, sn = p.s, p.s_out
    u = np.sqrt(q1 * q2)
    rad = 1.0 - s * s + 2.0 * s * u - (q1 + q2)
    with np.errstate(invalid="ignore"):
        z = (s - u) * math.sqrt(1.0 - sn * sn) - sn * np.sqrt(np.where(rad >= -1e-12, np.maximum(rad, 0.0), np.nan))
    return z


def golden_section_min(f, a: float, b: float, tol: float = 1e-12, max_iter: int = 200):
    """Minimize a unimodal ``f`` on [a, b]; returns (x, f(x), evaluations, final bracket width)."""
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    evals = 2
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
        evals += 1
    x = 0.5 * (a + b)
    return x, f(x), evals + 1, b - a


def q1_interval(problem: CloningProblem, Q: float) -> tuple[float, float]:
    """Range of q1 for which the constraint line stays inside the unit square."""
    p = problem
    return max(0.0, (Q - p.eta2) / p.eta1), min(1.0, Q / p.eta1)


def brute_force_zeta_min(
    problem: CloningProblem, Q: float, coarse_points: int = DEFAULT_COARSE_POINTS
) -> OracleResult:
    """Minimal non-negative objective at failure rate Q by grid scan plus golden-section refinement.

    A negative raw minimum means zeta = 0 is reachable (perfect clones);
    the result then reports ``zeta_min = 0`` with ``perfect=True``.
    """
    p = effective_problem(problem)
    if p.is_infinite:
        raise DomainError("the oracle needs a finite number of clones")
    if not 0.0 <= Q <= 1.0:
        raise DomainError(f"failure rate must lie in [0, 1], got {Q!r}")
    if coarse_points < 100:
        raise DomainError("need at least 100 coarse grid points")

    lo, hi = q1_interval(p, Q)
    if hi - lo <= 0.0:
        z = float(_zeta_line(p, Q, lo))
        if math.isnan(z):
            raise InfeasibleError(f"no realizable split at Q={Q!r}")
        q2 = (Q - p.eta1 * lo) / p.eta2
        return OracleResult(max(z, 0.0), lo, q2, 1, 0.0, perfect=z <= 0.0, raw_min=z)

    grid = np.linspace(lo, hi, coarse_points)
    vals = _zeta_line(p, Q, grid)
    if np.all(np.isnan(vals)):
        raise InfeasibleError(f"no realizable split at Q={Q!r}")
    i = int(np.nanargmin(vals))  # first index on ties: smallest q1
    h = grid[1] - grid[0]
    a, b = max(lo, grid[i] - 1.5 * h), min(hi, grid[i] + 1.5 * h)

    def f(x):
        z = float(_zeta_line(p, Q, x))
        return math.inf if math.isnan(z) else z

    x, fx, evals, width = golden_section_min(f, a, b)
    best_q1, best = (x, fx) if fx < vals[i] else (float(grid[i]), float(vals[i]))
    q2 = min(max((Q - p.eta1 * best_q1) / p.eta2, 0.0), 1.0)
    return OracleResult(
        zeta_min=max(best, 0.0),
        q1=best_q1,
        q2=q2,
        evaluations=coarse_points + evals,
        resolution=width if fx < vals[i] else h,
        perfect=best <= 0.0,
        raw_min=best,
    )


def oracle_q_pc(problem: CloningProblem, q_hi: float, tol: float = 1e-10) -> float:
    """Smallest Q at which the oracle reaches zeta = 0, by bisection on [0, q_hi]."""
    lo, hi = 0.0, q_hi
    if not brute_force_zeta_min(problem, hi).perfect:
        raise InfeasibleError(f"perfect cloning not reached at Q={q_hi!r}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if brute_force_zeta_min(problem, mid).perfect:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
