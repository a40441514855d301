"""Optimal fixed-failure-rate cloner in parametric form.

The optimum for a given failure rate is the tangency point of the
constraint ellipse and a member of the parabola family.  Both the failure
rate and the optimal objective are closed-form functions of the ellipse
parameter ``phi``; the optimal tradeoff curve is traced by sweeping ``phi``
from ``phi_max`` (deterministic cloner, Q = 0) down to ``phi_min``
(perfect cloning, zeta = 0).

Internally the sweep runs over the tangent slope ``sigma = dv/du`` at the
tangency point instead of ``phi``: ``delta * cot(phi) = -sigma * sqrt(1 - delta^2)``.
The slope range does not depend on the priors, so small prior gaps do not
squeeze the interesting interval into a sliver of ``phi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import frio
from .core import (
    CloningProblem,
    FailureAllocation,
    effective_problem,
    fidelity_from_zeta,
    zeta_max,
    zeta_uv,
)
from .errors import BracketError, DegenerateError, DomainError, InfeasibleError
from .geometry import phi_of_allocation

ROOT_TOL = 1e-12
MAX_ITER = 200
_SCAN_POINTS = 2000
_SCAN_DEPTH = 1e-12
_Q_TOL = 1e-12


@dataclass(frozen=True)
class SolutionPoint:
    """One point on the optimal tradeoff curve, in canonical labels (eta1 <= eta2)."""

    phi: float
    Q: float
    zeta_min: float
    fidelity: float
    u_star: float
    v_star: float
    q1_star: float
    q2_star: float
    s_prime: float
    perfect: bool = False

    @property
    def p1(self) -> float:
        return 1.0 - self.q1_star

    @property
    def p2(self) -> float:
        return 1.0 - self.q2_star

    @property
    def regime(self) -> str:
        return "perfect" if self.perfect else "approximate"


@dataclass
class TradeoffCurve:
    problem: CloningProblem
    points: list[SolutionPoint] = field(default_factory=list)
    q_pc: float = 0.0
    q_ud: float = 0.0

    @property
    def Q(self) -> np.ndarray:
        return np.array([pt.Q for pt in self.points])

    @property
    def fidelity(self) -> np.ndarray:
        return np.array([pt.fidelity for pt in self.points])


def _require_finite(p: CloningProblem):
    if p.is_infinite:
        raise DomainError("parametric solution needs a finite number of clones; use the asymptotic module")


def _require_ellipse(p: CloningProblem):
    _require_finite(p)
    if p.delta == 0.0:
        raise DegenerateError("equal priors: the constraint ellipse degenerates into a segment")
    if p.s == 0.0:
        raise DegenerateError("orthogonal states: cloning is trivially perfect")


def _sigma_max(p: CloningProblem) -> float:
    return p.s + math.sqrt((1.0 - p.s * p.s) / p.gamma)


def _phi_from_sigma(p: CloningProblem, sigma: float) -> float:
    return -math.atan2(p.delta, sigma * math.sqrt(1.0 - p.delta ** 2))


def _sigma_from_phi(p: CloningProblem, phi: float) -> float:
    sp = math.sin(phi)
    if not (-math.pi / 2 < phi < 0.0):
        raise DomainError(f"phi must lie in (-pi/2, 0) on the optimal arc, got {phi!r}")
    return -p.delta * math.cos(phi) / (math.sqrt(1.0 - p.delta ** 2) * sp)


def _branch(p: CloningProblem, sigma: float) -> tuple[float, float, float, float]:
    """(Q, zeta, cos phi, sin phi) of the tangency with ellipse slope ``sigma``."""
    s, d, g = p.s, p.delta, p.gamma
    r = math.sqrt(1.0 - d * d)
    norm = math.hypot(sigma * r, d)
    cp, sp = sigma * r / norm, -d / norm
    dcot = -sigma * r
    Q = ((1.0 - d * d) * (1.0 - s * s) - g * (dcot + s * r) ** 2) / (2.0 * (1.0 + d * sp - s * r * cp))
    zeta = ((1.0 + g) * r * s + g * dcot - Q * cp) / (math.sqrt(1.0 + g) * r)
    return Q, zeta, cp, sp


def _point_from_sigma(p: CloningProblem, sigma: float) -> SolutionPoint:
    Q, zeta, cp, sp = _branch(p, sigma)
    Q = max(Q, 0.0)
    if zeta < -ROOT_TOL:
        raise InfeasibleError(f"negative objective {zeta!r}: below phi_min, perfect cloning is optimal here")
    zeta = max(zeta, 0.0)
    d = p.delta
    u = Q * cp / math.sqrt(1.0 - d * d)
    v = Q * (1.0 + d * sp) / (1.0 - d * d)
    q1 = Q * (1.0 + sp) / (1.0 - d)
    q2 = Q * (1.0 - sp) / (1.0 + d)
    if q1 > 1.0 + 1e-12 or q2 > 1.0 + 1e-12:
        raise InfeasibleError(f"tangency needs failure probabilities above one: q=({q1!r}, {q2!r})")
    q1, q2 = min(q1, 1.0), min(q2, 1.0)
    alloc = FailureAllocation(q1, q2, eta1=p.eta1)
    F = fidelity_from_zeta(p, Q, zeta, alloc).fidelity
    s_prime = (p.s - u) / math.sqrt(alloc.p1 * alloc.p2)
    return SolutionPoint(
        phi=_phi_from_sigma(p, sigma),
        Q=Q,
        zeta_min=zeta,
        fidelity=F,
        u_star=u,
        v_star=v,
        q1_star=q1,
        q2_star=q2,
        s_prime=s_prime,
        perfect=zeta < ROOT_TOL,
    )


def solution_at_phi(problem: CloningProblem, phi: float) -> SolutionPoint:
    """Optimal cloner at ellipse parameter ``phi in [phi_min, phi_max]``."""
    p = effective_problem(problem)
    _require_ellipse(p)
    pmax = phi_max(p)
    if phi > pmax + 1e-12:
        raise DomainError(f"phi={phi!r} lies above phi_max={pmax!r}")
    if abs(phi - pmax) <= 1e-12:
        return _point_from_sigma(p, _sigma_max(p))
    return _point_from_sigma(p, _sigma_from_phi(p, phi))


def phi_max(problem: CloningProblem) -> float:
    """Ellipse parameter of the deterministic cloner (Q = 0)."""
    p = effective_problem(problem)
    _require_ellipse(p)
    return _phi_from_sigma(p, _sigma_max(p))


def _sigma_min(p: CloningProblem) -> float:
    smax = _sigma_max(p)
    span = smax - p.s
    prev = smax
    for t in np.geomspace(1.0, _SCAN_DEPTH, _SCAN_POINTS)[1:]:
        sigma = p.s + span * t
        _, zeta, _, _ = _branch(p, sigma)
        if zeta <= 0.0:
            if zeta == 0.0:
                return sigma
            return brentq(
                lambda x: _branch(p, x)[1], sigma, prev,
                xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=MAX_ITER,
            )
        prev = sigma
    raise BracketError("objective never reaches zero along the optimal arc")


def phi_min(problem: CloningProblem) -> tuple[float, float]:
    """(phi_min, Q_PC): the end of the arc where the clones become perfect.

    No closed form is known; the root of ``zeta_min(phi) = 0`` is bracketed
    by a logarithmic scan in the tangent slope and polished with Brent's
    method.  For 1 -> 1 "cloning" the deterministic end is already perfect
    and ``(phi_max, 0)`` is returned.
    """
    p = effective_problem(problem)
    _require_ellipse(p)
    if zeta_max(p) <= 0.0:
        return phi_max(p), 0.0
    sigma = _sigma_min(p)
    Q, _, _, _ = _branch(p, sigma)
    return _phi_from_sigma(p, sigma), Q


def _equal_prior_q_pc(p: CloningProblem) -> float:
    def z(q):
        return zeta_uv(p.s, p.s_out, q, q)

    if z(0.0) <= 0.0:
        return 0.0
    # zeta(s, s) = -s^n (1 - s) < 0 brackets the root
    return brentq(z, 0.0, p.s, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=MAX_ITER)


def perfect_cloning_threshold(problem: CloningProblem) -> float:
    """Smallest failure rate at which perfect clones are possible, found numerically."""
    p = effective_problem(problem)
    _require_finite(p)
    if p.s == 0.0 or zeta_max(p) <= 0.0:
        return 0.0
    if p.delta == 0.0:
        return _equal_prior_q_pc(p)
    return phi_min(p)[1]


def _perfect_allocation(p: CloningProblem, Q: float) -> tuple[float, float]:
    """A split on the constraint line with objective exactly zero."""
    e1, e2 = p.eta1, p.eta2
    lo, hi = max(0.0, (Q - e2) / e1), min(1.0, Q / e1)
    if hi - lo < 1e-15:
        return lo, (Q - e1 * lo) / e2

    def z(q1):
        q2 = min(max((Q - e1 * q1) / e2, 0.0), 1.0)
        try:
            return zeta_uv(p.s, p.s_out, math.sqrt(q1 * q2), 0.5 * (q1 + q2))
        except DomainError:
            return math.nan

    grid = np.linspace(lo, hi, 4001)
    vals = np.array([z(q) for q in grid])
    if np.all(np.isnan(vals)):
        raise InfeasibleError(f"no realizable split at Q={Q!r}")
    i = int(np.nanargmin(vals))
    if vals[i] >= 0.0:
        q1 = grid[i]
        return q1, (Q - e1 * q1) / e2
    for step in (1, -1):
        j = i
        while 0 <= j + step < grid.size and not np.isnan(vals[j + step]):
            j += step
            if vals[j] >= 0.0:
                a, b = sorted((grid[j - step], grid[j]))
                q1 = brentq(z, a, b, xtol=1e-15, maxiter=MAX_ITER)
                return q1, (Q - e1 * q1) / e2
    # the zero lies at an edge of the feasible interval
    q1 = grid[i]
    return q1, (Q - e1 * q1) / e2


def _perfect_point(p: CloningProblem, Q: float) -> SolutionPoint:
    if Q == 0.0:
        q1 = q2 = 0.0
    elif p.s == 0.0:
        q1 = q2 = Q
    else:
        q1, q2 = _perfect_allocation(p, Q)
    alloc = FailureAllocation(q1, q2, eta1=p.eta1)
    pp = math.sqrt(alloc.p1 * alloc.p2)
    return SolutionPoint(
        phi=phi_of_allocation(p, alloc.q1, alloc.q2),
        Q=Q,
        zeta_min=0.0,
        fidelity=1.0,
        u_star=alloc.u,
        v_star=alloc.v,
        q1_star=alloc.q1,
        q2_star=alloc.q2,
        s_prime=(p.s - alloc.u) / pp if pp > 0.0 else p.s_out,
        perfect=True,
    )


def _equal_prior_point(p: CloningProblem, Q: float) -> SolutionPoint:
    # ellipse is the segment v = Q; zeta falls with u, so the optimum is u = Q
    alloc = FailureAllocation(Q, Q, eta1=p.eta1)
    zeta = zeta_uv(p.s, p.s_out, Q, Q)
    if zeta <= 0.0:
        return _perfect_point(p, Q)
    F = fidelity_from_zeta(p, Q, zeta, alloc).fidelity
    return SolutionPoint(
        phi=0.0, Q=Q, zeta_min=zeta, fidelity=F, u_star=Q, v_star=Q,
        q1_star=Q, q2_star=Q, s_prime=(p.s - Q) / (1.0 - Q),
    )


def solve_at_Q(problem: CloningProblem, Q: float) -> SolutionPoint:
    """Optimal cloner for a prescribed failure rate ``0 <= Q <= Q_UD``.

    Inverts the parametric map ``Q(phi)`` by bracketed root finding; at and
    above the perfect-cloning threshold the point has ``zeta = 0``, F = 1.
    """
    p = effective_problem(problem)
    _require_finite(p)
    top = frio.q_ud(p)
    if not -_Q_TOL <= Q <= top + _Q_TOL:
        raise DomainError(f"failure rate must lie in [0, {top!r}], got {Q!r}")
    Q = min(max(Q, 0.0), top)
    if p.s == 0.0 or zeta_max(p) <= 0.0:
        return _perfect_point(p, Q)
    if p.delta == 0.0:
        return _equal_prior_point(p, Q)
    smax = _sigma_max(p)
    if Q == 0.0:
        return _point_from_sigma(p, smax)
    smin = _sigma_min(p)
    q_pc = _branch(p, smin)[0]
    if Q >= q_pc:
        return _perfect_point(p, Q)
    sigma = brentq(
        lambda x: _branch(p, x)[0] - Q, smin, smax,
        xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=MAX_ITER,
    )
    return _point_from_sigma(p, sigma)


def q_of_phi_is_monotone(problem: CloningProblem, samples: int = 2001) -> bool:
    """Check that Q decreases strictly as phi runs from phi_min up to phi_max."""
    p = effective_problem(problem)
    _require_ellipse(p)
    smin, smax = _sigma_min(p), _sigma_max(p)
    qs = np.array([_branch(p, x)[0] for x in np.linspace(smin, smax, samples)])
    return bool(np.all(np.diff(qs) < 0.0))


def tradeoff_curve(problem: CloningProblem, num_points: int = 200) -> TradeoffCurve:
    """F_FFR(Q) sampled on ``num_points`` failure rates uniform in [0, Q_UD], plus Q_PC itself.

    The arc is first sampled uniformly in ``phi``; monotone interpolation of
    that sample gives the bracket for each target Q, which is then solved
    exactly.  Points at and above Q_PC are on the perfect-cloning plateau.
    """
    if num_points < 2:
        raise DomainError("need at least two curve points")
    p = effective_problem(problem)
    _require_finite(p)
    q_top = frio.q_ud(p)
    q_pc = perfect_cloning_threshold(p)
    targets = np.union1d(np.linspace(0.0, q_top, num_points), [q_pc])

    if p.delta == 0.0 or p.s == 0.0 or q_pc == 0.0:
        pts = [solve_at_Q(p, float(q)) for q in targets]
        return TradeoffCurve(problem=problem, points=pts, q_pc=q_pc, q_ud=q_top)

    smin, smax = _sigma_min(p), _sigma_max(p)
    phis = np.linspace(_phi_from_sigma(p, smin), _phi_from_sigma(p, smax), max(4 * num_points, 64))
    sigmas = np.array([smin] + [_sigma_from_phi(p, ph) for ph in phis[1:-1]] + [smax])
    qs = np.array([_branch(p, x)[0] for x in sigmas])
    # qs decreases along the sample; flip for np.searchsorted
    qs_inc, sig_inc = qs[::-1], sigmas[::-1]

    pts = []
    for q in targets:
        q = float(q)
        if q == 0.0:
            pts.append(_point_from_sigma(p, smax))
        elif q >= q_pc:
            pts.append(_perfect_point(p, q) if q > q_pc else _point_from_sigma(p, smin))
        else:
            k = int(np.clip(np.searchsorted(qs_inc, q), 1, qs_inc.size - 1))
            a, b = sig_inc[k], sig_inc[k - 1]
            fa, fb = qs_inc[k] - q, qs_inc[k - 1] - q
            if fa * fb > 0.0:
                # interpolation guard: fall back to the whole arc
                a, b = smin, smax
            sigma = brentq(
                lambda x: _branch(p, x)[0] - q, min(a, b), max(a, b),
                xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=MAX_ITER,
            )
            pts.append(_point_from_sigma(p, sigma))
    return TradeoffCurve(problem=problem, points=pts, q_pc=q_pc, q_ud=q_top)
