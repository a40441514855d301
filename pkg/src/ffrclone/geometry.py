"""Conics in the (u, v) plane of geometric/arithmetic means of the failure split.

The constraint line ``eta1 q1 + eta2 q2 = Q`` maps to an ellipse whose
shape depends only on the prior gap, and each level set of the objective
is (the left branch of) a parabola.  The optimal cloner sits where the two
are tangent.

Ellipse parameter convention: ``u = Q cos(phi) / sqrt(1 - delta^2)``, so the
physical half (u >= 0) is ``phi in [-pi/2, pi/2]`` and the optimal tangency
lies on the lower-right arc ``phi in (-pi/2, 0)``.  On that half the split is
recovered without sign ambiguity from :func:`allocation_at_phi`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import CloningProblem, effective_problem
from .errors import DegenerateError, DomainError


@dataclass(frozen=True)
class EllipseParams:
    Q: float
    delta: float

    @property
    def center(self) -> tuple[float, float]:
        return 0.0, self.Q / (1.0 - self.delta ** 2)

    @property
    def semi_axes(self) -> tuple[float, float]:
        d2 = 1.0 - self.delta ** 2
        return self.Q / math.sqrt(d2), self.Q * self.delta / d2

    @property
    def is_degenerate(self) -> bool:
        return self.delta == 0.0 or self.Q == 0.0


@dataclass(frozen=True)
class ParabolaParams:
    s: float
    n: float
    zeta: float

    @classmethod
    def for_problem(cls, problem: CloningProblem, zeta: float) -> "ParabolaParams":
        p = effective_problem(problem)
        return cls(s=p.s, n=p.n, zeta=zeta)

    @property
    def s_out(self) -> float:
        return 0.0 if math.isinf(self.n) else self.s ** self.n

    @property
    def gamma_n(self) -> float:
        s2n = self.s_out ** 2
        return s2n / (1.0 - s2n)

    @property
    def apex_u(self) -> float:
        """Abscissa where the parabola touches its envelope line."""
        return self.s - self.zeta / math.sqrt(1.0 - self.s_out ** 2)


def ellipse_point(e: EllipseParams, phi: float) -> tuple[float, float]:
    if e.delta == 0.0:
        raise DegenerateError("equal priors: the ellipse is the segment v = Q, use segment_point")
    d2 = 1.0 - e.delta ** 2
    u = e.Q / math.sqrt(d2) * math.cos(phi)
    v = e.Q / d2 + e.Q * e.delta / d2 * math.sin(phi)
    return u, v


def segment_point(Q: float, t: float) -> tuple[float, float]:
    """Equal-prior image of the constraint line: ``v = Q``, ``u = t Q`` for ``t in [0, 1]``."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"segment parameter must lie in [0, 1], got {t!r}")
    return t * Q, Q


def ellipse_slope(e: EllipseParams, phi: float) -> float:
    """dv/du along the ellipse."""
    s = math.sin(phi)
    if e.delta == 0.0:
        raise DegenerateError("equal priors: the ellipse is degenerate")
    if abs(s) < 1e-300:
        raise DomainError("ellipse slope is vertical at phi = 0 or pi")
    return -e.delta / math.sqrt(1.0 - e.delta ** 2) * math.cos(phi) / s


def allocation_at_phi(Q: float, delta: float, phi: float) -> tuple[float, float]:
    """Failure split (q1, q2) on the constraint line for a point of the physical half-ellipse."""
    sp = math.sin(phi)
    return Q * (1.0 + sp) / (1.0 - delta), Q * (1.0 - sp) / (1.0 + delta)


def phi_of_allocation(problem: CloningProblem, q1: float, q2: float) -> float:
    """Inverse of :func:`allocation_at_phi`; lands in [-pi/2, pi/2]."""
    Q = problem.eta1 * q1 + problem.eta2 * q2
    if Q == 0.0:
        return 0.0
    ratio = (2.0 * problem.eta1 * q1 - 2.0 * problem.eta2 * q2) / (2.0 * Q)
    return math.asin(min(1.0, max(-1.0, ratio)))


def parabola_v(p: ParabolaParams, u: float) -> float:
    if math.isinf(p.n):
        raise DegenerateError("infinitely many clones: the parabola is a vertical segment")
    s = p.s
    shift = u - p.apex_u
    return s * u + 0.5 * (1.0 - s * s) - shift * shift / (2.0 * p.gamma_n)


def parabola_slope(p: ParabolaParams, u: float) -> float:
    if math.isinf(p.n):
        raise DegenerateError("infinitely many clones: the parabola is a vertical segment")
    return p.s - (u - p.apex_u) / p.gamma_n


def parabola_envelope_v(s: float, u: float) -> float:
    """Common tangent line of the whole zeta family at fixed s."""
    if not 0.0 <= s < 1.0:
        raise DomainError(f"overlap must satisfy 0 <= s < 1, got {s!r}")
    return s * u + 0.5 * (1.0 - s * s)


def region_top_v(u: float) -> float:
    """Envelope of the lines :func:`parabola_envelope_v` over all s."""
    return 0.5 * (1.0 + u * u)


def tangency_residual(e: EllipseParams, p: ParabolaParams, phi: float) -> tuple[float, float]:
    """(height gap, slope gap) between ellipse and parabola at the ellipse point ``phi``.

    Both vanish at the optimal tangency pair.  The slope gap carries a
    ``1/gamma_n`` factor and loses accuracy as the parabola narrows.
    """
    if e.delta == 0.0:
        raise DegenerateError("equal priors: no tangency on a degenerate ellipse")
    if math.isinf(p.n):
        raise DegenerateError("infinitely many clones: the parabola is a vertical segment")
    sp = math.sin(phi)
    if abs(sp) < 1e-15 or abs(abs(phi) - math.pi) < 1e-15:
        raise DomainError("cot(phi) is singular at phi = 0 or pi")
    u, v = ellipse_point(e, phi)
    gap = v - parabola_v(p, u)
    slope_gap = ellipse_slope(e, phi) - parabola_slope(p, u)
    return gap, slope_gap
