"""Infinitely many clones.

The parabolas collapse to vertical segments at ``u = s - zeta``.  Below
the threshold Q_th the ellipse touches the segment at its vertex; above it
the ellipse only reaches the top of the segment.  In both regimes the
resulting fidelity coincides with the FRIO conditional success
probability, and the switch between regimes leaves a jump in the second
derivative of F(Q).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from . import frio, parametric
from .core import INFINITY, CloningProblem, effective_problem, fidelity_from_zeta
from .errors import DomainError, RegimeError

#: a second-difference gap counts as a kink when it beats the step-halving noise by this factor
GAP_NOISE_FACTOR = 10.0


class AsymptoticRegime(str, enum.Enum):
    VERTEX_TANGENT = "VERTEX_TANGENT"
    SEGMENT_TOP = "SEGMENT_TOP"


@dataclass(frozen=True)
class AsymptoticSolution:
    Q: float
    regime: AsymptoticRegime
    zeta_min: float
    fidelity: float
    segment_u: float


def _as_infinite(problem: CloningProblem) -> CloningProblem:
    p = effective_problem(problem)
    if not p.is_infinite:
        raise DomainError("asymptotic solution needs n = INFINITY; use problem.with_n(INFINITY)")
    return p


def _check_q(p: CloningProblem, Q: float) -> float:
    top = frio.q_ud(p)
    if not -1e-12 <= Q <= top + 1e-12:
        raise DomainError(f"failure rate must lie in [0, {top!r}], got {Q!r}")
    return min(max(Q, 0.0), top)


def _segment_top_zeta(p: CloningProblem, Q: float, R: float) -> float:
    s, d = p.s, p.delta
    c = math.sqrt(1.0 - s * s)
    num = s * (2.0 * (d * d - Q) + (1.0 + s * s) * (1.0 - d * d)) - 2.0 * d * c * R
    return num / (2.0 * (s * s + d * d * c * c))


def _vertex_zeta(p: CloningProblem, Q: float) -> float:
    return (frio.q_zero(p) - Q) / (2.0 * math.sqrt(p.eta1 * p.eta2))


def asymptotic_solution(problem: CloningProblem, Q: float) -> AsymptoticSolution:
    p = _as_infinite(problem)
    Q = _check_q(p, Q)
    if frio.is_unbalanced(p) and Q >= frio.q_threshold(p):
        regime = AsymptoticRegime.SEGMENT_TOP
        zeta = _segment_top_zeta(p, Q, frio.projective_r(p, Q))
    else:
        regime = AsymptoticRegime.VERTEX_TANGENT
        zeta = _vertex_zeta(p, Q)
    zeta = max(zeta, 0.0)
    F = fidelity_from_zeta(p, Q, zeta).fidelity
    return AsymptoticSolution(Q=Q, regime=regime, zeta_min=zeta, fidelity=F, segment_u=p.s - zeta)


def asymptotic_fidelity(problem: CloningProblem, Q: float) -> float:
    return asymptotic_solution(problem.with_n(INFINITY), Q).fidelity


def perfect_square_identity_check(problem: CloningProblem, Q: float) -> tuple[float, float]:
    """Both sides of the identity that turns the fidelity discriminant into a perfect square.

    Only meaningful in the segment-top regime, where the square root R is real.
    """
    p = effective_problem(problem).with_n(INFINITY)
    if not frio.is_unbalanced(p) or Q < frio.q_threshold(p):
        raise RegimeError(f"Q={Q!r} is not in the segment-top regime")
    Q = _check_q(p, Q)
    try:
        R = frio.projective_r(p, Q)
    except DomainError as exc:
        raise RegimeError(str(exc)) from exc
    s, d = p.s, p.delta
    c = math.sqrt(1.0 - s * s)
    zeta = _segment_top_zeta(p, Q, R)
    Qbar = 1.0 - Q
    lhs = Qbar * Qbar - 4.0 * p.eta1 * p.eta2 * zeta * zeta
    bracket = 2.0 * s * c * (1.0 - d * d) * R + d * (2.0 * (d * d - Q) + (1.0 + s * s) * (1.0 - d * d))
    rhs = bracket * bracket / (4.0 * (s * s + d * d * c * c) ** 2)
    return lhs, rhs


def convergence_scan(problem: CloningProblem, Q: float, n_list) -> list[tuple[float, float]]:
    """Finite-n optimal fidelities at Q, followed by the (INFINITY, F_inf) entry.

    Whether the approach is monotone in n is reported by the data, not enforced.
    """
    out = []
    for n in n_list:
        if math.isinf(n):
            raise DomainError("n_list must contain finite clone numbers")
        out.append((n, parametric.solve_at_Q(problem.with_n(n), Q).fidelity))
    out.append((INFINITY, asymptotic_fidelity(problem, Q)))
    return out


def one_sided_gap(f, x0: float, h: float) -> float:
    """Forward minus backward second difference of ``f`` anchored at ``x0``."""
    f0 = f(x0)
    forward = (f(x0 + 2 * h) - 2.0 * f(x0 + h) + f0) / (h * h)
    backward = (f0 - 2.0 * f(x0 - h) + f(x0 - 2 * h)) / (h * h)
    return forward - backward


@dataclass
class GapEstimate:
    gap: float
    gap_half_step: float

    @property
    def noise(self) -> float:
        return abs(self.gap - self.gap_half_step)

    @property
    def is_kink(self) -> bool:
        return abs(self.gap_half_step) > GAP_NOISE_FACTOR * self.noise


def gap_estimate(f, x0: float, h: float) -> GapEstimate:
    return GapEstimate(one_sided_gap(f, x0, h), one_sided_gap(f, x0, h / 2.0))


@dataclass
class PhaseScanReport:
    q_th: float
    q_ud: float
    interior: bool
    step: float
    infinite: GapEstimate | None = None
    finite_n: float | None = None
    finite: GapEstimate | None = None
    profile: list[dict] = field(default_factory=list)

    @property
    def transition_detected(self) -> bool:
        return self.interior and self.infinite is not None and self.infinite.is_kink

    @property
    def finite_transition_detected(self) -> bool:
        return self.finite is not None and self.finite.is_kink


PROFILE_COLUMNS = ("Q", "regime", "zeta_min", "fidelity", "p_tilde_s", "gap")


def asymptotic_profile(problem: CloningProblem, qs, step: float) -> list[dict]:
    """Rows of the n = INFINITY curve; ``gap`` is the local one-sided gap (NaN near the ends)."""
    p = effective_problem(problem).with_n(INFINITY)
    top = frio.q_ud(p)

    def F(q):
        return asymptotic_solution(p, q).fidelity

    rows = []
    for q in qs:
        sol = asymptotic_solution(p, q)
        gap = one_sided_gap(F, q, step) if 2 * step <= q <= top - 2 * step else math.nan
        rows.append({
            "Q": sol.Q,
            "regime": sol.regime.value,
            "zeta_min": sol.zeta_min,
            "fidelity": sol.fidelity,
            "p_tilde_s": frio.frio_success(p, sol.Q).p_tilde_s,
            "gap": gap,
        })
    return rows


def phase_transition_scan(
    problem: CloningProblem,
    q_grid_step: float,
    finite_n: float | None = 4,
    profile_points: int = 401,
) -> PhaseScanReport:
    """Look for the second-derivative jump of F(Q) at Q_th, for n = INFINITY and one finite n.

    The kink is reported when the one-sided gap is stable under step
    halving (it beats ``GAP_NOISE_FACTOR`` times the halving change).  For
    priors that are not unbalanced enough, Q_th lies beyond Q_UD and the
    report has ``interior=False``.
    """
    if not 1e-5 <= q_grid_step <= 1e-2:
        raise DomainError(f"step must lie in [1e-5, 1e-2], got {q_grid_step!r}")
    p = effective_problem(problem)
    p_inf = p.with_n(INFINITY)
    q_th, top = frio.q_threshold(p), frio.q_ud(p)
    h = q_grid_step
    interior = frio.is_unbalanced(p) and 0.0 < q_th < top
    report = PhaseScanReport(q_th=q_th, q_ud=top, interior=interior, step=h)

    qs = [top * k / (profile_points - 1) for k in range(profile_points)]
    if interior:
        qs = sorted(set(qs) | {q_th})
        if q_th - 2 * h < 0.0 or q_th + 2 * h > top:
            raise DomainError(f"step {h!r} too coarse to resolve Q_th={q_th!r} inside [0, {top!r}]")
        report.infinite = gap_estimate(lambda q: asymptotic_solution(p_inf, q).fidelity, q_th, h)
        if finite_n is not None:
            pn = problem.with_n(finite_n)
            report.finite_n = finite_n
            report.finite = gap_estimate(lambda q: parametric.solve_at_Q(pn, q).fidelity, q_th, h)
    report.profile = asymptotic_profile(p_inf, qs, h)
    return report
