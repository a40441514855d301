"""Discrimination with a fixed rate of inconclusive outcomes (FRIO).

Success probability conditioned on a conclusive outcome, in the
three-outcome POVM regime and, for very unbalanced priors and large
enough Q, in the projective regime.  Also the measure-and-prepare clone
fidelity built on top of it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import CloningProblem, clamped_sqrt, effective_problem
from .errors import ConsistencyError, DomainError

Q_TOL = 1e-12


class FrioRegime(str, enum.Enum):
    POVM = "POVM"
    PROJECTIVE = "PROJECTIVE"


@dataclass(frozen=True)
class FrioQuantities:
    Q: float
    q0: float
    q_th: float
    q_ud: float
    q1_bound: float
    regime: FrioRegime
    p_tilde_s: float
    c: float
    r: float | None
    #: conditional error ``1 - p_tilde_s`` evaluated without cancellation
    p_tilde_e: float = math.nan

    @property
    def p_s(self) -> float:
        """Unconditional success probability ``(1 - Q) * p_tilde_s``."""
        return (1.0 - self.Q) * self.p_tilde_s

    @property
    def p_e(self) -> float:
        return (1.0 - self.Q) * self.p_tilde_e


@dataclass(frozen=True)
class ConclusiveProbabilities:
    """Correct (p) and wrong (r) identification probabilities per input state."""

    p1: float
    p2: float
    r1: float
    r2: float

    def __post_init__(self):
        for k in (1, 2):
            p, r = getattr(self, f"p{k}"), getattr(self, f"r{k}")
            if p < 0.0 or r < 0.0 or p + r > 1.0 + 1e-12:
                raise DomainError(f"invalid probabilities for state {k}: p={p!r}, r={r!r}")


def unbalanced_threshold(s: float) -> float:
    """Prior eta1 below which the projective regime appears."""
    return s * s / (1.0 + s * s)


def is_unbalanced(problem: CloningProblem) -> bool:
    p = effective_problem(problem)
    return p.eta1 < unbalanced_threshold(p.s)


def q_zero(problem: CloningProblem) -> float:
    p = effective_problem(problem)
    return 2.0 * math.sqrt(p.eta1 * p.eta2) * p.s


def q_one(problem: CloningProblem) -> float:
    p = effective_problem(problem)
    return p.eta1 + p.eta2 * p.s * p.s


def q_threshold(problem: CloningProblem) -> float:
    p = effective_problem(problem)
    return 2.0 * p.eta1 * p.eta2 * (1.0 - p.s * p.s) / (1.0 - q_zero(p))


def q_ud(problem: CloningProblem) -> float:
    """Failure rate of optimal unambiguous discrimination."""
    return q_one(problem) if is_unbalanced(problem) else q_zero(problem)


def _check_q(problem: CloningProblem, Q: float) -> float:
    top = q_ud(problem)
    if not -Q_TOL <= Q <= top + Q_TOL:
        raise DomainError(f"failure rate must lie in [0, {top!r}], got {Q!r}")
    return min(max(Q, 0.0), top)


def p_tilde_povm(problem: CloningProblem, Q: float) -> float:
    Qbar = 1.0 - Q
    d = Q - q_zero(problem)
    return (Qbar + clamped_sqrt(Qbar * Qbar - d * d)) / (2.0 * Qbar)


def p_error_povm(problem: CloningProblem, Q: float) -> float:
    """``1 - p_tilde_povm``, rationalized so it stays accurate near the UD endpoint."""
    Qbar = 1.0 - Q
    d = Q - q_zero(problem)
    return d * d / (2.0 * Qbar * (Qbar + clamped_sqrt(Qbar * Qbar - d * d)))


def projective_r(problem: CloningProblem, Q: float) -> float:
    p = effective_problem(problem)
    c2 = 1.0 - p.s * p.s
    return clamped_sqrt(Q * (1.0 - Q) - p.eta1 * p.eta2 * c2, "R radicand")


def p_tilde_projective(problem: CloningProblem, Q: float, R: float | None = None) -> float:
    p = effective_problem(problem)
    e1, e2, s = p.eta1, p.eta2, p.s
    c2 = 1.0 - s * s
    c = math.sqrt(c2)
    if R is None:
        R = projective_r(p, Q)
    Qbar = 1.0 - Q
    num = (e2 - e1) * (e2 - Q) * c2 + Qbar * s * s + 2.0 * e1 * s * c * R
    return e2 / Qbar * num / (1.0 - 4.0 * e1 * e2 * c2)


def p_error_projective(problem: CloningProblem, Q: float, R: float | None = None) -> float:
    """``1 - p_tilde_projective`` in a cancellation-free form.

    The numerator of the naive difference factors as
    ``eta1^2 (Q1 - Q)^2 (1 - 4 eta1 eta2 c^2)``; dividing that by its
    conjugate leaves only positive terms.
    """
    p = effective_problem(problem)
    e1, e2, s = p.eta1, p.eta2, p.s
    c2 = 1.0 - s * s
    if R is None:
        R = projective_r(p, Q)
    Qbar = 1.0 - Q
    D = 1.0 - 4.0 * e1 * e2 * c2
    T = Qbar * D - e2 * ((e2 - e1) * (e2 - Q) * c2 + Qbar * s * s)
    gap = q_one(p) - Q
    return e1 * e1 * gap * gap / (Qbar * (T + 2.0 * e1 * e2 * s * math.sqrt(c2) * R))


def frio_regime(problem: CloningProblem, Q: float) -> FrioRegime:
    # ties go to POVM, both formulas agree there
    if not is_unbalanced(problem) or Q <= q_threshold(problem):
        return FrioRegime.POVM
    return FrioRegime.PROJECTIVE


def frio_success(problem: CloningProblem, Q: float) -> FrioQuantities:
    p = effective_problem(problem)
    Q = _check_q(p, Q)
    regime = frio_regime(p, Q)
    c = math.sqrt(1.0 - p.s * p.s)
    if regime is FrioRegime.POVM:
        R = None
        pt = p_tilde_povm(p, Q)
        pe = p_error_povm(p, Q)
    else:
        try:
            R = projective_r(p, Q)
        except DomainError as exc:
            raise ConsistencyError(f"projective regime selected but R is imaginary at Q={Q!r}") from exc
        pt = p_tilde_projective(p, Q, R)
        pe = p_error_projective(p, Q, R)
    return FrioQuantities(
        Q=Q,
        q0=q_zero(p),
        q_th=q_threshold(p),
        q_ud=q_ud(p),
        q1_bound=q_one(p),
        regime=regime,
        p_tilde_s=min(pt, 1.0),
        c=c,
        r=R,
        p_tilde_e=max(pe, 0.0),
    )


def frio_implicit_residual(
    problem: CloningProblem, Q: float, p_tilde: float, p_error: float | None = None
) -> float:
    """Residual of the implicit projective-regime equation the closed form solves.

    The equation involves ``sqrt(1 - p_tilde)``, which amplifies rounding in
    ``p_tilde`` without bound as Q approaches Q_UD; pass the separately
    computed ``p_error`` (see :attr:`FrioQuantities.p_tilde_e`) to avoid it.
    """
    p = effective_problem(problem)
    c = math.sqrt(1.0 - p.s * p.s)
    x = 1.0 - p_tilde if p_error is None else p_error
    a = clamped_sqrt(x / p.eta1)
    b = clamped_sqrt(1.0 / (1.0 - Q) - x / p.eta1)
    return p_tilde - p.eta2 * (a * p.s + b * c) ** 2


def frio_clone_fidelity(problem: CloningProblem, probs: ConclusiveProbabilities, Q: float) -> float:
    """Conditional global fidelity of FRIO discrimination followed by clone preparation.

    A wrong guess prepares the other state's clones, which still overlap the
    right ones by ``s^2n``.
    """
    p = effective_problem(problem)
    budget = p.eta1 * (1.0 - probs.p1 - probs.r1) + p.eta2 * (1.0 - probs.p2 - probs.r2)
    if abs(budget - Q) > 1e-9:
        raise DomainError(f"probabilities imply failure rate {budget!r}, not {Q!r}")
    s2n = p.s_out ** 2
    Qbar = 1.0 - Q
    return (p.eta1 * (probs.p1 + probs.r1 * s2n) + p.eta2 * (probs.p2 + probs.r2 * s2n)) / Qbar

