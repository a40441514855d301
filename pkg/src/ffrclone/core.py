"""Problem statement and the elementary scalar formulas.

Everything downstream works with a :class:`CloningProblem` in canonical
form: real non-negative overlap and ``eta1 <= eta2``.  The objective
``zeta`` depends on the failure split only through its geometric mean
``u = sqrt(q1 q2)`` and arithmetic mean ``v = (q1 + q2) / 2`` and does not
depend on the priors at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from numbers import Real

from .errors import DomainError, InfeasibleError

INFINITY = math.inf

#: radicands in ``[-RADICAND_TOL, 0)`` are rounding noise and get clamped
RADICAND_TOL = 1e-12


def clamped_sqrt(x: float, what: str = "radicand", tol: float = RADICAND_TOL) -> float:
    """Square root that forgives tiny negative rounding errors.

    Raises :class:`DomainError` when ``x < -tol``.
    """
    if x < 0.0:
        if x < -tol:
            raise DomainError(f"negative {what}: {x!r}")
        return 0.0
    return math.sqrt(x)


@dataclass(frozen=True)
class CloningProblem:
    """Two pure states with overlap ``s`` and priors ``eta1 <= eta2``; m -> n cloning.

    ``n`` may be :data:`INFINITY`.  Priors with ``eta1 > 1/2`` are relabeled at
    construction and ``swapped`` records it, see :meth:`to_caller_labels`.
    A complex overlap is replaced by its modulus (the phase can be absorbed
    into the second state).
    """

    s: float
    eta1: float = 0.5
    n: float = 2
    m: int = 1
    swapped: bool = False

    def __post_init__(self):
        s = self.s
        if isinstance(s, complex):
            s = abs(s)
        s = float(s)
        if math.isnan(s) or s < 0.0:
            # negative real overlap: flip the sign of one state
            s = abs(s)
        if not s < 1.0:
            raise DomainError(f"overlap must satisfy 0 <= s < 1, got {self.s!r}")

        eta1 = float(self.eta1)
        if not 0.0 < eta1 < 1.0:
            raise DomainError(f"prior eta1 must lie in (0, 1), got {self.eta1!r}")
        swapped = self.swapped
        if eta1 > 0.5:
            eta1 = 1.0 - eta1
            swapped = not swapped

        if isinstance(self.m, bool) or not isinstance(self.m, int) or self.m < 1:
            raise DomainError(f"number of input copies must be a positive integer, got {self.m!r}")
        if isinstance(self.n, bool) or not isinstance(self.n, Real):
            raise DomainError(f"number of clones must be a number or INFINITY, got {self.n!r}")
        n = self.n if isinstance(self.n, int) else float(self.n)
        if math.isnan(n) or n < self.m:
            raise DomainError(f"need n >= m, got m={self.m}, n={self.n!r}")

        object.__setattr__(self, "s", s)
        object.__setattr__(self, "eta1", eta1)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "swapped", swapped)

    @classmethod
    def from_delta(cls, s: float, delta: float, n: float = 2, m: int = 1) -> "CloningProblem":
        """Build a problem from the prior gap ``delta = eta2 - eta1``."""
        if not -1.0 < delta < 1.0:
            raise DomainError(f"prior gap must lie in (-1, 1), got {delta!r}")
        return cls(s=s, eta1=(1.0 - delta) / 2.0, n=n, m=m)

    @property
    def eta2(self) -> float:
        return 1.0 - self.eta1

    @property
    def delta(self) -> float:
        return self.eta2 - self.eta1

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.n)

    @property
    def s_eff(self) -> float:
        """Overlap of the m-copy input states."""
        return self.s ** self.m

    @property
    def s_out(self) -> float:
        """Overlap of the ideal n-clone states, ``s**n``."""
        return 0.0 if self.is_infinite else self.s ** self.n

    @property
    def gamma(self) -> float:
        """Parabola width parameter ``s^2n / (1 - s^2n)``; zero for infinitely many clones."""
        s2n = self.s_out ** 2
        return s2n / (1.0 - s2n)

    def allocation(self, q1: float, q2: float) -> "FailureAllocation":
        return FailureAllocation(q1, q2, eta1=self.eta1)

    def with_n(self, n: float) -> "CloningProblem":
        return replace(self, n=n)

    def to_caller_labels(self, q1: float, q2: float) -> tuple[float, float]:
        """Map a canonical (q1, q2) pair back to the labels the caller used."""
        return (q2, q1) if self.swapped else (q1, q2)


def effective_problem(problem: CloningProblem) -> CloningProblem:
    """Fold m-copy inputs into a single-copy problem.

    The input overlap becomes ``s**m`` and the clone count is rescaled to
    ``n/m`` so the clone overlap ``s**n`` is preserved.  Identity for m = 1.
    """
    if problem.m == 1:
        return problem
    n = problem.n if problem.is_infinite else problem.n / problem.m
    return replace(problem, s=problem.s ** problem.m, n=n, m=1)


@dataclass(frozen=True)
class FailureAllocation:
    """Per-state failure probabilities; one point of the line ``eta1 q1 + eta2 q2 = Q``."""

    q1: float
    q2: float
    eta1: float = 0.5

    def __post_init__(self):
        for name in ("q1", "q2"):
            q = getattr(self, name)
            if not -1e-15 <= q <= 1.0 + 1e-15:
                raise DomainError(f"{name} must lie in [0, 1], got {q!r}")
            object.__setattr__(self, name, min(max(float(q), 0.0), 1.0))

    @property
    def eta2(self) -> float:
        return 1.0 - self.eta1

    @property
    def Q(self) -> float:
        return self.eta1 * self.q1 + self.eta2 * self.q2

    @property
    def Qbar(self) -> float:
        return 1.0 - self.Q

    @property
    def u(self) -> float:
        return math.sqrt(self.q1 * self.q2)

    @property
    def v(self) -> float:
        return 0.5 * (self.q1 + self.q2)

    @property
    def p1(self) -> float:
        return 1.0 - self.q1

    @property
    def p2(self) -> float:
        return 1.0 - self.q2


@dataclass(frozen=True)
class FidelityResult:
    zeta: float
    fidelity: float
    eta1_post: float | None = None
    eta2_post: float | None = None

    @property
    def delta_post(self) -> float | None:
        if self.eta1_post is None:
            return None
        return self.eta2_post - self.eta1_post


def zeta_uv(s: float, s_out: float, u: float, v: float) -> float:
    """The objective as a function of (u, v) for input overlap s and clone overlap s_out."""
    rad = clamped_sqrt(1.0 - s * s + 2.0 * s * u - 2.0 * v, "unitarity radicand")
    return (s - u) * math.sqrt(1.0 - s_out * s_out) - s_out * rad


def zeta_of_allocation(problem: CloningProblem, alloc: FailureAllocation) -> float:
    """Objective ``zeta`` for a failure split.  May be negative.

    Raises :class:`DomainError` when the split violates the unitarity
    constraint (clone overlap would exceed one).
    """
    p = effective_problem(problem)
    return zeta_uv(p.s, p.s_out, alloc.u, alloc.v)


def zeta_max(problem: CloningProblem) -> float:
    """Objective of the deterministic cloner (q1 = q2 = 0)."""
    p = effective_problem(problem)
    s, sn = p.s, p.s_out
    return s * math.sqrt(1.0 - sn * sn) - sn * math.sqrt(1.0 - s * s)


def fidelity_from_zeta(
    problem: CloningProblem,
    Q: float,
    zeta: float,
    alloc: FailureAllocation | None = None,
) -> FidelityResult:
    """Maximal conditional global fidelity reachable with objective value ``zeta`` at failure rate Q.

    When ``alloc`` is given the posterior priors ``eta_k p_k / (1 - Q)`` are
    filled in as well.
    """
    if not 0.0 <= Q < 1.0:
        raise DomainError(f"failure rate must lie in [0, 1), got {Q!r}")
    if zeta < -RADICAND_TOL:
        raise DomainError(f"zeta must be non-negative, got {zeta!r}")
    Qbar = 1.0 - Q
    disc = Qbar * Qbar - 4.0 * problem.eta1 * problem.eta2 * zeta * zeta
    if disc < -RADICAND_TOL:
        raise InfeasibleError(f"zeta={zeta!r} is not reachable at Q={Q!r}")
    F = (Qbar + math.sqrt(max(disc, 0.0))) / (2.0 * Qbar)
    if alloc is None:
        return FidelityResult(zeta=zeta, fidelity=F)
    e1 = problem.eta1 * alloc.p1 / Qbar
    e2 = problem.eta2 * alloc.p2 / Qbar
    return FidelityResult(zeta=zeta, fidelity=F, eta1_post=e1, eta2_post=e2)
