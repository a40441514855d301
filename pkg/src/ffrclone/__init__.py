"""Optimal probabilistic cloning of two pure states at a fixed failure rate."""

__version__ = "0.1.0"

from .core import (
    INFINITY,
    CloningProblem,
    FailureAllocation,
    FidelityResult,
    effective_problem,
    fidelity_from_zeta,
    zeta_max,
    zeta_of_allocation,
)
from .errors import (
    BracketError,
    ConsistencyError,
    DegenerateError,
    DomainError,
    InfeasibleError,
    RegimeError,
)
from .parametric import (
    SolutionPoint,
    TradeoffCurve,
    perfect_cloning_threshold,
    phi_max,
    phi_min,
    solution_at_phi,
    solve_at_Q,
    tradeoff_curve,
)
from .oracle import brute_force_zeta_min
from .frio import frio_success, q_threshold, q_ud
from .asymptotic import asymptotic_fidelity, asymptotic_solution, phase_transition_scan
from .neumark import build_realization, monte_carlo
