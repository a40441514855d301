"""Explicit isometry realizing an optimal cloner, and a Monte Carlo check of it.

All states live in two-dimensional real planes: the input pair, and the
plane spanned by the ideal clones ``|psi_k^n>``.  The output space is
(clone plane) x (success/failure flag), so the isometry is a real 4 x 2
matrix; no ``2**n``-dimensional tensor product is ever formed.

Basis conventions (``k = 1, 2``)::

    |psi_k^n> = cos(theta) |0> - (-1)^k sin(theta) |1>,     cos 2 theta  = s^n
    |Psi_k>   = cos(theta') |0'> - (-1)^k sin(theta') |1'>, cos 2 theta' = s'
    |0'> = cos(omega) |0> - sin(omega) |1>,  |1'> = sin(omega) |0> + cos(omega) |1>

and the failure branch always lands on ``|0'>``.  Output vectors are
ordered as ``kron(clone, flag)`` with flag basis ``(success, failure)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CloningProblem, effective_problem
from .errors import ConsistencyError, DomainError
from .parametric import SolutionPoint

GRAM_TOL = 1e-10
FLAG_SUCCESS = np.array([1.0, 0.0])
FLAG_FAILURE = np.array([0.0, 1.0])


def optimal_omega(theta: float, theta_prime: float, delta_post: float) -> float:
    """Basis rotation that maximizes the conditional fidelity."""
    x = 2.0 * (theta - theta_prime)
    return 0.5 * math.atan2(delta_post * math.sin(x), math.cos(x))


def fidelity_at_omega(theta: float, theta_prime: float, omega: float, delta_post: float) -> float:
    x = 2.0 * (theta - theta_prime)
    return 0.5 + 0.5 * (math.cos(x) * math.cos(2 * omega) + delta_post * math.sin(x) * math.sin(2 * omega))


def max_fidelity(theta: float, theta_prime: float, delta_post: float) -> float:
    """Fidelity after optimizing omega."""
    x = 2.0 * (theta - theta_prime)
    return 0.5 + 0.5 * math.sqrt(math.cos(x) ** 2 + delta_post ** 2 * math.sin(x) ** 2)


def _pair(angle: float) -> np.ndarray:
    """Columns ``cos a |0> - (-1)^k sin a |1>`` for k = 1, 2."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, c], [s, -s]])


@dataclass(frozen=True)
class ClonerRealization:
    theta: float
    theta_prime: float
    omega: float
    p1: float
    p2: float
    q1: float
    q2: float
    s_prime: float
    eta1_post: float
    eta2_post: float
    input_states: np.ndarray   # 2 x 2, columns |psi_1>, |psi_2>
    ideal_clones: np.ndarray   # 2 x 2, columns |psi_1^n>, |psi_2^n>
    clone_states: np.ndarray   # 2 x 2, columns |Psi_1>, |Psi_2>
    failure_state: np.ndarray  # |0'>
    isometry: np.ndarray       # 4 x 2

    @property
    def delta_post(self) -> float:
        return self.eta2_post - self.eta1_post

    def outputs(self) -> np.ndarray:
        """4 x 2 matrix whose columns are the isometry applied to each input state."""
        return self.isometry @ self.input_states

    def gram_error(self) -> float:
        return float(np.max(np.abs(self.isometry.T @ self.isometry - np.eye(2))))

    def clone_fidelities(self) -> np.ndarray:
        """``|<psi_k^n | Psi_k>|^2`` for k = 1, 2."""
        return np.einsum("ik,ik->k", self.ideal_clones, self.clone_states) ** 2

    def vector_fidelity(self) -> float:
        F = self.clone_fidelities()
        return float(self.eta1_post * F[0] + self.eta2_post * F[1])

    def analytic_fidelity(self) -> float:
        return max_fidelity(self.theta, self.theta_prime, self.delta_post)


def build_realization(problem: CloningProblem, point: SolutionPoint) -> ClonerRealization:
    """Assemble the isometry ``V|psi_k> = sqrt(p_k)|Psi_k>|s> + sqrt(q_k)|0'>|f>`` for a solved point."""
    p = effective_problem(problem)
    if p.is_infinite:
        raise DomainError("a realization needs a finite number of clones")
    q1, q2 = point.q1_star, point.q2_star
    p1, p2 = 1.0 - q1, 1.0 - q2
    Qbar = 1.0 - point.Q
    if Qbar <= 0.0:
        raise DomainError("cloner never succeeds")
    e1_post, e2_post = p.eta1 * p1 / Qbar, p.eta2 * p2 / Qbar

    s_prime = min(max(point.s_prime, -1.0), 1.0)
    theta = 0.5 * math.acos(p.s_out)
    theta_prime = 0.5 * math.acos(s_prime)
    omega = optimal_omega(theta, theta_prime, e2_post - e1_post)

    basis0 = np.array([math.cos(omega), -math.sin(omega)])
    basis1 = np.array([math.sin(omega), math.cos(omega)])
    primed = np.column_stack([basis0, basis1])
    clones = primed @ _pair(theta_prime)
    ideal = _pair(theta)
    inputs = _pair(0.5 * math.acos(p.s))

    amps = (math.sqrt(p1), math.sqrt(p2)), (math.sqrt(q1), math.sqrt(q2))
    out = np.column_stack([
        amps[0][k] * np.kron(clones[:, k], FLAG_SUCCESS) + amps[1][k] * np.kron(basis0, FLAG_FAILURE)
        for k in range(2)
    ])
    V = out @ np.linalg.inv(inputs)
    real = ClonerRealization(
        theta=theta, theta_prime=theta_prime, omega=omega,
        p1=p1, p2=p2, q1=q1, q2=q2, s_prime=s_prime,
        eta1_post=e1_post, eta2_post=e2_post,
        input_states=inputs, ideal_clones=ideal, clone_states=clones,
        failure_state=basis0, isometry=V,
    )
    err = real.gram_error()
    if err > GRAM_TOL:
        raise ConsistencyError(f"isometry columns not orthonormal (max deviation {err:.3e})")
    return real


@dataclass(frozen=True)
class MonteCarloReport:
    shots: int
    seed: int
    shards: int
    observed_Q: float
    observed_Q_se: float
    observed_F: float
    observed_F_se: float
    per_state_failure: tuple[float, float]
    per_state_failure_se: tuple[float, float]
    successes: int

    def as_dict(self) -> dict:
        return {
            "shots": self.shots,
            "seed": self.seed,
            "shards": self.shards,
            "observed_Q": self.observed_Q,
            "observed_Q_se": self.observed_Q_se,
            "observed_F": self.observed_F,
            "observed_F_se": self.observed_F_se,
            "q1_hat": self.per_state_failure[0],
            "q2_hat": self.per_state_failure[1],
            "q1_hat_se": self.per_state_failure_se[0],
            "q2_hat_se": self.per_state_failure_se[1],
            "successes": self.successes,
        }


def _shard_sizes(shots: int, shards: int) -> list[int]:
    base, extra = divmod(shots, shards)
    return [base + (1 if i < extra else 0) for i in range(shards)]


def monte_carlo(
    realization: ClonerRealization,
    problem: CloningProblem,
    shots: int,
    seed: int,
    shards: int = 1,
) -> MonteCarloReport:
    """Sample input, flag outcome and conditional clone fidelity shot by shot.

    Generator: PCG64.  Shard ``i`` draws from child ``i`` of
    ``SeedSequence(seed)`` and handles the i-th contiguous block of shots, so
    the report depends only on ``(seed, shards)``, not on execution order.
    The fidelity of a successful shot is the exact overlap of the flagged
    clone with the ideal clones.
    """
    if shots < 1:
        raise DomainError("need at least one shot")
    if shards < 1:
        raise DomainError("need at least one shard")
    p = effective_problem(problem)
    out = realization.outputs()
    # amplitudes on the success flag are the even rows of kron(clone, flag)
    success_amp = out[0::2, :]
    p_success = np.sum(success_amp ** 2, axis=0)
    clones = success_amp / np.sqrt(np.where(p_success > 0.0, p_success, 1.0))
    fid = np.einsum("ik,ik->k", realization.ideal_clones, clones) ** 2

    children = np.random.SeedSequence(seed).spawn(shards)
    states, fails = [], []
    for child, size in zip(children, _shard_sizes(shots, shards)):
        rng = np.random.Generator(np.random.PCG64(child))
        k = (rng.random(size) >= p.eta1).astype(np.intp)
        fails.append(rng.random(size) >= p_success[k])
        states.append(k)
    k = np.concatenate(states)
    failed = np.concatenate(fails)

    n_fail = int(failed.sum())
    Qhat = n_fail / shots
    ok = ~failed
    n_ok = int(ok.sum())
    f_ok = fid[k[ok]]
    if n_ok:
        Fhat = float(f_ok.mean())
        Fse = float(f_ok.std(ddof=1) / math.sqrt(n_ok)) if n_ok > 1 else 0.0
    else:
        Fhat, Fse = math.nan, math.nan

    qk, qse = [], []
    for idx in (0, 1):
        mask = k == idx
        cnt = int(mask.sum())
        if cnt:
            qh = float(failed[mask].mean())
            qk.append(qh)
            qse.append(math.sqrt(qh * (1.0 - qh) / cnt))
        else:
            qk.append(math.nan)
            qse.append(math.nan)
    return MonteCarloReport(
        shots=shots,
        seed=seed,
        shards=shards,
        observed_Q=Qhat,
        observed_Q_se=math.sqrt(Qhat * (1.0 - Qhat) / shots),
        observed_F=Fhat,
        observed_F_se=Fse,
        per_state_failure=(qk[0], qk[1]),
        per_state_failure_se=(qse[0], qse[1]),
        successes=n_ok,
    )
