import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ffrclone import frio, parametric
from ffrclone.core import INFINITY, CloningProblem
from ffrclone.errors import DomainError
from ffrclone.neumark import (
    build_realization,
    fidelity_at_omega,
    max_fidelity,
    monte_carlo,
    optimal_omega,
)


def _realize(s, d, n, Q):
    p = CloningProblem.from_delta(s, d, n=n)
    return p, build_realization(p, parametric.solve_at_Q(p, Q))


def test_omega_special_cases(golden):
    assert optimal_omega(0.3, 0.1, 0.0) == 0.0
    assert optimal_omega(0.2, 0.2, 0.7) == 0.0
    w = optimal_omega(0.3, 0.1, 0.5)
    assert w == pytest.approx(golden["omega_0.3_0.1_0.5"], abs=1e-15)
    assert fidelity_at_omega(0.3, 0.1, w, 0.5) == pytest.approx(max_fidelity(0.3, 0.1, 0.5), abs=1e-12)
    assert max_fidelity(0.3, 0.1, 0.5) == pytest.approx(golden["fmax_0.3_0.1_0.5"], abs=1e-15)


@given(st.floats(0.0, math.pi / 4), st.floats(0.0, math.pi / 4), st.floats(0.01, 0.99))
def test_omega_is_a_strict_local_maximum(th, thp, dp):
    if abs(th - thp) < 1e-3:
        return
    w = optimal_omega(th, thp, dp)
    F = fidelity_at_omega(th, thp, w, dp)
    assert F == pytest.approx(max_fidelity(th, thp, dp), abs=1e-12)
    assert fidelity_at_omega(th, thp, w + 1e-3, dp) < F
    assert fidelity_at_omega(th, thp, w - 1e-3, dp) < F


def test_golden_isometry(golden):
    g = golden["isometry_0.7_0.1_n2_Q0.1"]
    _, r = _realize(0.7, 0.1, 2, 0.1)
    assert r.theta == pytest.approx(g["theta"], abs=1e-14)
    assert r.theta_prime == pytest.approx(g["theta_prime"], abs=1e-9)
    assert r.omega == pytest.approx(g["omega"], abs=1e-9)
    assert np.allclose(r.isometry, np.array(g["isometry"]), atol=1e-8, rtol=0)
    assert r.analytic_fidelity() == pytest.approx(g["fidelity"], abs=1e-12)


def test_perfect_point_realization():
    p = CloningProblem.from_delta(0.8, 0.8, n=2)
    q_pc = parametric.perfect_cloning_threshold(p)
    r = build_realization(p, parametric.solve_at_Q(p, q_pc))
    assert r.theta_prime == pytest.approx(r.theta, abs=1e-7)
    assert np.allclose(r.clone_states, r.ideal_clones, atol=1e-7)
    assert r.vector_fidelity() == pytest.approx(1.0, abs=1e-12)


def test_orthogonal_inputs_clone_exactly():
    p = CloningProblem.from_delta(0.0, 0.3, n=3)
    r = build_realization(p, parametric.solve_at_Q(p, 0.0))
    assert (r.p1, r.p2, r.q1, r.q2) == (1.0, 1.0, 0.0, 0.0)
    assert np.allclose(r.clone_states, r.ideal_clones, atol=1e-15)
    mc = monte_carlo(r, p, 1000, seed=1)
    assert mc.observed_Q == 0.0 and mc.observed_F == pytest.approx(1.0)


def test_requires_finite_n():
    p = CloningProblem.from_delta(0.7, 0.1, n=2)
    pt = parametric.solve_at_Q(p, 0.1)
    with pytest.raises(DomainError):
        build_realization(p.with_n(INFINITY), pt)


@given(st.floats(0.1, 0.95), st.floats(0.0, 0.9), st.sampled_from([2, 3, 5, 10]), st.floats(0.0, 1.2))
def test_realization_invariants(s, d, n, frac):
    p = CloningProblem.from_delta(s, d, n=n)
    Q = min(frac * parametric.perfect_cloning_threshold(p), frio.q_ud(p))
    r = build_realization(p, parametric.solve_at_Q(p, Q))
    assert r.gram_error() <= 1e-10
    assert 0.0 <= r.theta <= math.pi / 4 + 1e-15
    assert 0.0 <= r.theta_prime <= math.pi / 4 + 1e-15
    assert math.sqrt(r.p1 * r.p2) * r.s_prime + math.sqrt(r.q1 * r.q2) == pytest.approx(p.s, abs=1e-10)
    assert r.vector_fidelity() == pytest.approx(r.analytic_fidelity(), abs=1e-12)
    # the failure branch is the same vector for both inputs
    out = r.outputs()
    fail = out[1::2, :]
    for k, q in enumerate((r.q1, r.q2)):
        assert np.allclose(fail[:, k], math.sqrt(q) * r.failure_state, atol=1e-12)


def test_monte_carlo_statistics_and_determinism():
    p, r = _realize(0.7, 0.1, 2, 0.1)
    pt = parametric.solve_at_Q(p, 0.1)
    a = monte_carlo(r, p, 100_000, seed=11, shards=3)
    assert abs(a.observed_Q - pt.Q) <= 3 * a.observed_Q_se
    assert abs(a.observed_F - pt.fidelity) <= 3 * a.observed_F_se
    assert a == monte_carlo(r, p, 100_000, seed=11, shards=3)
    assert a != monte_carlo(r, p, 100_000, seed=12, shards=3)
    assert a.successes == round((1 - a.observed_Q) * a.shots)
    assert a.as_dict()["shots"] == 100_000


def test_monte_carlo_errors():
    p, r = _realize(0.7, 0.1, 2, 0.1)
    with pytest.raises(DomainError):
        monte_carlo(r, p, 0, seed=1)
    with pytest.raises(DomainError):
        monte_carlo(r, p, 10, seed=1, shards=0)
