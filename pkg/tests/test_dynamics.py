import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eulertop.dynamics import (
    BodyState,
    InertiaSpec,
    classify_equilibria,
    default_step,
    euler_rhs,
    integrate,
    kinetic_energy,
    momentum_from_invariants,
    spatial_angular_velocity,
)
from eulertop.errors import DegenerateInertia, EnergyOutOfRange, InvalidInertia, StepTooLarge
from eulertop.so3 import E1, E2, E3, rotation_about, rotation_distance

from conftest import I321

moment = st.floats(0.5, 5.0)
inertias = st.tuples(moment, moment, moment).filter(
    lambda m: all(m[i] <= m[(i + 1) % 3] + m[(i + 2) % 3] for i in range(3))
).map(lambda m: InertiaSpec(*m))
vec3 = st.tuples(*[st.floats(-3, 3)] * 3).map(np.array)


def test_inertia_validation():
    with pytest.raises(InvalidInertia):
        InertiaSpec(1.0, -1.0, 1.0)
    with pytest.raises(InvalidInertia):
        InertiaSpec(5.0, 1.0, 1.0)
    I, perm = InertiaSpec(1.0, 3.0, 2.0).canonical()
    assert I.as_tuple() == (3.0, 2.0, 1.0)
    assert perm == (1, 2, 0)


def test_euler_rhs_examples():
    assert np.array_equal(euler_rhs((2.0, 0, 0), I321), np.zeros(3))
    assert np.allclose(euler_rhs((0.3, -1.2, 0.7), InertiaSpec(2, 2, 2)), 0, atol=0)
    # component equations: ((1/I3 - 1/I2) P2 P3, (1/I1 - 1/I3) P3 P1, (1/I2 - 1/I1) P1 P2)
    assert np.allclose(euler_rhs((1.0, 1.0, 1.0), I321), (1 / 2, -2 / 3, 1 / 6), atol=1e-15)


@given(inertias, vec3)
def test_euler_rhs_tangent_to_sphere(I, P):
    assert abs(euler_rhs(P, I) @ P) <= 1e-14 * max(1.0, P @ P) * np.max(I.inverse) * max(1.0, np.linalg.norm(P))


def test_kinetic_energy_examples():
    assert kinetic_energy(np.zeros(3), I321) == 0.0
    assert kinetic_energy((1, 0, 0), I321) == pytest.approx(1 / 6, rel=1e-15)
    assert kinetic_energy((1, 1, 1), I321) == pytest.approx(11 / 12, rel=1e-15)


def test_spatial_angular_velocity():
    assert np.allclose(spatial_angular_velocity(BodyState(np.array([1.0, 0, 0])), I321), (1 / 3, 0, 0))
    assert np.array_equal(spatial_angular_velocity(BodyState(np.zeros(3)), I321), np.zeros(3))


def test_spherical_top_closed_form():
    I0 = 1.7
    I = InertiaSpec(I0, I0, I0)
    P0 = np.array([0.3, -0.5, 0.9])
    p = np.linalg.norm(P0)
    S0 = rotation_about(E1, 0.4)
    traj = integrate(BodyState(P0, S0), I, 0.01, 500)
    assert np.allclose(traj.P, P0, atol=1e-15)
    for k in (0, 123, 500):
        expected = S0 @ rotation_about(P0 / p, p / I0 * traj.t[k])
        assert rotation_distance(traj.S[k], expected) < 1e-12
        omega = spatial_angular_velocity(traj.state(k), I)
        assert np.allclose(omega, S0 @ P0 / I0, atol=1e-13)


def test_equilibrium_closed_form():
    p = 1.3
    traj = integrate(BodyState(p * E1, np.eye(3)), I321, 0.01, 300)
    for k in (0, 150, 300):
        assert rotation_distance(traj.S[k], rotation_about(E1, p / 3.0 * traj.t[k])) < 1e-12


def test_zero_steps():
    traj = integrate(BodyState(np.array([1.0, 2.0, 3.0])), I321, 0.1, 0)
    assert len(traj) == 1
    assert np.array_equal(traj.P[0], (1.0, 2.0, 3.0))


def test_step_too_large():
    with pytest.raises(StepTooLarge):
        integrate(BodyState(momentum_from_invariants(I321, 1.0, 0.3)), I321, 2.0, 10)


def test_invariants_along_trajectory():
    P0 = momentum_from_invariants(I321, 1.0, 0.3)
    traj = integrate(BodyState(P0, rotation_about(E2, 1.0)), I321, default_step(I321, 1.0), 40000)
    assert traj.norm_drift <= 1e-9
    assert traj.energy_drift <= 1e-9
    m = traj.spatial_momentum
    assert np.max(np.linalg.norm(m - m[0], axis=1)) <= 1e-9
    orth = np.einsum("kji,kjl->kil", traj.S, traj.S) - np.eye(3)
    assert np.max(np.abs(orth)) <= 1e-10
    norms = np.linalg.norm(traj.P, axis=1)
    assert traj.norm_drift == pytest.approx(np.max(np.abs(norms - norms[0])) / norms[0], abs=1e-300)


def test_projection_toggle_keeps_norm():
    P0 = momentum_from_invariants(I321, 1.0, 0.3)
    traj = integrate(BodyState(P0), I321, 0.05, 2000, project=True)
    assert np.max(np.abs(np.linalg.norm(traj.P, axis=1) - 1.0)) < 1e-15 * 10


def test_fourth_order_convergence():
    P0 = momentum_from_invariants(I321, 1.0, 0.22)
    state = BodyState(P0, rotation_about(np.array([0.6, 0.0, 0.8]), 0.9))
    T = 10.0
    base = 100
    ref = integrate(state, I321, T / (base * 64), base * 64)

    def err(n):
        tr = integrate(state, I321, T / n, n)
        return max(np.max(np.abs(tr.P[-1] - ref.P[-1])), rotation_distance(tr.S[-1], ref.S[-1]))

    errs = [err(base), err(2 * base), err(4 * base)]
    for coarse, fine in zip(errs, errs[1:]):
        assert coarse / fine == pytest.approx(16.0, rel=0.15)


def test_classify_equilibria():
    eq = classify_equilibria(I321, 1.0)
    assert len(eq) == 6
    saddles = [e for e in eq if not e.stable]
    assert sorted(tuple(e.P) for e in saddles) == [(0.0, -1.0, 0.0), (0.0, 1.0, 0.0)]
    assert {e.label for e in eq} == {"center", "saddle"}
    assert all(np.linalg.norm(e.P) == 2.0 for e in classify_equilibria(I321, 2.0))
    with pytest.raises(DegenerateInertia):
        classify_equilibria(InertiaSpec(3, 3, 1), 1.0)


def test_momentum_from_invariants_extremes():
    assert np.allclose(momentum_from_invariants(I321, 1.0, 1 / 6), E1, atol=1e-15)
    assert np.allclose(momentum_from_invariants(I321, 1.0, 1 / 2), E3, atol=1e-7)


def test_momentum_from_invariants_against_linear_solve():
    # |P|^2 = 1 and P1^2/3 + P3^2/1 = 2K with P2 = 0, linear in (P1^2, P3^2)
    sq = np.linalg.solve([[1.0, 1.0], [1 / 3, 1.0]], [1.0, 0.6])
    assert np.allclose(sq, (0.6, 0.4))
    P = momentum_from_invariants(I321, 1.0, 0.3)
    assert np.allclose(P, (math.sqrt(sq[0]), 0.0, math.sqrt(sq[1])), atol=1e-15)
    assert kinetic_energy(P, I321) == pytest.approx(0.3, rel=1e-12)


@given(inertias.filter(lambda I: I.is_generic(1e-3)), st.floats(0.1, 10), st.floats(0.01, 0.99))
def test_momentum_from_invariants_hits_invariants(I, p, frac):
    lo, hi = p * p / (2 * I.largest), p * p / (2 * I.smallest)
    K = lo + frac * (hi - lo)
    P = momentum_from_invariants(I, p, K)
    assert np.linalg.norm(P) == pytest.approx(p, rel=1e-12)
    assert kinetic_energy(P, I) == pytest.approx(K, rel=1e-12)
    assert P[I.order[1]] == 0.0


def test_momentum_from_invariants_errors():
    with pytest.raises(EnergyOutOfRange):
        momentum_from_invariants(I321, 1.0, 0.6)
    with pytest.raises(EnergyOutOfRange):
        momentum_from_invariants(I321, 1.0, 0.3, family="e1")
