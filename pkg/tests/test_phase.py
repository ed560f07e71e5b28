import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eulertop.dynamics import BodyState, InertiaSpec, euler_rhs, integrate, kinetic_energy, momentum_from_invariants
from eulertop.errors import Equilibrium, OpenOrbit, SeparatrixTimeout
from eulertop.phase import (
    detect_period,
    enclosed_area,
    measured_delta_theta,
    montgomery_delta_theta,
    one_period,
    phase_report,
)
from eulertop.so3 import FOUR_PI, circular_distance, rotation_about
from eulertop.transport import frame_rotation_angle

from conftest import I321, SYMMETRIC, SYMMETRIC_P0

# first return of P0 = (sqrt(0.6), 0, sqrt(0.4)) for I=(3,2,1), from scipy's DOP853
# (rtol 1e-13) with event location on the same section
T_K03_REFERENCE = 20.310370481141458


def test_symmetric_top_period():
    # precession rate (1/I3 - 1/I1) P3 = 0.4
    assert detect_period(SYMMETRIC_P0, SYMMETRIC) == pytest.approx(2 * math.pi / 0.4, rel=1e-12)


def test_period_equilibrium():
    with pytest.raises(Equilibrium):
        detect_period(np.array([1.0, 0, 0]), I321)
    with pytest.raises(Equilibrium):
        detect_period(np.array([0.6, 0.8, 0.0]), SYMMETRIC)


def test_period_separatrix():
    P0 = np.array([math.sqrt(0.75), 0, 0.5])  # on the heteroclinic plane P3 = P1 / sqrt(3)
    assert kinetic_energy(P0, I321) == pytest.approx(0.25)
    with pytest.raises(SeparatrixTimeout):
        detect_period(P0, I321)
    P0 = momentum_from_invariants(I321, 1.0, 0.25 - 1e-6)
    with pytest.raises(SeparatrixTimeout):
        detect_period(P0, I321, max_time=30.0)


def test_period_regression_against_reference():
    P0 = momentum_from_invariants(I321, 1.0, 0.3)
    assert detect_period(P0, I321) == pytest.approx(T_K03_REFERENCE, rel=1e-10)


def test_period_closes_orbit(orbits):
    for K, (T, orbit) in orbits.items():
        assert orbit.t[-1] == pytest.approx(T, rel=1e-14)
        assert np.linalg.norm(orbit.P[-1] - orbit.P[0]) <= 1e-8


def test_period_independent_of_section():
    P0 = momentum_from_invariants(I321, 1.0, 0.3)
    v = euler_rhs(P0, I321)
    v /= np.linalg.norm(v)
    b = np.cross(P0, v)
    T0 = detect_period(P0, I321)
    for beta in (-0.9, 0.4, 1.2):
        m = math.cos(beta) * v + math.sin(beta) * b
        assert detect_period(P0, I321, section_normal=m) == pytest.approx(T0, rel=1e-9)


def test_symmetric_area_is_cap(symmetric_orbit):
    T, orbit = symmetric_orbit
    A = enclosed_area(orbit)
    # the orbit runs clockwise round the cap P3 = 0.8 seen from outside
    assert A.complement == pytest.approx(-0.4 * math.pi, abs=1e-10)
    assert A.area == pytest.approx(3.6 * math.pi, abs=1e-10)
    R = enclosed_area(orbit.reversed())
    assert (A.area + R.area) % FOUR_PI == pytest.approx(0.0, abs=1e-10) or \
        (A.area + R.area) % FOUR_PI == pytest.approx(FOUR_PI, abs=1e-10)
    assert R.area == pytest.approx(0.4 * math.pi, abs=1e-10)


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.2])
def test_small_cap_area(eps):
    # axisymmetric about e1: orbits are exact circles of angular radius eps
    I = InertiaSpec(1.5, 1.0, 1.0)
    P0 = np.array([math.cos(eps), 0.0, math.sin(eps)])
    T, orbit = one_period(P0, None, I)
    A = enclosed_area(orbit)
    small = min(A.area, -A.complement, key=abs)
    assert small == pytest.approx(2 * math.pi * (1 - math.cos(eps)), rel=1e-10)
    assert small == pytest.approx(math.pi * eps ** 2, rel=eps ** 2 / 10)


def test_open_orbit_rejected():
    P0 = momentum_from_invariants(I321, 1.0, 0.3)
    half = integrate(BodyState(P0), I321, 0.01, 1000)
    with pytest.raises(OpenOrbit):
        enclosed_area(half)


def test_montgomery_formula_examples():
    assert montgomery_delta_theta(0.3, 2.0, 2 * 0.3 * 2.0, 1.0) == pytest.approx(0.0, abs=1e-15)
    K = 0.5 * (0.36 / 2 + 0.64 / 1)
    assert K == pytest.approx(0.41)
    assert montgomery_delta_theta(K, 5 * math.pi, -0.4 * math.pi, 1.0) == pytest.approx(math.pi / 2, abs=1e-12)
    a = montgomery_delta_theta(0.41, 7.0, 1.3, 1.0)
    b = montgomery_delta_theta(0.41, 7.0, 1.3 - FOUR_PI, 1.0)
    assert circular_distance(a, b) < 1e-12


def test_measured_identity():
    traj = integrate(BodyState(np.array([0.0, 0.0, 1.0]), rotation_about(np.array([0.6, 0.8, 0.0]), 1.0)),
                     InertiaSpec(2, 2, 2), 0.01, 0)
    assert measured_delta_theta(traj) == 0.0


@pytest.mark.parametrize("t_end", [1.0, 7.5, 20.0])
def test_measured_spherical_top(t_end):
    I0 = 1.5
    P0 = np.array([0.2, 0.4, -0.8])
    p = np.linalg.norm(P0)
    traj = integrate(BodyState(P0, rotation_about(np.array([0.0, 0.6, 0.8]), 2.0)), InertiaSpec(I0, I0, I0),
                     t_end / 1000, 1000)
    got = measured_delta_theta(traj)
    assert circular_distance(got, p / I0 * t_end) < 1e-12


def test_measured_symmetric_top(symmetric_orbit):
    T, orbit = symmetric_orbit
    assert circular_distance(measured_delta_theta(orbit), math.pi / 2) < 1e-10


def test_phase_report_symmetric():
    rep = phase_report(SYMMETRIC_P0, np.eye(3), SYMMETRIC)
    assert rep.residual <= 1e-6
    assert rep.K == pytest.approx(0.41, abs=1e-15)
    assert rep.T == pytest.approx(5 * math.pi, rel=1e-10)
    assert rep.dynamical_phase == pytest.approx(2 * rep.K * rep.T / rep.p)
    assert rep.geometric_phase == pytest.approx(rep.area / rep.p ** 2)
    assert circular_distance(rep.delta_theta_formula, math.pi / 2) < 1e-6


def test_phase_report_i321():
    rep = phase_report(momentum_from_invariants(I321, 1.0, 0.3), None, I321)
    assert rep.residual <= 1e-5
    finer = phase_report(momentum_from_invariants(I321, 1.0, 0.3), None, I321, h=0.5 * 2 * math.pi * 2 / 20000)
    assert circular_distance(rep.delta_theta_measured, finer.delta_theta_measured) < 1e-9


def test_phase_report_equilibrium():
    with pytest.raises(Equilibrium):
        phase_report(np.array([0.0, 0.0, 2.0]), None, I321)


def test_measured_equals_minus_E_rotation(orbits, symmetric_orbit):
    for T, orbit in [*orbits.values(), symmetric_orbit]:
        assert circular_distance(measured_delta_theta(orbit), -frame_rotation_angle(orbit)) <= 1e-5


@settings(max_examples=8)
@given(st.floats(0.2, 5.0), st.sampled_from([0.2, 0.3, 0.45]))
def test_scale_covariance(lam, K):
    P0 = momentum_from_invariants(I321, 1.0, K)
    base = phase_report(P0, None, I321)
    scaled = phase_report(lam * P0, None, I321)
    assert scaled.T == pytest.approx(base.T / lam, rel=1e-9)
    assert scaled.K == pytest.approx(base.K * lam ** 2, rel=1e-12)
    assert circular_distance(scaled.geometric_phase, base.geometric_phase) < 1e-9
    assert circular_distance(scaled.delta_theta_measured, base.delta_theta_measured) < 1e-9
