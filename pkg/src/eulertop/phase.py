"""Period detection, enclosed area and the per-period rotation angle about p."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .dynamics import (
    STEPS_PER_TURN,
    BodyState,
    default_step,
    euler_rhs,
    integrate,
    kinetic_energy,
    step_momentum,
)
from .errors import AxisNotFixed, Equilibrium, InvalidInput, NumericalFailure, OpenOrbit, SeparatrixTimeout
from .so3 import FOUR_PI, SignedArea, axis_angle_about, circular_distance, signed_excess, wrap_2pi

CLOSURE_TOL = 1e-8
ORBIT_CLOSURE_TOL = 1e-6
DEFAULT_TURNS = 50


def _check_generic_orbit(P0, I):
    p = float(np.linalg.norm(P0))
    if not p > 0:
        raise Equilibrium("zero momentum")
    for i in range(3):
        for sign in (1.0, -1.0):
            axis = np.zeros(3)
            axis[i] = sign * p
            if np.linalg.norm(P0 - axis) < 1e-8 * p:
                raise Equilibrium(f"P0 is within 1e-8 p of the equilibrium {'+' if sign > 0 else '-'}p e{i + 1}")
    if np.linalg.norm(euler_rhs(P0, I)) <= 1e-12 * p * p / I.smallest:
        raise Equilibrium("Euler flow vanishes at P0")
    if I.is_generic():
        K = kinetic_energy(P0, I)
        Ksep = I.separatrix_energy(p)
        if abs(K - Ksep) <= 1e-8 * Ksep:
            raise SeparatrixTimeout(f"K={K!r} is on the separatrix energy {Ksep!r}; the orbit never closes")
    return p


def detect_period(P0, I, max_time=None, h=None, section_normal=None):
    """First return time of the momentum to the section through ``P0``.

    The section is the plane through P0 (and the origin) with normal
    ``section_normal``, by default the flow direction at P0; crossings are
    counted in the flow's sense only. The crossing inside the bracketing
    step is refined by bracketed root finding on a partial step.
    """
    P0 = np.asarray(P0, dtype=float)
    p = _check_generic_orbit(P0, I)
    h = default_step(I, p) if h is None else float(h)
    if max_time is None:
        max_time = DEFAULT_TURNS * STEPS_PER_TURN * default_step(I, p)
    v0 = euler_rhs(P0, I)
    m = v0 / np.linalg.norm(v0) if section_normal is None else np.asarray(section_normal, dtype=float)
    if m @ v0 <= 0:
        raise InvalidInput("section normal must point along the flow at P0")
    m = m / np.linalg.norm(m)
    a = I.inverse
    q = np.array([1.0, 0.0, 0.0, 0.0])
    P_start, t_start = P0, 0.0
    chunk = STEPS_PER_TURN
    while t_start < max_time:
        P, _, _ = _kernels.run(P_start, q, a, h, chunk, False)
        if not np.all(np.isfinite(P)):
            raise NumericalFailure("non-finite momentum while searching for the period")
        sigma = (P - P0) @ m
        hits = np.nonzero((sigma[:-1] < 0) & (sigma[1:] >= 0))[0]
        if len(hits):
            k = int(hits[0])
            t_k = t_start + k * h
            if sigma[k + 1] == 0.0:
                T = t_k + h
            else:
                tau = brentq(lambda s: (step_momentum(P[k], I, s) - P0) @ m, 0.0, h,
                             xtol=1e-13 * max(t_k, h), rtol=4 * np.finfo(float).eps, maxiter=200)
                T = t_k + tau
            if T > max_time:
                break
            return T
        P_start, t_start = P[-1].copy(), t_start + chunk * h
    raise SeparatrixTimeout(f"no return within max_time={max_time:g}")


def one_period(P0, S0, I, h=None, max_time=None, section_normal=None):
    """Detect the period, then integrate exactly one period on a grid with ``h <= default``.

    Returns ``(T, trajectory)``; the last sample sits at ``t = T``.
    """
    P0 = np.asarray(P0, dtype=float)
    p = float(np.linalg.norm(P0))
    h0 = default_step(I, p) if h is None else float(h)
    T = detect_period(P0, I, max_time=max_time, h=h0, section_normal=section_normal)
    n = max(int(math.ceil(T / h0 - 1e-9)), 3)
    traj = integrate(BodyState(P0, np.eye(3) if S0 is None else np.asarray(S0, dtype=float)), I, T / n, n)
    end_err = float(np.linalg.norm(traj.P[-1] - P0))
    if end_err > CLOSURE_TOL * p and h is None:
        raise NumericalFailure(f"orbit closes only to {end_err:.2e}")
    return T, traj


def _hermite_correction(u, du):
    """Area between geodesic chords and the cubic Hermite arcs through each edge (unit sphere).

    ``du`` are per-sample tangents scaled by the step, in travel direction.
    """
    a, b = u, np.roll(u, -1, axis=0)
    d0, d1 = du, np.roll(du, -1, axis=0)
    c = b - a
    mid = a + b
    mid /= np.linalg.norm(mid, axis=1)[:, None]
    w = -np.cross(c, d0) / 10.0 + np.cross(c, d1) / 10.0 - np.cross(d0, d1) / 60.0
    return float(np.einsum("ij,ij->", mid, w))


def enclosed_area(orbit, p=None):
    """Signed area enclosed by one period of the momentum orbit.

    Geodesic polygon through the samples plus a per-edge Hermite correction
    built from the Euler flow at the samples, which lifts the polygon's
    second-order accuracy to fourth order.
    """
    P = np.asarray(orbit.P, dtype=float)
    p = float(np.linalg.norm(P[0])) if p is None else float(p)
    gap = float(np.linalg.norm(P[-1] - P[0]))
    if gap > ORBIT_CLOSURE_TOL * p:
        raise OpenOrbit(f"orbit does not close: gap {gap:.2e} > {ORBIT_CLOSURE_TOL:g} p")
    verts = P[:-1]
    raw = signed_excess(verts, p)
    u = verts / np.linalg.norm(verts, axis=1)[:, None]
    vel = euler_rhs(verts, orbit.inertia) / p
    direction = 1.0 if vel[0] @ (P[1] - P[0]) >= 0 else -1.0
    raw += _hermite_correction(u, direction * orbit.h * vel) * p * p
    total = FOUR_PI * p * p
    area = raw % total
    if area >= total:
        area = 0.0
    return SignedArea(area, area - total)


def montgomery_delta_theta(K, T, A, p):
    """``2KT/p - A/p^2`` wrapped to [0, 2 pi)."""
    if not (p > 0 and T > 0):
        raise InvalidInput("need p > 0 and T > 0")
    return wrap_2pi(2.0 * K * T / p - A / (p * p))


def measured_delta_theta(trajectory, p_vector=None):
    """Angle in [0, 2 pi) of ``S(T) S(0)^{-1}`` about the spatial momentum direction."""
    P = trajectory.P
    p = float(np.linalg.norm(P[0]))
    gap = float(np.linalg.norm(P[-1] - P[0]))
    if gap > ORBIT_CLOSURE_TOL * p:
        raise AxisNotFixed(f"momentum did not return: gap {gap:.2e}")
    S0, S1 = trajectory.S[0], trajectory.S[-1]
    if p_vector is None:
        p_vector = S0 @ P[0]
    n = np.asarray(p_vector, dtype=float)
    n = n / np.linalg.norm(n)
    R = S1 @ S0.T
    return wrap_2pi(axis_angle_about(R, n, tol=ORBIT_CLOSURE_TOL))


@dataclass(frozen=True)
class PhaseReport:
    p: float
    K: float
    T: float
    area: float
    area_complement: float
    dynamical_phase: float
    geometric_phase: float
    delta_theta_formula: float
    delta_theta_measured: float
    residual: float

    def to_dict(self):
        return {k: float(v) for k, v in asdict(self).items()}


def report_from_orbit(T, orbit):
    P0 = orbit.P[0]
    I = orbit.inertia
    p = float(np.linalg.norm(P0))
    K = kinetic_energy(P0, I)
    A = enclosed_area(orbit, p)
    formula = montgomery_delta_theta(K, T, A.area, p)
    measured = measured_delta_theta(orbit)
    return PhaseReport(
        p=p,
        K=K,
        T=T,
        area=A.area,
        area_complement=A.complement,
        dynamical_phase=2.0 * K * T / p,
        geometric_phase=A.area / (p * p),
        delta_theta_formula=formula,
        delta_theta_measured=measured,
        residual=circular_distance(formula, measured),
    )


def phase_report(P0, S0, I, h=None, max_time=None):
    """Predicted and measured rotation about p after one period of the momentum."""
    T, orbit = one_period(P0, S0, I, h=h, max_time=max_time)
    return report_from_orbit(T, orbit)
