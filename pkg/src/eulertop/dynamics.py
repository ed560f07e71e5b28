"""Euler equation on the momentum sphere and attitude reconstruction."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import (
    DegenerateInertia,
    EnergyOutOfRange,
    InvalidInertia,
    InvalidInput,
    NumericalFailure,
    StepTooLarge,
)
from .so3 import matrix_to_quat, quat_to_matrix

STEPS_PER_TURN = 20000
MAX_STEP_JUMP = 1e-6


@dataclass(frozen=True)
class InertiaSpec:
    """Principal moments of inertia along the body axes e1, e2, e3.

    Moments may be given in any order; :meth:`canonical` sorts them in
    descending order and records the permutation. Methods that need to know
    which axis is the largest/middle/smallest use :attr:`order`.
    """

    I1: float
    I2: float
    I3: float

    def __post_init__(self):
        m = self.moments
        if not np.all(np.isfinite(m)) or np.any(m <= 0):
            raise InvalidInertia(f"moments must be positive and finite, got {self.as_tuple()}")
        s = m.sum()
        for i in range(3):
            if m[i] > (s - m[i]) * (1 + 1e-12):
                raise InvalidInertia(f"triangle inequality fails for moments {self.as_tuple()}")

    def as_tuple(self):
        return (float(self.I1), float(self.I2), float(self.I3))

    @property
    def moments(self):
        return np.array([self.I1, self.I2, self.I3], dtype=float)

    @property
    def inverse(self):
        return 1.0 / self.moments

    @property
    def order(self):
        """Axis indices sorted by decreasing moment (stable)."""
        return tuple(int(i) for i in np.argsort(-self.moments, kind="stable"))

    @property
    def largest(self):
        return float(self.moments.max())

    @property
    def middle(self):
        return float(np.sort(self.moments)[1])

    @property
    def smallest(self):
        return float(self.moments.min())

    def canonical(self):
        """Return (descending InertiaSpec, permutation) with ``new[i] = old[perm[i]]``."""
        perm = self.order
        m = self.moments
        return InertiaSpec(*(float(m[i]) for i in perm)), perm

    def is_generic(self, rtol=1e-12):
        a, b, c = np.sort(self.moments)[::-1]
        return (a - b) > rtol * a and (b - c) > rtol * b

    def require_generic(self):
        if not self.is_generic():
            raise DegenerateInertia(f"two principal moments coincide: {self.as_tuple()}")

    def separatrix_energy(self, p):
        return p * p / (2.0 * self.middle)


@dataclass(frozen=True)
class BodyState:
    P: np.ndarray
    S: np.ndarray = field(default_factory=lambda: np.eye(3))


@dataclass(frozen=True, eq=False)
class BodyTrajectory:
    """Samples on a uniform grid ``t = t0 + k*h``.

    ``quat`` holds the attitude as unit quaternions; ``S`` is derived.
    ``norm_drift`` and ``energy_drift`` are max relative deviations from the
    initial sample.
    """

    t: np.ndarray
    P: np.ndarray
    quat: np.ndarray
    h: float
    inertia: InertiaSpec
    norm_drift: float
    energy_drift: float

    @cached_property
    def S(self):
        return quat_to_matrix(self.quat)

    def __len__(self):
        return len(self.t)

    @property
    def p(self):
        return float(np.linalg.norm(self.P[0]))

    @property
    def spatial_momentum(self):
        """``S_k P_k`` for every sample."""
        return np.einsum("kij,kj->ki", self.S, self.P)

    def state(self, k):
        return BodyState(self.P[k].copy(), self.S[k].copy())

    def reversed(self):
        """Same samples traversed backwards in time order (for orientation checks)."""
        return BodyTrajectory(
            self.t, self.P[::-1].copy(), self.quat[::-1].copy(), self.h, self.inertia,
            self.norm_drift, self.energy_drift,
        )


def euler_rhs(P, I):
    """Time derivative ``-Omega x P`` of the body momentum, ``Omega = I^{-1} P``."""
    P = np.asarray(P, dtype=float)
    Omega = I.inverse * P
    return -np.cross(Omega, P)


def kinetic_energy(P, I):
    P = np.asarray(P, dtype=float)
    return 0.5 * float(np.sum(I.inverse * P * P, axis=-1))


def body_angular_velocity(P, I):
    return I.inverse * np.asarray(P, dtype=float)


def spatial_angular_velocity(state, I):
    """``omega = S Omega``: angular velocity in the inertial frame."""
    return np.asarray(state.S) @ body_angular_velocity(state.P, I)


def default_step(I, p):
    """One twenty-thousandth of a turn about the middle axis at momentum p."""
    return 2.0 * math.pi * I.middle / p / STEPS_PER_TURN


def integrate(state0, I, h, n, project=False, t0=0.0):
    """Fourth-order integration of the body momentum and attitude.

    With ``project=True`` the momentum is rescaled to its initial norm after
    every step; otherwise drift is only measured.
    """
    if not (h > 0 and math.isfinite(h)):
        raise InvalidInput(f"step must be positive, got {h!r}")
    n = int(n)
    if n < 0:
        raise InvalidInput("number of steps must be non-negative")
    P0 = np.asarray(state0.P, dtype=float)
    q0 = matrix_to_quat(state0.S)
    P, q, worst = _kernels.run(P0, q0, I.inverse, float(h), n, bool(project))
    if not (np.all(np.isfinite(P)) and np.all(np.isfinite(q))):
        raise NumericalFailure("non-finite state during integration")
    if worst > MAX_STEP_JUMP:
        raise StepTooLarge(f"per-step invariant jump {worst:.3e} exceeds {MAX_STEP_JUMP:g}; reduce h")
    norms = np.linalg.norm(P, axis=1)
    energies = 0.5 * np.sum(I.inverse * P * P, axis=1)
    norm_drift = float(np.max(np.abs(norms - norms[0]))) / norms[0] if norms[0] > 0 else 0.0
    energy_drift = float(np.max(np.abs(energies - energies[0]))) / energies[0] if energies[0] > 0 else 0.0
    t = t0 + h * np.arange(n + 1)
    return BodyTrajectory(t, P, q, float(h), I, norm_drift, energy_drift)


def step_momentum(P, I, h):
    """A single fourth-order step of the momentum alone."""
    Pn, _ = _kernels.step(np.asarray(P, dtype=float), np.array([1.0, 0, 0, 0]), I.inverse, float(h))
    return Pn


@dataclass(frozen=True)
class EquilibriumPoint:
    P: np.ndarray
    axis: int
    stable: bool

    @property
    def label(self):
        return "center" if self.stable else "saddle"


def classify_equilibria(I, p):
    """The six fixed points ``+-p e_i``; the middle-moment axis carries the saddles."""
    I.require_generic()
    if not p > 0:
        raise InvalidInput("momentum norm must be positive")
    mid = I.order[1]
    points = []
    for i in range(3):
        for sign in (1.0, -1.0):
            P = np.zeros(3)
            P[i] = sign * p
            points.append(EquilibriumPoint(P, i, i != mid))
    return points


def momentum_from_invariants(I, p, K, family=None, signs=(1, 1)):
    """A momentum with norm ``p`` and energy ``K`` in the plane where the middle-axis component vanishes.

    ``family`` ('e1'/'e3' in the descending convention, i.e. the
    largest/smallest-moment axis) is checked against K if given. ``signs``
    fixes the signs of the largest- and smallest-axis components.
    """
    if not p > 0:
        raise InvalidInput("momentum norm must be positive")
    lo, hi = p * p / (2 * I.largest), p * p / (2 * I.smallest)
    if not (lo * (1 - 1e-14) <= K <= hi * (1 + 1e-14)):
        raise EnergyOutOfRange(f"K={K!r} outside [{lo!r}, {hi!r}]")
    big, _, small = I.order
    if family is not None:
        sep = I.separatrix_energy(p)
        if family == "e1" and K > sep:
            raise EnergyOutOfRange(f"K={K!r} above separatrix energy {sep!r}: orbit encircles e3")
        if family == "e3" and K < sep:
            raise EnergyOutOfRange(f"K={K!r} below separatrix energy {sep!r}: orbit encircles e1")
        if family not in ("e1", "e3"):
            raise InvalidInput(f"family must be 'e1' or 'e3', got {family!r}")
    a_big, a_small = 1.0 / I.largest, 1.0 / I.smallest
    if a_small == a_big:
        x_small2 = 0.0
    else:
        x_small2 = (2 * K - p * p * a_big) / (a_small - a_big)
    x_small2 = min(max(x_small2, 0.0), p * p)
    P = np.zeros(3)
    P[small] = signs[1] * math.sqrt(x_small2)
    P[big] = signs[0] * math.sqrt(max(p * p - x_small2, 0.0))
    return P
