"""Parallel transport on the momentum sphere and the body-frame images of an inertial basis.

A fixed inertial basis ``(e, f, n)`` with ``n = p/|p|`` is seen in the body
as ``(E, F, N) = S^T (e, f, n)``; ``N`` is the unit normal of the momentum
sphere at ``P`` and ``E``, ``F`` turn about it at the constant rate
``-2K/p`` relative to a parallel-transported frame.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .dynamics import kinetic_energy
from .errors import AntipodalEdge, BasisNotOrthonormal, NonTangentSeed, OpenCurve
from .so3 import E1, E2, rotation_about

TANGENCY_TOL = 1e-9


def inertial_basis(p_vector):
    """A right-handed orthonormal ``(e, f, n)`` with ``n`` along ``p_vector``."""
    n = np.asarray(p_vector, dtype=float)
    n = n / np.linalg.norm(n)
    seed = E1 if abs(n[0]) < 0.9 else E2
    e = seed - (seed @ n) * n
    e /= np.linalg.norm(e)
    return e, np.cross(n, e), n


def _check_basis(e, f, n, tol=1e-9):
    B = np.array([e, f, n], dtype=float)
    if np.max(np.abs(B @ B.T - np.eye(3))) > tol or np.linalg.det(B) < 0:
        raise BasisNotOrthonormal("(e, f, n) must be a right-handed orthonormal basis")


def body_frame_vectors(S, e, f, n):
    """``(S^T e, S^T f, S^T n)``; ``S`` may be one rotation or a stack of them."""
    _check_basis(e, f, n)
    S = np.asarray(S, dtype=float)
    St = np.swapaxes(S, -1, -2)
    return St @ np.asarray(e, float), St @ np.asarray(f, float), St @ np.asarray(n, float)


def signed_angle(x, y, normal):
    """Angle from x to y about ``normal`` (rows broadcast), in (-pi, pi]."""
    s = np.einsum("...i,...i->...", normal, np.cross(x, y))
    c = np.einsum("...i,...i->...", x, y)
    return np.arctan2(s, c)


@dataclass(frozen=True, eq=False)
class TransportedFrame:
    """Unit tangent vectors ``X[k]`` at the normals ``N[k]`` of a sphere curve."""

    N: np.ndarray
    X: np.ndarray
    closed: bool
    t: Optional[np.ndarray] = None

    @property
    def holonomy(self):
        """Angle in (-pi, pi] from the seed vector to its transported image, counterclockwise about the outward normal."""
        if not self.closed:
            raise OpenCurve("holonomy needs a closed curve")
        return float(signed_angle(self.X[0], self.X[-1], self.N[0]))


def parallel_transport(points, X0, close=False, t=None):
    """Discrete parallel transport of ``X0`` along sphere points (any radius).

    Each step applies the rotation about ``N_k x N_{k+1}`` that takes
    ``N_k`` to ``N_{k+1}``. With ``close=True`` a closing edge back to the
    first point is appended unless the curve already ends there.
    """
    P = np.asarray(points, dtype=float)
    N = P / np.linalg.norm(P, axis=1)[:, None]
    X0 = np.asarray(X0, dtype=float)
    if abs(X0 @ N[0]) > TANGENCY_TOL or abs(np.linalg.norm(X0) - 1.0) > TANGENCY_TOL:
        raise NonTangentSeed("X0 must be a unit vector tangent at the first point")
    returns = np.linalg.norm(N[-1] - N[0]) <= 1e-6
    if close and not returns:
        N = np.vstack([N, N[:1]])
        returns = True
    if np.any(np.einsum("ij,ij->i", N[:-1], N[1:]) <= -1.0 + 1e-12):
        raise AntipodalEdge("consecutive points are antipodal; transport is undefined")
    X = _kernels.transport(N, X0)
    return TransportedFrame(N, X, bool(returns), t)


def _central_diff(Y, h):
    return (Y[2:] - Y[:-2]) / (2.0 * h)


class CovariantRate(NamedTuple):
    residual: float
    rates: np.ndarray
    expected: float


def covariant_rate_residual(trajectory, e=None, f=None, n=None):
    """Check that the tangential derivative of ``E`` equals ``-(2K/p) F``.

    Derivatives are central differences on interior samples. Returns the max
    residual norm, the per-sample rates ``<dE/dt, F>`` and ``-2K/p``.
    """
    S, P, h = trajectory.S, trajectory.P, trajectory.h
    p = float(np.linalg.norm(P[0]))
    if e is None:
        e, f, n = inertial_basis(S[0] @ P[0])
    E, F, _ = body_frame_vectors(S, e, f, n)
    N = P / np.linalg.norm(P, axis=1)[:, None]
    dE = _central_diff(E, h)
    Nm, Fm = N[1:-1], F[1:-1]
    dE_tan = dE - np.einsum("ij,ij->i", dE, Nm)[:, None] * Nm
    rate = -2.0 * kinetic_energy(P[0], trajectory.inertia) / p
    residual = float(np.max(np.linalg.norm(dE_tan - rate * Fm, axis=1)))
    return CovariantRate(residual, np.einsum("ij,ij->i", dE_tan, Fm), rate)


def transported_rotation_rates(trajectory, e=None, f=None, n=None):
    """Per-sample angular rate of ``E`` about ``N`` relative to the transported frame seeded at ``E_0``."""
    S, P, h = trajectory.S, trajectory.P, trajectory.h
    if e is None:
        e, f, n = inertial_basis(S[0] @ P[0])
    E, _, N = body_frame_vectors(S, e, f, n)
    frame = parallel_transport(P, E[0])
    phi = np.unwrap(signed_angle(frame.X, E, frame.N))
    return _central_diff(phi, h)


def frame_rotation_angle(trajectory, e=None, f=None, n=None):
    """Angle in (-pi, pi] from ``E(0)`` to ``E(end)`` about ``N(0)``."""
    S, P = trajectory.S, trajectory.P
    if e is None:
        e, f, n = inertial_basis(S[0] @ P[0])
    E, _, N = body_frame_vectors(S[[0, -1]], e, f, n)
    return float(signed_angle(E[0], E[1], N[0]))


def auxiliary_frame_rate(trajectory, I=None, p=None, e=None, f=None, n=None):
    """Covariant angular rate of ``G = S^T g`` where ``g`` spins about ``n`` at ``p/I_mid``.

    Returns ``(rates, expected)`` with ``expected = p/I_mid - 2K/p``, which
    is close to zero near the separatrix energy.
    """
    I = trajectory.inertia if I is None else I
    S, P, h, t = trajectory.S, trajectory.P, trajectory.h, trajectory.t
    p = float(np.linalg.norm(P[0])) if p is None else float(p)
    if e is None:
        e, f, n = inertial_basis(S[0] @ P[0])
    _check_basis(e, f, n)
    spin = p / I.middle
    g = np.array([rotation_about(n, spin * (tk - t[0])) @ e for tk in t])
    G = np.einsum("kji,kj->ki", S, g)
    N = P / np.linalg.norm(P, axis=1)[:, None]
    H = np.cross(N, G)
    rates = np.einsum("ij,ij->i", _central_diff(G, h), H[1:-1])
    expected = spin - 2.0 * kinetic_energy(P[0], I) / p
    return rates, expected
