"""Compiled inner loops for the attitude integrator.

State: body momentum ``P`` and unit quaternion ``q`` (scalar first) with
``S = R(q)``. One step is classical RK4 for ``P`` and the Munthe-Kaas
variant for the attitude, so ``S_{k+1} = S_k exp(hat(u))`` with ``u`` a
fourth-order increment built from the inverse right Jacobian of SO(3).
"""
import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def euler_rhs3(P0, P1, P2, a0, a1, a2):
    # a_i = 1 / I_i
    return (
        (a2 - a1) * P1 * P2,
        (a0 - a2) * P2 * P0,
        (a1 - a0) * P0 * P1,
    )


@njit(cache=True, nogil=True)
def _dexpinv(u0, u1, u2, w0, w1, w2):
    # J_r(u)^{-1} w = w + u x w / 2 + c(|u|) u x (u x w)
    th2 = u0 * u0 + u1 * u1 + u2 * u2
    if th2 < 1e-4:
        c = 1.0 / 12.0 + th2 / 720.0 + th2 * th2 / 30240.0
    else:
        th = math.sqrt(th2)
        c = 1.0 / th2 - (1.0 + math.cos(th)) / (2.0 * th * math.sin(th))
    x0 = u1 * w2 - u2 * w1
    x1 = u2 * w0 - u0 * w2
    x2 = u0 * w1 - u1 * w0
    y0 = u1 * x2 - u2 * x1
    y1 = u2 * x0 - u0 * x2
    y2 = u0 * x1 - u1 * x0
    return (w0 + 0.5 * x0 + c * y0, w1 + 0.5 * x1 + c * y1, w2 + 0.5 * x2 + c * y2)


@njit(cache=True, nogil=True)
def step(P, q, a, h):
    """One coupled step; returns new (P, q) as fresh arrays."""
    a0, a1, a2 = a[0], a[1], a[2]
    p0, p1, p2 = P[0], P[1], P[2]

    k10, k11, k12 = euler_rhs3(p0, p1, p2, a0, a1, a2)
    w10, w11, w12 = a0 * p0, a1 * p1, a2 * p2

    s0, s1, s2 = p0 + 0.5 * h * k10, p1 + 0.5 * h * k11, p2 + 0.5 * h * k12
    k20, k21, k22 = euler_rhs3(s0, s1, s2, a0, a1, a2)
    m20, m21, m22 = _dexpinv(0.5 * h * w10, 0.5 * h * w11, 0.5 * h * w12,
                             a0 * s0, a1 * s1, a2 * s2)

    s0, s1, s2 = p0 + 0.5 * h * k20, p1 + 0.5 * h * k21, p2 + 0.5 * h * k22
    k30, k31, k32 = euler_rhs3(s0, s1, s2, a0, a1, a2)
    m30, m31, m32 = _dexpinv(0.5 * h * m20, 0.5 * h * m21, 0.5 * h * m22,
                             a0 * s0, a1 * s1, a2 * s2)

    s0, s1, s2 = p0 + h * k30, p1 + h * k31, p2 + h * k32
    k40, k41, k42 = euler_rhs3(s0, s1, s2, a0, a1, a2)
    m40, m41, m42 = _dexpinv(h * m30, h * m31, h * m32, a0 * s0, a1 * s1, a2 * s2)

    out_P = np.empty(3)
    out_P[0] = p0 + h / 6.0 * (k10 + 2.0 * k20 + 2.0 * k30 + k40)
    out_P[1] = p1 + h / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
    out_P[2] = p2 + h / 6.0 * (k12 + 2.0 * k22 + 2.0 * k32 + k42)

    u0 = h / 6.0 * (w10 + 2.0 * m20 + 2.0 * m30 + m40)
    u1 = h / 6.0 * (w11 + 2.0 * m21 + 2.0 * m31 + m41)
    u2 = h / 6.0 * (w12 + 2.0 * m22 + 2.0 * m32 + m42)

    th = math.sqrt(u0 * u0 + u1 * u1 + u2 * u2)
    cw = math.cos(0.5 * th)
    if th > 1e-12:
        sf = math.sin(0.5 * th) / th
    else:
        sf = 0.5 - th * th / 48.0
    r0, r1, r2, r3 = cw, sf * u0, sf * u1, sf * u2

    # q <- q * r (right multiplication: body-frame increment)
    w, x, y, z = q[0], q[1], q[2], q[3]
    out_q = np.empty(4)
    out_q[0] = w * r0 - x * r1 - y * r2 - z * r3
    out_q[1] = w * r1 + x * r0 + y * r3 - z * r2
    out_q[2] = w * r2 - x * r3 + y * r0 + z * r1
    out_q[3] = w * r3 + x * r2 - y * r1 + z * r0
    nq = math.sqrt(out_q[0] ** 2 + out_q[1] ** 2 + out_q[2] ** 2 + out_q[3] ** 2)
    for i in range(4):
        out_q[i] /= nq
    return out_P, out_q


@njit(cache=True, nogil=True)
def run(P0, q0, a, h, n, project):
    """Integrate ``n`` steps. Returns (P, q, max per-step relative jump in |P| and K)."""
    P = np.empty((n + 1, 3))
    q = np.empty((n + 1, 4))
    P[0] = P0
    q[0] = q0
    p_ref = math.sqrt(P0[0] ** 2 + P0[1] ** 2 + P0[2] ** 2)
    worst = 0.0
    for k in range(n):
        Pn, qn = step(P[k], q[k], a, h)
        nb = math.sqrt(P[k, 0] ** 2 + P[k, 1] ** 2 + P[k, 2] ** 2)
        na = math.sqrt(Pn[0] ** 2 + Pn[1] ** 2 + Pn[2] ** 2)
        Kb = a[0] * P[k, 0] ** 2 + a[1] * P[k, 1] ** 2 + a[2] * P[k, 2] ** 2
        Ka = a[0] * Pn[0] ** 2 + a[1] * Pn[1] ** 2 + a[2] * Pn[2] ** 2
        jump = abs(na - nb) / nb if nb > 0 else 0.0
        if Kb > 0:
            jump = max(jump, abs(Ka - Kb) / Kb)
        if not (jump < np.inf):
            jump = np.inf
        worst = max(worst, jump)
        if project and na > 0:
            for i in range(3):
                Pn[i] *= p_ref / na
        P[k + 1] = Pn
        q[k + 1] = qn
    return P, q, worst


@njit(cache=True, nogil=True)
def transport(U, X0):
    """Carry the tangent vector X0 along unit points U by minimal rotations.

    For unit a, b and v tangent at a, the rotation about a x b taking a to b
    sends v to v - <v, b> (a + b) / (1 + <a, b>).
    """
    n = U.shape[0]
    X = np.empty((n, 3))
    X[0] = X0
    for k in range(n - 1):
        a = U[k]
        b = U[k + 1]
        v = X[k]
        c = a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
        vb = v[0] * b[0] + v[1] * b[1] + v[2] * b[2]
        w = np.empty(3)
        for i in range(3):
            w[i] = v[i] - vb * (a[i] + b[i]) / (1.0 + c)
        wb = w[0] * b[0] + w[1] * b[1] + w[2] * b[2]
        for i in range(3):
            w[i] -= wb * b[i]
        nw = math.sqrt(w[0] ** 2 + w[1] ** 2 + w[2] ** 2)
        for i in range(3):
            X[k + 1, i] = w[i] / nw
    return X
