"""Small-dimension geometry on R^3 and SO(3).

Vectors are length-3 float arrays, rotations 3x3 arrays. Unit quaternions
are scalar-first ``(w, x, y, z)`` and only appear at module boundaries
(attitude integration and CSV export).
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import AntipodalEdge, AxisNotFixed, DegeneratePolygon, NonUnitAxis

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def hat(omega):
    """Skew matrix with ``hat(omega) @ xi == cross(omega, xi)``."""
    x, y, z = (float(c) for c in omega)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(A):
    """Inverse of :func:`hat` applied to the skew part of ``A``."""
    A = np.asarray(A, dtype=float)
    return 0.5 * np.array([A[2, 1] - A[1, 2], A[0, 2] - A[2, 0], A[1, 0] - A[0, 1]])


def as_unit(v, tol=1e-9):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if not np.isfinite(n) or abs(n - 1.0) > tol:
        raise NonUnitAxis(f"axis norm {n!r} is not 1 within {tol:g}")
    return v


def rotation_about(axis, angle):
    """Rodrigues rotation by ``angle`` (right-hand rule) about a unit ``axis``."""
    a = as_unit(axis)
    K = hat(a)
    s, c = math.sin(angle), math.cos(angle)
    return np.eye(3) + s * K + (1.0 - c) * (K @ K)


def exp_so3(omega):
    """Matrix exponential of ``hat(omega)``."""
    omega = np.asarray(omega, dtype=float)
    theta = float(np.linalg.norm(omega))
    if theta < 1e-300:
        return np.eye(3)
    return rotation_about(omega / theta, theta)


def wrap_pi(angle):
    """Wrap to (-pi, pi]."""
    a = math.remainder(angle, TWO_PI)
    return math.pi if a == -math.pi else a


def wrap_2pi(angle):
    """Wrap to [0, 2*pi)."""
    a = angle % TWO_PI
    return 0.0 if a == TWO_PI else a


def circular_distance(a, b):
    """Distance between two angles on the circle, in [0, pi]."""
    return abs(math.remainder(a - b, TWO_PI))


def axis_angle_about(R, n, tol=1e-8):
    """Signed angle in (-pi, pi] of a rotation ``R`` known to fix the unit vector ``n``."""
    R = np.asarray(R, dtype=float)
    n = as_unit(n)
    err = float(np.max(np.abs(R @ n - n)))
    if err > tol:
        raise AxisNotFixed(f"R moves the axis by {err:.3e} > {tol:g}")
    s = float(vee(R) @ n)
    c = 0.5 * (np.trace(R) - 1.0)
    return wrap_pi(math.atan2(s, c))


def rotation_distance(R1, R2):
    """Angle of ``R1^T R2``; accurate for small angles."""
    d = np.linalg.norm(np.asarray(R1) - np.asarray(R2)) / (2.0 * math.sqrt(2.0))
    return 2.0 * math.asin(min(1.0, d))


def matrix_to_axis_angle(R):
    """Axis and angle in [0, pi] of a rotation matrix."""
    R = np.asarray(R, dtype=float)
    c = 0.5 * (np.trace(R) - 1.0)
    sv = vee(R)
    s = float(np.linalg.norm(sv))
    angle = math.atan2(s, c)
    if s > 1e-8:
        return sv / s, angle
    if c > 0:
        return E3.copy(), 0.0
    # half-turn: R = 2 a a^T - I
    B = 0.5 * (R + np.eye(3))
    k = int(np.argmax(np.diag(B)))
    axis = B[:, k] / math.sqrt(B[k, k])
    return axis / np.linalg.norm(axis), math.pi


def is_rotation(R, tol=1e-10):
    R = np.asarray(R, dtype=float)
    return (
        R.shape == (3, 3)
        and np.max(np.abs(R.T @ R - np.eye(3))) <= tol
        and abs(np.linalg.det(R) - 1.0) <= tol
    )


# -- quaternions -------------------------------------------------------------

def quat_to_matrix(q):
    """Rotation matrices from unit quaternions; works on ``(4,)`` or ``(n, 4)``."""
    q = np.asarray(q, dtype=float)
    w, x, y, z = np.moveaxis(q, -1, 0)
    R = np.empty(q.shape[:-1] + (3, 3))
    R[..., 0, 0] = 1 - 2 * (y * y + z * z)
    R[..., 0, 1] = 2 * (x * y - w * z)
    R[..., 0, 2] = 2 * (x * z + w * y)
    R[..., 1, 0] = 2 * (x * y + w * z)
    R[..., 1, 1] = 1 - 2 * (x * x + z * z)
    R[..., 1, 2] = 2 * (y * z - w * x)
    R[..., 2, 0] = 2 * (x * z - w * y)
    R[..., 2, 1] = 2 * (y * z + w * x)
    R[..., 2, 2] = 1 - 2 * (x * x + y * y)
    return R


def matrix_to_quat(R):
    """Unit quaternion (w >= 0) for a single rotation matrix."""
    R = np.asarray(R, dtype=float)
    tr = np.trace(R)
    if tr > 0:
        s = 2.0 * math.sqrt(1.0 + tr)
        q = [0.25 * s, (R[2, 1] - R[1, 2]) / s, (R[0, 2] - R[2, 0]) / s, (R[1, 0] - R[0, 1]) / s]
    elif R[0, 0] > R[1, 1] and R[0, 0] > R[2, 2]:
        s = 2.0 * math.sqrt(1.0 + R[0, 0] - R[1, 1] - R[2, 2])
        q = [(R[2, 1] - R[1, 2]) / s, 0.25 * s, (R[0, 1] + R[1, 0]) / s, (R[0, 2] + R[2, 0]) / s]
    elif R[1, 1] > R[2, 2]:
        s = 2.0 * math.sqrt(1.0 + R[1, 1] - R[0, 0] - R[2, 2])
        q = [(R[0, 2] - R[2, 0]) / s, (R[0, 1] + R[1, 0]) / s, 0.25 * s, (R[1, 2] + R[2, 1]) / s]
    else:
        s = 2.0 * math.sqrt(1.0 + R[2, 2] - R[0, 0] - R[1, 1])
        q = [(R[1, 0] - R[0, 1]) / s, (R[0, 2] + R[2, 0]) / s, (R[1, 2] + R[2, 1]) / s, 0.25 * s]
    q = np.array(q)
    q /= np.linalg.norm(q)
    return -q if q[0] < 0 else q


# -- spherical polygons ------------------------------------------------------

class SignedArea(NamedTuple):
    """Enclosed area in ``[0, 4 pi p^2)`` and the same class shifted by ``-4 pi p^2``."""

    area: float
    complement: float


def _fan_centre(u):
    c = u.mean(axis=0)
    norm = np.linalg.norm(c)
    if norm > 1e-3:
        return c / norm
    # loop close to a great circle: use the normal of the best-fit plane
    return np.linalg.svd(u, full_matrices=False)[2][-1]


def triangle_excess(a, b, c):
    """Signed excess of spherical triangles with unit vertices (rows broadcast).

    Positive when ``a, b, c`` run counterclockwise seen from outside.
    """
    num = np.einsum("...i,...i->...", a, np.cross(b, c))
    den = 1.0 + np.einsum("...i,...i->...", a, b) + np.einsum("...i,...i->...", b, c) \
        + np.einsum("...i,...i->...", c, a)
    return 2.0 * np.arctan2(num, den)


def signed_excess(vertices, p=1.0):
    """Raw (unwrapped) signed area of a closed geodesic polygon on the sphere of radius p."""
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 3:
        raise DegeneratePolygon("vertices must be an (n, 3) array")
    norms = np.linalg.norm(v, axis=1)
    if np.any(np.abs(norms - p) > 1e-6 * p):
        raise DegeneratePolygon("vertices are not on the sphere of radius p")
    u = v / norms[:, None]
    if len(np.unique(np.round(u, 12), axis=0)) < 3:
        raise DegeneratePolygon("need at least 3 distinct vertices")
    nxt = np.roll(u, -1, axis=0)
    if np.any(np.linalg.norm(u + nxt, axis=1) < 1e-9):
        raise AntipodalEdge("consecutive vertices are antipodal")
    c = _fan_centre(u)
    return float(np.sum(triangle_excess(c, u, nxt))) * p * p


def spherical_polygon_area(vertices, p=1.0):
    """Signed area of the polygon, positive for the region left of travel.

    The area is only defined modulo ``4 pi p^2``; both representatives are
    returned.
    """
    total = FOUR_PI * p * p
    a = signed_excess(vertices, p) % total
    if a >= total:
        a = 0.0
    return SignedArea(a, a - total)
