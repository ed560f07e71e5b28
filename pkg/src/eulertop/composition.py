"""Composing rotations on the sphere, and the heteroclinic picture of the geometric phase.

Near the separatrix the body spends most of a period spinning about p and
twice flips over by a half-turn about the normal of a heteroclinic great
circle. The two half-turns compose to a rotation about the middle axis by
twice the angle ``alpha`` between the heteroclinics, which is also the
area of the lune they bound on the unit sphere.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dynamics import euler_rhs, momentum_from_invariants
from .errors import InvalidInput
from .phase import phase_report
from .so3 import (
    TWO_PI,
    as_unit,
    circular_distance,
    matrix_to_axis_angle,
    rotation_about,
    wrap_2pi,
)


@dataclass(frozen=True)
class AxisAngle:
    """Rotation by ``angle`` in [0, 2 pi) about a unit ``axis``."""

    axis: np.ndarray
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "axis", np.array(as_unit(self.axis), dtype=float))
        object.__setattr__(self, "angle", wrap_2pi(float(self.angle)))

    @property
    def matrix(self):
        return rotation_about(self.axis, self.angle)

    @classmethod
    def from_matrix(cls, R):
        axis, angle = matrix_to_axis_angle(R)
        return cls(axis, angle)

    def short_form(self):
        """Equivalent (axis, angle) with angle in [0, pi]."""
        if self.angle > math.pi:
            return -self.axis, TWO_PI - self.angle
        return self.axis, self.angle

    def to_dict(self):
        return {"axis": [float(x) for x in self.axis], "angle": float(self.angle)}


def compose_direct(r1, r2):
    """``r1`` first, then ``r2``, by matrix product."""
    return AxisAngle.from_matrix(r2.matrix @ r1.matrix)


def compose_penrose(r1, r2, other_intersection=False):
    """Compose ``r1`` followed by ``r2`` with arcs on the great circles normal to their axes.

    From an intersection point O of the two circles, step back by half of
    the first angle along the first circle to A and forward by half of the
    second angle along the second circle to B; the composite turns about
    ``A x B`` by twice the arc from A to B.
    """
    a, theta = r1.axis, r1.angle
    b, phi = r2.axis, r2.angle
    if phi == 0.0:
        return r1
    if theta == 0.0:
        return r2
    cross = np.cross(a, b)
    s = np.linalg.norm(cross)
    if s < 1e-12:
        return AxisAngle(a, theta + phi if a @ b > 0 else theta - phi)
    O = cross / s
    if other_intersection:
        O = -O
    A = rotation_about(a, -0.5 * theta) @ O
    B = rotation_about(b, 0.5 * phi) @ O
    axis = np.cross(A, B)
    sin_arc = np.linalg.norm(axis)
    if sin_arc < 1e-15:
        # A = +-B: the arc is 0 or pi, both give the identity
        return AxisAngle(a, 0.0)
    return AxisAngle(axis / sin_arc, 2.0 * math.atan2(sin_arc, A @ B))


def separatrix_slope(I1, I2, I3):
    """``c`` in the heteroclinic planes ``P3 = +-c P1`` for moments ``I1 >= I2 >= I3``."""
    return math.sqrt((I1 - I2) * I3 / (I1 * (I2 - I3)))


@dataclass(frozen=True)
class HeteroclinicData:
    slope: float
    lune_angle: float
    geometric_phase: float
    lune_area: float
    plane_normals: tuple
    reorientation_axes: tuple
    axes: tuple

    def to_dict(self):
        return {
            "slope": self.slope,
            "lune_angle": self.lune_angle,
            "geometric_phase": self.geometric_phase,
            "lune_area": self.lune_area,
            "plane_normals": [[float(x) for x in n] for n in self.plane_normals],
            "reorientation_axes": [[float(x) for x in n] for n in self.reorientation_axes],
            "axes": {"largest": self.axes[0] + 1, "middle": self.axes[1] + 1, "smallest": self.axes[2] + 1},
        }


def heteroclinic_data(I, p=1.0):
    """Separatrix planes, the angle between them at the saddle, and the half-turn axes.

    The half-turn axes are the plane normals oriented so that the flow
    along each heteroclinic on the largest-axis side runs counterclockwise
    about them; they are listed in the order the motion visits them when
    it leaves the positive middle axis.
    """
    I.require_generic()
    if not p > 0:
        raise InvalidInput("momentum norm must be positive")
    big, mid, small = I.order
    c = separatrix_slope(I.largest, I.middle, I.smallest)
    alpha = 2.0 * math.atan(c)
    normals, axes = [], []
    for sign in (1.0, -1.0):
        n = np.zeros(3)
        n[small], n[big] = 1.0, -sign * c
        normals.append(n / np.linalg.norm(n))
        m = np.zeros(3)
        m[big], m[small] = p, sign * c * p
        m /= math.sqrt(1.0 + c * c)
        v = euler_rhs(m, I)
        w = np.cross(m, v)
        axes.append((v[mid], w / np.linalg.norm(w)))
    axes.sort(key=lambda item: item[0])
    return HeteroclinicData(
        slope=c,
        lune_angle=alpha,
        geometric_phase=2.0 * alpha,
        lune_area=2.0 * alpha * p * p,
        plane_normals=tuple(normals),
        reorientation_axes=tuple(ax for _, ax in axes),
        axes=(big, mid, small),
    )


def reorientation_composite(I, p=1.0):
    """The two flow-oriented half-turns composed by the spherical construction."""
    data = heteroclinic_data(I, p)
    first, second = data.reorientation_axes
    return compose_penrose(AxisAngle(first, math.pi), AxisAngle(second, math.pi))


class LimitRow(NamedTuple):
    epsilon: float
    K: float
    T: float
    geometric_phase: float
    target: float
    distance: float
    residual: float


def _limit_row(I, p, eps, family, data, max_time):
    Ksep = I.separatrix_energy(p)
    if family == "e1":
        K = Ksep - eps
        target = wrap_2pi(data.geometric_phase)
    else:
        # orbits about e3 run clockwise round the complementary lune
        K = Ksep + eps
        target = wrap_2pi(-2.0 * (math.pi - data.lune_angle))
    P0 = momentum_from_invariants(I, p, K, family=family)
    rep = phase_report(P0, None, I, max_time=max_time)
    phase = wrap_2pi(rep.geometric_phase)
    return LimitRow(eps, K, rep.T, phase, target, circular_distance(phase, target), rep.residual)


def near_separatrix_phase_limit(I, p, epsilons, family="e1", max_time=None, workers=None):
    """Geometric phase of orbits at energy offset ``epsilon`` from the separatrix, against ``2 alpha``."""
    data = heteroclinic_data(I, p)
    if family not in ("e1", "e3"):
        raise InvalidInput(f"family must be 'e1' or 'e3', got {family!r}")
    eps = [float(e) for e in epsilons]
    if any(not e > 0 for e in eps):
        raise InvalidInput("energy offsets must be positive")
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda e: _limit_row(I, p, e, family, data, max_time), eps))
    return [_limit_row(I, p, e, family, data, max_time) for e in eps]
