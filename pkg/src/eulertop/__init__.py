"""Numerical laboratory for the torque-free rigid body and its rotation phase about p."""
from .composition import AxisAngle, HeteroclinicData, compose_penrose, heteroclinic_data, \
    near_separatrix_phase_limit, reorientation_composite
from .dynamics import BodyState, BodyTrajectory, InertiaSpec, classify_equilibria, default_step, \
    euler_rhs, integrate, kinetic_energy, momentum_from_invariants, spatial_angular_velocity
from .phase import PhaseReport, detect_period, enclosed_area, measured_delta_theta, \
    montgomery_delta_theta, one_period, phase_report
from .so3 import axis_angle_about, hat, rotation_about, spherical_polygon_area
from .transport import TransportedFrame, auxiliary_frame_rate, body_frame_vectors, \
    covariant_rate_residual, parallel_transport

__version__ = "0.1.0"
