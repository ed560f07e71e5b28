"""Exception hierarchy.

Two families: :class:`InvalidInput` for bad arguments (CLI exit code 2) and
:class:`NumericalError` for runs that fail numerically (CLI exit code 3).
"""


class EulerTopError(Exception):
    pass


class InvalidInput(EulerTopError, ValueError):
    pass


class NumericalError(EulerTopError, ArithmeticError):
    pass


class NonUnitAxis(InvalidInput):
    pass


class AxisNotFixed(NumericalError):
    pass


class DegeneratePolygon(InvalidInput):
    pass


class AntipodalEdge(InvalidInput):
    pass


class InvalidInertia(InvalidInput):
    pass


class DegenerateInertia(InvalidInput):
    pass


class EnergyOutOfRange(InvalidInput):
    pass


class BasisNotOrthonormal(InvalidInput):
    pass


class NonTangentSeed(InvalidInput):
    pass


class OpenCurve(InvalidInput):
    pass


class StepTooLarge(NumericalError):
    pass


class Equilibrium(NumericalError):
    """The initial momentum sits on a fixed point of the Euler flow."""


class SeparatrixTimeout(NumericalError):
    """No return to the section within the allotted time."""


class NumericalFailure(NumericalError):
    pass


class OpenOrbit(NumericalError):
    pass
