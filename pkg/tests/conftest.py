import hypothesis
import numpy as np
import pytest

from eulertop.dynamics import InertiaSpec, momentum_from_invariants
from eulertop.phase import one_period
from eulertop.so3 import rotation_about

hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")

I321 = InertiaSpec(3.0, 2.0, 1.0)
SYMMETRIC = InertiaSpec(2.0, 2.0, 1.0)
SYMMETRIC_P0 = np.array([0.6, 0.0, 0.8])


@pytest.fixture(scope="session")
def i321():
    return I321


@pytest.fixture(scope="session")
def symmetric_orbit():
    """One period of the symmetric top I=(2,2,1), P0=(0.6,0,0.8)."""
    return one_period(SYMMETRIC_P0, np.eye(3), SYMMETRIC)


@pytest.fixture(scope="session")
def orbits():
    """One-period orbits of I=(3,2,1), p=1, at a few energies in both families."""
    S0 = rotation_about(np.array([2.0, -1.0, 2.0]) / 3.0, 0.4)
    out = {}
    for K in (0.18, 0.22, 0.3, 0.4):
        P0 = momentum_from_invariants(I321, 1.0, K)
        out[K] = one_period(P0, S0, I321)
    return out


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
