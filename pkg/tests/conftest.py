"""Shared fixtures.

Quadrature configs are deliberately coarse: unit tests exercise structure and
identities whose residuals are far above the truncation level of a 24-point
radial rule, and the full-resolution configs are covered by the acceptance
module.
"""

import pytest

from fermihot.minkowski import FourVector
from fermihot.quad import QuadConfig
from fermihot.testfn import TestFunction, random_family

# keep pytest away from the library class whose name matches its glob
TestFunction.__test__ = False


@pytest.fixture(scope="session")
def quad_fast():
    return QuadConfig(24, 8, 12, tol=1e-6)


@pytest.fixture(scope="session")
def quad_mid():
    return QuadConfig(48, 16, 24, tol=1e-8)


@pytest.fixture(scope="session")
def e0():
    return FourVector(1.0, 0.0, 0.0, 0.0)


@pytest.fixture(scope="session")
def bump():
    """One multi-term bump with complex amplitudes."""
    return random_family(0, 1)[0]


@pytest.fixture(scope="session")
def wide_pair():
    """Two independent single-term bumps; wide supports keep the thermal
    part of smeared KMS differences well above roundoff."""
    f, g = random_family(5, 2, max_terms=1, width_range=(0.3, 0.45))
    return f, g
