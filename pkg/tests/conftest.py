import math

import pytest

from densities import HilhorstDensity, HilhorstFamily
from qkernel import DeformationParameter
from quad import QuadratureConfig

SQRT2 = math.sqrt(2.0)


@pytest.fixture
def qcfg():
    return QuadratureConfig()


@pytest.fixture
def reference_family():
    """Hilhorst member (1, 2) at q = 1.5; lambda = sqrt 2, f(x) = 2/x^2."""
    return HilhorstFamily(1.0, 2.0, DeformationParameter(1.5))


@pytest.fixture
def reference_density(reference_family):
    return HilhorstDensity(reference_family)
