import os
import sys

import pytest
from dotenv import load_dotenv

# Ensure services can be imported
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

load_dotenv()

from services.probes import HermiteGaussian, parse_probes  # noqa: E402


# --------------------------
# Test functions
# --------------------------
@pytest.fixture(scope="session")
def gaussian():
    return HermiteGaussian.from_hermite([1.0])


@pytest.fixture(scope="session")
def odd_gaussian():
    """x e^{-x^2}"""
    return HermiteGaussian.from_hermite([0.0, 1.0])


@pytest.fixture(scope="session")
def lopsided():
    """No parity, nonzero value and slope at 0."""
    return HermiteGaussian.from_hermite([1.0, 0.7, 0.2], 1.3)


@pytest.fixture(scope="session")
def battery():
    return parse_probes(["hermite:1", "hermite:0,1", "hermite:1,0,1", "hermite:0,0,0,1"])


@pytest.fixture(scope="session")
def wide_battery():
    return [
        HermiteGaussian.from_hermite(c, s)
        for c in ([1.0], [0.0, 1.0], [1.0, 0.0, 1.0], [0.0, 0.0, 0.0, 1.0])
        for s in (0.3, 3.0)
    ]
