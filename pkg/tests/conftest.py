import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from polyrmf.polynomial import parse_polynomial
from polyrmf.sieve import factor_values

POLY_MATRIX = ["x^2+1", "x^2+x", "0,-6,1", "x^3+x", "x^3+2x+1", "2x^3+3x^2+x"]


@pytest.fixture(scope="session")
def x2p1():
    return parse_polynomial("x^2+1")


@pytest.fixture(scope="session")
def x2m6x():
    return parse_polynomial("0,-6,1")


@pytest.fixture(scope="session")
def table_x2p1_200(x2p1):
    return factor_values(x2p1, 200)


@pytest.fixture(scope="session")
def table_x2m6x_200(x2m6x):
    return factor_values(x2m6x, 200)
