import math
from pathlib import Path

import pytest

from psivar import arith, geodesics, zeros

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"
DATA = REPO / "data"


@pytest.fixture(scope="session")
def zeta_series():
    return arith.sieve_von_mangoldt(2 * 10 ** 6)


@pytest.fixture(scope="session")
def delta_series():
    return arith.delta_coefficients(2 * 10 ** 5)


@pytest.fixture(scope="session")
def zeta_fixture():
    return zeros.load_zeros(FIXTURES / "zeta_zeros_100.txt", 1, 1e9)


@pytest.fixture(scope="session")
def delta_fixture():
    return zeros.load_zeros(FIXTURES / "delta_zeros_100.txt", 2, 1e9)


@pytest.fixture(scope="session")
def delta_table():
    return zeros.load_zeros(DATA / "delta_zeros_215.txt", 2, 215.0)


@pytest.fixture(scope="session")
def bolza_spectrum_w6():
    return geodesics.enumerate_classes(geodesics.bolza_group(), 6, 6.0)


def prime_powers_below(limit):
    """Trial-division oracle: (n, p, k) for every prime power n <= limit."""
    out = []
    for p in range(2, limit + 1):
        if any(p % q == 0 for q in range(2, int(math.isqrt(p)) + 1)):
            continue
        q, k = p, 1
        while q <= limit:
            out.append((q, p, k))
            q *= p
            k += 1
    return sorted(out)
