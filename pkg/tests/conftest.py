import numpy as np
import pytest

import kil

# frozen reference values, computed with independent high-precision
# quadrature (mpmath, 30 digits) or exact closed forms
G0_GAUSS_03 = 3.2503840964273537
DP0_GAUSS_03 = -10.303663273573937
RHO2_GAUSS_03 = 42.082500954474468
RHO2_CAUCHY_05 = 899.0 / 54.0          # exact (sympy rational integral)
SW_MU_MIN = -0.07483914270309112       # p=0.1, r=0.3, attained at |k| = 2
SW_MU_MIN_MODE = 2


@pytest.fixture(scope="session")
def gauss03():
    return kil.gaussian(0.3)


@pytest.fixture(scope="session")
def cauchy05():
    return kil.cauchy(0.5)


@pytest.fixture(scope="session")
def er05():
    return kil.er(0.5)


@pytest.fixture(scope="session")
def sw_graphon():
    return kil.small_world(0.1, 0.3)


def cauchy_d_closed(lam, delta):
    """Closed-form continued D for the Cauchy family (exact on the whole
    strip): 1/(lam + delta) - 1/(lam + 1 + delta)."""
    return 1.0 / (lam + delta) - 1.0 / (lam + 1.0 + delta)


def cauchy_eigenvalue_closed(K, delta):
    """Root of D(lam) = 1/K for mu = 1: lam = -delta - 1/2 + sqrt(1/4 + K)."""
    return -delta - 0.5 + np.sqrt(0.25 + K)
