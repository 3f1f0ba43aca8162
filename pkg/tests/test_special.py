import math

import numpy as np
import pytest
from scipy import special as ss

from levysinh import special as SP
from levysinh.errors import DomainError


@pytest.mark.parametrize("lam", [-2.0, -0.5, 0.0, 1.0, 2.0, 3.5])
def test_bessel_k_against_scipy(lam):
    z = np.array([0.05, 0.7, 3.0, 40.0, 2 + 5j, 1e-3 + 20j, 30j, -25j, 0.3 - 0.1j])
    ref = ss.kve(lam, z)
    got = SP.bessel_k_scaled(lam, z)
    np.testing.assert_allclose(got, ref, rtol=1e-12)


def test_bessel_k_half_order_closed_form():
    z = np.array([0.5, 2.0, 10.0 + 3j])
    np.testing.assert_allclose(SP.bessel_k(0.5, z), np.sqrt(np.pi / (2 * z)) * np.exp(-z), rtol=1e-13)


def test_log_bessel_k_for_large_argument():
    z = 800.0 + 50j
    ref = -z + np.log(ss.kve(1.5, z))
    assert abs(complex(SP.log_bessel_k(1.5, z)) - ref) < 1e-12


def test_bessel_k_domain():
    with pytest.raises(DomainError):
        SP.bessel_k_scaled(1.0, 0.0)
    with pytest.raises(DomainError):
        SP.bessel_k_scaled(1.0, -1.0 + 0.1j)


def test_asymptotic_series_terminates_for_half_integer_order():
    z = 3.0 + 1j
    np.testing.assert_allclose(SP.bessel_k_asymptotic(1.5, z), ss.kv(1.5, z), rtol=1e-14)


def test_beta_fn():
    x = np.array([0.7 + 2j, 3.0 - 1j])
    ref = ss.gamma(x) * ss.gamma(-0.5) / ss.gamma(x - 0.5)
    np.testing.assert_allclose(SP.beta_fn(x, -0.5), ref, rtol=1e-12)
    assert complex(SP.beta_fn(2.0, 3.0)).real == pytest.approx(1 / 12, rel=1e-14)
