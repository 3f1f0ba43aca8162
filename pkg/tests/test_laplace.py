import math

import mpmath as mp
import numpy as np
import pytest

from levysinh import inversion as I
from levysinh import laplace as L
from levysinh import models as M
from levysinh import oracle as O
from levysinh.errors import DomainError, PrecisionLoss


def test_gs_weights_sum_to_zero():
    w = L.gs_weights(8)
    assert len(w) == 16
    assert abs(mp.fsum(w)) < mp.mpf(10) ** -60


@pytest.mark.xfail(strict=True, reason="Stehfest with 2M = 16 terms errs by 7.5e-8 on this example")
def test_gs_exponential_m8_stated_tolerance():
    v = L.gaver_stehfest(lambda q: 1 / (q + 1), 1.0, M=8, mp_args=True)
    assert abs(v - math.exp(-1)) <= 1e-8


def test_gs_exponential_m10():
    v = L.gaver_stehfest(lambda q: 1 / (q + 1), 1.0, M=10, mp_args=True)
    assert abs(v - math.exp(-1)) <= 1e-8


def test_gs_constant_and_diag():
    v, diag = L.gaver_stehfest(lambda q: 1 / q, 2.0, M=8, mp_args=True, return_diag=True)
    assert abs(v - 1) < 1e-12
    assert {"diff", "rounding", "M"} <= set(diag)


def test_gs_input_checks():
    with pytest.raises(DomainError):
        L.gaver_stehfest(lambda q: 1 / q, 1.0, M=7)
    with pytest.raises(DomainError):
        L.gaver_stehfest(lambda q: 1 / q, -1.0)
    with pytest.raises(PrecisionLoss):
        L.gaver_stehfest(lambda q: 1 / q, 1.0, M=40, prec=53, budget=1e-12)


def test_bromwich_rational_transforms():
    c, g = L.choose_bromwich(1.0, eps=1e-12)
    assert abs(L.sinh_bromwich(lambda q: 1 / q, 1.0, c, g) - 1) < 1e-12
    T = math.pi / 2
    c, g = L.choose_bromwich(T, eps=1e-12, singularities=(1j, -1j))
    assert abs(L.sinh_bromwich(lambda q: 1 / (q * q + 1), T, c, g) - 1) < 1e-11


def test_bromwich_contour_geometry():
    c = L.BromwichContour(sigma=1.0, b_l=2.0, omega_l=0.5)
    y = np.array([-1.0, 0.0, 1.5])
    h = 1e-6
    np.testing.assert_allclose(c.jacobian(y), (c(y + h) - c(y - h)) / (2 * h), rtol=1e-7)
    assert complex(c(0.0)).imag == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DomainError):
        L.BromwichContour(sigma=1.0, b_l=2.0, omega_l=2.0)


def test_no_touch_transform_bm_closed_form():
    # P(inf_{t < T_q} X > -a) = 1 - e^{-k a}, k the rate of -inf
    s2, mu, q, a = 0.2, 0.05, 1.3, 0.4
    k = (mu + math.sqrt(mu * mu + 2 * s2 * q)) / s2
    v = L.no_touch_transform(M.BM(sigma2=s2, mu=mu), q, a, eps=1e-12)
    assert abs(v - (1 - math.exp(-k * a))) < 1e-10


def test_no_touch_kou_against_oracle():
    r, S0 = 0.02, 1.0
    kou = I.risk_neutral(M.HEJD(sigma2=0.09, pos=((2.0, 12.0),), neg=((1.5, 6.0),)), r)
    for H, T in ((0.9, 0.5), (0.6, 2.0)):
        ref = O.hejd_no_touch_price(kou.sigma2, kou.mu, kou.pos, kou.neg, H, T, S0, r)
        b = L.price_no_touch(kou, H, T, S0, r, eps=1e-10)
        g = L.price_no_touch(kou, H, T, S0, r, method="GS", M=8)
        assert abs(b - ref) < 1e-9
        assert abs(g - ref) < 1e-5


def test_no_touch_nig_methods_agree():
    r = 0.03
    m = I.risk_neutral(M.NIG(alpha=4.0, beta=-1.0, delta=0.5), r)
    res_b = L.price_no_touch(m, 85.0, 1.0, 100.0, r, eps=1e-10, return_result=True)
    res_g = L.price_no_touch(m, 85.0, 1.0, 100.0, r, method="GS", M=8, return_result=True)
    assert res_b.method == "Bromwich" and res_g.method == "GS"
    assert abs(res_b.price - res_g.price) < 1e-5
    assert 0 < res_b.price < math.exp(-r)


def test_no_touch_input_checks():
    with pytest.raises(DomainError):
        L.price_no_touch(M.BM(), 110.0, 1.0, 100.0, 0.0)
    with pytest.raises(DomainError):
        L.price_no_touch(M.BM(), 90.0, 0.0, 100.0, 0.0)
    with pytest.raises(ValueError):
        L.price_no_touch(M.BM(), 90.0, 1.0, 100.0, 0.0, method="Euler")
