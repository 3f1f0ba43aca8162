import math

import numpy as np
import pytest

from levysinh import models as M
from levysinh import wiener_hopf as W
from levysinh.errors import DomainError, Inconclusive, Unsupported


def _bm_rates(s2, mu, q):
    # roots of s2 k^2/2 + mu k - q: sup ~ Exp(k_plus), -inf ~ Exp(k_minus)
    d = math.sqrt(mu * mu + 2 * s2 * q)
    return (-mu + d) / s2, (mu + d) / s2


def test_bm_strip_roots():
    s2, mu, q = 0.3, 0.1, 1.0
    kp, km = _bm_rates(s2, mu, q)
    rep = W.strip_roots(M.BM(sigma2=s2, mu=mu), q)
    assert rep.root_lower[0] == pytest.approx(-kp, rel=1e-13)
    assert rep.root_upper[0] == pytest.approx(km, rel=1e-13)
    assert rep.root_lower[1] < 1e-12


def test_bm_factors_closed_form():
    s2, mu, q = 0.3, 0.1, 2.0
    m = M.BM(sigma2=s2, mu=mu)
    kp, km = _bm_rates(s2, mu, q)
    xi = np.linspace(-10, 10, 21)
    np.testing.assert_allclose(W.phi_plus(m, q, xi, eps=1e-12), kp / (kp - 1j * xi), atol=1e-9)
    np.testing.assert_allclose(W.phi_minus(m, q, xi, eps=1e-12), km / (km + 1j * xi), atol=1e-9)


@pytest.mark.parametrize("m", [M.NIG(beta=0.5), M.CGMY(), M.HEJD(), M.VG(beta=0.2)])
def test_factor_methods_agree(m):
    q = 1.5
    xi = np.linspace(-8, 8, 17)
    a = W.phi_minus(m, q, xi, eps=1e-10, method="above")
    b = W.phi_minus(m, q, xi, eps=1e-10, method="below")
    np.testing.assert_allclose(a, b, atol=1e-8)
    c = W.phi_plus(m, q, xi, eps=1e-10, method="integral")
    d = W.phi_plus(m, q, xi, eps=1e-10, method="identity")
    np.testing.assert_allclose(c, d, atol=1e-8)


def test_factors_are_characteristic_functions():
    m = M.NIG(beta=0.5)
    q = 0.7
    assert abs(complex(W.phi_plus(m, q, 0.0)) - 1) < 1e-12
    xi = np.linspace(-20, 20, 41)
    assert np.all(np.abs(W.phi_minus(m, q, xi)) <= 1 + 1e-10)


def test_hejd_factors_structure():
    m = M.HEJD(sigma2=0.04, pos=((1.0, 10.0),), neg=((1.0, 5.0),))
    F = W.hejd_factors(m, 2.0)
    # diffusion plus one exponential each side: two roots per side
    assert F.roots_upper.size == 2 and F.roots_lower.size == 2
    for r in np.concatenate([F.roots_upper, F.roots_lower]):
        assert abs(complex(m.psi(1j * r)) + 2.0) < 1e-10
    xi = np.linspace(-5, 5, 11)
    np.testing.assert_allclose(F.phi_plus(xi) * F.phi_minus(xi) * (2.0 + m.psi(xi)) / 2.0, 1.0, atol=1e-12)


def test_winding_zero_off_axis_and_two_on_strip():
    m = M.NIG(beta=0.5)
    assert W.winding_number(m, 1.0, (0.5, 10.0, 0.5, 10.0)).winding == 0
    # a rectangle around both strip roots inside the strip counts two zeros
    rep = W.strip_roots(m, 1.0)
    lo, hi = rep.root_lower[0], rep.root_upper[0]
    s = m.strip()
    rect = (-1.0, 1.0, max(lo - 0.1, 0.5 * (lo + s.mu_minus)), min(hi + 0.1, 0.5 * (hi + s.mu_plus)))
    assert W.winding_number(m, 1.0, rect).winding == 2


def test_winding_errors():
    m = M.NIG()
    with pytest.raises(DomainError):
        W.winding_number(m, 1.0, (-1.0, 1.0, 0.0, 5.0))
    with pytest.raises(DomainError):
        W.winding_number(m, 1.0, (1.0, 0.0, 0.0, 1.0))
    rep = W.strip_roots(m, 1.0)
    r = rep.root_upper[0]
    with pytest.raises(Inconclusive):
        W.winding_number(m, 1.0, (-0.5, 0.5, r, r + 0.2))


def test_meixner_roots():
    mx = M.Meixner(delta=1.0, a=1.0, b=0.0)
    roots = W.meixner_offaxis_roots(mx, 1.0, k_range=range(-1, 2))
    inside = [r for r in roots if not r["on_cut"]]
    assert len(inside) == 2
    assert all(r["residual"] <= 1e-12 for r in inside)
    rep = W.strip_roots(mx, 1.0)
    assert sorted(r["xi"].imag for r in inside) == pytest.approx([rep.root_lower[0], rep.root_upper[0]])
    with pytest.raises(Unsupported):
        W.meixner_offaxis_roots(M.Meixner(mu=0.1), 1.0)


def test_q_must_be_positive():
    with pytest.raises(DomainError):
        W.strip_roots(M.NIG(), -1.0)
    with pytest.raises(DomainError):
        W.phi_minus(M.NIG(), -1.0, 0.5)
