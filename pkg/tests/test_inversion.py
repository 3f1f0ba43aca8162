import math

import numpy as np
import pytest
from scipy import special

from levysinh import inversion as I
from levysinh import models as M
from levysinh import oracle as O
from levysinh.errors import DomainError, StripConflict
from levysinh.inversion import PayoffTransform as P


@pytest.mark.parametrize("x", [-2.0, -0.1, 0.0, 0.4, 3.0])
def test_bm_pdf_and_tail(x):
    m = M.BM(sigma2=0.5, mu=0.2)
    t = 0.8
    assert I.pdf(m, t, x, eps=1e-12) == pytest.approx(O.gaussian_pdf(x, 0.16, 0.4), abs=1e-12)
    assert I.tail_prob(m, t, x, eps=1e-12) == pytest.approx(O.gaussian_sf(x, 0.16, 0.4), abs=1e-11)


@pytest.mark.parametrize("m", [M.NIG(beta=0.5, mu=0.1), M.CGMY(), M.Meixner(b=0.3), M.HEJD(), M.Merton()])
def test_pdf_against_flat_oracle(m):
    for x in (-0.5, 0.3):
        v, cert = I.pdf(m, 1.0, x, eps=1e-10, return_cert=True)
        ref = O.flat_pdf(m, 1.0, x)
        assert abs(v - ref) < 1e-9
        assert cert.N > 0


@pytest.mark.parametrize("x", [-0.5, 0.3, 2.0])
def test_vg_pdf_closed_form(x):
    # VG(t) density with lam = c t: algebraic tail in xi, so the flat oracle is too coarse here
    a, b, c, t = 2.0, 0.3, 1.0, 1.0
    lam = c * t
    ref = ((a * a - b * b) ** lam / (math.sqrt(math.pi) * math.gamma(lam) * (2 * a) ** (lam - 0.5))
           * abs(x) ** (lam - 0.5) * special.kv(lam - 0.5, a * abs(x)) * math.exp(b * x))
    assert I.pdf(M.VG(c=c, alpha=a, beta=b), t, x, eps=1e-10) == pytest.approx(ref, abs=1e-10)


def test_tail_prob_monotone_and_consistent():
    m = M.NIG(beta=0.5)
    xs = np.linspace(-3, 3, 13)
    p = np.array([I.tail_prob(m, 1.0, x, eps=1e-11) for x in xs])
    assert np.all(np.diff(p) < 0)
    # d/dx P(X > x) = -pdf
    h = 1e-3
    d = (I.tail_prob(m, 1.0, 0.5 + h, eps=1e-12) - I.tail_prob(m, 1.0, 0.5 - h, eps=1e-12)) / (2 * h)
    assert d == pytest.approx(-I.pdf(m, 1.0, 0.5, eps=1e-12), abs=1e-6)


def test_risk_neutral_martingale():
    m = I.risk_neutral(M.CGMY(), 0.05)
    # E e^{X_1} = e^r
    assert I.forward_value(m, 0.05, 1.0, 0.0) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(StripConflict):
        I.risk_neutral_mu(M.NIG(alpha=0.8, beta=0.0), 0.05)


def test_black_scholes_calls_puts_digitals():
    r, T, S0, vol = 0.02, 0.5, 100.0, 0.3
    m = I.risk_neutral(M.BM(sigma2=vol**2), r)
    x = math.log(S0)
    for K in (70.0, 100.0, 140.0):
        c = I.price_european(m, r, T, x, P.call(K), eps=1e-12)
        p = I.price_european(m, r, T, x, P.put(K), eps=1e-12)
        assert c == pytest.approx(O.black_scholes(S0, K, r, T, vol), abs=1e-9)
        assert p == pytest.approx(O.black_scholes(S0, K, r, T, vol, call=False), abs=1e-9)
        dig = I.price_european(m, r, T, x, P.digital_call(K), eps=1e-12)
        d2 = (math.log(S0 / K) + (r - 0.5 * vol**2) * T) / (vol * math.sqrt(T))
        assert dig == pytest.approx(math.exp(-r * T) * 0.5 * math.erfc(-d2 / math.sqrt(2)), abs=1e-10)


def test_constant_payoff_needs_no_contour():
    v, cert = I.price_european(M.NIG(), 0.03, 2.0, 0.0, P.unit(3.0), return_cert=True)
    assert v == pytest.approx(3 * math.exp(-0.06), rel=1e-15)
    assert cert.N == 0


def test_window_moves_past_payoff_poles():
    m = I.risk_neutral(M.NIG(alpha=3.0, beta=0.0), 0.03)
    x = math.log(100.0)
    a = I.price_european(m, 0.03, 1.0, x, P.call(95.0), eps=1e-11)
    for win in ((-2.9, -1.1), (-0.9, -0.1), (0.1, 2.9)):
        b = I.price_european(m, 0.03, 1.0, x, P.call(95.0), eps=1e-11, window=win)
        assert abs(a - b) < 2e-11


def test_custom_payoff_matches_builtin_call():
    K = 90.0
    k = math.log(K)
    g = lambda xi: -np.exp((1.0 - 1j * xi) * k) / (xi * (xi + 1j))
    custom = P.custom(g, (-math.inf, -1.0), poles=((0j, 1j * K), (-1j, -1j)), shift=k, decay=2.0)
    m = I.risk_neutral(M.CGMY(), 0.01)
    a = I.price_european(m, 0.01, 1.0, math.log(100), custom, eps=1e-10)
    b = I.price_european(m, 0.01, 1.0, math.log(100), P.call(K), eps=1e-10)
    assert a == pytest.approx(b, abs=1e-13)


def test_payoff_transform_against_numeric():
    K = 1.3
    p = P.put(K)
    xi = 0.4 + 0.5j  # put strip is Im xi > 0
    num = O.payoff_transform_numeric(lambda x: max(K - math.exp(x), 0.0), xi, -60.0, math.log(K))
    assert abs(p(xi) - num) < 1e-9


def test_input_errors():
    with pytest.raises(DomainError):
        I.pdf(M.NIG(), 0.0, 0.0)
    with pytest.raises(DomainError):
        P.call(-1.0)
    with pytest.raises(DomainError):
        I.price_european(M.BM(), 0.0, -1.0, 0.0, P.call(1.0))
    with pytest.raises(StripConflict):
        I.price_european(M.NIG(alpha=0.8), 0.0, 1.0, 0.0, P.call(1.0))
