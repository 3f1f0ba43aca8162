"""Brute-force references for tests.

Each routine here uses a different algorithm from the production path it
checks: long straight-line trapezoid sums instead of sinh contours,
adaptive Gauss-Kronrod quadrature of the Levy-Khintchine integral instead
of closed-form exponents, explicit residue series, closed-form
Black-Scholes.  They favor simplicity over speed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import gammaln, ndtr

from .errors import DomainError


@dataclass(frozen=True)
class OracleConfig:
    omega: float = 0.0
    nodes: int = 10**6
    half_width: float = 200.0
    tol: float = 1e-12

    def __post_init__(self):
        if self.nodes < 10**4:
            raise ValueError("oracle needs at least 1e4 nodes")


def flat_inverse(f: Callable, omega: float = 0.0, config: OracleConfig | None = None) -> complex:
    """(1/2pi) int_{Im xi = omega} f(xi) dxi by a straight trapezoid sum on [-L, L]."""
    cfg = config or OracleConfig(omega=omega)
    L, n = cfg.half_width, cfg.nodes
    h = 2 * L / (n - 1)
    total = 0j
    chunk = 200_000
    for start in range(0, n, chunk):
        k = np.arange(start, min(n, start + chunk))
        u = -L + h * k
        w = np.where((k == 0) | (k == n - 1), 0.5, 1.0)
        total += complex(np.sum(w * np.asarray(f(u + 1j * omega), dtype=complex)))
    return h * total / (2 * math.pi)


def flat_pdf(model, t: float, x: float, omega: float = 0.0, config: OracleConfig | None = None) -> float:
    cfg = config or OracleConfig(omega=omega)
    val = flat_inverse(lambda xi: np.exp(-1j * x * xi - t * model.psi(xi)), omega, cfg)
    return val.real


def _quad_c(fun, a, b, **kw):
    re = integrate.quad(lambda x: fun(x).real, a, b, limit=2000, **kw)[0]
    im = integrate.quad(lambda x: fun(x).imag, a, b, limit=2000, **kw)[0]
    return complex(re, im)


def _cutoff(f, sign: float) -> float:
    X = 2.0
    while X < 1e4:
        v = abs(float(f(sign * X)))
        if v * X * X < 1e-18:
            return X
        X *= 1.5
    return X


def lk_psi(levy_density: Callable, sigma2: float, mu: float, xi, compensator: str = "unit",
           epsabs: float = 1e-13, epsrel: float = 1e-11) -> np.ndarray:
    """psi(xi) = sigma2 xi^2/2 - i mu xi + int (1 - e^{ix xi} + comp(x) i x xi) F(dx).

    compensator: "unit" uses 1_{(-1,1)}(x), "full" uses 1, "none" uses 0.
    The density must decay at least exponentially (the integral is cut where
    x^2 F(x) < 1e-18).
    """
    xs = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.empty(xs.shape, dtype=complex)
    f = levy_density
    Xp, Xm = _cutoff(f, 1.0), _cutoff(f, -1.0)
    for i, s in enumerate(xs):
        def inner(x, s=s):
            c = {"unit": 1.0 if abs(x) < 1 else 0.0, "full": 1.0, "none": 0.0}[compensator]
            one_minus = -2j * np.sin(0.5 * x * s) * np.exp(0.5j * x * s)  # 1 - e^{ixs}
            return (one_minus + c * 1j * x * s) * f(x)

        total = 0j
        for lo, hi in ((-Xm, -1.0), (-1.0, 0.0), (0.0, 1.0), (1.0, Xp)):
            total += _quad_c(inner, lo, hi, epsabs=epsabs, epsrel=epsrel)
        out[i] = 0.5 * sigma2 * s * s - 1j * mu * s + total
    return out if np.ndim(xi) else out[0]


def beta_residue_density(model, x: float, tol: float = 1e-16, max_terms: int = 100000) -> float:
    """Positive-jump Levy density of the Beta model as the residue series sum_n e^{-a_n x} a_n p_n.

    The poles of the positive-jump part sit at -i a_n with a_n = beta1 (alpha1 + n);
    a_n p_n = c1 Gamma(n + gamma1) / (Gamma(gamma1) n!).
    """
    if not x > 0:
        raise DomainError("x must be positive")
    c, a, b, g = model.c1, model.alpha1, model.beta1, model.gamma1
    total = 0.0
    n = 0
    while n < max_terms:
        an = b * (a + n)
        w = c * math.exp(gammaln(n + g) - gammaln(g) - gammaln(n + 1))
        term = w * math.exp(-an * x)
        total += term
        # remaining terms are bounded by a geometric tail with ratio e^{-b x} * (n+g)/(n+1)
        ratio = math.exp(-b * x) * max(1.0, (n + g) / (n + 1))
        if ratio < 1 and term * ratio / (1 - ratio) < tol * abs(total):
            break
        n += 1
    return total


def black_scholes(S: float, K: float, r: float, tau: float, sigma: float, call: bool = True) -> float:
    sd = sigma * math.sqrt(tau)
    d1 = (math.log(S / K) + (r + 0.5 * sigma**2) * tau) / sd
    d2 = d1 - sd
    if call:
        return S * ndtr(d1) - K * math.exp(-r * tau) * ndtr(d2)
    return K * math.exp(-r * tau) * ndtr(-d2) - S * ndtr(-d1)


def gaussian_pdf(x: float, mean: float = 0.0, var: float = 1.0) -> float:
    return math.exp(-0.5 * (x - mean) ** 2 / var) / math.sqrt(2 * math.pi * var)


def gaussian_sf(x: float, mean: float = 0.0, var: float = 1.0) -> float:
    return float(ndtr(-(x - mean) / math.sqrt(var)))


def payoff_transform_numeric(G: Callable, xi: complex, lo: float, hi: float) -> complex:
    """int_lo^hi e^{-ix xi} G(x) dx by adaptive quadrature (truncated payoff)."""
    return _quad_c(lambda x: np.exp(-1j * x * xi) * G(x), lo, hi, epsabs=1e-13, epsrel=1e-12)


def gh_measure_density(alpha: float, beta: float, delta: float, lam: float, t: float,
                       side: str = "-") -> float:
    """Density of the Laplace-inverse measure of the generalized hyperbolic Levy density.

    Built from the Bessel J/Y representation of the Levy density,
    f(x) = e^{beta x}/|x| [int_alpha^inf e^{-s|x|} m(s) ds + max(lam, 0) e^{-alpha|x|}],
    m(s) = s / (pi^2 y (J_|lam|^2 + Y_|lam|^2)(delta sqrt(2y))), y = (s^2 - alpha^2)/2.
    Writing 1/|x| = int_0^inf e^{-u|x|} du turns the bracket into the cumulative
    of m plus the atom, shifted by -/+ beta.
    """
    from scipy.special import jv, yv

    shift = beta if side == "-" else -beta
    top = t - shift
    if not top > alpha:
        raise DomainError("t must exceed the cut endpoint")
    nu = abs(lam)

    def dens_y(y):
        # m(s) ds = dy / (pi^2 y (J^2 + Y^2)(delta sqrt(2y)))
        z = delta * math.sqrt(2.0 * y)
        return 1.0 / (math.pi**2 * y * (jv(nu, z) ** 2 + yv(nu, z) ** 2))

    ytop = 0.5 * (top * top - alpha * alpha)
    y1 = min(1.0, ytop)
    # y = e^{-w} near 0 tames the logarithmic behaviour for lam = 0
    def dens_w(w):
        z = delta * math.sqrt(2.0) * math.exp(-0.5 * w)
        q = jv(nu, z) ** 2 + yv(nu, z) ** 2
        return 1.0 / (math.pi**2 * q) if math.isfinite(q) else 0.0

    W = 600.0
    val = integrate.quad(dens_w, -math.log(y1), W, limit=2000, epsabs=1e-15, epsrel=1e-12)[0]
    if nu == 0:
        # J0 -> 1, Y0 -> (2/pi)(ln(z/2) + gamma): integrand 1/(pi^2 + (w - 2c)^2)
        c = math.log(delta * math.sqrt(2.0) / 2.0) + np.euler_gamma
        val += (0.5 * math.pi - math.atan((W - 2 * c) / math.pi)) / math.pi
    if ytop > y1:
        val += integrate.quad(dens_y, y1, ytop, limit=2000, epsabs=1e-14, epsrel=1e-12)[0]
    return val + max(lam, 0.0)


def _hejd_upper_roots(sigma2, mu, pos, neg, q):
    """Roots z with Re z > 0 of q + psi(i z) = 0 for hyper-exponential jumps, in mpmath."""
    import mpmath

    def mul(a, b):
        out = [mpmath.mpf(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return out

    def add(a, b):
        n = max(len(a), len(b))
        a = list(a) + [0] * (n - len(a))
        b = list(b) + [0] * (n - len(b))
        return [x + y for x, y in zip(a, b)]

    # coefficients in increasing powers of z
    facs = [[a, 1] for _, a in pos] + [[a, -1] for _, a in neg]
    D = [1]
    for f in facs:
        D = mul(D, f)
    total = mul([q, mu, -mpmath.mpf(sigma2) / 2], D)
    for j, (p, _) in enumerate(pos):
        rest = [1]
        for k, f in enumerate(facs):
            if k != j:
                rest = mul(rest, f)
        total = add(total, mul([0, p], rest))
    for j, (p, _) in enumerate(neg):
        rest = [1]
        for k, f in enumerate(facs):
            if k != len(pos) + j:
                rest = mul(rest, f)
        total = add(total, mul([0, -p], rest))
    while abs(total[-1]) == 0:
        total.pop()
    roots = mpmath.polyroots(total[::-1], maxsteps=200, extraprec=200)
    return [z for z in roots if mpmath.re(z) > 0]


def hejd_no_touch_transform(sigma2, mu, pos, neg, q, a):
    """P(inf_{t < T_q} X_t > -a) from the rational factor E e^{z Y}, Y = -inf X.

    E e^{zY} = prod(1 - z/alpha^-) / prod(1 - z/beta_j) gives
    P(Y > a) = sum_j A_j e^{-beta_j a}, A_j = prod_k(1 - beta_j/alpha_k) / prod_{i != j}(1 - beta_j/beta_i).
    """
    import mpmath

    betas = _hejd_upper_roots(sigma2, mu, pos, neg, q)
    tail = 0
    for j, b in enumerate(betas):
        A = mpmath.mpf(1)
        for _, al in neg:
            A *= 1 - b / al
        for i, bi in enumerate(betas):
            if i != j:
                A /= 1 - b / bi
        tail += A * mpmath.exp(-b * a)
    return 1 - tail


def hejd_no_touch_price(sigma2, mu, pos, neg, H, T, S0, r, dps: int = 30) -> float:
    """No-touch price by Talbot inversion of the closed-form transform."""
    import mpmath

    with mpmath.workdps(dps):
        a = mpmath.log(mpmath.mpf(S0) / H)
        f = lambda q: hejd_no_touch_transform(sigma2, mu, pos, neg, q, a) / q
        v = mpmath.invertlaplace(f, T, method="talbot")
        return float(mpmath.exp(-r * T) * mpmath.re(v))
