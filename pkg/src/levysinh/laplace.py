"""Laplace inversion in time and the no-touch barrier price.

The no-touch claim pays 1 at T if the log-price x + X stays above h.  With
m the running infimum and a = x - h > 0,

    int_0^inf e^{-qT} P(m_T > -a) dT = P(m_{T_q} > -a) / q,
    P(m_{T_q} > -a) = (1/2pi) int_{Im xi = w} e^{i a xi} phi_minus_q(xi) / (i xi) d xi,  w < 0.

The line is deformed up to a contour L1 crossing the imaginary axis above 0
(wings up, below the root of q + psi there), which picks up the residue 1
at xi = 0.  Below L1 runs the eta-contour L2 (wings down, crossing below 0),
on which phi_minus_q(xi) = q/(q + psi(xi)) exp J_{L2}(xi).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import mpmath
import numpy as np

from .errors import DomainError, Infeasible, NumericalError, PrecisionLoss, Unsupported
from .metadata import HALF_PI
from .sinhq import Descriptor, TrapezoidGrid, choose_params, jacobian, map_point
from .wiener_hopf import strip_roots

log = logging.getLogger(__name__)

__all__ = ["BromwichContour", "gaver_stehfest", "gs_weights", "choose_bromwich", "sinh_bromwich",
           "no_touch_rule", "no_touch_transform", "price_no_touch", "BarrierResult", "NoTouchRule"]

GS_PREC = 256


# ---------------------------------------------------------------------------
# Gaver-Stehfest
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def gs_weights(M: int, prec: int = GS_PREC) -> tuple:
    """Stehfest weights V_k, k = 1..2M, as mpmath floats."""
    if M < 1:
        raise DomainError("M must be positive")
    with mpmath.workprec(prec):
        out = []
        for k in range(1, 2 * M + 1):
            s = mpmath.mpf(0)
            for j in range((k + 1) // 2, min(k, M) + 1):
                s += (mpmath.mpf(j) ** (M + 1) * mpmath.binomial(M, j) * mpmath.binomial(2 * j, j)
                      * mpmath.binomial(j, k - j)) / mpmath.factorial(M)
            out.append((-1) ** (M + k) * s)
        return tuple(out)


def _gs_sum(F: Callable, t: float, M: int, prec: int, mp_args: bool):
    w = gs_weights(M, prec)
    with mpmath.workprec(prec):
        ln2t = mpmath.log(2) / mpmath.mpf(t)
        tot = mpmath.mpf(0)
        mag = mpmath.mpf(0)
        for k, wk in enumerate(w, start=1):
            v = F(k * ln2t) if mp_args else F(float(k * ln2t))
            v = mpmath.re(v) if isinstance(v, (mpmath.mpf, mpmath.mpc)) else mpmath.mpf(float(np.real(v)))
            if not mpmath.isfinite(v):
                raise NumericalError(f"F not finite at node {k}", index=k)
            tot += wk * v
            mag += abs(wk * v)
        return float(tot * ln2t), float(mag * ln2t)


def gaver_stehfest(F: Callable, t: float, M: int = 8, prec: int = GS_PREC, return_diag: bool = False,
                   budget: float = 1e-6, mp_args: bool = False):
    """f(t) from F(q) = int e^{-qt} f via the Gaver-Stehfest sum with 2M terms.

    F is evaluated at q_k = k ln2 / t in double precision, or with mpmath
    arguments when ``mp_args`` is set; weights and sums are carried at
    ``prec`` bits.  The diagnostic is |GS_M - GS_{M-1}|.
    PrecisionLoss is raised when the weight cancellation magnifies the double
    rounding of F beyond ``budget``.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    if M % 2:
        raise DomainError("M must be even")
    val, mag = _gs_sum(F, t, M, prec, mp_args)
    amp = mag * (2.0 ** (-prec) if mp_args else np.finfo(float).eps)
    if amp > budget * max(abs(val), 1e-300) and amp > budget:
        raise PrecisionLoss(f"cancellation error estimate {amp:.3g} exceeds budget")
    if not return_diag:
        return val
    prev, _ = _gs_sum(F, t, M - 1, prec, mp_args)
    return val, {"diff": abs(val - prev), "rounding": amp, "M": M}


# ---------------------------------------------------------------------------
# sinh-deformed Bromwich integral
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BromwichContour:
    """q(y) = sigma + i b_l sinh(i omega_l + y); the wings go left at angles +-(pi/2 + omega_l)."""

    sigma: float
    b_l: float
    omega_l: float

    def __post_init__(self):
        if not (self.sigma > 0 and self.b_l > 0 and 0 < self.omega_l < HALF_PI):
            raise DomainError("need sigma > 0, b_l > 0, omega_l in (0, pi/2)")

    def __call__(self, y):
        return self.sigma + 1j * self.b_l * np.sinh(1j * self.omega_l + np.asarray(y, dtype=complex))

    def jacobian(self, y):
        return 1j * self.b_l * np.cosh(1j * self.omega_l + np.asarray(y, dtype=complex))

    @property
    def vertex(self) -> float:
        return self.sigma - self.b_l * math.sin(self.omega_l)


def choose_bromwich(T: float, eps: float = 1e-10, omega_l: float = math.pi / 4,
                    singularities: Sequence[complex] = (), scale: float = 1.0, gap: float = 0.5):
    """Contour and grid for (1/2 pi i) int e^{qT} F(q) dq.

    F must be analytic to the right of every contour of the family with
    angles in [omega_l - d, omega_l + d]; besides the cut (-inf, 0] the
    caller lists isolated singular points.
    """
    if not T > 0:
        raise DomainError("T must be positive")
    d = 0.8 * min(omega_l, HALF_PI - omega_l)
    b = scale / T
    a = omega_l + d
    # the contour of angle a is the leftmost one; at angle a the vertex must stay right of 0
    sigma = b * math.sin(a) + gap / T
    for p in singularities:
        p = complex(p)
        need = p.real + math.sin(a) * math.sqrt(b * b + (p.imag / math.cos(a)) ** 2) + gap / T
        sigma = max(sigma, need)
    c = BromwichContour(sigma, b, omega_l)
    # largest |e^{qT}| over the strip sits on the vertex of the contour with angle omega_l - d
    amp = math.exp(T * (sigma - b * math.sin(max(omega_l - d, 0.0))))
    target = math.log(10.0 * amp / eps)
    zeta = 2 * math.pi * d / target
    # truncation: Re q T <= -(ln(1/eps) + 2) beyond Lambda
    need = (math.log(1.0 / eps) + 2.0 + sigma * T) / (b * math.sin(omega_l) * T)
    Lam = math.acosh(max(need, 1.0)) + 0.5
    N = int(math.ceil(Lam / zeta))
    return c, TrapezoidGrid(zeta, N, d)


def sinh_bromwich(F: Callable, T: float, c: BromwichContour, g: TrapezoidGrid,
                  return_imag: bool = False):
    """(1/2 pi i) int e^{qT} F(q) dq over the sinh-deformed Bromwich contour."""
    y = g.nodes()
    q = c(y)
    with np.errstate(all="ignore"):
        Fq = np.asarray(F(q), dtype=complex)
    bad = np.flatnonzero(~np.isfinite(Fq))
    if bad.size:
        raise NumericalError(f"F not finite at node {int(bad[0])} (q={q[bad[0]]})", index=int(bad[0]))
    terms = np.exp(q * T) * Fq * c.jacobian(y)
    val = g.zeta * complex(np.add.reduce(terms)) / (2j * math.pi)
    if abs(val.imag) > 1e-9 * max(abs(val.real), 1e-300):
        log.info("Bromwich sum has imaginary part %.3g", val.imag)
    return (val.real, val.imag) if return_imag else val.real


# ---------------------------------------------------------------------------
# no-touch barrier
# ---------------------------------------------------------------------------

def _arg_psi_max(model, theta: float) -> float:
    """max |arg psi| over the sector between the real axis and the rays at +-theta."""
    rho = np.logspace(0, 6, 61)
    phis = np.linspace(0.0, theta, 6) if theta else np.array([0.0])
    worst = 0.0
    for p in phis:
        for eta in (rho * np.exp(1j * p), -rho * np.exp(-1j * p)):
            with np.errstate(all="ignore"):
                v = np.asarray(model.psi(eta), dtype=complex)
            v = v[np.isfinite(v) & (np.abs(v) > 0)]
            if v.size:
                worst = max(worst, float(np.max(np.abs(np.angle(v)))))
    return worst


def _tilt_cap(model, limit: float) -> float:
    """Largest wing angle with |arg psi| < limit on the swept sector."""
    lo, hi = 0.0, HALF_PI * 0.95
    if _arg_psi_max(model, 0.0) >= limit:
        raise Infeasible("arg psi on the real line leaves no room for complex q")
    for _ in range(12):
        mid = 0.5 * (lo + hi)
        if _arg_psi_max(model, mid) < limit:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass
class NoTouchRule:
    """Fixed quadrature for q -> P(inf_{t < T_q} X_t > -a).

    The same L1 and L2 nodes serve every q, so quadrature errors vary
    smoothly in q; the cancellation in the Gaver-Stehfest sum then acts on
    them as on the exact values.
    """

    a: float
    xi: np.ndarray  # L1 nodes
    w1: np.ndarray  # zeta * chi'(y) / (2 pi) on L1
    eta: np.ndarray  # L2 nodes
    w2: np.ndarray  # zeta * chi'(y) on L2
    err: float

    def __call__(self, q) -> complex:
        psi_eta = np.asarray(self._psi(self.eta))
        lg = _log1p(psi_eta, q)
        L = lg * self.w2 / self.eta
        J = -(self.xi / (2j * math.pi)) * (self._K @ L)
        phim = q / (q + self._psi_xi) * np.exp(J)
        return 1.0 + complex(np.sum(self._kern * phim * self.w1))

    def bind(self, model):
        self._psi = model.psi
        self._psi_xi = np.asarray(model.psi(self.xi))
        self._K = 1.0 / (self.xi[:, None] - self.eta[None, :])
        self._kern = np.exp(1j * self.a * self.xi) / (1j * self.xi)
        return self


def _log1p(psi_eta: np.ndarray, q) -> np.ndarray:
    w = 1.0 + psi_eta / q
    ang = np.angle(w)
    mid = len(w) // 2
    right = np.unwrap(ang[mid:])
    left = np.unwrap(ang[:mid + 1][::-1])[::-1]
    return np.log(np.abs(w)) + 1j * np.concatenate([left[:-1], right])


def _cone(model, tilt_cap):
    try:
        st = model.sinh_type()
    except Unsupported as e:
        raise Infeasible(str(e)) from e
    C = st.cone_Cplus.tilt_interval() if st.cone_C.full else st.cone_C.tilt_interval()
    if tilt_cap is not None:
        C = (max(C[0], -tilt_cap), min(C[1], tilt_cap))
    return st, C


def no_touch_rule(model, a: float, q_ref: float, eps: float = 1e-10,
                  tilt_cap: Optional[float] = None) -> NoTouchRule:
    """Build the fixed rule at the real reference rate q_ref.

    q_ref should be the smallest real rate used: the roots of q + psi(i t)
    move away from 0 as q grows, so both windows stay valid.
    """
    if not a > 0:
        raise DomainError("a = x - h must be positive")
    if not q_ref > 0:
        raise DomainError("q_ref must be positive")
    s = model.strip()
    if not s.mu_minus < 0:
        raise Infeasible("the strip must extend below the real axis")
    rep = strip_roots(model, q_ref)
    lo = rep.root_lower[0] if rep.root_lower else s.mu_minus
    lo = -1.0 if math.isinf(lo) else lo
    hi = rep.root_upper[0] if rep.root_upper else s.mu_plus
    st, C = _cone(model, tilt_cap)
    eps = max(eps, 1e-13)
    eps2 = max(1e-2 * eps, 2e-14)

    desc2 = Descriptor(strip=(lo, 0.0), cone_C=C, cone_Cplus=C, x=0.0, t=0.0, order=st.order,
                       eps=eps2, direction="down", extra_decay=2.0)
    c2, g2, _ = choose_params(desc2)
    desc1 = Descriptor(strip=(0.0, hi), cone_C=C, cone_Cplus=C, x=-a, t=0.0, order=st.order,
                       poles=(0.0,), eps=eps, direction="up", extra_decay=1.0)
    c1, g1, _ = choose_params(desc1)

    def make(g1_, g2_):
        y1, y2 = g1_.nodes(), g2_.nodes()
        xi = map_point(c1, y1)
        eta = map_point(c2, y2)
        return NoTouchRule(a, xi, g1_.zeta * jacobian(c1, y1) / (2 * math.pi), eta,
                           g2_.zeta * jacobian(c2, y2), math.inf).bind(model)

    rule = make(g1, g2)
    v = rule(q_ref)
    err = math.inf
    # refine L2, then L1, until the value at q_ref settles
    for which in (2, 1):
        for _ in range(6):
            if which == 2:
                g2n = TrapezoidGrid(g2.zeta / 2, 2 * g2.N, g2.d)
                cand = make(g1, g2n)
            else:
                g1n = TrapezoidGrid(g1.zeta / 2, 2 * g1.N, g1.d)
                cand = make(g1n, g2)
            vn = cand(q_ref)
            err = abs(vn - v)
            v = vn
            if which == 2:
                g2 = g2n
            else:
                g1 = g1n
            if err < 0.1 * eps:
                break
    # extend the truncation of L1 until the end terms are negligible
    for _ in range(40):
        rule = make(g1, g2)
        t = np.abs(rule._kern * rule.w1)
        if max(t[0], t[-1]) < 1e-3 * eps:
            break
        g1 = TrapezoidGrid(g1.zeta, g1.N + max(1, g1.N // 8), g1.d)
    rule.err = err
    return rule


def no_touch_transform(model, q, a: float, eps: float = 1e-10) -> complex:
    """P(inf_{t < T_q} X_t > -a) for an exponential time T_q of real rate q > 0."""
    if not (np.isreal(q) and np.real(q) > 0):
        raise DomainError("use no_touch_rule for complex q")
    return no_touch_rule(model, a, float(np.real(q)), eps)(q).real


@dataclass
class BarrierResult:
    price: float
    method: str
    predicted_error: float
    nodes: int


def price_no_touch(model, H: float, T: float, S0: float, r: float, eps: float = 1e-8,
                   method: str = "Bromwich", M: int = 8, return_result: bool = False,
                   omega_l: Optional[float] = None):
    """Price of the claim paying 1 at T if S stays above the lower barrier H < S0.

    The model is the law of X = ln(S/S0) (use inversion.risk_neutral for a
    risk-neutral drift).
    """
    if not (H > 0 and S0 > H):
        raise DomainError("need 0 < H < S0")
    if not T > 0:
        raise DomainError("T must be positive")
    a = math.log(S0 / H)
    disc = math.exp(-r * T)
    if method.upper() == "GS":
        rule = no_touch_rule(model, a, math.log(2.0) / T, 1e-2 * eps)
        val, diag = gaver_stehfest(lambda q: rule(q).real / q, T, M, return_diag=True)
        res = BarrierResult(disc * val, "GS", max(diag["diff"], diag["rounding"]) * disc, 2 * M)
    elif method.lower() == "bromwich":
        th0 = _arg_psi_max(model, 0.0)
        room = HALF_PI - th0
        if not room > 0.05:
            raise Infeasible("arg psi reaches pi/2 on the real line")
        wl = 0.5 * room if omega_l is None else omega_l
        # |arg q| <= pi/2 + omega_l on the nodes; keep |arg psi| below pi/2 - omega_l
        cap = _tilt_cap(model, HALF_PI - wl - 0.05)
        c, g = choose_bromwich(T, 1e-1 * eps, wl)
        rule = no_touch_rule(model, a, c.vertex, 1e-2 * eps, cap)
        y = g.nodes()
        qs = c(y)
        # F(conj q) = conj F(q): evaluate the upper half only
        vals = np.array([rule(q) / q for q in qs[g.N:]])
        Fq = np.concatenate([np.conj(vals[:0:-1]), vals])
        val = sinh_bromwich(lambda q: Fq, T, c, g)
        res = BarrierResult(disc * val, "Bromwich", max(eps, rule.err), 2 * g.N + 1)
    else:
        raise ValueError("method must be 'GS' or 'Bromwich'")
    if not -1e-6 <= res.price <= disc * (1 + 1e-6):
        log.warning("no-touch price %.6g outside [0, e^{-rT}]", res.price)
    res.price = min(max(res.price, 0.0), disc)
    return res if return_result else res.price
