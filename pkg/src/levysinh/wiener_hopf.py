"""Wiener-Hopf factors, roots of q + psi on the imaginary axis, and zero counting.

phi_plus(xi) = E exp(i xi sup X) is analytic in the upper half-plane,
phi_minus(xi) = E exp(i xi inf X) in the lower one, and
phi_plus * phi_minus = q / (q + psi).

For a line or contour L and xi off L put
    J_L(xi) = -(1/2 pi i) int_L xi ln(1 + psi(eta)/q) / (eta (xi - eta)) d eta.
With L above xi, exp J_L = phi_minus(xi).  With L below xi,
exp J_L = 1/phi_plus(xi), hence phi_minus(xi) = q/(q + psi(xi)) exp J_L.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from .errors import DomainError, Inconclusive, Infeasible, Unsupported, ZeroCrossing
from .metadata import HALF_PI
from .sinhq import Descriptor, SinhContour, TrapezoidGrid, choose_params, jacobian, map_point

log = logging.getLogger(__name__)

__all__ = ["RootReport", "WindingReport", "HEJDFactors", "phi_minus", "phi_plus", "hejd_factors",
           "strip_roots", "winding_number", "meixner_offaxis_roots", "wh_contour"]


# ---------------------------------------------------------------------------
# roots on the imaginary axis
# ---------------------------------------------------------------------------

@dataclass
class RootReport:
    root_lower: Optional[tuple] = None  # (beta, residual) with beta in (mu_-, 0)
    root_upper: Optional[tuple] = None  # (beta, residual) with beta in (0, mu_+)
    flags: dict = field(default_factory=dict)

    def betas(self) -> tuple:
        lo = self.root_lower[0] if self.root_lower else None
        hi = self.root_upper[0] if self.root_upper else None
        return lo, hi


def _f_axis(model, q: float, t):
    return q + np.real(model.psi(1j * np.asarray(t, dtype=float)))


def _side_search(model, q: float, edge: float, sign: float):
    """Look for the root of t -> q + psi(i t) between 0 and the strip edge on one side.

    Returns (flag, bracket) where flag is 'exists', 'none' or 'indeterminate'.
    """
    f = lambda t: float(_f_axis(model, q, t))
    if math.isinf(edge):
        t = sign * 1.0
        for _ in range(200):
            v = f(t)
            if v < 0:
                return "exists", t
            if not math.isfinite(v):
                return "indeterminate", None
            t *= 2.0
            if abs(t) > 1e12:
                return "none", None
        return "none", None
    width = abs(edge)
    # probe towards the edge on a geometric set of distances
    deltas = width * np.logspace(-1, -12, 23)
    prev = None
    vals = []
    for dlt in deltas:
        t = edge - sign * dlt
        v = f(t)
        vals.append(v)
        if v < 0:
            return "exists", t
    # all positive: decide whether the boundary value is finite and positive
    v = np.array(vals)
    dec = -np.diff(v)  # decrements per half decade
    tail = dec[-6:]
    if np.all(tail <= 1e-12 * (1 + abs(v[-1]))):
        return "none", None
    ratios = tail[1:] / np.where(tail[:-1] > 0, tail[:-1], np.inf)
    if np.all(ratios < 0.7):
        r = float(np.max(ratios))
        limit = v[-1] - tail[-1] * r / (1 - r)
        if limit > 1e-10 * (1 + q):
            return "none", None
    return "indeterminate", None


def strip_roots(model, q: float) -> RootReport:
    """Roots i beta of q + psi on the imaginary axis inside the strip."""
    if not q > 0:
        raise DomainError("q must be positive")
    s = model.strip()
    rep = RootReport()
    for name, edge, sign in (("lower", s.mu_minus, -1.0), ("upper", s.mu_plus, 1.0)):
        if edge == 0:
            rep.flags[name] = "none"
            continue
        flag, t_neg = _side_search(model, q, edge, sign)
        rep.flags[name] = flag
        if flag != "exists":
            continue
        f = lambda t: float(_f_axis(model, q, t))
        a, b = (0.0, t_neg) if sign > 0 else (t_neg, 0.0)
        beta = optimize.brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
        res = abs(complex(model.psi(1j * beta)) + q)
        if res > 1e-10 * (1 + q):
            log.warning("root residual %.3g above 1e-10(1+q)", res)
        if name == "lower":
            rep.root_lower = (beta, res)
        else:
            rep.root_upper = (beta, res)
    return rep


# ---------------------------------------------------------------------------
# factors by contour integrals
# ---------------------------------------------------------------------------

def _window(model, q, side: str, xi_im: float) -> tuple:
    """Vertical window for the crossing point of the eta-contour."""
    s = model.strip()
    if np.isreal(q) and float(np.real(q)) > 0:
        rep = strip_roots(model, float(np.real(q)))
        lo, hi = rep.betas()
        lo = s.mu_minus if lo is None else lo
        hi = s.mu_plus if hi is None else hi
    else:
        lo, hi = s.mu_minus, s.mu_plus
    if side == "above":
        lo = max(0.0, xi_im)
    else:
        hi = min(0.0, xi_im)
    if not lo < hi:
        raise Infeasible(f"no room for the contour (window {lo, hi})")
    return lo, hi


def wh_contour(model, q, side: str, xi_im: float = 0.0, eps: float = 1e-12,
               window: Optional[tuple] = None, tilt_cap: Optional[float] = None):
    """Sinh contour for J: wings up above xi ('above') or down below xi ('below').

    ``window`` overrides the crossing interval; ``tilt_cap`` bounds |wing angle|.
    """
    try:
        st = model.sinh_type()
    except Unsupported as e:
        raise Infeasible(str(e)) from e
    lo, hi = _window(model, q, side, xi_im) if window is None else window
    if math.isinf(lo):
        lo = -max(10.0, abs(hi))
    if math.isinf(hi):
        hi = max(10.0, abs(lo))
    C = (-HALF_PI, HALF_PI) if st.cone_C.full else st.cone_C.tilt_interval()
    if st.cone_C.full:
        # entire exponents: keep the wings inside the cone where Re psi grows
        C = st.cone_Cplus.tilt_interval()
    if tilt_cap is not None:
        C = (max(C[0], -tilt_cap), min(C[1], tilt_cap))
    desc = Descriptor(strip=(lo, hi), cone_C=C, cone_Cplus=C, x=0.0, t=0.0, order=st.order,
                      eps=eps, direction="up" if side == "above" else "down", extra_decay=2.0)
    return choose_params(desc)


def _log1p_psi(model, q, eta: np.ndarray) -> np.ndarray:
    """ln(1 + psi(eta)/q) continued along the node sequence, anchored at the middle node."""
    w = 1.0 + np.asarray(model.psi(eta)) / q
    ang = np.angle(w)
    mid = len(w) // 2
    right = np.unwrap(ang[mid:])
    left = np.unwrap(ang[:mid + 1][::-1])[::-1]
    ang = np.concatenate([left[:-1], right])
    return np.log(np.abs(w)) + 1j * ang


def _J(model, q, xi: np.ndarray, c: SinhContour, g: TrapezoidGrid) -> np.ndarray:
    y = g.nodes()
    eta = map_point(c, y)
    L = _log1p_psi(model, q, eta) * jacobian(c, y) / eta
    # integrand xi L(eta) / (eta (xi - eta)), summed over nodes for every xi
    K = xi[:, None] / (xi[:, None] - eta[None, :])
    return -(g.zeta / (2j * math.pi)) * (K @ L)


def _J_adaptive(model, q, xi: np.ndarray, side: str, eps: float, window=None, tilt_cap=None):
    im = float(np.max(xi.imag)) if side == "above" else float(np.min(xi.imag))
    c, g, cert = wh_contour(model, q, side, im, eps, window, tilt_cap)
    prev = _J(model, q, xi, c, g)
    err = math.inf
    for _ in range(6):
        g2 = TrapezoidGrid(g.zeta / 2, 2 * g.N, g.d)
        cur = _J(model, q, xi, c, g2)
        err = float(np.max(np.abs(cur - prev)))
        prev, g = cur, g2
        if err < eps:
            break
    return prev, err


def phi_minus(model, q, xi, eps: float = 1e-10, method: str = "above"):
    """Wiener-Hopf factor E exp(i xi inf_{t < T_q} X_t).

    method='above': eta-contour above xi with wings up, phi_minus = exp J.
    method='below': eta-contour below xi with wings down,
    phi_minus = q/(q + psi(xi)) exp J.
    """
    xi_a = np.atleast_1d(np.asarray(xi, dtype=complex))
    if not np.real(q) > 0:
        raise DomainError("Re q must be positive")
    out = np.ones(xi_a.shape, dtype=complex)
    nz = xi_a != 0
    if nz.any():
        x = xi_a[nz]
        J, _ = _J_adaptive(model, q, x, method, eps)
        if method == "above":
            out[nz] = np.exp(J)
        elif method == "below":
            den = q + np.asarray(model.psi(x))
            if np.any(np.abs(den) == 0):
                raise ZeroCrossing("q + psi(xi) = 0")
            out[nz] = q / den * np.exp(J)
        else:
            raise ValueError("method must be 'above' or 'below'")
    return out if np.ndim(xi) else complex(out[0])


def phi_plus(model, q, xi, eps: float = 1e-10, method: str = "integral"):
    """Wiener-Hopf factor E exp(i xi sup_{t < T_q} X_t).

    method='integral': exp(-J) over an eta-contour below xi with wings down.
    method='identity': q / ((q + psi(xi)) phi_minus(xi)).
    """
    xi_a = np.atleast_1d(np.asarray(xi, dtype=complex))
    if not np.real(q) > 0:
        raise DomainError("Re q must be positive")
    out = np.ones(xi_a.shape, dtype=complex)
    nz = xi_a != 0
    if nz.any():
        x = xi_a[nz]
        if method == "integral":
            J, _ = _J_adaptive(model, q, x, "below", eps)
            out[nz] = np.exp(-J)
        elif method == "identity":
            den = (q + np.asarray(model.psi(x))) * phi_minus(model, q, x, eps)
            out[nz] = q / den
        else:
            raise ValueError("method must be 'integral' or 'identity'")
    return out if np.ndim(xi) else complex(out[0])


# ---------------------------------------------------------------------------
# closed-form factors for hyper-exponential jumps
# ---------------------------------------------------------------------------

@dataclass
class HEJDFactors:
    q: float
    roots_upper: np.ndarray  # beta > 0 with q + psi(i beta) = 0
    roots_lower: np.ndarray
    poles_upper: np.ndarray  # alpha^- (poles of psi at i alpha^-)
    poles_lower: np.ndarray  # -alpha^+
    off_axis: list = field(default_factory=list)

    def phi_plus(self, xi):
        z = -1j * np.asarray(xi, dtype=complex)
        num = np.ones_like(z)
        for p in self.poles_lower:
            num = num * (1 - z / p)
        den = np.ones_like(z)
        for r in self.roots_lower:
            den = den * (1 - z / r)
        return num / den

    def phi_minus(self, xi):
        z = -1j * np.asarray(xi, dtype=complex)
        num = np.ones_like(z)
        for p in self.poles_upper:
            num = num * (1 - z / p)
        den = np.ones_like(z)
        for r in self.roots_upper:
            den = den * (1 - z / r)
        return num / den


def hejd_factors(model, q: float, imag_tol: float = 1e-9) -> HEJDFactors:
    """Rational Wiener-Hopf factors from the roots of q + psi(i z) = 0.

    With z = -i xi, q + psi = q + mu z - sigma2 z^2/2 + sum p z/(a + z) - sum p z/(a - z)
    (positive and negative atoms); clearing denominators gives a polynomial.
    """
    if not q > 0:
        raise DomainError("q must be positive")
    P = np.polynomial.Polynomial
    pos = [(p, a) for p, a in model.pos]
    neg = [(p, a) for p, a in model.neg]
    D = P([1.0])
    for _, a in pos:
        D = D * P([a, 1.0])
    for _, a in neg:
        D = D * P([a, -1.0])
    total = P([q, model.mu, -0.5 * model.sigma2]) * D
    for j, (p, a) in enumerate(pos):
        rest = P([1.0])
        for k, (_, b) in enumerate(pos):
            if k != j:
                rest = rest * P([b, 1.0])
        for _, b in neg:
            rest = rest * P([b, -1.0])
        total = total + P([0.0, p]) * rest
    for j, (p, a) in enumerate(neg):
        rest = P([1.0])
        for _, b in pos:
            rest = rest * P([b, 1.0])
        for k, (_, b) in enumerate(neg):
            if k != j:
                rest = rest * P([b, -1.0])
        total = total - P([0.0, p]) * rest
    roots = total.roots()
    off = [complex(r) for r in roots if abs(r.imag) > imag_tol * max(1.0, abs(r))]
    if off:
        log.warning("roots off the imaginary axis: %s", off)
    real = np.array(sorted(r.real for r in roots if abs(r.imag) <= imag_tol * max(1.0, abs(r))))
    up = real[real > 0]
    lo = real[real < 0]
    return HEJDFactors(q=q, roots_upper=up, roots_lower=lo,
                       poles_upper=np.array([a for _, a in neg]),
                       poles_lower=np.array([-a for _, a in pos]), off_axis=off)


# ---------------------------------------------------------------------------
# zero counting
# ---------------------------------------------------------------------------

@dataclass
class WindingReport:
    rectangle: tuple
    nodes: int
    winding: int
    raw: float
    min_abs: float


def _boundary(rect, n_side: int) -> np.ndarray:
    x0, x1, y0, y1 = rect
    s = np.linspace(0.0, 1.0, n_side, endpoint=False)
    bottom = (x0 + (x1 - x0) * s) + 1j * y0
    right = x1 + 1j * (y0 + (y1 - y0) * s)
    top = (x1 - (x1 - x0) * s) + 1j * y1
    left = x0 + 1j * (y1 - (y1 - y0) * s)
    return np.concatenate([bottom, right, top, left])


def winding_number(model, q, rect: Sequence[float], nodes: int = 256, max_nodes: int = 2**20,
                   min_abs: float = 1e-8) -> WindingReport:
    """Winding number of q + psi around 0 along the boundary of rect = (x0, x1, y0, y1).

    The rectangle may straddle the imaginary axis only inside the strip.
    Nodes are doubled until the phase sum is stable to 0.01 and no phase
    step exceeds pi/4.
    """
    x0, x1, y0, y1 = map(float, rect)
    if not (x0 < x1 and y0 < y1):
        raise DomainError("rectangle must have x0 < x1 and y0 < y1")
    if x0 <= 0 <= x1:
        s = model.strip()
        if not (s.mu_minus < y0 and y1 < s.mu_plus):
            raise DomainError("rectangle crosses a branch cut")
    prev = None
    n = max(16, nodes)
    while True:
        z = _boundary((x0, x1, y0, y1), n)
        w = q + np.asarray(model.psi(z))
        m = float(np.min(np.abs(w)))
        if m < min_abs:
            raise Inconclusive(f"|q + psi| = {m:.3g} on the boundary")
        steps = np.angle(np.roll(w, -1) / w)
        raw = float(np.sum(steps)) / (2 * math.pi)
        fine = np.max(np.abs(steps)) < 0.25 * math.pi
        if fine and prev is not None and abs(raw - prev) < 0.01:
            k = int(round(raw))
            return WindingReport((x0, x1, y0, y1), 4 * n, k, raw, m)
        prev = raw
        n *= 2
        if 4 * n > max_nodes:
            raise Inconclusive("winding did not stabilize")


def meixner_offaxis_roots(params, q: float, k_range=range(-2, 3)) -> list:
    """Candidate solutions of cosh((a xi - i b)/2) = cos(b/2) e^{-q/(2 delta)}.

    Q < 1 puts z_pm = Q +- (Q^2 - 1)^{1/2} on the unit circle, so every
    candidate xi_{k,pm} = (2/a)[ln z_pm + i(b/2 + 2 k pi)] is purely imaginary.
    Residuals |psi + q| are reported; candidates on the cuts, where psi is
    not defined, carry residual inf and on_cut=True.
    """
    if not q > 0:
        raise DomainError("q must be positive")
    a, b, dl = params.a, params.b, params.delta
    mu = getattr(params, "mu", 0.0)
    if mu != 0:
        raise Unsupported("closed-form roots need mu = 0")
    Q = math.cos(b / 2) * math.exp(-q / (2 * dl))
    sq = np.sqrt(complex(Q * Q - 1.0))
    out = []
    s = params.strip()
    for k in k_range:
        for sign, z in (("+", Q + sq), ("-", Q - sq)):
            xi = (2.0 / a) * (np.log(z) + 1j * (b / 2 + 2 * k * math.pi))
            if abs(xi.real) < 1e-15 * max(1.0, abs(xi)):
                xi = complex(0.0, xi.imag)
            on_cut = xi.real == 0 and not (s.mu_minus < xi.imag < s.mu_plus)
            if on_cut:
                res = math.inf
            else:
                res = abs(complex(params.psi(xi)) + q)
            out.append({"k": k, "branch": sign, "xi": complex(xi), "residual": res, "on_cut": on_cut})
    return out
