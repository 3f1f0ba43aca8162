"""Densities, tail probabilities and European prices by sinh-accelerated Fourier inversion.

Conventions: Ghat(xi) = int e^{-ix xi} G(x) dx, and the single 1/(2 pi)
sits in the inversion integral.  Densities use the kernel
exp(-i(x - mu t) xi - t psi0(xi)); prices use
exp(i x' xi - tau (r + psi0(xi))) Ghat(xi) with x' = x + mu tau.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, Infeasible, StripConflict, Unsupported
from .metadata import HALF_PI
from .sinhq import Certificate, Descriptor, integrate as sinh_integrate

__all__ = ["PayoffTransform", "pdf", "tail_prob", "price_european", "risk_neutral_mu",
           "risk_neutral", "forward_value"]


@dataclass(frozen=True)
class PayoffTransform:
    """Fourier transform of a payoff G of the log-price.

    ``shift`` is the k in Ghat(xi) = e^{-i k xi} R(xi); it enters the decay
    direction of the pricing integrand.  ``decay`` is the algebraic decay
    exponent of R.  ``poles`` are (location, residue of Ghat).
    """

    kind: str
    Ghat: Optional[Callable] = None
    admissible_strip: tuple = (-math.inf, math.inf)
    poles: tuple = ()
    K: float = float("nan")
    shift: float = 0.0
    decay: float = 0.0
    constant: float = 0.0

    def __call__(self, xi):
        return self.Ghat(np.asarray(xi, dtype=complex))

    @classmethod
    def call(cls, K: float):
        if not K > 0:
            raise DomainError("strike must be positive")
        k = math.log(K)
        g = lambda xi: -np.exp((1.0 - 1j * xi) * k) / (xi * (xi + 1j))
        return cls("Call", g, (-math.inf, -1.0), ((0j, 1j * K), (-1j, -1j)), K, k, 2.0)

    @classmethod
    def put(cls, K: float):
        if not K > 0:
            raise DomainError("strike must be positive")
        k = math.log(K)
        g = lambda xi: -np.exp((1.0 - 1j * xi) * k) / (xi * (xi + 1j))
        return cls("Put", g, (0.0, math.inf), ((0j, 1j * K), (-1j, -1j)), K, k, 2.0)

    @classmethod
    def digital_call(cls, K: float):
        if not K > 0:
            raise DomainError("strike must be positive")
        k = math.log(K)
        g = lambda xi: np.exp(-1j * k * xi) / (1j * xi)
        return cls("DigitalCall", g, (-math.inf, 0.0), ((0j, -1j),), K, k, 1.0)

    @classmethod
    def custom(cls, Ghat: Callable, strip: tuple, poles=(), shift: float = 0.0, decay: float = 1.0):
        if not strip[0] < strip[1]:
            raise DomainError("empty admissible strip")
        return cls("Custom", Ghat, tuple(strip), tuple(poles), float("nan"), shift, decay)

    @classmethod
    def unit(cls, value: float = 1.0):
        """G identically equal to ``value``: Ghat is 2 pi value delta_0, priced without a contour."""
        return cls("Constant", None, (-math.inf, math.inf), (), float("nan"), 0.0, 0.0, value)


def _descriptor(model, t: float, x_kernel: float, window: tuple, eps: float,
                extra_decay: float = 0.0, poles=(), direction: str = "auto", **kw) -> Descriptor:
    try:
        st = model.sinh_type()
    except Unsupported as e:
        raise Infeasible(f"{model.family}: {e}") from e
    C = (-HALF_PI, HALF_PI) if st.cone_C.full else st.cone_C.tilt_interval()
    return Descriptor(strip=window, cone_C=C, cone_Cplus=st.cone_Cplus.tilt_interval(),
                      x=float(x_kernel), t=float(t), order=st.order, c_inf=st.c_inf,
                      c_log=st.c_log, poles=tuple(poles), eps=eps, direction=direction,
                      extra_decay=extra_decay, **kw)


def _model_window(model) -> tuple:
    s = model.strip()
    return (s.mu_minus, s.mu_plus)


def pdf(model, t: float, x: float, eps: float = 1e-10, return_cert: bool = False, **kw):
    """Density of X_t at x."""
    if not t > 0:
        raise DomainError("t must be positive")
    xp = x - model.mu * t
    desc = _descriptor(model, t, xp, _model_window(model), eps, **kw)
    f = lambda xi: np.exp(-1j * xp * xi - t * model.psi0(xi))
    val, c, g, cert = sinh_integrate(f, desc)
    out = val.real
    return (out, cert) if return_cert else out


def tail_prob(model, t: float, x: float, eps: float = 1e-10, return_cert: bool = False, **kw):
    """P(X_t > x).

    For x' = x - mu t >= 0 the integral (1/2pi) int e^{-ix' xi - t psi0} / (i xi)
    runs below the pole at 0 with wings down.  For x' < 0 it runs above the
    pole with wings up and the residue 1 is added back.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    xp = x - model.mu * t
    mm, mp = _model_window(model)
    f = lambda xi: np.exp(-1j * xp * xi - t * model.psi0(xi)) / (1j * xi)
    if xp >= 0:
        desc = _descriptor(model, t, xp, (mm, 0.0), eps, extra_decay=1.0, poles=(0.0,),
                           direction="down" if xp > 0 else "flat", **kw)
        val, c, g, cert = sinh_integrate(f, desc)
        p = val.real
    else:
        desc = _descriptor(model, t, xp, (0.0, mp), eps, extra_decay=1.0, poles=(0.0,), **kw)
        val, c, g, cert = sinh_integrate(f, desc)
        p = 1.0 + val.real
    clamped = min(1.0, max(0.0, p))
    cert.warnings.append(f"clamp_distance={abs(clamped - p):.3g}")
    return (clamped, cert) if return_cert else clamped


def risk_neutral_mu(model, r: float) -> float:
    """Drift mu with E e^{X_1} = e^r, i.e. mu = r + psi0(-i)."""
    s = model.strip()
    if not s.mu_minus < -1:
        raise StripConflict("E e^{X} is infinite: the strip must contain -i")
    return float(r + complex(model.psi0(-1j)).real)


def risk_neutral(model, r: float):
    return replace(model, mu=risk_neutral_mu(model, r))


def forward_value(model, r: float, tau: float, x: float) -> float:
    """e^{-r tau} E e^{x + X_tau}."""
    return math.exp(x - tau * (r + complex(model.psi(-1j)).real))


def price_european(model, r: float, tau: float, x: float, payoff: PayoffTransform,
                   eps: float = 1e-10, window: Optional[tuple] = None, return_cert: bool = False,
                   **kw):
    """Price e^{-r tau} E G(x + X_tau) of a European payoff.

    The line of integration starts in the payoff's admissible strip; a
    different ``window`` may be requested, in which case the payoff poles
    between the two are crossed and their residues added.
    """
    if not tau > 0:
        raise DomainError("tau must be positive")
    if payoff.kind == "Constant":
        val = payoff.constant * math.exp(-r * tau)
        cert = Certificate(d=0.0, zeta=0.0, Lambda=0.0, N=0, predicted_error=0.0,
                           warnings=["constant payoff: no contour"])
        return (val, cert) if return_cert else val
    mm, mp = _model_window(model)
    if payoff.kind == "Call" and not mm < -1:
        raise StripConflict("call prices need the strip to reach below -1 (E e^{X} finite)")
    base = (max(mm, payoff.admissible_strip[0]), min(mp, payoff.admissible_strip[1]))
    if not base[0] < base[1]:
        raise StripConflict(f"payoff strip {payoff.admissible_strip} misses model strip {(mm, mp)}")
    target = base if window is None else (max(mm, window[0]), min(mp, window[1]))
    if not target[0] < target[1]:
        raise StripConflict(f"window {window} misses model strip {(mm, mp)}")
    xp = x + model.mu * tau
    # kernel e^{i(xp - shift) xi}; sinhq uses e^{-i X xi}
    xk = payoff.shift - xp

    def f(xi):
        return np.exp(1j * xp * xi - tau * (r + model.psi0(xi))) * payoff(xi)

    pole_ims = [p.imag for p, _ in payoff.poles]
    desc = _descriptor(model, tau, xk, target, eps, extra_decay=payoff.decay, poles=pole_ims, **kw)
    val, c, g, cert = sinh_integrate(f, desc)
    price = val.real
    # residues between the base window and the target window
    lo0, hi0 = base
    lo1, hi1 = target
    for p, res in payoff.poles:
        y = p.imag
        if hi0 <= y <= lo1:  # moved up past p
            price += (1j * res * np.exp(1j * xp * p - tau * (r + model.psi0(p)))).real
        elif hi1 <= y <= lo0:  # moved down past p
            price -= (1j * res * np.exp(1j * xp * p - tau * (r + model.psi0(p)))).real
    return (price, cert) if return_cert else price
