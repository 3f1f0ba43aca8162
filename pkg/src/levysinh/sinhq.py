"""Sinh-acceleration: contours, the simplified trapezoid rule, parameter choice.

A contour is xi = chi(y) = i*omega1 + b*sinh(i*omega + y), y real.  For
omega > 0 the wings go up, for omega < 0 they go down.  The trapezoid rule
with step zeta on the y-line has discretization error ~ exp(-2*pi*d/zeta)
where d is the half-width of the y-strip mapped into the region of
analyticity and decay of the integrand.
"""
from __future__ import annotations

import logging
import math
import os
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import Infeasible, NumericalError
from .metadata import ExtOrder, HALF_PI

log = logging.getLogger(__name__)

APERTURE_SHARE = 0.8
TAIL_MARGIN = math.log(10.0)
POLE_CLEARANCE = 0.10


@dataclass(frozen=True)
class SinhContour:
    omega1: float
    b: float
    omega: float

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError("b must be positive")
        if not -HALF_PI < self.omega < HALF_PI:
            raise ValueError("omega must lie in (-pi/2, pi/2)")

    def __call__(self, y):
        return map_point(self, y)


@dataclass(frozen=True)
class TrapezoidGrid:
    zeta: float
    N: int
    d: float = 0.0

    @property
    def Lambda(self) -> float:
        return self.N * self.zeta

    def nodes(self) -> np.ndarray:
        return self.zeta * np.arange(-self.N, self.N + 1, dtype=float)


def map_point(c: SinhContour, y):
    return 1j * c.omega1 + c.b * np.sinh(1j * c.omega + np.asarray(y, dtype=complex))


def jacobian(c: SinhContour, y):
    return c.b * np.cosh(1j * c.omega + np.asarray(y, dtype=complex))


def pairwise_sum(v: np.ndarray) -> complex:
    # numpy's add.reduce is pairwise on contiguous data; fixed order => deterministic
    return complex(np.add.reduce(np.ascontiguousarray(v)))


def trapezoid(f: Callable, c: SinhContour, g: TrapezoidGrid) -> complex:
    """(zeta/2pi) * sum_k f(chi(y_k)) chi'(y_k), approximating (1/2pi) int f(xi) dxi."""
    y = g.nodes()
    xi = map_point(c, y)
    vals = np.asarray(f(xi), dtype=complex) * jacobian(c, y)
    bad = ~np.isfinite(vals)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise NumericalError(f"non-finite integrand at node {k - g.N} (xi={xi[k]})", index=k - g.N)
    return g.zeta / (2 * math.pi) * pairwise_sum(vals)


@dataclass
class Descriptor:
    """Everything the parameter chooser needs.

    ``x`` is the coefficient of the kernel exp(-i x xi); decay is upward when
    x < 0 and downward when x > 0.  ``t`` multiplies psi0.
    """

    strip: tuple
    cone_C: tuple = (-HALF_PI, HALF_PI)
    cone_Cplus: tuple = (-HALF_PI, HALF_PI)
    x: float = 0.0
    t: float = 1.0
    order: tuple = (ExtOrder.numeric(1.0), ExtOrder.numeric(1.0))
    c_inf: Optional[Callable[[float], complex]] = None
    c_log: Optional[float] = None
    poles: Sequence[float] = ()
    eps: float = 1e-10
    direction: str = "auto"
    extra_decay: float = 0.0  # payoff-type algebraic decay exponent, |Ghat| ~ rho^-k
    aperture_share: float = APERTURE_SHARE
    margin: float = TAIL_MARGIN
    clearance: float = POLE_CLEARANCE


@dataclass
class Certificate:
    d: float
    zeta: float
    Lambda: float
    N: int
    predicted_error: float
    warnings: list = field(default_factory=list)

    def header(self) -> dict:
        return {"d": self.d, "zeta": self.zeta, "Lambda": self.Lambda, "N": self.N,
                "predicted_error": self.predicted_error}


def _decay_ok(desc: Descriptor, phi: float) -> bool:
    """Does the integrand decay along the ray arg xi = phi (right half-plane)?"""
    lo, hi = desc.order
    x, t = desc.x, desc.t
    in_plus = desc.cone_Cplus[0] < phi < desc.cone_Cplus[1]
    exp_rate = -x * math.sin(phi)  # |e^{-ix xi}| = exp(-rho * exp_rate)
    if t == 0:  # no psi in the exponent: algebraic decay comes from extra_decay
        return exp_rate > 0 if x != 0 else True
    k = hi.exponent if hi.kind != "1+" else 1.0
    if hi.kind == "1+" or k > 1:
        return in_plus
    if k < 1:  # includes 0+
        if abs(x) > 0:
            return exp_rate > 0
        return in_plus
    # order exactly 1: compare linear rates
    if desc.c_inf is None:
        return in_plus and exp_rate >= 0
    return t * desc.c_inf(phi).real + exp_rate > 0


def decay_interval(desc: Descriptor) -> tuple[float, float]:
    """Angular interval for the contour wings, intersected with cone C."""
    direction = desc.direction
    if direction == "auto":
        direction = "down" if desc.x > 0 else ("up" if desc.x < 0 else "flat")
    n = 2001
    phis = np.linspace(-HALF_PI, HALF_PI, n)[1:-1]
    ok = np.array([_decay_ok(desc, p) for p in phis])
    cl, ch = desc.cone_C
    ok &= (phis > cl) & (phis < ch)
    if direction == "down":
        ok &= phis < 0
    elif direction == "up":
        ok &= phis > 0
    if not ok.any():
        raise Infeasible(f"no admissible tilt for direction {direction!r} "
                         f"(cone {desc.cone_Cplus}, x={desc.x})")
    # longest run of admissible angles
    idx = np.flatnonzero(ok)
    runs = np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1)
    run = max(runs, key=len)
    step = phis[1] - phis[0]
    return float(phis[run[0]] - 0.5 * step), float(phis[run[-1]] + 0.5 * step)


def _effective_strip(desc: Descriptor, scale: float) -> tuple[float, float]:
    mm, mp = desc.strip
    if math.isinf(mm) and math.isinf(mp):
        return (-scale, scale)
    if math.isinf(mp):
        return (mm, max(-mm, scale))
    if math.isinf(mm):
        return (-max(mp, scale), mp)
    return (mm, mp)


def _tail_exponent(desc: Descriptor, omega: float, rho: float) -> float:
    """Log-decay of |integrand| at radius rho along the wing of angle omega."""
    lo, hi = desc.order
    t = desc.t
    val = -desc.x * math.sin(omega) * rho
    if hi.kind == "0+":
        c = desc.c_log if desc.c_log is not None else 1.0
        val += t * c * math.log(rho)
    elif desc.c_inf is not None:
        val += t * desc.c_inf(omega).real * hi.growth(rho)
    return val + desc.extra_decay * math.log(rho) - math.log(rho)  # jacobian ~ rho


def choose_params(desc: Descriptor):
    """Return (SinhContour, TrapezoidGrid, Certificate) for tolerance desc.eps."""
    eps = desc.eps
    if not 1e-14 < eps < 1e-1:
        raise ValueError("eps must lie in (1e-14, 1e-1)")
    warn = []
    th_lo, th_hi = decay_interval(desc)
    omega = 0.5 * (th_lo + th_hi)
    d = desc.aperture_share * 0.5 * (th_hi - th_lo)

    # natural scale of the integrand in xi
    scale = 1.0
    if desc.c_inf is not None and desc.order[1].is_numeric:
        cabs = abs(desc.c_inf(omega)) * desc.t
        if cabs > 0:
            scale = max(1.0, (1.0 / cabs) ** (1.0 / desc.order[1].value))
    mm, mp = _effective_strip(desc, scale)
    width = mp - mm
    poles = [p for p in desc.poles if mm < p < mp]
    lo_c = mm + desc.clearance * width
    hi_c = mp - desc.clearance * width
    for p in poles:  # keep clear of poles inside the window as well
        if p > 0:
            hi_c = min(hi_c, p - desc.clearance * width)
        else:
            lo_c = max(lo_c, p + desc.clearance * width)
    if not lo_c < hi_c:
        raise Infeasible("pole-free window too narrow")
    s_minus = min(0.0, math.sin(omega - d))
    s_plus = max(0.0, math.sin(omega + d))
    b = (hi_c - lo_c) / (s_plus - s_minus)
    omega1 = hi_c - b * s_plus
    contour = SinhContour(omega1, b, omega)

    # tail: smallest Lambda with decay exponent >= ln(1/eps) + margin
    target = math.log(1.0 / eps) + desc.margin
    Lam = None
    for L in np.arange(0.0, 60.0, 0.02):
        rho = max(b * math.exp(L) / 2.0, 1.0 + 1e-9)
        if _tail_exponent(desc, omega, rho) >= target:
            Lam = float(L)
            break
    if Lam is None:
        raise Infeasible("integrand does not decay fast enough for the requested tolerance")
    zeta = 2 * math.pi * d / math.log(10.0 / eps)
    N = int(math.ceil(Lam / zeta))
    if desc.order[1].kind == "0+" and desc.x == 0:
        warn.append("logarithmic decay: N grows like O(E^2)")
        warnings.warn("logarithmic decay: N grows like O(E^2)", RuntimeWarning, stacklevel=2)
    cert = Certificate(d=d, zeta=zeta, Lambda=N * zeta, N=N,
                       predicted_error=10.0 * math.exp(-2 * math.pi * d / zeta), warnings=warn)
    return contour, TrapezoidGrid(zeta, N, d), cert


def boundary_mass(f: Callable, c: SinhContour, d: float, Lam: float, n: int = 400) -> float:
    """(1/2pi) int |f chi'| over the two edges Im y = +-d (trapezoid error prefactor)."""
    y = np.linspace(-Lam, Lam, n)
    h = y[1] - y[0]
    tot = 0.0
    for s in (d, -d):
        yy = y + 1j * s
        xi = 1j * c.omega1 + c.b * np.sinh(1j * c.omega + yy)
        jac = c.b * np.cosh(1j * c.omega + yy)
        with np.errstate(all="ignore"):
            v = np.abs(np.asarray(f(xi), dtype=complex) * jac)
            v = np.where(np.isfinite(v), v, np.inf)
            tot = max(tot, float(np.sum(v) * h / (2 * math.pi)))
    return tot


def integrate(f: Callable, desc: Descriptor, refine: bool = True):
    """Choose parameters, adapt them to the integrand, and evaluate.

    The step is shrunk when the integrand is large on the edges of the
    y-strip, and the truncation is extended until the end nodes are
    negligible.  Returns (value, contour, grid, certificate).
    """
    c, g, cert = choose_params(desc)
    eps = desc.eps
    if refine:
        H = boundary_mass(f, c, g.d, max(g.Lambda, 1.0))
        if not math.isfinite(H):
            # integrand singular near the edges; shrink d
            for _ in range(6):
                g = replace(g, d=0.7 * g.d)
                H = boundary_mass(f, c, g.d, max(g.Lambda, 1.0))
                if math.isfinite(H):
                    break
        H = max(H, 1e-300)
        # logs: H can be near the overflow threshold for far-out x
        zeta = 2 * math.pi * g.d / (math.log(10.0) + math.log(max(H, 1.0)) - math.log(eps))
        zeta = min(zeta, g.zeta) if math.isfinite(H) else g.zeta
        Lam = g.Lambda
        # extend truncation while end terms are not negligible
        for _ in range(200):
            ends = np.array([-Lam, Lam])
            with np.errstate(all="ignore"):
                v = np.abs(np.asarray(f(map_point(c, ends)), dtype=complex) * jacobian(c, ends))
            if np.all(np.isfinite(v)) and zeta / (2 * math.pi) * v.max() < 1e-3 * eps:
                break
            Lam += 0.25
        N = int(math.ceil(Lam / zeta))
        g = TrapezoidGrid(zeta, N, g.d)
        cert = Certificate(d=g.d, zeta=zeta, Lambda=N * zeta, N=N,
                           predicted_error=10.0 * max(H, 1.0) * math.exp(-2 * math.pi * g.d / zeta),
                           warnings=cert.warnings)
    return trapezoid(f, c, g), c, g, cert


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("LEVY_SINH_THREADS", "1")))
    except ValueError:
        return 1
