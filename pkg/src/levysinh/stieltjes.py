"""Stieltjes measures, SL decompositions and their extraction from psi.

Side convention: the measure of the positive jumps (side "+") lives on
t > -mu_-, and is read off the lower cut via Im psi(-(it + 0)); the measure
of the negative jumps (side "-") lives on t > mu_+ and uses Im psi(it + 0).
The one-sided Levy densities are f_+(x) = int e^{-tx} G_+(dt) for x > 0
and f_-(x) = int e^{t x} G_-(dt) for x < 0.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from .errors import CutError, DomainError, NonConvergence, Unsupported
from .metadata import HALF_PI, ONE_PLUS, ZERO_PLUS, AngleCone, ExtOrder

log = logging.getLogger(__name__)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL8_X, _GL8_W = np.polynomial.legendre.leggauss(8)
DEFAULT_EPS = (1e-2, 1e-3, 1e-4)


def _quad_c(fun, a, b, epsrel=1e-12, epsabs=0.0, limit=500):
    re, _ = integrate.quad(lambda s: fun(s).real, a, b, epsrel=epsrel, epsabs=epsabs, limit=limit)
    im, _ = integrate.quad(lambda s: fun(s).imag, a, b, epsrel=epsrel, epsabs=epsabs, limit=limit)
    return complex(re, im)


def _check_side(side: str) -> str:
    if side not in ("+", "-"):
        raise ValueError("side must be '+' or '-'")
    return side


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class StieltjesMeasure:
    """A measure on (0, inf) given by atoms, a density, or a step table.

    Step tables hold cell edges and cell masses; inside a cell the measure is
    (mass / width) * t**power dt, so power = -2 turns a table of G into G / t^2.
    """

    kind: str
    atoms: tuple = ()
    density: Optional[Callable] = None
    growth: float = 0.0
    edges: Optional[np.ndarray] = None
    masses: Optional[np.ndarray] = None
    power: float = 0.0
    support_inf: float = 0.0
    signed: bool = False
    interp: str = "flat"

    def __post_init__(self):
        if self.kind not in ("atoms", "density", "steps"):
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.support_inf < 0:
            raise DomainError("support must lie in (0, inf)")
        if self.kind == "atoms":
            for t, w in self.atoms:
                if not t > 0:
                    raise DomainError("atoms must sit at t > 0")
                if w < 0 and not self.signed:
                    raise DomainError("negative atom in an unsigned measure")
        if self.kind == "steps":
            e = np.asarray(self.edges, dtype=float)
            if e.ndim != 1 or e.size < 2 or np.any(np.diff(e) <= 0) or e[0] < 0:
                raise DomainError("step edges must be increasing and nonnegative")
            if np.asarray(self.masses).shape != (e.size - 1,):
                raise ValueError("need one mass per cell")
            if self.interp not in ("flat", "cubic"):
                raise ValueError("interp must be 'flat' or 'cubic'")

    # constructors -------------------------------------------------------
    @classmethod
    def from_atoms(cls, atoms: Sequence, signed: bool = False):
        atoms = tuple((float(t), float(w)) for t, w in atoms)
        s = min((t for t, _ in atoms), default=0.0)
        return cls("atoms", atoms=atoms, support_inf=s, signed=signed)

    @classmethod
    def from_density(cls, g: Callable, support_inf: float = 0.0, growth: float = 0.0,
                     signed: bool = False):
        return cls("density", density=g, growth=float(growth), support_inf=float(support_inf),
                   signed=signed)

    @classmethod
    def from_steps(cls, edges, masses=None, cumulative=None, power: float = 0.0,
                   signed: bool = False, interp: str = "flat"):
        """Step table; ``interp='cubic'`` reads the density off a cubic spline of the cumulative."""
        edges = np.asarray(edges, dtype=float)
        if masses is None:
            if cumulative is None:
                raise ValueError("need masses or cumulative")
            c = np.asarray(cumulative, dtype=float)
            masses = np.diff(np.concatenate([[0.0], c])) if c.size == edges.size - 1 else np.diff(c)
        masses = np.asarray(masses, dtype=float)
        return cls("steps", edges=edges, masses=masses, power=float(power),
                   support_inf=float(edges[0]), signed=signed, interp=interp)

    def scaled(self, power: float) -> "StieltjesMeasure":
        """Multiply the measure by t**power (steps and densities only)."""
        if self.kind == "steps":
            return StieltjesMeasure.from_steps(self.edges, self.masses, power=self.power + power,
                                               signed=self.signed, interp=self.interp)
        if self.kind == "density":
            g = self.density
            return StieltjesMeasure.from_density(lambda t: g(t) * t**power, self.support_inf,
                                                 self.growth + power, self.signed)
        return StieltjesMeasure.from_atoms([(t, w * t**power) for t, w in self.atoms], self.signed)

    # helpers --------------------------------------------------------------
    def _cell_nodes(self, n: int = 8):
        """Gauss nodes and weights (including the piecewise density) of a step table."""
        e = self.edges
        mid = 0.5 * (e[1:] + e[:-1])
        half = 0.5 * (e[1:] - e[:-1])
        x, w = (_GL8_X, _GL8_W) if n == 8 else np.polynomial.legendre.leggauss(n)
        t = mid[:, None] + half[:, None] * x[None, :]
        if self.interp == "cubic":
            cum = np.concatenate([[0.0], np.cumsum(self.masses)])
            dens = CubicSpline(e, cum).derivative()(t)
        else:
            dens = (self.masses / (2 * half))[:, None]
        wt = dens * half[:, None] * w[None, :] * t**self.power
        return t.ravel(), wt.ravel()

    def total_abs(self, weight: Callable) -> float:
        """int weight(t) |G|(dt)."""
        if self.kind == "atoms":
            return float(sum(abs(w) * weight(t) for t, w in self.atoms))
        if self.kind == "steps":
            t, wt = self._cell_nodes()
            return float(np.sum(np.abs(wt) * weight(t)))
        g = self.density
        s = self.support_inf
        a = integrate.quad(lambda t: abs(g(t)) * weight(t), s, s + 1.0, limit=500)[0]
        b = integrate.quad(lambda t: abs(g(t)) * weight(t), s + 1.0, np.inf, limit=500)[0]
        return a + b

    def validate(self) -> list:
        """Diagnostics for the (1+t)^-1 integrability invariant."""
        out = []
        if self.kind == "density":
            if self.growth >= 0:
                out.append(f"declared growth t^{self.growth} is not (1+t)^-1 integrable")
            g = self.density
            t1, t2 = 1e3 + self.support_inf, 1e4 + self.support_inf
            g1, g2 = abs(g(t1)), abs(g(t2))
            if g1 > 0 and g2 > 0:
                slope = math.log(g2 / g1) / math.log(t2 / t1)
                if abs(slope - self.growth) > 0.1:
                    out.append(f"observed growth {slope:.3g} differs from declared {self.growth:.3g}")
            if not out:
                val = self.total_abs(lambda t: 1.0 / (1.0 + t))
                if not math.isfinite(val):
                    out.append("integral of (1+t)^-1 |G| diverges")
        elif self.kind == "steps" and self.power > -1 + 1e-12 and abs(self.masses[-1]) > 0:
            log.debug("step table truncated at %g; integrability holds by construction", self.edges[-1])
        return out


@dataclass
class SLDecomposition:
    """psi = (a2+ xi^2 - i a1+ xi) ST(G0+)(-i xi) + (a2- xi^2 + i a1- xi) ST(G0-)(i xi)
    + sigma2 xi^2 / 2 - i mu xi."""

    sigma2: float = 0.0
    mu: float = 0.0
    a2_plus: float = 0.0
    a1_plus: float = 0.0
    a2_minus: float = 0.0
    a1_minus: float = 0.0
    G0_plus: Optional[StieltjesMeasure] = None
    G0_minus: Optional[StieltjesMeasure] = None

    def __post_init__(self):
        if self.sigma2 < 0 or min(self.a2_plus, self.a1_plus, self.a2_minus, self.a1_minus) < 0:
            raise DomainError("sigma2 and the a-coefficients must be nonnegative")
        if self.G0_plus is not None and self.a2_plus + self.a1_plus <= 0:
            raise DomainError("a2+ + a1+ must be positive when G0+ is present")
        if self.G0_minus is not None and self.a2_minus + self.a1_minus <= 0:
            raise DomainError("a2- + a1- must be positive when G0- is present")

    @property
    def strip(self) -> tuple:
        lo = -self.G0_plus.support_inf if self.G0_plus is not None else -math.inf
        hi = self.G0_minus.support_inf if self.G0_minus is not None else math.inf
        return lo, hi

    @property
    def signed(self) -> tuple:
        return (bool(self.G0_plus is not None and self.G0_plus.signed),
                bool(self.G0_minus is not None and self.G0_minus.signed))

    def classification(self) -> str:
        return "sSL" if any(self.signed) else "SL"


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

def _st_scalar(G: StieltjesMeasure, z: complex, tol: float) -> complex:
    if G.kind == "atoms":
        return complex(sum(w / (z + t) for t, w in G.atoms))
    g, s = G.density, G.support_inf
    split = s + max(1.0, abs(z))
    f = lambda t: g(t) / (z + t)
    # absolute floor avoids chasing zero-valued pieces
    return (_quad_c(f, s, split, epsrel=tol, epsabs=1e-300)
            + _quad_c(f, split, np.inf, epsrel=tol, epsabs=1e-300))


def st(G: StieltjesMeasure, z, tol: float = 1e-12):
    """Stieltjes transform int (z + t)^-1 G(dt)."""
    za = np.atleast_1d(np.asarray(z, dtype=complex))
    on_cut = (za.imag == 0) & (za.real <= -G.support_inf)
    if G.kind == "atoms":
        on_cut |= np.isin(-za, [complex(t) for t, _ in G.atoms])
    if on_cut.any():
        raise CutError(f"z = {za[on_cut][0]} lies on the cut (-inf, {-G.support_inf}]")
    if G.kind == "steps":
        t, wt = G._cell_nodes()
        out = (wt[None, :] / (za[:, None] + t[None, :])).sum(axis=1)
    else:
        out = np.array([_st_scalar(G, complex(v), tol) for v in za])
    return out if np.ndim(z) else complex(out[0])


def psi_from_decomp(d: SLDecomposition, xi):
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    lo, hi = d.strip
    on_axis = xi.real == 0
    if np.any(on_axis & ((xi.imag <= lo) | (xi.imag >= hi))):
        raise CutError(f"xi on a branch cut (strip {lo, hi})")
    out = 0.5 * d.sigma2 * xi**2 - 1j * d.mu * xi
    nz = xi != 0
    if d.G0_plus is not None and nz.any():
        x = xi[nz]
        out[nz] += (d.a2_plus * x**2 - 1j * d.a1_plus * x) * st(d.G0_plus, -1j * x)
    if d.G0_minus is not None and nz.any():
        x = xi[nz]
        out[nz] += (d.a2_minus * x**2 + 1j * d.a1_minus * x) * st(d.G0_minus, 1j * x)
    out[~nz] = 0.0
    return out


def density_from_measure(G: StieltjesMeasure, x: float, side: str = "+") -> float:
    """Laplace transform int e^{-t|x|} G(dt): the one-sided Levy density at x."""
    _check_side(side)
    if x == 0:
        raise DomainError("x = 0 is excluded")
    if (side == "+") != (x > 0):
        raise DomainError("side '+' needs x > 0 and side '-' needs x < 0")
    ax = abs(x)
    if G.kind == "atoms":
        return float(sum(w * math.exp(-t * ax) for t, w in G.atoms))
    if G.kind == "steps":
        if G.power == 0 and G.interp == "flat":
            e = G.edges
            dens = G.masses / np.diff(e)
            cell = np.exp(-e[:-1] * ax) * (-np.expm1(-np.diff(e) * ax)) / ax
            return float(np.sum(dens * cell))
        t, wt = G._cell_nodes()
        return float(np.sum(wt * np.exp(-t * ax)))
    g, s = G.density, G.support_inf
    f = lambda t: g(t) * math.exp(-t * ax)
    a = integrate.quad(f, s, s + 1.0 / ax, limit=500, epsrel=1e-12)[0]
    b = integrate.quad(f, s + 1.0 / ax, np.inf, limit=500, epsrel=1e-12)[0]
    return a + b


# ---------------------------------------------------------------------------
# boundary values and extraction
# ---------------------------------------------------------------------------

def _boundary_xi(t, side: str, eps):
    t = np.asarray(t, dtype=float)
    return -(1j * t + eps) if side == "+" else (1j * t + eps)


def im_psi_boundary(model, t, side: str, eps: float):
    """Im psi(-(it + eps)) for side '+', Im psi(it + eps) for side '-'."""
    _check_side(side)
    if not eps > 0:
        raise DomainError("eps must be positive")
    s = model.strip()
    t = np.asarray(t, dtype=float)
    edge = -s.mu_minus if side == "+" else s.mu_plus
    if np.any(t <= edge):
        raise DomainError(f"side {side} needs t > {edge}")
    return np.asarray(model.psi(_boundary_xi(t, side, eps))).imag


def _cut_edge(model, side: str) -> float:
    s = model.strip()
    return -s.mu_minus if side == "+" else s.mu_plus


def _adaptive_gl(f: Callable, a: float, b: float, tol: float, depth: int = 0) -> float:
    """Recursive 16/2x16-point Gauss-Legendre on a vectorized real integrand."""
    def gl(lo, hi):
        m, h = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return h * float(np.dot(_GL_W, f(m + h * _GL_X)))

    m = 0.5 * (a + b)
    whole = gl(a, b)
    parts = gl(a, m) + gl(m, b)
    if abs(whole - parts) <= tol * max(1.0, abs(parts)) or depth > 30 or b - a < 1e-13 * max(1.0, abs(a)):
        return parts
    return _adaptive_gl(f, a, m, tol, depth + 1) + _adaptive_gl(f, m, b, tol, depth + 1)


def _cell_eps(model, side: str, u: float, v: float, eps: float, tol: float) -> float:
    g = lambda t: np.asarray(model.psi(_boundary_xi(t, side, eps))).imag
    return _adaptive_gl(g, u, v, tol) / math.pi


def _cell_arc(model, side: str, u: float, v: float, tol: float) -> float:
    """(1/pi) Im int_u^v psi(-/+ i t) dt along a half circle off the cut.

    The arc t = c + r e^{i th}, th in (pi, 2 pi), has Im t < 0, which puts
    xi = -i t (side '+') and xi = i t (side '-') on the correct bank of the cut.
    No epsilon limit is needed.
    """
    c, r = 0.5 * (u + v), 0.5 * (v - u)
    if side == "+":
        # xi = -i t, t = c + r e^{i th}, th from pi to 2 pi (Im t < 0 -> Re xi < 0)
        def f(th):
            tt = c + r * np.exp(1j * th)
            return np.asarray(model.psi(-1j * tt)) * (1j * r * np.exp(1j * th))
    else:
        # xi = i t with Im t < 0 gives Re xi > 0
        def f(th):
            tt = c + r * np.exp(1j * th)
            return np.asarray(model.psi(1j * tt)) * (1j * r * np.exp(1j * th))
    val = _quad_c(f, math.pi, 2 * math.pi, epsrel=tol, epsabs=tol * 1e-3)
    return val.imag / math.pi


@dataclass
class ExtractedMeasure:
    side: str
    t_lo: np.ndarray
    t_hi: np.ndarray
    mass: np.ndarray
    residual: np.ndarray
    eps_schedule: tuple
    method: np.ndarray = field(default_factory=lambda: np.array([], dtype="<U5"))

    @property
    def edges(self) -> np.ndarray:
        return np.concatenate([self.t_lo[:1], self.t_hi])

    def to_measure(self, interp: str = "flat") -> StieltjesMeasure:
        return StieltjesMeasure.from_steps(self.edges, self.mass, signed=bool(np.any(self.mass < 0)),
                                           interp=interp)

    def density(self) -> np.ndarray:
        return self.mass / (self.t_hi - self.t_lo)

    def rows(self):
        for row in zip(self.t_lo, self.t_hi, self.mass, self.residual):
            yield tuple(float(v) for v in row)

    def to_csv(self) -> str:
        lines = ["t_lo,t_hi,mass,residual"]
        lines += [",".join(f"{v:.17g}" for v in r) for r in self.rows()]
        return "\n".join(lines) + "\n"


def extract_measure(model, side: str, t_grid, eps_schedule: Sequence[float] = DEFAULT_EPS,
                    tol: float = 1e-7, on_residual: str = "raise",
                    endpoint_guard: float | None = None) -> ExtractedMeasure:
    """Cell masses (1/pi) int_cell Im psi(-/+(it + eps)) dt, extrapolated to eps = 0.

    Two-point Richardson in eps uses the two smallest values of the schedule.
    The residual estimates its error from the gap to the extrapolation built
    on the two largest values (both err by ~c2 eps_i eps_j).
    Cells closer to the cut endpoint than ``endpoint_guard`` (default
    100 * max(eps)) are integrated along an arc instead, because the
    expansion in eps breaks down once eps is comparable to that distance.
    """
    _check_side(side)
    st_ = model.sinh_type()
    if st_.cone_C.full:
        raise DomainError("extraction needs a model analytic off the imaginary axis only")
    eps = tuple(sorted(eps_schedule, reverse=True))
    if len(eps) < 2:
        raise ValueError("need at least two eps values")
    grid = np.asarray(t_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError("t_grid must be increasing")
    edge = _cut_edge(model, side)
    if grid[0] < edge - 1e-15:
        raise DomainError(f"t_grid must start at or above the cut endpoint {edge}")
    guard = 100.0 * eps[0] if endpoint_guard is None else endpoint_guard
    n = grid.size - 1
    mass = np.empty(n)
    resid = np.zeros(n)
    method = np.empty(n, dtype="<U5")
    for k in range(n):
        u, v = grid[k], grid[k + 1]
        if u - edge < guard:
            mass[k] = _cell_arc(model, side, max(u, edge), v, 1e-12)
            method[k] = "arc"
            continue
        vals = [_cell_eps(model, side, u, v, e, 1e-13) for e in eps]
        r = [(vals[i + 1] * eps[i] - vals[i] * eps[i + 1]) / (eps[i] - eps[i + 1])
             for i in range(len(vals) - 1)]
        mass[k] = r[-1]
        if len(r) > 1:
            # both extrapolants err by ~c2 * eps_i * eps_{i+1}; scale the gap to the last one
            resid[k] = abs(r[-1] - r[-2]) * eps[-1] / (eps[-3] - eps[-1])
        else:
            resid[k] = abs(vals[-1] - vals[-2])
        method[k] = "eps"
    out = ExtractedMeasure(side, grid[:-1].copy(), grid[1:].copy(), mass, resid, eps, method)
    scale = np.maximum(np.abs(mass), 1e-300)
    bad = resid > 10 * tol * np.maximum(scale, 1.0)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        msg = (f"eps extrapolation residual {resid[k]:.3g} on cell ({grid[k]:.6g}, {grid[k + 1]:.6g}] "
               f"exceeds 10x tolerance")
        if on_residual == "raise":
            raise NonConvergence(msg)
        log.warning(msg)
    return out


def default_grid(model, side: str, t_max: float = 1e8, ratio: float = 1.15, first: float = 1e-6):
    """Geometric cell edges from the cut endpoint outwards."""
    edge = _cut_edge(model, side)
    offs = [0.0]
    h = first
    while offs[-1] < t_max:
        offs.append(offs[-1] + h)
        h = max(h, offs[-1] * (ratio - 1.0))
    return edge + np.array(offs)


def decomposition_from_model(model, t_max: float = 1e8, ratio: float = 1.15,
                             tol: float = 1e-8) -> SLDecomposition:
    """Fully compensated SL decomposition (a2 = 1 on both sides) built from extracted measures.

    psi = xi^2 ST(G/t^2)(-i xi) + ... - i m xi where m = E X_1; the mean is read
    off psi by a central difference at 0.
    """
    s = model.strip()
    parts = {}
    for side, edge in (("+", s.mu_minus), ("-", s.mu_plus)):
        if math.isinf(edge):
            parts[side] = None
            continue
        ex = extract_measure(model, side, default_grid(model, side, t_max, ratio), tol=tol,
                             on_residual="report")
        parts[side] = ex.to_measure("cubic").scaled(-2.0)
    h = 1e-5
    dpsi = (complex(model.psi(h)) - complex(model.psi(-h))) / (2 * h)
    mean = (1j * dpsi).real
    return SLDecomposition(sigma2=getattr(model, "sigma2", 0.0), mu=mean,
                           a2_plus=1.0 if parts["+"] is not None else 0.0,
                           a2_minus=1.0 if parts["-"] is not None else 0.0,
                           G0_plus=parts["+"], G0_minus=parts["-"])


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass
class SLVerdict:
    kind: str  # "SL" | "sSL" | "Indeterminate"
    evidence: dict = field(default_factory=dict)

    def __str__(self):
        return self.kind


def _scan_side(model, side: str, grid: np.ndarray, tol: float) -> tuple[float, float]:
    """Minimum of (1/pi) Im psi on the cut bank, on the grid and on a refined grid."""
    # eps tiny relative to t keeps the O(eps) drift and diffusion leaks below tol
    def bmin(tt):
        v = im_psi_boundary(model, tt, side, 1e-11) / math.pi
        return float(np.min(v)), tt[int(np.argmin(v))]
    m1, at1 = bmin(grid)
    fine = np.sort(np.concatenate([grid, 0.5 * (grid[1:] + grid[:-1])]))
    m2, at2 = bmin(fine)
    return min(m1, m2), (at1 if m1 <= m2 else at2)


def verify_sl(model, scan_grid=None, tol: float = 1e-8) -> SLVerdict:
    """Classify a model as SL, sSL or Indeterminate from boundary values of psi."""
    st_ = model.sinh_type()
    s = model.strip()
    ev: dict = {}
    if st_.cone_C.full:
        if getattr(model, "family", "") == "BM":
            ev["reason"] = "no jump component"
            return SLVerdict("SL", ev)
        ev["reason"] = "exponent is entire; no cut to read a measure from"
        return SLVerdict("Indeterminate", ev)
    if math.isinf(s.mu_minus) and math.isinf(s.mu_plus):
        jump = complex(model.psi0(1.0)) - 0.5 * getattr(model, "sigma2", 0.0)
        if abs(jump) > 0:
            ev["reason"] = "jumps present but the exponent has no cut"
            return SLVerdict("Indeterminate", ev)
    negatives = {}
    for side, edge in (("+", -s.mu_minus), ("-", s.mu_plus)):
        if math.isinf(edge):
            continue
        if scan_grid is None:
            grid = edge + np.geomspace(1e-6, 1e4, 4000) * max(1.0, edge)
        else:
            grid = edge + np.asarray(scan_grid, dtype=float)
        m, at = _scan_side(model, side, grid, tol)
        ev[f"min_{side}"] = m
        ev[f"argmin_{side}"] = float(at)
        if m < -tol:
            negatives[side] = grid
    if not negatives:
        return SLVerdict("SL", ev)
    xs = np.geomspace(1e-3, 1e3, 61)
    for side, grid in negatives.items():
        edge = _cut_edge(model, side)
        ex = extract_measure(model, side, default_grid(model, side, 1e6, 1.1), on_residual="report")
        G = ex.to_measure()
        lt = np.array([density_from_measure(G, x if side == "+" else -x, side) for x in xs])
        ev[f"laplace_min_{side}"] = float(lt.min())
        if lt.min() < 0:
            return SLVerdict("Indeterminate", ev)
    return SLVerdict("sSL", ev)


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------

def density_oracle_contour(model, x: float, eps: float = 1e-12) -> float:
    """Levy density f(x) = -(1/2pi) int e^{-ix xi} psi(xi) dxi over a sinh contour.

    Wings go down for x > 0 and up for x < 0; the contour crosses the
    imaginary axis inside the strip.
    """
    from .sinhq import Descriptor, integrate as sinh_integrate

    if x == 0:
        raise DomainError("x = 0 is excluded")
    if getattr(model, "sigma2", 0.0) > 0:
        raise DomainError("the contour representation needs sigma2 = 0")
    try:
        order = model.sinh_type().order
    except Unsupported:
        # bounded exponent (finite activity without diffusion)
        order = (ZERO_PLUS, ZERO_PLUS)
    hi = order[1]
    if hi.kind == "num" and hi.value >= 2:
        raise DomainError("needs a jump part of order < 2")
    s = model.strip()
    k = hi.exponent if hi.kind != "0+" else 0.0
    desc = Descriptor(strip=(s.mu_minus, s.mu_plus), cone_C=(-HALF_PI, HALF_PI),
                      x=float(x), t=0.0, order=order, c_inf=None, eps=eps,
                      extra_decay=-k)
    f = lambda xi: np.exp(-1j * x * xi) * np.asarray(model.psi(xi))
    val, *_ = sinh_integrate(f, desc)
    return -val.real


def _gh_I(lam: float, rho: float, tol: float = 1e-13) -> complex:
    """I_lambda(rho, pi/2 - 0): K_lambda(i rho) = e^{-i rho} I_lambda."""
    if lam == 1.0:
        def f(u):
            return -1j * np.exp(-rho * u) * (u + 1j) / np.sqrt(u * u + 2j * u)
    else:
        def f(u):
            s = np.sqrt(u * u + 2j * u)
            w = u + 1j + s
            return np.exp(-rho * u) * (np.exp(-0.5j * lam * math.pi) * w**lam
                                       + np.exp(0.5j * lam * math.pi) * w**(-lam)) / (2 * s)
    # sqrt singularity at 0 and exponential scale 1/rho
    cut = min(1.0, 1.0 / rho)
    return (_quad_c(f, 0.0, cut, epsrel=tol, epsabs=0.0)
            + _quad_c(f, cut, np.inf, epsrel=tol, epsabs=0.0))


def gh_sl_density(params, t, side: str = "-") -> np.ndarray:
    """Density of the SL measure of a generalized hyperbolic law.

    Uses K_lambda(i rho) = e^{-i rho} I_lambda(rho) with I_lambda given by a
    real-line integral.  The boundary value of psi on the cut is
    lambda pi/2 + rho - arg I_lambda(rho), where arg is continued from its
    large-rho limit -pi/4.  Side '-' (upper cut) needs t > alpha + beta with
    rho = delta sqrt((t - beta)^2 - alpha^2); side '+' needs t > alpha - beta
    with rho = delta sqrt((t + beta)^2 - alpha^2).
    """
    _check_side(side)
    a, b, dl, lam = (float(params.alpha), float(params.beta), float(params.delta),
                     float(params.lam))
    if not dl > 0:
        raise DomainError("delta must be positive")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    sb = b if side == "-" else -b
    if np.any(t <= a + sb):
        raise DomainError(f"side {side} needs t > {a + sb}")
    rho = dl * np.sqrt((t - sb) ** 2 - a * a)
    out = np.empty_like(t)
    for i, r in enumerate(rho):
        out[i] = (lam * HALF_PI + r - _continued_arg(lam, r)) / math.pi
    return out


def _continued_arg(lam: float, rho: float) -> float:
    """arg I_lambda(rho), continued along rho from +inf (limit -pi/4)."""
    # track the phase from a large rho down to rho in log steps
    r_hi = max(60.0, 4.0 * rho)
    ref = -0.25 * math.pi
    a_prev = float(np.angle(_gh_I(lam, r_hi)))
    a_prev += 2 * math.pi * round((ref - a_prev) / (2 * math.pi))
    if rho >= r_hi:
        return a_prev
    for r in np.geomspace(r_hi, rho, 40)[1:]:
        a = float(np.angle(_gh_I(lam, float(r))))
        a += 2 * math.pi * round((a_prev - a) / (2 * math.pi))
        a_prev = a
    return a_prev


# ---------------------------------------------------------------------------
# order from measure bounds
# ---------------------------------------------------------------------------

def order_from_bounds(alpha: float, variant: str):
    """SINH order of a one-sided SL exponent whose measure behaves like t^alpha per unit length.

    Returns (lower, upper, cone description).
    """
    if variant not in ("a1", "a2"):
        raise ValueError("variant must be 'a1' or 'a2'")
    if not -1.0 <= alpha < 0.0:
        raise DomainError("alpha must lie in [-1, 0)")
    if variant == "a2":
        if alpha > -1.0:
            nu = ExtOrder.numeric(alpha + 2.0)
            return nu, nu, {"cone": "interior cone containing R\\0", "cone_Cplus": (-HALF_PI, HALF_PI)}
        return (ExtOrder.numeric(1.0), ONE_PLUS,
                {"cone": "adjacent to R; for psi_+ in the upper half-plane",
                 "cone_Cplus": (0.0, HALF_PI)})
    if alpha > -1.0:
        nu = ExtOrder.numeric(alpha + 1.0)
        return nu, nu, {"cone": "interior cone containing R\\0", "cone_Cplus": (-HALF_PI, HALF_PI)}
    return ZERO_PLUS, ZERO_PLUS, {"cone": "C\\iR", "cone_Cplus": (-HALF_PI, HALF_PI)}
