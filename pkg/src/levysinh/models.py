"""Catalog of Levy characteristic exponents with SINH-regularity metadata.

Convention: E[exp(i xi X_t)] = exp(-t psi(xi)) with psi(xi) = -i mu xi + psi0(xi).
Every exponent is evaluated as an analytic continuation whose branch cuts
lie on i(-inf, mu_-] and i[mu_+, +inf).  All evaluators accept numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Optional

import numpy as np
from scipy.special import gamma as _gamma_real

from .errors import DomainError, ParameterError, Unsupported
from .metadata import (HALF_PI, ONE_PLUS, ZERO_PLUS, AngleCone, ExtOrder, SinhType, Strip,
                       cone_from_coefficient)
from .special import beta_fn, log_bessel_k

__all__ = [
    "LevyModel", "BM", "Merton", "HEJD", "VG", "NTS", "NIG", "Meixner", "KoBoL", "CGMY",
    "Beta", "Meromorphic", "GenHyperbolic", "psi0", "psi", "sinh_type", "c_inf", "c_log",
    "validate", "model_from_dict", "model_to_dict", "FAMILIES",
]

_TOL = 1e-14


def _as_complex(xi):
    return np.asarray(xi, dtype=complex)


def _xlogx(z):
    """z ln z with 0 ln 0 = 0 (principal branch)."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    nz = z != 0
    out[nz] = z[nz] * np.log(z[nz])
    return out


def _cpow(z, p):
    """Principal z**p with 0**p = 0 for p > 0."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    nz = z != 0
    out[nz] = np.exp(p * np.log(z[nz]))
    return out


class LevyModel:
    """Base class: immutable parameter record plus evaluable exponent."""

    family: str = "abstract"
    mu: float = 0.0
    sigma2: float = 0.0

    # --- to be provided by families -------------------------------------
    def _psi0(self, xi: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _validate(self) -> list:
        return []

    def strip(self) -> Strip:
        raise NotImplementedError

    def sinh_type(self) -> SinhType:
        raise NotImplementedError

    def levy_density(self, x):
        """Levy density where it is known in closed form, else None."""
        return None

    # --- common machinery -----------------------------------------------
    def validate(self) -> list:
        return self._validate()

    def check(self):
        diags = self.validate()
        if diags:
            raise ParameterError(f"{self.family}: " + "; ".join(diags))
        return self

    def _check_domain(self, xi: np.ndarray):
        s = self.strip()
        on_axis = xi.real == 0
        if not on_axis.any():
            return
        im = xi.imag[on_axis]
        if np.any(im <= s.mu_minus) or np.any(im >= s.mu_plus):
            raise DomainError(f"{self.family}: argument on a branch cut "
                              f"(strip {s.mu_minus, s.mu_plus})")

    def psi0(self, xi):
        xi = _as_complex(xi)
        scalar = xi.ndim == 0
        xi = np.atleast_1d(xi)
        self._check_domain(xi)
        out = np.asarray(self._psi0(xi), dtype=complex)
        out = np.where(xi == 0, 0.0 + 0.0j, out)
        return out[0] if scalar else out

    def psi(self, xi):
        xi = _as_complex(xi)
        return -1j * self.mu * xi + self.psi0(xi)

    def c_inf(self, phi: float) -> complex:
        """Coefficient of rho**nu in psi0(rho e^{i phi}), mirrored to the left half-plane."""
        if abs(phi) > HALF_PI:
            ref = math.copysign(math.pi, phi) - phi
            return complex(np.conj(self.c_inf(ref)))
        st = self.sinh_type()
        if st.c_inf is None:
            raise Unsupported(f"{self.family}: order {st.order[1]} has no c_inf (use c_log)")
        return complex(st.c_inf(phi))

    def c_log(self) -> float:
        st = self.sinh_type()
        if st.c_log is None:
            raise Unsupported(f"{self.family}: not of order 0+")
        return st.c_log

    def to_dict(self) -> dict:
        d = {"family": self.family}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = [list(a) if isinstance(a, tuple) else a for a in v]
            d[f.name] = v
        return d


# module-level functional API ------------------------------------------------

def psi0(model: LevyModel, xi):
    return model.psi0(xi)


def psi(model: LevyModel, xi):
    return model.psi(xi)


def sinh_type(model: LevyModel) -> SinhType:
    model.check()
    return model.sinh_type()


def c_inf(model: LevyModel, phi: float) -> complex:
    return model.c_inf(phi)


def c_log(model: LevyModel) -> float:
    return model.c_log()


def validate(model: LevyModel) -> list:
    return model.validate()


def _bm_cinf(sigma2):
    return lambda phi: 0.5 * sigma2 * complex(math.cos(2 * phi), math.sin(2 * phi))


def _gauss_type(strip: Strip, sigma2: float, cone_C: AngleCone) -> SinhType:
    return SinhType(strip, cone_C, AngleCone(-math.pi / 4, math.pi / 4),
                    (ExtOrder.numeric(2), ExtOrder.numeric(2)), _bm_cinf(sigma2))


# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class BM(LevyModel):
    sigma2: float = 1.0
    mu: float = 0.0
    family = "BM"

    def _validate(self):
        return [] if self.sigma2 >= 0 else ["sigma2 >= 0"]

    def _psi0(self, xi):
        return 0.5 * self.sigma2 * xi * xi

    def strip(self):
        return Strip(-math.inf, math.inf)

    def sinh_type(self):
        if self.sigma2 == 0:
            raise Unsupported("pure drift has no growth order")
        return _gauss_type(self.strip(), self.sigma2, AngleCone.whole_plane())


@dataclass(frozen=True)
class Merton(LevyModel):
    sigma2: float = 0.04
    mu: float = 0.0
    lam: float = 1.0
    m: float = 0.0
    s: float = 0.1
    family = "Merton"

    def _validate(self):
        out = []
        if self.sigma2 < 0:
            out.append("sigma2 >= 0")
        if not self.lam > 0:
            out.append("lam > 0")
        if not self.s > 0:
            out.append("s > 0")
        return out

    def _psi0(self, xi):
        return 0.5 * self.sigma2 * xi * xi + self.lam * (
            1.0 - np.exp(1j * self.m * xi - 0.5 * self.s**2 * xi * xi))

    def strip(self):
        return Strip(-math.inf, math.inf)

    def sinh_type(self):
        if self.sigma2 == 0:
            raise Unsupported("Merton without diffusion is not SINH-regular")
        c = AngleCone(-math.pi / 4, math.pi / 4)
        return SinhType(self.strip(), c, c, (ExtOrder.numeric(2), ExtOrder.numeric(2)),
                        _bm_cinf(self.sigma2))

    def levy_density(self, x):
        x = np.asarray(x, dtype=float)
        return self.lam * np.exp(-0.5 * ((x - self.m) / self.s) ** 2) / (self.s * math.sqrt(2 * math.pi))


def _atoms(v) -> tuple:
    return tuple((float(p), float(a)) for p, a in v)


@dataclass(frozen=True)
class HEJD(LevyModel):
    """Hyper-exponential jump diffusion; negative weights give MEJD."""

    sigma2: float = 0.04
    mu: float = 0.0
    pos: tuple = ((1.0, 10.0),)
    neg: tuple = ((1.0, 10.0),)
    family = "HEJD"

    def __post_init__(self):
        object.__setattr__(self, "pos", _atoms(self.pos))
        object.__setattr__(self, "neg", _atoms(self.neg))

    def _validate(self):
        out = []
        if self.sigma2 < 0:
            out.append("sigma2 >= 0")
        for side, atoms in (("+", self.pos), ("-", self.neg)):
            if any(a <= 0 for _, a in atoms):
                out.append(f"alpha^{side}_j > 0")
            if len({a for _, a in atoms}) != len(atoms):
                out.append(f"alpha^{side}_j distinct")
            srt = sorted(atoms, key=lambda pa: pa[1])
            if srt and any(p < 0 for p, _ in srt):
                if srt[0][0] <= 0:
                    out.append(f"p^{side}_1 > 0")
                partial = np.cumsum([p * a for p, a in srt])
                if np.any(partial < -_TOL):
                    out.append(f"partial sums of p^{side}_j alpha^{side}_j >= 0")
        return out

    def _psi0(self, xi):
        out = 0.5 * self.sigma2 * xi * xi
        for p, a in self.pos:
            out = out + p * (-1j * xi) / (a - 1j * xi)
        for p, a in self.neg:
            out = out + p * (1j * xi) / (a + 1j * xi)
        return out

    def strip(self):
        mm = -min((a for _, a in self.pos), default=math.inf)
        mp = min((a for _, a in self.neg), default=math.inf)
        return Strip(mm, mp)

    def _check_domain(self, xi):
        # meromorphic: only the poles are excluded
        poles = [-1j * a for _, a in self.pos] + [1j * a for _, a in self.neg]
        for pl in poles:
            if np.any(xi == pl):
                raise DomainError(f"{self.family}: pole at {pl}")

    def sinh_type(self):
        if self.sigma2 == 0:
            raise Unsupported(f"{self.family} without diffusion is bounded on rays")
        return _gauss_type(self.strip(), self.sigma2, AngleCone.off_axis())

    def levy_density(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        xp = np.where(x > 0, x, 0.0)
        xn = np.where(x < 0, -x, 0.0)
        for p, a in self.pos:
            out = out + np.where(x > 0, p * a * np.exp(-a * xp), 0.0)
        for p, a in self.neg:
            out = out + np.where(x < 0, p * a * np.exp(-a * xn), 0.0)
        return out

    def poles(self):
        return [-a for _, a in self.pos] + [a for _, a in self.neg]


@dataclass(frozen=True)
class VG(LevyModel):
    c: float = 1.0
    alpha: float = 2.0
    beta: float = 0.0
    mu: float = 0.0
    family = "VG"

    def _validate(self):
        out = []
        if not self.c > 0:
            out.append("c > 0")
        if not self.alpha > abs(self.beta):
            out.append("alpha > |beta|")
        return out

    def _psi0(self, xi):
        a, b = self.alpha, self.beta
        return self.c * (np.log(a - b - 1j * xi) + np.log(a + b + 1j * xi) - math.log(a * a - b * b))

    def strip(self):
        return Strip(-self.alpha + self.beta, self.alpha + self.beta)

    def sinh_type(self):
        c = AngleCone.off_axis()
        return SinhType(self.strip(), c, c, (ZERO_PLUS, ZERO_PLUS), None, c_log=2 * self.c)

    def levy_density(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        rate = np.where(x > 0, self.alpha - self.beta, self.alpha + self.beta)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(x != 0, self.c * np.exp(-rate * ax) / ax, np.inf)


@dataclass(frozen=True)
class NTS(LevyModel):
    """Normal tempered stable; nu = 1 is NIG."""

    delta: float = 1.0
    nu: float = 1.0
    alpha: float = 2.0
    beta: float = 0.0
    mu: float = 0.0
    family = "NTS"

    def _validate(self):
        out = []
        if not self.delta > 0:
            out.append("delta > 0")
        if not 0 < self.nu < 2:
            out.append("nu in (0, 2)")
        if not self.alpha > abs(self.beta):
            out.append("alpha > |beta|")
        return out

    def _psi0(self, xi):
        a, b, h = self.alpha, self.beta, 0.5 * self.nu
        return self.delta * (np.exp(h * np.log(a - b - 1j * xi) + h * np.log(a + b + 1j * xi))
                             - (a * a - b * b) ** h)

    def strip(self):
        return Strip(-self.alpha + self.beta, self.alpha + self.beta)

    def sinh_type(self):
        nu, dl = self.nu, self.delta
        g = min(1.0, 1.0 / nu) * HALF_PI
        return SinhType(self.strip(), AngleCone.off_axis(), AngleCone(-g, g),
                        (ExtOrder.numeric(nu), ExtOrder.numeric(nu)),
                        lambda phi: dl * complex(math.cos(nu * phi), math.sin(nu * phi)))

    def levy_density(self, x):
        if self.nu != 1:
            return None
        from scipy.special import k1
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.delta * self.alpha / math.pi * np.exp(self.beta * x) * k1(self.alpha * ax) / ax

    @property
    def mean_jump_drift(self) -> float:
        """E[X_1] of the drift-free process (finite for every admissible parameter set)."""
        a, b, h = self.alpha, self.beta, 0.5 * self.nu
        return self.delta * self.nu * b * (a * a - b * b) ** (h - 1)


def NIG(delta=1.0, alpha=2.0, beta=0.0, mu=0.0) -> NTS:
    return NTS(delta=delta, nu=1.0, alpha=alpha, beta=beta, mu=mu)


def _lncosh(z):
    """Analytic ln cosh off the imaginary-axis cuts: z + ln(1+e^{-2z}) - ln 2 for Re z >= 0, mirrored."""
    z = np.asarray(z, dtype=complex)
    w = np.where(z.real >= 0, z, -z)
    return w + np.log1p(np.exp(-2 * w)) - math.log(2.0)


@dataclass(frozen=True)
class Meixner(LevyModel):
    delta: float = 1.0
    a: float = 1.0
    b: float = 0.0
    mu: float = 0.0
    family = "Meixner"

    def _validate(self):
        out = []
        if not self.delta > 0:
            out.append("delta > 0")
        if not self.a > 0:
            out.append("a > 0")
        if not -math.pi < self.b < math.pi:
            out.append("b in (-pi, pi)")
        return out

    def _psi0(self, xi):
        z = 0.5 * (self.a * xi - 1j * self.b)
        return 2 * self.delta * (_lncosh(z) - math.log(math.cos(0.5 * self.b)))

    def strip(self):
        return Strip((-math.pi + self.b) / self.a, (math.pi + self.b) / self.a)

    def sinh_type(self):
        c = AngleCone.off_axis()
        k = self.a * self.delta
        return SinhType(self.strip(), c, c, (ExtOrder.numeric(1), ExtOrder.numeric(1)),
                        lambda phi: k * complex(math.cos(phi), math.sin(phi)))

    def levy_density(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self.delta * np.exp(self.b * x / self.a) / (x * np.sinh(math.pi * x / self.a))


@dataclass(frozen=True)
class KoBoL(LevyModel):
    """Two-sided tempered stable with possibly different indices; nu in {0, 1} use the special forms."""

    nu_plus: float = 0.5
    nu_minus: float = 0.5
    c_plus: float = 1.0
    c_minus: float = 1.0
    lam_minus: float = -4.0
    lam_plus: float = 8.0
    mu: float = 0.0
    sigma2: float = 0.0
    family = "KoBoL"

    def _validate(self):
        out = []
        for name in ("nu_plus", "nu_minus"):
            if not 0 <= getattr(self, name) < 2:
                out.append(f"{name} in [0, 2)")
        if self.c_plus < 0 or self.c_minus < 0:
            out.append("c_plus, c_minus >= 0")
        if self.c_plus == 0 and self.c_minus == 0:
            out.append("at least one of c_plus, c_minus > 0")
        if not (self.lam_minus <= 0 <= self.lam_plus):
            out.append("lam_minus <= 0 <= lam_plus")
        if self.lam_minus == 0 and self.lam_plus == 0:
            out.append("strip degenerates; stable case unsupported")
        elif not self.lam_minus < self.lam_plus:
            out.append("lam_minus < lam_plus")
        if self.c_plus > 0 and self.nu_plus == 0 and self.lam_minus == 0:
            out.append("nu_plus = 0 requires lam_minus < 0")
        if self.c_minus > 0 and self.nu_minus == 0 and self.lam_plus == 0:
            out.append("nu_minus = 0 requires lam_plus > 0")
        if self.sigma2 < 0:
            out.append("sigma2 >= 0")
        return out

    @staticmethod
    def _side(c, nu, lam, w):
        """Contribution c * [lam^nu-type(0) - (w)] for the shifted argument w = lam + (-/+) i xi."""
        if c == 0:
            return 0.0
        if nu == 0:
            return c * (np.log(w) - math.log(lam))
        if nu == 1:
            return c * (_xlogx(lam) - _xlogx(w))
        return c * _gamma_real(-nu) * (_cpow(lam, nu) - _cpow(w, nu))

    def _psi0(self, xi):
        lm, lp = -self.lam_minus, self.lam_plus
        out = self._side(self.c_plus, self.nu_plus, lm, lm - 1j * xi)
        out = out + self._side(self.c_minus, self.nu_minus, lp, lp + 1j * xi)
        return 0.5 * self.sigma2 * xi * xi + out

    def strip(self):
        mm = self.lam_minus if self.c_plus > 0 else -math.inf
        mp = self.lam_plus if self.c_minus > 0 else math.inf
        return Strip(mm, mp)

    def _coeff(self, side: str):
        """(A, kappa) with c_side(phi) = A e^{i kappa phi} for a numeric-order side."""
        if side == "+":
            c, nu, s = self.c_plus, self.nu_plus, -1.0
        else:
            c, nu, s = self.c_minus, self.nu_minus, 1.0
        return -c * _gamma_real(-nu) * complex(math.cos(s * HALF_PI * nu), math.sin(s * HALF_PI * nu)), nu

    def sinh_type(self):
        strip = self.strip()
        sides = []
        if self.c_plus > 0:
            sides.append(("+", self.nu_plus))
        if self.c_minus > 0:
            sides.append(("-", self.nu_minus))
        one_sided = len(sides) == 1
        if self.sigma2 > 0:
            C = AngleCone.off_axis()
            return _gauss_type(strip, self.sigma2, C)
        if one_sided:
            C = AngleCone(-HALF_PI, HALF_PI,
                          label="C\\i(-inf,0]" if sides[0][0] == "+" else "C\\i[0,inf)")
        else:
            C = AngleCone.off_axis()
        top = max(nu for _, nu in sides)

        def _order_class(nu):
            return {0.0: 0, 1.0: 1}.get(nu, 2)

        if top == 0:
            c = self.c_plus + self.c_minus
            return SinhType(strip, C, C, (ZERO_PLUS, ZERO_PLUS), None, c_log=c)
        if top == 1:
            cp = self.c_plus if self.nu_plus == 1 else 0.0
            cm = self.c_minus if self.nu_minus == 1 else 0.0
            if cp == cm:
                k = cp * math.pi  # e^{i phi} rho (c_+ + c_-) pi / 2
                return SinhType(strip, C, AngleCone.off_axis(),
                                (ExtOrder.numeric(1), ExtOrder.numeric(1)),
                                lambda phi: k * complex(math.cos(phi), math.sin(phi)))
            diff = cp - cm
            cone = AngleCone(-HALF_PI, 0.0) if diff > 0 else AngleCone(0.0, HALF_PI)
            return SinhType(strip, C, cone, (ONE_PLUS, ONE_PLUS),
                            lambda phi: diff * 1j * complex(math.cos(phi), math.sin(phi)))
        # numeric order > 0, not 1: dominant side(s)
        A = 0j
        for s, nu in sides:
            if nu == top:
                a, _ = self._coeff(s)
                A += a
        cone = cone_from_coefficient(A, top)
        return SinhType(strip, C, cone, (ExtOrder.numeric(top), ExtOrder.numeric(top)),
                        lambda phi: A * complex(math.cos(top * phi), math.sin(top * phi)))

    def levy_density(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            fp = self.c_plus * np.exp(self.lam_minus * ax) * ax ** (-self.nu_plus - 1)
            fm = self.c_minus * np.exp(-self.lam_plus * ax) * ax ** (-self.nu_minus - 1)
        return np.where(x > 0, fp, np.where(x < 0, fm, np.inf))


def CGMY(c=1.0, nu=0.5, lam_minus=-4.0, lam_plus=8.0, mu=0.0, sigma2=0.0) -> KoBoL:
    return KoBoL(nu_plus=nu, nu_minus=nu, c_plus=c, c_minus=c, lam_minus=lam_minus,
                 lam_plus=lam_plus, mu=mu, sigma2=sigma2)


@dataclass(frozen=True)
class Beta(LevyModel):
    """Beta class: positive jumps (c1, alpha1, beta1, gamma1), negative jumps (c2, ...)."""

    sigma2: float = 0.0
    mu: float = 0.0
    c1: float = 1.0
    alpha1: float = 1.0
    beta1: float = 1.0
    gamma1: float = 1.5
    c2: float = 1.0
    alpha2: float = 1.0
    beta2: float = 1.0
    gamma2: float = 1.5
    family = "Beta"

    def _validate(self):
        out = []
        if self.sigma2 < 0:
            out.append("sigma2 >= 0")
        for j in (1, 2):
            c, a, b, g = (getattr(self, f"{n}{j}") for n in ("c", "alpha", "beta", "gamma"))
            if c < 0:
                out.append(f"c{j} >= 0")
            if not (a > 0 and b > 0):
                out.append(f"alpha{j}, beta{j} > 0")
            if not (0 < g < 3) or g in (1.0, 2.0):
                out.append(f"gamma{j} in (0,3) minus {{1,2}}")
        if self.c1 == 0 and self.c2 == 0:
            out.append("c1 + c2 > 0")
        return out

    def _psi0(self, xi):
        out = 0.5 * self.sigma2 * xi * xi
        if self.c1 > 0:
            y = 1 - self.gamma1
            out = out + self.c1 / self.beta1 * (beta_fn(self.alpha1, y)
                                               - beta_fn(self.alpha1 - 1j * xi / self.beta1, y))
        if self.c2 > 0:
            y = 1 - self.gamma2
            out = out + self.c2 / self.beta2 * (beta_fn(self.alpha2, y)
                                               - beta_fn(self.alpha2 + 1j * xi / self.beta2, y))
        return out

    def strip(self):
        mm = -self.alpha1 * self.beta1 if self.c1 > 0 else -math.inf
        mp = self.alpha2 * self.beta2 if self.c2 > 0 else math.inf
        return Strip(mm, mp)

    def _check_domain(self, xi):
        on = xi.real == 0
        if not on.any():
            return
        y = xi.imag[on]
        if self.c1 > 0:
            n = -y / self.beta1 - self.alpha1  # pole where alpha1 + y/beta1 = -n
            if np.any((n >= 0) & (np.abs(n - np.round(n)) < 1e-15)):
                raise DomainError("Beta: pole")
        if self.c2 > 0:
            n = y / self.beta2 - self.alpha2
            if np.any((n >= 0) & (np.abs(n - np.round(n)) < 1e-15)):
                raise DomainError("Beta: pole")

    def poles(self, n: int = 50):
        lo = [-self.beta1 * (self.alpha1 + k) for k in range(n)] if self.c1 > 0 else []
        hi = [self.beta2 * (self.alpha2 + k) for k in range(n)] if self.c2 > 0 else []
        return lo + hi

    def sinh_type(self):
        strip = self.strip()
        C = AngleCone.off_axis()
        if self.sigma2 > 0:
            return _gauss_type(strip, self.sigma2, C)
        # B(a + z, 1 - g) ~ Gamma(1 - g) z^{g-1}, z = -/+ i xi / beta_j
        terms = []
        if self.c1 > 0 and self.gamma1 > 1:
            k = self.gamma1 - 1
            terms.append((k, -self.c1 * self.beta1 ** (-self.gamma1) * _gamma_real(1 - self.gamma1)
                          * complex(math.cos(-HALF_PI * k), math.sin(-HALF_PI * k))))
        if self.c2 > 0 and self.gamma2 > 1:
            k = self.gamma2 - 1
            terms.append((k, -self.c2 * self.beta2 ** (-self.gamma2) * _gamma_real(1 - self.gamma2)
                          * complex(math.cos(HALF_PI * k), math.sin(HALF_PI * k))))
        if not terms:
            raise Unsupported("Beta model with sigma2 = 0 and gamma_j < 1 is compound Poisson")
        top = max(k for k, _ in terms)
        A = sum(a for k, a in terms if k == top)
        cone = cone_from_coefficient(A, top)
        return SinhType(strip, C, cone, (ExtOrder.numeric(top), ExtOrder.numeric(top)),
                        lambda phi: A * complex(math.cos(top * phi), math.sin(top * phi)))

    def levy_density(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            fp = self.c1 * np.exp(-self.alpha1 * self.beta1 * ax) / (-np.expm1(-self.beta1 * ax)) ** self.gamma1
            fm = self.c2 * np.exp(-self.alpha2 * self.beta2 * ax) / (-np.expm1(-self.beta2 * ax)) ** self.gamma2
        return np.where(x > 0, fp, np.where(x < 0, fm, np.inf))


@dataclass(frozen=True)
class Meromorphic(HEJD):
    """HEJD-type exponent with a long (truncated) atom sequence.

    ``tail_bound`` bounds |psi0_true - psi0_truncated| on the real line.
    ``pattern_alpha`` declares that the atoms follow unit-order spacing with
    weights ~ t_j**alpha (alpha in [-1, 0)), which fixes the order metadata.
    """

    tail_bound: float = 0.0
    pattern_alpha: Optional[float] = None
    family = "Meromorphic"

    @classmethod
    def from_pattern(cls, alpha: float, n_atoms: int = 200, t0: float = 2.0, spacing: float = 1.0,
                     weight: float = 1.0, sigma2: float = 0.0, mu: float = 0.0):
        """Symmetric atoms t_j = t0 + j*spacing with SL weights p_j = weight * t_j**alpha.

        In the HEJD form the atom (p, t) contributes p (-i xi)/(t - i xi).
        """
        ts = t0 + spacing * np.arange(n_atoms)
        ps = weight * ts**alpha
        atoms = tuple(zip(ps.tolist(), ts.tolist()))
        t_end = ts[-1] + spacing
        # tail of sum p_j |xi|/|t_j - i xi| <= |xi| * sum_{t>t_end} p_j / t_j
        tail = weight / spacing * t_end ** alpha / (-alpha) if alpha < 0 else math.inf
        return cls(sigma2=sigma2, mu=mu, pos=atoms, neg=atoms, tail_bound=tail, pattern_alpha=alpha)

    def _validate(self):
        out = super()._validate()
        if self.tail_bound < 0:
            out.append("tail_bound >= 0")
        if self.pattern_alpha is not None and not -1 <= self.pattern_alpha < 0:
            out.append("pattern_alpha in [-1, 0)")
        return out

    def sinh_type(self):
        if self.sigma2 > 0:
            return super().sinh_type()
        if self.pattern_alpha is None:
            raise Unsupported("order metadata needs a declared atom pattern")
        from .stieltjes import order_from_bounds
        lo, hi, _ = order_from_bounds(self.pattern_alpha, "a1")
        C = AngleCone.off_axis()
        if not hi.is_numeric:
            return SinhType(self.strip(), C, C, (lo, hi), None, c_log=2.0)
        k = hi.value
        # continuum approximation G0 ~ t^alpha dt on each side, ST(t^alpha)(z) = pi z^alpha / sin(pi(alpha+1))
        w = math.pi / math.sin(math.pi * k)
        A = w * (complex(math.cos(-HALF_PI * k), math.sin(-HALF_PI * k))
                 + complex(math.cos(HALF_PI * k), math.sin(HALF_PI * k)))
        cone = cone_from_coefficient(A, k)
        return SinhType(self.strip(), C, cone, (lo, hi),
                        lambda phi: A * complex(math.cos(k * phi), math.sin(k * phi)),
                        notes=("order declared from atom pattern",))


@dataclass(frozen=True)
class GenHyperbolic(LevyModel):
    """Generalized hyperbolic distribution exponent psi = -ln F (unit horizon)."""

    alpha: float = 2.0
    beta: float = 0.0
    delta: float = 1.0
    lam: float = 1.0
    mu: float = 0.0
    family = "GenHyperbolic"

    def _validate(self):
        out = []
        if not self.alpha > abs(self.beta):
            out.append("alpha > |beta|")
        if self.delta < 0:
            out.append("delta >= 0")
        if self.delta == 0 and not self.lam > 0:
            out.append("delta = 0 requires lam > 0")
        return out

    def _psi0(self, xi):
        a, b, dl, lam = self.alpha, self.beta, self.delta, self.lam
        l1 = np.log(a - b - 1j * xi)
        l2 = np.log(a + b + 1j * xi)
        lw = l1 + l2
        lw0 = math.log(a * a - b * b)
        out = -0.5 * lam * (lw0 - lw)
        if dl == 0:
            return out
        z = dl * np.exp(0.5 * lw)
        z0 = dl * math.sqrt(a * a - b * b)
        return out - log_bessel_k(lam, z) + log_bessel_k(lam, z0).real

    def strip(self):
        return Strip(-self.alpha + self.beta, self.alpha + self.beta)

    def sinh_type(self):
        C = AngleCone.off_axis()
        if self.delta == 0:
            return SinhType(self.strip(), C, C, (ZERO_PLUS, ZERO_PLUS), None, c_log=self.lam)
        dl = self.delta
        return SinhType(self.strip(), C, C, (ExtOrder.numeric(1), ExtOrder.numeric(1)),
                        lambda phi: dl * complex(math.cos(phi), math.sin(phi)))


FAMILIES = {cls.family: cls for cls in (BM, Merton, HEJD, VG, NTS, Meixner, KoBoL, Beta,
                                        Meromorphic, GenHyperbolic)}


def model_from_dict(d: dict) -> LevyModel:
    """Build a model from its JSON form; unknown fields are rejected."""
    d = dict(d)
    fam = d.pop("family", None)
    if fam is None:
        raise ParameterError("missing 'family'")
    if fam in ("esscher", "mixture", "subordinated"):
        from .construct import composite_from_dict
        return composite_from_dict(fam, d)
    aliases = {"NIG": (NTS, {"nu": 1.0}), "CGMY": (None, None)}
    if fam == "CGMY":
        allowed = {"c", "nu", "lam_minus", "lam_plus", "mu", "sigma2"}
        unknown = set(d) - allowed
        if unknown:
            raise ParameterError(f"unknown fields for CGMY: {sorted(unknown)}")
        return CGMY(**d).check()
    if fam in aliases:
        cls, extra = aliases[fam]
        if "nu" in d:
            raise ParameterError("NIG has nu = 1 fixed")
        d.update(extra)
    else:
        cls = FAMILIES.get(fam)
        if cls is None:
            raise ParameterError(f"unknown family {fam!r}")
    names = {f.name for f in fields(cls)}
    unknown = set(d) - names
    if unknown:
        raise ParameterError(f"unknown fields for {fam}: {sorted(unknown)}")
    return cls(**d).check()


def model_to_dict(model: LevyModel) -> dict:
    return model.to_dict()
