"""Model algebra: Esscher transforms, mixtures, subordination.

Composite models are ordinary LevyModel objects.  Each wrapper keeps an own
drift ``mu`` (default 0) on top of the full exponent of its parts, so
``dataclasses.replace(model, mu=...)`` works as for the base families.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize

from .errors import (DomainError, EmptyIntersection, ParameterError, SymmetryViolation, Unsupported,
                     ZeroCrossing)
from .metadata import HALF_PI, ONE_PLUS, ZERO_PLUS, AngleCone, ExtOrder, SinhType, Strip
from .models import LevyModel

log = logging.getLogger(__name__)

__all__ = ["Esscher", "Mixture", "Subordinated", "SubordinatorModel", "esscher", "mix",
           "subordinate", "bm_subordinand", "discrete_bm_subordinand", "composite_from_dict"]


def _scaled_cinf(c: Optional[Callable], factor: float) -> Optional[Callable]:
    if c is None:
        return None
    return lambda phi: factor * complex(c(phi))


def _cinf_full(st: SinhType, phi: float) -> complex:
    """c_inf with the left half-plane filled in by reflection."""
    if abs(phi) > HALF_PI:
        ref = math.copysign(math.pi, phi) - phi
        return complex(np.conj(st.c_inf(ref)))
    return complex(st.c_inf(phi))


# ---------------------------------------------------------------------------
# Esscher
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Esscher(LevyModel):
    """psi_alpha(xi) = psi(xi - i alpha) - psi(-i alpha) (+ own drift)."""

    base: LevyModel = None
    alpha: float = 0.0
    mu: float = 0.0
    sigma2: float = field(init=False, default=0.0)
    family = "esscher"

    def __post_init__(self):
        object.__setattr__(self, "sigma2", self.base.sigma2)

    def _validate(self):
        out = list(self.base.validate())
        s = self.base.strip()
        if not -s.mu_plus < self.alpha < -s.mu_minus:
            out.append(f"alpha must lie in ({-s.mu_plus}, {-s.mu_minus})")
        return out

    def _psi0(self, xi):
        a = self.alpha
        return np.asarray(self.base.psi(xi - 1j * a)) - complex(self.base.psi(-1j * a))

    def strip(self):
        s = self.base.strip()
        # psi(xi - i alpha) is finite iff Im xi - alpha lies in the base strip
        return Strip(s.mu_minus + self.alpha, s.mu_plus + self.alpha)

    def sinh_type(self):
        st = self.base.sinh_type()
        return SinhType(self.strip(), st.cone_C, st.cone_Cplus, st.order, st.c_inf, st.c_log,
                        st.notes + (f"esscher alpha={self.alpha:g}",))

    def levy_density(self, x):
        f = self.base.levy_density(x)
        if f is None:
            return None
        return np.asarray(f) * np.exp(self.alpha * np.asarray(x, dtype=float))

    def to_dict(self):
        return {"family": "esscher", "base": self.base.to_dict(), "alpha": self.alpha, "mu": self.mu}


def esscher(model: LevyModel, alpha: float) -> LevyModel:
    s = model.strip()
    if not -s.mu_plus < alpha < -s.mu_minus:
        raise DomainError(f"alpha must lie in ({-s.mu_plus}, {-s.mu_minus})")
    if alpha == 0:
        return model
    return Esscher(base=model, alpha=float(alpha))


# ---------------------------------------------------------------------------
# mixtures X = sum a_j X^j of independent processes
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Mixture(LevyModel):
    models: tuple = ()
    weights: tuple = ()
    mu: float = 0.0
    sigma2: float = field(init=False, default=0.0)
    family = "mixture"

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        object.__setattr__(self, "weights", tuple(float(a) for a in self.weights))
        object.__setattr__(self, "sigma2", sum(a * a * m.sigma2 for m, a in zip(self.models, self.weights)))

    def _validate(self):
        out = []
        if len(self.models) != len(self.weights) or not self.models:
            out.append("models and weights must be nonempty and of equal length")
        if any(not a > 0 for a in self.weights):
            out.append("weights must be positive")
        for m in self.models:
            out.extend(m.validate())
        return out

    def _psi0(self, xi):
        out = np.zeros(np.shape(xi), dtype=complex)
        for m, a in zip(self.models, self.weights):
            out = out + np.asarray(m.psi(a * xi))
        return out

    def strip(self):
        lo = max(m.strip().mu_minus / a for m, a in zip(self.models, self.weights))
        hi = min(m.strip().mu_plus / a for m, a in zip(self.models, self.weights))
        if not lo < hi:
            raise EmptyIntersection(f"strips do not intersect ({lo}, {hi})")
        return Strip(lo, hi)

    def sinh_type(self):
        sts = [m.sinh_type() for m in self.models]
        C = AngleCone.whole_plane()
        Cp = AngleCone.whole_plane()
        try:
            for st in sts:
                C = C.intersect(st.cone_C)
                Cp = Cp.intersect(st.cone_Cplus)
        except ValueError as e:
            raise EmptyIntersection(str(e)) from e
        if not any(not st.cone_C.full for st in sts):
            C = AngleCone.whole_plane()
        top = max(st.order[1] for st in sts)
        low = min(st.order[0] for st in sts)
        lead = [(st, a) for st, a in zip(sts, self.weights) if st.order[1] == top]
        c_inf, c_log = None, None
        if top.kind == "0+":
            c_log = sum(st.c_log for st, _ in lead)
        elif top.kind == "num" and all(st.c_inf is not None for st, _ in lead):
            nu = top.value
            parts = [(st, a ** nu) for st, a in lead]
            c_inf = lambda phi: sum(w * _cinf_full(st, phi) for st, w in parts)
        elif top.kind == "1+" and all(st.c_inf is not None for st, _ in lead):
            parts = [(st, a) for st, a in lead]
            c_inf = lambda phi: sum(w * _cinf_full(st, phi) for st, w in parts)
        return SinhType(self.strip(), C, Cp, (low, top), c_inf, c_log, ("mixture",))

    def levy_density(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for m, a in zip(self.models, self.weights):
            f = m.levy_density(x / a)
            if f is None:
                return None
            out = out + np.asarray(f) / a
        return out

    def to_dict(self):
        return {"family": "mixture", "models": [m.to_dict() for m in self.models],
                "weights": list(self.weights), "mu": self.mu}


def mix(models: Sequence[LevyModel], weights: Optional[Sequence[float]] = None) -> LevyModel:
    """psi(xi) = sum_j psi_j(a_j xi)."""
    models = list(models)
    weights = [1.0] * len(models) if weights is None else list(weights)
    if len(models) == 1 and weights[0] == 1.0:
        return models[0]
    m = Mixture(models=tuple(models), weights=tuple(weights))
    diags = m.validate()
    if diags:
        raise ParameterError("; ".join(diags))
    m.strip()
    m.sinh_type()
    return m


# ---------------------------------------------------------------------------
# subordinators
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SubordinatorModel:
    """Laplace exponent Psi(q) = E-exponent of a subordinator, Psi(q) = psi(i q).

    Psi is analytic off (-inf, -mu_cut]; ``order`` and ``c_Psi`` describe
    Psi(r e^{i theta}) ~ c_Psi(theta) r^nu (or c_log ln r for order 0+).
    """

    Psi: Callable
    drift: float = 0.0
    mu_cut: float = 0.0
    order: ExtOrder = field(default_factory=lambda: ExtOrder.numeric(1.0))
    c_Psi: Optional[Callable] = None
    c_log: Optional[float] = None
    base: Optional[LevyModel] = None
    measure: object = None
    notes: tuple = ()
    spec: Optional[dict] = None

    def __call__(self, q):
        return self.Psi(np.asarray(q, dtype=complex))

    @classmethod
    def from_model(cls, base: LevyModel):
        """Wrap a Levy model without negative jumps, Gaussian part or negative drift."""
        s = base.strip()
        if base.sigma2 != 0:
            raise ParameterError("a subordinator has no Gaussian part")
        if not math.isinf(s.mu_plus):
            raise ParameterError("a subordinator has no negative jumps (strip must be unbounded above)")
        if base.mu < 0:
            raise ParameterError("a subordinator has nonnegative drift")
        qs = np.logspace(-3, 3, 13)
        vals = np.asarray(base.psi(1j * qs))
        if np.any(vals.real <= 0) or np.any(np.abs(vals.imag) > 1e-10 * np.abs(vals)):
            raise ParameterError("Psi(q) = psi(iq) must be positive for q > 0")
        st = base.sinh_type()
        top = st.order[1]
        c_Psi, c_log = None, None
        if top.kind == "0+":
            c_log = st.c_log
        elif st.c_inf is not None:
            c_Psi = lambda th: _cinf_full(st, th + HALF_PI)
        order = top
        if base.mu > 0 and top.exponent < 1:
            b = base.mu
            order, c_Psi, c_log = ExtOrder.numeric(1.0), (lambda th: b * complex(math.cos(th), math.sin(th))), None
        return cls(lambda q: base.psi(1j * q), drift=float(base.mu), mu_cut=-s.mu_minus, order=order,
                   c_Psi=c_Psi, c_log=c_log, base=base, spec={"base": base.to_dict()})

    def is_complete_bernstein(self, n_rays: int = 7) -> bool:
        """Spot check: Psi maps the upper half-plane into its closure."""
        r = np.logspace(-2, 3, 30)
        for th in np.linspace(0.05, math.pi - 0.05, n_rays):
            v = np.asarray(self.Psi(r * np.exp(1j * th)))
            if np.any(v.imag < -1e-12 * np.abs(v)):
                return False
        return True

    def to_dict(self):
        if self.spec is None:
            raise Unsupported("this subordinator has no serial form")
        return dict(self.spec)


@dataclass(frozen=True, eq=False)
class Subordinated(LevyModel):
    """X_t = Y_{Z_t}: psi_X(xi) = Psi_Z(psi_Y(xi)) (+ own drift)."""

    Y: LevyModel = None
    Z: SubordinatorModel = None
    mu: float = 0.0
    flags: tuple = ()
    sigma2: float = field(init=False, default=0.0)
    family = "subordinated"

    def __post_init__(self):
        object.__setattr__(self, "sigma2", self.Z.drift * self.Y.sigma2)

    def _validate(self):
        return list(self.Y.validate())

    def _psi0(self, xi):
        w = np.asarray(self.Y.psi(xi))
        cut = (np.abs(w.imag) <= 1e-300) & (w.real <= -self.Z.mu_cut)
        if np.any(cut):
            raise ZeroCrossing("psi_Y hits the cut of Psi_Z")
        return np.asarray(self.Z(w))

    def strip(self):
        return _subordinated_strip(self.Y, self.Z.mu_cut)

    def sinh_type(self):
        return _subordinated_type(self)

    def to_dict(self):
        return {"family": "subordinated", "Y": self.Y.to_dict(), "Z": self.Z.to_dict(), "mu": self.mu}


def _subordinated_strip(Y: LevyModel, mu_cut: float) -> Strip:
    """Largest strip on which psi_Y(i t) > -mu_cut, found side by side on the concave map t -> psi_Y(i t)."""
    s = Y.strip()
    if math.isinf(mu_cut):
        return s
    f = lambda t: float(np.real(Y.psi(1j * t))) + mu_cut
    edges = []
    for edge, sign in ((s.mu_minus, -1.0), (s.mu_plus, 1.0)):
        if math.isinf(edge):
            probes = sign * np.logspace(-8, 12, 81)
        else:
            probes = edge - sign * abs(edge) * np.logspace(0, -13, 66)[1:]
            probes = np.concatenate([sign * abs(edge) * np.logspace(-8, -0.3, 30), probes])
        prev = 0.0
        found = None
        for t in probes:
            if f(t) <= 0:
                found = t
                break
            prev = t
        if found is None:
            edges.append(edge)
        elif prev == 0.0 and f(0.0) <= 0:
            edges.append(0.0)
        else:
            a, b = sorted((prev, found))
            edges.append(optimize.brentq(f, a, b, xtol=1e-14, rtol=1e-15))
    return Strip(edges[0], edges[1])


def _dominant(Y: LevyModel):
    """(order, coefficient) of psi_Y along rays, the drift included when it dominates."""
    st = Y.sinh_type()
    top = st.order[1]
    mu = Y.mu
    if mu != 0 and top.exponent < 1:
        return ExtOrder.numeric(1.0), (lambda phi: -1j * mu * complex(math.cos(phi), math.sin(phi))), None
    if top.kind == "0+":
        return top, None, st.c_log
    if st.c_inf is None:
        return top, None, None
    return top, (lambda phi: _cinf_full(st, phi)), None


def _subordinated_type(X: Subordinated) -> SinhType:
    Y, Z = X.Y, X.Z
    stY = Y.sinh_type()
    nuY, cY, clY = _dominant(Y)
    notes = []
    if Z.drift > 0:  # case (a)
        order = nuY
        c_inf = None if cY is None else (lambda phi: Z.drift * cY(phi))
        c_log = None if clY is None else Z.drift * clY
        notes.append("drift of Z dominates: order of Y")
    elif Z.order.kind == "0+":  # case (d)
        order = ZERO_PLUS
        c_inf = None
        c_log = Z.c_log * (nuY.exponent if nuY.kind == "num" else 1.0)
        notes.append("Z of order 0+")
    elif nuY.kind == "num" and Z.order.kind == "num":  # cases (b), (c)
        val = nuY.value * Z.order.value
        order = ExtOrder.numeric(val)
        nz = Z.order.value
        if cY is not None and Z.c_Psi is not None:
            def c_inf(phi):
                A = cY(phi)
                return complex(Z.c_Psi(math.atan2(A.imag, A.real))) * abs(A) ** nz
        else:
            c_inf = None
        c_log = None
        notes.append("order nu_Z * nu_Y")
    else:
        raise Unsupported(f"order algebra for {nuY} with {Z.order}")
    # cone C: wings where Re psi_Y > 0 keep psi_Y off the cut of Psi_Z (empirical)
    C = stY.cone_Cplus
    Cp = _probe_cone(X, C)
    notes.append("cones from ray probing (empirical)")
    return SinhType(X.strip(), AngleCone(C.gamma_minus, C.gamma_plus, label="empirical"), Cp,
                    (order, order), c_inf, c_log, tuple(notes) + X.flags)


def _probe_cone(X: LevyModel, C: AngleCone) -> AngleCone:
    """Angles in C along which Re psi_X grows (sampled at radii 1e2..1e6)."""
    phis = np.linspace(C.gamma_minus, C.gamma_plus, 181)[1:-1]
    rho = np.array([1e2, 1e4, 1e6])
    ok = []
    for p in phis:
        try:
            v = np.asarray(X.psi(rho * np.exp(1j * p)))
            v2 = np.asarray(X.psi(-rho * np.exp(-1j * p)))
            ok.append(bool(np.all(v.real > 0) and np.all(v2.real > 0) and v.real[-1] > v.real[0]))
        except (ZeroCrossing, DomainError):
            ok.append(False)
    ok = np.array(ok)
    if not ok.any():
        raise Unsupported("no growth cone found for the subordinated exponent")
    idx = np.flatnonzero(ok)
    runs = np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1)
    zero = int(np.argmin(np.abs(phis)))
    run = next((r for r in runs if r[0] <= zero <= r[-1]), max(runs, key=len))
    return AngleCone(float(phis[run[0]]), float(phis[run[-1]]))


def subordinate(Y: LevyModel, Z, check_sl: bool = False) -> LevyModel:
    """X_t = Y_{Z_t} for independent Y and subordinator Z (LevyModel or SubordinatorModel)."""
    if isinstance(Z, LevyModel):
        Z = SubordinatorModel.from_model(Z)
    X = Subordinated(Y=Y, Z=Z)
    if check_sl:
        from .stieltjes import verify_sl
        if Z.is_complete_bernstein() and verify_sl(Y).kind == "SL":
            X = Subordinated(Y=Y, Z=Z, flags=("SL",))
    return X


# ---------------------------------------------------------------------------
# Brownian subordinand of a symmetric (s)SL process
# ---------------------------------------------------------------------------

def _symmetry_defect(X: LevyModel, beta: float, n: int = 100, seed: int = 0) -> float:
    """max |psi(-xi - 2 i beta) - psi(xi)| relative, over points with Im xi + beta in the strip."""
    s = X.strip()
    rng = np.random.default_rng(seed)
    lo = max(s.mu_minus, -10.0)
    hi = min(s.mu_plus, 10.0)
    ims = rng.uniform(lo, hi, n) + beta * 0
    # reflect about -i beta: xi -> -xi - 2 i beta; keep both inside the strip
    ims = np.clip(ims, lo + 1e-3 * (hi - lo), hi - 1e-3 * (hi - lo))
    re = rng.uniform(-20.0, 20.0, n)
    xi = re + 1j * ims
    xr = -xi - 2j * beta
    inside = (xr.imag > s.mu_minus) & (xr.imag < s.mu_plus)
    a = np.asarray(X.psi(xi[inside]))
    b = np.asarray(X.psi(xr[inside]))
    return float(np.max(np.abs(a - b) / (1.0 + np.abs(a))))


def bm_subordinand(X: LevyModel, beta: Optional[float] = None, tol: float = 1e-10,
                   eps_schedule=(1e-6, 1e-8)):
    """Subordinator Z with X = Y_{Z} after the Esscher tilt esscher(X, beta), Y = sqrt(2) W.

    psi must be even about -i beta; by default -i beta is the center of the strip.

    Psi_Z(q) = psi(sqrt(q) - i beta) - psi(-i beta) and the measure
    G_Z(ds) = (1/pi) Im psi(i(sqrt(s) - beta) + 0) / s ds on s > (mu_+ - mu_-)^2/4.
    Returns (SubordinatorModel, StieltjesMeasure or None).
    """
    from .stieltjes import StieltjesMeasure

    s = X.strip()
    if beta is None:
        if math.isinf(s.mu_minus) or math.isinf(s.mu_plus):
            beta = 0.0
        else:
            beta = -0.5 * (s.mu_minus + s.mu_plus)
    defect = _symmetry_defect(X, beta)
    if defect > tol:
        raise SymmetryViolation(f"psi is not symmetric about -i beta (defect {defect:.3g})", defect)
    st = X.sinh_type()
    if st.order[1].exponent >= 2 and X.sigma2 == 0:
        raise Unsupported("growth condition fails: jump part of order 2")
    p0 = complex(X.psi(-1j * beta))
    Psi = lambda q: np.asarray(X.psi(np.sqrt(np.asarray(q, dtype=complex)) - 1j * beta)) - p0
    drift = 0.5 * X.sigma2
    mu_cut = math.inf if math.isinf(s.mu_plus) else (s.mu_plus + beta) ** 2
    top = st.order[1]
    if drift > 0:
        order = ExtOrder.numeric(1.0)
        c_Psi = lambda th: drift * complex(math.cos(th), math.sin(th))
        c_log = None
    elif top.kind == "0+":
        order, c_Psi, c_log = ZERO_PLUS, None, 0.5 * st.c_log
    elif top.kind == "num":
        order = ExtOrder.numeric(0.5 * top.value)
        c_Psi = (lambda th: _cinf_full(st, 0.5 * th)) if st.c_inf is not None else None
        c_log = None
    else:
        raise Unsupported(f"order {top} has no subordinand order")
    measure = None
    if not math.isinf(mu_cut):
        e1, e2 = eps_schedule

        def dens(t):
            r = math.sqrt(t) - beta
            v1 = complex(X.psi(1j * r + e1)).imag
            v2 = complex(X.psi(1j * r + e2)).imag
            v = v2 + (v2 - v1) * e2 / (e1 - e2)
            return v / (math.pi * t)

        measure = StieltjesMeasure.from_density(dens, support_inf=mu_cut, growth=-1.0)
    Z = SubordinatorModel(Psi, drift=drift, mu_cut=mu_cut, order=order, c_Psi=c_Psi, c_log=c_log,
                          measure=measure, notes=(f"X = Y_Z with Y = sqrt(2) W after Esscher tilt by {beta:g}",),
                          spec={"bm_subordinand": X.to_dict(), "beta": beta})
    return Z, measure


def discrete_bm_subordinand(atoms: Sequence) -> SubordinatorModel:
    """Psi_Z(q) = 2 sum p q / (lam^2 + q) with SL measure 2 sum p lam^2 delta_{lam^2}."""
    from .stieltjes import StieltjesMeasure

    atoms = [(float(p), float(l)) for p, l in atoms]
    if not atoms or any(p <= 0 or l <= 0 for p, l in atoms):
        raise ParameterError("atoms need p > 0 and lam > 0")
    tot = sum(p for p, _ in atoms)
    if not math.isfinite(tot):
        raise ParameterError("atom weights are not summable")

    def Psi(q):
        q = np.asarray(q, dtype=complex)
        return sum(2 * p * q / (l * l + q) for p, l in atoms)

    m = min(l * l for _, l in atoms)
    G = StieltjesMeasure.from_atoms([(l * l, 2 * p * l * l) for p, l in atoms])
    return SubordinatorModel(Psi, drift=0.0, mu_cut=m, order=ExtOrder.numeric(1.0),
                             c_Psi=None, measure=G, notes=("finite activity: bounded Psi",),
                             spec={"discrete_bm_subordinand": [list(a) for a in atoms]})


def _subordinator_from_dict(d: dict) -> SubordinatorModel:
    from .models import model_from_dict

    if "base" in d:
        return SubordinatorModel.from_model(model_from_dict(d["base"]))
    if "bm_subordinand" in d:
        return bm_subordinand(model_from_dict(d["bm_subordinand"]), d.get("beta"))[0]
    if "discrete_bm_subordinand" in d:
        return discrete_bm_subordinand(d["discrete_bm_subordinand"])
    raise ParameterError("unknown subordinator description")


def composite_from_dict(fam: str, d: dict) -> LevyModel:
    from .models import model_from_dict

    d = dict(d)
    mu = float(d.pop("mu", 0.0))
    if fam == "esscher":
        m = Esscher(base=model_from_dict(d["base"]), alpha=float(d["alpha"]), mu=mu)
    elif fam == "mixture":
        m = Mixture(models=tuple(model_from_dict(x) for x in d["models"]),
                    weights=tuple(d.get("weights", [1.0] * len(d["models"]))), mu=mu)
    elif fam == "subordinated":
        m = Subordinated(Y=model_from_dict(d["Y"]), Z=_subordinator_from_dict(d["Z"]), mu=mu)
    else:
        raise ParameterError(f"unknown composite {fam!r}")
    diags = m.validate()
    if diags:
        raise ParameterError("; ".join(diags))
    return m
