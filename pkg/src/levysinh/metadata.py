"""Value types describing SINH-regularity: extended orders, cones, strips."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

HALF_PI = 0.5 * math.pi


@functools.total_ordering
@dataclass(frozen=True)
class ExtOrder:
    """Growth order in (0, 2] extended by the symbols 0+ (log) and 1+ (rho log rho)."""

    kind: str  # "num", "0+", "1+"
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in ("num", "0+", "1+"):
            raise ValueError(f"bad order kind {self.kind!r}")
        if self.kind == "num" and not (0.0 < self.value <= 2.0):
            raise ValueError(f"numeric order must lie in (0, 2], got {self.value}")

    @classmethod
    def numeric(cls, nu: float) -> "ExtOrder":
        return cls("num", float(nu))

    @property
    def is_numeric(self) -> bool:
        return self.kind == "num"

    def _key(self):
        if self.kind == "0+":
            return (0.0, 0)
        if self.kind == "1+":
            return (1.0, 1)
        return (self.value, 0)

    def __lt__(self, other):
        if not isinstance(other, ExtOrder):
            return NotImplemented
        return self._key() < other._key()

    def growth(self, rho):
        """rho**nu with the conventions rho**(0+) = ln rho, rho**(1+) = rho ln rho."""
        if self.kind == "0+":
            return math.log(rho)
        if self.kind == "1+":
            return rho * math.log(rho)
        return rho**self.value

    @property
    def exponent(self) -> float:
        """Power exponent ignoring log corrections (0 for 0+, 1 for 1+)."""
        return {"0+": 0.0, "1+": 1.0}.get(self.kind, self.value)

    def __str__(self):
        return self.kind if self.kind != "num" else f"{self.value:g}"


ZERO_PLUS = ExtOrder("0+")
ONE_PLUS = ExtOrder("1+")


@dataclass(frozen=True)
class AngleCone:
    """Double cone {arg in (g-, g+)} U {arg in (pi - g+, pi - g-)}.

    ``full`` marks the whole plane. A rotated one-sided cone i*C_gamma with
    gamma in (pi/2, pi] is stored through its right-half trace
    (pi/2 - gamma, pi/2) with ``rotated=+1`` (and the mirror with -1).
    """

    gamma_minus: float
    gamma_plus: float
    full: bool = False
    rotated: int = 0
    label: str = ""

    def __post_init__(self):
        if not (-HALF_PI - 1e-15 <= self.gamma_minus <= self.gamma_plus <= HALF_PI + 1e-15):
            raise ValueError(f"invalid cone angles ({self.gamma_minus}, {self.gamma_plus})")

    @classmethod
    def whole_plane(cls) -> "AngleCone":
        return cls(-HALF_PI, HALF_PI, full=True, label="C")

    @classmethod
    def off_axis(cls) -> "AngleCone":
        return cls(-HALF_PI, HALF_PI, label="C\\iR")

    def tilt_interval(self) -> tuple[float, float]:
        return (self.gamma_minus, self.gamma_plus)

    def contains_angle(self, phi: float) -> bool:
        """phi in (-pi, pi]; uses the mirror for the left half-plane."""
        if self.full:
            return True
        if abs(phi) > HALF_PI:
            phi = math.copysign(math.pi, phi) - phi
        return self.gamma_minus < phi < self.gamma_plus

    def issubset(self, other: "AngleCone", tol: float = 1e-12) -> bool:
        if other.full:
            return True
        if self.full:
            return False
        return (self.gamma_minus >= other.gamma_minus - tol
                and self.gamma_plus <= other.gamma_plus + tol)

    def intersect(self, other: "AngleCone") -> "AngleCone":
        if self.full:
            return other
        if other.full:
            return self
        lo = max(self.gamma_minus, other.gamma_minus)
        hi = min(self.gamma_plus, other.gamma_plus)
        if lo >= hi:
            raise ValueError("empty cone intersection")
        return AngleCone(lo, hi)

    def __str__(self):
        if self.full:
            return "C"
        if self.label:
            return self.label
        return f"C_{{{self.gamma_minus:.6g},{self.gamma_plus:.6g}}}"


@dataclass(frozen=True)
class Strip:
    mu_minus: float
    mu_plus: float

    def __post_init__(self):
        if not (self.mu_minus <= 0.0 <= self.mu_plus and self.mu_minus < self.mu_plus):
            raise ValueError(f"invalid strip ({self.mu_minus}, {self.mu_plus})")

    def contains(self, y: float) -> bool:
        return self.mu_minus < y < self.mu_plus

    @property
    def width(self) -> float:
        return self.mu_plus - self.mu_minus


@dataclass(frozen=True)
class SinhType:
    strip: Strip
    cone_C: AngleCone
    cone_Cplus: AngleCone
    order: tuple  # (lower, upper) ExtOrder
    c_inf: Optional[Callable[[float], complex]] = field(default=None, compare=False)
    c_log: Optional[float] = None  # coefficient c of c*ln|xi| for order 0+
    notes: tuple = ()

    def __post_init__(self):
        lo, hi = self.order
        if hi < lo:
            raise ValueError("order pair must satisfy lower <= upper")

    def describe(self) -> dict:
        return {
            "strip": (self.strip.mu_minus, self.strip.mu_plus),
            "cone_C": str(self.cone_C),
            "cone_Cplus": (self.cone_Cplus.gamma_minus, self.cone_Cplus.gamma_plus),
            "order": (str(self.order[0]), str(self.order[1])),
        }


def cone_from_coefficient(A: complex, kappa: float) -> AngleCone:
    """Largest interval of phi in (-pi/2, pi/2) where Re(A e^{i kappa phi}) > 0.

    Among the candidate intervals the one containing 0 wins, otherwise the longest.
    """
    a = math.atan2(A.imag, A.real)
    best = None
    for k in range(-4, 5):
        lo = (-HALF_PI - a + 2 * math.pi * k) / kappa
        hi = (HALF_PI - a + 2 * math.pi * k) / kappa
        lo, hi = max(lo, -HALF_PI), min(hi, HALF_PI)
        if lo >= hi:
            continue
        score = (lo < 0 < hi, hi - lo)
        if best is None or score > best[0]:
            best = (score, lo, hi)
    if best is None:
        raise ValueError("coefficient has no positive-real-part sector")
    return AngleCone(best[1], best[2])
