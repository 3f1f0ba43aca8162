"""Special functions needed by the model catalog."""
from __future__ import annotations

import math

import numpy as np
from scipy.special import loggamma

from .errors import DomainError


def log_gamma(z):
    return loggamma(np.asarray(z, dtype=complex))


def beta_fn(x, y):
    """Euler Beta B(x, y) for complex x and real y (poles of x allowed to raise)."""
    x = np.asarray(x, dtype=complex)
    return np.exp(log_gamma(x) + log_gamma(y) - log_gamma(x + y))


# exp-sinh nodes for int_0^inf on the rotated ray
_DE_H = 1.0 / 24.0
_DE_S = np.arange(-5.0, 3.6 + 1e-12, _DE_H)
_DE_U = np.exp(0.5 * math.pi * np.sinh(_DE_S))
_DE_W = _DE_H * 0.5 * math.pi * np.cosh(_DE_S) * _DE_U


def _kscaled_ray(lam: float, z: np.ndarray) -> np.ndarray:
    """e^z K(z) = e^{-i phi} int_0^inf e^{-|z| u} h(e^{-i phi} u) du, phi = arg z.

    h(y) = cosh(lam s)/sinh(s) with s = arccosh(1 + y); rotating onto the ray
    of z keeps the exponential real and decaying for any |arg z| < pi.
    """
    r = np.abs(z)
    e = np.exp(-1j * np.angle(z))
    u = _DE_U[None, :] / r[:, None]
    y = e[:, None] * u
    root = np.sqrt(y) * np.sqrt(y + 2.0)  # sinh s, continuous along the ray
    s = np.log(1.0 + y + root)
    hv = np.cosh(lam * s) / root
    vals = np.exp(-_DE_U)[None, :] * hv * _DE_W[None, :] / r[:, None]
    return e * vals.sum(axis=1)


def bessel_k_scaled(lam: float, z):
    """e^{z} K_lam(z) for Re z >= 0, z != 0.

    The integral int_0^inf e^{-z(cosh s - 1)} cosh(lam s) ds is rewritten in
    y = cosh s - 1 and rotated onto the ray of z, which keeps the exponential
    real and decaying up to and including the imaginary axis.  The result
    is summed by the trapezoid rule after an exp-sinh substitution.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(z == 0):
        raise DomainError("K_lam has a singularity at 0")
    if np.any(np.abs(np.angle(z)) > 0.5 * math.pi + 1e-12):
        raise DomainError("Bessel K evaluation needs Re z >= 0")
    out = np.empty(z.shape, dtype=complex)
    # chunk to bound memory of the node matrix
    for i in range(0, z.size, 4096):
        out[i:i + 4096] = _kscaled_ray(lam, z[i:i + 4096])
    return out


def bessel_k(lam: float, z):
    z = np.asarray(z, dtype=complex)
    return np.exp(-z) * bessel_k_scaled(lam, z.ravel()).reshape(z.shape)


def log_bessel_k(lam: float, z):
    z = np.asarray(z, dtype=complex)
    return -z + np.log(bessel_k_scaled(lam, z.ravel()).reshape(z.shape))


def bessel_k_asymptotic(lam: float, z, terms: int | None = None):
    """Hankel asymptotic series sqrt(pi/2z) e^{-z} sum_s a_s(lam) z^{-s}, truncated at the smallest term."""
    z = complex(z)
    mu = 4.0 * lam * lam
    total = 1.0 + 0j
    term = 1.0 + 0j
    prev = float("inf")
    s = 1
    while True:
        term = term * (mu - (2 * s - 1) ** 2) / (s * 8.0 * z)
        if abs(term) >= prev or (terms is not None and s > terms) or abs(term) == 0:
            break
        total += term
        prev = abs(term)
        if prev < 1e-18 * abs(total):
            break
        s += 1
    return np.sqrt(math.pi / (2 * z)) * np.exp(-z) * total
