import math

import numpy as np
import pytest

from levysinh import sinhq as SQ
from levysinh.errors import Infeasible, NumericalError
from levysinh.metadata import ExtOrder


def test_contour_map_and_jacobian():
    c = SQ.SinhContour(omega1=0.5, b=2.0, omega=0.3)
    y = np.array([-1.0, 0.0, 2.0])
    np.testing.assert_allclose(c(y), 0.5j + 2.0 * np.sinh(0.3j + y))
    h = 1e-6
    fd = (c(y + h) - c(y - h)) / (2 * h)
    np.testing.assert_allclose(SQ.jacobian(c, y), fd, rtol=1e-8)
    # the contour crosses the imaginary axis at i(omega1 + b sin omega)
    assert complex(c(0.0)) == pytest.approx(1j * (0.5 + 2.0 * math.sin(0.3)))


def test_contour_validation():
    with pytest.raises(ValueError):
        SQ.SinhContour(0.0, -1.0, 0.0)
    with pytest.raises(ValueError):
        SQ.SinhContour(0.0, 1.0, 2.0)


def test_grid():
    g = SQ.TrapezoidGrid(0.1, 5)
    assert g.nodes().size == 11
    assert g.Lambda == pytest.approx(0.5)


def test_trapezoid_gaussian():
    # (1/2pi) int e^{-xi^2/2} dxi = 1/sqrt(2 pi)
    c = SQ.SinhContour(0.0, 1.0, 0.0)
    g = SQ.TrapezoidGrid(0.1, 60)
    v = SQ.trapezoid(lambda xi: np.exp(-xi**2 / 2), c, g)
    assert abs(v - 1 / math.sqrt(2 * math.pi)) < 1e-14


def test_trapezoid_reports_nonfinite_node():
    c = SQ.SinhContour(0.0, 1.0, 0.0)
    g = SQ.TrapezoidGrid(0.5, 4)
    # node y = 0 maps to xi = 0
    with pytest.raises(NumericalError), np.errstate(divide="ignore", invalid="ignore"):
        SQ.trapezoid(lambda xi: 1 / xi, c, g)


def test_pairwise_sum_deterministic():
    rng = np.random.default_rng(0)
    v = rng.normal(size=10001) + 1j * rng.normal(size=10001)
    assert SQ.pairwise_sum(v) == SQ.pairwise_sum(v.copy())


def _gauss_desc(x, eps):
    # integrand e^{-i x xi - xi^2/2}: order 2, analytic everywhere
    return SQ.Descriptor(strip=(-math.inf, math.inf), cone_C=(-math.pi / 2, math.pi / 2),
                         cone_Cplus=(-math.pi / 4, math.pi / 4), x=x, t=1.0,
                         order=(ExtOrder.numeric(2), ExtOrder.numeric(2)),
                         c_inf=lambda phi: 0.5 * complex(math.cos(2 * phi), math.sin(2 * phi)), eps=eps)


@pytest.mark.parametrize("x", [-2.0, 0.0, 1.5])
@pytest.mark.parametrize("eps", [1e-6, 1e-12])
def test_integrate_gaussian_density(x, eps):
    f = lambda xi: np.exp(-1j * x * xi - xi**2 / 2)
    val, c, g, cert = SQ.integrate(f, _gauss_desc(x, eps))
    exact = math.exp(-x * x / 2) / math.sqrt(2 * math.pi)
    assert abs(val.real - exact) <= eps
    assert cert.N == g.N and cert.predicted_error > 0


def test_wing_direction_follows_kernel():
    c_down, *_ = SQ.choose_params(_gauss_desc(2.0, 1e-8))
    c_up, *_ = SQ.choose_params(_gauss_desc(-2.0, 1e-8))
    assert c_down.omega < 0 < c_up.omega


def test_choose_params_eps_range():
    with pytest.raises(ValueError):
        SQ.choose_params(_gauss_desc(0.0, 1.0))


def test_infeasible_direction():
    d = _gauss_desc(1.0, 1e-8)
    d.direction = "up"
    d.cone_C = (-1.0, -0.5)
    with pytest.raises(Infeasible):
        SQ.decay_interval(d)


def test_certificate_header():
    _, _, cert = SQ.choose_params(_gauss_desc(0.5, 1e-10))
    h = cert.header()
    assert set(h) == {"d", "zeta", "Lambda", "N", "predicted_error"}
    assert h["zeta"] == pytest.approx(2 * math.pi * h["d"] / math.log(10 / 1e-10))


def test_boundary_mass_finite_for_entire_integrand():
    c, g, _ = SQ.choose_params(_gauss_desc(0.0, 1e-8))
    H = SQ.boundary_mass(lambda xi: np.exp(-xi**2 / 2), c, g.d, g.Lambda)
    assert 0 < H < np.inf
