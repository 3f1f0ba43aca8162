import math

import numpy as np
import pytest
from scipy import integrate, special

from levysinh import models as M
from levysinh import stieltjes as S
from levysinh.errors import CutError, DomainError


def test_st_atoms_and_density():
    G = S.StieltjesMeasure.from_atoms([(1.0, 2.0), (3.0, 0.5)])
    z = np.array([0.5 + 1j, 2.0])
    np.testing.assert_allclose(S.st(G, z), 2 / (z + 1) + 0.5 / (z + 3), rtol=1e-15)
    U = S.StieltjesMeasure.from_density(lambda t: 1.0 if t < 2 else 0.0, support_inf=1.0, growth=-1.0)
    z = 0.3 + 0.7j
    assert abs(S.st(U, z) - np.log((z + 2) / (z + 1))) < 1e-10


def test_st_steps_flat():
    G = S.StieltjesMeasure.from_steps([1.0, 2.0, 4.0], [1.0, 1.0])
    z = 1.5 - 0.5j
    ref = np.log((z + 2) / (z + 1)) + 0.5 * np.log((z + 4) / (z + 2))
    assert abs(S.st(G, z) - ref) < 1e-12


def test_st_on_cut_raises():
    G = S.StieltjesMeasure.from_atoms([(1.0, 1.0)])
    with pytest.raises(CutError):
        S.st(G, -2.0)
    with pytest.raises(CutError):
        S.st(G, -1.0)


def test_measure_validation():
    with pytest.raises(DomainError):
        S.StieltjesMeasure.from_atoms([(1.0, -1.0)])
    assert S.StieltjesMeasure.from_atoms([(1.0, -1.0)], signed=True).signed
    with pytest.raises(DomainError):
        S.StieltjesMeasure.from_steps([2.0, 1.0], [1.0])
    bad = S.StieltjesMeasure.from_density(lambda t: t**0.5, growth=0.5)
    assert bad.validate()
    good = S.StieltjesMeasure.from_density(lambda t: (1 + t) ** -1.5, growth=-1.5)
    assert good.validate() == []


def test_density_from_measure_power_law():
    alpha = -0.5
    c = special.gamma(-alpha) * math.sin(-math.pi * alpha) / math.pi
    G = S.StieltjesMeasure.from_density(lambda t: c * t**alpha, growth=alpha)
    for x in (0.5, 1.0, 3.0):
        assert S.density_from_measure(G, x, "+") == pytest.approx(x ** (-alpha - 1), rel=1e-9)
    with pytest.raises(DomainError):
        S.density_from_measure(G, -1.0, "+")


def test_hejd_single_atom_decomposition():
    p, a = 0.7, 3.0
    d = S.SLDecomposition(a1_plus=1.0, G0_plus=S.StieltjesMeasure.from_atoms([(a, p)]))
    xi = np.array([0.4, -2.0 + 0.5j])
    h = M.HEJD(sigma2=0.0, pos=((p, a),), neg=())
    np.testing.assert_allclose(S.psi_from_decomp(d, xi), h.psi(xi), rtol=1e-14)
    assert d.strip == (-a, math.inf)
    assert d.classification() == "SL"


def test_decomposition_coefficients_checked():
    with pytest.raises(DomainError):
        S.SLDecomposition(sigma2=-1.0)
    with pytest.raises(DomainError):
        S.SLDecomposition(G0_plus=S.StieltjesMeasure.from_atoms([(1.0, 1.0)]))


def test_extract_vg_constant_density():
    m = M.VG(c=0.8, alpha=2.0, beta=0.0)
    grid = 2.0 + np.geomspace(0.1, 10, 8)
    em = S.extract_measure(m, "-", grid)
    np.testing.assert_allclose(em.density(), 0.8, rtol=1e-8)
    assert em.to_csv().splitlines()[0] == "t_lo,t_hi,mass,residual"


def test_extract_rejects_bad_grids():
    m = M.NIG(alpha=2.0)
    with pytest.raises(DomainError):
        S.extract_measure(m, "-", [1.0, 3.0])
    with pytest.raises(ValueError):
        S.extract_measure(m, "-", [3.0, 2.5])
    with pytest.raises(DomainError):
        S.extract_measure(M.BM(), "-", [1.0, 2.0])


def test_default_grid_starts_at_cut():
    g = S.default_grid(M.NIG(alpha=2.0, beta=0.5), "-", t_max=100)
    assert g[0] == pytest.approx(2.5)
    assert np.all(np.diff(g) > 0) and g[-1] >= 102.5


def test_meixner_staircase_and_its_laplace_transform():
    m = M.Meixner(delta=1.0, a=1.0, b=0.3)
    edge = (math.pi - 0.3) / 1.0
    grid = np.linspace(edge, edge + 6 * math.pi, 601)
    em = S.extract_measure(m, "+", grid, on_residual="report")
    mid = 0.5 * (grid[1:] + grid[:-1])
    steps = 2.0 * np.array([sum(t > ((2 * k + 1) * math.pi - 0.3) for k in range(10)) for t in mid])
    bnd = np.array([(2 * k + 1) * math.pi - 0.3 for k in range(10)])
    away = np.min(np.abs(mid[:, None] - bnd[None, :]), axis=1) > grid[1] - grid[0]
    np.testing.assert_allclose(em.density()[away], steps[away], atol=1e-6)
    # Laplace transform of the staircase is the Meixner Levy density
    G = S.StieltjesMeasure.from_density(
        lambda t: 2.0 * sum(t > (2 * k + 1) * math.pi - 0.3 for k in range(400)), support_inf=edge)
    for x in (0.5, 1.0, 2.0):
        lt = integrate.quad(lambda t: G.density(t) * math.exp(-t * x), edge, 400 * 2 * math.pi, limit=2000)[0]
        assert lt == pytest.approx(float(m.levy_density(x)), rel=1e-6)


def test_verify_sl_classification():
    assert S.verify_sl(M.NIG(beta=0.3)).kind == "SL"
    assert S.verify_sl(M.CGMY()).kind == "SL"
    assert S.verify_sl(M.BM()).kind == "SL"
    assert S.verify_sl(M.Merton()).kind == "Indeterminate"
    # with the analytically continued exponent the Meixner measure is a nonnegative staircase
    assert S.verify_sl(M.Meixner()).kind == "SL"


@pytest.mark.parametrize("m", [M.NIG(beta=0.5), M.CGMY(), M.VG(beta=0.3)])
@pytest.mark.parametrize("x", [-0.7, 0.5, 2.0])
def test_levy_density_contour(m, x):
    assert S.density_oracle_contour(m, x) == pytest.approx(float(m.levy_density(x)), rel=1e-8)


def test_levy_density_contour_needs_no_diffusion():
    with pytest.raises(DomainError):
        S.density_oracle_contour(M.HEJD(sigma2=0.1), 1.0)
    with pytest.raises(DomainError):
        S.density_oracle_contour(M.NIG(), 0.0)


def test_gh_density_nig_case():
    gh = M.GenHyperbolic(alpha=2.0, beta=0.5, delta=1.5, lam=-0.5)
    t = np.array([2.6, 4.0, 10.0])
    ref = 1.5 / math.pi * np.sqrt((t - 0.5) ** 2 - 4.0)
    np.testing.assert_allclose(S.gh_sl_density(gh, t, "-"), ref, rtol=1e-9)
    with pytest.raises(DomainError):
        S.gh_sl_density(gh, [2.0], "-")


def test_gh_density_matches_boundary_values():
    gh = M.GenHyperbolic(alpha=2.0, beta=0.5, delta=1.0, lam=1.5)
    t = np.array([3.0, 6.0])
    direct = S.im_psi_boundary(gh, t, "-", 1e-9) / math.pi
    np.testing.assert_allclose(S.gh_sl_density(gh, t, "-"), direct, rtol=1e-6)


def test_order_from_bounds():
    lo, hi, info = S.order_from_bounds(-0.5, "a2")
    assert str(lo) == str(hi) == "1.5"
    lo, hi, info = S.order_from_bounds(-1.0, "a2")
    assert (str(lo), str(hi)) == ("1", "1+")
    assert info["cone_Cplus"] == (0.0, math.pi / 2)
    lo, hi, _ = S.order_from_bounds(-1.0, "a1")
    assert str(hi) == "0+"
    with pytest.raises(DomainError):
        S.order_from_bounds(0.5, "a1")
