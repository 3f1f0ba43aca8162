import json
import math

import numpy as np
import pytest

from levysinh import models as M
from levysinh import oracle as O
from levysinh.errors import DomainError, ParameterError, Unsupported


def test_bm_closed_form():
    m = M.BM(sigma2=0.3, mu=0.1)
    xi = np.array([-2.0, 0.5, 3.0 + 1j])
    np.testing.assert_allclose(m.psi(xi), 0.15 * xi**2 - 0.1j * xi, rtol=1e-15)


def test_nig_closed_form():
    m = M.NIG(delta=1.5, alpha=3.0, beta=1.0)
    xi = np.array([0.7, -4.0 + 0.5j])
    ref = 1.5 * (np.sqrt(9 - (1 + 1j * xi) ** 2) - math.sqrt(8))
    np.testing.assert_allclose(m.psi(xi), ref, rtol=1e-14)


def test_vg_closed_form():
    m = M.VG(c=0.8, alpha=2.0, beta=0.5)
    xi = np.array([1.0, -3.0 + 0.2j])
    ref = 0.8 * (np.log(4 - (0.5 + 1j * xi) ** 2) - math.log(4 - 0.25))
    np.testing.assert_allclose(m.psi(xi), ref, rtol=1e-14)


def test_hejd_closed_form():
    m = M.HEJD(sigma2=0.04, pos=((1.0, 10.0),), neg=((2.0, 5.0),))
    xi = np.array([1.5, -7.0 + 0.3j])
    ref = 0.02 * xi**2 + (-1j * xi) / (10 - 1j * xi) + 2 * (1j * xi) / (5 + 1j * xi)
    np.testing.assert_allclose(m.psi(xi), ref, rtol=1e-14)


def test_merton_closed_form():
    m = M.Merton(sigma2=0.04, lam=0.7, m=-0.1, s=0.2)
    xi = np.array([0.3, 4.0])
    ref = 0.02 * xi**2 + 0.7 * (1 - np.exp(-0.1j * xi - 0.02 * xi**2))
    np.testing.assert_allclose(m.psi(xi), ref, rtol=1e-14)


def test_meixner_closed_form_on_real_line():
    m = M.Meixner(delta=1.2, a=0.8, b=0.4)
    xi = np.linspace(-5, 5, 11)
    ref = 2 * 1.2 * (np.log(np.cosh((0.8 * xi - 0.4j) / 2)) - math.log(math.cos(0.2)))
    np.testing.assert_allclose(m.psi(xi), ref, rtol=1e-12, atol=1e-14)


def test_meixner_continuation_is_analytic_across_upper_half_plane():
    # the principal log would jump; the continued exponent is smooth along a vertical segment
    m = M.Meixner(delta=1.0, a=1.0, b=0.0)
    y = np.linspace(0.1, 30, 3000)
    v = np.asarray(m.psi(0.5 + 1j * y))
    assert np.max(np.abs(np.diff(v))) < 0.1


def test_psi_zero_and_conjugate_symmetry():
    rng = np.random.default_rng(0)
    xi = rng.normal(size=30) * 5 + 0.2j * rng.normal(size=30)
    for m in (M.CGMY(), M.NIG(beta=0.3), M.Beta(), M.GenHyperbolic(lam=-0.5)):
        assert complex(m.psi(0.0)) == 0
        np.testing.assert_allclose(m.psi(-np.conj(xi)), np.conj(m.psi(xi)), rtol=1e-13, atol=1e-14)


def test_branch_cut_rejected():
    with pytest.raises(DomainError):
        M.NIG(alpha=2.0).psi(3j)
    # inside the strip on the axis is fine
    assert np.isfinite(complex(M.NIG(alpha=2.0).psi(1j)))


def test_validation_lists_problems():
    assert M.NIG(alpha=1.0, beta=2.0).validate()
    with pytest.raises(ParameterError):
        M.NIG(alpha=1.0, beta=2.0).check()
    with pytest.raises(ParameterError):
        M.Meixner(b=4.0).check()
    with pytest.raises(ParameterError):
        M.Beta(gamma1=2.0).check()
    assert M.CGMY().validate() == []


def test_kobol_matches_levy_khintchine():
    m = M.KoBoL(nu_plus=1.3, nu_minus=0.4, c_plus=0.6, c_minus=1.1, lam_minus=-3, lam_plus=5)
    xi = np.array([-6.0, -1.0, 2.5, 9.0])
    h = 1e-6
    mean = (1j * (complex(m.psi(h)) - complex(m.psi(-h))) / (2 * h)).real
    ref = O.lk_psi(m.levy_density, 0.0, 0.0, xi, compensator="full") - 1j * mean * xi
    np.testing.assert_allclose(m.psi(xi), ref, rtol=1e-6)


@pytest.mark.parametrize("nu", [0.0, 1.0])
def test_kobol_special_orders_match_limit(nu):
    # the nu = 0 and nu = 1 special forms are the limits of the general formula
    xi = np.array([-3.0, 0.7, 5.0 + 0.5j])
    kw = dict(c_plus=0.9, c_minus=0.6, lam_minus=-3.0, lam_plus=4.0)
    exact = np.asarray(M.KoBoL(nu_plus=nu, nu_minus=nu, **kw).psi(xi))
    near = np.asarray(M.KoBoL(nu_plus=nu + 1e-6, nu_minus=nu + 1e-6, **kw).psi(xi))
    if nu == 1.0:
        # the general form differs by a linear drift term in the limit; compare second differences
        exact = exact - exact[1] * xi / xi[1]
        near = near - near[1] * xi / xi[1]
    np.testing.assert_allclose(near, exact, rtol=1e-4, atol=1e-5)


def test_metadata_examples():
    assert M.BM().sinh_type().describe()["order"] == ("2", "2")
    assert M.VG().sinh_type().describe()["order"] == ("0+", "0+")
    mx = M.Meixner(a=1.0, b=0.5).sinh_type()
    assert mx.describe()["order"] == ("1", "1")
    assert mx.strip.mu_minus == pytest.approx(-math.pi + 0.5)
    assert mx.strip.mu_plus == pytest.approx(math.pi + 0.5)
    h = M.HEJD(pos=((1.0, 7.0), (1.0, 3.0)), neg=((1.0, 5.0),))
    assert (h.strip().mu_minus, h.strip().mu_plus) == (-3.0, 5.0)
    nts = M.NTS(nu=1.5).sinh_type()
    g = min(1.0, 1 / 1.5) * math.pi / 2
    assert nts.cone_Cplus.tilt_interval() == pytest.approx((-g, g))


@pytest.mark.parametrize("m", [M.NIG(beta=0.5), M.CGMY(), M.Meixner(b=0.3), M.BM(sigma2=0.5)])
def test_c_inf_matches_growth_along_rays(m):
    st = m.sinh_type()
    nu = st.order[1].value
    for phi in (-0.5, 0.0, 0.4):
        rho = 1e6
        got = complex(m.psi0(rho * np.exp(1j * phi))) / rho**nu
        assert abs(got - m.c_inf(phi)) / abs(m.c_inf(phi)) < 1e-2


def test_c_log_only_for_zero_plus_order():
    assert M.VG(c=0.7).c_log() == pytest.approx(1.4)
    with pytest.raises(Unsupported):
        M.NIG().c_log()


def test_dict_round_trip():
    for m in (M.NIG(delta=2.0, beta=0.3), M.HEJD(), M.Beta(c2=0.5), M.GenHyperbolic(lam=0.5)):
        d = json.loads(json.dumps(m.to_dict()))
        back = M.model_from_dict(d)
        xi = np.array([0.3, -2.0])
        np.testing.assert_allclose(back.psi(xi), m.psi(xi), rtol=1e-15)


def test_dict_rejects_unknown():
    with pytest.raises(ParameterError):
        M.model_from_dict({"family": "NTS", "delta": 1.0, "gamma": 2.0})
    with pytest.raises(ParameterError):
        M.model_from_dict({"family": "Nope"})
    with pytest.raises(ParameterError):
        M.model_from_dict({"delta": 1.0})


def test_gh_reduces_to_nig():
    # GH with lambda = -1/2 is NIG
    gh = M.GenHyperbolic(alpha=2.0, beta=0.5, delta=1.0, lam=-0.5)
    xi = np.linspace(-10, 10, 9) + 0.1j
    np.testing.assert_allclose(gh.psi(xi), M.NIG(alpha=2.0, beta=0.5, delta=1.0).psi(xi),
                               rtol=1e-11, atol=1e-12)


def test_meromorphic_pattern():
    m = M.Meromorphic.from_pattern(-0.5, n_atoms=100)
    assert m.tail_bound > 0
    assert m.strip().mu_plus == pytest.approx(2.0)
    assert np.isfinite(complex(m.psi(3.0)))
