import math

import mpmath
import numpy as np
import pytest

from jacobi_jost.coefficients import (
    Geometric,
    Stretched,
    Tabulated,
    check_essential_selfadjointness,
    classify,
    eval_a,
    eval_b,
)
from jacobi_jost.errors import ModelError, PoleAtZ, PrecisionError, RegimeMismatch
from jacobi_jost.solutions import growing_g, orthonormal_polys, wronskian
from jacobi_jost.spectral import (
    MP_ESCALATE_THRESHOLD,
    _sturm_count,
    find_eigenvalues,
    finite_section_eigs,
    jost_function,
    resolvent_entry,
    spectral_mass,
    spectral_report,
)
from jacobi_jost.volterra import jost_f

# pinned reference: a_n = 2^n, beta = -1.1; the five lowest positive
# eigenvalues, cross-checked against high-precision finite sections
GEO_EIGS = (0.7351461358, 2.1206824418, 4.4034076781, 8.8148007985, 17.6296718424)


# ---------------------------------------------------------------------------
# Omega evaluation
# ---------------------------------------------------------------------------


def test_omega_matches_bundle(nsq):
    z = 1.0 + 0.5j
    res = jost_function(nsq, z, n_trunc=400)
    bundle = jost_f(nsq, z, 400)
    assert res.omega == pytest.approx(bundle.omega, rel=1e-12)
    assert not res.used_mp
    assert res.cancellation > MP_ESCALATE_THRESHOLD
    assert res.n_trunc == 400


def test_omega_two_routes_agree(nsq, geo_super):
    # boundary assembly vs Wronskian probe at an interior index; the spread
    # is bounded by the truncation certificate (the two routes see different
    # linear combinations of the truncated solution)
    for model, n_trunc in ((nsq, 400), (geo_super, 96)):
        res = jost_function(model, 1.4 + 0.3j, n_trunc=n_trunc)
        assert res.omega_alt == pytest.approx(res.omega, rel=1e-8)
        cert_allow = 4.0 * res.certificate["err_trunc"] + 1e-10
        assert res.route_gap <= cert_allow
        assert res.certificate["route_gap"] == res.route_gap


def test_escalation_near_eigenvalue(geo_super):
    # refine the lowest eigenvalue tightly, then evaluate right on top of it:
    # the boundary combination cancels past the float budget and the mp
    # route must take over
    eig = find_eigenvalues(geo_super, 0.6, 0.8, grid=16, tol=1e-14)
    lam = eig.eigenvalues[0]
    res = jost_function(geo_super, complex(lam), n_trunc=96)
    assert res.used_mp
    assert res.cancellation < MP_ESCALATE_THRESHOLD
    assert abs(res.omega) < 1e-9
    assert res.certificate.get("escalated_bits", 0) >= 160
    # the Wronskian probe survives the cancellation because it runs at the
    # escalated precision alongside the boundary route
    assert res.route_gap < 1e-9
    assert res.omega_alt == pytest.approx(res.omega, rel=1e-6, abs=1e-20)
    # far from the spectrum the float route is kept
    far = jost_function(geo_super, 1.4 + 0.0j, n_trunc=96)
    assert not far.used_mp


# ---------------------------------------------------------------------------
# eigenvalues
# ---------------------------------------------------------------------------


def test_eigenvalues_match_pinned_list(geo_super):
    got = find_eigenvalues(geo_super, 0.0, 20.0, grid=400, tol=1e-12)
    assert len(got.eigenvalues) == len(GEO_EIGS)
    for g, e in zip(got.eigenvalues, GEO_EIGS):
        assert g == pytest.approx(e, abs=5e-9)
    assert all(r < 1e-8 for r in got.omega_residuals)


def test_eigenvalues_match_finite_sections(geo_super):
    # independent route: high-precision Sturm bisection on leading blocks,
    # stable under enlarging the section
    s60 = finite_section_eigs(geo_super, 60, 0.0, 20.0)
    s80 = finite_section_eigs(geo_super, 80, 0.0, 20.0)
    assert len(s60) == len(s80) == len(GEO_EIGS)
    for v60, v80, e in zip(s60, s80, GEO_EIGS):
        assert v60 == pytest.approx(v80, abs=1e-12)
        assert v60 == pytest.approx(e, abs=5e-9)


def test_finite_section_methods_agree(geo_super):
    # the float route carries eps * ||A|| absolute error, so the comparison
    # runs on a small section where ||A|| ~ 2^12 keeps that near 1e-12
    sturm = finite_section_eigs(geo_super, 12, 0.0, 20.0, method="sturm")
    fl = finite_section_eigs(geo_super, 12, 0.0, 20.0, method="float")
    assert len(sturm) == len(fl) > 0
    for a, b in zip(sturm, fl):
        assert a == pytest.approx(b, abs=1e-9)


def test_single_row_section(nsq):
    # the 1-by-1 section is just (b_0)
    for method in ("sturm", "float"):
        got = finite_section_eigs(nsq, 1, -1.0, 1.0, method=method)
        assert len(got) == 1
        assert got[0] == pytest.approx(eval_b(nsq, 0), abs=1e-12)


def test_sturm_bits_follow_entry_growth():
    # entries 2^(n^2) at N = 16 sit near 2^225: the small eigenvalues are
    # invisible at the 224-bit floor unless the budget tracks log2(a_N);
    # cross-check the automatic budget against a deliberately generous one
    m = Stretched(gamma=1.0, x=2.0, q_tilde=2.0, beta_const=1.5)
    window = (-(2.0 ** 70), 2.0 ** 70)
    auto = finite_section_eigs(m, 16, *window)
    wide = finite_section_eigs(m, 16, *window, bits=900)
    assert len(auto) == len(wide) > 0
    for a, b in zip(auto, wide):
        assert a == pytest.approx(b, rel=1e-10, abs=1e-10)


def test_two_by_two_closed_form():
    m = Tabulated(a_values=(1.5, 1.0), b_values=(0.3, -0.7))
    mean = (0.3 - 0.7) / 2.0
    disc = math.sqrt((0.3 + 0.7) ** 2 / 4.0 + 1.5 ** 2)
    expect = (mean - disc, mean + disc)
    for method in ("sturm", "float"):
        got = finite_section_eigs(m, 2, -5.0, 5.0, method=method)
        assert len(got) == 2
        assert got[0] == pytest.approx(expect[0], rel=1e-12)
        assert got[1] == pytest.approx(expect[1], rel=1e-12)


def test_sturm_zero_pivot_at_diagonal_entry():
    # shift exactly equal to b_0 makes the first pivot vanish; the count
    # must still be the number of eigenvalues below the shift
    m = Tabulated(a_values=(1.5, 1.0), b_values=(0.3, -0.7))
    with mpmath.workprec(160):
        c = _sturm_count(m, mpmath.mpf("0.3"), 2, mpmath)
    assert c == 1  # lambda_- < 0.3 < lambda_+


def test_float_method_refuses_overflowing_entries():
    m = Stretched(gamma=1.0, x=2.0, q_tilde=2.0, beta_const=1.5)
    with pytest.raises(PrecisionError):
        finite_section_eigs(m, 60, 0.0, 10.0, method="float")


def test_eigenvalue_gates(nsq, geo_super):
    with pytest.raises(RegimeMismatch):
        find_eigenvalues(nsq, 0.0, 10.0)
    with pytest.raises(ModelError):
        find_eigenvalues(geo_super, 5.0, 1.0)


# ---------------------------------------------------------------------------
# spectral masses
# ---------------------------------------------------------------------------


def test_mass_two_routes_agree(geo_super):
    res = spectral_mass(geo_super, GEO_EIGS[0], n_trunc=96)
    assert res.agreement < 1e-7
    assert 0.0 < res.mass_norm < 1.0
    assert res.n_stop > 10


def test_mass_total_near_one(geo_super):
    rep = spectral_report(geo_super, 0.0, 20.0, grid=400)
    assert len(rep["eigenvalues"]) == len(GEO_EIGS)
    assert all(a < 1e-6 for a in rep["mass_agreement"])
    total = rep["mass_total"]
    assert 0.999 < total <= 1.0 + 1e-6
    assert rep["n_trunc"] >= 64


def test_mass_needs_supercritical(nsq):
    with pytest.raises(RegimeMismatch):
        spectral_mass(nsq, 1.0)


# ---------------------------------------------------------------------------
# deficiency (1,1): zeros are still located but labeled, masses refuse
# ---------------------------------------------------------------------------


def test_deficiency_case_is_labeled_and_masses_refuse():
    # x = 4 with beta = -1.1: rho = 1.1 + sqrt(0.21) < 2 = sqrt(x), so the
    # divergence test fails and the operator has deficiency indices (1,1)
    m = Geometric(gamma=1.0, x=4.0, beta_const=-1.1)
    assert check_essential_selfadjointness(m).verdict == "deficiency_1_1"
    with pytest.warns(RuntimeWarning, match="extension-dependent"):
        got = find_eigenvalues(m, 0.0, 5.0, grid=64)
    assert got.extension_dependent
    with pytest.raises(RegimeMismatch):
        spectral_mass(m, 1.0)
    with pytest.raises(RegimeMismatch):
        resolvent_entry(m, 1j, 0, 0)


def test_esa_case_not_labeled(geo_super):
    got = find_eigenvalues(geo_super, 0.6, 0.8, grid=16)
    assert not got.extension_dependent


def test_second_wronskian_stays_away_from_zero_at_eigenvalue(geo_super):
    # at an eigenvalue W(P, f) = Omega vanishes, but P stays proportional to
    # f there, so the growing companion g keeps W(P, g) = 1/f_0 order one
    lam = find_eigenvalues(geo_super, 0.6, 0.8, grid=16, tol=1e-14).eigenvalues[0]
    bundle = jost_f(geo_super, complex(lam), 96)
    g = growing_g(geo_super, bundle)
    P = orthonormal_polys(geo_super, complex(lam), 4)
    w_pg = wronskian(geo_super, P.value, g.value, 2).to_complex()
    omega = jost_function(geo_super, complex(lam), n_trunc=96).omega
    assert abs(w_pg) > 1e3 * abs(omega)
    assert w_pg == pytest.approx(1.0 / bundle.f_complex(0), rel=1e-6)


# ---------------------------------------------------------------------------
# resolvent
# ---------------------------------------------------------------------------


def test_resolvent_row_identity(geo_super):
    # (J - z) R e_3 = e_3, rows 0..6
    z = 0.7 + 0.9j
    col = {n: resolvent_entry(geo_super, z, n, 3, n_trunc=96) for n in range(0, 8)}
    for n in range(0, 7):
        acc = (eval_b(geo_super, n) - z) * col[n] + eval_a(geo_super, n) * col[n + 1]
        if n >= 1:
            acc += eval_a(geo_super, n - 1) * col[n - 1]
        target = 1.0 if n == 3 else 0.0
        assert acc == pytest.approx(target, abs=1e-9)


def test_resolvent_is_herglotz(geo_super):
    m_val = resolvent_entry(geo_super, 1j, 0, 0)
    assert m_val.imag > 0
    m_conj = resolvent_entry(geo_super, -1j, 0, 0)
    assert m_conj == pytest.approx(m_val.conjugate(), rel=1e-9)


def test_resolvent_symmetric(geo_super):
    z = 0.4 + 1.1j
    assert resolvent_entry(geo_super, z, 2, 5) == resolvent_entry(geo_super, z, 5, 2)


def test_resolvent_matches_spectral_decomposition(geo_super):
    # independent route: R_00(z) = sum_k mass_k / (lambda_k - z); the five
    # pinned eigenvalues carry all but ~4e-9 of the total mass
    z = 1.0 + 1.0j
    direct = resolvent_entry(geo_super, z, 0, 0, n_trunc=96)
    total = 0.0j
    for lam in GEO_EIGS:
        mass = spectral_mass(geo_super, lam, n_trunc=96).mass_norm
        total += mass / (lam - z)
    assert direct == pytest.approx(total, abs=5e-7)


def test_resolvent_gates(nsq, geo_super):
    with pytest.raises(ModelError):
        resolvent_entry(geo_super, 1.0, 0, 0)   # real z
    with pytest.raises(ModelError):
        resolvent_entry(geo_super, 1j, -1, 0)   # bad index
    with pytest.raises(RegimeMismatch):
        resolvent_entry(nsq, 1j, 0, 0)          # |beta_inf| < 1


def test_resolvent_pole_detection(geo_super):
    lam = find_eigenvalues(geo_super, 0.6, 0.8, grid=16, tol=1e-14).eigenvalues[0]
    # at a short truncation the achieved accuracy cannot separate z from the
    # pole: Im z = 1e-12 sits far below the truncation certificate
    with pytest.raises(PoleAtZ):
        resolvent_entry(geo_super, complex(lam, 1e-12), 0, 0, n_trunc=24)
    # with an adequate truncation the same z is resolved (huge but finite)
    val = resolvent_entry(geo_super, complex(lam, 1e-12), 0, 0, n_trunc=96)
    assert abs(val) > 1e6
    assert math.isfinite(abs(val))
