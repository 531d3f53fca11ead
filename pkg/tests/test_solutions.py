import math

import numpy as np
import pytest

from jacobi_jost.ansatz import build_table
from jacobi_jost.coefficients import Geometric, Stretched, classify, eval_a, eval_b
from jacobi_jost.errors import ModelError, RegimeMismatch
from jacobi_jost.solutions import (
    fit_k_coeffs,
    growing_g,
    growing_limit,
    identity_kappa,
    orthonormal_polys,
    poly_prefactor_supercritical,
    recurrence_solve,
    scattering_kappa,
    second_kind_polys,
    wronskian,
    wronskian_constancy,
)
from jacobi_jost.volterra import jost_f, jost_pair

# ---------------------------------------------------------------------------
# forward recurrence
# ---------------------------------------------------------------------------


def test_polys_satisfy_recurrence(nsq):
    z = 1.7 - 0.4j
    P = orthonormal_polys(nsq, z, 40)
    assert P.complex_at(-1) == 0.0
    assert P.complex_at(0) == 1.0
    for n in range(1, 39):
        terms = (
            eval_a(nsq, n - 1) * P.complex_at(n - 1),
            (eval_b(nsq, n) - z) * P.complex_at(n),
            eval_a(nsq, n) * P.complex_at(n + 1),
        )
        assert abs(sum(terms)) / max(abs(t) for t in terms) < 1e-12


def test_poly_degree_structure(nsq):
    # P_n is a degree-n polynomial with positive leading coefficient:
    # at huge real z the log-magnitude grows like n log z
    P = orthonormal_polys(nsq, 1e8, 6)
    for n in range(1, 7):
        slope = P.value(n).log_abs - P.value(n - 1).log_abs
        assert slope == pytest.approx(math.log(1e8) - math.log(eval_a(nsq, n - 1)), rel=1e-6)


def test_seq_index_guard(nsq):
    P = orthonormal_polys(nsq, 1.0, 10)
    with pytest.raises(ModelError):
        P.value(11)
    with pytest.raises(ModelError):
        P.value(-2)


# ---------------------------------------------------------------------------
# Wronskians
# ---------------------------------------------------------------------------


def test_first_and_second_kind_wronskian_is_one(nsq, geo_super):
    z = 0.9 + 0.3j
    # subcritical: both solutions scale like a_n^{-1/2}, so the Wronskian
    # evaluates without cancellation at any index
    P = orthonormal_polys(nsq, z, 60)
    Q = second_kind_polys(nsq, z, 60)
    ref, spread = wronskian_constancy(nsq, P.value, Q.value, [-1, 0, 5, 20, 59])
    assert ref == pytest.approx(1.0, rel=1e-10)
    assert spread < 1e-10
    # supercritical: both polys pick up the growing component, and the
    # difference of near-equal products costs ~a_n in precision -- probes
    # must stay where a_n is moderate
    P = orthonormal_polys(geo_super, z, 60)
    Q = second_kind_polys(geo_super, z, 60)
    ref, spread = wronskian_constancy(geo_super, P.value, Q.value, [-1, 0, 3, 8])
    assert ref == pytest.approx(1.0, rel=1e-11)
    assert spread < 1e-11


def test_wronskian_survives_extreme_growth():
    # a_n = 2^(n^2): P_n leaves the float range after a handful of steps,
    # the log-scaled path keeps the Wronskian pinned at 1 up to n = 60
    m = Stretched(gamma=1.0, x=2.0, q_tilde=2.0, beta_const=0.3)
    z = 0.4 + 0.1j
    P = orthonormal_polys(m, z, 61)
    Q = second_kind_polys(m, z, 61)
    assert P.value(60).log_abs < -1000  # genuinely outside float range
    for n in (10, 35, 60):
        w = wronskian(m, P.value, Q.value, n)
        assert w.to_complex() == pytest.approx(1.0, rel=1e-9)


def test_boundary_wronskian_gives_omega(nsq):
    z = 1.2 + 0.8j
    bundle = jost_f(nsq, z, 150)
    P = orthonormal_polys(nsq, z, 150)
    w = wronskian(nsq, P.value, bundle.f, -1)
    assert w.to_complex() == pytest.approx(bundle.omega, rel=1e-12)


# ---------------------------------------------------------------------------
# expansion coefficients in the Jost basis
# ---------------------------------------------------------------------------


def test_fit_recovers_planted_coefficients(geo_sub):
    # the geometric tail truncates at ~2^-N, so the computed pair is the
    # true one to all float digits and the planted coefficients come back
    z = 1.0 + 0.6j
    f, ft = jost_pair(geo_sub, z, 200)

    def F(n):
        return f.f(n).scaled(2.0) + ft.f(n).scaled(3.0)

    fit = fit_k_coeffs(geo_sub, F, f)
    assert fit.k_plus == pytest.approx(2.0, rel=1e-11)
    assert fit.k_minus == pytest.approx(3.0, rel=1e-11)
    assert fit.wronskian_spread < 1e-9
    assert fit.kappa == pytest.approx(2.0, rel=1e-11)


def test_fit_truncation_scaling(nsq):
    # power-law tails leave an O(R_N) boundary-truncation imprint on the
    # fitted coefficients; doubling N must shrink it accordingly
    z = 1.0 + 0.6j
    errs = []
    for N in (200, 400, 800):
        f, ft = jost_pair(nsq, z, N)

        def F(n):
            return f.f(n).scaled(2.0) + ft.f(n).scaled(3.0)

        fit = fit_k_coeffs(nsq, F, f)
        errs.append(abs(fit.k_plus - 2.0))
    assert errs[2] < errs[1] < errs[0]
    assert errs[2] < 0.3 * errs[0]


def test_fit_requires_subcritical(geo_super):
    z = 0.25
    bundle = jost_f(geo_super, z, 100)
    P = orthonormal_polys(geo_super, z, 100)
    with pytest.raises(RegimeMismatch):
        fit_k_coeffs(geo_super, P.value, bundle)


def test_scattering_kappa_frozen_values(nsq):
    # pinned reference: a_n = n^2 at z = +/- i
    assert scattering_kappa(nsq, 1j, 4000).kappa == pytest.approx(
        0.5895994593919257, rel=1e-9
    )
    assert scattering_kappa(nsq, -1j, 4000).kappa == pytest.approx(
        3.1692248584001623, rel=1e-9
    )


def test_kappa_identity(nsq):
    rep = identity_kappa(nsq, 1j, n_sum=500, n_fit=4000)
    assert rep.kappa_upper > rep.kappa_lower  # kappa(-i) > kappa(i)
    # truncated sum undershoots, and the certified tail explains the gap
    assert 0 < rep.lhs - rep.rhs_partial <= rep.tail_bound
    assert rep.gap < 1e-2
    with pytest.raises(ModelError):
        identity_kappa(nsq, 1.0 - 1j)


# ---------------------------------------------------------------------------
# growing companion
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("z", [1.0 + 1.0j, 2.5 + 0.5j])
def test_growing_companion_wronskian(nsq, z):
    bundle = jost_f(nsq, z, 300)
    g = growing_g(nsq, bundle)
    ref, spread = wronskian_constancy(nsq, bundle.f, g.value, [5, 40, 150, 250])
    assert ref == pytest.approx(1.0, rel=1e-9)
    assert spread < 1e-9
    # the seed index carries g = 0
    assert g.value(g.start).is_zero


def test_growing_companion_start_shift_is_still_solution(geo_sub):
    z = 0.3 + 0.2j
    bundle = jost_f(geo_sub, z, 200)
    g0 = growing_g(geo_sub, bundle)
    g7 = growing_g(geo_sub, bundle, n_start=7)
    ref0, _ = wronskian_constancy(geo_sub, bundle.f, g0.value, [20, 90])
    ref7, _ = wronskian_constancy(geo_sub, bundle.f, g7.value, [20, 90])
    assert ref0 == pytest.approx(1.0, rel=1e-9)
    assert ref7 == pytest.approx(1.0, rel=1e-9)
    # the two starts differ by a multiple of f: Wronskian cannot see it,
    # the values can
    assert abs(g0.value(50).to_complex() - g7.value(50).to_complex()) > 0


def test_growing_limit_shape(geo_super):
    z = 0.25
    bundle = jost_f(geo_super, z, 400)
    g = growing_g(geo_super, bundle)
    vals, pred = growing_limit(bundle.table, g, [300])
    assert pred == pytest.approx(-math.sqrt(2.0) / (2.0 * math.sqrt(0.21)), rel=1e-14)
    assert vals[0].real == pytest.approx(pred, rel=1e-8)
    assert abs(vals[0].imag) < 1e-8 * abs(pred)


def test_growing_limit_needs_supercritical(nsq):
    z = 1.0 + 1.0j
    bundle = jost_f(nsq, z, 60)
    g = growing_g(nsq, bundle)
    with pytest.raises(RegimeMismatch):
        growing_limit(bundle.table, g, [30])


# ---------------------------------------------------------------------------
# polynomial growth above the critical line
# ---------------------------------------------------------------------------


def test_poly_prefactor_supercritical(geo_super):
    out = poly_prefactor_supercritical(geo_super, 1j, n_lo=200, n_hi=400)
    assert out["predicted"] == pytest.approx(
        math.sqrt(2.0) * abs(out["omega"]) / (2.0 * math.sqrt(0.21)), rel=1e-12
    )
    # pinned reference value for a_n = 2^n, beta = -1.1 at z = i
    assert out["predicted"] == pytest.approx(3.2822679131674075, rel=1e-9)
    assert out["rel_last"] < 1e-9
    assert out["rel_max"] < 1e-6


def test_poly_prefactor_needs_supercritical(nsq):
    with pytest.raises(RegimeMismatch):
        poly_prefactor_supercritical(nsq, 1j)
