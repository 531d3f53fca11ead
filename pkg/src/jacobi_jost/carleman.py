"""Classical-growth branch: sum 1/a_n = inf.

Here the corrector construction still works, but the ansatz roots must
absorb the spectral parameter, because alpha_n |z| alone is no longer
summable.  The z-dependent roots are

    |beta_n| < 1:  zeta_n(z) = (beta_n - i w_n) exp( i z alpha_n / w_n ),
                   w_n = sqrt(1 - beta_n^2),
    |beta_n| > 1:  zeta_n(z) = (beta_n - w_n) exp( - z alpha_n / w_n ),
                   w_n = sign(beta_n) sqrt(beta_n^2 - 1),

which satisfy zeta + 1/zeta = 2 beta + 2 z alpha + O(alpha^2), so the
remainder r_n collects only the summable pieces (increments of beta and
alpha, k_n - 1, alpha_n^2 |z|^2).  Note the SIGNED square root in the
|beta| > 1 branch: taking |beta| - sqrt(beta^2-1) with an unsigned tilt
exp(-z alpha/sqrt(beta^2-1)) leaves a non-summable remainder ~ 4 z alpha_n
whenever beta_n < 0 (easy to check against the recurrence numerically).

The accumulated tilt psi_n = sum_{m<n} alpha_m / w_m diverges -- that is the
point: it carries the z-dependence of the phase/decay of the Jost solution.
Below the critical line the absolutely continuous spectral density comes out
of the boundary value as

    d rho / d lam = sqrt(1 - beta_inf^2) / (pi |Omega(lam + i0)|^2),

with Omega evaluated directly at real lam (the root choice encodes the +i0
limit).

Remainder tails here are empirical (fitted power law on the last computed
decade, doubled), never certified; certificates carry that flag.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .ansatz import AnsatzTable
from .coefficients import CoefficientModel, Regime, classify, derived
from .errors import ModelError, NearCritical, RegimeMismatch
from .logscale import LogComplex
from .solutions import orthonormal_polys
from .volterra import JostBundle, jost_f

__all__ = [
    "CarlemanAnsatz",
    "carleman_table",
    "carleman_jost",
    "omega_carleman",
    "omega_extrapolated",
    "ac_spectral_density",
    "poly_from_jost",
    "sine_model",
]

BRANCH_TOL = 1e-10


@dataclass
class CarlemanAnsatz:
    table: AnsatzTable
    psi: np.ndarray          # accumulated tilt sum_{m<n} alpha_m / w_m
    tail_exponent: float     # fitted decay power of |r_m|


def _empirical_r_tail(r_abs: np.ndarray, n_max: int) -> tuple[float, float]:
    """Fit |r_m| ~ c m^{-s} over the last decade; return (bound, s).

    bound = 2 * c * n_max^{1-s} / (s - 1), or inf when the fit is not
    integrable.  Uncertified by construction.
    """
    lo = max(2, n_max // 10 * 9)
    ms = np.arange(lo, n_max + 1)
    vals = r_abs[lo - 1 : n_max]  # r_abs[i] = |r_{i+1}|
    mask = vals > 0
    if mask.sum() < 8:
        return 0.0, math.inf
    x = np.log(ms[mask])
    y = np.log(vals[mask])
    s, logc = np.polyfit(x, y, 1)
    s = -float(s)
    c = math.exp(float(logc))
    if s <= 1.02:
        return math.inf, s
    return 2.0 * c * n_max ** (1.0 - s) / (s - 1.0), s


def carleman_table(
    model: CoefficientModel,
    z: complex,
    n_max: int,
    regime: Optional[Regime] = None,
) -> CarlemanAnsatz:
    if regime is None:
        regime = classify(model)
    if not regime.is_carleman:
        raise RegimeMismatch(
            "model has summable 1/a_n; use the plain ansatz (z-independent roots)"
        )
    if n_max < 2:
        raise ModelError("n_max must be at least 2")
    z = complex(z)
    N = n_max

    log_a = np.array([model.log_a(n) for n in range(-1, N + 2)])
    beta = np.array([model.beta_at(n) for n in range(0, N + 1)])
    la_prev, la_cur, la_next = log_a[: N + 1], log_a[1 : N + 2], log_a[2 : N + 3]
    alpha = 0.5 * np.exp(-0.5 * (la_prev + la_cur))
    kappa = np.exp(0.5 * (la_next - la_cur))
    k = np.exp(la_cur - 0.5 * (la_prev + la_next))
    k[0] = np.nan

    crit = np.abs(1.0 - beta * beta) < BRANCH_TOL
    if np.any(crit):
        raise NearCritical(
            f"|beta_n| within {BRANCH_TOL} of 1 at n = {int(np.nonzero(crit)[0][0])}; "
            "the z-dependent root branch degenerates there"
        )

    inside = np.abs(beta) < 1.0
    w = np.where(inside, np.sqrt(np.abs(1.0 - beta * beta)),
                 np.sign(beta) * np.sqrt(np.abs(beta * beta - 1.0)))
    zeta0 = np.where(inside, beta - 1j * w, beta - w).astype(np.complex128)
    expo = np.where(inside, 1j * z * alpha / w, -z * alpha / w)
    zeta = zeta0 * np.exp(expo)

    # log magnitude and unwrapped phase, assembled analytically (no angle
    # wrapping: the base angle is -arccos(beta) resp. 0/pi, the tilt is the
    # imaginary part of the exponent)
    base_arg = np.where(inside, -np.arccos(np.clip(beta, -1.0, 1.0)),
                        np.where(beta < 0, math.pi, 0.0))
    arg_zeta = base_arg + expo.imag
    log_zeta_abs = np.where(inside, 0.0, np.log(np.abs(zeta0))) + expo.real

    r = np.full(N + 1, np.nan, dtype=np.complex128)
    inv_zeta = 1.0 / zeta
    r[1:] = inv_zeta[:-1] - 2.0 * beta[1:] + k[1:] * zeta[1:] - 2.0 * z * alpha[1:]

    logq_abs = -0.5 * la_cur + np.concatenate(([0.0], np.cumsum(log_zeta_abs[:-1])))
    q_phase = np.concatenate(([0.0], np.cumsum(arg_zeta[:-1])))

    step = np.where(inside, np.arccos(np.clip(beta, -1.0, 1.0)),
                    np.arccosh(np.maximum(1.0, np.abs(beta))))
    phi = np.concatenate(([0.0], np.cumsum(step[:-1])))
    psi = np.concatenate(([0.0], np.cumsum((alpha / w)[:-1])))

    abs_r = np.abs(r[1:])
    r_abs_suffix = np.zeros(N + 1)
    r_abs_suffix[:-1] = np.cumsum(abs_r[::-1])[::-1]
    r_beyond, s_fit = _empirical_r_tail(abs_r, N)

    table = AnsatzTable(
        model=model,
        z=z,
        regime=regime,
        n_max=N,
        alpha=alpha,
        beta=beta,
        kappa=kappa,
        k=k,
        zeta=zeta,
        r=r,
        logq_abs=logq_abs,
        q_phase=q_phase,
        phi=phi,
        r_abs_suffix=r_abs_suffix,
        r_beyond=r_beyond,
    )
    return CarlemanAnsatz(table=table, psi=psi, tail_exponent=s_fit)


def carleman_jost(
    model: CoefficientModel,
    z: complex,
    n_max: int,
    *,
    regime: Optional[Regime] = None,
    tol: float = 1e-10,
) -> JostBundle:
    ca = carleman_table(model, z, n_max, regime=regime)
    bundle = jost_f(model, z, n_max, table=ca.table, tol=tol)
    bundle.meta["tail_certified"] = False
    bundle.meta["tail_exponent"] = ca.tail_exponent
    bundle.meta["psi_n_max"] = float(ca.psi[-1])
    return bundle


def omega_carleman(
    model: CoefficientModel,
    lam: float,
    n_trunc: int,
    *,
    regime: Optional[Regime] = None,
    tol: float = 1e-10,
) -> complex:
    """Omega(lam + i0): the root branch already encodes the upper-plane limit,
    so real lam is evaluated directly."""
    return carleman_jost(model, complex(lam), n_trunc, regime=regime, tol=tol).omega


def omega_extrapolated(
    model: CoefficientModel,
    lam: float,
    n_trunc: int,
    *,
    regime: Optional[Regime] = None,
) -> complex:
    """Richardson step for the O(n^{-1/2}) phase drift of truncated Omega:
    evaluate at n_trunc and 2 n_trunc and eliminate the leading term."""
    o1 = omega_carleman(model, lam, n_trunc, regime=regime)
    o2 = omega_carleman(model, lam, 2 * n_trunc, regime=regime)
    return o2 + (o2 - o1) / (math.sqrt(2.0) - 1.0)


def ac_spectral_density(
    model: CoefficientModel,
    lams: Sequence[float],
    *,
    n_trunc: int = 20000,
    regime: Optional[Regime] = None,
) -> np.ndarray:
    """d rho / d lam on a real grid (classical growth, |beta_inf| < 1)."""
    if regime is None:
        regime = classify(model)
    if not (regime.is_carleman and regime.is_subcritical):
        raise RegimeMismatch("a.c. density needs classical growth with |beta_inf| < 1")
    pref = math.sqrt(1.0 - regime.beta_inf**2) / math.pi
    out = np.empty(len(lams))
    for i, lam in enumerate(lams):
        om = omega_carleman(model, float(lam), n_trunc, regime=regime)
        out[i] = pref / abs(om) ** 2
    return out


# --------------------------------------------------------------------------
# polynomial asymptotics on the a.c. spectrum
# --------------------------------------------------------------------------

def poly_from_jost(bundle: JostBundle, regime: Regime, ns: Sequence[int]) -> np.ndarray:
    """Exact recombination P_n = kappa_inf (conj(Omega) f_n - Omega conj(f_n))
    / (2i sqrt(1 - beta_inf^2)) at real lam, evaluated from the computed f."""
    om = bundle.omega
    denom = 2j * math.sqrt(1.0 - regime.beta_inf**2)
    out = np.empty(len(ns), dtype=np.complex128)
    for i, n in enumerate(ns):
        fn = bundle.f_complex(n)
        out[i] = regime.kappa_inf * (om.conjugate() * fn - om * fn.conjugate()) / denom
    return out


def sine_model(
    bundle: JostBundle, regime: Regime, ns: Sequence[int]
) -> np.ndarray:
    """Leading sine form: replace f_n by its pure ansatz a_n^{-1/2}
    e^{i chi_n} (chi_n the accumulated root phase), leaving

        P_n ~ kappa_inf |Omega| a_n^{-1/2} sin(chi_n - arg Omega)
              / sqrt(1 - beta_inf^2).
    """
    om = bundle.omega
    omarg = math.atan2(om.imag, om.real)
    pref = regime.kappa_inf * abs(om) / math.sqrt(1.0 - regime.beta_inf**2)
    out = np.empty(len(ns))
    for i, n in enumerate(ns):
        chi = bundle.table.q_phase[n]
        out[i] = pref * math.exp(-0.5 * bundle.model.log_a(n)) * math.sin(chi - omarg)
    return out
