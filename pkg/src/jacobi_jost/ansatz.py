"""Model-adapted ansatz: root sequence zeta_n, phase sums, prefactor Q_n,
and the remainder r_n that measures how far the ansatz is from an exact
solution.

With F_n = Q_n u_n, the three-term recurrence

    a_{n-1} F_{n-1} + (b_n - z) F_n + a_n F_{n+1} = 0

becomes the normalized form

    zeta_{n-1}^{-1} u_{n-1} - 2 (alpha_n z + beta_n) u_n + k_n zeta_n u_{n+1} = 0,

where Q_n = a_n^{-1/2} * prod_{m=0}^{n-1} zeta_m.  Substituting u == 1 leaves
the remainder

    r_n = zeta_{n-1}^{-1} - 2 beta_n + k_n zeta_n - 2 z alpha_n
        = (zeta_{n-1}^{-1} - zeta_n^{-1}) + (k_n - 1) zeta_n - 2 z alpha_n,

(the second form uses zeta + 1/zeta = 2 beta, exact for both root branches).
r in ell^1 is what drives the Volterra construction of the actual solution.

zeta_n is the root of zeta^2 - 2 beta_n zeta + 1 = 0 inside the closed unit
disc: e^{-i arccos(beta)} on |beta| <= 1, and sign(beta) (|beta| -
sqrt(beta^2-1)) outside.  Fast-growth models only; the classical-growth
(divergent sum 1/a_n) analogue with its z-dependent roots lives in
``carleman``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .coefficients import CoefficientModel, Regime, RegimeKind, classify, derived
from .errors import ModelError, RegimeMismatch, TailNotSummable, UnsupportedRegime
from .logscale import LogComplex

__all__ = [
    "zeta_root",
    "remainder_r",
    "AnsatzTable",
    "build_table",
    "tail_r_bound",
]


def zeta_root(beta: float) -> complex:
    """The root of zeta^2 - 2 beta zeta + 1 = 0 in the closed unit disc.

    (The two roots are reciprocal; the product of solutions built on them
    spans the solution space, and the decaying one needs |zeta| <= 1.)
    """
    if abs(beta) <= 1.0:
        return complex(beta, -math.sqrt(1.0 - beta * beta))
    s = math.copysign(1.0, beta)
    return complex(s * (abs(beta) - math.sqrt(beta * beta - 1.0)), 0.0)


def remainder_r(model: CoefficientModel, z: complex, n: int) -> complex:
    """r_n for a single index (n >= 1)."""
    if n < 1:
        raise ModelError("the remainder r_n is defined for n >= 1")
    d = derived(model, n)
    zeta_prev = zeta_root(model.beta_at(n - 1))
    zeta_cur = zeta_root(d.beta)
    return 1.0 / zeta_prev - 2.0 * d.beta + d.k * zeta_cur - 2.0 * z * d.alpha


def tail_r_bound(model: CoefficientModel, z: complex, M: int, regime: Regime) -> float:
    """Certified upper bound for sum_{m > M} |r_m|.

    Uses |r_m| <= c_br |beta_m - beta_{m-1}| + |k_m - 1| + 2|z| alpha_m with a
    branch factor c_br bounding |d zeta^{-1} / d beta| over the tail; the
    factor is taken from a sampled envelope of beta beyond M (exact for the
    constant-beta families, where the beta-difference term vanishes anyway).
    Returns inf when a constituent series is not summable.
    """
    try:
        bd = model.betadiff_tail(M)
        kd = model.kdev_tail(M)
        ad = model.alpha_tail(M)
    except TailNotSummable:
        return math.inf

    if bd == 0.0:
        factor = 0.0
    else:
        samples = [abs(model.beta_at(m)) for m in range(M, M + 257)]
        bmax = max(max(samples), abs(regime.beta_inf))
        if regime.is_subcritical:
            if bmax >= 1.0 - 1e-9:
                return math.inf
            factor = 1.25 / math.sqrt(1.0 - bmax * bmax)
        else:
            bmin = min(min(samples), abs(regime.beta_inf))
            if bmin <= 1.0 + 1e-9:
                return math.inf
            factor = 1.25 * (1.0 + bmax / math.sqrt(bmin * bmin - 1.0))
    return factor * bd + kd + 2.0 * abs(z) * ad


@dataclass
class AnsatzTable:
    """All per-index ansatz data for a model at a spectral parameter z.

    Arrays are indexed by n = 0..n_max; entries that need index n-1 or n+1
    use the family extension of the coefficients.  ``r[0]`` is nan (r starts
    at n = 1).  ``logq_abs``/``q_phase`` give Q_n = exp(logq_abs) *
    exp(i q_phase) without overflow; ``phi`` is the accumulated positive
    phase: sum of arccos(beta_m) below the critical line, sum of
    arccosh|beta_m| above it.
    """

    model: CoefficientModel
    z: complex
    regime: Regime
    n_max: int
    alpha: np.ndarray
    beta: np.ndarray
    kappa: np.ndarray
    k: np.ndarray
    zeta: np.ndarray
    r: np.ndarray
    logq_abs: np.ndarray
    q_phase: np.ndarray
    phi: np.ndarray
    r_abs_suffix: np.ndarray
    r_beyond: float

    def Q(self, n: int) -> LogComplex:
        return LogComplex(self.logq_abs[n], self.q_phase[n])

    def R(self, n: int) -> float:
        """Certified sum_{m > n} |r_m| (in-table suffix plus tail bound)."""
        return float(self.r_abs_suffix[n]) + self.r_beyond

    def sigma(self, q: int) -> complex:
        """sigma_q = zeta_q zeta_{q-1} (q >= 1), the kernel's step factor."""
        return complex(self.zeta[q] * self.zeta[q - 1])


def build_table(
    model: CoefficientModel,
    z: complex,
    n_max: int,
    regime: Optional[Regime] = None,
) -> AnsatzTable:
    if regime is None:
        regime = classify(model)
    if regime.kind is RegimeKind.UNSUPPORTED:
        raise UnsupportedRegime(
            f"|beta_inf| = {abs(regime.beta_inf):.8g} is too close to 1"
        )
    if regime.is_carleman:
        raise RegimeMismatch(
            "model has divergent sum 1/a_n; use the carleman module's ansatz"
        )
    if n_max < 2:
        raise ModelError("n_max must be at least 2")

    z = complex(z)
    N = n_max
    log_a = np.array([model.log_a(n) for n in range(-1, N + 2)])  # offset +1
    beta = np.array([model.beta_at(n) for n in range(0, N + 1)])

    la_prev = log_a[0 : N + 1]
    la_cur = log_a[1 : N + 2]
    la_next = log_a[2 : N + 3]
    alpha = 0.5 * np.exp(-0.5 * (la_prev + la_cur))
    kappa = np.exp(0.5 * (la_next - la_cur))
    k = np.exp(la_cur - 0.5 * (la_prev + la_next))
    k[0] = np.nan

    inside = np.abs(beta) <= 1.0
    zeta = np.where(
        inside,
        beta - 1j * np.sqrt(np.maximum(0.0, 1.0 - beta * beta)),
        np.sign(beta) * (np.abs(beta) - np.sqrt(np.maximum(0.0, beta * beta - 1.0))),
    ).astype(np.complex128)

    # r_n = (zeta_{n-1}^{-1} - zeta_n^{-1}) + (k_n - 1) zeta_n - 2 z alpha_n
    r = np.full(N + 1, np.nan, dtype=np.complex128)
    inv_zeta = 1.0 / zeta
    r[1:] = (inv_zeta[:-1] - inv_zeta[1:]) + (k[1:] - 1.0) * zeta[1:] - 2.0 * z * alpha[1:]

    # Q_n = a_n^{-1/2} prod_{m<n} zeta_m, accumulated in log magnitude and
    # unwrapped phase (arg zeta = -arccos(beta) inside, 0 or pi outside).
    log_zeta_abs = np.log(np.abs(zeta))
    arg_zeta = np.where(inside, -np.arccos(np.clip(beta, -1.0, 1.0)), np.where(beta < 0, math.pi, 0.0))
    logq_abs = -0.5 * la_cur + np.concatenate(([0.0], np.cumsum(log_zeta_abs[:-1])))
    q_phase = np.concatenate(([0.0], np.cumsum(arg_zeta[:-1])))

    # positive phase sums: arccos(beta) below, arccosh|beta| above
    step = np.where(
        inside,
        np.arccos(np.clip(beta, -1.0, 1.0)),
        np.arccosh(np.maximum(1.0, np.abs(beta))),
    )
    phi = np.concatenate(([0.0], np.cumsum(step[:-1])))

    abs_r = np.abs(r[1:])
    r_abs_suffix = np.zeros(N + 1)
    r_abs_suffix[:-1] = np.cumsum(abs_r[::-1])[::-1]
    r_beyond = tail_r_bound(model, z, N, regime)

    return AnsatzTable(
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
