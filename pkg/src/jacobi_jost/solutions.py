"""Solution-space tools: forward recurrence with rescaling, Wronskians,
the growing companion of the Jost solution, fitted expansion coefficients,
and asymptotic comparators.

All sequence values are carried as LogComplex because solutions of
fast-growth Jacobi recurrences routinely leave the float range in a few
dozen steps (decay ~ prod |zeta_m| / sqrt(a_n), growth ~ its reciprocal).

Wronskian convention:  W_n(F, G) = a_n (F_n G_{n+1} - F_{n+1} G_n),
constant in n for two solutions at the same z, with a_{-1} = 1/2 at the
boundary index so that W_{-1}(P, f) = -f_{-1}/2 = Omega(z).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .ansatz import AnsatzTable, build_table
from .coefficients import CoefficientModel, Regime, RegimeKind, classify, eval_a, eval_b
from .errors import (
    DegenerateWronskian,
    ModelError,
    RegimeMismatch,
    ZeroCrossing,
)
from .logscale import LogComplex
from .volterra import JostBundle, jost_f, jost_pair

__all__ = [
    "SolutionSeq",
    "recurrence_solve",
    "orthonormal_polys",
    "second_kind_polys",
    "wronskian",
    "wronskian_constancy",
    "growing_g",
    "fit_k_coeffs",
    "KappaFit",
    "scattering_kappa",
    "identity_kappa",
    "IdentityReport",
    "growing_limit",
    "poly_prefactor_supercritical",
]

LogFn = Callable[[int], LogComplex]


@dataclass
class SolutionSeq:
    """A solution of the recurrence stored log-scaled on n = start..stop."""

    start: int
    log_abs: np.ndarray
    phase: np.ndarray

    @property
    def stop(self) -> int:
        return self.start + len(self.log_abs) - 1

    def value(self, n: int) -> LogComplex:
        i = n - self.start
        if not (0 <= i < len(self.log_abs)):
            raise ModelError(f"index {n} outside [{self.start}, {self.stop}]")
        return LogComplex(self.log_abs[i], self.phase[i])

    def complex_at(self, n: int) -> complex:
        return self.value(n).to_complex()

    def __call__(self, n: int) -> LogComplex:
        return self.value(n)


def recurrence_solve(
    model: CoefficientModel,
    z: complex,
    seed_minus1: complex,
    seed_0: complex,
    n_max: int,
) -> SolutionSeq:
    """Run the recurrence a_{n-1} F_{n-1} + (b_n - z) F_n + a_n F_{n+1} = 0
    forward from seeds at n = -1, 0 (a_{-1} = 1/2).

    Coefficients enter only through the ratios a_{n-1}/a_n and b_n/a_n,
    evaluated in log space, so families whose a_n overflow the float range
    are fine; the running pair is renormalized whenever it drifts past 1e150.
    """
    z = complex(z)
    N = n_max
    log_abs = np.empty(N + 2)
    phase = np.empty(N + 2)

    def store(i: int, v: complex, ls: float):
        if v == 0:
            log_abs[i] = -math.inf
            phase[i] = 0.0
        else:
            log_abs[i] = math.log(abs(v)) + ls
            phase[i] = math.atan2(v.imag, v.real)

    v_prev = complex(seed_minus1)
    v_cur = complex(seed_0)
    ls = 0.0
    store(0, v_prev, ls)
    store(1, v_cur, ls)
    for n in range(0, N):
        la_n = model.log_a(n)
        beta_n = model.beta_at(n)
        if n == 0:
            la_prevcoef = math.log(0.5)  # boundary convention a_{-1} = 1/2
        else:
            la_prevcoef = model.log_a(n - 1)
        # F_{n+1} = ((z - b_n)/a_n) F_n - (a_{n-1}/a_n) F_{n-1}
        # with b_n / a_n = -2 beta_n exp((la_{n-1} + la_n)/2 - la_n)
        c1 = z * math.exp(-la_n) + 2.0 * beta_n * math.exp(
            0.5 * (model.log_a(n - 1) - la_n)
        )
        c2 = -math.exp(la_prevcoef - la_n)
        v_next = c1 * v_cur + c2 * v_prev
        m = max(abs(v_next), abs(v_cur))
        if m > 1e150 or (0.0 < m < 1e-150):
            v_next /= m
            v_cur /= m
            ls += math.log(m)
        v_prev, v_cur = v_cur, v_next
        store(n + 2, v_cur, ls)
    return SolutionSeq(start=-1, log_abs=log_abs, phase=phase)


def orthonormal_polys(model: CoefficientModel, z: complex, n_max: int) -> SolutionSeq:
    """P_n(z): seeds P_{-1} = 0, P_0 = 1."""
    return recurrence_solve(model, z, 0.0, 1.0, n_max)


def second_kind_polys(model: CoefficientModel, z: complex, n_max: int) -> SolutionSeq:
    """The companion with seeds (-2, 0) at n = (-1, 0), normalized so that
    W(P, second) = 1 (with a_{-1} = 1/2)."""
    return recurrence_solve(model, z, -2.0, 0.0, n_max)


def wronskian(model: CoefficientModel, F: LogFn, G: LogFn, n: int) -> LogComplex:
    la = math.log(0.5) if n == -1 else model.log_a(n)
    t = F(n) * G(n + 1) - F(n + 1) * G(n)
    return LogComplex(t.log_abs + la, t.phase)


def wronskian_constancy(
    model: CoefficientModel, F: LogFn, G: LogFn, ns: Sequence[int]
) -> tuple[complex, float]:
    """Wronskian at several indices: (value at the first index, max relative
    spread).  Exact solutions give spread at rounding level."""
    vals = [wronskian(model, F, G, n).to_complex() for n in ns]
    ref = vals[0]
    scale = max(abs(v) for v in vals)
    if scale == 0.0:
        raise DegenerateWronskian("Wronskian vanishes at all probe indices")
    spread = max(abs(v - ref) for v in vals) / scale
    return ref, spread


# --------------------------------------------------------------------------
# growing companion solution
# --------------------------------------------------------------------------

def growing_g(
    model: CoefficientModel,
    bundle: JostBundle,
    *,
    n_start: int = 0,
    auto_shift: bool = True,
) -> SolutionSeq:
    """g_n = f_n sum_{m=n_start}^{n} (a_{m-1} f_{m-1} f_m)^{-1}, the solution
    with W(f, g) = 1 (any n_start gives one; they differ by multiples of f).

    The sum needs f nonvanishing on the path; a (near-)zero makes the terms
    blow up, so the start is moved past any small-|f| index (raises
    ZeroCrossing when auto_shift is off).  g is defined for
    n >= n_start - 1 with g_{n_start - 1} = 0.
    """
    N = bundle.n_max
    f = bundle.f

    # guard the path against zeros of f: |u_n| is the right relative gauge
    u_abs = np.abs(bundle.u)
    med = float(np.median(u_abs[: max(10, N // 4)]))
    bad = np.nonzero(u_abs[: N // 2] < 1e-8 * max(med, 1e-30))[0]
    n0 = n_start
    if bad.size:
        if not auto_shift:
            raise ZeroCrossing(f"f nearly vanishes at n = {int(bad[0])}")
        n0 = max(n0, int(bad.max()) + 1)
    if n0 == 0:
        # the m = 0 term divides by the boundary value f_{-1} = -2 Omega,
        # which vanishes identically at an eigenvalue
        fm1 = bundle.f_minus1
        if fm1.is_zero or fm1.log_abs < f(0).log_abs + math.log(1e-8):
            if not auto_shift:
                raise ZeroCrossing("f nearly vanishes at n = -1 (Omega ~ 0)")
            n0 = 1

    log_abs = np.empty(N + 1 - (n0 - 1) + 1)
    phase = np.empty_like(log_abs)
    log_abs[0] = -math.inf
    phase[0] = 0.0

    S: Optional[LogComplex] = None
    for m in range(n0, N + 1):
        la = math.log(0.5) if m - 1 == -1 else model.log_a(m - 1)
        term_inv = LogComplex(la, 0.0) * f(m - 1) * f(m)
        term = LogComplex(-term_inv.log_abs, -term_inv.phase)
        S = term if S is None else S + term
        g = f(m) * S
        log_abs[m - (n0 - 1)] = g.log_abs
        phase[m - (n0 - 1)] = g.phase
    return SolutionSeq(start=n0 - 1, log_abs=log_abs, phase=phase)


# --------------------------------------------------------------------------
# expansion coefficients along the Jost pair (subcritical) and kappa(z)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class KappaFit:
    k_plus: complex
    k_minus: complex
    kappa: float          # |k_plus|
    wronskian_spread: float


def fit_k_coeffs(
    model: CoefficientModel,
    F: LogFn,
    bundle: JostBundle,
    *,
    regime: Optional[Regime] = None,
    probe_ns: Optional[Sequence[int]] = None,
) -> KappaFit:
    """Coefficients of F in the basis (f, f-bar) below the critical line:

        F_n = k_plus f_n + k_minus conj-sol_n + o(decay),
        k_plus  =  kappa_inf W(F, fbar) / (2i sqrt(1 - beta_inf^2)),
        k_minus = -kappa_inf W(F, f)    / (2i sqrt(1 - beta_inf^2)).

    The Wronskians are exactly n-independent; several probe indices are
    evaluated only to gauge rounding noise.
    """
    if regime is None:
        regime = bundle.table.regime
    if not regime.is_subcritical:
        raise RegimeMismatch("k_plus/k_minus split needs |beta_inf| < 1")
    N = bundle.n_max
    if probe_ns is None:
        probe_ns = [N // 8, N // 4, N // 2, (3 * N) // 4]
    # the tilde companion solves the recurrence at the same z but must be
    # built from a solve at conj(z) -- see jost_pair
    fbar = jost_f(model, bundle.z.conjugate(), N, regime=regime).conjugated()

    w_plus, s1 = wronskian_constancy(model, F, fbar.f, probe_ns)
    w_minus, s2 = wronskian_constancy(model, F, bundle.f, probe_ns)
    denom = 2j * math.sqrt(1.0 - regime.beta_inf**2)
    k_plus = regime.kappa_inf * w_plus / denom
    k_minus = -regime.kappa_inf * w_minus / denom
    return KappaFit(
        k_plus=k_plus,
        k_minus=k_minus,
        kappa=abs(k_plus),
        wronskian_spread=max(s1, s2),
    )


def scattering_kappa(
    model: CoefficientModel,
    z: complex,
    n_max: int,
    *,
    regime: Optional[Regime] = None,
) -> KappaFit:
    """kappa(z) = |k_plus(z)| for the orthonormal-polynomial solution."""
    if regime is None:
        regime = classify(model)
    bundle = jost_f(model, z, n_max, regime=regime)
    P = orthonormal_polys(model, z, n_max)
    return fit_k_coeffs(model, P, bundle, regime=regime)


# --------------------------------------------------------------------------
# the sum rule linking kappa(z), kappa(conj z) and sum |P_n(z)|^2
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityReport:
    lhs: float             # kappa(conj z)^2 - kappa(z)^2 (Im z > 0)
    rhs_partial: float     # Im z * kappa_inf (1-beta_inf^2)^{-1/2} * partial sum
    tail_bound: float      # certified bound for the neglected rhs tail
    gap: float             # |lhs - rhs_partial| relative to lhs
    n_sum: int
    kappa_upper: float
    kappa_lower: float


def _inv_a_tail(model: CoefficientModel, M: int) -> float:
    """Certified sum_{n > M} 1/a_n via 1/a_m = 2 alpha_m / kappa_{m-1}."""
    kap_min = min(
        math.exp(0.5 * (model.log_a(m + 1) - model.log_a(m))) for m in range(M, M + 257)
    )
    return 2.0 * model.alpha_tail(M) / kap_min * 1.05


def identity_kappa(
    model: CoefficientModel,
    z: complex,
    *,
    n_sum: int = 500,
    n_fit: int = 4000,
    regime: Optional[Regime] = None,
) -> IdentityReport:
    """Check kappa(conj z)^2 - kappa(z)^2 = Im z kappa_inf
    (1 - beta_inf^2)^{-1/2} sum_n |P_n(z)|^2 (Im z > 0), with a certified
    bound on the truncated right-hand tail."""
    if regime is None:
        regime = classify(model)
    if z.imag <= 0:
        raise ModelError("the identity is stated for Im z > 0")
    kap_up = scattering_kappa(model, z.conjugate(), n_fit, regime=regime).kappa
    kap_lo = scattering_kappa(model, z, n_fit, regime=regime).kappa
    lhs = kap_up**2 - kap_lo**2

    P = orthonormal_polys(model, z, n_sum)
    psum = math.fsum(abs(P.complex_at(n)) ** 2 for n in range(0, n_sum + 1))
    pref = z.imag * regime.kappa_inf / math.sqrt(1.0 - regime.beta_inf**2)
    rhs = pref * psum

    # |P_n|^2 <= (kappa(z) + kappa(conj z))^2 kappa_inf-comparable / a_n for
    # large n (both basis solutions decay like a_n^{-1/2})
    tail = pref * (kap_up + kap_lo) ** 2 * _inv_a_tail(model, n_sum)
    gap = abs(lhs - rhs) / abs(lhs) if lhs != 0 else math.inf
    return IdentityReport(
        lhs=lhs,
        rhs_partial=rhs,
        tail_bound=tail,
        gap=gap,
        n_sum=n_sum,
        kappa_upper=kap_up,
        kappa_lower=kap_lo,
    )


# --------------------------------------------------------------------------
# asymptotic comparators (|beta_inf| > 1)
# --------------------------------------------------------------------------

def _rescaled(seq_fn: LogFn, table: AnsatzTable, ns: Sequence[int]) -> np.ndarray:
    """sqrt(a_n) e^{-phi_n} sign(beta_inf)^n F_n over ns (supercritical
    phase sums), as ordinary complex numbers."""
    neg = table.regime.beta_inf < 0
    out = np.empty(len(ns), dtype=np.complex128)
    for i, n in enumerate(ns):
        v = seq_fn(n)
        la = table.model.log_a(n)
        ph = v.phase + (math.pi * n if neg else 0.0)
        out[i] = LogComplex(v.log_abs + 0.5 * la - table.phi[n], ph).to_complex()
    return out


def growing_limit(
    table: AnsatzTable, g: SolutionSeq, ns: Sequence[int]
) -> tuple[np.ndarray, float]:
    """Measured sqrt(a_n) e^{-phi_n} sgn^n g_n over ns, and its predicted
    limit sign(beta_inf) kappa_inf / (2 sqrt(beta_inf^2 - 1))."""
    reg = table.regime
    if not reg.is_supercritical:
        raise RegimeMismatch("growing-solution limit shape needs |beta_inf| > 1")
    vals = _rescaled(g.value, table, ns)
    pred = math.copysign(1.0, reg.beta_inf) * reg.kappa_inf / (
        2.0 * math.sqrt(reg.beta_inf**2 - 1.0)
    )
    return vals, pred


def poly_prefactor_supercritical(
    model: CoefficientModel,
    z: complex,
    *,
    n_lo: int = 200,
    n_hi: int = 400,
    n_max: Optional[int] = None,
    regime: Optional[Regime] = None,
) -> dict:
    """Orthonormal-polynomial growth in the |beta_inf| > 1 regime:

        sqrt(a_n) e^{-phi_n} |P_n(z)| -> kappa_inf |Omega(z)| /
                                         (2 sqrt(beta_inf^2 - 1)).

    Returns measured window values, the predicted constant, and deviations.
    """
    if regime is None:
        regime = classify(model)
    if not regime.is_supercritical:
        raise RegimeMismatch("polynomial prefactor shape needs |beta_inf| > 1")
    if n_max is None:
        n_max = 2 * n_hi
    bundle = jost_f(model, z, n_max, regime=regime)
    P = orthonormal_polys(model, z, n_hi + 1)
    ns = list(range(n_lo, n_hi + 1, max(1, (n_hi - n_lo) // 64)))
    vals = np.abs(_rescaled(P.value, bundle.table, ns))
    pred = regime.kappa_inf * abs(bundle.omega) / (2.0 * math.sqrt(regime.beta_inf**2 - 1.0))
    rel = np.abs(vals - pred) / pred
    return {
        "ns": ns,
        "measured": vals,
        "predicted": pred,
        "rel_max": float(np.max(rel)),
        "rel_last": float(rel[-1]),
        "omega": bundle.omega,
    }
