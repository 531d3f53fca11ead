"""Spectral data from the Jost boundary value Omega(z) = -f_{-1}(z)/2.

Omega is the Wronskian of the orthonormal-polynomial solution with the
decaying solution; its real zeros (|beta_inf| > 1 regimes, where the
spectrum is discrete) are the eigenvalues, and the residue data gives the
spectral masses.  Two independent mass formulas are kept side by side:

    mass = 2 f_0(lam) / d/dlam f_{-1}(lam)      (boundary derivative)
    mass = 1 / sum_n P_n(lam)^2                 (norm of the eigenvector)

Near a zero of Omega the float evaluation loses all significant digits to
cancellation in f_{-1} = 2(z - b_0) f_0 - 2 a_0 f_1; when the cancellation
factor drops below 2^-40 the whole pipeline is re-run in mpmath at a
configurable precision (JACOBI_JOST_BITS, default 160 bits).

The finite-section routine (leading N-by-N block) is the deliberately
independent cross-check: Sturm bisection on the shifted pivot recurrence,
in mpmath because fast-growth entries overflow/underflow float pivots.
"""
from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath
import numpy as np

from .ansatz import build_table
from .coefficients import (
    CoefficientModel,
    Regime,
    check_essential_selfadjointness,
    classify,
    eval_a,
    eval_b,
)
from .errors import ModelError, NotConverged, PoleAtZ, PrecisionError, RegimeMismatch
from .logscale import LogComplex
from .solutions import orthonormal_polys, recurrence_solve, wronskian
from .volterra import jost_f, solve_u_mp

__all__ = [
    "OmegaResult",
    "jost_function",
    "EigenResult",
    "find_eigenvalues",
    "finite_section_eigs",
    "MassResult",
    "spectral_mass",
    "resolvent_entry",
    "spectral_report",
]

MP_ESCALATE_THRESHOLD = 2.0 ** -40


def _default_bits() -> int:
    return int(os.environ.get("JACOBI_JOST_BITS", "160"))


def _auto_n_trunc(model: CoefficientModel, z: complex, regime: Regime, tol: float) -> int:
    """Smallest power-of-two truncation whose remainder tail meets tol.

    Slowly decaying (polynomial) tails cannot reach a small tol at any
    feasible length; once the contraction gate (tail < 0.05) is satisfied the
    cap is returned instead and the leftover truncation error is carried by
    the certificate rather than hidden behind a failure.
    """
    from .ansatz import tail_r_bound

    n = 64
    gate_ok = False
    while n <= 1 << 17:
        t = tail_r_bound(model, z, n, regime)
        gate_ok = gate_ok or t < 0.05
        if t < min(0.05, tol):
            return n
        n *= 2
    if gate_ok:
        return 1 << 17
    raise NotConverged("no truncation point with a controlled remainder tail below 2^17")


@dataclass
class OmegaResult:
    omega: complex
    z: complex
    n_trunc: int
    cancellation: float   # |f_{-1}| relative to the larger assembly term
    used_mp: bool
    f0: complex = 0.0     # f_0(z), ordinary complex (may underflow for huge n only)
    omega_alt: complex = 0.0   # same quantity through the Wronskian probe route
    route_gap: float = 0.0     # relative spread between the two routes
    certificate: dict = field(default_factory=dict)


def _route_gap(w1: complex, w2: complex) -> float:
    scale = max(abs(w1), abs(w2))
    return 0.0 if scale == 0.0 else abs(w1 - w2) / scale


def _omega_probe_mp(model: CoefficientModel, z, fs, probe: int, mp):
    """a_probe (P_probe f_{probe+1} - P_{probe+1} f_probe) in mp arithmetic."""
    Pm, Pn = mp.mpc(0), mp.mpc(1)  # P_{-1}, P_0
    for n in range(probe + 1):
        prev = model.a_mp(n - 1, mp) if n >= 1 else mp.mpf(1)
        Pm, Pn = Pn, ((z - model.b_mp(n, mp)) * Pn - prev * Pm) / model.a_mp(n, mp)
    return model.a_mp(probe, mp) * (Pm * fs[probe + 1] - Pn * fs[probe])


def jost_function(
    model: CoefficientModel,
    z: complex,
    *,
    n_trunc: Optional[int] = None,
    tol: float = 1e-10,
    bits: Optional[int] = None,
    regime: Optional[Regime] = None,
) -> OmegaResult:
    """Omega(z) with automatic precision escalation near its zeros."""
    if regime is None:
        regime = classify(model)
    z = complex(z)
    if n_trunc is None:
        n_trunc = _auto_n_trunc(model, z, regime, tol)
    bundle = jost_f(model, z, n_trunc, regime=regime, tol=tol)

    b0 = eval_b(model, 0)
    a0 = eval_a(model, 0)
    t1 = LogComplex.from_complex(2.0 * (z - b0)) * bundle.f(0)
    t2 = LogComplex.from_complex(2.0 * a0) * bundle.f(1)
    big = max(t1.log_abs, t2.log_abs)
    fm1 = bundle.f_minus1
    cancel = 0.0 if fm1.is_zero else math.exp(fm1.log_abs - big)

    # the boundary assembly is cross-checked against the Wronskian of the
    # polynomial solution with f at an interior index; at n = 0 the two
    # expressions coincide algebraically, so the probe sits at n >= 1
    probe = max(1, min(6, n_trunc - 1))

    if cancel >= MP_ESCALATE_THRESHOLD:
        P = orthonormal_polys(model, z, probe + 1)
        omega_alt = wronskian(model, P.value, bundle.f, probe).to_complex()
        gap = _route_gap(bundle.omega, omega_alt)
        return OmegaResult(
            omega=bundle.omega,
            z=z,
            n_trunc=n_trunc,
            cancellation=cancel,
            used_mp=False,
            f0=bundle.f_complex(0),
            omega_alt=omega_alt,
            route_gap=gap,
            certificate=dict(bundle.certificate, route_gap=gap),
        )

    bits = bits or _default_bits()
    with mpmath.workprec(bits):
        zz = mpmath.mpc(z)
        out = solve_u_mp(model, zz, n_trunc, mpmath)
        w_alt = _omega_probe_mp(model, zz, out["fs"], min(probe, len(out["fs"]) - 2), mpmath)
        gap = _route_gap(complex(out["omega"]), complex(w_alt))
        big_mp = max(abs(2 * (zz - out["one"] * b0) * out["f0"]), abs(2 * a0 * out["f1"]))
        cancel_mp = float(abs(out["f_minus1"]) / big_mp) if big_mp > 0 else 0.0
        omega = complex(out["omega"])
        omega_alt = complex(w_alt)
        f0 = complex(out["f0"])
    return OmegaResult(
        omega=omega,
        z=z,
        n_trunc=n_trunc,
        cancellation=cancel,
        used_mp=True,
        f0=f0,
        omega_alt=omega_alt,
        route_gap=gap,
        certificate=dict(
            bundle.certificate,
            escalated_bits=bits,
            route_gap=gap,
            cancellation_mp=cancel_mp,
        ),
    )


# --------------------------------------------------------------------------
# eigenvalues from the zeros of Omega on the real axis
# --------------------------------------------------------------------------

@dataclass
class EigenResult:
    eigenvalues: tuple
    window: tuple
    n_trunc: int
    grid: int
    omega_residuals: tuple
    used_mp: tuple
    extension_dependent: bool = False  # deficiency (1,1): zeros depend on the extension


def _omega_real(model, lam, n_trunc, tol, regime) -> OmegaResult:
    res = jost_function(model, complex(lam, 0.0), n_trunc=n_trunc, tol=tol, regime=regime)
    if abs(res.omega.imag) > 1e-8 * (1.0 + abs(res.omega)):
        raise PrecisionError(
            f"Omega not real on the real axis: {res.omega!r} at lam={lam!r}"
        )
    return res


def find_eigenvalues(
    model: CoefficientModel,
    lo: float,
    hi: float,
    *,
    n_trunc: Optional[int] = None,
    grid: int = 512,
    tol: float = 1e-10,
    regime: Optional[Regime] = None,
) -> EigenResult:
    """All zeros of Omega in [lo, hi]: sign-change scan plus Brent refinement.

    Discrete spectrum requires fast growth with |beta_inf| > 1.
    """
    from scipy.optimize import brentq

    if regime is None:
        regime = classify(model)
    if not regime.is_supercritical:
        raise RegimeMismatch(
            "point spectrum via Omega zeros needs the |beta_inf| > 1 regime"
        )
    if not (hi > lo):
        raise ModelError("need hi > lo")
    sa = check_essential_selfadjointness(model, regime)
    extension_dependent = sa.verdict != "esa"
    if extension_dependent:
        warnings.warn(
            "deficiency (1,1): the operator has a one-parameter family of "
            "self-adjoint extensions and the reported zeros are eigenvalues "
            "only for the extension singled out by the decaying solution "
            "(extension-dependent, not canonical)",
            RuntimeWarning,
            stacklevel=2,
        )
    if n_trunc is None:
        n_trunc = _auto_n_trunc(model, complex(lo), regime, min(tol, 1e-6))

    lams = np.linspace(lo, hi, grid + 1)
    vals = np.array(
        [_omega_real(model, x, n_trunc, tol, regime).omega.real for x in lams]
    )

    roots = []
    used = []
    def f(x: float) -> float:
        return _omega_real(model, x, n_trunc, tol, regime).omega.real

    for i in range(grid):
        v0, v1 = vals[i], vals[i + 1]
        if v0 == 0.0:
            roots.append(float(lams[i]))
            continue
        if v0 * v1 < 0:
            root = brentq(f, float(lams[i]), float(lams[i + 1]), xtol=tol, rtol=1e-15)
            roots.append(float(root))
    if vals[-1] == 0.0:
        roots.append(float(lams[-1]))

    residuals = []
    mps = []
    for r in roots:
        res = jost_function(model, complex(r, 0.0), n_trunc=n_trunc, tol=tol, regime=regime)
        residuals.append(abs(res.omega))
        mps.append(res.used_mp)
    return EigenResult(
        eigenvalues=tuple(roots),
        window=(lo, hi),
        n_trunc=n_trunc,
        grid=grid,
        omega_residuals=tuple(residuals),
        used_mp=tuple(mps),
        extension_dependent=extension_dependent,
    )


# --------------------------------------------------------------------------
# finite sections (independent oracle)
# --------------------------------------------------------------------------

def _sturm_count(model: CoefficientModel, x, N: int, mp) -> int:
    """Negative pivots of the shifted leading N-by-N section at shift x."""
    tiny = mp.mpf(2) ** (-mp.mp.prec // 2) * max(mp.mpf(1), abs(x))
    count = 0
    d = model.b_mp(0, mp) - x
    if d == 0:
        d = -tiny
    if d < 0:
        count += 1
    for kk in range(1, N):
        d = (model.b_mp(kk, mp) - x) - model.a_mp(kk - 1, mp) ** 2 / d
        if d == 0:
            d = -tiny
        if d < 0:
            count += 1
    return count


def finite_section_eigs(
    model: CoefficientModel,
    N: int,
    lo: float,
    hi: float,
    *,
    bits: Optional[int] = None,
    method: str = "sturm",
) -> tuple:
    """Eigenvalues of the leading N-by-N block inside [lo, hi].

    method="sturm": bisection on the mp pivot count (any growth rate);
    method="float": scipy tridiagonal solver (entries must fit in floats).

    With bits=None the working precision is raised to log2(a_{N-1}) + 64 so
    that the small eigenvalues of a fast-growing section survive the pivot
    cancellation; an explicit bits value is taken as-is (the bisection aborts
    with PrecisionError if the pivot counts come out non-monotone).
    """
    if N < 1:
        raise ModelError("need a section of at least one row")
    if method == "float":
        from scipy.linalg import eigh_tridiagonal

        diag = np.array([eval_b(model, n) for n in range(N)])
        off = np.array([eval_a(model, n) for n in range(N - 1)])
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(off))):
            raise PrecisionError("finite-section entries overflow floats; use sturm")
        vals = eigh_tridiagonal(diag, off, select="v", select_range=(lo, hi))[0]
        return tuple(float(v) for v in vals)

    if bits is None:
        need = int(max(model.log_a(N - 1), 0.0) / math.log(2.0)) + 64
        bits = max(_default_bits(), 224, need)
    with mpmath.workprec(bits):
        mp = mpmath
        xlo, xhi = mp.mpf(lo), mp.mpf(hi)
        c_lo = _sturm_count(model, xlo, N, mp)
        c_hi = _sturm_count(model, xhi, N, mp)
        out = []
        for j in range(c_lo + 1, c_hi + 1):
            a, b = xlo, xhi
            ca, cb = c_lo, c_hi
            # lambda_j = inf { x : count(x) >= j }
            for _ in range(bits + 16):
                mid = (a + b) / 2
                c = _sturm_count(model, mid, N, mp)
                if not (ca <= c <= cb):
                    raise PrecisionError(
                        f"Sturm counts not monotone at {bits} bits "
                        f"({ca} .. {c} .. {cb}); raise the bit budget"
                    )
                if c >= j:
                    b, cb = mid, c
                else:
                    a, ca = mid, c
                if b - a <= mp.mpf(2) ** (8 - bits) * max(mp.mpf(1), abs(b)):
                    break
            out.append(float((a + b) / 2))
    return tuple(out)


# --------------------------------------------------------------------------
# spectral masses
# --------------------------------------------------------------------------

@dataclass
class MassResult:
    lam: float
    mass_boundary: float   # 2 f_0 / f_{-1}'
    mass_norm: float       # 1 / sum P_n^2 (Miller-style stop at the minimum)
    agreement: float       # relative difference
    n_stop: int


def spectral_mass(
    model: CoefficientModel,
    lam: float,
    *,
    n_trunc: Optional[int] = None,
    tol: float = 1e-10,
    regime: Optional[Regime] = None,
) -> MassResult:
    if regime is None:
        regime = classify(model)
    if not regime.is_supercritical:
        raise RegimeMismatch("spectral masses need the discrete-spectrum regime")
    sa = check_essential_selfadjointness(model, regime)
    if sa.verdict != "esa":
        raise RegimeMismatch(
            "spectral masses are extension-dependent under deficiency (1,1): "
            + sa.reason
        )
    if n_trunc is None:
        n_trunc = _auto_n_trunc(model, complex(lam), regime, min(tol, 1e-6))

    # boundary-derivative route; h ~ eps^{1/3} balances rounding vs curvature
    h = (2.0 ** -52) ** (1.0 / 3.0) * max(1.0, abs(lam))
    res0 = jost_function(model, complex(lam), n_trunc=n_trunc, tol=tol, regime=regime)
    resp = jost_function(model, complex(lam + h), n_trunc=n_trunc, tol=tol, regime=regime)
    resm = jost_function(model, complex(lam - h), n_trunc=n_trunc, tol=tol, regime=regime)
    dfm1 = (-2.0 * resp.omega.real + 2.0 * resm.omega.real) / (2.0 * h)  # f_{-1} = -2 Omega
    if dfm1 == 0.0:
        raise PrecisionError("vanishing boundary derivative; lam is not a simple zero?")
    mass_a = 2.0 * res0.f0.real / dfm1

    # eigenvector-norm route: P_n(lam) decays to the turning point then the
    # second solution takes over; truncate the norm at the magnitude minimum
    P = orthonormal_polys(model, complex(lam), n_trunc)
    la = P.log_abs[1:]  # n = 0..n_trunc
    j = int(np.argmin(la[10:]) + 10) if len(la) > 12 else len(la) - 1
    terms = [P.complex_at(n).real ** 2 for n in range(0, j + 1)]
    mass_b = 1.0 / math.fsum(terms)

    agree = abs(mass_a - mass_b) / max(abs(mass_a), abs(mass_b))
    return MassResult(lam=lam, mass_boundary=mass_a, mass_norm=mass_b, agreement=agree, n_stop=j)


def resolvent_entry(
    model: CoefficientModel,
    z: complex,
    n: int,
    m: int,
    *,
    n_trunc: Optional[int] = None,
    tol: float = 1e-10,
    regime: Optional[Regime] = None,
) -> complex:
    """(J - z)^{-1}_{n,m} = P_{min}(z) f_{max}(z) / Omega(z), Im z != 0.

    Only defined in the discrete-spectrum regime with an essentially
    self-adjoint operator: under deficiency (1,1) the resolvent depends on
    the chosen extension and this formula silently picks one of them.
    Raises PoleAtZ when Omega(z) cannot be distinguished from zero at the
    achieved precision (z numerically on top of an eigenvalue).
    """
    if regime is None:
        regime = classify(model)
    z = complex(z)
    if min(n, m) < 0:
        raise ModelError("matrix indices start at 0")
    if z.imag == 0.0:
        raise ModelError("resolvent entries need Im z != 0")
    if not regime.is_supercritical:
        raise RegimeMismatch(
            "the Jost resolvent formula needs the |beta_inf| > 1 regime"
        )
    sa = check_essential_selfadjointness(model, regime)
    if sa.verdict != "esa":
        raise RegimeMismatch(
            "resolvent is extension-dependent under deficiency (1,1): " + sa.reason
        )
    if n_trunc is None:
        n_trunc = max(_auto_n_trunc(model, z, regime, tol), n, m) + 8

    # omega through the escalating route so near-pole cancellation is caught
    res = jost_function(model, z, n_trunc=n_trunc, tol=tol, regime=regime)
    err_trunc = float(res.certificate.get("err_trunc", 0.0))
    if res.used_mp:
        cancel = res.certificate.get("cancellation_mp", res.cancellation)
        floor = 2.0 ** (24 - res.certificate["escalated_bits"])
    else:
        cancel = res.cancellation
        floor = 2.0 ** -48
    if res.omega == 0 or cancel < max(4.0 * err_trunc, floor):
        raise PoleAtZ(
            f"Omega({z!r}) is indistinguishable from zero at the achieved "
            f"accuracy (cancellation {cancel:.2e}, truncation {err_trunc:.2e})"
        )

    bundle = jost_f(model, z, n_trunc, regime=regime, tol=tol)
    lo, hi = min(n, m), max(n, m)
    P = orthonormal_polys(model, z, lo + 1)
    val = P.value(lo) * bundle.f(hi)
    return (val / LogComplex.from_complex(res.omega)).to_complex()


def spectral_report(
    model: CoefficientModel,
    lo: float,
    hi: float,
    *,
    n_trunc: Optional[int] = None,
    grid: int = 512,
    tol: float = 1e-10,
) -> dict:
    """Eigenvalues in [lo, hi] with both mass routes and the running total."""
    regime = classify(model)
    eig = find_eigenvalues(model, lo, hi, n_trunc=n_trunc, grid=grid, tol=tol, regime=regime)
    masses = [
        spectral_mass(model, lam, n_trunc=eig.n_trunc, tol=tol, regime=regime)
        for lam in eig.eigenvalues
    ]
    return {
        "window": [lo, hi],
        "n_trunc": eig.n_trunc,
        "eigenvalues": list(eig.eigenvalues),
        "masses": [m.mass_norm for m in masses],
        "mass_boundary_route": [m.mass_boundary for m in masses],
        "mass_agreement": [m.agreement for m in masses],
        "mass_total": float(math.fsum(m.mass_norm for m in masses)),
        "omega_residuals": list(eig.omega_residuals),
    }
