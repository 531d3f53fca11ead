"""Discrete Volterra construction of the decaying (Jost) solution.

The corrector u solves

    u_n = 1 + sum_{m > n} G_{n,m} r_m u_m,
    G_{n,m} = -(kappa_{m-1} zeta_m)^{-1} sum_{p=n+1}^{m} kappa_{p-1}
              sigma_p sigma_{p+1} ... sigma_m,       sigma_q = zeta_q zeta_{q-1},

so that f_n = Q_n u_n satisfies the Jacobi recurrence exactly and u_n -> 1.

``solve_u`` does NOT evaluate the kernel sum: the u-equation is equivalent to
a two-term backward recursion (write the inner sum as a running quantity B;
the identity zeta_{n-1}^{-1} sigma_n = zeta_n telescopes the p-sum), giving
an O(N) sweep

    B <- sigma_{n+1} B + (zeta_n / kappa_n) r_{n+1} u_{n+1}
    u_n <- u_{n+1} - kappa_n B

whose output satisfies the normalized three-term recurrence to rounding
error.  The explicit kernel is kept (``VolterraKernel``) for error constants
and for cross-checking the sweep against a straight Neumann iteration.

Error control: the Volterra structure gives the unconditional bound
|u_n - 1| <= exp(G_max R_n) - 1 with R_n = sum_{m>n} |r_m| and G_max a bound
on |G|.  Truncating at N and seeding u_N = 1 leaves an O(G_max R_N) error,
so the solve refuses (NotConverged) unless G_max * R_N < 1/2, with R_N
including the certified beyond-table tail.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ansatz import AnsatzTable, build_table
from .coefficients import CoefficientModel, Regime, classify, eval_a, eval_b
from .errors import ModelError, NotConverged
from .logscale import LogComplex, log_abs_array, phase_array

__all__ = [
    "VolterraKernel",
    "kernel_G",
    "solve_u",
    "neumann_u",
    "USolution",
    "JostBundle",
    "jost_f",
    "jost_pair",
    "solve_u_mp",
]

KERNEL_SIGN = -1  # sign of G_{n,n+1} relative to zeta_n: G_{n,n+1} = -zeta_n


# --------------------------------------------------------------------------
# explicit kernel (prefix form): G_{n,m} = -(kappa_{m-1} zeta_m)^{-1}
#     * exp(C_m) * (T_m - T_n),
# C_j = sum_{q<=j} log sigma_q,  T_j = sum_{p=1}^{j} kappa_{p-1} exp(-C_{p-1}).
# The T terms can span thousands of orders of magnitude above the critical
# line, hence the LogComplex accumulation.
# --------------------------------------------------------------------------

class VolterraKernel:
    def __init__(self, table: AnsatzTable):
        self.table = table
        N = table.n_max
        sigma = table.zeta[1:] * table.zeta[:-1]  # sigma_q, q = 1..N
        C = np.concatenate(([0.0 + 0.0j], np.cumsum(np.log(sigma))))
        self.C = C
        T = [LogComplex.from_complex(0.0)]
        for p in range(1, N + 1):
            term = LogComplex.from_parts(
                math.log(table.kappa[p - 1]) - C[p - 1].real, -C[p - 1].imag
            )
            T.append(T[-1] + term)
        self.T = T

        # per-row certified bound: |G_{n,m}| <= |kappa_{m-1} zeta_m|^{-1}
        #   * e^{Re C_m} * (|T_m| + max_{j<m} |T_j|), all in logs
        log_T = np.array([t.log_abs for t in T])
        run_max = np.maximum.accumulate(log_T)
        m = np.arange(1, N + 1)
        log_row = (
            C[m].real
            + np.logaddexp(log_T[m], run_max[m - 1])
            - np.log(table.kappa[m - 1])
            - np.log(np.abs(table.zeta[m]))
        )
        self.row_bound = np.exp(log_row)
        self.G_max = float(np.max(self.row_bound)) if N >= 1 else 0.0

    def G(self, n: int, m: int) -> complex:
        if not (0 <= n < m <= self.table.n_max):
            raise ModelError(f"kernel needs 0 <= n < m <= n_max, got ({n}, {m})")
        diff = self.T[m] - self.T[n]
        pref = LogComplex.from_parts(self.C[m].real, self.C[m].imag)
        scale = -1.0 / (self.table.kappa[m - 1] * self.table.zeta[m])
        return (diff * pref).to_complex() * scale


def kernel_G(table: AnsatzTable, n: int, m: int) -> complex:
    """One kernel entry (builds the prefix data; cache a VolterraKernel for
    repeated queries)."""
    return VolterraKernel(table).G(n, m)


# --------------------------------------------------------------------------
# solver
# --------------------------------------------------------------------------

@dataclass
class USolution:
    table: AnsatzTable
    u: np.ndarray
    residual_sup: float
    G_max: float
    certificate: dict

    def error_bound(self, n: int) -> float:
        """Certified |u_n - 1| bound: exp(G_max R_n) - 1 plus truncation."""
        return math.expm1(self.G_max * self.table.R(n)) + self.certificate["err_trunc"]


def _sweep(zeta, kappa, r, N):
    """The O(N) backward recursion; plain lists beat ndarray indexing here."""
    u = [0.0j] * (N + 1)
    u[N] = 1.0 + 0.0j
    B = 0.0j
    zl = list(zeta)
    kl = list(kappa)
    rl = list(r)
    for n in range(N - 1, -1, -1):
        B = (zl[n + 1] * zl[n]) * B + (zl[n] / kl[n]) * rl[n + 1] * u[n + 1]
        u[n] = u[n + 1] - kl[n] * B
    return u


def solve_u(
    table: AnsatzTable,
    *,
    tol: float = 1e-12,
    kernel: Optional[VolterraKernel] = None,
) -> USolution:
    """Solve the u-equation by the backward sweep, with certificates.

    Raises NotConverged when the truncation error cannot be controlled
    (G_max * R_{n_max} >= 1/2, including the beyond-table remainder bound).
    """
    N = table.n_max
    if kernel is None:
        kernel = VolterraKernel(table)
    G_max = kernel.G_max
    R_N = table.R(N)  # == r_beyond
    if not (G_max * R_N < 0.5):
        raise NotConverged(
            f"tail not under control at n_max={N}: G_max * R_N = {G_max * R_N:.3g} "
            f">= 0.5 (G_max = {G_max:.3g}, R_N = {R_N:.3g}); increase n_max or fix the tail"
        )

    u = np.array(_sweep(table.zeta, table.kappa, table.r, N))

    # residual of the normalized recurrence, n = 1..N-1 (equals the f-space
    # residual divided by sqrt(a_{n-1} a_n) |Q_n|)
    zinv = 1.0 / table.zeta
    res = (
        zinv[:-2] * u[:-2]
        - 2.0 * (table.alpha[1:-1] * table.z + table.beta[1:-1]) * u[1:-1]
        + table.k[1:-1] * table.zeta[1:-1] * u[2:]
    )
    scale = max(1.0, float(np.max(np.abs(u))))
    residual_sup = float(np.max(np.abs(res))) / scale if N >= 2 else 0.0

    err_trunc = math.expm1(G_max * R_N)
    cert = {
        "n_max": N,
        "G_max": G_max,
        "R_0": table.R(0),
        "R_n_max": R_N,
        "err_trunc": err_trunc,
        "bound_u0": math.expm1(G_max * table.R(0)) + err_trunc,
        "tail_certified": math.isfinite(table.r_beyond),
        "tol": tol,
        "residual_sup": residual_sup,
    }
    if residual_sup > max(tol, 1e-12) * 1e3:
        raise NotConverged(
            f"sweep residual {residual_sup:.3g} far above tolerance {tol:.3g}"
        )
    return USolution(table=table, u=u, residual_sup=residual_sup, G_max=G_max, certificate=cert)


def neumann_u(table: AnsatzTable, iters: int = 30, kernel: Optional[VolterraKernel] = None) -> np.ndarray:
    """Straight Neumann iteration of the u-equation with explicit kernel
    entries.  O(N^2) per pass -- cross-check use only."""
    N = table.n_max
    if kernel is None:
        kernel = VolterraKernel(table)
    u = np.ones(N + 1, dtype=np.complex128)
    G = np.zeros((N + 1, N + 1), dtype=np.complex128)
    for n in range(N):
        for m in range(n + 1, N + 1):
            G[n, m] = kernel.G(n, m)
    for _ in range(iters):
        prev = u
        u = 1.0 + G[:, 1:] @ (table.r[1:] * prev[1:])
        if np.max(np.abs(u - prev)) < 1e-15 * np.max(np.abs(u)):
            break
    return u


# --------------------------------------------------------------------------
# Jost solution f_n = Q_n u_n
# --------------------------------------------------------------------------

@dataclass
class JostBundle:
    """The decaying solution and its boundary data at one spectral point.

    ``f(n)`` returns a LogComplex (f_n spans the full dynamic range of Q_n);
    ``omega`` is the Wronskian-normalized boundary value -f_{-1}/2, which is
    O(1) away from eigenvalues.
    """

    model: CoefficientModel
    z: complex
    table: AnsatzTable
    u: np.ndarray
    f_log_abs: np.ndarray
    f_phase: np.ndarray
    f_minus1: LogComplex
    certificate: dict
    meta: dict = field(default_factory=dict)

    @property
    def n_max(self) -> int:
        return self.table.n_max

    def f(self, n: int) -> LogComplex:
        if n == -1:
            return self.f_minus1
        return LogComplex(self.f_log_abs[n], self.f_phase[n])

    def f_complex(self, n: int) -> complex:
        return self.f(n).to_complex()

    @property
    def omega_log(self) -> LogComplex:
        return (-self.f_minus1).scaled(0.5)

    @property
    def omega(self) -> complex:
        return self.omega_log.to_complex()

    def conjugated(self) -> "JostBundle":
        """The bundle for conj(z) obtained by reflection, f_n -> conj(f_n);
        this is the second Jost-type solution evaluated back at z."""
        return JostBundle(
            model=self.model,
            z=self.z.conjugate(),
            table=self.table,
            u=np.conj(self.u),
            f_log_abs=self.f_log_abs.copy(),
            f_phase=-self.f_phase,
            f_minus1=self.f_minus1.conjugate(),
            certificate=dict(self.certificate),
            meta=dict(self.meta, reflected=True),
        )


def jost_f(
    model: CoefficientModel,
    z: complex,
    n_max: int,
    *,
    regime: Optional[Regime] = None,
    table: Optional[AnsatzTable] = None,
    tol: float = 1e-12,
) -> JostBundle:
    """Build the Jost solution at z (Im z arbitrary; fast-growth regimes)."""
    if table is None:
        table = build_table(model, z, n_max, regime=regime)
    sol = solve_u(table, tol=tol)
    u = sol.u

    f_log_abs = table.logq_abs + log_abs_array(u)
    f_phase = table.q_phase + phase_array(u)

    z = complex(z)
    b0 = eval_b(model, 0)
    a0 = eval_a(model, 0)
    f0 = LogComplex(f_log_abs[0], f_phase[0])
    f1 = LogComplex(f_log_abs[1], f_phase[1])
    # recurrence at n = 0 with the boundary convention a_{-1} = 1/2
    f_m1 = LogComplex.from_complex(2.0 * (z - b0)) * f0 - LogComplex.from_complex(2.0 * a0) * f1

    return JostBundle(
        model=model,
        z=z,
        table=table,
        u=u,
        f_log_abs=f_log_abs,
        f_phase=f_phase,
        f_minus1=f_m1,
        certificate=sol.certificate,
        meta={"kernel_sign": KERNEL_SIGN, "residual_sup": sol.residual_sup},
    )


def jost_pair(
    model: CoefficientModel,
    z: complex,
    n_max: int,
    *,
    regime: Optional[Regime] = None,
    tol: float = 1e-12,
) -> tuple[JostBundle, JostBundle]:
    """The Jost solution at z together with its tilde companion
    tilde-f_n(z) = conj(f_n(conj z)), both solving the recurrence AT z.

    The companion is genuinely a second solution (asymptotic to conj(Q_n)):
    the fixed root branch breaks Schwarz reflection, so it must be built by
    solving at conj(z) and conjugating, not by conjugating in place.
    """
    z = complex(z)
    f = jost_f(model, z, n_max, regime=regime, tol=tol)
    ft = jost_f(model, z.conjugate(), n_max, regime=regime, tol=tol).conjugated()
    return f, ft


# --------------------------------------------------------------------------
# arbitrary-precision path (used when boundary cancellation eats the float
# budget, e.g. Omega near a spectral point)
# --------------------------------------------------------------------------

def solve_u_mp(model: CoefficientModel, z, n_max: int, mp) -> dict:
    """Backward sweep in mpmath arithmetic.

    Returns {"u0", "u", "f0", "f1", "f_minus1", "omega"} as mp numbers.  mp's
    unbounded exponent range makes explicit log-scaling unnecessary here.
    """
    one = mp.mpf(1)
    z = mp.mpc(z)
    N = n_max

    a = [model.a_mp(n, mp) for n in range(-1, N + 2)]  # offset +1
    b = [model.b_mp(n, mp) for n in range(0, N + 1)]

    beta, zeta, kappa, k = [], [], [], [mp.mpf(0)]
    for n in range(N + 1):
        sq = mp.sqrt(a[n] * a[n + 1])
        bn = -b[n] / (2 * sq)
        beta.append(bn)
        if abs(bn) <= 1:
            zeta.append(mp.mpc(bn, -mp.sqrt(1 - bn * bn)))
        else:
            s = mp.sign(bn)
            zeta.append(mp.mpc(s * (abs(bn) - mp.sqrt(bn * bn - 1))))
        kappa.append(mp.sqrt(a[n + 2] / a[n + 1]))
        if n >= 1:
            k.append(a[n + 1] / mp.sqrt(a[n] * a[n + 2]))

    alpha = [1 / (2 * mp.sqrt(a[n] * a[n + 1])) for n in range(N + 1)]
    r = [mp.mpc(0)] * (N + 1)
    for n in range(1, N + 1):
        r[n] = 1 / zeta[n - 1] - 2 * beta[n] + k[n] * zeta[n] - 2 * z * alpha[n]

    u = [mp.mpc(0)] * (N + 1)
    u[N] = mp.mpc(1)
    B = mp.mpc(0)
    for n in range(N - 1, -1, -1):
        B = (zeta[n + 1] * zeta[n]) * B + (zeta[n] / kappa[n]) * r[n + 1] * u[n + 1]
        u[n] = u[n + 1] - kappa[n] * B

    # f_n = a_n^{-1/2} (prod_{m<n} zeta_m) u_n; the leading stretch is kept so
    # callers can cross-check omega against a Wronskian probe at n > 0
    fs = []
    pz = mp.mpc(1)
    for n in range(min(N, 16) + 1):
        fs.append(pz * u[n] / mp.sqrt(a[n + 1]))
        pz = pz * zeta[n]
    f0, f1 = fs[0], fs[1]
    f_m1 = 2 * (z - b[0]) * f0 - 2 * a[1] * f1  # a[1] is a_0 (list offset)
    omega = -f_m1 / 2
    return {
        "u0": u[0],
        "u": u,
        "f0": f0,
        "f1": f1,
        "fs": fs,
        "f_minus1": f_m1,
        "omega": omega,
        "one": one,
    }
