"""Jacobi coefficient families and regime classification.

A model describes a semi-infinite Jacobi matrix through its off-diagonal
entries ``a_n > 0`` and diagonal entries ``b_n`` (real).  Everything the
asymptotic machinery needs is derived from four sequences::

    alpha_n = 1 / (2 sqrt(a_{n-1} a_n))
    beta_n  = -b_n / (2 sqrt(a_{n-1} a_n))
    kappa_n = sqrt(a_{n+1} / a_n)
    k_n     = a_n / sqrt(a_{n-1} a_{n+1})        (n >= 1)

The growth split is between the fast-growth case ``sum 1/a_n < inf`` and the
classical case ``sum 1/a_n = inf``; within each, the limit ``beta_inf`` of
``beta_n`` separates oscillatory behaviour (|beta_inf| < 1) from exponential
dichotomy (|beta_inf| > 1).  Models with |beta_inf| = 1 (within tolerance) are
reported as unsupported.

For n = 0 the derived quantities use the family's own extension of ``a`` to
index -1 (each family documents it).  The *operator* convention a_{-1} = 1/2
applies only to boundary formulas (Wronskians, ``f_{-1}``) and is what
``eval_a(model, -1)`` returns.

Values of ``a_n`` may exceed the float range for legitimately fast families
(e.g. ``2**(n**2)``); all internal work therefore goes through ``log_a``.
"""
from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass, field, fields
from typing import Optional

from .errors import InconsistentTail, ModelError, TailNotSummable

__all__ = [
    "PowerLaw",
    "Geometric",
    "Stretched",
    "ParityPerturbed",
    "Tabulated",
    "Derived",
    "Regime",
    "RegimeKind",
    "Ell1Report",
    "SelfAdjointness",
    "eval_a",
    "eval_b",
    "derived",
    "classify",
    "ell1_diagnostics",
    "check_essential_selfadjointness",
    "eps_tail",
    "model_from_dict",
    "model_to_dict",
    "model_hash",
]


# --------------------------------------------------------------------------
# families
# --------------------------------------------------------------------------

class CoefficientModel:
    """Shared behaviour of the coefficient families."""

    family_name: str = "abstract"

    def log_a(self, n: int) -> float:
        raise NotImplementedError

    def raw_a(self, n: int) -> float:
        """Family value of a_n for n >= -1.  May overflow to inf."""
        la = self.log_a(n)
        return math.inf if la >= 710.0 else math.exp(la)

    def raw_b(self, n: int) -> float:
        raise NotImplementedError

    def beta_at(self, n: int) -> float:
        """beta_n, computed in a way that survives huge a_n."""
        b = self.raw_b(n)
        if b == 0.0:
            return 0.0
        la = 0.5 * (self.log_a(n - 1) + self.log_a(n))
        return -math.copysign(math.exp(math.log(abs(b)) - la), b) / 2.0

    # -- mpmath evaluation (finite sections at high precision) -------------

    def a_mp(self, n: int, mp):
        raise NotImplementedError(f"{self.family_name} has no mp evaluation")

    def b_mp(self, n: int, mp):
        raise NotImplementedError(f"{self.family_name} has no mp evaluation")

    # -- closed-form classification hooks ----------------------------------

    def _beta_inf(self) -> float:
        raise NotImplementedError

    def _kappa_inf(self) -> float:
        raise NotImplementedError

    def _is_carleman(self) -> bool:
        """True iff sum 1/a_n diverges."""
        raise NotImplementedError

    def _hypothesis_flags(self) -> tuple[str, ...]:
        """Names of violated ell^1 hypotheses (empty when all hold)."""
        return ()

    # -- certified tail bounds ----------------------------------------------
    # Each returns an upper bound for the sum over m > n of the named term,
    # valid for n >= its own internal floor (callers go through eps_tail,
    # which covers small n by explicit summation).

    def alpha_tail(self, n: int) -> float:
        raise TailNotSummable(f"no alpha tail bound for {self.family_name}")

    def kdev_tail(self, n: int) -> float:
        raise TailNotSummable(f"no |k-1| tail bound for {self.family_name}")

    def betadiff_tail(self, n: int) -> float:
        raise TailNotSummable(f"no beta-increment tail bound for {self.family_name}")

    def tail_floor(self) -> int:
        """Terms up to this index are always summed explicitly."""
        return 8


@dataclass(frozen=True)
class PowerLaw(CoefficientModel):
    """a_n = gamma * max(n + shift, 1)**p, b_n = delta * max(n + shift, 1)**q.

    The floor keeps a_0 positive for shift = 0; `shift=1` shifts the whole
    family (a_n = gamma (n+1)^p), which covers e.g. the Hermite coefficients
    a_n = sqrt((n+1)/2) as PowerLaw(gamma=2**-0.5, p=0.5, shift=1).
    """

    gamma: float = 1.0
    p: float = 2.0
    delta: float = 0.0
    q: float = 0.0
    shift: int = 0

    family_name = "power_law"

    def __post_init__(self):
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ModelError("power_law: gamma must be positive and finite")
        if not (self.p > 0 and math.isfinite(self.p)):
            raise ModelError("power_law: p must be positive")
        if self.shift < 0 or self.shift != int(self.shift):
            raise ModelError("power_law: shift must be a non-negative integer")
        if self.delta != 0 and not math.isfinite(self.q):
            raise ModelError("power_law: q must be finite")

    def _m(self, n: int) -> int:
        return max(n + self.shift, 1)

    def log_a(self, n: int) -> float:
        return math.log(self.gamma) + self.p * math.log(self._m(n))

    def raw_b(self, n: int) -> float:
        if self.delta == 0.0:
            return 0.0
        return self.delta * self._m(n) ** self.q

    def a_mp(self, n: int, mp):
        return mp.mpf(self.gamma) * mp.mpf(self._m(n)) ** mp.mpf(self.p)

    def b_mp(self, n: int, mp):
        if self.delta == 0.0:
            return mp.mpf(0)
        return mp.mpf(self.delta) * mp.mpf(self._m(n)) ** mp.mpf(self.q)

    def _beta_inf(self) -> float:
        if self.delta == 0.0 or self.q < self.p:
            return 0.0
        if self.q == self.p:
            return -self.delta / (2.0 * self.gamma)
        return math.copysign(math.inf, -self.delta)

    def _kappa_inf(self) -> float:
        return 1.0

    def _is_carleman(self) -> bool:
        return self.p <= 1.0

    def _hypothesis_flags(self) -> tuple[str, ...]:
        if self.delta != 0.0 and self.q > self.p:
            return ("beta_increments_not_summable",)
        return ()

    def tail_floor(self) -> int:
        return max(8, 4 - self.shift)

    def alpha_tail(self, n: int) -> float:
        # alpha_m <= (2 gamma (M-1)^p)^{-1}, M = m + shift; integral test.
        if self.p <= 1.0:
            raise TailNotSummable("power_law: alpha series diverges for p <= 1")
        x = n + self.shift - 1
        assert x >= 1
        return x ** (1.0 - self.p) / (2.0 * self.gamma * (self.p - 1.0))

    def kdev_tail(self, n: int) -> float:
        # |k_m - 1| = (1 - M^-2)^{-p/2} - 1 <= (p/2) M^-2 (1 - M^-2)^{-p/2-1}
        # and (1 - M^-2)^{-p/2-1} <= (4/3)^{p/2+1} once M >= 2.
        x = n + self.shift
        assert x >= 2
        c = (4.0 / 3.0) ** (self.p / 2.0 + 1.0)
        return c * (self.p / 2.0) / x

    def betadiff_tail(self, n: int) -> float:
        if self.delta == 0.0:
            return 0.0
        if self.q > self.p:
            raise TailNotSummable("power_law: beta increments not summable for q > p")
        d = abs(self.delta) / (2.0 * self.gamma)
        x = n + self.shift - 2
        assert x >= 2
        if self.q == self.p:
            # beta_m = -(delta/2gamma) (M/(M-1))^{p/2}; derivative ~ t^-2
            return d * 2 ** (self.p / 2.0) * (self.p / 2.0) / x
        return d * (self.q + self.p) * 2 ** (self.p / 2.0 + 1) * x ** (self.q - self.p) / (self.p - self.q)


@dataclass(frozen=True)
class Geometric(CoefficientModel):
    """a_n = gamma * x**n (x > 1); b_n = delta * x**n, or derived from a
    constant beta via b_n = -2 beta_const sqrt(a_{n-1} a_n).

    The family extension a_{-1} = gamma/x keeps beta_0 exactly equal to the
    constant.  k_n == 1 and kappa_n == sqrt(x) identically.
    """

    gamma: float = 1.0
    x: float = 2.0
    delta: float = 0.0
    beta_const: Optional[float] = None

    family_name = "geometric"

    def __post_init__(self):
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ModelError("geometric: gamma must be positive and finite")
        if not (self.x > 1.0 and math.isfinite(self.x)):
            raise ModelError("geometric: x must exceed 1")
        if self.beta_const is not None and self.delta != 0.0:
            raise ModelError("geometric: give either delta or beta_const, not both")

    @classmethod
    def with_beta(cls, gamma: float, x: float, beta_inf: float) -> "Geometric":
        return cls(gamma=gamma, x=x, beta_const=beta_inf)

    def log_a(self, n: int) -> float:
        return math.log(self.gamma) + n * math.log(self.x)

    def raw_b(self, n: int) -> float:
        if self.beta_const is not None:
            # -2 beta sqrt(a_{n-1} a_n) = -2 beta gamma x^{n - 1/2}
            scale = -2.0 * self.beta_const * self.gamma / math.sqrt(self.x)
        else:
            scale = self.delta
        if scale == 0.0:
            return 0.0
        try:
            return scale * self.x ** n
        except OverflowError:
            return math.copysign(math.inf, scale)

    def beta_at(self, n: int) -> float:
        if self.beta_const is not None:
            return self.beta_const
        return super().beta_at(n)

    def a_mp(self, n: int, mp):
        return mp.mpf(self.gamma) * mp.mpf(self.x) ** n

    def b_mp(self, n: int, mp):
        if self.beta_const is not None:
            return -2 * mp.mpf(self.beta_const) * mp.mpf(self.gamma) * mp.mpf(self.x) ** n / mp.sqrt(mp.mpf(self.x))
        return mp.mpf(self.delta) * mp.mpf(self.x) ** n

    def _beta_inf(self) -> float:
        if self.beta_const is not None:
            return self.beta_const
        return -self.delta * math.sqrt(self.x) / (2.0 * self.gamma)

    def _kappa_inf(self) -> float:
        return math.sqrt(self.x)

    def _is_carleman(self) -> bool:
        return False

    def alpha_tail(self, n: int) -> float:
        # exact geometric sum: alpha_m = x^{1/2 - m} / (2 gamma); the 1e-12
        # inflation keeps the certificate an upper bound under float rounding
        return self.x ** (-n - 0.5) / (2.0 * self.gamma * (1.0 - 1.0 / self.x)) * (1.0 + 1e-12)

    def kdev_tail(self, n: int) -> float:
        return 0.0

    def betadiff_tail(self, n: int) -> float:
        return 0.0

    def tail_floor(self) -> int:
        return 1


@dataclass(frozen=True)
class Stretched(CoefficientModel):
    """a_n = gamma * x**(n**q_tilde), clamped at n=0 for the index -1 value.

    For 0 < q_tilde < 1 this sits strictly between power-law and geometric
    growth (kappa_inf = 1 yet sum 1/a_n < inf).  q_tilde = 1 degenerates to
    Geometric; q_tilde > 1 grows so fast that k_n - 1 no longer tends to 0
    (flagged) -- classification and self-adjointness verdicts still work.
    """

    gamma: float = 1.0
    x: float = 2.0
    q_tilde: float = 0.5
    beta_const: float = 0.0

    family_name = "stretched"

    def __post_init__(self):
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ModelError("stretched: gamma must be positive and finite")
        if not (self.x > 1.0 and math.isfinite(self.x)):
            raise ModelError("stretched: x must exceed 1")
        if not (self.q_tilde > 0 and math.isfinite(self.q_tilde)):
            raise ModelError("stretched: q_tilde must be positive")

    def log_a(self, n: int) -> float:
        return math.log(self.gamma) + max(n, 0) ** self.q_tilde * math.log(self.x)

    def raw_b(self, n: int) -> float:
        if self.beta_const == 0.0:
            return 0.0
        la = 0.5 * (self.log_a(n - 1) + self.log_a(n))
        if la >= 709.0:
            return math.copysign(math.inf, -self.beta_const)
        return -2.0 * self.beta_const * math.exp(la)

    def beta_at(self, n: int) -> float:
        return self.beta_const

    def a_mp(self, n: int, mp):
        return mp.mpf(self.gamma) * mp.mpf(self.x) ** (mp.mpf(max(n, 0)) ** mp.mpf(self.q_tilde))

    def b_mp(self, n: int, mp):
        if self.beta_const == 0.0:
            return mp.mpf(0)
        return -2 * mp.mpf(self.beta_const) * mp.sqrt(self.a_mp(n - 1, mp) * self.a_mp(n, mp))

    def _beta_inf(self) -> float:
        return self.beta_const

    def _kappa_inf(self) -> float:
        if self.q_tilde < 1.0:
            return 1.0
        if self.q_tilde == 1.0:
            return math.sqrt(self.x)
        return math.inf

    def _is_carleman(self) -> bool:
        return False

    def _hypothesis_flags(self) -> tuple[str, ...]:
        if self.q_tilde > 1.0:
            return ("k_deviation_not_summable",)
        return ()

    def tail_floor(self) -> int:
        return 8

    def alpha_tail(self, n: int) -> float:
        # alpha_m <= x^{-(m-1)^q} / (2 gamma); decreasing-term integral test
        # with the substitution y = ln(x) t^q giving an incomplete gamma.
        from scipy.special import gammaincc

        L = math.log(self.x)
        q = self.q_tilde
        head = self.x ** (-float(n) ** q)
        integ = (math.gamma(1.0 / q) / (q * L ** (1.0 / q))) * float(gammaincc(1.0 / q, L * float(n) ** q))
        return (head + integ) / (2.0 * self.gamma)

    def kdev_tail(self, n: int) -> float:
        q, L = self.q_tilde, math.log(self.x)
        if q == 1.0:
            return 0.0
        if q > 1.0:
            raise TailNotSummable("stretched: |k-1| not summable for q_tilde > 1")
        assert n >= 8
        # |k_m - 1| <= c (L/2) q(1-q) (m-1)^{q-2},  c = exp of the largest exponent
        c = math.exp((L / 2.0) * q * (1.0 - q) * (n - 1.0) ** (q - 2.0))
        return c * (L / 2.0) * q * (n - 1.0) ** (q - 1.0)

    def betadiff_tail(self, n: int) -> float:
        return 0.0


@dataclass(frozen=True)
class ParityPerturbed(CoefficientModel):
    """a_n = max(n,1)**p * (1 + c/max(n,1)) with c alternating by parity of n.

    With c_odd != c_even the deviation k_n - 1 decays only like 1/n, which
    breaks the summability hypothesis; diagnostics flag it and tail bounds
    refuse.  b_n = 0.
    """

    p: float = 2.0
    c_odd: float = 0.0
    c_even: float = 0.0

    family_name = "parity_perturbed"

    def __post_init__(self):
        if not (self.p > 1.0 and math.isfinite(self.p)):
            raise ModelError("parity_perturbed: p must exceed 1")
        if not (self.c_odd > -1.0 and self.c_even > -1.0):
            raise ModelError("parity_perturbed: parity constants must exceed -1")

    def _c(self, n: int) -> float:
        return self.c_odd if n % 2 else self.c_even

    def log_a(self, n: int) -> float:
        m = max(n, 1)
        return self.p * math.log(m) + math.log1p(self._c(n) / m)

    def raw_b(self, n: int) -> float:
        return 0.0

    def beta_at(self, n: int) -> float:
        return 0.0

    def a_mp(self, n: int, mp):
        m = max(n, 1)
        return mp.mpf(m) ** mp.mpf(self.p) * (1 + mp.mpf(self._c(n)) / m)

    def b_mp(self, n: int, mp):
        return mp.mpf(0)

    def _beta_inf(self) -> float:
        return 0.0

    def _kappa_inf(self) -> float:
        return 1.0

    def _is_carleman(self) -> bool:
        return self.p <= 1.0

    def _hypothesis_flags(self) -> tuple[str, ...]:
        if self.c_odd != self.c_even:
            return ("k_deviation_not_summable",)
        return ()

    def tail_floor(self) -> int:
        cmax = max(abs(self.c_odd), abs(self.c_even), 1.0)
        return max(8, int(math.ceil(4 * cmax)))

    def alpha_tail(self, n: int) -> float:
        if self.p <= 1.0:
            raise TailNotSummable("parity_perturbed: alpha series diverges for p <= 1")
        c_min = min(self.c_odd, self.c_even, 0.0)
        assert n >= self.tail_floor()
        damp = 1.0 / (1.0 + c_min / n)
        return damp * (n - 1.0) ** (1.0 - self.p) / (2.0 * (self.p - 1.0))

    def kdev_tail(self, n: int) -> float:
        if self.c_odd != self.c_even:
            raise TailNotSummable(
                "parity_perturbed: |k-1| ~ |c_even - c_odd| / n is not summable"
            )
        c = abs(self.c_odd)
        assert n >= self.tail_floor()
        return (self.p + 6.0 * c + 1.0) / (n - 1.0)

    def betadiff_tail(self, n: int) -> float:
        return 0.0


@dataclass(frozen=True)
class Tabulated(CoefficientModel):
    """Explicit arrays, optionally continued by a declared tail family.

    Indices past the arrays fall through to ``tail``; without a tail they
    raise.  Classification and tail bounds need the declared tail.
    """

    a_values: tuple = ()
    b_values: tuple = ()
    tail: Optional[CoefficientModel] = None

    family_name = "tabulated"

    def __post_init__(self):
        object.__setattr__(self, "a_values", tuple(float(v) for v in self.a_values))
        object.__setattr__(self, "b_values", tuple(float(v) for v in self.b_values))
        if len(self.a_values) == 0:
            raise ModelError("tabulated: a_values must be non-empty")
        if len(self.b_values) != len(self.a_values):
            raise ModelError("tabulated: a_values and b_values must have equal length")
        if any(not (v > 0 and math.isfinite(v)) for v in self.a_values):
            raise ModelError("tabulated: all a_values must be positive and finite")
        if any(not math.isfinite(v) for v in self.b_values):
            raise ModelError("tabulated: all b_values must be finite")

    def log_a(self, n: int) -> float:
        if n < 0:
            if self.tail is not None:
                return self.tail.log_a(n)
            return math.log(self.a_values[0])
        if n < len(self.a_values):
            return math.log(self.a_values[n])
        if self.tail is None:
            raise ModelError(f"tabulated: index {n} beyond table and no tail declared")
        return self.tail.log_a(n)

    def raw_a(self, n: int) -> float:
        # table entries round-trip exactly; only off-table indices go
        # through the log representation
        if 0 <= n < len(self.a_values):
            return self.a_values[n]
        return super().raw_a(n)

    def raw_b(self, n: int) -> float:
        if 0 <= n < len(self.b_values):
            return self.b_values[n]
        if self.tail is None:
            raise ModelError(f"tabulated: index {n} beyond table and no tail declared")
        return self.tail.raw_b(n)

    def a_mp(self, n: int, mp):
        if 0 <= n < len(self.a_values):
            return mp.mpf(self.a_values[n])
        if n == -1 and self.tail is None:
            return mp.mpf(self.a_values[0])
        if self.tail is None:
            raise ModelError(f"tabulated: index {n} beyond table and no tail declared")
        return self.tail.a_mp(n, mp)

    def b_mp(self, n: int, mp):
        if 0 <= n < len(self.b_values):
            return mp.mpf(self.b_values[n])
        if self.tail is None:
            raise ModelError(f"tabulated: index {n} beyond table and no tail declared")
        return self.tail.b_mp(n, mp)

    def _beta_inf(self) -> float:
        if self.tail is None:
            raise InconsistentTail("tabulated model without tail: beta_inf undetermined")
        return self.tail._beta_inf()

    def _kappa_inf(self) -> float:
        if self.tail is None:
            raise InconsistentTail("tabulated model without tail: kappa_inf undetermined")
        return self.tail._kappa_inf()

    def _is_carleman(self) -> bool:
        if self.tail is None:
            raise InconsistentTail(
                "tabulated model without tail: sum 1/a_n convergence cannot be decided"
            )
        return self.tail._is_carleman()

    def _hypothesis_flags(self) -> tuple[str, ...]:
        return self.tail._hypothesis_flags() if self.tail is not None else ()

    def tail_floor(self) -> int:
        base = len(self.a_values) + 1
        if self.tail is not None:
            return max(base, self.tail.tail_floor())
        return base

    def alpha_tail(self, n: int) -> float:
        if self.tail is None:
            raise TailNotSummable("tabulated model without tail")
        assert n >= len(self.a_values)
        return self.tail.alpha_tail(n)

    def kdev_tail(self, n: int) -> float:
        if self.tail is None:
            raise TailNotSummable("tabulated model without tail")
        assert n >= len(self.a_values)
        return self.tail.kdev_tail(n)

    def betadiff_tail(self, n: int) -> float:
        if self.tail is None:
            raise TailNotSummable("tabulated model without tail")
        assert n >= len(self.a_values)
        return self.tail.betadiff_tail(n)


# --------------------------------------------------------------------------
# evaluation and derived quantities
# --------------------------------------------------------------------------

def eval_a(model: CoefficientModel, n: int) -> float:
    """a_n; returns the boundary convention value 1/2 at n = -1."""
    if n == -1:
        return 0.5
    if n < -1:
        raise ModelError(f"a_n undefined for n = {n}")
    return model.raw_a(n)


def eval_b(model: CoefficientModel, n: int) -> float:
    if n < 0:
        raise ModelError(f"b_n undefined for n = {n}")
    return model.raw_b(n)


@dataclass(frozen=True)
class Derived:
    alpha: float
    beta: float
    kappa: float
    k: float  # nan at n = 0


def derived(model: CoefficientModel, n: int) -> Derived:
    """alpha_n, beta_n, kappa_n, k_n (k_0 is reported as nan).

    At n = 0 the index -1 neighbour is the family extension, not the
    boundary convention 1/2.
    """
    if n < 0:
        raise ModelError("derived quantities start at n = 0")
    la_prev = model.log_a(n - 1)
    la = model.log_a(n)
    la_next = model.log_a(n + 1)
    alpha = 0.5 * math.exp(-0.5 * (la_prev + la))
    beta = model.beta_at(n)
    kappa = math.exp(0.5 * (la_next - la))
    k = math.exp(la - 0.5 * (la_prev + la_next)) if n >= 1 else math.nan
    return Derived(alpha=alpha, beta=beta, kappa=kappa, k=k)


# --------------------------------------------------------------------------
# regime classification
# --------------------------------------------------------------------------

class RegimeKind(enum.Enum):
    SUBCRITICAL = "subcritical"
    SUPERCRITICAL = "supercritical"
    CARLEMAN_SUBCRITICAL = "carleman_subcritical"
    CARLEMAN_SUPERCRITICAL = "carleman_supercritical"
    UNSUPPORTED = "unsupported"


@dataclass(frozen=True)
class Regime:
    kind: RegimeKind
    beta_inf: float
    kappa_inf: float
    theta_inf: float      # arccos(beta_inf) when |beta_inf| < 1, else nan
    vartheta_inf: float   # arccosh|beta_inf| when |beta_inf| > 1, else nan
    zeta_inf: complex
    is_carleman: bool
    flags: tuple = ()

    @property
    def is_subcritical(self) -> bool:
        return self.kind in (RegimeKind.SUBCRITICAL, RegimeKind.CARLEMAN_SUBCRITICAL)

    @property
    def is_supercritical(self) -> bool:
        return self.kind in (RegimeKind.SUPERCRITICAL, RegimeKind.CARLEMAN_SUPERCRITICAL)


def _limit_zeta(beta_inf: float) -> complex:
    if abs(beta_inf) < 1.0:
        return complex(beta_inf, -math.sqrt(1.0 - beta_inf * beta_inf))
    if math.isinf(beta_inf):
        return complex(0.0)
    s = math.copysign(1.0, beta_inf)
    return complex(s * (abs(beta_inf) - math.sqrt(beta_inf * beta_inf - 1.0)))


def _aitken_limit(seq: list[float]) -> tuple[float, float]:
    """Aitken delta-squared limit estimate and a spread-based error gauge."""
    cur = list(seq)
    last_est = cur[-1]
    while len(cur) >= 3:
        nxt = []
        for i in range(len(cur) - 2):
            d1 = cur[i + 1] - cur[i]
            d2 = cur[i + 2] - 2 * cur[i + 1] + cur[i]
            if d2 == 0.0:
                nxt.append(cur[i + 2])
            else:
                nxt.append(cur[i + 2] - (cur[i + 2] - cur[i + 1]) ** 2 / d2)
        if not nxt:
            break
        last_est = nxt[-1]
        if len(nxt) >= 3 and max(nxt[-3:]) - min(nxt[-3:]) < 1e-12 * (1 + abs(last_est)):
            return last_est, max(nxt[-3:]) - min(nxt[-3:])
        cur = nxt
    spread = max(cur) - min(cur) if cur else math.inf
    return last_est, spread


def classify(model: CoefficientModel, window: int = 64, tol: float = 1e-6) -> Regime:
    """Decide the growth/limit regime of a model.

    ``window`` controls the stretch of indices used for the numerical
    consistency check of the closed-form limits (and for extrapolation when
    a Tabulated model delegates to its tail).
    """
    assert window >= 16, "classification window must be at least 16"
    beta_inf = model._beta_inf()
    kappa_inf = model._kappa_inf()
    carleman = model._is_carleman()
    flags = tuple(model._hypothesis_flags())

    # numerical sanity: the computed beta_n over the window must approach the
    # declared limit (exact families pass trivially).
    if math.isfinite(beta_inf):
        lo = window
        errs = [abs(model.beta_at(n) - beta_inf) for n in range(lo, lo + window)]
        if errs[-1] > max(10 * errs[0], 1e-8 * (1 + abs(beta_inf)), tol):
            raise InconsistentTail(
                f"beta_n drifts away from the declared limit {beta_inf!r} over the window"
            )

    if abs(abs(beta_inf) - 1.0) < tol:
        kind = RegimeKind.UNSUPPORTED
        theta = vartheta = math.nan
    elif abs(beta_inf) < 1.0:
        kind = RegimeKind.CARLEMAN_SUBCRITICAL if carleman else RegimeKind.SUBCRITICAL
        theta = math.acos(beta_inf)
        vartheta = math.nan
    else:
        kind = RegimeKind.CARLEMAN_SUPERCRITICAL if carleman else RegimeKind.SUPERCRITICAL
        theta = math.nan
        vartheta = math.acosh(abs(beta_inf)) if math.isfinite(beta_inf) else math.inf
        if math.isinf(beta_inf):
            flags = flags + ("beta_inf_infinite",)

    return Regime(
        kind=kind,
        beta_inf=beta_inf,
        kappa_inf=kappa_inf,
        theta_inf=theta,
        vartheta_inf=vartheta,
        zeta_inf=_limit_zeta(beta_inf),
        is_carleman=carleman,
        flags=flags,
    )


# --------------------------------------------------------------------------
# ell^1 diagnostics
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Ell1Report:
    partial_kdev: tuple        # (checkpoint, partial sum) pairs
    partial_betadiff: tuple
    partial_alpha: tuple
    kdev_exponent: float       # fitted decay exponent of |k_n - 1| (nan if 0)
    betadiff_exponent: float
    kdev_summable: bool
    betadiff_summable: bool
    alpha_summable: bool
    flags: tuple


def _fit_exponent(ns, terms) -> float:
    pts = [(math.log(n), math.log(t)) for n, t in zip(ns, terms) if t > 0]
    if len(pts) < 4:
        return math.nan
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = sum((x - mx) ** 2 for x in xs)
    return -num / den if den else math.nan


def ell1_diagnostics(model: CoefficientModel, n_max: int = 4096) -> Ell1Report:
    """Partial sums and fitted decay exponents for the hypothesis series."""
    checkpoints = []
    n = 64
    while n < n_max:
        checkpoints.append(n)
        n *= 2
    checkpoints.append(n_max)

    s_k = s_b = s_a = 0.0
    pk, pb, pa = [], [], []
    beta_prev = model.beta_at(0)
    last_decade_n, last_decade_k, last_decade_b = [], [], []
    ci = 0
    for m in range(1, n_max + 1):
        d = derived(model, m)
        s_k += abs(d.k - 1.0)
        s_b += abs(d.beta - beta_prev)
        s_a += d.alpha
        beta_prev = d.beta
        if m >= n_max // 10:
            last_decade_n.append(m)
            last_decade_k.append(abs(d.k - 1.0))
            last_decade_b.append(abs(d.beta - model.beta_at(m - 1)))
        if ci < len(checkpoints) and m == checkpoints[ci]:
            pk.append((m, s_k))
            pb.append((m, s_b))
            pa.append((m, s_a))
            ci += 1

    stride = max(1, len(last_decade_n) // 64)
    ke = _fit_exponent(last_decade_n[::stride], last_decade_k[::stride])
    be = _fit_exponent(last_decade_n[::stride], last_decade_b[::stride])

    flags = tuple(model._hypothesis_flags())
    try:
        carleman = model._is_carleman()
    except InconsistentTail:
        carleman = None
    kdev_ok = "k_deviation_not_summable" not in flags
    bdiff_ok = "beta_increments_not_summable" not in flags
    return Ell1Report(
        partial_kdev=tuple(pk),
        partial_betadiff=tuple(pb),
        partial_alpha=tuple(pa),
        kdev_exponent=ke,
        betadiff_exponent=be,
        kdev_summable=kdev_ok,
        betadiff_summable=bdiff_ok,
        alpha_summable=(carleman is False) if carleman is not None else False,
        flags=flags,
    )


# --------------------------------------------------------------------------
# self-adjointness of the minimal operator
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SelfAdjointness:
    verdict: str  # "esa" | "deficiency_1_1" | "unknown"
    reason: str


def check_essential_selfadjointness(
    model: CoefficientModel, regime: Optional[Regime] = None
) -> SelfAdjointness:
    """Essential self-adjointness of the minimal Jacobi operator.

    In the fast-growth case with |beta_inf| > 1 the decision comes from the
    divergence of sum a_n^{-1} rho^{2n} with rho = |beta_inf| +
    sqrt(beta_inf^2 - 1); the comparison is done in closed form per family.
    """
    if regime is None:
        regime = classify(model)
    if regime.kind is RegimeKind.UNSUPPORTED:
        return SelfAdjointness("unknown", "|beta_inf| = 1 is outside the supported regimes")
    if regime.is_carleman:
        return SelfAdjointness("esa", "sum 1/a_n diverges (classical criterion)")
    if regime.is_subcritical:
        return SelfAdjointness(
            "deficiency_1_1",
            "fast growth with |beta_inf| < 1: every solution is square-summable",
        )

    # fast growth, |beta_inf| > 1
    if math.isinf(regime.beta_inf):
        return SelfAdjointness("esa", "beta_n -> inf: the divergence test holds trivially")
    rho = abs(regime.beta_inf) + math.sqrt(regime.beta_inf ** 2 - 1.0)

    base = model.tail if isinstance(model, Tabulated) else model
    if isinstance(base, Geometric):
        if math.sqrt(base.x) <= rho:
            return SelfAdjointness(
                "esa", f"sqrt(x) = {math.sqrt(base.x):.6g} <= rho = {rho:.6g}"
            )
        return SelfAdjointness(
            "deficiency_1_1", f"sqrt(x) = {math.sqrt(base.x):.6g} > rho = {rho:.6g}"
        )
    if isinstance(base, Stretched):
        if base.q_tilde < 1.0:
            return SelfAdjointness(
                "esa", "rho^{2n} beats sub-geometric growth: the test series diverges"
            )
        if base.q_tilde == 1.0:
            verdict = "esa" if math.sqrt(base.x) <= rho else "deficiency_1_1"
            return SelfAdjointness(verdict, "q_tilde = 1 reduces to the geometric rule")
        return SelfAdjointness(
            "deficiency_1_1",
            "super-geometric growth dominates rho^{2n}: the test series converges",
        )
    if isinstance(base, (PowerLaw, ParityPerturbed)):
        return SelfAdjointness(
            "esa", "rho > 1 while a_n grows polynomially: the test series diverges"
        )
    return SelfAdjointness("unknown", f"no divergence rule for family {base.family_name!r}")


# --------------------------------------------------------------------------
# remainder-size tails
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EpsTail:
    value: float
    certified: bool
    n: int
    cutoff: int


def eps_tail(model: CoefficientModel, z: complex, n: int, *, cutoff: Optional[int] = None) -> EpsTail:
    """Upper bound for eps_n = sum_{m>n} (|beta_{m-1}-beta_m| + |k_m-1| + alpha_m |z|).

    Terms up to ``cutoff`` (default: past the family's analytic floor) are
    summed explicitly; the rest comes from the family's certified bounds.
    Raises TailNotSummable when a constituent series diverges.
    """
    if n < 0:
        raise ModelError("eps_tail starts at n = 0")
    floor = model.tail_floor()
    M = max(n, floor, 64) if cutoff is None else max(cutoff, n)
    zz = abs(z)
    terms = []
    beta_prev = model.beta_at(n)
    for m in range(n + 1, M + 1):
        d = derived(model, m)
        terms.append(abs(d.beta - beta_prev) + abs(d.k - 1.0) + d.alpha * zz)
        beta_prev = d.beta
    head = math.fsum(terms)
    tail = model.betadiff_tail(M) + model.kdev_tail(M) + zz * model.alpha_tail(M)
    return EpsTail(value=head + tail, certified=True, n=n, cutoff=M)


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

_FAMILIES = {
    "power_law": PowerLaw,
    "geometric": Geometric,
    "stretched": Stretched,
    "parity_perturbed": ParityPerturbed,
    "tabulated": Tabulated,
}


def model_to_dict(model: CoefficientModel) -> dict:
    out = {"family": model.family_name}
    for f in fields(model):
        v = getattr(model, f.name)
        if f.name == "tail":
            v = model_to_dict(v) if v is not None else None
        elif isinstance(v, tuple):
            v = list(v)
        out[f.name] = v
    return out


def model_from_dict(data: dict) -> CoefficientModel:
    """Build a model from a config mapping (see the CLI module for the schema)."""
    if not isinstance(data, dict):
        raise ModelError("model config must be a mapping")
    data = dict(data)
    data.pop("schema", None)
    fam = data.pop("family", None)
    if fam not in _FAMILIES:
        raise ModelError(f"unknown family {fam!r}; expected one of {sorted(_FAMILIES)}")
    cls = _FAMILIES[fam]
    allowed = {f.name for f in fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ModelError(f"unknown parameters for {fam}: {sorted(unknown)}")
    if fam == "tabulated" and data.get("tail") is not None:
        data["tail"] = model_from_dict(data["tail"])
    try:
        return cls(**data)
    except TypeError as exc:
        raise ModelError(f"bad parameters for {fam}: {exc}") from None


def model_hash(model: CoefficientModel) -> str:
    blob = json.dumps(model_to_dict(model), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
