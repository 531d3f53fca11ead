"""Log-magnitude representation of complex numbers.

Solution sequences on rapidly growing Jacobi matrices span thousands of
orders of magnitude, so values are carried as (log|w|, arg w) pairs with the
argument kept as an UNWRAPPED float: accumulated phases (sums of per-index
root angles) stay meaningful far beyond [-pi, pi], and multiplication /
inversion are plain angle arithmetic.  Zero is log_abs = -inf, phase 0.0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["LogComplex", "log_abs_array", "phase_array"]


@dataclass(frozen=True)
class LogComplex:
    log_abs: float
    phase: float  # radians, not reduced mod 2 pi

    @staticmethod
    def from_complex(w: complex) -> "LogComplex":
        w = complex(w)
        r = abs(w)
        if r == 0.0:
            return LogComplex(-math.inf, 0.0)
        return LogComplex(math.log(r), math.atan2(w.imag, w.real))

    @staticmethod
    def from_parts(log_abs: float, phase: float) -> "LogComplex":
        if log_abs == -math.inf:
            return LogComplex(-math.inf, 0.0)
        return LogComplex(float(log_abs), float(phase))

    def to_complex(self) -> complex:
        # Overflows to inf for log_abs >~ 709; callers that may hit that
        # range should stay in log form.
        if self.log_abs == -math.inf:
            return 0j
        m = math.exp(self.log_abs)
        return complex(m * math.cos(self.phase), m * math.sin(self.phase))

    @property
    def is_zero(self) -> bool:
        return self.log_abs == -math.inf

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        if self.is_zero or other.is_zero:
            return LogComplex(-math.inf, 0.0)
        return LogComplex(self.log_abs + other.log_abs, self.phase + other.phase)

    def __truediv__(self, other: "LogComplex") -> "LogComplex":
        if other.is_zero:
            raise ZeroDivisionError("division by an exactly-zero LogComplex")
        if self.is_zero:
            return self
        return LogComplex(self.log_abs - other.log_abs, self.phase - other.phase)

    def __neg__(self) -> "LogComplex":
        if self.is_zero:
            return self
        return LogComplex(self.log_abs, self.phase + math.pi)

    def conjugate(self) -> "LogComplex":
        return LogComplex(self.log_abs, -self.phase)

    def __add__(self, other: "LogComplex") -> "LogComplex":
        # Shift both to the larger magnitude; the inner sum is then O(1) and
        # the large unwrapped base angle survives as an offset.
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if other.log_abs > self.log_abs:
            self, other = other, self
        d = math.exp(other.log_abs - self.log_abs)
        rel = other.phase - self.phase
        inner = complex(1.0 + d * math.cos(rel), d * math.sin(rel))
        r = abs(inner)
        if r == 0.0:
            return LogComplex(-math.inf, 0.0)
        return LogComplex(
            self.log_abs + math.log(r), self.phase + math.atan2(inner.imag, inner.real)
        )

    def __sub__(self, other: "LogComplex") -> "LogComplex":
        return self + (-other)

    def scaled(self, factor: float) -> "LogComplex":
        """Multiply by a plain real factor."""
        if factor == 0.0:
            return LogComplex(-math.inf, 0.0)
        if self.is_zero:
            return self
        shift = 0.0 if factor > 0 else math.pi
        return LogComplex(self.log_abs + math.log(abs(factor)), self.phase + shift)

    def abs_ratio(self, other: "LogComplex") -> float:
        """|self| / |other| as a float (inf/0 handled through exp overflow)."""
        if other.is_zero:
            return math.inf
        if self.is_zero:
            return 0.0
        return math.exp(self.log_abs - other.log_abs)


def log_abs_array(values: np.ndarray) -> np.ndarray:
    """Elementwise log|w| with -inf at zeros (no warnings)."""
    mags = np.abs(values)
    out = np.full(mags.shape, -np.inf)
    nz = mags > 0
    out[nz] = np.log(mags[nz])
    return out


def phase_array(values: np.ndarray) -> np.ndarray:
    """Elementwise arg(w) in (-pi, pi], 0.0 at zeros."""
    out = np.angle(np.asarray(values, dtype=complex))
    out[np.abs(values) == 0] = 0.0
    return np.asarray(out, dtype=float)
