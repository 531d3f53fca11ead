"""Exception types shared across the package."""
from __future__ import annotations


class JacobiJostError(Exception):
    """Base class for all library errors."""


class ModelError(JacobiJostError):
    """Invalid coefficient model (bad parameters, bad config file, bad index)."""


class InconsistentTail(ModelError):
    """Tabulated coefficients whose tail limits cannot be extracted reliably."""


class TailNotSummable(JacobiJostError):
    """A requested tail bound diverges (the ell^1 hypothesis is violated)."""


class UnsupportedRegime(JacobiJostError):
    """|beta_inf| is too close to 1; the asymptotic machinery does not apply."""


class RegimeMismatch(JacobiJostError):
    """An operation was called on a model outside the regime it is built for."""


class NotConverged(JacobiJostError):
    """Truncation or iteration failed to reach the requested accuracy."""


class PrecisionError(JacobiJostError):
    """Finite-precision arithmetic broke an exact structural property."""


class DegenerateWronskian(JacobiJostError):
    """A Wronskian that must be bounded away from zero came out too small."""


class ZeroCrossing(JacobiJostError):
    """A solution value vanished where a division by it was required."""


class PoleAtZ(JacobiJostError):
    """Resolvent evaluation requested at (or numerically on top of) an eigenvalue."""


class NearCritical(JacobiJostError):
    """|1 - beta_n^2| is below tolerance; the slowly-varying root is ill-defined."""
