import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from jacobi_jost.logscale import LogComplex, log_abs_array, phase_array

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)
logmag = st.floats(min_value=-600.0, max_value=600.0, allow_nan=False)
angle = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)


def close(a: complex, b: complex, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


@given(finite, finite)
def test_round_trip(re, im):
    w = complex(re, im)
    assert close(LogComplex.from_complex(w).to_complex(), w)


def test_zero():
    z = LogComplex.from_complex(0.0)
    assert z.is_zero
    assert z.to_complex() == 0j
    assert (z + LogComplex.from_complex(2.0)).to_complex() == 2.0
    assert (LogComplex.from_complex(2.0) * z).is_zero


@given(logmag, angle, logmag, angle)
def test_mul_div_agree_with_complex(l1, p1, l2, p2):
    a = LogComplex.from_parts(l1, p1)
    b = LogComplex.from_parts(l2, p2)
    prod = a * b
    assert prod.log_abs == pytest.approx(l1 + l2)
    assert prod.phase == pytest.approx(p1 + p2)
    quot = a / b
    assert quot.log_abs == pytest.approx(l1 - l2)


@given(finite, finite, finite, finite)
def test_add_sub_agree_with_complex(r1, i1, r2, i2):
    a, b = complex(r1, i1), complex(r2, i2)
    got = (LogComplex.from_complex(a) + LogComplex.from_complex(b)).to_complex()
    assert close(got, a + b, 1e-12)
    got = (LogComplex.from_complex(a) - LogComplex.from_complex(b)).to_complex()
    assert close(got, a - b, 1e-12)


def test_add_preserves_huge_scale():
    # both terms far outside the float range; relative arithmetic survives
    a = LogComplex.from_parts(5000.0, 0.3)
    b = LogComplex.from_parts(4999.0, 1.1)
    s = a + b
    # compare against scaled-down complex arithmetic
    ref = cmath.exp(complex(0, 0.3)) + math.exp(-1.0) * cmath.exp(complex(0, 1.1))
    assert s.log_abs - 5000.0 == pytest.approx(math.log(abs(ref)), abs=1e-12)
    assert s.phase % (2 * math.pi) == pytest.approx(
        cmath.phase(ref) % (2 * math.pi), abs=1e-12
    )


def test_unwrapped_phase_survives_add():
    # base angle 100 rad stays as an offset, no mod-2pi reduction
    a = LogComplex.from_parts(2.0, 100.0)
    b = LogComplex.from_parts(-3.0, 100.5)
    assert abs((a + b).phase - 100.0) < 1.0


@given(logmag, angle)
def test_neg_conj_scaled(l, p):
    a = LogComplex.from_parts(l, p)
    assert (-a).to_complex() == pytest.approx(-a.to_complex(), rel=1e-12)
    assert a.conjugate().phase == -p
    assert a.scaled(-2.0).log_abs == pytest.approx(l + math.log(2.0))


def test_arrays():
    v = np.array([1.0, 0.0, -2.0, 1j])
    la = log_abs_array(v)
    assert la[1] == -np.inf
    assert la[2] == pytest.approx(math.log(2.0))
    ph = phase_array(v)
    assert ph[0] == 0.0
    assert ph[1] == 0.0
    assert ph[2] == pytest.approx(math.pi)
    assert ph[3] == pytest.approx(math.pi / 2)
