"""Exact and outward-rounded comparison helpers.

Every number-theoretic predicate in the package is decided through
:func:`compare_ge` / :func:`compare_le`, which return ``True``, ``False`` or
``None`` (undecided).  Thresholds may be exact (``int``/``Fraction``), an
enclosure pair ``(lo, hi)``, an ``mpmath.iv`` interval, or a float carrying a
declared relative error.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from fractions import Fraction
from numbers import Rational

import mpmath

# relative error assumed for thresholds handed over as plain floats
FLOAT_REL_ERR = 2.0 ** -48

ENCLOSURE_PREC = 160


@contextmanager
def iv_prec(bits: int):
    """Temporarily set the working precision of ``mpmath.iv``."""
    old = mpmath.iv.prec
    mpmath.iv.prec = bits
    try:
        yield mpmath.iv
    finally:
        mpmath.iv.prec = old


def mpf_to_fraction(x) -> Fraction:
    """Exact value of an ``mpmath.mpf`` (a dyadic rational)."""
    if not isinstance(x, mpmath.mpf):
        x = mpmath.mpf(x)
    if not mpmath.isfinite(x):
        raise ValueError("non-finite value has no rational representation")
    return _raw_to_fraction(x._mpf_)


def _raw_to_fraction(t) -> Fraction:
    sign, man, exp, _ = t
    if not man and exp:
        raise ValueError("non-finite interval endpoint")
    man = -int(man) if sign else int(man)
    return Fraction(man * (1 << exp)) if exp >= 0 else Fraction(man, 1 << -exp)


def iv_to_fractions(x) -> tuple[Fraction, Fraction]:
    """Exact endpoints of an ``mpmath.iv`` interval (no rounding)."""
    a, b = x._mpi_
    return _raw_to_fraction(a), _raw_to_fraction(b)


def as_exact(x) -> Fraction | None:
    """Return ``x`` as a Fraction when it is an exact rational, else None."""
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    return None


def to_rational(x) -> Fraction:
    """Exact rational for ints, Fractions, floats (their dyadic value) and mpf."""
    exact = as_exact(x)
    if exact is not None:
        return exact
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, mpmath.mpf):
        return mpf_to_fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def decimal_fraction(x) -> Fraction:
    """Short exact rational for a user-facing parameter (``0.8`` -> ``4/5``)."""
    exact = as_exact(x)
    if exact is not None:
        return exact
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x)
    return to_rational(x)


def enclosure(t) -> tuple[Fraction, Fraction]:
    """Rational enclosure ``[lo, hi]`` of a threshold value."""
    exact = as_exact(t)
    if exact is not None:
        return exact, exact
    if isinstance(t, tuple) and len(t) == 2:
        return to_rational(t[0]), to_rational(t[1])
    if isinstance(t, mpmath.ctx_iv.ivmpf):
        return iv_to_fractions(t)
    if isinstance(t, float):
        if not math.isfinite(t):
            raise ValueError("threshold is not finite")
        v = Fraction(t)
        slack = abs(v) * Fraction(FLOAT_REL_ERR) + Fraction(math.ulp(0.0))
        return v - slack, v + slack
    if isinstance(t, mpmath.mpf):
        v = mpf_to_fraction(t)
        slack = abs(v) * Fraction(2) ** (-(mpmath.mp.prec - 2))
        return v - slack, v + slack
    raise TypeError(f"unsupported threshold type {type(t).__name__}")


def compare_ge(value, threshold) -> bool | None:
    """Decide ``value >= threshold`` for an exact ``value``; None if undecided."""
    v = to_rational(value)
    lo, hi = enclosure(threshold)
    if v >= hi:
        return True
    if v < lo:
        return False
    if lo == hi:
        return v >= lo
    return None


def compare_le(value, threshold) -> bool | None:
    """Decide ``value <= threshold`` for an exact ``value``; None if undecided."""
    v = to_rational(value)
    lo, hi = enclosure(threshold)
    if v <= lo:
        return True
    if v > hi:
        return False
    if lo == hi:
        return v <= hi
    return None


def compare_lt(value, threshold) -> bool | None:
    ge = compare_ge(value, threshold)
    return None if ge is None else not ge


def floor_root(n: int, k: int) -> int:
    """``floor(n ** (1/k))`` for integers ``n >= 0``, ``k >= 1``."""
    if n < 0 or k < 1:
        raise ValueError("floor_root needs n >= 0 and k >= 1")
    if n < 2 or k == 1:
        return n
    # float seed, then exact correction
    try:
        x = int(round(n ** (1.0 / k)))
    except OverflowError:
        x = 1 << ((n.bit_length() + k - 1) // k)
    x = max(x, 1)
    # Newton iteration from above for large inputs
    if abs(x ** k - n) > n >> 20:
        x = 1 << ((n.bit_length() + k - 1) // k)
        while True:
            y = ((k - 1) * x + n // x ** (k - 1)) // k
            if y >= x:
                break
            x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def rational_power_floor(q: int, exponent: Fraction) -> tuple[int, bool]:
    """Return ``(floor(q**exponent), exact)`` for integer ``q >= 1``, exponent >= 0."""
    a, b = exponent.numerator, exponent.denominator
    if a < 0:
        raise ValueError("exponent must be non-negative")
    base = q ** a
    m = floor_root(base, b)
    return m, m ** b == base


def c_range(q: int, exponent: Fraction, lo_factor=Fraction(1, 4),
            hi_factor=Fraction(1, 2)) -> tuple[int, int]:
    """Integers ``c`` with ``lo_factor*q**e <= c <= hi_factor*q**e`` (exact)."""
    a, b = exponent.numerator, exponent.denominator
    base = q ** a
    lo_factor = Fraction(lo_factor)
    hi_factor = Fraction(hi_factor)
    # smallest c with (c / lo_factor)^b >= q^a
    c_lo = _smallest_scaled_root_ge(base, b, lo_factor)
    c_hi = _largest_scaled_root_le(base, b, hi_factor)
    return c_lo, c_hi


def _smallest_scaled_root_ge(base: int, b: int, factor: Fraction) -> int:
    # c >= factor * base^(1/b)  <=>  (c * fd)^b >= (fn)^b * base
    fn, fd = factor.numerator, factor.denominator
    target = fn ** b * base
    approx = floor_root(target, b) // fd
    c = max(approx - 1, 0)
    while (c * fd) ** b < target:
        c += 1
    while c > 0 and ((c - 1) * fd) ** b >= target:
        c -= 1
    return c


def _largest_scaled_root_le(base: int, b: int, factor: Fraction) -> int:
    fn, fd = factor.numerator, factor.denominator
    target = fn ** b * base
    c = floor_root(target, b) // fd + 1
    while c > 0 and (c * fd) ** b > target:
        c -= 1
    return c


def ge_rational_power(lhs: int, q: int, exponent: Fraction, factor=Fraction(1)) -> bool:
    """Exact test ``lhs >= factor * q**exponent`` for non-negative integers."""
    a, b = exponent.numerator, exponent.denominator
    factor = Fraction(factor)
    return (lhs * factor.denominator) ** b >= factor.numerator ** b * q ** a


def iv_power(c, q, tau, prec: int = ENCLOSURE_PREC):
    """Outward-rounded enclosure of ``c * q**tau`` as a Fraction pair."""
    with iv_prec(prec + q.bit_length() if isinstance(q, int) else prec):
        val = mpmath.iv.mpf(_iv_arg(c)) * mpmath.iv.mpf(_iv_arg(q)) ** mpmath.iv.mpf(_iv_arg(tau))
    return iv_to_fractions(val)


def _iv_arg(x):
    if isinstance(x, Fraction):
        return mpmath.iv.mpf(x.numerator) / x.denominator
    if isinstance(x, int):
        return mpmath.iv.mpf(x)
    if isinstance(x, float):
        return mpmath.iv.mpf(x)
    if isinstance(x, str):
        return mpmath.iv.mpf(x)
    return x
