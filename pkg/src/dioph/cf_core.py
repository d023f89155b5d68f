"""Exact continued-fraction engine.

Words are immutable tuples of partial quotients with their continuant pairs
``(p_k, q_k)`` cached incrementally.  Cylinders carry exact rational
endpoints.  Real inputs are handled through rational enclosures: a digit is
only emitted once both ends of the enclosure agree on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import mpmath

from ._numeric import as_exact, compare_ge, iv_to_fractions, mpf_to_fraction, to_rational
from .errors import DomainError, PrecisionExhausted


def _extend_continuants(pairs, prev, digits):
    (p1, q1), (p0, q0) = prev
    out = list(pairs)
    for a in digits:
        p1, q1, p0, q0 = a * p1 + p0, a * q1 + q0, p1, q1
        out.append((p1, q1))
    return tuple(out)


@dataclass(frozen=True)
class ContinuedFractionWord:
    """Finite word ``(a_1, ..., a_n)`` with exact continuants.

    ``continuants[k-1]`` is ``(p_k, q_k)``.  ``terminated`` marks a word that
    is the complete expansion of a rational (so the Gauss orbit hit 0).
    """

    digits: tuple[int, ...]
    continuants: tuple[tuple[int, int], ...] = field(default=(), repr=False, compare=False)
    terminated: bool = False

    def __post_init__(self):
        digits = tuple(int(a) for a in self.digits)
        for a in digits:
            if a < 1:
                raise DomainError(f"partial quotients must be positive, got {a}")
        object.__setattr__(self, "digits", digits)
        if len(self.continuants) != len(digits):
            object.__setattr__(
                self, "continuants",
                _extend_continuants((), ((0, 1), (1, 0)), digits))

    @classmethod
    def of(cls, *digits: int) -> "ContinuedFractionWord":
        return cls(tuple(digits))

    def __len__(self):
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __getitem__(self, i):
        return self.digits[i]

    def __add__(self, other):
        other_digits = other.digits if isinstance(other, ContinuedFractionWord) else tuple(other)
        return self.extend(other_digits)

    def pair(self, k: int) -> tuple[int, int]:
        """``(p_k, q_k)`` with the conventions ``k=0 -> (0,1)``, ``k=-1 -> (1,0)``."""
        if k == -1:
            return (1, 0)
        if k == 0:
            return (0, 1)
        return self.continuants[k - 1]

    @property
    def p(self) -> int:
        return self.pair(len(self))[0]

    @property
    def q(self) -> int:
        return self.pair(len(self))[1]

    @property
    def p_prev(self) -> int:
        return self.pair(len(self) - 1)[0]

    @property
    def q_prev(self) -> int:
        return self.pair(len(self) - 1)[1]

    def extend(self, digits: Iterable[int]) -> "ContinuedFractionWord":
        """Append digits, reusing the cached continuants."""
        digits = tuple(int(a) for a in digits)
        if any(a < 1 for a in digits):
            raise DomainError("partial quotients must be positive")
        n = len(self)
        pairs = _extend_continuants(self.continuants, (self.pair(n), self.pair(n - 1)), digits)
        return ContinuedFractionWord(self.digits + digits, pairs)

    def value(self) -> Fraction:
        """Exact value ``p_n / q_n`` (``0`` for the empty word)."""
        return Fraction(self.p, self.q)

    def canonical(self) -> "ContinuedFractionWord":
        """Rewrite a trailing ``(..., a, 1)`` as ``(..., a+1)``."""
        if len(self) >= 2 and self.digits[-1] == 1:
            return ContinuedFractionWord(self.digits[:-2] + (self.digits[-2] + 1,),
                                         terminated=self.terminated)
        return self


def as_word(w) -> ContinuedFractionWord:
    return w if isinstance(w, ContinuedFractionWord) else ContinuedFractionWord(tuple(w))


def evaluate(word) -> Fraction:
    return as_word(word).value()


@dataclass(frozen=True)
class RealEnclosure:
    """A real number known only to lie in ``[lo, hi]`` (exact rationals)."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = to_rational(self.lo), to_rational(self.hi)
        if lo > hi:
            raise ValueError("enclosure has lo > hi")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_real(cls, x, prec: int | None = None) -> "RealEnclosure":
        """Enclosure of a float or mpf carrying ``prec`` significant bits."""
        if isinstance(x, mpmath.ctx_iv.ivmpf):
            return cls(*iv_to_fractions(x))
        if isinstance(x, float):
            v = Fraction(x)
            half = Fraction(math.ulp(x)) if prec is None else _rel_slack(v, prec)
            return cls(v - half, v + half)
        if isinstance(x, mpmath.mpf):
            v = mpf_to_fraction(x)
            bits = mpmath.mp.prec if prec is None else prec
            return cls(v - _rel_slack(v, bits), v + _rel_slack(v, bits))
        raise TypeError(f"unsupported real type {type(x).__name__}")


def _rel_slack(v: Fraction, prec: int) -> Fraction:
    if v == 0:
        return Fraction(1, 1 << prec)
    e = abs(v.numerator).bit_length() - v.denominator.bit_length()
    return Fraction(2) ** (e - prec + 1)


def _gauss_step(x: Fraction) -> tuple[int, Fraction]:
    inv = 1 / x
    a = inv.numerator // inv.denominator
    return a, inv - a


def cf_expand(x, depth: int, prec: int | None = None) -> ContinuedFractionWord:
    """First ``depth`` partial quotients of ``x`` in ``[0, 1)``.

    Exact inputs (``int``, ``Fraction``) expand until termination.  Floats,
    ``mpf`` values and :class:`RealEnclosure` are treated as enclosures; a
    :class:`PrecisionExhausted` is raised when the enclosure cannot certify
    ``depth`` digits (it carries the certified prefix as ``.certified``).
    """
    if depth < 1:
        raise DomainError("depth must be >= 1")
    exact = as_exact(x)
    if exact is not None:
        return _expand_exact(exact, depth)
    enc = x if isinstance(x, RealEnclosure) else RealEnclosure.from_real(x, prec)
    if enc.lo == enc.hi:
        return _expand_exact(enc.lo, depth)
    return _expand_enclosure(enc, depth)


def _expand_exact(x: Fraction, depth: int) -> ContinuedFractionWord:
    if not 0 <= x < 1:
        raise DomainError(f"x must lie in [0, 1), got {x}")
    digits = []
    while len(digits) < depth and x != 0:
        a, x = _gauss_step(x)
        digits.append(a)
    return ContinuedFractionWord(tuple(digits), terminated=(x == 0))


def _expand_enclosure(enc: RealEnclosure, depth: int) -> ContinuedFractionWord:
    lo, hi = enc.lo, enc.hi
    if lo < 0 or hi >= 1:
        if hi < 0 or lo >= 1:
            raise DomainError("x must lie in [0, 1)")
        raise PrecisionExhausted("enclosure straddles the boundary of [0, 1)")
    digits = []
    while len(digits) < depth:
        if lo == 0:
            exc = PrecisionExhausted(
                f"enclosure reaches a rational endpoint after {len(digits)} digits")
            exc.certified = ContinuedFractionWord(tuple(digits))
            raise exc
        a_lo, t_lo = _gauss_step(lo)
        a_hi, t_hi = _gauss_step(hi)
        if a_lo != a_hi:
            exc = PrecisionExhausted(
                f"only {len(digits)} of {depth} digits are certified by the input precision")
            exc.certified = ContinuedFractionWord(tuple(digits))
            raise exc
        digits.append(a_lo)
        # the Gauss map reverses orientation
        lo, hi = t_hi, t_lo
    return ContinuedFractionWord(tuple(digits))


@dataclass(frozen=True)
class Cylinder:
    """Fundamental interval of all x whose expansion starts with ``word``."""

    word: ContinuedFractionWord
    left: Fraction
    right: Fraction
    length: Fraction

    def contains(self, x) -> bool:
        x = to_rational(x)
        return self.left <= x < self.right


def cylinder(word) -> Cylinder:
    """Exact cylinder of a non-empty word.

    Endpoints are ``p_n/q_n`` and ``(p_n+p_{n-1})/(q_n+q_{n-1})``; for odd n
    the former is the right end.
    """
    word = as_word(word)
    n = len(word)
    if n == 0:
        raise DomainError("cylinder of the empty word is [0, 1)")
    p, q = word.pair(n)
    pp, qp = word.pair(n - 1)
    a = Fraction(p, q)
    b = Fraction(p + pp, q + qp)
    left, right = (b, a) if n % 2 == 1 else (a, b)
    return Cylinder(word, left, right, Fraction(1, q * (q + qp)))


def continuants(word) -> tuple[tuple[int, int], ...]:
    word = as_word(word)
    if len(word) == 0:
        raise DomainError("continuants need a non-empty word")
    return word.continuants


def continuant_ratio(prefix, suffix) -> Fraction:
    """``q_{n+k}(prefix.suffix) / (q_n(prefix) q_k(suffix))``, always in [1, 2]."""
    prefix, suffix = as_word(prefix), as_word(suffix)
    if len(prefix) == 0 or len(suffix) == 0:
        raise DomainError("continuant_ratio needs non-empty words")
    joined = prefix.extend(suffix.digits)
    return Fraction(joined.q, prefix.q * suffix.q)


@dataclass(frozen=True)
class EventProfile:
    word: ContinuedFractionWord
    hits_K: tuple[int, ...]
    hits_G: tuple[int, ...]
    uncertain_K: tuple[int, ...]
    uncertain_G: tuple[int, ...]
    bad_N_ok: bool | None


def event_profile(word, phi1: Callable | None = None, phi2: Callable | None = None,
                  N: int | None = None) -> EventProfile:
    """Indices ``n >= 1`` where ``a_{n+1} >= phi1(q_n)`` (K) or
    ``a_n a_{n+1} >= phi2(q_n)`` (G).

    ``phi`` may return an exact rational, a ``(lo, hi)`` enclosure, an
    ``mpmath.iv`` interval or a float (treated with a relative error of
    ``2**-48``).  Undecided comparisons land in the uncertain buckets.
    """
    word = as_word(word)
    if len(word) == 0:
        raise DomainError("event_profile needs a non-empty word")
    hk, hg, uk, ug = [], [], [], []
    a = word.digits
    for n in range(1, len(word)):
        q_n = word.pair(n)[1]
        if phi1 is not None:
            r = compare_ge(a[n], phi1(q_n))
            (uk if r is None else hk if r else []).append(n)
        if phi2 is not None:
            r = compare_ge(a[n - 1] * a[n], phi2(q_n))
            (ug if r is None else hg if r else []).append(n)
    bad = None if N is None else all(d <= N for d in a)
    return EventProfile(word, tuple(hk), tuple(hg), tuple(uk), tuple(ug), bad)


def jarnik_bounds(N: int) -> tuple[float, float]:
    """Closed-form bounds on the Hausdorff dimension of Bad(N), natural log."""
    if N < 8:
        raise DomainError("jarnik_bounds needs N >= 8")
    lower = 1.0 - 1.0 / (N * math.log(2.0))
    upper = 1.0 - 1.0 / (8.0 * N * math.log(N))
    return lower, upper


def bad_N(word, N: int) -> bool:
    return all(a <= N for a in as_word(word))


def child_cylinders(word, digits: Sequence[int]) -> list[Cylinder]:
    word = as_word(word)
    return [cylinder(word.extend((a,))) for a in digits]
