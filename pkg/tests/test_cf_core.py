import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from dioph.cf_core import (
    ContinuedFractionWord,
    RealEnclosure,
    cf_expand,
    continuant_ratio,
    continuants,
    cylinder,
    event_profile,
    jarnik_bounds,
)
from dioph._numeric import iv_prec
from dioph.errors import DomainError, PrecisionExhausted

words = st.lists(st.integers(1, 6), min_size=1, max_size=12).map(tuple)


def brute_value(digits):
    x = Fraction(0)
    for a in reversed(digits):
        x = 1 / (a + x)
    return x


def test_expand_third_terminates():
    w = cf_expand(Fraction(1, 3), 5)
    assert w.digits == (3,)
    assert w.terminated


def test_expand_zero_is_empty_terminated():
    w = cf_expand(0, 5)
    assert w.digits == () and w.terminated


def test_expand_sqrt2_minus_one():
    with mpmath.workprec(80):
        assert cf_expand(mpmath.sqrt(2) - 1, 3).digits == (2, 2, 2)
    with iv_prec(120) as iv:
        x = iv.sqrt(2) - 1
    assert cf_expand(RealEnclosure.from_real(x), 30).digits == (2,) * 30


def test_precision_exhaustion_is_reported():
    with pytest.raises(PrecisionExhausted) as info:
        cf_expand(math.sqrt(2) - 1, 60)
    # a double certifies roughly 53/(2 log2(1+sqrt 2)) digits
    assert 15 <= len(info.value.certified) < 60
    assert set(info.value.certified.digits[:15]) == {2}


def test_domain_errors():
    with pytest.raises(DomainError):
        cf_expand(Fraction(3, 2), 3)
    with pytest.raises(DomainError):
        cf_expand(Fraction(-1, 5), 3)
    with pytest.raises(DomainError):
        cf_expand(Fraction(1, 2), 0)


def test_continuant_examples():
    assert [q for _, q in continuants((1, 1, 1, 1))] == [1, 2, 3, 5]
    assert [q for _, q in continuants((2, 2, 2))] == [2, 5, 12]
    assert continuants((7,)) == ((1, 7),)


def test_cylinder_examples():
    c = cylinder((2,))
    assert (c.left, c.right, c.length) == (Fraction(1, 3), Fraction(1, 2), Fraction(1, 6))
    c = cylinder((1, 1))
    assert (c.left, c.right, c.length) == (Fraction(1, 2), Fraction(2, 3), Fraction(1, 6))


def test_continuant_ratio_examples():
    assert continuant_ratio((1,), (1,)) == 2
    assert continuant_ratio((2,), (3,)) == Fraction(7, 6)


def test_event_profile_examples():
    prof = event_profile((1, 100), lambda q: q, lambda q: q * q, 100)
    assert prof.hits_K == (1,)
    assert prof.hits_G == (1,)
    assert event_profile((1, 1, 1), None, None, 1).bad_N_ok is True
    assert event_profile((1, 2, 1), None, None, 1).bad_N_ok is False


def test_event_profile_uncertain_bucket():
    # threshold enclosure straddles a_2 = 3
    prof = event_profile((1, 3), lambda q: (Fraction(29, 10), Fraction(31, 10)))
    assert prof.hits_K == () and prof.uncertain_K == (1,)
    # float threshold extremely close to an integer stays undecided
    prof = event_profile((1, 3), lambda q: 3.0 * (1 + 2 ** -52))
    assert prof.uncertain_K == (1,)


def test_jarnik_bounds():
    lo, hi = jarnik_bounds(8)
    assert lo == pytest.approx(1 - 1 / (8 * math.log(2)), abs=1e-15)
    assert lo == pytest.approx(0.819663, abs=1e-6)
    assert hi == pytest.approx(0.992486, abs=1e-6)
    assert jarnik_bounds(16)[0] > lo
    prev = jarnik_bounds(8)
    for n in (16, 100, 10 ** 6):
        cur = jarnik_bounds(n)
        assert cur[0] > prev[0] and cur[1] > prev[1] and cur[0] < cur[1]
        prev = cur
    with pytest.raises(DomainError):
        jarnik_bounds(7)


@given(words)
def test_recurrence_and_determinant(digits):
    w = ContinuedFractionWord(digits)
    for k in range(1, len(w) + 1):
        p, q = w.pair(k)
        pp, qp = w.pair(k - 1)
        ppp, qpp = w.pair(k - 2)
        assert q == digits[k - 1] * qp + qpp
        assert p == digits[k - 1] * pp + ppp
        assert p * qp - pp * q == (-1) ** (k - 1)
    assert Fraction(w.p, w.q) == brute_value(digits)


@given(words)
def test_continuant_growth_bounds(digits):
    w = ContinuedFractionWord(digits)
    n = len(w)
    assert w.q ** 2 >= 2 ** (n - 1)
    assert math.prod(digits) <= w.q <= math.prod(a + 1 for a in digits)


@given(words)
def test_cylinder_bounds_and_membership(digits):
    w = ContinuedFractionWord(digits)
    c = cylinder(w)
    q = w.q
    assert Fraction(1, 2 * q * q) <= c.length <= Fraction(1, q * q)
    assert c.right - c.left == c.length
    # brute-force oracle: endpoints are the word with tails 0 and 1
    ends = {brute_value(digits), brute_value(digits[:-1] + (digits[-1] + 1,))}
    assert ends == {c.left, c.right}
    mid = (c.left + c.right) / 2
    assert cf_expand(mid, len(w)).digits == digits


@given(words, st.integers(1, 8))
def test_nesting_and_child_order(digits, a):
    w = ContinuedFractionWord(digits)
    parent = cylinder(w)
    child = cylinder(w.extend((a,)))
    nxt = cylinder(w.extend((a + 1,)))
    assert parent.left <= child.left < child.right <= parent.right
    if len(w) % 2 == 1:
        assert child.right <= nxt.left
    else:
        assert nxt.right <= child.left


@given(words, words)
def test_continuant_ratio_range(u, v):
    r = continuant_ratio(u, v)
    assert 1 <= r <= 2


@given(words)
def test_roundtrip_canonical(digits):
    w = ContinuedFractionWord(digits).canonical()
    if w.digits == (1,):
        return
    back = cf_expand(w.value(), len(w) + 5)
    assert back.digits == w.digits and back.terminated


@settings(max_examples=50)
@given(words)
def test_hits_K_subset_of_hits_G(digits):
    phi1 = lambda q: Fraction(q, 2)
    phi2 = lambda q: Fraction(q, 3)
    prof = event_profile(digits, phi1, phi2)
    assert set(prof.hits_K) <= set(prof.hits_G)


def test_extend_matches_fresh_build():
    w = ContinuedFractionWord.of(3, 1, 4)
    assert w.extend((1, 5)).continuants == ContinuedFractionWord((3, 1, 4, 1, 5)).continuants
    assert (w + (1, 5)).digits == (3, 1, 4, 1, 5)
