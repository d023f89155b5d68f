import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dioph.errors import DomainError, ToleranceNotMet
from dioph.extremal_fourier import (
    beurling,
    build_pair,
    l1_distance,
    periodized_direct,
    sandwich_check,
    selberg_eval,
)

from oracles import beurling_series_reference, pair_coefficients


def test_selberg_far_right_and_left():
    v, e = selberg_eval(5.5, 100)
    assert abs(v - 1) < 0.01 and v >= 1 - e
    v, e = selberg_eval(-5.5, 100)
    assert v >= -1 - e and abs(v + 1) < 0.01


def test_selberg_against_plain_series():
    for z in (0.3, 2.7, -4.1, 9.5):
        v, e = selberg_eval(z, 100)
        ref = beurling_series_reference(z)
        # plain series converges like 1/K; the reference carries ~1e-5 error
        assert abs(v - ref) < 1e-4
        assert abs(v - beurling(z)) <= e + 1e-12


def test_selberg_interpolates_sign_at_integers():
    z = np.array([-3.0, -1.0, 0.0, 1.0, 4.0])
    v, e = selberg_eval(z)
    assert np.allclose(v, [-1, -1, 1, 1, 1], atol=1e-12)


def test_selberg_majorant_on_sample():
    rng = np.random.default_rng(7)
    x = rng.uniform(-10, 10, 200)
    v, e = selberg_eval(x, 1000)
    assert np.all(v + e >= np.sign(x))


def test_selberg_needs_positive_K():
    with pytest.raises(DomainError):
        selberg_eval(0.5, 0)


@pytest.fixture(scope="module")
def small_pair():
    return build_pair(0.5, 0.1, 2)


def test_zero_coefficients(small_pair):
    p = small_pair
    assert abs(p.coefficient(0, 1) - 0.325) < p.tol + 1e-12
    assert abs(p.coefficient(0, 2) - 0.075) < p.tol + 1e-12
    assert p.coefficient(9, 1) == 0 and p.coefficient(-100, 2) == 0


def test_frozen_coefficients(small_pair):
    # values from the closed-form transform, frozen
    assert abs(small_pair.coefficient(1, 1) - (-0.26708087046278306)) < 1e-9
    assert abs(small_pair.coefficient(5, 1) - 0.046875) < 1e-9
    assert abs(small_pair.coefficient(8, 1)) < 1e-9


@pytest.mark.parametrize("gamma,psi,n", [(0.5, 0.1, 2), (0.3, 0.37, 3), (0.11, 0.05, 4), (0.9, 0.2, 1)])
def test_coefficients_match_closed_form(gamma, psi, n):
    p = build_pair(gamma, psi, n)
    for k in p.ks:
        a, b = pair_coefficients(int(k), gamma, psi, p.D)
        assert abs(p.g1[k + p.D] - a) < 1e-8
        assert abs(p.g2[k + p.D] - b) < 1e-8


def test_symmetry_and_coefficient_bound(small_pair):
    p = small_pair
    for k in range(1, p.D + 1):
        for which in (1, 2):
            c = p.coefficient(k, which)
            assert abs(p.coefficient(-k, which) - np.conj(c)) < 2 * p.tol
            assert abs(c) <= min(1 / k, 2 * p.psi) + 1 / p.D + p.tol


def test_sandwich_examples(small_pair):
    p = small_pair
    assert p.partial_sum(p.gamma, 1)[0] >= 1 - p.partial_sum_error()
    assert p.partial_sum(p.gamma + 0.4, 2)[0] <= p.partial_sum_error()
    rep = sandwich_check(p, np.linspace(0, 1, 1000))
    assert rep.ok and rep.checked == 1000
    assert sandwich_check(p, np.linspace(0, 1, 200), method="direct").ok


def test_sandwich_rejects_outside_grid(small_pair):
    with pytest.raises(DomainError):
        sandwich_check(small_pair, [1.5])


def test_fourier_and_direct_routes_agree():
    p = build_pair(0.2, 0.15, 3)
    x = np.linspace(0, 1, 101)
    for which in (1, 2):
        direct, err = periodized_direct(p, x, which)
        assert np.max(np.abs(p.partial_sum(x, which) - direct)) < err + p.partial_sum_error()


@pytest.mark.parametrize("n", [2, 3])
def test_l1_distance(n):
    d1, d2 = l1_distance(build_pair(0.4, 0.2, n))
    assert d1 >= 0 and d2 >= 0
    assert abs(d1 - 1 / n ** 3) < 1e-6 and abs(d2 - 1 / n ** 3) < 1e-6


def test_domain_and_tolerance_errors():
    with pytest.raises(DomainError):
        build_pair(0.5, 0.6, 2)
    with pytest.raises(DomainError):
        build_pair(0.5, 0.1, 0)
    with pytest.raises(ToleranceNotMet):
        build_pair(0.5, 0.1, 2, tol=1e-30)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.01, 0.39), st.sampled_from([2, 3, 4]))
def test_coefficient_bound_random(gamma, psi, n):
    p = build_pair(gamma, psi, n)
    k = np.abs(p.ks)
    bound = np.where(k > 0, np.minimum(1.0 / np.maximum(k, 1), 2 * psi), np.inf) + 1 / p.D + p.tol
    assert np.all(np.abs(p.g1) <= bound) and np.all(np.abs(p.g2) <= bound)
    assert abs(p.g1[p.D] - (2 * psi + 1 / p.D)) < p.tol + 1e-12
    assert abs(p.g2[p.D] - (2 * psi - 1 / p.D)) < p.tol + 1e-12


@settings(max_examples=10, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.02, 0.3), st.integers(1, 50), st.floats(0, 1))
def test_partial_sums_sandwich_hit_indicator(gamma, psi, q, shift):
    # composing with x -> q x + shift keeps the sandwich pointwise
    p = build_pair(gamma, psi, 2)
    x = np.linspace(0, 1, 97)
    y = (q * x + shift) % 1.0
    hit = p.periodic_indicator(y)
    e = p.partial_sum_error()
    assert np.all(p.partial_sum(y, 2) - e <= hit)
    assert np.all(hit <= p.partial_sum(y, 1) + e)
