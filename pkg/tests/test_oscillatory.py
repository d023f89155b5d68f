import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dioph.errors import BoundViolated, ConstraintViolated, DomainError, ToleranceNotMet
from dioph.oscillatory import (BoundReport, ComparisonSpec, TrigSum, UniformMeasure, certify,
                               check_comparison, check_nonstationary, check_stationary, linear,
                               mobius, mobius_difference, osc_integral, quadratic, regression_family,
                               verify_family, word_map)


def _linear_exact(a, b):
    with mpmath.workdps(40):
        a, b = mpmath.mpf(a), mpmath.mpf(b)
        v = (mpmath.expjpi(2 * (a + b)) - mpmath.expjpi(2 * b)) / (2j * mpmath.pi * a)
        return complex(v)


def _quad_oracle(f, pieces=200):
    with mpmath.workdps(30):
        return complex(mpmath.quad(lambda x: mpmath.expjpi(2 * f(x)), mpmath.linspace(0, 1, pieces)))


def test_linear_examples():
    v, e = osc_integral(linear(10), 1e-8)
    assert abs(v) <= e <= 1e-8
    assert osc_integral(linear(0)) == (1 + 0j, 0.0)
    v, e = osc_integral(linear(0.5), 1e-8)
    assert abs(abs(v) - 2 / math.pi) <= e
    ex = _linear_exact(0.5, 0)
    assert abs(v - ex) <= e


def test_fresnel_example():
    v, e = osc_integral(quadratic(10), 1e-10)
    # oracle: mpmath quadrature at 30 digits
    assert abs(v - _quad_oracle(lambda x: 10 * x * x)) <= e
    assert abs(abs(v) - 0.10627939940257754) < 1e-10


def test_error_is_sound_on_random_frequencies():
    rng = np.random.default_rng(12)
    worst = 0.0
    for a, b in zip(10 ** rng.uniform(-1, 3.3, 1000) * rng.choice([-1, 1], 1000), rng.uniform(0, 1, 1000)):
        v, e = osc_integral(linear(a, b), 1e-8)
        d = abs(v - _linear_exact(a, b))
        assert d <= e <= 1e-8
        worst = max(worst, d / e)
    assert worst < 1


def test_mobius_against_oracle():
    f = mobius_difference(300.0, word_map((1, 2, 2)), word_map((2, 1, 3)))
    v, e = osc_integral(f, 1e-9)
    assert abs(v - _quad_oracle(lambda x: _mob_mp(f, x))) <= e + 1e-12
    g = mobius(1000.0, word_map((3, 1, 2, 2)))
    v, e = osc_integral(g, 1e-9)
    assert abs(v - _quad_oracle(lambda x: _mob_mp(g, x))) <= e + 1e-12


def _mob_mp(f, x):
    sg, xi = f.params[:2]
    val = lambda w: (w[0] * x + w[2]) / (w[1] * x + w[3])
    if f.kind == "mobius":
        return sg * xi * val(f.params[2])
    return sg * xi * (val(f.params[2]) - val(f.params[3]))


def test_tolerance_not_met():
    with pytest.raises(ToleranceNotMet):
        osc_integral(linear(1e13), 1e-8)
    with pytest.raises(DomainError):
        osc_integral(linear(3), 0)


@settings(max_examples=60, deadline=None)
@given(st.floats(-300, 300), st.floats(-300, 300))
def test_unit_modulus_bound(a, b):
    v, e = osc_integral(quadratic(a, b), 1e-8)
    assert abs(v) <= 1 + e


def test_certified_bounds():
    cb = certify(quadratic(0.01, 10))
    assert cb.A == 10 and cb.B == 0.02 and cb.C1 == 0.02
    cb = certify(quadratic(10))
    assert (cb.A, cb.C1, cb.C2, cb.gA, cb.gB) == (0.0, 20.0, 0.0, 1.0, 0.0)
    f = mobius_difference(500.0, word_map((1, 2)), word_map((3, 1)))
    cb = certify(f)
    x = np.linspace(0, 1, 20001)
    d = np.abs(f.derivative(x))
    assert cb.A <= d.min() and d.max() <= cb.sup_d1
    h = 1e-6
    d2 = np.abs((f.derivative(x[1:-1] + h) - f.derivative(x[1:-1] - h)) / (2 * h))
    assert d2.max() <= cb.B * (1 + 1e-6)
    with pytest.raises(ConstraintViolated):
        certify(quadratic(0.01, 10).with_bounds(A=11.0))
    with pytest.raises(DomainError):
        mobius(1.0, (1, 0, 0, 0))


def test_nonstationary_examples():
    r = check_nonstationary(linear(10))
    assert r.rhs == pytest.approx(0.1) and r.lhs <= 1e-8 and r.ok
    r = check_nonstationary(quadratic(0.01, 10))
    assert r.rhs <= 0.1002 + 1e-12 and r.lhs <= r.rhs
    r = check_nonstationary(linear(1000))
    assert r.rhs == pytest.approx(1e-3) and r.lhs < 1e-8
    d = r.as_dict()
    assert set(d) >= {"lemma", "lhs", "rhs", "margin", "certified_bounds", "tol"}
    assert d["lemma"] == "nonstationary_phase"
    with pytest.raises(ConstraintViolated):
        check_nonstationary(quadratic(10))


def test_stationary_examples():
    r = check_stationary(quadratic(10))
    assert r.rhs == pytest.approx(6 / math.sqrt(20))
    assert r.lhs == pytest.approx(0.10627939940257754, abs=1e-9)
    r = check_stationary(quadratic(0.05))
    assert r.rhs >= 1 >= r.lhs
    assert check_stationary(quadratic(10).with_bounds(A=1.0, B=1.0, C1=20.0, C2=0.0)).ok
    with pytest.raises(ConstraintViolated):
        check_stationary(quadratic(10).with_bounds(A=1.0, B=0.5, C1=20.0, C2=0.0))
    with pytest.raises(ConstraintViolated):
        check_stationary(linear(4))


def test_violation_is_raised():
    # a declared (uncertified) bound would be rejected, so fake a report path instead
    rep = BoundReport("nonstationary_phase", 1.0, 0.5, 1e-8, {})
    assert not rep.ok and rep.margin < 0
    from dioph.oscillatory import _finish
    with pytest.raises(BoundViolated) as ex:
        _finish(rep, True)
    assert ex.value.report is rep


def test_comparison_examples():
    F = TrigSum((1.0,), (linear(0),))
    r = check_comparison(ComparisonSpec(F), 0.5)
    assert r.lhs == pytest.approx(1.0) and r.rhs >= 1
    F = TrigSum((1.0,), (linear(512),))
    for rr in (0.1, 0.01):
        rep = check_comparison(ComparisonSpec(F), rr)
        assert rep.certified_bounds["m2"] == pytest.approx(1.0, abs=1e-9)
        assert rep.certified_bounds["Lambda"] == pytest.approx(rr / (2 * math.pi * 512))
    ks = np.arange(1, 33) * 5
    G = TrigSum(tuple([1 / 32] * 32), tuple(linear(int(k)) for k in ks))
    m2, err = G.m2()
    assert abs(m2 - 1 / 32) <= err + 1e-12          # orthogonality
    rep = check_comparison(ComparisonSpec(G), 0.3)
    assert rep.ok and rep.rhs < 1
    with pytest.raises(DomainError):
        TrigSum((0.7, 0.7), (linear(1), linear(2)))


def test_comparison_on_scheme(desk):
    from dioph.oscillatory import SchemeMeasure, scheme_trig_sum
    F = scheme_trig_sum(desk, 2.0 ** 10)
    meas = SchemeMeasure(desk, 2 * 10 ** 4, 3)
    assert meas.modulus(1.0) == 1.0 and meas.modulus(2.0 ** -3) <= meas.modulus(2.0 ** -2)
    for r in (0.05, 0.2, 0.5):
        assert check_comparison(ComparisonSpec(F, meas), r).ok


def test_regression_family_shape():
    fam = regression_family()
    assert len(fam) == 50
    assert len({f.label for f in fam}) == 50
    assert fam == regression_family()
    kinds = [f.kind for f in fam]
    assert kinds.count("mobius_difference") == 20


def test_family_has_no_violations():
    reps = verify_family(1e-8)
    assert reps and all(r.ok for r in reps)
    lemmas = {r.lemma for r in reps}
    assert lemmas == {"nonstationary_phase", "stationary_phase", "measure_comparison"}
