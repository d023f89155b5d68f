import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dioph._numeric import mpf_to_fraction
from dioph.errors import (BelowFirstScale, ConstraintViolated, EnumerationTooLarge, InadmissibleWord,
                          MassTooSmall, ThresholdExceeded, WordTooShort)
from dioph.kaufman_measure import (ALPHA0_NOMINAL, TAU_THRESHOLD, BlockParams, Exceptional, PhiSpec,
                                   ScaleModel, Typical, block_sandwich_check, build_block_distribution,
                                   build_good_set, build_scheme, case2_inequalities, choose_window,
                                   classify_log_scale, conservation_check, continuant_estimate_check,
                                   desk_scheme, envelope_check, fourier_estimate, holder_profile,
                                   insertion_events, membership_check, mu_of_cylinder, growth_schedule,
                                   sample_batch, sample_mu, select_alpha)
from dioph.kaufman_measure.measure import children, root


def brute_weights(N, m, eps):
    blocks = list(itertools.product(range(1, N + 1), repeat=m))

    def q(b):
        qm, qq = 0, 1
        for a in b:
            qm, qq = qq, a * qq + qm
        return qq

    w = [q(b) ** (-2 * (1 - eps)) for b in blocks]
    S = sum(w)
    return blocks, [v / S for v in w], S, [q(b) for b in blocks]


def test_block_distribution_example():
    d = build_block_distribution(BlockParams(2, 1, 0.1, 2))
    assert sum(d.weights) == 1
    # frozen from the direct formula 2^{-1.8} / (1 + 2^{-1.8})
    assert abs(float(d.weights[0]) - 0.7768953867957) < 1e-12
    assert abs(float(d.weights[1]) - 0.2231046132043) < 1e-12
    assert abs(d.Sigma - 1.2871745887492587) < 1e-12
    assert abs(d.msigma - float(d.weights[1]) * math.log(2)) < 1e-15
    assert d.max_deviation < 1e-25


@pytest.mark.parametrize("N,m,eps", [(3, 2, 0.3), (2, 4, 0.05), (4, 1, 0.7)])
def test_block_distribution_matches_brute_force(N, m, eps):
    d = build_block_distribution(BlockParams(N, m, eps, 1))
    blocks, lam, S, qs = brute_weights(N, m, eps)
    assert sum(d.weights) == 1
    assert list(d.blocks) == blocks
    assert np.allclose([float(w) for w in d.weights], lam, rtol=1e-12)
    assert abs(d.Sigma - S) < 1e-10 * S
    mean = sum(l * math.log(q) for l, q in zip(lam, qs))
    assert abs(d.msigma - mean) < 1e-12
    assert d.msigma >= (m - 1) * math.log(math.sqrt(2)) - 1e-12


def test_enumeration_guard():
    with pytest.raises(EnumerationTooLarge):
        build_block_distribution(BlockParams(10, 8, 0.1, 1))


def brute_good(d, j0, eps):
    E = d.msigma
    out = []
    for t in itertools.product(range(len(d.blocks)), repeat=j0):
        mean = sum(math.log(d.q[i]) for i in t) / j0
        if abs(mean - E) <= eps * E:
            out.append(tuple(itertools.chain.from_iterable(d.blocks[i] for i in t)))
    return out


def test_good_set_small_examples():
    d = build_block_distribution(BlockParams(2, 1, 0.1, 2))
    # no pair of digits has mean log within 10% of E = 0.1546
    with pytest.raises(MassTooSmall) as exc:
        build_good_set(d)
    assert list(exc.value.members) == brute_good(d, 2, 0.1) == []
    loose = build_block_distribution(BlockParams(2, 1, 0.99, 2))
    g = build_good_set(loose, strict=False)
    assert list(g.members) == brute_good(loose, 2, 0.99) == [(1, 2), (2, 1)]


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([(3, 1, 2), (2, 2, 2), (3, 1, 3), (2, 1, 4)]),
       st.floats(0.05, 0.9), st.floats(0.05, 0.9))
def test_good_set_brute_force_and_monotone(shape, e1, e2):
    N, m, j0 = shape
    d = build_block_distribution(BlockParams(N, m, 0.5, j0))
    lo, hi = sorted((e1, e2))
    masses = []
    for e in (lo, hi):
        try:
            g = build_good_set(d, eps=e, strict=False)
            assert set(g.members) == set(brute_good(d, j0, e))
            assert sum(g.nu_bar.values()) == 1
            masses.append(g.nu_mass)
        except MassTooSmall as err:
            assert brute_good(d, j0, e) == []
            masses.append(err.nu_mass)
    assert masses[0] <= masses[1]


def test_desk_block_invariants(desk):
    g = desk.good
    assert g.nu_mass > Fraction(1, 2)
    assert block_sandwich_check(g, 5)["ok"]
    assert envelope_check(g, 5)["ok"]


def test_sandwich_detects_violations():
    d = build_block_distribution(BlockParams(3, 1, 0.3, 2))
    g = build_good_set(d, strict=False)
    rep = block_sandwich_check(g, 2)
    assert not rep["ok"] and rep["upper_violations"] > 0


def test_schedule_examples():
    s = build_scheme(BlockParams(3, 1, "0.7", 2), tau=1, insertions=3, step=4)
    assert s.schedule == (4, 8, 12) and s.mode == "desk"
    assert not s.hypotheses["full_growth_schedule"]
    assert growth_schedule(4, 2, 0.1, 1) == (4, 204)
    # the bound itself: (12 log 2 + 2 (2 + 4)) / 0.1
    assert math.ceil((12 * math.log(2) + 12) / 0.1) == 204


def test_general_phi_mode():
    phi = PhiSpec("callable", 1, func=lambda q: Fraction(q), label="q/3")
    good = desk_scheme().good
    s = build_scheme(tau=1, mode="general", phi=phi, Q=(10 ** 4, 10 ** 9, 10 ** 20), good=good)
    assert s.hypotheses["Q_sandwich"]
    assert s.c_exponent == 1 + 20 * Fraction(7, 10)
    assert list(s.schedule) == sorted(set(s.schedule))
    for k, Qk in enumerate(s.Q):
        assert math.exp(s.schedule[k] * s.p_sigma() * (1 + 3 * 0.7)) <= Qk


def test_c_range_rule(desk):
    assert desk.c_bounds(10) == (3, 5)
    assert desk.c_bounds(100) == (25, 50)
    ev = insertion_events(100, 30, PhiSpec("power", 1))
    assert ev.g_event is True and ev.k_event_at_c is False and ev.ok
    assert insertion_events(100, 24, PhiSpec("power", 1)).g_event is False


def test_mass_rules(desk):
    g = desk.good
    blk = g.members[0]
    assert mu_of_cylinder(desk, blk) == g.nu_bar[blk]
    assert mu_of_cylinder(desk, ()) == 1
    word = sum((g.members[i % len(g)] for i in range(4)), ()) + (4,)
    parent = mu_of_cylinder(desk, word)
    # the inserted digit carries the full mass
    assert parent == mu_of_cylinder(desk, word[:-1])
    lo, hi = desk.c_bounds(_q(word))
    kids = [mu_of_cylinder(desk, word + (c,)) for c in range(lo, hi + 1)]
    assert all(k == parent / (hi - lo + 1) for k in kids)
    assert sum(kids) == parent
    with pytest.raises(InadmissibleWord):
        mu_of_cylinder(desk, word + (hi + 1,))
    with pytest.raises(InadmissibleWord):
        mu_of_cylinder(desk, (1, 1))


def _q(word):
    qm, q = 0, 1
    for a in word:
        qm, q = q, a * q + qm
    return q


def test_partial_block_mass(desk):
    g = desk.good
    first = sum(w for m, w in g.nu_bar.items() if m[0] == 1)
    assert mu_of_cylinder(desk, (1,)) == first


def test_conservation_small(desk):
    rep = conservation_check(desk, 20000)
    assert rep.ok and rep.expanded > 0


def test_children_match_mu(desk):
    node = root(desk)
    for _ in range(6):
        kids = children(desk, node)
        for c in kids[:3]:
            assert c.mass == mu_of_cylinder(desk, c.digits)
        node = kids[-1]


def test_sampling_is_deterministic_and_admissible(desk):
    a = sample_mu(desk, 5, 2 ** 24)
    b = sample_mu(desk, 5, 2 ** 24)
    assert a.word == b.word
    assert a.left < mpf_to_fraction(a.midpoint) < a.right
    assert a.width <= Fraction(1, 2 ** 48)
    assert membership_check(desk, a.word).ok
    p = a.as_point()
    assert Fraction(p.num, p.den) == a.left and Fraction(p.num + p.width, p.den) == a.right
    for s in range(20):
        assert membership_check(desk, sample_mu(desk, s, 2 ** 24).word).ok


def test_membership_needs_insertion(desk):
    with pytest.raises(WordTooShort):
        membership_check(desk, desk.good.members[0])


def test_sampling_frequencies(desk):
    batch = sample_batch(desk, 3, 2 ** 24, 10 ** 5)
    g = desk.good
    S = 10 ** 5
    # depth-1 and depth-2 block cylinders against the exact masses
    for depth in (1, 2):
        keys, counts = np.unique(batch.tokens[:, :depth], axis=0, return_counts=True)
        seen = {tuple(k): c for k, c in zip(keys, counts)}
        for combo in itertools.product(range(len(g)), repeat=depth):
            word = sum((g.members[i] for i in combo), ())
            mu = float(mu_of_cylinder(desk, word))
            se = math.sqrt(mu * (1 - mu) / S)
            assert abs(seen.get(combo, 0) / S - mu) <= 4 * se
    assert np.all((batch.x > 0) & (batch.x < 1))
    assert np.all(batch.q_final > 2 ** 24)


def test_first_block_frequency_small_sample(desk):
    batch = sample_batch(desk, 11, 2 ** 24, 10 ** 4)
    g = desk.good
    freq = np.bincount(batch.tokens[:, 0], minlength=len(g)) / 10 ** 4
    assert np.max(np.abs(freq - g.weights_float)) <= 4 / math.sqrt(10 ** 4)


def test_holder_profile_examples(desk):
    prof = holder_profile(desk)
    assert prof.upper[0] == 1 and prof.lower[0] == 1
    assert np.all(np.diff(prof.upper) <= 0) and np.all(np.diff(prof.lower) <= 1e-15)
    assert np.all(prof.lower <= prof.upper + 1e-15)
    assert prof.exponent >= 2 / 3 - 0.1 - 0.1
    assert math.log10(prof.h.max() / prof.h.min()) >= 4


def test_continuant_estimate_is_reported(desk):
    rep = continuant_estimate_check(desk, paths=20)
    assert rep["asserted"] is False and "worst_ratio" in rep


def test_classify_examples():
    m = ScaleModel(1.0, 0.01, 1.0, (10, 100))
    assert classify_log_scale(m, 50) == Typical(1, 40, 50)
    assert isinstance(classify_log_scale(m, 15), Exceptional)
    assert isinstance(classify_log_scale(m, (1 + 1 + 4 * 0.01) * 10 * 1.0), Typical)
    with pytest.raises(BelowFirstScale):
        classify_log_scale(m, 9.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(9.61, 5000))
def test_classify_total_and_consistent(log_zeta):
    m = ScaleModel(1.0, 0.01, 1.0, (10, 100, 1000))
    c = classify_log_scale(m, log_zeta)
    nk = m.n(c.k)
    if isinstance(c, Exceptional):
        assert (1 - 0.04) * nk < log_zeta < (2.04) * nk
    else:
        nxt = m.n(c.k + 1)
        assert 2.04 * nk <= log_zeta <= 0.96 * nxt
        assert c.n_zeta == math.floor(log_zeta - nk)


def test_alpha_constants():
    assert abs(TAU_THRESHOLD - 0.6930004681646913) < 1e-15
    assert abs(ALPHA0_NOMINAL - (116 - 13 * math.sqrt(73)) / 144) < 1e-15
    lo, hi = choose_window(0.5)
    assert abs(lo - 0.12) < 1e-15 and abs(hi - 0.2) < 1e-15
    assert lo < 0.16 < hi


def test_select_alpha_rules():
    m = ScaleModel(1.0, 0.01, 0.5, (4,), rule="growth")
    with pytest.raises(ThresholdExceeded):
        select_alpha(0.7, 0.01, 10 ** 60, m)
    found = set()
    for e in range(11, 400, 3):
        ch = select_alpha(0.5, 0.01, 10 ** e, m)
        found.add(ch.branch)
        if ch.branch == "typical":
            lo, hi = choose_window(0.5)
            assert lo < ch.alpha < hi
        else:
            assert all(case2_inequalities(ch.alpha, 0.5).values())
    assert found == {"typical", "exceptional"}
    # the nominal constant does not sit in the window when the scale is typical
    typ = next(10 ** e for e in range(60, 4000) if isinstance(
        classify_log_scale(m, ALPHA0_NOMINAL * e * math.log(10)), Typical))
    with pytest.raises(ConstraintViolated):
        select_alpha(0.5, 0.01, typ, m, alpha0="nominal")


def test_fourier_basic(desk):
    xi = np.array([0.0, 16.0, -16.0, 1024.0, -1024.0, 2.0 ** 15])
    r = fourier_estimate(desk, xi, S=2 * 10 ** 4, seed=1, bootstrap=50)
    assert r.re[0] == 1.0 and r.im[0] == 0.0
    assert np.all(r.abs <= 1)
    assert abs(r.re[1] - r.re[2]) <= 2 * r.stderr and abs(r.im[1] + r.im[2]) <= 2 * r.stderr
    again = fourier_estimate(desk, xi, S=2 * 10 ** 4, seed=1, bootstrap=50)
    assert np.array_equal(r.re, again.re) and r.ci == again.ci
