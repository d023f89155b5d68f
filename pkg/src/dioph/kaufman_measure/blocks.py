"""Block distribution lambda_m on {1..N}^m and the good super-block set."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .._numeric import decimal_fraction, iv_prec, iv_to_fractions
from ..errors import DomainError, EnumerationTooLarge, MassTooSmall

ENUMERATION_LIMIT = 10 ** 7
# values admitted as exact boundary ties (see _decide_between)
TIES: list = []
WEIGHT_GUARD_BITS = 96


def continuant(digits) -> int:
    qm, q = 0, 1
    for a in digits:
        qm, q = q, a * q + qm
    return q


def continuant_pair(digits, start=(0, 1, 1, 0)):
    """``(p_n, q_n, p_{n-1}, q_{n-1})`` after appending ``digits``."""
    p, q, pp, qp = start
    for a in digits:
        p, q, pp, qp = a * p + pp, a * q + qp, p, q
    return p, q, pp, qp


@dataclass(frozen=True)
class BlockParams:
    N: int
    m: int
    eps: Fraction
    j0: int

    def __post_init__(self):
        object.__setattr__(self, "eps", decimal_fraction(self.eps))
        if self.N < 1 or self.m < 1 or self.j0 < 1:
            raise DomainError("N, m and j0 must be positive")
        if not 0 < self.eps < 1:
            raise DomainError("eps must lie in (0, 1)")

    @property
    def p(self) -> int:
        return self.j0 * self.m

    def hypothesis(self, tau=None) -> dict:
        """Which of the construction's standing assumptions hold."""
        tau = None if tau is None else decimal_fraction(tau)
        bound = Fraction(1, 8) if tau is None else min(Fraction(1, 8), 1 / (100 * tau))
        return {
            "eps_below_bound": self.eps < bound,
            "m_at_least_logN_over_eps_plus_1": self.m >= math.log(self.N) / float(self.eps) + 1,
        }

    def key(self) -> dict:
        return {"N": self.N, "m": self.m, "eps": str(self.eps), "j0": self.j0}


@dataclass(frozen=True)
class BlockDistribution:
    """Exact probability vector near ``q_m^{-2(1-eps)} / Sigma_m``.

    Rounding contract: each real weight ``w = q^{-2(1-eps)}`` is evaluated at
    ``scale_bits + 32`` bits and floored to an integer multiple of
    ``2**-scale_bits``; the integers are then normalised exactly.
    ``max_deviation`` bounds ``|lambda - w/Sigma|`` over all blocks.
    """

    params: BlockParams
    blocks: tuple[tuple[int, ...], ...]
    q: tuple[int, ...]
    numerators: tuple[int, ...]
    denominator: int
    Sigma: float
    msigma: float
    max_deviation: float
    scale_bits: int

    @property
    def weights(self) -> tuple[Fraction, ...]:
        d = self.denominator
        return tuple(Fraction(n, d) for n in self.numerators)

    def weight(self, block) -> Fraction:
        return Fraction(self.numerators[self.index(block)], self.denominator)

    def index(self, block) -> int:
        block = tuple(block)
        if len(block) != self.params.m or not all(1 <= a <= self.params.N for a in block):
            raise DomainError(f"{block} is not an m-block over 1..N")
        i = 0
        for a in block:
            i = i * self.params.N + (a - 1)
        return i

    def as_dict(self) -> dict:
        return {tuple(b): w for b, w in zip(self.blocks, self.weights)}

    @property
    def sigma(self) -> float:
        return self.msigma / self.params.m

    def log_mean_iv(self, prec: int = 128):
        """Interval enclosure of ``m sigma_m`` computed from the exact weights."""
        with iv_prec(prec) as iv:
            tot = iv.mpf(0)
            for n, qv in zip(self.numerators, self.q):
                if qv > 1:
                    tot += iv.mpf(n) * iv.log(iv.mpf(qv))
            return tot / iv.mpf(self.denominator)

    def provenance(self) -> dict:
        return {**self.params.key(), "rounding": "floor", "scale_bits": self.scale_bits,
                "max_deviation": self.max_deviation}


def build_block_distribution(params: BlockParams, limit: int = ENUMERATION_LIMIT) -> BlockDistribution:
    N, m = params.N, params.m
    count = N ** m
    if count > limit:
        raise EnumerationTooLarge(f"N^m = {count} exceeds {limit}")
    blocks = tuple(itertools.product(range(1, N + 1), repeat=m))
    qs = tuple(continuant(b) for b in blocks)
    expo = 2 * (1 - params.eps)
    qmax = max(qs)
    scale_bits = WEIGHT_GUARD_BITS + math.ceil(float(expo) * math.log2(qmax)) + 1
    with mpmath.workprec(scale_bits + 32):
        e = mpmath.mpf(expo.numerator) / expo.denominator
        real = [mpmath.power(qv, -e) for qv in qs]
        scale = mpmath.mpf(2) ** scale_bits
        nums = tuple(int(mpmath.floor(w * scale)) for w in real)
        Sigma = mpmath.fsum(real)
        den = sum(nums)
        dev = max(abs(mpmath.mpf(n) / den - w / Sigma) for n, w in zip(nums, real))
        msig = mpmath.fsum(mpmath.mpf(n) * mpmath.log(qv) for n, qv in zip(nums, qs) if qv > 1) / den
    return BlockDistribution(params, blocks, qs, nums, den, float(Sigma), float(msig),
                             float(dev), scale_bits)


def _decide_between(value: int, lo_fn, hi_fn, start_prec=128, max_prec=1024) -> bool:
    """Exact ``exp(lo) <= value <= exp(hi)`` where lo/hi are iv-valued thunks."""
    prec = start_prec
    while prec <= max_prec:
        with iv_prec(prec) as iv:
            lv = iv.log(iv.mpf(value)) if value > 1 else iv.mpf(0)
            lo, hi = lo_fn(iv, prec), hi_fn(iv, prec)
            a_ok = _iv_le(lo, lv)
            b_ok = _iv_le(lv, hi)
        if a_ok is not None and b_ok is not None:
            return a_ok and b_ok
        if a_ok is False or b_ok is False:
            return False
        prec *= 2
    # undecided at max_prec: the value sits on the boundary to within
    # 2^-max_prec; the condition is inclusive, so admit it and flag the tie
    TIES.append(value)
    return True


def _iv_le(a, b):
    a_lo, a_hi = iv_to_fractions(a)
    b_lo, b_hi = iv_to_fractions(b)
    if a_hi <= b_lo:
        return True
    if a_lo > b_hi:
        return False
    return None


@dataclass(frozen=True)
class GoodBlockSet:
    """Super-blocks ``(Y_1..Y_j0)`` with log-mean within ``eps`` of the mean.

    ``nu_bar`` weights are ``numerators[i] / nu_total`` exactly, so they share a
    denominator and sum to one.
    """

    dist: BlockDistribution
    j0: int
    eps: Fraction
    members: tuple[tuple[int, ...], ...]
    parts: tuple[tuple[int, ...], ...] = field(repr=False)
    numerators: tuple[int, ...] = field(repr=False)
    nu_total: int = field(repr=False)

    @property
    def p(self) -> int:
        return self.j0 * self.dist.params.m

    @property
    def nu_mass(self) -> Fraction:
        return Fraction(self.nu_total, self.dist.denominator ** self.j0)

    @property
    def nu_bar(self) -> dict:
        return {mem: Fraction(n, self.nu_total) for mem, n in zip(self.members, self.numerators)}

    @property
    def weights_float(self) -> np.ndarray:
        return np.array([n / self.nu_total for n in self.numerators])

    def p_sigma(self) -> float:
        return self.j0 * self.dist.msigma

    def __len__(self):
        return len(self.members)


def _admits(dist: BlockDistribution, j0: int, eps: Fraction):
    """Boolean mask over all ``K^j0`` tuples (row-major in block indices)."""
    K = len(dist.blocks)
    logs = np.log(np.array(dist.q, dtype=float))
    total = np.zeros(1)
    for _ in range(j0):
        total = (total[:, None] + logs[None, :]).ravel()
    E = dist.msigma
    lo, hi = j0 * E * (1 - float(eps)), j0 * E * (1 + float(eps))
    margin = 1e-9 * max(1.0, abs(hi))
    inside = (total > lo + margin) & (total < hi - margin)
    near = np.flatnonzero((np.abs(total - lo) <= margin) | (np.abs(total - hi) <= margin))
    if near.size:
        def low(iv, prec):
            return iv.mpf(j0) * dist.log_mean_iv(prec) * (1 - iv.mpf(eps.numerator) / eps.denominator)

        def high(iv, prec):
            return iv.mpf(j0) * dist.log_mean_iv(prec) * (1 + iv.mpf(eps.numerator) / eps.denominator)

        for flat in near:
            idx = np.unravel_index(flat, (K,) * j0)
            prod = math.prod(dist.q[int(i)] for i in idx)
            inside[flat] = _decide_between(prod, low, high)
    return inside


def build_good_set(dist: BlockDistribution, j0: int | None = None, eps=None, strict: bool = True,
                   limit: int = ENUMERATION_LIMIT) -> GoodBlockSet:
    """Enumerate the good set exactly.

    With ``strict`` the product mass must exceed 1/2; otherwise only a
    non-empty set is required.  The raised :class:`MassTooSmall` carries the
    admitted ``members`` and ``nu_mass`` for inspection.
    """
    j0 = dist.params.j0 if j0 is None else int(j0)
    eps = dist.params.eps if eps is None else decimal_fraction(eps)
    if not 0 < eps:
        raise DomainError("eps must be positive")
    K = len(dist.blocks)
    if K ** j0 > limit:
        raise EnumerationTooLarge(f"(N^m)^j0 = {K ** j0} exceeds {limit}")
    mask = _admits(dist, j0, eps)
    members, parts, nums = [], [], []
    for flat in np.flatnonzero(mask):
        idx = tuple(int(i) for i in np.unravel_index(flat, (K,) * j0))
        parts.append(idx)
        members.append(tuple(itertools.chain.from_iterable(dist.blocks[i] for i in idx)))
        nums.append(math.prod(dist.numerators[i] for i in idx))
    total = sum(nums)
    mass = Fraction(total, dist.denominator ** j0)
    if (strict and mass <= Fraction(1, 2)) or total == 0:
        err = MassTooSmall(f"good set mass {float(mass):.6g} <= 1/2 at j0={j0}, eps={eps}; increase j0")
        err.members = tuple(members)
        err.nu_mass = mass
        raise err
    return GoodBlockSet(dist, j0, eps, tuple(members), tuple(parts), tuple(nums), total)


# ---- block-level invariant checks -------------------------------------------

def _words(good: GoodBlockSet, n: int):
    """DFS over ``E^n`` yielding (mass numerator product, q, q_prev)."""
    mem = good.members
    nums = good.numerators

    def rec(depth, state, num):
        if depth == n:
            yield num, state
            return
        for g, w in zip(mem, nums):
            yield from rec(depth + 1, continuant_pair(g, state), num * w)

    yield from rec(0, (0, 1, 1, 0), 1)


def block_sandwich_check(good: GoodBlockSet, n_max: int, eps=None, limit: int = 10 ** 6) -> dict:
    """Exact ``|I(G)|^{1+2eps} <= nu_bar^n(G) <= |I(G)|^{1-eps}`` over ``E^n``."""
    eps = good.eps if eps is None else decimal_fraction(eps)
    lo_e, hi_e = 1 + 2 * eps, 1 - eps
    out = {"checked": 0, "lower_violations": 0, "upper_violations": 0, "n_max": n_max}
    for n in range(1, n_max + 1):
        if len(good) ** n > limit:
            raise EnumerationTooLarge(f"|E|^{n} exceeds {limit}")
        S = good.nu_total ** n
        log_S = n * math.log(good.nu_total)
        for num, (_, q, _, qp) in _words(good, n):
            out["checked"] += 1
            # float pass in log space; exact powers only near a tie
            log_L = -math.log(q) - math.log(q + qp)
            log_nu = math.log(num) - log_S
            slack = 1e-9 * (abs(log_L) * float(lo_e) + abs(log_nu) + 1)
            lower = float(lo_e) * log_L <= log_nu - slack or (
                float(lo_e) * log_L <= log_nu + slack
                and _pow_le(Fraction(1, q * (q + qp)), lo_e, Fraction(num, S)))
            upper = log_nu <= float(hi_e) * log_L - slack or (
                log_nu <= float(hi_e) * log_L + slack
                and _pow_le(Fraction(num, S), Fraction(1), Fraction(1, q * (q + qp)), hi_e))
            out["lower_violations"] += not lower
            out["upper_violations"] += not upper
    out["ok"] = out["lower_violations"] == 0 and out["upper_violations"] == 0
    return out


def _pow_le(x: Fraction, ex: Fraction, y: Fraction, ey: Fraction = Fraction(1)) -> bool:
    """Exact ``x**ex <= y**ey`` for positive rationals and rational exponents."""
    # raise both sides to the product of the exponent denominators
    a, b = ex.numerator * ey.denominator, ey.numerator * ex.denominator
    return x ** a <= y ** b


def envelope_check(good: GoodBlockSet, l_max: int, eps=None, limit: int = 10 ** 6) -> dict:
    """``exp(l p sigma (1-2eps)) <= q(G) <= exp(l p sigma (1+2eps))`` over ``E^l``."""
    eps = good.eps if eps is None else decimal_fraction(eps)
    j0 = good.j0
    out = {"checked": 0, "violations": 0, "l_max": l_max}
    dist = good.dist
    for l in range(1, l_max + 1):
        if len(good) ** l > limit:
            raise EnumerationTooLarge(f"|E|^{l} exceeds {limit}")

        def low(iv, prec, l=l):
            return iv.mpf(l * j0) * dist.log_mean_iv(prec) * (1 - 2 * iv.mpf(eps.numerator) / eps.denominator)

        def high(iv, prec, l=l):
            return iv.mpf(l * j0) * dist.log_mean_iv(prec) * (1 + 2 * iv.mpf(eps.numerator) / eps.denominator)

        # float pass first, exact only near the envelope
        flo = l * good.p_sigma() * (1 - 2 * float(eps))
        fhi = l * good.p_sigma() * (1 + 2 * float(eps))
        for _, (_, q, _, _) in _words(good, l):
            out["checked"] += 1
            lq = math.log(q)
            if flo + 1e-9 < lq < fhi - 1e-9:
                continue
            if not _decide_between(q, low, high):
                out["violations"] += 1
    out["ok"] = out["violations"] == 0
    return out
