"""Cantor scheme: good blocks with inserted pairs ``(4, c_k)``.

An admissible word reads

    a_1 .. a_{n_1}, 4, c_1, a_{n_1+1} .. a_{n_2}, 4, c_2, ...

where every ``a_j`` is a good p-block and ``c_k`` ranges over the integers in
``[q^e/4, q^e/2]`` with ``q = q(a_1..a_{n_k}, 4)``.  After the last realised
insertion the word continues with good blocks only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath

from .._numeric import c_range, decimal_fraction, enclosure, ge_rational_power
from ..errors import DomainError, InadmissibleWord, InfeasibleSchedule, MassTooSmall, WordTooShort
from .blocks import (BlockDistribution, BlockParams, GoodBlockSet, build_block_distribution,
                     build_good_set, continuant_pair)

INSERTED_DIGIT = 4
MAX_DEPTH_DIGITS = 10 ** 5


@dataclass(frozen=True)
class PhiSpec:
    """Approximating function; thresholds are ``3 * Phi(q)``.

    ``kind="power"`` is ``Phi(q) = q^tau / 3`` (exact).  ``kind="callable"``
    wraps ``func(q) -> 3*Phi(q)`` returning an exact rational, a ``(lo, hi)``
    enclosure or a float.
    """

    kind: str = "power"
    tau: Fraction = Fraction(1)
    func: Callable | None = field(default=None, compare=False)
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "tau", decimal_fraction(self.tau))
        if self.kind not in ("power", "callable"):
            raise DomainError(f"unknown Phi kind {self.kind!r}")
        if self.kind == "callable" and self.func is None:
            raise DomainError("callable Phi needs func")

    def three_phi(self, q):
        if self.kind == "power":
            return float(q) ** float(self.tau)
        return self.func(q)

    def ge(self, lhs: int, q: int) -> bool | None:
        """Decide ``lhs >= 3 Phi(q)``."""
        if self.kind == "power":
            return ge_rational_power(lhs, q, self.tau)
        lo, hi = enclosure(self.func(q))
        if lhs >= hi:
            return True
        if lhs < lo:
            return False
        return None

    def log_three_phi(self, q) -> float:
        if self.kind == "power":
            return float(self.tau) * math.log(q)
        lo, hi = enclosure(self.func(q))
        return math.log((lo + hi) / 2)

    def key(self):
        return {"kind": self.kind, "tau": str(self.tau), "label": self.label}


@dataclass(frozen=True)
class CantorScheme:
    params: BlockParams
    dist: BlockDistribution = field(repr=False)
    good: GoodBlockSet = field(repr=False)
    tau: Fraction
    schedule: tuple[int, ...]
    mode: str
    c_exponent: Fraction
    phi: PhiSpec
    Q: tuple[int, ...] | None = None
    step: int | None = None
    n1: int | None = None
    hypotheses: dict = field(default_factory=dict, compare=False)

    @property
    def p(self) -> int:
        return self.good.p

    @property
    def insertions(self) -> int:
        return len(self.schedule)

    def p_sigma(self) -> float:
        return self.good.p_sigma()

    def c_bounds(self, q: int) -> tuple[int, int]:
        lo, hi = c_range(q, self.c_exponent)
        lo = max(lo, 1)
        if lo > hi:
            raise InadmissibleWord(f"no admissible c for q={q}")
        return lo, hi

    def n_k(self, k: int) -> int | None:
        """Insertion index ``n_k`` (1-based), extended by the schedule rule."""
        if k < 1:
            raise DomainError("k starts at 1")
        if k <= len(self.schedule):
            return self.schedule[k - 1]
        return None

    def key(self) -> dict:
        return {"params": self.params.key(), "tau": str(self.tau), "schedule": list(self.schedule),
                "mode": self.mode, "c_exponent": str(self.c_exponent), "phi": self.phi.key(),
                "Q": None if self.Q is None else [str(v) for v in self.Q]}

    # ---- grammar ---------------------------------------------------------

    def next_kind(self, blocks_done: int, k_done: int, after_four: bool) -> str:
        if after_four:
            return "c"
        if k_done < self.insertions and blocks_done == self.schedule[k_done]:
            return "four"
        return "block"

    def parse(self, digits) -> list[tuple]:
        """Split a digit prefix into grammar tokens.

        Tokens: ``("block", i)`` with ``i`` the good-set index, ``("four",)``,
        ``("c", c, lo, hi)`` and a trailing ``("partial", digits)``.
        """
        digits = tuple(int(a) for a in digits)
        index = _member_index(self.good)
        p = self.p
        tokens = []
        pos, b, k, after_four = 0, 0, 0, False
        state = (0, 1, 1, 0)
        while pos < len(digits):
            kind = self.next_kind(b, k, after_four)
            if kind == "block":
                chunk = digits[pos:pos + p]
                if len(chunk) < p:
                    if not any(m[:len(chunk)] == chunk for m in self.good.members):
                        raise InadmissibleWord(f"partial block {chunk} extends no good block")
                    tokens.append(("partial", chunk))
                    break
                if chunk not in index:
                    raise InadmissibleWord(f"block {chunk} at digit {pos} is not good")
                tokens.append(("block", index[chunk]))
                state = continuant_pair(chunk, state)
                pos += p
                b += 1
            elif kind == "four":
                if digits[pos] != INSERTED_DIGIT:
                    raise InadmissibleWord(f"expected the inserted 4 at digit {pos}")
                tokens.append(("four",))
                state = continuant_pair((INSERTED_DIGIT,), state)
                pos += 1
                after_four = True
            else:
                lo, hi = self.c_bounds(state[1])
                c = digits[pos]
                if not lo <= c <= hi:
                    raise InadmissibleWord(f"c_{k + 1}={c} outside [{lo}, {hi}]")
                tokens.append(("c", c, lo, hi))
                state = continuant_pair((c,), state)
                pos += 1
                after_four = False
                k += 1
        return tokens


def _member_index(good: GoodBlockSet) -> dict:
    cached = getattr(good, "_index_cache", None)
    if cached is None:
        cached = {m: i for i, m in enumerate(good.members)}
        object.__setattr__(good, "_index_cache", cached)
    return cached


def growth_schedule(n1: int, count: int, eps, tau) -> tuple[int, ...]:
    """Smallest integers meeting
    ``n_{k+1} eps >= 12 k log 2 + (1+tau)[k(k+1) + k(n_1+..+n_k)]``."""
    eps, tau = decimal_fraction(eps), decimal_fraction(tau)
    out = [int(n1)]
    with mpmath.workprec(128):
        e = mpmath.mpf(eps.numerator) / eps.denominator
        t = mpmath.mpf(tau.numerator) / tau.denominator
        for k in range(1, count):
            rhs = (12 * k * mpmath.log(2) + (1 + t) * (k * (k + 1) + k * sum(out))) / e
            out.append(max(int(mpmath.ceil(rhs)), out[-1] + 1))
    return tuple(out)


def growth_schedule_holds(schedule, eps, tau) -> list[bool]:
    eps, tau = float(decimal_fraction(eps)), float(decimal_fraction(tau))
    res = []
    for k in range(1, len(schedule)):
        rhs = 12 * k * math.log(2) + (1 + tau) * (k * (k + 1) + k * sum(schedule[:k]))
        res.append(schedule[k] * eps >= rhs)
    return res


def general_schedule(Q, p_sigma: float, eps) -> tuple[int, ...]:
    """``n_k = max{n > n_{k-1} : exp(n p sigma (1+3 eps)) <= Q_k}``."""
    eps = float(decimal_fraction(eps))
    out, prev = [], 0
    for Qk in Q:
        n = math.floor(_log_int(Qk) / (p_sigma * (1 + 3 * eps)))
        # guard the float floor with an exact-enough recheck
        while n > prev and n * p_sigma * (1 + 3 * eps) > _log_int(Qk):
            n -= 1
        if n <= prev:
            raise InfeasibleSchedule(f"Q_k={Qk} too small for an index beyond {prev}")
        out.append(n)
        prev = n
    return tuple(out)


def _log_int(n: int) -> float:
    n = int(n)
    if n.bit_length() < 1000:
        return math.log(n)
    shift = n.bit_length() - 60
    return math.log(n >> shift) + shift * math.log(2)


def build_scheme(params: BlockParams | None = None, tau=1, mode: str = "desk", insertions: int = 3,
                 step: int = 4, n1: int = 4, schedule=None, phi: PhiSpec | None = None, Q=None,
                 good: GoodBlockSet | None = None, strict_mass: bool = True,
                 max_depth_digits: int = MAX_DEPTH_DIGITS) -> CantorScheme:
    """Assemble a scheme.

    ``mode``: ``"desk"`` (``n_k = step*k`` or an explicit ``schedule``),
    ``"growth"`` (the super-exponential growth condition from ``n1``) or
    ``"general"`` (indices derived from integers ``Q``; the c-range uses the
    exponent ``tau + 20 eps``).
    """
    tau = decimal_fraction(tau)
    if tau <= 0:
        raise DomainError("tau must be positive")
    if good is None:
        if params is None:
            raise DomainError("need params or a good set")
        dist = build_block_distribution(params)
        good = build_good_set(dist, strict=strict_mass)
    params = good.dist.params
    eps = good.eps
    c_exp = tau
    if mode == "desk":
        sched = tuple(int(v) for v in schedule) if schedule is not None else tuple(
            step * k for k in range(1, insertions + 1))
        phi = phi or PhiSpec("power", tau)
    elif mode == "growth":
        sched = growth_schedule(n1, insertions, eps, tau)
        phi = phi or PhiSpec("power", tau)
    elif mode == "general":
        if Q is None or phi is None:
            raise DomainError("general mode needs Phi and Q_k")
        Q = tuple(int(v) for v in Q)
        sched = general_schedule(Q, good.p_sigma(), eps)
        c_exp = tau + 20 * eps
    else:
        raise DomainError(f"unknown schedule mode {mode!r}")
    if any(b <= a for a, b in zip(sched, sched[1:])) or (sched and sched[0] < 1):
        raise DomainError("schedule must be a strictly increasing sequence of positive integers")
    if sched and sched[-1] * good.p + 2 * len(sched) > max_depth_digits:
        raise InfeasibleSchedule(f"schedule reaches depth {sched[-1] * good.p} digits")
    hyp = hypotheses(good, tau, sched, mode, phi, Q)
    return CantorScheme(params, good.dist, good, tau, sched, mode, c_exp, phi,
                        Q, step if mode == "desk" and schedule is None else None,
                        n1 if mode == "growth" else None, hyp)


def hypotheses(good: GoodBlockSet, tau: Fraction, sched, mode, phi, Q) -> dict:
    params = good.dist.params
    eps = good.eps
    cap = Fraction(1, 1000) if mode == "general" else Fraction(1, 100)
    out = {
        "eps_below_bound": eps < min(cap / tau, Fraction(1, 8)),
        "m_at_least_logN_over_eps_plus_1": params.m >= math.log(params.N) / float(eps) + 1,
        "Sigma_m_at_least_2^10": good.dist.Sigma >= 2 ** 10,
        "good_mass_above_half": good.nu_mass > Fraction(1, 2),
        "full_growth_schedule": all(growth_schedule_holds(sched, eps, tau)),
    }
    if mode == "general":
        t_lo, t_hi = float(tau - eps), float(tau + eps)
        out["Q_sandwich"] = all(
            t_lo * _log_int(Qk) - 1e-12 <= phi.log_three_phi(Qk) <= t_hi * _log_int(Qk) + 1e-12
            for Qk in Q)
        out["Q_ratio_below_eps_over_1000"] = all(
            _log_int(a) / _log_int(b) < float(eps) / 1000 for a, b in zip(Q, Q[1:]))
    return out


# ---- membership ------------------------------------------------------------

@dataclass(frozen=True)
class InsertionEvent:
    k: int
    q: int
    c: int
    g_event: bool | None
    k_event_at_c: bool | None
    chain: dict | None = None

    @property
    def ok(self) -> bool:
        return self.g_event is True and self.k_event_at_c is False


def insertion_events(q: int, c: int, phi: PhiSpec, k: int = 1) -> InsertionEvent:
    """At ``q = q(prefix, 4)``: the product ``4 c`` against ``3 Phi(q)`` and
    ``c`` alone against the same threshold (the K-event must fail)."""
    return InsertionEvent(k, q, c, phi.ge(INSERTED_DIGIT * c, q), phi.ge(c, q))


@dataclass(frozen=True)
class MembershipReport:
    events: tuple[InsertionEvent, ...]
    k_hits_elsewhere: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.events)


def membership_check(scheme: CantorScheme, word) -> MembershipReport:
    digits = tuple(int(a) for a in word)
    tokens = scheme.parse(digits)
    if not any(t[0] == "c" for t in tokens):
        raise WordTooShort("word contains no inserted pair")
    events = []
    state = (0, 1, 1, 0)
    pos = 0
    p = scheme.p
    q_hist = []
    k = 0
    q_pre = 1
    for t in tokens:
        if t[0] == "block":
            chunk = digits[pos:pos + p]
        elif t[0] == "partial":
            chunk = t[1]
        elif t[0] == "four":
            chunk = (INSERTED_DIGIT,)
            q_pre = state[1]
        else:
            chunk = (t[1],)
            k += 1
            ev = insertion_events(state[1], t[1], scheme.phi, k)
            if scheme.mode == "general":
                ev = InsertionEvent(ev.k, ev.q, ev.c, ev.g_event, ev.k_event_at_c,
                                    _general_chain(scheme, k, q_pre, state[1], t[1]))
            events.append(ev)
        for a in chunk:
            q_hist.append((state[1], a))
            state = continuant_pair((a,), state)
        pos += len(chunk)
    # K-event a_{n+1} >= 3 Phi(q_n) anywhere other than the inserted c's
    c_positions = _c_positions(scheme, tokens)
    k_hits = tuple(i for i, (qn, a) in enumerate(q_hist)
                   if i > 0 and i not in c_positions and scheme.phi.ge(a, qn) is not False)
    return MembershipReport(tuple(events), k_hits)


def _c_positions(scheme, tokens):
    pos, out = 0, set()
    for t in tokens:
        if t[0] == "block":
            pos += scheme.p
        elif t[0] == "partial":
            pos += len(t[1])
        else:
            if t[0] == "c":
                out.add(pos)
            pos += 1
    return out


def _general_chain(scheme: CantorScheme, k: int, q_pre: int, q4: int, c: int) -> dict:
    """Replay the chain of inequalities behind ``4 c_k >= 3 Phi(q(..,4))``.

    Links are evaluated in log space; each entry says whether the link holds.
    """
    tau, eps = float(scheme.tau), float(scheme.good.eps)
    ps = scheme.p_sigma()
    nk = scheme.schedule[k - 1]
    Qk = scheme.Q[k - 1]
    e = tau + 20 * eps
    x = nk * ps * (1 + 3 * eps)
    vals = [
        ("4c", math.log(INSERTED_DIGIT * c)),
        ("q(..,4)^(tau+20eps)", e * math.log(q4)),
        ("q(..)^(tau+20eps)", e * math.log(q_pre)),
        ("exp((tau+20eps) n_k p sigma (1-2eps))", e * nk * ps * (1 - 2 * eps)),
        ("exp((tau+eps)(n_k+1) p sigma (1+3eps))", (tau + eps) * (nk + 1) * ps * (1 + 3 * eps)),
        ("Q_k^(tau+eps)", (tau + eps) * _log_int(Qk)),
        ("3Phi(Q_k)", scheme.phi.log_three_phi(Qk)),
    ]
    if x < 700:
        vals.append(("3Phi(exp(n_k p sigma (1+3eps)))", scheme.phi.log_three_phi(max(1, math.floor(math.exp(x))))))
    vals.append(("3Phi(q(..,4))", scheme.phi.log_three_phi(q4)))
    return {f"{a} >= {b}": va >= vb - 1e-12 for (a, va), (b, vb) in zip(vals, vals[1:])}
