"""Hitting-count experiments for lacunary sequences.

All distance tests ``||q_n x - gamma|| <= psi(q_n)`` are decided in two
stages: a vectorised float pass with explicit error bars, followed by an
exact (rational / interval) resolution of the few near-ties.  Anything still
undecided is reported in an ``uncertain`` list, never silently resolved.

Points are represented as ``x in [num/den, (num+width)/den]`` (``width = 0``
for exact rationals) or, for Lebesgue samples against an integer-ratio
sequence, as a stream of base-``b`` digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np

from ._numeric import as_exact, compare_le, compare_lt, decimal_fraction, iv_prec, iv_to_fractions
from .errors import Degenerate, DomainError, PrecisionExhausted

FLOAT_ERR = 4e-16


@dataclass(frozen=True)
class LacunarySequence:
    """``q_n = q0 * ratio**n`` (``geometric``/``power``) or an explicit list."""

    kind: str = "geometric"
    q0: int = 1
    ratio: int = 2
    values: tuple = ()
    gap_constant: float | None = None

    def __post_init__(self):
        if self.kind in ("geometric", "power"):
            if int(self.ratio) != self.ratio or self.ratio < 2:
                raise DomainError("ratio must be an integer >= 2")
            if self.q0 < 1:
                raise DomainError("q0 must be a positive integer")
            if self.kind == "power" and self.q0 != 1:
                raise DomainError("integer-power sequences have q0 = 1")
            gap = self.gap_constant if self.gap_constant is not None else float(self.ratio)
            if gap > self.ratio:
                raise DomainError("gap constant exceeds the ratio")
            object.__setattr__(self, "gap_constant", float(gap))
        elif self.kind == "explicit":
            vals = tuple(int(v) for v in self.values)
            if not vals or vals[0] < 1:
                raise DomainError("explicit sequence needs positive integers")
            ratios = [Fraction(b, a) for a, b in zip(vals, vals[1:])]
            gap = self.gap_constant
            if gap is None:
                gap = float(min(ratios)) if ratios else 2.0
            if gap <= 1 or any(r < Fraction(gap) for r in ratios):
                raise DomainError("explicit sequence violates the Hadamard gap")
            object.__setattr__(self, "values", vals)
            object.__setattr__(self, "gap_constant", float(gap))
        else:
            raise DomainError(f"unknown sequence kind {self.kind!r}")

    @classmethod
    def power(cls, b: int) -> "LacunarySequence":
        return cls("power", 1, b)

    @property
    def integer_ratio(self) -> int | None:
        return self.ratio if self.kind != "explicit" else None

    def __len__(self):
        return len(self.values) if self.kind == "explicit" else 10 ** 18

    def term(self, n: int) -> int:
        if n < 1:
            raise DomainError("sequence is indexed from n = 1")
        if self.kind == "explicit":
            return self.values[n - 1]
        return self.q0 * self.ratio ** n

    def terms(self, N: int) -> list[int]:
        if self.kind == "explicit":
            if N > len(self.values):
                raise DomainError("explicit sequence shorter than N")
            return list(self.values[:N])
        out, q = [], self.q0
        for _ in range(N):
            q *= self.ratio
            out.append(q)
        return out

    def log_terms(self, N: int) -> np.ndarray:
        n = np.arange(1, N + 1, dtype=float)
        if self.kind == "explicit":
            return np.array([math.log(v) for v in self.values[:N]])
        return math.log(self.q0) + n * math.log(self.ratio)


@dataclass(frozen=True)
class ApproxFunction:
    """Approximation function psi.

    kinds: ``index_power`` (psi(q_n) = c n^-s), ``power_law`` (c q^-s),
    ``constant`` (c), ``table`` (values by index), ``callable`` (f(n, q)).
    """

    kind: str
    c: Fraction = Fraction(1)
    s: Fraction = Fraction(0)
    table: tuple = ()
    func: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "c", decimal_fraction(self.c))
        object.__setattr__(self, "s", decimal_fraction(self.s))
        if self.kind not in ("index_power", "power_law", "constant", "table", "callable"):
            raise DomainError(f"unknown approximation kind {self.kind!r}")
        if self.c < 0 or self.c > 1 and self.kind == "constant":
            raise DomainError("psi must take values in [0, 1]")
        if self.kind == "callable" and self.func is None:
            raise DomainError("callable psi needs func")

    @classmethod
    def index_power(cls, c, s):
        return cls("index_power", c, s)

    @classmethod
    def power_law(cls, c, tau):
        return cls("power_law", c, tau)

    @classmethod
    def constant(cls, c):
        return cls("constant", c)

    def scaled(self, factor) -> "ApproxFunction":
        factor = decimal_fraction(factor)
        if self.kind == "table":
            return ApproxFunction("table", table=tuple(Fraction(v) * factor for v in self.table))
        if self.kind == "callable":
            f = self.func
            return ApproxFunction("callable", func=lambda n, q: factor * f(n, q))
        return ApproxFunction(self.kind, self.c * factor, self.s)

    @property
    def is_zero(self) -> bool:
        return self.kind != "callable" and self.kind != "table" and self.c == 0

    def float_values(self, ns: np.ndarray, log_q: np.ndarray | None = None) -> np.ndarray:
        ns = np.asarray(ns, dtype=float)
        c = float(self.c)
        if self.kind == "index_power":
            return c * ns ** (-float(self.s))
        if self.kind == "power_law":
            return c * np.exp(-float(self.s) * log_q)
        if self.kind == "constant":
            return np.full(ns.shape, c)
        if self.kind == "table":
            return np.array([float(self.table[int(n) - 1]) for n in ns])
        raise TypeError("callable psi has no vectorised form")

    def exact_value(self, n: int, q: int) -> Fraction | None:
        if self.kind == "constant":
            return self.c
        if self.kind == "index_power" and self.s.denominator == 1:
            return self.c / Fraction(n) ** int(self.s)
        if self.kind == "power_law" and self.s.denominator == 1:
            return self.c / Fraction(q) ** int(self.s)
        if self.kind == "table":
            return as_exact(self.table[n - 1])
        if self.kind == "callable":
            return as_exact(self.func(n, q))
        return None

    def enclosure(self, n: int, q: int):
        """Rigorous ``(lo, hi)`` rational enclosure of psi at index n."""
        ex = self.exact_value(n, q)
        if ex is not None:
            return ex, ex
        if self.kind == "callable":
            v = self.func(n, q)
            if isinstance(v, tuple):
                return v
            v = Fraction(float(v))
            slack = abs(v) * Fraction(1, 2 ** 48)
            return v - slack, v + slack
        if self.kind == "table":
            v = Fraction(float(self.table[n - 1]))
            return v, v
        base = n if self.kind == "index_power" else q
        with iv_prec(256 + (base.bit_length() if isinstance(base, int) else 0)) as iv:
            s = iv.mpf(self.s.numerator) / self.s.denominator
            c = iv.mpf(self.c.numerator) / self.c.denominator
            val = c * iv.mpf(base) ** (-s)
        return iv_to_fractions(val)

    def psi_float(self, n: int, q: int) -> float:
        if self.kind == "callable":
            return float(self.func(n, q))
        lq = np.array([math.log(q)]) if self.kind == "power_law" else None
        return float(self.float_values(np.array([n]), lq)[0])

    def values_for(self, N: int, seq) -> np.ndarray:
        """psi(q_1), ..., psi(q_N) as floats."""
        ns = np.arange(1, N + 1)
        if self.kind == "callable":
            qs = seq.terms(N) if hasattr(seq, "terms") else list(seq)
            return np.array([float(self.func(int(n), q)) for n, q in zip(ns, qs)])
        lq = None
        if self.kind == "power_law":
            lq = seq.log_terms(N) if hasattr(seq, "log_terms") else np.log(np.asarray(seq[:N], dtype=float))
        return self.float_values(ns, lq)


# ---------------------------------------------------------------- points


@dataclass(frozen=True)
class Point:
    """``x`` known to lie in ``[num/den, (num+width)/den]``."""

    num: int
    den: int
    width: int = 0
    label: str = ""

    @classmethod
    def exact(cls, x, label: str = "") -> "Point":
        x = Fraction(x)
        return cls(x.numerator, x.denominator, 0, label or f"exact:{x}")

    @classmethod
    def interval(cls, lo: Fraction, hi: Fraction, label: str = "") -> "Point":
        lo, hi = Fraction(lo), Fraction(hi)
        den = math.lcm(lo.denominator, hi.denominator)
        num = lo.numerator * (den // lo.denominator)
        width = hi.numerator * (den // hi.denominator) - num
        return cls(num, den, width, label)

    def as_point(self) -> "Point":
        return self


@dataclass(frozen=True)
class DigitPoint:
    """``x = 0.d_1 d_2 ...`` in base ``base``; digits beyond the array unknown."""

    base: int
    digits: np.ndarray
    label: str = ""

    def as_point(self) -> Point:
        # x in [V/b^L, (V+1)/b^L]
        L = len(self.digits)
        if self.base == 2:
            bits = np.packbits(self.digits.astype(np.uint8))
            pad = (-L) % 8
            num = int.from_bytes(bits.tobytes(), "big") >> pad
        else:
            num = _digits_to_int(self.digits, self.base)
        return Point(num, self.base ** L, 1, self.label)


def _digits_to_int(d, b):
    if len(d) <= 32:
        v = 0
        for x in d:
            v = v * b + int(x)
        return v
    mid = len(d) // 2
    return _digits_to_int(d[:mid], b) * b ** (len(d) - mid) + _digits_to_int(d[mid:], b)


def _window_size(base: int, q0: int) -> int:
    J = 1
    while q0 * base ** (J + 1) < 2 ** 62:
        J += 1
    return J


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Deterministic stream for sample ``index`` under ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


@dataclass(frozen=True)
class LebesgueEnsemble:
    """Uniform random points on [0, 1) drawn digit-by-digit."""

    size: int
    extra_bits: int = 64

    def point(self, i: int, seed: int, seq=None, N: int = 0):
        rng = sample_rng(seed, i)
        label = f"lebesgue:{seed}:{i}"
        ratio = getattr(seq, "integer_ratio", None)
        if ratio is not None:
            J = _window_size(ratio, seq.q0)
            if J >= 8:
                digits = rng.integers(0, ratio, size=N + J + 1, dtype=np.int64)
                return DigitPoint(ratio, digits, label)
        qmax = seq.term(N) if seq is not None and N > 0 else 1
        bits = qmax.bit_length() + self.extra_bits
        digits = rng.integers(0, 2, size=bits, dtype=np.int64)
        return DigitPoint(2, digits, label).as_point()


def as_point(x) -> Point | DigitPoint:
    if isinstance(x, (Point, DigitPoint)):
        return x
    ex = as_exact(x)
    if ex is not None:
        return Point.exact(ex)
    if hasattr(x, "as_point"):
        return x.as_point()
    raise DomainError("points must be exact rationals or sample handles")


# ---------------------------------------------------------------- core


@dataclass
class FracParts:
    """Fractional parts ``t_n in [num_n/den, (num_n + width_n)/den]``."""

    num: list
    den: int
    width: list
    t_float: np.ndarray
    t_err: np.ndarray
    exact: bool


def fractional_parts(point, qs_or_seq, N: int) -> FracParts:
    point = as_point(point)
    ratio = getattr(qs_or_seq, "integer_ratio", None)
    if isinstance(point, DigitPoint) and ratio == point.base:
        return _window_parts(point, qs_or_seq.q0, N)
    if isinstance(point, DigitPoint):
        point = point.as_point()
    qs = qs_or_seq.terms(N) if hasattr(qs_or_seq, "terms") else list(qs_or_seq)[:N]
    den, num, w = point.den, point.num, point.width
    rs, ws = [], []
    for q in qs:
        rs.append(q * num % den)
        ws.append(q * w)
    if w and max(ws) >= den:
        raise PrecisionExhausted("point precision is too coarse for the requested N")
    t = np.array([r / den for r in rs]) if rs else np.zeros(0)
    err = np.array([wq / den for wq in ws]) + FLOAT_ERR if rs else np.zeros(0)
    return FracParts(rs, den, ws, t, err, exact=(w == 0))


def _window_parts(point: DigitPoint, q0: int, N: int) -> FracParts:
    b = point.base
    J = _window_size(b, q0)
    d = point.digits
    if len(d) < N + J:
        raise PrecisionExhausted("digit stream too short for the requested N")
    # V_n = sum_{j=1..J} d_{n+j} b^{J-j}
    V = np.zeros(N, dtype=np.int64)
    for j in range(1, J + 1):
        V = V * b + d[j:j + N]
    M = b ** J
    V = (V * q0) % M
    t = V.astype(float) / float(M)
    err = np.full(N, q0 / M + FLOAT_ERR)
    return FracParts(V, M, [q0] * N, t, err, exact=False)


def _distance_float(t, gamma_f):
    u = (t - gamma_f) % 1.0
    return np.minimum(u, 1.0 - u)


def _exact_distance(r: int, den: int, gamma: Fraction) -> Fraction:
    u = (Fraction(r, den) - gamma) % 1
    return min(u, 1 - u)


def decide_hits(fp: FracParts, gamma, psi: ApproxFunction, qs_for_psi, strict: bool = False,
                psi_vals: np.ndarray | None = None):
    """Return ``(hit_mask, uncertain_indices)`` for ``d_n <= psi_n`` (``<`` if strict)."""
    gamma = decimal_fraction(gamma)
    N = len(fp.t_float)
    if N == 0:
        return np.zeros(0, dtype=bool), []
    d = _distance_float(fp.t_float, float(gamma))
    if psi_vals is None:
        psi_vals = psi.values_for(N, qs_for_psi)
    if np.any(psi_vals < 0) or np.any(psi_vals > 1):
        raise DomainError("psi must take values in [0, 1]")
    margin = fp.t_err + FLOAT_ERR + 1e-14 * psi_vals + 1e-300
    diff = d - psi_vals
    hit = diff < 0
    todo = np.nonzero(np.abs(diff) <= margin)[0]
    uncertain = []
    for i in todo:
        n = int(i) + 1
        q = _q_at(qs_for_psi, n)
        plo, phi = psi.enclosure(n, q)
        r, w = int(fp.num[i]), int(fp.width[i])
        dist = _exact_distance(r, fp.den, gamma)
        if w == 0:
            res = compare_lt(dist, (plo, phi)) if strict else compare_le(dist, (plo, phi))
        else:
            slack = Fraction(w, fp.den)
            lo_d, hi_d = max(dist - slack, Fraction(0)), dist + slack
            if strict:
                res = True if hi_d < plo else False if lo_d >= phi else None
            else:
                res = True if hi_d <= plo else False if lo_d > phi else None
        if res is None:
            uncertain.append(n)
            hit[i] = False
        else:
            hit[i] = res
    return hit, uncertain


def _q_at(seq, n):
    if hasattr(seq, "term"):
        return seq.term(n)
    return seq[n - 1]


@dataclass(frozen=True)
class CountRecord:
    N: int
    R: int
    Psi: float
    hits: tuple = ()
    uncertain: tuple = ()
    seed: int | None = None
    sample_id: int | None = None
    provenance: str = ""


def hitting_count(x, N: int, gamma, psi: ApproxFunction, A: LacunarySequence,
                  seed: int | None = None, sample_id: int = 0, ensemble=None) -> CountRecord:
    """``R(x, N) = #{n <= N : ||q_n x - gamma|| <= psi(q_n)}``.

    ``x`` is an exact rational, a :class:`Point`/:class:`DigitPoint`, or the
    string ``"random"`` (Lebesgue sample ``sample_id`` under ``seed``).
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    if isinstance(x, str):
        if x != "random" or seed is None:
            raise DomainError("random points need x='random' and a seed")
        ensemble = ensemble or LebesgueEnsemble(sample_id + 1)
        x = ensemble.point(sample_id, seed, A, N)
    point = as_point(x)
    fp = fractional_parts(point, A, N)
    pv = psi.values_for(N, A)
    hit, unc = decide_hits(fp, gamma, psi, A, psi_vals=pv)
    idx = tuple(int(i) + 1 for i in np.nonzero(hit)[0])
    return CountRecord(N, len(idx), math.fsum(pv), idx, tuple(unc), seed, sample_id,
                       getattr(point, "label", ""))


def _sample_task(args):
    ensemble, i, seed, A, gamma, psi, N = args
    point = ensemble.point(i, seed, A, N)
    fp = fractional_parts(point, A, N)
    hit, unc = decide_hits(fp, gamma, psi, A)
    return hit, unc


def _run_samples(ensemble, seed, A, gamma, psi, N, map_fn=map):
    tasks = [(ensemble, i, seed, A, gamma, psi, N) for i in range(ensemble.size)]
    return list(map_fn(_sample_task, tasks))


def dyadic_checkpoints(N_max: int, start: int = 5) -> list[int]:
    out = []
    k = start
    while 2 ** k <= N_max:
        out.append(2 ** k)
        k += 1
    return out


def normalizer(Psi, eps0: float = 0.1):
    Psi = np.asarray(Psi, dtype=float)
    return np.sqrt(Psi) * np.log(Psi + 2.0) ** (1.5 + eps0)


@dataclass
class CountingLawResult:
    checkpoints: list
    Psi: list
    rows: list                # (N, sample_id, R, Psi, norm_err)
    median_norm_err: list
    q10: list
    q90: list
    exponent: float
    exponent_rms: float
    uncertain: int
    eps0: float

    def csv_rows(self):
        return self.rows


def _fit_slope(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    if len(x) < 2 or np.ptp(x) == 0:
        return float("nan")
    return float(np.polyfit(x, y, 1)[0])


def counting_law_experiment(ensemble, N_max: int, gamma, psi: ApproxFunction,
                            A: LacunarySequence, seed: int, eps0: float = 0.1,
                            checkpoints: Sequence[int] | None = None,
                            map_fn=map) -> CountingLawResult:
    """Normalised counting errors at dyadic checkpoints over an ensemble."""
    if ensemble.size < 30:
        raise DomainError("ensemble size must be >= 30")
    pv = psi.values_for(N_max, A)
    cum = np.cumsum(pv)
    if psi.is_zero or cum[-1] < 10:
        raise Degenerate(f"Psi(N_max) = {float(cum[-1]):.3g} < 10: too little divergence")
    cps = list(checkpoints) if checkpoints else dyadic_checkpoints(N_max)
    results = _run_samples(ensemble, seed, A, gamma, psi, N_max, map_fn)
    rows, per_cp = [], {N: [] for N in cps}
    log_psi, log_err = [], []
    rms = {N: [] for N in cps}
    unc_total = 0
    for i, (hit, unc) in enumerate(results):
        unc_total += len(unc)
        ch = np.cumsum(hit)
        for N in cps:
            R = int(ch[N - 1])
            Psi = float(cum[N - 1])
            e = R - 2 * Psi
            ne = abs(e) / float(normalizer(Psi, eps0))
            rows.append((N, i, R, Psi, ne))
            per_cp[N].append(ne)
            rms[N].append(e * e)
            if e != 0:
                log_psi.append(math.log(Psi))
                log_err.append(math.log(abs(e)))
    med = [float(np.median(per_cp[N])) for N in cps]
    q10 = [float(np.quantile(per_cp[N], 0.1)) for N in cps]
    q90 = [float(np.quantile(per_cp[N], 0.9)) for N in cps]
    slope = _fit_slope(log_psi, log_err)
    slope_rms = _fit_slope([math.log(cum[N - 1]) for N in cps],
                           [0.5 * math.log(max(np.mean(rms[N]), 1e-300)) for N in cps])
    return CountingLawResult(cps, [float(cum[N - 1]) for N in cps], rows, med, q10, q90,
                             slope, slope_rms, unc_total, eps0)


def psi_tail(psi: ApproxFunction, start: int, A=None, terms: int = 10 ** 6) -> float:
    """Upper estimate of ``sum_{n > start} psi(q_n)``.

    Closed-form integral bound for ``index_power`` with ``s > 1``; otherwise a
    long partial sum (an estimate, not a bound).
    """
    if psi.kind == "index_power" and psi.s > 1:
        s = float(psi.s)
        return float(psi.c) * start ** (1 - s) / (s - 1)
    ns = np.arange(start + 1, start + terms + 1)
    if psi.kind in ("constant",):
        return float("inf") if psi.c > 0 else 0.0
    if psi.kind == "power_law" and A is not None and A.kind != "explicit":
        s = float(psi.s)
        lq = math.log(A.q0) + ns * math.log(A.ratio)
        return float(np.sum(float(psi.c) * np.exp(-s * lq)))
    return float(np.sum(psi.float_values(ns)))


@dataclass
class ZeroOneReport:
    N_max: int
    frac_convergent_stable: float
    frac_divergent_gaining: float
    frac_divergent_half_psi: float
    Psi_convergent: float
    Psi_divergent: float
    tail_convergent: float
    preconditions: dict
    rows: list                # (regime, sample_id, R_half, R_full)
    uncertain: int


def zero_one_experiment(ensemble, A: LacunarySequence, gamma, psi_conv: ApproxFunction,
                        psi_div: ApproxFunction, N_max: int, seed: int,
                        min_divergent_mass: float = 20.0, map_fn=map) -> ZeroOneReport:
    """Convergent vs divergent behaviour in the second half of ``1..N_max``.

    Preconditions that fail softly (tail too large, divergent mass below
    ``min_divergent_mass``) are reported in ``preconditions``; a divergent
    mass below 10 is degenerate and raises.
    """
    half = N_max // 2
    tail = psi_tail(psi_conv, half, A)
    Psi_div = float(np.sum(psi_div.values_for(N_max, A)))
    Psi_conv = float(np.sum(psi_conv.values_for(N_max, A)))
    if Psi_div < 10:
        raise Degenerate(f"divergent Psi(N_max) = {Psi_div:.3g} < 10")
    pre = {"convergent_tail_below_0.01": tail < 0.01,
           f"divergent_mass_at_least_{min_divergent_mass:g}": Psi_div >= min_divergent_mass}
    rows, unc = [], 0
    stable = gaining = half_psi = 0
    for regime, psi in (("convergent", psi_conv), ("divergent", psi_div)):
        for i, (hit, u) in enumerate(_run_samples(ensemble, seed, A, gamma, psi, N_max, map_fn)):
            unc += len(u)
            r_half, r_full = int(hit[:half].sum()), int(hit.sum())
            rows.append((regime, i, r_half, r_full))
            if regime == "convergent":
                stable += r_full == r_half
            else:
                gaining += r_full > r_half
                half_psi += r_full >= Psi_div / 2
    n = ensemble.size
    return ZeroOneReport(N_max, stable / n, gaining / n, half_psi / n, Psi_conv, Psi_div,
                         tail, pre, rows, unc)


def schmidt_count(x, Q: int, gamma, psi: ApproxFunction) -> int:
    """``S(x, Q) = #{1 <= q <= Q : ||q x - gamma|| < psi(q)}``.

    psi is evaluated as ``psi(q)`` (``index_power``/``power_law`` treat
    ``q`` as the index).  Raises :class:`PrecisionExhausted` if some
    comparison cannot be decided at the point's precision.
    """
    if Q < 1:
        raise DomainError("Q must be >= 1")
    qs = list(range(1, Q + 1))
    _check_monotone(psi, Q)
    fp = fractional_parts(as_point(x), qs, Q)
    hit, unc = decide_hits(fp, gamma, psi, qs, strict=True)
    if unc:
        raise PrecisionExhausted(f"{len(unc)} comparisons undecided at this precision")
    return int(hit.sum())


def _check_monotone(psi: ApproxFunction, Q: int):
    if psi.kind == "callable":
        return
    v = psi.values_for(Q, list(range(1, Q + 1)))
    if np.any(np.diff(v) > 0) or np.any(v >= 0.5):
        raise DomainError("Schmidt counts need psi decreasing into [0, 1/2)")


def schmidt_main_term(psi: ApproxFunction, Q: int) -> float:
    return float(2 * np.sum(psi.values_for(Q, list(range(1, Q + 1)))))


@dataclass
class PairCorrelation:
    empirical: float
    bound: float
    main_term: float
    stderr: float
    ratio: float
    samples: int


def pair_correlation(ensemble, A: LacunarySequence, psi: ApproxFunction, gamma,
                     m: int, n: int, seed: int, slack_sigmas: float = 3.0) -> PairCorrelation:
    """Fraction of samples hitting both ``E_{q_m}`` and ``E_{q_n}``.

    ``bound = 4 psi(q_m) psi(q_n) + slack_sigmas * stderr``.
    """
    if not m < n:
        raise DomainError("pair_correlation needs m < n")
    if ensemble.size < 1000:
        raise DomainError("ensemble size must be >= 1000")
    both = 0
    for i in range(ensemble.size):
        point = ensemble.point(i, seed, A, n)
        fp = fractional_parts(point, A, n)
        hit, _ = decide_hits(fp, gamma, psi, A)
        both += bool(hit[m - 1] and hit[n - 1])
    S = ensemble.size
    p = both / S
    main = 4 * psi.psi_float(m, A.term(m)) * psi.psi_float(n, A.term(n))
    se = math.sqrt(max(main * (1 - main), p * (1 - p)) / S)
    bound = main + slack_sigmas * se
    return PairCorrelation(p, bound, main, se, p / main if main else float("inf"), S)


def discrepancy(x, A, N: int):
    """Star discrepancy of ``(q_n x mod 1)_{n <= N}``.

    Exact ``Fraction`` for exact rational ``x``; otherwise a float whose
    error is below the point's enclosure width.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    fp = fractional_parts(as_point(x), A, N)
    if fp.exact:
        return _star_discrepancy_int([int(v) for v in fp.num], fp.den)
    t = np.sort(fp.t_float)
    i = np.arange(1, N + 1)
    return float(np.max(np.maximum(i / N - t, t - (i - 1) / N)) + np.max(fp.t_err))


def star_discrepancy(points) -> Fraction:
    """Exact star discrepancy of a finite list of rationals in [0, 1)."""
    pts = [Fraction(p) for p in points]
    if not pts:
        raise DomainError("need at least one point")
    den = math.lcm(*(p.denominator for p in pts))
    return _star_discrepancy_int([int(p * den) for p in pts], den)


def _star_discrepancy_int(rs, den) -> Fraction:
    # D* = max_i max(i/N - t_(i), t_(i) - (i-1)/N), all over the common denominator
    r = sorted(rs)
    N = len(r)
    best = 0
    for i, ri in enumerate(r, start=1):
        best = max(best, i * den - N * ri, N * ri - (i - 1) * den)
    return Fraction(best, N * den)
