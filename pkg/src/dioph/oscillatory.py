"""Oscillatory integrals ``int_0^1 e(f(x)) dx`` and the van der Corput-type bounds.

Phases come from a closed-form registry so that the derivative bounds used
by the checks can be certified with interval arithmetic.  Quadrature is
Gauss-Legendre on panels whose phase advance is limited, refined until the
20/40-node difference meets the tolerance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from ._numeric import iv_prec, iv_to_fractions
from .errors import BoundViolated, ConstraintViolated, DomainError, ToleranceNotMet

KINDS = ("linear", "quadratic", "mobius", "mobius_difference")
IV_PIECES = 128
IV_BITS = 96
ADVANCE = 0.5           # cycles of phase per initial panel
GL_LO, GL_HI = 20, 40
_NODES = {n: np.polynomial.legendre.leggauss(n) for n in (GL_LO, GL_HI)}
_EPS = 2.0 ** -52


# ---- phase registry ----------------------------------------------------------

@dataclass(frozen=True)
class PhaseSpec:
    """A phase ``f`` on [0,1] from the closed-form registry.

    ``linear``: ``a x + b``; ``quadratic``: ``a x^2 + b x + c``;
    ``mobius``: ``s xi (p x + p')/(q x + q')``; ``mobius_difference``:
    ``s xi (M_1(x) - M_2(x))``.  ``A``, ``B``, ``C1``, ``C2`` are optional declared
    bounds; they are checked against the certified ones before use.
    """

    kind: str
    params: tuple
    A: float | None = None
    B: float | None = None
    C1: float | None = None
    C2: float | None = None
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown phase kind {self.kind!r}")
        if self.kind.startswith("mobius"):
            for w in self.params[2:]:
                if len(w) != 4 or any(int(v) != v for v in w):
                    raise DomainError("Mobius data must be integer tuples (p, q, p', q')")
                p, q, pp, qp = w
                if q < 0 or qp < 0 or q + qp == 0:
                    raise DomainError("denominator q x + q' must be positive on [0, 1]")
                if qp == 0:
                    raise DomainError("q' = 0 puts a pole at x = 0")

    def __call__(self, x):
        return _eval(self, np.asarray(x, float))

    def derivative(self, x):
        return _d1(self, np.asarray(x, float))

    def with_bounds(self, **kw) -> "PhaseSpec":
        d = dict(kind=self.kind, params=self.params, A=self.A, B=self.B, C1=self.C1, C2=self.C2,
                 label=self.label)
        d.update(kw)
        return PhaseSpec(**d)


def linear(a: float, b: float = 0.0, label: str = "") -> PhaseSpec:
    return PhaseSpec("linear", (float(a), float(b)), label=label or f"{a:g}x+{b:g}")


def quadratic(a: float, b: float = 0.0, c: float = 0.0, label: str = "") -> PhaseSpec:
    return PhaseSpec("quadratic", (float(a), float(b), float(c)),
                     label=label or f"{a:g}x^2+{b:g}x+{c:g}")


def mobius(xi: float, w, sign: int = -1, label: str = "") -> PhaseSpec:
    """``sign * xi * (p x + p')/(q x + q')`` with ``w = (p, q, p', q')``."""
    return PhaseSpec("mobius", (int(sign), float(xi), tuple(int(v) for v in w)),
                     label=label or f"mobius xi={xi:g}")


def mobius_difference(xi: float, w1, w2, sign: int = -1, label: str = "") -> PhaseSpec:
    return PhaseSpec("mobius_difference",
                     (int(sign), float(xi), tuple(int(v) for v in w1), tuple(int(v) for v in w2)),
                     label=label or f"mobius diff xi={xi:g}")


def word_map(word) -> tuple[int, int, int, int]:
    """``(p_n, q_n, p_{n-1}, q_{n-1})`` of a digit word, i.e. the map
    ``x -> (p_n x + p_{n-1})/(q_n x + q_{n-1})``."""
    from .kaufman_measure.blocks import continuant_pair
    return continuant_pair(tuple(word))


def _det(w):
    p, q, pp, qp = w
    return p * qp - pp * q


def _eval(s: PhaseSpec, x):
    k = s.kind
    if k == "linear":
        a, b = s.params
        return a * x + b
    if k == "quadratic":
        a, b, c = s.params
        return (a * x + b) * x + c
    sg, xi = s.params[:2]
    if k == "mobius":
        p, q, pp, qp = s.params[2]
        return sg * xi * (p * x + pp) / (q * x + qp)
    (p1, q1, pp1, qp1), (p2, q2, pp2, qp2) = s.params[2:]
    # numerator of M1 - M2 with exact integer coefficients
    a2 = p1 * q2 - p2 * q1
    a1 = p1 * qp2 + pp1 * q2 - p2 * qp1 - pp2 * q1
    a0 = pp1 * qp2 - pp2 * qp1
    num = (float(a2) * x + float(a1)) * x + float(a0)
    return sg * xi * num / ((q1 * x + qp1) * (q2 * x + qp2))


def _d1(s: PhaseSpec, x):
    k = s.kind
    if k == "linear":
        return np.full_like(x, s.params[0])
    if k == "quadratic":
        a, b, _ = s.params
        return 2 * a * x + b
    sg, xi = s.params[:2]
    if k == "mobius":
        w = s.params[2]
        return sg * xi * _det(w) / (w[1] * x + w[3]) ** 2
    w1, w2 = s.params[2:]
    return sg * xi * (_det(w1) / (w1[1] * x + w1[3]) ** 2 - _det(w2) / (w2[1] * x + w2[3]) ** 2)


# ---- interval certification -------------------------------------------------

def _iv_d1(s: PhaseSpec, X, iv):
    k = s.kind
    if k == "linear":
        return iv.mpf(s.params[0])
    if k == "quadratic":
        a, b, _ = s.params
        return 2 * iv.mpf(a) * X + b
    sg, xi = s.params[:2]
    xi = iv.mpf(xi) * sg
    if k == "mobius":
        w = s.params[2]
        return xi * _det(w) / (w[1] * X + w[3]) ** 2
    w1, w2 = s.params[2:]
    d1, d2 = _det(w1), _det(w2)
    D1, D2 = w1[1] * X + w1[3], w2[1] * X + w2[3]
    if d1 == d2:
        lin = (w2[1] - w1[1]) * X + (w2[3] - w1[3])
        L = (w1[1] + w2[1]) * X + (w1[3] + w2[3])
        return xi * d1 * lin * L / (D1 ** 2 * D2 ** 2)
    return xi * d1 * (1 / D1 ** 2 + 1 / D2 ** 2)      # d2 = -d1


def _iv_d2(s: PhaseSpec, X, iv):
    k = s.kind
    if k == "linear":
        return iv.mpf(0)
    if k == "quadratic":
        return iv.mpf(2 * s.params[0])
    sg, xi = s.params[:2]
    xi = iv.mpf(xi) * sg
    if k == "mobius":
        w = s.params[2]
        return -2 * xi * _det(w) * w[1] / (w[1] * X + w[3]) ** 3
    w1, w2 = s.params[2:]
    D1, D2 = w1[1] * X + w1[3], w2[1] * X + w2[3]
    return xi * (-2 * _det(w1) * w1[1] / D1 ** 3 + 2 * _det(w2) * w2[1] / D2 ** 3)


def stationary_factor(s: PhaseSpec):
    """``(C1, C2, sign)`` with ``f' = (C1 x + C2) g``, ``C1 > 0``; None if unavailable."""
    if s.kind == "quadratic":
        a, b, _ = s.params
        if a == 0:
            return None
        sg = 1 if a > 0 else -1
        return 2 * abs(a), sg * b, sg
    if s.kind == "mobius_difference":
        w1, w2 = s.params[2:]
        if _det(w1) != _det(w2) or w1[1] == w2[1]:
            return None
        c1, c2 = w2[1] - w1[1], w2[3] - w1[3]
        sg = 1 if c1 > 0 else -1
        return abs(c1), sg * c2, sg
    return None


def _iv_g(s: PhaseSpec, X, iv, sg):
    if s.kind == "quadratic":
        return iv.mpf(sg), iv.mpf(0)
    xi_s, xi = s.params[:2]
    w1, w2 = s.params[2:]
    K = iv.mpf(xi) * xi_s * _det(w1) * sg
    D1, D2 = w1[1] * X + w1[3], w2[1] * X + w2[3]
    L = (w1[1] + w2[1]) * X + (w1[3] + w2[3])
    g = K * L / (D1 ** 2 * D2 ** 2)
    dg = K * ((w1[1] + w2[1]) * D1 * D2 - 2 * L * (w1[1] * D2 + w2[1] * D1)) / (D1 ** 3 * D2 ** 3)
    return g, dg


def _down(fr: Fraction) -> float:
    v = float(fr)
    return v if Fraction(v) <= fr else math.nextafter(v, -math.inf)


def _up(fr: Fraction) -> float:
    v = float(fr)
    return v if Fraction(v) >= fr else math.nextafter(v, math.inf)


def _abs_range(Y) -> tuple[Fraction, Fraction]:
    lo, hi = iv_to_fractions(Y)
    if lo <= 0 <= hi:
        return Fraction(0), max(-lo, hi)
    return (-hi, -lo) if hi < 0 else (lo, hi)


@dataclass(frozen=True)
class CertifiedBounds:
    A: float            # inf |f'|
    B: float            # sup |f''|
    sup_d1: float       # sup |f'|
    sup_f: float        # sup |f|, for the rounding budget
    C1: float | None = None
    C2: float | None = None
    gA: float | None = None     # inf |g|
    gB: float | None = None     # sup |g'|

    def as_dict(self):
        return {k: v for k, v in self.__dict__.items()}


@lru_cache(maxsize=4096)
def certify(s: PhaseSpec, pieces: int = IV_PIECES) -> CertifiedBounds:
    """Interval enclosures of ``f'``, ``f''`` (and ``g``, ``g'``) over ``pieces``
    subintervals of [0,1]; declared bounds on ``s`` must be implied by them."""
    with iv_prec(IV_BITS) as iv:
        n = 1 if s.kind in ("linear", "quadratic") else pieces
        A, B, S1 = None, Fraction(0), Fraction(0)
        fac = stationary_factor(s)
        gA, gB = None, Fraction(0)
        for i in range(n):
            X = (iv.mpf([0, 1]) + i) / n
            lo1, hi1 = _abs_range(_iv_d1(s, X, iv))
            _, hi2 = _abs_range(_iv_d2(s, X, iv))
            A = lo1 if A is None else min(A, lo1)
            B, S1 = max(B, hi2), max(S1, hi1)
            if fac is not None:
                g, dg = _iv_g(s, X, iv, fac[2])
                glo, _ = _abs_range(g)
                _, dghi = _abs_range(dg)
                gA = glo if gA is None else min(gA, glo)
                gB = max(gB, dghi)
    x = np.linspace(0, 1, 4097)
    sup_f = float(np.max(np.abs(_eval(s, x)))) * 1.01 + abs(_up(S1)) / 4096
    cb = CertifiedBounds(_down(A), _up(B), _up(S1), sup_f,
                         *((float(fac[0]), float(fac[1]), _down(gA), _up(gB)) if fac else ()))
    _check_declared(s, cb)
    return cb


def _check_declared(s: PhaseSpec, cb: CertifiedBounds):
    if s.A is not None and s.A > (cb.gA if s.C1 is not None else cb.A):
        raise ConstraintViolated(f"declared A = {s.A} is not certified")
    if s.B is not None and cb.B is not None:
        ref = cb.gB if s.C1 is not None else cb.B
        if ref is not None and s.B < ref:
            raise ConstraintViolated(f"declared B = {s.B} is not certified")
    if s.C1 is not None and (cb.C1 is None or s.C1 != cb.C1 or (s.C2 or 0) != cb.C2):
        raise ConstraintViolated("declared linear factor does not match the phase")


# ---- quadrature ---------------------------------------------------------------

def _gl_sums(fn, a, b, n):
    t, w = _NODES[n]
    half = (b - a)[:, None] / 2
    x = (a + b)[:, None] / 2 + half * t[None, :]
    return (fn(x) * w[None, :]).sum(axis=1) * half[:, 0]


def gl_adaptive(fn, edges, tol: float, max_panels: int = 2 ** 21, rounds: int = 40,
                block: int = 2 ** 13):
    """Integrate ``fn`` over the span of ``edges``; returns ``(value, err_est)``.

    ``err_est`` is the summed |G20 - G40| over accepted panels; panels whose
    difference exceeds ``tol * width / 2`` are bisected.
    """
    a, b = np.asarray(edges[:-1], float), np.asarray(edges[1:], float)
    span = float(edges[-1] - edges[0])
    total, err, done = 0.0 + 0.0j, 0.0, 0
    for _ in range(rounds):
        bad_a, bad_b = [], []
        for i in range(0, len(a), block):
            aa, bb = a[i:i + block], b[i:i + block]
            g1 = _gl_sums(fn, aa, bb, GL_LO)
            g2 = _gl_sums(fn, aa, bb, GL_HI)
            d = np.abs(g2 - g1)
            bad = d > 0.5 * tol * (bb - aa) / span
            total += g2[~bad].sum()
            err += float(d[~bad].sum())
            done += int((~bad).sum())
            bad_a.append(aa[bad])
            bad_b.append(bb[bad])
        a, b = np.concatenate(bad_a), np.concatenate(bad_b)
        if not len(a):
            return total, err, done
        if done + 2 * len(a) > max_panels:
            break
        m = (a + b) / 2
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
    raise ToleranceNotMet(f"quadrature did not converge ({done} panels accepted, {len(a)} left)")


def _phase_edges(s: PhaseSpec, min_panels: int = 4, grid: int = 2 ** 14, max_panels: int = 2 ** 21):
    x = np.linspace(0, 1, grid + 1)
    d = np.abs(_d1(s, x))
    cell = np.maximum(d[:-1], d[1:]) / grid
    W = np.concatenate([[0.0], np.cumsum(cell)]) + x * ADVANCE * min_panels
    n = int(math.ceil(W[-1] / ADVANCE))
    if n > max_panels:
        raise ToleranceNotMet(f"phase needs about {n} panels (limit {max_panels})")
    return np.interp(np.linspace(0, W[-1], n + 1), W, x)


def osc_integral(f: PhaseSpec, tol: float = 1e-8, max_panels: int = 2 ** 21):
    """``(value, err)`` with ``|value - int_0^1 e(f)| <= err <= tol``.

    ``err`` adds the 20/40-node differences and a rounding budget for
    evaluating the phase in double precision.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    if f.kind == "linear":
        a, b = f.params
        if a == 0:
            return complex(np.exp(2j * np.pi * b)), 0.0
    cb = certify(f)
    edges = _phase_edges(f, max_panels=max_panels)
    budget = tol - (8 * 2 * math.pi * cb.sup_f * _EPS + 64 * _EPS)
    if budget <= 0:
        raise ToleranceNotMet("phase too large for double-precision evaluation at this tol")
    fn = lambda x: np.exp(2j * np.pi * _eval(f, x))
    val, est, panels = gl_adaptive(fn, edges, budget, max_panels)
    err = est + 8 * 2 * math.pi * cb.sup_f * _EPS + 64 * _EPS + panels * 4 * _EPS / len(edges)
    if err > tol:
        raise ToleranceNotMet(f"error estimate {err:.3g} exceeds tol {tol:.3g}")
    if abs(val) > 1 + err:
        raise ToleranceNotMet("quadrature result exceeds the trivial bound 1")
    return complex(val), float(err)


# ---- reports ------------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    lemma: str
    lhs: float
    rhs: float
    tol: float
    certified_bounds: dict
    label: str = ""

    @property
    def margin(self) -> float:
        return self.rhs + self.tol - self.lhs

    @property
    def ok(self) -> bool:
        return self.margin >= 0

    def as_dict(self) -> dict:
        return {"lemma": self.lemma, "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin,
                "certified_bounds": self.certified_bounds, "tol": self.tol, "label": self.label}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def _finish(rep: BoundReport, raise_on_violation: bool) -> BoundReport:
    if raise_on_violation and not rep.ok:
        raise BoundViolated(f"{rep.lemma} violated for {rep.label}: {rep.lhs} > {rep.rhs} + {rep.tol}",
                            rep)
    return rep


def check_nonstationary(f: PhaseSpec, tol: float = 1e-8, raise_on_violation: bool = True):
    """``|int e(f)| <= 1/A + B/A^2`` with ``|f'| >= A``, ``|f''| <= B``."""
    cb = certify(f)
    A = f.A if f.A is not None and f.C1 is None else cb.A
    B = f.B if f.B is not None and f.C1 is None else cb.B
    if not A > 0:
        raise ConstraintViolated(f"phase {f.label} has no certified lower bound on |f'|")
    val, err = osc_integral(f, tol)
    rep = BoundReport("nonstationary_phase", abs(val), 1 / A + B / A ** 2, tol + err,
                      {"A": A, "B": B}, f.label)
    return _finish(rep, raise_on_violation)


def check_stationary(f: PhaseSpec, tol: float = 1e-8, raise_on_violation: bool = True):
    """``|int e(f)| <= 6B / (A^{3/2} C1^{1/2})`` for ``f' = (C1 x + C2) g``,
    ``|g| >= A``, ``|g'| <= B``, ``B >= A``."""
    cb = certify(f)
    if cb.C1 is None:
        raise ConstraintViolated(f"phase {f.label} has no linear factor f' = (C1 x + C2) g")
    A = f.A if f.A is not None and f.C1 is not None else cb.gA
    if f.B is not None and f.C1 is not None:
        B = f.B
        if B < A:
            raise ConstraintViolated("declared B must be at least A")
    else:
        B = max(cb.gB, A)       # an upper bound may always be enlarged
    if not (A > 0 and cb.C1 > 0):
        raise ConstraintViolated("need |g| >= A > 0 and C1 > 0")
    val, err = osc_integral(f, tol)
    rep = BoundReport("stationary_phase", abs(val), 6 * B / (A ** 1.5 * math.sqrt(cb.C1)), tol + err,
                      {"A": A, "B": B, "C1": cb.C1, "C2": cb.C2}, f.label)
    return _finish(rep, raise_on_violation)


# ---- comparison with a general measure ----------------------------------------

@dataclass(frozen=True)
class TrigSum:
    """``F(x) = sum_j w_j e(f_j(x))`` with ``sum |w_j| <= 1``."""

    weights: tuple
    phases: tuple
    label: str = ""

    def __post_init__(self):
        if len(self.weights) != len(self.phases) or not self.phases:
            raise DomainError("need one weight per phase")
        if sum(Fraction(abs(w)) for w in self.weights) > 1:
            raise DomainError("sum |w_j| must be at most 1 so that |F| <= 1")

    def __call__(self, x):
        x = np.asarray(x, float)
        out = np.zeros(x.shape, complex)
        for w, f in zip(self.weights, self.phases):
            out += w * np.exp(2j * np.pi * _eval(f, x))
        return out

    def lipschitz(self) -> float:
        """Certified ``M >= sup |F'|``."""
        return _up(sum(Fraction(abs(w)) * Fraction(2 * math.pi) * Fraction(certify(f).sup_d1)
                       for w, f in zip(self.weights, self.phases)) * (1 + Fraction(1, 2 ** 40)))

    def m2(self, tol: float = 1e-8) -> tuple[float, float]:
        """``int_0^1 |F|^2`` by adaptive quadrature."""
        M = self.lipschitz()
        n = max(8, int(math.ceil(2 * M / (2 * math.pi * ADVANCE))))
        v, e, _ = gl_adaptive(lambda x: np.abs(self(x)) ** 2, np.linspace(0, 1, n + 1), tol)
        return float(v.real), e + 1e3 * _EPS


@dataclass(frozen=True)
class UniformMeasure:
    """Normalised Lebesgue measure on ``[a, b]``; ``Lambda(h) = min(1, h/(b-a))``."""

    a: float = 0.0
    b: float = 1.0

    def modulus(self, h: float) -> float:
        return min(1.0, h / (self.b - self.a))

    def integrate_abs(self, F: TrigSum, tol: float = 1e-7):
        M = F.lipschitz()
        n = max(8, int(math.ceil(M * (self.b - self.a) / (2 * math.pi * ADVANCE))))
        v, e, _ = gl_adaptive(lambda x: np.abs(F(x)), np.linspace(self.a, self.b, n + 1), tol,
                              rounds=60)
        L = self.b - self.a
        return float(v.real) / L, (e + 1e3 * _EPS) / L

    def describe(self):
        return {"measure": "uniform", "a": self.a, "b": self.b}


@dataclass
class SchemeMeasure:
    """A Kaufman-type scheme measure.

    ``Lambda`` is the upper window bound from a cylinder frontier, taken at the
    dyadic ceiling of ``h``; integrals are Monte-Carlo with a ``z``-sigma band.
    """

    scheme: object
    samples: int = 10 ** 5
    seed: int = 0
    target_q: int = 2 ** 24
    z: float = 4.0
    max_nodes: int = 10 ** 6
    _frontier: dict = field(default_factory=dict, repr=False)

    def modulus(self, h: float) -> float:
        from .kaufman_measure.measure import expand_by_length, lambda_bracket
        if h >= 1:
            return 1.0
        hd = 2.0 ** math.ceil(math.log2(h))
        res = hd / 16
        key = min((k for k in self._frontier if k <= res), default=None)
        if key is None:
            self._frontier[res] = expand_by_length(self.scheme, res, self.max_nodes)
            key = res
        return float(lambda_bracket(self._frontier[key], [hd])[1][0])

    def integrate_abs(self, F: TrigSum, tol: float = 0.0):
        from .kaufman_measure.measure import sample_batch
        x = sample_batch(self.scheme, self.seed, self.target_q, self.samples).x
        v = np.abs(F(x))
        return float(v.mean()), self.z * float(v.std(ddof=1)) / math.sqrt(len(v))

    def describe(self):
        return {"measure": "scheme", "samples": self.samples, "seed": self.seed,
                "scheme": self.scheme.key() if hasattr(self.scheme, "key") else repr(self.scheme)}


@dataclass
class ComparisonSpec:
    F: TrigSum
    measure: object = field(default_factory=UniformMeasure)
    label: str = ""

    def __post_init__(self):
        self._m2 = None

    @property
    def M(self) -> float:
        return self.F.lipschitz()

    def m2(self):
        if self._m2 is None:
            self._m2 = self.F.m2()
        return self._m2


def check_comparison(spec: ComparisonSpec, r: float, tol: float = 1e-8, raise_on_violation: bool = True):
    """``int |F| dmu <= 2r + Lambda(r/M) (1 + m2 M / r^3)``."""
    if not r > 0:
        raise DomainError("r must be positive")
    M = spec.M
    m2, m2_err = spec.m2()
    lam = spec.measure.modulus(r / M) if M > 0 else 1.0
    rhs = 2 * r + lam * (1 + (m2 + m2_err) * M / r ** 3)
    lhs, lhs_err = spec.measure.integrate_abs(spec.F)
    rep = BoundReport("measure_comparison", lhs, rhs, tol + lhs_err,
                      {"M": M, "m2": m2, "m2_err": m2_err, "r": r, "Lambda": lam,
                       **spec.measure.describe()}, spec.label or spec.F.label)
    return _finish(rep, raise_on_violation)


# ---- bundled regression family -----------------------------------------------

def _word_pairs(rng, count):
    out = []
    while len(out) < count:
        n = int(rng.integers(2, 7))
        m = n + 2 * int(rng.integers(-1, 2))
        if m < 2:
            continue
        u = tuple(int(v) for v in rng.integers(1, 4, n))
        v = tuple(int(v) for v in rng.integers(1, 4, m))
        w1, w2 = word_map(u), word_map(v)
        if w1[1] != w2[1]:
            out.append((u, v, w1, w2))
    return out


def regression_family() -> list[PhaseSpec]:
    """Fifty fixed phases: 10 linear, 10 nonstationary and 10 stationary
    quadratics, 20 Mobius differences of continued-fraction cylinder maps."""
    fam = [linear(a, b) for a, b in [(2, 0), (5.5, 0.3), (10, 0), (37, 0.1), (100, 0), (250.5, 0.7),
                                      (-64, 0.2), (1000, 0), (3.25, 0.5), (12.75, 0.9)]]
    fam += [quadratic(a, b) for a, b in [(0.01, 10), (1, 5), (-2, 9), (5, 12), (-10, 25), (20, 45),
                                          (0.5, -4), (-3, -8), (50, 101), (100, -230)]]
    fam += [quadratic(a, b) for a, b in [(10, 0), (1, 0), (25, -25), (-40, 12), (100, -50),
                                          (3.5, -2), (-7, 7), (200, -100), (0.3, -0.2), (60, -90)]]
    rng = np.random.default_rng(np.random.SeedSequence([5, 2, 6]))
    for u, v, w1, w2 in _word_pairs(rng, 20):
        xi = float(10 ** rng.uniform(1.5, 4))
        fam.append(mobius_difference(round(xi, 3), w1, w2,
                                     label=f"mobius diff xi={round(xi, 3)} {u}/{v}"))
    return fam


def comparison_family(scheme=None, samples: int = 10 ** 5, seed: int = 0):
    """``(spec, r)`` pairs: trigonometric averages against Lebesgue measure and,
    when ``scheme`` is given, a Mobius sum against the scheme measure."""
    out = []
    K = 4096
    F1 = TrigSum((1.0,), (linear(K),), label=f"e({K}x)")
    out += [(ComparisonSpec(F1, label=F1.label), r) for r in (0.1, 0.01)]
    ks = 3 * np.arange(1, 65) + 1
    F2 = TrigSum(tuple([1 / 64] * 64), tuple(linear(int(k)) for k in ks), label="average of 64 e(kx)")
    out += [(ComparisonSpec(F2, label=F2.label), r) for r in (0.2, 0.25, 0.3)]
    F3 = TrigSum((0.5, 0.5), (quadratic(10), quadratic(-30, 7)), label="two chirps")
    out += [(ComparisonSpec(F3, UniformMeasure(0.25, 0.75), label=F3.label), r) for r in (0.3, 0.5)]
    if scheme is not None:
        F = scheme_trig_sum(scheme)
        meas = SchemeMeasure(scheme, samples, seed)
        out += [(ComparisonSpec(F, meas, label=F.label), r) for r in (0.05, 0.2, 0.5)]
    return out


def scheme_trig_sum(scheme, xi: float = 2.0 ** 12) -> TrigSum:
    """``F(x) = sum_G mu(I(G)) e(-xi M_G(x))`` over words of two good blocks."""
    from .kaufman_measure.measure import mu_of_cylinder
    g = scheme.good
    ws, ph = [], []
    for a in g.members:
        for b in g.members:
            word = a + b
            ws.append(float(mu_of_cylinder(scheme, word)) * (1 - 2 ** -40))
            ph.append(mobius(xi, word_map(word)))
    return TrigSum(tuple(ws), tuple(ph), label=f"two-block Mobius sum xi={xi:g}")


def verify_family(tol: float = 1e-8, scheme=None, samples: int = 10 ** 5, seed: int = 0,
                  raise_on_violation: bool = False) -> list[BoundReport]:
    """Run every applicable check over the bundled families."""
    reps = []
    for f in regression_family():
        cb = certify(f)
        if cb.A > 0:
            reps.append(check_nonstationary(f, tol, raise_on_violation))
        if cb.C1 is not None and cb.gA > 0:
            reps.append(check_stationary(f, tol, raise_on_violation))
    for spec, r in comparison_family(scheme, samples, seed):
        reps.append(check_comparison(spec, r, tol, raise_on_violation))
    return reps
