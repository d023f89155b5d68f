"""Beurling-Selberg majorant and minorant of an interval indicator.

``F`` is the Beurling function, an entire function of exponential type
``2*pi`` with ``F >= sgn`` and ``int (F - sgn) = 1``.  For the interval
``[l, r] = [gamma - psi, gamma + psi]`` and ``D = n**3``

    g1(x) =  (F(D(x - l)) + F(D(r - x))) / 2        (majorant)
    g2(x) = -(F(D(l - x)) + F(D(x - r))) / 2        (minorant)

Both are band-limited to ``|k| <= D``.  Their Fourier coefficients are
computed as ``1_I^(k) + int (g - 1_I)(x) e(-kx) dx``: the correction is
integrated with Gauss-Legendre panels near the interval and with an
asymptotic expansion (plus a rigorous remainder bound) in the tails.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, ToleranceNotMet

TWO_PI = 2.0 * np.pi
EPS = np.finfo(float).eps

_GL_LO = np.polynomial.legendre.leggauss(16)
_GL_HI = np.polynomial.legendre.leggauss(24)


def selberg_eval(x, K: int = 1000):
    """Evaluate ``F(x)`` by its truncated series; returns ``(value, err)``.

    ``F(z) = (sin(pi z)/pi)^2 [sum_{n>=0} (z-n)^-2 - sum_{n>=1} (z+n)^-2 + 2/z]``
    The series is cut at ``n = K`` (raised to ``|z| + 2`` if needed), the
    remainder replaced by ``1/(K+1/2-z) - 1/(K+1/2+z)``, and ``err`` bounds
    the midpoint-rule defect of that replacement plus rounding.
    """
    if K < 1:
        raise DomainError("truncation order K must be >= 1")
    z = np.asarray(x, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    Keff = int(max(K, np.ceil(np.max(np.abs(z))) + 2)) if z.size else K
    n = np.arange(0, Keff + 1, dtype=float)
    # sinc^2(z - n) = (sin(pi z)/pi)^2 / (z - n)^2, safe at integer z
    pos = np.sinc(z[:, None] - n[None, :]) ** 2
    neg = np.sinc(z[:, None] + n[None, 1:]) ** 2
    s = np.sin(np.pi * z)
    s2 = (s / np.pi) ** 2
    val = pos.sum(axis=1) - neg.sum(axis=1)
    val += 2.0 * s * np.sinc(z) / np.pi
    val += s2 * (1.0 / (Keff + 0.5 - z) - 1.0 / (Keff + 0.5 + z))
    gap = Keff - 0.5 - np.abs(z)
    err = s2 / (6.0 * gap ** 3) + 4.0 * EPS * (2 * Keff + 4)
    if scalar:
        return float(val[0]), float(err[0])
    return val, err


def excess(y):
    """``E(y) = F(y) - sgn(y)`` (with ``sgn(0) = 1``) via the trigamma form.

    ``E(y) = (2 sin^2(pi y)/pi^2) A(y)`` with ``A(y) = 1/y - psi1(1+y)`` for
    ``y >= 0`` and ``A(y) = psi1(-y) + 1/y`` for ``y < 0``.
    """
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    s2 = 2.0 * np.sin(np.pi * y) ** 2 / np.pi ** 2
    pos = y > 0
    neg = y < 0
    yp = y[pos]
    out[pos] = s2[pos] * (1.0 / yp - special.polygamma(1, 1.0 + yp))
    u = -y[neg]
    out[neg] = s2[neg] * (special.polygamma(1, u) - 1.0 / u)
    out[y == 0] = 0.0
    return out


def beurling(y):
    """``F(y)`` from the trigamma closed form (vectorised, float)."""
    y = np.asarray(y, dtype=float)
    return np.where(y >= 0, 1.0, -1.0) + excess(y)


def _indicator_hat(k, l, r):
    k = np.asarray(k, dtype=float)
    out = np.empty(k.shape, dtype=complex)
    nz = k != 0
    kk = k[nz]
    out[nz] = (np.exp(-1j * TWO_PI * kk * l) - np.exp(-1j * TWO_PI * kk * r)) / (1j * TWO_PI * kk)
    out[~nz] = r - l
    return out


def _expn(n, z):
    """Generalised exponential integral ``E_n(z)`` for complex ``z != 0``."""
    e = special.exp1(z)
    for m in range(1, n):
        e = (np.exp(-z) - z * e) / m
    return e


def _tail_J(n, nu, T):
    """``int_T^inf t^-n e(nu t) dt`` for integer ``n >= 2``."""
    nu = np.asarray(nu, dtype=float)
    out = np.empty(nu.shape, dtype=complex)
    zero = nu == 0
    out[zero] = T ** (1 - n) / (n - 1)
    z = -1j * TWO_PI * nu[~zero] * T
    out[~zero] = T ** (1 - n) * _expn(n, z)
    return out


def _tail(k, c, T, direction, a3, D):
    """Tail of ``int (1/pi^2) sin^2(pi D (x-c)) A(D|x-c|) e(-kx) dx``.

    Region ``x = c + direction*t`` with ``t >= T``.  ``A(u)`` is replaced by
    ``1/(2u^2) + a3/u^3``.  Returns ``(value, bound)`` where ``bound`` covers
    the dropped ``1/(30 u^5)`` remainder.
    """
    k = np.asarray(k, dtype=float)
    s = -direction * k  # e(-k x) = e(-k c) e(s t)
    total = np.zeros(k.shape, dtype=complex)
    for n, a in ((2, 0.5), (3, a3)):
        j = (0.5 * _tail_J(n, s, T) - 0.25 * _tail_J(n, s + D, T)
             - 0.25 * _tail_J(n, s - D, T))
        total += a * D ** (-n) * j
    total *= np.exp(-1j * TWO_PI * k * c) / np.pi ** 2
    bound = 1.0 / (120.0 * np.pi ** 2 * D ** 5 * T ** 4)
    return total, bound


@dataclass(frozen=True)
class BandlimitedPair:
    """Majorant/minorant pair with coefficients for ``k = -D..D``.

    ``g1[i]``, ``g2[i]`` belong to ``ks[i]``; ``tol`` is the certified
    per-coefficient error bound actually achieved.
    """

    gamma: float
    psi: float
    n: int
    D: int
    ks: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    tol: float
    requested_tol: float

    @property
    def l(self):
        return self.gamma - self.psi

    @property
    def r(self):
        return self.gamma + self.psi

    def coefficient(self, k: int, which: int = 1) -> complex:
        """``g_which^(k)``; exactly zero outside the band with no computation."""
        if abs(k) > self.D:
            return 0j
        arr = self.g1 if which == 1 else self.g2
        return complex(arr[k + self.D])

    def g1_direct(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * (beurling(self.D * (x - self.l)) + beurling(self.D * (self.r - x)))

    def g2_direct(self, x):
        x = np.asarray(x, dtype=float)
        return -0.5 * (beurling(self.D * (self.l - x)) + beurling(self.D * (x - self.r)))

    def partial_sum(self, x, which: int = 1):
        """Periodised ``g_which`` evaluated from its Fourier coefficients."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        arr = self.g1 if which == 1 else self.g2
        phase = np.exp(1j * TWO_PI * np.outer(x, self.ks))
        return (phase @ arr).real

    def partial_sum_error(self) -> float:
        return float(len(self.ks) * self.tol)

    def periodic_indicator(self, x):
        x = np.asarray(x, dtype=float)
        d = np.abs((x - self.gamma + 0.5) % 1.0 - 0.5)
        return (d <= self.psi).astype(float)

    def to_rows(self):
        """CSV rows ``k, re_g1, im_g1, re_g2, im_g2, tol``."""
        return [(int(k), a.real, a.imag, b.real, b.imag, self.tol)
                for k, a, b in zip(self.ks, self.g1, self.g2)]


def _panels(a, b, width):
    m = max(1, int(np.ceil((b - a) / width)))
    return np.linspace(a, b, m + 1)


def _gl_points(edges, rule):
    x0, w0 = rule
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    pts = mid[:, None] + half[:, None] * x0[None, :]
    wts = half[:, None] * w0[None, :]
    return pts, wts


def _correction(x, l, r, D, which):
    """``g_which(x) - 1_[l,r](x)`` away from the jump points."""
    if which == 1:
        return 0.5 * (excess(D * (x - l)) + excess(D * (r - x)))
    return -0.5 * (excess(D * (l - x)) + excess(D * (x - r)))


def _core_integrals(ks, l, r, D, which, W, panel_width, absolute=False):
    """Panel integrals over ``[l-W, r+W]`` with a two-rule error estimate."""
    segs = [(l - W, l), (l, r), (r, r + W)]
    res = {}
    for key, rule in (("lo", _GL_LO), ("hi", _GL_HI)):
        acc = np.zeros(len(ks), dtype=complex)
        for a, b in segs:
            pts, wts = _gl_points(_panels(a, b, panel_width), rule)
            pts, wts = pts.ravel(), wts.ravel()
            h = _correction(pts, l, r, D, which)
            if absolute:
                h = np.abs(h)
            hw = h * wts
            for start in range(0, len(ks), 256):
                kb = ks[start:start + 256]
                acc[start:start + 256] += np.exp(-1j * TWO_PI * np.outer(kb, pts)) @ hw
        res[key] = acc
    err = np.abs(res["hi"] - res["lo"])
    return res["hi"], err


def _tails(ks, l, r, D, which, W):
    """Asymptotic tail integrals of the correction outside ``[l-W, r+W]``."""
    # nearest-jump term decays as A_-, the far term as A_+ on the right,
    # mirrored on the left
    sign = 1.0 if which == 1 else -1.0
    if which == 1:
        right = [(l, W + (r - l), +1, -1.0 / 6.0), (r, W, +1, +1.0 / 6.0)]
        left = [(r, W + (r - l), -1, -1.0 / 6.0), (l, W, -1, +1.0 / 6.0)]
    else:
        right = [(l, W + (r - l), +1, +1.0 / 6.0), (r, W, +1, -1.0 / 6.0)]
        left = [(r, W + (r - l), -1, +1.0 / 6.0), (l, W, -1, -1.0 / 6.0)]
    total = np.zeros(len(ks), dtype=complex)
    bound = 0.0
    for c, T, direction, a3 in right + left:
        v, b = _tail(ks, c, T, direction, a3, D)
        total += sign * v
        bound += b
    return total, bound


def build_pair(gamma: float, psi: float, n: int, tol: float = 1e-8,
               width_factor: float = 60.0, panels_per_period: int = 4) -> BandlimitedPair:
    """Majorant/minorant pair of ``1_[gamma-psi, gamma+psi]`` with degree ``n**3``.

    Raises :class:`ToleranceNotMet` if the certified coefficient error
    exceeds ``tol``.
    """
    if not 0 < psi < 0.5:
        raise DomainError("psi must lie in (0, 1/2)")
    if n < 1:
        raise DomainError("n must be >= 1")
    D = int(n) ** 3
    l, r = gamma - psi, gamma + psi
    ks = np.arange(-D, D + 1)
    W = width_factor / D
    width = 1.0 / (panels_per_period * D)
    out = {}
    errs = []
    for which in (1, 2):
        core, core_err = _core_integrals(ks, l, r, D, which, W, width)
        tail, tail_bound = _tails(ks, l, r, D, which, W)
        out[which] = _indicator_hat(ks, l, r) + core + tail
        scale = np.abs(out[which]) + 1.0
        errs.append(np.max(core_err + tail_bound + 64 * EPS * scale))
    achieved = float(max(errs))
    if achieved > tol:
        raise ToleranceNotMet(f"coefficient error bound {achieved:.3e} exceeds tol {tol:.3e}")
    g1, g2 = out[1], out[2]
    # the k = 0 coefficients are real by symmetry of the integrand
    g1[D] = g1[D].real
    g2[D] = g2[D].real
    return BandlimitedPair(float(gamma), float(psi), int(n), D, ks, g1, g2,
                           achieved, float(tol))


@dataclass
class SandwichReport:
    violations: list
    checked: int
    tol: float

    @property
    def ok(self) -> bool:
        return not self.violations


def sandwich_check(pair: BandlimitedPair, grid, method: str = "fourier") -> SandwichReport:
    """Check ``g2 - tol <= 1_I <= g1 + tol`` at each grid point in [0, 1].

    ``method="fourier"`` evaluates the periodised functions from their
    coefficients; ``"direct"`` sums the translates ``g(x + m)`` through the
    closed form of ``F``.
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size and (grid.min() < 0 or grid.max() > 1):
        raise DomainError("grid must lie in [0, 1]")
    ind = pair.periodic_indicator(grid)
    if method == "fourier":
        up = pair.partial_sum(grid, 1)
        lo = pair.partial_sum(grid, 2)
        tol = pair.partial_sum_error()
    elif method == "direct":
        up, e1 = periodized_direct(pair, grid, 1)
        lo, e2 = periodized_direct(pair, grid, 2)
        tol = float(max(e1, e2))
    else:
        raise DomainError(f"unknown method {method!r}")
    bad = []
    for x, i, u, d in zip(grid, ind, up, lo):
        if u + tol < i or d - tol > i:
            bad.append((float(x), float(i), float(d), float(u)))
    return SandwichReport(bad, int(grid.size), tol)


def periodized_direct(pair: BandlimitedPair, x, which: int = 1, M: int = 200):
    """``sum_m g(x+m)`` via translates ``|m| <= M`` plus an asymptotic tail.

    Returns ``(values, err_bound)``.  Only the correction ``g - 1_I`` is
    summed; the periodic indicator is added exactly.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    D, l, r = pair.D, pair.l, pair.r
    m = np.arange(-M, M + 1, dtype=float)
    xs = x[:, None] + m[None, :]
    corr = _correction(xs, l, r, D, which).sum(axis=1)
    # for |m| > M each translate is (1/pi^2) sin^2(pi D (x-c)) A(D|x+m-c|) per
    # jump point c; sin^2 does not depend on m because D is an integer
    tail = np.zeros_like(x)
    for c in (l, r):
        s2 = np.sin(np.pi * D * (x - c)) ** 2 / np.pi ** 2
        zr = x - c + M + 1.0      # right translates: distance zr, zr+1, ...
        zl = c - x + M + 1.0      # left translates
        sum2 = special.polygamma(1, zr) + special.polygamma(1, zl)
        tail += s2 * sum2 / (2.0 * D ** 2)
    sign = 1.0 if which == 1 else -1.0
    # the 1/u^3 terms cancel in pairs to leading order; bound them crudely
    err = 2.0 * (1.0 / (6.0 * D ** 3 * M ** 2) + 1.0 / (120.0 * D ** 5 * M ** 4)) / np.pi ** 2
    vals = pair.periodic_indicator(x) + corr + sign * tail
    return vals, float(err + 1e-13 * (2 * M + 1))


def l1_distance(pair: BandlimitedPair, tol: float = 1e-6) -> tuple[float, float]:
    """``int_R |g_i - 1_I|`` for ``i = 1, 2`` by panel quadrature plus tails."""
    D, l, r = pair.D, pair.l, pair.r
    W = 60.0 / D
    width = 1.0 / (4 * D)
    ks = np.array([0])
    out = []
    for which in (1, 2):
        core, err = _core_integrals(ks, l, r, D, which, W, width, absolute=True)
        tail, bound = _tails(ks, l, r, D, which, W)
        total_err = float(err[0] + bound)
        if total_err > tol:
            raise ToleranceNotMet(f"L1 quadrature error {total_err:.3e} exceeds {tol:.3e}")
        # in the tails the correction keeps a fixed sign
        out.append(float(core[0].real + abs(tail[0].real)))
    return out[0], out[1]
