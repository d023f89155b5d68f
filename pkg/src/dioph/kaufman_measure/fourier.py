"""Monte-Carlo estimate of the Fourier transform of the scheme measure."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import AllBelowNoise, DomainError
from .measure import sample_batch
from .scheme import CantorScheme

CHUNK = 2 ** 14


def default_frequencies(lo: int = 4, hi: int = 20, per_octave: int = 1) -> np.ndarray:
    return 2.0 ** (lo + np.arange((hi - lo) * per_octave + 1) / per_octave)


@dataclass(frozen=True)
class FourierResult:
    xi: np.ndarray
    re: np.ndarray
    im: np.ndarray
    stderr: float
    S: int
    retained: np.ndarray
    slope: float
    intercept: float
    ci: tuple[float, float]
    target_q: int

    @property
    def abs(self) -> np.ndarray:
        return np.hypot(self.re, self.im)

    def octave_max(self, lo: float, hi: float) -> float:
        sel = (np.abs(self.xi) >= lo) & (np.abs(self.xi) <= hi)
        return float(self.abs[sel].max())

    def rows(self):
        return [(float(x), float(a), float(b), self.stderr) for x, a, b in zip(self.xi, self.re, self.im)]


def _chunk_sums(args):
    scheme, seed, target_q, size, idx, xi = args
    b = sample_batch(scheme, seed, target_q, size, chunk=idx)
    ph = np.exp(-2j * np.pi * np.outer(b.x, xi))
    return ph.sum(axis=0)


def _fit(xi, amp, sel):
    x, y = np.log(np.abs(xi[sel])), np.log(amp[sel])
    slope, icept = np.polyfit(x, y, 1)
    return float(slope), float(icept)


def fourier_estimate(scheme: CantorScheme, xi=None, S: int = 10 ** 6, seed: int = 0,
                     target_q: int | None = None, chunk: int = CHUNK, bootstrap: int = 1000,
                     map_fn=map) -> FourierResult:
    """``mu^(xi) ~ (1/S) sum e(-xi x_i)`` with a chunk-bootstrap CI on the decay slope.

    Points with ``|mu^| <= 3/sqrt(S)`` are dropped from the fit.  ``xi = 0`` is
    returned as exactly 1.
    """
    xi = default_frequencies() if xi is None else np.asarray(xi, float)
    if S < 10 ** 4:
        raise DomainError("need at least 10^4 samples")
    xmax = float(np.max(np.abs(xi))) if xi.size else 0.0
    if target_q is None:
        target_q = max(2 ** 24, int(10 * xmax) + 1)
    if target_q < 10 * xmax:
        raise DomainError("target_q must be at least 10 max|xi|")
    sizes = [chunk] * (S // chunk) + ([S % chunk] if S % chunk else [])
    tasks = [(scheme, seed, target_q, n, i, xi) for i, n in enumerate(sizes)]
    sums = np.array(list(map_fn(_chunk_sums, tasks)))        # chunks x xi, fixed order
    est = sums.sum(axis=0) / S
    zero = xi == 0
    est[zero] = 1.0
    stderr = 1 / math.sqrt(S)
    amp = np.abs(est)
    keep = (amp > 3 * stderr) & ~zero
    if keep.sum() < 2:
        raise AllBelowNoise("fewer than two frequencies above the noise floor; increase S")
    slope, icept = _fit(xi, amp, keep)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 7919]))
    sz = np.array(sizes, float)
    boots = []
    for _ in range(bootstrap):
        pick = rng.integers(0, len(sizes), len(sizes))
        e = sums[pick].sum(axis=0) / sz[pick].sum()
        a = np.abs(e)
        if np.all(a[keep] > 0):
            boots.append(_fit(xi, a, keep)[0])
    lo, hi = np.percentile(boots, [2.5, 97.5]) if boots else (math.nan, math.nan)
    return FourierResult(xi, est.real.copy(), est.imag.copy(), stderr, S, keep, slope, icept,
                         (float(lo), float(hi)), target_q)
