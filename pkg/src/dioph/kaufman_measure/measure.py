"""Cylinder masses, tree enumeration, Hölder profile and sampling."""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from ..counting_lab import Point
from ..errors import DomainError, EnumerationTooLarge, InadmissibleWord
from .blocks import continuant_pair
from .scheme import INSERTED_DIGIT, CantorScheme

NODE_LIMIT = 10 ** 6
# dyadic h from 1 down to 2^-16 (about 4.8 decades)
DEFAULT_H_GRID = 2.0 ** -np.arange(0, 17)


def mu_of_cylinder(scheme: CantorScheme, word) -> Fraction:
    """Exact mass of the cylinder of an admissible prefix."""
    good = scheme.good
    num, den = 1, 1
    for t in scheme.parse(word):
        if t[0] == "block":
            num *= good.numerators[t[1]]
            den *= good.nu_total
        elif t[0] == "c":
            den *= t[3] - t[2] + 1
        elif t[0] == "partial":
            pre = t[1]
            num *= sum(n for m, n in zip(good.members, good.numerators) if m[:len(pre)] == pre)
            den *= good.nu_total
    return Fraction(num, den)


# ---- tree ------------------------------------------------------------------

@dataclass
class Node:
    digits: tuple
    state: tuple          # (p, q, p_prev, q_prev)
    num: int
    den: int
    blocks: int = 0
    k: int = 0
    after_four: bool = False
    ntok: int = 0

    @property
    def mass(self) -> Fraction:
        return Fraction(self.num, self.den)

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        p, q, pp, qp = self.state
        if not self.digits:
            return Fraction(0), Fraction(1)
        a, b = Fraction(p, q), Fraction(p + pp, q + qp)
        return (a, b) if a < b else (b, a)

    @property
    def length(self) -> float:
        _, q, _, qp = self.state
        return 1.0 / (q * (q + qp)) if self.digits else 1.0


def root(scheme: CantorScheme) -> Node:
    return Node((), (0, 1, 1, 0), 1, 1)


def children(scheme: CantorScheme, node: Node) -> list[Node]:
    kind = scheme.next_kind(node.blocks, node.k, node.after_four)
    out = []
    if kind == "block":
        g = scheme.good
        for mem, w in zip(g.members, g.numerators):
            out.append(Node(node.digits + mem, continuant_pair(mem, node.state), node.num * w,
                            node.den * g.nu_total, node.blocks + 1, node.k, False, node.ntok + 1))
    elif kind == "four":
        out.append(Node(node.digits + (INSERTED_DIGIT,), continuant_pair((INSERTED_DIGIT,), node.state),
                        node.num, node.den, node.blocks, node.k, True, node.ntok + 1))
    else:
        lo, hi = scheme.c_bounds(node.state[1])
        cnt = hi - lo + 1
        for c in range(lo, hi + 1):
            out.append(Node(node.digits + (c,), continuant_pair((c,), node.state), node.num,
                            node.den * cnt, node.blocks, node.k + 1, False, node.ntok + 1))
    return out


@dataclass(frozen=True)
class ConservationReport:
    nodes: int
    expanded: int
    violations: int
    frontier_mass: Fraction
    max_digits: int
    insertions_reached: int

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.frontier_mass == 1


def conservation_check(scheme: CantorScheme, max_nodes: int = 10 ** 5,
                       max_tokens: int | None = None) -> ConservationReport:
    """Breadth-first expansion; at every expanded node the children masses
    must sum to the parent mass exactly.  Stops before the node count would
    exceed ``max_nodes``."""
    queue = deque([root(scheme)])
    nodes, expanded, bad = 1, 0, 0
    frontier = []
    max_digits, ins = 0, 0
    while queue:
        node = queue.popleft()
        if max_tokens is not None and node.ntok >= max_tokens:
            frontier.append(node)
            continue
        kids = children(scheme, node)
        if nodes + len(kids) > max_nodes:
            frontier.append(node)
            frontier.extend(queue)
            break
        expanded += 1
        nodes += len(kids)
        total = sum((Fraction(c.num, c.den) for c in kids), Fraction(0))
        if total != Fraction(node.num, node.den):
            bad += 1
        for c in kids:
            max_digits = max(max_digits, len(c.digits))
            ins = max(ins, c.k)
            queue.append(c)
    mass = sum((Fraction(n.num, n.den) for n in frontier), Fraction(0)) if frontier else Fraction(1)
    return ConservationReport(nodes, expanded, bad, mass, max_digits, ins)


def expand_by_length(scheme: CantorScheme, min_length: float, max_nodes: int = NODE_LIMIT) -> list[Node]:
    """Frontier after repeatedly splitting the longest cylinder above ``min_length``."""
    counter = 0
    heap = [(-1.0, counter, root(scheme))]
    leaves = []
    total = 1
    while heap:
        neg, _, node = heapq.heappop(heap)
        if -neg <= min_length:
            leaves.append(node)
            leaves.extend(n for _, _, n in heap)
            break
        kids = children(scheme, node)
        total += len(kids)
        if total > max_nodes:
            raise EnumerationTooLarge(f"profile needs more than {max_nodes} nodes")
        for c in kids:
            counter += 1
            heapq.heappush(heap, (-c.length, counter, c))
    return leaves


def lambda_bracket(leaves: list[Node], hs) -> tuple[np.ndarray, np.ndarray]:
    """Bounds on ``sup_t mu([t, t+h])`` from a frontier of disjoint cylinders.

    Lower: contiguous runs of cylinders fitting inside a window.  Upper: all
    cylinders a window can touch.  Exact up to float positions.
    """
    L = np.array([float(n.interval[0]) for n in leaves])
    R = np.array([float(n.interval[1]) for n in leaves])
    m = np.array([n.num / n.den for n in leaves])
    order = np.argsort(L, kind="stable")
    L, R, m = L[order], R[order], m[order]
    csum = np.concatenate([[0.0], np.cumsum(m)])
    lower, upper = [], []
    n = len(L)
    idx = np.arange(n)
    for h in np.atleast_1d(hs):
        # upper: window [R_i, R_i + h] starting on the right end of cylinder i
        j = np.searchsorted(L, R + h * (1 + 1e-12), side="right")
        upper.append(1.0 if np.any(j - idx == n) else min(1.0, float(np.max(csum[j] - csum[idx]))))
        # lower: window [L_i, L_i + h]; count cylinders with R_j <= L_i + h
        jr = np.maximum(np.searchsorted(R, L + h * (1 - 1e-12), side="right"), idx)
        lower.append(1.0 if np.any(jr - idx == n) else min(1.0, float(np.max(csum[jr] - csum[idx]))))
    return np.array(lower), np.array(upper)


@dataclass(frozen=True)
class HolderProfile:
    h: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    exponent_lower: float
    exponent_upper: float
    resolution: float
    nodes: int

    def rows(self):
        return [(float(h), float(a), float(b)) for h, a, b in zip(self.h, self.lower, self.upper)]

    @property
    def exponent(self) -> float:
        """Conservative fitted exponent (from the upper envelope)."""
        return self.exponent_upper


def holder_profile(scheme: CantorScheme, hs=None, resolution_factor: float = 2 ** -6,
                   max_nodes: int = NODE_LIMIT) -> HolderProfile:
    """Max mass of windows of length ``h`` with a least-squares exponent.

    The frontier is refined until every cylinder is shorter than
    ``resolution_factor * min(h)``.
    """
    if hs is None:
        hs = DEFAULT_H_GRID
    hs = np.sort(np.asarray(hs, float))[::-1]
    if np.any(hs <= 0) or np.any(hs > 1):
        raise DomainError("h must lie in (0, 1]")
    leaves = expand_by_length(scheme, float(hs.min()) * resolution_factor, max_nodes)
    lo, up = lambda_bracket(leaves, hs)
    x = np.log(hs)
    fit = hs < 1
    if fit.sum() < 2:
        fit = np.ones_like(hs, bool)
    s_lo = float(np.polyfit(x[fit], np.log(lo[fit]), 1)[0])
    s_up = float(np.polyfit(x[fit], np.log(up[fit]), 1)[0])
    return HolderProfile(hs, lo, up, s_lo, s_up, max(n.length for n in leaves), len(leaves))


def continuant_estimate_check(scheme: CantorScheme, paths: int = 200, seed: int = 0,
                              tail_blocks: int | None = None) -> dict:
    """Report ``|log q(G) - (n + tau n_k) p sigma| <= 4 eps n p sigma`` at every
    block-run end with ``n_k < n <= n_{k+1}`` along ``paths`` sampled words.

    After the last insertion each path runs ``tail_blocks`` further blocks
    (default: the last gap of the schedule)."""
    ps, eps, tau = scheme.p_sigma(), float(scheme.good.eps), float(scheme.tau)
    sched = scheme.schedule
    if tail_blocks is None:
        tail_blocks = sched[-1] - (sched[-2] if len(sched) > 1 else 0)
    stop = sched[-1] + tail_blocks
    g = scheme.good
    w = g.weights_float
    seen, viol, worst = 0, 0, 0.0
    by_k: dict[int, float] = {}
    for path in range(paths):
        rng = _rng(seed, 31337, path)
        state, blocks, k, after_four = (0, 1, 1, 0), 0, 0, False
        while blocks < stop:
            kind = scheme.next_kind(blocks, k, after_four)
            if kind == "block":
                state = continuant_pair(g.members[int(rng.choice(len(w), p=w))], state)
                blocks, after_four = blocks + 1, False
                if k >= 1:
                    nk = sched[k - 1]
                    dev = abs(math.log(state[1]) - (blocks + tau * nk) * ps) / (blocks * ps)
                    seen += 1
                    worst = max(worst, dev)
                    by_k[k] = max(by_k.get(k, 0.0), dev)
                    viol += dev > 4 * eps
            elif kind == "four":
                state, after_four = continuant_pair((INSERTED_DIGIT,), state), True
            else:
                lo, hi = scheme.c_bounds(state[1])
                span = hi - lo + 1
                c = int(rng.integers(lo, hi + 1)) if span < 2 ** 62 else lo + _big_uniform(rng, span)
                state, k, after_four = continuant_pair((c,), state), k + 1, False
    return {"checked": seen, "violations": viol, "worst_ratio": worst, "bound_ratio": 4 * eps,
            "worst_by_k": by_k, "paths": paths, "asserted": False}


# ---- sampling --------------------------------------------------------------

@dataclass(frozen=True)
class SampleHandle:
    word: tuple
    left: Fraction
    right: Fraction
    midpoint: mpmath.mpf

    @property
    def width(self) -> Fraction:
        return self.right - self.left

    def as_point(self) -> Point:
        return Point.interval(self.left, self.right)


def _rng(seed, *extra):
    return np.random.default_rng(np.random.SeedSequence([int(seed), *extra]))


def sample_mu(scheme: CantorScheme, seed: int, target_q: int, index: int = 0) -> SampleHandle:
    """Draw one word from mu, stopping as soon as ``q(word) > target_q``."""
    rng = _rng(seed, index)
    g = scheme.good
    w = g.weights_float
    node = root(scheme)
    while node.state[1] <= target_q:
        kind = scheme.next_kind(node.blocks, node.k, node.after_four)
        if kind == "block":
            i = int(rng.choice(len(w), p=w))
            mem = g.members[i]
            node = Node(node.digits + mem, continuant_pair(mem, node.state), 0, 1,
                        node.blocks + 1, node.k, False)
        elif kind == "four":
            node = Node(node.digits + (INSERTED_DIGIT,), continuant_pair((INSERTED_DIGIT,), node.state),
                        0, 1, node.blocks, node.k, True)
        else:
            lo, hi = scheme.c_bounds(node.state[1])
            c = int(rng.integers(lo, hi + 1)) if hi - lo < 2 ** 62 else lo + _big_uniform(rng, hi - lo + 1)
            node = Node(node.digits + (c,), continuant_pair((c,), node.state), 0, 1,
                        node.blocks, node.k + 1, False)
    a, b = node.interval
    bits = max(53, 2 * int(target_q).bit_length() + 8)
    with mpmath.workprec(bits):
        mid = mpmath.mpf((a + b).numerator) / (2 * (a + b).denominator)
    return SampleHandle(node.digits, a, b, mid)


def _big_uniform(rng, n: int) -> int:
    bits = n.bit_length() + 64
    words = rng.integers(0, 2 ** 32, size=(bits + 31) // 32, dtype=np.uint64)
    v = 0
    for x in words:
        v = (v << 32) | int(x)
    return v % n


@dataclass
class SampleBatch:
    x: np.ndarray
    tokens: np.ndarray      # block index or c value per grammar token, -1 past the end
    kinds: tuple[str, ...]
    q_final: np.ndarray


def _tokens_layout(scheme: CantorScheme, count: int) -> tuple[str, ...]:
    kinds, b, k, af = [], 0, 0, False
    for _ in range(count):
        kd = scheme.next_kind(b, k, af)
        kinds.append(kd)
        if kd == "block":
            b += 1
        elif kd == "four":
            af = True
        else:
            af, k = False, k + 1
    return tuple(kinds)


def _int64_ok(scheme: CantorScheme, target_q: int) -> bool:
    # the last step multiplies q by at most (N+1)^p or by c + 1 <= q^e
    e = float(scheme.c_exponent)
    growth = max((scheme.params.N + 1) ** scheme.p, 5)
    return math.log2(target_q) * (1 + e) + 2 < 62 and math.log2(target_q) + math.log2(growth) + 2 < 62


def sample_batch(scheme: CantorScheme, seed: int, target_q: int, size: int, chunk: int = 0,
                 keep_tokens: int = 0) -> SampleBatch:
    """Vectorised sampler: ``size`` words drawn with the generator keyed by
    ``(seed, chunk)``.  Midpoints are float64 (the cylinder width is below
    ``1/target_q^2`` and the rounding error below ``2^-53``)."""
    if not _int64_ok(scheme, target_q):
        raise DomainError("target_q too large for the vectorised sampler; use sample_mu")
    rng = _rng(seed, 1 << 20, chunk)
    g = scheme.good
    w = g.weights_float
    mem = np.array(g.members, dtype=np.int64)
    p = scheme.p
    P = np.zeros(size, np.int64)
    Q = np.ones(size, np.int64)
    PP = np.ones(size, np.int64)
    QP = np.zeros(size, np.int64)
    active = np.ones(size, bool)
    kinds, toks = [], []
    b, k, af = 0, 0, False
    c_exp = scheme.c_exponent
    while active.any():
        kind = scheme.next_kind(b, k, af)
        kinds.append(kind)
        tok = np.full(size, -1, np.int64)
        if kind == "block":
            idx = rng.choice(len(w), size=size, p=w)
            tok[active] = idx[active]
            for j in range(p):
                a = mem[idx, j]
                P, PP = np.where(active, a * P + PP, P), np.where(active, P, PP)
                Q, QP = np.where(active, a * Q + QP, Q), np.where(active, Q, QP)
            b += 1
        elif kind == "four":
            P, PP = np.where(active, 4 * P + PP, P), np.where(active, P, PP)
            Q, QP = np.where(active, 4 * Q + QP, Q), np.where(active, Q, QP)
            af = True
        else:
            lo, hi = _c_bounds_vec(scheme, Q, active, c_exp)
            c = rng.integers(lo, hi + 1)
            c = np.where(active, c, 0)
            tok[active] = c[active]
            P, PP = np.where(active, c * P + PP, P), np.where(active, P, PP)
            Q, QP = np.where(active, c * Q + QP, Q), np.where(active, Q, QP)
            af, k = False, k + 1
        toks.append(tok)
        active &= Q <= target_q
    x = 0.5 * (P / Q + (P + PP) / (Q + QP))
    T = np.stack(toks, axis=1) if keep_tokens == 0 else np.stack(toks[:keep_tokens], axis=1)
    return SampleBatch(x, T, tuple(kinds), Q)


def _c_bounds_vec(scheme, Q, active, c_exp):
    lo = np.ones(Q.shape, np.int64)
    hi = np.ones(Q.shape, np.int64)
    if c_exp == 1:
        # exact integer ceil(q/4), floor(q/2)
        lo = np.maximum((Q + 3) // 4, 1)
        hi = Q // 2
    else:
        for i in np.flatnonzero(active):
            lo[i], hi[i] = scheme.c_bounds(int(Q[i]))
    bad = active & (lo > hi)
    if bad.any():
        raise InadmissibleWord("empty c-range during sampling")
    return lo, np.maximum(hi, lo)


def first_token_histogram(batch: SampleBatch, ntok: int = 1) -> dict:
    """Counts of the first ``ntok`` grammar tokens (block index / c value)."""
    keys = [tuple(int(v) for v in row) for row in batch.tokens[:, :ntok]]
    out: dict = {}
    for kk in keys:
        out[kk] = out.get(kk, 0) + 1
    return out
