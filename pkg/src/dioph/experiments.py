"""Experiment runners behind the command-line front end.

Each runner takes a parameter block, a master seed and a context (cache,
parallel map) and returns an :class:`Outcome`: named CSV tables, a JSON
summary and named pass/fail checks.  All randomness flows from the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import cf_core, counting_lab as cl, extremal_fourier as ef, oscillatory as osc
from .errors import ConfigInvalid
from .kaufman_measure import (BlockParams, build_scheme, conservation_check, fourier_estimate,
                              holder_profile, sample_batch)
from .kaufman_measure.blocks import block_sandwich_check, envelope_check
from .kaufman_measure.measure import continuant_estimate_check
from .kaufman_measure.persist import content_key, scheme_from_blob, scheme_to_blob


@dataclass
class Outcome:
    tables: dict = field(default_factory=dict)      # name -> (header, rows)
    summary: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)      # name -> bool
    hypotheses: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


@dataclass
class Context:
    cache: object = None
    map_fn: object = map


def _rng(seed, *extra):
    return np.random.default_rng(np.random.SeedSequence([int(seed), *extra]))


def _psi(d: dict) -> cl.ApproxFunction:
    kind = d.get("kind", "index_power")
    if kind == "constant":
        return cl.ApproxFunction.constant(d["c"])
    if kind in ("index_power", "power_law"):
        return cl.ApproxFunction(kind, d.get("c", "1"), d.get("s", "0"))
    raise ConfigInvalid(f"psi kind {kind!r} is not configurable")


def _seq(d: dict) -> cl.LacunarySequence:
    return cl.LacunarySequence(d.get("kind", "geometric"), int(d.get("q0", 1)), int(d.get("ratio", 2)))


# ---- cf-check ---------------------------------------------------------------

def run_cf_check(p, seed, ctx) -> Outcome:
    """Determinant identity, cylinder length bounds, continuant ratio and
    child ordering on random words, all in exact arithmetic."""
    rng = _rng(seed, 101)
    words, dmax, lmax = p["words"], p["max_digit"], p["max_len"]
    bad = {"determinant": 0, "cylinder_bounds": 0, "continuant_ratio": 0, "child_order": 0}
    for _ in range(words):
        n = int(rng.integers(1, lmax + 1))
        digits = tuple(int(v) for v in rng.integers(1, dmax + 1, n))
        w = cf_core.ContinuedFractionWord(digits)
        for k in range(1, n + 1):
            (p_, q_), (pp, qp) = w.pair(k), w.pair(k - 1)
            bad["determinant"] += p_ * qp - pp * q_ != (-1) ** (k - 1)
        c = cf_core.cylinder(w)
        q = w.q
        bad["cylinder_bounds"] += not (Fraction(1, 2 * q * q) <= c.length <= Fraction(1, q * q))
        m = int(rng.integers(1, lmax + 1))
        suffix = tuple(int(v) for v in rng.integers(1, dmax + 1, m))
        r = cf_core.continuant_ratio(w, suffix)
        bad["continuant_ratio"] += not (1 <= r <= 2)
        kids = cf_core.child_cylinders(w, range(1, dmax + 2))
        ok = all(a.left >= c.left and a.right <= c.right for a in kids)
        pairs = zip(kids, kids[1:])
        ok &= all(a.right <= b.left for a, b in pairs) if n % 2 == 1 else \
            all(b.right <= a.left for a, b in pairs)
        bad["child_order"] += not ok
    rows = [(name, words, v) for name, v in bad.items()]
    return Outcome({"cf_check": (("check", "checked", "violations"), rows)},
                   {"violations": bad, "words": words},
                   {name: v == 0 for name, v in bad.items()})


# ---- extremal-check -----------------------------------------------------------

def run_extremal_check(p, seed, ctx) -> Outcome:
    """Mean values, coefficient bound, sandwich and L1 distance over a grid."""
    grid = np.linspace(0, 1, p["grid_points"])
    rows, worst = [], {"mean": 0.0, "coef": -math.inf, "l1": 0.0, "sandwich": 0}
    for g in p["gammas"]:
        for psi in p["psis"]:
            for n in p["ns"]:
                pair = ef.build_pair(g, psi, n, p["tol"])
                D = pair.D
                m1 = abs(pair.coefficient(0, 1) - (2 * psi + 1 / D))
                m2 = abs(pair.coefficient(0, 2) - (2 * psi - 1 / D))
                k = np.abs(pair.ks).astype(float)
                cap = np.where(k > 0, np.minimum(1 / np.maximum(k, 1), 2 * psi), 2 * psi) + 1 / D + pair.tol
                excess = float(max(np.max(np.abs(pair.g1) - cap), np.max(np.abs(pair.g2) - cap)))
                sw = ef.sandwich_check(pair, grid)
                d1, d2 = ef.l1_distance(pair)
                l1 = max(abs(d1 - 1 / D), abs(d2 - 1 / D))
                rows.append((g, psi, n, D, pair.coefficient(0, 1).real, pair.coefficient(0, 2).real,
                             excess, len(sw.violations), d1, d2, pair.tol))
                worst["mean"] = max(worst["mean"], m1, m2)
                worst["coef"] = max(worst["coef"], excess)
                worst["l1"] = max(worst["l1"], l1)
                worst["sandwich"] += len(sw.violations)
    head = ("gamma", "psi", "n", "D", "g1_hat0", "g2_hat0", "coef_bound_excess", "sandwich_violations",
            "l1_g1", "l1_g2", "tol")
    return Outcome({"extremal": (head, rows)}, {"worst": worst},
                   {"mean_values": worst["mean"] <= p["mean_tol"], "coefficient_bound": worst["coef"] <= 0,
                    "sandwich": worst["sandwich"] == 0, "l1_distance": worst["l1"] <= p["l1_tol"]})


# ---- counting -------------------------------------------------------------------

def run_count(p, seed, ctx) -> Outcome:
    res = cl.counting_law_experiment(cl.LebesgueEnsemble(p["samples"]), p["N_max"], p["gamma"],
                                     _psi(p["psi"]), _seq(p["sequence"]), seed, p["eps0"],
                                     map_fn=ctx.map_fn)
    summ = {"checkpoints": res.checkpoints, "Psi": res.Psi, "median_norm_err": res.median_norm_err,
            "exponent": res.exponent, "exponent_rms": res.exponent_rms, "uncertain": res.uncertain}
    cp_rows = list(zip(res.checkpoints, res.Psi, res.median_norm_err, res.q10, res.q90))
    return Outcome({"count": (("N", "sample_id", "R", "Psi", "norm_err"), res.rows),
                    "count_checkpoints": (("N", "Psi", "median_norm_err", "q10", "q90"), cp_rows)},
                   summ,
                   {"median_norm_err": max(res.median_norm_err) <= p["max_median"],
                    "exponent": res.exponent <= p["max_exponent"]})


def run_zero_one(p, seed, ctx) -> Outcome:
    rep = cl.zero_one_experiment(cl.LebesgueEnsemble(p["samples"]), _seq(p["sequence"]), p["gamma"],
                                 _psi(p["psi_convergent"]), _psi(p["psi_divergent"]), p["N_max"], seed,
                                 map_fn=ctx.map_fn)
    summ = {"frac_convergent_stable": rep.frac_convergent_stable,
            "frac_divergent_gaining": rep.frac_divergent_gaining,
            "frac_divergent_half_psi": rep.frac_divergent_half_psi, "Psi_convergent": rep.Psi_convergent,
            "Psi_divergent": rep.Psi_divergent, "tail_convergent": rep.tail_convergent,
            "uncertain": rep.uncertain}
    return Outcome({"zero_one": (("regime", "sample_id", "R_half", "R_full"), rep.rows)}, summ,
                   {"convergent_stable": rep.frac_convergent_stable >= p["min_fraction"],
                    "divergent_gaining": rep.frac_divergent_gaining >= p["min_fraction"]},
                   dict(rep.preconditions))


def run_schmidt(p, seed, ctx) -> Outcome:
    psi = _psi(p["psi"])
    Q = p["Q"]
    rows = []
    for i in range(p["samples"]):
        digits = cl.sample_rng(seed, i).integers(0, 2, Q.bit_length() + 80, dtype=np.int64)
        rows.append((i, Q, cl.schmidt_count(cl.DigitPoint(2, digits), Q, p["gamma"], psi)))
    main = cl.schmidt_main_term(psi, Q)
    mean = float(np.mean([r[2] for r in rows]))
    return Outcome({"schmidt": (("sample_id", "Q", "S"), rows)},
                   {"main_term": main, "mean": mean, "ratio": mean / main},
                   {"mean_near_main_term": abs(mean / main - 1) <= p["rel_tol"]})


def run_discrepancy(p, seed, ctx) -> Outcome:
    A = _seq(p["sequence"])
    ens = cl.LebesgueEnsemble(p["samples"])
    N = p["N"]
    rows = [(i, N, float(cl.discrepancy(ens.point(i, seed, A, N), A, N))) for i in range(p["samples"])]
    med = float(np.median([r[2] for r in rows]))
    return Outcome({"discrepancy": (("sample_id", "N", "D_star"), rows)}, {"median": med},
                   {"median_below": med <= p["max_median"]})


def run_pair_corr(p, seed, ctx) -> Outcome:
    pc = cl.pair_correlation(cl.LebesgueEnsemble(p["samples"]), _seq(p["sequence"]), _psi(p["psi"]),
                             p["gamma"], p["m"], p["n"], seed)
    row = (p["m"], p["n"], pc.empirical, pc.main_term, pc.bound, pc.stderr, pc.samples)
    return Outcome({"pair_corr": (("m", "n", "empirical", "main_term", "bound", "stderr", "samples"), [row])},
                   {"empirical": pc.empirical, "bound": pc.bound, "ratio": pc.ratio},
                   {"quasi_independence": pc.empirical <= pc.bound})


# ---- scheme commands ---------------------------------------------------------------

def scheme_params_key(p) -> dict:
    s = p["scheme"]
    return {"N": s["N"], "m": s["m"], "eps": str(s["eps"]), "j0": s["j0"], "tau": str(s["tau"]),
            "mode": s["mode"], "insertions": s["insertions"], "step": s.get("step"), "n1": s["n1"]}


def get_scheme(p, ctx):
    """Build the configured scheme, going through the cache when one is set."""
    key = content_key({"object": "scheme", **scheme_params_key(p)})
    if ctx.cache is not None:
        blob = ctx.cache.get(key)
        if blob is not None:
            return scheme_from_blob(blob), key, True
    s = p["scheme"]
    step = s.get("step") or None
    scheme = build_scheme(BlockParams(s["N"], s["m"], str(s["eps"]), s["j0"]), tau=str(s["tau"]),
                          mode=s["mode"], insertions=s["insertions"], step=step if s["mode"] == "desk" else None,
                          n1=s["n1"])
    if ctx.cache is not None:
        ctx.cache.put(key, scheme_to_blob(scheme))
    return scheme, key, False


def _constants(scheme) -> dict:
    d, g = scheme.dist, scheme.good
    return {"Sigma": d.Sigma, "m_sigma": d.msigma, "p_sigma": scheme.p_sigma(), "nu_mass": float(g.nu_mass),
            "good_blocks": len(g), "schedule": list(scheme.schedule), "max_deviation": d.max_deviation,
            "key": scheme.key()}


def run_scheme_build(p, seed, ctx) -> Outcome:
    scheme, key, hit = get_scheme(p, ctx)
    cons = conservation_check(scheme, p["max_nodes"])
    sand = block_sandwich_check(scheme.good, p["sandwich_n"])
    env = envelope_check(scheme.good, p["sandwich_n"])
    cont = continuant_estimate_check(scheme, p["continuant_paths"], seed)
    g = scheme.good
    rows = [(i, " ".join(map(str, m)), n, n / g.nu_total) for i, (m, n) in enumerate(zip(g.members, g.numerators))]
    summ = {"cache_key": key, "cache_hit": hit, "constants": _constants(scheme),
            "conservation": {"nodes": cons.nodes, "violations": cons.violations,
                             "frontier_mass": str(cons.frontier_mass), "insertions_reached": cons.insertions_reached},
            "sandwich": {k: sand[k] for k in ("checked", "lower_violations", "upper_violations", "n_max")},
            "envelope": {k: env[k] for k in ("checked", "violations")},
            "continuant_estimate": {k: cont[k] for k in ("checked", "violations", "worst_ratio", "bound_ratio")}}
    return Outcome({"good_set": (("index", "block", "numerator", "weight"), rows)}, summ,
                   {"mass_conservation": cons.ok, "block_sandwich": sand["ok"], "envelope": env["ok"]},
                   dict(scheme.hypotheses))


def run_scheme_sample(p, seed, ctx) -> Outcome:
    scheme, key, hit = get_scheme(p, ctx)
    b = sample_batch(scheme, seed, p["target_q"], p["samples"])
    rows = [(i, float(x), int(q).bit_length(), int(t)) for i, (x, q, t) in
            enumerate(zip(b.x, b.q_final, b.tokens[:, 0]))]
    freq = np.bincount(b.tokens[:, 0], minlength=len(scheme.good)) / p["samples"]
    dev = float(np.max(np.abs(freq - scheme.good.weights_float)))
    return Outcome({"samples": (("sample_id", "x", "q_bits", "first_block"), rows)},
                   {"cache_key": key, "first_block_max_dev": dev},
                   {"first_block_frequency": dev <= 4 / math.sqrt(p["samples"])}, dict(scheme.hypotheses))


def run_holder(p, seed, ctx) -> Outcome:
    scheme, key, _ = get_scheme(p, ctx)
    hs = 2.0 ** -np.arange(0, p["h_min_exp"] + 1)
    prof = holder_profile(scheme, hs)
    target = 2 / (float(scheme.tau) + 2) - p["slack"]
    summ = {"exponent": prof.exponent, "exponent_lower": prof.exponent_lower, "target": target,
            "decades": float(math.log10(hs.max() / hs.min())), "frontier": prof.nodes}
    if p.get("deep_h_min_exp"):
        deep = holder_profile(scheme, 2.0 ** -np.arange(0, p["deep_h_min_exp"] + 1))
        summ["deep_exponent"] = deep.exponent
        summ["deep_h_min_exp"] = p["deep_h_min_exp"]
    rows = [(float(h), float(lo), float(up)) for h, lo, up in zip(prof.h, prof.lower, prof.upper)]
    return Outcome({"holder": (("h", "lambda_lower", "lambda_upper"), rows)}, summ,
                   {"exponent": prof.exponent >= target, "decades": summ["decades"] >= 4}, dict(scheme.hypotheses))


def run_fourier(p, seed, ctx) -> Outcome:
    scheme, key, _ = get_scheme(p, ctx)
    xi = 2.0 ** np.arange(p["j_min"], p["j_max"] + 1)
    xi = np.concatenate([[0.0], xi])
    r = fourier_estimate(scheme, xi, p["S"], seed, bootstrap=p["bootstrap"], map_fn=ctx.map_fn)
    rows = [(float(x), float(a), float(b), r.stderr) for x, a, b in zip(r.xi, r.re, r.im)]
    j = np.arange(p["j_min"], p["j_max"] + 1)
    top = r.octave_max(2.0 ** (j[-1] - 1), 2.0 ** j[-1])
    bottom = r.octave_max(2.0 ** j[0], 2.0 ** (j[0] + 1))
    floor = 3 / math.sqrt(p["S"])
    summ = {"slope": r.slope, "intercept": r.intercept, "ci": list(r.ci), "top_octave_max": top,
            "bottom_octave_max": bottom, "retained": int(r.retained.sum()), "noise_floor": floor,
            "target_q": r.target_q}
    return Outcome({"fourier": (("xi", "re", "im", "stderr"), rows)}, summ,
                   {"zero_frequency": r.re[0] == 1.0 and r.im[0] == 0.0, "top_below_bottom": top < bottom,
                    "negative_slope": r.slope < 0 and r.ci[1] < 0,
                    "retained_above_noise": bool(np.all(r.abs[r.retained] > floor))},
                   dict(scheme.hypotheses))


def run_oscillatory_verify(p, seed, ctx) -> Outcome:
    scheme = get_scheme(p, ctx)[0] if p["with_scheme"] else None
    reps = osc.verify_family(p["tol"], scheme, p["mc_samples"], seed)
    rows = [(r.lemma, r.label, r.lhs, r.rhs, r.margin, r.tol) for r in reps]
    by = {}
    for r in reps:
        c = by.setdefault(r.lemma, [0, 0])
        c[0] += 1
        c[1] += not r.ok
    return Outcome({"oscillatory": (("lemma", "label", "lhs", "rhs", "margin", "tol"), rows)},
                   {"reports": [r.as_dict() for r in reps], "counts": by},
                   {f"{k}_violations": v[1] == 0 for k, v in by.items()})


def moran_dimension(N: int, depth: int) -> float:
    """Root ``s`` of ``sum |I(w)|^s = 1`` over words in ``{1..N}^depth``."""
    import itertools
    logs = []
    for w in itertools.product(range(1, N + 1), repeat=depth):
        c = cf_core.ContinuedFractionWord(w)
        q, qp = c.q, c.pair(depth - 1)[1]
        logs.append(-math.log(q * (q + qp)))
    logs = np.array(logs)
    lo, hi = 0.0, 1.0
    for _ in range(60):
        s = (lo + hi) / 2
        val = np.log(np.sum(np.exp(s * logs)))
        lo, hi = (s, hi) if val > 0 else (lo, s)
    return (lo + hi) / 2


def run_dims(p, seed, ctx) -> Outcome:
    rows, ok = [], True
    for N, depth in zip(p["Ns"], p["depths"]):
        lo, up = cf_core.jarnik_bounds(N)
        est = moran_dimension(N, depth)
        rows.append((N, depth, lo, up, est))
        ok &= lo <= est <= up
    return Outcome({"dims": (("N", "depth", "jarnik_lower", "jarnik_upper", "cover_estimate"), rows)},
                   {"rows": rows}, {"estimate_within_bounds": bool(ok)})


# ---- registry -----------------------------------------------------------------

DESK = {"N": 3, "m": 1, "eps": "0.7", "j0": 2, "tau": "1", "mode": "desk", "insertions": 3, "step": 4,
        "n1": 4}
_DIV = {"kind": "index_power", "c": "0.5", "s": "0.8"}
_SEQ = {"kind": "geometric", "q0": 1, "ratio": 2}

COMMANDS = {
    "cf-check": (run_cf_check, {"words": 10 ** 4, "max_digit": 4, "max_len": 12}),
    "extremal-check": (run_extremal_check, {"gammas": [0.25, 0.5, 0.8], "psis": [0.05, 0.1, 0.2],
                                            "ns": [2, 3, 4], "grid_points": 1000, "tol": 1e-8,
                                            "mean_tol": 1e-6, "l1_tol": 1e-4}),
    "count": (run_count, {"samples": 100, "N_max": 10 ** 4, "gamma": 0, "psi": _DIV, "sequence": _SEQ,
                          "eps0": 0.1, "max_median": 5.0, "max_exponent": 0.75}),
    "zero-one": (run_zero_one, {"samples": 100, "N_max": 10 ** 5, "gamma": 0, "sequence": _SEQ,
                                "psi_convergent": {"kind": "index_power", "c": "1", "s": "2"},
                                "psi_divergent": _DIV, "min_fraction": 0.95}),
    "schmidt": (run_schmidt, {"samples": 50, "Q": 10 ** 4, "gamma": 0,
                              "psi": {"kind": "power_law", "c": "0.25", "s": "1"}, "rel_tol": 0.2}),
    "discrepancy": (run_discrepancy, {"samples": 50, "N": 10 ** 4, "sequence": _SEQ, "max_median": 0.05}),
    "pair-corr": (run_pair_corr, {"samples": 10 ** 4, "m": 3, "n": 9, "gamma": 0,
                                  "psi": {"kind": "constant", "c": "0.05"}, "sequence": _SEQ}),
    "scheme-build": (run_scheme_build, {"scheme": DESK, "max_nodes": 10 ** 5, "sandwich_n": 7,
                                        "continuant_paths": 200}),
    "scheme-sample": (run_scheme_sample, {"scheme": DESK, "samples": 10 ** 4, "target_q": 2 ** 24}),
    "holder": (run_holder, {"scheme": DESK, "h_min_exp": 16, "slack": 0.2, "deep_h_min_exp": 0}),
    "fourier": (run_fourier, {"scheme": DESK, "S": 10 ** 6, "j_min": 4, "j_max": 20, "bootstrap": 1000}),
    "oscillatory-verify": (run_oscillatory_verify, {"scheme": DESK, "tol": 1e-8, "with_scheme": True,
                                                    "mc_samples": 10 ** 5}),
    "dims": (run_dims, {"Ns": [8, 10, 12], "depths": [5, 4, 4]}),
}


def merge_params(command: str, params: dict) -> dict:
    """Defaults overlaid with ``params``; unknown keys or mistyped values raise."""
    if command not in COMMANDS:
        raise ConfigInvalid(f"unknown command {command!r}")
    defaults = COMMANDS[command][1]
    return _merge(defaults, params, command)


def _merge(defaults, given, where):
    out = dict(defaults)
    for k, v in (given or {}).items():
        if k not in defaults:
            raise ConfigInvalid(f"{where}: unknown parameter {k!r}")
        d = defaults[k]
        if isinstance(d, dict):
            if not isinstance(v, dict):
                raise ConfigInvalid(f"{where}.{k} must be a table")
            out[k] = {**d, **v} if k in ("psi", "psi_convergent", "psi_divergent", "sequence") \
                else _merge(d, v, f"{where}.{k}")
        elif isinstance(d, bool):
            if not isinstance(v, bool):
                raise ConfigInvalid(f"{where}.{k} must be a boolean")
            out[k] = v
        elif isinstance(d, int) and not isinstance(d, bool):
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigInvalid(f"{where}.{k} must be an integer")
            out[k] = v
        elif isinstance(d, float):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigInvalid(f"{where}.{k} must be a number")
            out[k] = float(v)
        elif isinstance(d, list):
            if not isinstance(v, list):
                raise ConfigInvalid(f"{where}.{k} must be a list")
            out[k] = v
        else:
            out[k] = v
    return out


def run_command(command: str, params: dict, seed: int, ctx: Context | None = None) -> Outcome:
    p = merge_params(command, params)
    return COMMANDS[command][0](p, seed, ctx or Context())
