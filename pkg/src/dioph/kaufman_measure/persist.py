"""Canonical serialisation of a built scheme (distribution, good set, grammar)."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from ..errors import CacheCorrupt, DomainError
from .blocks import BlockDistribution, BlockParams, GoodBlockSet
from .scheme import CantorScheme, PhiSpec

BLOB_VERSION = 1


def _canon(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def content_key(obj) -> str:
    """sha256 of the canonical JSON of a parameter block."""
    return hashlib.sha256(_canon(obj)).hexdigest()


def scheme_to_blob(s: CantorScheme) -> bytes:
    if s.phi.kind != "power":
        raise DomainError("only power-law Phi schemes can be serialised")
    d, g = s.dist, s.good
    payload = {
        "params": s.params.key(),
        "dist": {"blocks": [list(b) for b in d.blocks], "q": [str(v) for v in d.q],
                 "numerators": [str(v) for v in d.numerators], "denominator": str(d.denominator),
                 "Sigma": d.Sigma, "msigma": d.msigma, "max_deviation": d.max_deviation,
                 "scale_bits": d.scale_bits},
        "good": {"j0": g.j0, "eps": str(g.eps), "members": [list(m) for m in g.members],
                 "parts": [list(p) for p in g.parts], "numerators": [str(v) for v in g.numerators],
                 "nu_total": str(g.nu_total)},
        "scheme": {"tau": str(s.tau), "schedule": list(s.schedule), "mode": s.mode,
                   "c_exponent": str(s.c_exponent), "phi": s.phi.key(),
                   "Q": None if s.Q is None else [str(v) for v in s.Q], "step": s.step, "n1": s.n1,
                   "hypotheses": s.hypotheses},
    }
    body = _canon(payload)
    head = {"version": BLOB_VERSION, "sha256": hashlib.sha256(body).hexdigest()}
    return _canon(head) + b"\n" + body


def scheme_from_blob(blob: bytes) -> CantorScheme:
    try:
        head_raw, body = blob.split(b"\n", 1)
        head = json.loads(head_raw)
    except ValueError as e:
        raise CacheCorrupt(f"unreadable scheme blob: {e}") from None
    if head.get("version") != BLOB_VERSION:
        raise CacheCorrupt(f"blob version {head.get('version')} != {BLOB_VERSION}")
    if hashlib.sha256(body).hexdigest() != head.get("sha256"):
        raise CacheCorrupt("scheme blob hash mismatch")
    p = json.loads(body)
    pk = p["params"]
    params = BlockParams(pk["N"], pk["m"], Fraction(pk["eps"]), pk["j0"])
    dd = p["dist"]
    dist = BlockDistribution(params, tuple(tuple(b) for b in dd["blocks"]), tuple(int(v) for v in dd["q"]),
                             tuple(int(v) for v in dd["numerators"]), int(dd["denominator"]),
                             dd["Sigma"], dd["msigma"], dd["max_deviation"], dd["scale_bits"])
    gd = p["good"]
    good = GoodBlockSet(dist, gd["j0"], Fraction(gd["eps"]), tuple(tuple(m) for m in gd["members"]),
                        tuple(tuple(q) for q in gd["parts"]), tuple(int(v) for v in gd["numerators"]),
                        int(gd["nu_total"]))
    sd = p["scheme"]
    phi = PhiSpec("power", Fraction(sd["phi"]["tau"]), label=sd["phi"]["label"])
    return CantorScheme(params, dist, good, Fraction(sd["tau"]), tuple(sd["schedule"]), sd["mode"],
                        Fraction(sd["c_exponent"]), phi,
                        None if sd["Q"] is None else tuple(int(v) for v in sd["Q"]),
                        sd["step"], sd["n1"], sd["hypotheses"])
