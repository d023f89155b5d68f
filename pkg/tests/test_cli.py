import json
import os

import pytest
from hypothesis import given, settings, strategies as st

from dioph import io
from dioph.cli import main, run
from dioph.config import ExperimentConfig, dumps, load, loads
from dioph.errors import CacheCorrupt, ConfigInvalid
from dioph.experiments import Context, get_scheme, merge_params
from dioph.kaufman_measure.persist import scheme_to_blob

SMALL_COUNT = {"samples": 30, "N_max": 4096}


def test_config_roundtrip_basic(tmp_path):
    c = ExperimentConfig("count", SMALL_COUNT, seed=7, out=str(tmp_path), threads=2,
                         tolerances={"max_median": 4.5})
    assert loads(dumps(c)) == c
    p = tmp_path / "c.toml"
    p.write_text(dumps(c))
    assert load(p) == c
    assert c.resolved_params()["max_median"] == 4.5


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 40), threads=st.integers(1, 8),
       samples=st.integers(30, 500), eps0=st.floats(0.01, 0.5), out=st.text("abc/_-", min_size=1))
def test_config_roundtrip_property(seed, threads, samples, eps0, out):
    c = ExperimentConfig("count", {"samples": samples, "eps0": eps0,
                                   "psi": {"kind": "constant", "c": "0.1"}},
                         seed=seed, out=out, threads=threads)
    assert loads(dumps(c)) == c


@pytest.mark.parametrize("text", [
    'command = "nope"',
    'command = "count"\nbogus = 1',
    'command = "count"\n[params]\nsamples = "many"',
    'command = "count"\n[params]\nunknown = 3',
    'command = "count"\nseed = -1',
    'command = "holder"\n[params.scheme]\nN = 2.5',
    'command = "count"\nseed =',
    'seed = 3',
])
def test_config_invalid(text):
    with pytest.raises(ConfigInvalid):
        loads(text)


def test_merge_keeps_nested_defaults():
    p = merge_params("holder", {"scheme": {"N": 4}})
    assert p["scheme"]["N"] == 4 and p["scheme"]["m"] == 1


def test_atomic_write_leaves_no_partial(tmp_path, monkeypatch):
    target = tmp_path / "t.csv"
    io.atomic_write(target, b"old\n")

    def boom(*a, **k):
        raise OSError("disk full")
    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        io.write_csv(target, ["a"], [[1.0]])
    assert target.read_bytes() == b"old\n"
    assert sorted(p.name for p in tmp_path.iterdir()) == ["t.csv"]


def test_csv_float_roundtrip():
    vals = [0.1, 1 / 3, 2.0 ** -1074, 1e308, -0.0]
    line = io.csv_bytes(["x"] * len(vals), [vals]).decode().splitlines()[1]
    assert [float(s) for s in line.split(",")] == vals


def test_rerun_identical_hashes(tmp_path):
    m1 = run(ExperimentConfig("count", SMALL_COUNT, seed=3, out=str(tmp_path / "a")))
    m2 = run(ExperimentConfig("count", SMALL_COUNT, seed=3, out=str(tmp_path / "b")))
    assert m1["files"] == m2["files"]
    for f, h in m1["files"].items():
        assert io.sha256_file(tmp_path / "a" / f) == h["sha256"]
    header = (tmp_path / "a" / "count_count.csv").read_text().splitlines()[0]
    assert header == "N,sample_id,R,Psi,norm_err"
    m3 = run(ExperimentConfig("count", SMALL_COUNT, seed=4, out=str(tmp_path / "c")))
    assert m3["files"]["count_count.csv"] != m1["files"]["count_count.csv"]
    man = json.loads((tmp_path / "a" / "count_manifest.json").read_text())
    assert man["schema_version"] == io.MANIFEST_SCHEMA and man["config"]["seed"] == 3


def test_threads_do_not_change_output(tmp_path):
    m1 = run(ExperimentConfig("count", SMALL_COUNT, seed=1, out=str(tmp_path / "a")))
    m2 = run(ExperimentConfig("count", SMALL_COUNT, seed=1, out=str(tmp_path / "b"), threads=2))
    assert m1["files"] == m2["files"]


def test_cache_hit_matches_cold_build(tmp_path):
    p = merge_params("scheme-build", {})
    cold, key, hit = get_scheme(p, Context())
    assert not hit
    ctx = Context(io.Cache(tmp_path))
    first, k1, hit1 = get_scheme(p, ctx)
    again, k2, hit2 = get_scheme(p, ctx)
    assert (hit1, hit2) == (False, True) and k1 == k2 == key
    assert scheme_to_blob(again) == scheme_to_blob(cold) == scheme_to_blob(first)


def test_cache_corrupt(tmp_path):
    cache = io.Cache(tmp_path)
    cache.put("k", b"payload")
    assert cache.get("k") == b"payload"
    path = tmp_path / "k.blob"
    path.write_bytes(path.read_bytes()[:-1] + b"X")
    with pytest.raises(CacheCorrupt):
        cache.get("k")
    path.write_bytes(b"garbage")
    with pytest.raises(CacheCorrupt):
        cache.get("k")
    assert cache.get("missing") is None


def test_corrupt_scheme_blob_through_get_scheme(tmp_path):
    p = merge_params("scheme-build", {})
    ctx = Context(io.Cache(tmp_path))
    _, key, _ = get_scheme(p, ctx)
    body = ctx.cache.get(key)
    ctx.cache.put(key, body.replace(b'"version":1', b'"version":9'))
    with pytest.raises(CacheCorrupt):
        get_scheme(p, ctx)


def test_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text(dumps(ExperimentConfig("count", SMALL_COUNT, out=str(tmp_path / "o"))))
    assert main(["count", "--config", str(cfg)]) == 0
    assert "PASS" in capsys.readouterr().out
    strict = ExperimentConfig("count", SMALL_COUNT, out=str(tmp_path / "o"), tolerances={"max_median": 1e-9})
    cfg.write_text(dumps(strict))
    assert main(["count", "--config", str(cfg), "--seed", "2"]) == 2
    cfg.write_text('command = "count"\n[params]\nsamples = 5')
    assert main(["count", "--config", str(cfg)]) == 1
    cfg.write_text('command = "count"\n[params]\nwhat = 5')
    assert main(["count", "--config", str(cfg)]) == 1
    assert main(["holder", "--config", str(cfg)]) == 1
    with pytest.raises(SystemExit):
        main(["not-a-command"])
