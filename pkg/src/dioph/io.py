"""Atomic file output, CSV formatting, manifests and the on-disk cache."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np
from filelock import FileLock

from .errors import CacheCorrupt

MANIFEST_SCHEMA = 1


def atomic_write(path, data: bytes) -> str:
    """Write via a temp file in the same directory and rename; returns sha256."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return hashlib.sha256(data).hexdigest()


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, Fraction):
        return str(v)
    s = str(v)
    if any(c in s for c in ',"\n'):
        s = '"' + s.replace('"', '""') + '"'
    return s


def csv_bytes(header, rows) -> bytes:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return ("\n".join(lines) + "\n").encode()


def write_csv(path, header, rows) -> str:
    return atomic_write(path, csv_bytes(header, rows))


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return _jsonable(o.tolist())
    if isinstance(o, Fraction):
        return str(o)
    return o


def json_bytes(obj) -> bytes:
    return (json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n").encode()


def write_json(path, obj) -> str:
    return atomic_write(path, json_bytes(obj))


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


class Cache:
    """Content-addressed blob store; one writer per key via an advisory lock.

    Each entry is ``<key>.blob`` holding a one-line JSON header with the
    sha256 of the body, then the body.  A mismatch raises CacheCorrupt.
    """

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.root / f"{key}.blob"

    def _lock(self, key: str) -> FileLock:
        return FileLock(str(self.root / f"{key}.lock"))

    def get(self, key: str) -> bytes | None:
        path = self._path(key)
        if not path.exists():
            return None
        with self._lock(key):
            data = path.read_bytes()
        try:
            head, body = data.split(b"\n", 1)
            want = json.loads(head)["sha256"]
        except (ValueError, KeyError) as e:
            raise CacheCorrupt(f"cache entry {key} is unreadable: {e}") from None
        if hashlib.sha256(body).hexdigest() != want:
            raise CacheCorrupt(f"cache entry {key} fails its hash check")
        return body

    def put(self, key: str, body: bytes) -> None:
        head = json.dumps({"sha256": hashlib.sha256(body).hexdigest()}).encode()
        with self._lock(key):
            atomic_write(self._path(key), head + b"\n" + body)
