"""Content-addressed store for reports and exported designs.

Layout under the root::

    objects/<sha256 of content>      immutable blobs
    refs/<key>                       sha256 of the blob stored for an input key

Writes go through a temporary file and ``os.replace`` so a crash never leaves a
partial object behind.  Reads re-hash the blob and raise on mismatch.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

ENV_VAR = "OPDLAB_CACHE"


class CacheIntegrityError(RuntimeError):
    pass


def canonical_key(inputs: dict) -> str:
    blob = json.dumps(inputs, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def resolve_dir(flag: str | None) -> Path | None:
    """``--cache-dir`` wins, then ``$OPDLAB_CACHE``; no cache otherwise."""
    value = flag or os.environ.get(ENV_VAR)
    return Path(value) if value else None


def _atomic_write(path: Path, data: bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
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


class Cache:
    def __init__(self, root):
        self.root = Path(root)

    def _object(self, digest: str) -> Path:
        return self.root / "objects" / digest

    def _ref(self, key: str) -> Path:
        return self.root / "refs" / key

    def put_blob(self, data: bytes) -> str:
        digest = hashlib.sha256(data).hexdigest()
        path = self._object(digest)
        if not path.exists():
            _atomic_write(path, data)
        return digest

    def get_blob(self, digest: str) -> bytes:
        path = self._object(digest)
        data = path.read_bytes()
        if hashlib.sha256(data).hexdigest() != digest:
            raise CacheIntegrityError(f"object {digest} is corrupted")
        return data

    def store(self, key: str, data: bytes) -> str:
        digest = self.put_blob(data)
        _atomic_write(self._ref(key), digest.encode())
        return digest

    def lookup(self, key: str) -> bytes | None:
        ref = self._ref(key)
        if not ref.exists():
            return None
        digest = ref.read_text().strip()
        if not self._object(digest).exists():
            raise CacheIntegrityError(f"ref {key} points at missing object {digest}")
        return self.get_blob(digest)

    def keys(self) -> list[str]:
        refs = self.root / "refs"
        return sorted(p.name for p in refs.iterdir()) if refs.exists() else []
