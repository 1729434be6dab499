"""Content-addressed on-disk cache for expensive results.

The key hashes the map serialization, the operation name, its parameters
and the package version, so a code bump invalidates old entries.  Writes go
to a temporary file in the same directory and are renamed into place, which
keeps concurrent writers from exposing partial files.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)


def cache_key(operation: str, params: dict, map_json: dict | None = None, version: str = __version__) -> str:
    blob = canonical({"op": operation, "params": params, "map": map_json, "version": version})
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass
class CacheEntry:
    key: str
    payload: dict
    created: float

    def to_json(self) -> dict:
        return {"key": self.key, "created": self.created, "payload": self.payload}


class Cache:
    def __init__(self, directory: str | os.PathLike | None):
        self.dir = Path(directory) if directory else None
        if self.dir:
            self.dir.mkdir(parents=True, exist_ok=True)

    @property
    def enabled(self) -> bool:
        return self.dir is not None

    def _path(self, key: str) -> Path:
        assert self.dir is not None
        return self.dir / f"{key}.json"

    def get(self, key: str) -> CacheEntry | None:
        if not self.dir:
            return None
        path = self._path(key)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (FileNotFoundError, json.JSONDecodeError):
            return None
        if data.get("key") != key:
            return None
        return CacheEntry(key, data["payload"], data.get("created", 0.0))

    def put(self, key: str, payload: dict) -> CacheEntry:
        entry = CacheEntry(key, payload, time.time())
        if not self.dir:
            return entry
        fd, tmp = tempfile.mkstemp(dir=self.dir, prefix=f".{key[:16]}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(json.dumps(entry.to_json(), sort_keys=True))
            os.replace(tmp, self._path(key))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return entry


def cache_get(cache: Cache, key: str) -> dict | None:
    entry = cache.get(key)
    return None if entry is None else entry.payload


def cache_put(cache: Cache, key: str, payload: dict) -> None:
    cache.put(key, payload)
