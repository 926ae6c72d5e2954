"""Run configuration, resource guards and the on-disk cache."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path


class ResourceLimitError(RuntimeError):
    """A request would exceed an enumeration or memory guard."""


class FalsificationError(AssertionError):
    """An exact identity that should hold was found to fail."""


LIMITS = {
    "iso_t_d2": 12,  # max t for full isotropic enumeration at d = 2
    "iso_vectors": 200_000,  # max d^t for enumeration at odd d
    "group_order": 1_000_000,
    "dense_dim": 2**14,  # max dimension for dense exact operators
}


@dataclass
class RunConfig:
    seed: int = 0
    backend: str = "exact"
    cache_dir: Path | None = None
    limits: dict = field(default_factory=lambda: dict(LIMITS))

    @classmethod
    def from_env(cls, **kw):
        cfg = cls(**kw)
        if cfg.cache_dir is None and os.environ.get("CLIFFDUAL_CACHE"):
            cfg.cache_dir = Path(os.environ["CLIFFDUAL_CACHE"])
        return cfg


def cache_dir() -> Path | None:
    p = os.environ.get("CLIFFDUAL_CACHE")
    return Path(p) if p else None


def _cache_path(kind: str, key: dict) -> Path | None:
    root = cache_dir()
    if root is None:
        return None
    blob = json.dumps(key, sort_keys=True).encode()
    return root / kind / (hashlib.sha256(blob).hexdigest()[:20] + ".json")


def cache_load(kind: str, key: dict):
    p = _cache_path(kind, key)
    if p is None or not p.exists():
        return None
    with open(p) as fh:
        obj = json.load(fh)
    return obj["value"] if obj.get("key") == key else None


def cache_store(kind: str, key: dict, value) -> None:
    p = _cache_path(kind, key)
    if p is None:
        return
    p.parent.mkdir(parents=True, exist_ok=True)
    tmp = p.with_suffix(".tmp")
    with open(tmp, "w") as fh:
        json.dump({"key": key, "value": value}, fh, sort_keys=True)
    os.replace(tmp, p)
