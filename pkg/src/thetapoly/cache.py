"""On-disk cache of the exact T/U/block objects.

Entries are keyed by (kind, n, k, split) and hold canonical JSON: sorted keys,
no whitespace, trailing newline.  A hit is byte-identical to recomputing.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Callable, Dict, Iterator, Tuple

from .kernel import KIndex, base_T, block_T, general_T, general_U, tau
from .multipoly import MPoly, MRat
from .scalars import RatFunZeta

ENV_VAR = "THETAPOLY_CACHE"
KINDS = ("T", "U", "block", "base", "tau")


def cache_dir() -> Path:
    d = os.environ.get(ENV_VAR)
    if d:
        return Path(d)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "thetapoly"


def canonical(data) -> bytes:
    return (json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n").encode()


def key_name(kind: str, n: int, k, split: int) -> str:
    if kind not in KINDS:
        raise ValueError(f"unknown cache kind {kind!r}")
    ks = "_".join(str(v) for v in k)
    return f"{kind}-n{n}-k{ks}-s{split}.json"


def _compute(kind: str, n: int, k, split: int):
    k = tuple(k)
    if kind == "T":
        return general_T(KIndex(k, split))
    if kind == "U":
        return general_U(KIndex(k, split))
    if kind == "block":
        return block_T(n, split)
    if kind == "base":
        return base_T(n)
    return tau(k)


def _check_key(kind, n, k, split):
    if kind in ("T", "U"):
        ki = KIndex(tuple(k), split)
        if ki.n != n:
            raise ValueError(f"n = {n} inconsistent with k = {k}, m = {split}")
    if kind == "tau" and (split != 0 or 2 * n != sum(k)):
        raise ValueError("tau entries need split 0 and n = |k|/2")


def compute_bytes(kind: str, n: int, k, split: int) -> bytes:
    _check_key(kind, n, k, split)
    obj = _compute(kind, n, k, split)
    return canonical({"kind": kind, "n": n, "k": list(k), "split": split, "value": obj.to_json()})


class Cache:
    """A directory of canonical JSON files."""

    def __init__(self, root: Path | str | None = None):
        self.root = Path(root) if root is not None else cache_dir()

    def path(self, kind, n, k, split) -> Path:
        return self.root / key_name(kind, n, k, split)

    def get_bytes(self, kind, n, k, split) -> Tuple[bytes, bool]:
        """Return (payload, hit)."""
        p = self.path(kind, n, k, split)
        if p.exists():
            return p.read_bytes(), True
        data = compute_bytes(kind, n, k, split)
        self.root.mkdir(parents=True, exist_ok=True)
        tmp = p.with_suffix(".tmp")
        tmp.write_bytes(data)
        tmp.replace(p)
        return data, False

    def load(self, kind, n, k, split):
        data = json.loads(self.get_bytes(kind, n, k, split)[0])
        return decode(data)

    def entries(self) -> Iterator[Path]:
        if self.root.exists():
            yield from sorted(self.root.glob("*.json"))

    def verify(self) -> Dict[str, bool]:
        """Recompute each entry and compare bytes."""
        out = {}
        for p in self.entries():
            d = json.loads(p.read_bytes())
            out[p.name] = compute_bytes(d["kind"], d["n"], d["k"], d["split"]) == p.read_bytes()
        return out

    def clear(self) -> int:
        count = 0
        for p in self.entries():
            p.unlink()
            count += 1
        return count


def decode(data: dict):
    v = data["value"]
    kind = data["kind"]
    if kind in ("T", "U", "block"):
        return MRat.from_json(v)
    if kind == "base":
        return MPoly.from_json(v)
    return RatFunZeta.from_json(v)
