"""Persistence for G_d(p) evaluations and scan checkpoints.

Cache files are CSV with header ``d,p,mid_hex,rad_hex,prec,method``; midpoint
and radius are stored as exact hexadecimal binary floats so a load reproduces
the stored ball bit for bit.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

from .arith import is_prime
from .numeric import CertReal

log = logging.getLogger(__name__)

HEADER = ("d", "p", "mid_hex", "rad_hex", "prec", "method")


class CacheFormatError(ValueError):
    pass


@dataclass(frozen=True)
class CacheRecord:
    d: int
    p: int
    mid_hex: str
    rad_hex: str
    prec: int
    method: str = "coset"

    @classmethod
    def from_value(cls, d: int, p: int, value: CertReal, method: str = "coset") -> "CacheRecord":
        mid, rad = value.mid_rad_hex()
        return cls(d, p, mid, rad, value.prec, method)

    def value(self) -> CertReal:
        return CertReal.from_hex(self.mid_hex, self.rad_hex, self.prec)

    def radius(self) -> float:
        return self.value().rad_float()

    def validate(self) -> None:
        if self.d < 1 or not is_prime(self.p) or (self.p - 1) % self.d:
            raise CacheFormatError(f"invalid pair d={self.d}, p={self.p}")
        if self.value().rad < 0:
            raise CacheFormatError("negative radius")


def _atomic_write(path: Path, write: Callable) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            write(fh)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load(path) -> dict[tuple[int, int], CacheRecord]:
    """Read a cache file; a missing file yields an empty map and a warning."""
    path = Path(path)
    if not path.exists():
        log.warning("cache file %s not found; starting empty", path)
        return {}
    out: dict[tuple[int, int], CacheRecord] = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row:
                continue
            if lineno == 1 and tuple(row) == HEADER:
                continue
            try:
                if len(row) != len(HEADER):
                    raise ValueError(f"expected {len(HEADER)} fields, got {len(row)}")
                rec = CacheRecord(int(row[0]), int(row[1]), row[2], row[3], int(row[4]), row[5])
                rec.validate()
            except (ValueError, CacheFormatError) as exc:
                raise CacheFormatError(f"{path}:{lineno}: {exc}") from None
            key = (rec.d, rec.p)
            if key in out:
                raise CacheFormatError(f"{path}:{lineno}: duplicate pair d={rec.d}, p={rec.p}")
            out[key] = rec
    return out


def _better(a: CacheRecord, b: CacheRecord) -> CacheRecord:
    """The record with the smaller radius; the existing one on ties."""
    va, vb = a.value(), b.value()
    return b if vb.rad < va.rad else a


def merge_save(path, records: Iterable[CacheRecord]) -> int:
    """Merge records into the file at path atomically; returns records written."""
    path = Path(path)
    merged = load(path) if path.exists() else {}
    for rec in records:
        rec.validate()
        key = (rec.d, rec.p)
        merged[key] = _better(merged[key], rec) if key in merged else rec

    def write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for key in sorted(merged):
            r = merged[key]
            w.writerow((r.d, r.p, r.mid_hex, r.rad_hex, r.prec, r.method))

    _atomic_write(path, write)
    return len(merged)


class GdCache:
    """In-memory map (d, p) -> G_d(p), optionally backed by a cache file.

    Values are always passed through the hex serialization, so a warm run
    sees exactly the balls a cold run computed.
    """

    def __init__(self, path=None):
        self.path = Path(path) if path else None
        self._records = load(self.path) if self.path else {}
        self._dirty: dict[tuple[int, int], CacheRecord] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._records)

    def get(self, d: int, p: int, prec: int) -> CertReal | None:
        rec = self._records.get((d, p))
        if rec is None or rec.prec < prec:
            return None
        return rec.value()

    def put(self, d: int, p: int, value: CertReal, method: str = "coset") -> CertReal:
        rec = CacheRecord.from_value(d, p, value, method)
        with self._lock:
            old = self._records.get((d, p))
            if old is None or old.prec < rec.prec:
                self._records[(d, p)] = rec
                self._dirty[(d, p)] = rec
            else:
                rec = old
        return rec.value()

    def get_or_compute(self, d: int, p: int, prec: int,
                       compute: Callable[[], CertReal]) -> CertReal:
        hit = self.get(d, p, prec)
        if hit is not None:
            self.hits += 1
            return hit
        self.misses += 1
        return self.put(d, p, compute())

    def flush(self) -> int:
        if not self.path or not self._dirty:
            return 0
        with self._lock:
            pending, self._dirty = list(self._dirty.values()), {}
        return merge_save(self.path, pending)


def save_checkpoint(path, state: dict) -> None:
    """Write a JSON checkpoint atomically."""
    _atomic_write(Path(path), lambda fh: json.dump(state, fh, indent=1, sort_keys=True))


def load_checkpoint(path) -> dict | None:
    path = Path(path)
    if not path.exists():
        return None
    with path.open() as fh:
        return json.load(fh)
