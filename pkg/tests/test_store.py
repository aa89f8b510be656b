import logging
import os
import random

import pytest
from flint import fmpq

from stechkin.arith import primes_up_to
from stechkin.numeric import CertReal, cert_root_power
from stechkin.store import (HEADER, CacheFormatError, CacheRecord, GdCache, load, load_checkpoint,
                            merge_save, save_checkpoint)


def random_records(k, seed=0):
    rng = random.Random(seed)
    primes = [int(p) for p in primes_up_to(5000) if p > 3]
    seen, out = set(), []
    while len(out) < k:
        p = rng.choice(primes)
        d = rng.choice([d for d in range(1, 40) if (p - 1) % d == 0])
        if (d, p) in seen:
            continue
        seen.add((d, p))
        value = cert_root_power(p, rng.randint(1, 9), 10, rng.choice([64, 128, 256]))
        out.append(CacheRecord.from_value(d, p, value))
    return out


def test_round_trip_is_identity(tmp_path):
    path = tmp_path / "c.csv"
    recs = random_records(100)
    assert merge_save(path, recs) == 100
    loaded = load(path)
    assert loaded == {(r.d, r.p): r for r in recs}
    for r in recs:
        v, w = r.value(), loaded[(r.d, r.p)].value()
        assert v.mid == w.mid and v.rad == w.rad


def test_empty_and_missing(tmp_path, caplog):
    empty = tmp_path / "e.csv"
    empty.write_text("")
    assert load(empty) == {}
    with caplog.at_level(logging.WARNING):
        assert load(tmp_path / "nope.csv") == {}
    assert "not found" in caplog.text


def test_duplicate_is_line_addressed(tmp_path):
    path = tmp_path / "c.csv"
    merge_save(path, random_records(3))
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines + [lines[2]]) + "\n")
    with pytest.raises(CacheFormatError, match=r":5: duplicate"):
        load(path)


@pytest.mark.parametrize("bad", ["3,7,zz,0x0p+0,64,coset", "3,8,0x1p+0,0x0p+0,64,coset",
                                 "5,7,0x1p+0,0x0p+0,64,coset", "3,7,0x1p+0", "x,7,0x1p+0,0x0p+0,64,coset"])
def test_malformed_line_is_line_addressed(tmp_path, bad):
    path = tmp_path / "c.csv"
    path.write_text(",".join(HEADER) + "\n3,13,0x1p+0,0x0p+0,64,coset\n" + bad + "\n")
    with pytest.raises(CacheFormatError, match=r":3:"):
        load(path)


def test_merge_keeps_smaller_radius(tmp_path):
    path = tmp_path / "c.csv"
    coarse = CacheRecord.from_value(3, 7, CertReal.from_mid_rad(fmpq(47, 10), fmpq(1, 10 ** 6)))
    fine = CacheRecord.from_value(3, 7, CertReal.from_mid_rad(fmpq(47, 10), fmpq(1, 10 ** 12)))
    merge_save(path, [fine])
    merge_save(path, [coarse])
    assert load(path)[(3, 7)] == fine
    merge_save(path, [fine])
    path2 = tmp_path / "d.csv"
    merge_save(path2, [coarse])
    merge_save(path2, [fine])
    assert load(path2)[(3, 7)] == fine


def test_merge_is_idempotent(tmp_path):
    path = tmp_path / "c.csv"
    recs = random_records(30, seed=4)
    merge_save(path, recs)
    before = path.read_bytes()
    merge_save(path, recs)
    assert path.read_bytes() == before


def test_interrupted_write_keeps_old_file(tmp_path, monkeypatch):
    path = tmp_path / "c.csv"
    merge_save(path, random_records(5))
    before = path.read_bytes()

    def broken(*args, **kwargs):
        raise OSError("disk gone")

    monkeypatch.setattr(os, "replace", broken)
    with pytest.raises(OSError):
        merge_save(path, random_records(20, seed=9))
    assert path.read_bytes() == before
    assert [p.name for p in tmp_path.iterdir()] == ["c.csv"]


def test_invalid_record_rejected(tmp_path):
    with pytest.raises(CacheFormatError):
        merge_save(tmp_path / "c.csv", [CacheRecord(4, 7, "0x1p+0", "0x0p+0", 64)])


def test_gd_cache_precision_and_flush(tmp_path):
    path = tmp_path / "c.csv"
    cache = GdCache(path)
    calls = []

    def compute():
        calls.append(1)
        return cert_root_power(7, 1, 2, 128)

    v1 = cache.get_or_compute(3, 7, 128, compute)
    v2 = cache.get_or_compute(3, 7, 64, compute)
    assert len(calls) == 1 and v1.mid == v2.mid
    assert cache.get(3, 7, 256) is None
    assert cache.flush() == 1 and cache.flush() == 0
    again = GdCache(path)
    assert again.get(3, 7, 128).mid == v1.mid and len(again) == 1


def test_checkpoint_round_trip(tmp_path):
    path = tmp_path / "ck.json"
    assert load_checkpoint(path) is None
    state = {"primes_done": 12, "params": {"p_max": 100}}
    save_checkpoint(path, state)
    assert load_checkpoint(path) == state
