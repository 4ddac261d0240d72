import numpy as np
import pytest

from dirlaw.arith import build_spf_sieve
from dirlaw.caches import (cache_dir, get_irreducibles, get_spf_sieve,
                           load_irreducibles, load_spf, save_irreducibles,
                           save_spf)
from dirlaw.errors import IntegrityError
from dirlaw.polyfield import build_irreducibles


def test_spf_round_trip(tmp_path):
    sieve = build_spf_sieve(5000)
    path = tmp_path / "spf_5000.bin"
    save_spf(sieve, path)
    assert path.stat().st_size == 12 + 4 * 5000
    back = load_spf(path)
    assert back.limit == 5000
    assert np.array_equal(back.spf, sieve.spf)


def test_spf_truncation_detected(tmp_path):
    sieve = build_spf_sieve(100)
    path = tmp_path / "spf_100.bin"
    save_spf(sieve, path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-4])
    with pytest.raises(IntegrityError):
        load_spf(path)
    path.write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(IntegrityError):
        load_spf(path)


def test_irreducible_round_trip(tmp_path):
    table = build_irreducibles(3, 6)
    path = tmp_path / "irr_q3_d6.bin"
    save_irreducibles(table, path)
    back = load_irreducibles(path)
    assert back.q == 3 and back.max_deg == 6
    assert back.by_degree == table.by_degree


def test_irreducible_corruption_detected(tmp_path):
    table = build_irreducibles(2, 5)
    path = tmp_path / "irr_q2_d5.bin"
    save_irreducibles(table, path)
    raw = bytearray(path.read_bytes())
    raw[20] ^= 0xFF
    path.write_bytes(bytes(raw))
    with pytest.raises(IntegrityError):
        load_irreducibles(path)
    save_irreducibles(table, path)
    path.write_bytes(path.read_bytes() + b"\x00")
    with pytest.raises(IntegrityError):
        load_irreducibles(path)


def test_get_functions_use_cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("DIRLAW_CACHE", str(tmp_path / "cache"))
    assert cache_dir() == tmp_path / "cache"
    sieve = get_spf_sieve(777)
    assert (tmp_path / "cache" / "spf_777.bin").exists()
    again = get_spf_sieve(777)  # second call loads the file
    assert np.array_equal(again.spf, sieve.spf)
    table = get_irreducibles(2, 4)
    assert (tmp_path / "cache" / "irr_q2_d4.bin").exists()
    assert get_irreducibles(2, 4).by_degree == table.by_degree


def test_no_env_builds_in_memory(tmp_path, monkeypatch):
    monkeypatch.delenv("DIRLAW_CACHE", raising=False)
    assert cache_dir() is None
    sieve = get_spf_sieve(100)
    assert sieve.limit == 100
    table = get_irreducibles(2, 3)
    assert table.max_deg == 3
