import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import is_prime_td, trial_division_primes
from welldist.prime_engine import (
    PrimeWindows,
    nth_prime,
    primes_between,
    read_binary,
    sieve,
    sieve_segment,
    stream_segments,
    window_at,
    window_by_index,
    write_binary,
    write_csv,
)

ORACLE_PRIMES = trial_division_primes(20_000)


def test_small_tables():
    assert sieve(10).primes.tolist() == [2, 3, 5, 7]
    assert sieve(2).primes.tolist() == [2]
    assert sieve(2).count == 1
    with pytest.raises(ValueError):
        sieve(1)


def test_sieve_matches_trial_division():
    assert sieve(20_000).primes.tolist() == ORACLE_PRIMES


def test_pi_of_a_million(table_1e6):
    assert table_1e6.count == 78498


def test_memory_budget():
    with pytest.raises(MemoryError):
        sieve(10**9, memory_limit=10**6)


def test_nth_prime_and_index(table_1e6):
    assert nth_prime(table_1e6, 1) == 2
    assert nth_prime(table_1e6, 7) == 17
    with pytest.raises(IndexError):
        nth_prime(table_1e6, table_1e6.count + 1)
    with pytest.raises(IndexError):
        nth_prime(table_1e6, 0)
    assert table_1e6.prime_index(17) == 7
    assert 999983 in table_1e6 and 999981 not in table_1e6


def test_segments():
    base = sieve(100)
    assert sieve_segment(100, 120, base).primes().tolist() == [101, 103, 107, 109, 113]
    assert sieve_segment(14, 16, base).primes().tolist() == []
    assert sieve_segment(2, 3, base).primes().tolist() == [2]
    with pytest.raises(ValueError):
        sieve_segment(10**6, 10**6 + 10, sieve(10))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 19_000), st.integers(1, 1000))
def test_segment_matches_trial_division(lo, width):
    hi = min(lo + width, 20_000)
    seg = sieve_segment(lo, hi, sieve(200))
    assert seg.primes().tolist() == [p for p in ORACLE_PRIMES if lo <= p < hi]
    for n in range(lo, hi, max(1, (hi - lo) // 7)):
        assert seg.is_prime(n) == is_prime_td(n)


@pytest.mark.parametrize("threads", [1, 3])
def test_stream_is_ordered_and_indexed(threads):
    table = sieve(300_000)
    got, idx = [], 1
    for seg in stream_segments(300_000, segment_size=7_919, threads=threads):
        assert seg.start_index == idx
        ps = seg.primes().tolist()
        idx += len(ps)
        got += ps
    assert got == table.primes.tolist()


def test_windows_agree_with_table(table_1e6):
    w = window_at(5000, table_1e6.nth_prime(5000), 50)
    assert w.run(5000, 50).tolist() == table_1e6.run(5000, 50).tolist()
    w2 = window_by_index(70_000, 20)
    assert w2.run(70_000, 20).tolist() == table_1e6.run(70_000, 20).tolist()
    both = PrimeWindows(w, w2)
    assert both.nth_prime(70_005) == table_1e6.nth_prime(70_005)
    with pytest.raises(IndexError):
        both.run(1, 3)
    with pytest.raises(ValueError):
        window_at(10, 30, 4)


def test_binary_roundtrip(table_1e6):
    buf = io.BytesIO()
    write_binary(table_1e6, buf)
    buf.seek(0)
    back = read_binary(buf)
    assert back.limit == table_1e6.limit
    assert np.array_equal(back.primes, table_1e6.primes)
    with pytest.raises(ValueError):
        read_binary(io.BytesIO(b"XXXX" + buf.getvalue()[4:]))
    with pytest.raises(ValueError):
        read_binary(io.BytesIO(buf.getvalue()[:-8]))


def test_csv_output():
    buf = io.StringIO()
    write_csv(sieve(12), buf)
    assert buf.getvalue().splitlines() == ["n,p", "1,2", "2,3", "3,5", "4,7", "5,11"]


def test_primes_between(table_1e6):
    assert primes_between(table_1e6, 90, 110) == [97, 101, 103, 107, 109]
