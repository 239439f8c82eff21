"""Prime generation with global indexing ``2 = p_1 < p_2 < ...``.

Small tables are sieved in one shot.  Anything larger is produced as a stream
of odd-only segments, each tagged with the index of its first prime so that a
consumer reading the segments in order always knows ``n`` for ``p_n``.
"""

from __future__ import annotations

import csv
import io
import math
import os
import struct
from collections.abc import Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DEFAULT_MEMORY_LIMIT",
    "PrimeTable",
    "PrimeWindow",
    "PrimeWindows",
    "Segment",
    "sieve",
    "nth_prime",
    "sieve_segment",
    "stream_segments",
    "window_at",
    "window_by_index",
    "write_binary",
    "read_binary",
    "write_csv",
]

DEFAULT_MEMORY_LIMIT = 10**8
DEFAULT_SEGMENT = 1 << 24

MAGIC = b"WDPR"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


def _odd_sieve(limit: int) -> np.ndarray:
    """All primes <= limit as int64."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    size = (limit + 1) // 2  # index i <-> 2i+1
    flags = np.ones(size, dtype=bool)
    flags[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if flags[i]:
            p = 2 * i + 1
            flags[p * p // 2 :: p] = False
    odd = 2 * np.flatnonzero(flags).astype(np.int64) + 1
    return np.concatenate((np.array([2], dtype=np.int64), odd))


@dataclass(frozen=True)
class PrimeTable:
    """Every prime up to ``limit``, addressable by global index (1-based)."""

    limit: int
    primes: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return int(self.primes.size)

    @property
    def first_index(self) -> int:
        return 1

    def nth_prime(self, n: int) -> int:
        if not 1 <= n <= self.count:
            raise IndexError(f"prime index {n} outside table range [1, {self.count}] (limit {self.limit})")
        return int(self.primes[n - 1])

    def prime_index(self, p: int) -> int:
        """Index ``n`` with ``p_n == p``; raises ``ValueError`` for non-primes."""
        i = int(np.searchsorted(self.primes, p))
        if i >= self.count or int(self.primes[i]) != p:
            raise ValueError(f"{p} is not a prime <= {self.limit}")
        return i + 1

    def run(self, start: int, count: int) -> np.ndarray:
        """``p_start, ..., p_{start+count-1}``."""
        if count <= 0:
            return self.primes[:0]
        if start < 1 or start + count - 1 > self.count:
            raise IndexError(
                f"table covers indices 1..{self.count}; index {max(start + count - 1, start)} required"
            )
        return self.primes[start - 1 : start - 1 + count]

    def covers(self, start: int, count: int) -> bool:
        return start >= 1 and start + count - 1 <= self.count

    def __contains__(self, p: int) -> bool:
        i = int(np.searchsorted(self.primes, p))
        return i < self.count and int(self.primes[i]) == p


@dataclass(frozen=True)
class PrimeWindow:
    """A contiguous block ``p_first_index, p_first_index+1, ...`` of indexed primes."""

    first_index: int
    primes: np.ndarray = field(repr=False)

    @property
    def last_index(self) -> int:
        return self.first_index + self.primes.size - 1

    def covers(self, start: int, count: int) -> bool:
        return start >= self.first_index and start + count - 1 <= self.last_index

    def nth_prime(self, n: int) -> int:
        if not self.first_index <= n <= self.last_index:
            raise IndexError(f"window covers indices {self.first_index}..{self.last_index}; index {n} required")
        return int(self.primes[n - self.first_index])

    def run(self, start: int, count: int) -> np.ndarray:
        if count <= 0:
            return self.primes[:0]
        if not self.covers(start, count):
            raise IndexError(
                f"window covers indices {self.first_index}..{self.last_index}; "
                f"indices {start}..{start + count - 1} required"
            )
        off = start - self.first_index
        return self.primes[off : off + count]


class PrimeWindows:
    """Several windows (or tables) answering index queries together."""

    def __init__(self, *sources):
        self.sources = [s for s in sources if s is not None]

    def covers(self, start: int, count: int) -> bool:
        return any(s.covers(start, count) for s in self.sources)

    def run(self, start: int, count: int) -> np.ndarray:
        for s in self.sources:
            if s.covers(start, count):
                return s.run(start, count)
        raise IndexError(f"no prime source covers indices {start}..{start + count - 1}")

    def nth_prime(self, n: int) -> int:
        return int(self.run(n, 1)[0])


def sieve(limit: int, memory_limit: int = DEFAULT_MEMORY_LIMIT) -> PrimeTable:
    """All primes up to ``limit`` in memory.

    Raises
    ------
    ValueError
        If ``limit < 2``.
    MemoryError
        If ``limit`` exceeds ``memory_limit``; use :func:`stream_segments`.
    """
    if limit < 2:
        raise ValueError(f"sieve limit must be >= 2, got {limit}")
    if limit > memory_limit:
        raise MemoryError(
            f"limit {limit} exceeds the in-memory budget {memory_limit}; use segmented streaming instead"
        )
    return PrimeTable(limit=limit, primes=_odd_sieve(limit))


def nth_prime(table: PrimeTable, n: int) -> int:
    return table.nth_prime(n)


@dataclass(frozen=True)
class Segment:
    """Primality of the integers in ``[lo, hi)``.

    ``odd_flags[i]`` says whether ``odd_start + 2*i`` is prime, where
    ``odd_start`` is the first odd integer ``>= lo``; the even prime 2 is
    tracked separately.  ``start_index`` is the global index of the first
    prime in the segment when known (``None`` for free-standing segments).
    """

    lo: int
    hi: int
    odd_flags: np.ndarray = field(repr=False)
    has_two: bool = False
    start_index: int | None = None

    @property
    def odd_start(self) -> int:
        return self.lo | 1

    def primes(self) -> np.ndarray:
        odd = self.odd_start + 2 * np.flatnonzero(self.odd_flags).astype(np.int64)
        if self.has_two:
            return np.concatenate((np.array([2], dtype=np.int64), odd))
        return odd

    @property
    def count(self) -> int:
        return int(self.has_two) + int(np.count_nonzero(self.odd_flags))

    def is_prime(self, n: int) -> bool:
        if not self.lo <= n < self.hi:
            raise ValueError(f"{n} outside segment [{self.lo}, {self.hi})")
        if n == 2:
            return self.has_two
        if n % 2 == 0:
            return False
        return bool(self.odd_flags[(n - self.odd_start) // 2])


def sieve_segment(lo: int, hi: int, base_primes: PrimeTable, start_index: int | None = None) -> Segment:
    """Exact primality on ``[lo, hi)`` using ``base_primes`` as sieving primes."""
    if lo < 2:
        raise ValueError(f"segment must start at >= 2, got lo={lo}")
    if hi < lo:
        raise ValueError(f"empty-or-reversed segment [{lo}, {hi})")
    if base_primes.limit**2 < hi:
        raise ValueError(
            f"base primes up to {base_primes.limit} cannot certify primality below {hi}; "
            f"need limit >= {math.isqrt(hi - 1) + 1}"
        )
    odd_start = lo | 1
    size = max(0, (hi - odd_start + 1) // 2)
    flags = np.ones(size, dtype=bool)
    if odd_start == 1 and size:
        flags[0] = False
    root = math.isqrt(hi - 1) if hi > 1 else 0
    for p in base_primes.primes[1:]:
        p = int(p)
        if p > root:
            break
        first = max(p * p, (odd_start + p - 1) // p * p)
        if first % 2 == 0:
            first += p
        if first < hi:
            flags[(first - odd_start) // 2 :: p] = False
    return Segment(lo=lo, hi=hi, odd_flags=flags, has_two=lo <= 2 < hi, start_index=start_index)


def _thread_count(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("WELLDIST_THREADS", "1") or 1)
    return max(1, threads)


def stream_segments(
    hi: int,
    lo: int = 2,
    *,
    start_index: int = 1,
    segment_size: int = DEFAULT_SEGMENT,
    threads: int | None = None,
) -> Iterator[Segment]:
    """Yield consecutive segments covering ``[lo, hi)`` in ascending order.

    ``start_index`` must be the global index of the first prime ``>= lo``
    (1 when ``lo <= 2``); it is carried forward so each segment knows the
    index of its first prime.  Segments may be sieved on several threads but
    are always yielded in order.
    """
    if hi <= lo:
        return
    base = PrimeTable(limit=math.isqrt(hi) + 1, primes=_odd_sieve(math.isqrt(hi) + 1))
    bounds = [(a, min(a + segment_size, hi)) for a in range(lo, hi, segment_size)]
    index = start_index
    workers = _thread_count(threads)
    if workers == 1:
        segs = (sieve_segment(a, b, base) for a, b in bounds)
        for seg in segs:
            seg = Segment(seg.lo, seg.hi, seg.odd_flags, seg.has_two, index)
            index += seg.count
            yield seg
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # bounded look-ahead keeps memory to a few segments
        pending = []
        it = iter(bounds)
        for a, b in it:
            pending.append(pool.submit(sieve_segment, a, b, base))
            if len(pending) >= 2 * workers:
                break
        while pending:
            seg = pending.pop(0).result()
            nxt = next(it, None)
            if nxt is not None:
                pending.append(pool.submit(sieve_segment, nxt[0], nxt[1], base))
            seg = Segment(seg.lo, seg.hi, seg.odd_flags, seg.has_two, index)
            index += seg.count
            yield seg


def window_at(first_index: int, first_prime: int, count: int, *, span: int | None = None) -> PrimeWindow:
    """Primes ``p_first_index ...`` given that ``p_first_index == first_prime``.

    Used to re-materialize the neighbourhood of a recorded run without
    re-sieving from 2.  The caller vouches for the anchor pair.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if span is None:
        span = max(4096, int(count * max(math.log(first_prime), 1.0) * 3) + 64)
    found: list[np.ndarray] = []
    have = 0
    lo = first_prime
    while have < count:
        hi = lo + span
        base = PrimeTable(limit=math.isqrt(hi) + 1, primes=_odd_sieve(math.isqrt(hi) + 1))
        ps = sieve_segment(lo, hi, base).primes()
        if lo == first_prime and (ps.size == 0 or int(ps[0]) != first_prime):
            raise ValueError(f"anchor {first_prime} is not prime")
        found.append(ps)
        have += ps.size
        lo = hi
    return PrimeWindow(first_index=first_index, primes=np.concatenate(found)[:count])


def nth_prime_upper(n: int) -> int:
    """Rosser-type bound: ``p_n < n (ln n + ln ln n)`` for ``n >= 6``."""
    if n < 6:
        return 13
    return int(n * (math.log(n) + math.log(math.log(n)))) + 1


def window_by_index(
    first_index: int,
    count: int,
    *,
    memory_limit: int = DEFAULT_MEMORY_LIMIT,
    threads: int | None = None,
) -> PrimeWindow:
    """``p_first_index .. p_{first_index+count-1}`` located from scratch.

    Sieves in memory when the bound on the last prime fits the budget and
    otherwise streams segments, counting indices from 2.
    """
    if first_index < 1 or count < 1:
        raise ValueError("need first_index >= 1 and count >= 1")
    last = first_index + count - 1
    bound = nth_prime_upper(last)
    if bound <= memory_limit:
        table = sieve(max(bound, 2), memory_limit)
        return PrimeWindow(first_index, table.run(first_index, count).copy())
    parts: list[np.ndarray] = []
    for seg in stream_segments(bound + 1, threads=threads):
        ps = seg.primes()
        lo, hi = seg.start_index, seg.start_index + ps.size - 1
        if hi < first_index:
            continue
        a = max(first_index, lo) - lo
        b = min(last, hi) - lo + 1
        parts.append(ps[a:b])
        if hi >= last:
            break
    return PrimeWindow(first_index, np.concatenate(parts))


# -- file formats -------------------------------------------------------------


def write_binary(table: PrimeTable, fh) -> None:
    """Header ``(magic, version, limit, count)`` then 64-bit little-endian primes."""
    fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, table.limit, table.count))
    fh.write(table.primes.astype("<u8").tobytes())


def read_binary(fh) -> PrimeTable:
    head = fh.read(_HEADER.size)
    if len(head) != _HEADER.size:
        raise ValueError("truncated prime file header")
    magic, version, limit, count = _HEADER.unpack(head)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported prime file version {version}")
    body = fh.read(8 * count)
    if len(body) != 8 * count:
        raise ValueError("truncated prime file body")
    primes = np.frombuffer(body, dtype="<u8").astype(np.int64)
    return PrimeTable(limit=limit, primes=primes)


def write_csv(table: PrimeTable, fh: io.TextIOBase) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "p"])
    for i, p in enumerate(table.primes.tolist(), start=1):
        w.writerow([i, p])


def primes_between(table: PrimeTable, lo: int, hi: int) -> list[int]:
    """Table primes in ``[lo, hi)``."""
    i, j = np.searchsorted(table.primes, [lo, hi])
    return [int(p) for p in table.primes[i:j]]
