"""Search for strings of consecutive primes lying in one residue class.

A *run* ``(m, k)`` is the block ``p_{m+1}, ..., p_{m+k}`` with every member
congruent to ``a`` modulo ``q``.  The scanner walks the primes once, in index
order, keeping only the state of the run currently open, so it works the same
over an in-memory table and over a stream of sieve segments.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator
from dataclasses import asdict, dataclass

import numpy as np

from .prime_engine import DEFAULT_MEMORY_LIMIT, PrimeTable, sieve, stream_segments

__all__ = [
    "CongruentRun",
    "SearchBudget",
    "NotFound",
    "find_first_run",
    "m_of_n",
    "enumerate_runs",
]

_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class CongruentRun:
    """``p_{m+1} ≡ ... ≡ p_{m+k} ≡ a (mod q)``."""

    m: int
    k: int
    q: int
    a: int
    first_prime: int
    last_prime: int
    synthetic: bool = False

    def to_json(self) -> dict:
        d = asdict(self)
        if not self.synthetic:
            del d["synthetic"]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "CongruentRun":
        return cls(**{k: (bool(v) if k == "synthetic" else int(v)) for k, v in d.items()})


@dataclass(frozen=True)
class SearchBudget:
    """Stop scanning past ``max_prime`` (and past index ``max_index`` if given)."""

    max_prime: int
    max_index: int | None = None

    def __post_init__(self):
        if self.max_prime < 2:
            raise ValueError(f"max_prime must be >= 2, got {self.max_prime}")


@dataclass(frozen=True)
class NotFound:
    """Search exhausted its budget.  ``frontier_index`` is the last prime index scanned."""

    k: int
    q: int
    a: int
    frontier_index: int
    frontier_prime: int

    def __bool__(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {"not_found": True, **asdict(self)}


def _check(k: int, q: int, a: int) -> None:
    if q < 2:
        raise ValueError(f"modulus must be >= 2, got q={q}")
    if k < 1:
        raise ValueError(f"run length must be >= 1, got k={k}")
    if not 1 <= a < q:
        raise ValueError(f"residue must satisfy 1 <= a < q, got a={a}, q={q}")
    if math.gcd(a, q) != 1:
        raise ValueError(f"gcd({a}, {q}) != 1: the class holds at most one prime")


def _chunks(
    budget: SearchBudget,
    primes: PrimeTable | None,
    start: int,
    threads: int | None,
) -> Iterator[tuple[int, np.ndarray]]:
    """``(index of first prime, primes)`` blocks in ascending order within budget."""
    stop_index = budget.max_index
    if primes is not None and primes.limit >= budget.max_prime:
        arr = primes.primes[: int(np.searchsorted(primes.primes, budget.max_prime, side="right"))]
        if stop_index is not None:
            arr = arr[:stop_index]
        first = max(start, 1)
        yield first, arr[first - 1 :]
        return
    for seg in stream_segments(budget.max_prime + 1, threads=threads):
        ps = seg.primes()
        idx = seg.start_index
        if stop_index is not None and idx > stop_index:
            return
        if stop_index is not None and idx + ps.size - 1 > stop_index:
            ps = ps[: stop_index - idx + 1]
        if idx + ps.size <= start:
            continue
        if idx < start:
            ps = ps[start - idx :]
            idx = start
        yield idx, ps


@dataclass
class _Open:
    start: int  # global index of the first member
    length: int
    head: list  # first few members (enough to name the k-th)
    last: int


def _scan(
    chunks: Iterable[tuple[int, np.ndarray]],
    q: int,
    a: int,
    k: int,
    frontier: list,
) -> Iterator[_Open]:
    """Maximal runs of length >= k, in order; ``frontier`` receives (index, prime) progress."""
    open_run: _Open | None = None
    for idx, ps in chunks:
        if ps.size == 0:
            continue
        frontier[:] = [idx + ps.size - 1, int(ps[-1])]
        if q >= _INT64_SAFE:
            # every prime in range is below q
            ok = ps == a if a < _INT64_SAFE else np.zeros(ps.size, dtype=bool)
        elif q & (q - 1) == 0:
            ok = (ps & (q - 1)) == a
        else:
            ok = (ps % q) == a
        d = np.diff(ok.astype(np.int8), prepend=0, append=0)
        starts = np.flatnonzero(d == 1)
        ends = np.flatnonzero(d == -1)
        n = ps.size
        if open_run is not None:
            if starts.size and starts[0] == 0:
                e = int(ends[0])
                open_run.head.extend(int(x) for x in ps[: max(0, min(e, k - len(open_run.head)))])
                open_run.length += e
                open_run.last = int(ps[e - 1])
                starts, ends = starts[1:], ends[1:]
                if e == n:
                    continue
            if open_run.length >= k:
                yield open_run
            open_run = None
        lengths = ends - starts
        for s, e, L in zip(starts.tolist(), ends.tolist(), lengths.tolist()):
            if e == n:
                open_run = _Open(idx + s, L, [int(x) for x in ps[s : s + min(L, k)]], int(ps[e - 1]))
                break
            if L >= k:
                yield _Open(idx + s, L, [int(x) for x in ps[s : s + k]], int(ps[e - 1]))
    if open_run is not None and open_run.length >= k:
        yield open_run


def enumerate_runs(
    k: int,
    q: int,
    a: int,
    budget: SearchBudget,
    primes: PrimeTable | None = None,
    *,
    start: int = 1,
    threads: int | None = None,
) -> Iterator[CongruentRun]:
    """All maximal runs of length ``>= k`` within budget, by increasing ``m``.

    Each reported run carries its full (maximal) length in ``k``.  A run still
    open when the budget is exhausted is reported truncated at the frontier.
    Only primes of index ``>= start`` take part.
    """
    _check(k, q, a)
    frontier: list = []
    for r in _scan(_chunks(budget, primes, start, threads), q, a, k, frontier):
        yield CongruentRun(m=r.start - 1, k=r.length, q=q, a=a, first_prime=r.head[0], last_prime=r.last)


def find_first_run(
    k: int,
    q: int,
    a: int,
    budget: SearchBudget,
    primes: PrimeTable | None = None,
    *,
    start: int = 1,
    threads: int | None = None,
) -> CongruentRun | NotFound:
    """The run ``p_{m+1..m+k} ≡ a (mod q)`` with the least ``m`` inside the budget.

    When ``primes`` covers the budget the in-memory table is scanned;
    otherwise segments are streamed (in-memory tables are capped at
    ``DEFAULT_MEMORY_LIMIT``).  ``start`` restricts the search to runs whose
    first member has index ``>= start``.
    """
    _check(k, q, a)
    if primes is None and budget.max_prime <= min(DEFAULT_MEMORY_LIMIT, 1 << 22):
        primes = sieve(budget.max_prime)
    frontier: list = [start - 1, 0]
    for r in _scan(_chunks(budget, primes, start, threads), q, a, k, frontier):
        return CongruentRun(
            m=r.start - 1, k=k, q=q, a=a, first_prime=r.head[0], last_prime=r.head[k - 1]
        )
    return NotFound(k=k, q=q, a=a, frontier_index=int(frontier[0]), frontier_prime=int(frontier[1]))


def m_of_n(
    n: int,
    budget: SearchBudget,
    primes: PrimeTable | None = None,
    *,
    threads: int | None = None,
) -> CongruentRun | NotFound:
    """First string of ``n`` consecutive primes all ``≡ 1 (mod 2**n)``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return find_first_run(n, 2**n, 1, budget, primes, threads=threads)
