import math

import pytest

from welldist.construction import ConstructionParams, build, relaxed_default
from welldist.prime_engine import sieve
from welldist.report import prime_source
from welldist.run_finder import CongruentRun, SearchBudget, find_first_run

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# -- independent oracles --------------------------------------------------------


def trial_division_primes(limit: int) -> list[int]:
    out = []
    for n in range(2, limit + 1):
        if all(n % p for p in out if p * p <= n):
            out.append(n)
    return out


def eratosthenes(limit: int) -> list[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = bytes(len(range(i * i, limit + 1, i)))
    return [i for i, f in enumerate(flags) if f]


def brute_star_discrepancy(xs) -> float:
    """sup_t |#{x < t}/N - t| over t in [0, 1], by checking every point from both sides."""
    N = len(xs)
    best = 0.0
    for t in list(xs) + [1.0]:
        below = sum(1 for x in xs if x < t)
        upto = sum(1 for x in xs if x <= t)
        best = max(best, abs(below / N - t), abs(upto / N - t))
    return best


def is_prime_td(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def naive_first_run(primes: list[int], k: int, q: int, a: int):
    """(m, first, last) of the first k consecutive primes that are all a mod q."""
    for i in range(len(primes) - k + 1):
        if all(p % q == a for p in primes[i : i + k]):
            return i, primes[i], primes[i + k - 1]
    return None


# -- shared builds --------------------------------------------------------------


@pytest.fixture(scope="session")
def table_1e6():
    return sieve(10**6)


@pytest.fixture(scope="session")
def faithful_state():
    return build(ConstructionParams(mode="faithful", stages=1, budget=SearchBudget(10**6)))


@pytest.fixture(scope="session")
def relaxed_state():
    return build(relaxed_default())


@pytest.fixture(scope="session")
def relaxed_primes(relaxed_state):
    return prime_source(relaxed_state)


@pytest.fixture(scope="session")
def deep_fixture():
    """Faithful growth with the searches for stages 1 and 2 replaced by made-up strings.

    Stage 0 is the real string {3}.  The injected strings only fix pi_1 and
    pi_2; nothing here claims they exist.
    """
    budget = SearchBudget(10**3)
    pi1 = 12289  # a prime > 2**12, so n_2 = 4 * 12289 = 49156
    pi2 = 2**49156 + 1  # any value > 2**49156 will do for the exponent chain
    runs = [
        find_first_run(1, 2, 1, budget),
        CongruentRun(m=0, k=12, q=2**12, a=1, first_prime=pi1, last_prime=pi1, synthetic=True),
        CongruentRun(m=0, k=49156, q=2**49156, a=1, first_prime=pi2, last_prime=pi2, synthetic=True),
    ]
    return build(ConstructionParams(mode="faithful", stages=2, budget=budget), runs=runs)
