import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_star_discrepancy
from welldist.distribution import PointSet, interval_count, star_discrepancy, window_profile
from welldist.prime_engine import sieve
from welldist.radix import RadixRational

unit_floats = st.floats(0.0, 1.0, exclude_max=True, allow_nan=False)


def test_interval_counts():
    ps = PointSet([0.1, 0.5, 0.9])
    assert interval_count(ps, 0.0, 1.0) == 3
    assert interval_count(ps, 0.4, 0.6) == 1
    assert interval_count(PointSet([]), 0.2, 0.3) == 0
    with pytest.raises(ValueError):
        interval_count(ps, 0.6, 0.4)


def test_closed_interval_endpoints():
    ps = PointSet([0.25, 0.5])
    assert interval_count(ps, 0.25, 0.5) == 2


def test_known_discrepancies():
    assert star_discrepancy(PointSet([0.5])).d_star == 0.5
    centered = [(2 * i - 1) / 8 for i in range(1, 5)]
    assert star_discrepancy(PointSet(centered)).d_star == pytest.approx(1 / 8)
    assert star_discrepancy(PointSet([0.99] * 7)).d_star >= 0.99
    with pytest.raises(ValueError):
        star_discrepancy(PointSet([]))
    with pytest.raises(ValueError):
        PointSet([1.0])


@settings(max_examples=200, deadline=None)
@given(st.lists(unit_floats, min_size=1, max_size=60))
def test_matches_brute_force(xs):
    got = star_discrepancy(PointSet(xs)).d_star
    want = brute_star_discrepancy(xs)
    assert abs(got - want) <= 2 * math.ulp(max(got, want))


@given(st.lists(unit_floats, min_size=1, max_size=60), st.randoms())
def test_permutation_invariant(xs, rnd):
    ys = list(xs)
    rnd.shuffle(ys)
    assert star_discrepancy(PointSet(xs)).d_star == star_discrepancy(PointSet(ys)).d_star


@given(st.lists(unit_floats, min_size=1, max_size=60))
def test_bounds(xs):
    d = star_discrepancy(PointSet(xs)).d_star
    assert 1 / (2 * len(xs)) - 1e-15 <= d <= 1.0


def test_window_profile_single_points():
    table = sieve(1000)
    alpha = RadixRational(5, 4)
    for r in window_profile(alpha, 1, table, [(m, 1) for m in range(10)]):
        x = (5 * int(table.nth_prime(r.m + 1)) % 16) / 16
        assert r.d_star == max(x, 1 - x)
        assert (r.first_index, r.last_index) == (r.m + 1, r.m + 1)
