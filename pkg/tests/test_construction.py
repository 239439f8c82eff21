import json
from dataclasses import replace
from fractions import Fraction

import pytest

from welldist.construction import (
    ConstructionParams,
    TailBoundUnavailable,
    build,
    initial_state,
    liouville_records,
    relaxed_default,
    state_from_json,
    state_to_json,
    step,
    tail_bound_of,
)
from welldist.radix import RadixRational
from welldist.run_finder import CongruentRun, SearchBudget


def test_faithful_stage_zero(faithful_state):
    s0 = faithful_state.stage(0)
    assert (s0.n, s0.m, s0.pi, s0.run.first_prime) == (1, 1, 3, 3)
    assert faithful_state.alpha == RadixRational(1, 1)
    assert faithful_state.next_exponent == 12


def test_faithful_stage_one_is_out_of_reach(faithful_state):
    assert faithful_state.depth == 1
    assert not faithful_state.complete
    f = faithful_state.frontier
    assert (f.k, f.q) == (12, 4096)
    assert f.frontier_prime == 999983


def test_faithful_only_stage_zero():
    st = build(ConstructionParams(mode="faithful", stages=0, budget=SearchBudget(100)))
    assert st.complete and st.alpha == RadixRational(1, 1)
    assert tail_bound_of(st) == RadixRational(1, 11)


def test_faithful_rejects_custom_rules():
    with pytest.raises(ValueError):
        ConstructionParams(mode="faithful", modulus_exponent=4)
    with pytest.raises(ValueError):
        ConstructionParams(mode="relaxed", base=3)


def generalized_base3():
    params = ConstructionParams(
        mode="generalized", stages=1, base=3, digits=(1, 2), b_max=2,
        exponents=(1, 5), modulus_exponent=1, run_length=1, growth=None,
        budget=SearchBudget(1000),
    )
    runs = [CongruentRun(1, 1, 3, 1, 7, 7, synthetic=True), CongruentRun(5, 1, 3, 1, 13, 13, synthetic=True)]
    return params, runs


def test_generalized_base3_alpha():
    params, runs = generalized_base3()
    st = build(params, runs=runs)
    assert st.alpha.to_fraction() == Fraction(1, 3) + Fraction(2, 243)
    assert st.synthetic


def test_tail_bound_base3():
    params = ConstructionParams(
        mode="generalized", stages=0, base=3, digits=(1,), b_max=2, exponents=(1, 5), growth=None,
        modulus_exponent=1, run_length=1,
    )
    st = step(initial_state(params), run=CongruentRun(1, 1, 3, 1, 7, 7, synthetic=True))
    assert st.next_exponent == 5
    assert tail_bound_of(st) == RadixRational(1, 4, 3)


def test_tail_bound_needs_growth_rule():
    params = ConstructionParams(mode="generalized", stages=1, growth=None, modulus_exponent=1, run_length=1)
    st = step(initial_state(params), run=CongruentRun(1, 1, 2, 1, 3, 3, synthetic=True))
    assert st.next_exponent is None and st.tail_bound is None
    with pytest.raises(TailBoundUnavailable):
        tail_bound_of(st)
    with pytest.raises(TailBoundUnavailable):
        step(st, run=CongruentRun(2, 1, 2, 1, 5, 5, synthetic=True))


def test_tail_bound_monotone():
    params = ConstructionParams(mode="generalized", stages=3, growth="capped", modulus_exponent=1, run_length=1)
    st = step(initial_state(params), run=CongruentRun(1, 1, 2, 1, 3, 3, synthetic=True))
    bounds = [tail_bound_of(replace(st, next_exponent=n)) for n in range(2, 40)]
    assert all(b > c for b, c in zip(bounds, bounds[1:]))


def test_exponents_must_increase():
    params = ConstructionParams(mode="generalized", stages=1, exponents=(3, 2), modulus_exponent=1, run_length=1)
    with pytest.raises(ValueError):
        build(params, runs=[CongruentRun(1, 1, 2, 1, 3, 3, synthetic=True)] * 2)


def test_relaxed_certified_exponent():
    p = relaxed_default()
    n = p.certified_exponent()
    c = p.tail_constant()
    assert c == 2
    assert 2**n > c * p.h_max * p.budget.max_prime**3 >= 2 ** (n - 1)


def test_relaxed_build(relaxed_state):
    st = relaxed_state
    assert st.complete and not st.synthetic
    assert st.exponents == [5, 65536, 65537]
    assert [s.m for s in st.stages] == [13346104, 23214203, 31903452]
    assert [s.pi for s in st.stages] == [243564353, 437286593, 611700769]
    for s in st.stages:
        assert s.length == 4 and s.modulus == 32
        assert s.run.first_prime % 32 == 1 and s.pi % 32 == 1
    ms = [s.m for s in st.stages]
    assert ms == sorted(ms)


def test_liouville_faithful_stage_zero(faithful_state):
    rec = liouville_records(faithful_state)[0]
    assert (rec.q, rec.a) == (RadixRational(2), 1)
    assert rec.threshold == RadixRational(1)
    assert rec.gap_bound == RadixRational(1, 10) and rec.holds


def test_liouville_deep_fixture(deep_fixture):
    assert deep_fixture.synthetic and deep_fixture.exponents == [1, 12, 49156]
    recs = liouville_records(deep_fixture)
    assert [r.holds for r in recs] == [True, True, True]
    assert all(r.coprime and r.a % 2 == 1 for r in recs)


def test_json_roundtrip(relaxed_state, deep_fixture, faithful_state):
    for st in (relaxed_state, deep_fixture, faithful_state):
        text = json.dumps(state_to_json(st))
        assert state_from_json(json.loads(text)) == st


def test_json_rejects_tampering(faithful_state):
    d = state_to_json(faithful_state)
    d["alpha"] = "2:2:1"
    with pytest.raises(ValueError):
        state_from_json(d)
    with pytest.raises(ValueError):
        state_from_json({"format": "other"})


def test_small_relaxed_example():
    params = relaxed_default(1, max_prime=10**4, modulus_exponent=2, run_length=2)
    st = build(params)
    s0 = st.stage(0)
    assert (s0.run.first_prime, s0.pi, s0.m) == (13, 17, 5)
    assert st.stage(1).m > s0.m + s0.length


def test_refinement_and_resummation(relaxed_state):
    st = relaxed_state
    terms = [RadixRational(s.digit, s.n) for s in st.stages]
    backwards = RadixRational(0)
    for t in reversed(terms):
        backwards = backwards + t
    assert backwards == st.alpha
    for K in range(st.depth - 1):
        step_size = st.head(K + 1) - st.head(K)
        bound = RadixRational(st.params.tail_constant(), st.stage(K + 1).n)
        assert RadixRational(0) < step_size < bound
