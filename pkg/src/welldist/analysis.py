"""Weyl sums with certified error bounds, and checks of the proof's inequalities.

Phases ``{h * alpha * p}`` are computed exactly and rounded to a double
once; only then is the exponential evaluated.  No phase error accumulates
across terms, so the error bound of a normalized sum is a small constant
multiple of machine epsilon plus whatever the truncation of alpha costs.

Every inequality check returns ``"pass"``, ``"fail"`` or ``"indeterminate"``.
A strict inequality ``A < B`` passes only when an upper bound for ``A`` is
below a lower bound for ``B``; touching bounds are never a pass.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .construction import ConstructionState, liouville_records
from .radix import RadixRational, dist_to_nearest_int, encode, frac, mul_int, to_float

__all__ = [
    "WeylQuery",
    "WeylResult",
    "Check",
    "weyl_sum",
    "sup_over_shifts",
    "verify_lemma22",
    "verify_pointwise",
    "verify_sandwich",
    "verify_liouville",
    "criterion_profile",
    "summarize",
]

EPS = 2.0**-52
# Per-term, per-component error after the phase is rounded: the product
# fl(2*pi) * phase (< 4 eps) and the libm cos/sin call (allowed 4 ulp).
TERM_ROUNDING = 8 * EPS
TWO_PI = 2 * math.pi
# 355/113 > pi, used wherever an upper bound on pi is needed exactly.
PI_UPPER = Fraction(355, 113)

PASS, FAIL, INDETERMINATE = "pass", "fail", "indeterminate"


@dataclass(frozen=True)
class WeylQuery:
    """``N**-1 * sum_{n=1..N} e(h * alpha * p_{n+m})``.

    ``alpha_tail`` bounds ``true_alpha - alpha`` (zero for exact rationals).
    """

    h: int
    N: int
    m: int
    alpha: RadixRational
    alpha_tail: RadixRational | None = None

    def __post_init__(self):
        if self.h < 1 or self.N < 1 or self.m < 0:
            raise ValueError(f"need h >= 1, N >= 1, m >= 0; got h={self.h}, N={self.N}, m={self.m}")


@dataclass(frozen=True)
class WeylResult:
    sum_re: float
    sum_im: float
    magnitude: float
    total_error_bound: float
    truncation_error: float = 0.0
    rounding_error: float = 0.0

    def to_json(self) -> dict:
        return {
            "re": self.sum_re,
            "im": self.sum_im,
            "magnitude": self.magnitude,
            "total_error_bound": self.total_error_bound,
        }


def _round_up(x: Fraction) -> float:
    f = float(x)
    return f if Fraction(f) >= x else math.nextafter(f, math.inf)


def _truncation_bound(h: int, p_max: int, tail: RadixRational | None) -> float:
    """``2*pi*h*p_max*tail`` rounded upward; the shift of any single phase."""
    if tail is None or tail.numerator == 0:
        return 0.0
    shift = mul_int(tail, h * p_max)
    if shift.log2_upper() < -1000:
        return math.ulp(0.0)
    return _round_up(shift.to_fraction() * PI_UPPER * 2)


def phases(alpha: RadixRational, h: int, primes: Iterable[int]) -> tuple[list[float], float]:
    """Rounded ``{h * alpha * p}`` for each ``p`` and the largest rounding error."""
    out, worst = [], 0.0
    for p in primes:
        f = to_float(frac(mul_int(alpha, h * int(p))))
        v = f.value
        if v >= 1.0:  # rounding up to 1 wraps to 0 on the circle
            v = 0.0
        out.append(v)
        worst = max(worst, f.abs_error_bound)
    return out, worst


def weyl_sum(query: WeylQuery, primes) -> WeylResult:
    """Evaluate the normalized exponential sum of ``query``.

    ``primes`` is anything with ``run(start, count)`` returning the primes
    ``p_start .. p_{start+count-1}`` (a table or a window).

    The error bound has two parts.  Truncation: every phase may be off by
    ``h * p * alpha_tail``, and ``|e(x) - e(y)| <= 2*pi*|x - y|``.  Rounding:
    each component of each term carries ``2*pi*(phase error) + TERM_ROUNDING``,
    ``math.fsum`` and the division by ``N`` add one half-ulp each, and the
    modulus adds one more rounding.
    """
    ps = primes.run(query.m + 1, query.N)
    ph, worst = phases(query.alpha, query.h, ps.tolist())
    re = math.fsum(math.cos(TWO_PI * t) for t in ph) / query.N
    im = math.fsum(math.sin(TWO_PI * t) for t in ph) / query.N
    mag = math.hypot(re, im)
    component = TWO_PI * worst * 1.0000001 + TERM_ROUNDING + EPS
    rounding = math.sqrt(2.0) * component * 1.0000001 + EPS
    trunc = _truncation_bound(query.h, int(ps.max()), query.alpha_tail)
    return WeylResult(re, im, mag, rounding + trunc, trunc, rounding)


def sup_over_shifts(
    h: int,
    N: int,
    shift_set: Iterable[int],
    alpha: RadixRational,
    primes,
    alpha_tail: RadixRational | None = None,
) -> tuple[int, WeylResult]:
    """Largest magnitude over a finite set of shifts.

    The supremum over all shifts is not computable; the value returned is a
    lower bound for it.  Ties go to the smallest shift.
    """
    shifts = sorted(set(shift_set))
    if not shifts:
        raise ValueError("shift_set must be nonempty")
    best = None
    for m in shifts:
        r = weyl_sum(WeylQuery(h, N, m, alpha, alpha_tail), primes)
        if best is None or r.magnitude > best[1].magnitude:
            best = (m, r)
    return best


@dataclass(frozen=True)
class Check:
    i: int
    value: float
    bound: float
    status: str
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"i": self.i, "value": self.value, "bound": self.bound, "status": self.status, **self.detail}


def summarize(checks: Sequence[Check]) -> dict:
    counts = {PASS: 0, FAIL: 0, INDETERMINATE: 0}
    for c in checks:
        counts[c.status] += 1
    return {**counts, "total": len(checks), "all_pass": counts[PASS] == len(checks) and len(checks) > 0}


def _run_primes(state: ConstructionState, k: int, primes) -> list[int]:
    stage = state.stage(k)
    ps = [int(p) for p in primes.run(stage.m + 1, stage.length).tolist()]
    if ps[0] != stage.run.first_prime or ps[-1] != stage.run.last_prime:
        raise ValueError(f"prime source disagrees with the stage-{k} string")
    return ps


def _tail(state: ConstructionState) -> RadixRational:
    if state.tail_bound is not None:
        return state.tail_bound
    return RadixRational(0, 0, state.params.base)


def _distance_bounds(state: ConstructionState, h: int, p: int) -> tuple[RadixRational, RadixRational, RadixRational]:
    """(exact distance on the truncation, lower bound, upper bound) for ``||h alpha (p-1)||``."""
    exact = dist_to_nearest_int(mul_int(state.alpha, h * (p - 1)))
    slack = mul_int(_tail(state), h * (p - 1))
    upper = exact + slack
    lower = exact - slack
    if lower.sign() < 0:
        lower = RadixRational(0, 0, exact.base)
    return exact, lower, upper


def _small_float(x: RadixRational) -> float:
    return to_float(x).value if x.log2_upper() > -1070 else 0.0


def verify_lemma22(state: ConstructionState, h: int, k: int, primes) -> dict:
    """Check ``||h alpha (p_{i+m_k} - 1)|| < pi_k**-2`` for every member of string ``k``.

    The distance is exact on the truncated alpha and widened by
    ``h (p - 1) * tail_bound`` for the omitted digits.
    """
    if h < 1:
        raise ValueError("h must be >= 1")
    pi = state.stage(k).pi
    checks = []
    for i, p in enumerate(_run_primes(state, k, primes), start=1):
        exact, lower, upper = _distance_bounds(state, h, p)
        # upper < 1/pi^2  <=>  upper * pi^2 < 1
        if mul_int(upper, pi * pi) < 1:
            status = PASS
        elif mul_int(lower, pi * pi) >= 1:
            status = FAIL
        else:
            status = INDETERMINATE
        checks.append(
            Check(i, _small_float(exact), 1.0 / (pi * pi), status,
                  {"p": p, "upper": encode(upper) if upper.exponent < 4096 else None,
                   "log2_upper": upper.log2_upper()})
        )
    return {"check": "lemma22", "h": h, "k": k, "pi": pi, "checks": checks, "summary": summarize(checks)}


def verify_pointwise(state: ConstructionState, h: int, k: int, primes) -> dict:
    """Check ``|e(h alpha p) - e(h alpha)| = |e(h alpha (p-1)) - 1| < 1/pi_k``.

    Uses ``4||t|| <= |e(t) - 1| = 2 sin(pi ||t||) <= 2 pi ||t||`` with the
    exact distance bounds, and 355/113 in place of pi.
    """
    pi = state.stage(k).pi
    checks = []
    for i, p in enumerate(_run_primes(state, k, primes), start=1):
        exact, lower, upper = _distance_bounds(state, h, p)
        # 2*(355/113)*upper < 1/pi  <=>  upper * 710 * pi < 113
        if mul_int(upper, 710 * pi) < 113:
            status = PASS
        elif mul_int(lower, 4 * pi) >= 1:
            status = FAIL
        else:
            status = INDETERMINATE
        value = 2.0 * math.sin(math.pi * _small_float(exact))
        checks.append(Check(i, value, 1.0 / pi, status, {"p": p, "log2_distance_upper": upper.log2_upper()}))
    return {"check": "pointwise", "h": h, "k": k, "pi": pi, "checks": checks, "summary": summarize(checks)}


def verify_sandwich(state: ConstructionState, h: int, k: int, N: int, primes) -> dict:
    """Check ``1 - 1/pi_k < |N**-1 sum_{n<=N} e(h alpha p_{n+m_k})| <= 1``.

    The lower inequality is strict and must survive widening by the sum's
    total error bound.  The upper one is a theorem; it is checked for
    consistency (``magnitude - error <= 1``).
    """
    stage = state.stage(k)
    if not 1 <= N <= stage.length:
        raise ValueError(f"N must satisfy 1 <= N <= {stage.length}, got {N}")
    res = weyl_sum(WeylQuery(h, N, stage.m, state.alpha, state.tail_bound), primes)
    lo_bound = 1 - Fraction(1, stage.pi)
    mag, err = Fraction(res.magnitude), Fraction(res.total_error_bound)
    if mag - err > lo_bound:
        lower_status = PASS
    elif mag + err <= lo_bound:
        lower_status = FAIL
    else:
        lower_status = INDETERMINATE
    upper_status = PASS if mag - err <= 1 else FAIL
    status = lower_status if upper_status == PASS else FAIL
    check = Check(
        N, res.magnitude, float(lo_bound), status,
        {"error": res.total_error_bound, "lower": lower_status, "upper": upper_status},
    )
    return {"check": "sandwich", "h": h, "k": k, "N": N, "pi": stage.pi, "weyl": res.to_json(),
            "checks": [check], "summary": summarize([check])}


def _log2_float(n: int) -> float:
    # exponents of deep fixtures can exceed the float range
    if n.bit_length() < 1000:
        return float(n)
    return -math.inf if n < 0 else math.inf


def verify_liouville(state: ConstructionState) -> dict:
    """Report ``|q_k alpha - a_k| <= gap_bound`` against ``q_k**-k`` for each stage."""
    checks = []
    for rec in liouville_records(state):
        if rec.holds is None:
            status = INDETERMINATE
        else:
            status = PASS if rec.holds and rec.coprime else FAIL
        checks.append(
            Check(rec.k, _log2_float(rec.gap_bound.log2_upper()) if rec.gap_bound is not None else math.nan,
                  _log2_float(-rec.threshold.exponent), status,
                  {"coprime": rec.coprime, "a_odd": bool(rec.a & 1), "units": "log2"})
        )
    return {"check": "liouville", "checks": checks, "summary": summarize(checks)}


def criterion_profile(
    h: int,
    alpha: RadixRational,
    primes,
    N_list: Sequence[int],
    shift_sets: Iterable[int] | Mapping[int, Iterable[int]],
    alpha_tail: RadixRational | None = None,
) -> list[dict]:
    """For each ``N``: the best magnitude over the shifts next to the magnitude at shift 0.

    ``shift_sets`` is one iterable used for every ``N``, or a mapping from
    ``N`` to its own shifts.  The shifted column is a lower bound for the sup.
    """
    rows = []
    for N in N_list:
        shifts = shift_sets[N] if isinstance(shift_sets, Mapping) else shift_sets
        shifts = list(shifts)
        best_m, best = sup_over_shifts(h, N, shifts, alpha, primes, alpha_tail)
        zero = weyl_sum(WeylQuery(h, N, 0, alpha, alpha_tail), primes)
        rows.append({
            "N": N,
            "h": h,
            "best_shift": best_m,
            "sup_lower_bound": best.magnitude,
            "sup_error": best.total_error_bound,
            "shift0_magnitude": zero.magnitude,
            "shift0_error": zero.total_error_bound,
            "one_minus_inv_N": 1 - 1 / N,
        })
    return rows
