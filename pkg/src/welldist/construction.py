"""Stage-by-stage construction of alpha = sum_k b_k * base**(-n_k).

Stage ``k`` looks for a string of consecutive primes in the class
``1 (mod base**j_k)``, records the last prime ``pi_k`` of the string, and
chooses the next digit position ``n_{k+1}`` from ``pi_k``.

Three modes are supported:

``faithful``
    base 2, every digit 1, ``j_k = r_k = n_k``, ``n_0 = 1`` and
    ``n_{k+1} = 4 * pi_k``.  Only stage 0 is reachable by search.
``relaxed``
    base 2 with the modulus exponent, run length and digit positions
    decoupled; see :func:`relaxed_default` for the preset used in practice.
``generalized``
    any base and digits ``b_k <= b_max``.

States are immutable; :func:`step` returns a new state.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field, replace

from .prime_engine import PrimeTable
from .radix import RadixRational, decode, encode, to_float
from .run_finder import CongruentRun, NotFound, SearchBudget, find_first_run

__all__ = [
    "ConstructionParams",
    "Stage",
    "ConstructionState",
    "LiouvilleRecord",
    "TailBoundUnavailable",
    "relaxed_default",
    "initial_state",
    "step",
    "build",
    "tail_bound_of",
    "liouville_records",
    "state_to_json",
    "state_from_json",
]

MODES = ("faithful", "relaxed", "generalized")
GROWTH_RULES = ("four_pi", "capped", None)


class TailBoundUnavailable(ValueError):
    """The next digit position is not determined, so the tail cannot be bounded."""


def _at(value, k: int):
    if value is None or isinstance(value, int):
        return value
    return value[min(k, len(value) - 1)]


@dataclass(frozen=True)
class ConstructionParams:
    """Rules for building alpha.

    ``modulus_exponent`` and ``run_length`` may be ints or per-stage tuples
    (the last entry repeats); ``None`` ties them to the digit position as in
    the faithful rules.  ``exponents`` pins digit positions explicitly and
    overrides the growth rule where given.
    """

    mode: str = "faithful"
    stages: int = 0
    budget: SearchBudget = field(default_factory=lambda: SearchBudget(10**8))
    base: int = 2
    first_exponent: int = 1
    modulus_exponent: int | tuple[int, ...] | None = None
    run_length: int | tuple[int, ...] | None = None
    digits: tuple[int, ...] = ()
    b_max: int = 1
    growth: str | None = "four_pi"
    exponent_ceiling: int = 65536
    h_max: int = 16
    exponents: tuple[int, ...] = ()

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.growth not in GROWTH_RULES:
            raise ValueError(f"unknown growth rule {self.growth!r}")
        if self.base < 2 or self.stages < 0 or self.first_exponent < 1:
            raise ValueError("need base >= 2, stages >= 0, first_exponent >= 1")
        if any(not 1 <= b <= self.b_max for b in self.digits):
            raise ValueError(f"digits must lie in [1, b_max={self.b_max}]")
        if self.mode == "faithful":
            if (
                self.base != 2
                or self.first_exponent != 1
                or self.b_max != 1
                or self.modulus_exponent is not None
                or self.run_length is not None
                or self.growth != "four_pi"
                or self.exponents
            ):
                raise ValueError("faithful mode fixes base 2, n_0 = 1, unit digits and n_{k+1} = 4 pi_k")
        elif self.mode == "relaxed" and self.base != 2:
            raise ValueError("relaxed mode is dyadic; use generalized mode for other bases")

    def digit(self, k: int) -> int:
        return self.digits[k] if k < len(self.digits) else 1

    def tail_constant(self) -> int:
        """``ceil(b_max * base / (base - 1))``, the geometric tail multiplier."""
        return -(-self.b_max * self.base // (self.base - 1))

    def certified_exponent(self) -> int:
        """Least ``n`` with ``base**n > c * h_max * B**3`` (``B`` the prime budget).

        A digit at position ``>= n`` moves ``h * alpha * (p - 1)`` by less than
        ``B**-2`` for every ``h <= h_max`` and prime ``p <= B``.
        """
        target = self.tail_constant() * self.h_max * self.budget.max_prime**3
        n, power = 0, 1
        while power <= target:
            n, power = n + 1, power * self.base
        return n

    def to_json(self) -> dict:
        d = {
            "mode": self.mode,
            "stages": self.stages,
            "budget": {"max_prime": self.budget.max_prime, "max_index": self.budget.max_index},
            "base": self.base,
            "first_exponent": self.first_exponent,
            "modulus_exponent": self.modulus_exponent,
            "run_length": self.run_length,
            "digits": list(self.digits),
            "b_max": self.b_max,
            "growth": self.growth,
            "exponent_ceiling": self.exponent_ceiling,
            "h_max": self.h_max,
            "exponents": [_itext(n) for n in self.exponents],
        }
        for key in ("modulus_exponent", "run_length"):
            if isinstance(d[key], tuple):
                d[key] = list(d[key])
        return d

    @classmethod
    def from_json(cls, d: dict) -> "ConstructionParams":
        d = dict(d)
        d["budget"] = SearchBudget(**d["budget"])
        d["digits"] = tuple(d.get("digits", ()))
        d["exponents"] = tuple(int(n, 0) for n in d.get("exponents", ()))
        for key in ("modulus_exponent", "run_length"):
            if isinstance(d.get(key), list):
                d[key] = tuple(d[key])
        return cls(**d)


def relaxed_default(
    stages: int = 2,
    *,
    max_prime: int = 10**9,
    h_max: int = 16,
    modulus_exponent: int = 5,
    run_length: int = 4,
    exponent_ceiling: int = 65536,
) -> ConstructionParams:
    """The desk-scale preset.

    Every stage uses a string of ``run_length`` consecutive primes
    ``≡ 1 (mod 2**modulus_exponent)`` found after the previous stage's
    string, and the leading digit sits at ``n_0 = modulus_exponent`` so it is
    cancelled exactly by every string.  All later digits are pushed past
    :meth:`ConstructionParams.certified_exponent`, which makes the
    small-distance bound hold for every ``h <= h_max`` by construction.

    With the defaults the three strings lie below ``6.2e8``.  Exponent 4
    would be reachable much earlier but leaves the leading digit too coarse
    for the unshifted fractional parts to look uniform (``D* ~ 1/16``).
    """
    return ConstructionParams(
        mode="relaxed",
        stages=stages,
        budget=SearchBudget(max_prime),
        base=2,
        first_exponent=modulus_exponent,
        modulus_exponent=modulus_exponent,
        run_length=run_length,
        growth="capped",
        exponent_ceiling=exponent_ceiling,
        h_max=h_max,
    )


@dataclass(frozen=True)
class Stage:
    k: int
    n: int  # digit position n_k
    digit: int  # b_k
    modulus: int  # q used for the string
    run: CongruentRun

    @property
    def m(self) -> int:
        return self.run.m

    @property
    def pi(self) -> int:
        return self.run.last_prime

    @property
    def length(self) -> int:
        return self.run.k


@dataclass(frozen=True)
class ConstructionState:
    """Completed stages, the exact truncation of alpha and its tail bound.

    ``next_exponent`` is the digit position of the first omitted term (or of
    the stage whose search failed).  ``frontier`` is set when a search ran
    out of budget.
    """

    params: ConstructionParams
    stages: tuple[Stage, ...] = ()
    alpha: RadixRational = RadixRational(0)
    next_exponent: int | None = None
    tail_bound: RadixRational | None = None
    frontier: NotFound | None = None
    synthetic: bool = False

    @property
    def depth(self) -> int:
        """Number of completed stages (``K + 1`` when stages ``0..K`` are done)."""
        return len(self.stages)

    @property
    def complete(self) -> bool:
        return self.frontier is None and self.depth == self.params.stages + 1

    @property
    def exponents(self) -> list[int]:
        return [s.n for s in self.stages]

    def stage(self, k: int) -> Stage:
        if not 0 <= k < self.depth:
            raise IndexError(f"stage {k} not built (have {self.depth})")
        return self.stages[k]

    def head(self, k: int) -> RadixRational:
        """``sum_{l <= k} b_l base**(-n_l)``."""
        total = RadixRational(0, 0, self.params.base)
        for s in self.stages[: k + 1]:
            total = total + RadixRational(s.digit, s.n, self.params.base)
        return total


def _next_exponent(params: ConstructionParams, k: int, n_k: int, pi_k: int) -> int | None:
    if k + 1 < len(params.exponents):
        return params.exponents[k + 1]
    if params.growth == "four_pi":
        return 4 * pi_k
    if params.growth == "capped":
        return max(min(4 * pi_k, params.exponent_ceiling), n_k + 1, params.certified_exponent())
    return None


def initial_state(params: ConstructionParams) -> ConstructionState:
    n0 = params.exponents[0] if params.exponents else params.first_exponent
    return ConstructionState(params=params, alpha=RadixRational(0, 0, params.base), next_exponent=n0)


def step(
    state: ConstructionState,
    params: ConstructionParams | None = None,
    *,
    run: CongruentRun | None = None,
    primes: PrimeTable | None = None,
    threads: int | None = None,
) -> ConstructionState:
    """Append one stage.

    ``run`` injects a string instead of searching for it (test fixtures);
    the resulting state is flagged synthetic.  When the search exhausts its
    budget the returned state carries the frontier and no new stage.
    """
    params = params or state.params
    if state.frontier is not None:
        return state
    k = state.depth
    n_k = state.next_exponent
    if n_k is None:
        raise TailBoundUnavailable(f"digit position n_{k} is not determined by the growth rule")
    j_k = _at(params.modulus_exponent, k)
    r_k = _at(params.run_length, k)
    j_k = n_k if j_k is None else j_k
    r_k = n_k if r_k is None else r_k
    q = params.base**j_k

    if run is None:
        start = 1 if params.mode == "faithful" or not state.stages else state.stages[-1].m + state.stages[-1].length + 1
        found = find_first_run(r_k, q, 1, params.budget, primes, start=start, threads=threads)
        if not found:
            return replace(state, frontier=found)
        run = found
    synthetic = state.synthetic or run.synthetic

    pi_k = run.last_prime
    if params.mode == "faithful" and not pi_k > 2**n_k:
        raise ValueError(f"stage {k}: pi_k = {pi_k} is not > 2**{n_k}")
    b_k = params.digit(k)
    alpha = state.alpha + RadixRational(b_k, n_k, params.base)
    stage = Stage(k=k, n=n_k, digit=b_k, modulus=q, run=run)
    nxt = _next_exponent(params, k, n_k, pi_k)
    if nxt is not None and nxt <= n_k:
        raise ValueError(f"digit positions must increase: n_{k + 1} = {nxt} <= n_{k} = {n_k}")
    new = ConstructionState(
        params=params,
        stages=state.stages + (stage,),
        alpha=alpha,
        next_exponent=nxt,
        synthetic=synthetic,
    )
    tail = tail_bound_of(new) if nxt is not None else None
    return replace(new, tail_bound=tail)


def build(
    params: ConstructionParams,
    *,
    runs: Sequence[CongruentRun] = (),
    primes: PrimeTable | None = None,
    threads: int | None = None,
) -> ConstructionState:
    """Run stages ``0..K``, stopping early (with a frontier) if a search fails.

    ``runs[k]``, when present, replaces the search at stage ``k``.
    """
    state = initial_state(params)
    for k in range(params.stages + 1):
        injected = runs[k] if k < len(runs) else None
        state = step(state, params, run=injected, primes=primes, threads=threads)
        if state.frontier is not None:
            break
    return state


def tail_bound_of(state: ConstructionState) -> RadixRational:
    """Upper bound on the omitted digits, ``c * base**(-n_{K+1})``.

    Uses ``sum_{j >= n} b_max base**-j = b_max base**(1-n) / (base-1)`` with
    the multiplier rounded up to an integer so the bound stays a base-power
    rational.
    """
    n = state.next_exponent
    if n is None:
        raise TailBoundUnavailable("tail bound unavailable: no growth rule fixes the next digit position")
    return RadixRational(state.params.tail_constant(), n, state.params.base)


@dataclass(frozen=True)
class LiouvilleRecord:
    k: int
    q: RadixRational  # base**n_k, an integer
    a: int
    coprime: bool
    gap_bound: RadixRational | None  # >= |q_k alpha - a_k|
    threshold: RadixRational  # q_k**-k
    holds: bool | None

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "q": encode(self.q) if self.q.numerator.bit_length() < 65536 else f"{self.q.base}^n",
            "a_bits": self.a.bit_length(),
            "a_odd": bool(self.a & 1),
            "coprime": self.coprime,
            "gap_bound": encode(self.gap_bound) if self.gap_bound is not None else None,
            "threshold": encode(self.threshold),
            "log2_gap_bound": self.gap_bound.log2_upper() if self.gap_bound is not None else None,
            "holds": self.holds,
        }


def liouville_records(state: ConstructionState) -> list[LiouvilleRecord]:
    """Rational approximations ``a_k / q_k`` with ``q_k = base**n_k``.

    ``a_k = q_k * sum_{l <= k} b_l base**-n_l`` and the gap
    ``|q_k alpha - a_k| = q_k * sum_{l > k} b_l base**-n_l`` is bounded by the
    geometric tail from ``n_{k+1}``.  ``holds`` records ``gap < q_k**-k``.
    """
    base = state.params.base
    c = state.params.tail_constant()
    out = []
    head = RadixRational(0, 0, base)
    for idx, s in enumerate(state.stages):
        head = head + RadixRational(s.digit, s.n, base)
        a = head.scale(s.n)
        assert a.is_integer
        a_k = a.numerator
        coprime = math.gcd(a_k, base) == 1  # equivalent to gcd(a_k, base**n_k) == 1
        n_next = state.stages[idx + 1].n if idx + 1 < state.depth else state.next_exponent
        threshold = RadixRational(1, s.k * s.n, base)
        if n_next is None:
            gap, holds = None, None
        else:
            gap = RadixRational(c, n_next, base).scale(s.n)
            holds = gap < threshold
        out.append(
            LiouvilleRecord(
                k=s.k, q=RadixRational(base**s.n, 0, base), a=a_k, coprime=coprime,
                gap_bound=gap, threshold=threshold, holds=holds,
            )
        )
    return out


# -- serialization ----------------------------------------------------------------


def _itext(n: int) -> str:
    # decimal unless too long for int/str conversion limits
    return str(n) if n.bit_length() < 8192 else hex(n)


def state_to_json(state: ConstructionState) -> dict:
    return {
        "format": "welldist-state",
        "version": 1,
        "params": state.params.to_json(),
        "synthetic": state.synthetic,
        "complete": state.complete,
        "stages": [
            {
                "k": s.k,
                "n": _itext(s.n),
                "digit": s.digit,
                "modulus": _itext(s.modulus),
                "m": s.m,
                "pi": _itext(s.pi),
                "run": {key: v if isinstance(v, bool) else _itext(v) for key, v in s.run.to_json().items()},
            }
            for s in state.stages
        ],
        "alpha": encode(state.alpha),
        "alpha_float": to_float(state.alpha).value,
        "next_exponent": None if state.next_exponent is None else _itext(state.next_exponent),
        "tail_bound": None if state.tail_bound is None else encode(state.tail_bound),
        "frontier": None if state.frontier is None else state.frontier.to_json(),
    }


def state_from_json(d: dict) -> ConstructionState:
    """Inverse of :func:`state_to_json`; checks alpha against the stage digits."""
    if d.get("format") != "welldist-state":
        raise ValueError("not a welldist state file")
    params = ConstructionParams.from_json(d["params"])
    stages = []
    for s in d["stages"]:
        run = CongruentRun.from_json({k: (int(v, 0) if isinstance(v, str) else v) for k, v in s["run"].items()})
        stages.append(Stage(k=int(s["k"]), n=int(s["n"], 0), digit=int(s["digit"]), modulus=int(s["modulus"], 0), run=run))
    frontier = None
    if d.get("frontier"):
        f = {k: v for k, v in d["frontier"].items() if k != "not_found"}
        frontier = NotFound(**f)
    state = ConstructionState(
        params=params,
        stages=tuple(stages),
        alpha=decode(d["alpha"]),
        next_exponent=None if d.get("next_exponent") is None else int(d["next_exponent"], 0),
        tail_bound=None if d.get("tail_bound") is None else decode(d["tail_bound"]),
        frontier=frontier,
        synthetic=bool(d.get("synthetic", False)),
    )
    expected = state.head(state.depth - 1) if state.depth else RadixRational(0, 0, params.base)
    if expected != state.alpha:
        raise ValueError("state alpha does not match its stage digits")
    return state
