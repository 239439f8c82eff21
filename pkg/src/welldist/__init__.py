"""Constructing an irrational alpha for which (alpha * p_n) is not well-distributed mod 1.

Modules
-------
radix         exact base-power rationals
prime_engine  sieving and global prime indexing
run_finder    strings of consecutive primes in one residue class
construction  the digit sequence n_k and the truncated alpha
analysis      certified Weyl sums and inequality checks
distribution  interval counts and star discrepancy
report, cli   report bundle and the ``welldist`` command
"""

from .radix import RadixRational, FloatWithError, dist_to_nearest_int, frac, mul_int, to_float
from .prime_engine import PrimeTable, PrimeWindow, sieve, sieve_segment, window_at
from .run_finder import CongruentRun, NotFound, SearchBudget, enumerate_runs, find_first_run, m_of_n
from .construction import (
    ConstructionParams,
    ConstructionState,
    build,
    liouville_records,
    relaxed_default,
    step,
    tail_bound_of,
)
from .analysis import (
    WeylQuery,
    WeylResult,
    criterion_profile,
    sup_over_shifts,
    verify_lemma22,
    verify_pointwise,
    verify_sandwich,
    weyl_sum,
)
from .distribution import PointSet, interval_count, star_discrepancy, window_profile

__version__ = "0.1.0"

__all__ = [
    "RadixRational",
    "FloatWithError",
    "dist_to_nearest_int",
    "frac",
    "mul_int",
    "to_float",
    "PrimeTable",
    "PrimeWindow",
    "sieve",
    "sieve_segment",
    "window_at",
    "CongruentRun",
    "NotFound",
    "SearchBudget",
    "enumerate_runs",
    "find_first_run",
    "m_of_n",
    "ConstructionParams",
    "ConstructionState",
    "build",
    "liouville_records",
    "relaxed_default",
    "step",
    "tail_bound_of",
    "WeylQuery",
    "WeylResult",
    "criterion_profile",
    "sup_over_shifts",
    "verify_lemma22",
    "verify_pointwise",
    "verify_sandwich",
    "weyl_sum",
    "PointSet",
    "interval_count",
    "star_discrepancy",
    "window_profile",
]
