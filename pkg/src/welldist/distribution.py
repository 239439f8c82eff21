"""Interval counts and star discrepancy of fractional parts.

``interval_count`` uses the closed interval ``[a, b]``; ``star_discrepancy``
uses the usual anchored half-open boxes ``[0, t)``.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from .analysis import phases
from .radix import RadixRational, mul_int, to_float

__all__ = [
    "PointSet",
    "DiscrepancyReport",
    "interval_count",
    "star_discrepancy",
    "window_profile",
]


@dataclass(frozen=True)
class PointSet:
    """Points of ``[0, 1)`` kept in ascending order."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.sort(np.asarray(self.points, dtype=np.float64))
        if pts.size and (pts[0] < 0.0 or pts[-1] >= 1.0):
            raise ValueError("points must lie in [0, 1)")
        object.__setattr__(self, "points", pts)

    @property
    def N(self) -> int:
        return int(self.points.size)


@dataclass(frozen=True)
class DiscrepancyReport:
    N: int
    d_star: float
    argmax: float
    h: int | None = None
    m: int | None = None
    first_index: int | None = None
    last_index: int | None = None
    float_error: float = 0.0

    def to_row(self) -> dict:
        return {"m": self.m, "N": self.N, "d_star": self.d_star, "argmax": self.argmax}


def interval_count(ps: PointSet, a: float, b: float) -> int:
    """Number of points in the closed interval ``[a, b]``."""
    if not (0.0 <= a < b <= 1.0):
        raise ValueError(f"need 0 <= a < b <= 1, got a={a}, b={b}")
    lo = np.searchsorted(ps.points, a, side="left")
    hi = np.searchsorted(ps.points, b, side="right")
    return int(hi - lo)


def star_discrepancy(ps: PointSet) -> DiscrepancyReport:
    """Exact ``D*_N`` from the sorted points.

    ``D*_N = max_i max(i/N - x_(i), x_(i) - (i-1)/N)``.  ``argmax`` is the
    point at which the maximum is attained.
    """
    N = ps.N
    if N == 0:
        raise ValueError("star discrepancy of an empty point set")
    x = ps.points
    i = np.arange(1, N + 1, dtype=np.float64)
    above = i / N - x
    below = x - (i - 1) / N
    ja, jb = int(np.argmax(above)), int(np.argmax(below))
    if above[ja] >= below[jb]:
        return DiscrepancyReport(N, float(above[ja]), float(x[ja]))
    return DiscrepancyReport(N, float(below[jb]), float(x[jb]))


def window_profile(
    alpha: RadixRational,
    h: int,
    primes,
    windows: Iterable[tuple[int, int]],
    alpha_tail: RadixRational | None = None,
) -> list[DiscrepancyReport]:
    """Star discrepancy of ``{h alpha p_{n+m}}``, ``1 <= n <= N``, per window ``(m, N)``.

    ``float_error`` bounds how far any point may sit from its exact position
    (rounding plus the omitted tail of alpha); ``D*`` moves by no more than that.
    """
    out = []
    for m, N in windows:
        ps = primes.run(m + 1, N).tolist()
        pts, worst = phases(alpha, h, ps)
        err = worst
        if alpha_tail is not None and alpha_tail.numerator:
            shift = mul_int(alpha_tail, h * max(ps))
            err += to_float(shift).upper if shift.log2_upper() > -1070 else 2.0**-1070
        r = star_discrepancy(PointSet(np.array(pts)))
        out.append(DiscrepancyReport(r.N, r.d_star, r.argmax, h, m, m + 1, m + N, err))
    return out
