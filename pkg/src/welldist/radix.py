"""Exact arithmetic on numbers of the form ``A / b**e``.

Every quantity the construction touches (truncations of alpha, the products
``h * alpha * p`` and their fractional parts) is a base-power rational, so it
can be carried exactly with an unbounded integer numerator.  Conversion to a
machine float happens once, at the very end, and reports its own error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "RadixRational",
    "FloatWithError",
    "add",
    "mul_int",
    "frac",
    "dist_to_nearest_int",
    "to_float",
    "encode",
    "decode",
]

# Below this many binary orders of magnitude a value rounds to 0.0.
_UNDERFLOW_BITS = 1076


def _strip(numerator: int, exponent: int, base: int) -> tuple[int, int]:
    if numerator == 0:
        return 0, 0
    if exponent == 0:
        return numerator, 0
    if base == 2:
        tz = (numerator & -numerator).bit_length() - 1
        shift = min(tz, exponent)
        return numerator >> shift, exponent - shift
    while exponent > 0:
        q, r = divmod(numerator, base)
        if r:
            break
        numerator, exponent = q, exponent - 1
    return numerator, exponent


@dataclass(frozen=True, slots=True)
class RadixRational:
    """The exact value ``numerator / base**exponent``.

    Instances are always stored in canonical form: the exponent is reduced
    until either it reaches zero or ``base`` no longer divides the numerator,
    and zero is stored as ``0 / base**0``.  Because of this, two values of the
    same base are equal exactly when their fields are equal.

    The exponent is an ordinary Python integer and may be astronomically
    large (synthetic deep stages use exponents with tens of thousands of
    digits); operations that would need ``base**exponent`` in full are only
    performed when that power is reasonably sized.
    """

    numerator: int
    exponent: int = 0
    base: int = 2

    def __post_init__(self) -> None:
        if self.base < 2:
            raise ValueError(f"base must be >= 2, got {self.base}")
        if self.exponent < 0:
            raise ValueError(f"exponent must be >= 0, got {self.exponent}")
        num, exp = _strip(int(self.numerator), int(self.exponent), self.base)
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "exponent", exp)

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_int(cls, value: int, base: int = 2) -> "RadixRational":
        return cls(value, 0, base)

    @classmethod
    def unit(cls, exponent: int, base: int = 2) -> "RadixRational":
        """``base**-exponent``."""
        return cls(1, exponent, base)

    # -- queries ----------------------------------------------------------------

    @property
    def is_integer(self) -> bool:
        return self.exponent == 0

    def sign(self) -> int:
        return (self.numerator > 0) - (self.numerator < 0)

    def denominator(self) -> int:
        return self.base**self.exponent

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.base**self.exponent)

    def log2_upper(self) -> int:
        """An integer ``t`` with ``|self| < 2**t``, computed without powers."""
        if self.numerator == 0:
            return -(10**9)
        return abs(self.numerator).bit_length() - self.exponent * (self.base.bit_length() - 1)

    # -- arithmetic -------------------------------------------------------------

    def _check_base(self, other: "RadixRational") -> None:
        if self.base != other.base:
            raise ValueError(f"base mismatch: {self.base} vs {other.base}")

    def __add__(self, other: "RadixRational | int") -> "RadixRational":
        if isinstance(other, int):
            other = RadixRational(other, 0, self.base)
        if not isinstance(other, RadixRational):
            return NotImplemented
        self._check_base(other)
        e1, e2 = self.exponent, other.exponent
        if e1 >= e2:
            num = self.numerator + other.numerator * self.base ** (e1 - e2)
            return RadixRational(num, e1, self.base)
        num = self.numerator * self.base ** (e2 - e1) + other.numerator
        return RadixRational(num, e2, self.base)

    __radd__ = __add__

    def __neg__(self) -> "RadixRational":
        return RadixRational(-self.numerator, self.exponent, self.base)

    def __sub__(self, other: "RadixRational | int") -> "RadixRational":
        if isinstance(other, int):
            other = RadixRational(other, 0, self.base)
        if not isinstance(other, RadixRational):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: int) -> "RadixRational":
        return RadixRational(other, 0, self.base) - self

    def __mul__(self, c: int) -> "RadixRational":
        if not isinstance(c, int):
            return NotImplemented
        return RadixRational(self.numerator * c, self.exponent, self.base)

    __rmul__ = __mul__

    def scale(self, k: int) -> "RadixRational":
        """Multiply by ``base**k`` (``k`` may be negative) by moving the exponent."""
        e = self.exponent - k
        if e >= 0:
            return RadixRational(self.numerator, e, self.base)
        return RadixRational(self.numerator * self.base ** (-e), 0, self.base)

    def floor(self) -> int:
        if self.exponent == 0:
            return self.numerator
        return self.numerator // self.base**self.exponent

    # -- ordering ---------------------------------------------------------------

    def _cmp(self, other: "RadixRational | int") -> int:
        if isinstance(other, int):
            other = RadixRational(other, 0, self.base)
        self._check_base(other)
        a, c = self.numerator, other.numerator
        sa = (a > 0) - (a < 0)
        sc = (c > 0) - (c < 0)
        if sa != sc or sa == 0:
            return (sa > sc) - (sa < sc)
        # Same nonzero sign: compare a * b**e2 against c * b**e1.
        d = self.exponent - other.exponent
        if d >= 0:
            big, small, flip = c, a, 1  # |c| * b**d against |a|
        else:
            big, small, flip, d = a, c, -1, -d
        if d > abs(small).bit_length():
            # |big| * b**d >= 2**d > |small|
            mag = -1
        else:
            lhs, rhs = abs(small), abs(big) * self.base**d
            mag = (lhs > rhs) - (lhs < rhs)
        return mag * flip * sa

    def __lt__(self, other: "RadixRational | int") -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: "RadixRational | int") -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: "RadixRational | int") -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: "RadixRational | int") -> bool:
        return self._cmp(other) >= 0

    def __str__(self) -> str:
        return encode(self)


@dataclass(frozen=True, slots=True)
class FloatWithError:
    """A float together with a bound on its distance from the real it stands for."""

    value: float
    abs_error_bound: float

    def __post_init__(self) -> None:
        if not (self.abs_error_bound >= 0 and math.isfinite(self.abs_error_bound)):
            raise ValueError(f"invalid error bound {self.abs_error_bound!r}")

    @property
    def lower(self) -> float:
        return self.value - self.abs_error_bound

    @property
    def upper(self) -> float:
        return self.value + self.abs_error_bound


def add(x: RadixRational, y: RadixRational) -> RadixRational:
    """Exact sum; both operands must share a base."""
    if x.base != y.base:
        raise ValueError(f"base mismatch: {x.base} vs {y.base}")
    return x + y


def mul_int(x: RadixRational, c: int) -> RadixRational:
    return RadixRational(x.numerator * c, x.exponent, x.base)


def frac(x: RadixRational) -> RadixRational:
    """Fractional part with floor semantics, so ``frac(-1/4) == 3/4``."""
    if x.exponent == 0:
        return RadixRational(0, 0, x.base)
    if x.base == 2:
        r = x.numerator & ((1 << x.exponent) - 1)
    else:
        r = x.numerator % x.base**x.exponent
    return RadixRational(r, x.exponent, x.base)


def dist_to_nearest_int(x: RadixRational) -> RadixRational:
    """``min(|x - t| : t integer)``, exactly; the result lies in ``[0, 1/2]``."""
    r = frac(x)
    if r.numerator == 0:
        return r
    den = r.base**r.exponent
    if 2 * r.numerator <= den:
        return r
    return RadixRational(den - r.numerator, r.exponent, r.base)


def to_float(x: RadixRational) -> FloatWithError:
    """Round to the nearest double and report the rounding error.

    Python's ``int / int`` is correctly rounded, so the error never exceeds
    half a unit in the last place; values that are exactly representable
    come back with a zero bound.

    Raises
    ------
    OverflowError
        If the magnitude exceeds the largest finite double.
    """
    num, e, b = x.numerator, x.exponent, x.base
    if num == 0:
        return FloatWithError(0.0, 0.0)
    if x.log2_upper() < -_UNDERFLOW_BITS:
        # |x| < 2**-1076, below half the smallest subnormal.
        return FloatWithError(0.0, math.ulp(0.0))
    den = b**e
    try:
        value = num / den
    except OverflowError as exc:
        raise OverflowError(f"value {encode(x)} exceeds the float range") from exc
    p, q = value.as_integer_ratio()
    if p * den == num * q:
        return FloatWithError(value, 0.0)
    return FloatWithError(value, math.ulp(value) / 2 if value != 0.0 else math.ulp(0.0))


def encode(x: RadixRational) -> str:
    """Text triple ``base:exponent:numerator`` with the numerator in hex.

    >>> encode(RadixRational(3, 2))
    '2:2:3'
    """
    # astronomically large exponents (synthetic stages) go out in hex
    exp = str(x.exponent) if x.exponent.bit_length() < 8192 else hex(x.exponent)
    return f"{x.base}:{exp}:{x.numerator:x}"


def decode(text: str) -> RadixRational:
    try:
        base, exponent, numerator = text.strip().split(":")
        return RadixRational(int(numerator, 16), int(exponent, 0), int(base))
    except ValueError as exc:
        raise ValueError(f"malformed radix triple {text!r}") from exc
