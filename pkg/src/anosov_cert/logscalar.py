"""Signed real numbers stored as a base-10 exponent.

Radii such as 10**-15309 or 10**-3698433 are far outside the double range,
but their base-10 logarithms are ordinary doubles with plenty of digits to
spare.  :class:`LogScalar` keeps only ``sign`` and ``log10_mag`` and never
materialises the magnitude unless :meth:`LogScalar.to_float` is called.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Real
from typing import Union

from anosov_cert.numeric import tolerances

LN10 = math.log(10.0)
_NULL = -math.inf  # log10_mag marker for the zero scalar


class CancellationError(ArithmeticError):
    """Subtraction of two nearly equal magnitudes lost all significance."""


Operand = Union["LogScalar", float, int]


@dataclass(frozen=True)
class LogScalar:
    sign: int
    log10_mag: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign}")
        if math.isnan(self.log10_mag):
            raise ValueError("log10_mag is NaN")
        if (self.sign == 0) != (self.log10_mag == _NULL):
            raise ValueError("sign 0 and log10_mag=-inf must occur together")
        if self.log10_mag == math.inf:
            raise OverflowError("LogScalar magnitude is infinite")

    # -- construction -------------------------------------------------------

    @classmethod
    def zero(cls) -> "LogScalar":
        return cls(0, _NULL)

    @classmethod
    def from_float(cls, x: float) -> "LogScalar":
        x = float(x)
        if not math.isfinite(x):
            raise ValueError(f"cannot represent non-finite value {x}")
        if x == 0.0:
            return cls.zero()
        return cls(1 if x > 0 else -1, math.log10(abs(x)))

    @classmethod
    def from_log10(cls, log10_mag: float, sign: int = 1) -> "LogScalar":
        return cls(sign, float(log10_mag))

    @classmethod
    def exp(cls, x: float) -> "LogScalar":
        """e**x without leaving the log domain."""
        return cls(1, float(x) / LN10)

    @classmethod
    def coerce(cls, value: Operand) -> "LogScalar":
        if isinstance(value, LogScalar):
            return value
        if isinstance(value, Real):
            return cls.from_float(float(value))
        raise TypeError(f"cannot convert {type(value).__name__} to LogScalar")

    # -- inspection ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def log10(self) -> float:
        if self.sign <= 0:
            raise ValueError("log10 of a non-positive LogScalar")
        return self.log10_mag

    def ln(self) -> float:
        return self.log10() * LN10

    def to_float(self) -> float:
        """Convert to a double; overflows to +-inf and underflows to 0.0."""
        if self.sign == 0:
            return 0.0
        if self.log10_mag > 308.5:
            return self.sign * math.inf
        if self.log10_mag < -330.0:
            return 0.0 * self.sign
        return self.sign * 10.0 ** self.log10_mag

    def floor_power_of_ten(self) -> int:
        """Largest integer n with 10**n <= |self| (a conservative radius)."""
        if self.sign == 0:
            raise ValueError("zero has no power-of-ten floor")
        return math.floor(self.log10_mag)

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self) -> "LogScalar":
        return LogScalar(-self.sign, self.log10_mag)

    def __abs__(self) -> "LogScalar":
        return LogScalar(abs(self.sign), self.log10_mag)

    def __mul__(self, other: Operand) -> "LogScalar":
        other = LogScalar.coerce(other)
        if self.sign == 0 or other.sign == 0:
            return LogScalar.zero()
        return LogScalar(self.sign * other.sign, self.log10_mag + other.log10_mag)

    __rmul__ = __mul__

    def __truediv__(self, other: Operand) -> "LogScalar":
        other = LogScalar.coerce(other)
        if other.sign == 0:
            raise ZeroDivisionError("LogScalar division by zero")
        if self.sign == 0:
            return LogScalar.zero()
        return LogScalar(self.sign * other.sign, self.log10_mag - other.log10_mag)

    def __rtruediv__(self, other: Operand) -> "LogScalar":
        return LogScalar.coerce(other) / self

    def __pow__(self, exponent: float) -> "LogScalar":
        exponent = float(exponent)
        if self.sign == 0:
            if exponent > 0:
                return LogScalar.zero()
            raise ZeroDivisionError("zero to a non-positive power")
        if self.sign < 0:
            if not exponent.is_integer():
                raise ValueError("fractional power of a negative LogScalar")
            sign = -1 if int(exponent) % 2 else 1
        else:
            sign = 1
        return LogScalar(sign, self.log10_mag * exponent)

    def sqrt(self) -> "LogScalar":
        return self ** 0.5

    def __add__(self, other: Operand) -> "LogScalar":
        other = LogScalar.coerce(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        big, small = (self, other) if self.log10_mag >= other.log10_mag else (other, self)
        gap = (small.log10_mag - big.log10_mag) * LN10  # <= 0
        if big.sign == small.sign:
            return LogScalar(big.sign, big.log10_mag + math.log1p(math.exp(gap)) / LN10)
        if gap == 0.0:
            return LogScalar.zero()
        remaining = -math.expm1(gap)  # 1 - |small|/|big|
        if remaining < tolerances().cancellation_rel:
            raise CancellationError(
                f"relative difference {remaining:.3e} between 10^{big.log10_mag} "
                f"and 10^{small.log10_mag} is below the cancellation threshold"
            )
        return LogScalar(big.sign, big.log10_mag + math.log10(remaining))

    __radd__ = __add__

    def __sub__(self, other: Operand) -> "LogScalar":
        return self + (-LogScalar.coerce(other))

    def __rsub__(self, other: Operand) -> "LogScalar":
        return LogScalar.coerce(other) - self

    # -- ordering -----------------------------------------------------------

    def _key(self) -> tuple:
        if self.sign == 0:
            return (0, 0.0)
        return (self.sign, self.sign * self.log10_mag)

    def _cmp(self, other: Operand) -> int:
        a, b = self._key(), LogScalar.coerce(other)._key()
        return (a > b) - (a < b)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (LogScalar, Real)):
            return NotImplemented
        return self._cmp(other) == 0

    def __hash__(self) -> int:
        return hash(self._key())

    def __lt__(self, other: Operand) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: Operand) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: Operand) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: Operand) -> bool:
        return self._cmp(other) >= 0

    def __repr__(self) -> str:
        if self.sign == 0:
            return "LogScalar(0)"
        prefix = "-" if self.sign < 0 else ""
        return f"LogScalar({prefix}10^{self.log10_mag!r})"

    def to_json(self) -> dict:
        return {"sign": self.sign, "log10": None if self.sign == 0 else self.log10_mag}


def log_sinh(x: float) -> float:
    """Natural log of sinh(x) for x > 0, stable for large x."""
    if x <= 0:
        raise ValueError("log_sinh requires x > 0")
    if x < 20.0:
        return math.log(math.sinh(x))
    return x - math.log(2.0) + math.log1p(-math.exp(-2.0 * x))
