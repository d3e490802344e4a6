# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple, Union

from computable_analysis.errors import ComputableAnalysisError, DeserializationError, DomainError, ValidationError
from computable_analysis.schema.serialization import decimal_to_fraction, dyadic_to_decimal

logger = logging.getLogger(__name__)

Rational = Fraction
RationalLike = Union[int, Fraction, str]

# Extra working bits used on top of the requested output precision.
GUARD_BITS = 8
# Extra bits used when dividing intervals without an explicit output precision.
DIVISION_GUARD_BITS = 64
# Number of times a refinement loop doubles its guard bits before giving up.
MAX_REFINEMENTS = 16

# 40 correct decimals of pi; the pair is a certified enclosure of width 1e-40 (about 2^-132).
_STORED_PI_LOWER = Fraction("3.1415926535897932384626433832795028841971")
_STORED_PI_UPPER = Fraction("3.1415926535897932384626433832795028841972")
_STORED_PI_BITS = 128


def as_rational(value: Any) -> Fraction:
    """Coerce an int, Fraction or rational literal string into an exact Fraction.

    :param value: the value to convert.
    :return: the exact rational value.
    :raises DomainError: if a string can't be parsed as a rational number.
    :raises ValidationError: if the value is of a type that has no exact rational meaning (eg: float).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        err = "Booleans are not rational numbers."
        raise ValidationError(err)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            err = f"'{value}' is not a rational literal."
            raise DomainError(err) from exc

    err = f"Can't use a value of type {type(value).__name__} as an exact rational."
    raise ValidationError(err)


def _scale_floor(value: Fraction, bits: int) -> int:
    """floor(value * 2**bits)"""
    if bits >= 0:
        return (value.numerator << bits) // value.denominator
    return value.numerator // (value.denominator << -bits)


def _scale_ceil(value: Fraction, bits: int) -> int:
    """ceil(value * 2**bits)"""
    return -_scale_floor(-value, bits)


def _mantissa_to_fraction(mantissa: int, exp: int) -> Fraction:
    if exp >= 0:
        return Fraction(mantissa << exp)
    return Fraction(mantissa, 1 << -exp)


@dataclass(frozen=True)
class DyadicInterval:
    """A closed interval [lo * 2**exp, hi * 2**exp] with exact dyadic endpoints.

    All arithmetic rounds outward, so every result contains the exact result of the operation applied to any
    points of the operands.
    """

    lo: int
    hi: int
    exp: int = 0

    def __post_init__(self):
        if self.lo > self.hi:
            err = f"Interval endpoints are out of order: lo={self.lo}, hi={self.hi}."
            raise ValidationError(err)

    # -------------------------------------------
    # Construction

    @classmethod
    def exact(cls, value: RationalLike) -> "DyadicInterval":
        """Creates the degenerate interval [value, value] for a dyadic rational value.

        :param value: a rational whose denominator is a power of two.
        :return: the point interval.
        :raises DomainError: if the value is not dyadic.
        """
        q = as_rational(value)
        den = q.denominator
        if den & (den - 1):
            err = f"{q} is not a dyadic rational; use from_rational with a precision instead."
            raise DomainError(err)
        return cls(q.numerator, q.numerator, -(den.bit_length() - 1))

    @classmethod
    def from_bounds(cls, lower: RationalLike, upper: RationalLike, bits: int) -> "DyadicInterval":
        """Encloses [lower, upper] by an interval with endpoints on the grid 2**-bits, rounding outward.

        :param lower: the lower bound.
        :param upper: the upper bound.
        :param bits: the number of fractional bits of the result's endpoints.
        :return: the enclosing interval.
        """
        lo = as_rational(lower)
        hi = as_rational(upper)
        if lo > hi:
            err = f"Lower bound {lo} exceeds upper bound {hi}."
            raise ValidationError(err)
        return cls(_scale_floor(lo, bits), _scale_ceil(hi, bits), -bits)

    @classmethod
    def from_rational(cls, value: RationalLike, bits: int) -> "DyadicInterval":
        """Encloses a single rational; the result is exact when the value is representable with `bits` bits."""
        return cls.from_bounds(value, value, bits)

    @classmethod
    def hull(cls, intervals: Iterable["DyadicInterval"]) -> "DyadicInterval":
        """Returns the smallest interval containing all of the given intervals."""
        items = list(intervals)
        if not items:
            err = "Can't take the hull of no intervals."
            raise ValidationError(err)
        exp = min(item.exp for item in items)
        lo = min(item.lo << (item.exp - exp) for item in items)
        hi = max(item.hi << (item.exp - exp) for item in items)
        return cls(lo, hi, exp)

    # -------------------------------------------
    # Views

    @property
    def lower(self) -> Fraction:
        return _mantissa_to_fraction(self.lo, self.exp)

    @property
    def upper(self) -> Fraction:
        return _mantissa_to_fraction(self.hi, self.exp)

    @property
    def width(self) -> Fraction:
        return _mantissa_to_fraction(self.hi - self.lo, self.exp)

    @property
    def midpoint(self) -> Fraction:
        return _mantissa_to_fraction(self.lo + self.hi, self.exp - 1)

    @property
    def radius(self) -> Fraction:
        return _mantissa_to_fraction(self.hi - self.lo, self.exp - 1)

    @property
    def bits(self) -> int:
        """The number of fractional bits of the endpoints."""
        return max(0, -self.exp)

    def is_point(self) -> bool:
        return self.lo == self.hi

    def is_positive(self) -> bool:
        return self.lo > 0

    def is_negative(self) -> bool:
        return self.hi < 0

    def contains(self, value: Union[RationalLike, "DyadicInterval"]) -> bool:
        """Checks if a rational value (or a whole interval) lies inside this interval."""
        if isinstance(value, DyadicInterval):
            return self.lower <= value.lower and value.upper <= self.upper
        q = as_rational(value)
        return self.lower <= q <= self.upper

    def overlaps(self, other: "DyadicInterval") -> bool:
        return self.lower <= other.upper and other.lower <= self.upper

    def intersect(self, other: "DyadicInterval") -> "DyadicInterval":
        """Intersects two enclosures of the same quantity.

        :raises DomainError: if the intervals are disjoint, which means they can't enclose the same value.
        """
        if not self.overlaps(other):
            err = f"Enclosures {self} and {other} are disjoint."
            raise DomainError(err)
        exp = min(self.exp, other.exp)
        lo = max(self.lo << (self.exp - exp), other.lo << (other.exp - exp))
        hi = min(self.hi << (self.exp - exp), other.hi << (other.exp - exp))
        return DyadicInterval(lo, hi, exp)

    def width_within(self, prec_bits: int) -> bool:
        """True if the width is at most 2**-prec_bits."""
        span = self.hi - self.lo
        shift = -prec_bits - self.exp
        if shift >= 0:
            return span <= (1 << shift)
        return (span << -shift) <= 1

    def mag(self) -> Fraction:
        """The largest absolute value in the interval."""
        return max(abs(self.lower), abs(self.upper))

    def mig(self) -> Fraction:
        """The smallest absolute value in the interval."""
        if self.lo <= 0 <= self.hi:
            return Fraction(0)
        return min(abs(self.lower), abs(self.upper))

    # -------------------------------------------
    # Rounding

    def round_outward(self, bits: int) -> "DyadicInterval":
        """Re-expresses the interval on the grid 2**-bits, rounding outward if that grid is coarser."""
        target = -bits
        if target <= self.exp:
            shift = self.exp - target
            return DyadicInterval(self.lo << shift, self.hi << shift, target)
        shift = target - self.exp
        return DyadicInterval(self.lo >> shift, -((-self.hi) >> shift), target)

    def scale_pow2(self, power: int) -> "DyadicInterval":
        """Exact multiplication by 2**power."""
        return DyadicInterval(self.lo, self.hi, self.exp + power)

    # -------------------------------------------
    # Arithmetic

    def _aligned(self, other: "DyadicInterval") -> Tuple[int, int, int, int, int]:
        exp = min(self.exp, other.exp)
        return (
            self.lo << (self.exp - exp),
            self.hi << (self.exp - exp),
            other.lo << (other.exp - exp),
            other.hi << (other.exp - exp),
            exp,
        )

    def __neg__(self) -> "DyadicInterval":
        return DyadicInterval(-self.hi, -self.lo, self.exp)

    def __abs__(self) -> "DyadicInterval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return DyadicInterval(0, max(-self.lo, self.hi), self.exp)

    def __add__(self, other: Any) -> "DyadicInterval":
        other = _coerce(other)
        a_lo, a_hi, b_lo, b_hi, exp = self._aligned(other)
        return DyadicInterval(a_lo + b_lo, a_hi + b_hi, exp)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "DyadicInterval":
        return self + (-_coerce(other))

    def __rsub__(self, other: Any) -> "DyadicInterval":
        return _coerce(other) - self

    def __mul__(self, other: Any) -> "DyadicInterval":
        other = _coerce(other)
        products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return DyadicInterval(min(products), max(products), self.exp + other.exp)

    __rmul__ = __mul__

    def divide(self, other: Any, bits: Optional[int] = None) -> "DyadicInterval":
        """Divides by an interval that excludes zero, rounding the quotient outward to 2**-bits.

        :param other: the divisor.
        :param bits: the fractional bits of the result.  Defaults to the finer operand plus DIVISION_GUARD_BITS.
        :return: an enclosure of the quotient set.
        :raises DomainError: if the divisor contains zero.
        """
        other = _coerce(other)
        if other.lo <= 0 <= other.hi:
            err = f"Division by the interval [{other.lower}, {other.upper}] which contains zero."
            raise DomainError(err)
        if bits is None:
            bits = max(self.bits, other.bits) + DIVISION_GUARD_BITS
        quotients = [a / b for a in (self.lower, self.upper) for b in (other.lower, other.upper)]
        return DyadicInterval.from_bounds(min(quotients), max(quotients), bits)

    def __truediv__(self, other: Any) -> "DyadicInterval":
        return self.divide(other)

    def __rtruediv__(self, other: Any) -> "DyadicInterval":
        return _coerce(other).divide(self)

    # -------------------------------------------
    # Serialization

    def to_dict(self) -> Dict[str, Any]:
        """Serializes the interval as {lo, hi, bits} with exact decimal-string endpoints."""
        interval = self.round_outward(self.bits)
        return {
            "lo": dyadic_to_decimal(interval.lo, interval.exp),
            "hi": dyadic_to_decimal(interval.hi, interval.exp),
            "bits": interval.bits,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DyadicInterval":
        """Deserializes an interval written by to_dict; the endpoints must be exact at the stated bits."""
        for key in ("lo", "hi", "bits"):
            if key not in data:
                err = f"Missing '{key}' in interval data {data}"
                raise DeserializationError(err)
        bits = int(data["bits"])
        lower = decimal_to_fraction(data["lo"])
        upper = decimal_to_fraction(data["hi"])
        interval = cls.from_bounds(lower, upper, bits)
        if interval.lower != lower or interval.upper != upper:
            err = f"Interval endpoints {data['lo']}, {data['hi']} are not exact at {bits} bits."
            raise DeserializationError(err)
        return interval

    def __str__(self) -> str:
        data = self.to_dict()
        return f"[{data['lo']}, {data['hi']}]"


def _coerce(value: Any) -> DyadicInterval:
    if isinstance(value, DyadicInterval):
        return value
    return DyadicInterval.exact(value)


def _add(a: DyadicInterval, b: DyadicInterval, prec_bits: Optional[int]) -> DyadicInterval:  # noqa: ARG001
    return a + b


def _subtract(a: DyadicInterval, b: DyadicInterval, prec_bits: Optional[int]) -> DyadicInterval:  # noqa: ARG001
    return a - b


def _multiply(a: DyadicInterval, b: DyadicInterval, prec_bits: Optional[int]) -> DyadicInterval:  # noqa: ARG001
    return a * b


def _divide(a: DyadicInterval, b: DyadicInterval, prec_bits: Optional[int]) -> DyadicInterval:
    return a.divide(b, prec_bits)


ARITHMETIC_OPERATORS: Dict[str, Callable[[DyadicInterval, DyadicInterval, Optional[int]], DyadicInterval]] = {
    "+": _add,
    "-": _subtract,
    "−": _subtract,
    "*": _multiply,
    "×": _multiply,
    "/": _divide,
    "÷": _divide,
}


def interval_arith(a: DyadicInterval, b: DyadicInterval, op: str, prec_bits: Optional[int] = None) -> DyadicInterval:
    """Applies one of +, −, ×, ÷ to two intervals.

    Sums, differences and products are exact.  Quotients are rounded outward to `prec_bits` fractional bits
    (or the finer operand plus DIVISION_GUARD_BITS when not given).

    :param a: the left operand.
    :param b: the right operand.
    :param op: the operator symbol. See ARITHMETIC_OPERATORS for the accepted spellings.
    :param prec_bits: fractional bits for quotients.
    :return: an interval containing {x op y : x in a, y in b}.
    :raises ValidationError: for an unknown operator.
    :raises DomainError: when dividing by an interval containing zero.
    """
    if op not in ARITHMETIC_OPERATORS:
        err = f"Unknown arithmetic operator '{op}'. Valid operators are: {list(ARITHMETIC_OPERATORS.keys())}"
        raise ValidationError(err)
    return ARITHMETIC_OPERATORS[op](a, b, prec_bits)


def refine_to_width(
    compute: Callable[[int], DyadicInterval], prec_bits: int, guard_bits: int = GUARD_BITS
) -> DyadicInterval:
    """Calls compute(working_bits) with growing guard bits until the enclosure is at most 2**-prec_bits wide.

    :param compute: maps a working precision to an enclosure.
    :param prec_bits: the required output precision.
    :param guard_bits: the initial number of guard bits.
    :return: the first enclosure narrow enough.
    :raises DomainError: if prec_bits is negative.
    :raises ComputableAnalysisError: if the enclosure fails to narrow after MAX_REFINEMENTS attempts.
    """
    if prec_bits < 0:
        err = f"Precision must be non-negative, got {prec_bits}."
        raise DomainError(err)

    guard = guard_bits
    for _ in range(MAX_REFINEMENTS):
        enclosure = compute(prec_bits + guard)
        if enclosure.width_within(prec_bits):
            return enclosure
        logger.debug("Enclosure %s too wide for %d bits with %d guard bits; refining.", enclosure, prec_bits, guard)
        guard *= 2

    err = f"Enclosure did not reach {prec_bits} bits after {MAX_REFINEMENTS} refinements."
    raise ComputableAnalysisError(err)


# -------------------------------------------
# Fixed-point series kernels.
#
# Each kernel works on integers scaled by 2**w and returns (mantissa, error) where the exact value lies within
# `error` units of 2**-w of the mantissa.


def _arctan_inverse(x: int, w: int) -> Tuple[int, int]:
    """atan(1/x) for an integer x >= 2"""
    power = (1 << w) // x
    x_squared = x * x
    total = 0
    k = 0
    while power:
        term = power // (2 * k + 1)
        total += -term if k % 2 else term
        power //= x_squared
        k += 1
    return total, 3 * k + 2


def _machin_pi(w: int) -> DyadicInterval:
    s5, e5 = _arctan_inverse(5, w)
    s239, e239 = _arctan_inverse(239, w)
    middle = 16 * s5 - 4 * s239
    error = 16 * e5 + 4 * e239
    return DyadicInterval(middle - error, middle + error, -w)


_pi_lock = threading.Lock()
_pi_best: DyadicInterval = DyadicInterval.from_bounds(_STORED_PI_LOWER, _STORED_PI_UPPER, _STORED_PI_BITS + GUARD_BITS)


def enclose_pi(prec_bits: int) -> DyadicInterval:
    """Returns an interval of width at most 2**-prec_bits containing pi.

    A stored 128-bit enclosure answers most requests; finer ones are computed with Machin's formula and kept for
    later calls.

    :param prec_bits: the required precision.
    :return: an enclosure of pi.
    """
    global _pi_best  # noqa: PLW0603
    with _pi_lock:
        if not _pi_best.width_within(prec_bits + 1):
            logger.debug("Extending the stored pi enclosure to %d bits.", prec_bits + 1)
            _pi_best = refine_to_width(_machin_pi, prec_bits + 1)
        best = _pi_best
    return best.round_outward(prec_bits + 2)


def _sin_series(x: int, w: int) -> Tuple[int, int]:
    """sin(x * 2**-w) for 0 <= x <= 2**w"""
    x_squared = (x * x) >> w
    term = x
    total = 0
    k = 0
    while term:
        total += -term if k % 2 else term
        term = ((term * x_squared) >> w) // ((2 * k + 2) * (2 * k + 3))
        k += 1
    return total, 3 * k + 4


def _cos_series(x: int, w: int) -> Tuple[int, int]:
    """cos(x * 2**-w) for 0 <= x <= 2**w"""
    x_squared = (x * x) >> w
    term = 1 << w
    total = 0
    k = 0
    while term:
        total += -term if k % 2 else term
        term = ((term * x_squared) >> w) // ((2 * k + 1) * (2 * k + 2))
        k += 1
    return total, 4 * k + 8


def _sin_point(x: int, w: int) -> Tuple[int, int]:
    value, error = _sin_series(abs(x), w)
    if x < 0:
        value = -value
    return value - error, value + error


def _cos_point(x: int, w: int) -> Tuple[int, int]:
    value, error = _cos_series(abs(x), w)
    return value - error, value + error


def _clamp_unit(lo: int, hi: int, w: int) -> DyadicInterval:
    one = 1 << w
    return DyadicInterval(max(lo, -one), min(hi, one), -w)


def _sin_on(r: DyadicInterval, w: int) -> DyadicInterval:
    # sin is increasing on [-1, 1]
    lo, _ = _sin_point(r.lo, w)
    _, hi = _sin_point(r.hi, w)
    return _clamp_unit(lo, hi, w)


def _cos_on(r: DyadicInterval, w: int) -> DyadicInterval:
    # cos is even and decreasing in |r| on [-1, 1]
    if r.lo <= 0 <= r.hi:
        lo = min(_cos_point(r.lo, w)[0], _cos_point(r.hi, w)[0])
        return _clamp_unit(lo, 1 << w, w)
    if r.lo > 0:
        return _clamp_unit(_cos_point(r.hi, w)[0], _cos_point(r.lo, w)[1], w)
    return _clamp_unit(_cos_point(r.lo, w)[0], _cos_point(r.hi, w)[1], w)


def _reduce_quarter_turns(t: Fraction, w: int) -> Tuple[int, DyadicInterval]:
    """Writes t = n*pi/2 + r with |r| <= pi/4 (up to rounding); returns (n mod 4, enclosure of r at 2**-w)."""
    magnitude_bits = (abs(t.numerator) // t.denominator + 1).bit_length()
    rough_half_pi = enclose_pi(magnitude_bits + 32).midpoint / 2
    n = round(t / rough_half_pi)
    n_bits = abs(n).bit_length()

    half_pi = enclose_pi(w + n_bits + 2).scale_pow2(-1)
    r = DyadicInterval.from_rational(t, w + n_bits + 4) - half_pi * DyadicInterval.exact(n)
    return n % 4, r.round_outward(w)


def _enclose_sin_at(t: Fraction, w: int) -> DyadicInterval:
    quadrant, r = _reduce_quarter_turns(t, w)
    if quadrant == 0:
        return _sin_on(r, w)
    if quadrant == 1:
        return _cos_on(r, w)
    if quadrant == 2:  # noqa: PLR2004
        return -_sin_on(r, w)
    return -_cos_on(r, w)


def _enclose_cos_at(t: Fraction, w: int) -> DyadicInterval:
    quadrant, r = _reduce_quarter_turns(t, w)
    if quadrant == 0:
        return _cos_on(r, w)
    if quadrant == 1:
        return -_sin_on(r, w)
    if quadrant == 2:  # noqa: PLR2004
        return -_cos_on(r, w)
    return _sin_on(r, w)


def enclose_sin(t: RationalLike, prec_bits: int) -> DyadicInterval:
    """Returns an interval of width at most 2**-prec_bits containing sin(t).

    The argument is reduced modulo pi/2 against a certified pi enclosure; the alternating Taylor series is
    summed in fixed point with a bound on every rounding and on the truncated tail.

    :param t: a rational argument.
    :param prec_bits: the required precision, at least 1.
    :return: an enclosure of sin(t).
    """
    _check_precision(prec_bits)
    q = as_rational(t)
    return refine_to_width(lambda w: _enclose_sin_at(q, w), prec_bits)


def enclose_cos(t: RationalLike, prec_bits: int) -> DyadicInterval:
    """Returns an interval of width at most 2**-prec_bits containing cos(t). Same method as enclose_sin."""
    _check_precision(prec_bits)
    q = as_rational(t)
    return refine_to_width(lambda w: _enclose_cos_at(q, w), prec_bits)


def enclose_sincos_multiples(
    t: RationalLike, degree: int, prec_bits: int
) -> Tuple[List[DyadicInterval], List[DyadicInterval]]:
    """Encloses cos(kt) and sin(kt) for k = 0..degree, each to within 2**-prec_bits.

    Only cos(t) and sin(t) are computed by series; the multiples come from repeated rotation in fixed point.
    Rotation preserves length, so the accumulated error grows linearly in k (at most 7 units of the working
    precision per step) and is added to every enclosure.

    :param t: a rational argument.
    :param degree: the largest multiple required.
    :param prec_bits: the required precision of each enclosure.
    :return: (cosines, sines), both lists of length degree + 1.
    """
    _check_precision(prec_bits)
    if degree < 0:
        err = f"Degree must be non-negative, got {degree}."
        raise DomainError(err)

    q = as_rational(t)
    w = prec_bits + GUARD_BITS + (7 * degree + 2).bit_length() + 1
    one = 1 << w
    cos_t = _scale_floor(enclose_cos(q, w).midpoint, w)
    sin_t = _scale_floor(enclose_sin(q, w).midpoint, w)

    cosines = [DyadicInterval(one, one, -w)]
    sines = [DyadicInterval(0, 0, -w)]
    c, s = one, 0
    for k in range(1, degree + 1):
        c, s = (c * cos_t - s * sin_t) >> w, (s * cos_t + c * sin_t) >> w
        error = 7 * k
        cosines.append(_clamp_unit(c - error, c + error, w))
        sines.append(_clamp_unit(s - error, s + error, w))
    return cosines, sines


def _atanh_series(z: Fraction, w: int) -> Tuple[int, int]:
    """atanh(z) for 0 <= z <= 1/3"""
    power = _scale_floor(z, w)
    z_squared = _scale_floor(z * z, w)
    total = 0
    k = 0
    while power:
        total += power // (2 * k + 1)
        power = (power * z_squared) >> w
        k += 1
    return total, 4 * k + 6


@lru_cache(maxsize=256)
def _ln2_fixed(w: int) -> Tuple[int, int]:
    value, error = _atanh_series(Fraction(1, 3), w)
    return 2 * value, 2 * error


def _enclose_ln_at(q: Fraction, w: int) -> DyadicInterval:
    k = q.numerator.bit_length() - q.denominator.bit_length()
    m = q / Fraction(2) ** k
    z = (m - 1) / (m + 1)

    wide = w + abs(k).bit_length() + 2
    value, error = _atanh_series(abs(z), wide)
    value, error = 2 * value, 2 * error
    if z < 0:
        value = -value
    if k:
        ln2, ln2_error = _ln2_fixed(wide)
        value += k * ln2
        error += abs(k) * ln2_error
    return DyadicInterval(value - error, value + error, -wide)


@lru_cache(maxsize=8192)
def _enclose_ln_cached(q: Fraction, prec_bits: int) -> DyadicInterval:
    return refine_to_width(lambda w: _enclose_ln_at(q, w), prec_bits)


def enclose_ln(q: RationalLike, prec_bits: int) -> DyadicInterval:
    """Returns an interval of width at most 2**-prec_bits containing the natural logarithm of q.

    q is written as m * 2**k with m in (1/2, 2); ln m = 2*atanh((m-1)/(m+1)) is summed with a certified
    geometric tail, and ln 2 = 2*atanh(1/3).

    :param q: a positive rational.
    :param prec_bits: the required precision, at least 1.
    :return: an enclosure of ln(q).
    :raises DomainError: if q <= 0.
    """
    _check_precision(prec_bits)
    value = as_rational(q)
    if value <= 0:
        err = f"The logarithm is only defined for positive arguments, got {value}."
        raise DomainError(err)
    if value == 1:
        return DyadicInterval(0, 0, 0)
    return _enclose_ln_cached(value, prec_bits)


def _check_precision(prec_bits: int):
    if prec_bits < 1:
        err = f"prec_bits must be at least 1, got {prec_bits}."
        raise DomainError(err)


def rational_to_interval(value: RationalLike, prec_bits: int) -> DyadicInterval:
    """Encloses a rational to within 2**-prec_bits, exactly when it is a dyadic with few enough bits."""
    return DyadicInterval.from_rational(as_rational(value), prec_bits + 1)


