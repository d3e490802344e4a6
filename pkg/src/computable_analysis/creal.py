# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence

from typing_extensions import Literal, Protocol

from computable_analysis.errors import DomainError, ValidationError
from computable_analysis.exact_numeric import DyadicInterval, RationalLike, as_rational, enclose_pi
from computable_analysis.schema.serialization import dyadic_to_decimal

logger = logging.getLogger(__name__)

Direction = Literal["nondecreasing", "nonincreasing"]


def _ceil_bits(value: Fraction) -> int:
    """The bit length of ceil(|value|)."""
    magnitude = abs(value)
    return (-(-magnitude.numerator // magnitude.denominator)).bit_length()


class CReal:
    """A computable real, presented by its approximation function.

    approx(n) returns a rational within 2**-n of the real.  Answers are memoized per instance and the memo is
    guarded by a lock, so a CReal may be shared between threads and always gives the same answer for the same n.
    Reals built from exact rationals carry that value and skip the oracle entirely.
    """

    def __init__(
        self,
        approx: Callable[[int], Any],
        provenance: str = "custom",
        value: Optional[Fraction] = None,
    ):
        """
        Create a new CReal.

        :param approx: maps n >= 0 to a rational within 2**-n of the real.
        :param provenance: a short tag describing how the real was built, used in logs and output.
        :param value: the exact rational value, when known.
        """
        self._approx = approx
        self.provenance = provenance
        self._value = value
        self._memo: Dict[int, Fraction] = {}
        self._lock = threading.RLock()

    # -------------------------------------------
    # Construction

    @classmethod
    def const(cls, value: RationalLike) -> "CReal":
        q = as_rational(value)
        return cls(lambda _n: q, provenance="const", value=q)

    @classmethod
    def from_enclosure(cls, enclose: Callable[[int], DyadicInterval], provenance: str = "enclosure") -> "CReal":
        """Build a real from a function returning enclosures of width at most 2**-n.

        approx(n) is the midpoint of the enclosure at n+1 bits.
        """
        return cls(lambda n: enclose(n + 1).midpoint, provenance=provenance)

    @classmethod
    def pi(cls) -> "CReal":
        return cls.from_enclosure(enclose_pi, provenance="pi")

    @classmethod
    def sum(cls, terms: Sequence["CReal"], provenance: str = "sum") -> "CReal":
        """Sum a finite list of reals, querying each at enough extra bits to keep the total error within 2**-n."""
        items = list(terms)
        if not items:
            return cls.const(0)
        if all(item.exact_value is not None for item in items):
            return cls.const(sum((item.exact_value for item in items), Fraction(0)))  # type: ignore[misc]
        extra = (len(items) - 1).bit_length()
        return cls(lambda n: sum((item.approx(n + extra) for item in items), Fraction(0)), provenance=provenance)

    # -------------------------------------------
    # Queries

    @property
    def exact_value(self) -> Optional[Fraction]:
        """The exact rational value, if this real was built from one."""
        return self._value

    def approx(self, n: int) -> Fraction:
        """
        Return a rational within 2**-n of this real.

        :param n: the precision index, n >= 0.
        :return: the approximation.
        :raises DomainError: if n is negative.
        """
        if n < 0:
            err = f"Precision index must be non-negative, got {n}."
            raise DomainError(err)
        if self._value is not None:
            return self._value

        with self._lock:
            cached = self._memo.get(n)
            if cached is None:
                cached = as_rational(self._approx(n))
                self._memo[n] = cached
        return cached

    def enclosure(self, prec_bits: int) -> DyadicInterval:
        """
        Return a dyadic interval of width at most 2**-prec_bits containing this real.

        :param prec_bits: the required precision.
        :return: the enclosure.
        """
        if self._value is not None:
            return DyadicInterval.from_rational(self._value, prec_bits + 1)
        q = self.approx(prec_bits + 2)
        radius = Fraction(1, 1 << (prec_bits + 2))
        return DyadicInterval.from_bounds(q - radius, q + radius, prec_bits + 3)

    def magnitude_bound(self) -> Fraction:
        """A rational upper bound on |x|."""
        if self._value is not None:
            return abs(self._value)
        return abs(self.approx(0)) + 1

    # -------------------------------------------
    # Arithmetic

    def __neg__(self) -> "CReal":
        if self._value is not None:
            return CReal.const(-self._value)
        return CReal(lambda n: -self.approx(n), provenance=f"neg({self.provenance})")

    def __add__(self, other: Any) -> "CReal":
        return creal_arith(self, _coerce(other), "+")

    def __radd__(self, other: Any) -> "CReal":
        return creal_arith(_coerce(other), self, "+")

    def __sub__(self, other: Any) -> "CReal":
        return creal_arith(self, _coerce(other), "-")

    def __rsub__(self, other: Any) -> "CReal":
        return creal_arith(_coerce(other), self, "-")

    def __mul__(self, other: Any) -> "CReal":
        return creal_arith(self, _coerce(other), "*")

    def __rmul__(self, other: Any) -> "CReal":
        return creal_arith(_coerce(other), self, "*")

    def scale(self, factor: RationalLike) -> "CReal":
        """Multiply by an exact rational."""
        return creal_arith(CReal.const(factor), self, "*")

    def to_dict(self, prec_bits: int) -> Dict[str, Any]:
        """
        Serialize as {approx, error_bound, provenance}: a dyadic decimal within 2**-prec_bits of the real.

        :param prec_bits: the precision of the approximation.
        :return: the dictionary.
        """
        point = DyadicInterval.from_rational(self.approx(prec_bits + 1), prec_bits + 2)
        return {
            "approx": dyadic_to_decimal(point.lo, point.exp),
            "error_bound": f"2^-{prec_bits}",
            "provenance": self.provenance,
        }

    def __repr__(self) -> str:
        if self._value is not None:
            return f"CReal({self._value})"
        return f"CReal(<{self.provenance}>)"


def _coerce(value: Any) -> CReal:
    if isinstance(value, CReal):
        return value
    return CReal.const(value)


def _add(a: CReal, b: CReal) -> CReal:
    if a.exact_value is not None and b.exact_value is not None:
        return CReal.const(a.exact_value + b.exact_value)
    return CReal(lambda n: a.approx(n + 1) + b.approx(n + 1), provenance="add")


def _subtract(a: CReal, b: CReal) -> CReal:
    return _add(a, -b)


def _multiply(a: CReal, b: CReal) -> CReal:
    if a.exact_value is not None and b.exact_value is not None:
        return CReal.const(a.exact_value * b.exact_value)
    if b.exact_value is not None:
        a, b = b, a
    if a.exact_value is not None:
        factor = a.exact_value
        if factor == 0:
            return CReal.const(0)
        shift = _ceil_bits(factor)
        return CReal(lambda n: factor * b.approx(n + shift), provenance=f"scale({b.provenance})")

    def approx(n: int) -> Fraction:
        # |a_k b_k - ab| <= (|a_k| + |b|) 2^-k and both magnitudes are bounded by approx(0) + 1.
        shift = _ceil_bits(a.magnitude_bound() + b.magnitude_bound() + 1)
        return a.approx(n + shift) * b.approx(n + shift)

    return CReal(approx, provenance="mul")


CREAL_OPERATORS: Dict[str, Callable[[CReal, CReal], CReal]] = {
    "+": _add,
    "-": _subtract,
    "*": _multiply,
}


def creal_arith(a: CReal, b: CReal, op: str) -> CReal:
    """
    Combine two computable reals with +, - or *.

    Constant operands fold exactly; otherwise the result queries its operands at a shifted precision so that
    its own approximations meet the 2**-n contract.

    :param a: the left operand.
    :param b: the right operand.
    :param op: one of the keys of CREAL_OPERATORS.
    :return: the combined real.
    :raises ValidationError: for an unknown operator.
    """
    if op not in CREAL_OPERATORS:
        err = f"Unknown operator '{op}'. Valid operators are: {list(CREAL_OPERATORS.keys())}"
        raise ValidationError(err)
    return CREAL_OPERATORS[op](a, b)


@dataclass(frozen=True)
class MonotoneWitness:
    """A computable monotone sequence of rationals, the classic witness for a left- or right-c.e. real.

    For a nondecreasing witness term(m) is a certified lower bound of the limit; nothing is known about how
    far below the limit it is.
    """

    terms: Callable[[int], Any]
    direction: Direction = "nondecreasing"
    provenance: str = "witness"

    def __post_init__(self):
        if self.direction not in ("nondecreasing", "nonincreasing"):
            err = f"Unknown direction '{self.direction}'. Expected 'nondecreasing' or 'nonincreasing'."
            raise ValidationError(err)

    def term(self, m: int) -> Fraction:
        if m < 0:
            err = f"Term index must be non-negative, got {m}."
            raise DomainError(err)
        return as_rational(self.terms(m))

    def prefix(self, count: int) -> List[Fraction]:
        """The first `count` terms."""
        return [self.term(m) for m in range(count)]

    def increments(self, count: int) -> List[Fraction]:
        """term(1) - term(0), ..., term(count) - term(count-1)."""
        values = self.prefix(count + 1)
        return [b - a for a, b in zip(values, values[1:])]

    def limit_lower_bound(self, m: int) -> Fraction:
        """A certified bound on the limit from term m: below it when nondecreasing, above it when nonincreasing."""
        return self.term(m)

    def is_monotone_prefix(self, count: int) -> bool:
        """Check the first `count` + 1 terms move in the declared direction."""
        steps = self.increments(count)
        if self.direction == "nondecreasing":
            return all(step >= 0 for step in steps)
        return all(step <= 0 for step in steps)


class RealFunction(Protocol):
    """Anything that can be evaluated at a rational point to give a computable real."""

    def at(self, t: Any) -> CReal: ...


def diff_quotient(u: RealFunction, t: RationalLike, n: int) -> CReal:
    """
    The forward difference quotient n * (u(t + 1/n) - u(t)).

    :param u: a function that exposes `at`.
    :param t: a rational point.
    :param n: the inverse step, n >= 1.
    :return: the quotient as a computable real.
    :raises DomainError: if n < 1.
    """
    if n < 1:
        err = f"Difference quotient index must be at least 1, got {n}."
        raise DomainError(err)
    point = as_rational(t)
    quotient = (u.at(point + Fraction(1, n)) - u.at(point)).scale(n)
    quotient.provenance = f"diff_quotient(n={n})"
    return quotient


def diff_quotient_sequence(u: RealFunction, t: RationalLike) -> Iterator[CReal]:
    """Yield the difference quotients of u at t for n = 1, 2, 3, ..."""
    n = 1
    while True:
        yield diff_quotient(u, t, n)
        n += 1
