# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from computable_analysis.errors import ComputableAnalysisError, DeserializationError, DomainError, ValidationError
from computable_analysis.exact_numeric import DyadicInterval, RationalLike, as_rational, enclose_pi, refine_to_width
from computable_analysis.schema.serialization import fraction_to_string

logger = logging.getLogger(__name__)

# Largest precision tried when deciding the sign of a nonzero element of Q[pi].
MAX_SIGN_BITS = 4096

_PI_TERM = re.compile(
    r"^(?P<coef>\d+(?:\.\d+)?(?:/\d+)?)?\*?(?P<pi>pi|π)?(?:\^(?P<power>\d+))?(?:/(?P<div>\d+))?$"
)


def _strip(coefficients: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    values = list(coefficients)
    while values and values[-1] == 0:
        values.pop()
    return tuple(values)


@dataclass(frozen=True)
class PiNumber:
    """An element c_0 + c_1 pi + c_2 pi^2 + ... of Q[pi] with exact rational coefficients.

    pi is transcendental, so two PiNumbers are equal exactly when their coefficients are, and the sign of a
    nonzero PiNumber can always be found by refining an enclosure of pi.
    """

    coefficients: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _strip([as_rational(value) for value in self.coefficients]))

    @classmethod
    def of(cls, value: Union["PiNumber", RationalLike]) -> "PiNumber":
        if isinstance(value, PiNumber):
            return value
        return cls((as_rational(value),))

    @classmethod
    def pi(cls, coefficient: RationalLike = 1, power: int = 1) -> "PiNumber":
        """coefficient * pi**power"""
        return cls(tuple([Fraction(0)] * power + [as_rational(coefficient)]))

    @classmethod
    def parse(cls, text: str) -> "PiNumber":
        """
        Parse a literal such as "3/2pi", "pi/2", "16pi^4", "2*pi + 1/2" or "0.75".

        :param text: the literal.
        :return: the value.
        :raises ValidationError: if the literal can't be parsed.
        """
        compact = text.replace(" ", "")
        if not compact:
            err = "Empty number literal."
            raise ValidationError(err)
        total = cls()
        for sign, body in re.findall(r"([+-]?)([^+-]+)", compact):
            match = _PI_TERM.match(body)
            if not match or (match.group("coef") is None and match.group("pi") is None):
                err = f"Can't parse '{body}' in the number literal '{text}'."
                raise ValidationError(err)
            if match.group("power") and not match.group("pi"):
                err = f"Only pi may be raised to a power in '{text}'."
                raise ValidationError(err)
            coefficient = Fraction(match.group("coef")) if match.group("coef") else Fraction(1)
            if match.group("div"):
                coefficient /= int(match.group("div"))
            if sign == "-":
                coefficient = -coefficient
            power = (int(match.group("power")) if match.group("power") else 1) if match.group("pi") else 0
            total = total + cls.pi(coefficient, power)
        if "".join(sign + body for sign, body in re.findall(r"([+-]?)([^+-]+)", compact)) != compact.lstrip("+"):
            err = f"Can't parse the number literal '{text}'."
            raise ValidationError(err)
        return total

    # -------------------------------------------
    # Algebra

    def is_zero(self) -> bool:
        return not self.coefficients

    def is_rational(self) -> bool:
        return len(self.coefficients) <= 1

    @property
    def rational_value(self) -> Fraction:
        if not self.is_rational():
            err = f"{self} is not rational."
            raise DomainError(err)
        return self.coefficients[0] if self.coefficients else Fraction(0)

    def __add__(self, other: Any) -> "PiNumber":
        other = PiNumber.of(other)
        size = max(len(self.coefficients), len(other.coefficients))
        a = list(self.coefficients) + [Fraction(0)] * (size - len(self.coefficients))
        b = list(other.coefficients) + [Fraction(0)] * (size - len(other.coefficients))
        return PiNumber(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self) -> "PiNumber":
        return PiNumber(tuple(-value for value in self.coefficients))

    def __sub__(self, other: Any) -> "PiNumber":
        return self + (-PiNumber.of(other))

    def __rsub__(self, other: Any) -> "PiNumber":
        return PiNumber.of(other) - self

    def __mul__(self, other: Any) -> "PiNumber":
        other = PiNumber.of(other)
        if self.is_zero() or other.is_zero():
            return PiNumber()
        product = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, x in enumerate(self.coefficients):
            for j, y in enumerate(other.coefficients):
                product[i + j] += x * y
        return PiNumber(tuple(product))

    __rmul__ = __mul__

    # -------------------------------------------
    # Numerics

    def _enclose_at(self, w: int) -> DyadicInterval:
        if not self.coefficients:
            return DyadicInterval(0, 0, 0)
        extra = 4 * len(self.coefficients) + max(
            (abs(c.numerator) // c.denominator + 1).bit_length() for c in self.coefficients
        )
        pi = enclose_pi(w + extra)
        total = DyadicInterval.from_rational(self.coefficients[-1], w + extra)
        for value in reversed(self.coefficients[:-1]):
            total = (total * pi + DyadicInterval.from_rational(value, w + extra)).round_outward(w + extra)
        return total

    def enclose(self, prec_bits: int) -> DyadicInterval:
        """An enclosure of the value of width at most 2**-prec_bits."""
        if self.is_rational():
            return DyadicInterval.from_rational(self.rational_value, prec_bits + 1)
        return refine_to_width(self._enclose_at, prec_bits)

    def sign(self) -> int:
        """
        The exact sign of the value: -1, 0 or 1.

        :raises ComputableAnalysisError: if no precision up to MAX_SIGN_BITS separates the value from zero.
        """
        if self.is_rational():
            value = self.rational_value
            return (value > 0) - (value < 0)
        bits = 16
        while bits <= MAX_SIGN_BITS:
            enclosure = self.enclose(bits)
            if enclosure.is_positive():
                return 1
            if enclosure.is_negative():
                return -1
            bits *= 2
        err = f"Could not separate {self} from zero with {MAX_SIGN_BITS} bits."
        raise ComputableAnalysisError(err)

    def compare(self, other: Any) -> int:
        """The sign of self - other."""
        return (self - PiNumber.of(other)).sign()

    def to_float(self) -> float:
        return float(self.enclose(64).midpoint)

    def __str__(self) -> str:
        if not self.coefficients:
            return "0"
        terms = []
        for power, value in reversed(list(enumerate(self.coefficients))):
            if value == 0:
                continue
            magnitude = fraction_to_string(abs(value))
            if power == 0:
                body = magnitude
            else:
                factor = "pi" if power == 1 else f"pi^{power}"
                body = factor if abs(value) == 1 else f"{magnitude}{factor}"
            sign = "-" if value < 0 else "+"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


PI = PiNumber.pi()
THREE_PI = PiNumber.pi(3)

Piece = Tuple[PiNumber, ...]


def _poly_value(coefficients: Sequence[PiNumber], at_one: bool) -> PiNumber:
    if not coefficients:
        return PiNumber()
    if at_one:
        return sum(coefficients, PiNumber())
    return coefficients[0]


def _poly_slope(coefficients: Sequence[PiNumber], at_one: bool) -> PiNumber:
    if len(coefficients) < 2:  # noqa: PLR2004
        return PiNumber()
    if at_one:
        return sum((value * j for j, value in enumerate(coefficients) if j), PiNumber())
    return coefficients[1]


def _horner(coefficients: Sequence[DyadicInterval], s: DyadicInterval, w: int) -> DyadicInterval:
    if not coefficients:
        return DyadicInterval(0, 0, 0)
    total = coefficients[-1]
    for value in reversed(coefficients[:-1]):
        total = (total * s + value).round_outward(w)
    return total


@dataclass(frozen=True)
class RadialProfile:
    """A radial profile q(t), piecewise polynomial between knots in Q[pi], supported in [pi, 3pi].

    Piece i is a polynomial in the normalised variable s = (t - k_i) / (k_{i+1} - k_i).  Construction checks,
    exactly in Q[pi], that q and q' are continuous at every knot and vanish at both ends of the support.
    """

    knots: Tuple[PiNumber, ...] = ()
    pieces: Tuple[Piece, ...] = ()

    def __post_init__(self):
        knots = tuple(PiNumber.of(knot) for knot in self.knots)
        pieces = tuple(tuple(PiNumber.of(value) for value in piece) for piece in self.pieces)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "pieces", pieces)

        if not pieces:
            if knots:
                err = "A profile with knots needs at least one piece."
                raise ValidationError(err)
            return
        if len(knots) != len(pieces) + 1:
            err = f"{len(pieces)} pieces need {len(pieces) + 1} knots, got {len(knots)}."
            raise ValidationError(err)
        if knots[0].compare(PI) < 0 or knots[-1].compare(THREE_PI) > 0:
            err = f"Profile support [{knots[0]}, {knots[-1]}] is not inside [pi, 3pi]."
            raise ValidationError(err)
        for left, right in zip(knots, knots[1:]):
            if right.compare(left) <= 0:
                err = f"Knots must be strictly increasing, got {left} then {right}."
                raise ValidationError(err)
        self._check_smoothness()

    def _check_smoothness(self):
        lengths = [right - left for left, right in zip(self.knots, self.knots[1:])]
        first, last = self.pieces[0], self.pieces[-1]
        if not _poly_value(first, False).is_zero() or not _poly_slope(first, False).is_zero():
            err = f"q and q' must vanish at the first knot {self.knots[0]}."
            raise ValidationError(err)
        if not _poly_value(last, True).is_zero() or not _poly_slope(last, True).is_zero():
            err = f"q and q' must vanish at the last knot {self.knots[-1]}."
            raise ValidationError(err)
        for i in range(len(self.pieces) - 1):
            left, right = self.pieces[i], self.pieces[i + 1]
            if _poly_value(left, True) != _poly_value(right, False):
                err = f"q is discontinuous at knot {self.knots[i + 1]}."
                raise ValidationError(err)
            # dq/dt = (dq/ds) / length, compared without division.
            if _poly_slope(left, True) * lengths[i + 1] != _poly_slope(right, False) * lengths[i]:
                err = f"q' is discontinuous at knot {self.knots[i + 1]}."
                raise ValidationError(err)

    # -------------------------------------------
    # Construction

    @classmethod
    def zero(cls) -> "RadialProfile":
        return cls()

    @classmethod
    def bump(cls) -> "RadialProfile":
        """q(t) = (t - pi)^2 (3pi - t)^2 on [pi, 3pi], so q(2pi) = pi^4."""
        c = PiNumber.pi(16, 4)
        return cls((PI, THREE_PI), ((PiNumber(), PiNumber(), c, c * -2, c),))

    def scale(self, factor: RationalLike) -> "RadialProfile":
        """factor * q"""
        q = as_rational(factor)
        return RadialProfile(self.knots, tuple(tuple(value * q for value in piece) for piece in self.pieces))

    def __add__(self, other: "RadialProfile") -> "RadialProfile":
        """Sum of two profiles; the knots must match unless one profile is zero."""
        if not other.pieces:
            return self
        if not self.pieces:
            return other
        if self.knots != other.knots:
            err = "Only profiles on the same knots can be added."
            raise DomainError(err)
        pieces = []
        for a, b in zip(self.pieces, other.pieces):
            size = max(len(a), len(b))
            pa = list(a) + [PiNumber()] * (size - len(a))
            pb = list(b) + [PiNumber()] * (size - len(b))
            pieces.append(tuple(x + y for x, y in zip(pa, pb)))
        return RadialProfile(self.knots, tuple(pieces))

    # -------------------------------------------
    # Certified evaluation

    def _locate(self, t: Fraction) -> Optional[int]:
        if not self.pieces or self.knots[0].compare(t) > 0 or self.knots[-1].compare(t) <= 0:
            return None
        for i in range(len(self.pieces)):
            if self.knots[i + 1].compare(t) > 0:
                return i
        return None

    def _value_and_slope(self, t: Fraction, w: int) -> Tuple[DyadicInterval, DyadicInterval]:
        index = self._locate(t)
        if index is None:
            zero = DyadicInterval(0, 0, 0)
            return zero, zero
        left = self.knots[index].enclose(w + 4)
        length = (self.knots[index + 1] - self.knots[index]).enclose(w + 4)
        s = (DyadicInterval.from_rational(t, w + 4) - left).divide(length, w + 4)
        piece = self.pieces[index]
        values = [value.enclose(w + 4) for value in piece]
        slopes = [value.enclose(w + 4) * j for j, value in enumerate(piece) if j]
        q = _horner(values, s, w + 4)
        dq = _horner(slopes, s, w + 4).divide(length, w + 4)
        return q, dq

    def evaluate(self, t: RationalLike, prec_bits: int) -> DyadicInterval:
        """An enclosure of q(t) of width at most 2**-prec_bits."""
        point = as_rational(t)
        return refine_to_width(lambda w: self._value_and_slope(point, w)[0], prec_bits)

    def derivative(self, t: RationalLike, prec_bits: int) -> DyadicInterval:
        """An enclosure of q'(t) of width at most 2**-prec_bits."""
        point = as_rational(t)
        return refine_to_width(lambda w: self._value_and_slope(point, w)[1], prec_bits)

    def knot_jumps(self, prec_bits: int) -> List[Dict[str, DyadicInterval]]:
        """Left and right limits of q and q' at every interior knot, as enclosures."""
        jumps = []
        for i in range(len(self.pieces) - 1):
            left, right = self.pieces[i], self.pieces[i + 1]
            left_length = self.knots[i + 1] - self.knots[i]
            right_length = self.knots[i + 2] - self.knots[i + 1]
            jumps.append(
                {
                    "value_left": _poly_value(left, True).enclose(prec_bits),
                    "value_right": _poly_value(right, False).enclose(prec_bits),
                    "slope_left": _poly_slope(left, True)
                    .enclose(prec_bits + 8)
                    .divide(left_length.enclose(prec_bits + 8), prec_bits + 8),
                    "slope_right": _poly_slope(right, False)
                    .enclose(prec_bits + 8)
                    .divide(right_length.enclose(prec_bits + 8), prec_bits + 8),
                }
            )
        return jumps

    # -------------------------------------------
    # Floating point evaluation, for quadrature

    def __call__(self, radii: Any) -> np.ndarray:
        r = np.asarray(radii, dtype=float)
        out = np.zeros_like(r)
        knots = [knot.to_float() for knot in self.knots]
        for i, piece in enumerate(self.pieces):
            lo, hi = knots[i], knots[i + 1]
            mask = (r >= lo) & (r < hi)
            s = (r[mask] - lo) / (hi - lo)
            out[mask] = np.polynomial.polynomial.polyval(s, [value.to_float() for value in piece])
        return out

    # -------------------------------------------
    # Serialization

    def to_dict(self) -> Dict[str, Any]:
        return {
            "knots": [str(knot) for knot in self.knots],
            "pieces": [[str(value) for value in piece] for piece in self.pieces],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RadialProfile":
        """
        Load a profile from {"knots": [...], "pieces": [[...], ...]} with Q[pi] literals.

        :raises DeserializationError: if the data is malformed.
        :raises ValidationError: if the profile fails the support or smoothness checks.
        """
        if not isinstance(data, dict) or "knots" not in data or "pieces" not in data:
            err = f"A radial profile needs 'knots' and 'pieces', got {data!r}"
            raise DeserializationError(err)

        def load(value: Any) -> PiNumber:
            return PiNumber.parse(value) if isinstance(value, str) else PiNumber.of(value)

        return cls(
            tuple(load(knot) for knot in data["knots"]),
            tuple(tuple(load(value) for value in piece) for piece in data["pieces"]),
        )


# Quintic smoothstep 10s^3 - 15s^4 + 6s^5 and its mirror: C^2 transitions between 0 and 1.
_RISING = tuple(PiNumber.of(value) for value in (0, 0, 0, 10, -15, 6))
_FALLING = tuple(PiNumber.of(value) for value in (1, 0, 0, -10, 15, -6))


def window(a: Union[PiNumber, RationalLike], b: Union[PiNumber, RationalLike]) -> RadialProfile:
    """
    A C^1 profile rising from 0 at pi to 1 at a, flat to b, and falling to 0 at 3pi.

    :param a: the start of the plateau.
    :param b: the end of the plateau.
    :return: the profile.
    :raises ValidationError: unless pi < a < b < 3pi.
    """
    left, right = PiNumber.of(a), PiNumber.of(b)
    if not (left.compare(PI) > 0 and right.compare(left) > 0 and THREE_PI.compare(right) > 0):
        err = f"A window needs pi < a < b < 3pi, got a={left}, b={right}."
        raise ValidationError(err)
    return RadialProfile((PI, left, right, THREE_PI), (_RISING, (PiNumber.of(1),), _FALLING))


def wave_at_origin(q: RadialProfile, t: RationalLike, prec_bits: int) -> DyadicInterval:
    """
    Enclose u(t, 0) = q(t) + t q'(t) for the wave equation with radial initial data q(|x|) and zero velocity.

    By Kirchhoff's formula u(t, x) = d/dt (t * mean of q over the sphere of radius t about x); at the origin
    the mean is q(t).  u(t, .) is computable from q for all t > 0, yet where q' is not computable neither is
    u(t, 0).

    :param q: the radial profile.
    :param t: a positive rational time.
    :param prec_bits: the required precision.
    :return: an enclosure of u(t, 0).
    :raises DomainError: if t <= 0.
    """
    time = as_rational(t)
    if time <= 0:
        err = f"Kirchhoff's formula is applied for t > 0, got t={time}."
        raise DomainError(err)

    def compute(w: int) -> DyadicInterval:
        value, slope = q._value_and_slope(time, w)  # noqa: SLF001
        extra = (time.numerator // time.denominator + 1).bit_length()
        return (value + DyadicInterval.from_rational(time, w + extra) * slope).round_outward(w)

    return refine_to_width(compute, prec_bits)


def _sphere_mean(q: RadialProfile, x: np.ndarray, radius: float, nodes: int) -> float:
    # Gauss-Legendre in cos(theta), trapezoid in phi.
    mu, weights = np.polynomial.legendre.leggauss(nodes)
    phi = np.arange(2 * nodes) * (np.pi / nodes)
    sin_theta = np.sqrt(1.0 - mu**2)
    px = x[0] + radius * np.outer(sin_theta, np.cos(phi))
    py = x[1] + radius * np.outer(sin_theta, np.sin(phi))
    pz = x[2] + radius * np.outer(mu, np.ones_like(phi))
    values = q(np.sqrt(px**2 + py**2 + pz**2))
    return float(weights @ values.mean(axis=1)) / 2.0


def kirchhoff_quadrature_oracle(
    q: RadialProfile,
    t: float,
    x: Sequence[float] = (0.0, 0.0, 0.0),
    h: float = 1e-3,
    nodes: int = 64,
    richardson: bool = True,
) -> float:
    """
    Approximate u(t, x) by quadrature of Kirchhoff's formula; an uncertified oracle for testing.

    F(s) = s * (mean of q over the sphere of radius s about x) is differentiated by central differences,
    with one Richardson step when requested.

    :param q: the radial profile.
    :param t: the time, t > h.
    :param x: the point in R^3.
    :param h: the difference step.
    :param nodes: Gauss-Legendre nodes in the polar direction.
    :param richardson: combine steps h and h/2 to cancel the leading error term.
    :return: the approximate value.
    :raises DomainError: unless 0 < h < t.
    """
    if not 0 < h < t:
        err = f"The oracle needs 0 < h < t, got h={h}, t={t}."
        raise DomainError(err)
    point = np.asarray(x, dtype=float)
    if point.shape != (3,):
        err = f"x must be a point in R^3, got {x}."
        raise ValidationError(err)

    def spherical_integral(s: float) -> float:
        return s * _sphere_mean(q, point, s, nodes)

    def central(step: float) -> float:
        return (spherical_integral(t + step) - spherical_integral(t - step)) / (2.0 * step)

    if not richardson:
        return central(h)
    return (4.0 * central(h / 2.0) - central(h)) / 3.0
