# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
import heapq
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

from typing_extensions import Literal

from computable_analysis.creal import CReal
from computable_analysis.errors import ComputableAnalysisError, DeserializationError, DomainError, ValidationError
from computable_analysis.exact_numeric import (
    DyadicInterval,
    RationalLike,
    as_rational,
    enclose_sincos_multiples,
    refine_to_width,
)
from computable_analysis.schema.serialization import decimal_to_fraction

logger = logging.getLogger(__name__)

Coefficient = Union[Fraction, CReal]
SupMethod = Literal["adaptive", "grid"]

# Cells are laid over [0, 7], which covers one full period of every trigonometric polynomial.
PERIOD_COVER = Fraction(7)

# Working bits added when sup computations evaluate at a fixed precision.
SUP_GUARD_BITS = 10


def _as_coefficient(value: Any) -> Coefficient:
    if isinstance(value, CReal):
        exact = value.exact_value
        return exact if exact is not None else value
    return as_rational(value)


def _enclose(value: Coefficient, w: int) -> DyadicInterval:
    if isinstance(value, Fraction):
        return DyadicInterval.from_rational(value, w)
    return value.enclosure(w)


def _combine(a: Coefficient, b: Coefficient, sign: int) -> Coefficient:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + sign * b
    return _as_coefficient(_to_creal(a) + _to_creal(b).scale(sign))


def _to_creal(value: Coefficient) -> CReal:
    return value if isinstance(value, CReal) else CReal.const(value)


def _times(value: Coefficient, factor: Fraction) -> Coefficient:
    if isinstance(value, Fraction):
        return value * factor
    return _as_coefficient(value.scale(factor))


def _is_zero(value: Coefficient) -> bool:
    return isinstance(value, Fraction) and value == 0


@dataclass(frozen=True)
class TrigPoly:
    """A trigonometric polynomial a_0/2 + sum_k (a_k cos(kt) + b_k sin(kt)) for k = 1..M.

    `cos` holds a_0..a_M and `sin` holds b_1..b_M.  Coefficients are exact Fractions or computable reals.
    """

    cos: Tuple[Coefficient, ...]
    sin: Tuple[Coefficient, ...]

    def __post_init__(self):
        if len(self.cos) != len(self.sin) + 1:
            degree = len(self.sin)
            err = f"A degree {degree} polynomial needs {degree + 1} cosine coefficients, got {len(self.cos)}."
            raise ValidationError(err)
        object.__setattr__(self, "cos", tuple(_as_coefficient(value) for value in self.cos))
        object.__setattr__(self, "sin", tuple(_as_coefficient(value) for value in self.sin))

    # -------------------------------------------
    # Construction

    @classmethod
    def from_coefficients(
        cls, cos: Sequence[Any] = (), sin: Sequence[Any] = (), degree: Optional[int] = None
    ) -> "TrigPoly":
        """Build a polynomial from possibly ragged coefficient lists, padding with zeros."""
        size = max(len(cos) - 1, len(sin), 0) if degree is None else degree
        cos_values = list(cos) + [0] * (size + 1 - len(cos))
        sin_values = list(sin) + [0] * (size - len(sin))
        return cls(tuple(cos_values[: size + 1]), tuple(sin_values[:size]))

    @classmethod
    def zero(cls, degree: int = 0) -> "TrigPoly":
        return cls.from_coefficients(degree=degree)

    @classmethod
    def constant(cls, value: Any) -> "TrigPoly":
        return cls((_times(_as_coefficient(value), Fraction(2)),), ())

    @classmethod
    def cosine(cls, k: int, coefficient: Any = 1) -> "TrigPoly":
        """coefficient * cos(kt)"""
        if k == 0:
            return cls.constant(coefficient)
        return cls.from_coefficients(cos=[0] * k + [coefficient], degree=k)

    @classmethod
    def sine(cls, k: int, coefficient: Any = 1) -> "TrigPoly":
        """coefficient * sin(kt)"""
        if k < 1:
            err = f"sin(kt) needs k >= 1, got {k}."
            raise DomainError(err)
        return cls.from_coefficients(sin=[0] * (k - 1) + [coefficient], degree=k)

    # -------------------------------------------
    # Algebra

    @property
    def degree(self) -> int:
        return len(self.sin)

    def is_exact(self) -> bool:
        return all(isinstance(value, Fraction) for value in self.cos + self.sin)

    def padded(self, degree: int) -> "TrigPoly":
        if degree <= self.degree:
            return self
        return TrigPoly.from_coefficients(self.cos, self.sin, degree)

    def _merge(self, other: "TrigPoly", sign: int) -> "TrigPoly":
        size = max(self.degree, other.degree)
        a, b = self.padded(size), other.padded(size)
        return TrigPoly(
            tuple(_combine(x, y, sign) for x, y in zip(a.cos, b.cos)),
            tuple(_combine(x, y, sign) for x, y in zip(a.sin, b.sin)),
        )

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        return self._merge(other, 1)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self._merge(other, -1)

    def __neg__(self) -> "TrigPoly":
        return self.scale(-1)

    def scale(self, factor: RationalLike) -> "TrigPoly":
        q = as_rational(factor)
        return TrigPoly(tuple(_times(value, q) for value in self.cos), tuple(_times(value, q) for value in self.sin))

    def derivative(self) -> "TrigPoly":
        """d/dt: a_k cos(kt) becomes -k a_k sin(kt) and b_k sin(kt) becomes k b_k cos(kt)."""
        cos = [Fraction(0)] + [_times(self.sin[k - 1], Fraction(k)) for k in range(1, self.degree + 1)]
        sin = [_times(self.cos[k], Fraction(-k)) for k in range(1, self.degree + 1)]
        return TrigPoly(tuple(cos), tuple(sin))

    def poisson(self, r: RationalLike) -> "TrigPoly":
        """The Abel mean P_r: scale the degree k coefficients by r**k.

        :raises DomainError: unless 0 <= r < 1.
        """
        radius = as_rational(r)
        if not 0 <= radius < 1:
            err = f"Poisson radius must satisfy 0 <= r < 1, got {radius}."
            raise DomainError(err)
        cos = [_times(value, radius**k) for k, value in enumerate(self.cos)]
        sin = [_times(value, radius ** (k + 1)) for k, value in enumerate(self.sin)]
        return TrigPoly(tuple(cos), tuple(sin))

    # -------------------------------------------
    # Evaluation

    def _evaluate_at(self, w: int, cosines: List[DyadicInterval], sines: List[DyadicInterval]):
        total = _enclose(self.cos[0], w).scale_pow2(-1)
        for k in range(1, self.degree + 1):
            a, b = self.cos[k], self.sin[k - 1]
            if not _is_zero(a):
                total = total + _enclose(a, w) * cosines[k]
            if not _is_zero(b):
                total = total + _enclose(b, w) * sines[k]
            total = total.round_outward(w)
        return total.round_outward(w)

    def enclose_at(self, t: RationalLike, w: int) -> DyadicInterval:
        """An enclosure of p(t) computed at working precision w, with no guarantee on its width."""
        q = as_rational(t)
        cosines, sines = enclose_sincos_multiples(q, self.degree, w)
        return self._evaluate_at(w, cosines, sines)

    def evaluate(self, t: RationalLike, prec_bits: int) -> DyadicInterval:
        """An enclosure of p(t) of width at most 2**-prec_bits."""
        q = as_rational(t)
        extra = (2 * self.degree + 2).bit_length()
        return refine_to_width(lambda w: self.enclose_at(q, w + extra), prec_bits)

    def at(self, t: RationalLike) -> CReal:
        """p(t) as a computable real."""
        q = as_rational(t)
        if self.is_exact() and self.degree == 0:
            return CReal.const(self.cos[0] / 2)  # type: ignore[operator]
        return CReal.from_enclosure(lambda n: self.evaluate(q, n), provenance="trig_poly")

    # -------------------------------------------
    # Serialization

    def to_dict(self, prec_bits: int = 64) -> Dict[str, Any]:
        """Coefficients as interval enclosures at `prec_bits`; exact dyadic coefficients stay exact."""
        return {
            "degree": self.degree,
            "bits": prec_bits,
            "cos": [_enclose(value, prec_bits).to_dict() for value in self.cos],
            "sin": [_enclose(value, prec_bits).to_dict() for value in self.sin],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrigPoly":
        """
        Load a polynomial from {"cos": [...], "sin": [...]}.

        Entries are rational strings ("3/8", "0.25") or point intervals as written by to_dict.

        :raises DeserializationError: if an entry is a non-degenerate interval or not a rational.
        """

        def load(entry: Any) -> Fraction:
            if isinstance(entry, dict):
                interval = DyadicInterval.from_dict(entry)
                if not interval.is_point():
                    err = f"Only exact coefficients can be loaded, got the interval {interval}."
                    raise DeserializationError(err)
                return interval.lower
            return decimal_to_fraction(entry)

        if not isinstance(data, dict):
            err = f"Trigonometric polynomial must be an object, got {data!r}"
            raise DeserializationError(err)
        return cls.from_coefficients([load(v) for v in data.get("cos", [])], [load(v) for v in data.get("sin", [])])


def eval_trig_poly(p: TrigPoly, t: Union[RationalLike, CReal], prec_bits: int) -> DyadicInterval:
    """
    Enclose p(t) to within 2**-prec_bits.

    :param p: the polynomial.
    :param t: a rational point, or a computable real.
    :param prec_bits: the required precision, at least 1.
    :return: the enclosure.
    """
    if prec_bits < 1:
        err = f"prec_bits must be at least 1, got {prec_bits}."
        raise DomainError(err)
    if not isinstance(t, CReal):
        return p.evaluate(t, prec_bits)

    # |p(s) - p(t)| <= ||p'||_W |s - t|, so evaluate at a rational close enough to t.
    slope = wiener_norm(p.derivative(), 4).upper + 1
    shift = (-(-slope.numerator // slope.denominator)).bit_length() + 2
    point = t.approx(prec_bits + shift)
    spread = slope * Fraction(1, 1 << (prec_bits + shift))
    core = p.evaluate(point, prec_bits + 2)
    return DyadicInterval.from_bounds(core.lower - spread, core.upper + spread, prec_bits + 3)


def derivative(p: TrigPoly) -> TrigPoly:
    return p.derivative()


def poisson(p: TrigPoly, r: RationalLike) -> TrigPoly:
    return p.poisson(r)


def wiener_norm(p: TrigPoly, prec_bits: int) -> DyadicInterval:
    """
    The coefficient norm |a_0|/2 + sum |a_k| + sum |b_k|, which bounds the sup norm from above.

    :param p: the polynomial.
    :param prec_bits: the required precision of the enclosure.
    :return: an enclosure of the norm.
    """

    def compute(w: int) -> DyadicInterval:
        extra = (2 * p.degree + 2).bit_length()
        total = abs(_enclose(p.cos[0], w + extra)).scale_pow2(-1)
        for value in p.cos[1:] + p.sin:
            if not _is_zero(value):
                total = total + abs(_enclose(value, w + extra))
        return total

    return refine_to_width(compute, prec_bits)


def linear_combination(terms: Sequence[Tuple[RationalLike, TrigPoly]]) -> TrigPoly:
    """
    sum_i w_i p_i for exact weights, built coefficient by coefficient.

    :param terms: (weight, polynomial) pairs.
    :return: the combination, of degree max(deg p_i).
    """
    if not terms:
        return TrigPoly.zero()
    size = max(poly.degree for _, poly in terms)
    weights = [as_rational(weight) for weight, _ in terms]
    polys = [poly.padded(size) for _, poly in terms]

    def column(values: Sequence[Coefficient]) -> Coefficient:
        exact = [(w, v) for w, v in zip(weights, values) if isinstance(v, Fraction)]
        real = [_to_creal(v).scale(w) for w, v in zip(weights, values) if isinstance(v, CReal) and w != 0]
        constant = sum((w * v for w, v in exact), Fraction(0))
        if not real:
            return constant
        if constant:
            real.append(CReal.const(constant))
        return CReal.sum(real, provenance="linear_combination")

    cos = tuple(column([poly.cos[k] for poly in polys]) for k in range(size + 1))
    sin = tuple(column([poly.sin[k] for poly in polys]) for k in range(size))
    return TrigPoly(cos, sin)


# -------------------------------------------
# Certified supremum


def _evaluate_pair(
    p: TrigPoly, dp: TrigPoly, t: Fraction, w: int
) -> Tuple[DyadicInterval, DyadicInterval]:
    cosines, sines = enclose_sincos_multiples(t, p.degree, w)
    return p._evaluate_at(w, cosines, sines), dp._evaluate_at(w, cosines, sines)  # noqa: SLF001


def _working_bits(p: TrigPoly, prec_bits: int) -> int:
    scale = wiener_norm(p, 4).upper + 1
    magnitude = (scale.numerator // scale.denominator).bit_length()
    return prec_bits + SUP_GUARD_BITS + (2 * p.degree + 2).bit_length() + magnitude


def _constant_sup(p: TrigPoly, prec_bits: int) -> DyadicInterval:
    return refine_to_width(lambda w: abs(_enclose(p.cos[0], w + 1).scale_pow2(-1)), prec_bits)


def _adaptive_sup(p: TrigPoly, prec_bits: int) -> DyadicInterval:
    tolerance = Fraction(1, 1 << prec_bits)
    dp = p.derivative()
    curvature = wiener_norm(dp.derivative(), 8).upper
    w = _working_bits(p, prec_bits)

    cells = 4 * (p.degree + 1)
    half_width = PERIOD_COVER / (2 * cells)
    heap: List[Tuple[Fraction, int, Fraction, Fraction]] = []
    best = Fraction(0)
    counter = 0

    def visit(center: Fraction, half: Fraction):
        nonlocal best, counter
        value, slope = _evaluate_pair(p, dp, center, w)
        best = max(best, value.mig())
        upper = value.mag() + half * slope.mag() + half * half * curvature / 2
        heapq.heappush(heap, (-upper, counter, center, half))
        counter += 1

    for j in range(cells):
        visit((2 * j + 1) * half_width, half_width)

    while True:
        upper = -heap[0][0]
        if upper - best <= tolerance / 2:
            logger.debug("Certified sup in [%s, %s] after %d cell evaluations.", best, upper, counter)
            return DyadicInterval.from_bounds(best, upper, prec_bits + 2)
        _, _, center, half = heapq.heappop(heap)
        if half < Fraction(1, 1 << w):
            w += 16
            logger.debug("Cells reached the evaluation precision; raising working precision to %d bits.", w)
        visit(center - half / 2, half / 2)
        visit(center + half / 2, half / 2)


def _grid_sup(p: TrigPoly, prec_bits: int) -> DyadicInterval:
    tolerance = Fraction(1, 1 << prec_bits)
    lipschitz = p.degree * wiener_norm(p, 8).upper
    w = _working_bits(p, prec_bits)
    spacing = Fraction(1, 4 * (p.degree + 1))
    for _ in range(64):
        points = int(PERIOD_COVER / spacing) + 1
        values = [p.enclose_at(j * spacing, w) for j in range(points)]
        grid_lo = max(value.mig() for value in values)
        grid_hi = max(value.mag() for value in values)
        upper = grid_hi + lipschitz * spacing
        if upper - grid_lo <= tolerance / 2:
            return DyadicInterval.from_bounds(grid_lo, upper, prec_bits + 2)
        logger.debug("Grid spacing %s leaves a gap of %s; halving.", spacing, upper - grid_lo)
        spacing /= 2
        w += 1

    err = f"Grid sup did not reach {prec_bits} bits."
    raise ComputableAnalysisError(err)


SUP_METHODS: Dict[str, Callable[[TrigPoly, int], DyadicInterval]] = {
    "adaptive": _adaptive_sup,
    "grid": _grid_sup,
}


def certified_sup(p: TrigPoly, prec_bits: int, method: SupMethod = "adaptive") -> DyadicInterval:
    """
    Enclose sup_t |p(t)| to within 2**-prec_bits.

    The adaptive method runs branch and bound over cells covering a period: each cell's bound is
    |p(c)| + h|p'(c)| + h^2/2 * ||p''||_W, and the cell with the largest bound is split until it is within
    half the tolerance of the best certified value seen.  The grid method samples on a uniform grid and pads
    the grid maximum by the Lipschitz bound degree * ||p||_W times the spacing.

    :param p: the polynomial.
    :param prec_bits: the required precision, at least 1.
    :param method: "adaptive" or "grid".
    :return: an enclosure of the sup norm.
    :raises DomainError: if prec_bits < 1.
    :raises ValidationError: for an unknown method.
    """
    if prec_bits < 1:
        err = f"prec_bits must be at least 1, got {prec_bits}."
        raise DomainError(err)
    if method not in SUP_METHODS:
        err = f"Unknown sup method '{method}'. Valid methods are: {list(SUP_METHODS.keys())}"
        raise ValidationError(err)
    if p.degree == 0:
        return _constant_sup(p, prec_bits)
    return SUP_METHODS[method](p, prec_bits)


def derivative_consistency(f: TrigPoly, g: TrigPoly, r: RationalLike, prec_bits: int) -> DyadicInterval:
    """
    Enclose ||P_r g - (P_r f)'||, which tends to zero as r -> 1 exactly when g = f'.

    :param f: the candidate antiderivative.
    :param g: the candidate derivative.
    :param r: the Poisson radius, 0 <= r < 1.
    :param prec_bits: the required precision.
    :return: an enclosure of the sup norm of the gap.
    """
    return certified_sup(g.poisson(r) - f.poisson(r).derivative(), prec_bits)


@dataclass(frozen=True)
class EffectiveFunction:
    """A computable function presented as a uniform limit of trigonometric polynomials.

    approximant(modulus(N)) is within 2**-N of the function in sup norm.
    """

    approximant: Callable[[int], TrigPoly]
    modulus: Callable[[int], int]
    label: str = "f"

    @classmethod
    def exact(cls, p: TrigPoly, label: str = "p") -> "EffectiveFunction":
        return cls(lambda _m: p, lambda _n: 0, label)

    def approximation(self, n: int) -> TrigPoly:
        """A polynomial within 2**-n of the function."""
        if n < 0:
            err = f"Precision index must be non-negative, got {n}."
            raise DomainError(err)
        return self.approximant(self.modulus(n))

    def at(self, t: RationalLike) -> CReal:
        """f(t) as a computable real."""
        q = as_rational(t)
        return CReal(
            lambda n: self.approximation(n + 1).evaluate(q, n + 2).midpoint, provenance=f"{self.label}(t)"
        )

    def uniform_gap(self, m1: int, m2: int, prec_bits: int) -> DyadicInterval:
        """Enclose ||approximant(m1) - approximant(m2)||_sup."""
        return certified_sup(self.approximant(m1) - self.approximant(m2), prec_bits)
