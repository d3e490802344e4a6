# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, partial
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from computable_analysis.creal import CReal, MonotoneWitness
from computable_analysis.enumerators import DEFAULT_STEP_LIMIT, Enumerator
from computable_analysis.errors import DomainError, ValidationError
from computable_analysis.exact_numeric import DyadicInterval, RationalLike, as_rational, enclose_ln, refine_to_width
from computable_analysis.schema.serialization import fraction_to_string
from computable_analysis.trig_series import EffectiveFunction, TrigPoly, certified_sup, linear_combination

logger = logging.getLogger(__name__)

# Precision at which the constant C1 is fixed when it is used as a bound rather than reported.
C1_BITS = 10

# Largest precision constant_c1 accepts; the partial sum it needs grows like 2**prec_bits.
C1_MAX_BITS = 16


def _reciprocal_k_log(k: int, power: int, w: int) -> DyadicInterval:
    """An enclosure of 1 / (k**power * ln k) at working precision w."""
    denominator = enclose_ln(k, w + 2 * k.bit_length() + 4) * (k**power)
    return DyadicInterval.exact(1).divide(denominator, w + 2)


def _gauge_at(n: int, w: int) -> DyadicInterval:
    extra = (n + 1).bit_length() + 2
    total = DyadicInterval(0, 0, 0)
    for k in range(2, n + 2):
        total = total + _reciprocal_k_log(k, 1, w + extra)
    return total.round_outward(w)


@lru_cache(maxsize=4096)
def gauge_G(n: int, prec_bits: int) -> DyadicInterval:
    """
    Enclose the gauge G(n) = sum_{k=2}^{n+1} 1/(k ln k).

    G grows like ln ln n, without bound, so 1/G(n) tends to zero slowly.

    :param n: the index, at least 1.
    :param prec_bits: the required precision.
    :return: an enclosure of G(n).
    :raises DomainError: if n < 1.
    """
    if n < 1:
        err = f"The gauge is defined for n >= 1, got {n}."
        raise DomainError(err)
    return refine_to_width(partial(_gauge_at, n), prec_bits)


def gauge_creal(n: int) -> CReal:
    """G(n) as a computable real."""
    return CReal.from_enclosure(partial(gauge_G, n), provenance=f"G({n})")


def _c1_cutoff(prec_bits: int) -> int:
    # Smallest power of two K with K ln K >= 2^(prec+1), using ln K >= (log2 K) * 0.69.
    target = Fraction(1 << (prec_bits + 1))
    cutoff = 2
    while cutoff * (cutoff.bit_length() - 1) * Fraction(69, 100) < target:
        cutoff *= 2
    return cutoff


@lru_cache(maxsize=32)
def constant_c1(prec_bits: int = C1_BITS) -> DyadicInterval:
    """
    Enclose C1 = sum_{k>=2} 1/(k^2 ln k), about 0.61.

    The series is summed up to a cutoff K; the tail is between 0 and 1/(K ln K).

    :param prec_bits: the required precision, at most C1_MAX_BITS.
    :return: an enclosure of C1.
    :raises DomainError: if prec_bits is out of range.
    """
    if not 1 <= prec_bits <= C1_MAX_BITS:
        err = f"C1 can be enclosed to between 1 and {C1_MAX_BITS} bits, got {prec_bits}."
        raise DomainError(err)

    cutoff = _c1_cutoff(prec_bits)
    w = prec_bits + cutoff.bit_length() + 4
    total = DyadicInterval(0, 0, 0)
    for k in range(2, cutoff):
        total = (total + _reciprocal_k_log(k, 2, w)).round_outward(w)
    tail = _reciprocal_k_log(cutoff, 1, w)
    logger.debug("C1 partial sum to %d is %s with tail below %s.", cutoff - 1, total, tail.upper)
    return DyadicInterval.from_bounds(total.lower, total.upper + tail.upper, prec_bits + 4)


def tail_constant() -> Fraction:
    """K0 = 2 * C1, as an upper bound: ||u_A - u_m||_sup <= K0 / G(m+1)."""
    return 2 * constant_c1(C1_BITS).upper


def _p_coefficient(n: int, k: int, prec_bits: int) -> DyadicInterval:
    def compute(w: int) -> DyadicInterval:
        return _reciprocal_k_log(k, 2, w + 4).divide(gauge_G(n, w + 4), w + 2)

    return refine_to_width(compute, prec_bits)


@lru_cache(maxsize=512)
def poly_p(n: int) -> TrigPoly:
    """
    The polynomial p_n(t) = (1/G(n)) sum_{k=2}^{n+1} sin(kt) / (k^2 ln k).

    Its derivative at 0 is exactly 1, which is also its sup norm, while ||p_n||_sup <= C1 / G(n).

    :param n: the index, at least 1.
    :return: p_n with computable sine coefficients.
    """
    if n < 1:
        err = f"p_n is defined for n >= 1, got {n}."
        raise DomainError(err)
    sines: List[Any] = [Fraction(0)]
    for k in range(2, n + 2):
        sines.append(CReal.from_enclosure(partial(_p_coefficient, n, k), provenance=f"p_{n}[{k}]"))
    return TrigPoly(tuple([Fraction(0)] * (n + 2)), tuple(sines))


@dataclass(frozen=True)
class UAFunction:
    """A truncation u_m = sum_{n<=m} 2^-phi(n) p_n of the function u_A for a c.e. set A.

    The full u_A is continuous with ||u_A - u_m|| <= tail_bound(m), and u_A'(0) = x_A; for a non-computable A
    it is a computable function whose derivative is continuous but not computable.
    """

    values: Tuple[int, ...]
    partial_sum: TrigPoly
    exhausted: bool
    tail: Fraction

    @property
    def m(self) -> int:
        return len(self.values)

    def weight(self) -> Fraction:
        """sum_{n<=m} 2^-phi(n), which equals u_m'(0)."""
        return sum((Fraction(1, 1 << value) for value in self.values), Fraction(0))

    def tail_bound(self) -> Fraction:
        """An upper bound on ||u_A - u_m||_sup, or 0 when the enumeration is known to be complete."""
        if self.exhausted:
            return Fraction(0)
        return self.tail / gauge_G(self.m + 1, 16).lower

    def to_dict(self, prec_bits: int) -> Dict[str, Any]:
        return {
            "m": self.m,
            "values": list(self.values),
            "exhausted": self.exhausted,
            "weight": fraction_to_string(self.weight()),
            "tail_bound": fraction_to_string(self.tail_bound()),
            "coefficients": self.partial_sum.to_dict(prec_bits),
        }


def build_uA(e: Enumerator, m: int, step_limit: int = DEFAULT_STEP_LIMIT) -> UAFunction:
    """
    Build the partial sum u_m from the first m distinct values enumerated by e.

    :param e: the enumerator of A.
    :param m: the number of terms, at least 0.
    :param step_limit: the most enumerator steps to spend.
    :return: the truncation, marked exhausted when the enumerator halted having emitted all of A.
    :raises BudgetExhaustedError: if the enumerator is still running when the step limit is reached.
    :raises DomainError: if m is negative.
    """
    if m < 0:
        err = f"Number of terms must be non-negative, got {m}."
        raise DomainError(err)
    available = e.ensure(m, step_limit)
    values = tuple(e.emitted[:available])
    terms = [(Fraction(1, 1 << value), poly_p(index)) for index, value in enumerate(values, 1)]
    partial_sum = linear_combination(terms)
    logger.debug("Built u_%d from %s.", available, values)
    exhausted = e.halted and available == len(e.emitted)
    return UAFunction(values, partial_sum, exhausted=exhausted, tail=tail_constant())


def sigma1_to_function(e: Enumerator, m: int, step_limit: int = DEFAULT_STEP_LIMIT) -> TrigPoly:
    """The degree m+1 trigonometric polynomial u_m for the enumeration e."""
    return build_uA(e, m, step_limit).partial_sum


def uA_effective(e: Enumerator, step_limit: int = DEFAULT_STEP_LIMIT) -> EffectiveFunction:
    """
    u_A as an effective function: approximant m is u_m and the modulus picks m with K0/G(m+1) <= 2^-N.

    The gauge grows so slowly that the modulus is astronomically large for all but the smallest N; this is
    useful for finite sets, whose approximants stop changing once A is exhausted.
    """
    tail = tail_constant()

    def approximant(m: int) -> TrigPoly:
        return sigma1_to_function(e, m, step_limit)

    def modulus(n: int) -> int:
        target = Fraction(1, 1 << n)
        m = 0
        while True:
            available = e.ensure(m, step_limit)
            if available < m or tail / gauge_G(m + 1, 16).lower <= target:
                return m
            m += 1

    return EffectiveFunction(approximant, modulus, label="u_A")


@dataclass(frozen=True)
class GaugeSchedule:
    """Strictly increasing indices n_1 < n_2 < ... with sum_k 1/G(n_k) bounded by `declared_bound`."""

    indices: Tuple[int, ...]
    declared_bound: Fraction

    def __post_init__(self):
        if not self.indices:
            err = "A gauge schedule needs at least one index."
            raise ValidationError(err)
        if self.indices[0] < 1 or any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            err = f"Schedule indices must be positive and strictly increasing, got {self.indices}."
            raise ValidationError(err)
        object.__setattr__(self, "declared_bound", as_rational(self.declared_bound))
        lower = sum((1 / gauge_G(n, 16).upper for n in self.indices), Fraction(0))
        if lower > self.declared_bound:
            err = f"sum 1/G(n_k) is at least {float(lower):.6g}, above the declared bound {self.declared_bound}."
            raise ValidationError(err)

    @classmethod
    def from_threshold(
        cls, count: int, rule: Callable[[int], RationalLike] = lambda k: k * k, search_limit: int = 4096
    ) -> "GaugeSchedule":
        """
        Pick n_k as the first index after n_{k-1} with G(n_k) > rule(k).

        With rule(k) = k^2 the reciprocals sum to less than pi^2/6, but G grows so slowly that only the first
        term or two can be materialized.

        :param count: the number of indices.
        :param rule: the threshold for the k-th index, k from 1.
        :param search_limit: the largest index searched.
        :return: the schedule, with the sum of certified upper bounds of 1/G(n_k) as its declared bound.
        :raises ValidationError: if an index can't be found below search_limit.
        """
        indices: List[int] = []
        bound = Fraction(0)
        w = 24
        running = DyadicInterval(0, 0, 0)
        n = 0
        for k in range(1, count + 1):
            threshold = as_rational(rule(k))
            while True:
                n += 1
                if n > search_limit:
                    err = f"No index up to {search_limit} has G(n) > {threshold}; the schedule can't be materialized."
                    raise ValidationError(err)
                running = (running + _reciprocal_k_log(n + 1, 1, w + 16)).round_outward(w + 8)
                if running.lower > threshold:
                    break
            indices.append(n)
            bound += 1 / running.lower
        return cls(tuple(indices), bound)

    def increments(self, witness: MonotoneWitness, count: int) -> List[Fraction]:
        """
        d_1 = w_1, d_k = w_k - w_{k-1} for k = 2..count.

        :raises ValidationError: if the witness decreases.
        """
        values = [witness.term(k) for k in range(count + 1)]
        steps = [values[1]] + [b - a for a, b in zip(values[1:], values[2:])]
        for k, step in enumerate(steps, 1):
            if step < 0:
                err = f"Witness decreases at term {k}: increment {step}."
                raise ValidationError(err)
        return steps

    def tail_bound(self, count: int, increment_bound: RationalLike = 1) -> Fraction:
        """
        An upper bound on the sup norm of sum_{k>count} d_k p_{n_k}, for increments d_k <= increment_bound.

        Uses ||p_n|| <= C1 / G(n) and the declared bound on sum_k 1/G(n_k).
        """
        seen = sum((1 / gauge_G(n, 16).upper for n in self.indices[:count]), Fraction(0))
        remaining = max(Fraction(0), self.declared_bound - seen)
        return as_rational(increment_bound) * constant_c1().upper * remaining

    def to_dict(self) -> Dict[str, Any]:
        return {"indices": list(self.indices), "declared_bound": fraction_to_string(self.declared_bound)}


def sigma1_general_construction(w: MonotoneWitness, schedule: GaugeSchedule, K: int) -> TrigPoly:
    """
    P_K = sum_{k<=K} d_k p_{n_k} with d_k the increments of the witness.

    P_K'(0) = w_K, so the limit polynomial's derivative at 0 is the limit of the witness.

    :param w: a nondecreasing witness.
    :param schedule: the indices n_k.
    :param K: the number of terms.
    :return: the partial sum.
    :raises ValidationError: if K exceeds the schedule or the witness decreases.
    """
    if K < 0 or K > len(schedule.indices):
        err = f"K must be between 0 and {len(schedule.indices)}, got {K}."
        raise ValidationError(err)
    steps = schedule.increments(w, K) if K else []
    return linear_combination([(step, poly_p(n)) for step, n in zip(steps, schedule.indices)])


def _poisson_derivative_factor(r: Fraction) -> Fraction:
    return 2 * r / (1 - r) ** 2


def dseq_lower_bounds(u: Union[TrigPoly, EffectiveFunction], n: int, prec_bits: int) -> DyadicInterval:
    """
    Enclose d_n = ||(P_{1-1/n} u)'||_sup.

    These values are computable, nondecreasing in n, and tend to ||u'|| (or infinity); they give lower bounds
    of the derivative's sup norm that converge without any rate.  For an effective function the
    approximation error is carried through the kernel bound ||(P_r h)'|| <= 2r/(1-r)^2 ||h||.

    :param u: a trigonometric polynomial or an effective function.
    :param n: the index, at least 2.
    :param prec_bits: the required precision.
    :return: an enclosure of d_n.
    :raises DomainError: if n < 2.
    """
    if n < 2:  # noqa: PLR2004
        err = f"d_n is defined for n >= 2, got {n}."
        raise DomainError(err)
    r = 1 - Fraction(1, n)
    if isinstance(u, TrigPoly):
        return certified_sup(u.poisson(r).derivative(), prec_bits)

    factor = _poisson_derivative_factor(r)
    depth = prec_bits + 2 + (-(-factor.numerator // factor.denominator)).bit_length()
    allowance = factor * Fraction(1, 1 << depth)
    core = certified_sup(u.approximation(depth).poisson(r).derivative(), prec_bits + 2)
    return DyadicInterval.from_bounds(max(Fraction(0), core.lower - allowance), core.upper + allowance, prec_bits + 3)


def dseq(u: Union[TrigPoly, EffectiveFunction], n_max: int, prec_bits: int) -> Iterator[Tuple[int, DyadicInterval]]:
    """Yield (n, d_n enclosure) for n = 2..n_max."""
    for n in range(2, n_max + 1):
        yield n, dseq_lower_bounds(u, n, prec_bits)


def certified_derivative_lower_bound(enclosures: Sequence[DyadicInterval]) -> Optional[Fraction]:
    """The best certified lower bound for ||u'|| from a run of d_n enclosures."""
    if not enclosures:
        return None
    return max(enclosure.lower for enclosure in enclosures)
