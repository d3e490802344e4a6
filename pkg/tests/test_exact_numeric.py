# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
import random
from fractions import Fraction

import mpmath
import pytest

from computable_analysis.errors import DeserializationError, DomainError, ValidationError
from computable_analysis.exact_numeric import (
    DyadicInterval,
    as_rational,
    enclose_cos,
    enclose_ln,
    enclose_pi,
    enclose_sin,
    enclose_sincos_multiples,
    interval_arith,
    rational_to_interval,
    refine_to_width,
)

mpmath.mp.dps = 80


def _mp(value: Fraction) -> mpmath.mpf:
    return mpmath.mpf(value.numerator) / value.denominator


def _brackets(interval: DyadicInterval, value: mpmath.mpf) -> bool:
    return _mp(interval.lower) <= value <= _mp(interval.upper)


def _random_interval(rng: random.Random) -> DyadicInterval:
    exp = -rng.randint(0, 12)
    lo = rng.randint(-4000, 4000)
    return DyadicInterval(lo, lo + rng.randint(0, 300), exp)


def _random_point(rng: random.Random, interval: DyadicInterval) -> Fraction:
    return interval.lower + interval.width * Fraction(rng.randint(0, 1000), 1000)


def test_as_rational():
    assert as_rational("3/8") == Fraction(3, 8)
    assert as_rational("0.5") == Fraction(1, 2)
    assert as_rational(-2) == Fraction(-2)
    assert as_rational(Fraction(1, 3)) == Fraction(1, 3)


def test_as_rational_rejects_floats_and_bad_literals():
    with pytest.raises(ValidationError):
        as_rational(0.5)
    with pytest.raises(ValidationError):
        as_rational(True)
    with pytest.raises(DomainError):
        as_rational("three")


def test_interval_views():
    interval = DyadicInterval.from_bounds(Fraction(1, 4), Fraction(3, 4), 4)
    assert interval.lower == Fraction(1, 4)
    assert interval.upper == Fraction(3, 4)
    assert interval.width == Fraction(1, 2)
    assert interval.midpoint == Fraction(1, 2)
    assert interval.radius == Fraction(1, 4)
    assert interval.bits == 4
    assert interval.contains(Fraction(1, 2))
    assert not interval.contains(1)
    assert interval.is_positive()
    assert interval.width_within(1)
    assert not interval.width_within(2)


def test_exact_rejects_non_dyadic():
    assert DyadicInterval.exact(Fraction(3, 8)).is_point()
    with pytest.raises(DomainError):
        DyadicInterval.exact(Fraction(1, 3))


def test_out_of_order_endpoints():
    with pytest.raises(ValidationError):
        DyadicInterval(2, 1, 0)


def test_from_rational_rounds_outward():
    interval = DyadicInterval.from_rational(Fraction(1, 3), 10)
    assert interval.contains(Fraction(1, 3))
    assert interval.width_within(10)


def test_rational_to_interval():
    interval = rational_to_interval(Fraction(2, 3), 20)
    assert interval.contains(Fraction(2, 3))
    assert interval.width_within(20)


@pytest.mark.unit
def test_interval_arith_containment():
    rng = random.Random(20240611)
    for _ in range(1000):
        a, b = _random_interval(rng), _random_interval(rng)
        x, y = _random_point(rng, a), _random_point(rng, b)
        assert interval_arith(a, b, "+").contains(x + y)
        assert interval_arith(a, b, "-").contains(x - y)
        assert interval_arith(a, b, "*").contains(x * y)
        if not b.contains(0):
            bits = rng.randint(10, 40)
            quotient = interval_arith(a, b, "/", bits)
            assert quotient.contains(x / y)
            assert quotient.bits == bits


def test_interval_arith_accepts_unicode_operators():
    a = DyadicInterval.exact(3)
    b = DyadicInterval.exact(2)
    assert interval_arith(a, b, "−").lower == 1
    assert interval_arith(a, b, "×").lower == 6
    assert interval_arith(a, b, "÷", 8).contains(Fraction(3, 2))


def test_interval_arith_unknown_operator():
    with pytest.raises(ValidationError):
        interval_arith(DyadicInterval.exact(1), DyadicInterval.exact(1), "^")


def test_division_by_interval_containing_zero():
    with pytest.raises(DomainError):
        interval_arith(DyadicInterval.exact(1), DyadicInterval(-1, 1, 0), "/")


def test_intersect_disjoint():
    a = DyadicInterval(0, 1, 0)
    b = DyadicInterval(2, 3, 0)
    with pytest.raises(DomainError):
        a.intersect(b)
    assert a.intersect(DyadicInterval(1, 2, -1)).upper == 1


def test_hull():
    hull = DyadicInterval.hull([DyadicInterval(0, 1, 0), DyadicInterval(-3, -1, -2)])
    assert hull.lower == Fraction(-3, 4)
    assert hull.upper == 1


def test_round_outward_keeps_containment():
    interval = DyadicInterval(3, 5, -10)
    rounded = interval.round_outward(4)
    assert rounded.contains(interval)
    assert rounded.bits == 4


def test_to_dict():
    interval = DyadicInterval.from_bounds(Fraction(-3, 8), Fraction(1, 2), 3)
    assert interval.to_dict() == {"lo": "-0.375", "hi": "0.5", "bits": 3}
    restored = DyadicInterval.from_dict({"lo": "-0.375", "hi": "0.5", "bits": 3})
    assert restored.lower == Fraction(-3, 8)
    assert restored.upper == Fraction(1, 2)


def test_from_dict_rejects_inexact_endpoints():
    with pytest.raises(DeserializationError):
        DyadicInterval.from_dict({"lo": "0.1", "hi": "0.2", "bits": 3})
    with pytest.raises(DeserializationError):
        DyadicInterval.from_dict({"lo": "0.5", "bits": 3})


def test_refine_to_width_negative_precision():
    with pytest.raises(DomainError):
        refine_to_width(lambda w: DyadicInterval(0, 0, -w), -1)


def test_enclose_pi():
    for bits in (10, 100, 200):
        pi = enclose_pi(bits)
        assert _brackets(pi, mpmath.pi)
        assert pi.width_within(bits)


@pytest.mark.unit
def test_enclose_sin_and_cos_against_mpmath():
    rng = random.Random(7)
    for _ in range(50):
        t = Fraction(rng.randint(-20000, 20000), rng.randint(1, 1000))
        bits = rng.randint(10, 40)
        s = enclose_sin(t, bits)
        c = enclose_cos(t, bits)
        assert s.width_within(bits)
        assert c.width_within(bits)
        assert _brackets(s, mpmath.sin(_mp(t)))
        assert _brackets(c, mpmath.cos(_mp(t)))
        assert (s * s + c * c).contains(1)


def test_enclose_sin_special_points():
    assert enclose_sin(0, 20).contains(0)
    assert enclose_cos(0, 20).contains(1)
    assert -1 <= enclose_sin(Fraction(355, 226), 30).lower
    assert enclose_sin(Fraction(355, 226), 30).upper <= 1


def test_enclose_sin_rejects_zero_precision():
    with pytest.raises(DomainError):
        enclose_sin(1, 0)


def test_enclose_sincos_multiples():
    t = Fraction(7, 5)
    cosines, sines = enclose_sincos_multiples(t, 12, 30)
    assert len(cosines) == len(sines) == 13
    for k in range(13):
        assert cosines[k].width_within(30)
        assert sines[k].width_within(30)
        assert _brackets(cosines[k], mpmath.cos(k * _mp(t)))
        assert _brackets(sines[k], mpmath.sin(k * _mp(t)))


def test_enclose_ln():
    for q in (Fraction(2), Fraction(3), Fraction(1, 7), Fraction(1000), Fraction(9, 8)):
        interval = enclose_ln(q, 40)
        assert interval.width_within(40)
        assert _brackets(interval, mpmath.log(_mp(q)))


def test_enclose_ln_of_one_is_exact():
    interval = enclose_ln(1, 30)
    assert interval.is_point()
    assert interval.lower == 0


def test_enclose_ln_domain():
    with pytest.raises(DomainError):
        enclose_ln(0, 10)
    with pytest.raises(DomainError):
        enclose_ln(Fraction(-1, 2), 10)


def test_ln_four_is_twice_ln_two():
    ln4 = enclose_ln(4, 40)
    twice_ln2 = interval_arith(DyadicInterval.exact(2), enclose_ln(2, 41), "*")
    both = ln4.intersect(twice_ln2)
    assert _brackets(both, mpmath.log(4))
    assert ln4.overlaps(twice_ln2)


@pytest.mark.parametrize(
    "enclose,value",
    [
        (enclose_pi, mpmath.pi),
        (lambda p: enclose_sin(Fraction(7, 3), p), mpmath.sin(mpmath.mpf(7) / 3)),
        (lambda p: enclose_cos(Fraction(-5, 2), p), mpmath.cos(mpmath.mpf(-5) / 2)),
        (lambda p: enclose_ln(Fraction(10, 3), p), mpmath.log(mpmath.mpf(10) / 3)),
    ],
)
def test_refinement_never_widens_the_running_intersection(enclose, value):
    running = enclose(1)
    for p in range(2, 41):
        refined = running.intersect(enclose(p))
        assert refined.width <= running.width
        assert refined.width_within(p)
        assert _brackets(refined, value)
        running = refined
