# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from computable_analysis.errors import DeserializationError, DomainError, ValidationError
from computable_analysis.wave_radial import (
    PI,
    THREE_PI,
    PiNumber,
    RadialProfile,
    kirchhoff_quadrature_oracle,
    wave_at_origin,
    window,
)

mpmath.mp.dps = 40


def _mp(value: Fraction) -> mpmath.mpf:
    return mpmath.mpf(value.numerator) / value.denominator


def _bump(t: mpmath.mpf) -> mpmath.mpf:
    return (t - mpmath.pi) ** 2 * (3 * mpmath.pi - t) ** 2


def _bump_slope(t: mpmath.mpf) -> mpmath.mpf:
    return 2 * (t - mpmath.pi) * (3 * mpmath.pi - t) ** 2 - 2 * (t - mpmath.pi) ** 2 * (3 * mpmath.pi - t)


@pytest.fixture
def plateau() -> RadialProfile:
    return window(PiNumber.parse("3/2pi"), PiNumber.parse("5/2pi"))


@pytest.fixture
def two_piece() -> RadialProfile:
    # s^2 on [pi, 2pi], then 1 + 2s - 7s^2 + 4s^3 on [2pi, 3pi]; C^1 at 2pi.
    return RadialProfile((PI, PiNumber.pi(2), THREE_PI), ((0, 0, 1), (1, 2, -7, 4)))


@pytest.mark.parametrize(
    "text,coefficients",
    [
        ("3/2pi", (0, Fraction(3, 2))),
        ("pi/2", (0, Fraction(1, 2))),
        ("16pi^4", (0, 0, 0, 0, 16)),
        ("2*pi + 1/2", (Fraction(1, 2), 2)),
        ("0.75", (Fraction(3, 4),)),
        ("-pi", (0, -1)),
        ("π", (0, 1)),
        ("0", ()),
    ],
)
def test_pi_number_parse(text, coefficients):
    assert PiNumber.parse(text).coefficients == tuple(Fraction(value) for value in coefficients)


@pytest.mark.parametrize("text", ["", "x", "2^3", "pi pi", "3/"])
def test_pi_number_parse_errors(text):
    with pytest.raises(ValidationError):
        PiNumber.parse(text)


def test_pi_number_str():
    assert str(PiNumber.parse("3/2pi")) == "3/2pi"
    assert str(PiNumber.parse("2*pi + 1/2")) == "2pi + 1/2"
    assert str(-PI) == "-pi"
    assert str(PiNumber()) == "0"
    assert str(PiNumber.pi(-32, 4)) == "-32pi^4"


def test_pi_number_algebra():
    assert PI * PI == PiNumber.pi(1, 2)
    assert (PI - PI).is_zero()
    assert 3 * PI == THREE_PI
    assert (PI + 1).coefficients == (1, 1)
    assert (1 - PI).coefficients == (1, -1)
    assert PiNumber.of(Fraction(1, 2)).rational_value == Fraction(1, 2)
    with pytest.raises(DomainError):
        PI.rational_value  # noqa: B018


def test_pi_number_sign():
    assert (PI - 3).sign() == 1
    assert (PI - Fraction(22, 7)).sign() == -1
    assert PiNumber().sign() == 0
    assert PiNumber.of(-2).sign() == -1
    assert THREE_PI.compare(PI * 3) == 0
    assert PI.compare(PiNumber.parse("pi/2")) == 1


def test_pi_number_enclose():
    enclosure = (PI * PI - 1).enclose(40)
    assert enclosure.width_within(40)
    assert _mp(enclosure.lower) <= mpmath.pi**2 - 1 <= _mp(enclosure.upper)
    assert abs(PI.to_float() - float(mpmath.pi)) < 1e-15


def test_bump_values():
    q = RadialProfile.bump()
    for text in ("3.2", "4.7124", "6.2832", "7.854", "9.4"):
        t = Fraction(text)
        value = q.evaluate(t, 30)
        slope = q.derivative(t, 30)
        assert value.width_within(30)
        assert _mp(value.lower) <= _bump(_mp(t)) <= _mp(value.upper)
        assert _mp(slope.lower) <= _bump_slope(_mp(t)) <= _mp(slope.upper)


def test_bump_support():
    q = RadialProfile.bump()
    assert q.evaluate(1, 20).is_point()
    assert q.evaluate(1, 20).lower == 0
    assert q.evaluate(10, 20).lower == 0
    assert q.derivative(10, 20).upper == 0


def test_window_plateau(plateau):
    assert plateau.evaluate(Fraction("6.2832"), 20).contains(1)
    assert plateau.derivative(Fraction("6.2832"), 20).contains(0)
    assert plateau.evaluate(Fraction("3.2"), 20).upper < 1
    assert plateau.knots[1] == PiNumber.pi(Fraction(3, 2))


@pytest.mark.parametrize("a,b", [(PI, PiNumber.pi(2)), (4, 3), (PiNumber.pi(2), THREE_PI)])
def test_window_rejects_bad_plateau(a, b):
    with pytest.raises(ValidationError):
        window(a, b)


def test_knot_jumps(two_piece):
    jumps = two_piece.knot_jumps(20)
    assert len(jumps) == 1
    assert jumps[0]["value_left"].contains(1)
    assert jumps[0]["value_right"].contains(1)
    slope = jumps[0]["slope_left"].intersect(jumps[0]["slope_right"])
    assert _mp(slope.lower) <= 2 / mpmath.pi <= _mp(slope.upper)
    assert RadialProfile.bump().knot_jumps(10) == []


@pytest.mark.parametrize(
    "knots,pieces",
    [
        ((PI, THREE_PI), ((1,),)),
        ((PI, THREE_PI), ((0, 0, 1),)),
        ((0, PI), ((0, 0, 1, -1),)),
        ((PI, PiNumber.pi(2), THREE_PI), ((0, 0, 1), (1, -2, 1))),
        ((PI, PiNumber.pi(2), THREE_PI), ((0, 0, 1, -2, 1),)),
        ((THREE_PI, PI), ((0, 0, 1, -2, 1),)),
        ((PI,), ()),
    ],
)
def test_profile_validation(knots, pieces):
    with pytest.raises(ValidationError):
        RadialProfile(knots, pieces)


def test_profile_algebra(plateau):
    q = RadialProfile.bump()
    assert q + q == q.scale(2)
    assert q + RadialProfile.zero() == q
    assert RadialProfile.zero() + q == q
    half = q.scale(Fraction(1, 2)).evaluate(Fraction("6.2832"), 30)
    assert _mp(half.lower) <= _bump(mpmath.mpf("6.2832")) / 2 <= _mp(half.upper)
    with pytest.raises(DomainError):
        q + plateau  # noqa: B018


def test_profile_float_evaluation():
    q = RadialProfile.bump()
    values = q(np.array([0.0, 2 * np.pi, 12.0]))
    assert values[0] == 0.0
    assert values[2] == 0.0
    assert values[1] == pytest.approx(np.pi**4)


def test_profile_to_dict_and_from_dict(plateau):
    q = RadialProfile.bump()
    data = q.to_dict()
    assert data["knots"] == ["pi", "3pi"]
    assert data["pieces"] == [["0", "0", "16pi^4", "-32pi^4", "16pi^4"]]
    assert RadialProfile.from_dict(data) == q
    assert RadialProfile.from_dict(plateau.to_dict()) == plateau


def test_profile_from_dict_errors():
    with pytest.raises(DeserializationError):
        RadialProfile.from_dict({"knots": ["pi", "3pi"]})
    with pytest.raises(ValidationError):
        RadialProfile.from_dict({"knots": ["pi", "3pi"], "pieces": [["1"]]})


@pytest.mark.parametrize("text", ["4.7124", "6.2832", "7.854"])
def test_wave_at_origin_against_closed_form(text):
    q = RadialProfile.bump()
    t = Fraction(text)
    value = wave_at_origin(q, t, 30)
    assert value.width_within(30)
    expected = _bump(_mp(t)) + _mp(t) * _bump_slope(_mp(t))
    assert _mp(value.lower) <= expected <= _mp(value.upper)


def _smooth_profiles():
    bump = RadialProfile.bump()
    return {
        "bump": bump,
        "window": window(PiNumber.parse("7/4pi"), PiNumber.parse("9/4pi")),
        "blend": bump.scale(Fraction(1, 3)) + bump.scale(Fraction(1, 2)),
    }


@pytest.mark.parametrize("name", ["bump", "window", "blend"])
@pytest.mark.parametrize("text", ["4.7124", "6.2832", "7.854"])
def test_wave_at_origin_against_quadrature(name, text):
    q = _smooth_profiles()[name]
    t = Fraction(text)
    certified = wave_at_origin(q, t, 30).midpoint
    approximate = kirchhoff_quadrature_oracle(q, float(t))
    refined = kirchhoff_quadrature_oracle(q, float(t), h=5e-4)
    assert abs(Fraction(approximate) - certified) <= Fraction(1, 10**6)
    assert abs(refined - approximate) <= 1e-6


def test_wave_on_the_plateau(plateau):
    assert wave_at_origin(plateau, Fraction("6.2832"), 20).contains(1)


def test_wave_before_and_after_the_support():
    q = RadialProfile.bump()
    assert wave_at_origin(q, 1, 20).contains(0)
    assert wave_at_origin(q, 10, 20).contains(0)
    assert wave_at_origin(window(PiNumber.parse("3/2pi"), PiNumber.parse("5/2pi")), 10, 20).contains(0)
    assert kirchhoff_quadrature_oracle(q, 20.0, x=(0.5, 0.0, 0.0)) == 0.0


def test_quadrature_near_the_origin():
    q = RadialProfile.bump()
    centre = kirchhoff_quadrature_oracle(q, 6.2832)
    nearby = kirchhoff_quadrature_oracle(q, 6.2832, x=(1e-3, 0.0, 0.0))
    assert nearby == pytest.approx(centre, abs=1e-3)


def test_wave_domain():
    q = RadialProfile.bump()
    with pytest.raises(DomainError):
        wave_at_origin(q, 0, 10)
    with pytest.raises(DomainError):
        wave_at_origin(q, Fraction(-1, 2), 10)
    with pytest.raises(DomainError):
        kirchhoff_quadrature_oracle(q, 1.0, h=2.0)
    with pytest.raises(ValidationError):
        kirchhoff_quadrature_oracle(q, 1.0, x=(0.0, 0.0))
