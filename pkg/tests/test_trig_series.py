# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
import random
from fractions import Fraction

import mpmath
import pytest

from computable_analysis.creal import CReal
from computable_analysis.errors import DeserializationError, DomainError, ValidationError
from computable_analysis.trig_series import (
    EffectiveFunction,
    TrigPoly,
    certified_sup,
    derivative,
    derivative_consistency,
    eval_trig_poly,
    linear_combination,
    poisson,
    wiener_norm,
)

mpmath.mp.dps = 50


def _mp(value: Fraction) -> mpmath.mpf:
    return mpmath.mpf(value.numerator) / value.denominator


def _value(p: TrigPoly, t: mpmath.mpf) -> mpmath.mpf:
    total = _mp(p.cos[0]) / 2
    for k in range(1, p.degree + 1):
        total += _mp(p.cos[k]) * mpmath.cos(k * t) + _mp(p.sin[k - 1]) * mpmath.sin(k * t)
    return total


def _random_poly(rng: random.Random, degree: int) -> TrigPoly:
    return TrigPoly(
        tuple(Fraction(rng.randint(-20, 20), rng.randint(1, 8)) for _ in range(degree + 1)),
        tuple(Fraction(rng.randint(-20, 20), rng.randint(1, 8)) for _ in range(degree)),
    )


@pytest.fixture
def sample() -> TrigPoly:
    # 1/4 + cos t - 1/2 sin 2t
    return TrigPoly.from_coefficients(cos=[Fraction(1, 2), 1], sin=[0, Fraction(-1, 2)])


def test_construction(sample):
    assert sample.degree == 2
    assert sample.is_exact()
    assert sample.cos == (Fraction(1, 2), Fraction(1), Fraction(0))
    assert sample.sin == (Fraction(0), Fraction(-1, 2))
    assert TrigPoly.constant(3).cos == (Fraction(6),)
    assert TrigPoly.cosine(0, 3).cos == (Fraction(6),)
    assert TrigPoly.sine(3).sin == (0, 0, 1)
    assert TrigPoly.zero(2).degree == 2


def test_construction_errors():
    with pytest.raises(ValidationError):
        TrigPoly((Fraction(1),), (Fraction(1),))
    with pytest.raises(DomainError):
        TrigPoly.sine(0)


def test_algebra(sample):
    doubled = sample + sample
    assert doubled.cos == tuple(2 * value for value in sample.cos)
    assert (sample - sample).cos == (0, 0, 0)
    assert (-sample).sin == (0, Fraction(1, 2))
    assert sample.scale(4).cos == (2, 4, 0)
    mixed = sample + TrigPoly.sine(4)
    assert mixed.degree == 4
    assert mixed.sin[3] == 1


def test_derivative(sample):
    dp = derivative(sample)
    # -sin t - cos 2t
    assert dp.cos == (0, 0, -1)
    assert dp.sin == (-1, 0)
    assert derivative(TrigPoly.constant(5)).cos == (0,)


def test_poisson(sample):
    smoothed = poisson(sample, Fraction(1, 2))
    assert smoothed.cos == (Fraction(1, 2), Fraction(1, 2), 0)
    assert smoothed.sin == (0, Fraction(-1, 8))
    assert poisson(sample, 0).cos == (Fraction(1, 2), 0, 0)
    with pytest.raises(DomainError):
        poisson(sample, 1)
    with pytest.raises(DomainError):
        poisson(sample, Fraction(-1, 3))


@pytest.mark.unit
def test_poisson_laws():
    rng = random.Random(11)
    for _ in range(50):
        p = _random_poly(rng, rng.randint(1, 6))
        r = Fraction(rng.randint(0, 15), 16)
        rho = Fraction(rng.randint(0, 15), 16)
        assert p.poisson(r).poisson(rho) == p.poisson(r * rho)
        assert p.poisson(r).derivative() == p.derivative().poisson(r)


@pytest.mark.unit
def test_poisson_maximum_modulus():
    rng = random.Random(12)
    for _ in range(8):
        p = _random_poly(rng, rng.randint(1, 4))
        r = Fraction(rng.randint(0, 15), 16)
        assert certified_sup(p.poisson(r), 12).lower <= certified_sup(p, 12).upper + Fraction(1, 1 << 12)


@pytest.mark.slow
def test_poisson_maximum_modulus_on_the_law_samples():
    # Same draws as test_poisson_laws.
    rng = random.Random(11)
    for _ in range(50):
        p = _random_poly(rng, rng.randint(1, 6))
        r = Fraction(rng.randint(0, 15), 16)
        rho = Fraction(rng.randint(0, 15), 16)
        bound = certified_sup(p, 12).upper + Fraction(1, 1 << 12)
        assert certified_sup(p.poisson(r), 12).lower <= bound
        assert certified_sup(p.poisson(r * rho), 12).lower <= bound


def test_eval_against_mpmath(sample):
    for t in (Fraction(0), Fraction(1, 3), Fraction(-7, 2), Fraction(100)):
        value = eval_trig_poly(sample, t, 30)
        assert value.width_within(30)
        assert _mp(value.lower) <= _value(sample, _mp(t)) <= _mp(value.upper)


def test_eval_at_a_computable_real(sample):
    quarter_pi = CReal.pi().scale(Fraction(1, 4))
    value = eval_trig_poly(sample, quarter_pi, 25)
    assert value.width_within(25)
    assert _mp(value.lower) <= _value(sample, mpmath.pi / 4) <= _mp(value.upper)


def test_eval_rejects_zero_precision(sample):
    with pytest.raises(DomainError):
        eval_trig_poly(sample, 0, 0)


def test_at(sample):
    x = sample.at(Fraction(1, 2))
    assert abs(_mp(x.approx(40)) - _value(sample, mpmath.mpf(1) / 2)) <= mpmath.mpf(2) ** -40
    assert TrigPoly.constant(Fraction(1, 3)).at(5).exact_value == Fraction(1, 3)


def test_wiener_norm(sample):
    norm = wiener_norm(sample, 20)
    assert norm.contains(Fraction(7, 4))
    assert norm.width_within(20)


def test_certified_sup_of_cosine():
    sup = certified_sup(TrigPoly.cosine(1, 3), 20)
    assert sup.contains(3)
    assert sup.width_within(20)


def test_certified_sup_grid_method():
    sup = certified_sup(TrigPoly.sine(2, Fraction(1, 2)), 6, method="grid")
    assert sup.contains(Fraction(1, 2))
    assert sup.width_within(6)


def test_certified_sup_methods_agree(sample):
    adaptive = certified_sup(sample, 14)
    grid = certified_sup(sample, 6, method="grid")
    assert grid.contains(adaptive)
    # |1/4 + cos t - 1/2 sin 2t| peaks at t = -pi/6.
    oracle = mpmath.mpf(1) / 4 + 3 * mpmath.sqrt(3) / 4
    assert _mp(adaptive.lower) <= oracle <= _mp(adaptive.upper)


def test_certified_sup_of_constants_and_zero():
    assert certified_sup(TrigPoly.constant(Fraction(-5, 2)), 10).contains(Fraction(5, 2))
    assert certified_sup(TrigPoly.zero(3), 10).contains(0)


def test_certified_sup_errors(sample):
    with pytest.raises(DomainError):
        certified_sup(sample, 0)
    with pytest.raises(ValidationError):
        certified_sup(sample, 10, method="newton")  # type: ignore[arg-type]


def test_linear_combination():
    p = TrigPoly.sine(1)
    q = TrigPoly.cosine(2, CReal.pi())
    combined = linear_combination([(Fraction(1, 2), p), (2, q)])
    assert combined.degree == 2
    assert combined.sin[0] == Fraction(1, 2)
    assert abs(_mp(combined.cos[2].approx(30)) - 2 * mpmath.pi) <= mpmath.mpf(2) ** -30
    assert linear_combination([]).degree == 0


def test_derivative_consistency():
    f = TrigPoly.sine(3)
    g = f.derivative()
    assert derivative_consistency(f, g, Fraction(9, 10), 12).contains(0)
    gap = derivative_consistency(f, TrigPoly.cosine(3, 2), Fraction(1, 2), 12)
    assert gap.contains(Fraction(1, 8))


def test_to_dict_and_from_dict(sample):
    data = sample.to_dict(16)
    assert data["degree"] == 2
    assert data["cos"][0] == {"lo": "0.5", "hi": "0.5", "bits": 16}
    assert TrigPoly.from_dict(data) == sample
    assert TrigPoly.from_dict({"cos": ["1/2", "1"], "sin": ["0", "-0.5"]}) == sample


def test_from_dict_errors():
    with pytest.raises(DeserializationError):
        TrigPoly.from_dict({"cos": [{"lo": "0", "hi": "0.5", "bits": 1}]})
    with pytest.raises(DeserializationError):
        TrigPoly.from_dict({"cos": ["one"]})
    with pytest.raises(DeserializationError):
        TrigPoly.from_dict(["1"])  # type: ignore[arg-type]


def test_effective_function():
    # Partial sums of sum_k 2^-k cos(kt); approximant m is within 2^-m of the limit.
    def approximant(m: int) -> TrigPoly:
        return linear_combination([(Fraction(1, 1 << k), TrigPoly.cosine(k)) for k in range(1, m + 1)])

    f = EffectiveFunction(approximant, lambda n: n, label="geometric")
    assert f.approximation(5).degree == 5
    gap = f.uniform_gap(3, 6, 16)
    assert gap.contains(Fraction(1, 16) + Fraction(1, 32) + Fraction(1, 64))
    value = f.at(0)
    assert abs(value.approx(10) - 1) <= Fraction(1, 1 << 10)
    with pytest.raises(DomainError):
        f.approximation(-1)

    exact = EffectiveFunction.exact(TrigPoly.sine(1))
    assert exact.approximation(30) == TrigPoly.sine(1)
