# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
from fractions import Fraction
from typing import Any

from computable_analysis.errors import DeserializationError


def dyadic_to_decimal(mantissa: int, exp: int) -> str:
    """
    Convert the dyadic rational mantissa * 2**exp to an exact decimal string.

    Every dyadic rational has a terminating decimal expansion, so nothing is rounded.

    :param mantissa: The integer mantissa.
    :param exp: The binary exponent.
    :return: The decimal string, eg: "-0.375".
    """
    if exp >= 0:
        return str(mantissa << exp)

    places = -exp
    sign = "-" if mantissa < 0 else ""
    scaled = abs(mantissa) * 5**places
    digits = str(scaled).rjust(places + 1, "0")
    whole, frac = digits[:-places], digits[-places:].rstrip("0")
    if not frac:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac}"


def decimal_to_fraction(text: Any) -> Fraction:
    """
    Convert a decimal or rational string back to an exact Fraction.

    :param text: The string to convert, eg: "0.375" or "3/8".
    :return: The exact value.
    :raises DeserializationError: If the string is not a rational literal.
    """
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        err = f"Expected a decimal string, got {text!r}"
        raise DeserializationError(err)
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        err = f"'{text}' is not an exact decimal or rational literal"
        raise DeserializationError(err) from exc


def fraction_to_string(value: Fraction) -> str:
    """
    Convert a Fraction to its "p/q" string form, or "p" for integers.

    :param value: The value to convert.
    :return: The string form.
    """
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"

