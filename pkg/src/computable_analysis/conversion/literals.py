# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
from fractions import Fraction
from typing import Tuple, Union

from computable_analysis.creal import CReal
from computable_analysis.errors import DomainError, ValidationError
from computable_analysis.exact_numeric import as_rational
from computable_analysis.wave_radial import PiNumber


def parse_rational(text: str) -> Fraction:
    """
    Parse a rational literal such as "3/8", "-2" or "0.5".

    :param text: the literal.
    :return: the exact value.
    :raises DomainError: if the literal is not rational.
    """
    return as_rational(text)


def parse_pi_number(text: str) -> PiNumber:
    """
    Parse an element of Q[pi] such as "3/2pi", "pi/2 + 1" or "0.25".

    :param text: the literal.
    :return: the value.
    :raises ValidationError: if the literal can't be parsed.
    """
    return PiNumber.parse(text)


def parse_real(text: str) -> Union[Fraction, CReal]:
    """
    Parse a literal that is either rational or a multiple of powers of pi.

    :param text: the literal.
    :return: a Fraction when the value is rational, otherwise a CReal enclosing the Q[pi] value.
    """
    try:
        return parse_rational(text)
    except DomainError:
        value = parse_pi_number(text)
    if value.is_rational():
        return value.rational_value
    return CReal.from_enclosure(value.enclose, provenance=str(value))


def parse_set(text: str) -> Tuple[int, ...]:
    """
    Parse a finite set literal such as "1,3" or "{2, 4}"; the empty literal "" or "{}" is the empty set.

    :param text: the literal.
    :return: the members, in the order given.
    :raises ValidationError: if a member is not a natural number.
    """
    body = text.strip().strip("{}").strip()
    if not body:
        return ()
    members = []
    for token in body.split(","):
        item = token.strip()
        if not item.isdigit():
            err = f"Set members must be natural numbers, got '{item}' in '{text}'."
            raise ValidationError(err)
        members.append(int(item))
    return tuple(members)


def parse_point(text: str) -> Tuple[float, float, float]:
    """
    Parse a point of R^3 written "x,y,z" with rational or Q[pi] coordinates.

    :param text: the literal.
    :return: the coordinates as floats, for quadrature.
    :raises ValidationError: unless there are exactly three coordinates.
    """
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != 3:  # noqa: PLR2004
        err = f"A point needs three coordinates, got '{text}'."
        raise ValidationError(err)
    coordinates = [parse_pi_number(part).to_float() for part in parts]
    return coordinates[0], coordinates[1], coordinates[2]


def parse_pair(text: str) -> Tuple[PiNumber, PiNumber]:
    """
    Parse two Q[pi] literals separated by a comma, eg: "3/2pi,5/2pi".

    :raises ValidationError: unless there are exactly two values.
    """
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != 2:  # noqa: PLR2004
        err = f"Expected two comma separated values, got '{text}'."
        raise ValidationError(err)
    return parse_pi_number(parts[0]), parse_pi_number(parts[1])
