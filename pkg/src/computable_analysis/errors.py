# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
from typing import Any, Optional


class ComputableAnalysisError(Exception):
    """Base class for all errors raised by computable_analysis."""


class DomainError(ComputableAnalysisError, ValueError):
    """An argument lies outside the mathematical domain of an operation (eg: ln(q) for q <= 0)."""


class ValidationError(ComputableAnalysisError, ValueError):
    """A program, schedule, profile or configuration is malformed."""


class DeserializationError(ValidationError):
    """A serialized document could not be turned back into a domain object."""


class BudgetExhaustedError(ComputableAnalysisError):
    """A step budget ran out before the requested result was produced.

    Running out of budget is not a failure of the mathematics: it is the only observable outcome of a computation
    that has not halted yet.  Whatever was produced before the budget ran out is kept in `partial`.
    """

    def __init__(self, message: str, partial: Optional[Any] = None):
        super().__init__(message)
        self.partial = partial
