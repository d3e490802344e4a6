# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

from typing_extensions import Literal

from computable_analysis.creal import CReal
from computable_analysis.errors import BudgetExhaustedError, DomainError, ValidationError
from computable_analysis.exact_numeric import RationalLike, as_rational
from computable_analysis.schema.serialization import fraction_to_string

logger = logging.getLogger(__name__)

Detector = Callable[[Fraction], "SteppedMachine"]
EventKind = Literal["spawn", "halt", "emit"]


class SteppedMachine(ABC):
    """A computation advanced one step at a time, which may halt.

    Once halted a machine stays halted; `halted_at` records the step on which it halted.
    """

    def __init__(self, label: str):
        self.label = label
        self.steps = 0
        self.halted_at: Optional[int] = None

    @property
    def halted(self) -> bool:
        return self.halted_at is not None

    @property
    def status(self) -> str:
        return "halted" if self.halted else "running"

    def step(self) -> bool:
        """Run one step; returns True if the machine has halted."""
        if self.halted:
            return True
        self.steps += 1
        if self._advance(self.steps):
            self.halted_at = self.steps
            logger.debug("Machine %s halted at step %d.", self.label, self.steps)
        return self.halted

    def run(self, budget: int) -> Optional[int]:
        """
        Step until halted or `budget` steps have been spent by this call.

        :return: the halting step, or None if still running.
        """
        for _ in range(budget):
            if self.step():
                break
        return self.halted_at

    @abstractmethod
    def _advance(self, step: int) -> bool:
        """Perform step number `step` (from 1); return True to halt."""


class PositivitySemidecider(SteppedMachine):
    """Halts exactly when x > 0: at step n it asks for approx(n) and halts once approx(n) > 2**-n.

    If x > 0 it halts by the first n with 2**(1-n) < x; if x <= 0 it runs forever.
    """

    def __init__(self, x: CReal, label: str = "x > 0"):
        super().__init__(label)
        self.x = x
        self.certificate: Optional[Fraction] = None

    def _advance(self, step: int) -> bool:
        approximation = self.x.approx(step)
        if approximation <= 0:
            return False
        if approximation.numerator << step > approximation.denominator:
            self.certificate = approximation
            return True
        return False


def semidecide_positive(x: CReal) -> SteppedMachine:
    """A machine that halts iff x > 0."""
    return PositivitySemidecider(x, label=f"{x.provenance} > 0")


def semidecide_negative(x: CReal) -> SteppedMachine:
    """A machine that halts iff x < 0."""
    return PositivitySemidecider(-x, label=f"{x.provenance} < 0")


def semidecide_below(x: CReal, c: RationalLike) -> SteppedMachine:
    """A machine that halts iff x < c."""
    bound = as_rational(c)
    return PositivitySemidecider(CReal.const(bound) - x, label=f"{x.provenance} < {fraction_to_string(bound)}")


def upper_bound_detector(x: CReal, bound: RationalLike) -> SteppedMachine:
    """A machine that halts iff bound is an upper bound of x, strictly: x < bound."""
    return semidecide_below(x, bound)


def bound_detector(x: CReal) -> Detector:
    """upper_bound_detector with x fixed, in the form dyadic_bound_search takes."""

    def detector(bound: Fraction) -> SteppedMachine:
        return upper_bound_detector(x, bound)

    return detector


@dataclass(frozen=True)
class RaceResult:
    winner: Optional[Literal["A", "B"]]
    step: Optional[int]
    rounds: int

    @property
    def decided(self) -> bool:
        return self.winner is not None

    def to_dict(self) -> Dict[str, Any]:
        return {"winner": self.winner, "step": self.step, "rounds": self.rounds}


def race(a: SteppedMachine, b: SteppedMachine, budget: int) -> RaceResult:
    """
    Alternate single steps of a and b, a first, until one halts or `budget` rounds pass.

    a wins ties: if both would halt in the same round, a's step ran first.

    :param a: machine A.
    :param b: machine B.
    :param budget: the number of rounds, at least 0.
    :return: who halted first and at which of its steps, or no winner.
    :raises DomainError: if the budget is negative.
    """
    if budget < 0:
        err = f"Race budget must be non-negative, got {budget}."
        raise DomainError(err)
    for round_index in range(1, budget + 1):
        if a.step():
            return RaceResult("A", a.halted_at, round_index)
        if b.step():
            return RaceResult("B", b.halted_at, round_index)
    return RaceResult(None, None, budget)


def sign_decider(x: CReal, budget: int) -> Literal["positive", "negative"]:
    """
    Decide the sign of a real known to be nonzero, by racing the two semideciders.

    :param x: a nonzero computable real.
    :param budget: the most rounds to run.
    :return: "positive" or "negative".
    :raises BudgetExhaustedError: if neither side halts within the budget; x may be zero.
    """
    result = race(semidecide_positive(x), semidecide_negative(x), budget)
    if result.winner == "A":
        return "positive"
    if result.winner == "B":
        return "negative"
    err = f"Neither x > 0 nor x < 0 was confirmed within {budget} rounds."
    raise BudgetExhaustedError(err, partial=result)


@dataclass(frozen=True)
class SearchEvent:
    round: int
    event: EventKind
    value: Fraction

    def to_dict(self) -> Dict[str, Any]:
        return {"round": self.round, "event": self.event, "value": fraction_to_string(self.value)}


@dataclass(frozen=True)
class LiveMachine:
    value: Fraction
    spawned: int
    steps: int


@dataclass(frozen=True)
class SearchResult:
    """The bounds emitted by a dyadic bound search, in order, with the event log and the machines left running."""

    bounds: Tuple[Fraction, ...]
    events: Tuple[SearchEvent, ...]
    rounds: int
    live: Tuple[LiveMachine, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rounds": self.rounds,
            "bounds": [fraction_to_string(bound) for bound in self.bounds],
            "events": [event.to_dict() for event in self.events],
        }


def _first_level(bound: Fraction) -> int:
    """The least L >= 1 with 2**-L < bound."""
    level = 1
    while Fraction(1, 1 << level) >= bound:
        level += 1
    return level


def dyadic_bound_search(
    detector: Detector,
    rounds: int,
    max_level: Optional[int] = None,
    start: RationalLike = 1,
) -> SearchResult:
    """
    Dovetail detectors over dyadic rationals to emit ever smaller upper bounds.

    Each round spawns a detector for every odd k/2**level below the current bound U (ascending), moves to the
    next level, and then runs one step of every live detector in spawn order.  When detectors halt the
    smallest halted value is emitted as the new U, all detectors are discarded, and the level restarts at the
    first L with 2**-L < U.

    With detector(lambda) halting iff x < lambda for some x in [0, 1), the emitted bounds decrease strictly
    and converge to x.

    :param detector: maps a dyadic rational to a stepped machine.
    :param rounds: the number of rounds to run.
    :param max_level: stop spawning below 2**-max_level.
    :param start: the initial bound U.
    :return: the emitted bounds with the event log.
    :raises ValidationError: if rounds is negative or the start bound is not positive.
    """
    if rounds < 0:
        err = f"Number of rounds must be non-negative, got {rounds}."
        raise ValidationError(err)
    bound = as_rational(start)
    if bound <= 0:
        err = f"The starting bound must be positive, got {bound}."
        raise ValidationError(err)

    emitted: List[Fraction] = []
    events: List[SearchEvent] = []
    machines: List[Tuple[Fraction, int, SteppedMachine]] = []
    level = _first_level(bound)

    for round_index in range(1, rounds + 1):
        if max_level is None or level <= max_level:
            denominator = 1 << level
            numerator = 1
            while Fraction(numerator, denominator) < bound:
                value = Fraction(numerator, denominator)
                machines.append((value, round_index, detector(value)))
                events.append(SearchEvent(round_index, "spawn", value))
                numerator += 2
            level += 1

        halted = []
        for value, _, machine in machines:
            if machine.step():
                halted.append(value)
                events.append(SearchEvent(round_index, "halt", value))

        if halted:
            bound = min(halted)
            emitted.append(bound)
            events.append(SearchEvent(round_index, "emit", bound))
            logger.debug("Round %d: emitted upper bound %s.", round_index, bound)
            machines = []
            level = _first_level(bound)

    live = tuple(LiveMachine(value, spawned, machine.steps) for value, spawned, machine in machines)
    return SearchResult(tuple(emitted), tuple(events), rounds, live)
