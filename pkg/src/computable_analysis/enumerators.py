# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
import json
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple, Union

from computable_analysis.creal import CReal, MonotoneWitness
from computable_analysis.errors import BudgetExhaustedError, DeserializationError, DomainError, ValidationError

logger = logging.getLogger(__name__)

# Upper limit on the steps spent producing a single prefix of emissions.
DEFAULT_STEP_LIMIT = 1_000_000

OPCODES = ("INC", "DEC", "JZ", "EMIT", "JMP", "HALT")

_LABEL_PATTERN = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(.*)$")
_REGISTER_PATTERN = re.compile(r"^[rR]?(\d+)$")


@dataclass(frozen=True)
class Instruction:
    opcode: str
    register: Optional[int] = None
    target: Optional[int] = None

    def __str__(self) -> str:
        operands = [f"r{self.register}"] if self.register is not None else []
        if self.target is not None:
            operands.append(str(self.target))
        return " ".join([self.opcode, ", ".join(operands)]).strip()


def _parse_register(token: str, line: str) -> int:
    match = _REGISTER_PATTERN.match(token.strip())
    if not match:
        err = f"Bad register '{token}' in '{line}'."
        raise ValidationError(err)
    return int(match.group(1))


@dataclass(frozen=True)
class RegisterMachineProgram:
    """A program for a tiny counter machine with unbounded natural-number registers.

    Instructions:
      INC r        add one to register r
      DEC r        subtract one from register r (zero stays zero)
      JZ r, L      jump to L if register r is zero
      JMP L        jump to L
      EMIT r       enumerate the value of register r
      HALT         stop

    Jump targets are instruction indices or `name:` labels.  Running off the end of the program halts it.
    """

    instructions: Tuple[Instruction, ...]
    registers: int

    def __post_init__(self):
        size = len(self.instructions)
        for index, instruction in enumerate(self.instructions):
            if instruction.opcode not in OPCODES:
                err = f"Unknown opcode '{instruction.opcode}' at instruction {index}."
                raise ValidationError(err)
            if instruction.register is not None and not 0 <= instruction.register < self.registers:
                err = (
                    f"Register r{instruction.register} at instruction {index} is out of range "
                    f"(0..{self.registers - 1})."
                )
                raise ValidationError(err)
            if instruction.target is not None and not 0 <= instruction.target <= size:
                err = f"Jump target {instruction.target} at instruction {index} is out of range (0..{size})."
                raise ValidationError(err)

    @classmethod
    def parse(cls, lines: Sequence[str], registers: Optional[int] = None) -> "RegisterMachineProgram":
        """
        Parse a program written one instruction per line.

        :param lines: the program text.  Blank lines and `#` comments are ignored.
        :param registers: the number of registers. Defaults to one more than the highest register used.
        :return: the validated program.
        :raises ValidationError: on syntax errors, unknown labels or out of range operands.
        """
        labels: Dict[str, int] = {}
        pending: List[Tuple[str, List[str], str]] = []
        for raw in lines:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            match = _LABEL_PATTERN.match(line)
            while match:
                name = match.group(1)
                if name.upper() in OPCODES:
                    break
                if name in labels:
                    err = f"Label '{name}' is defined twice."
                    raise ValidationError(err)
                labels[name] = len(pending)
                line = match.group(2).strip()
                match = _LABEL_PATTERN.match(line)
            if not line:
                continue
            opcode, _, rest = line.partition(" ")
            operands = [token.strip() for token in re.split(r"[,\s]+", rest.strip()) if token.strip()]
            pending.append((opcode.upper(), operands, raw))

        def resolve(token: str, line: str) -> int:
            if token.isdigit():
                return int(token)
            if token in labels:
                return labels[token]
            err = f"Unknown jump target '{token}' in '{line}'."
            raise ValidationError(err)

        instructions = []
        for opcode, operands, raw in pending:
            if opcode in ("INC", "DEC", "EMIT"):
                expected = 1
            elif opcode == "JZ":
                expected = 2
            elif opcode == "JMP":
                expected = 1
            elif opcode == "HALT":
                expected = 0
            else:
                err = f"Unknown opcode '{opcode}' in '{raw.strip()}'."
                raise ValidationError(err)
            if len(operands) != expected:
                err = f"{opcode} takes {expected} operand(s), got {len(operands)} in '{raw.strip()}'."
                raise ValidationError(err)

            if opcode == "JZ":
                instructions.append(Instruction(opcode, _parse_register(operands[0], raw), resolve(operands[1], raw)))
            elif opcode == "JMP":
                instructions.append(Instruction(opcode, target=resolve(operands[0], raw)))
            elif opcode == "HALT":
                instructions.append(Instruction(opcode))
            else:
                instructions.append(Instruction(opcode, _parse_register(operands[0], raw)))

        used = [instruction.register for instruction in instructions if instruction.register is not None]
        if registers is None:
            registers = max(used, default=-1) + 1
        return cls(tuple(instructions), registers)

    def to_lines(self) -> List[str]:
        return [str(instruction) for instruction in self.instructions]


@dataclass(frozen=True)
class FiniteSet:
    """An explicit finite set, enumerated in the given order."""

    values: Tuple[int, ...]

    def __post_init__(self):
        for value in self.values:
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                err = f"Finite set members must be natural numbers, got {value!r}."
                raise ValidationError(err)


@dataclass(frozen=True)
class Progression:
    """The arithmetic progression start, start + step, start + 2*step, ..."""

    start: int
    step: int

    def __post_init__(self):
        for name, value in (("start", self.start), ("step", self.step)):
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                err = f"Progression {name} must be a natural number, got {value!r}."
                raise ValidationError(err)


Program = Union[FiniteSet, Progression, RegisterMachineProgram]


@dataclass
class _MachineState:
    pc: int = 0
    registers: List[int] = field(default_factory=list)


class Enumerator:
    """Runs an enumeration program a bounded number of steps at a time.

    Emitted values below 1 and repeats are filtered, so `emitted` lists distinct members of the enumerated set
    in order of first appearance.  For lists and progressions one step produces one candidate; for register
    machines one step executes one instruction.
    """

    def __init__(self, program: Program):
        """
        Create a new Enumerator.

        :param program: a FiniteSet, Progression or RegisterMachineProgram.
        :raises ValidationError: if the program is not one of those.
        """
        if not isinstance(program, (FiniteSet, Progression, RegisterMachineProgram)):
            err = f"Unsupported enumeration program of type {type(program).__name__}."
            raise ValidationError(err)
        self.program = program
        self.emitted: List[int] = []
        self.steps_taken = 0
        self.halted = False
        self._seen: Set[int] = set()
        self._position = 0
        self._state = _MachineState(
            registers=[0] * program.registers if isinstance(program, RegisterMachineProgram) else []
        )

    @property
    def kind(self) -> str:
        if isinstance(self.program, FiniteSet):
            return "finite"
        if isinstance(self.program, Progression):
            return "progression"
        return "vm"

    def fresh(self) -> "Enumerator":
        """A new enumerator for the same program, starting from the beginning."""
        return Enumerator(self.program)

    def _emit(self, value: int):
        if value < 1:
            logger.debug("Enumerator step %d emitted %d, not a positive index; ignoring.", self.steps_taken, value)
            return
        if value in self._seen:
            logger.debug("Enumerator step %d emitted %d again; ignoring.", self.steps_taken, value)
            return
        self._seen.add(value)
        self.emitted.append(value)

    def _step_vm(self, program: RegisterMachineProgram):
        state = self._state
        if state.pc >= len(program.instructions):
            self.halted = True
            return
        instruction = program.instructions[state.pc]
        state.pc += 1
        if instruction.opcode == "INC":
            state.registers[instruction.register] += 1  # type: ignore[index]
        elif instruction.opcode == "DEC":
            if state.registers[instruction.register] > 0:  # type: ignore[index]
                state.registers[instruction.register] -= 1  # type: ignore[index]
        elif instruction.opcode == "JZ":
            if state.registers[instruction.register] == 0:  # type: ignore[index]
                state.pc = instruction.target  # type: ignore[assignment]
        elif instruction.opcode == "JMP":
            state.pc = instruction.target  # type: ignore[assignment]
        elif instruction.opcode == "EMIT":
            self._emit(state.registers[instruction.register])  # type: ignore[index]
        else:
            self.halted = True
        if state.pc >= len(program.instructions):
            self.halted = True

    def step(self, budget: int) -> List[int]:
        """
        Run up to `budget` steps and return the new distinct values emitted by them.

        :param budget: the number of steps to run, at least 0.
        :return: the newly emitted values, in order.
        :raises DomainError: if the budget is negative.
        """
        if budget < 0:
            err = f"Step budget must be non-negative, got {budget}."
            raise DomainError(err)

        before = len(self.emitted)
        program = self.program
        for _ in range(budget):
            if self.halted:
                break
            self.steps_taken += 1
            if isinstance(program, FiniteSet):
                if self._position < len(program.values):
                    self._emit(program.values[self._position])
                    self._position += 1
                if self._position >= len(program.values):
                    self.halted = True
            elif isinstance(program, Progression):
                self._emit(program.start + program.step * self._position)
                self._position += 1
            else:
                self._step_vm(program)
        return self.emitted[before:]

    def ensure(self, count: int, step_limit: int = DEFAULT_STEP_LIMIT) -> int:
        """
        Step until at least `count` values have been emitted or the program halts.

        :param count: the number of emissions wanted.
        :param step_limit: the most steps this call may spend.
        :return: the number of values available, which is less than `count` only if the program halted.
        :raises BudgetExhaustedError: if the step limit is reached first.
        """
        spent = 0
        while len(self.emitted) < count and not self.halted:
            if spent >= step_limit:
                err = f"Enumerator produced {len(self.emitted)} of {count} values within {step_limit} steps."
                raise BudgetExhaustedError(err, partial=list(self.emitted))
            chunk = min(1024, step_limit - spent)
            self.step(chunk)
            spent += chunk
        return min(count, len(self.emitted))

    # -------------------------------------------
    # Serialization

    def to_dict(self) -> Dict[str, Any]:
        program = self.program
        if isinstance(program, FiniteSet):
            return {"type": "finite", "body": list(program.values)}
        if isinstance(program, Progression):
            return {"type": "progression", "body": {"start": program.start, "step": program.step}}
        return {"type": "vm", "body": program.to_lines(), "registers": program.registers}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Enumerator":
        """
        Build an enumerator from its dictionary description.

        :param data: {"type": ..., "body": ...} where the body is a list of naturals for "finite", an object
            {"start", "step"} for "progression", or a list of instruction strings for "vm" (with an optional
            "registers" count).
        :return: the enumerator.
        :raises DeserializationError: if the description is malformed.
        """
        if not isinstance(data, dict) or "type" not in data:
            err = f"Enumerator description must be an object with a 'type', got {data!r}"
            raise DeserializationError(err)
        kind = data["type"]
        try:
            body = data["body"]
            if kind == "finite":
                return cls(FiniteSet(tuple(body)))
            if kind == "progression":
                return cls(Progression(body["start"], body["step"]))
            if kind == "vm":
                return cls(RegisterMachineProgram.parse(body, data.get("registers")))
        except TypeError as exc:
            err = f"Malformed body for enumerator type '{kind}': {data.get('body')!r}"
            raise DeserializationError(err) from exc
        except KeyError as exc:
            err = f"Missing {exc} in enumerator description of type '{kind}'."
            raise DeserializationError(err) from exc
        err = f"Unknown enumerator type '{kind}'. Expected 'finite', 'progression' or 'vm'."
        raise DeserializationError(err)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "Enumerator":
        """Load an enumerator from a JSON description on disk."""
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            err = f"Enumerator file {path} is not valid JSON: {exc}"
            raise DeserializationError(err) from exc
        return cls.from_dict(data)


def step_enumerator(e: Enumerator, budget: int) -> List[int]:
    """Run `budget` steps of an enumerator; returns the new distinct emissions."""
    return e.step(budget)


@dataclass(frozen=True)
class ZWReal:
    """The real sum of 2**-a over a c.e. set, with its monotone witness and, when available, a closed form."""

    witness: MonotoneWitness
    closed_form: Optional[CReal]
    enumerator: Enumerator

    def lower_bound(self, m: int) -> Fraction:
        """The sum over the first m enumerated members: a certified lower bound of the real."""
        return self.witness.term(m)


def _witness_terms(e: Enumerator, step_limit: int):
    def terms(m: int) -> Fraction:
        available = e.ensure(m, step_limit)
        return sum((Fraction(1, 1 << value) for value in e.emitted[:available]), Fraction(0))

    return terms


def _closed_form(program: Program) -> Optional[CReal]:
    if isinstance(program, FiniteSet):
        members = {value for value in program.values if value >= 1}
        return CReal.const(sum((Fraction(1, 1 << value) for value in members), Fraction(0)))
    if isinstance(program, Progression):
        if program.step == 0:
            return CReal.const(Fraction(1, 1 << program.start) if program.start >= 1 else 0)
        first = program.start
        if first < 1:
            first += program.step * -(-(1 - first) // program.step)
        return CReal.const(Fraction(1, 1 << first) / (1 - Fraction(1, 1 << program.step)))
    return None


def zw_real(e: Enumerator, step_limit: int = DEFAULT_STEP_LIMIT) -> ZWReal:
    """
    The real x_A = sum of 2**-a over the set A enumerated by e.

    The witness term m is the sum over the first m distinct emissions, which rises to x_A.  Finite sets and
    progressions also get an exact closed form; register machine programs don't, since x_A need not be
    computable.

    :param e: the enumerator; it is advanced lazily as terms are requested.
    :param step_limit: the most steps spent on any one term.
    :return: the real with its witness.
    """
    witness = MonotoneWitness(_witness_terms(e, step_limit), "nondecreasing", provenance=f"zw({e.kind})")
    return ZWReal(witness=witness, closed_form=_closed_form(e.program), enumerator=e)


def specker_sequence(e: Enumerator, step_limit: int = DEFAULT_STEP_LIMIT) -> MonotoneWitness:
    """The increasing rational sequence whose limit is x_A; for a non-computable A this is a Specker sequence."""
    return MonotoneWitness(_witness_terms(e, step_limit), "nondecreasing", provenance="specker")


# Enumerates the squares 1, 4, 9, ... by adding successive odd numbers into r0.
SQUARES_PROGRAM = (
    "INC r1",
    "top: JZ r1, back",
    "DEC r1",
    "INC r0",
    "INC r2",
    "JMP top",
    "back: JZ r2, out",
    "DEC r2",
    "INC r1",
    "JMP back",
    "out: EMIT r0",
    "INC r1",
    "INC r1",
    "JMP top",
)
