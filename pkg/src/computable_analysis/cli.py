# SPDX-FileCopyrightText: 2024-present Alan Meeson <am@carefullycalculated.co.uk>
#
# SPDX-License-Identifier: Apache-2.0
import argparse
import json
import logging
import sys
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import IO, Any, Callable, Dict, Iterator, List, Optional, Sequence, Union

from computable_analysis.__about__ import __version__
from computable_analysis.config import DEFAULT_BUDGET, PRECISION_ENV_VAR, RunConfig, default_precision
from computable_analysis.conversion.literals import (
    parse_pair,
    parse_point,
    parse_rational,
    parse_real,
    parse_set,
)
from computable_analysis.creal import CReal
from computable_analysis.derivative_lab import (
    GaugeSchedule,
    build_uA,
    certified_derivative_lower_bound,
    constant_c1,
    dseq,
    gauge_G,
    poly_p,
    sigma1_general_construction,
    sigma1_to_function,
)
from computable_analysis.dovetail import (
    PositivitySemidecider,
    bound_detector,
    dyadic_bound_search,
    race,
    semidecide_below,
    semidecide_negative,
    semidecide_positive,
)
from computable_analysis.enumerators import (
    SQUARES_PROGRAM,
    Enumerator,
    FiniteSet,
    Progression,
    RegisterMachineProgram,
    specker_sequence,
    zw_real,
)
from computable_analysis.errors import BudgetExhaustedError, DomainError, ValidationError
from computable_analysis.exact_numeric import DyadicInterval
from computable_analysis.schema.records import DSEQ_SCHEMA, ENUM_SCHEMA, WAVE_SCHEMA, RecordWriter, schema_to_dict
from computable_analysis.schema.serialization import dyadic_to_decimal, fraction_to_string
from computable_analysis.trig_series import TrigPoly, certified_sup, eval_trig_poly
from computable_analysis.wave_radial import RadialProfile, kirchhoff_quadrature_oracle, wave_at_origin, window

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_USAGE = 64

# Defaults for the dovetailing search; the budget caps the number of rounds further.
SEARCH_ROUNDS = 40
SEARCH_MAX_LEVEL = 24

# Options naming an input file, in the order RunConfig.input_path is taken from.
INPUT_OPTIONS = ("enum", "poly", "profile")

Handler = Callable[[argparse.Namespace, RunConfig, IO[bytes]], int]


class _ArgumentParser(argparse.ArgumentParser):
    """An ArgumentParser that exits with EXIT_USAGE on usage errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -------------------------------------------
# Output helpers


def _write_document(stream: IO[bytes], document: Dict[str, Any]):
    stream.write((json.dumps(document, indent=2) + "\n").encode("utf-8"))
    stream.flush()


def _midpoint_decimal(interval: DyadicInterval) -> str:
    return dyadic_to_decimal(interval.lo + interval.hi, interval.exp - 1)


def _certified_value(interval: DyadicInterval, prec_bits: int) -> Dict[str, Any]:
    """{approx, error_bound, enclosure}: the midpoint is within 2**-(prec+1) of the value."""
    return {
        "approx": _midpoint_decimal(interval),
        "error_bound": f"2^-{prec_bits}",
        "enclosure": interval.to_dict(),
    }


def _rounded_value(value: Fraction, prec_bits: int) -> Dict[str, Any]:
    """{approx, error_bound} for an exact value that is reported rounded rather than enclosed."""
    point = DyadicInterval.from_rational(value, prec_bits + 1)
    return {"approx": _midpoint_decimal(point), "error_bound": f"2^-{prec_bits}"}


def _jsonable(value: Any) -> Any:
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, Fraction):
        return fraction_to_string(value)
    if hasattr(value, "to_dict"):
        return value.to_dict()
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    return str(value)


@contextmanager
def _output_stream(path: Optional[str]) -> Iterator[IO[bytes]]:
    if path is None:
        yield sys.stdout.buffer
        return
    with open(path, "wb") as stream:
        yield stream


# -------------------------------------------
# Input helpers


def _load_json(path: str) -> Dict[str, Any]:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        err = f"{path} is not valid JSON: {exc}"
        raise ValidationError(err) from exc
    except OSError as exc:
        err = f"Could not read {path}: {exc}"
        raise ValidationError(err) from exc


def _has_enumerator(args: argparse.Namespace) -> bool:
    return any(getattr(args, name, None) is not None for name in ("set", "enum", "progression")) or bool(
        getattr(args, "squares", False)
    )


def _load_enumerator(args: argparse.Namespace) -> Enumerator:
    if args.set is not None:
        return Enumerator(FiniteSet(parse_set(args.set)))
    if args.progression is not None:
        start, step = (int(parse_rational(part)) for part in args.progression.split(",", 1))
        return Enumerator(Progression(start, step))
    if args.squares:
        return Enumerator(RegisterMachineProgram.parse(SQUARES_PROGRAM))
    if args.enum is not None:
        return Enumerator.from_dict(_load_json(args.enum))
    err = "No enumeration given; use one of --set, --progression, --squares or --enum."
    raise ValidationError(err)


def _load_poly(args: argparse.Namespace, config: RunConfig) -> TrigPoly:
    if args.poly is not None:
        p = TrigPoly.from_dict(_load_json(args.poly))
    elif args.sine is not None:
        p = TrigPoly.sine(args.sine)
    elif _has_enumerator(args):
        p = build_uA(_load_enumerator(args), args.m, config.budget).partial_sum
    else:
        err = "No polynomial given; use --poly, --sine, or an enumeration with --m."
        raise ValidationError(err)
    if getattr(args, "poisson", None) is not None:
        p = p.poisson(parse_rational(args.poisson))
    if getattr(args, "derivative", False):
        p = p.derivative()
    return p


def _load_profile(args: argparse.Namespace) -> RadialProfile:
    if args.profile is not None:
        return RadialProfile.from_dict(_load_json(args.profile))
    if args.window is not None:
        a, b = parse_pair(args.window)
        return window(a, b)
    return RadialProfile.bump()


def _sweep_times(args: argparse.Namespace) -> List[Fraction]:
    times = [parse_rational(text) for text in args.t or []]
    if args.sweep is not None:
        parts = [part.strip() for part in args.sweep.split(",")]
        if len(parts) != 3:  # noqa: PLR2004
            err = f"--sweep takes START,STOP,COUNT, got '{args.sweep}'."
            raise ValidationError(err)
        start, stop = parse_rational(parts[0]), parse_rational(parts[1])
        count = int(parse_rational(parts[2]))
        if count < 1:
            err = f"--sweep needs at least one point, got {count}."
            raise ValidationError(err)
        if count == 1:
            times.append(start)
        else:
            times.extend(start + (stop - start) * i / (count - 1) for i in range(count))
    if not times:
        err = "No times given; use --t or --sweep."
        raise ValidationError(err)
    return times


def _as_creal(value: Union[Fraction, CReal]) -> CReal:
    return value if isinstance(value, CReal) else CReal.const(value)


# -------------------------------------------
# Subcommands


def _ua_build(args: argparse.Namespace, config: RunConfig, stream: IO[bytes]) -> int:
    u = build_uA(_load_enumerator(args), args.m, config.budget)
    document = u.to_dict(config.precision)
    if args.eval is not None:
        t = parse_real(args.eval)
        document["eval"] = {
            "t": args.eval,
            **_certified_value(eval_trig_poly(u.partial_sum, t, config.precision), config.precision),
        }
    _write_document(stream, document)
    return EXIT_OK


def _eval(args: argparse.Namespace, config: RunConfig, stream: IO[bytes]) -> int:
    p = _load_poly(args, config)
    value = eval_trig_poly(p, parse_real(args.t), config.precision)
    _write_document(stream, {"t": args.t, **_certified_value(value, config.precision)})
    return EXIT_OK


def _sup(args: argparse.Namespace, config: RunConfig, stream: IO[bytes]) -> int:
    p = _load_poly(args, config)
    value = certified_sup(p, config.precision, method=args.method)
    _write_document(stream, {"method": args.method, "degree": p.degree, "sup": value.to_dict()})
    return EXIT_OK


def _dseq(args: argparse.Namespace, config: RunConfig, stream: IO[bytes]) -> int:
    p = _load_poly(args, config)
    enclosures = []
    with RecordWriter(stream, DSEQ_SCHEMA, config.output_format) as writer:
        for n, interval in dseq(p, args.n_max, config.precision):
            enclosures.append(interval)
            data = interval.to_dict()
            writer.write({"n": n, "d_lo": data["lo"], "d_hi": data["hi"], "bits": data["bits"]})
    best = certified_derivative_lower_bound(enclosures)
    if best is not None:
        logger.info("Best certified lower bound of the derivative's sup norm: %s", best)
    return EXIT_OK


def _compile_sigma1(args: argparse.Namespace, config: RunConfig, stream: IO[bytes]) -> int:
    e = _load_enumerator(args)
    if args.indices is None:
        u = sigma1_to_function(e, args.m, config.budget)
        document: Dict[str, Any] = {"construction": "enumeration", "m": args.m}
    else:
        indices = tuple(int(token) for token in parse_set(args.indices))
        declared = sum((1 / gauge_G(n, 16).lower for n in indices), Fraction(0))
        schedule = GaugeSchedule(indices, declared)
        witness = specker_sequence(e, config.budget)
        terms = args.m if args.m <= len(indices) else len(indices)
        u = sigma1_general_construction(witness, schedule, terms)
        document = {
            "construction": "schedule",
            "schedule": schedule.to_dict(),
            "K": terms,
            "witness": fraction_to_string(witness.term(terms)),
            "tail_bound": fraction_to_string(schedule.tail_bound(terms)),
        }
    derivative_sup = certified_sup(u.derivative(), config.precision)
    document["derivative_sup"] = derivative_sup.to_dict()
    document["coefficients"] = u.to_dict(config.precision)
    _write_document(stream, document)
    return EXIT_OK


def _wave(args: argparse.Namespace, config: RunConfig, stream: IO[bytes]) -> int:
    q = _load_profile(args)
    with RecordWriter(stream, WAVE_SCHEMA, config.output_format) as writer:
        for t in _sweep_times(args):
            data = wave_at_origin(q, t, config.precision).to_dict()
            writer.write({"t": fraction_to_string(t), "u_lo": data["lo"], "u_hi": data["hi"], "bits": data["bits"]})
    return EXIT_OK


def _wave_check(args: argparse.Namespace, config: RunConfig, stream: IO[bytes]) -> int:
    q = _load_profile(args)
    t = parse_rational(args.t[0] if args.t else "0")
    point = parse_point(args.point)
    # The float oracle is a dyadic rational, so it is carried exactly from here on.
    oracle = Fraction(kirchhoff_quadrature_oracle(q, float(t), point, h=args.h, nodes=args.nodes))
    document: Dict[str, Any] = {
        "t": fraction_to_string(t),
        "point": args.point,
        "oracle": _rounded_value(oracle, config.precision),
    }
    if point == (0.0, 0.0, 0.0):
        enclosure = wave_at_origin(q, t, config.precision)
        difference = abs(enclosure.midpoint - oracle)
        document["closed_form"] = _certified_value(enclosure, config.precision)
        document["difference"] = _rounded_value(difference, config.precision)
        document["agrees"] = difference <= Fraction(args.tolerance)
    _write_document(stream, document)
    return EXIT_OK


def _semidecide(args: argparse.Namespace, config: RunConfig, stream: IO[bytes]) -> int:
    x = _as_creal(parse_real(args.x))
    if args.sign:
        a, b = semidecide_positive(x), semidecide_negative(x)
        result = race(a, b, config.budget)
        document = {"predicate": "sign", **result.to_dict()}
        if not result.decided:
            document["status"] = "still running"
            _write_document(stream, document)
            return EXIT_BUDGET
        document["status"] = "positive" if result.winner == "A" else "negative"
        _write_document(stream, document)
        return EXIT_OK

    if args.below is not None:
        machine = semidecide_below(x, parse_rational(args.below))
    elif args.negative:
        machine = semidecide_negative(x)
    else:
        machine = semidecide_positive(x)

    halted_at = machine.run(config.budget)
    document = {"predicate": machine.label, "steps": machine.steps}
    if halted_at is None:
        document["status"] = "still running"
        _write_document(stream, document)
        return EXIT_BUDGET

    document["status"] = "halted"
    document["halted_at"] = halted_at
    if isinstance(machine, PositivitySemidecider):
        document["certificate"] = fraction_to_string(machine.certificate)  # type: ignore[arg-type]
        # An independent enclosure of the tested quantity lying strictly above 0.
        for bits in range(1, halted_at + 4):
            enclosure = machine.x.enclosure(bits)
            if enclosure.is_positive():
                document["confirmation"] = enclosure.to_dict()
                break
    _write_document(stream, document)
    return EXIT_OK


def _search_bound(args: argparse.Namespace, config: RunConfig, stream: IO[bytes]) -> int:
    x = _as_creal(parse_real(args.x))
    rounds = min(args.rounds, config.budget)
    result = dyadic_bound_search(bound_detector(x), rounds, max_level=args.max_level)
    document = {"x": args.x, **result.to_dict(), "live": len(result.live)}
    _write_document(stream, document)
    if not result.bounds:
        logger.warning("No upper bound was emitted within %d rounds.", rounds)
        return EXIT_BUDGET
    return EXIT_OK


def _enum_run(args: argparse.Namespace, config: RunConfig, stream: IO[bytes]) -> int:
    e = _load_enumerator(args)
    code = EXIT_OK
    try:
        if args.count is None:
            e.step(config.budget)
        else:
            e.ensure(args.count, config.budget)
    except BudgetExhaustedError as exc:
        logger.warning("Budget exhausted: %s", exc)
        code = EXIT_BUDGET
    with RecordWriter(stream, ENUM_SCHEMA, config.output_format) as writer:
        for index, value in enumerate(e.emitted, 1):
            writer.write({"index": index, "value": value})
    logger.info("Enumerator %s after %d steps.", "halted" if e.halted else "still running", e.steps_taken)
    return code


def _gallery(args: argparse.Namespace, config: RunConfig, stream: IO[bytes]) -> int:  # noqa: ARG001
    prec = min(config.precision, 24)
    sections: List[Dict[str, Any]] = []

    zw = zw_real(Enumerator(FiniteSet((2, 4))))
    sections.append(
        {
            "name": "zw_real {2,4}",
            "lower_bounds": [fraction_to_string(zw.lower_bound(m)) for m in range(3)],
            "closed_form": zw.closed_form.to_dict(prec) if zw.closed_form is not None else None,
        }
    )

    sections.append(
        {
            "name": "gauge",
            "G(1)": gauge_G(1, prec).to_dict(),
            "G(2)": gauge_G(2, prec).to_dict(),
            "C1": constant_c1().to_dict(),
        }
    )

    p1 = poly_p(1)
    sections.append(
        {
            "name": "p_1",
            "derivative_at_0": eval_trig_poly(p1.derivative(), 0, prec).to_dict(),
            "sup": certified_sup(p1, prec).to_dict(),
            "derivative_sup": certified_sup(p1.derivative(), prec).to_dict(),
        }
    )

    u = build_uA(Enumerator(FiniteSet((1, 3))), 2)
    sections.append(
        {
            "name": "u_A for A = {1,3}",
            "weight": fraction_to_string(u.weight()),
            "derivative_sup": certified_sup(u.partial_sum.derivative(), prec).to_dict(),
        }
    )

    sections.append(
        {
            "name": "d_n for sin t",
            "values": [
                {"n": n, "d": interval.to_dict()} for n, interval in dseq(TrigPoly.sine(1), 6, min(prec, 16))
            ],
        }
    )

    window_profile = window(*parse_pair("3/2pi,5/2pi"))
    sections.append(
        {
            "name": "wave at the origin",
            "bump_u(2pi)": wave_at_origin(RadialProfile.bump(), Fraction(62832, 10000), prec).to_dict(),
            "window_u(6.2832)": wave_at_origin(window_profile, Fraction(62832, 10000), prec).to_dict(),
        }
    )

    machine = semidecide_positive(CReal.const(Fraction(1, 4)))
    negative = CReal.const(Fraction(-1, 8))
    sign = race(semidecide_positive(negative), semidecide_negative(negative), 64)
    sections.append(
        {
            "name": "semidecision",
            "1/4 > 0 halts at": machine.run(64),
            "sign of -1/8": sign.to_dict(),
        }
    )

    search = dyadic_bound_search(bound_detector(CReal.const(Fraction(3, 8))), 24)
    summary = search.to_dict()
    # The full event log is available from search-bound.
    summary.pop("events")
    sections.append({"name": "dyadic search for 3/8", **summary})

    _write_document(stream, {"gallery": sections})
    return EXIT_OK


COMMANDS: Dict[str, Handler] = {
    "ua-build": _ua_build,
    "eval": _eval,
    "sup": _sup,
    "dseq": _dseq,
    "compile-sigma1": _compile_sigma1,
    "wave": _wave,
    "wave-check": _wave_check,
    "semidecide": _semidecide,
    "search-bound": _search_bound,
    "enum-run": _enum_run,
    "gallery": _gallery,
}


# -------------------------------------------
# Parser


def _common_options() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument(
        "--precision",
        type=int,
        default=None,
        help=f"precision in bits (default: ${PRECISION_ENV_VAR} or 30)",
    )
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="step, round or term budget")
    common.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json")
    common.add_argument("--output", default=None, help="write output to this file instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true", help="log debug output to stderr")
    return common


def _enumeration_options() -> argparse.ArgumentParser:
    options = _ArgumentParser(add_help=False)
    group = options.add_mutually_exclusive_group()
    group.add_argument("--set", default=None, help='a finite set, eg: "1,3"')
    group.add_argument("--progression", default=None, help='an arithmetic progression "START,STEP"')
    group.add_argument("--squares", action="store_true", help="the register machine enumerating the squares")
    group.add_argument("--enum", default=None, help="an enumerator JSON file")
    return options


def _poly_options() -> argparse.ArgumentParser:
    options = _ArgumentParser(add_help=False)
    options.add_argument("--poly", default=None, help="a trigonometric polynomial JSON file")
    options.add_argument("--sine", type=int, default=None, help="use sin(k t)")
    options.add_argument("--m", type=int, default=0, help="with an enumeration: use the partial sum u_m")
    options.add_argument("--poisson", default=None, help="apply the Poisson operator with this radius first")
    options.add_argument("--derivative", action="store_true", help="differentiate first")
    return options


def _profile_options() -> argparse.ArgumentParser:
    options = _ArgumentParser(add_help=False)
    group = options.add_mutually_exclusive_group()
    group.add_argument("--profile", default=None, help="a radial profile JSON file")
    group.add_argument("--window", default=None, help='a window profile with plateau "A,B", eg: "3/2pi,5/2pi"')
    group.add_argument("--bump", action="store_true", help="the polynomial bump profile (default)")
    options.add_argument("--t", action="append", default=None, help="a positive rational time; may be repeated")
    return options


def _schema_epilog() -> str:
    lines = ["CSV/JSON-lines record schemas:"]
    for name, schema in (("dseq", DSEQ_SCHEMA), ("wave", WAVE_SCHEMA), ("enum-run", ENUM_SCHEMA)):
        lines.append(f"  {name}: {json.dumps(schema_to_dict(schema))}")
    lines.append("Intervals are written as {lo, hi, bits} with exact decimal endpoints.")
    lines.append(f"{PRECISION_ENV_VAR} sets the default precision in bits.")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    """The command line parser for all subcommands."""
    common = _common_options()
    enumeration = _enumeration_options()
    poly = _poly_options()
    profile = _profile_options()

    parser = _ArgumentParser(
        prog="computable-analysis",
        description="Certified computations with computable reals, trigonometric series and radial waves.",
        epilog=_schema_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")

    ua_build = subparsers.add_parser("ua-build", parents=[common, enumeration], help="build the partial sum u_m")
    ua_build.add_argument("--m", type=int, required=True)
    ua_build.add_argument("--eval", default=None, help="also evaluate u_m at this point")

    evaluate = subparsers.add_parser("eval", parents=[common, enumeration, poly], help="evaluate a polynomial")
    evaluate.add_argument("--t", required=True, help='the point, eg: "1/2" or "pi/4"')

    sup = subparsers.add_parser("sup", parents=[common, enumeration, poly], help="certified sup norm")
    sup.add_argument("--method", choices=("adaptive", "grid"), default="adaptive")

    d_sequence = subparsers.add_parser("dseq", parents=[common, enumeration, poly], help="stream d_n enclosures")
    d_sequence.add_argument("--n-max", dest="n_max", type=int, default=16)

    compile_sigma1 = subparsers.add_parser(
        "compile-sigma1", parents=[common, enumeration], help="compile an enumeration to a function"
    )
    compile_sigma1.add_argument("--m", type=int, required=True, help="number of terms")
    compile_sigma1.add_argument("--indices", default=None, help='a gauge schedule n_1 < n_2 < ..., eg: "2,40"')

    wave = subparsers.add_parser("wave", parents=[common, profile], help="enclose u(t, 0)")
    wave.add_argument("--sweep", default=None, help='times "START,STOP,COUNT"')

    wave_check = subparsers.add_parser("wave-check", parents=[common, profile], help="compare with quadrature")
    wave_check.add_argument("--point", default="0,0,0")
    wave_check.add_argument("--h", type=float, default=1e-3)
    wave_check.add_argument("--nodes", type=int, default=64)
    wave_check.add_argument("--tolerance", type=float, default=1e-6)

    semidecide = subparsers.add_parser("semidecide", parents=[common], help="run a semidecider")
    semidecide.add_argument("--x", required=True)
    mode = semidecide.add_mutually_exclusive_group()
    mode.add_argument("--positive", action="store_true", help="halt iff x > 0 (default)")
    mode.add_argument("--negative", action="store_true", help="halt iff x < 0")
    mode.add_argument("--below", default=None, help="halt iff x < C")
    mode.add_argument("--sign", action="store_true", help="race x > 0 against x < 0")

    search = subparsers.add_parser("search-bound", parents=[common], help="dovetailed dyadic upper bounds")
    search.add_argument("--x", required=True)
    search.add_argument("--rounds", type=int, default=SEARCH_ROUNDS)
    search.add_argument("--max-level", dest="max_level", type=int, default=SEARCH_MAX_LEVEL)

    enum_run = subparsers.add_parser("enum-run", parents=[common, enumeration], help="run an enumerator")
    enum_run.add_argument("--count", type=int, default=None, help="run until this many values are emitted")

    subparsers.add_parser("gallery", parents=[common], help="the constructions at desk scale")
    return parser


def _configure_logging(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the command line.

    :param argv: the arguments, without the program name. Defaults to sys.argv[1:].
    :return: the exit code: 0 on success, 2 on invalid input, 3 when a budget ran out, 64 on usage errors.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_OK

    _configure_logging(args.verbose)
    try:
        precision = args.precision if args.precision is not None else default_precision()
        config = RunConfig(
            subcommand=args.subcommand,
            precision=precision,
            budget=args.budget,
            input_path=next((path for path in (getattr(args, name, None) for name in INPUT_OPTIONS) if path), None),
            output_path=args.output,
            output_format=args.output_format,
        )
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    logger.debug("Running %s", config.to_dict())
    with _output_stream(config.output_path) as stream:
        try:
            return COMMANDS[config.subcommand](args, config, stream)
        except BudgetExhaustedError as exc:
            logger.warning("Budget exhausted: %s", exc)
            document = {"status": "budget exhausted", "message": str(exc), "partial": _jsonable(exc.partial)}
            _write_document(stream, document)
            return EXIT_BUDGET
        except (ValidationError, DomainError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID
