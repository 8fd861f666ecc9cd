"""Command-line entry point: ``fair-assign <command> ...``.

Exit codes: 0 success or all checks pass, 1 a property fails or LEF is
infeasible, 2 bad usage or invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from . import admission, audit, eating, lefsolve, lottery
from .fixtures import NAMES as FIXTURE_NAMES
from .fixtures import fixture_text
from .model import (
    InvalidInput,
    assignment_from_json,
    assignment_from_lottery,
    assignment_to_json,
    load_instance,
    lottery_from_json,
    lottery_to_json,
)

PROPS = ("sef", "oe", "prop", "1lef", "lef")


class UsageError(Exception):
    pass


def _read_json(path: str) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _emit(doc: Any, out: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args: argparse.Namespace) -> int:
    inst, priority = load_instance(_read_json(args.instance))
    if args.alg == "rsd":
        _emit(lottery_to_json(lottery.rsd(inst, priority), inst.agents, inst.items), args.out)
        return 0
    if args.alg == "ps":
        p = eating.probabilistic_serial_assignment(inst)
    elif args.alg == "ce":
        p = eating.cycle_elimination(inst, priority)
    else:
        p = eating.unit_time_eating(inst, priority)
    _emit(assignment_to_json(p, inst), args.out)
    return 0


def cmd_audit(args: argparse.Namespace) -> int:
    props = [p.strip() for p in args.props.split(",") if p.strip()]
    unknown = [p for p in props if p not in PROPS]
    if unknown or not props:
        raise UsageError(f"unknown properties {unknown}; choose from {','.join(PROPS)}")
    inst, priority = load_instance(_read_json(args.instance))
    p, _, _ = assignment_from_json(_read_json(args.assignment), inst)
    lot = lottery_from_json(_read_json(args.lottery), inst) if args.lottery else None
    if lot is not None and assignment_from_lottery(lot) != p:
        raise UsageError("the lottery does not induce the given assignment")
    if "lef" in props and lot is None:
        raise UsageError("the 'lef' audit needs --lottery (use 'lefcheck' for the existential question)")
    ok = True
    for prop in props:
        if prop == "sef":
            report = audit.check_sef(p, priority, inst)
        elif prop == "oe":
            report = audit.check_oe(p, inst)
        elif prop == "prop":
            report = audit.check_prop(p, priority, inst)
        elif prop == "1lef":
            report = audit.check_1lef(p, priority, inst, lot)
        else:
            report = audit.check_lef_lottery(lot, priority, inst)
        ok &= report.passed
        print(json.dumps(report.to_json()))
    return 0 if ok else 1


def cmd_lefcheck(args: argparse.Namespace) -> int:
    inst, priority = load_instance(_read_json(args.instance))
    p, _, _ = assignment_from_json(_read_json(args.assignment), inst)
    result = lefsolve.lef_feasible(p, priority, inst)
    if result.feasible:
        print("feasible")
        print(json.dumps(lottery_to_json(result.lottery, inst.agents, inst.items), indent=2))
        return 0
    print("infeasible")
    print(result.note)
    return 1


def cmd_decompose(args: argparse.Namespace) -> int:
    p, agents, items = assignment_from_json(_read_json(args.assignment))
    _emit(lottery_to_json(lottery.bvn_decompose(p), agents, items), args.out)
    return 0


def _csv_list(kind: type, text: str) -> list:
    try:
        return [kind(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad list {text!r}: {exc}") from exc


def cmd_experiment(args: argparse.Namespace) -> int:
    schools = _csv_list(int, args.schools)
    betas = _csv_list(float, args.beta)
    base = admission.AdmissionConfig(
        students=args.students,
        disadvantaged=args.disadvantaged,
        schools=schools[0],
        beta=betas[0],
        bias_model=args.bias_model,
        q=args.q,
        trials=args.trials,
        seed=args.seed,
    )
    results = admission.run_grid(base, schools, betas)
    text = admission.results_to_csv(results)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.svg:
        from .plotting import envy_bar_chart

        envy_bar_chart(results, args.svg)
    return 0


def cmd_fixture(args: argparse.Namespace) -> int:
    text = fixture_text(args.name)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fair-assign",
        description="Random assignment under an uncertain priority: solve, audit, decompose, experiment.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute a random assignment (or RSD lottery)")
    p.add_argument("--alg", choices=("ps", "ce", "ute", "rsd"), required=True,
                   help="ps: probabilistic serial, ce: cycle elimination, ute: unit-time eating, rsd: lottery")
    p.add_argument("--instance", required=True, help="instance JSON file")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("audit", help="check properties of an assignment")
    p.add_argument("--props", required=True, help=f"comma-separated subset of {','.join(PROPS)}")
    p.add_argument("--instance", required=True, help="instance JSON file")
    p.add_argument("--assignment", required=True, help="assignment JSON file")
    p.add_argument("--lottery", help="lottery JSON inducing the assignment (required for 'lef'; "
                                     "switches '1lef' to lottery mode)")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("lefcheck", help="decide whether any inducing lottery satisfies LEF")
    p.add_argument("--instance", required=True, help="instance JSON file")
    p.add_argument("--assignment", required=True, help="assignment JSON file")
    p.set_defaults(func=cmd_lefcheck)

    p = sub.add_parser("decompose", help="Birkhoff-von Neumann decomposition into a lottery")
    p.add_argument("--assignment", required=True, help="assignment JSON file")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("experiment", help="school-admission envy-pair experiment (CSV)")
    p.add_argument("--schools", default="2", help="school count(s), comma-separated")
    p.add_argument("--beta", default="0.5", help="bias scale(s), comma-separated")
    p.add_argument("--bias-model", choices=("multiplicative", "additive"), default="multiplicative")
    p.add_argument("--students", type=int, default=35, help="total students N")
    p.add_argument("--disadvantaged", type=int, default=10, help="disadvantaged students")
    p.add_argument("--q", type=int, default=200, help="priority samples per trial")
    p.add_argument("--trials", type=int, default=20, help="trials per cell; trial k uses seed + k")
    p.add_argument("--seed", type=int, default=0, help="base seed")
    p.add_argument("--out", help="CSV output file (default: stdout)")
    p.add_argument("--svg", help="also write a bar chart here")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("fixture", help=f"print a bundled instance ({', '.join(FIXTURE_NAMES)})")
    p.add_argument("name", choices=FIXTURE_NAMES)
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_fixture)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InvalidInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError) as exc:
        # malformed documents that slipped past validation
        print(f"error: invalid input: {exc!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
