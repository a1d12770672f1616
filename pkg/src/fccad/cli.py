"""Command-line front end.

Exit status: 0 on success (and frontier condition satisfied), 1 when the
checker finds a violation, 2 on input errors, 3 on an internal invariant
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .cad import decomposition_to_json, refine_with, trivial_cad
from .driver import InvariantError, cells_from_json, check_frontier_condition, fc_algorithm
from .formula import FormulaSyntaxError, parse
from .frontier import frontier

STAGES = ("cad", "frontier", "fc", "check")


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fccad",
        description="Cylindrical algebraic decompositions with the frontier condition.",
    )
    ap.add_argument("--vars", required=True, help="variable order, comma separated (e.g. x,y,z)")
    ap.add_argument("--stage", choices=STAGES, default="fc")
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--formula-file", type=Path, help="file holding one formula")
    src.add_argument("--formula", help="formula text")
    ap.add_argument("--input", type=Path, help="decomposition JSON for --stage check")
    ap.add_argument("--mode", choices=("symbolic", "sampling"), help="checker mode (default: symbolic for n <= 2)")
    ap.add_argument("--probes", type=int, default=64, help="random frontier probes per cell in sampling mode")
    ap.add_argument("--depth", type=int, default=20, help="binary digits of random probes")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--method", choices=("fast", "direct", "reference"), default="fast", help="frontier method for --stage frontier")
    ap.add_argument("--timings", action="store_true", help="record per-iteration wall-clock times")
    ap.add_argument("--out", type=Path, help="output file (default: stdout)")
    return ap


def _variables(text: str) -> tuple[str, ...]:
    names = tuple(v.strip() for v in text.split(",") if v.strip())
    if not names:
        raise UsageError("--vars needs at least one variable")
    if len(set(names)) != len(names):
        raise UsageError("--vars contains a repeated name")
    return names


def _formula_text(args) -> str:
    if args.formula is not None:
        return args.formula
    if args.formula_file is not None:
        try:
            return args.formula_file.read_text()
        except OSError as e:
            raise UsageError(f"cannot read {args.formula_file}: {e.strerror}") from None
    raise UsageError(f"--stage {args.stage} needs --formula or --formula-file")


def _mode(args, n: int) -> str:
    return args.mode or ("symbolic" if n <= 2 else "sampling")


def _check_options(args):
    return {"probes": args.probes, "depth": args.depth, "seed": args.seed}


def run(args) -> tuple[int, dict]:
    variables = _variables(args.vars)
    if args.stage == "check":
        if args.input is None:
            raise UsageError("--stage check needs --input")
        try:
            data = json.loads(args.input.read_text())
        except OSError as e:
            raise UsageError(f"cannot read {args.input}: {e.strerror}") from None
        except json.JSONDecodeError as e:
            raise UsageError(f"{args.input}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
        data = data.get("decomposition", data)
        if tuple(data.get("variables", ())) != variables:
            raise UsageError(f"--vars {','.join(variables)} does not match the input's variable order")
        report = check_frontier_condition(cells_from_json(data), _mode(args, len(variables)), **_check_options(args))
        return (0 if report.ok else 1), {"report": report.to_json()}

    S = parse(_formula_text(args), variables)
    if args.stage == "cad":
        D = refine_with(trivial_cad(variables), S, "S")
        return 0, decomposition_to_json(D)
    if args.stage == "frontier":
        return 0, {"variables": list(variables), "formula": str(frontier(S, variables, args.method))}
    result = fc_algorithm(S, variables, timings=args.timings)
    D = result.decomposition
    report = check_frontier_condition(D, _mode(args, len(variables)), **_check_options(args))
    report.stats["iterations"] = result.iterations
    return (0 if report.ok else 1), {"decomposition": decomposition_to_json(D), "report": report.to_json()}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        status, payload = run(args)
    except FormulaSyntaxError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except InvariantError as e:
        print(f"internal invariant failed: {e}", file=sys.stderr)
        return 3
    text = json.dumps(payload, indent=2) + "\n"
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
