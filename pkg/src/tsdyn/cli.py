"""Command-line front end.

Usage:
    tsdyn solve      --scale SCALE --problem PROBLEM [--format csv|json] [--out PATH]
    tsdyn solve      --scale SCALE --problem PROBLEM --from-coeffs COEFFS.json
    tsdyn coeffs     --problem PROBLEM [--scale SCALE]
    tsdyn verify     --scale SCALE --problem PROBLEM
    tsdyn scale-info --scale SCALE [--problem PROBLEM]

SCALE and PROBLEM are either a path to a JSON file or inline JSON.
Exit status: 0 success, 1 input error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

from .errors import TimeScaleError
from .solver import (
    ProblemSpec,
    Solution,
    check_admissibility,
    coefficients,
    evaluate_solution,
    parse_complex,
    regressivity_polynomial,
    require_admissible,
    solve_ivp,
)
from .timescale import TimeScale, scale_from_json
from .verify import analytic_residual, full_report, residual

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VERIFY = 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _load_json(arg: str, what: str) -> Any:
    text = arg.strip()
    if not text.startswith(("{", "[")):
        try:
            text = Path(arg).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {what} file {arg!r}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} is not valid JSON: {exc.msg} (line {exc.lineno})") from None


def _cx(z) -> list[float] | None:
    if z is None:
        return None
    z = complex(z)
    # adding 0.0 turns -0.0 into 0.0
    return [z.real + 0.0, z.imag + 0.0]


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2) + "\n"


def _num(x: float) -> str:
    return repr(float(x) + 0.0)


def _initial_conditions(raw: dict) -> tuple[complex, complex]:
    ic = raw.get("ic")
    if not isinstance(ic, dict):
        raise InputError("problem field 'ic' is missing or not an object")
    for name in ("y", "yd"):
        if name not in ic:
            raise InputError(f"problem field 'ic.{name}' is missing")
    return parse_complex(ic["y"], "ic.y"), parse_complex(ic["yd"], "ic.yd")


def coeffs_to_json(sol: Solution) -> dict:
    return {
        "lambda1": _cx(sol.lambda1),
        "lambda2": _cx(sol.lambda2),
        "xi": [_cx(x) for x in sol.xi],
        "omega1": _cx(sol.omega1),
        "omega2": _cx(sol.omega2),
        "c1": _cx(sol.c1),
        "c2": _cx(sol.c2),
    }


def coeffs_from_json(obj: Any) -> Solution:
    if not isinstance(obj, dict):
        raise InputError("coefficients file must hold a JSON object")
    for name in ("lambda1", "lambda2", "xi", "c1", "c2"):
        if obj.get(name) is None:
            raise InputError(f"coefficients field {name!r} is missing")
    if not isinstance(obj["xi"], list) or not obj["xi"]:
        raise InputError("coefficients field 'xi' must be a nonempty list")

    def opt(name):
        v = obj.get(name)
        return None if v is None else parse_complex(v, name)

    return Solution(
        parse_complex(obj["lambda1"], "lambda1"),
        parse_complex(obj["lambda2"], "lambda2"),
        tuple(parse_complex(v, f"xi[{i}]") for i, v in enumerate(obj["xi"])),
        opt("omega1"),
        opt("omega2"),
        parse_complex(obj["c1"], "c1"),
        parse_complex(obj["c2"], "c2"),
    )


def _solution_table(sol: Solution, spec: ProblemSpec, ts: TimeScale):
    y = evaluate_solution(sol, spec, ts)
    if ts.discrete:
        r = residual(ts, y, spec)
    else:
        r = analytic_residual(sol, spec, ts)
    return y, r


def cmd_solve(args, scale: TimeScale, spec: ProblemSpec, raw: dict) -> tuple[str, int]:
    if args.from_coeffs:
        sol = coeffs_from_json(_load_json(args.from_coeffs, "coefficients"))
        if len(sol.xi) != len(spec.gamma):
            raise InputError(
                f"coefficients field 'xi' has {len(sol.xi)} entries, problem has {len(spec.gamma)}"
            )
    else:
        y0, yd0 = _initial_conditions(raw)
        sol = solve_ivp(spec, scale, y0, yd0)
    y, r = _solution_table(sol, spec, scale)
    t = scale.points
    if args.format == "json":
        return _dump_json(
            {
                "t": [float(v) for v in t],
                "y": [_cx(v) for v in y.values],
                "residual": [
                    float(abs(v)) if ok else None for v, ok in zip(r.values, r.defined)
                ],
            }
        ), EXIT_OK
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "y_re", "y_im", "residual"])
    for ti, yi, ri, ok in zip(t, y.values, r.values, r.defined):
        w.writerow([_num(ti), _num(yi.real), _num(yi.imag), _num(abs(ri)) if ok else ""])
    return buf.getvalue(), EXIT_OK


def cmd_coeffs(args, scale: TimeScale | None, spec: ProblemSpec, raw: dict) -> tuple[str, int]:
    if scale is not None:
        require_admissible(spec, scale)
    if "ic" in raw:
        if scale is None:
            raise InputError("computing c1, c2 from 'ic' requires --scale")
        y0, yd0 = _initial_conditions(raw)
        sol = solve_ivp(spec, scale, y0, yd0)
    else:
        sol = coefficients(spec)
    return _dump_json(coeffs_to_json(sol)), EXIT_OK


def cmd_verify(args, scale: TimeScale, spec: ProblemSpec, raw: dict) -> tuple[str, int]:
    y0, yd0 = _initial_conditions(raw)
    report = full_report(spec, scale, y0, yd0)
    return _dump_json(report.to_dict()), EXIT_OK if report.passed() else EXIT_VERIFY


def cmd_scale_info(args, scale: TimeScale, spec: ProblemSpec | None, raw: dict | None):
    out: dict[str, Any] = {
        "kind": scale.kind,
        "params": scale.to_json(),
        "points": [float(p) for p in scale.points],
        "mu": [float(m) for m in scale.mu],
    }
    if spec is not None:
        adm = check_admissibility(spec, scale)
        out["alpha"] = spec.alpha
        out["beta"] = spec.beta
        out["regressivity"] = [
            float(v) for v in regressivity_polynomial(spec.alpha, spec.beta, scale.mu)
        ]
        out["admissibility"] = adm.to_dict()
    return _dump_json(out), EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scale", help="time-scale spec: JSON file path or inline JSON")
    common.add_argument("--problem", help="problem spec: JSON file path or inline JSON")
    common.add_argument("--out", help="output path (default: standard output)")
    common.add_argument("--format", choices=("csv", "json"), default=None)

    parser = _Parser(prog="tsdyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    solve = sub.add_parser("solve", parents=[common], help="evaluate the IVP solution on a scale")
    solve.add_argument("--from-coeffs", help="evaluate coefficients previously written by 'coeffs'")
    sub.add_parser("coeffs", parents=[common], help="print roots, xi, omega and c1, c2")
    sub.add_parser("verify", parents=[common], help="run the verification report")
    sub.add_parser("scale-info", parents=[common], help="describe a scale and its regressivity")
    return parser


REQUIRED = {
    "solve": ("scale", "problem"),
    "coeffs": ("problem",),
    "verify": ("scale", "problem"),
    "scale-info": ("scale",),
}


def run(argv: Sequence[str] | None = None) -> tuple[str, int, str | None]:
    """Parse ``argv`` and execute; returns ``(output text, exit status, output path)``."""
    args = build_parser().parse_args(argv)
    for name in REQUIRED[args.command]:
        if getattr(args, name) is None:
            raise InputError(f"--{name} is required for '{args.command}'")
    if args.format is None:
        args.format = "csv" if args.command == "solve" else "json"
    elif args.format == "csv" and args.command != "solve":
        raise InputError("--format csv is only available for 'solve'")

    scale = raw = spec = None
    if args.scale is not None:
        scale = scale_from_json(_load_json(args.scale, "scale spec"))
    if args.problem is not None:
        raw = _load_json(args.problem, "problem spec")
        spec = ProblemSpec.from_json(raw)

    handler = {
        "solve": cmd_solve,
        "coeffs": cmd_coeffs,
        "verify": cmd_verify,
        "scale-info": cmd_scale_info,
    }[args.command]
    text, status = handler(args, scale, spec, raw)
    return text, status, args.out


def main(argv: Sequence[str] | None = None) -> int:
    try:
        text, status, out = run(argv)
    except (InputError, TimeScaleError) as exc:
        msg = " ".join(str(exc).split())
        print(f"tsdyn: error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
