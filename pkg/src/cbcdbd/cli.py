"""Command-line front end.

Subcommands construct generating vectors, run randomized bound-verification
campaigns, emit convergence data, and time the fast construction paths.
Reports are written as delimited text plus JSON, with figures rendered
alongside; every floating-point value is serialized with 17 significant
digits so files round-trip exactly and identical parameters reproduce
byte-identical payloads (timing fields excepted).

Exit codes: 0 success, 1 usage, 2 validation, 3 bound violation,
4 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from typing import Optional, Sequence

from . import __version__
from .campaigns import (
    CAMPAIGNS,
    CampaignRow,
    bench_run,
    convergence_run,
    growth_ratios,
    run_verify_campaign,
)
from .construct import PATHS, ConstructionConfig, construct
from .errors import EnumerationBudgetError
from .figures import bench_figure, convergence_figure, verify_figure
from .lattice import DUAL_SUM_BUDGET, GeneratingVector
from .weights import load_weights

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_BOUND_VIOLATION = 3
EXIT_BUDGET = 4

VERIFY_COLUMNS = ("campaign", "theorem", "n", "s", "lhs", "rhs", "satisfied", "seed")


class CliUsageError(Exception):
    """Malformed command line (maps to exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D102 - argparse hook
        raise CliUsageError(message)


# --------------------------------------------------------------------------
# serialization helpers


def format_float(value: float) -> str:
    """Shortest 17-significant-digit form; exact for double precision."""
    return format(value, ".17g")


def dumps_17g(obj, indent: int = 0) -> str:
    """JSON text with floats rendered at 17 significant digits.

    The standard library encoder offers no hook for finite-float formatting,
    so this walks the payload itself (plain dicts, sequences and scalars).
    """
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [
            f"{inner}{json.dumps(str(key))}: {dumps_17g(val, indent + 1)}"
            for key, val in obj.items()
        ]
        return "{\n" + ",\n".join(parts) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [f"{inner}{dumps_17g(val, indent + 1)}" for val in obj]
        return "[\n" + ",\n".join(parts) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def make_manifest(
    command: str,
    parameters: dict,
    seed: Optional[int],
    input_files: Sequence[str],
    output_files: Sequence[str],
) -> dict:
    body = {
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "input_files": list(input_files),
        "output_files": list(output_files),
        "version": __version__,
    }
    digest = hashlib.sha256(dumps_17g(body).encode()).hexdigest()
    return {**body, "config_digest": digest}


def write_vector_file(path: str, gv: GeneratingVector, payload_extra: dict) -> None:
    payload = {
        "n": gv.n,
        "N": gv.N,
        "z": list(gv.z),
        "digit_history": [list(row) for row in gv.digit_history or ()],
        **payload_extra,
    }
    with open(path, "w") as handle:
        handle.write(dumps_17g(payload) + "\n")


def read_vector_file(path: str) -> GeneratingVector:
    """Reload a vector file; the constructor re-checks all invariants."""
    with open(path) as handle:
        payload = json.load(handle)
    history = payload.get("digit_history") or None
    if history is not None:
        history = tuple(tuple(int(d) for d in row) for row in history)
    return GeneratingVector(
        int(payload["n"]),
        tuple(int(zj) for zj in payload["z"]),
        digit_history=history,
    )


# --------------------------------------------------------------------------
# subcommands


def cmd_construct(args) -> int:
    scheme = load_weights(args.weights)
    config = ConstructionConfig(args.n, args.s, scheme, path=args.path)
    gv, diag = construct(config)
    manifest = make_manifest(
        "construct",
        {"n": args.n, "s": args.s, "path": args.path},
        None,
        [args.weights],
        [args.out],
    )
    diagnostics = {
        "log_sine_value": diag.log_sine_value,
        "bound_values": diag.bound_values,
        "timing": diag.timing,
    }
    write_vector_file(
        args.out, gv, {"diagnostics": diagnostics, "manifest": manifest}
    )
    print(f"wrote {args.out}: n={gv.n} N={gv.N} z={list(gv.z)}")
    return EXIT_OK


def _verify_cell(value: Optional[float]) -> str:
    return "" if value is None else format_float(value)


def write_verify_csv(path: str, rows: Sequence[CampaignRow]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(VERIFY_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row.campaign,
                    row.theorem,
                    row.n,
                    row.s,
                    _verify_cell(row.lhs),
                    _verify_cell(row.rhs),
                    row.satisfied,
                    row.seed,
                ]
            )


def cmd_verify(args) -> int:
    rows = run_verify_campaign(
        args.campaign,
        args.n_max,
        args.s_max,
        args.draws,
        args.seed,
        budget=args.budget,
        workers=args.workers,
    )
    csv_path = f"{args.out}.csv"
    json_path = f"{args.out}.json"
    fig_path = f"{args.out}.png"
    outputs = [csv_path, json_path] + ([] if args.no_figure else [fig_path])
    manifest = make_manifest(
        "verify",
        {
            "campaign": args.campaign,
            "n_max": args.n_max,
            "s_max": args.s_max,
            "draws": args.draws,
            "budget": args.budget,
        },
        args.seed,
        [],
        outputs,
    )
    write_verify_csv(csv_path, rows)
    payload = {
        "manifest": manifest,
        "rows": [
            {
                "campaign": row.campaign,
                "theorem": row.theorem,
                "n": row.n,
                "s": row.s,
                "lhs": row.lhs,
                "rhs": row.rhs,
                "satisfied": row.satisfied,
                "seed": row.seed,
            }
            for row in rows
        ],
    }
    with open(json_path, "w") as handle:
        handle.write(dumps_17g(payload) + "\n")
    if not args.no_figure:
        verify_figure(rows, fig_path)
    n_true = sum(row.satisfied == "true" for row in rows)
    n_false = sum(row.satisfied == "false" for row in rows)
    n_skip = sum(row.satisfied == "skipped" for row in rows)
    print(
        f"{len(rows)} checks: {n_true} satisfied, "
        f"{n_false} violated, {n_skip} skipped -> {csv_path}"
    )
    return EXIT_BOUND_VIOLATION if n_false else EXIT_OK


def _parse_n_range(text: str) -> tuple[int, int]:
    parts = text.split("..")
    try:
        first, last = (int(part) for part in parts)
    except ValueError:
        raise CliUsageError(
            f"--n-range must have the form 'a..b', got {text!r}"
        ) from None
    if first > last:
        raise CliUsageError(f"empty --n-range {text!r}")
    return first, last


def cmd_convergence(args) -> int:
    n_first, n_last = _parse_n_range(args.n_range)
    scheme = load_weights(args.weights)
    rows, slope = convergence_run(args.alpha, n_first, n_last, args.s, scheme)
    csv_path = f"{args.out}.csv"
    with open(csv_path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["n", "N", "dual_error"])
        for row in rows:
            writer.writerow([row.n, row.N, format_float(row.dual_error)])
        writer.writerow(["# least_squares_slope", "", format_float(slope)])
    if not args.no_figure:
        convergence_figure(rows, slope, f"{args.out}.png")
    print(f"{len(rows)} resolutions, fitted slope {slope:.4f} -> {csv_path}")
    return EXIT_OK


def _parse_int_list(flag: str, text: str) -> list[int]:
    parts = [part for part in text.split(",") if part.strip()]
    if not parts:
        raise CliUsageError(f"{flag} must list at least one integer")
    try:
        return [int(part) for part in parts]
    except ValueError:
        raise CliUsageError(
            f"{flag} must be comma-separated integers, got {text!r}"
        ) from None


def cmd_bench(args) -> int:
    n_list = _parse_int_list("--n-list", args.n_list)
    s_list = _parse_int_list("--s-list", args.s_list)
    rows = bench_run(args.path, n_list, s_list, args.repeats)
    ratios = growth_ratios(rows)
    peak_memory = max((row.memory_doubles for row in rows), default=0.0)
    csv_path = f"{args.out}.csv"
    with open(csv_path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["path", "n", "s", "N", "median_seconds", "memory_doubles"])
        for row in rows:
            writer.writerow(
                [
                    row.path,
                    row.n,
                    row.s,
                    row.N,
                    format_float(row.median_seconds),
                    format_float(row.memory_doubles),
                ]
            )
        for ratio in ratios:
            writer.writerow(
                [
                    "# growth",
                    ratio.kind,
                    f"n{ratio.n_from}s{ratio.s_from}",
                    f"n{ratio.n_to}s{ratio.s_to}",
                    format_float(ratio.ratio),
                    "",
                ]
            )
        writer.writerow(
            ["# peak_memory_doubles", format_float(peak_memory), "", "", "", ""]
        )
    if not args.no_figure:
        bench_figure(rows, f"{args.out}.png")
    for row in rows:
        print(
            f"{row.path} n={row.n} s={row.s}: "
            f"{row.median_seconds:.4f}s, {row.memory_doubles:.0f} doubles"
        )
    for ratio in ratios:
        print(
            f"{ratio.kind} n{ratio.n_from}s{ratio.s_from} -> "
            f"n{ratio.n_to}s{ratio.s_to}: x{ratio.ratio:.2f}"
        )
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="cbcdbd",
        description=(
            "Construct rank-1 lattice generating vectors digit-by-digit and "
            "verify their error bounds at desk scale."
        ),
        epilog=(
            "Campaign parallelism honors the CBCDBD_WORKERS environment "
            "variable (default: available CPUs)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_construct = sub.add_parser(
        "construct", help="build one generating vector and write it as JSON"
    )
    p_construct.add_argument("--n", type=int, required=True, help="resolution: N = 2^n")
    p_construct.add_argument("--s", type=int, required=True, help="dimension")
    p_construct.add_argument(
        "--weights", required=True, help="weight-scheme JSON file"
    )
    p_construct.add_argument("--path", choices=PATHS, default="auto")
    p_construct.add_argument("--out", default="vector.json")
    p_construct.set_defaults(func=cmd_construct)

    p_verify = sub.add_parser(
        "verify", help="run randomized bound-verification campaigns"
    )
    p_verify.add_argument(
        "--campaign", choices=CAMPAIGNS + ("all",), required=True
    )
    p_verify.add_argument("--n-max", type=int, required=True)
    p_verify.add_argument("--s-max", type=int, required=True)
    p_verify.add_argument("--draws", type=int, required=True)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--budget", type=int, default=DUAL_SUM_BUDGET)
    p_verify.add_argument("--workers", type=int, default=None)
    p_verify.add_argument("--out", default="verify", help="output path prefix")
    p_verify.add_argument("--no-figure", action="store_true")
    p_verify.set_defaults(func=cmd_verify)

    p_conv = sub.add_parser(
        "convergence", help="dual error of constructed vectors over a range of n"
    )
    p_conv.add_argument("--alpha", type=int, required=True, help="even smoothness (2, 4 or 6)")
    p_conv.add_argument("--n-range", required=True, help="inclusive range 'a..b'")
    p_conv.add_argument("--s", type=int, required=True)
    p_conv.add_argument("--weights", required=True)
    p_conv.add_argument("--out", default="convergence", help="output path prefix")
    p_conv.add_argument("--no-figure", action="store_true")
    p_conv.set_defaults(func=cmd_convergence)

    p_bench = sub.add_parser("bench", help="time the fast construction paths")
    p_bench.add_argument(
        "--path", choices=("fast-pod", "fast-product"), required=True
    )
    p_bench.add_argument("--n-list", required=True, help="comma-separated n values")
    p_bench.add_argument("--s-list", required=True, help="comma-separated dimensions")
    p_bench.add_argument("--repeats", type=int, default=3)
    p_bench.add_argument("--out", default="bench", help="output path prefix")
    p_bench.add_argument("--no-figure", action="store_true")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliUsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except EnumerationBudgetError as err:
        print(f"budget exceeded: {err}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError) as err:
        print(f"validation error: {err}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
