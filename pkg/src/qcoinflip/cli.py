"""Command-line front end.

Subcommands: ``simulate`` (run a game), ``bounds`` (closed-form report),
``sweep`` (CSV table over an alpha grid, optionally with a rendered figure),
``optimize`` (equalization angles), ``verify`` (numerical check suites).

Conventions: angles are radians (decimal) or the literal ``optimal``; floats
are printed with 12 significant digits; JSON key order is fixed; CSV uses
comma separators, LF line endings and '.' decimals.  Sampled runs draw from
a Philox counter-based generator keyed by ``--seed``, so identical
invocations produce byte-identical output.  Exit codes: 0 success, 1
verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import base64
import binascii
import json
import math
import sys

from . import bounds as bounds_mod
from . import plots, strategies, verify
from .protocol import run_sampled, run_weak_exact, run_strong_exact, trace_game
from .states import ProtocolParams

ALICE_NAMES = "honest, alice-opt, chart:<base64 params>"
BOB_NAMES = "honest, bob-opt-weak, bob-opt-weak-literal, bob-helstrom-0, bob-helstrom-1, chart:<base64 params>"


class UsageError(Exception):
    pass


def fmt_float(x: float) -> str:
    return f"{float(x):.12g}"


def to_json(obj, indent: int = 0) -> str:
    """Serialize with insertion-order keys and 12-significant-digit floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{to_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _emit(text: str, out_path: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out_path:
        with open(out_path, "w", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _resolve_alpha(text: str, game: str) -> float:
    if text == "optimal":
        if game == "weak":
            alpha, _ = bounds_mod.solve_weak_equalization()
            return alpha
        return bounds_mod.solve_strong_equalization()
    try:
        alpha = float(text)
    except ValueError:
        raise UsageError(f"malformed alpha {text!r}: expected a number in radians or 'optimal'")
    if not (0.0 <= alpha <= math.pi):
        raise UsageError(f"alpha {alpha} out of range [0, pi]")
    return alpha


def _decode_chart_params(name: str):
    payload = name[len("chart:"):]
    try:
        decoded = base64.b64decode(payload.encode("ascii"), validate=True)
        values = json.loads(decoded)
    except (binascii.Error, ValueError, UnicodeDecodeError):
        raise UsageError("chart parameters must be base64-encoded JSON array of numbers")
    if not isinstance(values, list) or not all(isinstance(v, (int, float)) for v in values):
        raise UsageError("chart parameters must decode to a JSON array of numbers")
    return [float(v) for v in values]


def _resolve_alice(name: str):
    if name == "honest":
        return strategies.honest_alice()
    if name == "alice-opt":
        return strategies.cheating_alice_optimal()
    if name.startswith("chart:"):
        try:
            return strategies.decode_adversary("alice-commit", _decode_chart_params(name))
        except strategies.DecodeError as exc:
            raise UsageError(f"invalid alice chart: {exc}")
    raise UsageError(f"unknown alice strategy {name!r}; expected one of: {ALICE_NAMES}")


def _resolve_bob(name: str):
    if name == "honest":
        return strategies.honest_bob()
    if name == "bob-opt-weak":
        return strategies.cheating_bob_weak_optimal()
    if name == "bob-opt-weak-literal":
        return strategies.cheating_bob_weak_literal()
    if name in ("bob-helstrom-0", "bob-helstrom-1"):
        return strategies.cheating_bob_strong_helstrom(target=int(name[-1]))
    if name.startswith("chart:"):
        try:
            return strategies.decode_adversary("bob-extract", _decode_chart_params(name))
        except strategies.DecodeError as exc:
            raise UsageError(f"invalid bob chart: {exc}")
    raise UsageError(f"unknown bob strategy {name!r}; expected one of: {BOB_NAMES}")


def _outcome_rows(outcomes) -> list[dict]:
    return [
        {"kind": o.kind.value, "c_a": o.c_a, "c_b": o.c_b, "probability": o.probability}
        for o in outcomes
    ]


def cmd_simulate(args) -> int:
    game = args.game
    alpha = _resolve_alpha(args.alpha, game)
    params = ProtocolParams(alpha)
    alice = _resolve_alice(args.alice)
    bob = _resolve_bob(args.bob)

    report = {
        "game": game,
        "alpha": alpha,
        "alice": args.alice,
        "bob": args.bob,
        "mode": args.mode,
    }
    if args.mode == "exact":
        runner = run_weak_exact if game == "weak" else run_strong_exact
        outcomes = runner(alice, bob, params)
        report["outcomes"] = _outcome_rows(outcomes)
    else:
        if args.trials < 1:
            raise UsageError(f"--trials must be >= 1 in sampled mode, got {args.trials}")
        counts = run_sampled(game, alice, bob, params, args.trials, args.seed)
        report["trials"] = args.trials
        report["seed"] = args.seed
        report["counts"] = [
            {"kind": kind.value, "count": count, "frequency": count / args.trials}
            for kind, count in counts.items()
        ]

    if args.format == "json":
        text = to_json(report)
    elif args.format == "csv":
        if args.mode == "exact":
            lines = ["kind,c_a,c_b,probability"]
            for row in report["outcomes"]:
                c_a = "" if row["c_a"] is None else row["c_a"]
                c_b = "" if row["c_b"] is None else row["c_b"]
                lines.append(f"{row['kind']},{c_a},{c_b},{fmt_float(row['probability'])}")
        else:
            lines = ["kind,count,frequency"]
            for row in report["counts"]:
                lines.append(f"{row['kind']},{row['count']},{fmt_float(row['frequency'])}")
        text = "\n".join(lines)
    else:
        lines = [f"game={game} alpha={fmt_float(alpha)} alice={args.alice} bob={args.bob} mode={args.mode}"]
        if args.mode == "exact":
            for row in report["outcomes"]:
                lines.append(f"  {row['kind']:<16} probability={fmt_float(row['probability'])}")
        else:
            lines.append(f"  trials={args.trials} seed={args.seed}")
            for row in report["counts"]:
                lines.append(f"  {row['kind']:<16} count={row['count']} frequency={fmt_float(row['frequency'])}")
        if args.show_transcript:
            lines.append("")
            for transcript in trace_game(game, alice, bob, params):
                lines.append(transcript.to_text())
        text = "\n".join(lines)
    _emit(text, args.out)
    return 0


_BOUND_FIELDS = ("alpha", "alice_weak", "bob_weak", "alice_strong", "bob_strong",
                 "fidelity_rho", "trace_dist_rho", "weak_bias", "strong_bias")


def cmd_bounds(args) -> int:
    alpha = _resolve_alpha(args.alpha, args.game)
    report = bounds_mod.bound_report(alpha)
    data = {"game": args.game}
    data.update({field: getattr(report, field) for field in _BOUND_FIELDS})
    if args.format == "json":
        text = to_json(data)
    elif args.format == "csv":
        header = ",".join(["game", *_BOUND_FIELDS])
        row = ",".join([args.game, *(fmt_float(getattr(report, f)) for f in _BOUND_FIELDS)])
        text = header + "\n" + row
    else:
        lines = [f"game={args.game}"]
        lines.extend(f"{field} = {fmt_float(getattr(report, field))}" for field in _BOUND_FIELDS)
        text = "\n".join(lines)
    _emit(text, args.out)
    return 0


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"malformed grid {text!r}: expected start:stop:points")
    try:
        start, stop = float(parts[0]), float(parts[1])
        points = int(parts[2])
    except ValueError:
        raise UsageError(f"malformed grid {text!r}: expected start:stop:points")
    if points < 2:
        raise UsageError(f"grid needs at least 2 points, got {points}")
    if not (0.0 <= start <= math.pi) or not (0.0 <= stop <= math.pi) or start >= stop:
        raise UsageError(f"grid bounds must satisfy 0 <= start < stop <= pi, got {text!r}")
    step = (stop - start) / (points - 1)
    return [start + i * step for i in range(points)]


SWEEP_COLUMNS = ("alpha", "alice_weak_bound", "bob_weak_bound", "alice_weak_achieved",
                 "bob_weak_achieved", "alice_strong_bound", "bob_strong_bound",
                 "fidelity", "trace_distance")


def cmd_sweep(args) -> int:
    if args.format not in (None, "csv"):
        raise UsageError("sweep output is CSV only")
    grid = _parse_grid(args.grid)
    rows = verify.sweep(grid)
    lines = [",".join(SWEEP_COLUMNS)]
    for row in rows:
        lines.append(",".join(fmt_float(getattr(row, col)) for col in SWEEP_COLUMNS))
    _emit("\n".join(lines), args.out)
    if args.plot:
        alpha_star, _ = bounds_mod.solve_weak_equalization()
        plots.render_sweep_figure(rows, args.plot, alpha_star=alpha_star)
    return 0


def cmd_optimize(args) -> int:
    weak_alpha, weak_p = bounds_mod.solve_weak_equalization()
    strong_alpha = bounds_mod.solve_strong_equalization()
    strong_p = bounds_mod.alice_strong_bound(strong_alpha)
    report = {
        "weak": {
            "alpha_star": weak_alpha,
            "p_star": weak_p,
            "bias": weak_p - 0.5,
            "composed_strong_bias": bounds_mod.weak_to_strong_bias(weak_p, weak_p),
        },
        "strong": {
            "alpha_star": strong_alpha,
            "p_star": strong_p,
            "bias": strong_p - 0.5,
        },
    }
    if args.format == "text":
        lines = []
        for game in ("weak", "strong"):
            entries = " ".join(f"{k}={fmt_float(v)}" for k, v in report[game].items())
            lines.append(f"{game}: {entries}")
        text = "\n".join(lines)
    else:
        text = to_json(report)
    _emit(text, args.out)
    return 0


def cmd_verify(args) -> int:
    report = verify.run_suite(args.suite, args.seed)
    _emit(to_json(report), args.out)
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcoinflip",
        description="Simulate and verify the qutrit coin-flipping games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one game configuration")
    sim.add_argument("--game", choices=("weak", "strong"), default="weak")
    sim.add_argument("--alpha", default="optimal", help="angle in radians, or 'optimal'")
    sim.add_argument("--alice", default="honest", help=ALICE_NAMES)
    sim.add_argument("--bob", default="honest", help=BOB_NAMES)
    sim.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    sim.add_argument("--trials", type=int, default=100000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--format", choices=("json", "csv", "text"), default="text")
    sim.add_argument("--out", default=None)
    sim.add_argument("--show-transcript", action="store_true",
                     help="append per-branch transcripts (text format)")
    sim.set_defaults(func=cmd_simulate)

    bnd = sub.add_parser("bounds", help="closed-form bound report at one angle")
    bnd.add_argument("--game", choices=("weak", "strong"), default="weak")
    bnd.add_argument("--alpha", default="optimal")
    bnd.add_argument("--format", choices=("json", "csv", "text"), default="text")
    bnd.add_argument("--out", default=None)
    bnd.set_defaults(func=cmd_bounds)

    swp = sub.add_parser("sweep", help="CSV table of bounds and achieved values over a grid")
    swp.add_argument("--grid", required=True, help="start:stop:points (radians)")
    swp.add_argument("--format", choices=("csv",), default=None)
    swp.add_argument("--out", default=None)
    swp.add_argument("--plot", default=None,
                     help="also render the sweep figure to this file (png)")
    swp.set_defaults(func=cmd_sweep)

    opt = sub.add_parser("optimize", help="equalization angles and minimal biases")
    opt.add_argument("--format", choices=("json", "text"), default="json")
    opt.add_argument("--out", default=None)
    opt.set_defaults(func=cmd_optimize)

    ver = sub.add_parser("verify", help="run a numerical verification suite")
    ver.add_argument("--suite", choices=verify.VERIFY_SUITES, default="all")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--out", default=None)
    ver.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
