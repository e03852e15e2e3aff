"""Command-line interface.

Subcommands
-----------
compute
    Solve the closure system and write a hit distribution as CSV.
mc
    Run the Monte Carlo simulator and write landing counts as CSV.
compare
    Run both routes and write a column-by-column comparison report.
hcoeff
    Tabulate flat-floor hit coefficients or the descent multiplier.

All data files start with one ``#`` provenance line followed by a CSV
header and rows; floats are printed with ten significant digits.
Files are written atomically. Exit codes: 0 success, 1 invalid input,
2 numerical or comparison failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    QuadratureError,
    SurfaceFormatError,
    SurfaceShapeError,
    SystemSolveError,
)
from .kernel import HitCoeffTable, descent_multiplier, hit_coeff
from .linsys import assemble_system, hit_distribution, solve_boundary
from .mcsim import TRUNCATION_LIMIT, WalkConfig, compare, run_walks
from .surface import Surface

__all__ = ["main", "run"]

DEFAULT_WINDOW_MARGIN = 50


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fmt(value: float) -> str:
    return "%.10g" % value


def _parse_start(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise _UsageError(f"expected start as 'k,n', got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise _UsageError(f"start components must be integers, got {text!r}") from None


def _parse_window(text: str) -> tuple[int, int]:
    parts = text.split("..")
    if len(parts) != 2:
        raise _UsageError(f"expected window as 'lo..hi', got {text!r}")
    try:
        lo, hi = int(parts[0]), int(parts[1])
    except ValueError:
        raise _UsageError(f"window bounds must be integers, got {text!r}") from None
    if hi < lo:
        raise _UsageError(f"window is empty: {text!r}")
    return lo, hi


def _parse_seed(text: str) -> int:
    try:
        seed = int(text, 0)
    except ValueError:
        raise _UsageError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= seed < 2**64:
        raise _UsageError("seed must fit in an unsigned 64-bit integer")
    return seed


def _load_surface(path: str) -> Surface:
    # Unreadable input is a usage problem; exit 3 is reserved for output I/O.
    try:
        return Surface.from_file(path)
    except OSError as exc:
        raise _UsageError(f"cannot read surface file: {exc}") from exc


def _resolve_window(args, s: Surface) -> tuple[int, int]:
    if args.window is None:
        margin = s.half_width + DEFAULT_WINDOW_MARGIN
        return -margin, margin
    return _parse_window(args.window)


def _write_text(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    parent = target.parent if str(target.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(dir=str(parent), prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _provenance(command: str, fields: dict[str, object]) -> str:
    body = " ".join(f"{key}={value}" for key, value in fields.items())
    return f"# hitdist {__version__} {command} {body}\n"


def _cmd_compute(args) -> int:
    s = _load_surface(args.surface)
    k, n = _parse_start(args.start)
    x_lo, x_hi = _resolve_window(args, s)
    table = HitCoeffTable()
    system = assemble_system(s, table)
    solution = solve_boundary(system, x_lo, x_hi)
    dist = hit_distribution(solution, k, n)
    lines = [
        _provenance(
            "compute",
            {
                "surface": s.digest()[:12],
                "start": f"{k},{n}",
                "window": f"{x_lo}..{x_hi}",
                "mass": _fmt(dist.mass),
                "tail_estimate": _fmt(dist.tail_estimate),
            },
        ),
        "x,probability\n",
    ]
    lines += [f"{x},{_fmt(p)}\n" for x, p in zip(dist.targets, dist.probs)]
    _write_text(args.out, "".join(lines))
    if args.figure:
        from .figures import save_distribution_figure

        save_distribution_figure(dist, args.figure)
    return 0


def _cmd_mc(args) -> int:
    s = _load_surface(args.surface)
    start = _parse_start(args.start)
    config = WalkConfig(walks=args.walks, max_steps=args.max_steps, seed=args.seed)
    tally = run_walks(s, start, config, threads=args.threads)
    if tally.truncated_fraction > TRUNCATION_LIMIT:
        print(
            f"error: {tally.truncated_fraction:.4%} of walks exceeded the step "
            f"budget (limit {TRUNCATION_LIMIT:.0%}); raise --max-steps",
            file=sys.stderr,
        )
        return 2
    lines = [
        _provenance(
            "mc",
            {
                "surface": s.digest()[:12],
                "start": f"{start[0]},{start[1]}",
                "walks": config.walks,
                "max_steps": config.max_steps,
                "seed": config.seed,
                "absorbed": tally.absorbed,
                "truncated": tally.truncated,
            },
        ),
        "x,count\n",
    ]
    lines += [f"{x},{tally.counts[x]}\n" for x in sorted(tally.counts)]
    _write_text(args.out, "".join(lines))
    return 0


def _cmd_compare(args) -> int:
    s = _load_surface(args.surface)
    k, n = _parse_start(args.start)
    x_lo, x_hi = _resolve_window(args, s)
    t0 = time.perf_counter()
    table = HitCoeffTable()
    system = assemble_system(s, table)
    solution = solve_boundary(system, x_lo, x_hi)
    dist = hit_distribution(solution, k, n)
    t1 = time.perf_counter()
    config = WalkConfig(walks=args.walks, max_steps=args.max_steps, seed=args.seed)
    tally = run_walks(s, (k, n), config, threads=args.threads)
    t2 = time.perf_counter()
    report = compare(
        dist,
        tally,
        runtime={"model_seconds": t1 - t0, "mc_seconds": t2 - t1},
    )
    lines = [
        _provenance(
            "compare",
            {
                "surface": s.digest()[:12],
                "start": f"{k},{n}",
                "window": f"{x_lo}..{x_hi}",
                "walks": config.walks,
                "seed": config.seed,
                "tv_distance": _fmt(report.tv_distance),
                "max_abs_diff": _fmt(report.max_abs_diff),
                "truncated_fraction": _fmt(report.truncated_fraction),
                "model_mass": _fmt(report.model_mass),
                "empirical_outside_mass": _fmt(report.empirical_outside_mass),
                "negative_model_count": report.negative_model_count,
                "model_seconds": _fmt(report.runtime["model_seconds"]),
                "mc_seconds": _fmt(report.runtime["mc_seconds"]),
            },
        ),
        "x,model,empirical,stderr\n",
    ]
    lines += [
        f"{x},{_fmt(pm)},{_fmt(pe)},{_fmt(se)}\n"
        for x, pm, pe, se in zip(
            report.targets, report.model, report.empirical, report.stderr
        )
    ]
    _write_text(args.out, "".join(lines))
    if args.figure:
        from .figures import save_comparison_figure

        save_comparison_figure(report, args.figure)
    if not report.truncation_ok:
        print(
            f"error: {report.truncated_fraction:.4%} of walks exceeded the step "
            f"budget (limit {TRUNCATION_LIMIT:.0%})",
            file=sys.stderr,
        )
        return 2
    if report.tv_distance > args.threshold:
        print(
            f"error: total-variation distance {report.tv_distance:.6f} exceeds "
            f"threshold {args.threshold:.6f}",
            file=sys.stderr,
        )
        return 2
    return 0


def _cmd_hcoeff(args) -> int:
    if args.phi:
        if args.level is not None or args.k_max is not None:
            raise _UsageError("--phi does not combine with --level/--k-max")
        if args.samples < 2:
            raise _UsageError("--samples must be at least 2")
        thetas = np.linspace(0.0, np.pi, args.samples)
        values = descent_multiplier(thetas)
        lines = [
            _provenance("hcoeff", {"curve": "multiplier", "samples": args.samples}),
            "theta,value\n",
        ]
        lines += [f"{_fmt(t)},{_fmt(v)}\n" for t, v in zip(thetas, values)]
        _write_text(args.out, "".join(lines))
        if args.figure:
            from .figures import save_multiplier_figure

            save_multiplier_figure(thetas, values, args.figure)
        return 0
    if args.level is None or args.k_max is None:
        raise _UsageError("provide --level and --k-max, or --phi")
    if args.level < 0:
        raise _UsageError("--level must be nonnegative")
    if args.k_max < 0:
        raise _UsageError("--k-max must be nonnegative")
    table = HitCoeffTable()
    offsets = np.arange(0, args.k_max + 1)
    values = np.array([hit_coeff(table, args.level, int(k)) for k in offsets])
    lines = [
        _provenance("hcoeff", {"level": args.level, "k_max": args.k_max}),
        "k,coefficient\n",
    ]
    lines += [f"{k},{_fmt(v)}\n" for k, v in zip(offsets, values)]
    _write_text(args.out, "".join(lines))
    if args.figure:
        from .figures import save_coeff_figure

        save_coeff_figure(args.level, offsets, values, args.figure)
    return 0


def _add_common(parser: _Parser, window: bool):
    parser.add_argument("--surface", required=True, help="path to a surface file")
    parser.add_argument(
        "--from",
        dest="start",
        required=True,
        metavar="K,N",
        help="start point as 'k,n'",
    )
    if window:
        parser.add_argument(
            "--window",
            default=None,
            metavar="LO..HI",
            help="target columns, default covers the support plus "
            f"{DEFAULT_WINDOW_MARGIN} columns each side",
        )


def _add_mc_flags(parser: _Parser):
    parser.add_argument("--walks", type=int, default=1_000_000)
    parser.add_argument("--max-steps", type=int, default=1_000_000)
    parser.add_argument("--seed", type=_parse_seed, default=0)
    parser.add_argument("--threads", type=int, default=None)


def build_parser() -> _Parser:
    parser = _Parser(prog="hitdist", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hitdist {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="solve for a hit distribution")
    _add_common(p, window=True)
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--figure", default=None, help="also render a figure to this path")
    p.set_defaults(func=_cmd_compute)

    p = sub.add_parser("mc", help="simulate walks and tally landings")
    _add_common(p, window=False)
    _add_mc_flags(p)
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.set_defaults(func=_cmd_mc)

    p = sub.add_parser("compare", help="check the model against simulation")
    _add_common(p, window=True)
    _add_mc_flags(p)
    p.add_argument("--threshold", type=float, default=0.05)
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--figure", default=None, help="also render a figure to this path")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("hcoeff", help="tabulate kernel quantities")
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--phi", action="store_true", help="sample the descent multiplier")
    p.add_argument("--samples", type=int, default=181)
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--figure", default=None, help="also render a figure to this path")
    p.set_defaults(func=_cmd_hcoeff)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SurfaceFormatError, SurfaceShapeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (QuadratureError, SystemSolveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def run():
    sys.exit(main())
