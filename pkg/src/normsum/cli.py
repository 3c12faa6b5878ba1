"""Command-line entry point wrapping the experiment drivers.

Exit codes: 0 on success, 1 when a checked identity or bound fails, 2 on
a usage error (bad flags, infeasible sizes, missing inputs).
"""

from __future__ import annotations

import argparse
import sys

from . import harness as hn

RANDOMIZED = {
    "gen-form",
    "decompose",
    "charsum",
    "energy",
    "lattice",
    "bound-table",
    "energy-scan",
    "identity-suite",
}

DEFAULT_RANGE = {"identity-suite": (3, 7)}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="normsum",
        description="Norm-form character sums: generators, scans, and checks.",
    )
    parser.add_argument("command", choices=hn.COMMANDS)
    parser.add_argument("--p", type=int, help="single prime modulus")
    parser.add_argument("--p-range", help="inclusive prime range, written a..b")
    parser.add_argument("--n", type=int, default=1, help="number of variables")
    parser.add_argument("--k", type=int, default=1, help="form degree")
    parser.add_argument("--r", type=int, default=2, help="moment exponent")
    parser.add_argument("--eps", type=float, default=0.0)
    parser.add_argument("--kappa", type=float, default=0.0)
    parser.add_argument("--seed", type=int, default=None, help="64-bit seed")
    parser.add_argument("--form", help="stored form, JSON")
    parser.add_argument("--decomp", help="stored decomposition, JSON")
    parser.add_argument("--out", help="output path; stdout when absent")
    parser.add_argument(
        "--format", dest="fmt", choices=("csv", "json"), default="csv"
    )
    return parser


def _parse_range(ns) -> tuple:
    if ns.p is not None and ns.p_range is not None:
        raise hn.UsageError("give --p or --p-range, not both")
    if ns.p is not None:
        return ns.p, ns.p
    if ns.p_range is not None:
        lo, sep, hi = ns.p_range.partition("..")
        if not sep or not lo.strip() or not hi.strip():
            raise hn.UsageError(f"range must be written a..b, got {ns.p_range!r}")
        try:
            return int(lo), int(hi)
        except ValueError:
            raise hn.UsageError(f"range bounds must be integers, got {ns.p_range!r}")
    return DEFAULT_RANGE.get(ns.command, (3, 13))


def _dispatch(config: hn.ExperimentConfig, ns):
    command = config.command
    if command == "gen-form":
        return hn.render_object(hn.run_gen_form(config)), 0
    if command == "decompose":
        return hn.render_object(hn.run_decompose(config, ns.form)), 0

    if command == "charsum":
        rows, skips = hn.run_charsum(config, ns.form, ns.decomp)
        columns = hn.SCAN_COLUMNS
    elif command == "energy":
        rows, skips = hn.run_energy(config)
        columns = hn.SCAN_COLUMNS
    elif command == "lattice":
        rows, skips = hn.run_lattice(config)
        columns = hn.SCAN_COLUMNS
    elif command == "weil-check":
        rows, skips = hn.run_weil_check(config)
        columns = hn.SCAN_COLUMNS
    elif command == "moment":
        rows, skips = hn.run_moment(config)
        columns = hn.SCAN_COLUMNS
    elif command == "bound-table":
        rows, skips = hn.run_bound_table(config)
        columns = hn.BOUND_COLUMNS
    elif command == "energy-scan":
        rows, skips = hn.run_energy_scan(config)
        columns = hn.SCAN_COLUMNS
    elif command == "identity-suite":
        results, failures = hn.run_identity_suite(config)
        for f in failures:
            print(f"fail: {f['check']} {f['instance']}", file=sys.stderr)
        return (
            hn.render(hn.IDENTITY_COLUMNS, results, config.fmt),
            1 if failures else 0,
        )
    else:
        raise hn.UsageError(f"unknown command {command!r}")

    for line in skips:
        print(f"skip: {line}", file=sys.stderr)
    return hn.render(columns, rows, config.fmt), 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2

    try:
        if ns.command in RANDOMIZED and ns.seed is None:
            raise hn.UsageError(f"{ns.command} is seeded; --seed is required")
        p_lo, p_hi = _parse_range(ns)
        config = hn.ExperimentConfig(
            command=ns.command,
            p_lo=p_lo,
            p_hi=p_hi,
            n=ns.n,
            k=ns.k,
            r=ns.r,
            eps=ns.eps,
            kappa=ns.kappa,
            seed=ns.seed if ns.seed is not None else 0,
            out=ns.out,
            fmt=ns.fmt,
        )
        text, code = _dispatch(config, ns)
    except hn.UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2

    if config.out:
        try:
            with open(config.out, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"usage error: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
