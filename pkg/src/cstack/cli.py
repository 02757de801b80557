"""Command line interface: generate inputs, run algorithms, compare, bench.

Exit codes: 0 success, 1 usage error, 2 runtime error, 3 the two stacks
diverged under `compare`.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import DESK_CAP, bench, execute_run, metrics_footer, write_csv
from .generators import GEN_KINDS, GenSpec, generate
from .metrics import SCHEDULES, resolve_p
from .problems import PROBLEMS
from .runner import LineSource, run_checked


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _read_header_n(path: str) -> int | None:
    """Expected size recorded in a generated file's header, if present."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            first = fh.readline()
    except OSError:
        return None
    if not first.startswith("#"):
        return None
    for field in first[1:].split():
        if field.startswith("n="):
            try:
                return int(field[2:])
            except ValueError:
                return None
    return None


def _count_data_lines(path: str) -> int:
    count = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            s = line.strip()
            if s and not s.startswith("#"):
                count += 1
    return count


def _resolve_n_expect(args) -> int:
    if args.n_expect:
        return args.n_expect
    n = _read_header_n(args.input)
    if n is None:
        n = _count_data_lines(args.input)
    return max(n, 2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cstack", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic input file")
    g.add_argument("--kind", choices=GEN_KINDS, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--rho", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    r = sub.add_parser("run", help="run one problem over one input")
    r.add_argument("--problem", choices=sorted(PROBLEMS), required=True)
    r.add_argument("--stack", choices=("classic", "compressed"), default="classic")
    r.add_argument("--p", default="sqrt", help="int or one of " + ", ".join(SCHEDULES))
    r.add_argument("--n-expect", type=int, default=0)
    r.add_argument("--k", type=int, default=None)
    r.add_argument("--input", required=True)
    r.add_argument("--out", default=None, help="report destination (default stdout)")

    c = sub.add_parser("compare", help="lockstep classic/compressed state check")
    c.add_argument("--problem", choices=sorted(PROBLEMS), required=True)
    c.add_argument("--p", default="sqrt")
    c.add_argument("--n-expect", type=int, default=0)
    c.add_argument("--k", type=int, default=None)
    c.add_argument("--input", required=True)

    b = sub.add_parser("bench", help="sweep sizes, write CSV metrics")
    b.add_argument("--problem", choices=sorted(PROBLEMS), default="testrun")
    b.add_argument("--kind", choices=GEN_KINDS, default="pushonly")
    b.add_argument("--stack", choices=("classic", "compressed"), required=True)
    b.add_argument("--p", default="sqrt")
    b.add_argument("--rho", type=float, default=1.0)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--sizes", required=True,
                   help="power-of-two exponent range, e.g. 10..14 for 2^10..2^14")
    b.add_argument("--out", required=True)
    b.add_argument("--cache-dir", default="bench-inputs")
    b.add_argument("--force-large", action="store_true",
                   help=f"allow sizes beyond the desk cap of {DESK_CAP}")
    return parser


def _parse_sizes(text: str) -> list[int]:
    lo, _, hi = text.partition("..")
    if not hi:
        hi = lo
    a, b = int(lo), int(hi)
    if a > b:
        raise ValueError(f"bad size range {text!r}")
    return [2 ** e for e in range(a, b + 1)]


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1

    try:
        if args.command == "generate":
            generate(GenSpec(args.kind, args.n, args.rho, args.seed, args.out))
            print(f"wrote {args.out}")
            return 0

        if args.command == "run":
            n_expect = _resolve_n_expect(args)
            p = resolve_p(args.p, n_expect) if args.stack == "compressed" else None
            with LineSource.from_path(args.input) as source:
                result = execute_run(
                    args.problem, source, args.stack,
                    n_expect=n_expect, p=p, k=args.k,
                )
            out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
            try:
                for line in result.report:
                    print(line, file=out)
                for line in metrics_footer(result.metrics):
                    print(line, file=out)
            finally:
                if out is not sys.stdout:
                    out.close()
            return 0

        if args.command == "compare":
            n_expect = _resolve_n_expect(args)
            p = resolve_p(args.p, n_expect)
            algo = PROBLEMS[args.problem]()
            if args.k is not None:
                algo.k = args.k
            with LineSource.from_path(args.input) as source:
                ok, detail = run_checked(algo, source, p, n_expect=n_expect)
            if ok:
                print(f"ok: classic and compressed agree (p={p})")
                return 0
            print(detail, file=sys.stderr)
            return 3

        if args.command == "bench":
            sizes = _parse_sizes(args.sizes)
            rows = bench(
                args.problem, args.kind, args.stack, args.p, sizes,
                rho=args.rho, seed=args.seed, cache_dir=Path(args.cache_dir),
                force_large=args.force_large,
            )
            write_csv(rows, args.out)
            print(f"wrote {len(rows)} rows to {args.out}")
            return 0
    except BrokenPipeError:
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 1


if __name__ == "__main__":
    sys.exit(main())
