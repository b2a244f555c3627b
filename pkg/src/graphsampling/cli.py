"""Command-line driver: ``sample``, ``metrics``, ``compare`` and ``bench``."""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
import tempfile
import time
from pathlib import Path

from .dataflow import ExecutionContext
from .graphio import (
    SyntheticSpec,
    generate_synthetic,
    read_edge_list,
    read_report,
    write_dot,
    write_edge_list,
    write_report,
)
from .metrics import compare_reports, metrics_report, render_comparison
from .sampling import ALGORITHMS, SampleConfig, sample

log = logging.getLogger("graphsampling")

BENCH_HEADER = ["algorithm", "n", "m", "parallelism", "seconds", "sample_vertices", "sample_edges"]
DIRECTIONS = ("in", "out", "both")


def _unit_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must be in [0, 1], got {text}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def _parallelism_list(text: str) -> list[int]:
    return [_positive_int(part) for part in text.split(",") if part.strip()]


def _add_sampling_flags(p: argparse.ArgumentParser, sample_size_required: bool) -> None:
    p.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    p.add_argument(
        "--sample-size",
        type=_unit_float,
        required=sample_size_required,
        default=None if sample_size_required else 0.1,
    )
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--direction", choices=DIRECTIONS, default=None, help="rvn only (default both)")
    p.add_argument("--walkers", type=_positive_int, default=None, help="rw only (default 5)")
    p.add_argument(
        "--jump-probability", type=_unit_float, default=None, help="rw only (default 0.1)"
    )


def _config(parser: argparse.ArgumentParser, args) -> SampleConfig:
    if args.direction is not None and args.algorithm != "rvn":
        parser.error("--direction applies only to --algorithm rvn")
    if args.algorithm != "rw" and (args.walkers is not None or args.jump_probability is not None):
        parser.error("--walkers and --jump-probability apply only to --algorithm rw")
    return SampleConfig(
        algorithm=args.algorithm,
        s=args.sample_size,
        seed=args.seed,
        direction=args.direction or "both",
        walkers=args.walkers or 5,
        jump_probability=0.1 if args.jump_probability is None else args.jump_probability,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphsampling", description="Parallel graph sampling and sample-quality metrics."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample an edge list")
    _add_sampling_flags(p, sample_size_required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--dot", help="also write a DOT rendering with degree/local_cc attributes")
    p.add_argument("--parallelism", type=_positive_int, default=1)

    p = sub.add_parser("metrics", help="compute the metric report of an edge list")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help=".json for JSON, anything else for key = value")
    p.add_argument("--skip-heavy-metrics", action="store_true")
    p.add_argument("--local-cc-mode", choices=("directed", "undirected"), default="directed")
    p.add_argument("--parallelism", type=_positive_int, default=1)

    p = sub.add_parser(
        "compare",
        help="compare two reports, or an edge list against one of its samples",
    )
    p.add_argument("reports", nargs="*", metavar="REPORT", help="two report files to compare")
    p.add_argument("--input", help="edge list to sample and compare against")
    p.add_argument("--algorithm", choices=ALGORITHMS)
    p.add_argument("--sample-size", type=_unit_float)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--direction", choices=DIRECTIONS, default=None)
    p.add_argument("--walkers", type=_positive_int, default=None)
    p.add_argument("--jump-probability", type=_unit_float, default=None)
    p.add_argument("--skip-heavy-metrics", action="store_true")
    p.add_argument("--parallelism", type=_positive_int, default=1)
    p.add_argument("--output", help="write the comparison as CSV")
    p.add_argument("--figure", help="write a ratio bar chart (png, pdf, svg)")

    p = sub.add_parser("bench", help="time read + sample + write across parallelism degrees")
    _add_sampling_flags(p, sample_size_required=False)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--generate", help="synthetic graph: n=<int>,m=<int>[,gamma=<float>]")
    src.add_argument("--input")
    p.add_argument("--parallelism", type=_parallelism_list, default=[1])
    p.add_argument("--repetitions", type=_positive_int, default=3)
    p.add_argument("--out", required=True, help="CSV file to append rows to")
    p.add_argument("--figure", help="write runtime/speedup plots of the whole CSV")
    return parser


def cmd_sample(parser, args) -> int:
    config = _config(parser, args)
    with ExecutionContext(args.parallelism, args.seed) as ctx:
        g = read_edge_list(args.input, ctx)
        s = sample(g, config)
        lines = write_edge_list(s, args.output)
        if args.dot:
            write_dot(s, args.dot)
    log.info("sampled %d vertices, %d edges", s.num_vertices(), lines)
    print(f"{args.algorithm}: |V|={s.num_vertices()} |E|={lines} -> {args.output}")
    return 0


def cmd_metrics(parser, args) -> int:
    with ExecutionContext(args.parallelism) as ctx:
        g = read_edge_list(args.input, ctx)
        report = metrics_report(g, args.skip_heavy_metrics, args.local_cc_mode)
    write_report(report, args.output)
    for name, value in report.values().items():
        print(f"{name} = {'null' if value is None else value}")
    return 0


def cmd_compare(parser, args) -> int:
    labels = ("original", "sample")
    if args.reports:
        if len(args.reports) != 2 or args.input:
            parser.error("compare takes either two REPORT files or --input with sampling flags")
        a, b = (read_report(p) for p in args.reports)
        labels = tuple(Path(p).name for p in args.reports)
    else:
        if not args.input or not args.algorithm or args.sample_size is None:
            parser.error("compare needs two REPORT files or --input, --algorithm and --sample-size")
        config = _config(parser, args)
        with ExecutionContext(args.parallelism, args.seed) as ctx:
            g = read_edge_list(args.input, ctx)
            a = metrics_report(g, args.skip_heavy_metrics)
            b = metrics_report(sample(g, config), args.skip_heavy_metrics)
        labels = ("original", f"{args.algorithm} s={args.sample_size}")
    rows = compare_reports(a, b)
    sys.stdout.write(render_comparison(rows, labels))
    if args.output:
        with open(args.output, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["metric", labels[0], labels[1], "ratio"])
            for r in rows:
                w.writerow([r.metric, "" if r.a is None else r.a, "" if r.b is None else r.b,
                            "" if r.ratio is None else r.ratio])
    if args.figure:
        from .plotting import plot_comparison

        plot_comparison(rows, args.figure, title=f"{labels[1]} vs {labels[0]}")
    return 0


def _time_once(path, config, parallelism, out_path):
    with ExecutionContext(parallelism, config.seed) as ctx:
        start = time.perf_counter()
        g = read_edge_list(path, ctx)
        s = sample(g, config)
        write_edge_list(s, out_path)
        elapsed = time.perf_counter() - start
    return elapsed, g.num_vertices(), g.num_edges(), s.num_vertices(), s.num_edges()


def cmd_bench(parser, args) -> int:
    config = _config(parser, args)
    rows = []
    with tempfile.TemporaryDirectory(prefix="graphsampling-bench-") as tmp:
        if args.generate:
            try:
                spec = SyntheticSpec.parse(args.generate, seed=args.seed)
            except ValueError as exc:
                parser.error(f"--generate: {exc}")
            path = Path(tmp) / "input.txt"
            write_edge_list(generate_synthetic(spec), path)
        else:
            path = Path(args.input)
        out_path = Path(tmp) / "sample.txt"
        for p in args.parallelism:
            runs = [_time_once(path, config, p, out_path) for _ in range(args.repetitions)]
            sizes = {r[1:] for r in runs}
            if len(sizes) != 1:
                raise RuntimeError(f"sample differs between repetitions at parallelism {p}")
            n, m, sv, se = sizes.pop()
            seconds = sum(r[0] for r in runs) / len(runs)
            rows.append([config.algorithm, n, m, p, f"{seconds:.6f}", sv, se])
            log.info("parallelism %d: %.3fs", p, seconds)
    out = Path(args.out)
    fresh = not out.exists() or out.stat().st_size == 0
    with open(out, "a", newline="") as fh:
        w = csv.writer(fh)
        if fresh:
            w.writerow(BENCH_HEADER)
        w.writerows(rows)
    w = csv.writer(sys.stdout)
    w.writerow(BENCH_HEADER)
    w.writerows(rows)
    if args.figure:
        from .plotting import plot_bench, read_bench_csv

        plot_bench(read_bench_csv(out), args.figure)
    return 0


COMMANDS = {"sample": cmd_sample, "metrics": cmd_metrics, "compare": cmd_compare, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](parser, args)
    except SystemExit:
        raise
    except Exception as exc:  # noqa: BLE001 - one-line diagnostic, exit 1
        print(f"graphsampling {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
