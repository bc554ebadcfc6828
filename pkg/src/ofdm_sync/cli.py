"""ofdm-sync command line: trace | histogram | selftest.

Exit status: 0 success, 1 a pass/fail flag failed, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import selftest
from .config import ConfigError, RunConfig, parse_config
from .experiments import run_histogram, run_trace, summarize
from .output import emit_plot_script, write_histogram_csv, write_trace_csv


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value settings file")
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--seed", type=int)
    common.add_argument("--n", dest="fft_size", type=int, help="FFT size N")
    common.add_argument("--cp", dest="cp_len", type=int, help="cyclic prefix length")
    common.add_argument("--data-symbols", dest="num_data_symbols", type=int)
    common.add_argument("--lead-noise", dest="lead_noise_len", type=int)
    common.add_argument("--tail-noise", dest="tail_noise_len", type=int)
    common.add_argument("--preamble-cp", dest="preamble_has_cp",
                        action=argparse.BooleanOptionalAction, default=None)
    snr = common.add_mutually_exclusive_group()
    snr.add_argument("--eb-n0-db", dest="eb_n0_db", type=float)
    snr.add_argument("--es-n0-db", dest="es_n0_db", type=float)
    common.add_argument("--taps", help='multipath taps "d1:re,im;d2:re,im"')
    common.add_argument("--trials", type=int)
    common.add_argument("--bins", type=int)
    common.add_argument("--threshold", type=float)
    common.add_argument("--workers", type=int, default=None,
                        help="processes for histogram trials")
    common.add_argument("--no-plot-script", dest="emit_plot_script",
                        action="store_const", const=False, default=None)

    parser = argparse.ArgumentParser(prog="ofdm-sync", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("trace", parents=[common], help="metric traces over one burst")
    sub.add_parser("histogram", parents=[common], help="peak-value histograms over AWGN trials")
    sub.add_parser("selftest", parents=[common], help="run the property checks")
    return parser


FLAG_KEYS = ("output_dir", "seed", "fft_size", "cp_len", "num_data_symbols", "lead_noise_len",
             "tail_noise_len", "preamble_has_cp", "eb_n0_db", "es_n0_db", "taps", "trials",
             "bins", "threshold", "emit_plot_script")


def resolve(args: argparse.Namespace) -> RunConfig:
    text = None
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc.strerror or exc}") from None
    flags = {k: getattr(args, k) for k in FLAG_KEYS}
    return parse_config(text, flags, args.subcommand, args.config)


def _print_summary(summary) -> int:
    for line in summary.lines():
        print(line)
    return 0 if summary.passed else 1


def cmd_trace(run: RunConfig) -> int:
    result = run_trace(run.ofdm, run.channel, run.noise, run.ofdm.base_seed, run.threshold)
    csv_path = run.output_dir / "trace.csv"
    write_trace_csv(result, csv_path, run.to_text())
    if run.emit_plot_script:
        emit_plot_script([csv_path], run.output_dir / "trace.gp")
    print(f"wrote {csv_path}")
    return _print_summary(summarize(result))


def cmd_histogram(run: RunConfig, workers: int | None) -> int:
    result = run_histogram(run.ofdm, run.noise, run.trials, bins=run.bins, workers=workers)
    csv_path = run.output_dir / "histogram.csv"
    write_histogram_csv(result, csv_path, run.to_text())
    if run.emit_plot_script:
        emit_plot_script([csv_path], run.output_dir / "histogram.gp")
    print(f"wrote {csv_path}")
    return _print_summary(summarize(result))


def cmd_selftest() -> int:
    failed = 0
    for name, ok, detail in selftest.run_all():
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        failed += not ok
    return 1 if failed else 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = resolve(args)
    except ConfigError as exc:
        print(f"ofdm-sync: config error: {exc}", file=sys.stderr)
        return 2
    try:
        if run.subcommand == "trace":
            return cmd_trace(run)
        if run.subcommand == "histogram":
            return cmd_histogram(run, args.workers)
        return cmd_selftest()
    except OSError as exc:
        print(f"ofdm-sync: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
