"""CSV serialization of experiment results and gnuplot scripts to view them."""

from __future__ import annotations

import csv
import os
from pathlib import Path

import numpy as np

from .experiments import HistogramResult, TraceResult

TRACE_HEADER = ["n", "m_old", "m_new", "m_delayed_r"]
HISTOGRAM_HEADER = ["bin_left", "bin_right", "count_old_norm", "count_new_norm"]
META_NAME = "meta.txt"


def fmt(value: float) -> str:
    # 9 digits after the point in scientific form; re-reads within 5e-10 relative
    return f"{float(value):.9e}"


def _write_rows(path: Path, header, rows):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _write_meta(path: Path, config_text: str, extra: dict[str, str]):
    meta = Path(path).with_name(META_NAME)
    lines = [config_text.rstrip("\n")] if config_text else []
    # results as comments so the file still parses as a config
    lines += [f"# {k} = {v}" for k, v in extra.items()]
    try:
        meta.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write {meta}: {exc.strerror or exc}") from exc
    return meta


def write_trace_csv(result: TraceResult, path, config_text: str = "") -> Path:
    """One row per causal index; a ``meta.txt`` sidecar records config and seed."""
    rows = ([int(n), fmt(a), fmt(b), fmt(c)] for n, a, b, c in
            zip(result.indices, result.m_old, result.m_new, result.m_delayed_r))
    _write_rows(path, TRACE_HEADER, rows)
    extra = {
        "trial_seed": str(result.seed),
        "expected_peak_index": str(result.expected_peak_index),
        "burst_end_index": str(result.burst_end_index),
        "spurious_peaks_old": str(len(result.spurious_peaks_old)),
        "spurious_peaks_new": str(len(result.spurious_peaks_new)),
    }
    if result.report_new.accepted is not None:
        extra["accepted_index"] = str(result.report_new.accepted[0])
    return _write_meta(path, config_text, extra)


def write_histogram_csv(result: HistogramResult, path, config_text: str = "") -> Path:
    if result.trials < 1:
        raise ValueError("histogram has no trials")
    edges = result.bin_edges
    rows = ([fmt(edges[i]), fmt(edges[i + 1]), fmt(result.counts_old[i]), fmt(result.counts_new[i])]
            for i in range(len(edges) - 1))
    _write_rows(path, HISTOGRAM_HEADER, rows)
    extra = {
        "trials": str(result.trials),
        "base_seed": str(result.base_seed),
        "mean_old": fmt(result.mean_old),
        "mean_new": fmt(result.mean_new),
        "var_old": fmt(result.var_old),
        "var_new": fmt(result.var_new),
        "degenerate": str(result.degenerate).lower(),
    }
    return _write_meta(path, config_text, extra)


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float).reshape(-1, len(rows[0]))


_TRACE_GP = """\
set datafile separator ','
set key autotitle columnhead
set xlabel 'n'
set ylabel 'metric'
set title 'Timing metric, classic vs modified'
set grid
plot {plots}
pause mouse close
"""

_HIST_GP = """\
set datafile separator ','
set key autotitle columnhead
set style fill solid 0.6
set boxwidth 0.9 relative
set ylabel 'fraction of trials'
set xlabel 'metric value at expected peak'
set multiplot layout 1,2
{plots}
unset multiplot
pause mouse close
"""


def emit_plot_script(csv_paths, output_path) -> Path:
    """Write a gnuplot script for trace or histogram CSVs, referenced by relative path."""
    output_path = Path(output_path)
    base = output_path.parent
    csv_paths = list(csv_paths)
    if not csv_paths:
        raise ValueError("no CSV files given")
    trace_plots, hist_plots = [], []
    for csv_path in map(Path, csv_paths):
        if not csv_path.is_file():
            raise FileNotFoundError(f"CSV not found: {csv_path}")
        with open(csv_path, encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
        rel = os.path.relpath(csv_path, base).replace(os.sep, "/")
        if header == TRACE_HEADER:
            trace_plots += [f"'{rel}' using 1:2 with lines title 'M old'",
                            f"'{rel}' using 1:3 with lines title 'M new'"]
        elif header == HISTOGRAM_HEADER:
            centre = "(($1+$2)/2)"
            for col, name in ((3, "S-C statistic"), (4, "new statistic")):
                hist_plots.append(f"set title 'Normalized histogram, {name}'\n"
                                  f"plot '{rel}' using {centre}:{col} with boxes notitle")
        else:
            raise ValueError(f"{csv_path}: unrecognized CSV header {header}")
    if trace_plots and hist_plots:
        raise ValueError("mix of trace and histogram CSVs in one script")
    if trace_plots:
        text = _TRACE_GP.format(plots=", \\\n     ".join(trace_plots))
    else:
        text = _HIST_GP.format(plots="\n".join(hist_plots))
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(text, encoding="utf-8", newline="\n")
    return output_path
