"""Plot-data emission and rendered log-log error figures for study records."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .metrics import REFERENCE_RATES
from .study import StudyRecord, _write_text

_U_COLUMNS = ["xi_u_L2", "e_u_radau", "e_ux_radau", "e_u_n", "e_u_star", "e_u_cell", "e_u_dom"]
_Q_COLUMNS = ["xi_q_L2", "e_q_radau", "e_qx_radau", "e_q_n", "e_q_star", "e_q_cell", "e_q_dom"]


def _curve(record: StudyRecord, column: str):
    """Positive (N, error) pairs for one metric; zero entries are dropped
    since they carry no slope information."""
    pts = [(r.n_cells, r.value(column)) for r in record.reports]
    return [(n, e) for n, e in pts if e > 0.0]


def _reference(points, slope):
    """Line of the given slope anchored at the finest-mesh data point."""
    if not points:
        return []
    n_last, e_last = points[-1]
    return [(n, e_last * (n_last / n) ** slope) for n, _ in points]


def plot_data_rows(record: StudyRecord) -> list:
    """Long-format rows: (metric, kind, N, log2N, error, log10error)."""
    k = record.config["degree"]
    slopes = REFERENCE_RATES(k)
    rows = []
    for column in _U_COLUMNS + _Q_COLUMNS:
        data = _curve(record, column)
        for n, e in data:
            rows.append((column, "data", n, math.log2(n), e, math.log10(e)))
        for n, e in _reference(data, slopes[column]):
            rows.append((column, f"reference_slope_{slopes[column]}", n, math.log2(n), e, math.log10(e)))
    return rows


def _render_figure(record: StudyRecord, columns, title: str, path: Path):
    k = record.config["degree"]
    slopes = REFERENCE_RATES(k)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    markers = "osv^Dph"
    for marker, column in zip(markers, columns):
        data = _curve(record, column)
        if not data:
            continue
        ns, es = zip(*data)
        ax.loglog(ns, es, marker=marker, label=f"{column} (ref {slopes[column]})")
        ref = _reference(data, slopes[column])
        rns, res = zip(*ref)
        ax.loglog(rns, res, "k--", linewidth=0.7, alpha=0.5)
    ax.set_xlabel("N")
    ax.set_ylabel("error")
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_study_plots(record: StudyRecord, out_dir, stem: str) -> list:
    """Write the delimited curve data and the two rendered figures."""
    out_dir = Path(out_dir)
    lines = ["metric,kind,N,log2_N,error,log10_error"]
    for metric, kind, n, log2n, e, log10e in plot_data_rows(record):
        lines.append(f"{metric},{kind},{n},{repr(log2n)},{repr(e)},{repr(log10e)}")
    data_path = _write_text(out_dir / f"{stem}_plotdata.csv", "\n".join(lines) + "\n")
    cfg = record.config
    subtitle = f"k={cfg['degree']}, {cfg['flux']}, {cfg['bc']}, T={cfg['final_time']}"
    fig_u = _render_figure(record, _U_COLUMNS, f"u errors ({subtitle})", out_dir / f"{stem}_u.png")
    fig_q = _render_figure(record, _Q_COLUMNS, f"q errors ({subtitle})", out_dir / f"{stem}_q.png")
    return [data_path, fig_u, fig_q]
