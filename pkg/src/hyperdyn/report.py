"""Run reports: CSV trace, human-readable summary, and decay figures.

The CSV is fully determined by the config and the effective settings, so
re-running the same experiment yields a byte-identical file; wall-clock
time appears only in the text summary.  Floats are rendered with 17
significant digits.  Alongside the CSV the report renders a matplotlib
figure of the traced quantities to a PNG file.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from . import __version__
from .config import ExperimentConfig


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


class RunReport:
    """Everything a run produced: columns/rows for the CSV, summary lines,
    the verdict and the exit code it maps to."""

    def __init__(self, config: ExperimentConfig, columns: list[str],
                 rows: list[tuple], verdict: str, exit_code: int,
                 summary: list[str], settings: list[tuple[str, str]],
                 wall_clock: float = 0.0):
        self.config = config
        self.columns = columns
        self.rows = rows
        self.verdict = verdict
        self.exit_code = exit_code
        self.summary = summary
        self.settings = settings  # effective values not present in the config
        self.wall_clock = wall_clock

    def header_lines(self) -> list[str]:
        out = [f"# hyperdyn {__version__}"]
        for key, value in self.config.raw_lines:
            out.append(f"# {key} = {value}")
        for key, value in self.settings:
            out.append(f"# {key} = {value}")
        out.append(f"# verdict = {self.verdict}")
        return out

    def write_csv(self, path: str) -> None:
        lines = self.header_lines()
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(_fmt(x) for x in row))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")

    def write_summary(self, path: str) -> None:
        lines = [f"hyperdyn {__version__} run summary", ""]
        lines += [f"  {key} = {value}" for key, value in self.config.raw_lines]
        lines += [f"  {key} = {value}" for key, value in self.settings]
        lines.append("")
        lines += self.summary
        lines.append(f"verdict: {self.verdict}")
        lines.append(f"wall clock: {self.wall_clock:.3f} s")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")


def _column(rows, idx):
    return [row[idx] for row in rows]


def render_figure(report: RunReport, path: str) -> None:
    """Semilog picture of the traced decay quantities."""
    kind = report.config.kind
    cols = report.columns
    rows = report.rows
    fig, ax = plt.subplots(figsize=(7.0, 4.5), dpi=150)
    if not rows:
        ax.set_axis_off()
        ax.text(0.5, 0.5, "empty trace", ha="center", va="center")
    elif kind in ("criterion", "mixing", "multiplier"):
        xs = _column(rows, 0)
        for i, name in enumerate(cols[1:], start=1):
            if name.startswith("log10_"):
                continue
            vals = [max(v, 1e-320) for v in _column(rows, i)]
            ax.semilogy(xs, vals, label=name)
        for t in report.config.thresholds:
            ax.axhline(t, color="grey", lw=0.5, ls=":")
        ax.set_xlabel("iteration")
        ax.set_ylabel("sup product")
        ax.legend(fontsize=8)
    elif kind in ("witness", "c0-witness"):
        xs = _column(rows, 0)
        for i, name in enumerate(cols[1:], start=1):
            vals = [max(v, 1e-320) for v in _column(rows, i)]
            style = "-" if name.startswith("d_") else "--"
            ax.semilogy(xs, vals, style, label=name)
        ax.axhline(report.config.decay_threshold, color="grey", lw=0.5, ls=":")
        ax.set_xlabel("steps r")
        ax.set_ylabel("distance")
        ax.legend(fontsize=8)
    elif kind in ("segal-norm", "approx-identity"):
        xs = _column(rows, 0)
        for i, name in enumerate(cols[1:], start=1):
            vals = [max(v, 1e-320) for v in _column(rows, i)]
            ax.semilogy(xs, vals, label=name)
        ax.set_xlabel("series index k")
        ax.legend(fontsize=8)
    elif kind == "runaway":
        xs = _column(rows, 0)
        ax.plot(xs, _column(rows, 1), label="separation")
        ax.axhline(0.0, color="grey", lw=0.5)
        ax.set_xlabel("iterate n")
        ax.set_ylabel("gap between image and K")
        ax.legend(fontsize=8)
    ax.set_title(f"{kind} ({report.verdict})")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def write_outputs(report: RunReport, out_dir: str, stem: str,
                  plot: bool = True) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    csv_path = os.path.join(out_dir, f"{stem}_trace.csv")
    report.write_csv(csv_path)
    written.append(csv_path)
    summary_path = os.path.join(out_dir, f"{stem}_summary.txt")
    report.write_summary(summary_path)
    written.append(summary_path)
    if plot:
        fig_path = os.path.join(out_dir, f"{stem}_decay.png")
        render_figure(report, fig_path)
        written.append(fig_path)
    return written
