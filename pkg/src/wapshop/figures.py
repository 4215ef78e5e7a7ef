"""Bar charts for channel comparison reports, written next to the report."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .gateway import ComparisonReport  # noqa: E402

_WAP_COLOR = "#4d6b2f"
_HTML_COLOR = "#8a5a2b"


def _grouped_bars(ax, labels, wap_values, html_values, ylabel, title):
    x = range(len(labels))
    width = 0.38
    ax.bar([i - width / 2 for i in x], wap_values, width,
           label="wap deck", color=_WAP_COLOR)
    ax.bar([i + width / 2 for i in x], html_values, width,
           label="html page", color=_HTML_COLOR)
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend()


def render_comparison_figures(report: ComparisonReport, outdir: str) -> list:
    """Write bytes/duration/cost charts as PNG files; returns the paths."""
    os.makedirs(outdir, exist_ok=True)
    labels = [row.route for row in report.rows]
    charts = [
        ("bytes.png", "bytes on the wire", "payload per page",
         [r.wml_bytes for r in report.rows], [r.html_bytes for r in report.rows]),
        ("duration.png", "milliseconds", "simulated download time",
         [r.wml_ms for r in report.rows], [r.html_ms for r in report.rows]),
        ("cost.png", "euro cents", "connection cost",
         [r.wml_cost for r in report.rows], [r.html_cost for r in report.rows]),
    ]
    paths = []
    for filename, ylabel, title, wap_values, html_values in charts:
        fig, ax = plt.subplots(figsize=(7, 4))
        _grouped_bars(ax, labels, wap_values, html_values, ylabel, title)
        fig.tight_layout()
        path = os.path.join(outdir, filename)
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)
    return paths
