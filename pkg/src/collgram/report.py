"""Comparison report CSV, Table-style text rendering and plot-data CSV."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Mapping, Sequence

from collgram.assoc import DocumentProfile, format_float
from collgram.stats import INDEX_NAMES, ComparisonMatrix, align_profiles, group_summary

REPORT_FIELDS = ("index", "row_translator", "col_translator", "n", "dropped", "mean_diff",
                 "t", "df", "p", "d", "prop", "significant")
PLOT_FIELDS = ("translator", "index", "mean", "stderr")

_TITLES = {"pct_high_mi": "MI", "pct_high_t": "t-score", "ratio": "Ratio"}


def format_p(p: float) -> str:
    if math.isnan(p):
        return "nan"
    if p < 1e-4:
        return f"{p:.6e}"
    return format_float(p)


def _num(value: float) -> str:
    return "nan" if math.isnan(value) else format_float(value)


def write_report(matrices: Sequence[ComparisonMatrix], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_FIELDS)
        for matrix in matrices:
            for (row, col), c in matrix.cells.items():
                writer.writerow([
                    matrix.index_name, row, col, c.n, c.dropped_pairs, _num(c.mean_diff),
                    _num(c.t_stat), c.df, format_p(c.p_two_tailed), _num(c.cohens_d),
                    _num(c.prop_effect), "true" if c.significant else "false",
                ])


def render_table(matrices: Sequence[ComparisonMatrix]) -> str:
    """Plain-text layout: one block per index, rows Di/d/p per row translator.

    Di is column minus row; significant differences carry a ``*``.
    """
    if not matrices:
        return ""
    labels = matrices[0].labels
    cols = labels[1:]
    width = max(10, *(len(c) + 2 for c in cols))
    head_w = max(len(label) for label in labels) + 5
    lines = [" " * head_w + "".join(c.rjust(width) for c in cols)]
    for matrix in matrices:
        lines.append(f"-- {_TITLES.get(matrix.index_name, matrix.index_name)} "
                     f"(threshold p < {matrix.threshold:.6g}, m = {matrix.bonferroni_m})")
        for i, row in enumerate(labels[:-1]):
            for tag, attr in (("Di", "mean_diff"), ("d", "cohens_d"), ("p", "prop_effect")):
                head = f"{row if tag == 'Di' else ''}".ljust(head_w - 3) + tag.ljust(3)
                cells = []
                for j, col in enumerate(cols, 1):
                    if j <= i:
                        cells.append("".rjust(width))
                        continue
                    c = matrix.cell(row, col)
                    value = getattr(c, attr)
                    # d and p are reported unsigned, as effect magnitudes
                    if tag == "d":
                        value = abs(value)
                    text = "nan" if math.isnan(value) else f"{value:.2f}"
                    if tag == "Di" and c.significant:
                        text += "*"
                    cells.append(text.rjust(width))
                lines.append(head + "".join(cells))
    lines.append("Di = column minus row, d = Cohen's d (paired), "
                 "p = proportion of texts agreeing with the mean effect, * = significant")
    return "\n".join(lines) + "\n"


def write_plot_data(profiles_by_translator: Mapping[str, Sequence[DocumentProfile]],
                    path: str | Path) -> None:
    _, aligned = align_profiles(profiles_by_translator)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PLOT_FIELDS)
        for name in INDEX_NAMES:
            for label in profiles_by_translator:
                mean, stderr, _ = group_summary([p.index_value(name) for p in aligned[label]])
                writer.writerow([label, name, _num(mean), _num(stderr)])
