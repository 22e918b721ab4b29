"""Binned aggregation of run records and SVG line plots.

A :class:`FigureSpec` selects rows whose maintained axis lies in a closed
interval, splits them into panels by a secondary axis, and bins each panel
along the x axis. Every (panel, x-bin) cell reports the mean and standard
deviation of the four F1 variants. Report generation is deterministic.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from html import escape
from pathlib import Path

import numpy as np

F1_COLUMNS = ("f1_p", "f1_pa", "f1_kpa", "f1_ba")
AXES = ("separation", "precision_E", "recall_E", "coverage")
SERIES_STYLE = {
    "f1_p": ("#1f77b4", "F1_P"),
    "f1_pa": ("#d62728", "F1_PA"),
    "f1_kpa": ("#2ca02c", "F1_KPA"),
    "f1_ba": ("#9467bd", "F1_BA"),
}
AGGREGATE_COLUMNS = (
    ["figure", "x_axis", "panel_axis", "panel", "panel_lo", "panel_hi",
     "x_lo", "x_hi", "x_mean", "count"]
    + [f"{c}_{s}" for c in F1_COLUMNS for s in ("mean", "std")]
)


@dataclass(frozen=True)
class FigureSpec:
    name: str
    x_axis: str
    panel_axis: str
    panel_edges: tuple[float, ...]
    filters: dict = field(default_factory=dict)
    x_edges: tuple[float, ...] = tuple(np.round(np.linspace(0, 1, 11), 10))

    def __post_init__(self):
        for axis in (self.x_axis, self.panel_axis, *self.filters):
            if axis not in AXES:
                raise ValueError(f"unknown axis {axis!r}; expected one of {AXES}")
        for edges in (self.panel_edges, self.x_edges):
            if any(b <= a for a, b in zip(edges, edges[1:])):
                raise ValueError(f"bin edges must be strictly increasing: {edges}")
        for axis, (lo, hi) in self.filters.items():
            if not 0 <= lo <= hi <= 1:
                raise ValueError(f"filter on {axis} must be a closed interval in [0, 1]")

    def panels(self) -> list[tuple[str, float, float]]:
        """Panels as ``(label, lo, hi)``.

        The first panel is ``< e1`` and the last ``> ek``; middle panels are
        half-open except the final one, which is closed. With a single edge
        the upper panel takes the edge value.
        """
        edges = [0.0, *self.panel_edges, 1.0]
        n = len(edges) - 1
        out = []
        for i, (lo, hi) in enumerate(zip(edges, edges[1:])):
            if i == 0:
                label = f"<{lo_hi_pct(hi)}"
            elif i == n - 1:
                label = f">{lo_hi_pct(lo)}" if n > 2 else f">={lo_hi_pct(lo)}"
            else:
                label = f"{lo_hi_pct(lo)}-{lo_hi_pct(hi)}"
            out.append((label, lo, hi))
        return out


def lo_hi_pct(v: float) -> str:
    return f"{v * 100:g}%"


def default_figures(recall_edges=(0.25, 0.75), precision_edges=(0.25, 0.75),
                    coverage_edges=(0.20, 0.30)) -> list[FigureSpec]:
    """Separation, precision and recall studies with the default bin edges."""
    mid_precision = (precision_edges[0], precision_edges[-1])
    mid_recall = (recall_edges[0], recall_edges[-1])
    return [
        FigureSpec("separation_study", "separation", "recall_E", tuple(recall_edges),
                   {"precision_E": mid_precision}),
        FigureSpec("precision_study", "precision_E", "coverage", tuple(coverage_edges),
                   {"recall_E": mid_recall}),
        FigureSpec("recall_study", "recall_E", "coverage", tuple(coverage_edges),
                   {"precision_E": mid_precision}),
    ]


def _columns(rows) -> dict[str, np.ndarray]:
    ok = [r for r in rows if r.get("status", "ok") in ("ok", "")]
    cols = {}
    for name in (*AXES, *F1_COLUMNS):
        cols[name] = np.array([float(r[name]) for r in ok], dtype=float)
    return cols


def _panel_mask(values: np.ndarray, index: int, n_panels: int, lo: float, hi: float) -> np.ndarray:
    if n_panels == 1:
        return np.ones(values.shape, dtype=bool)
    if index == 0:
        return values < hi
    if index == n_panels - 1:
        return values > lo if n_panels > 2 else values >= lo
    if index == n_panels - 2:
        return (values >= lo) & (values <= hi)
    return (values >= lo) & (values < hi)


def aggregate(rows, fig: FigureSpec) -> list[dict]:
    """One dict per (panel, x-bin) cell; empty cells carry NaN statistics."""
    cols = _columns(rows)
    keep = np.ones(cols["f1_p"].shape, dtype=bool)
    for axis, (lo, hi) in fig.filters.items():
        keep &= (cols[axis] >= lo) & (cols[axis] <= hi)
    x = cols[fig.x_axis]
    x_edges = np.asarray(fig.x_edges, dtype=float)
    n_bins = len(x_edges) - 1
    # Right-closed last bin so x == 1 is kept.
    x_bin = np.clip(np.searchsorted(x_edges, x, side="right") - 1, 0, n_bins - 1)
    in_range = (x >= x_edges[0]) & (x <= x_edges[-1])
    panels = fig.panels()
    out = []
    for p_idx, (label, lo, hi) in enumerate(panels):
        in_panel = keep & in_range & _panel_mask(cols[fig.panel_axis], p_idx, len(panels), lo, hi)
        for b in range(n_bins):
            cell = in_panel & (x_bin == b)
            n = int(cell.sum())
            row = dict(figure=fig.name, x_axis=fig.x_axis, panel_axis=fig.panel_axis,
                       panel=label, panel_lo=lo, panel_hi=hi,
                       x_lo=float(x_edges[b]), x_hi=float(x_edges[b + 1]),
                       x_mean=float(x[cell].mean()) if n else math.nan, count=n)
            for c in F1_COLUMNS:
                v = cols[c][cell]
                row[f"{c}_mean"] = float(v.mean()) if n else math.nan
                row[f"{c}_std"] = float(v.std()) if n else math.nan
            out.append(row)
    return out


def panel_rows(cells: list[dict], panel: str) -> list[dict]:
    """Non-empty cells of one panel, ordered along x."""
    return [c for c in cells if c["panel"] == panel and c["count"] > 0]


def write_aggregate_csv(cells: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=AGGREGATE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for c in cells:
            writer.writerow({k: ("nan" if isinstance(v, float) and math.isnan(v) else v)
                             for k, v in c.items()})


def render_svg(cells: list[dict], fig: FigureSpec) -> str:
    """A self-contained SVG with one panel per secondary bin.

    Each plotted point carries its values as ``data-*`` attributes and a
    tooltip title, so the numbers survive without the aggregate CSV.
    """
    panels = fig.panels()
    pw, ph, margin = 260, 220, 45
    width = margin + len(panels) * (pw + margin)
    height = ph + 2 * margin + 30
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<title>{escape(fig.name)}</title>',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    x0, x1 = fig.x_edges[0], fig.x_edges[-1]
    for p_idx, (label, _, _) in enumerate(panels):
        ox = margin + p_idx * (pw + margin)
        oy = margin

        def sx(v, ox=ox):
            return ox + (v - x0) / (x1 - x0) * pw

        def sy(v, oy=oy):
            return oy + (1 - v) * ph

        parts.append(f'<g class="panel" data-panel="{escape(label)}">')
        parts.append(f'<rect x="{ox}" y="{oy}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>')
        for t in (0.0, 0.25, 0.5, 0.75, 1.0):
            parts.append(f'<line x1="{ox}" x2="{ox + pw}" y1="{sy(t):.1f}" y2="{sy(t):.1f}" stroke="#ddd"/>')
            parts.append(f'<text x="{ox - 4}" y="{sy(t) + 4:.1f}" text-anchor="end">{t:g}</text>')
            parts.append(f'<text x="{sx(x0 + t * (x1 - x0)):.1f}" y="{oy + ph + 14}" '
                         f'text-anchor="middle">{x0 + t * (x1 - x0):g}</text>')
        parts.append(f'<text x="{ox + pw / 2}" y="{oy - 8}" text-anchor="middle">'
                     f'{escape(fig.panel_axis)} {escape(label)}</text>')
        parts.append(f'<text x="{ox + pw / 2}" y="{oy + ph + 30}" text-anchor="middle">'
                     f'{escape(fig.x_axis)}</text>')
        cells_here = panel_rows(cells, label)
        for col, (color, name) in SERIES_STYLE.items():
            pts = [(c["x_mean"], c[f"{col}_mean"], c) for c in cells_here]
            if len(pts) > 1:
                path = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y, _ in pts)
                parts.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            for x, y, c in pts:
                parts.append(
                    f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="2.5" fill="{color}" '
                    f'data-series="{col}" data-x="{x:.6g}" data-mean="{y:.6g}" '
                    f'data-std="{c[f"{col}_std"]:.6g}" data-count="{c["count"]}">'
                    f'<title>{name}: {y:.3f} ± {c[f"{col}_std"]:.3f} (n={c["count"]})</title></circle>')
        parts.append('</g>')
    ly = height - 12
    for i, (col, (color, name)) in enumerate(SERIES_STYLE.items()):
        lx = margin + i * 90
        parts.append(f'<line x1="{lx}" x2="{lx + 18}" y1="{ly - 4}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 22}" y="{ly}">{name}</text>')
    parts.append('</svg>')
    return "\n".join(parts) + "\n"


def spearman_increasing(cells: list[dict], column: str) -> float:
    """Spearman rank correlation between bin position and the column's bin mean."""
    from scipy.stats import spearmanr

    pts = [(c["x_mean"], c[f"{column}_mean"]) for c in cells if c["count"] > 0]
    if len(pts) < 3:
        return math.nan
    xs, ys = zip(*pts)
    return float(spearmanr(xs, ys).statistic)


def slope(cells: list[dict], column: str) -> float:
    """Count-weighted least-squares slope of the bin means against bin x."""
    pts = [(c["x_mean"], c[f"{column}_mean"], c["count"]) for c in cells if c["count"] > 0]
    if len(pts) < 2:
        return math.nan
    x, y, w = (np.array(v, dtype=float) for v in zip(*pts))
    return float(np.polyfit(x, y, 1, w=np.sqrt(w))[0])


def write_report(rows, out_dir, figures: list[FigureSpec] | None = None) -> dict[str, list[dict]]:
    """Write ``<fig>.csv`` and ``<fig>.svg`` per figure plus ``aggregate.csv``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    figures = figures or default_figures()
    result, everything = {}, []
    for fig in figures:
        cells = aggregate(rows, fig)
        result[fig.name] = cells
        everything.extend(cells)
        write_aggregate_csv(cells, out_dir / f"{fig.name}.csv")
        (out_dir / f"{fig.name}.svg").write_text(render_svg(cells, fig))
    write_aggregate_csv(everything, out_dir / "aggregate.csv")
    return result
