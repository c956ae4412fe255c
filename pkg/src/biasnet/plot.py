"""Minimal SVG line charts of sweep results.

One file per (noise type, metric).  Each series (h value or dataset, and
``k`` for the ranking metric) is drawn as a mean polyline over a shaded
min-max envelope; the series' no-noise mean is a dashed horizontal line.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from .experiment import NO_NOISE, Aggregate, SweepRecord, aggregate

WIDTH, HEIGHT = 480, 320
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 60, 130, 30, 45
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
METRIC_LABELS = {
    "topk_minority_fraction": "top-k minority fraction",
    "retained_edges": "retained edges",
}


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _series_key(a: Aggregate, metric: str) -> tuple[str, int]:
    # edge counts do not depend on k
    return (a.h_or_dataset, a.k if metric == "topk_minority_fraction" else 0)


def _series_label(key: tuple[str, int], metric: str) -> str:
    source, k = key
    return f"{source} k={k}" if metric == "topk_minority_fraction" else source


def render_svg(
    noise_type: str,
    param_name: str,
    metric: str,
    series: dict[tuple[str, int], list[Aggregate]],
    baselines: dict[tuple[str, int], float],
) -> str:
    xs = [a.param_value for pts in series.values() for a in pts]
    ys = [v for pts in series.values() for a in pts for v in (a.min, a.max)]
    ys += [baselines[k] for k in series if k in baselines]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def px(x: float) -> float:
        return MARGIN_L + (x - x0) / (x1 - x0) * pw

    def py(y: float) -> float:
        return MARGIN_T + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<text x="{MARGIN_L}" y="18" font-size="13">{escape(noise_type)}</text>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T + ph}" x2="{MARGIN_L + pw}" y2="{MARGIN_T + ph}" stroke="black"/>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" y2="{MARGIN_T + ph}" stroke="black"/>',
        f'<text x="{MARGIN_L + pw / 2:.1f}" y="{HEIGHT - 8}" text-anchor="middle">{escape(param_name)}</text>',
        f'<text x="14" y="{MARGIN_T + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 14 {MARGIN_T + ph / 2:.1f})">{escape(METRIC_LABELS.get(metric, metric))}</text>',
    ]
    for i in range(5):
        tx = x0 + (x1 - x0) * i / 4
        ty = y0 + (y1 - y0) * i / 4
        out.append(f'<text x="{px(tx):.1f}" y="{MARGIN_T + ph + 15}" text-anchor="middle">{tx:.3g}</text>')
        out.append(f'<text x="{MARGIN_L - 5}" y="{py(ty) + 4:.1f}" text-anchor="end">{ty:.3g}</text>')

    for idx, (key, pts) in enumerate(sorted(series.items())):
        color = COLORS[idx % len(COLORS)]
        pts = sorted(pts, key=lambda a: a.param_value)
        upper = " ".join(f"{_fmt(px(a.param_value))},{_fmt(py(a.max))}" for a in pts)
        lower = " ".join(f"{_fmt(px(a.param_value))},{_fmt(py(a.min))}" for a in reversed(pts))
        out.append(f'<polygon points="{upper} {lower}" fill="{color}" fill-opacity="0.2" stroke="none"/>')
        mean = " ".join(f"{_fmt(px(a.param_value))},{_fmt(py(a.mean))}" for a in pts)
        out.append(f'<polyline points="{mean}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        if key in baselines:
            yb = _fmt(py(baselines[key]))
            out.append(
                f'<line x1="{MARGIN_L}" y1="{yb}" x2="{MARGIN_L + pw}" y2="{yb}" '
                f'stroke="{color}" stroke-dasharray="4 3"/>'
            )
        ly = MARGIN_T + 14 * idx + 8
        out.append(f'<rect x="{WIDTH - MARGIN_R + 10}" y="{ly - 8}" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="{WIDTH - MARGIN_R + 24}" y="{ly + 1}">{escape(_series_label(key, metric))}</text>')
    ly = MARGIN_T + 14 * len(series) + 8
    out.append(f'<text x="{WIDTH - MARGIN_R + 10}" y="{ly + 1}">dashed: no noise</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_sweep(
    records: Sequence[SweepRecord],
    out_dir: str | Path,
    metrics: Sequence[str] = ("topk_minority_fraction", "retained_edges"),
) -> list[Path]:
    """Write one SVG per (noise type, metric); returns the written paths."""
    if not records:
        raise ValueError("no records to plot")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    aggs = aggregate(records, metrics)
    written = []
    for metric in metrics:
        baselines = {_series_key(a, metric): a.mean for a in aggs if a.metric == metric and a.noise_type == NO_NOISE}
        by_type: dict[str, dict[tuple[str, int], list[Aggregate]]] = defaultdict(lambda: defaultdict(list))
        names = {}
        for a in aggs:
            if a.metric != metric or a.noise_type == NO_NOISE:
                continue
            key = _series_key(a, metric)
            pts = by_type[a.noise_type][key]
            if metric != "topk_minority_fraction" and any(p.param_value == a.param_value for p in pts):
                continue
            pts.append(a)
            names[a.noise_type] = a.param_name
        for noise_type in sorted(by_type):
            svg = render_svg(noise_type, names[noise_type], metric, by_type[noise_type], baselines)
            path = out_dir / f"{noise_type}__{metric}.svg"
            path.write_text(svg, encoding="utf-8")
            written.append(path)
    return written
