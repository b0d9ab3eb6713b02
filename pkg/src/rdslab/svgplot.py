"""Deterministic SVG figures for results tables.

Four figure kinds cover the experiment outputs: ``heatmap`` (a metric over
a two-parameter grid), ``histogram`` (replicate estimates with an optional
truth marker), ``boxplot`` (estimate spread per estimator) and ``line`` (a
metric against a parameter, one polyline per estimator). Input is a list
of dict rows, e.g. from :func:`rdslab.fileio.read_results_csv`. The
emitted markup is a pure function of the data: fixed canvas, fixed float
formatting, rows processed in sorted order, no timestamps.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import ValidationError

KINDS = ("heatmap", "histogram", "boxplot", "line")

_WIDTH = 720
_HEIGHT = 480
_MARGIN_L = 80
_MARGIN_R = 40
_MARGIN_T = 40
_MARGIN_B = 64

_SERIES_COLORS = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)


def _f(x: float) -> str:
    return f"{x:.2f}"


def _label(x: float) -> str:
    return f"{x:.4g}"


class _Svg:
    def __init__(self, width: int, height: int):
        self.parts: List[str] = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        ]

    def rect(self, x, y, w, h, fill, stroke="none"):
        self.parts.append(
            f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" '
            f'fill="{fill}" stroke="{stroke}"/>'
        )

    def line(self, x1, y1, x2, y2, stroke="#000000", width=1.0, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            f'stroke="{stroke}" stroke-width="{_f(width)}"{d}/>'
        )

    def polyline(self, points, stroke, width=1.5):
        pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in points)
        self.parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{stroke}" stroke-width="{_f(width)}"/>'
        )

    def circle(self, x, y, r, fill):
        self.parts.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" fill="{fill}"/>')

    def text(self, x, y, content, size=12, anchor="middle", fill="#000000"):
        self.parts.append(
            f'<text x="{_f(x)}" y="{_f(y)}" font-family="monospace" font-size="{size}" '
            f'text-anchor="{anchor}" fill="{fill}">{_escape(content)}</text>'
        )

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _require_columns(rows: Sequence[Dict], needed: Sequence[str], kind: str) -> None:
    if not rows:
        raise ValidationError(f"{kind}: no data rows")
    missing = [c for c in needed if any(r.get(c) is None for r in rows)]
    if missing:
        raise ValidationError(f"{kind}: rows lack required columns {missing}")


def _axis_ticks(lo: float, hi: float, n: int = 5) -> List[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _heat_color(t: float) -> str:
    # Blue (low) through white to red (high).
    t = min(max(t, 0.0), 1.0)
    if t < 0.5:
        f = t / 0.5
        r, g, b = int(59 + f * (255 - 59)), int(76 + f * (255 - 76)), 192 + int(f * (255 - 192))
    else:
        f = (t - 0.5) / 0.5
        r, g, b = 255, int(255 - f * (255 - 76)), int(255 - f * (255 - 60))
    return f"#{r:02x}{g:02x}{b:02x}"


def render_plot(rows: Sequence[Dict], kind: str, **options) -> str:
    """Render one figure to SVG markup. See module docstring for kinds."""
    if kind not in KINDS:
        raise ValidationError(f"plot kind must be one of {KINDS}")
    if kind == "heatmap":
        return _render_heatmap(rows, **options)
    if kind == "histogram":
        return _render_histogram(rows, **options)
    if kind == "boxplot":
        return _render_boxplot(rows, **options)
    return _render_line(rows, **options)


def emit_plot(rows: Sequence[Dict], kind: str, path: str, **options) -> None:
    markup = render_plot(rows, kind, **options)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(markup)


def _frame(svg: _Svg, title: str, xlabel: str, ylabel: str):
    x0, y0 = _MARGIN_L, _MARGIN_T
    x1, y1 = _WIDTH - _MARGIN_R, _HEIGHT - _MARGIN_B
    svg.text(_WIDTH / 2, _MARGIN_T - 16, title, size=14)
    svg.text((x0 + x1) / 2, _HEIGHT - 16, xlabel, size=12)
    svg.text(18, (y0 + y1) / 2, ylabel, size=12)
    return x0, y0, x1, y1


def _render_heatmap(
    rows: Sequence[Dict],
    x: str = "homophily",
    y: str = "activity_ratio",
    value: str = "bias",
    estimator: Optional[str] = None,
    title: Optional[str] = None,
) -> str:
    data = [r for r in rows if estimator is None or r.get("estimator") == estimator]
    if estimator is not None and not data:
        raise ValidationError(f"heatmap: no rows for estimator {estimator!r}")
    _require_columns(data, [x, y, value], "heatmap")
    xs = sorted({float(r[x]) for r in data})
    ys = sorted({float(r[y]) for r in data})
    grid: Dict[tuple, float] = {}
    for r in data:
        grid[(float(r[x]), float(r[y]))] = float(r[value])
    vals = list(grid.values())
    vmin, vmax = min(vals), max(vals)
    span = vmax - vmin
    svg = _Svg(_WIDTH, _HEIGHT)
    name = title or (f"{value} of {estimator}" if estimator else value)
    px0, py0, px1, py1 = _frame(svg, name, x, y)
    cw = (px1 - px0) / len(xs)
    ch = (py1 - py0) / len(ys)
    for i, xv in enumerate(xs):
        for j, yv in enumerate(ys):
            if (xv, yv) not in grid:
                continue
            v = grid[(xv, yv)]
            t = 0.5 if span == 0 else (v - vmin) / span
            cx = px0 + i * cw
            cy = py1 - (j + 1) * ch
            svg.rect(cx, cy, cw, ch, _heat_color(t), stroke="#cccccc")
            svg.text(cx + cw / 2, cy + ch / 2 + 4, _label(v), size=10)
    for i, xv in enumerate(xs):
        svg.text(px0 + (i + 0.5) * cw, py1 + 18, _label(xv), size=10)
    for j, yv in enumerate(ys):
        svg.text(px0 - 8, py1 - (j + 0.5) * ch + 4, _label(yv), size=10, anchor="end")
    return svg.render()


def _render_histogram(
    rows: Sequence[Dict],
    value: str = "estimate",
    bins: int = 30,
    truth: Optional[float] = None,
    title: Optional[str] = None,
) -> str:
    _require_columns(rows, [value], "histogram")
    vals = np.asarray(sorted(float(r[value]) for r in rows), dtype=np.float64)
    lo, hi = float(vals.min()), float(vals.max())
    if hi == lo:
        hi = lo + 1e-9
    counts, edges = np.histogram(vals, bins=bins, range=(lo, hi))
    svg = _Svg(_WIDTH, _HEIGHT)
    px0, py0, px1, py1 = _frame(svg, title or f"distribution of {value}", value, "count")
    cmax = max(int(counts.max()), 1)
    bw = (px1 - px0) / bins
    for i, c in enumerate(counts):
        if c == 0:
            continue
        h = (py1 - py0) * (int(c) / cmax)
        svg.rect(px0 + i * bw, py1 - h, bw, h, "#1f77b4", stroke="#ffffff")
    for tick in _axis_ticks(lo, hi):
        tx = px0 + (px1 - px0) * ((tick - lo) / (hi - lo))
        svg.line(tx, py1, tx, py1 + 4)
        svg.text(tx, py1 + 18, _label(tick), size=10)
    for tick in _axis_ticks(0, cmax):
        ty = py1 - (py1 - py0) * (tick / cmax)
        svg.line(px0 - 4, ty, px0, ty)
        svg.text(px0 - 8, ty + 4, _label(tick), size=10, anchor="end")
    if truth is not None:
        tx = px0 + (px1 - px0) * ((truth - lo) / (hi - lo))
        svg.line(tx, py0, tx, py1, stroke="#d62728", width=1.5, dash="4,3")
        svg.text(tx, py0 - 6, f"truth={_label(truth)}", size=10, fill="#d62728")
    return svg.render()


def _render_boxplot(
    rows: Sequence[Dict],
    group: str = "estimator",
    value: str = "estimate",
    title: Optional[str] = None,
) -> str:
    _require_columns(rows, [group, value], "boxplot")
    series: Dict[str, List[float]] = {}
    for r in rows:
        series.setdefault(str(r[group]), []).append(float(r[value]))
    names = sorted(series)
    allv = [v for vs in series.values() for v in vs]
    lo, hi = min(allv), max(allv)
    if hi == lo:
        hi = lo + 1e-9
    svg = _Svg(_WIDTH, _HEIGHT)
    px0, py0, px1, py1 = _frame(svg, title or f"{value} by {group}", group, value)

    def ypix(v: float) -> float:
        return py1 - (py1 - py0) * ((v - lo) / (hi - lo))

    slot = (px1 - px0) / len(names)
    for i, name in enumerate(names):
        vals = np.asarray(sorted(series[name]), dtype=np.float64)
        q1, med, q3 = (float(np.percentile(vals, q)) for q in (25, 50, 75))
        iqr = q3 - q1
        lo_w = float(vals[vals >= q1 - 1.5 * iqr].min())
        hi_w = float(vals[vals <= q3 + 1.5 * iqr].max())
        cx = px0 + (i + 0.5) * slot
        bw = slot * 0.4
        svg.line(cx, ypix(lo_w), cx, ypix(q1))
        svg.line(cx, ypix(q3), cx, ypix(hi_w))
        svg.line(cx - bw / 4, ypix(lo_w), cx + bw / 4, ypix(lo_w))
        svg.line(cx - bw / 4, ypix(hi_w), cx + bw / 4, ypix(hi_w))
        svg.rect(cx - bw / 2, ypix(q3), bw, ypix(q1) - ypix(q3), "#aec7e8", stroke="#1f77b4")
        svg.line(cx - bw / 2, ypix(med), cx + bw / 2, ypix(med), stroke="#d62728", width=1.5)
        for v in vals:
            if v < q1 - 1.5 * iqr or v > q3 + 1.5 * iqr:
                svg.circle(cx, ypix(float(v)), 2.0, "#7f7f7f")
        svg.text(cx, py1 + 18, name, size=10)
    for tick in _axis_ticks(lo, hi):
        ty = ypix(tick)
        svg.line(px0 - 4, ty, px0, ty)
        svg.text(px0 - 8, ty + 4, _label(tick), size=10, anchor="end")
    return svg.render()


def _render_line(
    rows: Sequence[Dict],
    x: str = "p_diff",
    y: str = "mean",
    series: str = "estimator",
    truth: Optional[float] = None,
    title: Optional[str] = None,
) -> str:
    _require_columns(rows, [x, y, series], "line")
    by_name: Dict[str, List[tuple]] = {}
    for r in rows:
        by_name.setdefault(str(r[series]), []).append((float(r[x]), float(r[y])))
    names = sorted(by_name)
    xs = [p[0] for pts in by_name.values() for p in pts]
    ys = [p[1] for pts in by_name.values() for p in pts]
    if truth is not None:
        ys.append(truth)
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(ys), max(ys)
    if xhi == xlo:
        xhi = xlo + 1e-9
    if yhi == ylo:
        yhi = ylo + 1e-9
    pad = 0.05 * (yhi - ylo)
    ylo -= pad
    yhi += pad
    svg = _Svg(_WIDTH, _HEIGHT)
    px0, py0, px1, py1 = _frame(svg, title or f"{y} against {x}", x, y)

    def xpix(v: float) -> float:
        return px0 + (px1 - px0) * ((v - xlo) / (xhi - xlo))

    def ypix(v: float) -> float:
        return py1 - (py1 - py0) * ((v - ylo) / (yhi - ylo))

    if truth is not None:
        svg.line(px0, ypix(truth), px1, ypix(truth), stroke="#7f7f7f", width=1.0, dash="4,3")
    for i, name in enumerate(names):
        pts = sorted(by_name[name])
        color = _SERIES_COLORS[i % len(_SERIES_COLORS)]
        svg.polyline([(xpix(a), ypix(b)) for a, b in pts], color)
        for a, b in pts:
            svg.circle(xpix(a), ypix(b), 2.5, color)
        svg.text(px1 - 8, py0 + 16 + 14 * i, name, size=10, anchor="end", fill=color)
    for tick in _axis_ticks(xlo, xhi):
        tx = xpix(tick)
        svg.line(tx, py1, tx, py1 + 4)
        svg.text(tx, py1 + 18, _label(tick), size=10)
    for tick in _axis_ticks(ylo, yhi):
        ty = ypix(tick)
        svg.line(px0 - 4, ty, px0, ty)
        svg.text(px0 - 8, ty + 4, _label(tick), size=10, anchor="end")
    return svg.render()
