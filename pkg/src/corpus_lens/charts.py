"""Dependency-free, byte-deterministic SVG charts (bar, histogram, line, scatter)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

from .errors import EmptySeries

WIDTH, HEIGHT = 960, 540
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 80, 30, 50, 90
KINDS = ("bar", "histogram", "line", "scatter")


@dataclass(frozen=True)
class ChartSpec:
    """What to draw.

    bar: ``labels`` + ``y``. histogram: ``x`` holds the len(y)+1 bin edges.
    line: ``x`` + ``y``. scatter: ``x`` + ``y`` with optional point ``labels``.
    """

    kind: str
    title: str
    y: Sequence[float]
    x: Sequence[float] = ()
    labels: Sequence[str] = ()
    x_label: str = ""
    y_label: str = ""

    def validate(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown chart kind {self.kind!r}")
        if self.kind == "histogram":
            if len(self.x) != len(self.y) + 1 or not len(self.y):
                raise ValueError("histogram needs len(y) bins and len(y)+1 edges")
            return
        if not len(self.y):
            raise EmptySeries(f"{self.kind} chart '{self.title}' has no data")
        if self.kind == "bar" and len(self.labels) != len(self.y):
            raise ValueError("bar chart needs one label per value")
        if self.kind in ("line", "scatter") and len(self.x) != len(self.y):
            raise ValueError(f"{self.kind} chart needs matching x and y")


def num(v: float) -> str:
    s = f"{float(v):.6g}"
    return "0" if s == "-0" else s


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.floor(lo / step) * step
    ticks = []
    t = start
    while t <= hi + step * 1e-9:
        if t >= lo - step * 1e-9:
            ticks.append(round(t, 12))
        t += step
    return ticks


class _Canvas:
    def __init__(self, spec: ChartSpec):
        self.spec = spec
        self.parts: list[str] = []
        self.x0, self.x1 = MARGIN_L, WIDTH - MARGIN_R
        self.y0, self.y1 = HEIGHT - MARGIN_B, MARGIN_T

    def add(self, s: str):
        self.parts.append(s)

    def text(self, x, y, s, anchor="middle", size=12, rotate=None, cls="label"):
        tr = f' transform="rotate({num(rotate)} {num(x)} {num(y)})"' if rotate is not None else ""
        self.add(f'<text class="{cls}" x="{num(x)}" y="{num(y)}" font-size="{size}" '
                 f'text-anchor="{anchor}"{tr}>{escape(str(s))}</text>')

    def line(self, x1, y1, x2, y2, cls="axis"):
        self.add(f'<line class="{cls}" x1="{num(x1)}" y1="{num(y1)}" x2="{num(x2)}" y2="{num(y2)}" '
                 f'stroke="#333" stroke-width="1"/>')

    def set_ranges(self, xlo, xhi, ylo, yhi):
        self.xlo, self.xhi = xlo, (xhi if xhi > xlo else xlo + 1.0)
        self.ylo, self.yhi = ylo, (yhi if yhi > ylo else ylo + 1.0)

    def px(self, v):
        return self.x0 + (v - self.xlo) / (self.xhi - self.xlo) * (self.x1 - self.x0)

    def py(self, v):
        return self.y0 - (v - self.ylo) / (self.yhi - self.ylo) * (self.y0 - self.y1)

    def frame(self, y_ticks, x_ticks=None):
        s = self.spec
        self.text(WIDTH / 2, 30, s.title, size=18, cls="title")
        self.line(self.x0, self.y0, self.x1, self.y0)
        self.line(self.x0, self.y0, self.x0, self.y1)
        for t in y_ticks:
            y = self.py(t)
            self.line(self.x0 - 5, y, self.x0, y, cls="tick")
            self.text(self.x0 - 8, y + 4, num(t), anchor="end", size=11, cls="tick-label")
        for t in x_ticks or ():
            x = self.px(t)
            self.line(x, self.y0, x, self.y0 + 5, cls="tick")
            self.text(x, self.y0 + 18, num(t), size=11, cls="tick-label")
        if s.x_label:
            self.text((self.x0 + self.x1) / 2, HEIGHT - 12, s.x_label, size=13, cls="axis-label")
        if s.y_label:
            self.text(20, (self.y0 + self.y1) / 2, s.y_label, size=13, rotate=-90, cls="axis-label")

    def document(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">\n'
            f'<title>{escape(self.spec.title)}</title>\n'
        )
        return head + "\n".join(self.parts) + "\n</svg>\n"


def _y_range(values, include_zero=True):
    lo, hi = min(values), max(values)
    if include_zero:
        lo, hi = min(lo, 0.0), max(hi, 0.0)
    ticks = _nice_ticks(lo, hi)
    return min(ticks[0], lo), max(ticks[-1], hi), ticks


def _bar(c: _Canvas, spec: ChartSpec):
    ys = [float(v) for v in spec.y]
    ylo, yhi, ticks = _y_range(ys)
    n = len(ys)
    c.set_ranges(0, n, ylo, yhi)
    c.frame(ticks)
    slot = (c.x1 - c.x0) / n
    base = c.py(0.0)
    for i, (lab, v) in enumerate(zip(spec.labels, ys)):
        top = c.py(v)
        x = c.x0 + i * slot + slot * 0.1
        c.add(f'<rect class="data" x="{num(x)}" y="{num(min(top, base))}" width="{num(slot * 0.8)}" '
              f'height="{num(abs(base - top))}" fill="#4c72b0"><title>{escape(str(lab))}: {num(v)}</title></rect>')
        cx = c.x0 + (i + 0.5) * slot
        c.text(cx, c.y0 + 14, lab, anchor="end", size=11, rotate=-60, cls="category")


def _histogram(c: _Canvas, spec: ChartSpec):
    edges = [float(v) for v in spec.x]
    ys = [float(v) for v in spec.y]
    _, yhi, ticks = _y_range(ys)
    c.set_ranges(edges[0], edges[-1], 0.0, yhi)
    c.frame(ticks, _nice_ticks(edges[0], edges[-1], 8))
    base = c.py(0.0)
    for lo, hi, v in zip(edges, edges[1:], ys):
        top = c.py(v)
        c.add(f'<rect class="data" x="{num(c.px(lo))}" y="{num(top)}" width="{num(c.px(hi) - c.px(lo))}" '
              f'height="{num(base - top)}" fill="#dd8452" stroke="#fff" stroke-width="0.5"/>')


def _line(c: _Canvas, spec: ChartSpec):
    xs = [float(v) for v in spec.x]
    ys = [float(v) for v in spec.y]
    ylo, yhi, ticks = _y_range(ys)
    c.set_ranges(min(xs), max(xs), ylo, yhi)
    c.frame(ticks, _nice_ticks(min(xs), max(xs), 10))
    if ylo < 0 < yhi:
        c.add(f'<line class="zero" x1="{num(c.x0)}" y1="{num(c.py(0))}" x2="{num(c.x1)}" '
              f'y2="{num(c.py(0))}" stroke="#999" stroke-dasharray="4 3"/>')
    pts = " ".join(f"{num(c.px(x))},{num(c.py(y))}" for x, y in zip(xs, ys))
    c.add(f'<polyline class="data" points="{pts}" fill="none" stroke="#55a868" stroke-width="2"/>')
    for x, y in zip(xs, ys):
        c.add(f'<circle class="point" cx="{num(c.px(x))}" cy="{num(c.py(y))}" r="3" fill="#55a868"/>')


def _scatter(c: _Canvas, spec: ChartSpec):
    xs = [float(v) for v in spec.x]
    ys = [float(v) for v in spec.y]

    def padded(vals):
        lo, hi = min(vals), max(vals)
        pad = (hi - lo) * 0.08 or 1.0
        return lo - pad, hi + pad

    xlo, xhi = padded(xs)
    ylo, yhi = padded(ys)
    c.set_ranges(xlo, xhi, ylo, yhi)
    c.frame(_nice_ticks(ylo, yhi), _nice_ticks(xlo, xhi))
    labels = list(spec.labels) or [""] * len(xs)
    for x, y, lab in zip(xs, ys, labels):
        c.add(f'<circle class="data" cx="{num(c.px(x))}" cy="{num(c.py(y))}" r="4" fill="#c44e52"/>')
        if lab != "":
            c.text(c.px(x) + 6, c.py(y) - 6, lab, anchor="start", size=10, cls="point-label")


_RENDERERS = {"bar": _bar, "histogram": _histogram, "line": _line, "scatter": _scatter}


def render_chart(spec: ChartSpec) -> str:
    spec.validate()
    canvas = _Canvas(spec)
    _RENDERERS[spec.kind](canvas, spec)
    return canvas.document()
