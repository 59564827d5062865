"""Minimal deterministic SVG emission: line plots, heatmaps, sketches.

No external plotting dependency; output bytes depend only on the data, so
re-running a config reproduces identical files.  A timestamp comment can be
opted into but is off by default.
"""

from __future__ import annotations

import datetime
import math

import numpy as np


def _fmt(v: float) -> str:
    return f"{v:.6g}"


# five-stop blue->yellow colormap
_STOPS = [(68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98), (253, 231, 37)]


def _color(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    pos = t * (len(_STOPS) - 1)
    i = min(int(pos), len(_STOPS) - 2)
    f = pos - i
    c = [round((1 - f) * a + f * b) for a, b in zip(_STOPS[i], _STOPS[i + 1])]
    return f"rgb({c[0]},{c[1]},{c[2]})"


class SvgCanvas:
    """World-coordinate drawing surface serialized to SVG."""

    def __init__(self, x_range, y_range, width=640, height=480, margin=50,
                 title="", xlabel="", ylabel="", timestamp=False):
        self.x0, self.x1 = map(float, x_range)
        self.y0, self.y1 = map(float, y_range)
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0
        self.w, self.h, self.m = width, height, margin
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel
        self.timestamp = timestamp
        self.body: list[str] = []

    def sx(self, x: float) -> float:
        return self.m + (x - self.x0) / (self.x1 - self.x0) * (self.w - 2 * self.m)

    def sy(self, y: float) -> float:
        return self.h - self.m - (y - self.y0) / (self.y1 - self.y0) * (self.h - 2 * self.m)

    def polyline(self, xs, ys, color="#1f77b4", width=1.5, dash=None):
        pts = " ".join(f"{_fmt(self.sx(float(x)))},{_fmt(self.sy(float(y)))}"
                       for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y))
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.body.append(f'<polyline fill="none" stroke="{color}" stroke-width="{width}"{extra} points="{pts}"/>')

    def line(self, x_a, y_a, x_b, y_b, color="#333333", width=1.0, dash=None):
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.body.append(f'<line x1="{_fmt(self.sx(x_a))}" y1="{_fmt(self.sy(y_a))}" '
                         f'x2="{_fmt(self.sx(x_b))}" y2="{_fmt(self.sy(y_b))}" '
                         f'stroke="{color}" stroke-width="{width}"{extra}/>')

    def circle(self, cx, cy, r_world, color="#333333", width=1.0, fill="none"):
        rx = abs(self.sx(cx + r_world) - self.sx(cx))
        ry = abs(self.sy(cy + r_world) - self.sy(cy))
        self.body.append(f'<ellipse cx="{_fmt(self.sx(cx))}" cy="{_fmt(self.sy(cy))}" '
                         f'rx="{_fmt(rx)}" ry="{_fmt(ry)}" stroke="{color}" '
                         f'stroke-width="{width}" fill="{fill}"/>')

    def quad(self, corners, fill):
        pts = " ".join(f"{_fmt(self.sx(x))},{_fmt(self.sy(y))}" for x, y in corners)
        self.body.append(f'<polygon points="{pts}" fill="{fill}" stroke="none"/>')

    def text(self, x, y, s, size=12, color="#000000", anchor="start"):
        self.body.append(f'<text x="{_fmt(self.sx(x))}" y="{_fmt(self.sy(y))}" '
                         f'font-size="{size}" fill="{color}" text-anchor="{anchor}" '
                         f'font-family="sans-serif">{s}</text>')

    def marker(self, x, y, color="#d62728", r=3.0):
        self.body.append(f'<circle cx="{_fmt(self.sx(x))}" cy="{_fmt(self.sy(y))}" '
                         f'r="{r}" fill="{color}"/>')

    def _axes(self) -> list[str]:
        out = []
        out.append(f'<rect x="{self.m}" y="{self.m}" width="{self.w - 2 * self.m}" '
                   f'height="{self.h - 2 * self.m}" fill="none" stroke="#000" stroke-width="1"/>')
        for i in range(5):
            xv = self.x0 + i * (self.x1 - self.x0) / 4
            yv = self.y0 + i * (self.y1 - self.y0) / 4
            out.append(f'<text x="{_fmt(self.sx(xv))}" y="{self.h - self.m + 16}" font-size="10" '
                       f'text-anchor="middle" font-family="sans-serif">{_fmt(xv)}</text>')
            out.append(f'<text x="{self.m - 6}" y="{_fmt(self.sy(yv) + 3)}" font-size="10" '
                       f'text-anchor="end" font-family="sans-serif">{_fmt(yv)}</text>')
        if self.title:
            out.append(f'<text x="{self.w / 2}" y="{self.m - 14}" font-size="14" text-anchor="middle" '
                       f'font-family="sans-serif">{self.title}</text>')
        if self.xlabel:
            out.append(f'<text x="{self.w / 2}" y="{self.h - 10}" font-size="12" text-anchor="middle" '
                       f'font-family="sans-serif">{self.xlabel}</text>')
        if self.ylabel:
            out.append(f'<text x="14" y="{self.h / 2}" font-size="12" text-anchor="middle" '
                       f'font-family="sans-serif" transform="rotate(-90 14 {self.h / 2})">{self.ylabel}</text>')
        return out

    def render(self) -> str:
        head = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.w}" height="{self.h}" '
                f'viewBox="0 0 {self.w} {self.h}">']
        if self.timestamp:
            head.append(f"<!-- generated {datetime.datetime.now().isoformat()} -->")
        head.append(f'<rect width="{self.w}" height="{self.h}" fill="#ffffff"/>')
        return "\n".join(head + self._axes() + self.body + ["</svg>"]) + "\n"

    def write(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.render())


def line_plot(path, series, title="", xlabel="", ylabel="", markers=(), timestamp=False):
    """Plot (x, y, color) series on shared axes; markers are (x, y, label) points."""
    xs = np.concatenate([np.asarray(s[0], dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s[1], dtype=float) for s in series])
    finite = np.isfinite(xs) & np.isfinite(ys)
    xs, ys = xs[finite], ys[finite]
    pad = lambda lo, hi: (lo - 0.05 * (hi - lo + 1e-30), hi + 0.05 * (hi - lo + 1e-30))
    cv = SvgCanvas(pad(xs.min(), xs.max()), pad(ys.min(), ys.max()),
                   title=title, xlabel=xlabel, ylabel=ylabel, timestamp=timestamp)
    for entry in series:
        x, y = entry[0], entry[1]
        color = entry[2] if len(entry) > 2 else "#1f77b4"
        cv.polyline(x, y, color=color)
    for mx, my, label in markers:
        cv.marker(mx, my)
        cv.text(mx, my, " " + label, size=10)
    cv.write(path)


def heatmap(path, x, y, values, title="", xlabel="", ylabel="", timestamp=False):
    """Cell-quad heatmap of node values on a structured (possibly mapped) grid."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    v = np.asarray(values, dtype=float)
    lo, hi = float(v.min()), float(v.max())
    span = hi - lo if hi > lo else 1.0
    cv = SvgCanvas((x.min(), x.max()), (y.min(), y.max()),
                   title=title, xlabel=xlabel, ylabel=ylabel, timestamp=timestamp)
    n1, n2 = v.shape
    for j in range(n1 - 1):
        for i in range(n2 - 1):
            corners = [(x[j, i], y[j, i]), (x[j + 1, i], y[j + 1, i]),
                       (x[j + 1, i + 1], y[j + 1, i + 1]), (x[j, i + 1], y[j, i + 1])]
            cell = 0.25 * (v[j, i] + v[j + 1, i] + v[j + 1, i + 1] + v[j, i + 1])
            cv.quad(corners, _color((cell - lo) / span))
    cv.text(cv.x0, cv.y1, f"min {lo:.4g}  max {hi:.4g}", size=10)
    cv.write(path)
