"""Self-contained SVG scatter plots and histograms (no plotting library)."""

from __future__ import annotations

import math
from typing import Callable, Sequence
from xml.sax.saxutils import escape

W, H = 640, 400
ML, MR, MT, MB = 64, 20, 36, 48


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-9 * step:
        out.append(round(t, 12))
        t += step
    return out


class _Frame:
    def __init__(self, xlo, xhi, ylo, yhi):
        if xhi <= xlo:
            xlo, xhi = xlo - 0.5, xhi + 0.5
        if yhi <= ylo:
            ylo, yhi = ylo - 0.5, yhi + 0.5
        self.xlo, self.xhi, self.ylo, self.yhi = xlo, xhi, ylo, yhi

    def sx(self, x):
        return ML + (x - self.xlo) / (self.xhi - self.xlo) * (W - ML - MR)

    def sy(self, y):
        return H - MB - (y - self.ylo) / (self.yhi - self.ylo) * (H - MT - MB)

    def axes(self, title, xlabel, ylabel) -> list[str]:
        out = [
            f'<text x="{W / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
            f'<line class="axis" x1="{ML}" y1="{H - MB}" x2="{W - MR}" y2="{H - MB}" stroke="black"/>',
            f'<line class="axis" x1="{ML}" y1="{MT}" x2="{ML}" y2="{H - MB}" stroke="black"/>',
            f'<text x="{W / 2:.1f}" y="{H - 10}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
            f'<text x="16" y="{H / 2:.1f}" text-anchor="middle" font-size="12" '
            f'transform="rotate(-90 16 {H / 2:.1f})">{escape(ylabel)}</text>',
        ]
        for t in _ticks(self.xlo, self.xhi):
            x = self.sx(t)
            out.append(f'<line x1="{x:.1f}" y1="{H - MB}" x2="{x:.1f}" y2="{H - MB + 4}" stroke="black"/>')
            out.append(f'<text x="{x:.1f}" y="{H - MB + 16}" text-anchor="middle" font-size="10">{t:g}</text>')
        for t in _ticks(self.ylo, self.yhi):
            y = self.sy(t)
            out.append(f'<line x1="{ML - 4}" y1="{y:.1f}" x2="{ML}" y2="{y:.1f}" stroke="black"/>')
            out.append(f'<text x="{ML - 6}" y="{y + 3:.1f}" text-anchor="end" font-size="10">{t:g}</text>')
        return out


def _document(body: list[str]) -> str:
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">\n'
        f'<rect width="{W}" height="{H}" fill="white"/>\n' + "\n".join(body) + "\n</svg>\n"
    )


def scatter_svg(xs: Sequence[float], ys: Sequence[float], title="", xlabel="x", ylabel="y") -> str:
    pts = [(x, y) for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]
    if pts:
        fx = [p[0] for p in pts]
        fy = [p[1] for p in pts]
        frame = _Frame(min(fx), max(fx), min(fy), max(fy))
    else:
        frame = _Frame(0, 1, 0, 1)
    body = frame.axes(title, xlabel, ylabel)
    if frame.ylo < 0 < frame.yhi:
        y0 = frame.sy(0)
        body.append(f'<line x1="{ML}" y1="{y0:.1f}" x2="{W - MR}" y2="{y0:.1f}" stroke="#bbb"/>')
    for x, y in pts:
        body.append(f'<circle class="marker" cx="{frame.sx(x):.2f}" cy="{frame.sy(y):.2f}" r="2" fill="#1f4e9c"/>')
    return _document(body)


def histogram_svg(
    edges: Sequence[float],
    counts: Sequence[int],
    density: Callable[[float], float] | None = None,
    title="",
    xlabel="theta",
) -> str:
    """Bars scaled to a probability density, with an optional overlay curve."""
    total = sum(counts)
    widths = [b - a for a, b in zip(edges, edges[1:])]
    heights = [c / (total * w) if total else 0.0 for c, w in zip(counts, widths)]
    curve = []
    if density is not None:
        k = 200
        curve = [(edges[0] + (edges[-1] - edges[0]) * i / k) for i in range(k + 1)]
        curve = [(x, density(x)) for x in curve]
    top = max(heights + [y for _, y in curve] + [1e-12]) * 1.05
    frame = _Frame(edges[0], edges[-1], 0.0, top)
    body = frame.axes(title, xlabel, "density")
    for a, b, h in zip(edges, edges[1:], heights):
        x0, x1, y = frame.sx(a), frame.sx(b), frame.sy(h)
        body.append(
            f'<rect class="bar" x="{x0:.2f}" y="{y:.2f}" width="{x1 - x0:.2f}" '
            f'height="{frame.sy(0) - y:.2f}" fill="#9cb8e0" stroke="#1f4e9c"/>'
        )
    if curve:
        path = " ".join(f"{frame.sx(x):.2f},{frame.sy(y):.2f}" for x, y in curve)
        body.append(f'<polyline class="density" points="{path}" fill="none" stroke="#c0392b" stroke-width="2"/>')
    return _document(body)
