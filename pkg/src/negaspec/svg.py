"""Minimal self-contained SVG scatter and line plots."""

from xml.sax.saxutils import escape

import numpy as np

__all__ = ["Figure"]

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _fmt(v):
    return f"{v:.2f}"


class Figure:
    """Collects series in data coordinates and renders them to SVG text."""

    def __init__(self, title="", xlabel="", ylabel="", width=640, height=420):
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel
        self.width, self.height = width, height
        self.margin = (60, 20, 40, 50)  # left, right, top, bottom
        self._series = []

    def scatter(self, x, y, label="", marker="circle"):
        self._series.append(("scatter", np.asarray(x, float), np.asarray(y, float), label, marker))

    def line(self, x, y, label=""):
        self._series.append(("line", np.asarray(x, float), np.asarray(y, float), label, None))

    def steps(self, edges, counts, label=""):
        edges, counts = np.asarray(edges, float), np.asarray(counts, float)
        x = np.repeat(edges, 2)[1:-1]
        y = np.repeat(counts, 2)
        self._series.append(("line", x, y, label, None))

    def _bounds(self):
        xs = np.concatenate([s[1] for s in self._series if s[1].size] or [np.zeros(1)])
        ys = np.concatenate([s[2] for s in self._series if s[2].size] or [np.zeros(1)])
        x0, x1 = float(xs.min()), float(xs.max())
        y0, y1 = float(ys.min()), float(ys.max())
        if x1 == x0:
            x0, x1 = x0 - 1, x1 + 1
        if y1 == y0:
            y0, y1 = y0 - 1, y1 + 1
        pad_x, pad_y = 0.05 * (x1 - x0), 0.05 * (y1 - y0)
        return x0 - pad_x, x1 + pad_x, y0 - pad_y, y1 + pad_y

    def render(self):
        left, right, top, bottom = self.margin
        w, h = self.width, self.height
        pw, ph = w - left - right, h - top - bottom
        x0, x1, y0, y1 = self._bounds()
        sx = lambda v: left + (v - x0) / (x1 - x0) * pw
        sy = lambda v: top + ph - (v - y0) / (y1 - y0) * ph

        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
            f'viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">',
            f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
            f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        ]
        for t in np.linspace(x0, x1, 5):
            out.append(
                f'<text x="{_fmt(sx(t))}" y="{top + ph + 15}" text-anchor="middle">{t:.3g}</text>'
            )
        for t in np.linspace(y0, y1, 5):
            out.append(
                f'<text x="{left - 5}" y="{_fmt(sy(t) + 4)}" text-anchor="end">{t:.3g}</text>'
            )
        if y0 < 0 < y1:
            out.append(
                f'<line x1="{left}" y1="{_fmt(sy(0))}" x2="{left + pw}" y2="{_fmt(sy(0))}" '
                'stroke="#bbbbbb" stroke-dasharray="3,3"/>'
            )
        for n, (kind, x, y, label, marker) in enumerate(self._series):
            color = _COLORS[n % len(_COLORS)]
            if kind == "line" and x.size:
                pts = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in zip(x, y))
                out.append(f'<polyline points="{pts}" fill="none" stroke="{color}"/>')
            elif marker == "cross":
                for a, b in zip(x, y):
                    cx, cy = sx(a), sy(b)
                    out.append(
                        f'<path d="M{_fmt(cx - 3)},{_fmt(cy - 3)}L{_fmt(cx + 3)},{_fmt(cy + 3)}'
                        f'M{_fmt(cx - 3)},{_fmt(cy + 3)}L{_fmt(cx + 3)},{_fmt(cy - 3)}" '
                        f'stroke="{color}"/>'
                    )
            else:
                for a, b in zip(x, y):
                    out.append(
                        f'<circle cx="{_fmt(sx(a))}" cy="{_fmt(sy(b))}" r="2.5" '
                        f'fill="none" stroke="{color}"/>'
                    )
            if label:
                out.append(
                    f'<text x="{left + pw - 5}" y="{top + 14 + 14 * n}" text-anchor="end" '
                    f'fill="{color}">{escape(label)}</text>'
                )
        out.append(f'<text x="{w / 2}" y="{top - 12}" text-anchor="middle">{escape(self.title)}</text>')
        out.append(
            f'<text x="{left + pw / 2}" y="{h - 8}" text-anchor="middle">{escape(self.xlabel)}</text>'
        )
        out.append(
            f'<text x="14" y="{top + ph / 2}" text-anchor="middle" '
            f'transform="rotate(-90 14 {top + ph / 2})">{escape(self.ylabel)}</text>'
        )
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.render())
