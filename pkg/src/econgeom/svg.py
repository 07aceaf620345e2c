"""Minimal SVG line-plot writer (polylines, axes, optional log-y)."""

from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")


@dataclass
class Series:
    """With ``step=True`` ``x`` holds n+1 bin edges and ``y`` n values."""

    x: np.ndarray
    y: np.ndarray
    label: str = ""
    step: bool = False


@dataclass
class Plot:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    logy: bool = False
    width: int = 640
    height: int = 420
    series: list = field(default_factory=list)

    def add(self, x, y, label="", step=False):
        self.series.append(Series(np.asarray(x, float), np.asarray(y, float), label, step))
        return self

    def _ys(self, y):
        if self.logy:
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(y > 0, np.log10(y), np.nan)
        return y

    def render(self):
        W, H = self.width, self.height
        left, right, top, bottom = 70, 20, 40, 50
        xs = np.concatenate([s.x for s in self.series]) if self.series else np.array([0.0, 1.0])
        ys = np.concatenate([self._ys(s.y) for s in self.series]) if self.series else np.array([0.0, 1.0])
        xs, ys = xs[np.isfinite(xs)], ys[np.isfinite(ys)]
        x0, x1 = (xs.min(), xs.max()) if xs.size else (0.0, 1.0)
        y0, y1 = (ys.min(), ys.max()) if ys.size else (0.0, 1.0)
        if x1 == x0:
            x1 = x0 + 1.0
        if y1 == y0:
            y1 = y0 + 1.0
        pw, ph = W - left - right, H - top - bottom

        def px(x):
            return left + (x - x0) / (x1 - x0) * pw

        def py(y):
            return top + ph - (y - y0) / (y1 - y0) * ph

        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
            f'<rect width="{W}" height="{H}" fill="white"/>',
            f'<text x="{W / 2:.1f}" y="22" text-anchor="middle" font-size="15" font-family="sans-serif">{escape(self.title)}</text>',
            f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
            f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
        ]
        for t in np.linspace(x0, x1, 6):
            out.append(f'<line x1="{px(t):.2f}" y1="{top + ph}" x2="{px(t):.2f}" y2="{top + ph + 5}" stroke="black"/>')
            out.append(f'<text x="{px(t):.2f}" y="{top + ph + 18}" text-anchor="middle" font-size="11" font-family="sans-serif">{t:.3g}</text>')
        for t in np.linspace(y0, y1, 6):
            lab = f"1e{t:.2g}" if self.logy else f"{t:.3g}"
            out.append(f'<line x1="{left - 5}" y1="{py(t):.2f}" x2="{left}" y2="{py(t):.2f}" stroke="black"/>')
            out.append(f'<text x="{left - 8}" y="{py(t) + 4:.2f}" text-anchor="end" font-size="11" font-family="sans-serif">{lab}</text>')
        out.append(f'<text x="{left + pw / 2:.1f}" y="{H - 10}" text-anchor="middle" font-size="12" font-family="sans-serif">{escape(self.xlabel)}</text>')
        out.append(
            f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" font-size="12" font-family="sans-serif" '
            f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(self.ylabel + (" (log10)" if self.logy else ""))}</text>'
        )
        for k, s in enumerate(self.series):
            color = PALETTE[k % len(PALETTE)]
            x, y = s.x, self._ys(s.y)
            if s.step:
                x = np.repeat(x, 2)[1:-1]
                y = np.repeat(y, 2)
            ok = np.isfinite(x) & np.isfinite(y)
            pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x[ok], y[ok]))
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
            if s.label:
                ly = top + 14 + 16 * k
                out.append(f'<line x1="{left + pw - 150}" y1="{ly - 4}" x2="{left + pw - 130}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
                out.append(f'<text x="{left + pw - 125}" y="{ly}" font-size="11" font-family="sans-serif">{escape(s.label)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.render())
        return path
