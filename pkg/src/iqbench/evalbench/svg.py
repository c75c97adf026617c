"""Minimal hand-written SVG plots: ROC curves with a ratio panel, and
decision-boundary backgrounds with scattered test shots."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
           "#7f7f7f", "#bcbd22", "#17becf"]
GROUND_BG, EXCITED_BG = "#c6dbef", "#fdd0a2"
GROUND_PT, EXCITED_PT = "#08519c", "#a63603"


def _doc(width, height, body):
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">\n'
            f'<rect width="{width}" height="{height}" fill="white"/>\n' + "\n".join(body) + "\n</svg>\n")


class _Axes:
    def __init__(self, x0, y0, w, h, xlim, ylim):
        self.x0, self.y0, self.w, self.h = x0, y0, w, h
        self.xlim, self.ylim = xlim, ylim

    def px(self, x):
        a, b = self.xlim
        return self.x0 + (np.asarray(x) - a) / (b - a) * self.w

    def py(self, y):
        a, b = self.ylim
        return self.y0 + self.h - (np.asarray(y) - a) / (b - a) * self.h

    def frame(self, xlabel, ylabel, ticks=5):
        out = [f'<rect x="{self.x0}" y="{self.y0}" width="{self.w}" height="{self.h}" '
               f'fill="none" stroke="black"/>']
        for v in np.linspace(*self.xlim, ticks):
            x = self.px(v)
            out.append(f'<text x="{x:.1f}" y="{self.y0 + self.h + 14}" text-anchor="middle">{v:.2g}</text>')
        for v in np.linspace(*self.ylim, ticks):
            y = self.py(v)
            out.append(f'<text x="{self.x0 - 4}" y="{y + 4:.1f}" text-anchor="end">{v:.2g}</text>')
        out.append(f'<text x="{self.x0 + self.w / 2}" y="{self.y0 + self.h + 30}" '
                   f'text-anchor="middle">{escape(xlabel)}</text>')
        out.append(f'<text transform="translate({self.x0 - 38},{self.y0 + self.h / 2}) rotate(-90)" '
                   f'text-anchor="middle">{escape(ylabel)}</text>')
        return out

    def polyline(self, x, y, color, width=1.5, dash=None):
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(self.px(x), self.py(y)))
        d = f' stroke-dasharray="{dash}"' if dash else ""
        return f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{width}"{d}/>'


def roc_svg(curves: dict, ratio_fpr=None, ratios: dict | None = None, baseline: str = "") -> str:
    """``curves`` maps name -> (fpr, tpr, auc); ``ratios`` maps name -> ratio series."""
    width, top_h, bot_h = 560, 360, 160
    height = 60 + top_h + (bot_h + 60 if ratios else 0)
    body = ['<text x="280" y="20" text-anchor="middle" font-size="13">ROC curves</text>']
    top = _Axes(60, 35, 320, top_h - 20, (0.0, 1.0), (0.0, 1.0))
    body += top.frame("False Positive Rate", "True Positive Rate")
    body.append(top.polyline([0, 1], [0, 1], "#999999", 1, "4,3"))
    for k, (name, (fpr, tpr, a)) in enumerate(curves.items()):
        color = PALETTE[k % len(PALETTE)]
        body.append(top.polyline(fpr, tpr, color))
        y = 45 + 16 * k
        body.append(f'<line x1="395" y1="{y}" x2="415" y2="{y}" stroke="{color}" stroke-width="2"/>')
        body.append(f'<text x="420" y="{y + 4}">{escape(name)} (AUC {a:.3f})</text>')
    if ratios:
        vals = np.concatenate([np.asarray(r)[np.isfinite(r)] for r in ratios.values()] + [np.ones(1)])
        lo, hi = float(vals.min()), float(vals.max())
        pad = max(0.05, 0.1 * (hi - lo))
        bot = _Axes(60, top_h + 75, 320, bot_h - 20, (0.0, 1.0), (lo - pad, hi + pad))
        body += bot.frame("False Positive Rate", f"TPR / TPR({baseline})")
        for k, (name, r) in enumerate(ratios.items()):
            r = np.asarray(r, dtype=float)
            ok = np.isfinite(r)
            body.append(bot.polyline(np.asarray(ratio_fpr)[ok], r[ok], PALETTE[k % len(PALETTE)]))
    return _doc(width, height, body)


def boundary_svg(grid, title: str, points=None, labels=None, max_points: int = 1500) -> str:
    res_q, res_i = grid.labels.shape
    width, height = 480, 460
    ax = _Axes(60, 35, 380, 360, (grid.i_values[0], grid.i_values[-1]),
               (grid.q_values[0], grid.q_values[-1]))
    body = [f'<text x="250" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>']
    cw = ax.w / res_i
    ch = ax.h / res_q
    for r in range(res_q):
        row = grid.labels[r]
        y = ax.y0 + ax.h - (r + 1) * ch
        # merge horizontal runs of equal label into one rect
        start = 0
        for c in range(1, res_i + 1):
            if c == res_i or row[c] != row[start]:
                fill = EXCITED_BG if row[start] else GROUND_BG
                body.append(f'<rect x="{ax.x0 + start * cw:.2f}" y="{y:.2f}" width="{(c - start) * cw + 0.3:.2f}" '
                            f'height="{ch + 0.3:.2f}" fill="{fill}"/>')
                start = c
    if points is not None:
        pts = np.asarray(points)
        lab = np.asarray(labels)
        step = max(1, len(pts) // max_points)
        for p, l in zip(pts[::step], lab[::step]):
            color = EXCITED_PT if l else GROUND_PT
            body.append(f'<circle cx="{float(ax.px(p[0])):.2f}" cy="{float(ax.py(p[1])):.2f}" r="1.6" '
                        f'fill="{color}" fill-opacity="0.6"/>')
    body += ax.frame("I", "Q")
    return _doc(width, height, body)
