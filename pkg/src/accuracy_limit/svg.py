"""Minimal SVG line and scatter plots, no plotting library needed."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")

_W, _H, _PAD = 480, 360, 48


def _scale(v, lo, hi, a, b):
    span = hi - lo if hi > lo else 1.0
    return a + (np.asarray(v, dtype=float) - lo) / span * (b - a)


def _frame(title, xlabel, ylabel, xlim, ylim):
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
             f'viewBox="0 0 {_W} {_H}">',
             f'<rect width="{_W}" height="{_H}" fill="white"/>',
             f'<rect x="{_PAD}" y="{_PAD // 2}" width="{_W - 1.5 * _PAD}" height="{_H - 1.5 * _PAD}" '
             'fill="none" stroke="black"/>',
             f'<text x="{_W / 2}" y="16" text-anchor="middle" font-size="13">{escape(title)}</text>',
             f'<text x="{_W / 2}" y="{_H - 6}" text-anchor="middle" font-size="11">{escape(xlabel)}</text>',
             f'<text x="12" y="{_H / 2}" font-size="11" transform="rotate(-90 12 {_H / 2})" '
             f'text-anchor="middle">{escape(ylabel)}</text>',
             f'<text x="{_PAD}" y="{_H - _PAD + 14}" font-size="9">{xlim[0]:.3g}</text>',
             f'<text x="{_W - _PAD / 2}" y="{_H - _PAD + 14}" font-size="9" text-anchor="end">{xlim[1]:.3g}</text>',
             f'<text x="{_PAD - 4}" y="{_H - _PAD}" font-size="9" text-anchor="end">{ylim[0]:.3g}</text>',
             f'<text x="{_PAD - 4}" y="{_PAD // 2 + 8}" font-size="9" text-anchor="end">{ylim[1]:.3g}</text>']
    return parts


def _limits(arrays):
    flat = np.concatenate([np.ravel(a) for a in arrays])
    flat = flat[np.isfinite(flat)]
    if flat.size == 0:
        return 0.0, 1.0
    return float(flat.min()), float(flat.max())


def line_plot(path, x, series: dict, title="", xlabel="", ylabel="") -> Path:
    """One polyline per entry of ``series`` (name -> y values), with a legend."""
    xlim = _limits([x])
    ylim = _limits(list(series.values()))
    parts = _frame(title, xlabel, ylabel, xlim, ylim)
    px = _scale(x, *xlim, _PAD, _W - _PAD / 2)
    for k, (name, y) in enumerate(series.items()):
        color = PALETTE[k % len(PALETTE)]
        py = _scale(y, *ylim, _H - _PAD, _PAD / 2)
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py) if np.isfinite(b))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        parts.append(f'<text x="{_PAD + 8}" y="{_PAD // 2 + 14 + 12 * k}" font-size="10" '
                     f'fill="{color}">{escape(str(name))}</text>')
    parts.append("</svg>")
    return _write(path, parts)


def scatter_plot(path, coords, labels, title="", xlabel="", ylabel="") -> Path:
    """2-D scatter, one colour per class label."""
    coords = np.asarray(coords, dtype=float)
    labels = np.asarray(labels)
    xlim, ylim = _limits([coords[:, 0]]), _limits([coords[:, 1]])
    parts = _frame(title, xlabel, ylabel, xlim, ylim)
    px = _scale(coords[:, 0], *xlim, _PAD, _W - _PAD / 2)
    py = _scale(coords[:, 1], *ylim, _H - _PAD, _PAD / 2)
    classes = list(np.unique(labels))
    for a, b, l in zip(px, py, labels):
        color = PALETTE[classes.index(l) % len(PALETTE)]
        parts.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="1.6" fill="{color}" fill-opacity="0.7"/>')
    parts.append("</svg>")
    return _write(path, parts)


def _write(path, parts):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return path
