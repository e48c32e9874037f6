"""Minimal deterministic SVG emitters (no timestamps, stable float repr)."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

_HEADER = '<?xml version="1.0" encoding="UTF-8"?>\n'


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def eigenvalue_scatter(points: np.ndarray, path: str | Path, size: int = 480) -> None:
    """Scatter of complex points with the unit circle overlaid."""
    half = size / 2
    scale = half / 1.6

    def to_px(z: complex) -> tuple[float, float]:
        return half + z.real * scale, half - z.imag * scale

    parts = [
        _HEADER,
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n',
        f'<rect width="{size}" height="{size}" fill="white"/>\n',
        f'<circle cx="{_fmt(half)}" cy="{_fmt(half)}" r="{_fmt(scale)}" '
        'fill="none" stroke="#888" stroke-width="1"/>\n',
    ]
    for z in points:
        x, y = to_px(complex(z))
        parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="1.5" fill="#1f6fb2"/>\n')
    parts.append("</svg>\n")
    Path(path).write_text("".join(parts))


def loglog_tail_curve(
    etas,
    probs,
    intervals,
    path: str | Path,
    width: int = 560,
    height: int = 420,
) -> None:
    """Log-log curve of tail probabilities with interval whiskers; zero-count
    points are dropped (no log of zero)."""
    pts = [(e, p, lo, hi) for e, p, (lo, hi) in zip(etas, probs, intervals) if p > 0]
    parts = [
        _HEADER,
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n',
        f'<rect width="{width}" height="{height}" fill="white"/>\n',
    ]
    if pts:
        margin = 45
        xs = [math.log10(e) for e, *_ in pts]
        ys = [math.log10(p) for _, p, *_ in pts]
        los = [math.log10(max(lo, 1e-12)) for *_, lo, _ in pts]
        his = [math.log10(max(hi, 1e-12)) for *_, hi in pts]
        x0, x1 = min(xs), max(xs) or 1
        y0, y1 = min(los), max(his)
        if x1 == x0:
            x1 = x0 + 1
        if y1 == y0:
            y1 = y0 + 1

        def to_px(lx: float, ly: float) -> tuple[float, float]:
            px = margin + (lx - x0) / (x1 - x0) * (width - 2 * margin)
            py = height - margin - (ly - y0) / (y1 - y0) * (height - 2 * margin)
            return px, py

        path_d = []
        for k, (lx, ly) in enumerate(zip(xs, ys)):
            px, py = to_px(lx, ly)
            path_d.append(f"{'M' if k == 0 else 'L'}{_fmt(px)},{_fmt(py)}")
            lo_px = to_px(lx, los[k])[1]
            hi_px = to_px(lx, his[k])[1]
            parts.append(
                f'<line x1="{_fmt(px)}" y1="{_fmt(lo_px)}" x2="{_fmt(px)}" y2="{_fmt(hi_px)}" '
                'stroke="#999" stroke-width="1"/>\n'
            )
            parts.append(f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="2.5" fill="#b2331f"/>\n')
        parts.append(
            f'<path d="{" ".join(path_d)}" fill="none" stroke="#b2331f" stroke-width="1.2"/>\n'
        )
        parts.append(
            f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
            f'height="{height - 2 * margin}" fill="none" stroke="#333" stroke-width="1"/>\n'
        )
    parts.append("</svg>\n")
    Path(path).write_text("".join(parts))
