"""Standalone SVG for the P-P difference plot (curve, shaded band, zero line)."""
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 560, 320
MARGIN = dict(left=70, right=20, top=30, bottom=45)


def _y_limit(*arrays):
    finite = np.concatenate([np.abs(a[np.isfinite(a)]) for a in arrays if a is not None])
    top = float(finite.max()) if finite.size else 0.0
    return 1.1 * top if top > 0 else 0.01


def _nice_ticks(limit, n=4):
    step = 10 ** np.floor(np.log10(limit / n))
    for mult in (1, 2, 5, 10):
        if limit / (step * mult) <= n:
            step *= mult
            break
    ticks = np.arange(-np.floor(limit / step), np.floor(limit / step) + 1) * step
    return ticks


def difference_plot(p, diff, lo=None, hi=None, title=""):
    """Return SVG markup for ``diff`` against ``p`` with an optional band."""
    p = np.asarray(p, dtype=float)
    diff = np.asarray(diff, dtype=float)
    lo = None if lo is None else np.asarray(lo, dtype=float)
    hi = None if hi is None else np.asarray(hi, dtype=float)
    ylim = _y_limit(diff, lo, hi)
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = MARGIN["top"], HEIGHT - MARGIN["bottom"]

    def sx(v):
        return x0 + (x1 - x0) * v

    def sy(v):
        return y0 + (y1 - y0) * (ylim - v) / (2 * ylim)

    def pts(xs, ys):
        return " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(xs, ys))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="18" text-anchor="middle">{escape(title)}</text>')
    if lo is not None and hi is not None:
        out.append(f'<polygon points="{pts(np.r_[p, p[::-1]], np.r_[hi, lo[::-1]])}" '
                   'fill="#bbbbbb" fill-opacity="0.6" stroke="none"/>')
    out.append(f'<line x1="{x0}" y1="{sy(0):.2f}" x2="{x1}" y2="{sy(0):.2f}" '
               'stroke="black" stroke-dasharray="4,3"/>')
    out.append(f'<polyline points="{pts(p, diff)}" fill="none" stroke="black" stroke-width="1.5"/>')
    out.append(f'<rect x="{x0}" y="{y0}" width="{x1 - x0}" height="{y1 - y0}" '
               'fill="none" stroke="black"/>')
    for t in np.linspace(0, 1, 5):
        out.append(f'<line x1="{sx(t):.2f}" y1="{y1}" x2="{sx(t):.2f}" y2="{y1 + 4}" stroke="black"/>')
        out.append(f'<text x="{sx(t):.2f}" y="{y1 + 16}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(ylim):
        out.append(f'<line x1="{x0 - 4}" y1="{sy(t):.2f}" x2="{x0}" y2="{sy(t):.2f}" stroke="black"/>')
        out.append(f'<text x="{x0 - 6}" y="{sy(t) + 4:.2f}" text-anchor="end">{t:.3g}</text>')
    out.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 8}" text-anchor="middle">'
               'model probability</text>')
    out.append(f'<text x="16" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {(y0 + y1) / 2:.1f})">empirical - model</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
