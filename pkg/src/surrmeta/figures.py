"""Minimal static SVG emission for region panels.

Hand-rolled rather than delegated to a plotting library so that output bytes
are a pure function of the inputs (no timestamps, font probing, or library
version drift), which the reproducibility contract requires.
"""

import math

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")


def _fmt(v):
    return f"{v:.2f}"


def panel_svg(trials, boundaries, fit_line, rho, level_pct=90, width=640, height=480):
    """One panel: region outlines, estimate markers, and the regression line.

    trials: [(trial_id, S_hat, M_hat)], boundaries: {trial_id: [(x, y), ...]},
    fit_line: (beta0, beta1) or None. Returns the SVG document as a string.
    """
    xs = [s for _, s, _ in trials]
    ys = [m for _, _, m in trials]
    for pts in boundaries.values():
        xs.extend(p[0] for p in pts)
        ys.extend(p[1] for p in pts)
    if not xs:
        xs = ys = [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    x_pad = 0.08 * (x_hi - x_lo or 1.0)
    y_pad = 0.08 * (y_hi - y_lo or 1.0)
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    margin = 56.0
    pw = width - 2 * margin
    ph = height - 2 * margin

    def px(x):
        return margin + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return margin + (y_hi - y) / (y_hi - y_lo) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{_fmt(margin)}" y="{_fmt(margin)}" width="{_fmt(pw)}" '
        f'height="{_fmt(ph)}" fill="none" stroke="#333333"/>',
        f'<text x="{_fmt(width / 2)}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">'
        f"{level_pct:g}% confidence regions, sampling correlation rho = {rho:g}</text>",
        f'<text x="{_fmt(width / 2)}" y="{_fmt(height - 12)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">late-stage incidence reduction</text>',
        f'<text x="16" y="{_fmt(height / 2)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {_fmt(height / 2)})">mortality reduction</text>',
    ]
    # axis extremes as tick labels
    parts.append(
        f'<text x="{_fmt(margin)}" y="{_fmt(height - margin + 16)}" '
        f'font-family="sans-serif" font-size="10">{x_lo:.3g}</text>'
    )
    parts.append(
        f'<text x="{_fmt(width - margin)}" y="{_fmt(height - margin + 16)}" '
        f'text-anchor="end" font-family="sans-serif" font-size="10">{x_hi:.3g}</text>'
    )
    parts.append(
        f'<text x="{_fmt(margin - 4)}" y="{_fmt(height - margin)}" text-anchor="end" '
        f'font-family="sans-serif" font-size="10">{y_lo:.3g}</text>'
    )
    parts.append(
        f'<text x="{_fmt(margin - 4)}" y="{_fmt(margin + 10)}" text-anchor="end" '
        f'font-family="sans-serif" font-size="10">{y_hi:.3g}</text>'
    )

    if fit_line is not None:
        beta0, beta1 = fit_line
        parts.append(
            f'<line x1="{_fmt(px(x_lo))}" y1="{_fmt(py(beta0 + beta1 * x_lo))}" '
            f'x2="{_fmt(px(x_hi))}" y2="{_fmt(py(beta0 + beta1 * x_hi))}" '
            f'stroke="#555555" stroke-dasharray="6 4"/>'
        )

    for idx, (trial_id, s_hat, m_hat) in enumerate(trials):
        color = _COLORS[idx % len(_COLORS)]
        pts = boundaries.get(trial_id, ())
        if pts:
            closed = list(pts) + [pts[0]]
            coords = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in closed)
            parts.append(
                f'<polyline fill="none" stroke="{color}" points="{coords}"/>'
            )
        cx, cy = px(s_hat), py(m_hat)
        d = 4.0
        parts.append(
            f'<line x1="{_fmt(cx - d)}" y1="{_fmt(cy - d)}" x2="{_fmt(cx + d)}" '
            f'y2="{_fmt(cy + d)}" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<line x1="{_fmt(cx - d)}" y1="{_fmt(cy + d)}" x2="{_fmt(cx + d)}" '
            f'y2="{_fmt(cy - d)}" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{_fmt(cx + 6)}" y="{_fmt(cy - 6)}" font-family="sans-serif" '
            f'font-size="10" fill="{color}">{trial_id}</text>'
        )

    if not math.isfinite(x_lo) or not math.isfinite(y_lo):
        raise ValueError("non-finite plot bounds")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
