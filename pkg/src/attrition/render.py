"""CSV and SVG text for correlation, heatmap, scatter and ROC exports."""

from __future__ import annotations

import csv
import io
from html import escape

import numpy as np

from attrition.evaluation import RocCurve
from attrition.stats import CorrelationMatrix, Histogram2D, Scatter3D

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _num(v: float) -> str:
    return repr(float(v))


def correlation_csv(corr: CorrelationMatrix) -> str:
    names = corr.feature_names
    rows = [["", *names]]
    rows += [[names[i], *(_num(v) for v in corr.values[i])] for i in range(len(names))]
    return _csv(rows)


def histogram_csv(h: Histogram2D) -> str:
    rows = [[f"{h.x_axis.name} \\ {h.y_axis.name}", *h.y_axis.labels]]
    rows += [[label, *map(str, h.counts[i])] for i, label in enumerate(h.x_axis.labels)]
    return _csv(rows)


def scatter_csv(s: Scatter3D) -> str:
    rows = [[*s.names, "attrition"]]
    rows += [[*(_num(v) for v in p), str(int(c))] for p, c in zip(s.points, s.point_class)]
    return _csv(rows)


def roc_csv(curve: RocCurve) -> str:
    rows = [["fpr", "tpr", "threshold"]]
    rows += [[_num(f), _num(t), "inf" if np.isinf(c) else _num(c)] for f, t, c in zip(curve.fpr, curve.tpr, curve.thresholds)]
    return _csv(rows)


def _ramp(r: float) -> str:
    # linear blue (-1) -> white (0) -> red (+1)
    r = max(-1.0, min(1.0, r))
    if r >= 0:
        g = round(255 * (1 - r))
        return f"#ff{g:02x}{g:02x}"
    g = round(255 * (1 + r))
    return f"#{g:02x}{g:02x}ff"


def correlation_svg(corr: CorrelationMatrix, cell: int = 18) -> str:
    names = corr.feature_names
    d = len(names)
    margin = 6 * max(len(n) for n in names) + 10
    size = margin + d * cell + 70
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" font-family="sans-serif" font-size="10">'
    ]
    for i, name in enumerate(names):
        y = margin + i * cell + cell * 0.7
        parts.append(f'<text x="{margin - 4}" y="{y:.1f}" text-anchor="end">{escape(name)}</text>')
        x = margin + i * cell + cell * 0.7
        parts.append(
            f'<text x="{x:.1f}" y="{margin - 4}" transform="rotate(-60 {x:.1f} {margin - 4})">{escape(name)}</text>'
        )
        for j in range(d):
            v = float(corr.values[i, j])
            parts.append(
                f'<rect x="{margin + j * cell}" y="{margin + i * cell}" width="{cell}" height="{cell}" '
                f'fill="{_ramp(v)}"><title>{escape(names[i])} / {escape(names[j])}: {v:.3f}</title></rect>'
            )
    # color bar
    bx = margin + d * cell + 20
    for k in range(d * 2):
        v = 1 - 2 * k / (d * 2 - 1)
        parts.append(f'<rect x="{bx}" y="{margin + k * cell / 2:.1f}" width="12" height="{cell / 2 + 0.5:.1f}" fill="{_ramp(v)}"/>')
    parts.append(f'<text x="{bx + 16}" y="{margin + 8}">+1</text>')
    parts.append(f'<text x="{bx + 16}" y="{margin + d * cell}">-1</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def roc_svg(curves: dict[str, tuple[RocCurve, float]], size: int = 400) -> str:
    """Overlay of several ROC curves with the chance diagonal."""
    pad = 50
    span = size - 2 * pad

    def pt(f, t):
        return f"{pad + f * span:.2f},{pad + (1 - t) * span:.2f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" font-family="sans-serif" font-size="11">',
        f'<rect x="{pad}" y="{pad}" width="{span}" height="{span}" fill="none" stroke="black"/>',
        f'<polyline points="{pt(0, 0)} {pt(1, 1)}" fill="none" stroke="#888" stroke-dasharray="4 4"/>',
        f'<text x="{size / 2}" y="{size - 15}" text-anchor="middle">False positive rate</text>',
        f'<text x="15" y="{size / 2}" text-anchor="middle" transform="rotate(-90 15 {size / 2})">True positive rate</text>',
    ]
    for k, (name, (curve, area)) in enumerate(curves.items()):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(pt(f, t) for f, t in zip(curve.fpr, curve.tpr))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        y = pad + span - 12 - 16 * (len(curves) - 1 - k)
        parts.append(f'<text x="{pad + span - 8}" y="{y}" text-anchor="end" fill="{color}">{escape(name)} (AUC {area:.2f})</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
