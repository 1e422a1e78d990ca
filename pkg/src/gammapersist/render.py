"""Static SVG pictures of barcodes and planar strata."""

from __future__ import annotations

import io
import math
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
from matplotlib.figure import Figure  # noqa: E402

from .barcodes1d import GradedBarcode  # noqa: E402
from .gamma_geometry import HalfSpace, HPolyhedron, dot  # noqa: E402

DEGREE_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_RC = {
    "svg.hashsalt": "gamma-persist",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
    "font.size": 9,
}


def _to_svg(fig: Figure) -> str:
    buf = io.StringIO()
    with matplotlib.rc_context(_RC):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def barcode_svg(barcode: GradedBarcode, title: str | None = None) -> str:
    """One horizontal segment per bar; filled/hollow dots mark closed/open
    ends and arrow heads mark infinite ones."""
    bars = sorted(
        barcode.bars(),
        key=lambda b: (b[0].lower, b[0].upper, b[1]),
    )
    finite = [float(x) for x in barcode.finite_endpoints()] or [0.0]
    lo, hi = min(finite), max(finite)
    pad = max(1.0, (hi - lo) * 0.15)
    left, right = lo - pad, hi + pad
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(6, 0.4 * max(len(bars), 1) + 1.2))
        ax = fig.add_subplot()
        for row, (interval, degree) in enumerate(bars):
            y = len(bars) - row
            color = DEGREE_COLORS[degree % len(DEGREE_COLORS)]
            a = float(interval.lower.value) if interval.lower.is_finite else left
            b = float(interval.upper.value) if interval.upper.is_finite else right
            ax.plot([a, b], [y, y], color=color, linewidth=2.5, solid_capstyle="butt")
            if interval.lower.is_finite:
                ax.plot([a], [y], "o", color=color, markerfacecolor=color if interval.lower_closed else "white")
            else:
                ax.plot([a], [y], marker="<", color=color)
            if interval.upper.is_finite:
                ax.plot([b], [y], "o", color=color, markerfacecolor=color if interval.upper_closed else "white")
            else:
                ax.plot([b], [y], marker=">", color=color)
        degrees = sorted({d for _, d in bars})
        for d in degrees:
            ax.plot([], [], color=DEGREE_COLORS[d % len(DEGREE_COLORS)], linewidth=2.5, label=f"degree {d}")
        if degrees:
            ax.legend(loc="lower right", frameon=False)
        ax.set_xlim(left, right)
        ax.set_ylim(0, len(bars) + 1)
        ax.set_yticks([])
        if title:
            ax.set_title(title)
        fig.tight_layout()
        return _to_svg(fig)


def _polygon(p: HPolyhedron, box: tuple[Fraction, Fraction, Fraction, Fraction]):
    """Vertices (counter-clockwise) of ``cl(p)`` clipped to the box."""
    x0, x1, y0, y1 = box
    frame = [
        HalfSpace((1, 0), x1),
        HalfSpace((-1, 0), -x0),
        HalfSpace((0, 1), y1),
        HalfSpace((0, -1), -y0),
    ]
    cons = [c.with_strict(False) for c in p.constraints] + frame
    verts = set()
    for a, b in combinations(cons, 2):
        det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0]
        if det == 0:
            continue
        x = (a.offset * b.normal[1] - a.normal[1] * b.offset) / det
        y = (a.normal[0] * b.offset - a.offset * b.normal[0]) / det
        if all(dot(c.normal, (x, y)) <= c.offset for c in cons):
            verts.add((x, y))
    if len(verts) < 1:
        return []
    cx = sum(v[0] for v in verts) / len(verts)
    cy = sum(v[1] for v in verts) / len(verts)
    return sorted(verts, key=lambda v: math.atan2(float(v[1] - cy), float(v[0] - cx)))


def strata_svg(
    strata: Sequence[HPolyhedron],
    window: tuple = (-3, 3, -3, 3),
    title: str | None = None,
) -> str:
    """Filled outlines of planar strata; dashed edges are excluded boundary."""
    box = tuple(Fraction(v) for v in window)
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(5, 5))
        ax = fig.add_subplot()
        for k, z in enumerate(strata):
            if z.dim != 2:
                raise ValueError("only planar strata can be drawn")
            color = DEGREE_COLORS[k % len(DEGREE_COLORS)]
            verts = _polygon(z, box)
            if not verts:
                continue
            xs = [float(v[0]) for v in verts]
            ys = [float(v[1]) for v in verts]
            if len(verts) >= 3:
                ax.fill(xs, ys, color=color, alpha=0.25, linewidth=0)
            for i in range(len(verts)):
                a, b = verts[i], verts[(i + 1) % len(verts)]
                mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
                strict = any(c.strict and dot(c.normal, mid) == c.offset for c in z.constraints)
                on_frame = mid[0] in (box[0], box[1]) or mid[1] in (box[2], box[3])
                if on_frame and not any(dot(c.normal, mid) == c.offset for c in z.constraints):
                    continue
                ax.plot(
                    [float(a[0]), float(b[0])],
                    [float(a[1]), float(b[1])],
                    color=color,
                    linestyle="--" if strict else "-",
                    linewidth=1.5,
                )
            if len(verts) == 1:
                ax.plot(xs, ys, "o", color=color)
        ax.set_xlim(float(box[0]), float(box[1]))
        ax.set_ylim(float(box[2]), float(box[3]))
        ax.set_aspect("equal")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        return _to_svg(fig)
