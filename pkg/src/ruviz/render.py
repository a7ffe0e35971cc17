"""Chart builders: turn analysis results into PlotDocument objects.

Layout is fixed (960x640 canvas, 12pt sans labels) and every builder is a
pure function of its inputs. Styling follows a small shared palette: risk
uses a white-to-red ramp, utility white-to-blue, highlighted approaches a
saturated blue, the reference black.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .composites import CompositeScores, ReliabilityReport
from .geometry import ellipse_points
from .model import Block, MeasureSpec, NormalizedMatrix
from .multivariate import (
    AcceptancePolygon,
    BlockwisePca,
    GroupSummary,
    OutlierFlag,
    PcaModel,
    SdOdDiagnostics,
)
from .ordering import Dendrogram
from .pareto import CompositeFront, KneePoint, Ray
from .profiles import PcpLines, RadialProfile
from .svg import (
    Circle,
    LegendEntry,
    Line,
    PlotDocument,
    PlotKind,
    Polygon,
    Polyline,
    Rect,
    Text,
)

RISK_COLOR = "#b2182b"
UTILITY_COLOR = "#2166ac"
PARETO_COLOR = "#2166ac"
NEUTRAL_COLOR = "#9a9a9a"
REFERENCE_COLOR = "#000000"
KNEE_COLOR = "#e08214"
PALETTE = ("#2166ac", "#1b7837", "#e08214", "#762a83", "#b2182b", "#35978f")
FLAG_COLORS = {
    OutlierFlag.REGULAR: "#808080",
    OutlierFlag.GOOD_LEVERAGE: "#2166ac",
    OutlierFlag.ORTHOGONAL: "#e08214",
    OutlierFlag.BAD_LEVERAGE: "#b2182b",
}


def _interp(c0: str, c1: str, t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    r0, g0, b0 = int(c0[1:3], 16), int(c0[3:5], 16), int(c0[5:7], 16)
    r1, g1, b1 = int(c1[1:3], 16), int(c1[3:5], 16), int(c1[5:7], 16)
    return "#{:02x}{:02x}{:02x}".format(
        int(round(r0 + t * (r1 - r0))),
        int(round(g0 + t * (g1 - g0))),
        int(round(b0 + t * (b1 - b0))),
    )


def block_ramp(block: Block, t: float) -> str:
    end = RISK_COLOR if block is Block.RISK else UTILITY_COLOR
    return _interp("#ffffff", end, t)


def _short(s: str, n: int = 16) -> str:
    return s if len(s) <= n else s[: n - 1] + "…"


@dataclass(frozen=True)
class Frame:
    """Affine map from data space to a canvas rectangle (y axis flipped)."""

    x0: float
    y0: float
    w: float
    h: float
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def sx(self, v: float) -> float:
        return self.x0 + (v - self.xmin) / (self.xmax - self.xmin) * self.w

    def sy(self, v: float) -> float:
        return self.y0 + self.h - (v - self.ymin) / (self.ymax - self.ymin) * self.h


def _title(doc: PlotDocument, text: str) -> None:
    doc.add(Text(doc.width / 2, 24, text, size=14, anchor="middle", weight="bold"))


def _axes(
    doc: PlotDocument,
    fr: Frame,
    xlabel: str,
    ylabel: str,
    xticks: Sequence[float],
    yticks: Sequence[float],
) -> None:
    doc.add(Line(fr.x0, fr.y0, fr.x0, fr.y0 + fr.h, stroke="#333333"))
    doc.add(Line(fr.x0, fr.y0 + fr.h, fr.x0 + fr.w, fr.y0 + fr.h, stroke="#333333"))
    for t in xticks:
        x = fr.sx(t)
        doc.add(Line(x, fr.y0 + fr.h, x, fr.y0 + fr.h + 4, stroke="#333333"))
        doc.add(Text(x, fr.y0 + fr.h + 16, f"{t:g}", size=10, anchor="middle"))
    for t in yticks:
        y = fr.sy(t)
        doc.add(Line(fr.x0 - 4, y, fr.x0, y, stroke="#333333"))
        doc.add(Text(fr.x0 - 7, y + 3, f"{t:g}", size=10, anchor="end"))
    doc.add(
        Text(fr.x0 + fr.w / 2, fr.y0 + fr.h + 34, xlabel, size=12, anchor="middle")
    )
    doc.add(
        Text(
            fr.x0 - 48,
            fr.y0 + fr.h / 2,
            ylabel,
            size=12,
            anchor="middle",
            rotate=-90.0,
        )
    )


def _legend(doc: PlotDocument, x: float, y: float) -> None:
    for i, entry in enumerate(doc.legend):
        yy = y + i * 16
        if entry.marker == "line":
            doc.add(Line(x, yy - 4, x + 14, yy - 4, stroke=entry.color,
                         stroke_width=2.0))
        elif entry.marker == "dash":
            doc.add(Line(x, yy - 4, x + 14, yy - 4, stroke=entry.color,
                         stroke_width=2.0, dash="4,3"))
        else:
            doc.add(Rect(x, yy - 9, 10, 10, fill=entry.color, stroke="#666666",
                         stroke_width=0.5))
        doc.add(Text(x + 18, yy, _short(entry.label, 28), size=10))


def _diamond(cx: float, cy: float, r: float, **style) -> Polygon:
    return Polygon(
        points=((cx, cy - r), (cx + r, cy), (cx, cy + r), (cx - r, cy)), **style
    )


def _point_label(doc: PlotDocument, x: float, y: float, s: str,
                 size: float = 9.0, color: str = "#333333") -> None:
    if x + 6 + 5.5 * len(s) > doc.width - 4:
        doc.add(Text(x - 6, max(y - 5, 10.0), s, size=size, anchor="end", fill=color))
    else:
        doc.add(Text(x + 6, max(y - 5, 10.0), s, size=size, fill=color))


def render_heatmap(
    nm: NormalizedMatrix,
    dendrogram: Dendrogram,
    pareto_ids: frozenset[str],
    column_order: Sequence[int] | None = None,
) -> PlotDocument:
    """Approaches x measures grid, rows in dendrogram leaf order.

    Asterisks on row labels mark approaches in the composite Pareto set.
    `column_order` optionally permutes the measure columns (the declared
    order is kept by default).
    """
    doc = PlotDocument(PlotKind.HEATMAP, "normalized measures by approach")
    _title(doc, "normalized measures by approach")
    n = len(nm.rows)
    p = len(nm.specs)
    columns = list(column_order) if column_order is not None else list(range(p))
    if sorted(columns) != list(range(p)):
        raise ValueError("column_order must be a permutation of the measures")
    left, top, right, bottom = 160, 96, 30, 88
    grid_w = doc.width - left - right
    grid_h = doc.height - top - bottom
    cell_w = grid_w / p
    cell_h = grid_h / n

    for cidx, col in enumerate(columns):
        spec = nm.specs[col]
        cx = left + (cidx + 0.5) * cell_w
        doc.add(
            Text(cx - 4, top - 10, _short(spec.id, 14), size=10, anchor="start",
                 rotate=-30.0, fill="#222222", title=spec.display_name)
        )
    for ridx, row_i in enumerate(dendrogram.leaf_order):
        row = nm.rows[row_i]
        cy = top + (ridx + 0.5) * cell_h
        label = _short(row.label, 20)
        if row.label in pareto_ids:
            label += " *"
        doc.add(Text(left - 8, cy + 4, label, size=11, anchor="end",
                     title=row.label))
        for cidx, col in enumerate(columns):
            spec = nm.specs[col]
            v = float(nm.values[row_i, col])
            x = left + cidx * cell_w
            y = top + ridx * cell_h
            doc.add(Rect(x, y, cell_w, cell_h, fill=block_ramp(spec.block, v),
                         stroke="#ffffff", stroke_width=1.0))
            text_color = "#ffffff" if v > 0.55 else "#222222"
            doc.add(Text(x + cell_w / 2, y + cell_h / 2 + 3, f"{v:.2f}", size=9,
                         anchor="middle", fill=text_color), z=1)

    ly = doc.height - 46
    doc.add(Text(left, ly - 10, "risk 0 to 1", size=10))
    for i in range(6):
        doc.add(Rect(left + 70 + i * 14, ly - 19, 14, 11,
                     fill=block_ramp(Block.RISK, i / 5)))
    doc.add(Text(left + 190, ly - 10, "utility 0 to 1", size=10))
    for i in range(6):
        doc.add(Rect(left + 270 + i * 14, ly - 19, 14, 11,
                     fill=block_ramp(Block.UTILITY, i / 5)))
    doc.add(Text(left + 400, ly - 10,
                 "* composite Pareto-optimal   rows ordered by "
                 f"{dendrogram.linkage}-linkage clustering", size=10,
                 fill="#444444"))
    doc.legend = [
        LegendEntry("risk measure (white=0, red=1)", RISK_COLOR),
        LegendEntry("utility measure (white=0, blue=1)", UTILITY_COLOR),
    ]
    return doc


def render_dotplot(nm: NormalizedMatrix) -> PlotDocument:
    """Per-approach dots on a shared [0, 1] axis, one facet per block."""
    doc = PlotDocument(PlotKind.DOTPLOT, "measure values by approach")
    _title(doc, "measure values by approach")
    n = len(nm.rows)
    left, top, gap = 150, 70, 50
    bottom = 150
    facet_w = (doc.width - left - 30 - gap) / 2
    plot_h = doc.height - top - bottom
    band = plot_h / n

    facets = ((Block.RISK, left), (Block.UTILITY, left + facet_w + gap))
    for block, fx in facets:
        color = RISK_COLOR if block is Block.RISK else UTILITY_COLOR
        idx = nm.block_indices(block)
        k = len(idx)
        doc.add(Text(fx + facet_w / 2, top - 12, block.value, size=12,
                     anchor="middle", fill=color, weight="bold"))
        doc.add(Line(fx, top + plot_h, fx + facet_w, top + plot_h,
                     stroke="#333333"))
        for t in (0.0, 0.5, 1.0):
            x = fx + t * facet_w
            doc.add(Line(x, top + plot_h, x, top + plot_h + 4, stroke="#333333"))
            doc.add(Text(x, top + plot_h + 16, f"{t:g}", size=10, anchor="middle"))
        for ridx, row in enumerate(nm.rows):
            cy = top + (ridx + 0.5) * band
            doc.add(Line(fx, cy, fx + facet_w, cy, stroke="#eeeeee"))
            vals = [float(nm.values[ridx, j]) for j in idx]
            med = float(np.median(vals))
            mx = fx + med * facet_w
            doc.add(Line(mx, cy - band * 0.32, mx, cy + band * 0.32,
                         stroke="#888888", stroke_width=1.2), z=1)
            doc.add(_diamond(mx, cy, 5.0, fill="#888888", stroke="#444444",
                             stroke_width=0.8), z=2)
            for pos, j in enumerate(idx):
                shade = (pos + 1) / (k + 1)
                doc.add(
                    Circle(fx + vals[pos] * facet_w, cy, 4.5,
                           fill=block_ramp(block, 0.35 + 0.65 * shade),
                           stroke="#555555", stroke_width=0.6, opacity=0.9,
                           title=nm.specs[j].id),
                    z=3,
                )
    for ridx, row in enumerate(nm.rows):
        cy = top + (ridx + 0.5) * band
        doc.add(Text(left - 10, cy + 4, _short(row.label, 20), size=11,
                     anchor="end", title=row.label))

    ly = doc.height - 104
    doc.add(Text(left, ly - 6, "diamond = per-approach median", size=10,
                 fill="#444444"))
    for block, fx in facets:
        idx = nm.block_indices(block)
        k = len(idx)
        for pos, j in enumerate(idx):
            col = pos % 2
            rowp = pos // 2
            x = fx + col * (facet_w / 2)
            y = ly + 12 + rowp * 14
            shade = (pos + 1) / (k + 1)
            doc.add(Circle(x + 5, y - 3, 4.0,
                           fill=block_ramp(block, 0.35 + 0.65 * shade),
                           stroke="#555555", stroke_width=0.6))
            doc.add(Text(x + 14, y, _short(nm.specs[j].id, 14), size=9))
    doc.legend = [
        LegendEntry("risk measures", RISK_COLOR),
        LegendEntry("utility measures", UTILITY_COLOR),
    ]
    return doc


def _slope_text(slope: float | None) -> str:
    return "∞" if slope is None else f"{slope:.2f}"


def render_composite_ru(
    scores: CompositeScores,
    front: CompositeFront,
    knee: KneePoint | None,
    reliability: ReliabilityReport,
    reference_labels: frozenset[str] = frozenset(),
) -> PlotDocument:
    """Composite risk vs utility map with the Pareto front and knee marked."""
    doc = PlotDocument(PlotKind.COMPOSITE_RU, "composite risk-utility map")
    _title(doc, "composite risk-utility map")
    fr = Frame(x0=90, y0=60, w=doc.width - 90 - 260, h=doc.height - 60 - 90,
               xmin=-0.02, xmax=1.02, ymin=-0.02, ymax=1.02)
    _axes(doc, fr, "composite utility", "composite risk",
          (0.0, 0.25, 0.5, 0.75, 1.0), (0.0, 0.25, 0.5, 0.75, 1.0))

    front_ids = front.ids
    for i, label in enumerate(scores.labels):
        u = float(scores.utility[i])
        r = float(scores.risk[i])
        x, y = fr.sx(u), fr.sy(r)
        su = float(scores.utility_sd[i])
        sr = float(scores.risk_sd[i])
        if su > 0.0:
            doc.add(Line(fr.sx(max(u - su, fr.xmin)), y,
                         fr.sx(min(u + su, fr.xmax)), y,
                         stroke="#bbbbbb", stroke_width=1.0))
        if sr > 0.0:
            doc.add(Line(x, fr.sy(max(r - sr, fr.ymin)), x,
                         fr.sy(min(r + sr, fr.ymax)),
                         stroke="#bbbbbb", stroke_width=1.0))

    pts = [(fr.sx(p.utility), fr.sy(p.risk)) for p in front.points]
    if len(pts) >= 2:
        doc.add(Polyline(points=tuple(pts), fill="none", stroke=PARETO_COLOR,
                         stroke_width=2.0), z=1)
    for edge, a, b in zip(front.edges, front.points, front.points[1:]):
        mx = fr.sx((a.utility + b.utility) / 2)
        my = fr.sy((a.risk + b.risk) / 2)
        doc.add(Text(mx + 4, my + 10, f"ΔR/ΔU={_slope_text(edge.slope)}",
                     size=9, fill="#555555"), z=2)

    for i, label in enumerate(scores.labels):
        u, r = float(scores.utility[i]), float(scores.risk[i])
        x, y = fr.sx(u), fr.sy(r)
        if label in reference_labels:
            doc.add(Rect(x - 4.5, y - 4.5, 9, 9, fill=REFERENCE_COLOR,
                         title=label), z=3)
        elif label in front_ids:
            doc.add(Circle(x, y, 5.0, fill=PARETO_COLOR, title=label), z=3)
        else:
            doc.add(Circle(x, y, 4.0, fill=NEUTRAL_COLOR, title=label), z=3)
        if knee is not None and label == knee.id:
            doc.add(_diamond(x, y, 9.0, fill="none", stroke=KNEE_COLOR,
                             stroke_width=2.5), z=4)
        _point_label(doc, x, y, _short(label, 14))

    ax = doc.width - 240
    doc.add(Text(ax, 70, "composite reliability", size=11, weight="bold"))
    for i, (name, rel) in enumerate(
        (("risk", reliability.risk), ("utility", reliability.utility))
    ):
        omega = "n/a" if rel.omega is None else f"{rel.omega:.2f}"
        doc.add(Text(ax, 88 + i * 15,
                     f"{name}: α={rel.alpha:.2f} ω={omega} ({rel.verdict})",
                     size=10, fill="#333333"))
    doc.legend = [
        LegendEntry("composite Pareto-optimal", PARETO_COLOR),
        LegendEntry("dominated", NEUTRAL_COLOR),
        LegendEntry("reference (original)", REFERENCE_COLOR),
        LegendEntry("knee point", KNEE_COLOR, marker="line"),
        LegendEntry("± SD across measures", "#bbbbbb", marker="line"),
    ]
    _legend(doc, ax, 140)
    return doc


def render_rays(
    rays: Sequence[Ray],
    reference: tuple[str, float, float],
    pareto_ids: frozenset[str] = frozenset(),
) -> PlotDocument:
    """Rays from every approach to the reference, labeled with slope and L2."""
    doc = PlotDocument(PlotKind.RAYS, "marginal trade-off against the reference")
    _title(doc, "marginal trade-off against the reference")
    fr = Frame(x0=90, y0=60, w=doc.width - 90 - 240, h=doc.height - 60 - 90,
               xmin=-0.02, xmax=1.02, ymin=-0.02, ymax=1.02)
    _axes(doc, fr, "composite utility", "composite risk",
          (0.0, 0.25, 0.5, 0.75, 1.0), (0.0, 0.25, 0.5, 0.75, 1.0))
    ref_label, u0, r0 = reference
    x0, y0 = fr.sx(u0), fr.sy(r0)
    for ray in rays:
        x, y = fr.sx(ray.utility), fr.sy(ray.risk)
        doc.add(Line(x, y, x0, y0, stroke="#c8c8c8", stroke_width=1.0))
        mx, my = (x + x0) / 2, (y + y0) / 2
        doc.add(Text(mx + 3, my - 3,
                     f"s={_slope_text(ray.slope)} d={ray.l2:.2f}", size=8,
                     fill="#666666"), z=1)
    for ray in rays:
        x, y = fr.sx(ray.utility), fr.sy(ray.risk)
        color = PARETO_COLOR if ray.id in pareto_ids else NEUTRAL_COLOR
        doc.add(Circle(x, y, 4.5, fill=color, title=ray.id), z=2)
        _point_label(doc, x, y, _short(ray.id, 14))
    doc.add(Rect(x0 - 5, y0 - 5, 10, 10, fill=REFERENCE_COLOR, title=ref_label),
            z=3)
    _point_label(doc, x0, y0, _short(ref_label, 14), color="#000000")
    doc.legend = [
        LegendEntry("composite Pareto-optimal", PARETO_COLOR),
        LegendEntry("other approaches", NEUTRAL_COLOR),
        LegendEntry("reference (original)", REFERENCE_COLOR),
        LegendEntry("s = risk change per utility", "#c8c8c8", marker="line"),
    ]
    _legend(doc, doc.width - 225, 70)
    return doc


def render_pcp(pcp: PcpLines) -> PlotDocument:
    """Parallel coordinates with risk and utility in separate facets."""
    doc = PlotDocument(PlotKind.PCP, "parallel coordinates")
    _title(doc, "parallel coordinates")
    left, right, top, bottom, gap = 80, 40, 80, 120, 70
    plot_h = doc.height - top - bottom

    risk_axes = [a for a in pcp.axes if a.block is Block.RISK]
    util_axes = [a for a in pcp.axes if a.block is Block.UTILITY]
    total = len(risk_axes) + len(util_axes)
    usable_w = doc.width - left - right - gap
    risk_w = usable_w * len(risk_axes) / total
    util_w = usable_w - risk_w

    def axis_positions(n_axes: int, x0: float, w: float) -> list[float]:
        if n_axes == 1:
            return [x0 + w / 2]
        return [x0 + w * i / (n_axes - 1) for i in range(n_axes)]

    rx = axis_positions(len(risk_axes), left, risk_w)
    ux = axis_positions(len(util_axes), left + risk_w + gap, util_w)
    pos = {a.measure_id: x for a, x in zip(risk_axes, rx)}
    pos.update({a.measure_id: x for a, x in zip(util_axes, ux)})

    doc.add(Text(left + risk_w / 2, top - 26, "risk (high = more risk)",
                 size=12, anchor="middle", fill=RISK_COLOR, weight="bold"))
    doc.add(Text(left + risk_w + gap + util_w / 2, top - 26,
                 "utility (high = more utility)", size=12, anchor="middle",
                 fill=UTILITY_COLOR, weight="bold"))
    for axes in (risk_axes, util_axes):
        for a in axes:
            x = pos[a.measure_id]
            doc.add(Line(x, top, x, top + plot_h, stroke="#bbbbbb",
                         stroke_width=1.0, dash="2,3"))
            doc.add(Text(x, top - 8, "1", size=8, anchor="middle",
                         fill="#888888"))
            doc.add(Text(x, top + plot_h + 12, "0", size=8, anchor="middle",
                         fill="#888888"))
            doc.add(Text(x + 3, top + plot_h + 26, _short(a.measure_id, 12),
                         size=9, anchor="end", rotate=-30.0))

    def y_of(v: float) -> float:
        return top + plot_h - v * plot_h

    pareto_labels = sorted(l.id for l in pcp.lines if l.is_pareto)
    color_of = {lbl: PALETTE[i % len(PALETTE)] for i, lbl in enumerate(pareto_labels)}
    for line in pcp.lines:
        for axes in (risk_axes, util_axes):
            pts = []
            for a in axes:
                j = [ax.measure_id for ax in pcp.axes].index(a.measure_id)
                pts.append((pos[a.measure_id], y_of(float(line.values[j]))))
            if len(pts) < 2:
                pts = pts + pts
            if line.is_reference:
                style = dict(stroke=REFERENCE_COLOR, stroke_width=1.8, dash="6,3")
                z = 2
            elif line.is_pareto:
                style = dict(stroke=color_of[line.id], stroke_width=2.2)
                z = 3
            else:
                style = dict(stroke="#c4c4c4", stroke_width=1.2)
                z = 1
            doc.add(Polyline(points=tuple(pts), fill="none", title=line.id,
                             **style), z=z)

    doc.legend = [LegendEntry(lbl, color_of[lbl], marker="line")
                  for lbl in pareto_labels]
    doc.legend.append(LegendEntry("reference (original)", REFERENCE_COLOR,
                                  marker="dash"))
    doc.legend.append(LegendEntry("dominated", "#c4c4c4", marker="line"))
    lx = left
    for i, entry in enumerate(doc.legend):
        x = lx + (i % 4) * 210
        y = doc.height - 40 + (i // 4) * 16
        if entry.marker in ("line", "dash"):
            doc.add(Line(x, y - 4, x + 14, y - 4, stroke=entry.color,
                         stroke_width=2.0,
                         dash="4,3" if entry.marker == "dash" else None))
        doc.add(Text(x + 18, y, _short(entry.label, 24), size=10))
    return doc


def render_origami(
    profiles: Sequence[RadialProfile],
    panels: Sequence[Sequence[str]],
    block_by_measure: Mapping[str, Block],
) -> PlotDocument:
    """Radial profile panels; each panel overlays the named profiles."""
    by_id = {p.id: p for p in profiles}
    for panel in panels:
        for pid in panel:
            if pid not in by_id:
                raise ValueError(f"origami selection names unknown approach '{pid}'")
    if not panels:
        raise ValueError("origami rendering needs at least one panel")

    doc = PlotDocument(PlotKind.ORIGAMI, "radial measure profiles")
    _title(doc, "radial measure profiles")
    n_panels = len(panels)
    cols = min(3, n_panels)
    rows = math.ceil(n_panels / cols)
    top, bottom = 60, 30
    cell_w = (doc.width - 40) / cols
    cell_h = (doc.height - top - bottom) / rows

    for pidx, panel in enumerate(panels):
        cx = 20 + (pidx % cols) * cell_w + cell_w / 2
        cy = top + (pidx // cols) * cell_h + cell_h / 2 + 8
        radius = min(cell_w, cell_h) / 2 - 44
        doc.add(Text(cx, cy - radius - 26, _short(" vs ".join(panel), 34),
                     size=11, anchor="middle", weight="bold"))
        sample = by_id[panel[0]]
        m = len(sample.measure_ids)
        ring = []
        for j in range(2 * m):
            ang = sample.angles[j]
            ring.append((cx + radius * math.cos(ang), cy - radius * math.sin(ang)))
        doc.add(Polygon(points=tuple(ring), fill="none", stroke="#dddddd",
                        stroke_width=1.0, dash="2,3"))
        for i, mid in enumerate(sample.measure_ids):
            ang = sample.angles[2 * i]
            ex = cx + radius * math.cos(ang)
            ey = cy - radius * math.sin(ang)
            doc.add(Line(cx, cy, ex, ey, stroke="#e5e5e5", stroke_width=1.0))
            lx = cx + (radius + 10) * math.cos(ang)
            lyy = cy - (radius + 10) * math.sin(ang)
            anchor = "middle"
            if math.cos(ang) > 0.25:
                anchor = "start"
            elif math.cos(ang) < -0.25:
                anchor = "end"
            color = (RISK_COLOR if block_by_measure[mid] is Block.RISK
                     else UTILITY_COLOR)
            doc.add(Text(lx, lyy + 3, _short(mid, 12), size=8, anchor=anchor,
                         fill=color))
        for sidx, pid in enumerate(panel):
            prof = by_id[pid]
            pts = tuple(
                (cx + float(x) * radius, cy - float(y) * radius)
                for x, y in prof.vertices
            )
            color = PALETTE[sidx % len(PALETTE)]
            doc.add(Polygon(points=pts, fill=color, opacity=0.25, title=pid), z=1)
            doc.add(Polygon(points=pts, fill="none", stroke=color,
                            stroke_width=2.0, title=pid), z=2)
            doc.add(Text(cx - radius, cy + radius + 26 + sidx * 12, pid, size=9,
                         fill=color))
    doc.legend = [
        LegendEntry("risk axis labels", RISK_COLOR),
        LegendEntry("utility axis labels", UTILITY_COLOR),
    ]
    return doc


def _arrow(doc: PlotDocument, x0: float, y0: float, x1: float, y1: float,
           color: str, title: str) -> None:
    doc.add(Line(x0, y0, x1, y1, stroke=color, stroke_width=1.6))
    ang = math.atan2(y1 - y0, x1 - x0)
    size = 7.0
    left = (x1 - size * math.cos(ang - 0.42), y1 - size * math.sin(ang - 0.42))
    right = (x1 - size * math.cos(ang + 0.42), y1 - size * math.sin(ang + 0.42))
    doc.add(Polygon(points=((x1, y1), left, right), fill=color, title=title))


def render_biplot(
    model: PcaModel,
    specs: Sequence[MeasureSpec],
    labels: Sequence[str],
    pareto_ids: frozenset[str] = frozenset(),
    reference_labels: frozenset[str] = frozenset(),
    acceptance: AcceptancePolygon | None = None,
    groups: Sequence[GroupSummary] | None = None,
) -> PlotDocument:
    """Joint-PCA biplot: approach scores plus measure loading arrows."""
    if model.k < 2:
        raise ValueError("biplot requires a k >= 2 model")
    doc = PlotDocument(PlotKind.BIPLOT, "joint PCA biplot")
    _title(doc, "joint PCA biplot")
    scores = model.scores[:, :2]
    span = float(np.abs(scores).max()) if scores.size else 1.0
    span = max(span, 1e-9)
    load2 = model.loadings[:, :2]
    max_load = float(np.linalg.norm(load2, axis=1).max())
    arrow_scale = 0.75 * span / max_load if max_load > 1e-12 else 1.0
    lim = 1.25 * span
    extents = [np.abs(load2 * arrow_scale).max() if load2.size else 0.0]
    if acceptance is not None and len(acceptance.vertices):
        extents.append(float(np.abs(acceptance.vertices).max()))
    if groups:
        for g in groups:
            if g.ellipse_axes is not None:
                pts = ellipse_points(g.centroid, g.ellipse_axes[0],
                                     g.ellipse_axes[1])
                extents.append(float(np.abs(pts).max()))
            elif g.hull is not None and len(g.hull):
                extents.append(float(np.abs(g.hull).max()))
    lim = max([lim] + [1.12 * e for e in extents])

    side = min(doc.width - 330, doc.height - 150)
    fr = Frame(x0=90, y0=60, w=side, h=side, xmin=-lim, xmax=lim, ymin=-lim,
               ymax=lim)
    evr = model.explained_variance_ratio
    _axes(doc, fr,
          f"PC1 ({evr[0] * 100:.1f}% of variance)",
          f"PC2 ({evr[1] * 100:.1f}% of variance)",
          (round(-lim * 0.8, 2), 0.0, round(lim * 0.8, 2)),
          (round(-lim * 0.8, 2), 0.0, round(lim * 0.8, 2)))
    doc.add(Line(fr.sx(-lim), fr.sy(0), fr.sx(lim), fr.sy(0), stroke="#e0e0e0"))
    doc.add(Line(fr.sx(0), fr.sy(-lim), fr.sx(0), fr.sy(lim), stroke="#e0e0e0"))

    if acceptance is not None and len(acceptance.vertices) >= 2:
        pts = tuple((fr.sx(float(x)), fr.sy(float(y)))
                    for x, y in acceptance.vertices)
        doc.add(Polygon(points=pts, fill="#4d9221", opacity=0.08), z=1)
        doc.add(Polygon(points=pts, fill="none", stroke="#4d9221",
                        stroke_width=1.5, dash="6,3",
                        title="acceptance region"), z=1)

    if groups:
        for gidx, g in enumerate(groups):
            color = PALETTE[gidx % len(PALETTE)]
            if g.ellipse_axes is not None:
                pts = ellipse_points(g.centroid, g.ellipse_axes[0],
                                     g.ellipse_axes[1])
                doc.add(Polygon(points=tuple((fr.sx(float(x)), fr.sy(float(y)))
                                             for x, y in pts),
                                fill="none", stroke=color, stroke_width=1.2,
                                dash="3,3", title=g.label), z=1)
            elif g.hull is not None and len(g.hull) >= 2:
                doc.add(Polygon(points=tuple((fr.sx(float(x)), fr.sy(float(y)))
                                             for x, y in g.hull),
                                fill="none", stroke=color, stroke_width=1.2,
                                dash="3,3", title=g.label), z=1)
            cxp, cyp = fr.sx(float(g.centroid[0])), fr.sy(float(g.centroid[1]))
            doc.add(Line(cxp - 5, cyp, cxp + 5, cyp, stroke=color,
                         stroke_width=1.5), z=2)
            doc.add(Line(cxp, cyp - 5, cxp, cyp + 5, stroke=color,
                         stroke_width=1.5), z=2)

    for spec, lrow in zip(specs, load2):
        color = RISK_COLOR if spec.block is Block.RISK else UTILITY_COLOR
        tipx = fr.sx(float(lrow[0]) * arrow_scale)
        tipy = fr.sy(float(lrow[1]) * arrow_scale)
        _arrow(doc, fr.sx(0), fr.sy(0), tipx, tipy, color, spec.id)
        doc.add(Text(min(max(tipx + 4, 12.0), doc.width - 12.0),
                     max(tipy - 4, 12.0), _short(spec.id, 12), size=9,
                     fill=color), z=3)

    for label, srow in zip(labels, scores):
        x, y = fr.sx(float(srow[0])), fr.sy(float(srow[1]))
        if label in reference_labels:
            doc.add(Rect(x - 4.5, y - 4.5, 9, 9, fill=REFERENCE_COLOR,
                         title=label), z=4)
        elif label in pareto_ids:
            doc.add(Circle(x, y, 5.0, fill=PARETO_COLOR, title=label), z=4)
        else:
            doc.add(Circle(x, y, 4.0, fill=NEUTRAL_COLOR, title=label), z=4)
        _point_label(doc, x, y, _short(label, 14))

    doc.legend = [
        LegendEntry("composite Pareto-optimal", PARETO_COLOR),
        LegendEntry("other approaches", NEUTRAL_COLOR),
        LegendEntry("reference (original)", REFERENCE_COLOR),
        LegendEntry("risk loading", RISK_COLOR, marker="line"),
        LegendEntry("utility loading", UTILITY_COLOR, marker="line"),
    ]
    if acceptance is not None:
        doc.legend.append(LegendEntry("acceptance region", "#4d9221",
                                      marker="dash"))
    if groups:
        doc.legend.append(LegendEntry("dataset summary", "#666666",
                                      marker="dash"))
    _legend(doc, doc.width - 230, 70)
    return doc


def render_sdod(diag: SdOdDiagnostics) -> PlotDocument:
    """Score-distance vs orthogonal-distance outlier map with cutoffs."""
    doc = PlotDocument(PlotKind.SD_OD, "PCA outlier map")
    _title(doc, "PCA outlier map")
    sd_max = max(float(diag.sd.max()) if diag.sd.size else 0.0, diag.sd_cutoff)
    od_max = max(float(diag.od.max()) if diag.od.size else 0.0, diag.od_cutoff)
    sd_max = sd_max * 1.15 if sd_max > 0 else 1.0
    od_max = od_max * 1.15 if od_max > 0 else 1.0
    fr = Frame(x0=90, y0=60, w=doc.width - 90 - 250, h=doc.height - 60 - 90,
               xmin=0.0, xmax=sd_max, ymin=0.0, ymax=od_max)
    _axes(doc, fr, f"score distance (k={diag.components_used})",
          "orthogonal distance",
          tuple(round(sd_max * f, 2) for f in (0.0, 0.25, 0.5, 0.75, 1.0)),
          tuple(round(od_max * f, 2) for f in (0.0, 0.25, 0.5, 0.75, 1.0)))

    xcut = fr.sx(diag.sd_cutoff)
    doc.add(Line(xcut, fr.y0, xcut, fr.y0 + fr.h, stroke="#555555",
                 stroke_width=1.2, dash="6,4"))
    doc.add(Text(min(xcut + 4, doc.width - 160.0), fr.y0 + 14,
                 f"SD cutoff={diag.sd_cutoff:.3f}", size=9, fill="#555555"))
    ycut = fr.sy(diag.od_cutoff)
    doc.add(Line(fr.x0, ycut, fr.x0 + fr.w, ycut, stroke="#555555",
                 stroke_width=1.2, dash="6,4"))
    doc.add(Text(fr.x0 + 6, max(ycut - 6, 12.0),
                 f"OD cutoff={diag.od_cutoff:.3f} ({diag.mode})", size=9,
                 fill="#555555"))

    labels = diag.labels or tuple(str(i) for i in range(len(diag.sd)))
    for label, s, o, flag in zip(labels, diag.sd, diag.od, diag.flags):
        x, y = fr.sx(float(s)), fr.sy(float(o))
        doc.add(Circle(x, y, 5.0, fill=FLAG_COLORS[flag], stroke="#333333",
                       stroke_width=0.6, title=label), z=2)
        _point_label(doc, x, y, _short(label, 14))

    doc.legend = [
        LegendEntry("regular", FLAG_COLORS[OutlierFlag.REGULAR]),
        LegendEntry("good leverage", FLAG_COLORS[OutlierFlag.GOOD_LEVERAGE]),
        LegendEntry("orthogonal outlier", FLAG_COLORS[OutlierFlag.ORTHOGONAL]),
        LegendEntry("bad leverage", FLAG_COLORS[OutlierFlag.BAD_LEVERAGE]),
    ]
    _legend(doc, doc.width - 235, 70)
    return doc


def _stacked_bar_h(doc, bw_axis, x0, y0, w, h) -> None:
    acc = x0
    k = len(bw_axis.measure_ids)
    for i, mid in enumerate(bw_axis.measure_ids):
        seg_w = float(bw_axis.contributions[i]) * w
        sign_color = "#000000" if float(bw_axis.loadings[i]) >= 0 else RISK_COLOR
        doc.add(Rect(acc, y0, seg_w, h,
                     fill=block_ramp(bw_axis.block, 0.3 + 0.6 * (i + 1) / (k + 1)),
                     stroke=sign_color, stroke_width=1.4, title=mid))
        if bw_axis.contributions[i] >= 0.05:
            doc.add(Text(acc + seg_w / 2, y0 + h / 2 + 3,
                         f"{mid} {bw_axis.contributions[i] * 100:.0f}%",
                         size=8, anchor="middle"), z=1)
        acc += seg_w


def _stacked_bar_v(doc, bw_axis, x0, y0, w, h) -> None:
    acc = y0 + h
    k = len(bw_axis.measure_ids)
    for i, mid in enumerate(bw_axis.measure_ids):
        seg = float(bw_axis.contributions[i]) * h
        sign_color = "#000000" if float(bw_axis.loadings[i]) >= 0 else RISK_COLOR
        doc.add(Rect(x0, acc - seg, w, seg,
                     fill=block_ramp(bw_axis.block, 0.3 + 0.6 * (i + 1) / (k + 1)),
                     stroke=sign_color, stroke_width=1.4, title=mid))
        if bw_axis.contributions[i] >= 0.05:
            doc.add(Text(x0 + w / 2 + 3, acc - seg / 2,
                         f"{mid} {bw_axis.contributions[i] * 100:.0f}%",
                         size=8, anchor="middle", rotate=-90.0), z=1)
        acc -= seg


def render_blockwise(
    bw: BlockwisePca,
    labels: Sequence[str],
    pareto_ids: frozenset[str] = frozenset(),
    reference_labels: frozenset[str] = frozenset(),
) -> PlotDocument:
    """Utility-PC1 vs risk-PC1 scatter with contribution bars per axis."""
    doc = PlotDocument(PlotKind.BLOCKWISE_RU, "blockwise PCA map")
    _title(doc, "blockwise PCA map")
    ux = np.asarray(bw.utility.scores, dtype=float)
    ry = np.asarray(bw.risk.scores, dtype=float)

    def padded(v: np.ndarray) -> tuple[float, float]:
        lo, hi = float(v.min()), float(v.max())
        pad = (hi - lo) * 0.12 if hi > lo else 0.5
        return lo - pad, hi + pad

    xmin, xmax = padded(ux)
    ymin, ymax = padded(ry)
    fr = Frame(x0=170, y0=60, w=doc.width - 170 - 250, h=doc.height - 60 - 160,
               xmin=xmin, xmax=xmax, ymin=ymin, ymax=ymax)

    def axis_name(axis) -> str:
        if axis.fallback:
            return f"{axis.block.value} (single measure)"
        return (f"{axis.block.value} PC1 "
                f"({axis.explained_variance_ratio * 100:.1f}% of block variance)")

    _axes(doc, fr, axis_name(bw.utility), axis_name(bw.risk),
          tuple(round(xmin + (xmax - xmin) * f, 2) for f in (0.0, 0.5, 1.0)),
          tuple(round(ymin + (ymax - ymin) * f, 2) for f in (0.0, 0.5, 1.0)))

    for label, x_v, y_v in zip(labels, ux, ry):
        x, y = fr.sx(float(x_v)), fr.sy(float(y_v))
        if label in reference_labels:
            doc.add(Rect(x - 4.5, y - 4.5, 9, 9, fill=REFERENCE_COLOR,
                         title=label), z=2)
        elif label in pareto_ids:
            doc.add(Circle(x, y, 5.0, fill=PARETO_COLOR, title=label), z=2)
        else:
            doc.add(Circle(x, y, 4.0, fill=NEUTRAL_COLOR, title=label), z=2)
        _point_label(doc, x, y, _short(label, 14))

    _stacked_bar_h(doc, bw.utility, fr.x0, doc.height - 84, fr.w, 24)
    doc.add(Text(fr.x0, doc.height - 92, "utility PC1 contributions "
                 "(squared loadings, edge red = negative loading)", size=9,
                 fill="#444444"))
    _stacked_bar_v(doc, bw.risk, 66, fr.y0, 24, fr.h)
    doc.add(Text(66, fr.y0 - 8, "risk PC1", size=9, fill="#444444"))

    doc.legend = [
        LegendEntry("composite Pareto-optimal", PARETO_COLOR),
        LegendEntry("other approaches", NEUTRAL_COLOR),
        LegendEntry("reference (original)", REFERENCE_COLOR),
    ]
    _legend(doc, doc.width - 235, 70)
    return doc
