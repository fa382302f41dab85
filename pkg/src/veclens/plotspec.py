"""Renderer-independent chart descriptions plus canonical JSON and SVG output.

Charts here are data, not widgets: a PlotSpec or HeatmapSpec can be shipped
to any frontend as canonical JSON, or rendered to a static SVG for
publication.  Canonical JSON is byte-stable: sorted keys, no insignificant
whitespace, shortest round-trip float repr.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import algebra
from .errors import VecLensError
from .retrieval import DistanceMatrix
from .store import EmbeddingSet, VectorStore

__all__ = [
    "PlotPoint",
    "PlotSpec",
    "HeatmapSpec",
    "scatter_projection",
    "arrow_plot",
    "heatmap",
    "emit_json",
    "parse_json",
    "render_svg",
]


@dataclass(frozen=True)
class PlotPoint:
    name: str
    x: float
    y: float
    group: str | None = None


@dataclass(frozen=True)
class PlotSpec:
    kind: str  # "scatter" | "arrows"
    points: tuple
    x_label: str = ""
    y_label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        names = [p.name for p in self.points]
        if len(set(names)) != len(names):
            raise VecLensError("plot point names must be unique")
        for p in self.points:
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise VecLensError(f"non-finite coordinate for point {p.name!r}")


@dataclass(frozen=True)
class HeatmapSpec:
    labels: tuple
    values: np.ndarray
    metric: str

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        vals = np.asarray(self.values, dtype=np.float64)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def _axis_label(emb) -> str:
    return emb.derivation or emb.name


def scatter_projection(
    emb_set: EmbeddingSet,
    x_axis: str,
    y_axis: str,
    store: VectorStore,
    show_axis_point: bool = False,
) -> PlotSpec:
    """Project every member onto two axis expressions.

    Coordinates are projection coefficients v(m -> axis); an axis plotted
    against itself lands at 1.  With `show_axis_point` the axis embeddings
    are appended as points of their own.
    """
    ex = algebra.evaluate(algebra.parse(x_axis), store)
    ey = algebra.evaluate(algebra.parse(y_axis), store)
    points = [
        PlotPoint(
            emb.name,
            algebra.projection_coefficient(emb, ex),
            algebra.projection_coefficient(emb, ey),
        )
        for emb in emb_set
    ]
    if show_axis_point:
        existing = {p.name for p in points}
        for axis_emb in (ex, ey):
            if axis_emb.name in existing:
                continue
            existing.add(axis_emb.name)
            points.append(
                PlotPoint(
                    axis_emb.name,
                    algebra.projection_coefficient(axis_emb, ex),
                    algebra.projection_coefficient(axis_emb, ey),
                    group="axis",
                )
            )
    return PlotSpec("scatter", points, _axis_label(ex), _axis_label(ey))


def arrow_plot(emb_set: EmbeddingSet) -> PlotSpec:
    """Origin-anchored arrows for a 2-dimensional set; points are the tips."""
    if len(emb_set) and emb_set.dim != 2:
        raise VecLensError(
            f"arrow plots need dim 2, got dim {emb_set.dim}; reduce with pca/mds first"
        )
    points = [
        PlotPoint(emb.name, float(emb.vector[0]), float(emb.vector[1]))
        for emb in emb_set
    ]
    return PlotSpec("arrows", points, "dim_0", "dim_1")


def heatmap(matrix: DistanceMatrix) -> HeatmapSpec:
    return HeatmapSpec(matrix.labels, matrix.values, matrix.metric)


def _spec_dict(spec):
    if isinstance(spec, HeatmapSpec):
        return {
            "kind": "heatmap",
            "labels": list(spec.labels),
            "values": [[float(v) for v in row] for row in spec.values],
            "metric": spec.metric,
        }
    points = []
    for p in spec.points:
        d = {"name": p.name, "x": float(p.x), "y": float(p.y)}
        if p.group is not None:
            d["group"] = p.group
        points.append(d)
    return {
        "kind": spec.kind,
        "points": points,
        "x_label": spec.x_label,
        "y_label": spec.y_label,
    }


def canonical_json(obj) -> str:
    """Deterministic JSON text: sorted keys, compact separators."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def emit_json(spec) -> str:
    return canonical_json(_spec_dict(spec))


def parse_json(text: str):
    """Inverse of emit_json; returns a PlotSpec or HeatmapSpec."""
    data = json.loads(text)
    if data["kind"] == "heatmap":
        return HeatmapSpec(data["labels"], np.array(data["values"]), data["metric"])
    points = [
        PlotPoint(p["name"], p["x"], p["y"], p.get("group"))
        for p in data["points"]
    ]
    return PlotSpec(data["kind"], points, data["x_label"], data["y_label"])


# ---------------------------------------------------------------------------
# SVG rendering


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


def _data_range(values, pad_frac=0.05):
    lo, hi = min(values), max(values)
    if hi == lo:
        return lo - 0.5, hi + 0.5
    pad = (hi - lo) * pad_frac
    return lo - pad, hi + pad


class _LinearScale:
    def __init__(self, lo, hi, out_lo, out_hi):
        self.lo = lo
        self.hi = hi
        self.out_lo = out_lo
        self.out_hi = out_hi

    def __call__(self, v):
        t = (v - self.lo) / (self.hi - self.lo)
        return self.out_lo + t * (self.out_hi - self.out_lo)


_MARGIN = 50


def _svg_header(width, height, parts):
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">'
    )


def _axes(parts, width, height, x_label, y_label):
    parts.append(
        f'<line x1="{_MARGIN}" y1="{height - _MARGIN}" x2="{width - _MARGIN}" '
        f'y2="{height - _MARGIN}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" '
        f'y2="{height - _MARGIN}" stroke="black"/>'
    )
    parts.append(
        f'<text x="{width / 2:.1f}" y="{height - 10}" text-anchor="middle" '
        f'font-size="12">{_escape(x_label)}</text>'
    )
    parts.append(
        f'<text x="15" y="{height / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 15 {height / 2:.1f})">{_escape(y_label)}</text>'
    )


def _render_points(spec, width, height, x_range=None, y_range=None):
    parts = []
    _svg_header(width, height, parts)
    _axes(parts, width, height, spec.x_label, spec.y_label)
    xs = [p.x for p in spec.points]
    ys = [p.y for p in spec.points]
    if spec.kind == "arrows":
        xs = xs + [0.0]
        ys = ys + [0.0]
    if not xs:
        parts.append("</svg>")
        return "\n".join(parts) + "\n"
    x_lo, x_hi = x_range if x_range else _data_range(xs)
    y_lo, y_hi = y_range if y_range else _data_range(ys)
    sx = _LinearScale(x_lo, x_hi, _MARGIN, width - _MARGIN)
    sy = _LinearScale(y_lo, y_hi, height - _MARGIN, _MARGIN)
    if spec.kind == "arrows":
        parts.append(
            '<defs><marker id="tip" markerWidth="8" markerHeight="8" refX="6" '
            'refY="3" orient="auto"><path d="M0,0 L6,3 L0,6 z" fill="black"/>'
            "</marker></defs>"
        )
        ox, oy = sx(0.0), sy(0.0)
        for p in spec.points:
            tx, ty = sx(p.x), sy(p.y)
            parts.append(
                f'<line x1="{ox:.2f}" y1="{oy:.2f}" x2="{tx:.2f}" y2="{ty:.2f}" '
                f'stroke="black" marker-end="url(#tip)"/>'
            )
            parts.append(
                f'<text x="{tx + 4:.2f}" y="{ty - 4:.2f}" font-size="11">'
                f"{_escape(p.name)}</text>"
            )
    else:
        for p in spec.points:
            cx, cy = sx(p.x), sy(p.y)
            fill = "gray" if p.group == "axis" else "steelblue"
            parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="3" fill="{fill}"/>')
            parts.append(
                f'<text x="{cx + 4:.2f}" y="{cy - 4:.2f}" font-size="11">'
                f"{_escape(p.name)}</text>"
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _render_heatmap(spec, width, height):
    parts = []
    _svg_header(width, height, parts)
    n = len(spec.labels)
    cell_w = (width - 2 * _MARGIN) / n
    cell_h = (height - 2 * _MARGIN) / n
    flat = [float(v) for row in spec.values for v in row]
    lo, hi = min(flat), max(flat)
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    for i in range(n):
        for j in range(n):
            v = float(spec.values[i][j])
            t = (v - lo) / (hi - lo)
            shade = int(round(255 * (1 - t)))
            x = _MARGIN + j * cell_w
            y = _MARGIN + i * cell_h
            text_fill = "black" if shade > 128 else "white"
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{cell_w:.2f}" '
                f'height="{cell_h:.2f}" fill="rgb({shade},{shade},{shade})"/>'
            )
            parts.append(
                f'<text x="{x + cell_w / 2:.2f}" y="{y + cell_h / 2 + 4:.2f}" '
                f'text-anchor="middle" font-size="10" fill="{text_fill}">{v:.3f}</text>'
            )
    for i, label in enumerate(spec.labels):
        parts.append(
            f'<text x="{_MARGIN - 6:.2f}" y="{_MARGIN + i * cell_h + cell_h / 2 + 4:.2f}" '
            f'text-anchor="end" font-size="10">{_escape(label)}</text>'
        )
        x = _MARGIN + i * cell_w + cell_w / 2
        parts.append(
            f'<text x="{x:.2f}" y="{_MARGIN - 6:.2f}" text-anchor="middle" '
            f'font-size="10">{_escape(label)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_svg(spec, width_px: int = 640, height_px: int = 480, x_range=None, y_range=None) -> str:
    """Render a spec to standalone SVG 1.1 text; output is deterministic."""
    if width_px <= 0 or height_px <= 0:
        raise ValueError("width and height must be positive")
    if isinstance(spec, HeatmapSpec):
        return _render_heatmap(spec, width_px, height_px)
    return _render_points(spec, width_px, height_px, x_range, y_range)
