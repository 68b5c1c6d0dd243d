"""Deterministic stroke-only SVG output for packings, patches, and designs.

Coordinates are written with six fixed decimals and elements in a fixed
layer-then-id order, so the same scene always serializes to the same bytes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EmptyScene
from .packing import Packing
from .patch import Patch
from .motif import Design

CIRCLES = "circles"
PATCH = "patch"
MOTIF = "motif"
ROSETTE_LABELS = "rosette-labels"

_DEFAULT_PALETTE = {
    "circle": "#b9c4ce",
    "cyclic": "#c9b998",
    "filler": "#d8c8a8",
    "gadget_pentagon": "#c4a7a0",
    "barrel_hexagon": "#ad9fc4",
    "motif": "#1c1c24",
    "label": "#7a6a4f",
}


@dataclass(frozen=True)
class StyleConfig:
    stroke_width: float = 0.03
    palette: dict = field(default_factory=dict)
    layers: frozenset = frozenset({MOTIF})
    margin: float = 0.5
    background: str = None

    def __post_init__(self):
        if self.stroke_width <= 0.0:
            raise ValueError("stroke_width must be positive")
        if self.margin < 0.0:
            raise ValueError("margin must be non-negative")
        merged = dict(_DEFAULT_PALETTE)
        merged.update(self.palette)
        object.__setattr__(self, "palette", merged)
        object.__setattr__(self, "layers", frozenset(self.layers))
        unknown = self.layers - {CIRCLES, PATCH, MOTIF, ROSETTE_LABELS}
        if unknown:
            raise ValueError(f"unknown layers {sorted(unknown)}")


@dataclass
class Scene:
    """What to draw; any subset of the three pipeline artifacts."""

    packing: Packing = None
    patch: Patch = None
    design: Design = None


def _f(v):
    r = round(float(v), 6)
    if r == 0.0:
        r = 0.0
    return f"{r:.6f}"


def _scene_of(obj):
    if isinstance(obj, Scene):
        return obj
    if isinstance(obj, Packing):
        return Scene(packing=obj)
    if isinstance(obj, Patch):
        return Scene(patch=obj)
    if isinstance(obj, Design):
        return Scene(design=obj)
    raise TypeError(f"cannot render {type(obj).__name__}")


def emit_svg(scene, style: StyleConfig = StyleConfig()) -> bytes:
    """Serialize the scene to SVG 1.1; byte-stable for identical input."""
    scene = _scene_of(scene)
    layers = style.layers
    xs, ys = [], []
    body = []

    if CIRCLES in layers and scene.packing is not None:
        rows = []
        for v in scene.packing.ids():
            (cx, cy), r = scene.packing.circles[v]
            xs.extend((cx - r, cx + r))
            ys.extend((cy - r, cy + r))
            rows.append(f'  <circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r)}" '
                        f'fill="none" stroke="{style.palette["circle"]}" '
                        f'stroke-width="{_f(style.stroke_width)}"/>')
        if rows:
            body.append('  <g id="circles">')
            body.extend("  " + row for row in rows)
            body.append("  </g>")

    if PATCH in layers and scene.patch is not None:
        rows = []
        for pid in sorted(scene.patch.polygons):
            poly = scene.patch.polygons[pid]
            for x, y in poly.points:
                xs.append(x)
                ys.append(y)
            pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in poly.points)
            color = style.palette.get(poly.role, style.palette["filler"])
            rows.append(f'  <polygon points="{pts}" fill="none" '
                        f'stroke="{color}" '
                        f'stroke-width="{_f(style.stroke_width)}"/>')
        if rows:
            body.append('  <g id="patch">')
            body.extend("  " + row for row in rows)
            body.append("  </g>")

    if MOTIF in layers and scene.design is not None:
        rows = []
        for pid in sorted(scene.design.motifs):
            for (x1, y1), (x2, y2) in scene.design.motifs[pid]:
                xs.extend((x1, x2))
                ys.extend((y1, y2))
                rows.append(f'  <line x1="{_f(x1)}" y1="{_f(y1)}" '
                            f'x2="{_f(x2)}" y2="{_f(y2)}" '
                            f'stroke="{style.palette["motif"]}" '
                            f'stroke-width="{_f(style.stroke_width)}" '
                            f'stroke-linecap="round"/>')
        if rows:
            body.append('  <g id="motif">')
            body.extend("  " + row for row in rows)
            body.append("  </g>")

    if ROSETTE_LABELS in layers and scene.design is not None:
        rows = []
        for v in sorted(scene.design.rosettes):
            rec = scene.design.rosettes[v]
            cx, cy = rec["center"]
            xs.append(cx)
            ys.append(cy)
            rows.append(f'  <text x="{_f(cx)}" y="{_f(cy)}" '
                        f'font-size="{_f(10 * style.stroke_width)}" '
                        f'text-anchor="middle" '
                        f'fill="{style.palette["label"]}">{rec["order"]}</text>')
        if rows:
            body.append('  <g id="rosette-labels">')
            body.extend("  " + row for row in rows)
            body.append("  </g>")

    if not xs:
        raise EmptyScene("nothing to render for the requested layers")

    m = style.margin
    x0, y0 = min(xs) - m, min(ys) - m
    w, h = max(xs) - min(xs) + 2 * m, max(ys) - min(ys) + 2 * m
    head = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{_f(x0)} {_f(y0)} {_f(w)} {_f(h)}">',
    ]
    if style.background is not None:
        head.append(f'  <rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(w)}" '
                    f'height="{_f(h)}" fill="{style.background}"/>')
    doc = "\n".join(head + body + ["</svg>"]) + "\n"
    return doc.encode("utf-8")
