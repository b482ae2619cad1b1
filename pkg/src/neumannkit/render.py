"""SVG drawings of Neumann line complexes.

Glyphs: filled black disc for a maximum, white disc for a minimum, a cross
for a saddle.  Separatrix edges are drawn one path each; faces are tinted by
their class and sign.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np

from .critical import Kind
from .neumann_complex import FaceClass, NeumannComplex, SignPattern

SIZE = 600.0
PAD = 0.06
GLYPH = 5.0

_FILL = {
    (FaceClass.BOUNDARY, SignPattern.POSITIVE): "#f4c7b8",
    (FaceClass.BOUNDARY, SignPattern.NEGATIVE): "#b8d3f4",
    (FaceClass.INTERIOR, SignPattern.MIXED): "#e3e3e3",
}


class _Frame:
    def __init__(self, bbox):
        x0, x1, y0, y1 = bbox
        span = max(x1 - x0, y1 - y0) * (1 + 2 * PAD)
        self.scale = SIZE / span
        self.x0 = 0.5 * (x0 + x1) - 0.5 * span
        self.y1 = 0.5 * (y0 + y1) + 0.5 * span

    def xy(self, p) -> tuple[float, float]:
        return (p[0] - self.x0) * self.scale, (self.y1 - p[1]) * self.scale

    def path(self, pts, close: bool = False) -> str:
        q = [self.xy(p) for p in np.asarray(pts)]
        d = "M" + " L".join(f"{x:.3f},{y:.3f}" for x, y in q)
        return d + (" Z" if close else "")


def _glyph(parent, frame: _Frame, kind: Kind, loc):
    x, y = frame.xy(loc)
    if kind is Kind.SADDLE:
        g = ET.SubElement(parent, "path", {"class": "saddle", "stroke": "black", "stroke-width": "1.6",
                                           "d": f"M{x - GLYPH:.3f},{y - GLYPH:.3f} L{x + GLYPH:.3f},{y + GLYPH:.3f} "
                                                f"M{x - GLYPH:.3f},{y + GLYPH:.3f} L{x + GLYPH:.3f},{y - GLYPH:.3f}"})
    else:
        fill = {Kind.MAX: "black", Kind.MIN: "white"}.get(kind, "red")
        g = ET.SubElement(parent, "circle", {"class": kind.value, "cx": f"{x:.3f}", "cy": f"{y:.3f}",
                                             "r": f"{GLYPH:.1f}", "fill": fill, "stroke": "black",
                                             "stroke-width": "1.2"})
    return g


def render_complex(cx: NeumannComplex, title: str | None = None) -> str:
    spec = cx.field.domain
    frame = _Frame(spec.bbox())
    svg = ET.Element("svg", {"xmlns": "http://www.w3.org/2000/svg", "width": f"{SIZE:g}",
                             "height": f"{SIZE:g}", "viewBox": f"0 0 {SIZE:g} {SIZE:g}"})
    if title:
        ET.SubElement(svg, "title").text = title
    faces = ET.SubElement(svg, "g", {"id": "faces", "stroke": "none"})
    for f in cx.faces:
        fill = _FILL.get((f.classification, f.sign), "#ffffff")
        d = frame.path(np.asarray(f.polygon.exterior.coords), close=True)
        for ring in f.polygon.interiors:
            d += " " + frame.path(np.asarray(ring.coords), close=True)
        ET.SubElement(faces, "path", {"class": "face", "d": d, "fill": fill, "fill-rule": "evenodd"})
    bnd = ET.SubElement(svg, "g", {"id": "boundary", "fill": "none", "stroke": "black", "stroke-width": "1.5"})
    for curve in spec.curves:
        _, pts = curve.sample(2048)
        ET.SubElement(bnd, "path", {"class": "boundary", "d": frame.path(pts, close=True)})
    lines = ET.SubElement(svg, "g", {"id": "neumann-lines", "fill": "none", "stroke": "#1f3fbf",
                                     "stroke-width": "1.2"})
    for e in cx.edges:
        if e.kind == "separatrix":
            ET.SubElement(lines, "path", {"class": "separatrix", "d": frame.path(e.polyline)})
        elif e.kind == "circle":
            ET.SubElement(lines, "path", {"class": "critical-circle", "d": frame.path(e.polyline),
                                          "stroke-dasharray": "4 2"})
    glyphs = ET.SubElement(svg, "g", {"id": "critical"})
    for p in cx.crit.points:
        _glyph(glyphs, frame, p.kind, p.location)
    ET.indent(svg)
    return ET.tostring(svg, encoding="unicode") + "\n"


def save_svg(cx: NeumannComplex, path, title: str | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(render_complex(cx, title))
