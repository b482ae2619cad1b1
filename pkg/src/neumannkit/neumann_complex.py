"""Neumann line complexes: separatrices, boundary arcs and their faces.

The separatrices of all saddles, the boundary components (split at their
vertices) and any critical circles form a planar graph.  Faces are found by
half-edge traversal of the rotation system; every face of the graph that
lies in the domain is a Neumann domain.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import shapely
from shapely.ops import polylabel
from shapely.geometry import MultiLineString, Point, Polygon

from .critical import CriticalPoint, CriticalSet, Kind, find_critical_points
from .eigenfield import EigenField
from .errors import ComplexBuildError, ConsistencyError
from .flow import EPS_LAUNCH, Direction, EndKind, EndPoint, Trajectory, Tracer
from .geometry import TWO_PI
from .mfs import dihedral_group

ARC_SPACING = 0.005
CLEAR_OF_LINES = 1e-4


class FaceClass(str, enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"


class SignPattern(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    MIXED = "mixed"


@dataclass(eq=False)
class Vertex:
    id: int
    location: np.ndarray
    kind: str  # critical | landing | dummy
    point: CriticalPoint | None = None
    curve: tuple | None = None
    param: float | None = None


@dataclass(eq=False)
class Edge:
    id: int
    kind: str  # separatrix | boundary | circle
    v0: int
    v1: int
    polyline: np.ndarray
    curve: tuple | None = None
    interval: tuple[float, float] | None = None
    trajectory: Trajectory | None = None

    @property
    def length(self) -> float:
        return float(np.sum(np.linalg.norm(np.diff(self.polyline, axis=0), axis=1)))


@dataclass(eq=False)
class Face:
    id: int
    cycle: list[tuple[int, int]]  # half-edges (edge id, +1 forward / -1 reversed)
    holes: list[list[tuple[int, int]]]
    polygon: Polygon
    sample: np.ndarray
    area: float
    classification: FaceClass | None = None
    sign: SignPattern | None = None
    forward_end: EndPoint | None = None
    backward_end: EndPoint | None = None
    orbit_of: tuple[int, int] | None = None  # (representative face id, group element index)

    def to_json(self) -> dict:
        return {
            "id": self.id, "area": self.area, "sample": self.sample.tolist(),
            "classification": self.classification.value if self.classification else None,
            "sign": self.sign.value if self.sign else None,
            "boundary": [[e, d] for e, d in self.cycle], "holes": [[[e, d] for e, d in h] for h in self.holes],
        }


@dataclass(eq=False)
class NeumannComplex:
    field: EigenField
    crit: CriticalSet
    vertices: list[Vertex]
    edges: list[Edge]
    faces: list[Face]
    punctures: list[CriticalPoint]
    trajectories: list[Trajectory]
    cycles: list[list[tuple[int, int]]]
    cycle_areas: list[float]
    components: int
    discarded: list[Face] = field(default_factory=list)
    lines: object = None  # shapely geometry of N(u) without the boundary
    tracer: Tracer | None = None

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": v.id, "location": v.location.tolist(), "kind": v.kind} for v in self.vertices],
            "edges": [{"id": e.id, "kind": e.kind, "v0": e.v0, "v1": e.v1, "polyline": e.polyline.tolist()}
                      for e in self.edges],
            "faces": [f.to_json() for f in self.faces],
            "punctures": [list(p.location) for p in self.punctures],
        }


# ---------------------------------------------------------------------------
# separatrices, with reuse across symmetric images

def _match_group(fld: EigenField, src: np.ndarray, dst: np.ndarray):
    if not fld.symmetry:
        return None
    for gi, g in enumerate(dihedral_group(fld.symmetry)):
        if np.linalg.norm(g @ src - dst) < 1e-7:
            return gi, g
    return None


def _nearest_point(crit: CriticalSet, loc: np.ndarray) -> CriticalPoint:
    best = min(crit.points, key=lambda p: np.linalg.norm(p.xy - loc))
    if np.linalg.norm(best.xy - loc) > 1e-6:
        raise ComplexBuildError(f"no critical point at mapped location {loc.tolist()}")
    return best


def _map_trajectory(tr: Trajectory, g: np.ndarray, fld: EigenField, crit: CriticalSet,
                    origin: CriticalPoint) -> Trajectory:
    pts = tr.points @ g.T
    end = tr.end
    loc = np.asarray(end.location) @ g.T
    if end.kind is EndKind.CRITICAL:
        p = _nearest_point(crit, loc)
        new_end = EndPoint(EndKind.CRITICAL, p.location, point=p)
        pts[-1] = p.xy
    elif end.kind is EndKind.CIRCLE:
        new_end = EndPoint(EndKind.CIRCLE, tuple(loc), circle=end.circle, angle=math.atan2(loc[1], loc[0]))
    elif end.kind is EndKind.BOUNDARY:
        _, comp, par = fld.domain.boundary_distance(loc[None, :])
        new_end = EndPoint(EndKind.BOUNDARY, tuple(loc), component=int(comp[0]), param=float(par[0]))
    else:
        new_end = end
    pts[0] = origin.xy
    return Trajectory(tuple(g @ np.asarray(tr.start)), tr.direction, pts, tr.values.copy(), new_end,
                      tr.length, origin=origin, meta={"image_of": tr.start})


def trace_separatrices(fld: EigenField, crit: CriticalSet, tracer: Tracer,
                       eps: float = EPS_LAUNCH) -> list[Trajectory]:
    """Separatrices of every saddle; symmetric images reuse a traced representative."""
    out: list[Trajectory] = []
    done: list[tuple[CriticalPoint, list[Trajectory]]] = []
    for s in crit.points:
        if s.kind is not Kind.SADDLE:
            continue
        reused = None
        for rep, trs in done:
            m = _match_group(fld, rep.xy, s.xy)
            if m is not None:
                reused = [_map_trajectory(t, m[1], fld, crit, s) for t in trs]
                break
        if reused is None:
            reused = tracer.separatrices(s, eps)
            done.append((s, reused))
        out.extend(reused)
    return out


# ---------------------------------------------------------------------------
# graph assembly

def _curve_position(fld: EigenField, crit: CriticalSet, key, t):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if key[0] == "b":
        return fld.domain.curves[key[1]].position(t)
    c = crit.circles[key[1]]
    return np.column_stack([c.center[0] + c.radius * np.cos(t), c.center[1] + c.radius * np.sin(t)])


def _curve_length(fld, crit, key) -> float:
    if key[0] == "b":
        return fld.domain.curves[key[1]].length()
    return TWO_PI * crit.circles[key[1]].radius


def _arc(fld, crit, key, t0, t1) -> np.ndarray:
    span = (t1 - t0) % TWO_PI or TWO_PI
    count = max(4, int(math.ceil(_curve_length(fld, crit, key) * span / TWO_PI / ARC_SPACING)))
    ts = t0 + span * np.linspace(0.0, 1.0, count + 1)
    return _curve_position(fld, crit, key, np.mod(ts, TWO_PI))


def polyline_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Hausdorff distance between two polylines (vertices against segments)."""
    la, lb = shapely.LineString(a), shapely.LineString(b)
    da = shapely.distance(lb, shapely.points(a))
    db = shapely.distance(la, shapely.points(b))
    return float(max(np.max(da), np.max(db)))


def _shoelace(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


class _Builder:
    def __init__(self, fld: EigenField, crit: CriticalSet):
        self.fld, self.crit = fld, crit
        self.vertices: list[Vertex] = []
        self.edges: list[Edge] = []
        self._by_point: dict[int, int] = {}

    def vertex_for_point(self, p: CriticalPoint) -> int:
        key = id(p)
        if key not in self._by_point:
            curve = ("b", p.component) if p.on_boundary else None
            v = Vertex(len(self.vertices), p.xy.copy(), "critical", point=p, curve=curve, param=p.param)
            self.vertices.append(v)
            self._by_point[key] = v.id
        return self._by_point[key]

    def new_vertex(self, loc, kind, curve, param) -> int:
        v = Vertex(len(self.vertices), np.asarray(loc, dtype=float), kind, curve=curve, param=param)
        self.vertices.append(v)
        return v.id

    def add_edge(self, kind, v0, v1, poly, **kw) -> int:
        e = Edge(len(self.edges), kind, v0, v1, np.asarray(poly, dtype=float), **kw)
        self.edges.append(e)
        return e.id


def _dedupe_saddle_links(trs: list[Trajectory]) -> list[Trajectory]:
    """Drop the second copy of saddle-to-saddle connections (traced from both ends)."""
    out = []
    for t in trs:
        if t.end.kind is EndKind.CRITICAL and t.end.point.kind is Kind.SADDLE:
            twin = [o for o in out if o.end.kind is EndKind.CRITICAL and o.origin is t.end.point
                    and o.end.point is t.origin]
            if twin and polyline_hausdorff(t.points, twin[0].points) < 1e-4:
                continue
        out.append(t)
    return out


def _rotation(builder: _Builder):
    """Outgoing half-edges at each vertex sorted counterclockwise by departure angle."""
    verts, edges = builder.vertices, builder.edges
    locs = np.array([v.location for v in verts])
    out: dict[int, list[tuple[float, tuple[int, int]]]] = {v.id: [] for v in verts}
    for e in edges:
        for d, vid, poly in ((1, e.v0, e.polyline), (-1, e.v1, e.polyline[::-1])):
            others = np.delete(locs, vid, axis=0)
            near = float(np.min(np.linalg.norm(others - locs[vid], axis=1))) if len(others) else 1.0
            radius = min(0.02, 0.25 * near)
            dist = np.linalg.norm(poly - locs[vid], axis=1)
            far = np.nonzero(dist >= radius)[0]
            q = poly[far[0]] if len(far) else poly[-1]
            ang = math.atan2(q[1] - locs[vid][1], q[0] - locs[vid][0])
            out[vid].append((ang, (e.id, d)))
    for vid, lst in out.items():
        lst.sort()
        angs = [a for a, _ in lst]
        for a, b in zip(angs, angs[1:] + [angs[0] + TWO_PI] if angs else []):
            if len(angs) > 1 and abs(b - a) < 1e-10:
                raise ComplexBuildError(f"edges leave vertex {vid} at {locs[vid].tolist()} with tied angles")
    return {vid: [h for _, h in lst] for vid, lst in out.items()}


def _half_edge_ends(e: Edge, d: int) -> tuple[int, int]:
    return (e.v0, e.v1) if d > 0 else (e.v1, e.v0)


def _cycles(builder: _Builder, rot):
    edges = builder.edges
    seen: set[tuple[int, int]] = set()
    cycles = []
    for e in edges:
        for d in (1, -1):
            if (e.id, d) in seen:
                continue
            cyc = []
            h = (e.id, d)
            while h not in seen:
                seen.add(h)
                cyc.append(h)
                _, head = _half_edge_ends(edges[h[0]], h[1])
                twin = (h[0], -h[1])
                lst = rot[head]
                i = lst.index(twin)
                h = lst[(i - 1) % len(lst)]
            cycles.append(cyc)
    return cycles


def _cycle_polygon(builder: _Builder, cyc) -> np.ndarray:
    parts = []
    for eid, d in cyc:
        poly = builder.edges[eid].polyline
        parts.append((poly if d > 0 else poly[::-1])[:-1])
    return np.concatenate(parts)


def _components(builder: _Builder) -> list[int]:
    parent = list(range(len(builder.vertices)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in builder.edges:
        parent[find(e.v0)] = find(e.v1)
    return [find(v.id) for v in builder.vertices]


def build(fld: EigenField, crit: CriticalSet | None = None, tracer: Tracer | None = None,
          eps: float = EPS_LAUNCH) -> NeumannComplex:
    """Assemble the Neumann complex of ``fld`` and enumerate its faces."""
    spec = fld.domain
    if crit is None:
        crit = find_critical_points(fld)
    bad = [p for p in crit.points if p.kind is Kind.DEGENERATE]
    if bad:
        raise ComplexBuildError(f"degenerate critical points {[p.location for p in bad]}; "
                                "separatrix structure is not resolved")
    tracer = tracer or Tracer(fld, crit)
    trs = _dedupe_saddle_links(trace_separatrices(fld, crit, tracer, eps))
    for t in trs:
        if not t.end.resolved:
            raise ComplexBuildError(f"separatrix from {t.origin.location} unresolved: {t.end.reason}")

    b = _Builder(fld, crit)
    on_curve: dict[tuple, list[tuple[float, int]]] = {("b", c.component_id): [] for c in spec.curves}
    for i in range(len(crit.circles)):
        on_curve[("c", i)] = []
    for p in crit.points:
        if p.on_boundary:
            on_curve[("b", p.component)].append((p.param, b.vertex_for_point(p)))
    for t in trs:
        v0 = b.vertex_for_point(t.origin)
        poly = t.points.copy()
        end = t.end
        if end.kind is EndKind.CRITICAL:
            v1 = b.vertex_for_point(end.point)
        elif end.kind is EndKind.BOUNDARY:
            key = ("b", end.component)
            loc = _curve_position(fld, crit, key, end.param)[0]
            v1 = b.new_vertex(loc, "landing", key, end.param)
            on_curve[key].append((end.param, v1))
            poly[-1] = loc
        else:
            key = ("c", crit.circles.index(end.circle))
            ang = end.angle % TWO_PI
            loc = _curve_position(fld, crit, key, ang)[0]
            v1 = b.new_vertex(loc, "landing", key, ang)
            on_curve[key].append((ang, v1))
            poly[-1] = loc
        b.add_edge("separatrix", v0, v1, poly, trajectory=t)
    for key, lst in on_curve.items():
        if not lst:
            v = b.new_vertex(_curve_position(fld, crit, key, 0.0)[0], "dummy", key, 0.0)
            lst.append((0.0, v))
        lst.sort()
        kind = "boundary" if key[0] == "b" else "circle"
        for i, (t0, v0) in enumerate(lst):
            t1, v1 = lst[(i + 1) % len(lst)]
            poly = _arc(fld, crit, key, t0, t1)
            poly[0], poly[-1] = b.vertices[v0].location, b.vertices[v1].location
            b.add_edge(kind, v0, v1, poly, curve=key, interval=(t0, t1))

    rot = _rotation(b)
    cycles = _cycles(b, rot)
    polys = [_cycle_polygon(b, c) for c in cycles]
    areas = [_shoelace(p) for p in polys]
    comp_of_vertex = _components(b)
    comp_of_cycle = [comp_of_vertex[b.edges[c[0][0]].v0] for c in cycles]
    n_comp = len(set(comp_of_vertex))

    pos = [i for i, a in enumerate(areas) if a > 0]
    neg = [i for i, a in enumerate(areas) if a <= 0]
    shells = {i: Polygon(polys[i]).buffer(0) for i in pos}
    holes_of: dict[int, list[int]] = {i: [] for i in pos}
    for j in neg:
        probe = Point(polys[j][0])
        best = None
        for i in pos:
            if comp_of_cycle[i] == comp_of_cycle[j]:
                continue
            if shells[i].contains(probe) and (best is None or areas[i] < areas[best]):
                best = i
        if best is not None:
            holes_of[best].append(j)

    edge_lines = [e.polyline for e in b.edges if e.kind != "boundary"]
    lines = MultiLineString([ln for ln in edge_lines if len(ln) > 1]) if edge_lines else None
    all_lines = MultiLineString([e.polyline for e in b.edges])
    faces, discarded = [], []
    for i in pos:
        poly = shells[i]
        for j in holes_of[i]:
            poly = poly.difference(Polygon(polys[j]).buffer(0))
        sample = _sample_point(poly, all_lines)
        f = Face(len(faces), cycles[i], [cycles[j] for j in holes_of[i]], poly, sample, float(poly.area))
        inside = spec.level(sample[None, :])[0][0] > 0
        if inside:
            faces.append(f)
        else:
            discarded.append(f)
    for k, f in enumerate(faces):
        f.id = k
    used = {id(b.vertices[e.v0].point) for e in b.edges} | {id(b.vertices[e.v1].point) for e in b.edges}
    punctures = [p for p in crit.points if id(p) not in used]
    return NeumannComplex(fld, crit, b.vertices, b.edges, faces, punctures, trs, cycles, areas, n_comp,
                          discarded, lines, tracer)


def _sample_point(poly, lines, tries: int = 400, seed: int = 0) -> np.ndarray:
    """A point of ``poly`` far from the graph: the pole of inaccessibility or a random best."""
    if poly.is_empty:
        return np.array([np.nan, np.nan])
    parts = list(poly.geoms) if hasattr(poly, "geoms") else [poly]
    part = max(parts, key=lambda g: g.area)
    cand = [np.array(polylabel(part, tolerance=1e-4).coords[0])]
    rng = np.random.default_rng(seed)
    x0, y0, x1, y1 = part.bounds
    pts = rng.uniform([x0, y0], [x1, y1], size=(tries, 2))
    inside = shapely.contains_xy(part, pts[:, 0], pts[:, 1])
    cand.extend(pts[inside])
    dist = [lines.distance(Point(c)) for c in cand]
    return cand[int(np.argmax(dist))]


# ---------------------------------------------------------------------------
# sampling inside faces

def face_samples(cx: NeumannComplex, face: Face, count: int, seed: int = 0) -> np.ndarray:
    """Random points of ``face`` at least ``CLEAR_OF_LINES`` away from N(u) and the boundary."""
    rng = np.random.default_rng(seed + 7919 * face.id)
    poly = face.polygon
    x0, y0, x1, y1 = poly.bounds
    out = []
    spec = cx.field.domain
    for _ in range(200):
        pts = rng.uniform([x0, y0], [x1, y1], size=(max(4 * count, 64), 2))
        ok = shapely.contains_xy(poly, pts[:, 0], pts[:, 1])
        pts = pts[ok]
        if len(pts) == 0:
            continue
        pts = pts[spec.clearance(pts) > CLEAR_OF_LINES]
        if cx.lines is not None and len(pts):
            d = shapely.distance(cx.lines, shapely.points(pts))
            pts = pts[d > CLEAR_OF_LINES]
        out.extend(pts)
        if len(out) >= count:
            break
    return np.array(out[:count]).reshape(-1, 2)


def _orbit_source(cx: NeumannComplex, face: Face, done: list[Face]):
    fld = cx.field
    if not fld.symmetry:
        return None
    group = dihedral_group(fld.symmetry)
    for gi, g in enumerate(group):
        back = g.T @ face.sample  # g is orthogonal
        for f in done:
            if f.orbit_of is None and f.polygon.contains(Point(back)):
                return f, gi
    return None


def _map_end(cx: NeumannComplex, end: EndPoint, g: np.ndarray) -> EndPoint:
    if end.kind is EndKind.CRITICAL:
        p = _nearest_point(cx.crit, g @ end.point.xy)
        return EndPoint(EndKind.CRITICAL, p.location, point=p)
    loc = g @ np.asarray(end.location)
    if end.kind is EndKind.BOUNDARY:
        _, comp, par = cx.field.domain.boundary_distance(loc[None, :])
        return EndPoint(EndKind.BOUNDARY, tuple(loc), component=int(comp[0]), param=float(par[0]))
    if end.kind is EndKind.CIRCLE:
        return EndPoint(EndKind.CIRCLE, tuple(loc), circle=end.circle, angle=math.atan2(loc[1], loc[0]))
    return end


def _sign_pattern(cx: NeumannComplex, face: Face, count: int = 100) -> SignPattern:
    pts = face_samples(cx, face, count)
    vals = cx.field.value(pts)
    if np.all(vals > 0):
        return SignPattern.POSITIVE
    if np.all(vals < 0):
        return SignPattern.NEGATIVE
    return SignPattern.MIXED


def classify_faces(cx: NeumannComplex) -> None:
    """Boundary or interior type for every face, with the sign cross-check.

    A face is a boundary Neumann domain when the flow from its sample point
    reaches the boundary in either time direction.
    """
    done: list[Face] = []
    group = dihedral_group(cx.field.symmetry) if cx.field.symmetry else None
    for f in cx.faces:
        src = _orbit_source(cx, f, done)
        if src is not None:
            rep, gi = src
            f.orbit_of = (rep.id, gi)
            f.forward_end = _map_end(cx, rep.forward_end, group[gi])
            f.backward_end = _map_end(cx, rep.backward_end, group[gi])
            f.classification, f.sign = rep.classification, rep.sign
            done.append(f)
            continue
        fwd = cx.tracer.trace(f.sample, Direction.FORWARD)
        bwd = cx.tracer.trace(f.sample, Direction.BACKWARD)
        for t in (fwd, bwd):
            if not t.end.resolved:
                raise ComplexBuildError(f"face {f.id}: trace from {f.sample.tolist()} unresolved ({t.end.reason})")
        f.forward_end, f.backward_end = fwd.end, bwd.end
        hits = EndKind.BOUNDARY in (fwd.end.kind, bwd.end.kind)
        f.classification = FaceClass.BOUNDARY if hits else FaceClass.INTERIOR
        f.sign = _sign_pattern(cx, f)
        if f.classification is FaceClass.BOUNDARY and f.sign is SignPattern.MIXED:
            raise ConsistencyError(f"boundary Neumann domain {f.id} changes sign")
        done.append(f)


@dataclass(frozen=True)
class NeumannCount:
    total: int
    interior: int
    boundary: int
    punctures: int


def count_neumann_domains(cx: NeumannComplex) -> NeumannCount:
    if any(f.classification is None for f in cx.faces):
        classify_faces(cx)
    nb = sum(1 for f in cx.faces if f.classification is FaceClass.BOUNDARY)
    return NeumannCount(len(cx.faces), len(cx.faces) - nb, nb, len(cx.punctures))


# ---------------------------------------------------------------------------
# audits

@dataclass(frozen=True)
class EulerReport:
    vertices: int
    edges: int
    faces: int  # including the unbounded face
    components: int
    outer_cycles: int
    passed: bool

    def to_json(self) -> dict:
        return dict(vertices=self.vertices, edges=self.edges, faces=self.faces,
                    components=self.components, outer_cycles=self.outer_cycles, passed=self.passed)


def euler_audit(cx: NeumannComplex) -> EulerReport:
    """``V - E + F = 1 + C`` with the unbounded face counted once."""
    v, e = len(cx.vertices), len(cx.edges)
    bounded = sum(1 for a in cx.cycle_areas if a > 0)
    outer = sum(1 for a in cx.cycle_areas if a <= 0)
    f = bounded + 1
    ok = (v - e + f == 1 + cx.components) and outer == cx.components
    return EulerReport(v, e, f, cx.components, outer, bool(ok))


def area_audit(cx: NeumannComplex) -> tuple[float, float]:
    """(sum of face areas, domain area)."""
    return float(sum(f.area for f in cx.faces)), float(cx.field.domain.area())


def crossing_audit(cx: NeumannComplex, gap: float = 1e-6, trim: float = 1e-3) -> dict:
    """Separatrix edges must not cross.

    Edges without a common vertex must stay ``gap`` apart.  Edges sharing a
    vertex may approach each other tangentially there (integral curves
    entering an extremum along its slow eigendirection), so for them only
    an actual intersection away from the ``trim`` neighbourhood of their
    endpoints counts.
    """
    seps = [e for e in cx.edges if e.kind == "separatrix"]
    geoms = []
    for e in seps:
        keep = np.ones(len(e.polyline), dtype=bool)
        for vid in (e.v0, e.v1):
            keep &= np.linalg.norm(e.polyline - cx.vertices[vid].location, axis=1) > trim
        pts = e.polyline[keep]
        geoms.append(shapely.LineString(pts) if len(pts) > 1 else None)
    closest = math.inf
    bad = []
    for i in range(len(seps)):
        for j in range(i + 1, len(seps)):
            if geoms[i] is None or geoms[j] is None:
                continue
            shared = {seps[i].v0, seps[i].v1} & {seps[j].v0, seps[j].v1}
            if shared:
                if geoms[i].intersects(geoms[j]):
                    bad.append((seps[i].id, seps[j].id))
                continue
            d = geoms[i].distance(geoms[j])
            closest = min(closest, d)
            if d <= gap:
                bad.append((seps[i].id, seps[j].id))
    return {"passed": not bad, "violations": bad, "min_gap_disjoint": closest}


def left_end_check(cx: NeumannComplex, samples: int = 25) -> list[dict]:
    """Per face: the maxima (or max circles) reached by left ends of random samples.

    Faces that are symmetric images of an earlier face inherit its result.
    """
    out = []
    by_id: dict[int, dict] = {}
    for f in cx.faces:
        if f.orbit_of is not None and f.orbit_of[0] in by_id:
            res = dict(by_id[f.orbit_of[0]], face=f.id, image_of=f.orbit_of[0])
            out.append(res)
            continue
        pts = face_samples(cx, f, samples, seed=1)
        targets = set()
        unresolved = 0
        minima = 0
        for x in pts:
            end = cx.tracer.trace(x, Direction.BACKWARD).end
            if end.kind is EndKind.CRITICAL and end.point.kind is Kind.MAX:
                targets.add(("point", end.point.location))
            elif end.kind is EndKind.CIRCLE:
                targets.add(("circle", end.circle.radius))
            elif end.kind is EndKind.CRITICAL and end.point.kind is Kind.MIN:
                minima += 1
            elif not end.resolved:
                unresolved += 1
        res = {"face": f.id, "samples": int(len(pts)), "targets": sorted(targets, key=str),
               "minima": minima, "unresolved": unresolved,
               "passed": len(targets) <= 1 and minima == 0 and unresolved == 0}
        by_id[f.id] = res
        out.append(res)
    return out


def launch_robustness(cx: NeumannComplex, factor: float = 4.0) -> dict:
    """Retrace representative separatrices with ``eps / factor`` and compare."""
    worst = 0.0
    same = True
    checked = 0
    reps = [t for t in cx.trajectories if "image_of" not in t.meta]
    for t in reps:
        if t.origin is None:
            continue
        launch = np.asarray(t.start) - t.origin.xy
        x = t.origin.xy + launch / factor
        new = cx.tracer.trace(x, t.direction, origin=t.origin)
        checked += 1
        same &= new.end.same_as(t.end)
        if new.end.kind is EndKind.BOUNDARY and t.end.kind is EndKind.BOUNDARY:
            same &= bool(np.linalg.norm(np.subtract(new.end.location, t.end.location)) < 1e-4)
        worst = max(worst, polyline_hausdorff(new.points, t.points))
    return {"checked": checked, "ends_identical": bool(same), "hausdorff": worst,
            "passed": bool(same and worst < 1e-4)}
