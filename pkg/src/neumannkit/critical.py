"""Critical points and rotationally symmetric critical circles of eigenfields."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .eigenfield import EigenField
from .errors import ConsistencyError, PreconditionError, ResolutionError
from .geometry import TWO_PI
from .mfs import dihedral_group

TOL_G = 1e-9
TOL_SING = 1e-6
DEGENERACY = 1e-6
MERGE_RADIUS = 1e-6
BOUNDARY_SAMPLES = 4096
WINDING_SAMPLES = 720


class Kind(str, enum.Enum):
    MAX = "max"
    MIN = "min"
    SADDLE = "saddle"
    DEGENERATE = "degenerate"


class CircleKind(str, enum.Enum):
    MAX_CURVE = "max_curve"
    MIN_CURVE = "min_curve"
    DEGENERATE = "degenerate"


@dataclass(frozen=True, eq=False)
class CriticalPoint:
    location: tuple[float, float]
    value: float
    kind: Kind
    on_boundary: bool
    eigvals: tuple[float, float]
    eigvecs: np.ndarray  # columns are unit eigenvectors, ascending eigenvalues
    winding_index: int
    multiplicity: int
    is_singular: bool
    component: int | None = None
    param: float | None = None

    @property
    def xy(self) -> np.ndarray:
        return np.asarray(self.location, dtype=float)

    def to_json(self) -> dict:
        return {
            "location": list(self.location), "value": self.value, "kind": self.kind.value,
            "on_boundary": self.on_boundary, "hessian_eigenvalues": list(self.eigvals),
            "hessian_eigenvectors": self.eigvecs.T.tolist(), "winding_index": self.winding_index,
            "multiplicity": self.multiplicity, "is_singular": self.is_singular,
            "component": self.component, "param": self.param,
        }


@dataclass(frozen=True)
class CriticalCircle:
    radius: float
    value: float
    kind: CircleKind
    center: tuple[float, float] = (0.0, 0.0)

    def point(self, angle: float) -> np.ndarray:
        return np.array(self.center) + self.radius * np.array([math.cos(angle), math.sin(angle)])

    def to_json(self) -> dict:
        return {"center": list(self.center), "radius": self.radius, "value": self.value, "kind": self.kind.value}


@dataclass(frozen=True)
class CriticalSet:
    points: tuple[CriticalPoint, ...]
    circles: tuple[CriticalCircle, ...]
    grad_scale: float

    def of_kind(self, kind: Kind) -> list[CriticalPoint]:
        return [p for p in self.points if p.kind is kind]


# ---------------------------------------------------------------------------
# classification helpers

def classify_hessian(h: np.ndarray) -> tuple[Kind, np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(h)
    norm = float(np.linalg.norm(h))
    if abs(np.linalg.det(h)) < DEGENERACY * norm ** 2 or norm == 0.0:
        return Kind.DEGENERATE, w, v
    if w[1] < 0:
        return Kind.MAX, w, v
    if w[0] > 0:
        return Kind.MIN, w, v
    return Kind.SADDLE, w, v


def _winding(vec: np.ndarray) -> tuple[int, float]:
    ang = np.arctan2(vec[:, 1], vec[:, 0])
    d = np.diff(np.concatenate([ang, ang[:1]]))
    d = (d + math.pi) % TWO_PI - math.pi
    return int(round(d.sum() / TWO_PI)), float(np.max(np.abs(d)))


def _circle_vectors(fld: EigenField, pt, rho: float) -> np.ndarray:
    s = np.linspace(0.0, TWO_PI, WINDING_SAMPLES, endpoint=False)
    ring = np.asarray(pt, dtype=float) + rho * np.column_stack([np.cos(s), np.sin(s)])
    return fld.gradient(ring)


def _resolved(fld: EigenField, pt, rho: float, flip: bool, retries: int = 6) -> int:
    for _ in range(retries):
        g = _circle_vectors(fld, pt, rho)
        if flip:
            g = g * np.array([1.0, -1.0])
        w, worst = _winding(g)
        if worst <= math.pi / 4:
            return w
        rho *= 0.5
    raise ResolutionError(f"winding at {np.asarray(pt).tolist()} unresolved down to radius {rho:.3g}")


def winding_index(fld: EigenField, pt, rho: float = 1e-2) -> int:
    """Winding number of grad u along a circle of radius ``rho`` about ``pt``."""
    return _resolved(fld, pt, rho, flip=False)


def multiplicity(fld: EigenField, pt, rho: float = 1e-2) -> int:
    """Winding number of ``(u_x, -u_y)``, i.e. of ``d_z u``; clipped at zero."""
    return max(0, _resolved(fld, pt, rho, flip=True))


# ---------------------------------------------------------------------------
# critical circles

def _radial_interval(fld: EigenField) -> tuple[float, float]:
    spec = fld.domain
    return (spec.hole_radius or 0.0), 1.0


def is_rotation_invariant(fld: EigenField, probes: int = 400, tol: float = 1e-8) -> bool:
    spec = fld.domain
    if spec.rotation_order != 0:
        return False
    rng = np.random.default_rng(11)
    lo, hi = _radial_interval(fld)
    r = np.sqrt(rng.uniform(lo * lo, hi * hi, probes)) * (1 - 1e-9)
    phi = rng.uniform(0, TWO_PI, probes)
    pts = np.column_stack([r * np.cos(phi), r * np.sin(phi)])
    g = fld.gradient(pts)
    dphi = -pts[:, 1] * g[:, 0] + pts[:, 0] * g[:, 1]
    return float(np.max(np.abs(dphi))) < tol * fld.sup_value


def detect_critical_circles(fld: EigenField, samples: int = 4000) -> list[CriticalCircle]:
    """Circles of critical points of a rotation-invariant field (possibly none)."""
    if not is_rotation_invariant(fld):
        return []
    lo, hi = _radial_interval(fld)

    def dr(r):
        return float(fld.gradient(np.array([[r, 0.0]]))[0, 0])

    rs = np.linspace(lo, hi, samples + 1)[1:-1]
    vals = fld.gradient(np.column_stack([rs, np.zeros_like(rs)]))[:, 0]
    out = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        r = optimize.brentq(dr, rs[i], rs[i + 1], xtol=1e-15)
        u, _, h = fld.evaluate(np.array([[r, 0.0]]))
        urr = float(h[0, 0, 0])
        if abs(urr) < DEGENERACY * max(1.0, float(np.linalg.norm(h[0]))):
            kind = CircleKind.DEGENERATE
        else:
            kind = CircleKind.MAX_CURVE if urr < 0 else CircleKind.MIN_CURVE
        out.append(CriticalCircle(float(r), float(u[0]), kind))
    return out


def detect_critical_circle(fld: EigenField) -> CriticalCircle | None:
    circles = detect_critical_circles(fld)
    return circles[0] if circles else None


# ---------------------------------------------------------------------------
# critical points

def _seeds(fld: EigenField, h: float) -> np.ndarray:
    spec = fld.domain
    x0, x1, y0, y1 = spec.bbox()
    pad = 0.5 * h
    xs = np.arange(x0 - pad, x1 + pad + 1e-12, h)
    ys = np.arange(y0 - pad, y1 + pad + 1e-12, h)
    if fld.symmetry:
        ys = ys[ys >= -pad]
    X, Y = np.meshgrid(xs, ys)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    if fld.symmetry:
        ang = np.arctan2(pts[:, 1], pts[:, 0])
        wedge = math.pi / fld.symmetry
        r = np.hypot(pts[:, 0], pts[:, 1])
        near = r * np.minimum(np.abs(ang), np.abs(ang - wedge)) < h
        pts = pts[((ang >= 0) & (ang <= wedge)) | near]
    clear = spec.clearance(pts)
    return pts[clear > -min(pad, 0.5 * fld.extension_margin)]


def _newton(fld: EigenField, x: np.ndarray, tol: float, iters: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Damped Newton on grad u = 0 for many starts; returns (points, converged mask)."""
    x = x.copy()
    done = np.zeros(len(x), dtype=bool)
    alive = np.ones(len(x), dtype=bool)
    spec = fld.domain
    for _ in range(iters):
        act = np.nonzero(alive & ~done)[0]
        if len(act) == 0:
            break
        _, g, hess = fld.evaluate(x[act])
        gn = np.linalg.norm(g, axis=1)
        conv = gn < tol
        done[act[conv]] = True
        act, g, hess, gn = act[~conv], g[~conv], hess[~conv], gn[~conv]
        if len(act) == 0:
            break
        det = hess[:, 0, 0] * hess[:, 1, 1] - hess[:, 0, 1] ** 2
        ok = np.abs(det) > 1e-14 * np.maximum(1.0, np.einsum("nij,nij->n", hess, hess))
        step = np.zeros_like(g)
        step[ok] = np.linalg.solve(hess[ok], g[ok][..., None])[..., 0]
        step[~ok] = g[~ok] * 1e-2
        alpha = np.ones(len(act))
        pending = np.arange(len(act))
        for _halving in range(21):
            cand = x[act[pending]] - alpha[pending, None] * step[pending]
            gc = np.linalg.norm(fld.gradient(cand), axis=1)
            good = gc < gn[pending]
            x[act[pending[good]]] = cand[good]
            pending = pending[~good]
            if len(pending) == 0:
                break
            alpha[pending] *= 0.5
        alive[act[pending]] = False
        moved = act[~np.isin(np.arange(len(act)), pending)]
        clear = spec.clearance(x[moved])
        alive[moved[clear < -fld.extension_margin]] = False
    # two undamped polishing steps on converged points
    idx = np.nonzero(done)[0]
    for _ in range(2):
        if len(idx) == 0:
            break
        _, g, hess = fld.evaluate(x[idx])
        det = np.abs(np.linalg.det(hess))
        sel = det > 1e-14 * np.maximum(1.0, np.einsum("nij,nij->n", hess, hess))
        trial = x[idx].copy()
        trial[sel] -= np.linalg.solve(hess[sel], g[sel][..., None])[..., 0]
        better = np.linalg.norm(fld.gradient(trial), axis=1) <= np.linalg.norm(g, axis=1)
        x[idx[better]] = trial[better]
    return x, done


def normal_derivative_roots(fld: EigenField, samples: int = BOUNDARY_SAMPLES) -> list[tuple[int, float, np.ndarray]]:
    """Sign changes of the normal derivative, as ``(component, t, point)``.

    Each bracket is bisected to full precision; corners are skipped.
    """
    out = []
    for ci, curve in enumerate(fld.domain.curves):
        t = np.linspace(0.0, TWO_PI, samples, endpoint=False)
        corner = curve.is_corner(t)

        def dn(s, curve=curve):
            s = np.atleast_1d(s)
            return np.einsum("ij,ij->i", fld.gradient(curve.position(s)), curve.normal(s))

        v = dn(t)
        v[corner] = np.nan
        tt = np.append(t, TWO_PI)
        vv = np.append(v, v[0])
        for i in range(samples):
            a, b = vv[i], vv[i + 1]
            if not (np.isfinite(a) and np.isfinite(b)):
                continue
            if a == 0.0:
                r = tt[i]
            elif a * b < 0:
                r = optimize.brentq(lambda s: dn(s)[0], tt[i], tt[i + 1], xtol=1e-15)
            else:
                continue
            r = math.fmod(r, TWO_PI)
            out.append((ci, r, curve.position(np.array([r]))[0]))
    return out


def _boundary_roots(fld: EigenField, tol: float) -> list[np.ndarray]:
    out = []
    for curve in fld.domain.curves:
        for c in curve.corners:
            pc = curve.position(np.array([c]))
            if np.linalg.norm(fld.gradient(pc)[0]) < tol:
                out.append(pc[0])
    out.extend(p for _, _, p in normal_derivative_roots(fld))
    return out


def _merge(points: np.ndarray, values: np.ndarray, radius: float) -> list[int]:
    order = np.lexsort((points[:, 1], points[:, 0]))
    keep: list[int] = []
    for i in order:
        clash = [j for j in keep if np.linalg.norm(points[i] - points[j]) < radius]
        if not clash:
            keep.append(int(i))
            continue
        j = clash[0]
        if abs(values[i] - values[j]) > 1e-8 * max(1.0, abs(values[j])):
            raise ConsistencyError(f"merged critical points {points[i].tolist()} and {points[j].tolist()} "
                                   f"have values {values[i]:.12g} and {values[j]:.12g}")
    return keep


def _images(fld: EigenField, pts: np.ndarray) -> np.ndarray:
    if not fld.symmetry or len(pts) == 0:
        return pts
    group = dihedral_group(fld.symmetry)
    return np.concatenate([pts @ g.T for g in group])


def find_critical_points(fld: EigenField, h: float = 0.05, tol_g: float = TOL_G,
                         tol_sing: float = TOL_SING, circles=None) -> CriticalSet:
    """Critical points of ``fld`` in the closed domain, classified.

    Newton runs from every lattice seed of spacing ``h`` (only the symmetry
    wedge for dihedrally symmetric fields, whose images are then added);
    boundary points come from sign changes of the normal derivative.
    Points on a detected critical circle are not reported individually.
    """
    if h > 0.05:
        raise PreconditionError("seed spacing must not exceed 0.05")
    spec = fld.domain
    seeds = _seeds(fld, h)
    g0 = np.linalg.norm(fld.gradient(seeds), axis=1) if len(seeds) else np.zeros(1)
    gscale = max(1.0, float(np.max(g0)))
    tol = tol_g * gscale
    x, conv = _newton(fld, seeds, tol)
    found = [x[conv]]
    bpts = _boundary_roots(fld, tol)
    if bpts:
        xb, cb = _newton(fld, np.array(bpts), tol, iters=20)
        found.append(np.where(cb[:, None], xb, np.array(bpts)))
    pts = _images(fld, np.concatenate(found)) if found else np.zeros((0, 2))
    clear = spec.clearance(pts) if len(pts) else np.zeros(0)
    pts = pts[clear > -1e-7]
    if circles is None:
        circles = detect_critical_circles(fld)
    if circles and len(pts):
        r = np.hypot(pts[:, 0], pts[:, 1])
        off = np.ones(len(pts), dtype=bool)
        for c in circles:
            off &= np.abs(r - c.radius) > 1e-5
        pts = pts[off]
    if len(pts) == 0:
        return CriticalSet((), tuple(circles), gscale)
    vals = fld.value(pts)
    keep = _merge(pts, vals, MERGE_RADIUS)
    pts = pts[keep]
    u, g, hess = fld.evaluate(pts)
    ok = np.linalg.norm(g, axis=1) < tol
    pts, u, hess = pts[ok], u[ok], hess[ok]
    dist, comp, param = spec.boundary_distance(pts)
    out = []
    for i, p in enumerate(pts):
        others = np.delete(pts, i, axis=0)
        near = float(np.min(np.linalg.norm(others - p, axis=1))) if len(others) else 1.0
        rho = min(1e-2, 0.3 * near, 0.5 * fld.extension_margin)
        kind, w, v = classify_hessian(hess[i])
        on_b = bool(dist[i] < 1e-7)
        out.append(CriticalPoint(
            location=(float(p[0]), float(p[1])), value=float(u[i]), kind=kind, on_boundary=on_b,
            eigvals=(float(w[0]), float(w[1])), eigvecs=v, winding_index=winding_index(fld, p, rho),
            multiplicity=multiplicity(fld, p, rho), is_singular=bool(abs(u[i]) < tol_sing),
            component=int(comp[i]) if on_b else None, param=float(param[i]) if on_b else None))
    return CriticalSet(tuple(out), tuple(circles), gscale)


def morse_counts(points) -> tuple[int, int, int, int]:
    """``(n_S, n_E, interior multiplicity sum, boundary multiplicity sum)``.

    Multiplicities count only for points where ``u`` vanishes.
    """
    pts = list(points.points if isinstance(points, CriticalSet) else points)
    bad = [p for p in pts if p.kind is Kind.DEGENERATE]
    if bad:
        raise PreconditionError(f"degenerate critical points present: {[p.location for p in bad]}")
    n_s = sum(1 for p in pts if p.kind is Kind.SADDLE and not p.is_singular)
    n_e = sum(1 for p in pts if p.kind in (Kind.MAX, Kind.MIN))
    m_int = sum(p.multiplicity for p in pts if p.is_singular and not p.on_boundary)
    m_bdry = sum(p.multiplicity for p in pts if p.is_singular and p.on_boundary)
    return n_s, n_e, m_int, m_bdry
