"""Nodal partitions, Payne points and the numeric checks built on top of them.

Covers Courant's bound, the two corollaries relating Neumann and nodal
counts, the Morse identities for convex domains, the gradient estimate
for ground states and the flower construction (symmetry, maxima and the
choice of the inner radius).
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import ndimage, optimize

from . import geometry
from .critical import CircleKind, CriticalSet, Kind, morse_counts, normal_derivative_roots
from .eigenfield import EigenField, domain_grid
from .errors import PreconditionError, ResolutionError, SearchError, UnsupportedError
from .geometry import DomainSpec, TWO_PI
from .neumann_complex import NeumannCount
from .specfun import bessel_root

log = logging.getLogger(__name__)

# 6-neighbour connectivity of the lattice split along one diagonal
TRIANGULATED = np.array([[0, 1, 1], [1, 1, 1], [1, 1, 0]], dtype=bool)
PAYNE_SAMPLES = 8192
REFINE = 4


# ---------------------------------------------------------------------------
# nodal partition

@dataclass(eq=False)
class NodalPartition:
    count: int
    labels: np.ndarray          # fine lattice, 0 = zero set or exterior
    signs: dict[int, int]       # label -> +1 / -1
    origin: tuple[float, float]
    h: float                    # coarse spacing; labels live on h / REFINE
    payne: list[np.ndarray] = field(default_factory=list)
    count_refined: int | None = None

    @property
    def positive(self) -> list[int]:
        return [k for k, s in self.signs.items() if s > 0]

    @property
    def negative(self) -> list[int]:
        return [k for k, s in self.signs.items() if s < 0]

    def to_json(self) -> dict:
        return {"count": self.count, "count_refined": self.count_refined, "h": self.h,
                "positive": len(self.positive), "negative": len(self.negative),
                "payne_points": [p.tolist() for p in self.payne]}


def _zero_tol(fld: EigenField) -> float:
    # fundamental-solution fields carry a boundary residual near 1e-6
    return 1e-10 if fld.backend == "closed_form" else 1e-6


def _mirrors(fld: EigenField) -> tuple[bool, bool]:
    if not fld.symmetry:
        return False, False
    return True, fld.symmetry % 2 == 0


class _SignOracle:
    """Signs of ``u`` at lattice points, evaluated once per symmetry orbit."""

    def __init__(self, fld: EigenField, tol: float):
        self.fld = fld
        self.tol = tol
        self.mirror_y, self.mirror_x = _mirrors(fld)

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        out = np.zeros(len(pts), dtype=np.int8)
        if len(pts) == 0:
            return out
        inside = self.fld.domain.level(pts)[0] > 0
        q = pts[inside].copy()
        if self.mirror_y:
            q[:, 1] = np.abs(q[:, 1])
        if self.mirror_x:
            q[:, 0] = np.abs(q[:, 0])
        uniq, inv = np.unique(q, axis=0, return_inverse=True)
        u = self.fld.value(uniq)[inv.reshape(-1)]
        s = np.where(u > self.tol, 1, np.where(u < -self.tol, -1, 0)).astype(np.int8)
        out[inside] = s
        return out


def _lattice(spec: DomainSpec, h: float):
    x0, x1, y0, y1 = spec.bbox()
    ix = np.arange(math.floor(x0 / h) - 1, math.ceil(x1 / h) + 2)
    iy = np.arange(math.floor(y0 / h) - 1, math.ceil(y1 / h) + 2)
    return ix, iy


def _label(fld: EigenField, h: float, tol: float) -> NodalPartition:
    spec = fld.domain
    oracle = _SignOracle(fld, tol)
    ix, iy = _lattice(spec, h)
    X, Y = np.meshgrid(ix * h, iy * h, indexing="ij")
    coarse = oracle(np.column_stack([X.ravel(), Y.ravel()])).reshape(X.shape)
    nx, ny = coarse.shape
    r = REFINE
    fine = np.zeros((r * (nx - 1) + 1, r * (ny - 1) + 1), dtype=np.int8)
    c00, c10, c01, c11 = coarse[:-1, :-1], coarse[1:, :-1], coarse[:-1, 1:], coarse[1:, 1:]
    corners = np.stack([c00, c10, c01, c11])
    pos = np.all(corners >= 0, axis=0) & np.any(corners > 0, axis=0)
    neg = np.all(corners <= 0, axis=0) & np.any(corners < 0, axis=0)
    inside_all = np.all(corners != 0, axis=0)
    # uniform interior cells fill directly
    uniform = np.where(pos & inside_all, 1, np.where(neg & inside_all, -1, 0)).astype(np.int8)
    ci, cj = np.nonzero(uniform)
    for di in range(r + 1):
        for dj in range(r + 1):
            fine[r * ci + di, r * cj + dj] = uniform[ci, cj]
    # everything else touching the domain is resolved on the fine lattice
    touched = np.any(corners != 0, axis=0) & ~inside_all
    touched |= np.any(corners > 0, axis=0) & np.any(corners < 0, axis=0)
    sub = np.arange(r + 1)
    idx = []
    for i, j in zip(*np.nonzero(touched)):
        fi, fj = np.meshgrid(r * i + sub, r * j + sub, indexing="ij")
        idx.append(np.column_stack([fi.ravel(), fj.ravel()]))
    if idx:
        idx = np.unique(np.concatenate(idx), axis=0)
        hf = h / r
        pts = np.column_stack([(r * ix[0] + idx[:, 0]) * hf, (r * iy[0] + idx[:, 1]) * hf])
        fine[idx[:, 0], idx[:, 1]] = oracle(pts)
    lp, n_pos = ndimage.label(fine > 0, structure=TRIANGULATED)
    ln, n_neg = ndimage.label(fine < 0, structure=TRIANGULATED)
    labels = np.where(lp > 0, lp, np.where(ln > 0, ln + n_pos, 0)).astype(np.int32)
    signs = {k: 1 for k in range(1, n_pos + 1)}
    signs.update({n_pos + k: -1 for k in range(1, n_neg + 1)})
    return NodalPartition(n_pos + n_neg, labels, signs, (float(ix[0] * h), float(iy[0] * h)), h)


def nodal_partition(fld: EigenField, h: float = 0.01, tol: float | None = None,
                    check: bool = True) -> NodalPartition:
    """Nodal domains of ``fld`` from a triangulated lattice of spacing ``h``.

    Cells that straddle the zero set or the boundary are resolved on an
    ``h / 4`` lattice before labelling.  With ``check`` the count must agree
    with the count at ``h / 2``.
    """
    if h > 0.01:
        raise PreconditionError("nodal lattice spacing must not exceed 0.01")
    tol = _zero_tol(fld) if tol is None else tol
    part = _label(fld, h, tol)
    if check:
        finer = _label(fld, h / 2, tol)
        part.count_refined = finer.count
        if finer.count != part.count:
            raise ResolutionError(f"{fld.domain.label} u_{fld.index}: nodal count {part.count} at h={h:g} "
                                  f"but {finer.count} at h={h / 2:g}")
    part.payne = payne_points(fld)
    return part


def payne_points(fld: EigenField, samples: int = PAYNE_SAMPLES) -> list[np.ndarray]:
    """Boundary points where the normal derivative changes sign."""
    return [p for _, _, p in normal_derivative_roots(fld, samples)]


# ---------------------------------------------------------------------------
# counting checks

def courant_check(fields: list[EigenField], h: float = 0.01) -> list[dict]:
    """Nodal count of ``u_k`` against ``k`` for each field."""
    out = []
    for fld in sorted(fields, key=lambda f: f.index):
        count = nodal_partition(fld, h).count
        out.append({"k": fld.index, "lam": fld.lam, "nodal": count, "passed": count <= fld.index})
    return out


def corollary_checks(count: NeumannCount, partition: NodalPartition, crit: CriticalSet) -> dict:
    maxima = len(crit.of_kind(Kind.MAX))
    curves = sum(1 for c in crit.circles if c.kind is CircleKind.MAX_CURVE)
    first = count.total >= maxima + curves
    second = 2 * count.total >= partition.count
    return {"neumann": count.total, "maxima": maxima, "max_curves": curves, "nodal": partition.count,
            "maxima_bound": first, "nodal_bound": second, "passed": first and second}


def identity_checks(crit: CriticalSet, fld: EigenField) -> dict:
    """Saddle/extremum identity for ground states and the multiplicity identity for ``u_2``.

    The second identity needs exactly two extrema; otherwise it is reported
    as not applicable.
    """
    n_s, n_e, m_int, m_bdry = morse_counts(crit)
    out = {"k": fld.index, "n_S": n_s, "n_E": n_e, "m_interior": m_int, "m_boundary": m_bdry,
           "saddle_identity": None, "multiplicity_identity": None}
    if fld.index == 1:
        out["saddle_identity"] = n_s - n_e == -1
    if fld.index == 2 and n_e == 2:
        out["multiplicity_sum"] = m_int + 0.5 * m_bdry + n_s - n_e
        out["multiplicity_identity"] = out["multiplicity_sum"] == -1
    checks = [v for k, v in out.items() if k.endswith("identity") and v is not None]
    out["passed"] = bool(checks) and all(checks)
    return out


# ---------------------------------------------------------------------------
# gradient estimate

@dataclass
class BoundsReport:
    theta: float
    A: float
    lam: float
    lhs: float
    rhs: float
    precondition_ok: bool
    h: float
    lhs_location: tuple[float, float]
    Lambda: float | None = None
    C: float | None = None
    F: float | None = None
    flower_condition: float | None = None

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.precondition_ok and self.margin > 0

    def to_json(self) -> dict:
        d = asdict(self)
        d.update(margin=self.margin, passed=self.passed, lhs_location=list(self.lhs_location))
        return d


def a_constant(theta: float, lam: float) -> float:
    return theta + math.sqrt(2 * lam / math.pi) * math.exp(-theta * theta / (8 * lam))


def _grad_norm(fld: EigenField, pts) -> np.ndarray:
    return np.linalg.norm(fld.gradient(np.atleast_2d(pts)), axis=-1)


def gradient_sup(fld: EigenField, h: float = 0.002, boundary_samples: int = 8192) -> tuple[float, np.ndarray]:
    """Max of ``|grad u|`` over a lattice, a boundary scan and a local polish."""
    spec = fld.domain
    pts = domain_grid(spec, h, sector=fld.symmetry)
    cands = []
    for lo in range(0, len(pts), 100_000):
        g = _grad_norm(fld, pts[lo:lo + 100_000])
        top = np.argsort(-g)[:4]
        cands.extend((float(g[i]), ("in", pts[lo + i])) for i in top)
    t = np.linspace(0.0, TWO_PI, boundary_samples, endpoint=False)
    for ci, curve in enumerate(spec.curves):
        g = _grad_norm(fld, curve.position(t))
        for i in np.argsort(-g)[:4]:
            cands.append((float(g[i]), ("bd", ci, float(t[i]))))
    cands.sort(key=lambda c: -c[0])
    best, where = cands[0][0], None
    dt = TWO_PI / boundary_samples
    for val, info in cands[:6]:
        if info[0] == "bd":
            curve = spec.curves[info[1]]
            res = optimize.minimize_scalar(lambda s: -_grad_norm(fld, curve.position(np.array([s])))[0],
                                           bounds=(info[2] - dt, info[2] + dt), method="bounded",
                                           options={"xatol": 1e-12})
            x, v = curve.position(np.array([res.x]))[0], -res.fun
        else:
            def obj(p):
                return np.inf if spec.level(p)[0] <= 0 else -_grad_norm(fld, p)[0]
            res = optimize.minimize(obj, info[1], method="Nelder-Mead",
                                    options={"xatol": 1e-10, "fatol": 1e-14, "initial_simplex":
                                             info[1] + np.array([[0, 0], [h, 0], [0, h]])})
            x, v = res.x, -res.fun
        if v < val:
            x, v = (info[1] if info[0] == "in" else spec.curves[info[1]].position(np.array([info[2]]))[0]), val
        if where is None or v > best:
            best, where = v, np.asarray(x, dtype=float)
    return float(best), where


def gradient_bound_check(fld: EigenField, h: float = 0.002) -> BoundsReport:
    """``|grad u_1| <= sqrt(e) (A + lam / (4A))`` with ``A`` from the curvature bound."""
    spec = fld.domain
    if not spec.is_smooth:
        raise UnsupportedError(f"{spec.label} has corners; the curvature bound is undefined")
    if fld.index != 1:
        raise PreconditionError("the gradient estimate is stated for the ground state")
    theta = geometry.min_mean_curvature_bound(spec)
    lam = fld.lam
    A = a_constant(theta, lam)
    rhs = math.sqrt(math.e) * (A + lam / (4 * A))
    lhs, where = gradient_sup(fld, h)
    rep = BoundsReport(theta, A, lam, lhs, rhs, math.sqrt(lam) <= 2 * A, h, (float(where[0]), float(where[1])))
    if spec.kind == "flower":
        cert = paper_certificate(spec.n, spec.a)
        rep.Lambda, rep.C, rep.F = cert.Lambda, cert.C, cert.F
        rep.flower_condition = cert.value
    return rep


# ---------------------------------------------------------------------------
# flower domains

@dataclass
class PaperCertificate:
    n: int
    a: float
    C: float
    Lambda: float
    C2: float
    theta: float
    F: float
    value: float
    holds: bool

    def to_json(self) -> dict:
        return asdict(self)


def _outer_petal_curve(n: int):
    return DomainSpec.flower(n, 0.3).curves[0]


def inscribed_radius(n: int) -> float:
    """Radius of the largest ball about ``(1, 0)`` inside every ``flower(n, a)``.

    The inner circle is farther than 1/2 for all admissible ``a``, so this is
    ``min(1/2, dist((1, 0), outer curve))``.
    """
    curve = _outer_petal_curve(n)
    x0 = np.array([1.0, 0.0])
    t = np.linspace(0.0, TWO_PI, 200_000, endpoint=False)
    d = np.linalg.norm(curve.position(t) - x0, axis=1)
    i = int(np.argmin(d))
    dt = TWO_PI / len(t)
    res = optimize.minimize_scalar(lambda s: np.linalg.norm(curve.position(np.array([s]))[0] - x0),
                                   bounds=(t[i] - dt, t[i] + dt), method="bounded", options={"xatol": 1e-13})
    return min(0.5, float(res.fun))


def paper_certificate(n: int, a: float) -> PaperCertificate:
    """Constants of the sufficient condition ``(1/2 - a) F(n) < 1``."""
    C = inscribed_radius(n)
    Lambda = bessel_root(0, 1) ** 2 / C ** 2
    t = np.linspace(0.0, TWO_PI, 200_000, endpoint=False)
    C2 = float(np.max(np.abs(_outer_petal_curve(n).curvature(t))))
    theta = max(C2, 16.0, 0.5 * math.sqrt(Lambda))

    def f(x):
        return math.sqrt(math.e) * (x + Lambda / (4 * x))

    # convex in x, so the maximum sits at an endpoint
    F = max(f(0.5 * math.sqrt(Lambda)), f(theta + math.sqrt(Lambda)))
    value = (0.5 - a) * F
    return PaperCertificate(n, a, C, Lambda, C2, theta, F, value, value < 1)


def ray_segment_points(spec: DomainSpec, samples: int = 2000) -> np.ndarray:
    """Dense samples of the symmetry rays inside the flower."""
    n, a = spec.n, spec.a
    r = np.linspace(a, 0.5, samples)[1:-1]
    pts = [np.column_stack([r * math.cos(ang), r * math.sin(ang)]) for ang in geometry.symmetry_rays(n)]
    return np.concatenate(pts)


def direct_certificate(fld: EigenField, margin: float, samples: int = 2000) -> dict:
    pts = ray_segment_points(fld.domain, samples)
    vals = np.abs(fld.value(pts))
    i = int(np.argmax(vals))
    peak = float(vals[i])
    return {"max_abs_on_rays": peak, "at": pts[i].tolist(), "samples": int(len(pts)),
            "bound": 1.0 - margin, "holds": peak <= 1.0 - margin}


@dataclass
class FlowerSearch:
    n: int
    a: float
    field: EigenField
    direct: dict
    paper: PaperCertificate
    tried: list[tuple[float, float]]
    lambda_bound_ok: bool

    def to_json(self) -> dict:
        return {"n": self.n, "a": self.a, "lam": self.field.lam, "direct": self.direct,
                "paper": self.paper.to_json(), "tried": [list(t) for t in self.tried],
                "lambda_below_ball_bound": self.lambda_bound_ok}


def flower_a_search(n: int, margin: float = 0.05, solver=None, start: float = 0.26,
                    step: float = 0.02) -> FlowerSearch:
    """Smallest ``a`` on the grid ``start, start + step, ...`` with ``|u_1| <= 1 - margin`` on the rays."""
    from .solve import Solver
    if not 0 < margin < 0.5:
        raise PreconditionError("margin must lie in (0, 1/2)")
    solver = solver or Solver()
    tried = []
    a = start
    while a < 0.5 - 1e-12:
        spec = DomainSpec.flower(n, round(a, 10))
        fld = solver.field(spec, 1)
        cert = direct_certificate(fld, margin)
        tried.append((spec.a, cert["max_abs_on_rays"]))
        log.info("flower n=%d a=%.2f: max |u1| on rays %.4f", n, spec.a, cert["max_abs_on_rays"])
        if cert["holds"]:
            paper = paper_certificate(n, spec.a)
            return FlowerSearch(n, spec.a, fld, cert, paper, tried, fld.lam <= paper.Lambda)
        a += step
    best = min(tried, key=lambda t: t[1]) if tried else None
    raise SearchError(f"no inner radius satisfies the ray certificate for n={n}; best {best}")


def _rotate(pts: np.ndarray, ang: float) -> np.ndarray:
    c, s = math.cos(ang), math.sin(ang)
    return pts @ np.array([[c, s], [-s, c]])


def symmetry_and_maxima_check(fld: EigenField, crit: CriticalSet, n: int | None = None) -> dict:
    """Rotation invariance, and one maximum per petal sector forming a single orbit."""
    spec = fld.domain
    if spec.kind != "flower":
        raise PreconditionError("symmetry check applies to flower domains")
    n = n or spec.n
    probes = domain_grid(spec, 0.05)
    turned = _rotate(probes, TWO_PI / n)
    ok = spec.level(turned)[0] > 0
    sym_err = float(np.max(np.abs(fld.value(turned[ok]) - fld.value(probes[ok]))))
    maxima = crit.of_kind(Kind.MAX)
    locs = np.array([m.location for m in maxima]).reshape(-1, 2)
    ang = np.sort(np.mod(np.arctan2(locs[:, 1], locs[:, 0]), TWO_PI))
    gaps = np.diff(np.append(ang, ang[0] + TWO_PI)) if len(ang) else np.zeros(0)
    radii = np.hypot(locs[:, 0], locs[:, 1])
    vals = np.array([m.value for m in maxima])
    # sectors between consecutive rays are centred on the angles 2 pi k / n
    sector = np.mod(np.round(ang / (TWO_PI / n)), n).astype(int) if len(ang) else np.zeros(0, int)
    ray_d = geometry.distance_to_rays(locs, n) if len(locs) else np.zeros(0)
    orbit = (len(maxima) == n and float(np.ptp(radii)) < 1e-6 and float(np.ptp(vals)) < 1e-6
             and bool(np.all(np.abs(gaps - TWO_PI / n) < 1e-5)))
    one_per_sector = len(maxima) == n and len(set(sector.tolist())) == n
    off_rays = bool(np.all(ray_d > 1e-3))
    return {"n": n, "symmetry_error": sym_err, "symmetric": sym_err < 1e-6, "maxima": len(maxima),
            "max_angle_error": float(np.max(np.abs(gaps - TWO_PI / n))) if len(gaps) else None,
            "single_orbit": orbit, "one_per_sector": one_per_sector,
            "min_ray_distance": float(np.min(ray_d)) if len(ray_d) else None, "off_rays": off_rays,
            "passed": sym_err < 1e-6 and orbit and one_per_sector and off_rays}
