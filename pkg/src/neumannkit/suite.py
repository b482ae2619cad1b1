"""The verification suite: shared per-field pipeline and the claim checks.

A :class:`Workspace` computes each field's artefacts (critical set, Neumann
complex, counts, nodal partition) once, so claims that look at the same
field from different angles share the work.  Claims are grouped under ids
that ``verify --only`` filters on.
"""

from __future__ import annotations

import logging
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.spatial.distance import cdist

from . import analysis as an
from . import neumann_complex as nc
from .critical import CircleKind, CriticalSet, Kind, find_critical_points
from .eigenfield import EigenField, domain_grid
from .errors import NeumannKitError
from .flow import EPS_LAUNCH, Tracer
from .geometry import DomainSpec
from .report import Entry, VerificationReport
from .solve import Solver
from .specfun import bessel_root

log = logging.getLogger(__name__)

OVAL = ((0, 1.0, 0.0), (2, 0.15, 0.0))
FLOWER_NS = (3, 4, 5, 6)


@dataclass(frozen=True)
class Settings:
    tol_g: float = 1e-9
    eps_cap: float = 1e-7
    eps_launch: float = EPS_LAUNCH
    h_seed: float = 0.05
    h_nodal: float = 0.01
    h_grad: float = 0.002
    margin: float = 0.05
    left_end_samples: int = 25


class Workspace:
    """Lazily computed, thread-safe cache of per-field artefacts."""

    def __init__(self, settings: Settings | None = None, solver: Solver | None = None):
        self.settings = settings or Settings()
        self.solver = solver or Solver()
        self._store: dict = {}
        self._locks: dict = {}
        self._guard = threading.Lock()

    def _get(self, key, make: Callable):
        with self._guard:
            lock = self._locks.setdefault(key, threading.Lock())
        with lock:
            if key not in self._store:
                self._store[key] = make()
            return self._store[key]

    @staticmethod
    def _key(spec: DomainSpec, k: int):
        return (spec.kind, spec.n, spec.a, spec.coeffs, k)

    def field(self, spec: DomainSpec, k: int = 1) -> EigenField:
        return self._get(("field",) + self._key(spec, k), lambda: self.solver.field(spec, k))

    def crit(self, spec: DomainSpec, k: int = 1) -> CriticalSet:
        s = self.settings
        return self._get(("crit",) + self._key(spec, k),
                         lambda: find_critical_points(self.field(spec, k), s.h_seed, s.tol_g))

    def complex(self, spec: DomainSpec, k: int = 1) -> nc.NeumannComplex:
        def make():
            fld, crit = self.field(spec, k), self.crit(spec, k)
            tracer = Tracer(fld, crit)
            tracer.eps_cap = self.settings.eps_cap * crit.grad_scale
            cx = nc.build(fld, crit, tracer, self.settings.eps_launch)
            nc.classify_faces(cx)
            return cx
        return self._get(("complex",) + self._key(spec, k), make)

    def count(self, spec: DomainSpec, k: int = 1) -> nc.NeumannCount:
        return nc.count_neumann_domains(self.complex(spec, k))

    def nodal(self, spec: DomainSpec, k: int = 1) -> an.NodalPartition:
        return self._get(("nodal",) + self._key(spec, k),
                         lambda: an.nodal_partition(self.field(spec, k), self.settings.h_nodal))

    def flower(self, n: int) -> an.FlowerSearch:
        def make():
            res = an.flower_a_search(n, self.settings.margin, self.solver)
            spec = res.field.domain
            self._store.setdefault(("field",) + self._key(spec, 1), res.field)
            return res
        return self._get(("flower", n), make)

    def flower_spec(self, n: int) -> DomainSpec:
        return self.flower(n).field.domain


# ---------------------------------------------------------------------------
# cases shared by the structural claims

def suite_cases(ws: Workspace) -> list[tuple[str, DomainSpec, int]]:
    cases = [("square_u1", DomainSpec.square(), 1), ("disk_u1", DomainSpec.disk(), 1),
             ("disk_u2", DomainSpec.disk(), 2), ("annulus_u1", DomainSpec.annulus(0.5), 1),
             ("oval_u1", DomainSpec.star(OVAL), 1), ("oval_u2", DomainSpec.star(OVAL), 2)]
    cases += [(f"flower{n}_u1", ws.flower_spec(n), 1) for n in FLOWER_NS]
    return cases


# ---------------------------------------------------------------------------
# claims

def _near(a, b, tol) -> bool:
    return bool(np.linalg.norm(np.subtract(a, b)) < tol)


def claim_square_u1(ws: Workspace) -> list[Entry]:
    spec = DomainSpec.square()
    fld = ws.field(spec)
    cnt = ws.count(spec)
    saddles = ws.crit(spec).of_kind(Kind.SADDLE)
    corners = [(0, 0), (1, 0), (1, 1), (0, 1)]
    at_corners = all(any(_near(s.location, c, 1e-9) and s.on_boundary for s in saddles) for c in corners)
    lam_err = abs(fld.lam - 2 * math.pi ** 2)
    ok = lam_err < 1e-12 and cnt.total == 4 and cnt.boundary == 4 and len(saddles) == 4 and at_corners
    return [Entry("square_u1", 1, "has four Neumann domains", "PAPER", ok,
                  {"lam": fld.lam, "lam_error": lam_err, "neumann_total": cnt.total, "boundary": cnt.boundary,
                   "saddles": [s.location for s in saddles], "saddles_at_corners": at_corners},
                  {"lam": 2 * math.pi ** 2, "neumann_total": 4, "boundary": 4, "saddles": corners})]


def claim_disk_u1(ws: Workspace) -> list[Entry]:
    spec = DomainSpec.disk()
    fld, cx = ws.field(spec), ws.complex(spec)
    cnt = ws.count(spec)
    j01 = bessel_root(0, 1)
    lines = [e for e in cx.edges if e.kind != "boundary"]
    punct = [p.location for p in cx.punctures]
    ok = (cnt.total == 1 and len(punct) == 1 and math.hypot(*punct[0]) < 1e-8 and not lines
          and abs(fld.lam - j01 ** 2) < 1e-10)
    return [Entry("disk_u1", 2, "exactly one Neumann domain", "PAPER", ok,
                  {"lam": fld.lam, "neumann_total": cnt.total, "punctures": punct, "line_edges": len(lines)},
                  {"lam": j01 ** 2, "neumann_total": 1, "punctures": [[0.0, 0.0]], "line_edges": 0})]


def claim_disk_u2(ws: Workspace) -> list[Entry]:
    spec = DomainSpec.disk()
    cnt = ws.count(spec, 2)
    part = ws.nodal(spec, 2)
    crit = ws.crit(spec, 2)
    payne = sorted((p.tolist() for p in part.payne), key=lambda p: p[1])
    payne_ok = len(payne) == 2 and _near(payne[0], (0, -1), 1e-6) and _near(payne[1], (0, 1), 1e-6)
    extrema = len(crit.of_kind(Kind.MAX)) + len(crit.of_kind(Kind.MIN))
    ok = cnt.total == 3 and cnt.boundary == 2 and cnt.interior == 1 and part.count == 2 and payne_ok and extrema == 2
    return [Entry("disk_u2", 3, "exactly three Neumann domains", "PAPER", ok,
                  {"neumann_total": cnt.total, "boundary": cnt.boundary, "interior": cnt.interior,
                   "nodal": part.count, "payne_points": payne, "extrema": extrema},
                  {"neumann_total": 3, "boundary": 2, "interior": 1, "nodal": 2,
                   "payne_points": [[0.0, -1.0], [0.0, 1.0]], "extrema": 2})]


def claim_mfs_disk(ws: Workspace) -> list[Entry]:
    spec = DomainSpec.disk()
    mfs_solver = Solver(backend="mfs", options=ws.solver.options, cache_dir=ws.solver.cache_dir)
    probes = domain_grid(spec, 0.02)
    measured, ok = {}, True
    for k in (1, 2):
        exact = ws.field(spec, k)
        approx = ws._get(("mfs_disk", k), lambda k=k: mfs_solver.field(spec, k))
        ue, ua = exact.value(probes), approx.value(probes)
        diff = min(float(np.max(np.abs(ua - s * ue))) for s in (1.0, -1.0))
        lam_err = abs(approx.lam - exact.lam)
        measured[f"lam{k}"] = approx.lam
        measured[f"lam{k}_error"] = lam_err
        measured[f"sup_difference{k}"] = diff
        ok &= lam_err < 1e-6 and diff < 1e-6
    return [Entry("mfs_disk", 4, "closed form oracle", "DERIVED", ok, measured,
                  {"lam1": bessel_root(0, 1) ** 2, "lam2": bessel_root(1, 1) ** 2,
                   "lam_tolerance": 1e-6, "sup_tolerance": 1e-6})]


def _claim_flower(n: int) -> Callable[[Workspace], list[Entry]]:
    def claim(ws: Workspace) -> list[Entry]:
        res = ws.flower(n)
        spec = res.field.domain
        crit = ws.crit(spec)
        sym = an.symmetry_and_maxima_check(res.field, crit)
        cnt = ws.count(spec)
        ok = sym["passed"] and sym["maxima"] == n and cnt.total >= n
        return [Entry(f"flower_n{n}", 5, "at least $n$ local maxima", "PAPER", ok,
                      {"a": spec.a, "lam": res.field.lam, "maxima": sym["maxima"],
                       "max_angle_error": sym["max_angle_error"], "min_ray_distance": sym["min_ray_distance"],
                       "symmetry_error": sym["symmetry_error"], "neumann_total": cnt.total,
                       "direct_certificate": res.direct, "published_certificate": res.paper.to_json(),
                       "lambda_below_ball_bound": res.lambda_bound_ok},
                      {"maxima": n, "angle_tolerance": 1e-5, "ray_distance_above": 1e-3, "neumann_at_least": n})]
    return claim


def claim_gradient_bound(ws: Workspace) -> list[Entry]:
    out = []
    specs = [("disk", DomainSpec.disk()), ("annulus", DomainSpec.annulus(0.5))]
    specs += [(f"flower{n}", ws.flower_spec(n)) for n in FLOWER_NS]
    for name, spec in specs:
        rep = an.gradient_bound_check(ws.field(spec), ws.settings.h_grad)
        out.append(Entry(f"gradient_bound_{name}", 6, "for $\\sqrt{\\lambda_1} \\leq 2 A$ we have", "PAPER",
                         rep.passed, rep.to_json(), {"precondition": True, "margin_positive": True}))
    return out


def claim_courant(ws: Workspace) -> list[Entry]:
    out = []
    for name, spec in (("square", DomainSpec.square()), ("disk", DomainSpec.disk())):
        rows = [{"k": k, "nodal": ws.nodal(spec, k).count} for k in range(1, 7)]
        ok = all(r["nodal"] <= r["k"] for r in rows)
        out.append(Entry(f"courant_{name}", 7, "has at most $k$ nodal domains", "PAPER", ok,
                         {"counts": rows}, {"nodal_at_most_k": True}))
    return out


def claim_corollary_nodal(ws: Workspace) -> list[Entry]:
    rows, ok = [], True
    for name, spec, k in suite_cases(ws):
        res = an.corollary_checks(ws.count(spec, k), ws.nodal(spec, k), ws.crit(spec, k))
        rows.append({"case": name, **res})
        ok &= res["nodal_bound"]
    return [Entry("corollary_nodal", 8, "twice the number of the Neumann domains", "PAPER", ok,
                  {"cases": rows}, {"twice_neumann_at_least_nodal": True})]


def claim_identities(ws: Workspace) -> list[Entry]:
    out = []
    for name, spec, k, key in (("disk_u1", DomainSpec.disk(), 1, "saddle_identity"),
                               ("oval_u1", DomainSpec.star(OVAL), 1, "saddle_identity"),
                               ("disk_u2", DomainSpec.disk(), 2, "multiplicity_identity")):
        res = an.identity_checks(ws.crit(spec, k), ws.field(spec, k))
        anchor = "$n_S - n_E = -1$" if k == 1 else "m_k + n_S - n_E = -1"
        out.append(Entry(f"identity_{name}", 9, anchor, "PAPER", bool(res[key]), res, {key: True}))
    return out


def claim_annulus_u1(ws: Workspace) -> list[Entry]:
    spec = DomainSpec.annulus(0.5)
    fld, crit = ws.field(spec), ws.crit(spec)
    circles = [c for c in crit.circles if c.kind is CircleKind.MAX_CURVE]
    cnt = ws.count(spec)
    res = an.corollary_checks(cnt, ws.nodal(spec), crit)
    residual = None
    if circles:
        ang = np.linspace(0, 2 * math.pi, 64, endpoint=False)
        pts = np.array([circles[0].point(t) for t in ang])
        residual = float(np.max(np.linalg.norm(fld.gradient(pts), axis=1)))
    ok = len(circles) == 1 and residual is not None and residual < 1e-10 and cnt.total == 2 and res["maxima_bound"]
    return [Entry("annulus_u1", 10, "simple closed curves of local maxima", "DERIVED", ok,
                  {"max_circles": [c.radius for c in circles], "radial_derivative_residual": residual,
                   "neumann_total": cnt.total, "maxima_bound": res["maxima_bound"]},
                  {"max_circles": 1, "residual_below": 1e-10, "neumann_total": 2})]


def claim_left_ends(ws: Workspace) -> list[Entry]:
    rows, ok = [], True
    for name, spec, k in suite_cases(ws):
        res = nc.left_end_check(ws.complex(spec, k), ws.settings.left_end_samples)
        bad = [r["face"] for r in res if not r["passed"]]
        rows.append({"case": name, "faces": len(res), "violations": bad})
        ok &= not bad
    return [Entry("left_ends", 11, "there exists a curve of local maxima $\\theta$", "PAPER", ok,
                  {"cases": rows}, {"violations": 0})]


def claim_audits(ws: Workspace) -> list[Entry]:
    rows, ok = [], True
    for name, spec, k in suite_cases(ws):
        cx = ws.complex(spec, k)
        eu = nc.euler_audit(cx)
        faces, area = nc.area_audit(cx)
        rob = nc.launch_robustness(cx)
        cross = nc.crossing_audit(cx)
        rel = abs(faces - area) / area
        good = eu.passed and rel < 0.01 and rob["ends_identical"] and cross["passed"]
        rows.append({"case": name, "euler": eu.to_json(), "area_relative_error": rel,
                     "launch": rob, "crossings": cross["violations"]})
        ok &= good
    return [Entry("audits", 12, "Euler's formula $V- E + F = 2$", "PAPER", ok, {"cases": rows},
                  {"euler": True, "area_relative_error_below": 0.01, "far_ends_invariant": True})]


def claim_critical_completeness(ws: Workspace) -> list[Entry]:
    """Halving the seed spacing must not change the critical set."""
    rows, ok = [], True
    s = ws.settings
    for name, spec, k in (("square_u1", DomainSpec.square(), 1), ("disk_u2", DomainSpec.disk(), 2),
                          ("square_u4", DomainSpec.square(), 4), ("annulus_u1", DomainSpec.annulus(0.5), 1)):
        fld = ws.field(spec, k)
        try:
            a = find_critical_points(fld, s.h_seed, s.tol_g)
            b = find_critical_points(fld, s.h_seed / 2, s.tol_g)
            pa = np.array([p.location for p in a.points]).reshape(-1, 2)
            pb = np.array([p.location for p in b.points]).reshape(-1, 2)
            # match by distance: sorting is unstable for coordinates near +-0
            same = pa.shape == pb.shape and (len(pa) == 0 or bool(
                np.all(cdist(pa, pb).min(axis=1) < 1e-8) and np.all(cdist(pb, pa).min(axis=1) < 1e-8)))
            rows.append({"case": name, "points": len(pa), "points_refined": len(pb), "identical": same})
        except NeumannKitError as exc:
            same = False
            rows.append({"case": name, "error": str(exc)})
        ok &= same
    return [Entry("critical_completeness", None, "doubling seed density never adds critical points", "DERIVED",
                  ok, {"cases": rows}, {"identical_within": 1e-8})]


def claim_convex_u2(ws: Workspace) -> list[Entry]:
    """Lower bound on Neumann domains and Payne points for a convex non-circular domain."""
    spec = DomainSpec.star(OVAL)
    cnt = ws.count(spec, 2)
    part = ws.nodal(spec, 2)
    saddles = [p for p in ws.crit(spec, 2).of_kind(Kind.SADDLE) if p.on_boundary]
    match = len(saddles) == len(part.payne) and all(
        any(_near(q, s.location, 1e-8) for s in saddles) for q in part.payne)
    ok = cnt.total >= 3 and cnt.boundary >= 2 and cnt.interior >= 1 and len(part.payne) == 2 and match
    return [Entry("convex_u2", None, "has at least three Neumann domains", "PAPER", ok,
                  {"neumann_total": cnt.total, "boundary": cnt.boundary, "interior": cnt.interior,
                   "payne_points": [p.tolist() for p in part.payne], "payne_are_saddles": match},
                  {"neumann_at_least": 3, "boundary_at_least": 2, "interior_at_least": 1, "payne_points": 2})]


CLAIMS: dict[str, Callable[[Workspace], list[Entry]]] = {
    "square_u1": claim_square_u1,
    "disk_u1": claim_disk_u1,
    "disk_u2": claim_disk_u2,
    "mfs_disk": claim_mfs_disk,
    **{f"flower_n{n}": _claim_flower(n) for n in FLOWER_NS},
    "gradient_bound": claim_gradient_bound,
    "courant": claim_courant,
    "corollary_nodal": claim_corollary_nodal,
    "identities": claim_identities,
    "annulus_u1": claim_annulus_u1,
    "left_ends": claim_left_ends,
    "audits": claim_audits,
    "critical_completeness": claim_critical_completeness,
    "convex_u2": claim_convex_u2,
}


def _run_claim(cid: str, ws: Workspace) -> list[Entry]:
    t0 = time.perf_counter()
    try:
        entries = CLAIMS[cid](ws)
    except NeumannKitError as exc:
        log.warning("claim %s aborted: %s", cid, exc)
        entries = [Entry(cid, None, "", "DERIVED", False, error=f"{type(exc).__name__}: {exc}")]
    dt = time.perf_counter() - t0
    for e in entries:
        e.seconds = dt / len(entries)
    return entries


def run_suite(ws: Workspace | None = None, only: list[str] | None = None, jobs: int = 1,
              suite: str = "paper") -> VerificationReport:
    if suite != "paper":
        raise ValueError(f"unknown suite {suite!r}")
    ws = ws or Workspace()
    ids = list(CLAIMS)
    if only:
        unknown = [o for o in only if o not in CLAIMS]
        if unknown:
            raise KeyError(f"unknown claim ids {unknown}; known: {ids}")
        ids = [i for i in ids if i in only]
    t0 = time.perf_counter()
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda cid: _run_claim(cid, ws), ids))
    else:
        results = [_run_claim(cid, ws) for cid in ids]
    entries = [e for group in results for e in group]
    return VerificationReport(suite, entries, {"total_seconds": time.perf_counter() - t0})
