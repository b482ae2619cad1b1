"""Dirichlet eigenpairs as evaluable fields.

Closed forms cover the unit square, disk and annulus; other domains go
through :mod:`neumannkit.mfs`.  Every field is normalized to sup-norm one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import specfun
from .errors import OutOfRangeError, PreconditionError, UnsupportedError
from .fields import BesselWaves, SineProducts, terms_from_json
from .geometry import DomainSpec

SCHEMA = "neumannkit.eigenfield/1"
CLOSED_FORM_MARGIN = 0.1
NORM_SPACING = 0.005


@dataclass(frozen=True, eq=False)
class EigenField:
    """An eigenpair ``(lam, u)`` with ``-Laplace u = lam u`` and ``u = 0`` on the boundary.

    ``symmetry`` is ``n`` when ``u`` is invariant under the dihedral group
    generated by rotation through ``2 pi / n`` and reflection in the x-axis.
    """

    domain: DomainSpec
    lam: float
    index: int
    backend: str
    terms: object
    extension_margin: float
    x_max: tuple[float, float]
    sup_value: float = 1.0
    symmetry: int | None = None
    meta: dict = field(default_factory=dict)

    def value(self, pts) -> np.ndarray:
        return self.terms.value(pts)

    def evaluate(self, pts):
        """``(u, grad, hessian)`` at an array of points, without range checks."""
        return self.terms.evaluate(pts)

    def gradient(self, pts) -> np.ndarray:
        return self.terms.gradient(pts)

    @property
    def k(self) -> float:
        return math.sqrt(self.lam)

    def with_sign(self, sign: float) -> "EigenField":
        if sign > 0:
            return self
        return EigenField(self.domain, self.lam, self.index, self.backend, self.terms.scaled(-1.0),
                          self.extension_margin, self.x_max, self.sup_value, self.symmetry, dict(self.meta))

    # -- persistence --------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "domain": self.domain.to_config(),
            "lambda": repr(self.lam),
            "index": self.index,
            "backend": self.backend,
            "extension_margin": repr(self.extension_margin),
            "normalization": {"sup": repr(self.sup_value), "x_max": [repr(float(v)) for v in self.x_max]},
            "symmetry": self.symmetry,
            "meta": self.meta,
            "terms": self.terms.to_json(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "EigenField":
        if doc.get("schema") != SCHEMA:
            raise ValueError(f"unsupported eigenfield schema {doc.get('schema')!r}")
        norm = doc["normalization"]
        return cls(
            domain=DomainSpec.from_config(doc["domain"]),
            lam=float(doc["lambda"]),
            index=int(doc["index"]),
            backend=doc["backend"],
            terms=terms_from_json(doc["terms"]),
            extension_margin=float(doc["extension_margin"]),
            x_max=tuple(float(v) for v in norm["x_max"]),
            sup_value=float(norm["sup"]),
            symmetry=doc.get("symmetry"),
            meta=doc.get("meta", {}),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1))

    @classmethod
    def load(cls, path) -> "EigenField":
        return cls.from_json(json.loads(Path(path).read_text()))


def evaluate(fld: EigenField, pt):
    """Value, gradient and Hessian at one point inside the extension margin."""
    p = np.asarray(pt, dtype=float)
    clear = float(fld.domain.clearance(p[None, :])[0])
    if clear < -fld.extension_margin:
        raise OutOfRangeError(f"point {p.tolist()} is {-clear:.3g} outside the domain "
                              f"(margin {fld.extension_margin:.3g})")
    u, g, h = fld.evaluate(p[None, :])
    return float(u[0]), g[0], h[0]


# ---------------------------------------------------------------------------
# grids and normalization

def domain_grid(spec: DomainSpec, h: float, sector: int | None = None, pad: float = 0.0) -> np.ndarray:
    """Lattice points of spacing ``h`` inside the domain.

    With ``sector=n`` only the wedge ``0 <= phi <= pi/n`` is kept (one
    fundamental region of the dihedral symmetry).
    """
    x0, x1, y0, y1 = spec.bbox()
    if sector:
        y0 = 0.0
    xs = np.arange(x0 - pad, x1 + pad + 0.5 * h, h)
    ys = np.arange(y0 - pad, y1 + pad + 0.5 * h, h)
    if sector:
        wedge = math.pi / sector
        out = []
        for lo in range(0, len(ys), 256):
            X, Y = np.meshgrid(xs, ys[lo:lo + 256])
            pts = np.column_stack([X.ravel(), Y.ravel()])
            ang = np.arctan2(pts[:, 1], pts[:, 0])
            keep = (ang >= -1e-12) & (ang <= wedge + 1e-12)
            pts = pts[keep]
            out.append(pts[spec.level(pts)[0] > 0])
        return np.concatenate(out) if out else np.zeros((0, 2))
    X, Y = np.meshgrid(xs, ys)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    return pts[spec.level(pts)[0] > 0]


def newton_polish(terms, spec: DomainSpec, x0, max_move: float, iters: int = 40) -> np.ndarray:
    """Newton iteration on grad u = 0 started at ``x0``; falls back to ``x0``."""
    x = np.asarray(x0, dtype=float).copy()
    for _ in range(iters):
        _, g, hess = terms.evaluate(x[None, :])
        try:
            step = np.linalg.solve(hess[0], g[0])
        except np.linalg.LinAlgError:
            break
        x = x - step
        if np.linalg.norm(step) < 1e-15:
            break
    if np.linalg.norm(x - x0) > max_move or spec.level(x)[0] < -1e-12:
        return np.asarray(x0, dtype=float)
    return x


def sup_norm(terms, spec: DomainSpec, h: float = NORM_SPACING, sector: int | None = None):
    """Grid sup of |u| with Newton polish; returns (value, argmax, signed value)."""
    pts = domain_grid(spec, h, sector)
    vals = terms.value(pts)
    mag = np.abs(vals)
    order = np.argsort(-mag)[:8]
    best = None
    for i in order:
        x = newton_polish(terms, spec, pts[i], 2 * h)
        v = float(terms.value(x[None, :])[0])
        if best is None or abs(v) > abs(best[2]) * (1 + 1e-12):
            best = (abs(v), x, v)
    # the positive and negative lobes can tie (e.g. J_1 cos(phi)); then the
    # extremum with the larger (x, y) gets the positive sign
    xp = newton_polish(terms, spec, pts[int(np.argmax(vals))], 2 * h)
    xn = newton_polish(terms, spec, pts[int(np.argmin(vals))], 2 * h)
    vp, vn = terms.value(np.array([xp, xn]))
    if vp > 0 > vn and abs(vp + vn) < 1e-8 * best[0]:
        if tuple(np.round(xn, 9)) > tuple(np.round(xp, 9)):
            return best[0], xn, -best[0]
        return best[0], xp, best[0]
    return best


def normalized(spec: DomainSpec, lam: float, index: int, backend: str, terms, margin: float,
               symmetry: int | None = None, meta: dict | None = None, fix_sign: bool = True) -> EigenField:
    """Scale ``terms`` so that ``max |u| = 1`` and ``u(x_max) = +1``."""
    sup, xmax, signed = sup_norm(terms, spec, sector=symmetry)
    if sup <= 0:
        raise PreconditionError("field vanishes identically on the grid")
    scale = 1.0 / sup
    if fix_sign and signed < 0:
        scale = -scale
    return EigenField(spec, float(lam), int(index), backend, terms.scaled(scale), float(margin),
                      (float(xmax[0]), float(xmax[1])), 1.0, symmetry, dict(meta or {}))


# ---------------------------------------------------------------------------
# closed forms

def _square_modes(count: int):
    modes = []
    top = int(math.ceil(math.sqrt(count))) + 3
    for m in range(1, top + 1):
        for n in range(1, top + 1):
            modes.append((m * m + n * n, m, n))
    modes.sort()
    return [(m, n) for _, m, n in modes[:count]]


def _disk_modes(count: int):
    cand = []
    for m in range(0, count + 2):
        for j in range(1, count + 2):
            cand.append((specfun.bessel_root(m, j), m, j))
    cand.sort()
    out = []
    for z, m, j in cand:
        out.append((z, m, j, "cos"))
        if m > 0:
            out.append((z, m, j, "sin"))
        if len(out) >= count:
            break
    return out[:count]


def _annulus_modes(a: float, count: int):
    cand = []
    for m in range(0, count + 2):
        for j in range(1, count + 2):
            cand.append((specfun.annulus_radial_root(a, j, m), m, j))
    cand.sort()
    out = []
    for z, m, j in cand:
        out.append((z, m, j, "cos"))
        if m > 0:
            out.append((z, m, j, "sin"))
        if len(out) >= count:
            break
    return out[:count]


def closed_form(spec: DomainSpec, k: int) -> EigenField:
    """The k-th eigenpair (sorted ascending) of the square, disk or annulus.

    Degenerate pairs are split into the cosine branch (lower index) and the
    sine branch.
    """
    if k < 1:
        raise UnsupportedError("k must be a positive integer")
    if spec.kind == "square":
        m, n = _square_modes(k)[k - 1]
        lam = math.pi ** 2 * (m * m + n * n)
        terms = SineProducts([(m, n)], [1.0])
        return normalized(spec, lam, k, "closed_form", terms, CLOSED_FORM_MARGIN,
                          meta={"modes": [m, n]}, fix_sign=(k == 1))
    if spec.kind == "disk":
        z, m, j, branch = _disk_modes(k)[k - 1]
        coeff = 1.0 if branch == "cos" else -1j
        terms = BesselWaves(z, [[0.0, 0.0]], ["J"], [m], [coeff])
        return normalized(spec, z * z, k, "closed_form", terms, CLOSED_FORM_MARGIN,
                          meta={"modes": [m, j], "branch": branch, "radial": m == 0})
    if spec.kind == "annulus":
        a = spec.a
        z, m, j, branch = _annulus_modes(a, k)[k - 1]
        rot = 1.0 if branch == "cos" else -1j
        cj = specfun.yn(m, z * a)
        cy = -specfun.jn(m, z * a)
        terms = BesselWaves(z, [[0.0, 0.0], [0.0, 0.0]], ["J", "Y"], [m, m], [cj * rot, cy * rot])
        return normalized(spec, z * z, k, "closed_form", terms, CLOSED_FORM_MARGIN,
                          meta={"modes": [m, j], "branch": branch, "radial": m == 0})
    raise UnsupportedError(f"no closed form for {spec.label}")
