"""Method of fundamental solutions for Dirichlet eigenpairs.

The field is a combination of ``Y_0(sqrt(lam) |x - y_j|)`` with charges
``y_j`` outside the closed domain.  Eigenvalues are the minima of the sine of
the angle between the basis span and functions vanishing on the boundary:
the stacked boundary/interior matrix is orthonormalized and ``sigma(lam)``
is the smallest singular value of its boundary block, which removes the
spurious minima caused by the basis collapsing towards zero.

With ``symmetry=n`` each basis function is summed over the dihedral group
of order ``2n`` and only one fundamental wedge is collocated; this yields
exactly symmetric fields (ground states of flower domains).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.stats import qmc

from .eigenfield import EigenField, domain_grid, normalized
from .errors import BackendError, NoEigenvalueFound, ParameterError, UnsupportedError
from .fields import BesselWaves
from .geometry import DomainSpec, PolarCurve

log = logging.getLogger(__name__)

SIGMA_THRESHOLD = 1e-6
GOLDEN = 0.5 * (math.sqrt(5.0) - 1.0)


def dihedral_group(n: int | None) -> np.ndarray:
    """Rotation/reflection matrices; identity only when ``n`` is falsy."""
    if not n:
        return np.eye(2)[None]
    mats = []
    for k in range(n):
        c, s = math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n)
        rot = np.array([[c, -s], [s, c]])
        mats.append(rot)
        mats.append(rot @ np.diag([1.0, -1.0]))
    return np.array(mats)


@dataclass
class Layout:
    charges: np.ndarray          # representative charges, (M, 2)
    collocation: np.ndarray      # boundary points, (Nb, 2)
    probes: np.ndarray           # interior points, (Ni, 2)
    group: np.ndarray            # (G, 2, 2)
    charge_distance: np.ndarray  # offset of each charge from the boundary

    @property
    def min_distance(self) -> float:
        return float(self.charge_distance.min())


class _OffsetProfile:
    """Charge offset ``d(t)`` tabulated on a periodic grid.

    Starts from ``d_max / (1 + c d_max max(-kappa, 0))`` and shrinks wherever
    the charge would come closer than ``0.6 d`` to another boundary part
    (narrow exterior gaps between petals).
    """

    def __init__(self, spec: DomainSpec, curve: PolarCurve, d_max: float, concave_factor: float,
                 samples: int = 2048):
        t = np.linspace(0.0, 2 * math.pi, samples, endpoint=False)
        kappa = curve.curvature(t)
        d = d_max / (1.0 + concave_factor * d_max * np.maximum(-kappa, 0.0))
        base = curve.position(t)
        nrm = curve.normal(t)
        for _ in range(60):
            q = base + d[:, None] * nrm
            clear = np.abs(spec.clearance(q))
            bad = clear < 0.6 * d
            if not bad.any():
                break
            d = np.where(bad, 0.8 * d, d)
        # smooth the shrink so point spacing varies gently
        for _ in range(3):
            d = np.minimum(d, 0.5 * (np.roll(d, 1) + np.roll(d, -1)) * 1.05)
        self.t = t
        self.d = d

    def __call__(self, t) -> np.ndarray:
        return np.interp(np.mod(t, 2 * math.pi), self.t, self.d, period=2 * math.pi)


def _quantile_params(curve, t0: float, t1: float, count: int, offset: _OffsetProfile,
                     fine: int = 20000) -> np.ndarray:
    """Parameters spaced uniformly in ``int speed / offset dt`` (midpoint rule)."""
    t = np.linspace(t0, t1, fine + 1)
    w = curve.speed(t) / offset(t)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(t))])
    targets = (np.arange(count) + 0.5) / count * cum[-1]
    return np.interp(targets, cum, t)


def _component_range(curve: PolarCurve, symmetry: int | None) -> tuple[float, float]:
    if not symmetry:
        return 0.0, 2 * math.pi
    wedge = math.pi / symmetry
    if curve.orientation > 0:
        return 0.0, wedge
    return 2 * math.pi - wedge, 2 * math.pi


def _weight(curve, t0, t1, offset: _OffsetProfile) -> float:
    t = np.linspace(t0, t1, 4001)
    w = curve.speed(t) / offset(t)
    return float(np.trapezoid(w, t))


def _diameter(curve) -> float:
    pts = curve.sample(512)[1]
    return float(np.max(np.linalg.norm(pts[:, None] - pts[None], axis=-1)))


def build_layout(spec: DomainSpec, charges: int, collocation: int | None = None, probes: int = 40,
                 symmetry: int | None = None, d_scale: float = 0.15, concave_factor: float = 2.0,
                 seed: int = 7) -> Layout:
    """Charge, collocation and probe placement.

    Charges sit at distance ``d(t) = d_max / (1 + c d_max max(-kappa, 0))``
    along the outward normal, with ``d_max = d_scale * component diameter``;
    the reduction keeps charges short of the focal points of concave arcs.
    Points are spaced uniformly in the measure ``ds / d(t)`` so concave
    regions are resolved.  ``charges`` and ``collocation`` count points in
    the collocated region (a fundamental wedge when ``symmetry`` is set).
    """
    if not spec.is_smooth:
        raise UnsupportedError(f"{spec.label}: fundamental solutions need a smooth boundary")
    collocation = collocation or 2 * charges
    curves = spec.curves
    ranges = [_component_range(c, symmetry) for c in curves]
    offsets = [_OffsetProfile(spec, c, d_scale * _diameter(c), concave_factor) for c in curves]
    weights = [_weight(c, *rg, off) for c, rg, off in zip(curves, ranges, offsets)]
    total = sum(weights)
    q_pts, c_pts, q_dist = [], [], []
    for c, rg, offp, w in zip(curves, ranges, offsets, weights):
        nq = max(6, int(round(charges * w / total)))
        nc = max(12, int(round(collocation * w / total)))
        tq = _quantile_params(c, *rg, nq, offp)
        off = offp(tq)
        q_pts.append(c.position(tq) + off[:, None] * c.normal(tq))
        q_dist.append(off)
        if symmetry:
            # include the wedge edges: mirror lines carry independent conditions
            tc = np.linspace(rg[0], rg[1], nc)
        else:
            tc = _quantile_params(c, *rg, nc, offp)
        c_pts.append(c.position(tc))
    q = np.concatenate(q_pts)
    qd = np.concatenate(q_dist)
    outside = spec.level(q)[0] < 0
    if not np.all(outside):
        raise BackendError(f"{int(np.sum(~outside))} charges fall inside {spec.label}")
    sampler = qmc.Halton(d=2, seed=seed)
    x0, x1, y0, y1 = spec.bbox()
    if symmetry:
        y0 = 0.0
    found = []
    while sum(len(f) for f in found) < probes:
        raw = sampler.random(max(64, 4 * probes))
        p = np.column_stack([x0 + (x1 - x0) * raw[:, 0], y0 + (y1 - y0) * raw[:, 1]])
        keep = spec.level(p)[0] > 0
        if symmetry:
            ang = np.arctan2(p[:, 1], p[:, 0])
            keep &= (ang > 0) & (ang < math.pi / symmetry)
        found.append(p[keep])
    probe_pts = np.concatenate(found)[:probes]
    return Layout(q, np.concatenate(c_pts), probe_pts, dihedral_group(symmetry), qd)


class MFSBasis:
    """Fundamental-solution basis on a fixed layout (distances cached)."""

    def __init__(self, layout: Layout):
        self.layout = layout
        images = np.einsum("gij,mj->gmi", layout.group, layout.charges)  # (G, M, 2)
        self.images = images
        self._rho_b = self._distances(layout.collocation)
        self._rho_i = self._distances(layout.probes)

    def _distances(self, pts):
        d = pts[:, None, None, :] - self.images[None, :, :, :]
        return np.linalg.norm(d, axis=-1)  # (N, G, M)

    def matrices(self, lam: float):
        k = math.sqrt(lam)
        a_b = special.y0(k * self._rho_b).sum(axis=1)
        a_i = special.y0(k * self._rho_i).sum(axis=1)
        return a_b, a_i

    def subspace(self, lam: float, rtol: float = 1e-14):
        a_b, a_i = self.matrices(lam)
        scale = 1.0 / np.linalg.norm(a_b, axis=0)
        stacked = np.vstack([a_b, a_i]) * scale
        u, s, vt = np.linalg.svd(stacked, full_matrices=False)
        keep = s > rtol * s[0]
        if keep.sum() < 2:
            raise BackendError(f"basis rank collapsed at lambda={lam:.6g}")
        ub = u[: len(a_b), keep]
        _, sb, yt = np.linalg.svd(ub, full_matrices=False)
        return sb, yt, s[keep], vt[keep], scale

    def sigma(self, lam: float) -> float:
        return float(self.subspace(lam)[0][-1])

    def coefficients(self, lam: float, which: int = 1) -> list[np.ndarray]:
        """Coefficient vectors for the ``which`` smallest singular directions."""
        sb, yt, s, vt, scale = self.subspace(lam)
        out = []
        for j in range(1, which + 1):
            y = yt[-j]
            out.append(scale * (vt.T @ (y / s)))
        return out

    def field_terms(self, lam: float, coeffs: np.ndarray) -> BesselWaves:
        g = self.layout.group.shape[0]
        centers = self.images.reshape(-1, 2)
        c = np.tile(coeffs, g)
        return BesselWaves(math.sqrt(lam), centers, ["Y"] * len(centers), [0] * len(centers), c)


def _golden_min(f, a: float, b: float, tol: float = 1e-12, max_iter: int = 200):
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) < tol * max(1.0, abs(a)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def scan_minima(basis: MFSBasis, lo: float, hi: float, step: float) -> list[tuple[float, float]]:
    """Golden-section refined local minima of sigma on a uniform scan."""
    grid = np.arange(lo, hi + 0.5 * step, step)
    vals = np.array([basis.sigma(x) for x in grid])
    out = []
    for i in range(1, len(grid) - 1):
        if vals[i] <= vals[i - 1] and vals[i] < vals[i + 1]:
            out.append(_golden_min(basis.sigma, grid[i - 1], grid[i + 1]))
    return out


def _select_even(basis: MFSBasis, lam: float, vecs, probes: np.ndarray) -> np.ndarray:
    """Member of a degenerate eigenspace that is even under y -> -y."""
    mirrored = probes * np.array([1.0, -1.0])
    cols = []
    for v in vecs:
        t = basis.field_terms(lam, v)
        cols.append(t.value(probes) - t.value(mirrored))
    m = np.column_stack(cols)
    _, _, vt = np.linalg.svd(m)
    w = vt[-1]
    return sum(wi * v for wi, v in zip(w, vecs))


def mfs_solve(spec: DomainSpec, window: tuple[float, float], charges: int = 80,
              collocation: int | None = None, interior_probes: int = 40, symmetry: int | None = None,
              d_scale: float = 0.15, scan_step: float = 0.02, first_index: int = 1,
              threshold: float = SIGMA_THRESHOLD) -> list[tuple[float, EigenField]]:
    """Eigenpairs with eigenvalue inside ``window``.

    Each returned field is normalized; ``meta`` records ``sigma`` and the
    multiplicity (number of singular values below ``threshold`` at the
    minimum).  Degenerate eigenspaces are represented by the member that is
    even in ``y``.
    """
    lo, hi = window
    if not 0 < lo < hi:
        raise ParameterError(f"bad eigenvalue window {window}")
    if symmetry and (not spec.dihedral_order or spec.dihedral_order % symmetry):
        raise ParameterError(f"{spec.label} lacks dihedral symmetry of order {symmetry}")
    layout = build_layout(spec, charges, collocation, interior_probes, symmetry, d_scale)
    basis = MFSBasis(layout)
    minima = scan_minima(basis, lo, hi, scan_step)
    found = [(lam, s) for lam, s in minima if s < threshold]
    if not found:
        best = min((s for _, s in minima), default=float("nan"))
        raise NoEigenvalueFound(f"{spec.label}: no sigma minimum below {threshold:g} in {window} "
                                f"(best {best:.3g})")
    results = []
    index = first_index
    for lam, s in found:
        fld = _eigenfield(spec, basis, lam, s, index, symmetry, d_scale, threshold)
        results.append((lam, fld))
        index += fld.meta["multiplicity"]
    return results


def _eigenfield(spec, basis: MFSBasis, lam: float, s: float, index: int, symmetry, d_scale: float,
                threshold: float = SIGMA_THRESHOLD) -> EigenField:
    layout = basis.layout
    sb = basis.subspace(lam)[0]
    mult = max(1, int(np.sum(sb < max(threshold, 1e3 * s))))
    vecs = basis.coefficients(lam, mult)
    coeff = vecs[0] if mult == 1 else _select_even(basis, lam, vecs, layout.probes)
    terms = basis.field_terms(lam, coeff)
    meta = {"sigma": float(s), "multiplicity": mult, "charges": int(len(layout.charges)),
            "collocation": int(len(layout.collocation)), "d_scale": d_scale}
    log.info("%s: lambda=%.12g sigma=%.3g multiplicity=%d", spec.label, lam, s, mult)
    return normalized(spec, lam, index, "mfs", terms, 0.5 * layout.min_distance,
                      symmetry=symmetry, meta=meta)


def faber_krahn_bound(spec: DomainSpec) -> float:
    """Lower bound ``pi j01^2 / area`` for the first eigenvalue."""
    from .specfun import bessel_root
    return math.pi * bessel_root(0, 1) ** 2 / spec.area()


def ground_state(spec: DomainSpec, charges: int = 120, collocation: int | None = None,
                 interior_probes: int = 60, symmetry: int | None = None, d_scale: float = 0.15,
                 coarse_ratio: float = 1.03, upper: float | None = None) -> EigenField:
    """First eigenpair.

    A geometric scan (ratio ``coarse_ratio``) upward from the Faber-Krahn
    bound brackets the first sigma minimum and golden section refines it.
    The field must be single-signed.
    """
    # start well below the bound: for the disk it is attained, and the first
    # minimum must be bracketed from the left
    lo = faber_krahn_bound(spec) * 0.9
    basis = MFSBasis(build_layout(spec, charges, collocation, interior_probes, symmetry, d_scale))
    hi = upper or lo * 40
    x = lo
    prev2 = prev = None
    while x < hi:
        s = basis.sigma(x)
        if prev is not None and prev2 is not None and prev[1] < prev2[1] and prev[1] <= s:
            lam, smin = _golden_min(basis.sigma, prev2[0], x)
            if smin < SIGMA_THRESHOLD:
                fld = _eigenfield(spec, basis, lam, smin, 1, symmetry, d_scale)
                grid = domain_grid(spec, 0.02, sector=symmetry)
                if fld.value(grid).min() < -1e-8:
                    raise BackendError(f"{spec.label}: first sigma minimum {lam:.8g} is not sign-definite")
                return fld
        prev2, prev = prev, (x, s)
        x *= coarse_ratio
    raise NoEigenvalueFound(f"{spec.label}: no eigenvalue below {hi:.4g}")
