"""Planar analytic domains: boundary parameterizations, membership, curvature.

Every domain is either the unit square or a region bounded by polar graphs
``r = R(phi)`` where ``R`` is a trigonometric polynomial (circles included),
optionally with a concentric circular hole.  Boundaries are oriented with
the domain on the left: outer components counterclockwise, holes clockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import ParameterError, UnsupportedError

TWO_PI = 2.0 * math.pi

KINDS = ("square", "disk", "annulus", "flower", "star")

_SQUARE_VERTICES = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


class BoundaryCurve:
    """One closed boundary component parameterized over ``t in [0, 2*pi)``."""

    component_id: int
    corners: tuple[float, ...] = ()

    def position(self, t) -> np.ndarray:
        raise NotImplementedError

    def derivatives(self, t) -> tuple[np.ndarray, np.ndarray]:
        """First and second derivative of the position with respect to t."""
        raise NotImplementedError

    def tangent(self, t) -> np.ndarray:
        d1, _ = self.derivatives(t)
        return d1 / np.linalg.norm(d1, axis=-1, keepdims=True)

    def normal(self, t) -> np.ndarray:
        """Outward unit normal (tangent rotated clockwise)."""
        tan = self.tangent(t)
        return np.stack([tan[..., 1], -tan[..., 0]], axis=-1)

    def curvature(self, t) -> np.ndarray:
        """Signed curvature, positive where the domain is locally convex."""
        d1, d2 = self.derivatives(t)
        cross = d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]
        return cross / np.linalg.norm(d1, axis=-1) ** 3

    def speed(self, t) -> np.ndarray:
        d1, _ = self.derivatives(t)
        return np.linalg.norm(d1, axis=-1)

    def parameter_of(self, pts) -> np.ndarray:
        """Parameter of (points close to) the curve."""
        raise NotImplementedError

    def is_corner(self, t, tol: float = 1e-12) -> np.ndarray:
        t = np.mod(np.asarray(t, dtype=float), TWO_PI)
        out = np.zeros(t.shape, dtype=bool)
        for c in self.corners:
            d = np.abs(t - c)
            out |= np.minimum(d, TWO_PI - d) < tol
        return out

    def sample(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        t = np.linspace(0.0, TWO_PI, count, endpoint=False)
        return t, self.position(t)

    def length(self, count: int = 4096) -> float:
        t = np.linspace(0.0, TWO_PI, count, endpoint=False)
        return float(np.sum(self.speed(t)) * TWO_PI / count)


@dataclass(frozen=True, eq=False)
class PolarCurve(BoundaryCurve):
    """Curve ``r = R(phi)`` with ``R`` a trig polynomial.

    ``orientation`` is +1 for an outer component (``phi = t``) and -1 for a
    hole (``phi = -t``), so the domain always lies on the left.
    """

    component_id: int
    coeffs: tuple[tuple[int, float, float], ...]
    orientation: int = 1
    corners: tuple[float, ...] = ()

    def radius(self, phi, order: int = 0) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)
        out = np.zeros_like(phi)
        for k, c, s in self.coeffs:
            if k == 0:
                if order == 0:
                    out = out + c
                continue
            ck, sk = np.cos(k * phi), np.sin(k * phi)
            if order == 0:
                out = out + c * ck + s * sk
            elif order == 1:
                out = out + k * (-c * sk + s * ck)
            else:
                out = out - k * k * (c * ck + s * sk)
        return out

    def position(self, t) -> np.ndarray:
        phi = self.orientation * np.asarray(t, dtype=float)
        r = self.radius(phi)
        return np.stack([r * np.cos(phi), r * np.sin(phi)], axis=-1)

    def derivatives(self, t):
        phi = self.orientation * np.asarray(t, dtype=float)
        r, r1, r2 = self.radius(phi), self.radius(phi, 1), self.radius(phi, 2)
        c, s = np.cos(phi), np.sin(phi)
        o = self.orientation
        d1 = o * np.stack([r1 * c - r * s, r1 * s + r * c], axis=-1)
        d2 = np.stack([(r2 - r) * c - 2 * r1 * s, (r2 - r) * s + 2 * r1 * c], axis=-1)
        return d1, d2

    def parameter_of(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        phi = np.arctan2(pts[..., 1], pts[..., 0])
        return np.mod(self.orientation * phi, TWO_PI)

    @property
    def is_circle(self) -> bool:
        return all(k == 0 or (c == 0 and s == 0) for k, c, s in self.coeffs)


@dataclass(frozen=True, eq=False)
class SquareCurve(BoundaryCurve):
    """Boundary of the unit square as four segments.

    Side ``s`` covers ``t in [s*pi/2, (s+1)*pi/2)``; corners sit at multiples
    of ``pi/2`` where curvature is reported as NaN.
    """

    component_id: int = 0
    corners: tuple[float, ...] = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)

    def _split(self, t):
        t = np.mod(np.asarray(t, dtype=float), TWO_PI)
        side = np.minimum((t / (0.5 * math.pi)).astype(int), 3)
        frac = t / (0.5 * math.pi) - side
        return side, frac

    def position(self, t) -> np.ndarray:
        side, frac = self._split(t)
        a = _SQUARE_VERTICES[side]
        b = _SQUARE_VERTICES[(side + 1) % 4]
        return a + frac[..., None] * (b - a)

    def derivatives(self, t):
        side, _ = self._split(t)
        d1 = (_SQUARE_VERTICES[(side + 1) % 4] - _SQUARE_VERTICES[side]) * (2.0 / math.pi)
        return d1, np.zeros_like(d1)

    def curvature(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.where(self.is_corner(t), np.nan, 0.0)

    def parameter_of(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        x, y = pts[:, 0], pts[:, 1]
        dist = np.stack([y, 1 - x, 1 - y, x], axis=-1)
        side = np.argmin(np.abs(dist), axis=-1)
        frac = np.choose(side, [x, y, 1 - x, 1 - y])
        return np.mod((side + np.clip(frac, 0.0, 1.0)) * 0.5 * math.pi, TWO_PI)

    def length(self, count: int = 4096) -> float:
        return 4.0


@dataclass(frozen=True)
class DomainSpec:
    """A planar domain from the supported catalogue.

    ``coeffs`` (star bodies only) lists ``(k, cos_coeff, sin_coeff)`` terms of
    the radius function ``R(phi) = sum c_k cos(k phi) + s_k sin(k phi)``.
    """

    kind: str
    n: int | None = None
    a: float | None = None
    coeffs: tuple[tuple[int, float, float], ...] = ()
    _curves: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown domain kind {self.kind!r}")
        if self.kind == "annulus":
            if self.a is None or not 0.0 < self.a < 1.0:
                raise ParameterError(f"annulus inner radius must lie in (0, 1), got {self.a}")
        if self.kind == "flower":
            if self.n is None or int(self.n) != self.n or self.n < 1:
                raise ParameterError(f"flower petal count must be a positive integer, got {self.n}")
            if self.a is None or not 0.25 < self.a < 0.5:
                raise ParameterError(f"flower inner radius must lie in (1/4, 1/2), got {self.a}")
        if self.kind == "star":
            if not self.coeffs:
                raise ParameterError("star body needs radius coefficients")
            norm = tuple((int(k), float(c), float(s)) for k, c, s in self.coeffs)
            if any(k < 0 for k, _, _ in norm):
                raise ParameterError("harmonic indices must be non-negative")
            object.__setattr__(self, "coeffs", norm)
        object.__setattr__(self, "_curves", tuple(self._build_curves()))
        self._validate_curves()

    # -- constructors -------------------------------------------------------
    @classmethod
    def square(cls) -> "DomainSpec":
        return cls("square")

    @classmethod
    def disk(cls) -> "DomainSpec":
        return cls("disk")

    @classmethod
    def annulus(cls, a: float) -> "DomainSpec":
        return cls("annulus", a=float(a))

    @classmethod
    def flower(cls, n: int, a: float) -> "DomainSpec":
        return cls("flower", n=int(n), a=float(a))

    @classmethod
    def star(cls, coeffs: Sequence[Sequence[float]]) -> "DomainSpec":
        return cls("star", coeffs=tuple(tuple(c) for c in coeffs))

    @classmethod
    def from_config(cls, cfg: dict) -> "DomainSpec":
        kind = cfg.get("kind")
        if kind == "square":
            return cls.square()
        if kind == "disk":
            return cls.disk()
        if kind == "annulus":
            return cls.annulus(cfg["a"])
        if kind == "flower":
            return cls.flower(cfg["n"], cfg["a"])
        if kind == "star":
            return cls.star(cfg["coeffs"])
        raise ParameterError(f"unknown domain kind {kind!r}")

    def to_config(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.n is not None:
            out["n"] = self.n
        if self.a is not None:
            out["a"] = self.a
        if self.coeffs:
            out["coeffs"] = [list(c) for c in self.coeffs]
        return out

    @property
    def label(self) -> str:
        if self.kind == "annulus":
            return f"annulus(a={self.a:g})"
        if self.kind == "flower":
            return f"flower(n={self.n}, a={self.a:g})"
        return self.kind

    # -- structure ----------------------------------------------------------
    def _build_curves(self):
        if self.kind == "square":
            return [SquareCurve(0)]
        if self.kind == "disk":
            return [PolarCurve(0, ((0, 1.0, 0.0),))]
        if self.kind == "annulus":
            return [PolarCurve(0, ((0, 1.0, 0.0),)), PolarCurve(1, ((0, self.a, 0.0),), -1)]
        if self.kind == "flower":
            outer = PolarCurve(0, ((0, 1.0, 0.0), (self.n, 0.5, 0.0)))
            return [outer, PolarCurve(1, ((0, self.a, 0.0),), -1)]
        return [PolarCurve(0, self.coeffs)]

    def _validate_curves(self):
        phi = np.linspace(0.0, TWO_PI, 4096, endpoint=False)
        curves = self._curves
        for c in curves:
            if isinstance(c, PolarCurve) and np.min(c.radius(phi)) <= 0.0:
                raise ParameterError(f"{self.label}: radius function not positive")
        if len(curves) == 2:
            outer, hole = curves
            gap = np.min(outer.radius(phi)) - hole.radius(np.zeros(1))[0]
            if gap <= 1e-6:
                raise ParameterError(f"{self.label}: boundary components intersect")

    @property
    def curves(self) -> tuple[BoundaryCurve, ...]:
        return self._curves

    @property
    def hole_radius(self) -> float:
        return float(self.a) if self.kind in ("annulus", "flower") else 0.0

    @property
    def is_smooth(self) -> bool:
        return self.kind != "square"

    @property
    def rotation_order(self) -> int:
        """Order of the rotation group about the origin; 0 means all rotations."""
        if self.kind in ("disk", "annulus"):
            return 0
        if self.kind == "flower":
            return int(self.n)
        return 1

    @property
    def dihedral_order(self) -> int | None:
        """``n`` when the domain is invariant under the dihedral group of order ``2n``
        about the origin (rotations by ``2 pi / n`` and the reflection ``y -> -y``)."""
        if self.kind == "flower":
            return int(self.n)
        if self.kind == "star" and all(s == 0.0 for _, _, s in self.coeffs):
            ks = [k for k, c, _ in self.coeffs if k > 0 and c != 0.0]
            return math.gcd(*ks) if ks else None
        return None

    @property
    def center(self) -> np.ndarray:
        return np.array([0.5, 0.5]) if self.kind == "square" else np.zeros(2)

    def bbox(self) -> tuple[float, float, float, float]:
        if self.kind == "square":
            return (0.0, 1.0, 0.0, 1.0)
        pts = self._curves[0].sample(4096)[1]
        return (pts[:, 0].min(), pts[:, 0].max(), pts[:, 1].min(), pts[:, 1].max())

    def area(self) -> float:
        if self.kind == "square":
            return 1.0
        phi = np.linspace(0.0, TWO_PI, 8192, endpoint=False)
        r = self._curves[0].radius(phi)
        return float(0.5 * np.mean(r * r) * TWO_PI - math.pi * self.hole_radius ** 2)

    def is_convex(self, samples: int = 4096) -> bool:
        if self.kind == "square":
            return True
        if len(self._curves) > 1:
            return False
        t = np.linspace(0.0, TWO_PI, samples, endpoint=False)
        return bool(np.all(self._curves[0].curvature(t) > 0))

    # -- membership ---------------------------------------------------------
    def level(self, pts) -> tuple[np.ndarray, np.ndarray]:
        """Fast signed level function (positive inside) and nearest component.

        Not a Euclidean distance; zero exactly on the boundary.
        """
        pts = np.asarray(pts, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        if self.kind == "square":
            g = np.minimum(np.minimum(x, 1 - x), np.minimum(y, 1 - y))
            return g, np.zeros(g.shape, dtype=int)
        r = np.hypot(x, y)
        phi = np.arctan2(y, x)
        g_out = self._curves[0].radius(phi) - r
        if len(self._curves) == 1:
            return g_out, np.zeros(g_out.shape, dtype=int)
        g_in = r - self.hole_radius
        comp = (g_in < g_out).astype(int)
        return np.minimum(g_out, g_in), comp

    def inside(self, pts) -> np.ndarray:
        return self.level(pts)[0] > 0

    def clearance(self, pts) -> np.ndarray:
        """Signed Euclidean distance to the boundary (negative outside)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        g, _ = self.level(pts)
        sign = np.where(g >= 0, 1.0, -1.0)
        if self.kind == "square":
            x, y = pts[:, 0], pts[:, 1]
            dx = np.maximum(np.maximum(-x, x - 1), 0.0)
            dy = np.maximum(np.maximum(-y, y - 1), 0.0)
            outside = np.hypot(dx, dy)
            return np.where(g >= 0, g, -outside)
        dist = np.full(len(pts), np.inf)
        for c in self._curves:
            dist = np.minimum(dist, _distance_to_curve(c, pts))
        return sign * dist

    def boundary_distance(self, pts) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Unsigned distance, nearest component id and its parameter."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        best = np.full(len(pts), np.inf)
        comp = np.zeros(len(pts), dtype=int)
        par = np.zeros(len(pts))
        for c in self._curves:
            if isinstance(c, SquareCurve):
                t = c.parameter_of(pts)
                d = np.linalg.norm(c.position(t) - pts, axis=-1)
            else:
                d, t = _distance_to_curve(c, pts, return_param=True)
            upd = d < best
            best[upd], comp[upd], par[upd] = d[upd], c.component_id, t[upd]
        return best, comp, par


@lru_cache(maxsize=64)
def _curve_tree(curve: BoundaryCurve, samples: int):
    ts = np.linspace(0.0, TWO_PI, samples, endpoint=False)
    return ts, cKDTree(curve.position(ts))


def _distance_to_curve(curve: BoundaryCurve, pts: np.ndarray, return_param: bool = False,
                       samples: int = 8192):
    ts, tree = _curve_tree(curve, samples)
    _, idx = tree.query(pts)
    t = ts[idx]
    for _ in range(6):
        d1, dd = curve.derivatives(t)
        diff = curve.position(t) - pts
        f = (diff * d1).sum(-1)
        fp = (d1 * d1).sum(-1) + (diff * dd).sum(-1)
        step = np.where(np.abs(fp) > 1e-14, f / np.where(fp == 0, 1, fp), 0.0)
        t = t - np.clip(step, -0.01, 0.01)
    dist = np.linalg.norm(curve.position(t) - pts, axis=-1)
    if return_param:
        return dist, np.mod(t, TWO_PI)
    return dist


def boundary(spec: DomainSpec) -> list[BoundaryCurve]:
    """All boundary components, oriented with the domain on the left."""
    return list(spec.curves)


def contains(spec: DomainSpec, pt) -> tuple[bool, float]:
    """Membership and signed clearance of a single point."""
    c = float(spec.clearance(np.asarray(pt, dtype=float)[None, :])[0])
    return bool(spec.level(np.asarray(pt, dtype=float))[0] > 0), c


def min_mean_curvature_bound(spec: DomainSpec, samples: int = 1_000_000,
                             margin: float = 0.01) -> float:
    """Non-negative theta with boundary curvature >= -theta, padded by ``margin``."""
    if not spec.is_smooth:
        raise UnsupportedError(f"{spec.label} has corners; curvature bound undefined")
    t = np.linspace(0.0, TWO_PI, samples, endpoint=False)
    kmin = min(float(np.min(c.curvature(t))) for c in spec.curves)
    return max(0.0, -kmin) * (1.0 + margin)


def symmetry_rays(n: int) -> list[float]:
    """Direction angles of the rays through the pinches of an n-petal flower.

    Ray ``k`` (k = 1..n) starts at the origin with angle ``pi/n + 2*pi*k/n``;
    angles are returned reduced to ``[0, 2*pi)``.
    """
    if n < 1:
        raise ParameterError("n must be positive")
    return [math.fmod(math.pi / n + TWO_PI * k / n, TWO_PI) for k in range(1, n + 1)]


def distance_to_rays(pts, n: int) -> np.ndarray:
    """Euclidean distance from points to the union of the n symmetry rays."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    best = np.full(len(pts), np.inf)
    for ang in symmetry_rays(n):
        d = np.array([math.cos(ang), math.sin(ang)])
        s = np.maximum(pts @ d, 0.0)
        best = np.minimum(best, np.linalg.norm(pts - s[:, None] * d, axis=-1))
    return best
