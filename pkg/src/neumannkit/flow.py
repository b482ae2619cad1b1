"""Integral curves of the gradient flow and their ends.

Curves are integrated in arc length, ``dx/ds = +-grad u / |grad u|``, with
the Dormand-Prince 5(4) pair.  ``Backward`` follows ``+grad u`` (ascending,
i.e. the flow of ``-grad u`` in negative time); ``Forward`` descends.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .critical import CircleKind, CriticalCircle, CriticalPoint, CriticalSet, Kind
from .eigenfield import EigenField
from .errors import PreconditionError, UnsupportedError

TOL = 1e-10
MAX_STEP = 0.01
R_CAP = 1e-3
EPS_CAP = 1e-7
EPS_LAUNCH = 1e-5
STEP_BUDGET = 1_000_000
ALIGN = 1e-2
MONOTONE_TOL = 1e-12

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


class Direction(str, enum.Enum):
    BACKWARD = "backward"  # ascending u
    FORWARD = "forward"    # descending u

    @property
    def sign(self) -> float:
        return 1.0 if self is Direction.BACKWARD else -1.0


class EndKind(str, enum.Enum):
    CRITICAL = "critical"
    CIRCLE = "circle"
    BOUNDARY = "boundary"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True, eq=False)
class EndPoint:
    kind: EndKind
    location: tuple[float, float] | None = None
    point: CriticalPoint | None = None
    circle: CriticalCircle | None = None
    angle: float | None = None
    component: int | None = None
    param: float | None = None
    reason: str = ""

    @property
    def resolved(self) -> bool:
        return self.kind is not EndKind.UNRESOLVED

    def same_as(self, other: "EndPoint", tol: float = 1e-6) -> bool:
        """Same critical point or circle; boundary ends match by component only."""
        if self.kind is not other.kind:
            return False
        if self.kind is EndKind.CRITICAL:
            return self.point is other.point
        if self.kind is EndKind.CIRCLE:
            return self.circle is other.circle
        if self.kind is EndKind.BOUNDARY:
            return self.component == other.component
        return False

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "location": list(self.location) if self.location else None}
        if self.kind is EndKind.CIRCLE:
            out.update(radius=self.circle.radius, angle=self.angle)
        elif self.kind is EndKind.BOUNDARY:
            out.update(component=self.component, param=self.param)
        elif self.kind is EndKind.UNRESOLVED:
            out.update(reason=self.reason)
        return out


@dataclass(frozen=True, eq=False)
class Trajectory:
    start: tuple[float, float]
    direction: Direction
    points: np.ndarray
    values: np.ndarray
    end: EndPoint
    length: float
    origin: CriticalPoint | None = None
    meta: dict = field(default_factory=dict)

    def is_monotone(self, tol: float = MONOTONE_TOL) -> bool:
        d = np.diff(self.values) * self.direction.sign
        return bool(np.all(d > -tol))

    def max_spacing(self) -> float:
        if len(self.points) < 2:
            return 0.0
        return float(np.max(np.linalg.norm(np.diff(self.points, axis=0), axis=1)))

    def to_json(self) -> dict:
        return {
            "start": list(self.start), "direction": self.direction.value,
            "polyline": self.points.tolist(), "end": self.end.to_json(), "length": self.length,
        }


class Tracer:
    """Traces gradient curves of one field against a fixed critical set."""

    def __init__(self, fld: EigenField, crit: CriticalSet, tol: float = TOL, max_step: float = MAX_STEP,
                 r_cap: float = R_CAP, budget: int = STEP_BUDGET):
        self.field = fld
        self.crit = crit
        self.tol = tol
        self.max_step = max_step
        self.r_cap = r_cap
        self.budget = budget
        self.eps_cap = EPS_CAP * crit.grad_scale
        pts = crit.points
        self._loc = np.array([p.location for p in pts]).reshape(-1, 2)
        self._val = np.array([p.value for p in pts])

    # -- vector field -------------------------------------------------------
    def _f(self, x: np.ndarray, sign: float) -> np.ndarray:
        g = self.field.gradient(x[None, :])[0]
        n = math.hypot(g[0], g[1])
        if n == 0.0:
            return np.zeros(2)
        return sign * g / n

    def _rk_step(self, x, h, k1, sign):
        ks = [k1]
        for i in range(1, 7):
            y = x + h * sum(a * k for a, k in zip(_A[i], ks))
            ks.append(self._f(y, sign))
        ks = np.array(ks)
        y5 = x + h * (_B5 @ ks)
        err = h * np.linalg.norm((_B5 - _B4) @ ks)
        return y5, err, ks[6]

    # -- termination tests ---------------------------------------------------
    def _capture(self, x: np.ndarray, u: float, sign: float, exclude) -> EndPoint | None:
        if len(self._loc):
            d = np.linalg.norm(self._loc - x, axis=1)
            for i in np.nonzero(d < self.r_cap)[0]:
                p = self.crit.points[i]
                if p is exclude or sign * (self._val[i] - u) <= 0:
                    continue
                if p.kind is Kind.SADDLE:
                    # must arrive along the axis on which the saddle attracts this direction
                    axis = p.eigvecs[:, 0] if sign > 0 else p.eigvecs[:, 1]
                    other = p.eigvecs[:, 1] if sign > 0 else p.eigvecs[:, 0]
                    rel = (x - p.xy) / max(d[i], 1e-300)
                    if abs(rel @ other) > ALIGN or abs(rel @ axis) < 1 - ALIGN:
                        continue
                elif p.kind is Kind.DEGENERATE:
                    continue
                return EndPoint(EndKind.CRITICAL, p.location, point=p)
        r = math.hypot(x[0], x[1])
        for c in self.crit.circles:
            if abs(r - c.radius) < self.r_cap and sign * (c.value - u) > 0:
                want = CircleKind.MAX_CURVE if sign > 0 else CircleKind.MIN_CURVE
                if c.kind is want:
                    ang = math.atan2(x[1], x[0])
                    return EndPoint(EndKind.CIRCLE, tuple(c.point(ang)), circle=c, angle=ang)
        return None

    def _boundary_hit(self, x, h, k1, sign) -> np.ndarray:
        """Bisect the step length so the endpoint lands on the boundary."""
        spec = self.field.domain
        lo, hi = 0.0, h
        y_hi = self._rk_step(x, hi, k1, sign)[0]
        while hi - lo > 1e-11:
            mid = 0.5 * (lo + hi)
            y = self._rk_step(x, mid, k1, sign)[0]
            if spec.level(y)[0] > 0:
                lo = mid
            else:
                hi, y_hi = mid, y
        return y_hi

    # -- main loop ----------------------------------------------------------
    def trace(self, x0, direction: Direction, origin: CriticalPoint | None = None) -> Trajectory:
        direction = Direction(direction)
        sign = direction.sign
        fld, spec = self.field, self.field.domain
        x = np.asarray(x0, dtype=float).copy()
        g0 = fld.gradient(x[None, :])[0]
        if origin is None and np.linalg.norm(g0) <= self.eps_cap:
            raise PreconditionError(f"start point {x.tolist()} is critical")
        pts = [x.copy()]
        vals = [float(fld.value(x[None, :])[0])]
        if origin is not None:
            pts.insert(0, origin.xy.copy())
            vals.insert(0, origin.value)
        length = 0.0
        h = min(self.max_step, 1e-3)
        k1 = self._f(x, sign)
        end = None
        steps = 0
        while end is None:
            steps += 1
            if steps > self.budget:
                end = EndPoint(EndKind.UNRESOLVED, tuple(x), reason="step budget exceeded")
                break
            y, err, k7 = self._rk_step(x, h, k1, sign)
            if err > self.tol:
                h *= max(0.1, 0.9 * (self.tol / err) ** 0.2)
                if h < 1e-14:
                    end = EndPoint(EndKind.UNRESOLVED, tuple(x), reason="step size underflow")
                continue
            if spec.level(y)[0] <= 0:
                y = self._boundary_hit(x, h, k1, sign)
                _, comp, par = spec.boundary_distance(y[None, :])
                pts.append(y)
                vals.append(float(fld.value(y[None, :])[0]))
                length += float(np.linalg.norm(y - x))
                end = EndPoint(EndKind.BOUNDARY, tuple(y), component=int(comp[0]), param=float(par[0]))
                break
            u = float(fld.value(y[None, :])[0])
            length += float(np.linalg.norm(y - x))
            x, k1 = y, k7
            pts.append(x.copy())
            vals.append(u)
            end = self._capture(x, u, sign, origin)
            if end is not None:
                target = np.asarray(end.location)
                length += float(np.linalg.norm(target - x))
                pts.append(target)
                vals.append(end.point.value if end.point is not None else end.circle.value)
                break
            if np.linalg.norm(k1) == 0.0:
                end = EndPoint(EndKind.UNRESOLVED, tuple(x), reason="stalled at an unlisted critical point")
                break
            grow = 5.0 if err == 0 else min(5.0, 0.9 * (self.tol / err) ** 0.2)
            h = min(self.max_step, h * max(1.0, grow))
        return Trajectory((float(x0[0]), float(x0[1])), direction, np.array(pts), np.array(vals), end, length,
                          origin=origin)

    def left_end(self, x) -> EndPoint:
        return self.trace(x, Direction.BACKWARD).end

    def separatrices(self, saddle: CriticalPoint, eps: float = EPS_LAUNCH) -> list[Trajectory]:
        """The separatrices of a Morse saddle that start inside the domain.

        Launches along the eigenvector of the positive Hessian eigenvalue are
        traced Backward (ascending); along the negative one, Forward.
        """
        if saddle.kind is not Kind.SADDLE:
            raise UnsupportedError(f"{saddle.kind.value} point at {saddle.location} has no separatrices")
        out = []
        spec = self.field.domain
        neg, pos = saddle.eigvecs[:, 0], saddle.eigvecs[:, 1]
        for vec, direction in ((pos, Direction.BACKWARD), (neg, Direction.FORWARD)):
            for s in (1.0, -1.0):
                x = saddle.xy + s * eps * vec
                if spec.level(x[None, :])[0][0] <= 0:
                    continue
                out.append(self.trace(x, direction, origin=saddle))
        return out


def trace(fld: EigenField, crit: CriticalSet, x0, direction) -> Trajectory:
    return Tracer(fld, crit).trace(x0, direction)


def left_end(fld: EigenField, crit: CriticalSet, x) -> EndPoint:
    return Tracer(fld, crit).left_end(x)


def separatrices(fld: EigenField, crit: CriticalSet, saddle: CriticalPoint, eps: float = EPS_LAUNCH):
    return Tracer(fld, crit).separatrices(saddle, eps)
