"""Analytic scalar fields with exact gradients and Hessians.

Two representations cover every backend:

* :class:`SineProducts` -- finite sums ``c * sin(m pi x) sin(n pi y)``
  (unit square closed forms);
* :class:`BesselWaves` -- finite sums ``Re(c * Z_m(k rho) exp(i m psi))``
  about arbitrary centers, with ``Z`` either ``J`` or ``Y``.  Disk and
  annulus closed forms and fundamental-solution expansions are all of
  this type.

Derivatives of the Bessel waves use the ladder identities
``(d_x + i d_y) W_m = -k W_{m+1}`` and ``(d_x - i d_y) W_m = k W_{m-1}``,
which stay regular at the expansion center.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

_CHUNK = 2_000_000


class SineProducts:
    def __init__(self, modes, coeffs):
        self.modes = np.asarray(modes, dtype=float).reshape(-1, 2)
        self.coeffs = np.asarray(coeffs, dtype=float).reshape(-1)

    def scaled(self, factor: float) -> "SineProducts":
        return SineProducts(self.modes, self.coeffs * factor)

    def value(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        out = np.zeros(pts.shape[:-1])
        for (m, n), c in zip(self.modes, self.coeffs):
            out += c * np.sin(m * math.pi * pts[..., 0]) * np.sin(n * math.pi * pts[..., 1])
        return out

    def evaluate(self, pts):
        pts = np.asarray(pts, dtype=float)
        shape = pts.shape[:-1]
        u = np.zeros(shape)
        g = np.zeros(shape + (2,))
        h = np.zeros(shape + (2, 2))
        for (m, n), c in zip(self.modes, self.coeffs):
            a, b = m * math.pi, n * math.pi
            sx, cx = np.sin(a * pts[..., 0]), np.cos(a * pts[..., 0])
            sy, cy = np.sin(b * pts[..., 1]), np.cos(b * pts[..., 1])
            u += c * sx * sy
            g[..., 0] += c * a * cx * sy
            g[..., 1] += c * b * sx * cy
            h[..., 0, 0] -= c * a * a * sx * sy
            h[..., 1, 1] -= c * b * b * sx * sy
            h[..., 0, 1] += c * a * b * cx * cy
        h[..., 1, 0] = h[..., 0, 1]
        return u, g, h

    def gradient(self, pts) -> np.ndarray:
        return self.evaluate(pts)[1]

    def to_json(self) -> dict:
        return {"type": "sine_products", "modes": self.modes.tolist(), "coeffs": self.coeffs.tolist()}


def _bessel_orders(kind: str, orders, x):
    """Dict order -> Z_order(x) for the requested (possibly negative) orders."""
    fn = special.jv if kind == "J" else special.yv
    cache = {}
    out = {}
    for j in orders:
        a = abs(j)
        if a not in cache:
            if kind == "Y" and a <= 1:
                cache[a] = special.y0(x) if a == 0 else special.y1(x)
            elif kind == "J" and a <= 1:
                cache[a] = special.j0(x) if a == 0 else special.j1(x)
            else:
                cache[a] = fn(a, x)
        out[j] = cache[a] * (-1.0) ** a if j < 0 else cache[a]
    return out


class BesselWaves:
    """Sum of Bessel waves sharing one wavenumber ``k``.

    ``centers`` has shape (M, 2); ``kinds`` holds 'J'/'Y'; ``orders`` are
    integers; ``coeffs`` complex.  The field is the real part of the sum.
    """

    def __init__(self, k: float, centers, kinds, orders, coeffs):
        self.k = float(k)
        self.centers = np.asarray(centers, dtype=float).reshape(-1, 2)
        self.kinds = list(kinds)
        self.orders = np.asarray(orders, dtype=int).reshape(-1)
        self.coeffs = np.asarray(coeffs, dtype=complex).reshape(-1)
        groups: dict[tuple[str, int], list[int]] = {}
        for i, (kd, m) in enumerate(zip(self.kinds, self.orders)):
            groups.setdefault((kd, int(m)), []).append(i)
        self._groups = {key: np.array(idx) for key, idx in groups.items()}

    def scaled(self, factor: float) -> "BesselWaves":
        return BesselWaves(self.k, self.centers, self.kinds, self.orders, self.coeffs * factor)

    @property
    def charges(self) -> np.ndarray:
        return self.centers

    def _polar(self, pts, centers):
        d = pts[:, None, :] - centers[None, :, :]
        rho = np.hypot(d[..., 0], d[..., 1])
        return d, rho

    def value(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        shape = pts.shape[:-1]
        flat = pts.reshape(-1, 2)
        out = np.zeros(len(flat))
        for (kind, m), idx in self._groups.items():
            cen, c = self.centers[idx], self.coeffs[idx]
            step = max(1, _CHUNK // len(idx))
            for lo in range(0, len(flat), step):
                d, rho = self._polar(flat[lo:lo + step], cen)
                z = _bessel_orders(kind, [m], self.k * rho)[m]
                if m == 0:
                    out[lo:lo + step] += z @ c.real
                else:
                    e = np.exp(1j * m * np.arctan2(d[..., 1], d[..., 0]))
                    out[lo:lo + step] += np.real((z * e) @ c)
        return out.reshape(shape)

    def evaluate(self, pts):
        pts = np.asarray(pts, dtype=float)
        shape = pts.shape[:-1]
        flat = pts.reshape(-1, 2)
        n = len(flat)
        u = np.zeros(n)
        g = np.zeros((n, 2))
        h = np.zeros((n, 2, 2))
        k = self.k
        for (kind, m), idx in self._groups.items():
            cen, c = self.centers[idx], self.coeffs[idx]
            real_radial = m == 0 and not np.any(c.imag)
            step = max(1, _CHUNK // (4 * len(idx)))
            for lo in range(0, n, step):
                sl = slice(lo, lo + step)
                d, rho = self._polar(flat[sl], cen)
                if real_radial:
                    self._radial_block(kind, d, rho, c.real, u[sl], g[sl], h[sl])
                    continue
                psi = np.arctan2(d[..., 1], d[..., 0])
                z = _bessel_orders(kind, range(m - 2, m + 3), k * rho)
                w = {j: z[j] * np.exp(1j * j * psi) for j in z}
                u[sl] += np.real(w[m] @ c)
                g[sl, 0] += 0.5 * k * np.real((w[m - 1] - w[m + 1]) @ c)
                g[sl, 1] += np.real((-(w[m + 1] + w[m - 1]) @ c) * k / 2j)
                kk = k * k
                h[sl, 0, 0] += 0.25 * kk * np.real((w[m + 2] - 2 * w[m] + w[m - 2]) @ c)
                h[sl, 1, 1] += -0.25 * kk * np.real((w[m + 2] + 2 * w[m] + w[m - 2]) @ c)
                h[sl, 0, 1] += np.real(((w[m + 2] - w[m - 2]) @ c) * kk / 4j)
        h[:, 1, 0] = h[:, 0, 1]
        return u.reshape(shape), g.reshape(shape + (2,)), h.reshape(shape + (2, 2))

    def gradient(self, pts) -> np.ndarray:
        """Gradient only (one or two Bessel orders per group instead of five)."""
        pts = np.asarray(pts, dtype=float)
        shape = pts.shape[:-1]
        flat = pts.reshape(-1, 2)
        g = np.zeros((len(flat), 2))
        k = self.k
        for (kind, m), idx in self._groups.items():
            cen, c = self.centers[idx], self.coeffs[idx]
            step = max(1, _CHUNK // len(idx))
            if m != 0 or np.any(c.imag):
                for lo in range(0, len(flat), step):
                    d, rho = self._polar(flat[lo:lo + step], cen)
                    psi = np.arctan2(d[..., 1], d[..., 0])
                    z = _bessel_orders(kind, (m - 1, m + 1), k * rho)
                    wm = z[m - 1] * np.exp(1j * (m - 1) * psi)
                    wp = z[m + 1] * np.exp(1j * (m + 1) * psi)
                    g[lo:lo + step, 0] += 0.5 * k * np.real((wm - wp) @ c)
                    g[lo:lo + step, 1] += np.real((-(wp + wm) @ c) * k / 2j)
                continue
            c = c.real
            for lo in range(0, len(flat), step):
                d, rho = self._polar(flat[lo:lo + step], cen)
                z1 = special.y1(k * rho) if kind == "Y" else special.j1(k * rho)
                w = -k * z1 / np.where(rho > 0, rho, np.inf)
                g[lo:lo + step, 0] += (w * d[..., 0]) @ c
                g[lo:lo + step, 1] += (w * d[..., 1]) @ c
        return g.reshape(shape + (2,))

    def _radial_block(self, kind, d, rho, c, u, g, h):
        k = self.k
        x = k * rho
        if kind == "Y":
            z0, z1 = special.y0(x), special.y1(x)
        else:
            z0, z1 = special.j0(x), special.j1(x)
        safe = np.where(rho > 0, rho, 1.0)
        nx, ny = d[..., 0] / safe, d[..., 1] / safe
        # Z1(x)/rho -> k/2 as rho -> 0 for J; Y centers are never evaluated at rho = 0
        z1r = np.where(rho > 0, z1 / safe, 0.5 * k if kind == "J" else np.inf)
        u += z0 @ c
        g[:, 0] += (-k * z1 * nx) @ c
        g[:, 1] += (-k * z1 * ny) @ c
        a = -k * k * z0 + 2 * k * z1r
        iso = -k * z1r
        h[:, 0, 0] += (a * nx * nx + iso) @ c
        h[:, 1, 1] += (a * ny * ny + iso) @ c
        h[:, 0, 1] += (a * nx * ny) @ c

    def to_json(self) -> dict:
        return {
            "type": "bessel_waves",
            "k": repr(self.k),
            "centers": [[repr(float(x)), repr(float(y))] for x, y in self.centers],
            "kinds": "".join(self.kinds),
            "orders": self.orders.tolist(),
            "coeffs": [[repr(float(c.real)), repr(float(c.imag))] for c in self.coeffs],
        }


def terms_from_json(doc: dict):
    if doc["type"] == "sine_products":
        return SineProducts(doc["modes"], doc["coeffs"])
    if doc["type"] == "bessel_waves":
        centers = [[float(x), float(y)] for x, y in doc["centers"]]
        coeffs = [complex(float(a), float(b)) for a, b in doc["coeffs"]]
        return BesselWaves(float(doc["k"]), centers, list(doc["kinds"]), doc["orders"], coeffs)
    raise ValueError(f"unknown term type {doc['type']!r}")
