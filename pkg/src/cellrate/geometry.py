"""Node and base-station layouts and the link-length laws of both cell models.

Point sets are ``(n, 2)`` float arrays of planar coordinates in meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .quadrature import gauss_legendre

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class DiskRegion:
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"disk radius must be positive, got {self.radius}")

    @classmethod
    def for_density(cls, n: int, density: float) -> "DiskRegion":
        """Disk holding ``n`` nodes at ``density`` nodes per square meter."""
        return cls(disk_radius(n, density))


@dataclass(frozen=True)
class HexLayout:
    """Triangular lattice of base stations; one site sits at the origin."""

    spacing: float
    extent: float

    def __post_init__(self):
        if not self.spacing > 0:
            raise ValueError("lattice spacing must be positive")
        if self.extent < 0:
            raise ValueError("lattice extent must be non-negative")

    @property
    def density(self) -> float:
        return hex_density(self.spacing)


@dataclass(frozen=True)
class PppLayout:
    intensity: float
    extent: float

    def __post_init__(self):
        if not self.intensity > 0:
            raise ValueError("PPP intensity must be positive")
        if self.extent < 0:
            raise ValueError("PPP extent must be non-negative")


def disk_radius(n: int, density: float) -> float:
    return math.sqrt(n / (math.pi * density))


def hex_density(spacing: float) -> float:
    return 2.0 / (SQRT3 * spacing * spacing)


def hex_spacing(density: float) -> float:
    """Lattice spacing whose site density equals ``density``."""
    return math.sqrt(2.0 / (SQRT3 * density))


def sample_uniform_disk(n: int, region: DiskRegion | float, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` IID points, area-uniform on a disk centered at the origin."""
    if n < 0:
        raise ValueError("n must be non-negative")
    radius = region.radius if isinstance(region, DiskRegion) else float(region)
    u = rng.random((2, n))
    r = radius * np.sqrt(u[0])
    theta = 2.0 * math.pi * u[1]
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def hex_lattice(layout: HexLayout) -> np.ndarray:
    """Lattice sites within ``layout.extent`` of the origin, origin first."""
    d = layout.spacing
    m = int(math.ceil(layout.extent / (d * SQRT3 / 2.0))) + 1
    i, j = np.meshgrid(np.arange(-m, m + 1), np.arange(-m, m + 1), indexing="ij")
    i = i.ravel()
    j = j.ravel()
    x = d * (i + 0.5 * j)
    y = d * (SQRT3 / 2.0) * j
    keep = np.hypot(x, y) <= layout.extent * (1 + 1e-12)
    # Sort so the origin is index 0 and the order is deterministic.
    order = np.lexsort((j[keep], i[keep], np.hypot(x[keep], y[keep])))
    return np.column_stack((x[keep][order], y[keep][order]))


def sample_ppp_disk(layout: PppLayout, rng: np.random.Generator) -> np.ndarray:
    """Homogeneous Poisson points on the disk of radius ``layout.extent``."""
    if layout.extent == 0:
        return np.empty((0, 2))
    mean = layout.intensity * math.pi * layout.extent ** 2
    return sample_uniform_disk(int(rng.poisson(mean)), layout.extent, rng)


class BaseStationIndex:
    """Nearest-base-station lookups over a fixed set of sites.

    Ties are broken towards the lower site index.
    """

    def __init__(self, bases: np.ndarray):
        bases = np.asarray(bases, dtype=float).reshape(-1, 2)
        if len(bases) == 0:
            raise ValueError("base-station set is empty")
        self.bases = bases
        self._tree = cKDTree(bases)

    def query(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        if len(self.bases) == 1:
            return np.zeros(len(points), dtype=np.intp), np.hypot(*(points - self.bases[0]).T)
        dist, idx = self._tree.query(points, k=2)
        # swap to the lower index when the two candidates are equidistant
        tie = (dist[:, 0] == dist[:, 1]) & (idx[:, 1] < idx[:, 0])
        best = np.where(tie, idx[:, 1], idx[:, 0])
        return best.astype(np.intp), dist[:, 0]


def nearest_base_station(p, bases: np.ndarray) -> tuple[int, float]:
    """Index of and distance to the base station closest to ``p``."""
    idx, dist = BaseStationIndex(bases).query(np.asarray(p, dtype=float))
    return int(idx[0]), float(dist[0])


def nearest_base_station_bruteforce(points: np.ndarray, bases: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exhaustive scan; quadratic memory, meant as a reference."""
    bases = np.asarray(bases, dtype=float).reshape(-1, 2)
    if len(bases) == 0:
        raise ValueError("base-station set is empty")
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    dist = np.hypot(points[:, None, 0] - bases[None, :, 0], points[:, None, 1] - bases[None, :, 1])
    idx = np.argmin(dist, axis=1)
    return idx, dist[np.arange(len(points)), idx]


# -- hexagonal cells -------------------------------------------------------

def hex_link_pdf(x, d: float):
    """Density of the distance from a uniform point to its nearest lattice site."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    base = 4.0 * math.pi / (SQRT3 * d * d)
    inner = (x > 0) & (x < d / 2)
    outer = (x >= d / 2) & (x < SQRT3 * d / 3)
    out[inner] = base * x[inner]
    xo = x[outer]
    out[outer] = base * xo - 8.0 * SQRT3 * xo / (d * d) * np.arccos(np.minimum(d / (2 * xo), 1.0))
    return out if out.ndim else float(out)


def hex_link_cdf(x, d: float):
    x = np.asarray(x, dtype=float)
    out = np.where(x >= SQRT3 * d / 3, 1.0, 0.0)
    inner = (x >= 0) & (x < d / 2)
    outer = (x >= d / 2) & (x < SQRT3 * d / 3)
    xi = x[inner]
    out[inner] = 2 * SQRT3 * math.pi * xi ** 2 / (3 * d * d)
    xo = x[outer]
    out[outer] = (2 * SQRT3 * math.pi * xo ** 2 / (3 * d * d)
                  - 4 * SQRT3 * xo ** 2 / (d * d) * np.arccos(np.minimum(d / (2 * xo), 1.0))
                  + 2 * SQRT3 * np.sqrt(np.maximum(xo ** 2 / (d * d) - 0.25, 0.0)))
    return out if out.ndim else float(out)


def hex_link_moment(k: float, d: float, order: int = 64) -> float:
    """``E[x**k]`` for the hexagonal link length, ``k > -2``."""
    if not k > -2:
        raise ValueError("moment order must exceed -2")
    integral = gauss_legendre(lambda t: np.cos(t) ** -(k + 2), 0.0, math.pi / 6, order)
    return 2 * SQRT3 / (k + 2) * (d / 2) ** k * integral


def hex_link_partial_m2(x, d: float):
    """``int_0^x t**2 f(t) dt`` for the hexagonal link-length density."""
    scalar = np.ndim(x) == 0
    x = np.clip(np.atleast_1d(np.asarray(x, dtype=float)), 0.0, SQRT3 * d / 3)
    c = d / 2
    out = math.pi * x ** 4 / (SQRT3 * d * d)
    outer = x > c
    xo = x[outer]
    w = xo * xo - c * c
    # antiderivative of t**3 * arccos(c/t), zero at t = c
    antider = xo ** 4 / 4 * np.arccos(c / xo) - c / 4 * (w ** 1.5 / 3 + c * c * np.sqrt(w))
    out[outer] -= 8 * SQRT3 / (d * d) * antider
    return float(out[0]) if scalar else out


def sample_triangle_link(n: int, d: float, rng: np.random.Generator) -> np.ndarray:
    """Distance from uniform points in an equilateral triangle (side ``d``) to the nearest vertex."""
    u = rng.random((2, n))
    flip = u.sum(axis=0) > 1
    u[:, flip] = 1 - u[:, flip]
    # vertices (0,0), (d,0), (d/2, d*sqrt(3)/2)
    px = d * u[0] + 0.5 * d * u[1]
    py = (SQRT3 / 2) * d * u[1]
    vx = np.array([0.0, d, 0.5 * d])[:, None]
    vy = np.array([0.0, 0.0, SQRT3 / 2 * d])[:, None]
    return np.hypot(px - vx, py - vy).min(axis=0)


@dataclass(frozen=True)
class HexLinkLaw:
    spacing: float

    @property
    def support_max(self) -> float:
        return SQRT3 * self.spacing / 3

    def pdf(self, x):
        return hex_link_pdf(x, self.spacing)

    def cdf(self, x):
        return hex_link_cdf(x, self.spacing)

    def partial_m2(self, x):
        return hex_link_partial_m2(x, self.spacing)

    def second_moment(self) -> float:
        return 5.0 / 36.0 * self.spacing ** 2

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Inverse-CDF draws: closed form below ``d/2``, bisection above."""
        d = self.spacing
        u = rng.random(size)
        knee = math.pi * SQRT3 / 6  # F(d/2)
        x = d * np.sqrt(3 * u / (2 * SQRT3 * math.pi))
        hi_mask = u >= knee
        if hi_mask.any():
            target = u[hi_mask]
            lo = np.full(target.shape, d / 2)
            hi = np.full(target.shape, self.support_max)
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                below = hex_link_cdf(mid, d) < target
                lo = np.where(below, mid, lo)
                hi = np.where(below, hi, mid)
            x[hi_mask] = 0.5 * (lo + hi)
        return x


# -- Poisson-Voronoi cells ---------------------------------------------------

def ppp_link_pdf(r, intensity: float):
    r = np.asarray(r, dtype=float)
    out = np.where(r > 0, 2 * math.pi * intensity * r * np.exp(-math.pi * intensity * r * r), 0.0)
    return out if out.ndim else float(out)


def ppp_link_cdf(r, intensity: float):
    r = np.asarray(r, dtype=float)
    out = np.where(r > 0, -np.expm1(-math.pi * intensity * np.maximum(r, 0.0) ** 2), 0.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PppLinkLaw:
    intensity: float

    support_max = math.inf

    def pdf(self, r):
        return ppp_link_pdf(r, self.intensity)

    def cdf(self, r):
        return ppp_link_cdf(r, self.intensity)

    def partial_m2(self, r):
        # (1 + u) e^-u underflows to 0 well before u = 1e3; clip keeps r = inf finite
        u = np.minimum(math.pi * self.intensity * np.asarray(r, dtype=float) ** 2, 1e3)
        out = (1 - (1 + u) * np.exp(-u)) / (math.pi * self.intensity)
        return out if np.ndim(out) else float(out)

    def second_moment(self) -> float:
        return 1.0 / (math.pi * self.intensity)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        return np.sqrt(-np.log1p(-u) / (math.pi * self.intensity))
