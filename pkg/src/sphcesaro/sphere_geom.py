"""Points, caps, surface measures and product quadrature grids on spheres."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.special import roots_legendre

from .errors import DomainError

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class SpherePoint:
    """Unit direction in R^{N+1}; coordinates are stored as a tuple."""

    coords: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in self.coords)
        if len(c) < 3:
            raise DomainError("points must live on S^N with N >= 2")
        if abs(math.fsum(v * v for v in c) - 1.0) > UNIT_TOL:
            raise DomainError("coordinates are not a unit vector")
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_vector(cls, v) -> "SpherePoint":
        v = np.asarray(v, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0 or not np.isfinite(norm):
            raise DomainError("cannot normalise a zero or non-finite vector")
        return cls(tuple(v / norm))

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "SpherePoint":
        """Point of S^2 from colatitude ``theta`` and longitude ``phi`` (radians)."""
        st = math.sin(theta)
        return cls.from_vector((st * math.cos(phi), st * math.sin(phi), math.cos(theta)))

    @property
    def N(self) -> int:
        return len(self.coords) - 1

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)

    @property
    def theta(self) -> float:
        if self.N != 2:
            raise DomainError("angles are only defined for N = 2")
        x, y, z = self.coords
        return math.atan2(math.hypot(x, y), z)

    @property
    def phi(self) -> float:
        if self.N != 2:
            raise DomainError("angles are only defined for N = 2")
        return math.atan2(self.coords[1], self.coords[0]) % (2.0 * math.pi)


def north_pole(N: int = 2) -> SpherePoint:
    return SpherePoint((0.0,) * N + (1.0,))


def geodesic_angles(x, ys) -> np.ndarray:
    """Angles between direction ``x`` (shape (d,)) and rows of ``ys`` (shape (P, d)).

    Uses 2 atan2(|x - y|, |x + y|), which equals arccos(x . y) but keeps full
    relative accuracy near 0 and pi.
    """
    x = np.asarray(x, dtype=float)
    ys = np.asarray(ys, dtype=float)
    diff = np.linalg.norm(ys - x, axis=-1)
    summ = np.linalg.norm(ys + x, axis=-1)
    return 2.0 * np.arctan2(diff, summ)


def geodesic_distance(x: SpherePoint, y: SpherePoint) -> float:
    """Spherical distance (angle between the two directions), in [0, pi]."""
    if x.N != y.N:
        raise DomainError("points live on spheres of different dimension")
    return float(geodesic_angles(x.array, y.array[None, :])[0])


def antipode(x: SpherePoint) -> SpherePoint:
    return SpherePoint(tuple(-v for v in x.coords))


def _sphere_area_any(N: int) -> float:
    return 2.0 * math.pi ** ((N + 1) / 2.0) / math.gamma((N + 1) / 2.0)


def sphere_area(N: int) -> float:
    """|S^N| = 2 pi^{(N+1)/2} / Gamma((N+1)/2)."""
    if int(N) != N or N < 2:
        raise DomainError(f"dimension N must be an integer >= 2, got {N}")
    return _sphere_area_any(int(N))


def cap_measure(N: int, r: float) -> float:
    """Surface measure of a geodesic ball of radius ``r`` on S^N."""
    sphere_area(N)
    if not (0.0 <= r <= math.pi):
        raise DomainError(f"cap radius must lie in [0, pi], got {r}")
    if r == 0.0:
        return 0.0
    val, _ = integrate.quad(lambda t: math.sin(t) ** (N - 1), 0.0, r, epsabs=0.0, epsrel=1e-13, limit=200)
    return _sphere_area_any(N - 1) * val


@dataclass(frozen=True)
class Cap:
    center: SpherePoint
    radius: float

    def __post_init__(self):
        if not (0.0 < self.radius <= math.pi):
            raise DomainError(f"cap radius must lie in (0, pi], got {self.radius}")


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Sample points of S^2 with positive surface-measure weights.

    Grids built by :func:`build_quadrature_grid` are a product of a latitude
    rule (``lat_nodes`` = cos(theta), ``lat_weights``) and ``n_lon`` uniform
    longitudes, stored latitude-major. Restricted grids drop that structure.
    """

    xyz: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray
    band_limit: int
    lat_nodes: Optional[np.ndarray] = None
    lat_weights: Optional[np.ndarray] = None
    n_lon: Optional[int] = None
    spacing: float = field(default=float("nan"))

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    @property
    def structured(self) -> bool:
        return self.lat_nodes is not None

    @property
    def points(self) -> list:
        return [SpherePoint(tuple(row)) for row in self.xyz]

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["theta", "phi", "weight"])
        for t, p, w in zip(self.theta, self.phi, self.weights):
            writer.writerow([repr(float(t)), repr(float(p)), repr(float(w))])
        return buf.getvalue()


def _angles_to_xyz(theta, phi):
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def latitude_rule(n_max: int, breaks: Sequence[float] = ()):
    """Gauss-Legendre rule in cos(theta), composite over ``breaks`` in (-1, 1).

    Each segment carries n_max + 1 nodes, so every segment integrates
    polynomials of degree 2 n_max + 1 exactly.
    """
    x, w = roots_legendre(n_max + 1)
    edges = [-1.0] + sorted(float(b) for b in breaks) + [1.0]
    if any(not (-1.0 < b < 1.0) for b in edges[1:-1]) or len(set(edges)) != len(edges):
        raise DomainError("latitude breaks must be distinct values inside (-1, 1)")
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        nodes.append(lo + half * (x + 1.0))
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def build_quadrature_grid(n_max: int, lat_breaks: Sequence[float] = ()) -> QuadratureGrid:
    """Product grid on S^2 exact for products of two harmonics of degree <= n_max.

    Gauss-Legendre nodes in cos(theta) (optionally composite over
    ``lat_breaks``) crossed with 2 n_max + 1 uniform longitudes.
    """
    if int(n_max) != n_max or n_max < 0:
        raise DomainError(f"n_max must be a nonnegative integer, got {n_max}")
    n_max = int(n_max)
    lat_x, lat_w = latitude_rule(n_max, lat_breaks)
    n_lon = 2 * n_max + 1
    lon = 2.0 * math.pi * np.arange(n_lon) / n_lon
    lat_theta = np.arccos(lat_x)
    theta = np.repeat(lat_theta, n_lon)
    phi = np.tile(lon, lat_theta.size)
    weights = np.repeat(lat_w * (2.0 * math.pi / n_lon), n_lon)
    spacing = math.pi / (n_max + 1)
    return QuadratureGrid(
        xyz=_angles_to_xyz(theta, phi),
        theta=theta,
        phi=phi,
        weights=weights,
        band_limit=n_max,
        lat_nodes=lat_x,
        lat_weights=lat_w,
        n_lon=n_lon,
        spacing=spacing,
    )


def cap_mask(grid: QuadratureGrid, cap: Cap) -> np.ndarray:
    return geodesic_angles(cap.center.array, grid.xyz) <= cap.radius


def cap_restrict(grid: QuadratureGrid, cap: Cap) -> QuadratureGrid:
    """Sub-grid of points inside ``cap`` with their original weights."""
    if cap.center.N != 2:
        raise DomainError("quadrature grids are only available on S^2")
    mask = cap_mask(grid, cap)
    return QuadratureGrid(
        xyz=grid.xyz[mask],
        theta=grid.theta[mask],
        phi=grid.phi[mask],
        weights=grid.weights[mask],
        band_limit=grid.band_limit,
        spacing=grid.spacing,
    )


def random_points(count: int, seed: int, cap: Optional[Cap] = None) -> np.ndarray:
    """Seeded uniform points on S^2 (rows of unit vectors), optionally inside a cap."""
    rng = np.random.default_rng(seed)
    out = []
    need = int(count)
    while need > 0:
        v = rng.standard_normal((max(4 * need, 16), 3))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        if cap is not None:
            v = v[geodesic_angles(cap.center.array, v) <= cap.radius]
        out.append(v[:need])
        need -= out[-1].shape[0]
    return np.concatenate(out)[:count]
