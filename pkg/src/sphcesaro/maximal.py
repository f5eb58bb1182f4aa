"""Discrete Hardy-Littlewood maximal function, truncated maximal operator and
the ratio / level-set diagnostics built on them.

The supremum over radii is taken over a finite radii grid and the supremum
over n is truncated at ``n_max``; both are therefore lower estimates of the
true quantities. Ratios always use the same radii grid in numerator and
denominator.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegreeRangeError, DomainError, PreconditionError, ResolutionError
from .special_fn import _as_order
from .spectral_core import HarmonicSpectrum, _points_xyz, cesaro_mean_field
from .sphere_geom import Cap, QuadratureGrid, SpherePoint, geodesic_angles

MIN_CAP_POINTS = 20
DEFAULT_RADII = 64
POINT_CHUNK = 64


def default_radii(grid: QuadratureGrid, count: int = DEFAULT_RADII) -> np.ndarray:
    """Logarithmic radii from twice the grid spacing up to pi."""
    lo = 2.0 * grid.spacing if math.isfinite(grid.spacing) else 2.0 * math.sqrt(4.0 * math.pi / grid.size)
    return np.geomspace(lo, math.pi, count)


def _check_radii(radii):
    r = np.asarray(radii, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise DomainError("radii must be a nonempty sequence")
    if np.any(r <= 0) or np.any(r > math.pi):
        raise DomainError("radii must lie in (0, pi]")
    return np.sort(r)


@dataclass(frozen=True, eq=False)
class CapAverages:
    """Per point, per radius cap averages of |f|; NaN where the cap is under-resolved."""

    radii: np.ndarray
    averages: np.ndarray  # (P, R)
    counts: np.ndarray  # (P, R)

    @property
    def skipped(self) -> np.ndarray:
        return self.counts < MIN_CAP_POINTS

    def maximal(self) -> np.ndarray:
        avg = np.where(self.skipped, -np.inf, self.averages)
        if np.any(np.all(self.skipped, axis=1)):
            raise ResolutionError("every radius was skipped at some point; refine the grid")
        return avg.max(axis=1)


def cap_averages(samples, grid: QuadratureGrid, points, radii, workers: int = 1) -> CapAverages:
    """Cap averages of |f| for all points and radii.

    Both the integral and the cap measure are quadrature sums over the grid
    points inside B(x, r), which keeps the average of a constant exact.
    """
    r = _check_radii(radii)
    absf = np.abs(np.asarray(samples, dtype=float))
    if absf.shape != (grid.size,):
        raise PreconditionError(f"expected {grid.size} samples, got {absf.shape}")
    wf = grid.weights * absf
    xyz = _points_xyz(points)

    def one(x):
        d = geodesic_angles(x, grid.xyz)
        # caps are closed: y is in B(x, r_i) iff d <= r_i
        slot = np.searchsorted(r, d, side="left")
        mass = np.cumsum(np.bincount(slot, weights=wf, minlength=r.size + 1)[: r.size])
        area = np.cumsum(np.bincount(slot, weights=grid.weights, minlength=r.size + 1)[: r.size])
        count = np.cumsum(np.bincount(slot, minlength=r.size + 1)[: r.size])
        # the cap measure is the quadrature mass of the same restricted grid,
        # so averages of constants are exact
        return mass / np.where(count > 0, area, 1.0), count

    def run(chunk):
        res = [one(x) for x in chunk]
        return np.array([a for a, _ in res]), np.array([c for _, c in res])

    chunks = [xyz[i:i + POINT_CHUNK] for i in range(0, xyz.shape[0], POINT_CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]
    avg = np.concatenate([p[0] for p in parts])
    cnt = np.concatenate([p[1] for p in parts])
    return CapAverages(r, avg, cnt)


def hl_maximal_field(samples, grid: QuadratureGrid, points, radii, workers: int = 1) -> np.ndarray:
    return cap_averages(samples, grid, points, radii, workers).maximal()


def hl_maximal(samples, grid: QuadratureGrid, x: SpherePoint, radii) -> float:
    """Discrete f*(x): max over resolved radii of cap averages of |f|."""
    return float(hl_maximal_field(samples, grid, x.array[None, :], radii)[0])


# ---------------------------------------------------------------------------
# truncated maximal operator
# ---------------------------------------------------------------------------

def maximal_operator_field(spectrum: HarmonicSpectrum, alpha, points, n_max: int, workers: int = 1):
    """(values, argmax_n) of max_{2 <= n <= n_max} |S_n^alpha f| at each point."""
    if n_max < 2 or n_max > spectrum.n_max:
        raise DegreeRangeError(f"n_max={n_max} must lie in [2, {spectrum.n_max}]")
    n_list = list(range(2, n_max + 1))
    means = np.abs(cesaro_mean_field(spectrum, alpha, n_list, points, workers=workers))
    idx = np.argmax(means, axis=0)  # first index wins ties
    vals = means[idx, np.arange(means.shape[1])]
    return vals, np.asarray(n_list)[idx]


def maximal_operator(spectrum: HarmonicSpectrum, alpha, x: SpherePoint, n_max: int):
    """Truncated S_*^alpha f(x) and the n attaining it."""
    v, n = maximal_operator_field(spectrum, alpha, x.array[None, :], n_max)
    return float(v[0]), int(n[0])


# ---------------------------------------------------------------------------
# ratio reports
# ---------------------------------------------------------------------------

def _safe_ratio(num, den):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    ratio = np.zeros_like(num)
    ok = den > 0
    ratio[ok] = num[ok] / den[ok]
    zero_zero = (~ok) & (num == 0)
    blown = (~ok) & (num != 0)
    ratio[blown] = np.inf
    anomalies = [(int(i), "0/0 reported as 0") for i in np.flatnonzero(zero_zero)]
    anomalies += [(int(i), "nonzero numerator over zero denominator") for i in np.flatnonzero(blown)]
    return ratio, sorted(anomalies)


@dataclass(frozen=True, eq=False)
class MaximalReport:
    points: np.ndarray
    f_star: np.ndarray
    f_star_antipodal: np.ndarray
    s_star: np.ndarray
    argmax_n: np.ndarray
    ratios: np.ndarray
    n_max: int
    alpha: float
    radii: np.ndarray
    anomalies: list = field(default_factory=list)
    kind: str = "theorem"
    margin: Optional[float] = None

    @property
    def max_ratio(self) -> float:
        return float(self.ratios.max()) if self.ratios.size else 0.0

    @property
    def argmax_point(self) -> int:
        return int(np.argmax(self.ratios)) if self.ratios.size else -1

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["point_id", "f_star", "f_star_antipodal", "s_star", "argmax_n", "ratio"])
        for i in range(self.points.shape[0]):
            w.writerow([
                i,
                repr(float(self.f_star[i])),
                repr(float(self.f_star_antipodal[i])),
                repr(float(self.s_star[i])),
                int(self.argmax_n[i]),
                repr(float(self.ratios[i])),
            ])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "alpha": self.alpha,
            "n_max": self.n_max,
            "points": int(self.points.shape[0]),
            "radii": {"count": int(self.radii.size), "min": float(self.radii.min()), "max": float(self.radii.max())},
            "max_ratio": self.max_ratio,
            "argmax_point": self.argmax_point,
            "anomalies": [{"point_id": i, "reason": r} for i, r in self.anomalies],
            "v1_margin": self.margin,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=1, sort_keys=True)


def theorem_ratio(
    spectrum: HarmonicSpectrum,
    samples,
    grid: QuadratureGrid,
    alpha,
    points,
    n_max: int,
    radii,
    N: int = 2,
    workers: int = 1,
) -> MaximalReport:
    """Per-point S_*^alpha f(x) / (f*(x) + f*(-x)); requires alpha > (N-1)/2."""
    a = _as_order(alpha).alpha
    if not a > (N - 1) / 2.0:
        raise DomainError(f"alpha={a} must exceed (N-1)/2 = {(N - 1) / 2}")
    xyz = _points_xyz(points)
    r = _check_radii(radii)
    both = hl_maximal_field(samples, grid, np.concatenate([xyz, -xyz]), r, workers)
    f_star, f_anti = both[: xyz.shape[0]], both[xyz.shape[0]:]
    s_star, arg = maximal_operator_field(spectrum, a, xyz, n_max, workers)
    ratios, anomalies = _safe_ratio(s_star, f_star + f_anti)
    return MaximalReport(xyz, f_star, f_anti, s_star, arg, ratios, n_max, a, r, anomalies)


def localization_ratio(
    spectrum: HarmonicSpectrum,
    samples,
    grid: QuadratureGrid,
    v1: Cap,
    alpha,
    n_max: int,
    radii,
    points=None,
    vanishing: Optional[Cap] = None,
    N: int = 2,
    workers: int = 1,
) -> MaximalReport:
    """Per-point S_*^alpha f(x) / f*(-x) for x in V1, where f vanishes.

    ``points`` defaults to the grid points inside V1. If the vanishing cap V
    is given, the margin between V1 and the boundary of V is checked and
    recorded in the report summary.
    """
    a = _as_order(alpha).alpha
    if not a >= (N - 1) / 2.0:
        raise DomainError(f"alpha={a} must be at least (N-1)/2 = {(N - 1) / 2}")
    samples = np.asarray(samples, dtype=float)
    in_v1 = geodesic_angles(v1.center.array, grid.xyz) <= v1.radius
    if np.any(np.abs(samples[in_v1]) > 1e-10):
        raise PreconditionError("f does not vanish on V1")
    margin = None
    if vanishing is not None:
        d = geodesic_angles(vanishing.center.array, v1.center.array[None, :])[0]
        margin = vanishing.radius - (d + v1.radius)
        if not margin > 0:
            raise PreconditionError("V1 is not strictly inside V")
    xyz = grid.xyz[in_v1] if points is None else _points_xyz(points)
    if np.any(geodesic_angles(v1.center.array, xyz) > v1.radius + 1e-12):
        raise PreconditionError("evaluation points must lie in V1")
    r = _check_radii(radii)
    f_anti = hl_maximal_field(samples, grid, -xyz, r, workers)
    s_star, arg = maximal_operator_field(spectrum, a, xyz, n_max, workers)
    ratios, anomalies = _safe_ratio(s_star, f_anti)
    return MaximalReport(
        xyz, np.zeros(xyz.shape[0]), f_anti, s_star, arg, ratios, n_max, a, r, anomalies,
        kind="localization", margin=margin,
    )


# ---------------------------------------------------------------------------
# weak and strong type diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LevelSetReport:
    mu_list: np.ndarray
    measures: np.ndarray
    l1_norm: float

    @property
    def products(self) -> np.ndarray:
        return self.mu_list * self.measures / self.l1_norm

    def max_product(self) -> float:
        return float(self.products.max())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["mu", "measure", "normalized_product"])
        for mu, m, p in zip(self.mu_list, self.measures, self.products):
            w.writerow([repr(float(mu)), repr(float(m)), repr(float(p))])
        return buf.getvalue()

    def summary(self) -> dict:
        prods = self.products
        return {
            "l1_norm": self.l1_norm,
            "max_normalized_product": float(prods.max()),
            "argmax_mu": float(self.mu_list[int(np.argmax(prods))]),
        }


def weak_type_levelset(values, weights, l1_norm: float, mu_list: Sequence[float]) -> LevelSetReport:
    """mes{x : value(x) > mu} by quadrature, for each threshold mu."""
    mu = np.asarray(mu_list, dtype=float)
    if mu.ndim != 1 or np.any(mu <= 0) or np.any(np.diff(mu) <= 0):
        raise DomainError("mu_list must be positive and strictly increasing")
    if not l1_norm > 0:
        raise DomainError("l1_norm must be positive")
    v = np.asarray(values, dtype=float)
    w = weights.weights if isinstance(weights, QuadratureGrid) else np.asarray(weights, dtype=float)
    order = np.argsort(v, kind="stable")
    vs, ws = v[order], w[order]
    # tail sums from the largest value down keep the measures monotone
    tail = np.concatenate([np.cumsum(ws[::-1])[::-1], [0.0]])
    first_above = np.searchsorted(vs, mu, side="right")
    return LevelSetReport(mu, tail[first_above], float(l1_norm))


def strong_type_norm(values, weights, p: float) -> float:
    """Quadrature L^p norm (sum w |v|^p)^(1/p), p > 1."""
    if not p > 1:
        raise DomainError(f"strong type norms need p > 1, got {p}")
    v = np.abs(np.asarray(values, dtype=float))
    w = weights.weights if isinstance(weights, QuadratureGrid) else np.asarray(weights, dtype=float)
    return float(np.dot(w, v ** p) ** (1.0 / p))
