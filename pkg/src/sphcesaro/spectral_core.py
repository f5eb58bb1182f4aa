"""Spherical-harmonic expansions on S^2 and zonal Cesaro kernels on S^N.

Real orthonormal harmonics on S^2 are indexed by degree ``k`` and an
intra-degree index ``j = 1..2k+1``: ``j = 1`` is the zonal (m = 0) function,
``j = 2m`` carries ``cos(m phi)`` and ``j = 2m + 1`` carries ``sin(m phi)``.
Coefficients are stored flat at position ``k**2 + j - 1``.

Kernels for general N are zonal: the degree-k projector kernel is
``zonal_constant(N, k) * P_k^nu(cos gamma)`` with nu = (N-1)/2.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import roots_legendre

from ._summation import NeumaierAccumulator
from .errors import DegreeRangeError, DomainError, IntegrabilityError, PreconditionError
from .special_fn import (
    CesaroOrder,
    _as_order,
    cesaro_multipliers,
    clamp_cosine,
    iter_gegenbauer,
)
from .sphere_geom import QuadratureGrid, SpherePoint, _sphere_area_any, sphere_area

FIELD_CHUNK = 64
_SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# dimensions and eigenvalues
# ---------------------------------------------------------------------------

def _check_dim(N):
    if int(N) != N or N < 2:
        raise DomainError(f"dimension N must be an integer >= 2, got {N}")
    return int(N)


def harmonic_dimension(N: int, k: int) -> int:
    """a_k = N_k - N_{k-2} with N_k = (N+k)! / (N! k!)."""
    N = _check_dim(N)
    if k < 0:
        raise DegreeRangeError(f"degree must be nonnegative, got {k}")
    n_k = math.comb(N + k, k)
    n_km2 = math.comb(N + k - 2, k - 2) if k >= 2 else 0
    return n_k - n_km2


def eigenvalue(N: int, k: int) -> int:
    """Eigenvalue k(k+N-1) of the Laplace-Beltrami operator on degree-k harmonics."""
    N = _check_dim(N)
    if k < 0:
        raise DegreeRangeError(f"degree must be nonnegative, got {k}")
    return k * (k + N - 1)


@dataclass(frozen=True)
class HarmonicBasis:
    N: int
    n_max: int
    eigenvalues: tuple = field(init=False)
    dims: tuple = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", tuple(eigenvalue(self.N, k) for k in range(self.n_max + 1)))
        object.__setattr__(self, "dims", tuple(harmonic_dimension(self.N, k) for k in range(self.n_max + 1)))


def flat_index(k: int, j: int) -> int:
    if k < 0 or not (1 <= j <= 2 * k + 1):
        raise DegreeRangeError(f"index (k={k}, j={j}) out of range")
    return k * k + j - 1


def spectrum_size(n_max: int) -> int:
    return (n_max + 1) ** 2


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HarmonicSpectrum:
    """Coefficients f_{k,j} of a function on S^2 for degrees 0..n_max."""

    n_max: int
    coeffs: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.shape != (spectrum_size(self.n_max),):
            raise PreconditionError(
                f"expected {spectrum_size(self.n_max)} coefficients for n_max={self.n_max}, got {c.shape}"
            )
        if not np.all(np.isfinite(c)):
            raise DomainError("spectrum contains non-finite coefficients")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, n_max: int, **metadata) -> "HarmonicSpectrum":
        return cls(n_max, np.zeros(spectrum_size(n_max)), dict(metadata))

    @classmethod
    def pure_mode(cls, n_max: int, k: int, j: int) -> "HarmonicSpectrum":
        c = np.zeros(spectrum_size(n_max))
        c[flat_index(k, j)] = 1.0
        return cls(n_max, c, {"source": f"pure_mode(k={k}, j={j})"})

    def coeff(self, k: int, j: int) -> float:
        return float(self.coeffs[flat_index(k, j)])

    def degree_block(self, k: int) -> np.ndarray:
        return self.coeffs[k * k:(k + 1) ** 2]

    def items(self):
        for k in range(self.n_max + 1):
            for j in range(1, 2 * k + 2):
                yield k, j, float(self.coeffs[k * k + j - 1])

    def resized(self, n_max: int) -> "HarmonicSpectrum":
        """Truncate or zero-pad to a new maximal degree."""
        c = np.zeros(spectrum_size(n_max))
        m = min(c.size, self.coeffs.size)
        c[:m] = self.coeffs[:m]
        return HarmonicSpectrum(n_max, c, dict(self.metadata))

    def __add__(self, other: "HarmonicSpectrum") -> "HarmonicSpectrum":
        n = max(self.n_max, other.n_max)
        a, b = self.resized(n), other.resized(n)
        meta = {"source": f"({self.metadata.get('source', '?')}) + ({other.metadata.get('source', '?')})"}
        return HarmonicSpectrum(n, a.coeffs + b.coeffs, meta)

    def __mul__(self, scale: float) -> "HarmonicSpectrum":
        return HarmonicSpectrum(self.n_max, self.coeffs * float(scale), dict(self.metadata))

    __rmul__ = __mul__

    def to_json(self) -> str:
        payload = {
            "n_max": self.n_max,
            "coefficients": [{"k": k, "j": j, "value": v} for k, j, v in self.items()],
            "metadata": self.metadata,
        }
        return json.dumps(payload, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "HarmonicSpectrum":
        payload = json.loads(text)
        n_max = int(payload["n_max"])
        c = np.full(spectrum_size(n_max), np.nan)
        seen = set()
        for entry in payload["coefficients"]:
            key = (int(entry["k"]), int(entry["j"]))
            if key in seen:
                raise PreconditionError(f"duplicate coefficient {key}")
            seen.add(key)
            if key[0] > n_max:
                raise DegreeRangeError(f"coefficient {key} above n_max={n_max}")
            c[flat_index(*key)] = float(entry["value"])
        if np.any(np.isnan(c)):
            raise PreconditionError("spectrum JSON is missing coefficients")
        return cls(n_max, c, payload.get("metadata", {}))


# ---------------------------------------------------------------------------
# real spherical harmonics on S^2
# ---------------------------------------------------------------------------

def _polar_parts(xyz):
    """cos(theta), sin(theta), cos(phi), sin(phi) from unit vectors using only
    correctly rounded arithmetic (bitwise stable under re-chunking)."""
    xyz = np.atleast_2d(np.asarray(xyz, dtype=float))
    x, y, z = xyz[:, 0], xyz[:, 1], xyz[:, 2]
    rho = np.sqrt(x * x + y * y)
    safe = np.where(rho > 0.0, rho, 1.0)
    cphi = np.where(rho > 0.0, x / safe, 1.0)
    sphi = np.where(rho > 0.0, y / safe, 0.0)
    return np.clip(z, -1.0, 1.0), rho, cphi, sphi


def iter_alf(n_max: int, ct, st):
    """Yield (k, L) with L[m] = sqrt((2k+1)/(4 pi) (k-m)!/(k+m)!) P_k^m(cos theta).

    No Condon-Shortley phase. ``ct``/``st`` are cos/sin of the colatitude.
    """
    ct = np.asarray(ct, dtype=float)
    st = np.asarray(st, dtype=float)
    prev2 = None
    prev1 = np.full((1,) + ct.shape, 1.0 / math.sqrt(4.0 * math.pi))
    yield 0, prev1
    for k in range(1, n_max + 1):
        cur = np.empty((k + 1,) + ct.shape)
        if k >= 2:
            m = np.arange(k - 1, dtype=float)
            a = np.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
            b = np.sqrt(((k - 1.0) ** 2 - m * m) / (4.0 * (k - 1.0) ** 2 - 1.0))
            shape = (k - 1,) + (1,) * ct.ndim
            cur[: k - 1] = a.reshape(shape) * (ct * prev1[: k - 1] - b.reshape(shape) * prev2[: k - 1])
        cur[k - 1] = math.sqrt(2.0 * k + 1.0) * ct * prev1[k - 1]
        cur[k] = math.sqrt((2.0 * k + 1.0) / (2.0 * k)) * st * prev1[k - 1]
        prev2, prev1 = prev1, cur
        yield k, cur


def _trig_table(cphi, sphi, m_max: int):
    """cos(m phi), sin(m phi) for m = 0..m_max by repeated rotation."""
    c = np.empty((m_max + 1,) + cphi.shape)
    s = np.empty_like(c)
    c[0], s[0] = 1.0, 0.0
    for m in range(1, m_max + 1):
        c[m] = c[m - 1] * cphi - s[m - 1] * sphi
        s[m] = s[m - 1] * cphi + c[m - 1] * sphi
    return c, s


def basis_matrix(n_max: int, xyz) -> np.ndarray:
    """All Y_j^k at the given points, shape ((n_max+1)^2, P). For modest sizes."""
    ct, st, cphi, sphi = _polar_parts(xyz)
    cosm, sinm = _trig_table(cphi, sphi, n_max)
    out = np.empty((spectrum_size(n_max), ct.size))
    for k, L in iter_alf(n_max, ct, st):
        base = k * k
        out[base] = L[0]
        if k:
            out[base + 1:base + 2 * k + 1:2] = _SQRT2 * L[1:] * cosm[1:k + 1]
            out[base + 2:base + 2 * k + 2:2] = _SQRT2 * L[1:] * sinm[1:k + 1]
    return out


def evaluate_basis(k: int, j: int, x: SpherePoint) -> float:
    """Real orthonormal spherical harmonic Y_j^k(x) on S^2."""
    idx = flat_index(k, j)
    if x.N != 2:
        raise DomainError("the explicit basis is implemented on S^2 only")
    return float(basis_matrix(k, x.array)[idx, 0])


def _degree_components_chunk(coeffs: np.ndarray, n_top: int, xyz) -> np.ndarray:
    """F_k(x) = sum_j f_{k,j} Y_j^k(x) for k = 0..n_top, shape (n_top+1, P)."""
    ct, st, cphi, sphi = _polar_parts(xyz)
    cosm, sinm = _trig_table(cphi, sphi, n_top)
    out = np.empty((n_top + 1, ct.size))
    for k, L in iter_alf(n_top, ct, st):
        block = coeffs[k * k:(k + 1) ** 2]
        t = np.empty_like(L)
        t[0] = block[0]
        if k:
            fc = block[1::2][:, None]
            fs = block[2::2][:, None]
            t[1:] = _SQRT2 * (fc * cosm[1:k + 1] + fs * sinm[1:k + 1])
        prod = L * t
        # contiguous rows so each point is reduced in the same order
        out[k] = np.ascontiguousarray(prod.T).sum(axis=1)
    return out


def _chunked(xyz, fn, workers: int):
    xyz = np.atleast_2d(np.asarray(xyz, dtype=float))
    chunks = [xyz[i:i + FIELD_CHUNK] for i in range(0, xyz.shape[0], FIELD_CHUNK)]
    if workers and workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fn, chunks))
    else:
        parts = [fn(c) for c in chunks]
    if not parts:
        return None
    return np.concatenate(parts, axis=-1)


def degree_components(spectrum: HarmonicSpectrum, xyz, n_top: Optional[int] = None, workers: int = 1) -> np.ndarray:
    n_top = spectrum.n_max if n_top is None else n_top
    if n_top > spectrum.n_max:
        raise DegreeRangeError(f"requested degree {n_top} above spectrum n_max={spectrum.n_max}")
    res = _chunked(xyz, lambda c: _degree_components_chunk(spectrum.coeffs, n_top, c), workers)
    return np.zeros((n_top + 1, 0)) if res is None else res


def synthesize(spectrum: HarmonicSpectrum, xyz, workers: int = 1) -> np.ndarray:
    """Evaluate the finite expansion at points (rows of unit vectors)."""
    comps = degree_components(spectrum, xyz, workers=workers)
    acc = NeumaierAccumulator(comps.shape[1:])
    for row in comps:
        acc.add(row)
    return acc.total()


def analyze(samples, grid: QuadratureGrid, n_max: int) -> HarmonicSpectrum:
    """Coefficients f_{k,j} = sum_p w_p f(p) Y_j^k(p) on a product grid."""
    if not grid.structured:
        raise PreconditionError("analyze needs a product quadrature grid")
    if grid.band_limit < n_max:
        raise PreconditionError(f"grid band limit {grid.band_limit} is below n_max={n_max}")
    f = np.asarray(samples, dtype=float)
    if f.shape != (grid.size,):
        raise PreconditionError(f"expected {grid.size} samples, got {f.shape}")
    n_lat, n_lon = grid.lat_nodes.size, grid.n_lon
    f = f.reshape(n_lat, n_lon)
    lon = 2.0 * math.pi * np.arange(n_lon) / n_lon
    marg = np.outer(lon, np.arange(n_max + 1))
    fc = f @ np.cos(marg)
    fs = f @ np.sin(marg)
    wlat = grid.lat_weights * (2.0 * math.pi / n_lon)
    fc = (fc * wlat[:, None]).T
    fs = (fs * wlat[:, None]).T
    ct = grid.lat_nodes
    st = np.sqrt((1.0 - ct) * (1.0 + ct))
    coeffs = np.empty(spectrum_size(n_max))
    for k, L in iter_alf(n_max, ct, st):
        base = k * k
        proj_c = np.einsum("mi,mi->m", L, fc[:k + 1])
        coeffs[base] = proj_c[0]
        if k:
            proj_s = np.einsum("mi,mi->m", L[1:], fs[1:k + 1])
            coeffs[base + 1:base + 2 * k + 1:2] = _SQRT2 * proj_c[1:]
            coeffs[base + 2:base + 2 * k + 2:2] = _SQRT2 * proj_s
    return HarmonicSpectrum(n_max, coeffs, {"source": "analyze", "grid_band_limit": grid.band_limit})


# ---------------------------------------------------------------------------
# zonal kernels
# ---------------------------------------------------------------------------

def zonal_constant(N: int, k: int) -> float:
    """c(k, N) = a_k / (|S^N| P_k^nu(1)) = (k + nu) / (nu |S^N|).

    With this constant c(k, N) P_k^nu(x . y) = sum_j Y_j^k(x) Y_j^k(y).
    """
    N = _check_dim(N)
    if k < 0:
        raise DegreeRangeError(f"degree must be nonnegative, got {k}")
    nu = (N - 1) / 2.0
    return (k + nu) / (nu * sphere_area(N))


def zonal_constants(N: int, n: int) -> np.ndarray:
    N = _check_dim(N)
    nu = (N - 1) / 2.0
    k = np.arange(n + 1, dtype=float)
    return (k + nu) / (nu * sphere_area(N))


def _cosines(gammas) -> np.ndarray:
    g = np.atleast_1d(np.asarray(gammas, dtype=float))
    if np.any(~np.isfinite(g)) or np.any(g < 0.0) or np.any(g > math.pi):
        raise DomainError("geodesic angles must lie in [0, pi]")
    # libm cos per element: identical results whatever the batch size
    return clamp_cosine(np.array([math.cos(v) for v in g.ravel()]).reshape(g.shape))


def _zonal_sums(N: int, alpha: float, n_list: Sequence[int], gammas) -> np.ndarray:
    """Cesaro kernel values, shape (len(n_list), len(gammas)).

    One Gegenbauer sweep per gamma batch; ascending-degree compensated sums.
    """
    N = _check_dim(N)
    n_arr = np.asarray([int(n) for n in n_list])
    if n_arr.size == 0:
        raise PreconditionError("n_list is empty")
    if np.any(n_arr < 0):
        raise DegreeRangeError("summation indices must be nonnegative")
    t = _cosines(gammas)
    n_top = int(n_arr.max())
    c = zonal_constants(N, n_top)
    weights = np.zeros((n_arr.size, n_top + 1))
    for i, n in enumerate(n_arr):
        weights[i, : n + 1] = cesaro_multipliers(alpha, int(n)) * c[: n + 1]
    acc = NeumaierAccumulator((n_arr.size, t.size))
    nu = (N - 1) / 2.0
    for k, p in enumerate(iter_gegenbauer(nu, n_top, t)):
        rows = n_arr >= k
        acc.add(weights[rows, k][:, None] * p[None, :], where=rows)
    return acc.total()


def spectral_kernel(N: int, n: int, gamma):
    """Spectral function Theta(gamma, n) = sum_{k<=n} c(k, N) P_k^nu(cos gamma)."""
    vals = _zonal_sums(N, 0.0, [n], gamma)[0]
    return float(vals[0]) if np.ndim(gamma) == 0 else vals


def cesaro_kernel(N: int, alpha, n: int, gamma):
    """Cesaro mean of order alpha of the spectral function, as a function of gamma."""
    a = _as_order(alpha).alpha
    if n < 1:
        raise DegreeRangeError(f"n must be >= 1, got {n}")
    vals = _zonal_sums(N, a, [n], gamma)[0]
    return float(vals[0]) if np.ndim(gamma) == 0 else vals


def printed_cesaro_kernel(N: int, alpha, n: int, gamma: float) -> float:
    """The kernel with the literal degree factor (k + nu)^nu in place of the
    trace-normalised constant. Kept for comparison only."""
    a = _as_order(alpha).alpha
    nu = (N - 1) / 2.0
    t = _cosines(gamma)
    pre = math.exp(math.lgamma(n + 1) - math.lgamma(n + a + 1))
    total = 0.0
    for k, p in enumerate(iter_gegenbauer(nu, n, t)):
        ratio = math.exp(math.lgamma(n - k + a + 1) - math.lgamma(n - k + 1))
        total += ratio * (k + nu) ** nu * float(p[0])
    return pre * total


@dataclass(frozen=True, eq=False)
class KernelProfile:
    N: int
    alpha: float
    n_list: tuple
    gamma_grid: np.ndarray
    values: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "gamma", "value"])
        for i, n in enumerate(self.n_list):
            for g, v in zip(self.gamma_grid, self.values[i]):
                writer.writerow([n, repr(float(g)), repr(float(v))])
        return buf.getvalue()


def kernel_profile(N: int, alpha, n_list: Sequence[int], gamma_grid) -> KernelProfile:
    a = _as_order(alpha).alpha
    n_list = tuple(int(n) for n in n_list)
    gam = np.atleast_1d(np.asarray(gamma_grid, dtype=float))
    return KernelProfile(N, a, n_list, gam, _zonal_sums(N, a, n_list, gam))


# ---------------------------------------------------------------------------
# Cesaro means of expansions
# ---------------------------------------------------------------------------

def _cesaro_from_components(comps: np.ndarray, alpha: float, n_list: Sequence[int]) -> np.ndarray:
    n_arr = np.asarray([int(n) for n in n_list])
    n_top = int(n_arr.max())
    weights = np.zeros((n_arr.size, n_top + 1))
    for i, n in enumerate(n_arr):
        weights[i, : n + 1] = cesaro_multipliers(alpha, int(n))
    acc = NeumaierAccumulator((n_arr.size, comps.shape[1]))
    for k in range(n_top + 1):
        rows = n_arr >= k
        acc.add(weights[rows, k][:, None] * comps[k][None, :], where=rows)
    return acc.total()


def _check_n_list(n_list, n_max):
    n_list = [int(n) for n in n_list]
    if not n_list:
        raise PreconditionError("n_list is empty")
    if min(n_list) < 0:
        raise DegreeRangeError("summation indices must be nonnegative")
    if max(n_list) > n_max:
        raise DegreeRangeError(f"summation index {max(n_list)} exceeds spectrum n_max={n_max}")
    return n_list


def cesaro_mean_field(spectrum: HarmonicSpectrum, alpha, n_list: Sequence[int], points, workers: int = 1) -> np.ndarray:
    """S_n^alpha f at many points for several n; shape (len(n_list), P).

    ``points`` is a QuadratureGrid, a sequence of SpherePoint, or an array of
    unit vectors. Work is split in fixed-size chunks so results do not depend
    on ``workers``.
    """
    a = _as_order(alpha).alpha
    n_list = _check_n_list(n_list, spectrum.n_max)
    xyz = _points_xyz(points)
    n_top = max(n_list)

    def run(chunk):
        comps = _degree_components_chunk(spectrum.coeffs, n_top, chunk)
        return _cesaro_from_components(comps, a, n_list)

    res = _chunked(xyz, run, workers)
    return np.zeros((len(n_list), 0)) if res is None else res


def cesaro_mean_point(spectrum: HarmonicSpectrum, alpha, n: int, x: SpherePoint) -> float:
    """S_n^alpha f(x); alpha = 0 gives the partial sum S_n f(x)."""
    if n > spectrum.n_max:
        raise DegreeRangeError(f"n={n} exceeds spectrum n_max={spectrum.n_max}")
    return float(cesaro_mean_field(spectrum, alpha, [n], x.array[None, :])[0, 0])


def _points_xyz(points) -> np.ndarray:
    if isinstance(points, QuadratureGrid):
        return points.xyz
    if isinstance(points, SpherePoint):
        return points.array[None, :]
    if len(points) and isinstance(points[0], SpherePoint):
        return np.array([p.coords for p in points])
    return np.atleast_2d(np.asarray(points, dtype=float))


# ---------------------------------------------------------------------------
# zonal functions: Funk-Hecke coefficients
# ---------------------------------------------------------------------------

_GL20 = roots_legendre(20)
_GL10 = roots_legendre(10)


def _panel_rule(a, b, rule):
    x, w = rule
    half = 0.5 * (b - a)
    return (a[:, None] + half[:, None] * (x[None, :] + 1.0)), half[:, None] * w[None, :]


def funk_hecke_coefficients(
    g: Callable[[np.ndarray], np.ndarray],
    N: int,
    n_max: int,
    breakpoints: Sequence[float] = (),
    tol: float = 1e-12,
    max_rounds: int = 400,
) -> np.ndarray:
    """Per-degree eigenvalues lambda_k of the zonal function y -> g(gamma(y0, y)).

    lambda_k = |S^{N-1}| int_0^pi g(gamma) P_k^nu(cos gamma) / P_k^nu(1) sin^{N-1}(gamma) d gamma,
    so that g(gamma) = sum_k lambda_k c(k, N) P_k^nu(cos gamma) and the
    expansion coefficients are f_{k,j} = lambda_k Y_j^k(y0).

    ``g`` must accept arrays. Integration is adaptive composite Gauss-Legendre
    (20-point rule, 10-point error estimate), bisecting intervals until the
    summed error estimate is below ``tol`` times the coefficient scale.
    """
    N = _check_dim(N)
    nu = (N - 1) / 2.0
    shell = _sphere_area_any(N - 1)
    p_at_one = np.array([float(v) for v in iter_gegenbauer(nu, n_max, np.array(1.0))])

    def integrals(a, b):
        out = []
        for rule in (_GL20, _GL10):
            nodes, w = _panel_rule(a, b, rule)
            gv = np.asarray(g(nodes.ravel()), dtype=float).reshape(nodes.shape)
            if not np.all(np.isfinite(gv)):
                raise IntegrabilityError("profile is not finite at interior quadrature nodes")
            weight = (gv * np.sin(nodes) ** (N - 1) * w).ravel()
            tcos = np.cos(nodes.ravel())
            vals = np.empty((n_max + 1, a.size))
            for k, p in enumerate(iter_gegenbauer(nu, n_max, tcos)):
                vals[k] = (p * weight).reshape(nodes.shape).sum(axis=1)
            out.append(vals)
        return out[0], np.max(np.abs(out[0] - out[1]), axis=0)

    edges = sorted({0.0, math.pi, *(float(b) for b in breakpoints if 0.0 < b < math.pi)})
    h0 = min(math.pi / 8.0, 8.0 / (n_max + 1.0))
    lo, hi = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        pieces = max(1, math.ceil((b - a) / h0))
        cuts = np.linspace(a, b, pieces + 1)
        lo.extend(cuts[:-1])
        hi.extend(cuts[1:])
    lo, hi = np.array(lo), np.array(hi)
    vals, err = integrals(lo, hi)
    for _ in range(max_rounds):
        total = vals.sum(axis=1)
        scale = max(1.0, float(np.max(np.abs(total))))
        budget = tol * scale
        if err.sum() <= budget:
            return shell * total / p_at_one
        split = err > budget / (2.0 * err.size)
        if not np.any(split):
            split = err == err.max()
        mid = 0.5 * (lo[split] + hi[split])
        if np.any(mid <= lo[split]) or np.any(mid >= hi[split]):
            break
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        new_vals, new_err = integrals(new_lo, new_hi)
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        vals = np.concatenate([vals[:, keep], new_vals], axis=1)
        err = np.concatenate([err[keep], new_err])
        order = np.argsort(lo, kind="stable")
        lo, hi, vals, err = lo[order], hi[order], vals[:, order], err[order]
    raise IntegrabilityError("adaptive quadrature did not converge; profile looks non-integrable")


def zonal_spectrum(lambdas, center: SpherePoint, n_max: Optional[int] = None, **metadata) -> HarmonicSpectrum:
    """Spectrum of y -> g(gamma(center, y)) from its Funk-Hecke eigenvalues (S^2)."""
    lambdas = np.asarray(lambdas, dtype=float)
    n_max = lambdas.size - 1 if n_max is None else n_max
    y = basis_matrix(n_max, center.array)[:, 0]
    degrees = np.repeat(np.arange(n_max + 1), 2 * np.arange(n_max + 1) + 1)
    return HarmonicSpectrum(n_max, lambdas[degrees] * y, dict(metadata))


def zonal_synthesis(lambdas, N: int, gamma) -> np.ndarray:
    """g(gamma) = sum_k lambda_k c(k, N) P_k^nu(cos gamma)."""
    lambdas = np.asarray(lambdas, dtype=float)
    n = lambdas.size - 1
    t = _cosines(gamma)
    c = zonal_constants(N, n)
    acc = NeumaierAccumulator(t.shape)
    for k, p in enumerate(iter_gegenbauer((N - 1) / 2.0, n, t)):
        acc.add(lambdas[k] * c[k] * p)
    return acc.total()
