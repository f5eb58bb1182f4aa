"""Leading-order asymptotics of the Cesaro kernel and growth-bound sweeps.

For gamma away from 0 and pi the kernel behaves like

    2/|S^N| * Gamma(alpha+1) Gamma(n+(N+1)/2) / (Gamma(n+alpha+1) Gamma((N+1)/2))
        * sin((n + (N+alpha)/2) gamma - ((N-1)/2 + alpha) pi/2)
        / ((2 sin gamma)^{(N-1)/2} (2 sin(gamma/2))^{1+alpha}),

obtained from the singularity of the generating function
(1 - r^2)(1 - r)^{-alpha-1}(1 - 2 r cos gamma + r^2)^{-(N+1)/2} at r = exp(-i gamma).
The remainder is O(n^{(N-1)/2 - alpha - 1}) + O(1/n).
:func:`printed_main_term` keeps the variant with the prefactor 1 and
phase (n + (N+1)/2) gamma - ((N-1)/2 + alpha/2) pi/2, which does not track the
trace-normalised kernel; it is exposed only so the two can be compared.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .special_fn import _as_order, log_gamma_ratio_log
from .spectral_core import _zonal_sums
from .sphere_geom import sphere_area

INTERIOR_TOL = 1e-6
SWEEP_POINTS = 2000


@dataclass(frozen=True)
class AsymptoticTerm:
    N: int
    alpha: float
    n: int
    gamma: float

    def __post_init__(self):
        _as_order(self.alpha)
        if not (INTERIOR_TOL <= self.gamma <= math.pi - INTERIOR_TOL):
            raise DomainError(f"gamma={self.gamma} is not strictly inside (0, pi)")
        if self.n < 1:
            raise DomainError("n must be positive")


def _prefactor_log(N, alpha, n):
    h = (N + 1) / 2.0
    return log_gamma_ratio_log(n + h, n + alpha + 1.0) + math.lgamma(alpha + 1.0) - math.lgamma(h)


def _envelope(N, alpha, gamma):
    g = np.asarray(gamma, dtype=float)
    return (2.0 * np.sin(g)) ** ((N - 1) / 2.0) * (2.0 * np.sin(g / 2.0)) ** (1.0 + alpha)


def phase(N: int, alpha: float, n: int, gamma):
    return (n + (N + alpha) / 2.0) * np.asarray(gamma, dtype=float) - ((N - 1) / 2.0 + alpha) * math.pi / 2.0


def main_term(term: AsymptoticTerm) -> float:
    N, a, n, g = term.N, term.alpha, term.n, term.gamma
    amp = 2.0 / sphere_area(N) * math.exp(_prefactor_log(N, a, n))
    return float(amp * math.sin(phase(N, a, n, g)) / _envelope(N, a, g))


def main_term_array(N: int, alpha: float, n: int, gammas) -> np.ndarray:
    g = np.asarray(gammas, dtype=float)
    if np.any(g < INTERIOR_TOL) or np.any(g > math.pi - INTERIOR_TOL):
        raise DomainError("main term requires interior angles")
    amp = 2.0 / sphere_area(N) * math.exp(_prefactor_log(N, alpha, n))
    return amp * np.sin(phase(N, alpha, n, g)) / _envelope(N, alpha, g)


def printed_phase(N, alpha, n, gamma):
    return (n + (N + 1) / 2.0) * np.asarray(gamma, dtype=float) - ((N - 1) / 2.0 + alpha / 2.0) * math.pi / 2.0


def printed_main_term(term: AsymptoticTerm) -> float:
    N, a, n, g = term.N, term.alpha, term.n, term.gamma
    amp = math.exp(_prefactor_log(N, a, n))
    return float(amp * math.sin(printed_phase(N, a, n, g)) / _envelope(N, a, g))


def _first_argmax(values):
    # np.argmax returns the first index on ties
    i = int(np.argmax(values))
    return i, float(values[i])


def sup_bound_ratio(N: int, alpha, n: int, gamma_min: float, points: int = SWEEP_POINTS) -> float:
    """max_{gamma in [gamma_min, pi]} |Theta^alpha(gamma, n)| / n^{N-1-alpha}."""
    a = _as_order(alpha).alpha
    if not (0.0 < gamma_min < math.pi):
        raise DomainError("gamma_min must lie in (0, pi)")
    grid = np.linspace(gamma_min, math.pi, points)
    vals = np.abs(_zonal_sums(N, a, [n], grid)[0])
    return _first_argmax(vals)[1] / float(n) ** (N - 1 - a)


def global_sup(N: int, alpha, n: int, points: int = SWEEP_POINTS):
    """(sup value, argmax angle) of |Theta^alpha(., n)| over a grid of [0, pi]."""
    a = _as_order(alpha).alpha
    grid = np.linspace(0.0, math.pi, points)
    vals = np.abs(_zonal_sums(N, a, [n], grid)[0])
    i, v = _first_argmax(vals)
    return v, float(grid[i])


def global_sup_ratio(N: int, alpha, n: int, points: int = SWEEP_POINTS) -> float:
    """max_{gamma in [0, pi]} |Theta^alpha(gamma, n)| / n^N."""
    return global_sup(N, alpha, n, points)[0] / float(n) ** N


def fit_growth_slope(n_list: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of log(values) against log(n)."""
    n = np.asarray(n_list, dtype=float)
    v = np.asarray(values, dtype=float)
    if n.shape != v.shape or n.size < 3:
        raise DomainError("need at least three (n, value) pairs of equal length")
    if np.any(v <= 0) or np.any(n <= 0):
        raise DomainError("slope fit needs positive values")
    slope, _ = np.polyfit(np.log(n), np.log(v), 1)
    return float(slope)


@dataclass(frozen=True, eq=False)
class AsymptoticSweep:
    N: int
    alpha: float
    n_list: tuple
    gamma_grid: np.ndarray
    exact: np.ndarray
    main: np.ndarray

    @property
    def abs_diff(self) -> np.ndarray:
        return np.abs(self.exact - self.main)

    def sup_diff(self) -> np.ndarray:
        return self.abs_diff.max(axis=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "gamma", "exact", "main_term", "abs_diff"])
        diff = self.abs_diff
        for i, n in enumerate(self.n_list):
            for g, e, m, d in zip(self.gamma_grid, self.exact[i], self.main[i], diff[i]):
                writer.writerow([n, repr(float(g)), repr(float(e)), repr(float(m)), repr(float(d))])
        return buf.getvalue()


def asymptotic_sweep(N: int, alpha, n_list: Sequence[int], gamma_grid) -> AsymptoticSweep:
    a = _as_order(alpha).alpha
    g = np.asarray(gamma_grid, dtype=float)
    exact = _zonal_sums(N, a, n_list, g)
    main = np.stack([main_term_array(N, a, int(n), g) for n in n_list])
    return AsymptoticSweep(N, a, tuple(int(n) for n in n_list), g, exact, main)
