"""Scalar building blocks: Gegenbauer polynomials, gamma ratios, Cesaro numbers.

All evaluation is in IEEE double precision. Gegenbauer values come from the
three-term recurrence

    k P_k(t) = 2 (k + nu - 1) t P_{k-1}(t) - (k + 2 nu - 2) P_{k-2}(t),

seeded with P_0 = 1 and P_1 = 2 nu t. The vectorised generator
:func:`iter_gegenbauer` is the single implementation; scalar and batch entry
points wrap it so that they agree bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegreeRangeError, DomainError

K_MAX_LIMIT = 4096
T_CLAMP_TOL = 1e-12
DIRECT_PRODUCT_MAX_N = 64

# Bernoulli-number coefficients B_2k / (2k (2k-1)) of the Stirling series
_STIRLING_COEFFS = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
_STIRLING_MIN_ARG = 12.0


@dataclass(frozen=True)
class GegenbauerParam:
    """Order ``nu`` and highest admissible degree ``k_max``."""

    nu: float
    k_max: int

    def __post_init__(self):
        if not self.nu > 0:
            raise DomainError(f"Gegenbauer order nu must be positive, got {self.nu}")
        if int(self.k_max) != self.k_max or self.k_max < 0:
            raise DegreeRangeError(f"k_max must be a nonnegative integer, got {self.k_max}")
        if self.k_max > K_MAX_LIMIT:
            raise DegreeRangeError(f"k_max={self.k_max} exceeds the supported range {K_MAX_LIMIT}")

    @classmethod
    def for_sphere(cls, N: int, k_max: int) -> "GegenbauerParam":
        """Parameters for the zonal polynomials of S^N (nu = (N-1)/2)."""
        return cls(nu=(N - 1) / 2.0, k_max=k_max)


@dataclass(frozen=True)
class CesaroOrder:
    """Cesaro summation order alpha > -1."""

    alpha: float

    def __post_init__(self):
        if not (self.alpha > -1.0) or not math.isfinite(self.alpha):
            raise DomainError(f"alpha must exceed -1, got {self.alpha}")


def _as_order(order) -> CesaroOrder:
    return order if isinstance(order, CesaroOrder) else CesaroOrder(float(order))


def clamp_cosine(t):
    """Clamp cosines that overshoot [-1, 1] by rounding slop; reject the rest."""
    arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(np.abs(arr) > 1.0 + T_CLAMP_TOL):
        raise DomainError("argument outside [-1, 1] beyond the clamp tolerance")
    return np.clip(arr, -1.0, 1.0)


def iter_gegenbauer(nu: float, k_max: int, t):
    """Yield P_0^nu(t), ..., P_{k_max}^nu(t) as arrays shaped like ``t``.

    ``t`` must already be clamped. This is the only place the recurrence
    is written down.
    """
    t = np.asarray(t, dtype=float)
    p_prev = np.ones_like(t)
    yield p_prev
    if k_max == 0:
        return
    p_cur = 2.0 * nu * t
    yield p_cur
    for k in range(2, k_max + 1):
        p_next = (2.0 * (k + nu - 1.0) * t * p_cur - (k + 2.0 * nu - 2.0) * p_prev) / k
        p_prev, p_cur = p_cur, p_next
        yield p_cur


def gegenbauer_profile(param: GegenbauerParam, t) -> np.ndarray:
    """All degrees 0..k_max at ``t``; entry k equals :func:`gegenbauer_eval`."""
    tc = clamp_cosine(t)
    return np.stack(list(iter_gegenbauer(param.nu, param.k_max, tc)))


def gegenbauer_eval(param: GegenbauerParam, k: int, t):
    """P_k^nu(t) by the three-term recurrence."""
    if k < 0 or k > param.k_max:
        raise DegreeRangeError(f"degree {k} outside [0, {param.k_max}]")
    tc = clamp_cosine(t)
    value = None
    for value in iter_gegenbauer(param.nu, k, tc):
        pass
    return float(value) if np.ndim(value) == 0 else value


def _stirling_tail(z: float) -> float:
    zinv = 1.0 / z
    zinv2 = zinv * zinv
    acc = 0.0
    for coeff in reversed(_STIRLING_COEFFS):
        acc = acc * zinv2 + coeff
    return acc * zinv


def log_gamma_ratio_log(a: float, b: float) -> float:
    """ln(Gamma(a) / Gamma(b)) for a, b > 0, accurate when a and b are close.

    Both arguments are shifted above 12 with Gamma(z) = Gamma(z+1)/z, then the
    Stirling expansions are differenced analytically so that the large
    ``z ln z`` terms cancel before rounding.
    """
    if not (a > 0 and b > 0) or not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"log_gamma_ratio needs positive finite arguments, got {a}, {b}")
    if a == b:
        return 0.0
    log_corr = 0.0
    while a < _STIRLING_MIN_ARG or b < _STIRLING_MIN_ARG:
        log_corr += math.log(b / a)
        a += 1.0
        b += 1.0
    d = a - b
    main = (a - 0.5) * math.log1p(d / b) + d * math.log(b) - d
    return main + (_stirling_tail(a) - _stirling_tail(b)) + log_corr


def log_gamma_ratio(a: float, b: float) -> float:
    """Gamma(a) / Gamma(b) evaluated as exp of a stably computed log-difference."""
    return math.exp(log_gamma_ratio_log(a, b))


def cesaro_coeff(order, n: int) -> float:
    """Cesaro number A_n^alpha = Gamma(n + alpha + 1) / (Gamma(alpha + 1) n!).

    Direct product prod_{j<=n} (alpha + j) / j up to n = 64, log space beyond.
    """
    alpha = _as_order(order).alpha
    if int(n) != n or n < 0:
        raise DegreeRangeError(f"n must be a nonnegative integer, got {n}")
    n = int(n)
    if n <= DIRECT_PRODUCT_MAX_N:
        value = 1.0
        for j in range(1, n + 1):
            value *= (alpha + j) / j
        return value
    return math.exp(log_gamma_ratio_log(n + alpha + 1.0, n + 1.0) - math.lgamma(alpha + 1.0))


@lru_cache(maxsize=64)
def _cesaro_table(alpha: float, n_max: int) -> np.ndarray:
    table = np.array([cesaro_coeff(alpha, n) for n in range(n_max + 1)])
    table.setflags(write=False)
    return table


def cesaro_table(order, n_max: int) -> np.ndarray:
    """Read-only array of A_0^alpha .. A_{n_max}^alpha (cached)."""
    return _cesaro_table(_as_order(order).alpha, int(n_max))


def cesaro_multipliers(order, n: int) -> np.ndarray:
    """Vector of A_{n-k}^alpha / A_n^alpha for k = 0..n."""
    table = cesaro_table(order, n)
    return table[n::-1] / table[n]


def cesaro_multiplier(order, n: int, k: int) -> float:
    """Weight A_{n-k}^alpha / A_n^alpha given to degree k in the n-th mean."""
    if k < 0 or k > n:
        raise DegreeRangeError(f"need 0 <= k <= n, got k={k}, n={n}")
    table = cesaro_table(order, n)
    return float(table[n - k] / table[n])
