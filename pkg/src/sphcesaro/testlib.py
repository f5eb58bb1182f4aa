"""Seeded test-function families on S^2 with reference spectra.

Families
--------
band_limited_random   random coefficients up to ``degree`` (seed required)
pure_mode             a single harmonic Y_j^k
cap_indicator         ``scale`` times the indicator of B(center, radius)
cap_vanishing_bump    smooth, zero on V = B(center, radius), equal to ``scale``
                      beyond radius + width (a plateau around the antipode)
antipodal_singular    ``scale`` * gamma(y, -center)^(-beta) on B(-center, support);
                      samples within ``epsilon`` of -center are capped and flagged

Centres are given as ``[theta, phi]`` in radians.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import DomainError, UnsupportedFamilyError
from .spectral_core import (
    HarmonicSpectrum,
    funk_hecke_coefficients,
    spectrum_size,
    synthesize,
    zonal_spectrum,
)
from .sphere_geom import QuadratureGrid, SpherePoint, antipode, geodesic_angles

FAMILIES = ("band_limited_random", "pure_mode", "cap_indicator", "cap_vanishing_bump", "antipodal_singular")
ZONAL_FAMILIES = ("cap_indicator", "cap_vanishing_bump", "antipodal_singular")

DEFAULTS = {
    "band_limited_random": {"seed": None, "degree": 8, "scale": 1.0},
    "pure_mode": {"k": 2, "j": 1, "scale": 1.0},
    "cap_indicator": {"center": [0.0, 0.0], "radius": math.pi / 3, "scale": 1.0},
    "cap_vanishing_bump": {"center": [0.0, 0.0], "radius": 1.2, "width": 0.5, "scale": 1.0},
    "antipodal_singular": {"center": [0.0, 0.0], "beta": 1.0, "support": math.pi, "epsilon": 1e-3, "scale": 1.0},
}


def _psi(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    a = _psi(t)
    b = _psi(1.0 - np.asarray(t, dtype=float))
    return a / (a + b)


@dataclass(frozen=True)
class TestFunction:
    family: str
    params: dict = field(default_factory=dict)
    description: str = ""

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UnsupportedFamilyError(f"unknown family {self.family!r}")
        merged = dict(DEFAULTS[self.family])
        merged.update(self.params)
        object.__setattr__(self, "params", merged)
        p = merged
        if self.family == "band_limited_random" and p["seed"] is None:
            raise DomainError("band_limited_random needs an explicit seed")
        if self.family == "pure_mode" and not (1 <= p["j"] <= 2 * p["k"] + 1):
            raise DomainError("pure_mode index j out of range")
        if self.family in ("cap_indicator", "cap_vanishing_bump") and not (0 < p["radius"] <= math.pi):
            raise DomainError("cap radius must lie in (0, pi]")
        if self.family == "cap_vanishing_bump" and not p["width"] > 0:
            raise DomainError("bump width must be positive")
        if self.family == "antipodal_singular":
            if not (0 < p["beta"] < 2):
                raise DomainError("antipodal_singular needs 0 < beta < N = 2 to stay in L1")
            if not (0 < p["epsilon"] < p["support"] <= math.pi):
                raise DomainError("need 0 < epsilon < support <= pi")
        if not self.description:
            object.__setattr__(self, "description", f"{self.family}({json.dumps(p, sort_keys=True)})")

    # -- descriptors ------------------------------------------------------

    def to_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params), "description": self.description}

    @classmethod
    def from_dict(cls, d: dict) -> "TestFunction":
        return cls(d["family"], dict(d.get("params", {})), d.get("description", ""))

    def scaled(self, s: float) -> "TestFunction":
        p = dict(self.params)
        p["scale"] = p.get("scale", 1.0) * s
        return TestFunction(self.family, p)

    # -- geometry ---------------------------------------------------------

    @property
    def center(self) -> SpherePoint:
        theta, phi = self.params.get("center", [0.0, 0.0])
        return SpherePoint.from_angles(theta, phi)

    @property
    def axis(self) -> SpherePoint:
        """Pole about which a zonal family is symmetric."""
        return antipode(self.center) if self.family == "antipodal_singular" else self.center

    def profile(self, gamma, capped: bool = False):
        """Zonal profile g(gamma), gamma measured from :attr:`axis`."""
        p = self.params
        g = np.asarray(gamma, dtype=float)
        s = p["scale"]
        if self.family == "cap_indicator":
            return s * (g <= p["radius"]).astype(float)
        if self.family == "cap_vanishing_bump":
            return s * smooth_step((g - p["radius"]) / p["width"])
        if self.family == "antipodal_singular":
            eff = np.maximum(g, p["epsilon"]) if capped else np.where(g > 0, g, np.inf)
            return np.where(g < p["support"], s * eff ** (-p["beta"]), 0.0)
        raise UnsupportedFamilyError(f"{self.family} is not zonal")

    def breakpoints(self):
        p = self.params
        if self.family == "cap_indicator":
            return [p["radius"]]
        if self.family == "cap_vanishing_bump":
            return [p["radius"], min(p["radius"] + p["width"], math.pi)]
        if self.family == "antipodal_singular":
            return [p["support"]]
        return []

    def _stored_spectrum(self) -> HarmonicSpectrum:
        p = self.params
        if self.family == "pure_mode":
            s = HarmonicSpectrum.pure_mode(p["k"], p["k"], p["j"]) * p["scale"]
            return HarmonicSpectrum(s.n_max, s.coeffs, {"source": self.description})
        rng = np.random.default_rng(p["seed"])
        d = p["degree"]
        c = rng.standard_normal(spectrum_size(d))
        degrees = np.repeat(np.arange(d + 1), 2 * np.arange(d + 1) + 1)
        c = p["scale"] * c / (1.0 + degrees)
        return HarmonicSpectrum(d, c, {"source": self.description})

    # -- operations -------------------------------------------------------

    def sample_with_flags(self, points):
        xyz = points.xyz if isinstance(points, QuadratureGrid) else np.atleast_2d(np.asarray(points, dtype=float))
        flags = np.zeros(xyz.shape[0], dtype=bool)
        if self.family in ("band_limited_random", "pure_mode"):
            return synthesize(self._stored_spectrum(), xyz), flags
        gam = geodesic_angles(self.axis.array, xyz)
        if self.family == "antipodal_singular":
            flags = gam < self.params["epsilon"]
            return self.profile(gam, capped=True), flags
        return self.profile(gam), flags

    def sample(self, points) -> np.ndarray:
        return self.sample_with_flags(points)[0]

    def reference_spectrum(self, n_max: int) -> HarmonicSpectrum:
        if self.family in ("band_limited_random", "pure_mode"):
            return self._stored_spectrum().resized(n_max)
        if self.family not in ZONAL_FAMILIES:
            raise UnsupportedFamilyError(f"no reference spectrum for {self.family}")
        lam = self.funk_hecke(n_max)
        return zonal_spectrum(lam, self.axis, n_max, source=self.description)

    def funk_hecke(self, n_max: int) -> np.ndarray:
        return funk_hecke_coefficients(self.profile, 2, n_max, breakpoints=self.breakpoints())

    def l1_norm(self) -> float:
        """||f||_1 of the uncapped function (1-D adaptive integral for zonal families)."""
        if self.family in ZONAL_FAMILIES:
            pts = [b for b in self.breakpoints() if 0 < b < math.pi]
            val, _ = integrate.quad(
                lambda t: abs(float(self.profile(t))) * math.sin(t),
                0.0, math.pi, points=pts or None, epsabs=0.0, epsrel=1e-13, limit=500,
            )
            return 2.0 * math.pi * val
        from .sphere_geom import build_quadrature_grid

        d = self._stored_spectrum().n_max
        grid = build_quadrature_grid(4 * d + 8)
        return grid.integrate(np.abs(self.sample(grid)))


def sample(f: TestFunction, grid) -> np.ndarray:
    return f.sample(grid)


def reference_spectrum(f: TestFunction, n_max: int) -> HarmonicSpectrum:
    return f.reference_spectrum(n_max)


def default_family(name: str, seed: int = 7) -> TestFunction:
    """The parameter set used by the acceptance experiments for each family."""
    center = [0.9, 0.4]
    presets = {
        "band_limited_random": {"seed": seed, "degree": 8},
        "pure_mode": {"k": 2, "j": 3},
        "cap_indicator": {"center": center, "radius": math.pi / 3},
        "cap_vanishing_bump": {"center": center, "radius": 1.2, "width": 0.5},
        "antipodal_singular": {"center": center, "beta": 1.0, "support": math.pi - 1.2},
    }
    return TestFunction(name, presets[name])
