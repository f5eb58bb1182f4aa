"""Cesaro means of Fourier-Laplace series on spheres.

Zonal Cesaro kernels and their asymptotics, spherical-harmonic analysis on
S^2, and numerical diagnostics for maximal-function estimates and
generalized localization.
"""
from .errors import (
    DegreeRangeError,
    DomainError,
    IntegrabilityError,
    PreconditionError,
    ResolutionError,
    SphCesaroError,
    UnsupportedFamilyError,
)
from .special_fn import (
    CesaroOrder,
    GegenbauerParam,
    cesaro_coeff,
    cesaro_multiplier,
    gegenbauer_eval,
    gegenbauer_profile,
    log_gamma_ratio,
)
from .sphere_geom import (
    Cap,
    QuadratureGrid,
    SpherePoint,
    antipode,
    build_quadrature_grid,
    cap_measure,
    cap_restrict,
    geodesic_distance,
    sphere_area,
)
from .spectral_core import (
    HarmonicBasis,
    HarmonicSpectrum,
    KernelProfile,
    analyze,
    cesaro_kernel,
    cesaro_mean_field,
    cesaro_mean_point,
    eigenvalue,
    evaluate_basis,
    funk_hecke_coefficients,
    harmonic_dimension,
    kernel_profile,
    spectral_kernel,
    synthesize,
    zonal_constant,
)
from .asymptotics import (
    AsymptoticTerm,
    fit_growth_slope,
    global_sup_ratio,
    main_term,
    sup_bound_ratio,
)
from .maximal import (
    LevelSetReport,
    MaximalReport,
    hl_maximal,
    localization_ratio,
    maximal_operator,
    strong_type_norm,
    theorem_ratio,
    weak_type_levelset,
)
from .testlib import TestFunction

__version__ = "0.1.0"
