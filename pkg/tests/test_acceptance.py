"""Acceptance suite: one marked test (or parametrized group) per criterion.

The terminal summary prints a PASS/FAIL line for each criterion number.
"""
import json
import math
from pathlib import Path

import numpy as np
import pytest
import yaml

from sphcesaro import cli
from sphcesaro.asymptotics import asymptotic_sweep, fit_growth_slope, global_sup, global_sup_ratio, sup_bound_ratio
from sphcesaro.maximal import (
    default_radii,
    hl_maximal_field,
    localization_ratio,
    maximal_operator_field,
    theorem_ratio,
    weak_type_levelset,
)
from sphcesaro.special_fn import cesaro_multiplier
from sphcesaro.spectral_core import (
    HarmonicSpectrum,
    basis_matrix,
    cesaro_kernel,
    cesaro_mean_field,
    evaluate_basis,
    printed_cesaro_kernel,
    spectral_kernel,
)
from sphcesaro.sphere_geom import Cap, SpherePoint, build_quadrature_grid, geodesic_angles, random_points
from sphcesaro.testlib import FAMILIES, TestFunction, default_family

SCHEDULE = [32, 64, 128, 256, 512]
X0 = SpherePoint.from_angles(0.9, 0.4)
V1 = Cap(X0, 0.6)
V = Cap(X0, 1.2)
CONFIGS = Path(__file__).resolve().parents[1] / "configs"


@pytest.mark.criterion(1, "kernel oracle equivalence (N=2, n<=12, 50 pairs, gap <= 1e-10)")
def test_kernel_matches_explicit_double_sum(note):
    a, b = random_points(50, 101), random_points(50, 102)
    Ba, Bb = basis_matrix(12, a), basis_matrix(12, b)
    gam = np.array([geodesic_angles(x, y[None, :])[0] for x, y in zip(a, b)])
    gap = 0.0
    for n in range(1, 13):
        m = (n + 1) ** 2
        brute = np.sum(Ba[:m] * Bb[:m], axis=0)
        gap = max(gap, float(np.max(np.abs(spectral_kernel(2, n, gam) - brute))))
    t = math.pi / 3
    note(f"max gap {gap:.2e}")
    note(f"kernel at N=2 n=4 gamma=pi/3: printed constant {printed_cesaro_kernel(2, 0.0, 4, t):.4f}, "
         f"used {spectral_kernel(2, 4, t):.4f}")
    assert gap <= 1e-10


@pytest.mark.criterion(2, "alpha=0 means reproduce band-limited functions at 100 grid points within 1e-9")
@pytest.mark.parametrize("seed, degree", [(3, 6), (11, 12), (29, 20)])
def test_partial_sums_reproduce_band_limited(seed, degree, note):
    f = TestFunction("band_limited_random", {"seed": seed, "degree": degree})
    grid = build_quadrature_grid(max(degree, 16))
    rows = np.random.default_rng(seed).choice(grid.size, 100, replace=False)
    pts = grid.xyz[rows]
    spec = f.reference_spectrum(degree)
    direct = spec.coeffs @ basis_matrix(degree, pts)
    got = cesaro_mean_field(spec, 0.0, [degree], pts)[0]
    gap = float(np.max(np.abs(got - direct)))
    note(f"degree {degree}: gap {gap:.1e}")
    assert gap <= 1e-9
    assert np.max(np.abs(got - f.sample(grid)[rows])) <= 1e-9


@pytest.mark.criterion(3, "multiplier exactness on 20 random pure modes within 1e-12")
@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.0])
def test_pure_mode_multipliers(alpha, note):
    rng = np.random.default_rng(7)
    n = 24
    worst = 0.0
    for _ in range(20):
        k = int(rng.integers(0, n + 1))
        j = int(rng.integers(1, 2 * k + 2))
        x = SpherePoint.from_vector(rng.standard_normal(3))
        got = cesaro_mean_field(HarmonicSpectrum.pure_mode(n, k, j), alpha, [n], x.array[None, :])[0, 0]
        want = cesaro_multiplier(alpha, n, k) * evaluate_basis(k, j, x)
        worst = max(worst, abs(got - want))
    note(f"alpha {alpha}: gap {worst:.1e}")
    assert worst <= 1e-12


@pytest.mark.criterion(4, "kernel integrates to 1 within 1e-9 on an exact grid")
def test_kernel_normalization(note):
    grid = build_quadrature_grid(256)
    x = SpherePoint.from_angles(1.1, 2.3)
    gam = geodesic_angles(x.array, grid.xyz)
    worst = 0.0
    for n in (8, 64, 256):
        for alpha in (0.0, 0.5, 1.0):
            worst = max(worst, abs(grid.integrate(cesaro_kernel(2, alpha, n, gam)) - 1.0))
    note(f"max |integral - 1| {worst:.1e}")
    assert worst <= 1e-9


@pytest.mark.criterion(5, "global sup ratio within factor 2, growth slope 2.0 +- 0.05")
@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
def test_global_sup_bound(alpha, note):
    ratios = [global_sup_ratio(2, alpha, n) for n in SCHEDULE]
    sups = [global_sup(2, alpha, n)[0] for n in SCHEDULE]
    band, slope = max(ratios) / min(ratios), fit_growth_slope(SCHEDULE, sups)
    note(f"alpha {alpha}: band {band:.3f}, slope {slope:.3f}")
    assert band <= 2
    assert abs(slope - 2.0) <= 0.05


@pytest.mark.criterion(6, "sup bound ratio away from gamma0=0.3 within a factor-10 band")
@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_sup_bound_band(alpha, note):
    r = [sup_bound_ratio(2, alpha, n, 0.3) for n in SCHEDULE]
    note(f"alpha {alpha}: band {max(r) / min(r):.2f}")
    assert all(math.isfinite(v) and v > 0 for v in r)
    assert max(r) / min(r) <= 10


@pytest.mark.criterion(7, "main term sup difference drops >= 25% per doubling")
def test_main_term_convergence(note):
    g = np.linspace(math.pi / 4, 3 * math.pi / 4, 2000)
    sup = asymptotic_sweep(2, 0.5, [64, 128, 256, 512], g).sup_diff()
    steps = [b / a for a, b in zip(sup, sup[1:])]
    note("step factors " + ", ".join(f"{s:.3f}" for s in steps))
    assert all(s <= 0.75 for s in steps[:-1])
    assert steps[-1] <= 0.75 * 1.1


@pytest.fixture(scope="module")
def ratio_setup():
    grid = build_quadrature_grid(128)
    return grid, default_radii(grid), random_points(50, 11)


@pytest.mark.criterion(8, "theorem ratio changes <= 5% from n_max 256 to 512, finite for every family")
@pytest.mark.parametrize("family", FAMILIES)
def test_theorem_ratio_stability(family, ratio_setup, note):
    grid, radii, pts = ratio_setup
    f = default_family(family)
    spec, samples = f.reference_spectrum(512), f.sample(grid)
    a = theorem_ratio(spec, samples, grid, 1.0, pts, 256, radii)
    b = theorem_ratio(spec, samples, grid, 1.0, pts, 512, radii)
    change = abs(b.max_ratio / a.max_ratio - 1)
    note(f"{family}: {a.max_ratio:.4f} -> {b.max_ratio:.4f}")
    assert np.all(np.isfinite(a.ratios)) and np.all(np.isfinite(b.ratios))
    assert change <= 0.05


@pytest.mark.criterion(9, "weak-type products within a factor-3 band across scales and mu grids")
@pytest.mark.parametrize("operator", ["f_star", "s_star"])
def test_weak_type_band(operator, note):
    grid = build_quadrature_grid(64)
    radii = default_radii(grid)
    mu_grids = (np.geomspace(1e-3, 1e3, 49), np.geomspace(2e-3, 5e2, 31))
    products = []
    for scale in (1.0, 4.0, 16.0):
        f = TestFunction("cap_indicator", {"center": [0.9, 0.4], "radius": 0.3, "scale": scale})
        samples = f.sample(grid)
        l1 = grid.integrate(np.abs(samples))
        if operator == "f_star":
            values = hl_maximal_field(samples, grid, grid, radii)
        else:
            values, _ = maximal_operator_field(f.reference_spectrum(64), 1.0, grid, 64)
        products += [weak_type_levelset(values, grid, l1, mus).max_product() for mus in mu_grids]
    band = max(products) / min(products)
    note(f"{operator}: band {band:.3f}")
    assert min(products) > 0 and band <= 3


@pytest.mark.criterion(10, "sup over V1 at n=256 <= 0.3 x value at n=16, nonincreasing within 10%")
def test_localization_trend(note):
    bump = default_family("cap_vanishing_bump")
    assert bump.params["radius"] == pytest.approx(V.radius)
    pts = random_points(200, 5, cap=V1)
    ns = [16, 32, 64, 128, 256]
    sups = np.abs(cesaro_mean_field(bump.reference_spectrum(256), 0.5, ns, pts)).max(axis=1)
    note(f"sup(256)/sup(16) = {sups[-1] / sups[0]:.4f}")
    assert sups[-1] <= 0.3 * sups[0]
    assert all(b <= 1.1 * a for a, b in zip(sups, sups[1:]))


@pytest.mark.criterion(11, "antipodal-mass ratio on V1 finite with <= 5% growth under n_max doubling")
def test_localization_ratio_with_antipodal_mass(note):
    grid = build_quadrature_grid(128)
    radii = default_radii(grid)
    sing, bump = default_family("antipodal_singular"), default_family("cap_vanishing_bump")
    assert sing.params["beta"] == 1.0
    spec = sing.reference_spectrum(512) + bump.reference_spectrum(512)
    samples = sing.sample(grid) + bump.sample(grid)
    pts = random_points(50, 5, cap=V1)
    a = localization_ratio(spec, samples, grid, V1, 0.5, 256, radii, points=pts, vanishing=V)
    b = localization_ratio(spec, samples, grid, V1, 0.5, 512, radii, points=pts, vanishing=V)
    growth = float(np.max(b.ratios / a.ratios - 1))
    note(f"max ratio {a.max_ratio:.4f} -> {b.max_ratio:.4f}, pointwise growth {growth:.2%}")
    assert np.all(np.isfinite(a.ratios)) and np.all(np.isfinite(b.ratios))
    assert growth <= 0.05


@pytest.mark.criterion(12, "CLI reruns byte-identical under --threads 1 and 4")
@pytest.mark.parametrize("config", sorted(p.name for p in CONFIGS.glob("*.yaml")))
def test_cli_determinism(config, tmp_path, note):
    path = str(CONFIGS / config)
    digests = []
    for i, threads in enumerate(("1", "1", "4")):
        out = tmp_path / f"run{i}"
        assert cli.main(["run", "--config", path, "--output", str(out), "--threads", threads, "--quiet"]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        csvs = {e["file"]: (out / e["file"]).read_bytes() for e in manifest["outputs"] if e["file"].endswith(".csv")}
        assert csvs
        digests.append(csvs)
    assert digests[0] == digests[1] == digests[2]
    note(f"{yaml.safe_load(open(path))['experiment']}: {len(digests[0])} csv files identical")
