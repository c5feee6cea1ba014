"""Elliptic benchmark tests.

In one parametric dimension the problem has a closed-form flux integral:
kappa u' = c - 2x with c fixed by the boundary conditions, so u(1/2) is a
ratio of three one-dimensional integrals. Adaptive quadrature of that form
is the oracle; the frozen values below were produced by it and the in-test
recomputation must agree before they are used.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from cfpdesign import EllipticConfig, diffusivity, solve_bvp, solve_bvp_batch

# flux-integral values for d = 1, sigma = 1 (quad, epsabs 1e-14)
EXACT_MID = {
    1.0: 0.2409445377894699,
    -0.7: 0.25784559802558943,
    0.4: 0.24609392657988965,
}


def _flux_integral_mid(y1: float) -> float:
    def kappa(t):
        return 1.0 + math.cos(2.0 * math.pi * t) * y1 / math.pi**2

    inv = quad(lambda t: 1.0 / kappa(t), 0.0, 1.0, epsabs=1e-14)[0]
    tinv = quad(lambda t: 2.0 * t / kappa(t), 0.0, 1.0, epsabs=1e-14)[0]
    c = tinv / inv
    return quad(lambda t: (c - 2.0 * t) / kappa(t), 0.0, 0.5, epsabs=1e-14)[0]


def test_frozen_oracle_values_reproduce():
    for y1, frozen in EXACT_MID.items():
        assert _flux_integral_mid(y1) == pytest.approx(frozen, abs=1e-12)


def test_flat_parameter_recovers_parabola():
    cfg = EllipticConfig(dimension=2, sigma=1.0, grid_points=1001)
    assert solve_bvp(cfg, [0.0, 0.0]) == pytest.approx(0.25, abs=1e-9)
    off = EllipticConfig(dimension=2, sigma=0.0, grid_points=1001)
    # sigma = 0 zeroes the expansion, so any parameter gives the same system
    assert solve_bvp(off, [0.9, -0.3]) == solve_bvp(cfg, [0.0, 0.0])
    tiny = EllipticConfig(dimension=1, sigma=0.0, grid_points=3)
    assert solve_bvp(tiny, [0.0]) == 0.25


@pytest.mark.parametrize("y1", [1.0, -0.7, 0.4])
def test_solver_matches_flux_integral(y1):
    exact = EXACT_MID[y1]
    cfg = EllipticConfig(dimension=1, sigma=1.0, grid_points=2001)
    assert solve_bvp(cfg, [y1]) == pytest.approx(exact, abs=5e-9)
    fine = EllipticConfig(dimension=1, sigma=1.0, grid_points=4001)
    assert abs(solve_bvp(fine, [y1]) - exact) < abs(solve_bvp(cfg, [y1]) - exact)


def test_convergence_order_against_exact():
    exact = EXACT_MID[1.0]
    err = {}
    for gp in (251, 501, 1001, 2001):
        cfg = EllipticConfig(dimension=1, sigma=1.0, grid_points=gp)
        err[gp] = solve_bvp(cfg, [1.0]) - exact
    assert math.log2(abs(err[251] / err[501])) == pytest.approx(2.0, abs=0.2)
    assert math.log2(abs(err[1001] / err[2001])) == pytest.approx(2.0, abs=0.2)


def test_self_convergence_order_multidim():
    y = [0.7, -0.4, 0.9]
    u = {
        gp: solve_bvp(EllipticConfig(dimension=3, grid_points=gp), y)
        for gp in (251, 501, 1001)
    }
    order = math.log2(abs((u[251] - u[501]) / (u[501] - u[1001])))
    assert order == pytest.approx(2.0, abs=0.2)


def test_richardson_extrapolation():
    u = {
        gp: solve_bvp(EllipticConfig(dimension=1, grid_points=gp), [1.0])
        for gp in (2001, 4001, 8001)
    }
    rich = (4.0 * u[4001] - u[2001]) / 3.0
    assert abs(u[8001] - rich) < 1e-8
    assert abs(u[8001] - rich) < abs(u[4001] - rich)
    # eliminating the h^2 term lands on the flux-integral value
    assert rich == pytest.approx(EXACT_MID[1.0], abs=1e-10)


def test_batch_matches_scalar():
    rng = np.random.default_rng(0)
    ys = rng.uniform(-1.0, 1.0, (5, 3))
    cfg = EllipticConfig(dimension=3, grid_points=251)
    batch = solve_bvp_batch(cfg, ys)
    single = np.array([solve_bvp(cfg, row) for row in ys])
    np.testing.assert_allclose(batch, single, rtol=1e-12)
    np.testing.assert_array_equal(batch, solve_bvp_batch(cfg, ys))


def test_config_validation():
    with pytest.raises(ValueError):
        EllipticConfig(dimension=2, grid_points=1000)
    with pytest.raises(ValueError):
        EllipticConfig(dimension=2, grid_points=1)
    with pytest.raises(ValueError):
        EllipticConfig(dimension=0)
    with pytest.raises(ValueError, match="kappa <= 0"):
        EllipticConfig(dimension=1, sigma=10.0)
    # the full cosine series reaches sum 1/(k pi)^2 = 1/6 < 1
    EllipticConfig(dimension=50, sigma=1.0)


def test_nonpositive_kappa_rejected_at_solve():
    cfg = EllipticConfig(dimension=1, sigma=1.0, grid_points=101)
    with pytest.raises(ValueError, match="not positive"):
        solve_bvp(cfg, [-12.0])


def test_parameter_dimension_mismatch():
    cfg = EllipticConfig(dimension=2, grid_points=101)
    with pytest.raises(ValueError):
        solve_bvp_batch(cfg, np.zeros((4, 3)))


def test_diffusivity_values_and_symmetry():
    cfg = EllipticConfig(dimension=1)
    k0 = diffusivity(cfg, np.array([0.0]), np.array([[1.0]]))
    assert float(k0[0, 0]) == 1.0 + 1.0 / math.pi**2
    quarter = diffusivity(cfg, np.array([0.25]), np.array([[1.0]]))
    assert float(quarter[0, 0]) == pytest.approx(1.0, abs=1e-15)
    # every cosine mode is symmetric about x = 1/2
    rng = np.random.default_rng(4)
    cfg3 = EllipticConfig(dimension=3)
    x = rng.random(50)
    y = rng.uniform(-1.0, 1.0, (6, 3))
    np.testing.assert_allclose(
        diffusivity(cfg3, x, y), diffusivity(cfg3, 1.0 - x, y), rtol=1e-12
    )
