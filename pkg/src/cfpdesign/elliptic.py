"""Parametric elliptic two-point boundary value benchmark.

Solves -d/dx [ kappa(x, y) du/dx ] = 2 on (0, 1) with u(0) = u(1) = 0,
where the diffusivity is the truncated cosine expansion

    kappa(x, y) = 1 + sigma * sum_{k=1}^{d} cos(2 pi k x) y_k / (k^2 pi^2).

The quantity of interest is u(1/2, y). Since sum 1/(k^2 pi^2) < 1/6,
sigma = 1 keeps kappa positive for every y in [-1, 1]^d. Discretization is
conservative-flux second-order finite differences with kappa evaluated at
cell midpoints; at y = 0 the solution is x (1 - x) and the scheme
reproduces u(1/2) = 1/4 to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["EllipticConfig", "diffusivity", "solve_bvp", "solve_bvp_batch"]


@dataclass(frozen=True)
class EllipticConfig:
    dimension: int
    sigma: float = 1.0
    grid_points: int = 1001

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if self.grid_points < 3 or self.grid_points % 2 == 0:
            raise ValueError("grid_points must be odd and at least 3")
        k = np.arange(1, self.dimension + 1, dtype=float)
        reach = self.sigma * float(np.sum(1.0 / (k * k * math.pi**2)))
        if reach >= 1.0:
            raise ValueError(
                f"sigma={self.sigma} allows kappa <= 0 on [-1,1]^d "
                f"(cosine reach {reach:.3f} >= 1)"
            )


def _modes(config: EllipticConfig, x: np.ndarray) -> np.ndarray:
    """cos(2 pi k x) / (k^2 pi^2) stacked over k, shape (d, len(x))."""
    k = np.arange(1, config.dimension + 1, dtype=float)[:, None]
    return np.cos(2.0 * math.pi * k * x[None, :]) / (k * k * math.pi**2)


def diffusivity(config: EllipticConfig, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """kappa on a grid of x for a batch of parameters, shape (n, len(x))."""
    y2 = np.atleast_2d(np.asarray(y, dtype=float))
    return 1.0 + config.sigma * (y2 @ _modes(config, np.asarray(x, dtype=float)))


def _thomas_midpoint(sub, diag, sup, rhs: float) -> np.ndarray:
    """Batched tridiagonal solve returning the middle unknown.

    All band arrays have shape (n, interior); the right-hand side is the
    same constant in every row. Plain forward elimination and back
    substitution, vectorized across the batch axis.
    """
    n, interior = diag.shape
    cp = np.empty_like(diag)
    dp = np.empty_like(diag)
    pivot = diag[:, 0]
    if np.any(np.abs(pivot) < 1e-300):
        raise np.linalg.LinAlgError("zero pivot in tridiagonal solve")
    cp[:, 0] = sup[:, 0] / pivot
    dp[:, 0] = rhs / pivot
    for i in range(1, interior):
        pivot = diag[:, i] - sub[:, i] * cp[:, i - 1]
        if np.any(np.abs(pivot) < 1e-300):
            raise np.linalg.LinAlgError("zero pivot in tridiagonal solve")
        cp[:, i] = sup[:, i] / pivot
        dp[:, i] = (rhs - sub[:, i] * dp[:, i - 1]) / pivot
    u = np.empty_like(diag)
    u[:, interior - 1] = dp[:, interior - 1]
    for i in range(interior - 2, -1, -1):
        u[:, i] = dp[:, i] - cp[:, i] * u[:, i + 1]
    return u[:, (interior - 1) // 2]


def solve_bvp_batch(config: EllipticConfig, y: np.ndarray) -> np.ndarray:
    """u(1/2, y) for a batch of parameter points, shape (n, d) -> (n,)."""
    y2 = np.atleast_2d(np.asarray(y, dtype=float))
    if y2.shape[1] != config.dimension:
        raise ValueError(
            f"parameters have dimension {y2.shape[1]}, config has {config.dimension}"
        )
    gp = config.grid_points
    h = 1.0 / (gp - 1)
    midpoints = (np.arange(gp - 1) + 0.5) * h
    kappa = diffusivity(config, midpoints, y2)  # (n, gp - 1)
    if np.any(kappa <= 0.0):
        raise ValueError("kappa is not positive for some parameter point")
    # interior unknowns u_1 .. u_{gp-2}; flux form couples neighbors through
    # the midpoint kappas
    left = kappa[:, :-1]
    right = kappa[:, 1:]
    diag = left + right
    sub = np.empty_like(diag)
    sub[:, 0] = 0.0
    sub[:, 1:] = -left[:, 1:]
    sup = np.empty_like(diag)
    sup[:, -1] = 0.0
    sup[:, :-1] = -right[:, :-1]
    rhs = 2.0 * h * h
    # interior count gp - 2 is odd, its middle entry is the x = 1/2 node
    return _thomas_midpoint(sub, diag, sup, rhs)


def solve_bvp(config: EllipticConfig, y) -> float:
    """u(1/2, y) for a single parameter point."""
    return float(solve_bvp_batch(config, np.atleast_2d(np.asarray(y, dtype=float)))[0])
