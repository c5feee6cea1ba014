"""Univariate orthonormal polynomial families and their level sets.

Supported weights are probability densities on the real line: the uniform
density on [-1, 1] and the Gaussian density proportional to exp(-y^2).
Every family follows the three-term recurrence

    y phi_n(y) = sqrt(b_n) phi_{n-1}(y) + a_n phi_n(y) + sqrt(b_{n+1}) phi_{n+1}(y)

with phi_0 = 1, so the phi_n are orthonormal with respect to the density.
The ratio r_N = phi_N / phi_{N-1} is strictly increasing between its poles,
which makes its level sets A_N(y) = r_N^{-1}(r_N(y)) sets of exactly N
distinct points; those sets carry the induced quadrature rules used by the
design routines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "UNIFORM",
    "GAUSSIAN",
    "DensitySpec",
    "RecurrenceTable",
    "recurrence_coefficients",
    "eval_phi",
    "eval_phi_sequence",
    "gauss_rule",
    "r_ratio",
    "level_set",
    "level_set_bisection",
    "quadrature_exactness_report",
    "sample_density",
]

UNIFORM = "uniform"
GAUSSIAN = "gaussian"

# |phi_{N-1}(y)| below this (relative) threshold marks y as a pole of r_N
POLE_RTOL = 1e-12

# root/bracket searches never look past this in absolute value
SEARCH_BOUND = 10.0


@dataclass(frozen=True)
class DensitySpec:
    """One coordinate's marginal probability density."""

    kind: str

    def __post_init__(self):
        if self.kind not in (UNIFORM, GAUSSIAN):
            raise ValueError(f"unsupported density kind: {self.kind!r}")

    @classmethod
    def uniform(cls) -> "DensitySpec":
        return cls(UNIFORM)

    @classmethod
    def gaussian(cls) -> "DensitySpec":
        return cls(GAUSSIAN)


@dataclass(frozen=True)
class RecurrenceTable:
    """Recurrence coefficients of one orthonormal family.

    alpha holds a_0 .. a_{n_max}; beta holds b_1 .. b_{n_max}, all positive.
    Instances are immutable: the arrays are marked read-only on construction.
    """

    density: DensitySpec
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        if self.alpha.ndim != 1 or self.beta.ndim != 1:
            raise ValueError("alpha and beta must be one-dimensional")
        if len(self.alpha) != len(self.beta) + 1:
            raise ValueError("need one more diagonal entry than off-diagonals")
        if len(self.beta) < 1:
            raise ValueError("table must cover degree at least 1")
        if np.any(self.beta <= 0.0):
            raise ValueError("all recurrence weights b_n must be positive")
        self.alpha.setflags(write=False)
        self.beta.setflags(write=False)

    @property
    def n_max(self) -> int:
        return len(self.alpha) - 1

    def offdiag(self, n: int) -> float:
        """b_n for 1 <= n <= n_max."""
        if not 1 <= n <= self.n_max:
            raise ValueError(f"b_{n} is outside the tabulated range")
        return float(self.beta[n - 1])


def recurrence_coefficients(density: DensitySpec, n_max: int) -> RecurrenceTable:
    """Tabulate a_0..a_{n_max} and b_1..b_{n_max} for the given density.

    Uniform on [-1, 1]: a_n = 0, b_n = n^2 / (4 n^2 - 1).
    Gaussian exp(-y^2)/sqrt(pi): a_n = 0, b_n = n / 2.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    n = np.arange(1, n_max + 1, dtype=float)
    if density.kind == UNIFORM:
        beta = n * n / (4.0 * n * n - 1.0)
    else:
        beta = n / 2.0
    # both densities are symmetric, so a_n = 0 exactly
    alpha = np.zeros(n_max + 1)
    return RecurrenceTable(density=density, alpha=alpha, beta=beta)


def eval_phi_sequence(table: RecurrenceTable, n: int, y):
    """Evaluate phi_0 .. phi_n at y.

    y may be a scalar or a one-dimensional array; the result has shape
    (n + 1,) or (n + 1, len(y)).
    """
    if not 0 <= n <= table.n_max:
        raise ValueError(f"degree {n} outside tabulated range 0..{table.n_max}")
    y_arr = np.asarray(y, dtype=float)
    out = np.empty((n + 1,) + y_arr.shape)
    out[0] = 1.0
    if n >= 1:
        sqb = np.sqrt(table.beta)
        out[1] = (y_arr - table.alpha[0]) / sqb[0]
        for k in range(1, n):
            out[k + 1] = (
                (y_arr - table.alpha[k]) * out[k] - sqb[k - 1] * out[k - 1]
            ) / sqb[k]
    return out


def eval_phi(table: RecurrenceTable, n: int, y):
    """Evaluate phi_n at y (scalar in, float out; array in, array out)."""
    seq = eval_phi_sequence(table, n, y)
    if np.isscalar(y) or np.asarray(y).ndim == 0:
        return float(seq[n])
    return seq[n]


def _jacobi_bands(table: RecurrenceTable, n: int) -> tuple[np.ndarray, np.ndarray]:
    if not 1 <= n <= table.n_max:
        raise ValueError(f"order {n} outside tabulated range 1..{table.n_max}")
    diag = table.alpha[:n].copy()
    off = np.sqrt(table.beta[: n - 1])
    return diag, off


def gauss_rule(table: RecurrenceTable, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss rule for the tabulated density.

    Nodes are the eigenvalues of the order-n Jacobi matrix, in ascending
    order; weights are the squared first components of its orthonormal
    eigenvectors and sum to one.
    """
    diag, off = _jacobi_bands(table, n)
    nodes, vecs = eigh_tridiagonal(diag, off)
    weights = vecs[0, :] ** 2
    return nodes, weights


def _phi_pair(table: RecurrenceTable, n: int, y: float) -> tuple[float, float]:
    seq = eval_phi_sequence(table, n, float(y))
    prev = float(seq[n - 1]) if n >= 1 else 0.0
    return float(seq[n]), prev


def _is_pole(top: float, bottom: float) -> bool:
    return abs(bottom) < POLE_RTOL * max(1.0, abs(top))

def r_ratio(table: RecurrenceTable, n: int, y: float) -> float:
    """Ratio phi_n(y) / phi_{n-1}(y), an extended real.

    Returns math.inf at the poles (the roots of phi_{n-1}); r_n maps into
    the projective line, so the point at infinity is unsigned.
    """
    if not 1 <= n <= table.n_max:
        raise ValueError(f"order {n} outside tabulated range 1..{table.n_max}")
    top, bottom = _phi_pair(table, n, y)
    if _is_pole(top, bottom):
        return math.inf
    return top / bottom


def level_set(table: RecurrenceTable, n: int, y: float) -> np.ndarray:
    """The n distinct points z with r_n(z) = r_n(y), in ascending order.

    The set is computed as the eigenvalues of the order-n Jacobi matrix with
    its last diagonal entry shifted by r_n(y) * sqrt(b_n): appending the
    shifted row turns phi_n - r_n(y) phi_{n-1} into the order-n characteristic
    polynomial. y itself is always a member. Falls back to sign-change
    bisection if the eigensolve fails.
    """
    c = r_ratio(table, n, y)
    if math.isinf(c):
        raise ValueError(
            f"y={y!r} is a pole of r_{n} (root of phi_{n - 1}); no level set there"
        )
    diag, off = _jacobi_bands(table, n)
    diag[-1] += c * math.sqrt(table.offdiag(n))
    try:
        nodes = eigh_tridiagonal(diag, off, eigvals_only=True)
    except np.linalg.LinAlgError:
        nodes = level_set_bisection(table, n, y)
    return nodes


def _poly_roots_bisect(table: RecurrenceTable, n: int) -> np.ndarray:
    """All n roots of phi_n by interlacing brackets and plain bisection."""
    if n == 0:
        return np.empty(0)
    roots = np.array([table.alpha[0]])  # phi_1 root
    for k in range(2, n + 1):
        f = lambda z: eval_phi(table, k, z)  # noqa: E731
        # roots of phi_k interlace those of phi_{k-1}; pad outer brackets
        brackets = np.concatenate(([-SEARCH_BOUND], roots, [SEARCH_BOUND]))
        new = [
            _bisect(f, brackets[i], brackets[i + 1])
            for i in range(len(brackets) - 1)
        ]
        roots = np.array(new)
    return roots


def _bisect(f, lo: float, hi: float, iters: int = 200) -> float:
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
        if hi - lo < 1e-15 * max(1.0, abs(lo), abs(hi)):
            break
    return 0.5 * (lo + hi)


def level_set_bisection(table: RecurrenceTable, n: int, y: float) -> np.ndarray:
    """Level set of r_n through y by sign-change bisection, no eigensolves.

    r_n increases from -inf to +inf strictly between consecutive poles, so
    g = phi_n - r_n(y) phi_{n-1} changes sign exactly once in each of the n
    pole-bounded intervals. Slow but independent of the spectral route; used
    as its fallback and as the test oracle.
    """
    c = r_ratio(table, n, y)
    if math.isinf(c):
        raise ValueError(f"y={y!r} is a pole of r_{n}")

    def g(z: float) -> float:
        seq = eval_phi_sequence(table, n, z)
        prev = float(seq[n - 1]) if n >= 1 else 0.0
        return float(seq[n]) - c * prev

    poles = _poly_roots_bisect(table, n - 1)
    inset = 1e-13

    def march_out(anchor: float, direction: float) -> float:
        # walk away from anchor until g changes sign against the inner edge
        inner = anchor + direction * inset * max(1.0, abs(anchor))
        step = 0.5
        while True:
            outer = anchor + direction * step
            if g(inner) * g(outer) <= 0.0:
                return outer
            step *= 2.0
            if step > 1e8:
                raise ValueError("bracket search diverged")

    roots = []
    if len(poles) == 0:
        # n == 1: single root of phi_1 - c, bracket symmetrically
        a, b, step = -1.0, 1.0, 1.0
        while g(a) * g(b) > 0.0:
            step *= 2.0
            a -= step
            b += step
            if step > 1e8:
                raise ValueError("bracket search diverged")
        roots.append(_bisect(g, a, b))
    else:
        roots.append(_bisect(g, march_out(poles[0], -1.0),
                             poles[0] - inset * max(1.0, abs(poles[0]))))
        for lo, hi in zip(poles[:-1], poles[1:]):
            a = lo + inset * max(1.0, abs(lo))
            b = hi - inset * max(1.0, abs(hi))
            roots.append(_bisect(g, a, b))
        roots.append(_bisect(g, poles[-1] + inset * max(1.0, abs(poles[-1])),
                             march_out(poles[-1], 1.0)))
    return np.sort(np.array(roots))


def quadrature_exactness_report(
    table: RecurrenceTable,
    nodes: np.ndarray,
    christoffel_values: np.ndarray,
    max_degree: int,
) -> np.ndarray:
    """Errors |sum_z phi_m(z)/K(z) - delta_{m,0}| for m = 0 .. max_degree.

    The weights 1/K(z) of a level-set rule integrate every phi_m with
    m <= 2 N - 2 exactly (one degree more when the set is the Gauss rule).
    """
    nodes = np.asarray(nodes, dtype=float)
    kvals = np.asarray(christoffel_values, dtype=float)
    if nodes.shape != kvals.shape or nodes.ndim != 1:
        raise ValueError("nodes and christoffel_values must match in shape")
    if max_degree > table.n_max:
        raise ValueError("table too short for the requested report")
    weights = 1.0 / kvals
    seq = eval_phi_sequence(table, max_degree, nodes)  # (max_degree+1, len)
    integrals = seq @ weights
    exact = np.zeros(max_degree + 1)
    exact[0] = 1.0
    return np.abs(integrals - exact)


def sample_density(density: DensitySpec, rng: np.random.Generator, size) -> np.ndarray:
    """iid draws from the density. Gaussian exp(-y^2) has variance 1/2."""
    if density.kind == UNIFORM:
        return rng.uniform(-1.0, 1.0, size)
    return rng.normal(0.0, math.sqrt(0.5), size)
