"""Batch studies: conditioning sweeps, surrogate accuracy, 1D verification.

Every study is deterministic in its seed: candidate draws, Monte Carlo
designs, and validation samples all use sub-seeds derived from
(seed, stream, method, degree, trial), so reruns are byte-identical and any
single cell can be reproduced in isolation. Results are long-format
records; render_csv turns them into text with the full configuration
echoed in comment lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import __version__
from .basis import (
    ProductBasis,
    christoffel,
    condition_number,
    det_modulus,
    vandermonde,
)
from .design import CandidateSet, afp_select, candidate_set, cfp_select
from .elliptic import EllipticConfig, solve_bvp_batch
from .lsq import solve_unweighted, solve_weighted, validation_error
from .multiindex import MultiIndexSet, enrich, hyperbolic_cross, total_degree
from .orthopoly import (
    DensitySpec,
    eval_phi,
    gauss_rule,
    level_set,
    quadrature_exactness_report,
    recurrence_coefficients,
    sample_density,
)

__all__ = [
    "StudyConfig",
    "TARGETS",
    "study_condition",
    "study_approx",
    "verify_oned",
    "render_csv",
    "config_echo",
    "resolve_target",
]

FAMILIES = ("uniform", "gaussian")
RULES = ("TD", "HC")
METHODS = ("CFP", "AFP", "MC")

_METHOD_ID = {"CFP": 0, "AFP": 1, "MC": 2}
_STREAM_CANDIDATES = 10
_STREAM_MC = 11
_STREAM_VALIDATION = 12

STUDY_FIELDS = ("method", "degree", "N", "M", "stat", "value")
VERIFY_FIELDS = ("family", "N", "start", "check", "value", "threshold", "status")


@dataclass(frozen=True)
class StudyConfig:
    """Knobs shared by all studies; defaults match the reference setup."""

    family: str = "uniform"
    dimension: int = 2
    rule: str = "TD"
    degrees: tuple[int, ...] = (2, 3, 4, 5)
    oversampling: float = 1.05
    trials: int = 50
    candidates: int = 10_000
    seed: int = 0
    methods: tuple[str, ...] = ("CFP", "AFP", "MC")
    validation_samples: int = 1000
    elliptic_sigma: float = 1.0
    elliptic_grid_points: int = 1001

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        if self.rule not in RULES:
            raise ValueError(f"rule must be one of {RULES}")
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if len(self.degrees) == 0 or any(k < 0 for k in self.degrees):
            raise ValueError("degrees must be a nonempty tuple of k >= 0")
        if self.oversampling < 1.0:
            raise ValueError("oversampling factor must be at least 1")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.candidates < 2 or self.candidates % 2 != 0:
            raise ValueError("candidates must be even and at least 2")
        if self.validation_samples < 1:
            raise ValueError("validation_samples must be positive")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or len(self.methods) == 0:
            raise ValueError(f"methods must be a nonempty subset of {METHODS}")

    @property
    def density(self) -> DensitySpec:
        return DensitySpec(self.family)


def _derive_seed(*parts: int) -> int:
    stream = np.random.SeedSequence(list(parts))
    return int(stream.generate_state(1, dtype=np.uint64)[0])


def _index_set(config: StudyConfig, degree: int) -> MultiIndexSet:
    build = total_degree if config.rule == "TD" else hyperbolic_cross
    return build(config.dimension, degree)


def _sample_count(config: StudyConfig, basis_size: int) -> int:
    return int(math.ceil(config.oversampling * basis_size))


def _design_points(
    config: StudyConfig,
    method: str,
    lam: MultiIndexSet,
    lam_tilde: MultiIndexSet,
    m_points: int,
    degree: int,
    trial: int,
) -> np.ndarray:
    """One trial's sample points for a method, drawn from derived sub-seeds."""
    if method == "MC":
        rng = np.random.default_rng(
            np.random.SeedSequence([config.seed, _STREAM_MC, degree, trial])
        )
        cols = [
            sample_density(config.density, rng, m_points)
            for _ in range(config.dimension)
        ]
        return np.column_stack(cols)
    cand_seed = _derive_seed(
        config.seed, _STREAM_CANDIDATES, _METHOD_ID[method], degree, trial
    )
    cands = candidate_set(
        config.density,
        config.dimension,
        config.candidates,
        lam_tilde.max_degree,
        cand_seed,
    )
    select = cfp_select if method == "CFP" else afp_select
    return select(cands, lam_tilde, m_points).points


def _degree_setup(config: StudyConfig, degree: int):
    lam = _index_set(config, degree)
    m_points = _sample_count(config, len(lam))
    if m_points > config.candidates:
        raise ValueError(
            f"degree {degree} needs {m_points} samples but only "
            f"{config.candidates} candidates"
        )
    lam_tilde = enrich(lam, m_points - len(lam)) if m_points > len(lam) else lam
    return lam, lam_tilde, m_points


def _stat_records(
    method: str, degree: int, basis_size: int, m_points: int, values: np.ndarray
) -> list[dict]:
    q20, q80 = np.quantile(values, [0.2, 0.8])
    stats = (("mean", float(np.mean(values))), ("q20", float(q20)), ("q80", float(q80)))
    return [
        {
            "method": method,
            "degree": degree,
            "N": basis_size,
            "M": m_points,
            "stat": name,
            "value": value,
        }
        for name, value in stats
    ]


def study_condition(config: StudyConfig) -> list[dict]:
    """Condition numbers of the fitted system across methods and degrees.

    CFP designs are judged on the unit-norm-row matrix they are built for;
    AFP and MC on the plain one. Each cell aggregates `trials` repetitions
    into mean and 20%/80% quantiles.
    """
    records = []
    for method in config.methods:
        for degree in config.degrees:
            lam, lam_tilde, m_points = _degree_setup(config, degree)
            basis = ProductBasis.for_density(config.density, lam)
            space = "Q" if method == "CFP" else "P"
            kappas = np.empty(config.trials)
            for trial in range(config.trials):
                points = _design_points(
                    config, method, lam, lam_tilde, m_points, degree, trial
                )
                kappas[trial] = condition_number(
                    vandermonde(basis, points, space)
                )
            records.extend(
                _stat_records(method, degree, len(lam), m_points, kappas)
            )
    return records


def _target_exp_negsumsq(y: np.ndarray) -> np.ndarray:
    return np.exp(-np.sum(y * y, axis=1))


def _target_exp_negsum(y: np.ndarray) -> np.ndarray:
    return np.exp(-np.sum(y, axis=1))


TARGETS = ("exp_negsumsq", "exp_negsum", "elliptic")


def resolve_target(config: StudyConfig, target):
    """Map a target id to a batch callable (n, d) -> (n,)."""
    if callable(target):  # test hook: any batch callable works
        return target
    if target == "exp_negsumsq":
        return _target_exp_negsumsq
    if target == "exp_negsum":
        return _target_exp_negsum
    if target == "elliptic":
        if config.family != "uniform":
            raise ValueError(
                "the elliptic benchmark needs uniform parameters in [-1, 1]^d"
            )
        bvp = EllipticConfig(
            dimension=config.dimension,
            sigma=config.elliptic_sigma,
            grid_points=config.elliptic_grid_points,
        )
        return lambda y: solve_bvp_batch(bvp, y)
    raise ValueError(f"unknown target {target!r}; known ids: {TARGETS}")


def study_approx(config: StudyConfig, target) -> list[dict]:
    """Validation error of fitted surrogates across methods and degrees.

    CFP fits use the Christoffel-weighted solve; AFP and MC the plain one.
    Errors are discrete l2 norms over `validation_samples` fresh iid draws
    from an independent sub-seed stream.
    """
    f = resolve_target(config, target)
    records = []
    for method in config.methods:
        for degree in config.degrees:
            lam, lam_tilde, m_points = _degree_setup(config, degree)
            basis = ProductBasis.for_density(config.density, lam)
            solve = solve_weighted if method == "CFP" else solve_unweighted
            errors = np.empty(config.trials)
            for trial in range(config.trials):
                points = _design_points(
                    config, method, lam, lam_tilde, m_points, degree, trial
                )
                surrogate = solve(basis, points, f(points))
                errors[trial] = validation_error(
                    surrogate,
                    f,
                    config.validation_samples,
                    _derive_seed(
                        config.seed,
                        _STREAM_VALIDATION,
                        _METHOD_ID[method],
                        degree,
                        trial,
                    ),
                )
            records.extend(
                _stat_records(method, degree, len(lam), m_points, errors)
            )
    return records


def _verify_record(
    family: str, n: int, start: str, check: str, value: float, threshold: float, ok: bool
) -> dict:
    return {
        "family": family,
        "N": n,
        "start": start,
        "check": check,
        "value": float(value),
        "threshold": threshold,
        "status": "PASS" if ok else "FAIL",
    }


_SWEEP_STARTS = {
    "uniform": (-0.97, -0.38, 0.11, 0.63, 1.55),
    "gaussian": (-2.31, -0.83, 0.21, 0.74, 1.92),
}

_RECOVERY_MESH = {
    "uniform": np.linspace(-1.0, 1.0, 41),
    "gaussian": np.linspace(-3.0, 3.0, 41),
}


def verify_oned(family: str, n_max: int) -> list[dict]:
    """Check the 1D optimality story for every order up to n_max.

    For each starting point: the level set contains the start, its unit-row
    matrix has condition number and determinant modulus 1, and its
    Christoffel weights are a positive quadrature rule exact through degree
    2N - 2. Starting from a root of phi_N additionally recovers the Gauss
    nodes, both spectrally and through the greedy selection with the root
    placed at candidate index 0.
    """
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}")
    if n_max < 1:
        raise ValueError("n_max must be positive")
    density = DensitySpec(family)
    table = recurrence_coefficients(density, max(2 * n_max - 2, n_max, 1))
    records = []
    for n in range(1, n_max + 1):
        lam = MultiIndexSet(1, tuple((k,) for k in range(n)))
        basis = ProductBasis.for_density(density, lam)
        gauss_nodes, _ = gauss_rule(table, n)
        starts = [(repr(y), float(y)) for y in _SWEEP_STARTS[family]]
        starts.append(("gauss", float(gauss_nodes[-1])))
        for label, y in starts:
            nodes = level_set(table, n, y)
            matrix = vandermonde(basis, nodes[:, None], "Q")
            kappa = condition_number(matrix)
            detmod = det_modulus(matrix)
            kvals = christoffel(basis, nodes[:, None])
            kvals = np.atleast_1d(kvals)
            weights = 1.0 / kvals
            report = quadrature_exactness_report(
                table, nodes, kvals, max(2 * n - 2, 0)
            )
            membership = float(np.min(np.abs(nodes - y)))
            records.extend(
                [
                    _verify_record(
                        family, n, label, "condition_number", kappa,
                        1.0 + 1e-8, kappa <= 1.0 + 1e-8,
                    ),
                    _verify_record(
                        family, n, label, "det_modulus", detmod,
                        1.0 - 1e-8, detmod >= 1.0 - 1e-8,
                    ),
                    _verify_record(
                        family, n, label, "start_in_set", membership,
                        1e-8 * max(1.0, abs(y)),
                        membership <= 1e-8 * max(1.0, abs(y)),
                    ),
                    _verify_record(
                        family, n, label, "min_weight", float(np.min(weights)),
                        0.0, bool(np.min(weights) > 0.0),
                    ),
                    _verify_record(
                        family, n, label, "weight_sum_error",
                        abs(float(np.sum(weights)) - 1.0),
                        1e-12, abs(float(np.sum(weights)) - 1.0) <= 1e-12,
                    ),
                    _verify_record(
                        family, n, label, "quadrature_max_error",
                        float(np.max(report)), 1e-10,
                        float(np.max(report)) <= 1e-10,
                    ),
                ]
            )
            if label != "gauss":
                continue
            gauss_dev = float(np.max(np.abs(nodes - gauss_nodes)))
            records.append(
                _verify_record(
                    family, n, label, "gauss_node_recovery", gauss_dev,
                    1e-10, gauss_dev <= 1e-10,
                )
            )
            # greedy recovery: the root goes first, the rest of the level
            # set and a filler mesh follow
            others = nodes[np.abs(nodes - y) > 1e-8 * max(1.0, abs(y))]
            pool = np.concatenate(([y], others, _RECOVERY_MESH[family]))
            cands = CandidateSet(
                points=pool[:, None].copy(),
                ensemble_tags=("fixed",) * len(pool),
                densities=(density,),
                degree_hint=n,
                seed=0,
            )
            result = cfp_select(cands, lam, n)
            selected = np.sort(result.points[:, 0])
            recovery_dev = float(np.max(np.abs(selected - nodes)))
            records.append(
                _verify_record(
                    family, n, label, "greedy_recovery", recovery_dev,
                    1e-10, recovery_dev <= 1e-10,
                )
            )
    return records


def config_echo(config: StudyConfig, **extra) -> dict:
    """Flat, ordered mapping echoed into CSV headers."""
    echo = {
        "version": __version__,
        "family": config.family,
        "dimension": config.dimension,
        "rule": config.rule,
        "degrees": ",".join(str(k) for k in config.degrees),
        "oversampling": config.oversampling,
        "trials": config.trials,
        "candidates": config.candidates,
        "seed": config.seed,
        "methods": ",".join(config.methods),
        "validation_samples": config.validation_samples,
        "elliptic_sigma": config.elliptic_sigma,
        "elliptic_grid_points": config.elliptic_grid_points,
    }
    echo.update(extra)
    return echo


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(records: list[dict], fieldnames: tuple[str, ...], echo: dict) -> str:
    """Long-format CSV with `# key = value` comment lines up front."""
    lines = [f"# {key} = {_format_cell(value)}" for key, value in echo.items()]
    lines.append(",".join(fieldnames))
    for record in records:
        lines.append(",".join(_format_cell(record[name]) for name in fieldnames))
    return "\n".join(lines) + "\n"
