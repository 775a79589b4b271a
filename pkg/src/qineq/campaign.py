"""Seeded verification campaigns.

Trial k of a campaign draws its seeds from SeedSequence([seed, k]), so any trial can
be regenerated alone from the master seed and its index. Unset parameters (dimension,
spectrum bounds, function, exponent, variant) are drawn per trial from values each
theorem admits.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from . import inequalities as ineq
from .config import settings
from .errors import HypothesisError, UsageError
from .funcalc import (
    ScalarFunction,
    exp_function,
    fc_commutation_check,
    fc_exp_log_roundtrip_check,
    fc_homomorphism_check,
    fc_norm_isometry_check,
    fc_polynomial_check,
    fc_positivity_check,
    parse_function,
    polynomial,
)
from .models import ChainReport, RunSummary, Witness
from .qlinalg import (
    QMatrix,
    QVector,
    make_rng,
    random_commuting_selfadjoint_pair,
    random_quaternion_matrix,
    random_selfadjoint,
    random_unit_vector,
)
from .spectral import spectrum_algebra_checks

logger = logging.getLogger(__name__)

THEOREMS = (
    "mond-pecaric",
    "lah-ribaric",
    "holder-mccarthy",
    "mondlog",
    "mondlog-multi",
    "neg-power-refinement",
    "lah-log",
    "power-lah",
    "jensen-gap",
    "neg-power-gap",
    "mult-jensen",
    "gruss-type",
    "kyfan-scalar",
    "kyfan-operator",
    "spectrum-algebra",
    "calculus-axioms",
)

DIMENSIONS = (1, 2, 4, 8)

CONVEX_FUNCTIONS = ("exp", "power:r=2", "power:r=3", "power:r=-1", "neg_power:r=0.5")
LOG_CONVEX_FUNCTIONS = ("exp", "power:r=-1", "power:r=-2", "neg_power:r=0.5", "neg_power:r=1.5")

# Theorems whose function is fixed by the exponent r.
EXPONENT_THEOREMS = {
    "holder-mccarthy",
    "neg-power-refinement",
    "power-lah",
    "neg-power-gap",
    "kyfan-scalar",
    "kyfan-operator",
}
NEEDS_CONVEX = {"mond-pecaric", "lah-ribaric", "jensen-gap"}
NEEDS_LOG_CONVEX = {"mondlog", "mondlog-multi", "lah-log", "mult-jensen", "gruss-type"}
NEEDS_POSITIVE_SPECTRUM = {"neg-power-refinement", "power-lah", "neg-power-gap", "calculus-axioms"}
KYFAN = {"kyfan-scalar", "kyfan-operator"}


class RunConfig(BaseModel):
    """One campaign; unset fields are drawn per trial."""

    theorem: str
    n: Optional[int] = Field(default=None, description="Dimension; drawn from {1, 2, 4, 8} when unset")
    trials: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0)
    tol: float = Field(default_factory=lambda: settings.tol, ge=0)
    spectrum: Optional[tuple[float, float]] = Field(default=None, description="Bounds m, M")
    function: Optional[str] = Field(default=None, description="Registry spec, e.g. 'power:r=-1'")
    r: Optional[float] = None
    variant: Optional[int] = None
    diagnostic: bool = False
    workers: int = Field(default=1, ge=1)
    format: Literal["json", "text"] = "json"
    output: Optional[str] = None

    @field_validator("theorem")
    @classmethod
    def _known_theorem(cls, value: str) -> str:
        if value not in THEOREMS:
            raise ValueError(f"unknown theorem id {value!r}; known ids: {', '.join(THEOREMS)}")
        return value

    @model_validator(mode="after")
    def _check_ranges(self) -> "RunConfig":
        if self.n is not None and not 1 <= self.n <= settings.max_dim:
            raise ValueError(f"dimension must be in [1, {settings.max_dim}], got {self.n}")
        if self.spectrum is not None and not self.spectrum[0] < self.spectrum[1]:
            raise ValueError(f"degenerate spectrum interval: need m < M, got m={self.spectrum[0]}, M={self.spectrum[1]}")
        return self


class Instance(BaseModel):
    """Everything a theorem's checker is evaluated on."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    theorem: str
    operators: list[QMatrix]
    vectors: list[QVector]
    m: float
    M: float
    function: Optional[str] = None
    r: Optional[float] = None
    variant: Optional[int] = None
    points: Optional[list[float]] = None
    weights: Optional[list[float]] = None
    witness: Witness = Field(default_factory=Witness)


def validate_config(config: RunConfig) -> None:
    """Reject hypothesis-violating configurations before any trial runs."""
    theorem = config.theorem
    if config.function is not None:
        if theorem in EXPONENT_THEOREMS:
            raise UsageError(f"{theorem} takes --r, not --function")
        f = parse_function(config.function)
        if theorem in NEEDS_CONVEX and not f.convex:
            raise HypothesisError("f is convex", f.id)
        if theorem in NEEDS_LOG_CONVEX and not (f.log_convex and f.positive):
            raise HypothesisError("f is positive and log-convex", f.id)
        if config.spectrum is not None:
            m, M = config.spectrum
            if not f.domain.contains_interval(m, M):
                raise HypothesisError("[m, M] inside the domain of f", f"[{m}, {M}] vs {f.domain}")
    if config.spectrum is not None:
        m, M = config.spectrum
        if theorem in KYFAN and not (0 < m and M < 0.5):
            raise HypothesisError("[m, M] inside (0, 1/2)", f"m={m}, M={M}")
        if theorem in NEEDS_POSITIVE_SPECTRUM and not m > 0:
            raise HypothesisError("T is positive and invertible", f"m={m}")
        if theorem == "holder-mccarthy" and not (m >= 0 and (config.r is None or config.r > 0 or m > 0)):
            raise HypothesisError("T is positive (invertible for r < 0)", f"m={m}")
    if config.r is not None:
        r = config.r
        if theorem == "holder-mccarthy" and r in (0.0, 1.0):
            raise HypothesisError("r in (-inf, 0), (0, 1) or (1, inf)", f"r={r}")
        if theorem in {"neg-power-refinement", "power-lah"} and not r < 0:
            raise HypothesisError("r < 0", f"r={r}")
        if theorem in {"neg-power-gap", "kyfan-scalar", "kyfan-operator"} and not r > 0:
            raise HypothesisError("r > 0", f"r={r}")
    if config.variant is not None:
        allowed = {"jensen-gap": (1, 2), "kyfan-operator": (1, 2, 3)}.get(theorem)
        if allowed is None or config.variant not in allowed:
            raise UsageError(f"--variant is not valid for {theorem}")


def _interval(config: RunConfig, rng: np.random.Generator) -> tuple[float, float]:
    if config.spectrum is not None:
        return float(config.spectrum[0]), float(config.spectrum[1])
    if config.theorem in KYFAN:
        m = float(rng.uniform(0.02, 0.3))
        return m, float(rng.uniform(m + 0.01, 0.49))
    m = float(rng.uniform(0.2, 2.0))
    return m, m + float(rng.uniform(0.1, 4.0))


def _exponent(config: RunConfig, k: int, rng: np.random.Generator) -> Optional[float]:
    theorem = config.theorem
    if theorem not in EXPONENT_THEOREMS:
        return None
    if config.r is not None:
        return config.r
    if theorem == "holder-mccarthy":
        low, high = [(1.1, 3.0), (0.1, 0.9), (-3.0, -0.1)][k % 3]
        return float(rng.uniform(low, high))
    if theorem in {"neg-power-refinement", "power-lah"}:
        return float(rng.uniform(-3.0, -0.1))
    if theorem == "neg-power-gap":
        return float(rng.uniform(0.1, 3.0))
    return float(rng.uniform(0.2, 3.0))


def _function_spec(config: RunConfig, rng: np.random.Generator) -> Optional[str]:
    if config.theorem in EXPONENT_THEOREMS or config.theorem == "spectrum-algebra":
        return None
    if config.function is not None:
        return config.function
    choices = CONVEX_FUNCTIONS if config.theorem in NEEDS_CONVEX - {"jensen-gap"} else LOG_CONVEX_FUNCTIONS
    return str(rng.choice(choices))


def _weighted_vectors(n: int, count: int, rng: np.random.Generator) -> list[QVector]:
    """count vectors with sum of squared norms equal to one."""
    weights = rng.dirichlet(np.ones(count))
    return [QVector(entries=random_unit_vector(n, rng).entries * np.sqrt(w)) for w in weights]


def generate_instance(config: RunConfig, k: int) -> Instance:
    """The instance of trial k."""
    matrix_seed, vector_seed, parameter_seed = (int(s) for s in np.random.SeedSequence([config.seed, k]).generate_state(3))
    params = make_rng(parameter_seed)
    n = config.n if config.n is not None else int(params.choice(DIMENSIONS))
    m, M = _interval(config, params)
    r = _exponent(config, k, params)
    spec = _function_spec(config, params)
    variant = config.variant
    if variant is None and config.theorem == "jensen-gap":
        variant = 1 + k % 2
    if variant is None and config.theorem == "kyfan-operator":
        variant = 1 + k % 3
    if config.theorem == "holder-mccarthy" and r is not None and r < 0 and m <= 0:
        raise HypothesisError("T is positive and invertible", f"m={m}")

    operators: list[QMatrix] = []
    vectors: list[QVector] = []
    points = weights = None
    theorem = config.theorem
    if theorem == "mondlog-multi":
        matrices = make_rng(matrix_seed)
        count = 1 + int(params.integers(0, 3))
        operators = [random_selfadjoint(n, m, M, matrices) for _ in range(count)]
        vectors = _weighted_vectors(n, count, make_rng(vector_seed))
    elif theorem == "kyfan-scalar":
        points = make_rng(vector_seed).uniform(m, M, size=n).tolist()
        weights = make_rng(matrix_seed).dirichlet(np.ones(n)).tolist()
    elif theorem == "spectrum-algebra":
        matrices = make_rng(matrix_seed)
        operators = [random_quaternion_matrix(n, matrices), random_quaternion_matrix(n, matrices)]
        operators.extend(random_commuting_selfadjoint_pair(n, m, M, matrices))
    else:
        operators = [random_selfadjoint(n, m, M, matrix_seed)]
        vectors = [random_unit_vector(n, vector_seed)]

    witness = Witness(
        trial=k, matrix_seed=matrix_seed, vector_seed=vector_seed, function=spec, m=m, M=M, r=r, n=n
    )
    return Instance(
        theorem=theorem,
        operators=operators,
        vectors=vectors,
        m=m,
        M=M,
        function=spec,
        r=r,
        variant=variant,
        points=points,
        weights=weights,
        witness=witness,
    )


def _calculus_reports(T: QMatrix, f: ScalarFunction, witness: Witness, rng_seed: int) -> list[ChainReport]:
    coefficients = make_rng(rng_seed).uniform(-1.0, 1.0, size=4)
    reports = [fc_norm_isometry_check(T, f, witness), fc_polynomial_check(T, coefficients, witness)]
    # exp(t) >= 1 + t everywhere
    reports.extend(fc_positivity_check(T, exp_function(), polynomial([1.0, 1.0]), witness))
    reports.extend(fc_homomorphism_check(T, f, exp_function(), witness))
    reports.append(fc_commutation_check(T, f, witness))
    reports.append(fc_exp_log_roundtrip_check(T, witness))
    return reports


def evaluate_instance(instance: Instance, tol: float, diagnostic: bool = False) -> list[ChainReport]:
    """Run the theorem's checker(s) on an instance."""
    theorem = instance.theorem
    m, M, r, w = instance.m, instance.M, instance.r, instance.witness
    f = parse_function(instance.function) if instance.function else None
    T = instance.operators[0] if instance.operators else None
    x = instance.vectors[0] if instance.vectors else None

    if theorem == "mond-pecaric":
        return [ineq.check_mond_pecaric(T, f, x, m, M, tol=tol, witness=w)]
    if theorem == "lah-ribaric":
        return [ineq.check_lah_ribaric(T, f, x, m, M, tol=tol, witness=w)]
    if theorem == "holder-mccarthy":
        return [ineq.check_holder_mccarthy(T, x, r, tol=tol, witness=w)]
    if theorem == "mondlog":
        return [ineq.check_mondlog(T, f, x, m, M, tol=tol, witness=w)]
    if theorem == "mondlog-multi":
        return [ineq.check_mondlog_multi(instance.operators, f, instance.vectors, m, M, tol=tol, witness=w)]
    if theorem == "neg-power-refinement":
        return [ineq.check_neg_power_refinement(T, x, r, tol=tol, witness=w)]
    if theorem == "lah-log":
        reports = list(ineq.check_lah_log(T, f, x, m, M, tol=tol, witness=w))
        if diagnostic:
            reports.extend(ineq.lah_exponent_diagnostic(T, f, x, m, M, tol=tol, witness=w))
        return reports
    if theorem == "power-lah":
        return list(ineq.check_power_lah(T, x, m, M, r, tol=tol, witness=w))
    if theorem == "jensen-gap":
        return [ineq.check_jensen_gap(T, f, x, m, M, variant=instance.variant, tol=tol, witness=w)]
    if theorem == "neg-power-gap":
        return [ineq.check_neg_power_gap(T, x, r, tol=tol, witness=w)]
    if theorem == "mult-jensen":
        reports = [ineq.check_mult_jensen(T, f, x, m, M, tol=tol, witness=w)]
        if f.id.startswith("neg_power"):
            reports.append(ineq.check_mult_jensen_neg_power(T, x, f.r, tol=tol, witness=w))
        return reports
    if theorem == "gruss-type":
        reports = [ineq.check_gruss_type(T, f, m, M, x, tol=tol, witness=w)]
        if f.id.startswith("neg_power") and m > 0:
            reports.append(ineq.check_gruss_neg_power(T, x, m, M, f.r, tol=tol, witness=w))
        return reports
    if theorem == "kyfan-scalar":
        return [ineq.check_kyfan_scalar(instance.points, instance.weights, r, include_mean=True, tol=tol, witness=w)]
    if theorem == "kyfan-operator":
        return list(ineq.check_kyfan_operator(T, x, m, M, r, instance.variant, diagnostic=diagnostic, tol=tol, witness=w))
    if theorem == "spectrum-algebra":
        S, U, A, B = instance.operators
        return spectrum_algebra_checks(S, U, witness=w) + spectrum_algebra_checks(A, B, check_sum=True, witness=w)
    if theorem == "calculus-axioms":
        return _calculus_reports(T, f, w, w.vector_seed or 0)
    raise UsageError(f"unknown theorem id {theorem!r}")


def run_trial(config: RunConfig, k: int) -> list[ChainReport]:
    instance = generate_instance(config, k)
    reports = evaluate_instance(instance, config.tol, config.diagnostic)
    logger.debug(f"Trial {k} of {config.theorem}: {sum(r.passed for r in reports)}/{len(reports)} chains pass")
    return reports


def run_campaign(config: RunConfig) -> tuple[list[ChainReport], RunSummary]:
    """All trials in trial order, plus the closing summary."""
    validate_config(config)
    logger.info(f"Starting campaign {config.theorem}: {config.trials} trials, seed {config.seed}, workers {config.workers}")
    trial = partial(run_trial, config)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            batches = list(pool.map(trial, range(config.trials)))
    else:
        batches = [trial(k) for k in range(config.trials)]
    reports = [report for batch in batches for report in batch]
    summary = RunSummary.from_reports(config.theorem, config.trials, reports)
    logger.info(
        f"Finished campaign {config.theorem}: {summary.pass_count} pass, "
        f"{summary.violation_count} violations, {summary.invalid_count} invalid, min slack {summary.min_slack}"
    )
    return reports, summary
