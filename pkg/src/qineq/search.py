"""Adversarial search for small chain margins.

Random-restart hill climbing: each restart begins at a seeded campaign instance and
accepts perturbations of the operator, vector and exponent that lower the smallest
margin of the theorem's chains. Operators are pulled back into [m, M] by applying a
clipping function to the perturbed selfadjoint matrix, so every candidate stays
admissible.
"""

import logging
import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from .campaign import Instance, RunConfig, evaluate_instance, generate_instance, validate_config
from .errors import DomainError, HypothesisError
from .funcalc import ScalarFunction, fc_apply
from .models import ChainReport
from .qlinalg import (
    QMatrix,
    QVector,
    hermitian_part,
    make_rng,
    matrix_to_json,
    random_quaternion_matrix,
    vector_to_json,
)

logger = logging.getLogger(__name__)

# Each step is a fresh trial for these: perturbing their instances breaks what they sample.
RESTART_ONLY = {"spectrum-algebra", "calculus-axioms"}


class SearchReport(BaseModel):
    """Worst instance found, reported in full since perturbed instances have no seed."""

    theorem: str
    budget: int
    evaluations: int
    min_slack: float
    min_margin: float
    suspected_violation: bool = Field(..., description="Some chain fell below -tol scaled")
    worst: ChainReport
    matrices: list[dict]
    vectors: list[dict]
    r: Optional[float] = None
    points: Optional[list[float]] = None
    weights: Optional[list[float]] = None


def _score(reports: list[ChainReport]) -> tuple[float, Optional[ChainReport]]:
    scored = [r for r in reports if not r.invalid and not r.diagnostic]
    if not scored:
        return math.inf, None
    worst = min(scored, key=lambda r: r.margin)
    return worst.margin, worst


def _clip(T: QMatrix, m: float, M: float) -> QMatrix:
    clip = ScalarFunction.from_callable("clip", lambda t: np.clip(t, m, M))
    return fc_apply(T, clip)


def perturb(instance: Instance, step: float, rng: np.random.Generator) -> Instance:
    """A nearby admissible instance."""
    m, M = instance.m, instance.M
    operators = []
    for T in instance.operators:
        noise = random_quaternion_matrix(T.n, rng) * (step * max(1.0, M - m))
        operators.append(_clip(hermitian_part(T + noise), m, M))
    vectors = []
    for x in instance.vectors:
        moved = x.entries + step * rng.standard_normal(x.entries.shape)
        vectors.append(QVector(entries=moved / np.linalg.norm(moved) * x.norm()))
    if len(vectors) > 1:
        total = math.sqrt(sum(v.norm() ** 2 for v in vectors))
        vectors = [QVector(entries=v.entries / total) for v in vectors]
    r = instance.r
    if r is not None:
        # stay in the same exponent regime
        moved = r * math.exp(step * float(rng.standard_normal()))
        r = moved if not (r > 1 > moved or r < 1 < moved) else r
    points, weights = instance.points, instance.weights
    if points is not None:
        moved = np.asarray(points) + step * (M - m) * rng.standard_normal(len(points))
        points = np.clip(moved, m, M).tolist()
        raw = np.asarray(weights) * np.exp(step * rng.standard_normal(len(weights)))
        weights = (raw / raw.sum()).tolist()
    witness = instance.witness.model_copy(update={"matrix_seed": None, "vector_seed": None, "r": r})
    return instance.model_copy(
        update={"operators": operators, "vectors": vectors, "r": r, "points": points, "weights": weights, "witness": witness}
    )


def search(config: RunConfig, budget: int, restarts: int = 4, step: float = 0.1) -> SearchReport:
    """Minimize the chain margin over budget perturbations; budget 0 evaluates trial 0 only."""
    validate_config(config)
    rng = make_rng(config.seed)
    period = max(1, budget // max(1, restarts))

    current = generate_instance(config, 0)
    current_score, current_worst = _score(evaluate_instance(current, config.tol, config.diagnostic))
    best, best_score, best_worst = current, current_score, current_worst
    evaluations = 1
    size = step
    for i in range(1, budget + 1):
        if config.theorem in RESTART_ONLY or i % period == 0:
            candidate = generate_instance(config, i)
            size = step
            restart = True
        else:
            candidate = perturb(current, size, rng)
            restart = False
        try:
            score, worst = _score(evaluate_instance(candidate, config.tol, config.diagnostic))
        except (HypothesisError, DomainError) as e:
            logger.debug(f"Discarded candidate {i}: {e}")
            size /= 2
            continue
        evaluations += 1
        if restart or score < current_score:
            current, current_score = candidate, score
        else:
            size = max(size / 2, 1e-6)
        if worst is not None and score < best_score:
            best, best_score, best_worst = candidate, score, worst
            logger.debug(f"New minimum margin {score:.6g} at step {i}")

    if best_worst is None:
        raise HypothesisError("a valid trial", "every evaluated instance was invalid")
    suspected = best_worst.counts_as_violation
    if suspected:
        logger.warning(f"Suspected violation of {best_worst.theorem}: {best_worst.violation}")
    logger.info(f"Search over {config.theorem} finished: {evaluations} evaluations, min margin {best_score:.6g}")
    return SearchReport(
        theorem=config.theorem,
        budget=budget,
        evaluations=evaluations,
        min_slack=best_worst.slack,
        min_margin=best_worst.margin,
        suspected_violation=suspected,
        worst=best_worst,
        matrices=[matrix_to_json(T) for T in best.operators],
        vectors=[vector_to_json(x) for x in best.vectors],
        r=best.r,
        points=best.points,
        weights=best.weights,
    )
