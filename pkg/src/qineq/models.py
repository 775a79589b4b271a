"""Pydantic data models for verification reports."""

import math
from typing import Optional, Sequence

from pydantic import BaseModel, Field


class Term(BaseModel):
    """One labeled value of an inequality chain."""

    label: str = Field(..., description="Human-readable expression")
    value: float = Field(..., description="Evaluated real value")


class Witness(BaseModel):
    """Everything needed to reproduce a trial."""

    trial: Optional[int] = Field(default=None, description="Trial index inside the campaign")
    matrix_seed: Optional[int] = Field(default=None, description="Seed of the generated operator(s)")
    vector_seed: Optional[int] = Field(default=None, description="Seed of the unit vector(s)")
    matrix_file: Optional[str] = Field(default=None, description="Matrix file, when not generated")
    function: Optional[str] = Field(default=None, description="Function spec, e.g. 'power:r=-1'")
    m: Optional[float] = None
    M: Optional[float] = None
    r: Optional[float] = None
    n: Optional[int] = None


class ChainReport(BaseModel):
    """An evaluated non-decreasing inequality chain and its verdict."""

    theorem: str = Field(..., description="Theorem id, with a chain suffix for multi-chain statements")
    terms: list[Term]
    slack: float = Field(..., description="min over adjacent pairs of next - prev")
    margin: float = Field(..., description="min over adjacent pairs of (next - prev) / max(1, |prev|, |next|)")
    passed: bool = Field(..., serialization_alias="pass")
    invalid: bool = Field(default=False, description="Trial discarded because of a non-real inner product")
    diagnostic: bool = Field(default=False, description="Reported for information, never affects the verdict")
    violation: Optional[str] = Field(default=None, description="Offending adjacent pair, if any")
    witness: Witness = Field(default_factory=Witness)

    @classmethod
    def evaluate(
        cls,
        theorem: str,
        terms: Sequence[tuple[str, float]],
        tol: float,
        witness: Optional[Witness] = None,
        invalid: bool = False,
        diagnostic: bool = False,
    ) -> "ChainReport":
        """Apply the tolerance policy next - prev >= -tol * max(1, |prev|, |next|)."""
        if len(terms) < 2:
            raise ValueError("a chain needs at least two terms")
        values = [float(value) for _, value in terms]
        slack = math.inf
        margin = math.inf
        violation = None
        for k in range(len(values) - 1):
            prev, nxt = values[k], values[k + 1]
            gap = nxt - prev
            scale = max(1.0, abs(prev), abs(nxt))
            slack = min(slack, gap)
            margin = min(margin, gap / scale)
            if not gap >= -tol * scale and violation is None:
                violation = f"{terms[k][0]} <= {terms[k + 1][0]} fails by {-gap:.6g}"
        if not all(math.isfinite(v) for v in values):
            # ranks below every finite chain
            slack = margin = -math.inf
            violation = violation or "non-finite term"
        return cls(
            theorem=theorem,
            terms=[Term(label=label, value=value) for (label, _), value in zip(terms, values)],
            slack=slack,
            margin=margin,
            passed=violation is None and not invalid,
            invalid=invalid,
            diagnostic=diagnostic,
            violation=violation,
            witness=witness or Witness(),
        )

    @property
    def counts_as_violation(self) -> bool:
        return not self.passed and not self.invalid and not self.diagnostic


class RunSummary(BaseModel):
    """Summary record closing a campaign."""

    theorem: str
    trials: int
    reports: int
    pass_count: int
    invalid_count: int
    violation_count: int
    diagnostic_violation_count: int = 0
    min_slack: Optional[float] = None
    min_margin: Optional[float] = None

    @classmethod
    def from_reports(cls, theorem: str, trials: int, reports: Sequence[ChainReport]) -> "RunSummary":
        scored = [r for r in reports if not r.invalid and not r.diagnostic]
        return cls(
            theorem=theorem,
            trials=trials,
            reports=len(reports),
            pass_count=sum(r.passed for r in scored),
            invalid_count=sum(r.invalid for r in reports),
            violation_count=sum(r.counts_as_violation for r in reports),
            diagnostic_violation_count=sum(r.diagnostic and not r.passed for r in reports),
            min_slack=min((r.slack for r in scored), default=None),
            min_margin=min((r.margin for r in scored), default=None),
        )
