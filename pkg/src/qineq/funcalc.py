"""Continuous functional calculus for selfadjoint quaternionic operators.

f(T) is computed by diagonalizing the Hermitian matrix chi(T) = U D U^H, forming
U f(D) U^H, projecting back onto the quaternionic structure and applying chi_inv.
Repeated eigenvalues need no care: the choice of U inside an eigenspace cancels.

Scalar functions are immutable descriptors carrying the value, derivative and
logarithm callables (all vectorized over numpy arrays) together with the
convexity, log-convexity and positivity flags the inequality checkers require.
"""

import logging
import math
import re
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field

from .config import settings
from .errors import DomainError, HypothesisError, UsageError
from .models import ChainReport, Witness
from .qlinalg import QMatrix, chi, chi_inv, identity, is_selfadjoint, matmul, op_norm

logger = logging.getLogger(__name__)

ArrayFn = Callable[[np.ndarray], np.ndarray]


class Interval(BaseModel):
    """A real interval; infinite ends are open."""

    model_config = ConfigDict(frozen=True)

    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = False
    hi_closed: bool = False

    def __str__(self) -> str:
        return f"{'[' if self.lo_closed else '('}{self.lo:g}, {self.hi:g}{']' if self.hi_closed else ')'}"

    def contains(self, t: float) -> bool:
        above = t >= self.lo if self.lo_closed else t > self.lo
        below = t <= self.hi if self.hi_closed else t < self.hi
        return above and below

    def contains_interval(self, a: float, b: float) -> bool:
        return self.contains(a) and self.contains(b)

    def intersect(self, other: "Interval") -> "Interval":
        if self.lo > other.lo:
            lo, lo_closed = self.lo, self.lo_closed
        elif other.lo > self.lo:
            lo, lo_closed = other.lo, other.lo_closed
        else:
            lo, lo_closed = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hi_closed = self.hi, self.hi_closed
        elif other.hi < self.hi:
            hi, hi_closed = other.hi, other.hi_closed
        else:
            hi, hi_closed = self.hi, self.hi_closed and other.hi_closed
        return Interval(lo=lo, hi=hi, lo_closed=lo_closed, hi_closed=hi_closed)

    def clamp(self, values: np.ndarray, margin: float, name: str = "f") -> np.ndarray:
        """Pull values within margin of a closed end onto it; reject anything else outside."""
        values = np.asarray(values, dtype=float)
        out = values.copy()
        for k, t in enumerate(values):
            if self.contains(t):
                continue
            if self.lo_closed and self.lo - margin <= t < self.lo:
                out[k] = self.lo
            elif self.hi_closed and self.hi < t <= self.hi + margin:
                out[k] = self.hi
            else:
                raise DomainError(f"eigenvalue {t:.17g} outside domain {self} of {name}")
        return out


REAL_LINE = Interval()
POSITIVE_HALF_LINE = Interval(lo=0.0)
NONNEGATIVE_HALF_LINE = Interval(lo=0.0, lo_closed=True)


class ScalarFunction(BaseModel):
    """A real function on an interval with the attributes the theorems need."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    id: str = Field(..., description="Function spec, e.g. 'power:r=-1'")
    domain: Interval = Field(default=REAL_LINE)
    fn: ArrayFn = Field(..., description="t -> f(t)")
    deriv: Optional[ArrayFn] = Field(default=None, description="t -> f'(t)")
    log_fn: Optional[ArrayFn] = Field(default=None, description="t -> ln f(t), present iff positive")
    convex: bool = False
    log_convex: bool = False
    positive: bool = False
    differentiable: bool = False
    r: Optional[float] = None

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=float))

    def eval(self, t: float) -> float:
        return float(self.fn(np.asarray(t, dtype=float)))

    def derivative(self, t: float) -> float:
        if self.deriv is None:
            raise UsageError(f"{self.id} has no derivative")
        return float(self.deriv(np.asarray(t, dtype=float)))

    def log_eval(self, t: float) -> float:
        if self.log_fn is None:
            raise UsageError(f"{self.id} is not positive, ln f is undefined")
        return float(self.log_fn(np.asarray(t, dtype=float)))

    def log(self) -> "ScalarFunction":
        """ln f as a function in its own right."""
        if self.log_fn is None:
            raise UsageError(f"{self.id} is not positive, ln f is undefined")
        return ScalarFunction(id=f"ln({self.id})", domain=self.domain, fn=self.log_fn, convex=self.log_convex)

    def derivative_function(self) -> "ScalarFunction":
        if self.deriv is None:
            raise UsageError(f"{self.id} has no derivative")
        return ScalarFunction(id=f"d/dt {self.id}", domain=self.domain, fn=self.deriv)

    def __add__(self, other: "ScalarFunction") -> "ScalarFunction":
        f, g = self, other
        return ScalarFunction(
            id=f"({f.id})+({g.id})",
            domain=f.domain.intersect(g.domain),
            fn=lambda t: f.fn(t) + g.fn(t),
            deriv=(lambda t: f.deriv(t) + g.deriv(t)) if f.deriv and g.deriv else None,
            convex=f.convex and g.convex,
            log_convex=f.log_convex and g.log_convex,
            positive=f.positive and g.positive,
            differentiable=f.differentiable and g.differentiable,
            log_fn=(lambda t: np.log(f.fn(t) + g.fn(t))) if f.positive and g.positive else None,
        )

    def __mul__(self, other: "ScalarFunction") -> "ScalarFunction":
        f, g = self, other
        both_log_convex = f.log_convex and g.log_convex
        return ScalarFunction(
            id=f"({f.id})*({g.id})",
            domain=f.domain.intersect(g.domain),
            fn=lambda t: f.fn(t) * g.fn(t),
            deriv=(lambda t: f.deriv(t) * g.fn(t) + f.fn(t) * g.deriv(t)) if f.deriv and g.deriv else None,
            log_fn=(lambda t: f.log_fn(t) + g.log_fn(t)) if f.log_fn and g.log_fn else None,
            convex=both_log_convex,
            log_convex=both_log_convex,
            positive=f.positive and g.positive,
            differentiable=f.differentiable and g.differentiable,
        )

    def scaled(self, c: float) -> "ScalarFunction":
        f = self
        return ScalarFunction(
            id=f"{c:g}*({f.id})",
            domain=f.domain,
            fn=lambda t: c * f.fn(t),
            deriv=(lambda t: c * f.deriv(t)) if f.deriv else None,
            log_fn=(lambda t: math.log(c) + f.log_fn(t)) if f.log_fn and c > 0 else None,
            convex=f.convex and c >= 0,
            log_convex=f.log_convex and c > 0,
            positive=f.positive and c > 0,
            differentiable=f.differentiable,
        )

    @classmethod
    def from_callable(
        cls, name: str, fn: ArrayFn, domain: Interval = REAL_LINE, **attributes
    ) -> "ScalarFunction":
        return cls(id=name, fn=fn, domain=domain, **attributes)


# Registry


def exp_function() -> ScalarFunction:
    return ScalarFunction(
        id="exp",
        fn=np.exp,
        deriv=np.exp,
        log_fn=lambda t: np.asarray(t, dtype=float),
        convex=True,
        log_convex=True,
        positive=True,
        differentiable=True,
    )


def log_function() -> ScalarFunction:
    return ScalarFunction(id="log", domain=POSITIVE_HALF_LINE, fn=np.log, deriv=lambda t: 1.0 / t, differentiable=True)


def identity_function() -> ScalarFunction:
    return ScalarFunction(
        id="identity",
        fn=lambda t: np.asarray(t, dtype=float),
        deriv=np.ones_like,
        convex=True,
        differentiable=True,
    )


def power_function(r: float) -> ScalarFunction:
    """t^r; on [0, inf) for r > 0 and on (0, inf) for r < 0."""
    if r == 0:
        raise UsageError("power needs r != 0")
    positive = r < 0
    return ScalarFunction(
        id=f"power:r={r:g}",
        domain=POSITIVE_HALF_LINE if positive else NONNEGATIVE_HALF_LINE,
        fn=lambda t: np.power(t, r),
        deriv=lambda t: r * np.power(t, r - 1.0),
        log_fn=(lambda t: r * np.log(t)) if positive else None,
        convex=r >= 1 or r < 0,
        log_convex=positive,
        positive=positive,
        differentiable=True,
        r=r,
    )


def neg_power_function(r: float) -> ScalarFunction:
    """t^-r for r > 0."""
    if not r > 0:
        raise UsageError(f"neg_power needs r > 0, got {r}")
    return ScalarFunction(
        id=f"neg_power:r={r:g}",
        domain=POSITIVE_HALF_LINE,
        fn=lambda t: np.power(t, -r),
        deriv=lambda t: -r * np.power(t, -r - 1.0),
        log_fn=lambda t: -r * np.log(t),
        convex=True,
        log_convex=True,
        positive=True,
        differentiable=True,
        r=r,
    )


def kyfan_function(r: float, epsilon: Optional[float] = None) -> ScalarFunction:
    """((1 - t)/t)^r on [eps, 1/2 - eps]."""
    if not r > 0:
        raise UsageError(f"kyfan needs r > 0, got {r}")
    epsilon = settings.kyfan_epsilon if epsilon is None else epsilon

    def fn(t):
        return np.power((1.0 - t) / t, r)

    return ScalarFunction(
        id=f"kyfan:r={r:g}",
        domain=Interval(lo=epsilon, hi=0.5 - epsilon, lo_closed=True, hi_closed=True),
        fn=fn,
        deriv=lambda t: -r * fn(t) / (t * (1.0 - t)),
        log_fn=lambda t: r * (np.log1p(-t) - np.log(t)),
        convex=True,
        log_convex=True,
        positive=True,
        differentiable=True,
        r=r,
    )


REGISTRY: dict[str, Callable[..., ScalarFunction]] = {
    "exp": exp_function,
    "log": log_function,
    "identity": identity_function,
    "power": power_function,
    "neg_power": neg_power_function,
    "kyfan": kyfan_function,
}
PARAMETERIZED = {"power", "neg_power", "kyfan"}

_SPEC = re.compile(r"^(?P<id>[a-z_]+)(?::r=(?P<r>[^:\s]+))?$")


def parse_function(spec: str) -> ScalarFunction:
    """Registry lookup by `<id>[:r=<float>]`."""
    match = _SPEC.match(spec.strip())
    if not match or match.group("id") not in REGISTRY:
        raise UsageError(f"unknown function spec {spec!r}; known ids: {', '.join(sorted(REGISTRY))}")
    name, raw_r = match.group("id"), match.group("r")
    if name in PARAMETERIZED:
        if raw_r is None:
            raise UsageError(f"function {name!r} needs a parameter, e.g. '{name}:r=2'")
        try:
            r = float(raw_r)
        except ValueError:
            raise UsageError(f"bad exponent in {spec!r}") from None
        if not math.isfinite(r):
            raise UsageError(f"bad exponent in {spec!r}")
        return REGISTRY[name](r)
    if raw_r is not None:
        raise UsageError(f"function {name!r} takes no parameter")
    return REGISTRY[name]()


# Calculus


def _require_selfadjoint(T: QMatrix) -> None:
    if not is_selfadjoint(T):
        raise UsageError("functional calculus needs a selfadjoint operator")


def _structure_symmetrize(M: np.ndarray) -> np.ndarray:
    """Average M with -J conj(M) J, then with its conjugate transpose."""
    n = M.shape[0] // 2
    A, B = M[:n, :n], M[:n, n:]
    C, D = M[n:, :n], M[n:, n:]
    mirror = np.block([[D.conj(), -C.conj()], [-B.conj(), A.conj()]])
    M = (M + mirror) / 2
    return (M + M.conj().T) / 2


def eigh(T: QMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of the Hermitian chi(T)."""
    H = chi(T).matrix
    return scipy.linalg.eigh((H + H.conj().T) / 2)


def fc_apply(T: QMatrix, f: ScalarFunction, margin: Optional[float] = None) -> QMatrix:
    """f(T) for selfadjoint T with spectrum inside the domain of f."""
    _require_selfadjoint(T)
    w, U = eigh(T)
    if margin is None:
        margin = settings.domain_margin * max(1.0, float(np.abs(w).max()))
    t = f.domain.clamp(w, margin, f.id)
    values = np.asarray(f(t), dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError(f"{f.id} is not finite on the spectrum {np.unique(t)}")
    return chi_inv(_structure_symmetrize((U * values) @ U.conj().T))


def spectrum_values(T: QMatrix) -> np.ndarray:
    """Real spectrum of a selfadjoint T with multiplicity (each chi eigenvalue pair once)."""
    w, _ = eigh(T)
    return w[::2]


def relative_distance(X: QMatrix, Y: QMatrix) -> float:
    return op_norm(X - Y) / max(1.0, op_norm(Y))


def _residual_chain(theorem: str, label: str, value: float, bound: float, witness: Optional[Witness]) -> ChainReport:
    return ChainReport.evaluate(theorem, [(label, value), ("bound", bound)], tol=0.0, witness=witness)


def fc_norm_isometry_check(T: QMatrix, f: ScalarFunction, witness: Optional[Witness] = None) -> ChainReport:
    """||f(T)|| equals max |f| over the spectrum."""
    fT = fc_apply(T, f)
    norm = op_norm(fT)
    w, _ = eigh(T)
    t = f.domain.clamp(w, settings.domain_margin * max(1.0, float(np.abs(w).max())), f.id)
    sup = float(np.abs(f(t)).max())
    return _residual_chain(
        "calculus-axioms/isometry", "| ||f(T)|| - max|f(sigma)| |", abs(norm - sup), 1e-9 * max(1.0, norm), witness
    )


def _min_eigenvalue(A: QMatrix) -> float:
    return float(spectrum_values(A).min())


def fc_positivity_check(
    T: QMatrix, f: ScalarFunction, g: Optional[ScalarFunction] = None, witness: Optional[Witness] = None
) -> list[ChainReport]:
    """f >= 0 on the spectrum gives f(T) >= 0; f >= g on [m_T, M_T] gives f(T) >= g(T)."""
    fT = fc_apply(T, f)
    w = spectrum_values(T)
    margin = settings.domain_margin * max(1.0, float(np.abs(w).max()))
    if np.any(f(f.domain.clamp(w, margin, f.id)) < 0):
        raise HypothesisError("f >= 0 on the spectrum", f.id)
    scale = max(1.0, op_norm(fT))
    reports = [
        ChainReport.evaluate(
            "calculus-axioms/positivity",
            [("-1e-9 * scale", -1e-9 * scale), ("min sigma(f(T))", _min_eigenvalue(fT))],
            tol=0.0,
            witness=witness,
        )
    ]
    if g is not None:
        grid = np.union1d(np.linspace(w.min(), w.max(), 257), w)
        grid_f = f.domain.clamp(grid, margin, f.id)
        grid_g = g.domain.clamp(grid, margin, g.id)
        if np.any(f(grid_f) < g(grid_g)):
            raise HypothesisError("f >= g on [m_T, M_T]", f"{f.id} vs {g.id}")
        difference = fT - fc_apply(T, g)
        scale = max(scale, 1.0, op_norm(difference))
        reports.append(
            ChainReport.evaluate(
                "calculus-axioms/order",
                [("-1e-9 * scale", -1e-9 * scale), ("min sigma(f(T) - g(T))", _min_eigenvalue(difference))],
                tol=0.0,
                witness=witness,
            )
        )
    return reports


def polynomial(coefficients: Sequence[float]) -> ScalarFunction:
    """sum_k c_k t^k."""
    coefficients = [float(c) for c in coefficients]
    return ScalarFunction(
        id="poly(" + ",".join(f"{c:g}" for c in coefficients) + ")",
        fn=lambda t: np.polynomial.polynomial.polyval(t, coefficients),
        deriv=lambda t: np.polynomial.polynomial.polyval(t, np.polynomial.polynomial.polyder(coefficients)),
        differentiable=True,
    )


def matrix_polynomial(T: QMatrix, coefficients: Sequence[float]) -> QMatrix:
    """Horner evaluation with quaternionic matrix products."""
    result = identity(T.n) * 0.0
    for c in reversed(coefficients):
        result = matmul(result, T) + identity(T.n) * float(c)
    return result


def fc_polynomial_check(T: QMatrix, coefficients: Sequence[float], witness: Optional[Witness] = None) -> ChainReport:
    distance = relative_distance(fc_apply(T, polynomial(coefficients)), matrix_polynomial(T, coefficients))
    return _residual_chain("calculus-axioms/polynomial", "relative distance to explicit polynomial", distance, 1e-9, witness)


def fc_homomorphism_check(
    T: QMatrix, f: ScalarFunction, g: ScalarFunction, witness: Optional[Witness] = None
) -> list[ChainReport]:
    fT, gT = fc_apply(T, f), fc_apply(T, g)
    return [
        _residual_chain(
            "calculus-axioms/product",
            "relative distance (fg)(T) to f(T)g(T)",
            relative_distance(fc_apply(T, f * g), matmul(fT, gT)),
            1e-10,
            witness,
        ),
        _residual_chain(
            "calculus-axioms/sum",
            "relative distance (f+g)(T) to f(T)+g(T)",
            relative_distance(fc_apply(T, f + g), fT + gT),
            1e-10,
            witness,
        ),
    ]


def fc_commutation_check(T: QMatrix, f: ScalarFunction, witness: Optional[Witness] = None) -> ChainReport:
    fT = fc_apply(T, f)
    scale = max(1.0, op_norm(fT) * op_norm(T))
    residual = op_norm(matmul(fT, T) - matmul(T, fT)) / scale
    return _residual_chain("calculus-axioms/commutation", "||f(T)T - Tf(T)|| / scale", residual, 1e-10, witness)


def fc_exp_log_roundtrip_check(T: QMatrix, witness: Optional[Witness] = None) -> ChainReport:
    """exp(ln T) = T for positive definite T."""
    roundtrip = fc_apply(fc_apply(T, log_function()), exp_function())
    return _residual_chain("calculus-axioms/exp-log", "relative distance exp(ln T) to T", relative_distance(roundtrip, T), 1e-8, witness)
