"""Operator-inequality chains for selfadjoint quaternionic operators.

Every checker validates the theorem's hypotheses, evaluates the chain on the given
instance and returns a ChainReport whose terms should be non-decreasing. Operator
expressions such as exp(f'(T) f(T)^-1 (T - cI)) are functions of T alone, so each is
built as one scalar function and passed through fc_apply.

Quadratic forms <Ax, x> are real for selfadjoint A. A measurable imaginary residue
marks the trial invalid instead of failing it.
"""

import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np

from .config import settings
from .errors import DomainError, HypothesisError
from .funcalc import (
    ScalarFunction,
    fc_apply,
    kyfan_function,
    power_function,
    spectrum_values,
)
from .models import ChainReport, Witness
from .qlinalg import QMatrix, QVector, apply, classify, inner, is_selfadjoint

logger = logging.getLogger(__name__)


def quadratic_form(A: QMatrix, x: QVector) -> tuple[float, float]:
    """<Ax, x> split into its real value and the modulus of its imaginary part."""
    q = inner(apply(A, x), x)
    return q.x0, math.hypot(*q.imag)


class _Instance:
    """One (T, x) pair with the bookkeeping shared by all chains."""

    def __init__(self, T: QMatrix, x: QVector):
        self.T = T
        self.x = x
        self.invalid = False

    def form(self, A: QMatrix, x: Optional[QVector] = None) -> float:
        value, residue = quadratic_form(A, self.x if x is None else x)
        if residue > settings.imag_tol * (1.0 + abs(value)):
            logger.warning(f"Quadratic form has imaginary residue {residue:.3e}; trial marked invalid")
            self.invalid = True
        return value

    def fc(self, fn: Callable[[np.ndarray], np.ndarray], name: str = "h") -> float:
        """<h(T)x, x> for a scalar function h of T."""
        return self.form(fc_apply(self.T, ScalarFunction.from_callable(name, fn)))

    def c(self) -> float:
        return self.form(self.T)


# Hypotheses


def _margin(m: float, M: float) -> float:
    return settings.domain_margin * max(1.0, abs(m), abs(M))


def _check_unit(x: QVector) -> None:
    if abs(x.norm() - 1.0) > settings.unit_tol:
        raise HypothesisError("x is a unit vector", f"||x|| = {x.norm():.17g}")


def _check_operator(T: QMatrix, m: float, M: float) -> np.ndarray:
    if not m < M:
        raise HypothesisError("m < M", f"m={m}, M={M}")
    if not is_selfadjoint(T):
        raise HypothesisError("T is selfadjoint")
    w = spectrum_values(T)
    margin = _margin(m, M)
    if w.min() < m - margin or w.max() > M + margin:
        raise HypothesisError("sigma(T) inside [m, M]", f"spectrum [{w.min():.17g}, {w.max():.17g}] vs [{m}, {M}]")
    return w


def _check_common(T: QMatrix, x: QVector, m: float, M: float) -> np.ndarray:
    if T.n != x.n:
        raise HypothesisError("x in the space of T", f"dimensions {T.n} vs {x.n}")
    _check_unit(x)
    return _check_operator(T, m, M)


def _check_function(
    f: ScalarFunction,
    m: float,
    M: float,
    convex: bool = False,
    log_convex: bool = False,
    differentiable: bool = False,
) -> None:
    if convex and not f.convex:
        raise HypothesisError("f is convex", f.id)
    if log_convex and not (f.log_convex and f.positive):
        raise HypothesisError("f is positive and log-convex", f.id)
    if differentiable and not (f.differentiable and f.deriv is not None):
        raise HypothesisError("f is differentiable", f.id)
    try:
        f.domain.clamp(np.array([m, M]), _margin(m, M), f.id)
    except DomainError as e:
        raise HypothesisError("[m, M] inside the domain of f", str(e)) from None


def _check_positive_invertible(T: QMatrix) -> float:
    if not is_selfadjoint(T):
        raise HypothesisError("T is selfadjoint")
    smallest = float(spectrum_values(T).min())
    if not smallest > 0:
        raise HypothesisError("T is positive and invertible", f"min sigma(T) = {smallest:.17g}")
    return smallest


def _at(f: ScalarFunction, t: float, m: float, M: float) -> float:
    """f at a scalar lying in [m, M] up to rounding."""
    return f.eval(float(f.domain.clamp(np.array([min(max(t, m), M)]), _margin(m, M), f.id)[0]))


def _witness(witness: Optional[Witness], **update) -> Witness:
    base = witness or Witness()
    return base.model_copy(update={k: v for k, v in update.items() if v is not None})


def _tol(tol: Optional[float]) -> float:
    return settings.tol if tol is None else tol


def _chain(
    theorem: str,
    terms: Sequence[tuple[str, float]],
    inst: Optional[_Instance],
    tol: Optional[float],
    witness: Witness,
    diagnostic: bool = False,
) -> ChainReport:
    invalid = inst is not None and inst.invalid
    report = ChainReport.evaluate(theorem, terms, _tol(tol), witness=witness, invalid=invalid, diagnostic=diagnostic)
    if report.counts_as_violation:
        logger.warning(f"{theorem} violated: {report.violation}")
    return report


def chord(f: ScalarFunction, c: float, m: float, M: float) -> float:
    """((M - c) f(m) + (c - m) f(M)) / (M - m)."""
    return ((M - c) * f.eval(m) + (c - m) * f.eval(M)) / (M - m)


def log_interpolant(f: ScalarFunction, m: float, M: float, literal_exponent: bool = False) -> Callable:
    """t -> f(m)^((M - t)/(M - m)) f(M)^((t - m)/(M - m)).

    literal_exponent swaps the second exponent for (t - M)/(M - m).
    """
    log_fm, log_fM = f.log_eval(m), f.log_eval(M)
    shift = M if literal_exponent else m

    def g(t):
        t = np.asarray(t, dtype=float)
        return np.exp((M - t) / (M - m) * log_fm + (t - shift) / (M - m) * log_fM)

    return g


# Convex-function chains


def check_mond_pecaric(
    T: QMatrix, f: ScalarFunction, x: QVector, m: float, M: float,
    tol: Optional[float] = None, witness: Optional[Witness] = None,
) -> ChainReport:
    """f(<Tx,x>) <= <f(T)x,x> for convex f."""
    _check_common(T, x, m, M)
    _check_function(f, m, M, convex=True)
    inst = _Instance(T, x)
    c = inst.c()
    terms = [("f(<Tx,x>)", _at(f, c, m, M)), ("<f(T)x,x>", inst.fc(f.fn, f.id))]
    return _chain("mond-pecaric", terms, inst, tol, _witness(witness, function=f.id, m=m, M=M, n=T.n, r=f.r))


def check_lah_ribaric(
    T: QMatrix, f: ScalarFunction, x: QVector, m: float, M: float,
    tol: Optional[float] = None, witness: Optional[Witness] = None,
) -> ChainReport:
    """<f(T)x,x> <= chord of f over [m, M] at <Tx,x>."""
    _check_common(T, x, m, M)
    _check_function(f, m, M, convex=True)
    inst = _Instance(T, x)
    c = inst.c()
    terms = [("<f(T)x,x>", inst.fc(f.fn, f.id)), ("((M-c)f(m)+(c-m)f(M))/(M-m)", chord(f, c, m, M))]
    return _chain("lah-ribaric", terms, inst, tol, _witness(witness, function=f.id, m=m, M=M, n=T.n, r=f.r))


def check_holder_mccarthy(
    T: QMatrix, x: QVector, r: float, tol: Optional[float] = None, witness: Optional[Witness] = None
) -> ChainReport:
    """Power-mean comparison of <T^r x,x> and <Tx,x>^r by exponent regime."""
    if r == 0 or r == 1 or not math.isfinite(r):
        raise HypothesisError("r in (-inf, 0), (0, 1) or (1, inf)", f"r={r}")
    w = spectrum_values(T)
    if T.n != x.n:
        raise HypothesisError("x in the space of T", f"dimensions {T.n} vs {x.n}")
    _check_unit(x)
    cls = classify(T)
    if not cls.positive:
        raise HypothesisError("T is positive")
    if r < 0:
        _check_positive_invertible(T)
    inst = _Instance(T, x)
    c = max(inst.c(), 0.0)
    f = power_function(r)
    power_form = inst.form(fc_apply(T, f))
    if 0 < r < 1:
        terms = [("<T^r x,x>", power_form), ("<Tx,x>^r", c**r)]
    else:
        terms = [("<Tx,x>^r", c**r), ("<T^r x,x>", power_form)]
    witness = _witness(witness, r=r, n=T.n, m=float(w.min()), M=float(w.max()), function=f.id)
    return _chain("holder-mccarthy", terms, inst, tol, witness)


# Log-convex refinements


def _mondlog_terms(inst: _Instance, f: ScalarFunction, m: float, M: float) -> list[float]:
    c = inst.c()
    return [_at(f, c, m, M), math.exp(inst.fc(f.log_fn, f"ln {f.id}")), inst.fc(f.fn, f.id)]


def check_mondlog(
    T: QMatrix, f: ScalarFunction, x: QVector, m: float, M: float,
    tol: Optional[float] = None, witness: Optional[Witness] = None,
) -> ChainReport:
    """f(<Tx,x>) <= exp<ln f(T)x,x> <= <f(T)x,x> for positive log-convex f."""
    _check_common(T, x, m, M)
    _check_function(f, m, M, log_convex=True)
    inst = _Instance(T, x)
    values = _mondlog_terms(inst, f, m, M)
    labels = ["f(<Tx,x>)", "exp<ln f(T)x,x>", "<f(T)x,x>"]
    return _chain("mondlog", list(zip(labels, values)), inst, tol, _witness(witness, function=f.id, m=m, M=M, n=T.n, r=f.r))


def check_mondlog_multi(
    Ts: Sequence[QMatrix], f: ScalarFunction, xs: Sequence[QVector], m: float, M: float,
    tol: Optional[float] = None, witness: Optional[Witness] = None,
) -> ChainReport:
    """The several-operator form with sum_j ||x_j||^2 = 1."""
    if len(Ts) != len(xs) or not Ts:
        raise HypothesisError("one vector per operator", f"{len(Ts)} operators, {len(xs)} vectors")
    total = sum(x.norm() ** 2 for x in xs)
    if abs(total - 1.0) > 1e-10:
        raise HypothesisError("sum_j ||x_j||^2 = 1", f"sum = {total:.17g}")
    for T, x in zip(Ts, xs):
        if T.n != x.n:
            raise HypothesisError("x_j in the space of T_j", f"dimensions {T.n} vs {x.n}")
        _check_operator(T, m, M)
    _check_function(f, m, M, log_convex=True)
    instances = [_Instance(T, x) for T, x in zip(Ts, xs)]
    c = sum(inst.c() for inst in instances)
    log_sum = sum(inst.fc(f.log_fn, f"ln {f.id}") for inst in instances)
    f_sum = sum(inst.fc(f.fn, f.id) for inst in instances)
    terms = [
        ("f(sum <T_j x_j,x_j>)", _at(f, c, m, M)),
        ("exp<sum ln f(T_j) x_j,x_j>", math.exp(log_sum)),
        ("<sum f(T_j) x_j,x_j>", f_sum),
    ]
    report_inst = _Instance(Ts[0], xs[0])
    report_inst.invalid = any(inst.invalid for inst in instances)
    return _chain("mondlog-multi", terms, report_inst, tol, _witness(witness, function=f.id, m=m, M=M, n=Ts[0].n, r=f.r))


def check_neg_power_refinement(
    T: QMatrix, x: QVector, r: float, tol: Optional[float] = None, witness: Optional[Witness] = None
) -> ChainReport:
    """<Tx,x>^r <= exp<ln(T^r)x,x> <= <T^r x,x> for r < 0."""
    if not r < 0:
        raise HypothesisError("r < 0", f"r={r}")
    smallest = _check_positive_invertible(T)
    largest = float(spectrum_values(T).max())
    _check_unit(x)
    f = power_function(r)
    m, M = smallest, max(largest, smallest * (1 + 1e-12))
    inst = _Instance(T, x)
    values = _mondlog_terms(inst, f, m, M)
    labels = ["<Tx,x>^r", "exp<ln(T^r)x,x>", "<T^r x,x>"]
    return _chain("neg-power-refinement", list(zip(labels, values)), inst, tol, _witness(witness, r=r, n=T.n, function=f.id))


def _lah_chains(
    theorem: str, T: QMatrix, f: ScalarFunction, x: QVector, m: float, M: float,
    tol: Optional[float], witness: Witness, literal_exponent: bool = False,
) -> tuple[ChainReport, ChainReport]:
    inst = _Instance(T, x)
    c = inst.c()
    g = log_interpolant(f, m, M, literal_exponent)
    g_form = inst.fc(g, "log-interpolant")
    scalar_middle = float(log_interpolant(f, m, M)(min(max(c, m), M)))
    suffix = "/literal-exponent" if literal_exponent else ""
    first = [
        ("<f(T)x,x>", inst.fc(f.fn, f.id)),
        ("<f(m)^((MI-T)/(M-m)) f(M)^((T-mI)/(M-m)) x,x>", g_form),
        ("((M-c)f(m)+(c-m)f(M))/(M-m)", chord(f, c, m, M)),
    ]
    second = [
        ("f(<Tx,x>)", _at(f, c, m, M)),
        ("f(m)^((M-c)/(M-m)) f(M)^((c-m)/(M-m))", scalar_middle),
        ("<f(m)^((MI-T)/(M-m)) f(M)^((T-mI)/(M-m)) x,x>", g_form),
    ]
    return (
        _chain(f"{theorem}{suffix}/i", first, inst, tol, witness, diagnostic=literal_exponent),
        _chain(f"{theorem}{suffix}/ii", second, inst, tol, witness, diagnostic=literal_exponent),
    )


def check_lah_log(
    T: QMatrix, f: ScalarFunction, x: QVector, m: float, M: float,
    tol: Optional[float] = None, witness: Optional[Witness] = None,
) -> tuple[ChainReport, ChainReport]:
    """Both log-interpolant refinements of the chord bound."""
    _check_common(T, x, m, M)
    _check_function(f, m, M, log_convex=True)
    return _lah_chains("lah-log", T, f, x, m, M, tol, _witness(witness, function=f.id, m=m, M=M, n=T.n, r=f.r))


def lah_exponent_diagnostic(
    T: QMatrix, f: ScalarFunction, x: QVector, m: float, M: float,
    tol: Optional[float] = None, witness: Optional[Witness] = None,
) -> tuple[ChainReport, ChainReport]:
    """The Lah-type chains with the operator exponent (T - MI)/(M - m) read literally.

    Reports are flagged diagnostic and never count as violations.
    """
    _check_common(T, x, m, M)
    _check_function(f, m, M, log_convex=True)
    witness = _witness(witness, function=f.id, m=m, M=M, n=T.n, r=f.r)
    return _lah_chains("lah-log", T, f, x, m, M, tol, witness, literal_exponent=True)


def check_power_lah(
    T: QMatrix, x: QVector, m: float, M: float, r: float,
    tol: Optional[float] = None, witness: Optional[Witness] = None,
) -> tuple[ChainReport, ChainReport]:
    """The Lah-type chains for t^r, r < 0, with base interpolant m^((MI-T)/(M-m)) M^((T-mI)/(M-m))."""
    if not 0 < m:
        raise HypothesisError("0 < m", f"m={m}")
    if not r < 0:
        raise HypothesisError("r < 0", f"r={r}")
    _check_common(T, x, m, M)
    _check_positive_invertible(T)
    f = power_function(r)
    return _lah_chains("power-lah", T, f, x, m, M, tol, _witness(witness, function=f.id, m=m, M=M, n=T.n, r=r))


# Gap and multiplicative Jensen chains


def check_jensen_gap(
    T: QMatrix, f: ScalarFunction, x: QVector, m: float, M: float, variant: int = 1,
    tol: Optional[float] = None, witness: Optional[Witness] = None,
) -> ChainReport:
    """Upper bounds on the Jensen gap: additive (variant 1) or multiplicative (variant 2)."""
    _check_common(T, x, m, M)
    witness = _witness(witness, function=f.id, m=m, M=M, n=T.n, r=f.r)
    inst = _Instance(T, x)
    c = inst.c()
    if variant == 1:
        _check_function(f, m, M, convex=True, differentiable=True)
        upper = inst.fc(lambda t: f.deriv(t) * t, "f'(t)t") - c * inst.fc(f.deriv, "f'")
        terms = [("0", 0.0), ("<f(T)x,x> - f(<Tx,x>)", inst.fc(f.fn, f.id) - _at(f, c, m, M)), ("<f'(T)Tx,x> - c<f'(T)x,x>", upper)]
        return _chain("jensen-gap/i", terms, inst, tol, witness)
    if variant == 2:
        _check_function(f, m, M, log_convex=True, differentiable=True)

        def log_slope(t):
            return f.deriv(t) / f.fn(t)

        exponent = inst.fc(lambda t: log_slope(t) * t, "f'(t)t/f(t)") - c * inst.fc(log_slope, "f'/f")
        terms = [
            ("1", 1.0),
            ("exp<ln f(T)x,x> / f(<Tx,x>)", math.exp(inst.fc(f.log_fn, f"ln {f.id}")) / _at(f, c, m, M)),
            ("exp(<f'(T)f(T)^-1 Tx,x> - c<f'(T)f(T)^-1 x,x>)", math.exp(exponent)),
        ]
        return _chain("jensen-gap/ii", terms, inst, tol, witness)
    raise HypothesisError("variant is 1 or 2", f"variant={variant}")


def check_neg_power_gap(
    T: QMatrix, x: QVector, r: float, tol: Optional[float] = None, witness: Optional[Witness] = None
) -> ChainReport:
    """<Tx,x>^r exp<ln(T^-r)x,x> <= exp(r(<Tx,x><T^-1 x,x> - 1)) for r > 0."""
    if not r > 0:
        raise HypothesisError("r > 0", f"r={r}")
    _check_positive_invertible(T)
    if T.n != x.n:
        raise HypothesisError("x in the space of T", f"dimensions {T.n} vs {x.n}")
    _check_unit(x)
    inst = _Instance(T, x)
    c = inst.c()
    log_form = inst.fc(lambda t: -r * np.log(t), "ln t^-r")
    inverse_form = inst.fc(lambda t: 1.0 / t, "t^-1")
    terms = [
        ("<Tx,x>^r exp<ln(T^-r)x,x>", c**r * math.exp(log_form)),
        ("exp(r(<Tx,x><T^-1 x,x> - 1))", math.exp(r * (c * inverse_form - 1.0))),
    ]
    return _chain("neg-power-gap", terms, inst, tol, _witness(witness, r=r, n=T.n, function=f"neg_power:r={r:g}"))


def _mult_jensen_terms(inst: _Instance, f: ScalarFunction, m: float, M: float) -> list[float]:
    c = inst.c()
    fc_value = _at(f, c, m, M)
    slope = f.derivative(float(f.domain.clamp(np.array([min(max(c, m), M)]), _margin(m, M), f.id)[0])) / fc_value
    return [
        1.0,
        inst.fc(lambda t: np.exp(slope * (t - c)), "exp(a(t-c))"),
        inst.fc(f.fn, f.id) / fc_value,
        inst.fc(lambda t: np.exp(f.deriv(t) / f.fn(t) * (t - c)), "exp(f'(t)/f(t) (t-c))"),
    ]


def check_mult_jensen(
    T: QMatrix, f: ScalarFunction, x: QVector, m: float, M: float,
    tol: Optional[float] = None, witness: Optional[Witness] = None,
) -> ChainReport:
    """Refinement and reverse of the multiplicative Jensen inequality."""
    _check_common(T, x, m, M)
    _check_function(f, m, M, log_convex=True, differentiable=True)
    inst = _Instance(T, x)
    labels = ["1", "<exp((f'(c)/f(c))(T-cI))x,x>", "<f(T)x,x>/f(c)", "<exp(f'(T)f(T)^-1 (T-cI))x,x>"]
    values = _mult_jensen_terms(inst, f, m, M)
    return _chain("mult-jensen", list(zip(labels, values)), inst, tol, _witness(witness, function=f.id, m=m, M=M, n=T.n, r=f.r))


def check_mult_jensen_neg_power(
    T: QMatrix, x: QVector, r: float, tol: Optional[float] = None, witness: Optional[Witness] = None
) -> ChainReport:
    """The t^-r form: [1, <exp(r(I - T/c))x,x>, <T^-r x,x> c^r, <exp(r(cT^-1 - I))x,x>]."""
    if not r > 0:
        raise HypothesisError("r > 0", f"r={r}")
    _check_positive_invertible(T)
    _check_unit(x)
    inst = _Instance(T, x)
    c = inst.c()
    terms = [
        ("1", 1.0),
        ("<exp(r(I - c^-1 T))x,x>", inst.fc(lambda t: np.exp(r * (1.0 - t / c)), "exp(r(1-t/c))")),
        ("<T^-r x,x> c^r", inst.fc(lambda t: np.power(t, -r), "t^-r") * c**r),
        ("<exp(r(cT^-1 - I))x,x>", inst.fc(lambda t: np.exp(r * (c / t - 1.0)), "exp(r(c/t-1))")),
    ]
    return _chain("mult-jensen/neg-power", terms, inst, tol, _witness(witness, r=r, n=T.n, function=f"neg_power:r={r:g}"))


def check_gruss_type(
    T: QMatrix, f: ScalarFunction, m: float, M: float, x: QVector,
    tol: Optional[float] = None, witness: Optional[Witness] = None,
) -> ChainReport:
    """Ratio chain bounded by exp((M - m)(f'(M)/f(M) - f'(m)/f(m)) / 4)."""
    _check_common(T, x, m, M)
    _check_function(f, m, M, log_convex=True, differentiable=True)
    inst = _Instance(T, x)
    k = f.derivative(M) / f.eval(M) - f.derivative(m) / f.eval(m)
    denominator = inst.fc(f.fn, f.id)
    g = log_interpolant(f, m, M)
    terms = [
        ("1", 1.0),
        ("<f(M)^((T-mI)/(M-m)) f(m)^((MI-T)/(M-m)) x,x> / <f(T)x,x>", inst.fc(g, "log-interpolant") / denominator),
        (
            "<f(T) exp((MI-T)(T-mI)/(M-m) k) x,x> / <f(T)x,x>",
            inst.fc(lambda t: f.fn(t) * np.exp((M - t) * (t - m) / (M - m) * k), "f exp(q k)") / denominator,
        ),
        ("exp((M-m) k / 4)", math.exp(0.25 * (M - m) * k)),
    ]
    return _chain("gruss-type", terms, inst, tol, _witness(witness, function=f.id, m=m, M=M, n=T.n, r=f.r))


def check_gruss_neg_power(
    T: QMatrix, x: QVector, m: float, M: float, r: float,
    tol: Optional[float] = None, witness: Optional[Witness] = None,
) -> ChainReport:
    """The t^-r form with bound exp(r (M - m)^2 / (4 m M))."""
    if not 0 < m:
        raise HypothesisError("0 < m", f"m={m}")
    if not r > 0:
        raise HypothesisError("r > 0", f"r={r}")
    _check_common(T, x, m, M)
    inst = _Instance(T, x)
    denominator = inst.fc(lambda t: np.power(t, -r), "t^-r")
    g = log_interpolant(power_function(-r), m, M)
    terms = [
        ("1", 1.0),
        ("<M^(-r(T-mI)/(M-m)) m^(-r(MI-T)/(M-m)) x,x> / <T^-r x,x>", inst.fc(g, "log-interpolant") / denominator),
        (
            "<T^-r exp(r(MI-T)(T-mI)/(mM)) x,x> / <T^-r x,x>",
            inst.fc(lambda t: np.power(t, -r) * np.exp(r * (M - t) * (t - m) / (m * M)), "t^-r exp(...)") / denominator,
        ),
        ("exp(r (M-m)^2 / (4mM))", math.exp(0.25 * r * (M - m) ** 2 / (m * M))),
    ]
    return _chain("gruss-type/neg-power", terms, inst, tol, _witness(witness, m=m, M=M, r=r, n=T.n, function=f"neg_power:r={r:g}"))


# Ky Fan


def check_kyfan_scalar(
    t: Sequence[float], p: Sequence[float], r: float = 1.0, include_mean: bool = False,
    tol: Optional[float] = None, witness: Optional[Witness] = None,
) -> ChainReport:
    """(1 - sum p t)/(sum p t) <= prod((1 - t_i)/t_i)^p_i, raised to r."""
    t = np.asarray(t, dtype=float)
    p = np.asarray(p, dtype=float)
    if t.shape != p.shape or t.ndim != 1 or t.size == 0:
        raise HypothesisError("one weight per point", f"{t.shape} vs {p.shape}")
    if np.any(p <= 0) or abs(p.sum() - 1.0) > 1e-12:
        raise HypothesisError("p_i > 0 and sum p_i = 1", f"sum = {p.sum():.17g}")
    if np.any(t <= 0) or np.any(t >= 0.5):
        raise HypothesisError("t_i in (0, 1/2)")
    if not r > 0:
        raise HypothesisError("r > 0", f"r={r}")
    mean = float(p @ t)
    f = kyfan_function(r, epsilon=0.0)
    terms = [
        ("((1 - sum p t)/(sum p t))^r", ((1.0 - mean) / mean) ** r),
        ("prod ((1 - t_i)/t_i)^(r p_i)", math.exp(float(p @ f.log_fn(t)))),
    ]
    if include_mean:
        terms.append(("sum p_i ((1 - t_i)/t_i)^r", float(p @ f(t))))
    return _chain("kyfan-scalar", terms, None, tol, _witness(witness, r=r, n=int(t.size), function=f.id))


def check_kyfan_operator(
    T: QMatrix, x: QVector, m: float, M: float, r: float, variant: int,
    diagnostic: bool = False, tol: Optional[float] = None, witness: Optional[Witness] = None,
) -> tuple[ChainReport, ...]:
    """The operator Ky Fan chains for f(t) = ((1 - t)/t)^r on [m, M] inside (0, 1/2).

    Variant 1 is the log-convex Mond-Pecaric chain, 2 the two Lah-type chains (plus the
    literal-exponent diagnostic when requested) and 3 the two gap chains.
    """
    if not r > 0:
        raise HypothesisError("r > 0", f"r={r}")
    f = kyfan_function(r)
    if not (f.domain.contains(m) and f.domain.contains(M)):
        raise HypothesisError("[m, M] inside (0, 1/2)", f"m={m}, M={M}, allowed {f.domain}")
    _check_common(T, x, m, M)
    _check_positive_invertible(T)
    witness = _witness(witness, function=f.id, m=m, M=M, r=r, n=T.n)
    if variant == 1:
        inst = _Instance(T, x)
        values = _mondlog_terms(inst, f, m, M)
        labels = ["(<(I-T)x,x><Tx,x>^-1)^r", "exp<ln((T^-1(I-T))^r)x,x>", "<((I-T)T^-1)^r x,x>"]
        return (_chain("kyfan-operator/1", list(zip(labels, values)), inst, tol, witness),)
    if variant == 2:
        reports = _lah_chains("kyfan-operator/2", T, f, x, m, M, tol, witness)
        if diagnostic:
            reports += _lah_chains("kyfan-operator/2", T, f, x, m, M, tol, witness, literal_exponent=True)
        return reports
    if variant == 3:
        gap = check_jensen_gap(T, f, x, m, M, variant=2, tol=tol, witness=witness)
        inst = _Instance(T, x)
        labels = [
            "1",
            "<exp(r(1-c)^-1 (I - c^-1 T))x,x>",
            "<((I-T)T^-1)^r x,x> / ((1-c)/c)^r",
            "<exp(r(I-T)^-1 (cT^-1 - I))x,x>",
        ]
        mult = _chain("kyfan-operator/3-ii", list(zip(labels, _mult_jensen_terms(inst, f, m, M))), inst, tol, witness)
        return (gap.model_copy(update={"theorem": "kyfan-operator/3-i"}), mult)
    raise HypothesisError("variant is 1, 2 or 3", f"variant={variant}")
