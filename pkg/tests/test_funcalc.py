"""Tests for scalar functions and the functional calculus."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qineq.errors import DomainError, HypothesisError, UsageError
from qineq.funcalc import (
    NONNEGATIVE_HALF_LINE,
    POSITIVE_HALF_LINE,
    Interval,
    exp_function,
    fc_apply,
    fc_commutation_check,
    fc_exp_log_roundtrip_check,
    fc_homomorphism_check,
    fc_norm_isometry_check,
    fc_polynomial_check,
    fc_positivity_check,
    identity_function,
    kyfan_function,
    log_function,
    matrix_polynomial,
    neg_power_function,
    parse_function,
    polynomial,
    power_function,
    relative_distance,
    spectrum_values,
)
from qineq.qlinalg import QMatrix, diag, identity, matmul, random_selfadjoint
from qineq.quaternion import J

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_power_of_diagonal(diag14):
    result = fc_apply(diag14, power_function(2))
    assert np.allclose(result.entries, diag([1.0, 16.0]).entries, atol=1e-12)


def test_square_of_quaternionic_block(t_2j):
    expected = QMatrix.from_quaternions([[5.0, J * 4.0], [-J * 4.0, 5.0]])
    assert relative_distance(fc_apply(t_2j, power_function(2)), expected) <= 1e-12


def test_identity_function_returns_operator(t_2j):
    assert relative_distance(fc_apply(t_2j, identity_function()), t_2j) <= 1e-12


def test_spectrum_outside_domain():
    with pytest.raises(DomainError, match="outside domain"):
        fc_apply(diag([-1.0, 1.0]), log_function())


def test_needs_selfadjoint():
    with pytest.raises(UsageError, match="selfadjoint"):
        fc_apply(QMatrix.from_quaternions([[J]]), exp_function())


def test_closed_end_clamp():
    interval = Interval(lo=0.0, hi=1.0, lo_closed=True, hi_closed=True)
    assert interval.clamp(np.array([-1e-12, 0.5, 1.0 + 1e-12]), 1e-9).tolist() == [0.0, 0.5, 1.0]
    with pytest.raises(DomainError):
        interval.clamp(np.array([-1e-3]), 1e-9)
    with pytest.raises(DomainError):
        POSITIVE_HALF_LINE.clamp(np.array([-1e-12]), 1e-9)
    assert NONNEGATIVE_HALF_LINE.clamp(np.array([-1e-12]), 1e-9).tolist() == [0.0]


def test_zero_eigenvalue_at_closed_end():
    result = fc_apply(diag([0.0, 4.0]), power_function(0.5))
    assert np.allclose(result.entries, diag([0.0, 2.0]).entries, atol=1e-12)


def test_parse_function():
    assert parse_function("power:r=-1").id == "power:r=-1"
    assert parse_function("exp").id == "exp"
    assert parse_function("kyfan:r=2").r == 2.0
    for bad in ("power", "foo", "exp:r=2", "power:r=abc", "neg_power:r=-1", "power:r=0"):
        with pytest.raises(UsageError):
            parse_function(bad)


def test_registry_flags():
    assert power_function(2).convex and not power_function(2).log_convex
    assert power_function(-1).log_convex and power_function(-1).positive
    assert not power_function(0.5).convex
    ky = kyfan_function(1.0)
    assert ky.convex and ky.log_convex and ky.positive
    assert ky.domain.contains(0.25) and not ky.domain.contains(0.5)
    assert ky.derivative(0.25) == pytest.approx(-3.0 / (0.25 * 0.75))
    assert ky.log_eval(0.2) == pytest.approx(math.log(4.0))


def test_function_algebra():
    f, g = exp_function(), power_function(2)
    t = np.array([0.5, 1.0, 2.0])
    assert np.allclose((f + g)(t), np.exp(t) + t**2)
    assert np.allclose((f * g)(t), np.exp(t) * t**2)
    assert np.allclose(f.scaled(3.0)(t), 3.0 * np.exp(t))
    assert np.allclose(f.log()(t), t)
    assert np.allclose(g.derivative_function()(t), 2 * t)


def test_matrix_polynomial_matches_products(t_2j):
    explicit = matmul(t_2j, t_2j) * 2.0 - t_2j + identity(2) * 3.0
    assert relative_distance(matrix_polynomial(t_2j, [3.0, -1.0, 2.0]), explicit) <= 1e-13
    assert polynomial([3.0, -1.0, 2.0])(2.0) == pytest.approx(9.0)


@given(seeds, st.sampled_from([1, 2, 4, 8]))
def test_calculus_axioms_hold(seed, n):
    T = random_selfadjoint(n, 0.5, 3.0, seed)
    f = power_function(-1)
    reports = [
        fc_norm_isometry_check(T, f),
        fc_polynomial_check(T, [0.5, -1.0, 0.25, 0.1]),
        fc_commutation_check(T, f),
        fc_exp_log_roundtrip_check(T),
        *fc_homomorphism_check(T, f, exp_function()),
        *fc_positivity_check(T, exp_function(), polynomial([1.0, 1.0])),
    ]
    assert {r.theorem.split("/")[1] for r in reports} == {
        "isometry", "polynomial", "commutation", "exp-log", "product", "sum", "positivity", "order",
    }
    assert all(r.passed for r in reports), [r.violation for r in reports if not r.passed]


def test_positivity_requires_nonnegative_function():
    with pytest.raises(HypothesisError):
        fc_positivity_check(diag([-2.0, 1.0]), identity_function())


def test_order_requires_pointwise_order(diag14):
    with pytest.raises(HypothesisError):
        fc_positivity_check(diag14, exp_function(), power_function(3))


def test_spectrum_values_count_multiplicity():
    assert spectrum_values(diag([2.0, 2.0, 5.0])) == pytest.approx([2.0, 2.0, 5.0])


@pytest.mark.parametrize(
    "f, points",
    [
        (exp_function(), [-1.0, 0.0, 0.7, 2.5]),
        (log_function(), [0.3, 1.0, 4.0]),
        (power_function(2), [0.5, 1.5, 3.0]),
        (power_function(0.5), [0.4, 1.0, 2.0]),
        (power_function(-1), [0.5, 1.0, 3.0]),
        (neg_power_function(1.5), [0.5, 1.0, 2.0]),
        (kyfan_function(1.0), [0.1, 0.25, 0.4]),
        (kyfan_function(2.5), [0.15, 0.3]),
    ],
)
def test_derivative_matches_centered_difference(f, points):
    h = 1e-5
    for t in points:
        expected = (f.eval(t + h) - f.eval(t - h)) / (2 * h)
        assert abs(f.derivative(t) - expected) <= 1e-6 * max(1.0, abs(expected))
