"""Spot values and properties of the inequality chains.

Most spot values use T = diag(1, 4) and x = (1, 1)/sqrt(2), so <Tx,x> = 2.5 and
<h(T)x,x> = (h(1) + h(4))/2.
"""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qineq import inequalities as ineq
from qineq.errors import HypothesisError
from qineq.funcalc import exp_function, log_function, neg_power_function, parse_function, power_function
from qineq.qlinalg import (
    QVector,
    conjugate_diagonal,
    diag,
    identity,
    random_selfadjoint,
    random_unit_vector,
    random_unitary,
)
from qineq.quaternion import Quaternion

E_9_16 = math.exp(0.5625)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def values(report):
    return [t.value for t in report.terms]


def test_mond_pecaric(diag14, x_half, t_2j):
    report = ineq.check_mond_pecaric(diag14, power_function(2), x_half, 1.0, 4.0)
    assert values(report) == pytest.approx([6.25, 8.5], abs=1e-9)
    assert report.passed and report.slack == pytest.approx(2.25)
    report = ineq.check_mond_pecaric(t_2j, power_function(2), QVector.basis(2), 1.0, 3.0)
    assert values(report) == pytest.approx([4.0, 5.0], abs=1e-9)


def test_mond_pecaric_at_identity():
    report = ineq.check_mond_pecaric(identity(3), exp_function(), random_unit_vector(3, 0), 0.5, 2.0)
    assert values(report) == pytest.approx([math.e, math.e], rel=1e-12)


def test_lah_ribaric(diag14, x_half):
    f = power_function(2)
    assert values(ineq.check_lah_ribaric(diag14, f, x_half, 1.0, 4.0)) == pytest.approx([8.5, 8.5], abs=1e-9)
    assert values(ineq.check_lah_ribaric(diag14, f, x_half, 0.0, 5.0)) == pytest.approx([8.5, 12.5], abs=1e-9)
    chain = ineq.check_lah_ribaric(identity(1), f, QVector.basis(1), 0.0, 2.0)
    assert values(chain) == pytest.approx([1.0, 2.0], abs=1e-12)


@pytest.mark.parametrize(
    "r, expected",
    [(2.0, [6.25, 8.5]), (0.5, [1.5, math.sqrt(2.5)]), (-1.0, [0.4, 0.625])],
)
def test_holder_mccarthy(diag14, x_half, r, expected):
    report = ineq.check_holder_mccarthy(diag14, x_half, r)
    assert values(report) == pytest.approx(expected, abs=1e-9)
    assert report.passed


@pytest.mark.parametrize("r", [0.0, 1.0])
def test_holder_mccarthy_rejects_boundary_exponents(diag14, x_half, r):
    with pytest.raises(HypothesisError):
        ineq.check_holder_mccarthy(diag14, x_half, r)


def test_holder_mccarthy_needs_positive_operator(x_half):
    with pytest.raises(HypothesisError, match="positive"):
        ineq.check_holder_mccarthy(diag([-1.0, 4.0]), x_half, 2.0)


def test_mondlog(diag14, x_half):
    report = ineq.check_mondlog(diag14, power_function(-1), x_half, 1.0, 4.0)
    assert values(report) == pytest.approx([0.4, 0.5, 0.625], abs=1e-9)
    report = ineq.check_mondlog(diag14, exp_function(), x_half, 1.0, 4.0)
    assert values(report) == pytest.approx([math.exp(2.5), math.exp(2.5), (math.e + math.exp(4)) / 2], rel=1e-12)


def test_mondlog_at_identity():
    report = ineq.check_mondlog(identity(2), power_function(-1), random_unit_vector(2, 5), 0.5, 2.0)
    assert values(report) == pytest.approx([1.0, 1.0, 1.0], rel=1e-12)


def test_mondlog_needs_log_convex(diag14, x_half):
    with pytest.raises(HypothesisError, match="log-convex"):
        ineq.check_mondlog(diag14, power_function(2), x_half, 1.0, 4.0)


def test_mondlog_multi_reduces_to_mondlog(diag14, x_half):
    f = power_function(-1)
    single = ineq.check_mondlog(diag14, f, x_half, 1.0, 4.0)
    multi = ineq.check_mondlog_multi([diag14], f, [x_half], 1.0, 4.0)
    assert values(multi) == values(single)


def test_mondlog_multi_splits_weight(diag14, x_half):
    f = power_function(-1)
    half = QVector(entries=[[0.5, 0, 0, 0], [0.5, 0, 0, 0]])
    multi = ineq.check_mondlog_multi([diag14, diag14], f, [half, half], 1.0, 4.0)
    assert values(multi) == pytest.approx(values(ineq.check_mondlog(diag14, f, x_half, 1.0, 4.0)), abs=1e-12)
    twice = ineq.check_mondlog_multi([identity(2), identity(2)], f, [half, half], 0.5, 2.0)
    assert values(twice) == pytest.approx([1.0, 1.0, 1.0], abs=1e-12)


def test_mondlog_multi_needs_unit_total_weight(diag14, x_half):
    with pytest.raises(HypothesisError, match="sum_j"):
        ineq.check_mondlog_multi([diag14, diag14], power_function(-1), [x_half, x_half], 1.0, 4.0)


@pytest.mark.parametrize("r, expected", [(-1.0, [0.4, 0.5, 0.625]), (-2.0, [0.16, 0.25, 0.53125])])
def test_neg_power_refinement(diag14, x_half, r, expected):
    assert values(ineq.check_neg_power_refinement(diag14, x_half, r)) == pytest.approx(expected, abs=1e-9)


def test_neg_power_refinement_on_scalar_operator():
    report = ineq.check_neg_power_refinement(identity(3) * 2.0, random_unit_vector(3, 9), -1.5)
    assert values(report) == pytest.approx([2.0**-1.5] * 3, rel=1e-12)


def test_lah_log(diag14, x_half):
    first, second = ineq.check_lah_log(diag14, power_function(-1), x_half, 1.0, 4.0)
    assert first.theorem == "lah-log/i" and second.theorem == "lah-log/ii"
    assert values(first) == pytest.approx([0.625, 0.625, 0.625], abs=1e-9)
    assert values(second) == pytest.approx([0.4, 0.5, 0.625], abs=1e-9)


def test_lah_log_at_left_endpoint_pair():
    _, second = ineq.check_lah_log(identity(1), exp_function(), QVector.basis(1), 0.0, 2.0)
    assert values(second)[:2] == pytest.approx([math.e, math.e], rel=1e-12)


def test_power_lah(diag14, x_half):
    first, second = ineq.check_power_lah(diag14, x_half, 1.0, 4.0, -1.0)
    assert values(first) == pytest.approx([0.625, 0.625, 0.625], abs=1e-9)
    assert values(second) == pytest.approx([0.4, 0.5, 0.625], abs=1e-9)


def test_power_lah_two_point_instance():
    x = QVector(entries=[[1 / math.sqrt(2), 0, 0, 0], [0, 0, 1 / math.sqrt(2), 0]])
    first, second = ineq.check_power_lah(diag([1.0, 2.0]), x, 1.0, 2.0, -2.0)
    # spectrum {m, M}: the interpolant agrees with t^-2 there
    assert values(first) == pytest.approx([0.625, 0.625, 0.625], abs=1e-12)
    assert values(second) == pytest.approx([1 / 2.25, 2 ** (-1.0), 0.625], abs=1e-12)
    assert first.passed and second.passed


def test_power_lah_at_m():
    first, second = ineq.check_power_lah(identity(2) * 1.5, random_unit_vector(2, 3), 1.5, 3.0, -1.0)
    assert values(first) + values(second) == pytest.approx([1 / 1.5] * 6, rel=1e-12)


def test_jensen_gap_additive(diag14, x_half):
    report = ineq.check_jensen_gap(diag14, power_function(2), x_half, 1.0, 4.0, variant=1)
    assert values(report) == pytest.approx([0.0, 2.25, 4.5], abs=1e-9)


def test_jensen_gap_multiplicative(diag14, x_half):
    report = ineq.check_jensen_gap(diag14, power_function(-1), x_half, 1.0, 4.0, variant=2)
    assert values(report) == pytest.approx([1.0, 1.25, E_9_16], abs=1e-9)


def test_jensen_gap_at_identity():
    x = random_unit_vector(2, 1)
    assert values(ineq.check_jensen_gap(identity(2), exp_function(), x, 0.5, 2.0, 1)) == pytest.approx([0, 0, 0], abs=1e-12)
    assert values(ineq.check_jensen_gap(identity(2), exp_function(), x, 0.5, 2.0, 2)) == pytest.approx([1, 1, 1], abs=1e-12)


def test_neg_power_gap(diag14, x_half):
    assert values(ineq.check_neg_power_gap(diag14, x_half, 1.0)) == pytest.approx([1.25, E_9_16], abs=1e-9)
    report = ineq.check_neg_power_gap(identity(2) * 3.0, random_unit_vector(2, 4), 2.0)
    assert values(report) == pytest.approx([1.0, 1.0], abs=1e-12)


def test_neg_power_gap_on_diag12():
    x = QVector(entries=[[1 / math.sqrt(2), 0, 0, 0], [1 / math.sqrt(2), 0, 0, 0]])
    report = ineq.check_neg_power_gap(diag([1.0, 2.0]), x, 2.0)
    # c = 1.5, <ln T^-2> = -ln 2, <T^-1> = 0.75
    assert values(report) == pytest.approx([2.25 * 0.5, math.exp(2 * (1.5 * 0.75 - 1))], abs=1e-12)


def test_mult_jensen(diag14, x_half):
    report = ineq.check_mult_jensen(diag14, power_function(-1), x_half, 1.0, 4.0)
    expected = [1.0, math.cosh(0.6), 1.5625, (math.exp(1.5) + math.exp(-0.375)) / 2]
    assert values(report) == pytest.approx(expected, abs=1e-9)
    assert report.passed


def test_mult_jensen_neg_power_form_matches_general(diag14, x_half):
    general = ineq.check_mult_jensen(diag14, neg_power_function(1.5), x_half, 1.0, 4.0)
    special = ineq.check_mult_jensen_neg_power(diag14, x_half, 1.5)
    assert values(special) == pytest.approx(values(general), rel=1e-12)


def test_mult_jensen_at_identity():
    report = ineq.check_mult_jensen(identity(2), exp_function(), random_unit_vector(2, 2), 0.5, 2.0)
    assert values(report) == pytest.approx([1.0] * 4, abs=1e-12)


def test_gruss_type(diag14, x_half):
    report = ineq.check_gruss_type(diag14, power_function(-1), 1.0, 4.0, x_half)
    assert values(report) == pytest.approx([1.0, 1.0, 1.0, E_9_16], abs=1e-9)
    neg = ineq.check_gruss_neg_power(diag14, x_half, 1.0, 4.0, 1.0)
    assert values(neg) == pytest.approx(values(report), abs=1e-12)


def test_gruss_type_at_m():
    report = ineq.check_gruss_type(identity(2) * 2.0, exp_function(), 2.0, 5.0, random_unit_vector(2, 6))
    assert values(report)[:3] == pytest.approx([1.0, 1.0, 1.0], abs=1e-12)
    assert values(report)[3] >= 1.0


def test_kyfan_scalar():
    report = ineq.check_kyfan_scalar([0.2, 0.4], [0.5, 0.5])
    assert values(report) == pytest.approx([7 / 3, math.sqrt(6)], abs=1e-12)
    with_mean = ineq.check_kyfan_scalar([0.2, 0.4], [0.5, 0.5], include_mean=True)
    assert values(with_mean) == pytest.approx([7 / 3, math.sqrt(6), 2.75], abs=1e-12)
    equal = ineq.check_kyfan_scalar([0.3, 0.3, 0.3], [0.2, 0.3, 0.5])
    assert values(equal)[0] == pytest.approx(values(equal)[1], rel=1e-12)


def test_kyfan_scalar_three_points():
    t = [0.1, 0.3, 0.45]
    report = ineq.check_kyfan_scalar(t, [1 / 3] * 3)
    mean = sum(t) / 3
    geometric = (9.0 * (0.7 / 0.3) * (0.55 / 0.45)) ** (1 / 3)
    assert values(report) == pytest.approx([(1 - mean) / mean, geometric], rel=1e-12)
    assert report.passed


def test_kyfan_scalar_rejects_points_outside_half_interval():
    with pytest.raises(HypothesisError):
        ineq.check_kyfan_scalar([0.2, 0.6], [0.5, 0.5])
    with pytest.raises(HypothesisError):
        ineq.check_kyfan_scalar([0.2, 0.3], [0.7, 0.7])


def test_kyfan_operator_variant_one(x_half):
    T = diag([0.2, 0.4])
    (report,) = ineq.check_kyfan_operator(T, x_half, 0.2, 0.4, 1.0, 1)
    assert values(report) == pytest.approx([7 / 3, math.sqrt(6), 2.75], abs=1e-9)


def test_kyfan_operator_variant_two(x_half):
    T = diag([0.2, 0.4])
    first, second = ineq.check_kyfan_operator(T, x_half, 0.2, 0.4, 1.0, 2)
    assert values(second)[1] == pytest.approx(math.sqrt(6), abs=1e-12)
    assert first.passed and second.passed


def test_kyfan_operator_variant_three(x_half):
    reports = ineq.check_kyfan_operator(diag([0.2, 0.4]), x_half, 0.2, 0.4, 2.0, 3)
    assert [r.theorem for r in reports] == ["kyfan-operator/3-i", "kyfan-operator/3-ii"]
    assert all(r.passed for r in reports)


def test_kyfan_operator_collapses_on_scalar_operator():
    c, r = 0.3, 1.5
    x = random_unit_vector(3, 8)
    expected = ((1 - c) / c) ** r
    (first,) = ineq.check_kyfan_operator(identity(3) * c, x, 0.2, 0.4, r, 1)
    assert values(first) == pytest.approx([expected] * 3, rel=1e-12)


def test_kyfan_operator_rejects_interval_beyond_half(x_half):
    with pytest.raises(HypothesisError, match=r"\(0, 1/2\)"):
        ineq.check_kyfan_operator(diag([0.2, 0.4]), x_half, 0.2, 0.6, 1.0, 1)


def test_literal_exponent_reading_is_diagnostic(x_half):
    T = diag([0.2, 0.4])
    reports = ineq.check_kyfan_operator(T, x_half, 0.2, 0.4, 1.0, 2, diagnostic=True)
    assert len(reports) == 4
    literal = reports[2:]
    assert all(r.diagnostic for r in literal)
    assert not any(r.counts_as_violation for r in literal)
    assert "literal-exponent" in literal[0].theorem


def test_lah_exponent_diagnostic_differs_from_default(diag14, x_half):
    default, _ = ineq.check_lah_log(diag14, power_function(-1), x_half, 1.0, 4.0)
    literal, _ = ineq.lah_exponent_diagnostic(diag14, power_function(-1), x_half, 1.0, 4.0)
    assert values(literal)[1] != pytest.approx(values(default)[1])


def test_hypotheses_are_checked(diag14, x_half):
    f = power_function(2)
    with pytest.raises(HypothesisError, match="unit vector"):
        ineq.check_mond_pecaric(diag14, f, QVector(entries=[[1, 0, 0, 0], [1, 0, 0, 0]]), 1.0, 4.0)
    with pytest.raises(HypothesisError, match="inside"):
        ineq.check_mond_pecaric(diag14, f, x_half, 1.0, 3.0)
    with pytest.raises(HypothesisError, match="convex"):
        ineq.check_mond_pecaric(diag14, log_function(), x_half, 1.0, 4.0)
    with pytest.raises(HypothesisError, match="m < M"):
        ineq.check_mond_pecaric(diag14, f, x_half, 4.0, 1.0)


def test_default_tolerance_policy_flags_violation():
    from qineq.models import ChainReport

    report = ChainReport.evaluate("demo", [("a", 2.0), ("b", 1.0)], tol=1e-9)
    assert not report.passed and report.counts_as_violation
    assert report.slack == -1.0 and report.margin == -0.5
    assert "a <= b" in report.violation
    assert '"pass":false' in report.model_dump_json(by_alias=True)


def test_non_finite_term_ranks_below_every_chain():
    from qineq.models import ChainReport

    for bad in (float("nan"), float("inf")):
        report = ChainReport.evaluate("demo", [("a", 1.0), ("b", bad)], tol=1e-9)
        assert not report.passed and report.counts_as_violation
        assert report.margin == -math.inf and report.slack == -math.inf
        assert report.violation


@given(seeds, st.sampled_from([1, 2, 4, 8]))
def test_mondlog_outer_pair_matches_mond_pecaric(seed, n):
    f = parse_function("neg_power:r=0.5")
    T = random_selfadjoint(n, 0.5, 3.0, seed)
    x = random_unit_vector(n, seed + 1)
    mondlog = values(ineq.check_mondlog(T, f, x, 0.5, 3.0))
    pecaric = values(ineq.check_mond_pecaric(T, f, x, 0.5, 3.0))
    assert [mondlog[0], mondlog[2]] == pytest.approx(pecaric, abs=1e-12)


@given(seeds, st.sampled_from([1, 2, 4]))
def test_chains_invariant_under_unit_scalar(seed, n):
    T = random_selfadjoint(n, 0.5, 3.0, seed)
    x = random_unit_vector(n, seed)
    unit_q = Quaternion(0.3, -0.5, 0.7, 0.1)
    unit_q = unit_q / abs(unit_q)
    f = power_function(-1)
    base = values(ineq.check_mondlog(T, f, x, 0.5, 3.0))
    moved = values(ineq.check_mondlog(T, f, x.scale(unit_q), 0.5, 3.0))
    assert moved == pytest.approx(base, abs=1e-11)


@given(seeds, st.sampled_from([1, 2, 4, 8]))
def test_random_instances_pass(seed, n):
    rng = np.random.default_rng(seed)
    m = float(rng.uniform(0.1, 1.0))
    M = m + float(rng.uniform(0.1, 3.0))
    T = random_selfadjoint(n, m, M, rng)
    x = random_unit_vector(n, rng)
    f = neg_power_function(float(rng.uniform(0.2, 2.0)))
    reports = [
        ineq.check_mond_pecaric(T, f, x, m, M),
        ineq.check_lah_ribaric(T, f, x, m, M),
        ineq.check_mondlog(T, f, x, m, M),
        *ineq.check_lah_log(T, f, x, m, M),
        ineq.check_jensen_gap(T, f, x, m, M, variant=1),
        ineq.check_jensen_gap(T, f, x, m, M, variant=2),
        ineq.check_mult_jensen(T, f, x, m, M),
        ineq.check_gruss_type(T, f, m, M, x),
        ineq.check_holder_mccarthy(T, x, -f.r),
        ineq.check_neg_power_gap(T, x, f.r),
    ]
    assert all(r.passed for r in reports), [(r.theorem, r.violation) for r in reports if not r.passed]


@given(seeds, st.sampled_from([2, 4, 8]))
def test_lah_ribaric_is_tight_on_two_point_spectrum(seed, n):
    rng = np.random.default_rng(seed)
    d = [1.0 if k % 2 == 0 else 4.0 for k in range(n)]
    T = conjugate_diagonal(random_unitary(n, rng), d)
    x = random_unit_vector(n, rng)
    report = ineq.check_lah_ribaric(T, power_function(2), x, 1.0, 4.0)
    assert abs(report.slack) <= 1e-10
