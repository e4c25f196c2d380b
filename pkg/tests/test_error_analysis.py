import math

import numpy as np
import pytest
from pydantic import ValidationError

from fracab.ab2_schemes import integrate
from fracab.error_analysis import (
    abc_remainder_bound,
    abc_stability_bound,
    build_error_report,
    caputo_remainder_bound,
    cf_remainder_bound,
    cf_stability_bound,
    local_defects,
    max_error,
    observed_order,
    stability_gap,
    state_increments,
    trajectory_distance,
)
from fracab.errors import DomainError, OverflowSignal
from fracab.problems import build_problem
from fracab.schema import DerivativeKind, ErrorReport, Trajectory

from .conftest import does_not_raise


def line(values) -> Trajectory:
    return Trajectory.from_points(
        [float(i) for i in range(len(values))], [np.array([v]) for v in values]
    )


def test_caputo_remainder_bound_at_order_one():
    assert caputo_remainder_bound(1.0, 0.1, 1, 1.0) == pytest.approx(2.5e-5)


def test_caputo_remainder_bound_vanishes_without_derivative():
    assert caputo_remainder_bound(0.5, 0.1, 4, 0.0) == 0.0


def test_printed_caputo_remainder_bound_uses_square():
    assert caputo_remainder_bound(1.0, 0.1, 2, 1.0) == pytest.approx(5e-4 / 12.0)
    assert caputo_remainder_bound(
        1.0, 0.1, 2, 1.0, paper_literal=True
    ) == pytest.approx(7e-4 / 12.0)


@pytest.mark.parametrize(
    "alpha, h, n, M, expectation",
    [
        (0.5, 0.0, 1, 1.0, pytest.raises(DomainError)),
        (0.5, 0.1, -1, 1.0, pytest.raises(DomainError)),
        (0.5, 0.1, 1, -1.0, pytest.raises(DomainError)),
        (0.0, 0.1, 1, 1.0, pytest.raises(DomainError)),
        (0.5, 0.1, 0, 1.0, does_not_raise()),
    ],
)
def test_caputo_remainder_bound_domain(alpha, h, n, M, expectation):
    with expectation:
        caputo_remainder_bound(alpha, h, n, M)


def test_cf_remainder_bound():
    assert cf_remainder_bound(0.5, 0.1, 2, 1.0) == pytest.approx(3e-3)
    assert cf_remainder_bound(0.0, 0.1, 2, 1.0) == 0.0


@pytest.mark.parametrize(
    "n, expectation",
    [(20, does_not_raise()), (21, pytest.raises(OverflowSignal))],
)
def test_cf_remainder_bound_factorial_guard(n: int, expectation):
    with expectation:
        cf_remainder_bound(0.5, 0.1, n, 1.0)


def test_abc_remainder_bound():
    assert abc_remainder_bound(1.0, 0.1, 1, 1.0) == pytest.approx(0.003)
    with pytest.raises(DomainError):
        abc_remainder_bound(0.5, 0.1, 0, 1.0)


def test_cf_stability_bound():
    assert cf_stability_bound(0.5, 0.1, 2, 0.2) == pytest.approx(0.10075)


def test_abc_stability_bound():
    assert abc_stability_bound(1.0, 0.1, 1, 1.0, 0.0, 1.0) == pytest.approx(0.35)
    assert abc_stability_bound(0.5, 0.1, 1, 0.0, 0.2, 1.0) == pytest.approx(0.1)


def test_stability_gap_and_increments():
    trajectory = line([0.0, 1.0, 3.0, 6.0])
    gaps = stability_gap(trajectory, lambda t, y: 2.0 * y)
    assert gaps == [(1, 2.0), (2, 4.0), (3, 6.0)]
    assert state_increments(trajectory) == [(0, 1.0), (1, 2.0), (2, 3.0)]


def test_stability_gap_needs_two_points():
    with pytest.raises(DomainError):
        stability_gap(line([1.0]), lambda t, y: y)


def test_constant_source_has_no_gap():
    named = build_problem("cf-linear", DerivativeKind.CaputoFabrizio, 0.5)
    trajectory = integrate(named.problem, 0.5, DerivativeKind.CaputoFabrizio, 0.1, 1.0)
    gaps = stability_gap(trajectory, lambda t, y: np.ones_like(y))
    assert all(gap == 0.0 for _, gap in gaps)


def test_logistic_gaps_and_increments_decay():
    kind = DerivativeKind.Caputo
    named = build_problem("logistic", kind, 0.5)
    trajectory = integrate(named.problem, 0.5, kind, 0.05, 5.0)
    gaps = [gap for _, gap in stability_gap(trajectory, named.problem.rhs)]
    increments = [value for _, value in state_increments(trajectory)]
    assert gaps[-1] < gaps[1]
    assert increments[-1] < increments[1]


def test_max_error():
    trajectory = line([0.0, 1.0, 2.5])
    assert max_error(trajectory, lambda t: np.array([t])) == pytest.approx(0.5)


def test_trajectory_distance():
    assert trajectory_distance(line([0.0, 1.0]), line([0.5, 0.75])) == 0.5
    with pytest.raises(DomainError):
        trajectory_distance(line([0.0, 1.0]), line([0.0, 1.0, 2.0]))


def test_observed_order():
    orders = observed_order([(0.1, 1e-2), (0.05, 2.5e-3), (0.025, 1.25e-3)])
    assert orders == pytest.approx([2.0, 1.0])


@pytest.mark.parametrize(
    "errors_by_h",
    [
        [(0.1, 1e-2)],
        [(0.1, 1e-2), (0.05, 0.0)],
        [(0.1, 1e-2), (0.1, 1e-3)],
        [(0.05, 1e-2), (0.1, 1e-3)],
    ],
)
def test_observed_order_rejects_degenerate_input(errors_by_h):
    with pytest.raises(DomainError):
        observed_order(errors_by_h)


@pytest.mark.parametrize(
    "kind, name",
    [
        (DerivativeKind.CaputoFabrizio, "cf-linear"),
        (DerivativeKind.AtanganaBaleanuCaputo, "abc-power"),
    ],
)
def test_local_defects_vanish_on_exact_linear_solution(kind: DerivativeKind, name: str):
    h = 0.1
    named = build_problem(name, kind, 0.5)
    assert named.exact is not None
    times = [i * h for i in range(11)]
    exact = Trajectory.from_points(times, [named.exact(t) for t in times])
    defects = local_defects(exact, named.problem, 0.5, kind, h)
    assert [n for n, _ in defects] == list(range(1, 10))
    assert max(defect for _, defect in defects) < 1e-13


def test_local_defects_of_printed_update_do_not_vanish():
    h = 0.1
    named = build_problem("cf-linear", DerivativeKind.CaputoFabrizio, 0.5)
    assert named.exact is not None
    times = [i * h for i in range(11)]
    exact = Trajectory.from_points(times, [named.exact(t) for t in times])
    defects = local_defects(
        exact, named.problem, 0.5, DerivativeKind.CaputoFabrizio, h, paper_literal=True
    )
    assert min(defect for n, defect in defects if n >= 2) > 1e-3


def test_build_error_report():
    report = build_error_report([(0.1, 1e-2), (0.05, 2.5e-3)], [(1, 1e-4)])
    assert report.max_error == 2.5e-3
    assert report.observed_orders == pytest.approx([2.0])
    assert report.bound_values == [(1, 1e-4)]


def test_build_error_report_with_single_entry():
    report = build_error_report([(0.1, 1e-2)])
    assert report.observed_orders == []
    with pytest.raises(DomainError):
        build_error_report([])


@pytest.mark.parametrize(
    "fields",
    [
        {"max_error": 1.0, "errors_by_h": [(0.05, 1.0), (0.1, 2.0)]},
        {"max_error": 1.0, "errors_by_h": [(0.1, 2.0), (0.05, 1.0)]},
    ],
)
def test_error_report_validation(fields):
    with pytest.raises(ValidationError):
        ErrorReport(**fields)


def test_bounds_are_finite_below_the_guard():
    assert math.isfinite(cf_stability_bound(0.5, 0.5, 20, 1.0))
