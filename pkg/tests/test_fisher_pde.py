import logging
import math

import numpy as np
import pytest

from fracab.errors import DomainError, InstabilityDetected
from fracab.fisher_pde import (
    exact_gradient,
    exact_neumann,
    exact_second_derivative,
    exact_solution,
    forcing,
    forcing_discrepancy,
    grid,
    laplacian_neumann,
    residual_bound,
    semidiscrete_residual,
    solve_fisher,
    time_derivatives,
)
from fracab.schema import (
    DerivativeKind,
    FisherConfig,
    ForcingMode,
    NeumannSide,
    NormalizationVariant,
)

FIVE_PI = 5.0 * math.pi


def make_config(**overrides) -> FisherConfig:
    fields = dict(delta=1.0, tau=1.0, alpha=0.5, N=20, dt=0.01, T=1.0)
    fields.update(overrides)
    return FisherConfig(**fields)


def literal_minus_consistent(x: np.ndarray, t: float, tau: float) -> np.ndarray:
    cos = np.cos(FIVE_PI * x)
    growth = t**tau + 1.0
    shifted = t ** (tau + 1.0)
    squares = cos**2 * (shifted**2 - growth**2)
    return squares + 2.0 * t**4 * x**2 * cos * (shifted - growth)


@pytest.mark.parametrize(
    "x, t, tau, expected",
    [
        (0.0, 0.0, 1.0, 1.0),
        (1.0, 1.0, 1.0, 0.0),
        (0.1, 2.0, 1.0, 16.0 * 0.01 + 8.0 * 0.1),
        (0.2, 1.0, 2.0, 2.0 * math.cos(math.pi) + 0.04 + 0.2),
    ],
)
def test_exact_solution(x: float, t: float, tau: float, expected: float):
    assert exact_solution(x, t, tau) == pytest.approx(expected, abs=1e-12)


def test_exact_solution_is_vectorized():
    x = np.linspace(0.0, 1.0, 5)
    values = exact_solution(x, 0.5, 1.0)
    assert isinstance(values, np.ndarray)
    assert values.shape == (5,)


def test_exact_derivatives_match_finite_differences():
    x, t, tau, eps = 0.37, 0.8, 1.5, 1e-5
    gradient = (exact_solution(x + eps, t, tau) - exact_solution(x - eps, t, tau)) / (
        2.0 * eps
    )
    assert exact_gradient(x, t, tau) == pytest.approx(gradient, rel=1e-7)
    curvature = (
        exact_gradient(x + eps, t, tau) - exact_gradient(x - eps, t, tau)
    ) / (2.0 * eps)
    assert exact_second_derivative(x, t, tau) == pytest.approx(curvature, rel=1e-7)


def test_exact_neumann():
    assert exact_neumann(NeumannSide.Left, 2.0, 1.0) == 8.0
    assert exact_neumann(NeumannSide.Right, 1.0, 1.0) == pytest.approx(3.0, abs=1e-12)


def test_laplacian_neumann_is_exact_for_quadratics():
    x = np.linspace(0.0, 1.0, 5)
    result = laplacian_neumann(x**2, 0.25, 0.0, 2.0)
    np.testing.assert_allclose(result, 2.0, atol=1e-10)


def test_laplacian_neumann_of_constant_field_with_zero_flux():
    result = laplacian_neumann(np.full(6, 3.0), 0.2, 0.0, 0.0)
    np.testing.assert_array_equal(result, np.zeros(6))


def test_laplacian_neumann_rejects_short_field():
    with pytest.raises(DomainError):
        laplacian_neumann(np.zeros(2), 0.5, 0.0, 0.0)


@pytest.mark.parametrize("t", [0.3, 0.7, 1.0])
def test_literal_forcing_differs_by_the_dropped_square_terms(t: float):
    cfg = make_config()
    x = np.linspace(0.0, 1.0, 11)
    literal_cfg = cfg.model_copy(update={"forcing_mode": ForcingMode.PaperLiteral})
    literal = forcing(x, t, literal_cfg)
    consistent = forcing(x, t, cfg)
    np.testing.assert_allclose(
        literal - consistent, literal_minus_consistent(x, t, 1.0), atol=1e-9
    )


def test_forcing_at_initial_time():
    cfg = make_config()
    x = np.linspace(0.0, 1.0, 7)
    cos = np.cos(FIVE_PI * x)
    eigenvalue = FIVE_PI**2
    np.testing.assert_allclose(
        forcing(x, 0.0, cfg), eigenvalue * cos - cos + cos**2, atol=1e-9
    )
    literal = cfg.model_copy(update={"forcing_mode": ForcingMode.PaperLiteral})
    np.testing.assert_allclose(
        forcing(x, 0.0, literal), eigenvalue * cos - cos, atol=1e-9
    )


def test_forcing_rejects_negative_time():
    with pytest.raises(DomainError):
        forcing(0.5, -0.1, make_config())


def test_forcing_discrepancy_rows():
    cfg = make_config()
    rows = forcing_discrepancy(cfg, [0.0, 0.5, 1.0], [0.5, 1.0])
    assert len(rows) == 6
    assert [(row.x, row.t) for row in rows[:3]] == [(0.0, 0.5), (0.5, 0.5), (1.0, 0.5)]
    for row in rows:
        expected = literal_minus_consistent(np.array([row.x]), row.t, 1.0)[0]
        assert row.difference == pytest.approx(expected, abs=1e-9)


def test_caputo_fabrizio_time_derivative_of_linear_part():
    cfg = make_config(
        kind=DerivativeKind.CaputoFabrizio, norm_variant=NormalizationVariant.Unit
    )
    t = 0.8
    assert time_derivatives(t, cfg)[0] == pytest.approx(
        2.0 * (1.0 - math.exp(-t)), abs=1e-9
    )


def test_grid():
    cfg = make_config(N=4, L=2.0)
    np.testing.assert_allclose(grid(cfg), [0.0, 0.5, 1.0, 1.5, 2.0])
    assert cfg.dx == 0.5


def test_semidiscrete_residual_is_second_order_in_space():
    t = 0.5
    residuals = []
    for n in [50, 100, 200]:
        cfg = make_config(N=n, dt=0.01, T=0.5)
        residual = float(np.max(np.abs(semidiscrete_residual(t, cfg))))
        assert residual <= residual_bound(t, cfg)
        residuals.append(residual)
    for coarse, fine in zip(residuals, residuals[1:]):
        assert coarse / fine == pytest.approx(4.0, rel=0.15)


@pytest.mark.parametrize(
    "kind", [DerivativeKind.CaputoFabrizio, DerivativeKind.AtanganaBaleanuCaputo]
)
def test_kinds_coincide_at_order_one(kind: DerivativeKind):
    base = make_config(alpha=1.0, N=8, delta=0.1, dt=0.01, T=0.1)
    caputo, _ = solve_fisher(base)
    other, _ = solve_fisher(base.model_copy(update={"kind": kind}))
    np.testing.assert_allclose(other.y, caputo.y, rtol=1e-10, atol=1e-12)


def test_time_error_decreases_without_diffusion():
    errors = []
    for dt in [0.02, 0.01]:
        cfg = make_config(alpha=1.0, delta=0.0, N=8, dt=dt, T=0.2)
        _, report = solve_fisher(cfg)
        errors.append(report.max_error)
    assert errors[1] < errors[0] / 2.0


def test_reaction_only_fractional_run_blows_up():
    cfg = make_config(alpha=0.5, delta=0.0, N=4, dt=0.02, T=1.0)
    with pytest.raises(InstabilityDetected):
        solve_fisher(cfg)


def test_solve_fisher_trajectory_and_report():
    cfg = make_config(delta=0.01, N=8, dt=0.01, T=0.1)
    trajectory, report = solve_fisher(cfg)
    assert len(trajectory) == 11
    assert trajectory.y.shape == (11, 9)
    assert trajectory.t[-1] == pytest.approx(0.1)
    np.testing.assert_allclose(trajectory.y[1], exact_solution(grid(cfg), 0.01, 1.0))
    errors = [
        np.max(np.abs(y - exact_solution(grid(cfg), t, 1.0)))
        for t, y in trajectory.points()
    ]
    assert report.max_error == pytest.approx(max(errors))
    assert report.errors_by_h == [(0.01, report.max_error)]
    assert 0.0 < report.max_error < 1.0


def test_explicit_instability_is_detected(caplog):
    cfg = make_config(alpha=1.0, delta=10.0, N=100, dt=0.01, T=0.1)
    with caplog.at_level(logging.WARNING, logger="fracab"):
        with pytest.raises(InstabilityDetected):
            solve_fisher(cfg)
    assert "stability ceiling" in caplog.text


def test_literal_forcing_outside_its_setting_warns(caplog):
    cfg = make_config(
        alpha=1.0,
        N=8,
        delta=0.1,
        dt=0.01,
        T=0.05,
        forcing_mode=ForcingMode.PaperLiteral,
    )
    with caplog.at_level(logging.WARNING, logger="fracab"):
        solve_fisher(cfg)
    assert "published forcing" in caplog.text
