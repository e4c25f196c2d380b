import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from fracab.ab2_schemes import iter_states
from fracab.constants import BLOW_UP_THRESHOLD, FIVE_PI
from fracab.errors import DomainError, InstabilityDetected
from fracab.operators import fractional_derivative_terms
from fracab.schema import (
    DerivativeKind,
    DiscrepancyRow,
    ErrorReport,
    FisherConfig,
    ForcingMode,
    Monomial,
    NeumannSide,
    Problem,
    SeedMode,
    Trajectory,
)
from fracab.special_functions import gamma, normalization, reciprocal_gamma

logger = logging.getLogger(__name__)

Space = Union[float, np.ndarray]

_DIFFUSION_EIGENVALUE = FIVE_PI**2


def _result(value: np.ndarray) -> Space:
    if np.ndim(value) == 0:
        return float(value)
    return value


def exact_solution(x: Space, t: float, tau: float) -> Space:
    """Manufactured solution u(x, t) = (t^tau + 1) cos(5 pi x) + t^4 x^2 + t^3 x."""
    x = np.asarray(x, dtype=float)
    return _result((t**tau + 1.0) * np.cos(FIVE_PI * x) + t**4 * x**2 + t**3 * x)


def exact_gradient(x: Space, t: float, tau: float) -> Space:
    x = np.asarray(x, dtype=float)
    return _result(
        -FIVE_PI * (t**tau + 1.0) * np.sin(FIVE_PI * x) + 2.0 * t**4 * x + t**3
    )


def exact_second_derivative(x: Space, t: float, tau: float) -> Space:
    x = np.asarray(x, dtype=float)
    return _result(
        -_DIFFUSION_EIGENVALUE * (t**tau + 1.0) * np.cos(FIVE_PI * x) + 2.0 * t**4
    )


def exact_neumann(side: NeumannSide, t: float, tau: float, L: float = 1.0) -> float:
    """Neumann data u_x at x = 0 (t^3) or at x = L (2 t^4 + t^3 when L = 1)."""
    if side == NeumannSide.Left:
        return t**3
    return float(exact_gradient(L, t, tau))


def laplacian_neumann(
    field: np.ndarray, dx: float, g_left: float, g_right: float
) -> np.ndarray:
    """Second-order central difference of a nodal field with Neumann closure.
    The ghost values u_{-1} = u_1 - 2 dx g_left and u_{N+1} = u_{N-1} + 2 dx g_right
    impose the boundary slopes.
    :raises: DomainError: If the field has fewer than three nodes.
    """
    u = np.asarray(field, dtype=float)
    if u.ndim != 1 or u.shape[0] < 3:
        raise DomainError(f"a field needs at least three nodes, got shape {u.shape}")
    result = np.empty_like(u)
    result[1:-1] = u[2:] - 2.0 * u[1:-1] + u[:-2]
    result[0] = 2.0 * (u[1] - u[0]) - 2.0 * dx * g_left
    result[-1] = 2.0 * (u[-2] - u[-1]) + 2.0 * dx * g_right
    return result / dx**2


def _norm(cfg: FisherConfig) -> float:
    return normalization(cfg.alpha, cfg.resolved_norm_variant)


def time_derivatives(t: float, cfg: FisherConfig) -> np.ndarray:
    """Fractional derivatives of the time parts t^tau, t^4, t^3 of the exact solution,
    one per spatial basis function cos(5 pi x), x^2, x.
    """
    monomials = [
        Monomial(coefficient=1.0, exponent=cfg.tau),
        Monomial(coefficient=1.0, exponent=4.0),
        Monomial(coefficient=1.0, exponent=3.0),
    ]
    return fractional_derivative_terms(cfg.kind, cfg.alpha, monomials, t, _norm(cfg))


def _literal_forcing(x: np.ndarray, t: float, cfg: FisherConfig) -> np.ndarray:
    tau, alpha = cfg.tau, cfg.alpha
    cos = np.cos(FIVE_PI * x)
    growth = t**tau + 1.0
    bracket = (
        gamma(tau + 1.0) * reciprocal_gamma(tau + 1.0 - alpha) * t ** (tau - alpha)
        + _DIFFUSION_EIGENVALUE * growth
        - growth
        + (t ** (tau + 1.0)) ** 2 * cos
        + 2.0 * t**3 * growth * x
        + 2.0 * t**4 * t ** (tau + 1.0) * x**2
    )
    return (
        cos * bracket
        + gamma(5.0) * reciprocal_gamma(5.0 - alpha) * t ** (4.0 - alpha) * x**2
        + gamma(4.0) * reciprocal_gamma(4.0 - alpha) * t ** (3.0 - alpha) * x
        - 2.0 * t**4
        - x**2 * t**4
        - t**3 * x
        + t**6 * x**2
        + t**8 * x**4
        + 2.0 * t**7 * x**3
    )


def _consistent_forcing(x: np.ndarray, t: float, cfg: FisherConfig) -> np.ndarray:
    d_cos, d_square, d_linear = time_derivatives(t, cfg)
    fractional = d_cos * np.cos(FIVE_PI * x) + d_square * x**2 + d_linear * x
    u = np.asarray(exact_solution(x, t, cfg.tau))
    u_xx = np.asarray(exact_second_derivative(x, t, cfg.tau))
    return fractional - cfg.delta * u_xx - u * (1.0 - u)


def forcing(x: Space, t: float, cfg: FisherConfig) -> Space:
    """Source term f(x, t) of the manufactured Fisher problem.
    ConsistentManufactured builds f = D^alpha u - delta u_xx - u (1 - u) for the
    configured kernel and diffusion; PaperLiteral evaluates the published expression,
    which assumes delta = 1 and the Caputo derivative.
    :raises: DomainError: If t < 0.
    :raises: NonConvergence: Propagated from the kernel quadrature.
    """
    if t < 0.0:
        raise DomainError(f"time must be nonnegative, not {t}")
    nodes = np.asarray(x, dtype=float)
    if cfg.forcing_mode == ForcingMode.PaperLiteral:
        return _result(_literal_forcing(nodes, t, cfg))
    return _result(_consistent_forcing(nodes, t, cfg))


def forcing_discrepancy(
    cfg: FisherConfig, xs: Sequence[float], ts: Sequence[float]
) -> List[DiscrepancyRow]:
    """Tabulate the published forcing against the consistent one at sample points."""
    literal = cfg.model_copy(update={"forcing_mode": ForcingMode.PaperLiteral})
    consistent = cfg.model_copy(
        update={"forcing_mode": ForcingMode.ConsistentManufactured}
    )
    nodes = np.asarray(xs, dtype=float)
    rows: List[DiscrepancyRow] = []
    for t in ts:
        literal_values = np.atleast_1d(forcing(nodes, t, literal))
        consistent_values = np.atleast_1d(forcing(nodes, t, consistent))
        rows.extend(
            DiscrepancyRow(x=x, t=float(t), literal=a, consistent=b)
            for x, a, b in zip(
                nodes.tolist(), literal_values.tolist(), consistent_values.tolist()
            )
        )
    return rows


def grid(cfg: FisherConfig) -> np.ndarray:
    return np.linspace(0.0, cfg.L, cfg.N + 1)


def semidiscrete_rhs(t: float, field: np.ndarray, cfg: FisherConfig) -> np.ndarray:
    """delta * laplacian + u (1 - u) + f on the grid, with exact Neumann data."""
    x = grid(cfg)
    g_left = exact_neumann(NeumannSide.Left, t, cfg.tau, cfg.L)
    g_right = exact_neumann(NeumannSide.Right, t, cfg.tau, cfg.L)
    diffusion = laplacian_neumann(field, cfg.dx, g_left, g_right)
    source = np.asarray(forcing(x, t, cfg))
    return cfg.delta * diffusion + field * (1.0 - field) + source


def semidiscrete_residual(t: float, cfg: FisherConfig) -> np.ndarray:
    """Residual D^alpha u - (delta lap_h u + u (1 - u) + f) of the exact solution.
    With consistent forcing it reduces to the spatial truncation error
    delta (u_xx - lap_h u).
    """
    x = grid(cfg)
    d_cos, d_square, d_linear = time_derivatives(t, cfg)
    fractional = d_cos * np.cos(FIVE_PI * x) + d_square * x**2 + d_linear * x
    exact = np.asarray(exact_solution(x, t, cfg.tau))
    return fractional - semidiscrete_rhs(t, exact, cfg)


def _check_blow_up(t: float, field: np.ndarray):
    if not np.all(np.isfinite(field)) or np.max(np.abs(field)) > BLOW_UP_THRESHOLD:
        raise InstabilityDetected(
            f"solution exceeded {BLOW_UP_THRESHOLD:g} in magnitude at t={t}"
        )


def solve_fisher(cfg: FisherConfig) -> Tuple[Trajectory, ErrorReport]:
    """Method of lines solution of the fractional Fisher equation
    D^alpha u = delta u_xx + u (1 - u) + f with the manufactured exact solution.
    :return: The nodal trajectory on t_i = i dt and its max-norm error report.
    :raises: InstabilityDetected: If a nodal value exceeds the blow-up threshold.
    """
    x = grid(cfg)
    logger.info(
        f"fisher run: {cfg.kind.value}, alpha={cfg.alpha}, delta={cfg.delta},"
        f" N={cfg.N}, dx={cfg.dx:g}, dt={cfg.dt:g}, T={cfg.T:g},"
        f" stability ceiling={cfg.stability_ceiling:.3e}"
    )
    if cfg.dt > cfg.stability_ceiling:
        logger.warning(
            f"dt={cfg.dt:g} exceeds the explicit stability ceiling"
            f" {cfg.stability_ceiling:.3e} for dx={cfg.dx:g}, delta={cfg.delta:g}"
        )
    if cfg.forcing_mode == ForcingMode.PaperLiteral and (
        cfg.delta != 1.0 or cfg.kind != DerivativeKind.Caputo
    ):
        logger.warning(
            "the published forcing assumes delta = 1 and the Caputo derivative,"
            " errors are not measured against a consistent source"
        )

    def rhs(t: float, field: np.ndarray) -> np.ndarray:
        return semidiscrete_rhs(t, field, cfg)

    problem = Problem(rhs=rhs, y0=exact_solution(x, 0.0, cfg.tau))
    seed: Optional[np.ndarray] = None
    if cfg.seed_mode == SeedMode.ExactSeed:
        seed = np.asarray(exact_solution(x, cfg.dt, cfg.tau))
    norm = None if cfg.kind == DerivativeKind.Caputo else _norm(cfg)

    times = [0.0]
    values = [problem.y0.copy()]
    error = 0.0
    for state in iter_states(
        problem,
        cfg.alpha,
        cfg.kind,
        cfg.dt,
        cfg.T,
        norm,
        cfg.seed_mode,
        seed,
        cfg.paper_literal,
    ):
        _check_blow_up(state.t, state.y)
        times.append(state.t)
        values.append(state.y)
        exact = np.asarray(exact_solution(x, state.t, cfg.tau))
        error = max(error, float(np.max(np.abs(state.y - exact))))
    trajectory = Trajectory.from_points(times, values)
    logger.info(f"fisher run finished, max error {error:.6e}")
    return trajectory, ErrorReport(max_error=error, errors_by_h=[(cfg.dt, error)])


def residual_bound(t: float, cfg: FisherConfig) -> float:
    """Spatial truncation bound delta * 1.1 (25 pi^2)^2 (t^tau + 1) / 12 * dx^2."""
    return (
        cfg.delta
        * 1.1
        * _DIFFUSION_EIGENVALUE**2
        * (t**cfg.tau + 1.0)
        / 12.0
        * cfg.dx**2
    )
