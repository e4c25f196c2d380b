import logging
from typing import Optional

import numpy as np

from fracab.ab2_schemes import resolve_norm, step_count
from fracab.constants import FIXED_POINT_DAMPING, FIXED_POINT_MAX_ITERATIONS
from fracab.errors import DomainError, NonConvergence
from fracab.schema import (
    DerivativeKind,
    Problem,
    ReferenceConfig,
    Trajectory,
    check_order,
)
from fracab.special_functions import reciprocal_gamma

logger = logging.getLogger(__name__)


def _power_increments(p: float, m: np.ndarray) -> np.ndarray:
    """(m+1)^p - m^p for m >= 0, computed without cancellation."""
    m = np.asarray(m, dtype=float)
    safe = np.where(m > 0.0, m, 1.0)
    increments = safe**p * np.expm1(p * np.log1p(1.0 / safe))
    return np.where(m > 0.0, increments, 1.0)


class ProductTrapezoid(object):
    """Product trapezoidal rule for int_0^{t_k} (t_k - tau)^(order-1) phi(tau) dtau.

    phi is replaced by its piecewise linear interpolant on the uniform grid tau_j = j*delta
    and the kernel moments are integrated exactly. order = 1 gives the plain trapezoid rule.
    """

    def __init__(self, order: float, delta: float, size: int):
        self.order = order
        self.delta = delta
        p = order + 1.0
        m = np.arange(size + 1, dtype=float)
        second_differences = np.zeros(size + 1)
        if size >= 1:
            increments = _power_increments(p, m)
            second_differences[1:] = increments[1:] - increments[:-1]
        self._interior = second_differences
        self._scale = delta**order / (order * (order + 1.0))

    def first_weight(self, k: int) -> float:
        beta = self.order
        return self._scale * ((k - 1.0) ** (beta + 1.0) - (k - beta - 1.0) * k**beta)

    @property
    def last_weight(self) -> float:
        return self._scale

    def history(self, k: int, values: np.ndarray) -> np.ndarray:
        """Contribution of the nodes j < k to the integral up to t_k."""
        total = self.first_weight(k) * values[0]
        if k >= 2:
            interior = self._scale * self._interior[k - 1 : 0 : -1]
            total = total + interior @ values[1:k]
        return total


def _solve_volterra(
    problem: Problem,
    order: float,
    memory_scale: float,
    local_scale: float,
    h: float,
    T: float,
    cfg: ReferenceConfig,
) -> Trajectory:
    """Solve y(t) = y0 + local_scale (f(t, y) - f(0, y0)) + memory_scale I(t) on a fine grid.

    I(t) is the order-weighted memory integral of f(tau, y(tau)). The unknown at each fine
    node is resolved by damped fixed point iteration.
    """
    if not h > 0.0:
        raise DomainError(f"step size must be positive, not {h}")
    if T < 2.0 * h:
        raise DomainError(f"T={T} must cover at least two steps of size h={h}")
    n_steps = step_count(h, T)
    size = n_steps * cfg.substeps
    delta = h / cfg.substeps
    rule = ProductTrapezoid(order, delta, size)
    implicit_scale = local_scale + memory_scale * rule.last_weight

    values = np.zeros((size + 1, problem.dimension))
    states = np.zeros((size + 1, problem.dimension))
    states[0] = problem.y0
    values[0] = problem.evaluate(0.0, problem.y0)
    total_iterations = 0
    for k in range(1, size + 1):
        t = k * delta
        known = (
            problem.y0
            - local_scale * values[0]
            + memory_scale * rule.history(k, values)
        )
        y = states[k - 1].copy()
        for iteration in range(1, FIXED_POINT_MAX_ITERATIONS + 1):
            target = known + implicit_scale * problem.evaluate(t, y)
            update = (1.0 - FIXED_POINT_DAMPING) * y + FIXED_POINT_DAMPING * target
            change = float(np.max(np.abs(update - y)))
            y = update
            if change <= cfg.tol * max(1.0, float(np.max(np.abs(y)))):
                break
        else:
            raise NonConvergence(
                f"fixed point iteration at t={t} did not converge"
                f" within {FIXED_POINT_MAX_ITERATIONS} iterations"
            )
        total_iterations += iteration
        states[k] = y
        values[k] = problem.evaluate(t, y)
    logger.debug(
        f"reference solve on {size} fine steps,"
        f" {total_iterations} fixed point iterations"
    )
    sampled = states[:: cfg.substeps]
    return Trajectory(t=h * np.arange(n_steps + 1, dtype=float), y=sampled)


def caputo_reference(
    problem: Problem,
    alpha: float,
    h: float,
    T: float,
    cfg: Optional[ReferenceConfig] = None,
) -> Trajectory:
    """Full-memory solution of y(t) = y0 + 1/Gamma(alpha) int_0^t (t-tau)^(alpha-1) f dtau.
    :return: Trajectory sampled on the grid t_i = i h, i = 0 .. floor(T/h).
    :raises: NonConvergence: If the implicit node equation cannot be resolved.
    """
    alpha = check_order(alpha)
    return _solve_volterra(
        problem, alpha, reciprocal_gamma(alpha), 0.0, h, T, cfg or ReferenceConfig()
    )


def cf_reference(
    problem: Problem,
    alpha: float,
    h: float,
    T: float,
    cfg: Optional[ReferenceConfig] = None,
    norm: Optional[float] = None,
) -> Trajectory:
    """Full-memory solution of the Caputo-Fabrizio integral form
    y(t) = y0 + (1-alpha)/M (f(t, y) - f(0, y0)) + alpha/M int_0^t f dtau.
    """
    alpha = check_order(alpha)
    norm = resolve_norm(DerivativeKind.CaputoFabrizio, alpha, norm)
    return _solve_volterra(
        problem,
        1.0,
        alpha / norm,
        (1.0 - alpha) / norm,
        h,
        T,
        cfg or ReferenceConfig(),
    )


def abc_reference(
    problem: Problem,
    alpha: float,
    h: float,
    T: float,
    cfg: Optional[ReferenceConfig] = None,
    norm: Optional[float] = None,
) -> Trajectory:
    """Full-memory solution of the Atangana-Baleanu-Caputo integral form
    y(t) = y0 + (1-alpha)/B (f(t, y) - f(0, y0))
              + alpha/(B Gamma(alpha)) int_0^t (t-tau)^(alpha-1) f dtau.
    """
    alpha = check_order(alpha)
    norm = resolve_norm(DerivativeKind.AtanganaBaleanuCaputo, alpha, norm)
    return _solve_volterra(
        problem,
        alpha,
        alpha * reciprocal_gamma(alpha) / norm,
        (1.0 - alpha) / norm,
        h,
        T,
        cfg or ReferenceConfig(),
    )


def reference(
    kind: DerivativeKind,
    problem: Problem,
    alpha: float,
    h: float,
    T: float,
    cfg: Optional[ReferenceConfig] = None,
    norm: Optional[float] = None,
) -> Trajectory:
    if kind == DerivativeKind.Caputo:
        return caputo_reference(problem, alpha, h, T, cfg)
    if kind == DerivativeKind.CaputoFabrizio:
        return cf_reference(problem, alpha, h, T, cfg, norm)
    return abc_reference(problem, alpha, h, T, cfg, norm)


def classical_ab2(
    problem: Problem, h: float, T: float, seed: Optional[np.ndarray] = None
) -> Trajectory:
    """Classical two-step Adams-Bashforth, y_{n+1} = y_n + h (3 f_n - f_{n-1}) / 2.
    :param seed: Value of y at t = h. One explicit Euler step is taken when omitted.
    :raises: DomainError: If T < 2h.
    """
    if not h > 0.0:
        raise DomainError(f"step size must be positive, not {h}")
    if T < 2.0 * h:
        raise DomainError(f"T={T} must cover at least two steps of size h={h}")
    n_steps = step_count(h, T)
    f_prev = problem.evaluate(0.0, problem.y0)
    if seed is None:
        y = problem.y0 + h * f_prev
    else:
        y = np.atleast_1d(np.asarray(seed, dtype=float)).copy()
    values = [problem.y0.copy(), y]
    for n in range(1, n_steps):
        f = problem.evaluate(n * h, y)
        y = y + h * (3.0 * f - f_prev) / 2.0
        f_prev = f
        values.append(y)
    return Trajectory(t=h * np.arange(n_steps + 1, dtype=float), y=np.vstack(values))
