import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from fracab.ab2_schemes import resolve_norm, weights
from fracab.constants import FACTORIAL_GUARD
from fracab.errors import DomainError, OverflowSignal
from fracab.schema import (
    DerivativeKind,
    ErrorReport,
    Problem,
    Trajectory,
    check_order,
    check_unit_interval,
)
from fracab.special_functions import gamma

RightHandSide = Callable[[float, np.ndarray], np.ndarray]
ExactSolution = Callable[[float], np.ndarray]


def _check_bound_inputs(h: float, n: int, M: float):
    if not h > 0.0:
        raise DomainError(f"step size must be positive, not {h}")
    if n < 0:
        raise DomainError(f"step index must be nonnegative, not {n}")
    if M < 0.0:
        raise DomainError(f"derivative bound M must be nonnegative, not {M}")


def _check_factorial(n: int):
    if n > FACTORIAL_GUARD:
        raise OverflowSignal(
            f"factorial bound requested for n={n},"
            f" only n <= {FACTORIAL_GUARD} is supported"
        )


def caputo_remainder_bound(
    alpha: float, h: float, n: int, M: float, paper_literal: bool = False
) -> float:
    """Local remainder bound of the Caputo scheme,
    h^(3+alpha) M ((n+1)^alpha + n^alpha) / (12 Gamma(alpha+1)).
    :param M: Bound on the third derivative of the right-hand side.
    :param paper_literal: Use n^2 in place of n^alpha, as in the printed statement.
    """
    alpha = check_order(alpha)
    _check_bound_inputs(h, n, M)
    second = float(n) ** 2 if paper_literal else float(n) ** alpha
    return h ** (3.0 + alpha) * M * ((n + 1.0) ** alpha + second) / (
        12.0 * gamma(alpha + 1.0)
    )


def cf_remainder_bound(
    alpha: float, h: float, n: int, M: float, norm: float = 1.0
) -> float:
    """Remainder bound of the Caputo-Fabrizio scheme, (alpha/norm) (n+1)! h^(n+1) M.
    The bound grows factorially with n and is a diagnostic only.
    :raises: OverflowSignal: If n exceeds the factorial guard.
    """
    alpha = check_unit_interval(alpha)
    _check_bound_inputs(h, n, M)
    _check_factorial(n)
    return alpha / norm * math.factorial(n + 1) * h ** (n + 1) * M


def abc_remainder_bound(alpha: float, h: float, n: int, M: float) -> float:
    """Remainder bound of the Atangana-Baleanu-Caputo scheme,
    M (n! h^(n+1) t_{n+1}^alpha + (n-1)! h^n t_n^alpha) / (4 alpha).
    """
    alpha = check_order(alpha)
    _check_bound_inputs(h, n, M)
    if n < 1:
        raise DomainError(f"the bound needs n >= 1, not {n}")
    _check_factorial(n)
    t_next, t_curr = (n + 1) * h, n * h
    return (
        M
        * (
            math.factorial(n) * h ** (n + 1) * t_next**alpha
            + math.factorial(n - 1) * h**n * t_curr**alpha
        )
        / (4.0 * alpha)
    )


def cf_stability_bound(
    alpha: float, h: float, n: int, gap: float, norm: float = 1.0
) -> float:
    """Bound on |y_{n+1} - y_n| of the Caputo-Fabrizio scheme given the rhs gap at n,
    (1-alpha)/norm gap + alpha h^(n+1) (n+1)! / (4 norm).
    """
    alpha = check_unit_interval(alpha)
    _check_bound_inputs(h, n, 0.0)
    _check_factorial(n)
    return (1.0 - alpha) / norm * gap + alpha * h ** (n + 1) * math.factorial(
        n + 1
    ) / (4.0 * norm)


def abc_stability_bound(
    alpha: float, h: float, n: int, M: float, gap: float, norm: float
) -> float:
    """Bound on |y_{n+1} - y_n| of the Atangana-Baleanu-Caputo scheme,
    M n! h^n / (4 alpha) (t_{n+1}^alpha (n+1)/h + t_n^alpha/h^2) + (1-alpha)/norm gap.
    :param M: Bound on |f| over [0, t_{n+1}].
    """
    alpha = check_order(alpha)
    _check_bound_inputs(h, n, M)
    _check_factorial(n)
    t_next, t_curr = (n + 1) * h, n * h
    memory = (
        M
        * math.factorial(n)
        * h**n
        / (4.0 * alpha)
        * (t_next**alpha * (n + 1) / h + t_curr**alpha / h**2)
    )
    return memory + (1.0 - alpha) / norm * gap


def stability_gap(traj: Trajectory, rhs: RightHandSide) -> List[Tuple[int, float]]:
    """Successive right-hand side gaps (n, |f_n - f_{n-1}|_inf) along a trajectory."""
    if len(traj) < 2:
        raise DomainError("a stability gap needs at least two trajectory points")
    values = [
        np.atleast_1d(np.asarray(rhs(t, y), dtype=float)) for t, y in traj.points()
    ]
    return [
        (n, float(np.max(np.abs(values[n] - values[n - 1]))))
        for n in range(1, len(values))
    ]


def state_increments(traj: Trajectory) -> List[Tuple[int, float]]:
    """Successive state increments (n, |y_{n+1} - y_n|_inf)."""
    differences = np.max(np.abs(np.diff(traj.y, axis=0)), axis=1)
    return [(n, float(value)) for n, value in enumerate(differences)]


def max_error(traj: Trajectory, exact: ExactSolution) -> float:
    """Maximum over the nodes of the max-norm difference to the exact solution."""
    return max(
        float(np.max(np.abs(y - np.atleast_1d(np.asarray(exact(t), dtype=float)))))
        for t, y in traj.points()
    )


def trajectory_distance(first: Trajectory, second: Trajectory) -> float:
    """Max-norm distance of two trajectories sampled on the same nodes."""
    if first.y.shape != second.y.shape:
        raise DomainError(
            f"trajectories of shapes {first.y.shape} and {second.y.shape} differ"
        )
    return float(np.max(np.abs(first.y - second.y)))


def observed_order(errors_by_h: Sequence[Tuple[float, float]]) -> List[float]:
    """Experimental orders of convergence log(e_i/e_{i+1}) / log(h_i/h_{i+1}).
    :raises: DomainError: If there are fewer than two entries, the steps do not decrease
                          or an error is not positive.
    """
    if len(errors_by_h) < 2:
        raise DomainError("an observed order needs at least two (h, error) pairs")
    for h, error in errors_by_h:
        if not error > 0.0:
            raise DomainError(f"errors must be positive, got {error} at h={h}")
    orders = []
    for (h_coarse, e_coarse), (h_fine, e_fine) in zip(errors_by_h, errors_by_h[1:]):
        if not h_fine < h_coarse:
            raise DomainError(f"steps must decrease strictly, got {h_coarse}, {h_fine}")
        orders.append(math.log(e_coarse / e_fine) / math.log(h_coarse / h_fine))
    return orders


def local_defects(
    reference: Trajectory,
    problem: Problem,
    alpha: float,
    kind: DerivativeKind,
    h: float,
    norm: Optional[float] = None,
    paper_literal: bool = False,
) -> List[Tuple[int, float]]:
    """Per-step defect of the two-step update against a reference trajectory,
    |y(t_{n+1}) - y(t_n) - c_curr f(t_n, y(t_n)) - c_prev f(t_{n-1}, y(t_{n-1}))|.
    :param reference: Trajectory sampled on t_i = i h.
    """
    norm = resolve_norm(kind, alpha, norm)
    points = list(reference.points())
    values = [problem.evaluate(t, y) for t, y in points]
    defects = []
    for n in range(1, len(points) - 1):
        w = weights(kind, alpha, h, n, norm, paper_literal)
        predicted = points[n][1] + w.c_curr * values[n] + w.c_prev * values[n - 1]
        defects.append((n, float(np.max(np.abs(points[n + 1][1] - predicted)))))
    return defects


def build_error_report(
    errors_by_h: Sequence[Tuple[float, float]],
    bound_values: Sequence[Tuple[int, float]] = (),
) -> ErrorReport:
    """Assemble a convergence report, reporting the error of the finest step as max_error."""
    if not errors_by_h:
        raise DomainError("a convergence report needs at least one (h, error) pair")
    orders = observed_order(errors_by_h) if len(errors_by_h) >= 2 else []
    return ErrorReport(
        max_error=errors_by_h[-1][1],
        errors_by_h=list(errors_by_h),
        observed_orders=orders,
        bound_values=list(bound_values),
    )
