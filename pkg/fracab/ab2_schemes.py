import logging
import math
from functools import lru_cache
from typing import Generator, Optional, Tuple

import numpy as np

from fracab.errors import DomainError
from fracab.schema import (
    DerivativeKind,
    Problem,
    SeedMode,
    StepperState,
    StepWeights,
    Trajectory,
    check_order,
    check_unit_interval,
    default_norm_variant,
)
from fracab.special_functions import gamma, normalization, reciprocal_gamma

logger = logging.getLogger(__name__)


def _power_increment(p: float, n: int) -> float:
    """(n+1)^p - n^p without the cancellation of the direct difference."""
    if n == 0:
        return 1.0
    return n**p * math.expm1(p * math.log1p(1.0 / n))


def _check_step(h: float, n: int):
    if not h > 0.0:
        raise DomainError(f"step size must be positive, not {h}")
    if n < 1:
        raise DomainError(f"two-step weights need n >= 1, not {n}")


def caputo_brackets(alpha: float, h: float, n: int) -> Tuple[float, float]:
    """Gamma-free brackets (B_n, C_n) of the Caputo two-step update.

    B_n and C_n are the kernel integrals of the Lagrange basis attached to f_n and
    f_{n-1}, differenced between t_{n+1} and t_n and divided by h, so that the Caputo
    weights are (B_n/Gamma(alpha), -C_n/Gamma(alpha)).
    """
    alpha = check_order(alpha)
    _check_step(h, n)
    head = (n + 1.0) ** alpha / alpha
    integral_increment = _power_increment(alpha + 1.0, n) / (alpha + 1.0)
    scale = h**alpha
    b = head + _power_increment(alpha, n) / alpha - integral_increment
    c = head - integral_increment
    return scale * b, scale * c


def _printed_caputo_brackets(alpha: float, h: float, n: int) -> Tuple[float, float]:
    t_next, t_curr = (n + 1) * h, n * h
    b = (
        2.0 * h * t_next**alpha / alpha
        - t_next ** (alpha + 1.0) / (alpha + 1.0)
        + h * t_curr**alpha / alpha
        - t_curr ** (alpha + 1.0) / alpha
    )
    c = (
        h * t_next**alpha / alpha
        - t_next ** (alpha + 1.0) / (alpha + 1.0)
        + t_curr**alpha / (alpha + 1.0)
    )
    return b / h, c / h


def caputo_weights(
    alpha: float, h: float, n: int, paper_literal: bool = False
) -> StepWeights:
    """Two-step weights of the Caputo scheme at step n.
    :param paper_literal: Evaluate the update exactly as it is printed in the original
                          derivation (kept for comparison runs, it does not reduce to the
                          classical method at alpha = 1).
    """
    alpha = check_order(alpha)
    _check_step(h, n)
    inverse_gamma = reciprocal_gamma(alpha)
    if paper_literal:
        b, c = _printed_caputo_brackets(alpha, h, n)
        return StepWeights(c_curr=b * inverse_gamma, c_prev=c * inverse_gamma)
    b, c = caputo_brackets(alpha, h, n)
    return StepWeights(c_curr=b * inverse_gamma, c_prev=-c * inverse_gamma)


@lru_cache(maxsize=256)
def cf_weights(
    alpha: float, h: float, norm: float = 1.0, paper_literal: bool = False
) -> StepWeights:
    """Two-step weights of the Caputo-Fabrizio scheme, the same for every step.
    :param alpha: Fractional order in [0, 1].
    :param norm: Value of the normalization function M(alpha).
    :param paper_literal: Use the printed "+" sign in front of the f_{n-1} weight.
    """
    alpha = check_unit_interval(alpha)
    if not norm > 0.0:
        raise DomainError(f"normalization must be positive, not {norm}")
    local = (1.0 - alpha) / norm
    previous = local + alpha * h / (2.0 * norm)
    return StepWeights(
        c_curr=local + 3.0 * alpha * h / (2.0 * norm),
        c_prev=previous if paper_literal else -previous,
    )


def _printed_abc_weights(alpha: float, h: float, n: int, norm: float) -> StepWeights:
    t_next, t_curr = (n + 1) * h, n * h
    inverse_gamma = reciprocal_gamma(alpha)
    next_bracket = h * t_next**alpha / alpha - t_next ** (alpha + 1.0) / (alpha + 1.0)
    curr_bracket = h * t_curr**alpha / alpha - t_curr ** (alpha + 1.0) / (alpha + 1.0)
    c_curr = (
        (1.0 - alpha) / norm
        + alpha / (norm * h) * (next_bracket + h * t_next**alpha / alpha)
        - alpha * inverse_gamma / (norm * h) * curr_bracket
    )
    dangling = t_curr ** (alpha + 1.0) * inverse_gamma / (h * norm)
    c_prev = (alpha - 1.0) / norm - alpha * inverse_gamma / (h * norm) * (
        next_bracket + dangling
    )
    return StepWeights(c_curr=c_curr, c_prev=c_prev)


def abc_weights(
    alpha: float, h: float, n: int, norm: float, paper_literal: bool = False
) -> StepWeights:
    """Two-step weights of the Atangana-Baleanu-Caputo scheme at step n.
    :param alpha: Fractional order in [0, 1].
    :param norm: Value of the normalization function B(alpha).
    :param paper_literal: Evaluate the printed update, reading its dangling t^(alpha+1)
                          as t_n^(alpha+1).
    """
    alpha = check_unit_interval(alpha)
    _check_step(h, n)
    if not norm > 0.0:
        raise DomainError(f"normalization must be positive, not {norm}")
    local = (1.0 - alpha) / norm
    if alpha == 0.0:
        return StepWeights(c_curr=local, c_prev=-local)
    if paper_literal:
        return _printed_abc_weights(alpha, h, n, norm)
    b, c = caputo_brackets(alpha, h, n)
    memory = alpha * reciprocal_gamma(alpha) / norm
    return StepWeights(c_curr=local + memory * b, c_prev=-(local + memory * c))


def resolve_norm(
    kind: DerivativeKind, alpha: float, norm: Optional[float] = None
) -> float:
    if norm is not None:
        return norm
    return normalization(alpha, default_norm_variant(kind))


def weights(
    kind: DerivativeKind,
    alpha: float,
    h: float,
    n: int,
    norm: float = 1.0,
    paper_literal: bool = False,
) -> StepWeights:
    if kind == DerivativeKind.Caputo:
        return caputo_weights(alpha, h, n, paper_literal)
    if kind == DerivativeKind.CaputoFabrizio:
        _check_step(h, n)
        return cf_weights(alpha, h, norm, paper_literal)
    return abc_weights(alpha, h, n, norm, paper_literal)


def bootstrap_weight(
    kind: DerivativeKind, alpha: float, h: float, norm: float
) -> float:
    """One-step rectangle weight of the kernel's integral form, used to predict y_1."""
    if kind == DerivativeKind.Caputo:
        return h**alpha / gamma(alpha + 1.0)
    local = (1.0 - alpha) / norm
    if kind == DerivativeKind.CaputoFabrizio:
        return local + alpha * h / norm
    return local + alpha * h**alpha / (norm * gamma(alpha + 1.0))


def bootstrap(
    problem: Problem,
    alpha: float,
    kind: DerivativeKind,
    h: float,
    mode: SeedMode = SeedMode.FractionalEuler,
    seed: Optional[np.ndarray] = None,
    norm: Optional[float] = None,
) -> StepperState:
    """Produce the state at n = 1 that the two-step recurrence starts from.
    :param mode: FractionalEuler predicts y_1 with the kernel's one-step rectangle rule,
                 ExactSeed takes y_1 from `seed`.
    :raises: DomainError: If exact seeding is requested without a seed.
    """
    alpha = check_order(alpha)
    if not h > 0.0:
        raise DomainError(f"step size must be positive, not {h}")
    f0 = problem.evaluate(0.0, problem.y0)
    if mode == SeedMode.ExactSeed:
        if seed is None:
            raise DomainError("exact seeding requires the value of y at t = h")
        y1 = np.atleast_1d(np.asarray(seed, dtype=float)).copy()
        if y1.shape != problem.y0.shape:
            raise DomainError(
                f"seed of shape {y1.shape} does not match"
                f" y0 of shape {problem.y0.shape}"
            )
    else:
        weight = bootstrap_weight(kind, alpha, h, resolve_norm(kind, alpha, norm))
        y1 = problem.y0 + weight * f0
    return StepperState(n=1, t=h, y=y1, f=problem.evaluate(h, y1), f_prev=f0)


def step(
    state: StepperState,
    problem: Problem,
    alpha: float,
    kind: DerivativeKind,
    h: float,
    norm: Optional[float] = None,
    paper_literal: bool = False,
) -> StepperState:
    """Advance the two-step recurrence y_{n+1} = y_n + c_curr f_n + c_prev f_{n-1}."""
    w = weights(kind, alpha, h, state.n, resolve_norm(kind, alpha, norm), paper_literal)
    y_next = state.y + w.c_curr * state.f + w.c_prev * state.f_prev
    t_next = (state.n + 1) * h
    return StepperState(
        n=state.n + 1,
        t=t_next,
        y=y_next,
        f=problem.evaluate(t_next, y_next),
        f_prev=state.f,
    )


def step_count(h: float, T: float) -> int:
    """Number of uniform steps of size h that fit in [0, T], tolerant of roundoff in T/h."""
    return int(math.floor(T / h + 1e-9))


def iter_states(
    problem: Problem,
    alpha: float,
    kind: DerivativeKind,
    h: float,
    T: float,
    norm: Optional[float] = None,
    boot: SeedMode = SeedMode.FractionalEuler,
    seed: Optional[np.ndarray] = None,
    paper_literal: bool = False,
) -> Generator[StepperState, None, None]:
    """Yield the solver states n = 1, 2, ... up to the last grid time not exceeding T.
    Only the current state is held, whatever the number of steps.
    :raises: DomainError: If T < 2h.
    """
    alpha = check_order(alpha)
    if not h > 0.0:
        raise DomainError(f"step size must be positive, not {h}")
    if T < 2.0 * h:
        raise DomainError(f"T={T} must cover at least two steps of size h={h}")
    norm = resolve_norm(kind, alpha, norm)
    n_steps = step_count(h, T)
    logger.info(
        f"integrating {kind.value} scheme, alpha={alpha}, h={h}, {n_steps} steps"
    )
    if paper_literal:
        logger.warning(
            f"using the printed {kind.value} update instead of the rederived one"
        )
    state = bootstrap(problem, alpha, kind, h, boot, seed, norm)
    yield state
    while state.n < n_steps:
        state = step(state, problem, alpha, kind, h, norm, paper_literal)
        yield state


def integrate(
    problem: Problem,
    alpha: float,
    kind: DerivativeKind,
    h: float,
    T: float,
    norm: Optional[float] = None,
    boot: SeedMode = SeedMode.FractionalEuler,
    seed: Optional[np.ndarray] = None,
    paper_literal: bool = False,
) -> Trajectory:
    """Integrate the problem with the two-step scheme of the given kind.
    :return: Trajectory of floor(T/h) + 1 points starting at (0, y0).
    :raises: DomainError: If T < 2h or the arguments are outside their domain.
    """
    times = [0.0]
    values = [problem.y0.copy()]
    for state in iter_states(
        problem, alpha, kind, h, T, norm, boot, seed, paper_literal
    ):
        times.append(state.t)
        values.append(state.y)
    return Trajectory.from_points(times, values)
