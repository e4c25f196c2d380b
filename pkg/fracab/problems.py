import enum
import math
from functools import partial
from typing import Callable, Optional

import numpy as np

from fracab.ab2_schemes import resolve_norm
from fracab.errors import InvalidRunSpec
from fracab.operators import caputo_derivative_power
from fracab.schema import BaseModel, DerivativeKind, Problem, check_order
from fracab.special_functions import mittag_leffler, reciprocal_gamma

ExactSolution = Callable[[float], np.ndarray]


class ProblemName(enum.Enum):
    ExpDecay = "expdecay"
    PowerCaputo = "power-caputo"
    CfLinear = "cf-linear"
    AbcPower = "abc-power"
    Logistic = "logistic"
    Sine = "sine"


class NamedProblem(BaseModel):
    name: ProblemName
    problem: Problem
    exact: Optional[ExactSolution] = None
    # default M of bound-check, a bound on the derivative the remainder bounds use
    derivative_bound: float = 1.0


def _vector(value: float) -> np.ndarray:
    return np.array([value])


def _decay(t: float, y: np.ndarray) -> np.ndarray:
    return -y


def _linear_source(t: float, y: np.ndarray) -> np.ndarray:
    return _vector(t)


def _logistic_growth(t: float, y: np.ndarray) -> np.ndarray:
    return y * (1.0 - y)


def _sine_source(t: float, y: np.ndarray) -> np.ndarray:
    return _vector(math.sin(t))


def _cubic_caputo_source(alpha: float, t: float, y: np.ndarray) -> np.ndarray:
    return _vector(caputo_derivative_power(3.0, alpha, t))


def _mittag_leffler_decay(alpha: float, t: float) -> np.ndarray:
    return _vector(mittag_leffler(alpha, -(t**alpha)))


def _cubic(t: float) -> np.ndarray:
    return _vector(t**3)


def _cf_linear_solution(alpha: float, norm: float, t: float) -> np.ndarray:
    return _vector((1.0 - alpha) / norm * t + alpha / (2.0 * norm) * t**2)


def _abc_linear_solution(alpha: float, norm: float, t: float) -> np.ndarray:
    memory = alpha / norm * reciprocal_gamma(2.0 + alpha) * t ** (1.0 + alpha)
    return _vector((1.0 - alpha) / norm * t + memory)


def _logistic_solution(t: float) -> np.ndarray:
    return _vector(1.0 / (1.0 + math.exp(-t)))


def _one_minus_cosine(t: float) -> np.ndarray:
    return _vector(1.0 - math.cos(t))


def expdecay(kind: DerivativeKind, alpha: float) -> NamedProblem:
    """D^alpha y = -y, y(0) = 1. The exact solution E_alpha(-t^alpha) holds for the
    Caputo kernel (and for every kernel at alpha = 1).
    """
    exact: Optional[ExactSolution] = None
    if kind == DerivativeKind.Caputo or alpha == 1.0:
        exact = partial(_mittag_leffler_decay, alpha)
    return NamedProblem(
        name=ProblemName.ExpDecay, problem=Problem(rhs=_decay, y0=[1.0]), exact=exact
    )


def power_caputo(alpha: float) -> NamedProblem:
    """Caputo problem with exact solution y = t^3, f(t) = Gamma(4)/Gamma(4-alpha) t^(3-alpha)."""
    return NamedProblem(
        name=ProblemName.PowerCaputo,
        problem=Problem(rhs=partial(_cubic_caputo_source, alpha), y0=[0.0]),
        exact=_cubic,
        derivative_bound=6.0,
    )


def cf_linear(kind: DerivativeKind, alpha: float, norm: float) -> NamedProblem:
    """f(t) = t, y(0) = 0. Exact for the Caputo-Fabrizio kernel,
    y = (1-alpha)/M t + alpha/(2M) t^2.
    """
    exact: Optional[ExactSolution] = None
    if kind == DerivativeKind.CaputoFabrizio:
        exact = partial(_cf_linear_solution, alpha, norm)
    return NamedProblem(
        name=ProblemName.CfLinear,
        problem=Problem(rhs=_linear_source, y0=[0.0]),
        exact=exact,
        derivative_bound=0.0,
    )


def abc_power(kind: DerivativeKind, alpha: float, norm: float) -> NamedProblem:
    """f(t) = t, y(0) = 0. Exact for the Atangana-Baleanu-Caputo kernel,
    y = (1-alpha)/B t + alpha/B t^(1+alpha)/Gamma(2+alpha).
    """
    exact: Optional[ExactSolution] = None
    if kind == DerivativeKind.AtanganaBaleanuCaputo:
        exact = partial(_abc_linear_solution, alpha, norm)
    return NamedProblem(
        name=ProblemName.AbcPower,
        problem=Problem(rhs=_linear_source, y0=[0.0]),
        exact=exact,
        derivative_bound=0.0,
    )


def logistic(alpha: float) -> NamedProblem:
    """D^alpha y = y (1 - y), y(0) = 1/2, exact only at alpha = 1."""
    return NamedProblem(
        name=ProblemName.Logistic,
        problem=Problem(rhs=_logistic_growth, y0=[0.5]),
        exact=_logistic_solution if alpha == 1.0 else None,
    )


def sine(alpha: float) -> NamedProblem:
    """f(t) = sin(t), y(0) = 0. At alpha = 1 the solution is 1 - cos(t)."""
    return NamedProblem(
        name=ProblemName.Sine,
        problem=Problem(rhs=_sine_source, y0=[0.0]),
        exact=_one_minus_cosine if alpha == 1.0 else None,
    )


def build_problem(
    name: str,
    kind: DerivativeKind,
    alpha: float,
    norm: Optional[float] = None,
) -> NamedProblem:
    """Look up a built-in test problem by name.
    :raises: InvalidRunSpec: If the name is unknown.
    """
    try:
        problem_name = ProblemName(name)
    except ValueError:
        known = ", ".join(p.value for p in ProblemName)
        raise InvalidRunSpec(f"unknown problem '{name}', expected one of: {known}")
    alpha = check_order(alpha)
    if problem_name == ProblemName.ExpDecay:
        return expdecay(kind, alpha)
    if problem_name == ProblemName.PowerCaputo:
        return power_caputo(alpha)
    if problem_name == ProblemName.Logistic:
        return logistic(alpha)
    if problem_name == ProblemName.Sine:
        return sine(alpha)
    norm = resolve_norm(kind, alpha, norm)
    if problem_name == ProblemName.CfLinear:
        return cf_linear(kind, alpha, norm)
    if problem_name == ProblemName.AbcPower:
        return abc_power(kind, alpha, norm)
    assert False
