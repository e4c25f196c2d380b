import logging
import math
from typing import Callable, Optional, Sequence, Union

import numpy as np

from fracab.constants import (
    DERIVATIVE_TOLERANCE,
    QUADRATURE_GAUSS_ORDER,
    QUADRATURE_GRADING_EXPONENT,
    QUADRATURE_INITIAL_PANELS,
    QUADRATURE_NODE_BUDGET,
)
from fracab.errors import DomainError, NonConvergence
from fracab.schema import (
    DerivativeKind,
    Monomial,
    check_order,
    default_norm_variant,
)
from fracab.special_functions import (
    gamma,
    mittag_leffler,
    normalization,
    reciprocal_gamma,
)

logger = logging.getLogger(__name__)

TimeFunction = Callable[[np.ndarray], np.ndarray]
ScalarOrVector = Union[float, np.ndarray]

_LEGENDRE_NODES, _LEGENDRE_WEIGHTS = np.polynomial.legendre.leggauss(
    QUADRATURE_GAUSS_ORDER
)
_UNIT_NODES = 0.5 * (_LEGENDRE_NODES + 1.0)
_UNIT_WEIGHTS = 0.5 * _LEGENDRE_WEIGHTS

_vectorized_mittag_leffler = np.vectorize(mittag_leffler, otypes=[float])


def caputo_derivative_power(k: float, alpha: float, t: float) -> float:
    """Caputo derivative of t^k in closed form, Gamma(k+1)/Gamma(k+1-alpha) t^(k-alpha).
    :raises: DomainError: If k < alpha or t < 0.
    """
    alpha = check_order(alpha)
    if k < alpha:
        raise DomainError(f"exponent k={k} must not be smaller than alpha={alpha}")
    if t < 0.0:
        raise DomainError(f"time must be nonnegative, not {t}")
    return gamma(k + 1.0) * reciprocal_gamma(k + 1.0 - alpha) * t ** (k - alpha)


def rl_integral_power(k: float, alpha: float, t: float) -> float:
    """Riemann-Liouville integral of t^k, Gamma(k+1)/Gamma(k+1+alpha) t^(k+alpha)."""
    alpha = check_order(alpha)
    if k < 0.0:
        raise DomainError(f"exponent k must be nonnegative, not {k}")
    if t < 0.0:
        raise DomainError(f"time must be nonnegative, not {t}")
    return gamma(k + 1.0) * reciprocal_gamma(k + 1.0 + alpha) * t ** (k + alpha)


def _check_kernel_order(alpha: float, kind: DerivativeKind) -> float:
    alpha = check_order(alpha)
    if kind != DerivativeKind.Caputo and alpha == 1.0:
        raise DomainError(f"the {kind.value} kernel is only defined for alpha < 1")
    return alpha


def kernel(kind: DerivativeKind, alpha: float, s: ScalarOrVector) -> ScalarOrVector:
    """Memory kernel K(s) of the fractional operator, s = t - tau being the lag.
    Caputo uses s^(alpha-1), Caputo-Fabrizio exp(-alpha s/(1-alpha)) and Atangana-Baleanu
    E_alpha(-alpha s^alpha/(1-alpha)).
    :raises: DomainError: If alpha = 1 for one of the nonsingular kernels.
    """
    alpha = _check_kernel_order(alpha, kind)
    lag = np.asarray(s, dtype=float)
    if kind == DerivativeKind.Caputo:
        values = lag ** (alpha - 1.0)
    elif kind == DerivativeKind.CaputoFabrizio:
        values = np.exp(-alpha * lag / (1.0 - alpha))
    else:
        argument = -alpha * lag**alpha / (1.0 - alpha)
        values = _vectorized_mittag_leffler(alpha, argument)
    if np.ndim(values) == 0:
        return float(values)
    return values


def _graded_edges(panels: int) -> np.ndarray:
    xi = np.linspace(0.0, 1.0, panels + 1)
    q = QUADRATURE_GRADING_EXPONENT
    return np.where(
        xi <= 0.5, 0.5 * (2.0 * xi) ** q, 1.0 - 0.5 * (2.0 * (1.0 - xi)) ** q
    )


def _composite_gauss(
    integrand: TimeFunction, length: float, panels: int
) -> np.ndarray:
    edges = length * _graded_edges(panels)
    widths = np.diff(edges)
    nodes = edges[:-1, None] + widths[:, None] * _UNIT_NODES[None, :]
    weights = widths[:, None] * _UNIT_WEIGHTS[None, :]
    return np.asarray(integrand(nodes.ravel())) @ weights.ravel()


def _substituted_power_integrand(
    g: TimeFunction, alpha: float, t: float
) -> TimeFunction:
    def integrand(u: np.ndarray) -> np.ndarray:
        return np.asarray(g(np.maximum(t - u ** (1.0 / alpha), 0.0))) / alpha

    return integrand


def _kernel_integrand(
    g: TimeFunction, alpha: float, kind: DerivativeKind, t: float
) -> TimeFunction:
    def integrand(s: np.ndarray) -> np.ndarray:
        weights = np.asarray(kernel(kind, alpha, s))
        return weights * np.asarray(g(np.maximum(t - s, 0.0)))

    return integrand


def _as_result(value: np.ndarray) -> ScalarOrVector:
    if np.ndim(value) == 0:
        return float(value)
    return value


def kernel_weighted_integral(
    g: TimeFunction,
    alpha: float,
    kind: DerivativeKind,
    t: float,
    tol: float = DERIVATIVE_TOLERANCE,
) -> ScalarOrVector:
    """Integrate K(t - tau) g(tau) over [0, t] to absolute accuracy tol.

    Panels are graded towards both ends of the interval and doubled until two successive
    sums agree to tol. For the power kernel the substitution s = u^(1/alpha) absorbs the
    s^(alpha-1) singularity before the quadrature is applied.

    :param g: Vectorized function of tau. It may return an array of shape (p, m) for m
              nodes, in which case the p integrals share kernel evaluations.
    :param alpha: Fractional order in (0, 1], strictly below 1 for the nonsingular kernels.
    :param kind: Kernel selector.
    :param t: Upper integration limit, t >= 0.
    :param tol: Absolute tolerance.
    :return: The integral (a float, or an array of length p for vector valued g).
    :raises: NonConvergence: If tol is not reached within the quadrature node budget.
    """
    alpha = _check_kernel_order(alpha, kind)
    if not tol > 0.0:
        raise DomainError(f"tolerance must be positive, not {tol}")
    if t < 0.0:
        raise DomainError(f"time must be nonnegative, not {t}")
    if t == 0.0:
        return _as_result(0.0 * np.asarray(g(np.zeros(1)))[..., 0])

    if kind == DerivativeKind.Caputo:
        length = t**alpha
        integrand = _substituted_power_integrand(g, alpha, t)
    else:
        length = t
        integrand = _kernel_integrand(g, alpha, kind, t)

    panels = QUADRATURE_INITIAL_PANELS
    previous = _composite_gauss(integrand, length, panels)
    used_nodes = panels * QUADRATURE_GAUSS_ORDER
    while True:
        panels *= 2
        used_nodes += panels * QUADRATURE_GAUSS_ORDER
        if used_nodes > QUADRATURE_NODE_BUDGET:
            raise NonConvergence(
                f"{kind.value} kernel integral at t={t} did not reach tol={tol}"
                f" within {QUADRATURE_NODE_BUDGET} nodes"
            )
        current = _composite_gauss(integrand, length, panels)
        change = float(np.max(np.abs(current - previous)))
        logger.debug(
            f"{kind.value} kernel integral, t={t}, {panels} panels, change={change:.3e}"
        )
        if change <= tol:
            return _as_result(current)
        previous = current


def _classical_derivative(monomials: Sequence[Monomial]) -> TimeFunction:
    coefficients = np.array([m.coefficient * m.exponent for m in monomials])
    powers = np.array([m.exponent - 1.0 for m in monomials])

    def derivative(tau: np.ndarray) -> np.ndarray:
        return coefficients[:, None] * tau[None, :] ** powers[:, None]

    return derivative


def fractional_derivative_terms(
    kind: DerivativeKind,
    alpha: float,
    monomials: Sequence[Monomial],
    t: float,
    norm: Optional[float] = None,
    tol: float = DERIVATIVE_TOLERANCE,
) -> np.ndarray:
    """Fractional derivative of each monomial c t^e separately, in the order given.
    :param norm: Normalization value of the nonsingular kernels, defaults to the kind's
                 default normalization variant.
    """
    alpha = check_order(alpha)
    if not monomials:
        return np.zeros(0)
    if alpha == 1.0:
        return np.array(
            [m.coefficient * m.exponent * t ** (m.exponent - 1.0) for m in monomials]
        )
    if kind == DerivativeKind.Caputo:
        return np.array(
            [
                m.coefficient * caputo_derivative_power(m.exponent, alpha, t)
                for m in monomials
            ]
        )
    if norm is None:
        norm = normalization(alpha, default_norm_variant(kind))
    integrals = kernel_weighted_integral(
        _classical_derivative(monomials), alpha, kind, t, tol
    )
    return norm / (1.0 - alpha) * np.atleast_1d(integrals)


def fractional_derivative_of_exact_solution(
    kind: DerivativeKind,
    alpha: float,
    exact_time_part: Sequence[Monomial],
    t: float,
    norm: Optional[float] = None,
    tol: float = DERIVATIVE_TOLERANCE,
) -> float:
    """Fractional derivative of a power sum sum_i c_i t^(e_i), e_i >= 1.
    Caputo uses the closed form term by term, the nonsingular kernels integrate the
    classical derivative against their kernel; alpha = 1 is the classical derivative.
    :raises: NonConvergence: Propagated from the kernel quadrature.
    """
    terms = fractional_derivative_terms(kind, alpha, exact_time_part, t, norm, tol)
    return math.fsum(terms.tolist())
