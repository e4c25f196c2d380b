import math
from typing import List

from scipy.integrate import quad

from fracab.constants import (
    GAMMA_OVERFLOW_THRESHOLD,
    MITTAG_LEFFLER_ASYMPTOTIC_THRESHOLD,
    MITTAG_LEFFLER_SERIES_RADIUS,
    MITTAG_LEFFLER_TERM_CAP,
)
from fracab.errors import DomainError, NonConvergence, OverflowSignal
from fracab.schema import NormalizationVariant, check_order, check_unit_interval

_LANCZOS_G = 7.0
_LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_LOG_SQRT_TWO_PI = 0.5 * math.log(2.0 * math.pi)
_LOG_MAX_FLOAT = math.log(1.7976931348623157e308)
_SERIES_RELATIVE_TOLERANCE = 1e-17


def _lanczos_sum(x: float) -> float:
    total = _LANCZOS_COEFFICIENTS[0]
    for i, coefficient in enumerate(_LANCZOS_COEFFICIENTS[1:], start=1):
        total += coefficient / (x + i)
    return total


def _lanczos_gamma(x: float) -> float:
    x -= 1.0
    t = x + _LANCZOS_G + 0.5
    half_power = t ** ((x + 0.5) / 2.0)
    return math.sqrt(2.0 * math.pi) * half_power * math.exp(-t) * half_power * (
        _lanczos_sum(x)
    )


def _is_positive_integer(x: float) -> bool:
    return x >= 1.0 and x == math.floor(x)


def gamma(x: float) -> float:
    """Evaluate the gamma function on the positive real axis.
    :param x: Argument, 0 < x <= 171.6.
    :return: Gamma(x), exact for integer arguments.
    :raises: DomainError: If x <= 0.
    :raises: OverflowSignal: If Gamma(x) does not fit in a double (x > 171.6).
    """
    if not x > 0.0:
        raise DomainError(f"gamma is only evaluated for x > 0, not {x!r}")
    if x > GAMMA_OVERFLOW_THRESHOLD:
        raise OverflowSignal(f"gamma({x!r}) overflows a double")
    if _is_positive_integer(x):
        return float(math.factorial(int(x) - 1))
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * _lanczos_gamma(1.0 - x))
    return _lanczos_gamma(x)


def log_gamma(x: float) -> float:
    """Natural logarithm of Gamma(x) for x > 0, valid far beyond the overflow threshold."""
    if not x > 0.0:
        raise DomainError(f"log_gamma is only evaluated for x > 0, not {x!r}")
    if x < 0.5:
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    x -= 1.0
    t = x + _LANCZOS_G + 0.5
    log_sum = math.log(_lanczos_sum(x))
    return _LOG_SQRT_TWO_PI + (x + 0.5) * math.log(t) - t + log_sum


def reciprocal_gamma(x: float) -> float:
    """1/Gamma(x) on the whole real line; zero at the poles 0, -1, -2, ..."""
    if x <= 0.0 and x == math.floor(x):
        return 0.0
    if x > GAMMA_OVERFLOW_THRESHOLD:
        return math.exp(-log_gamma(x))
    if x > 0.0:
        return 1.0 / gamma(x)
    return math.sin(math.pi * x) * gamma(1.0 - x) / math.pi


def normalization(alpha: float, variant: NormalizationVariant) -> float:
    """Kernel normalization M(alpha) or B(alpha).
    :param alpha: Fractional order in [0, 1].
    :param variant: Unit gives 1 everywhere, GammaBlend gives 1 - alpha + alpha/Gamma(alpha).
    :return: Normalization value, exactly 1 at alpha = 0 and alpha = 1.
    """
    alpha = check_unit_interval(alpha)
    if variant == NormalizationVariant.Unit or alpha in (0.0, 1.0):
        return 1.0
    return 1.0 - alpha + alpha * reciprocal_gamma(alpha)


def _mittag_leffler_series(alpha: float, z: float) -> float:
    log_abs_z = math.log(abs(z))
    terms: List[float] = [1.0]
    previous_log_term = 0.0
    for k in range(1, MITTAG_LEFFLER_TERM_CAP + 1):
        log_term = k * log_abs_z - log_gamma(alpha * k + 1.0)
        if log_term > _LOG_MAX_FLOAT:
            raise OverflowSignal(
                f"Mittag-Leffler series for alpha={alpha}, z={z} overflows at term {k}"
            )
        term = math.exp(log_term)
        terms.append(-term if z < 0.0 and k % 2 else term)
        decreasing = log_term < previous_log_term
        if decreasing and term <= _SERIES_RELATIVE_TOLERANCE * max(
            1.0, abs(math.fsum(terms))
        ):
            return math.fsum(terms)
        previous_log_term = log_term
    raise NonConvergence(
        f"Mittag-Leffler series for alpha={alpha}, z={z} did not converge"
        f" within {MITTAG_LEFFLER_TERM_CAP} terms"
    )


def _mittag_leffler_integral(alpha: float, x: float) -> float:
    """E_alpha(-x) for x > 0 and alpha < 1 through its completely monotone integral form."""
    cos_term = math.cos(alpha * math.pi)

    def integrand(u: float) -> float:
        denominator = u * u + 2.0 * u * cos_term + 1.0
        return math.exp(-((u * x) ** (1.0 / alpha))) / denominator

    # the denominator peaks at u = -cos(alpha*pi) when alpha > 1/2
    peak = max(-cos_term, 0.0) or 1.0
    breaks = (0.0, peak, 2.0 * peak + 1.0, math.inf)
    total = 0.0
    for lower, upper in zip(breaks, breaks[1:]):
        value, _ = quad(
            integrand, lower, upper, epsabs=1e-15, epsrel=1e-13, limit=200
        )
        total += value
    return math.sin(alpha * math.pi) / (alpha * math.pi) * total


def _mittag_leffler_asymptotic(alpha: float, z: float) -> float:
    terms = (z ** (-k) * reciprocal_gamma(1.0 - alpha * k) for k in range(1, 4))
    return -math.fsum(terms)


def mittag_leffler(alpha: float, z: float) -> float:
    """Evaluate the one-parameter Mittag-Leffler function E_alpha(z) = sum z^k / Gamma(alpha k + 1).
    :param alpha: Fractional order in (0, 1].
    :param z: Real argument.
    :return: E_alpha(z).
    :raises: DomainError: If alpha is outside (0, 1].
    :raises: NonConvergence: If the series needs more than the configured number of terms.
    :raises: OverflowSignal: If the value does not fit in a double.
    """
    alpha = check_order(alpha)
    if z == 0.0:
        return 1.0
    if alpha == 1.0:
        try:
            return math.exp(z)
        except OverflowError:
            raise OverflowSignal(f"exp({z!r}) overflows a double")
    if z < MITTAG_LEFFLER_ASYMPTOTIC_THRESHOLD:
        return _mittag_leffler_asymptotic(alpha, z)
    if z < -MITTAG_LEFFLER_SERIES_RADIUS:
        return _mittag_leffler_integral(alpha, -z)
    return _mittag_leffler_series(alpha, z)
