"""Mean occupancy for states holding at most ``n - 1`` particles.

All functions take the dimensionless exponent ``x = E*b + c`` built from a
level energy ``E`` and the two Lagrange factors ``b`` and ``c``.  The mean
occupancy is

    P(x, n) = sum_k k exp(-k x) / sum_k exp(-k x),   k = 0 .. n-1

which is the Fermi-Dirac function at ``n = 2`` and tends to the Bose-Einstein
function as ``n`` grows.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import bernoulli

__all__ = [
    "SERIES_TERMS",
    "series_window",
    "occupancy_direct",
    "occupancy_closed",
    "occupancy_series",
    "fermi",
    "bose",
    "state_partition",
    "occupancy_variance",
]

# Saturation threshold for exp/expm1 arguments.
_EXP_LIMIT = 700.0

SERIES_TERMS = 15


def _finite(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x}")
    return x


def _order(n: int, minimum: int = 2) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise TypeError(f"n must be an integer, got {n!r}")
    n = int(n)
    if n < minimum:
        raise ValueError(f"n must be >= {minimum}, got {n}")
    return n


def _weights(x: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(n, dtype=float)
    expo = -k * x
    return k, np.exp(expo - expo.max())


def occupancy_direct(x: float, n: int) -> float:
    """Mean occupancy from the two finite sums over ``k = 0 .. n-1``.

    The largest exponent is factored out of both sums, so any finite ``x``
    is safe.

    >>> occupancy_direct(0.0, 4)
    1.5
    """
    x, n = _finite(x), _order(n)
    k, w = _weights(x, n)
    return float(np.dot(k, w) / w.sum())


def occupancy_variance(x: float, n: int) -> float:
    """Variance of the occupation number; equals ``-dP/dx``."""
    x, n = _finite(x), _order(n)
    k, w = _weights(x, n)
    p = w / w.sum()
    mean = np.dot(k, p)
    return float(np.dot((k - mean) ** 2, p))


def series_window(n: int) -> float:
    """Half-width ``h`` of the window ``|x| < h`` where the series form is used."""
    return 1.0 / _order(n)


@lru_cache(maxsize=None)
def _series_coefficients(n: int) -> tuple[float, ...]:
    # x**(2j-1) coefficient: B_2j (1 - n**(2j)) / (2j)!
    b = bernoulli(2 * SERIES_TERMS)
    return tuple(
        float(b[2 * j]) * (1.0 - float(n) ** (2 * j)) / math.factorial(2 * j)
        for j in range(1, SERIES_TERMS + 1)
    )


def occupancy_series(x: float, n: int) -> float:
    """Expansion of the occupancy about ``x = 0``, accurate for ``|n x| <= 1``.

    Leading terms: ``(n-1)/2 - (n**2-1) x/12 + (n**4-1) x**3/720``.
    """
    x, n = _finite(x), _order(n)
    x2 = x * x
    acc = 0.0
    for coef in reversed(_series_coefficients(n)):
        acc = acc * x2 + coef
    return (n - 1) / 2.0 + acc * x


def _inv_expm1(y: float) -> float:
    if y > _EXP_LIMIT:
        return math.exp(-y)
    return 1.0 / math.expm1(y)


def occupancy_closed(x: float, n: int) -> float:
    """Resummed occupancy ``1/(e**x - 1) - n/(e**(n x) - 1)``.

    Both terms diverge at ``x = 0`` while their difference stays finite, so
    inside :func:`series_window` the power series is used instead.
    """
    x, n = _finite(x), _order(n)
    if abs(x) < series_window(n):
        return occupancy_series(x, n)
    return _inv_expm1(x) - n * _inv_expm1(n * x)


def fermi(x: float) -> float:
    """``1/(e**x + 1)``, saturating instead of overflowing."""
    x = _finite(x)
    if x >= 0:
        t = math.exp(-x)
        return t / (1.0 + t)
    return 1.0 / (1.0 + math.exp(x))


def bose(x: float) -> float:
    """``1/(e**x - 1)`` for ``x > 0``.

    Raises
    ------
    ValueError
        If ``x <= 0``, where the occupancy diverges or turns negative.
    """
    x = _finite(x)
    if x <= 0:
        raise ValueError(f"Bose occupancy is defined only for x > 0, got {x}")
    return _inv_expm1(x)


def state_partition(x: float, n: int) -> float:
    """``sum_{k<n} exp(-k x) = (1 - e**(-n x)) / (1 - e**(-x))``; ``n`` at ``x = 0``.

    Returns ``inf`` when the sum overflows (large negative ``x``).
    """
    x, n = _finite(x), _order(n, minimum=1)
    if x == 0.0:
        return float(n)
    try:
        return math.expm1(-n * x) / math.expm1(-x)
    except OverflowError:
        # (e^{-nx} - 1)/(e^{-x} - 1) ~ e^{-(n-1)x} for x << 0
        log_val = -(n - 1) * x
        return math.exp(log_val) if log_val < 709.0 else math.inf
