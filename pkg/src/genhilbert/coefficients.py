"""Gamma-ratio coefficients c_n(alpha) = Gamma(n + alpha) / (n! Gamma(alpha)).

These are the Taylor coefficients of (1 - z)**(-alpha).  They are built from
the product recurrence c_n = c_{n-1} (n - 1 + alpha) / n; a log-space copy is
kept alongside so that entries beyond 1e300 stay usable.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import DomainError

OVERFLOW_LIMIT = 1e300


@dataclass(frozen=True, eq=False)
class GammaRatioTable:
    alpha: float
    values: np.ndarray
    log_values: np.ndarray

    @property
    def N(self):
        return len(self.values) - 1

    def __getitem__(self, n):
        return self.values[n]

    def __len__(self):
        return len(self.values)


def _check_alpha(alpha):
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")


@lru_cache(maxsize=64)
def _table(alpha, n_max):
    n = np.arange(1, n_max + 1, dtype=float)
    factors = (n - 1.0 + alpha) / n
    values = np.empty(n_max + 1)
    values[0] = 1.0
    with np.errstate(over="ignore"):
        values[1:] = np.cumprod(factors)
    log_values = np.empty(n_max + 1)
    log_values[0] = 0.0
    log_values[1:] = np.cumsum(np.log1p((alpha - 1.0) / n))
    big = log_values > math.log(OVERFLOW_LIMIT)
    values[big] = np.inf
    values.setflags(write=False)
    log_values.setflags(write=False)
    return GammaRatioTable(alpha, values, log_values)


def gamma_ratio_table(alpha, n_max):
    """Table of c_0..c_{n_max}; entries that would exceed 1e300 are stored as inf
    and must be read from ``log_values``."""
    _check_alpha(alpha)
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    return _table(float(alpha), int(n_max))


def gamma_ratio(alpha, n):
    """c_n(alpha) by the product recurrence; inf beyond the double range."""
    _check_alpha(alpha)
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a nonnegative integer, got {n}")
    n = int(n)
    c = 1.0
    for k in range(1, n + 1):
        c *= (k - 1.0 + alpha) / k
        if c > OVERFLOW_LIMIT:
            log_c = log_gamma_ratio(alpha, n)
            return math.exp(log_c) if log_c < 709.0 else math.inf
    return c


def log_gamma_ratio(alpha, n):
    _check_alpha(alpha)
    k = np.arange(1, int(n) + 1, dtype=float)
    return float(np.sum(np.log1p((alpha - 1.0) / k)))


def stirling_check(alpha, n):
    """Gamma(alpha) c_n(alpha) / n**(alpha - 1); tends to 1 as n grows."""
    if n < 1:
        raise DomainError("stirling_check needs n >= 1")
    if alpha == 1:
        return 1.0
    return math.exp(gammaln(alpha) + log_gamma_ratio(alpha, n) - (alpha - 1.0) * math.log(n))


def stirling_ratios(alpha, n_max):
    """stirling_check for n = 1..n_max as an array (index 0 unused, set to nan)."""
    table = gamma_ratio_table(alpha, n_max)
    n = np.arange(n_max + 1, dtype=float)
    out = np.full(n_max + 1, np.nan)
    out[1:] = np.exp(gammaln(alpha) + table.log_values[1:] - (alpha - 1.0) * np.log(n[1:]))
    return out
