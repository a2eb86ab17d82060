"""Exact Binomial(r, 1/2) kernel.

Everything is expressed through the standardized deviation
``w(z) = |z - r/2| / sqrt(r/4) = |2z - r| / sqrt(r)``.  The distinct values
of ``w`` are indexed by ``m = min(z, r - z)`` in ``0..floor(r/2)`` and
decrease as ``m`` grows, so every tail ``P(w(R) > t)`` is a lower tail
``P(min(R, r - R) < M)`` summed from the extreme outcomes inward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .exceptions import InvalidConfigurationError
from .model import as_rng

__all__ = [
    "log_pmf",
    "standardized_deviation",
    "StandardizedBinomial",
    "standardized_binomial",
    "standardized_survival",
    "two_sided_pvalue",
    "sample_binomial_half",
]

_LOG2 = math.log(2.0)


def _check_r(r):
    if int(r) != r or r < 1:
        raise InvalidConfigurationError(f"r must be a positive integer, got {r!r}")
    return int(r)


def log_pmf(r, z):
    """``log P(R = z)`` for ``R ~ Bin(r, 1/2)``; vectorized over ``z``."""
    r = _check_r(r)
    z_arr = np.asarray(z)
    if np.any((z_arr < 0) | (z_arr > r)) or np.any(z_arr != np.floor(z_arr)):
        raise InvalidConfigurationError(f"z must be an integer in [0, {r}]")
    zf = z_arr.astype(float)
    out = gammaln(r + 1.0) - gammaln(zf + 1.0) - gammaln(r - zf + 1.0) - r * _LOG2
    return out if out.ndim else float(out)


def standardized_deviation(z, r):
    """``|z - r/2| / sqrt(r/4)``, computed identically everywhere it is used."""
    z = np.asarray(z)
    r = np.asarray(r)
    return np.abs(2 * z - r) / np.sqrt(r)


def _kahan_cumsum(values: np.ndarray) -> np.ndarray:
    out = np.empty_like(values)
    total = 0.0
    comp = 0.0
    for i, v in enumerate(values.tolist()):
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[i] = total
    return out


@dataclass(frozen=True, eq=False)
class StandardizedBinomial:
    """Distribution of ``w(R)`` for ``R ~ Bin(r, 1/2)``.

    Attributes
    ----------
    r : int
    values : ndarray
        Achievable values of ``w``, indexed by ``m = 0..floor(r/2)``
        (descending, ``values[0] = sqrt(r)``).
    lower_cdf : ndarray
        ``P(R <= m)`` for the same ``m``, accumulated from ``m = 0`` with
        compensated summation.
    """

    r: int
    values: np.ndarray
    lower_cdf: np.ndarray

    @property
    def achievable_values(self) -> np.ndarray:
        """Ascending achievable values of ``w``."""
        return self.values[::-1].copy()

    def tail_below(self, M):
        """``P(min(R, r - R) < M)``, i.e. ``P(w(R) > values[M])``."""
        M = np.asarray(M)
        m_max = len(self.values)
        idx = np.clip(M - 1, 0, m_max - 1)
        out = np.minimum(2.0 * self.lower_cdf[idx], 1.0)
        out = np.where(M <= 0, 0.0, out)
        out = np.where(M >= m_max, 1.0, out)
        return out if out.ndim else float(out)

    def count_above(self, t):
        """Number of achievable values strictly greater than ``t``."""
        # values are descending; search on the ascending negation
        return np.searchsorted(-self.values, -np.asarray(t, dtype=float), side="left")

    def survival(self, t):
        """``P(w(R) > t)`` (strict)."""
        return self.tail_below(self.count_above(t))

    def survival_at_or_above(self, m):
        """``P(w(R) >= values[m])``, the survival just below an achievable value."""
        return self.tail_below(np.asarray(m) + 1)

    def pvalue(self, z):
        """``P(w(R) > w(z))`` for observed counts ``z``."""
        z = np.asarray(z)
        return self.tail_below(np.minimum(z, self.r - z))


@lru_cache(maxsize=64)
def standardized_binomial(r: int) -> StandardizedBinomial:
    """Cached kernel table for ``r`` (read-only, safe to share)."""
    r = _check_r(r)
    m = np.arange(r // 2 + 1)
    values = standardized_deviation(m, r).astype(float)
    cdf = _kahan_cumsum(np.exp(log_pmf(r, m)))
    values.setflags(write=False)
    cdf.setflags(write=False)
    return StandardizedBinomial(r=r, values=values, lower_cdf=cdf)


def standardized_survival(r, t):
    """``P(|R - r/2| / sqrt(r/4) > t)`` for ``R ~ Bin(r, 1/2)``."""
    return standardized_binomial(_check_r(r)).survival(t)


def two_sided_pvalue(r, z):
    """``P(|R - r/2| > |z - r/2|)`` with strict inequality."""
    r = _check_r(r)
    z_arr = np.asarray(z)
    if np.any((z_arr < 0) | (z_arr > r)):
        raise InvalidConfigurationError(f"z must lie in [0, {r}]")
    return standardized_binomial(r).pvalue(z_arr.astype(np.int64))


def sample_binomial_half(r, rng, size=None):
    """Exact ``Bin(r, 1/2)`` draws.

    Delegates to numpy's generator (inversion for small ``r * p``, BTPE
    accept-reject otherwise); both are exact and O(1) expected per draw.
    """
    r = _check_r(r)
    return as_rng(rng).binomial(r, 0.5, size=size)
