"""Closed-form detection boundaries and signal-strength parameterizations."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import InvalidConfigurationError
from .model import get_link

__all__ = [
    "FAMILIES",
    "BoundarySpec",
    "rho_star",
    "signal_from_t",
    "t_from_signal",
    "simulation_signal",
    "alpha_from_k",
    "dense_threshold",
]

FAMILIES = ("linear", "binary", "binomial", "max-binary", "max-binomial")


@dataclass(frozen=True)
class BoundarySpec:
    family: str
    alpha: float
    theta_prime_zero: float = 0.25

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidConfigurationError(f"unknown family {self.family!r}")
        if self.theta_prime_zero <= 0:
            raise InvalidConfigurationError("theta'(0) must be positive")

    def value(self) -> float:
        return rho_star(self.family, self.alpha, self.theta_prime_zero)


def _denominator(family, theta_prime_zero):
    if family == "linear":
        return 1.0
    if family in ("binomial", "max-binomial"):
        return 4.0
    return 4.0 * theta_prime_zero ** 2


def rho_star(family: str, alpha: float, theta_prime_zero: float = 0.25,
             extend_dense: bool = False) -> float:
    """Sparse-regime boundary constant for ``alpha`` in (1/2, 1].

    ``linear``: ``alpha - 1/2`` below 3/4, ``(1 - sqrt(1 - alpha))^2`` above.
    ``binomial`` divides by 4 and ``binary`` by ``4 theta'(0)^2``; the
    ``max-`` families use the second branch on the whole range.
    With ``extend_dense=True`` the first branch is continued to
    ``alpha <= 1/2``, where it is negative.
    """
    if family not in FAMILIES:
        raise InvalidConfigurationError(f"unknown family {family!r}")
    if theta_prime_zero <= 0:
        raise InvalidConfigurationError("theta'(0) must be positive")
    if alpha > 1.0 or (alpha <= 0.5 and not extend_dense) or alpha <= 0.0:
        raise InvalidConfigurationError(f"alpha={alpha} outside (1/2, 1]")
    if family.startswith("max-"):
        if alpha <= 0.5:
            raise InvalidConfigurationError("max-test boundaries are defined for alpha > 1/2")
        num = (1.0 - math.sqrt(1.0 - alpha)) ** 2
    elif alpha < 0.75:
        num = alpha - 0.5
    else:
        num = (1.0 - math.sqrt(1.0 - alpha)) ** 2
    return num / _denominator(family, theta_prime_zero)


def signal_from_t(t: float, p: int, r: int) -> float:
    """``A = sqrt(2 t log p / r)``."""
    if t < 0 or p < 2 or r < 1:
        raise InvalidConfigurationError("need t >= 0, p >= 2, r >= 1")
    return math.sqrt(2.0 * t * math.log(p) / r)


def t_from_signal(A: float, p: int, r: int) -> float:
    if A < 0 or p < 2 or r < 1:
        raise InvalidConfigurationError("need A >= 0, p >= 2, r >= 1")
    return A * A * r / (2.0 * math.log(p))


def alpha_from_k(k: int, p: int) -> float:
    return 1.0 - math.log(k) / math.log(p)


def simulation_signal(t_offset: float, alpha: float, p: int, r: int, link,
                      clamped: bool = False) -> float:
    """``A = sqrt(2 (rho*_binary(alpha) + t) log p / r)`` for a given link.

    ``clamped=True`` replaces a negative ``rho* + t`` by zero.  For
    ``alpha <= 1/2`` the boundary's first branch is continued (it is then
    negative), which is how dense sparsity levels are placed on the same
    offset scale.
    """
    link = get_link(link)
    rho = rho_star("binary", alpha, link.derivative_at_zero, extend_dense=True)
    scale = 2.0 * (rho + t_offset)
    if clamped:
        scale = max(scale, 0.0)
    elif scale < 0:
        raise InvalidConfigurationError(
            f"rho*(alpha={alpha:.4f}) + t = {rho + t_offset:.4f} is negative; "
            "use the clamped rule or a larger t")
    return math.sqrt(scale * math.log(p) / r)


def dense_threshold(p: int, k: int, r: int) -> float:
    """Dense-regime rate pivot ``sqrt(sqrt(p) / (k r))``."""
    if k < 1 or r < 1 or p < 1:
        raise InvalidConfigurationError("need p, k, r >= 1")
    return math.sqrt(math.sqrt(p) / (k * r))
