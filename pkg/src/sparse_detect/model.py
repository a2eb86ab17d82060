"""Binary regression model: symmetric links, sparse signal priors, responses.

Responses follow ``P(y_i = 1 | x_i, beta) = theta(x_i' beta)`` for a link
``theta`` that is a distribution function symmetric about zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .exceptions import InvalidConfigurationError

__all__ = [
    "LinkFunction",
    "LOGISTIC",
    "PROBIT",
    "UNIFORM",
    "get_link",
    "SparseSignalPrior",
    "RegimeSpec",
    "sample_prior",
    "simulate_response",
    "binomial_proportion_shift",
    "as_rng",
]

_LINK_KINDS = ("logistic", "probit", "uniform")


@dataclass(frozen=True)
class LinkFunction:
    """Symmetric link ``theta`` with ``theta(z) + theta(-z) = 1``.

    ``kind`` is one of ``"logistic"``, ``"probit"`` or ``"uniform"`` (the
    distribution function of U(-1/2, 1/2)).
    """

    kind: str

    def __post_init__(self):
        if self.kind not in _LINK_KINDS:
            raise InvalidConfigurationError(
                f"unknown link {self.kind!r}; expected one of {_LINK_KINDS}"
            )

    def __call__(self, z):
        return self.evaluate(z)

    def evaluate(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "logistic":
            out = special.expit(z)
        elif self.kind == "probit":
            out = special.ndtr(z)
        else:
            out = np.clip(z + 0.5, 0.0, 1.0)
        return out if out.ndim else float(out)

    def log_evaluate(self, z):
        """``log theta(z)``, accurate in the far lower tail."""
        z = np.asarray(z, dtype=float)
        if self.kind == "logistic":
            out = -np.logaddexp(0.0, -z)
        elif self.kind == "probit":
            out = special.log_ndtr(z)
        else:
            with np.errstate(divide="ignore"):
                out = np.log(np.clip(z + 0.5, 0.0, 1.0))
        return out if out.ndim else float(out)

    @property
    def derivative_at_zero(self) -> float:
        if self.kind == "logistic":
            return 0.25
        if self.kind == "probit":
            return 1.0 / math.sqrt(2.0 * math.pi)
        return 1.0


LOGISTIC = LinkFunction("logistic")
PROBIT = LinkFunction("probit")
UNIFORM = LinkFunction("uniform")


def get_link(link) -> LinkFunction:
    if isinstance(link, LinkFunction):
        return link
    return LinkFunction(str(link))


def as_rng(rng) -> np.random.Generator:
    """Accept a Generator, a SeedSequence, an int or a sequence of ints."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass(frozen=True)
class SparseSignalPrior:
    """Uniform k-subset support with entries ``+A`` or ``-A``.

    Two-sided draws use an independent fair sign per coordinate; one-sided
    draws share a single fair sign across the support.
    """

    p: int
    k: int
    A: float
    sidedness: str = "two-sided"

    def __post_init__(self):
        if self.p < 1 or self.k < 1:
            raise InvalidConfigurationError("p and k must be positive")
        if self.k > self.p:
            raise InvalidConfigurationError(f"k={self.k} exceeds p={self.p}")
        if self.A < 0:
            raise InvalidConfigurationError("signal strength A must be nonnegative")
        if self.sidedness not in ("two-sided", "one-sided"):
            raise InvalidConfigurationError(f"unknown sidedness {self.sidedness!r}")

    @property
    def two_sided(self) -> bool:
        return self.sidedness == "two-sided"

    @property
    def n_sign_patterns(self) -> int:
        return 2 ** self.k if self.two_sided else 2


@dataclass(frozen=True)
class RegimeSpec:
    """Sparsity level ``k = p^(1 - alpha)`` with its dense/sparse label."""

    p: int
    k: int
    alpha: float

    @classmethod
    def from_alpha(cls, p: int, alpha: float) -> "RegimeSpec":
        if not 0.0 < alpha <= 1.0:
            raise InvalidConfigurationError(f"alpha={alpha} outside (0, 1]")
        k = max(1, int(round(p ** (1.0 - alpha))))
        return cls(p=p, k=k, alpha=float(alpha))

    @classmethod
    def from_k(cls, p: int, k: int) -> "RegimeSpec":
        if p < 2:
            raise InvalidConfigurationError("p must be at least 2 to define alpha")
        if not 1 <= k <= p:
            raise InvalidConfigurationError(f"k={k} outside [1, p={p}]")
        return cls(p=p, k=int(k), alpha=1.0 - math.log(k) / math.log(p))

    @property
    def regime(self) -> str:
        return "dense" if self.alpha <= 0.5 else "sparse"


def sample_prior(prior: SparseSignalPrior, rng) -> np.ndarray:
    """Draw one coefficient vector from ``prior``."""
    rng = as_rng(rng)
    beta = np.zeros(prior.p)
    support = rng.choice(prior.p, size=prior.k, replace=False)
    if prior.two_sided:
        signs = 2.0 * rng.integers(0, 2, size=prior.k) - 1.0
    else:
        signs = np.full(prior.k, 2.0 * rng.integers(0, 2) - 1.0)
    beta[support] = prior.A * signs
    return beta


def simulate_response(design, beta, link, rng) -> np.ndarray:
    """Draw ``y_i ~ Bernoulli(theta(x_i' beta))`` independently.

    Rows are in the design's canonical order (singleton rows grouped by
    column, then the remaining rows).
    """
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (design.p,):
        raise InvalidConfigurationError(
            f"beta has shape {beta.shape}, design has p={design.p}"
        )
    rng = as_rng(rng)
    prob = get_link(link).evaluate(design.linear_predictor(beta))
    return (rng.random(design.n) < prob).astype(np.int8)


def binomial_proportion_shift(A: float, link) -> float:
    """Shift ``theta(A) - 1/2`` of the success probability of a signal column."""
    if A < 0:
        raise InvalidConfigurationError("A must be nonnegative")
    return float(get_link(link).evaluate(A)) - 0.5
