"""Global-null test statistics for sparse binary designs.

All statistics are functions of the column counts ``Z_j`` (successes among
the singleton rows of column ``j``) and, for the combined variants, of the
counts ``Z_j^G`` collected on the remaining rows.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.special import logsumexp

from .binomial import standardized_binomial, standardized_deviation
from .designs import BinaryDesign
from .exceptions import (
    DegenerateStatisticError,
    InvalidConfigurationError,
    UnsupportedConfigurationError,
)
from .model import SparseSignalPrior, as_rng, get_link

__all__ = [
    "ZStatistics",
    "TestReport",
    "GMoments",
    "compute_z",
    "g_moments",
    "glrt",
    "glrt_combined",
    "calibrate_glrt_threshold",
    "hc_grid",
    "hc_statistic",
    "hc_ideal",
    "hc_pvalue",
    "hc_combined",
    "max_test",
    "bayes_lr",
    "bayes_lr_second_moment",
    "ENUMERATION_BUDGET",
]

log = logging.getLogger(__name__)

ENUMERATION_BUDGET = 10 ** 7


@dataclass(frozen=True, eq=False)
class ZStatistics:
    """Column counts from the singleton rows and from G.

    ``g_matrix`` keeps a reference to G so that the combined statistics can
    compute their null moments.
    """

    z: np.ndarray
    r: np.ndarray
    z_g: np.ndarray
    g: np.ndarray
    g_matrix: sparse.csr_matrix | None = None

    def __post_init__(self):
        for name in ("z", "r", "z_g", "g"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.int64))
        if not (self.z.shape == self.r.shape == self.z_g.shape == self.g.shape):
            raise InvalidConfigurationError("z, r, z_g and g must have equal length")
        if np.any((self.z < 0) | (self.z > self.r)):
            raise InvalidConfigurationError("need 0 <= z_j <= r_j")
        if np.any((self.z_g < 0) | (self.z_g > self.g)):
            raise InvalidConfigurationError("need 0 <= z_g_j <= g_j")

    @property
    def p(self) -> int:
        return int(self.z.size)

    @classmethod
    def from_counts(cls, z, r) -> "ZStatistics":
        """Orthogonal-only statistics (no G rows)."""
        z = np.asarray(z, dtype=np.int64)
        r = np.broadcast_to(np.asarray(r, dtype=np.int64), z.shape)
        zero = np.zeros_like(z)
        return cls(z=z, r=r, z_g=zero, g=zero)


@dataclass
class TestReport:
    name: str
    statistic: float
    threshold: float
    details: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class

    @property
    def reject(self) -> bool:
        return bool(self.statistic > self.threshold)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": _jsonable(self.statistic),
            "threshold": _jsonable(self.threshold),
            "reject": self.reject,
            "details": _jsonable(self.details),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in np.asarray(obj).tolist()] if isinstance(obj, np.ndarray) \
            else [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def compute_z(design: BinaryDesign, y) -> ZStatistics:
    """Column counts of successes; ``y`` is in the design's canonical row order."""
    y = np.asarray(y)
    if y.shape != (design.n,):
        raise InvalidConfigurationError(f"y has shape {y.shape}, design has n={design.n}")
    if np.any((y != 0) & (y != 1)):
        raise InvalidConfigurationError("y must be binary")
    y = y.astype(np.int64)
    z = np.bincount(design.singleton_columns(), weights=y[: design.n_star],
                    minlength=design.p).astype(np.int64)
    G = design.g_matrix()
    z_g = np.asarray(G.T @ y[design.n_star:], dtype=np.int64) if design.n_sub_star \
        else np.zeros(design.p, dtype=np.int64)
    return ZStatistics(z=z, r=design.r, z_g=z_g, g=design.g,
                       g_matrix=G if design.n_sub_star else None)


# -- GLRT -------------------------------------------------------------


def _glrt_value(z, r):
    used = r >= 1
    p_used = int(np.count_nonzero(used))
    if p_used == 0:
        raise DegenerateStatisticError("no column has a singleton row")
    zu, ru = z[used], r[used]
    raw = float(np.sum((2 * zu - ru) ** 2 / ru))
    return (raw - p_used) / math.sqrt(2.0 * p_used), raw, p_used


@lru_cache(maxsize=32)
def _glrt_null_quantile(r_bytes: bytes, level: float, n_rep: int, seed: int) -> float:
    r = np.frombuffer(r_bytes, dtype=np.int64)
    r = r[r >= 1]
    rng = np.random.default_rng(seed)
    p = r.size
    chunk = max(1, 2_000_000 // max(p, 1))
    stats = []
    for start in range(0, n_rep, chunk):
        m = min(chunk, n_rep - start)
        z = rng.binomial(r, 0.5, size=(m, p))
        raw = np.sum((2 * z - r) ** 2 / r, axis=1)
        stats.append((raw - p) / math.sqrt(2.0 * p))
    return float(np.quantile(np.concatenate(stats), 1.0 - level))


def calibrate_glrt_threshold(r, level=0.05, n_rep=10_000, seed=0) -> float:
    """Null Monte Carlo ``1 - level`` quantile of the standardized GLRT."""
    r = np.ascontiguousarray(r, dtype=np.int64)
    return _glrt_null_quantile(r.tobytes(), float(level), int(n_rep), int(seed))


def glrt(zs: ZStatistics, threshold=None, level=0.05, n_rep=10_000, seed=0) -> TestReport:
    """Standardized sum of squared column deviations, ``(T - p) / sqrt(2p)``.

    Columns without singleton rows are dropped and ``p`` reduced accordingly.
    Without an explicit ``threshold`` the cutoff is the null Monte Carlo
    quantile at ``level``.
    """
    stat, raw, p_used = _glrt_value(zs.z, zs.r)
    if threshold is None:
        threshold = calibrate_glrt_threshold(zs.r, level, n_rep, seed)
    details = {"raw_sum": raw, "p_used": p_used, "excluded_columns": zs.p - p_used}
    return TestReport("GLRT", stat, float(threshold), details)


@dataclass(frozen=True)
class GMoments:
    """Null moments of ``sum_j (Z_j^G)^2``.

    ``expected[j] = E(Z_j^G)^2 = g_j/4 + g_j^2/4``; ``variance`` is the exact
    variance of the sum under independent Bernoulli(1/2) responses.
    """

    expected: np.ndarray
    variance: float


def g_moments(source) -> GMoments:
    """Exact null moments for the G part of a design (or its ZStatistics).

    With ``y = (1 + e)/2`` for Rademacher ``e`` and ``M = G G'``,
    ``sum_j (Z_j^G)^2 = y' M y`` has variance
    ``(1/4) |M 1|^2 + (1/8) sum_{a != b} M_ab^2``.
    """
    if isinstance(source, BinaryDesign):
        G, g = source.g_matrix(), source.g
    else:
        G, g = source.g_matrix, source.g
    g = np.asarray(g, dtype=float)
    expected = g / 4.0 + g ** 2 / 4.0
    if G is None or G.shape[0] == 0:
        return GMoments(expected=expected, variance=0.0)
    G = sparse.csr_matrix(G, dtype=np.float64)
    M = (G @ G.T).tocsr()
    u = np.asarray(M.sum(axis=1)).ravel()
    diag = M.diagonal()
    off_sq = float(M.multiply(M).sum() - np.sum(diag ** 2))
    return GMoments(expected=expected, variance=0.25 * float(u @ u) + 0.125 * off_sq)


def _glrt_combined_value(zs, moments):
    stat1, raw, p_used = _glrt_value(zs.z, zs.r)
    if moments.variance <= 0:
        return stat1, {"fallback": True, "glrt": stat1, "raw_sum": raw, "p_used": p_used}
    s = float(np.sum(zs.z_g.astype(float) ** 2))
    stat2 = (s - float(np.sum(moments.expected))) / math.sqrt(moments.variance)
    return max(stat1, stat2), {"fallback": False, "glrt": stat1, "glrt_g": stat2,
                               "raw_sum": raw, "p_used": p_used}


@lru_cache(maxsize=16)
def _combined_null_quantile(key, level, n_rep, seed):
    r_bytes, indptr_b, indices_b, p, variance, expected_sum = key
    r = np.frombuffer(r_bytes, dtype=np.int64)
    G = sparse.csr_matrix(
        (np.ones(len(indices_b) // 8), np.frombuffer(indices_b, dtype=np.int64),
         np.frombuffer(indptr_b, dtype=np.int64)), shape=(len(indptr_b) // 8 - 1, p))
    used = r >= 1
    ru = r[used]
    rng = np.random.default_rng(seed)
    out = np.empty(n_rep)
    for i in range(n_rep):
        z = rng.binomial(ru, 0.5)
        s1 = (np.sum((2 * z - ru) ** 2 / ru) - ru.size) / math.sqrt(2.0 * ru.size)
        y = rng.integers(0, 2, size=G.shape[0]).astype(float)
        zg = G.T @ y
        s2 = (float(zg @ zg) - expected_sum) / math.sqrt(variance)
        out[i] = max(s1, s2)
    return float(np.quantile(out, 1.0 - level))


def glrt_combined(zs: ZStatistics, moments: GMoments | None = None, threshold=None,
                  level=0.05, n_rep=10_000, seed=0) -> TestReport:
    """Larger of the standardized GLRT and the standardized G-part sum of squares.

    Falls back to the plain GLRT when G is empty.  The default cutoff is the
    null Monte Carlo quantile of the maximum.
    """
    moments = g_moments(zs) if moments is None else moments
    stat, details = _glrt_combined_value(zs, moments)
    if details["fallback"]:
        plain = glrt(zs, threshold=threshold, level=level, n_rep=n_rep, seed=seed)
        plain.name = "GLRT-combined"
        plain.details["fallback"] = True
        return plain
    if threshold is None:
        if zs.g_matrix is None:
            raise InvalidConfigurationError("threshold required when G is not attached")
        G = sparse.csr_matrix(zs.g_matrix)
        key = (np.ascontiguousarray(zs.r, dtype=np.int64).tobytes(),
               G.indptr.astype(np.int64).tobytes(), G.indices.astype(np.int64).tobytes(),
               zs.p, moments.variance, float(np.sum(moments.expected)))
        threshold = _combined_null_quantile(key, float(level), int(n_rep), int(seed))
    return TestReport("GLRT-combined", stat, float(threshold), details)


# -- Higher Criticism --------------------------------------------------


def hc_grid(p: int) -> np.ndarray:
    """Integer thresholds ``1..floor(sqrt(3 log p))``."""
    top = math.floor(math.sqrt(3.0 * math.log(p))) if p > 1 else 0
    return np.arange(1, top + 1, dtype=float)


def _exceedances(z, r, ts):
    """Counts of ``w_j > t``, and sums of ``Bbar_j(t)`` and ``Bbar_j(1 - Bbar_j)``."""
    ts = np.asarray(ts, dtype=float)
    counts = np.zeros(ts.size)
    mean = np.zeros(ts.size)
    var = np.zeros(ts.size)
    for rv in np.unique(r):
        sel = r == rv
        kern = standardized_binomial(int(rv))
        m = np.minimum(z[sel], rv - z[sel])
        M = kern.count_above(ts)
        # w_j > t  <=>  m_j < M(t)
        hist = np.bincount(m, minlength=kern.values.size)
        cum = np.concatenate([[0], np.cumsum(hist)])
        counts += cum[np.minimum(M, kern.values.size)]
        bbar = kern.tail_below(M)
        n_sel = int(np.count_nonzero(sel))
        mean += n_sel * bbar
        var += n_sel * bbar * (1.0 - bbar)
    return counts, mean, var


def _hc_value(z, r, ts):
    counts, mean, var = _exceedances(z, r, ts)
    ok = var > 0
    if not ok.any():
        raise DegenerateStatisticError("every HC grid point has zero null variance")
    if not ok.all():
        log.debug("HC: skipping grid points %s with zero null variance", ts[~ok])
    w = np.full(ts.size, -np.inf)
    w[ok] = (counts[ok] - mean[ok]) / np.sqrt(var[ok])
    i = int(np.argmax(w))
    return float(w[i]), {"t_grid": ts, "w": w, "argmax_t": float(ts[i])}


def _check_hc_r(zs):
    if zs.p < 2:
        raise InvalidConfigurationError("HC needs at least two columns")
    if zs.r.min() < 2:
        raise InvalidConfigurationError("HC requires every r_j >= 2")


def hc_statistic(zs: ZStatistics, eps=0.05, cutoff="log") -> TestReport:
    """Discretized Higher Criticism: max of ``W_p(t)`` over the integer grid.

    ``cutoff="log"`` rejects above ``(1 + eps) log p``; ``cutoff="loglog"``
    uses ``sqrt(2 (1 + eps) log log p)``, which is only valid when every
    ``r_j`` is much larger than ``log p``.
    """
    _check_hc_r(zs)
    ts = hc_grid(zs.p)
    if ts.size == 0:
        raise DegenerateStatisticError(f"empty HC grid for p={zs.p}")
    stat, details = _hc_value(zs.z, zs.r, ts)
    return TestReport("HC", stat, _hc_threshold(zs.p, eps, cutoff), details)


def _hc_threshold(p, eps, cutoff):
    if cutoff == "log":
        return (1.0 + eps) * math.log(p)
    if cutoff == "loglog":
        return math.sqrt(2.0 * (1.0 + eps) * math.log(math.log(p)))
    raise InvalidConfigurationError(f"unknown HC cutoff {cutoff!r}")


def _hc_ideal_value(z, r):
    kern = standardized_binomial(int(r))
    p = z.size
    m = np.minimum(z, r - z)
    cand = np.arange(kern.values.size)
    # interval [values[m+1], values[m]) must meet (0, r/2)
    lower = np.append(kern.values[1:], 0.0)
    cand = cand[(kern.values > 0) & (lower < r / 2.0)]
    counts = np.cumsum(np.bincount(m, minlength=kern.values.size))[cand]
    bbar = kern.survival_at_or_above(cand)
    ok = (bbar > 0) & (bbar < 1)
    if not ok.any():
        raise DegenerateStatisticError("no nondegenerate threshold for the ideal HC")
    w = (counts[ok] - p * bbar[ok]) / np.sqrt(p * bbar[ok] * (1.0 - bbar[ok]))
    i = int(np.argmax(w))
    return float(w[i]), {"argmax_t_below": float(kern.values[cand[ok][i]])}


def hc_ideal(zs: ZStatistics, eps=0.05) -> TestReport:
    """Supremum of ``W_p(t)`` over all ``0 < t < r/2`` (equal ``r_j`` only).

    ``W_p`` is a step function, so the supremum is a maximum over the values
    just below each achievable standardized deviation.
    """
    _check_hc_r(zs)
    if np.any(zs.r != zs.r[0]):
        raise UnsupportedConfigurationError("the ideal HC needs equal r_j")
    stat, details = _hc_ideal_value(zs.z, int(zs.r[0]))
    return TestReport("HC-ideal", stat, _hc_threshold(zs.p, eps, "log"), details)


def _pvalues(z, r):
    q = np.empty(z.size)
    for rv in np.unique(r):
        sel = r == rv
        q[sel] = standardized_binomial(int(rv)).pvalue(z[sel])
    return q


def _hc_pvalue_value(z, r, half_range):
    p = z.size
    q = np.sort(_pvalues(z, r), kind="stable")
    if half_range:
        q = q[: p // 2]
    j = np.arange(1, q.size + 1)
    ok = (q > 0) & (q < 1)
    if not ok.any():
        raise DegenerateStatisticError("every ordered p-value is 0 or 1")
    if not ok.all():
        log.debug("HC p-value: skipping %d degenerate order statistics", np.count_nonzero(~ok))
    terms = math.sqrt(p) * (j[ok] / p - q[ok]) / np.sqrt(q[ok] * (1.0 - q[ok]))
    i = int(np.argmax(terms))
    # a skipped q = 0 term would be +inf in the limit; callers comparing
    # against the ideal HC need to know whether one was dropped
    n_zero = int(np.count_nonzero(q == 0))
    return float(terms[i]), {"argmax_j": int(j[ok][i]), "skipped": int(np.count_nonzero(~ok)),
                             "skipped_zero": n_zero}


def hc_pvalue(zs: ZStatistics, half_range=False, threshold=None, eps=0.05) -> TestReport:
    """Higher Criticism over ordered exact two-sided p-values.

    ``half_range=True`` restricts the maximum to the smallest ``p // 2``
    p-values.  Order statistics equal to 0 or 1 are skipped.
    """
    _check_hc_r(zs)
    stat, details = _hc_pvalue_value(zs.z, zs.r, half_range)
    if threshold is None:
        threshold = _hc_threshold(zs.p, eps, "log")
    return TestReport("HC-halfrange" if half_range else "HC-pvalue", stat, float(threshold),
                      details)


@dataclass(frozen=True)
class _GNullModel:
    cols: np.ndarray
    mean: np.ndarray
    sd: np.ndarray


@lru_cache(maxsize=16)
def _g_null_model(key, ts_tuple, n_rep, seed):
    indptr_b, indices_b, p, g_b = key
    indptr = np.frombuffer(indptr_b, dtype=np.int64)
    indices = np.frombuffer(indices_b, dtype=np.int64)
    g = np.frombuffer(g_b, dtype=np.int64)
    G = sparse.csr_matrix((np.ones(indices.size), indices, indptr), shape=(indptr.size - 1, p))
    ts = np.asarray(ts_tuple)
    cols = np.flatnonzero(g >= 2)
    Gc = G[:, cols].tocsc()
    gc = g[cols]
    # exact marginal exceedance probabilities: Z_j^G ~ Bin(g_j, 1/2) under H0
    mean = np.zeros(ts.size)
    for gv in np.unique(gc):
        kern = standardized_binomial(int(gv))
        mean += np.count_nonzero(gc == gv) * kern.survival(ts)
    rng = np.random.default_rng(seed)
    totals = np.zeros((n_rep, ts.size))
    chunk = max(1, 2_000_000 // max(G.shape[0], cols.size * ts.size, 1))
    for a in range(0, n_rep, chunk):
        b = min(a + chunk, n_rep)
        y = rng.integers(0, 2, size=(b - a, G.shape[0])).astype(float)
        zg = np.rint(np.asarray(Gc.T @ y.T).T).astype(np.int64)
        w = standardized_deviation(zg, gc)
        totals[a:b] = (w[:, :, None] > ts[None, None, :]).sum(axis=1)
    sd = totals.std(axis=0, ddof=1) if n_rep > 1 else np.zeros(ts.size)
    return _GNullModel(cols=cols, mean=mean, sd=sd)


def hc_combined(zs: ZStatistics, eps=0.05, n_rep=10_000, seed=0) -> TestReport:
    """Per-threshold maximum of the HC terms from the singleton rows and from G.

    The G-part exceedance probabilities are exact (``Z_j^G`` is marginally
    ``Bin(g_j, 1/2)``); the variance of their sum, which depends on the
    overlap between rows of G, is estimated by seeded null Monte Carlo.
    The cutoff is ``(1 + eps) log(2p)`` for the union of the two families.
    """
    if zs.g_matrix is None or not np.any(zs.g >= 2):
        rep = hc_statistic(zs, eps=eps)
        rep.name = "HC-combined"
        rep.details["fallback"] = True
        return rep
    _check_hc_r(zs)
    ts = hc_grid(zs.p)
    counts, mean, var = _exceedances(zs.z, zs.r, ts)
    w_orth = np.where(var > 0, (counts - mean) / np.sqrt(np.where(var > 0, var, 1.0)), -np.inf)
    G = sparse.csr_matrix(zs.g_matrix)
    key = (G.indptr.astype(np.int64).tobytes(), G.indices.astype(np.int64).tobytes(), zs.p,
           np.ascontiguousarray(zs.g, dtype=np.int64).tobytes())
    null = _g_null_model(key, tuple(ts.tolist()), int(n_rep), int(seed))
    wg = standardized_deviation(zs.z_g[null.cols], zs.g[null.cols])
    count_g = (wg[:, None] > ts[None, :]).sum(axis=0)
    w_g = np.where(null.sd > 0, (count_g - null.mean) / np.where(null.sd > 0, null.sd, 1.0),
                   -np.inf)
    w = np.maximum(w_orth, w_g)
    if not np.isfinite(w).any():
        raise DegenerateStatisticError("every combined HC grid point is degenerate")
    i = int(np.argmax(w))
    details = {"t_grid": ts, "w": w_orth, "w_g": w_g, "argmax_t": float(ts[i]),
               "fallback": False}
    return TestReport("HC-combined", float(w[i]), (1.0 + eps) * math.log(2 * zs.p), details)


# -- Max test ---------------------------------------------------------


def max_test(zs: ZStatistics, eps=0.05, threshold=None) -> TestReport:
    """Largest standardized column deviation ``|Z_j - r_j/2| / sqrt(r_j/4)``."""
    used = np.flatnonzero(zs.r >= 1)
    if used.size == 0:
        raise DegenerateStatisticError("no column has a singleton row")
    w = standardized_deviation(zs.z[used], zs.r[used])
    i = int(np.argmax(w))
    if threshold is None:
        threshold = math.sqrt(2.0 * (1.0 + eps) * math.log(max(used.size, 2)))
    return TestReport("Max", float(w[i]), float(threshold), {"argmax_column": int(used[i])})


# -- exact Bayes likelihood ratio -------------------------------------


def _prior_support(prior: SparseSignalPrior, budget: int) -> np.ndarray:
    n_sets = math.comb(prior.p, prior.k)
    total = n_sets * prior.n_sign_patterns
    if total > budget:
        raise UnsupportedConfigurationError(
            f"prior has {total} atoms, above the enumeration budget {budget}")
    supports = np.array(list(itertools.combinations(range(prior.p), prior.k)), dtype=np.int64)
    if prior.two_sided:
        signs = np.array(list(itertools.product((1.0, -1.0), repeat=prior.k)))
    else:
        signs = np.array([[1.0] * prior.k, [-1.0] * prior.k])
    betas = np.zeros((n_sets, signs.shape[0], prior.p))
    rows = np.arange(n_sets)[:, None, None]
    sg = np.arange(signs.shape[0])[None, :, None]
    betas[rows, sg, supports[:, None, :]] = prior.A * signs[None, :, :]
    return betas.reshape(-1, prior.p)


_NEG = -1e300  # stands in for log(0) so that 0 * log(0) stays 0 in matrix products


def _log_two_theta(link, eta):
    lt = link.log_evaluate(eta) + math.log(2.0)
    return np.where(np.isfinite(lt), lt, _NEG)


def bayes_lr(design: BinaryDesign, y, prior: SparseSignalPrior, link, budget=ENUMERATION_BUDGET):
    """Exact prior-integrated likelihood ratio ``L_pi(y)`` by enumeration.

    ``L_pi = E_pi prod_i 2 theta(x_i'b)^y_i theta(-x_i'b)^(1 - y_i)``.
    ``y`` may be a single response (shape ``(n,)``) or a batch ``(m, n)``.
    """
    link = get_link(link)
    if prior.p != design.p:
        raise InvalidConfigurationError("prior and design disagree on p")
    Y = np.atleast_2d(np.asarray(y, dtype=float))
    if Y.shape[1] != design.n:
        raise InvalidConfigurationError(f"y has length {Y.shape[1]}, design has n={design.n}")
    betas = _prior_support(prior, budget)
    X = design.to_dense().astype(float)
    n_beta = betas.shape[0]
    chunk = max(1, 4_000_000 // max(design.n, 1))
    parts = []
    for a in range(0, n_beta, chunk):
        eta = betas[a:a + chunk] @ X.T
        up = _log_two_theta(link, eta)
        down = _log_two_theta(link, -eta)
        ll = Y @ up.T + (1.0 - Y) @ down.T
        parts.append(logsumexp(ll, axis=1))
    log_l = logsumexp(np.stack(parts, axis=1), axis=1) - math.log(n_beta)
    out = np.exp(log_l)
    return out if np.ndim(y) == 2 else float(out[0])


def bayes_lr_second_moment(design: BinaryDesign, prior: SparseSignalPrior, link,
                           budget=ENUMERATION_BUDGET) -> float:
    """Exact ``E_0(L_pi^2)`` by double enumeration over the prior.

    ``E_0 L^2 = E_{b, b'} prod_i 2 [theta(eta_i) theta(eta'_i) + theta(-eta_i) theta(-eta'_i)]``
    with ``b, b'`` independent prior draws.  The number of ordered pairs must
    stay within ``10 * budget``.
    """
    link = get_link(link)
    if prior.p != design.p:
        raise InvalidConfigurationError("prior and design disagree on p")
    betas = _prior_support(prior, budget)
    n_beta = betas.shape[0]
    if n_beta * n_beta > 10 * budget:
        raise UnsupportedConfigurationError(
            f"{n_beta}^2 prior pairs exceed the double-enumeration budget")
    eta = betas @ design.to_dense().astype(float).T
    lp, lm = link.log_evaluate(eta), link.log_evaluate(-eta)
    chunk = max(1, 4_000_000 // max(n_beta * design.n, 1))
    parts = []
    for a in range(0, n_beta, chunk):
        s = np.logaddexp(lp[a:a + chunk, None, :] + lp[None, :, :],
                         lm[a:a + chunk, None, :] + lm[None, :, :])
        parts.append(logsumexp((s + math.log(2.0)).sum(axis=2)))
    return float(np.exp(logsumexp(parts) - 2.0 * math.log(n_beta)))
