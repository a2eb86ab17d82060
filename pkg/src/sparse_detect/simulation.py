"""Monte Carlo empirical risk of the global-null tests.

For each offset ``t`` the engine draws ``n_trials`` null datasets and
``n_trials`` alternative datasets, evaluates every requested statistic and
reports the smallest achievable type I + type II error over all cut points.

Trial ``i`` of arm ``a`` (0 = null, 1 = alternative) at grid index ``s``
draws from ``default_rng([base_seed, s, a, i])``, so results do not depend on
how trials are spread over worker processes.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import detection as det
from .boundaries import alpha_from_k, rho_star, simulation_signal
from .designs import BinaryDesign, load_design, make_anova, make_weakly_correlated
from .exceptions import DegenerateStatisticError, InvalidConfigurationError
from .model import SparseSignalPrior, get_link, sample_prior

__all__ = [
    "TEST_NAMES",
    "SIGNAL_RULES",
    "ExperimentSpec",
    "RiskPoint",
    "RiskCurve",
    "build_design",
    "sample_z",
    "estimate_empirical_risk",
    "run_experiment",
    "persist_results",
    "read_results",
    "figure4_specs",
    "figure5_specs",
]

TEST_NAMES = ("GLRT", "GLRT-combined", "HC", "HC-disc", "HC-ideal", "HC-pvalue",
              "HC-combined", "Max")
SIGNAL_RULES = ("fig4-clamped", "fig5", "explicit-A")
CSV_HEADER = ["test", "t", "A", "risk", "stderr", "n_trials", "seed"]

FIGURE4_K = (2, 7, 159, 631)
FIGURE5_K = (2, 7, 40, 159)


@dataclass(frozen=True)
class ExperimentSpec:
    """Resolved description of one risk-curve experiment.

    ``design`` is a mapping with a ``kind`` key: ``anova`` (``p``, ``r``),
    ``weakly-correlated`` (``p``, ``r_low``, ``r_high``, ``n_G``, ``Q_G``,
    ``seed``) or ``file`` (``path``, ``format``).  ``HC`` denotes the
    half-range p-value statistic; ``HC-disc`` is the integer-grid statistic.
    """

    design: dict
    k: int
    t_grid: tuple
    link: str = "logistic"
    signal_rule: str = "fig4-clamped"
    n_trials: int = 300
    tests: tuple = ("GLRT", "HC", "Max")
    base_seed: int = 0
    sidedness: str = "two-sided"
    r_param: str = "r_sub_star"

    def __post_init__(self):
        object.__setattr__(self, "t_grid", tuple(float(t) for t in self.t_grid))
        object.__setattr__(self, "tests", tuple(self.tests))
        object.__setattr__(self, "design", dict(self.design))
        if self.n_trials < 1:
            raise InvalidConfigurationError("n_trials must be positive")
        if not self.t_grid:
            raise InvalidConfigurationError("t_grid must be nonempty")
        if not self.tests:
            raise InvalidConfigurationError("tests must be nonempty")
        unknown = [t for t in self.tests if t not in TEST_NAMES]
        if unknown:
            raise InvalidConfigurationError(f"unknown tests {unknown}; choose from {TEST_NAMES}")
        if self.signal_rule not in SIGNAL_RULES:
            raise InvalidConfigurationError(f"unknown signal rule {self.signal_rule!r}")
        if self.r_param not in ("r_star", "r_sub_star"):
            raise InvalidConfigurationError(f"unknown r_param {self.r_param!r}")
        if self.k < 1:
            raise InvalidConfigurationError("k must be positive")
        get_link(self.link)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["t_grid"] = list(self.t_grid)
        d["tests"] = list(self.tests)
        return d

    @classmethod
    def from_dict(cls, d) -> "ExperimentSpec":
        return cls(**d)


@dataclass(frozen=True)
class RiskPoint:
    test: str
    t: float
    A: float
    risk: float
    stderr: float
    n_null: int
    n_alt: int


@dataclass
class RiskCurve:
    spec: ExperimentSpec
    points: list
    signals: list = field(default_factory=list)
    unavailable: dict = field(default_factory=dict)

    def risk(self, test: str, t: float) -> float:
        for pt in self.points:
            if pt.test == test and pt.t == t:
                return pt.risk
        raise KeyError((test, t))

    def curve(self, test: str):
        pts = sorted((pt for pt in self.points if pt.test == test), key=lambda q: q.t)
        return np.array([q.t for q in pts]), np.array([q.risk for q in pts])

    @property
    def tests(self):
        return [t for t in self.spec.tests if t not in self.unavailable]


def build_design(design_spec: dict) -> BinaryDesign:
    kind = design_spec.get("kind")
    if kind == "anova":
        return make_anova(int(design_spec["p"]), int(design_spec["r"]))
    if kind == "weakly-correlated":
        return make_weakly_correlated(
            int(design_spec["p"]), int(design_spec["r_low"]), int(design_spec["r_high"]),
            int(design_spec.get("n_G", 0)), int(design_spec.get("Q_G", 2)),
            np.random.default_rng(int(design_spec.get("seed", 0))))
    if kind == "file":
        return load_design(design_spec["path"], design_spec.get("format", "dense-csv"))
    raise InvalidConfigurationError(f"unknown design kind {kind!r}")


def sample_z(design: BinaryDesign, beta, link, rng) -> det.ZStatistics:
    """Draw column counts directly.

    The singleton rows of column ``j`` contribute ``Bin(r_j, theta(beta_j))``
    successes, which is the law of ``Z_j`` under independent responses; the
    rows of G are drawn individually.
    """
    link = get_link(link)
    beta = np.asarray(beta, dtype=float)
    prob = np.broadcast_to(link.evaluate(beta), (design.p,))
    z = rng.binomial(design.r, prob)
    if design.n_sub_star:
        G = design.g_matrix()
        y = (rng.random(design.n_sub_star) < link.evaluate(G @ beta)).astype(np.int64)
        z_g = np.asarray(G.T @ y, dtype=np.int64)
        return det.ZStatistics(z=z, r=design.r, z_g=z_g, g=design.g, g_matrix=G)
    zero = np.zeros(design.p, dtype=np.int64)
    return det.ZStatistics(z=z, r=design.r, z_g=zero, g=zero)


def estimate_empirical_risk(null_stats, alt_stats) -> float:
    """``min_c [P_null(T > c) + P_alt(T <= c)]`` over all cut points."""
    return _risk_at_best_cut(null_stats, alt_stats)[0]


def _risk_at_best_cut(null_stats, alt_stats):
    null = np.sort(np.asarray(null_stats, dtype=float))
    alt = np.sort(np.asarray(alt_stats, dtype=float))
    if null.size == 0 or alt.size == 0:
        raise InvalidConfigurationError("both statistic samples must be nonempty")
    cuts = np.unique(np.concatenate([null, alt]))
    type1 = (null.size - np.searchsorted(null, cuts, side="right")) / null.size
    type2 = np.searchsorted(alt, cuts, side="right") / alt.size
    total = type1 + type2
    i = int(np.argmin(total))
    # the cut below every value gives type I = 1, type II = 0
    if total[i] >= 1.0:
        return 1.0, 1.0, 0.0
    return float(total[i]), float(type1[i]), float(type2[i])


# -- per-dataset statistics -------------------------------------------


def _availability(design: BinaryDesign, tests):
    out = {}
    r_min = design.r_sub_star
    for name in tests:
        if name.startswith("HC") and r_min < 2:
            out[name] = "requires every r_j >= 2"
        elif name == "HC-ideal" and design.r_star != r_min:
            out[name] = "requires equal r_j"
        elif name in ("GLRT", "Max", "GLRT-combined") and design.r_star < 1:
            out[name] = "requires singleton rows"
    return out


def _statistics(zs: det.ZStatistics, tests, ctx) -> list:
    values = []
    for name in tests:
        try:
            if name == "GLRT":
                v = det._glrt_value(zs.z, zs.r)[0]
            elif name == "GLRT-combined":
                v = det._glrt_combined_value(zs, ctx["moments"])[0]
            elif name == "HC":
                v = det._hc_pvalue_value(zs.z, zs.r, half_range=True)[0]
            elif name == "HC-pvalue":
                v = det._hc_pvalue_value(zs.z, zs.r, half_range=False)[0]
            elif name == "HC-disc":
                v = det._hc_value(zs.z, zs.r, ctx["grid"])[0]
            elif name == "HC-ideal":
                v = det._hc_ideal_value(zs.z, int(zs.r[0]))[0]
            elif name == "HC-combined":
                v = det.hc_combined(zs, seed=ctx["seed"]).statistic
            else:
                v = det.max_test(zs).statistic
        except DegenerateStatisticError:
            v = -math.inf
        values.append(v)
    return values


def _run_unit(args):
    design, spec_dict, s_index, arm, A, start, stop, tests = args
    spec = ExperimentSpec.from_dict(spec_dict)
    link = get_link(spec.link)
    ctx = {"grid": det.hc_grid(design.p), "seed": spec.base_seed}
    if "GLRT-combined" in tests:
        ctx["moments"] = det.g_moments(design)
    prior = SparseSignalPrior(design.p, spec.k, A, spec.sidedness) if arm == 1 else None
    out = np.empty((stop - start, len(tests)))
    for row, i in enumerate(range(start, stop)):
        rng = np.random.default_rng([spec.base_seed, s_index, arm, i])
        beta = sample_prior(prior, rng) if prior is not None else np.zeros(design.p)
        out[row] = _statistics(sample_z(design, beta, link, rng), tests, ctx)
    return out


def _signal(spec: ExperimentSpec, design: BinaryDesign, t: float):
    """Alternative signal strength for offset ``t`` under both r parameterizations."""
    if spec.signal_rule == "explicit-A":
        return {"A": t, "A_r_star": t, "A_r_sub_star": t}
    alpha = alpha_from_k(spec.k, design.p)
    clamped = spec.signal_rule == "fig4-clamped"
    out = {}
    for key, rv in (("A_r_star", design.r_star), ("A_r_sub_star", design.r_sub_star)):
        out[key] = simulation_signal(t, alpha, design.p, max(int(rv), 1), spec.link,
                                     clamped=clamped)
    out["A"] = out["A_" + spec.r_param]
    out["alpha"] = alpha
    return out


def run_experiment(spec: ExperimentSpec, workers: int = 1, chunk: int = 50,
                   design: BinaryDesign | None = None) -> RiskCurve:
    """Empirical risk of each requested test at each offset in ``spec.t_grid``."""
    design = build_design(spec.design) if design is None else design
    if spec.k > design.p:
        raise InvalidConfigurationError(f"k={spec.k} exceeds p={design.p}")
    unavailable = _availability(design, spec.tests)
    for name, why in unavailable.items():
        warnings.warn(f"test {name} unavailable: {why}", stacklevel=2)
    tests = tuple(t for t in spec.tests if t not in unavailable)
    signals = [_signal(spec, design, t) for t in spec.t_grid]
    if not tests:
        return RiskCurve(spec=spec, points=[], signals=signals, unavailable=unavailable)

    spec_dict = spec.to_dict()
    units = []
    for s, sig in enumerate(signals):
        for arm in (0, 1):
            for a in range(0, spec.n_trials, chunk):
                units.append((design, spec_dict, s, arm, sig["A"], a,
                              min(a + chunk, spec.n_trials), tests))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_unit, units))
    else:
        results = [_run_unit(u) for u in units]

    stats = {}
    for unit, res in zip(units, results):
        stats.setdefault((unit[2], unit[3]), []).append(res)
    points = []
    for name_i, name in enumerate(tests):
        for s, t in enumerate(spec.t_grid):
            null = np.concatenate(stats[(s, 0)])[:, name_i]
            alt = np.concatenate(stats[(s, 1)])[:, name_i]
            risk, e1, e2 = _risk_at_best_cut(null, alt)
            stderr = math.sqrt(e1 * (1 - e1) / null.size + e2 * (1 - e2) / alt.size)
            points.append(RiskPoint(name, t, signals[s]["A"], risk, stderr, null.size, alt.size))
    return RiskCurve(spec=spec, points=points, signals=signals, unavailable=unavailable)


def persist_results(curve: RiskCurve, path) -> Path:
    """Write the risk curve as CSV plus a JSON echo of the experiment next to it."""
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for pt in curve.points:
                w.writerow([pt.test, repr(pt.t), repr(pt.A), repr(pt.risk), repr(pt.stderr),
                            pt.n_null, curve.spec.base_seed])
        meta = {"spec": curve.spec.to_dict(), "signals": curve.signals,
                "unavailable": curve.unavailable}
        path.with_suffix(".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
    return path


def read_results(path) -> list:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        for key in ("t", "A", "risk", "stderr"):
            row[key] = float(row[key])
        for key in ("n_trials", "seed"):
            row[key] = int(row[key])
    return rows


def figure4_specs(n_trials=300, t_grid=range(7), base_seed=0, k_values=FIGURE4_K, **kw):
    """Balanced design with p = 10^4, r = ceil(sqrt(log p)) = 4, clamped offsets."""
    p = 10_000
    r = math.ceil(math.sqrt(math.log(p)))
    return [ExperimentSpec(design={"kind": "anova", "p": p, "r": r}, k=k, t_grid=tuple(t_grid),
                           signal_rule="fig4-clamped", n_trials=n_trials, base_seed=base_seed,
                           **kw)
            for k in k_values]


def figure5_specs(n_trials=300, t_grid=range(5), base_seed=0, k_values=FIGURE5_K, **kw):
    """Balanced design with p = 10^4, r = ceil(log(p)^5) = 66280.

    Offsets for which the dense-level boundary constant plus ``t`` is
    negative are dropped from that panel's grid.
    """
    p = 10_000
    r = math.ceil(math.log(p) ** 5)
    specs = []
    link = get_link(kw.get("link", "logistic"))
    for k in k_values:
        alpha = alpha_from_k(k, p)
        rho = rho_star("binary", alpha, link.derivative_at_zero, extend_dense=True)
        grid = tuple(t for t in t_grid if rho + t >= 0)
        specs.append(ExperimentSpec(design={"kind": "anova", "p": p, "r": r}, k=k, t_grid=grid,
                                    signal_rule="fig5", n_trials=n_trials, base_seed=base_seed,
                                    **kw))
    return specs
