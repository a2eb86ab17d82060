"""Command-line front end: ``sparse-detect <subcommand> [flags]``.

Every subcommand accepts ``--config FILE``, a JSON object whose keys are
flag names without the leading dashes (for example ``"t-grid"``).  Values
given explicitly on the command line take precedence over the file.

Exit status is 0 on success, 2 for usage or configuration errors and 1 for
unexpected failures.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import math
import os
import sys
import warnings

import numpy as np

from . import boundaries, designs, detection, simulation
from .exceptions import InvalidConfigurationError
from .model import SparseSignalPrior, get_link

log = logging.getLogger("sparse_detect")

SEED_ENV = "SPARSE_DETECT_SEED"


class UsageError(Exception):
    """Raised for anything that should end with exit status 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- argument tables ----------------------------------------------------
#
# Each entry is (flag, argparse kwargs, default).  Defaults are applied after
# the config file is merged so that "not given" can be told apart from
# "given with the default value".

_SIMULATE = [
    ("p", dict(type=int, help="number of columns (balanced design)"), None),
    ("r", dict(type=int, help="singleton rows per column (balanced design)"), None),
    ("design", dict(help="design file; replaces --p/--r"), None),
    ("format", dict(choices=["dense-csv", "sparse-triplet"], help="design file format"),
     "dense-csv"),
    ("k", dict(type=int, help="number of nonzero coefficients"), None),
    ("alpha", dict(type=float, help="sparsity index; k = max(1, round(p^(1-alpha)))"), None),
    ("link", dict(choices=["logistic", "probit", "uniform"]), "logistic"),
    ("t-grid", dict(help="offsets: comma list or start:stop:step"), "0:6:1"),
    ("trials", dict(type=int, help="trials per arm and offset"), 300),
    ("seed", dict(type=int, help=f"base seed (fallback: ${SEED_ENV}, then 0)"), None),
    ("tests", dict(help=f"comma list from {','.join(simulation.TEST_NAMES)}"), "GLRT,HC,Max"),
    ("signal-rule", dict(choices=list(simulation.SIGNAL_RULES)), "fig4-clamped"),
    ("sidedness", dict(choices=["two-sided", "one-sided"]), "two-sided"),
    ("r-param", dict(choices=["r_star", "r_sub_star"],
                     help="which r enters the signal rule for unbalanced designs"), "r_sub_star"),
    ("workers", dict(type=int, help="worker processes"), 1),
    ("out", dict(help="output CSV path; the experiment JSON is written next to it"), "risk.csv"),
]

_BOUNDARY = [
    ("family", dict(choices=list(boundaries.FAMILIES)), None),
    ("alpha-grid", dict(help="alpha values: comma list or start:stop:step"), None),
    ("link", dict(choices=["logistic", "probit", "uniform"]), "logistic"),
    ("out", dict(help="output CSV path (default stdout)"), None),
]

_AUDIT = [
    ("design", dict(help="design file"), None),
    ("format", dict(choices=["dense-csv", "sparse-triplet"]), "dense-csv"),
    ("p-for-ratios", dict(type=int, help="p used in the ratio columns (default: design p)"),
     None),
    ("slack", dict(type=float, help="verdict a << b is reported as a < b / slack"), 1.0),
    ("alpha", dict(type=float, help="sparsity index for the dense-regime ratio"), None),
]

_NONDETECT = [
    ("design", dict(help="design file, or one of 'anova', 'banded'"), None),
    ("format", dict(choices=["dense-csv", "sparse-triplet"]), "dense-csv"),
    ("p", dict(type=int, help="columns of a generated design"), None),
    ("r", dict(type=int, help="rows per column of a generated anova design"), None),
    ("n", dict(type=int, help="rows of a generated banded design (default p)"), None),
    ("l1", dict(type=int, help="banded design lower offset"), 0),
    ("l2", dict(type=int, help="banded design upper offset"), 2),
    ("k", dict(type=int), None),
    ("sigma", dict(type=int, help="closeness radius (default ceil(log p))"), None),
    ("pairs", dict(type=int, help="sampled subset pairs"), 1000),
    ("exhaustive", dict(action="store_true", default=None,
                        help="enumerate every pair of k-subsets"), False),
    ("slack", dict(type=float), 1.0),
    ("seed", dict(type=int), None),
]

_ORACLE = [
    ("p", dict(type=int), None),
    ("k", dict(type=int), None),
    ("r", dict(type=int, help="rows per column of the balanced design"), 1),
    ("A", dict(type=float, help="signal amplitude"), 1.0),
    ("link", dict(choices=["logistic", "probit", "uniform"]), "logistic"),
    ("two-sided", dict(action="store_true", default=None), None),
    ("one-sided", dict(action="store_true", default=None), None),
    ("mc", dict(type=int, help="null Monte Carlo draws for the cross-check"), 10_000),
    ("budget", dict(type=int, help="enumeration budget (prior support size)"),
     detection.ENUMERATION_BUDGET),
    ("seed", dict(type=int), None),
]

_TABLES = {"simulate": _SIMULATE, "boundary": _BOUNDARY, "audit": _AUDIT,
           "nondetect": _NONDETECT, "oracle": _ORACLE}

_HELP = {
    "simulate": "Monte Carlo empirical risk curves",
    "boundary": "boundary constants over an alpha grid",
    "audit": "structure report of a design file",
    "nondetect": "estimate the shared-row nondetectability condition",
    "oracle": "exact likelihood-ratio checks on a tiny instance",
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sparse-detect", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, table in _TABLES.items():
        sp = sub.add_parser(name, help=_HELP[name], description=_HELP[name])
        sp.add_argument("--config", help="JSON file with flag values")
        for flag, kwargs, default in table:
            kwargs = dict(kwargs)
            kwargs.setdefault("default", None)
            if default is not None and "help" in kwargs:
                kwargs["help"] += f" (default {default})"
            elif default is not None:
                kwargs["help"] = f"default {default}"
            sp.add_argument(f"--{flag}", dest=flag.replace("-", "_"), **kwargs)
    return parser


def resolve_options(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and explicit flags (in increasing priority)."""
    table = _TABLES[args.command]
    opts = {flag: default for flag, _, default in table}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = sorted(set(cfg) - set(opts))
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        opts.update(cfg)
    for flag in opts:
        value = getattr(args, flag.replace("-", "_"))
        if value is not None:
            opts[flag] = value
    return opts


def parse_grid(text) -> list:
    """``"a:b:s"`` (inclusive of ``b`` up to rounding) or ``"x,y,z"``; lists pass through."""
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    text = str(text).strip()
    try:
        if ":" in text:
            parts = [float(v) for v in text.split(":")]
            if len(parts) != 3 or parts[2] <= 0:
                raise ValueError
            start, stop, step = parts
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 12) for i in range(max(count, 0))]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}") from None


def _seed(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"${SEED_ENV} must be an integer, got {env!r}") from None


def _require(opts, *flags):
    for flag in flags:
        if opts.get(flag) is None:
            raise UsageError(f"missing required flag --{flag}")


def _print_json(obj, out=None):
    (out or sys.stdout).write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


# -- subcommands ----------------------------------------------------------


def cmd_simulate(opts) -> int:
    if opts["design"]:
        design_spec = {"kind": "file", "path": opts["design"], "format": opts["format"]}
        p = designs.load_design(opts["design"], opts["format"]).p
    else:
        _require(opts, "p", "r")
        design_spec = {"kind": "anova", "p": opts["p"], "r": opts["r"]}
        p = opts["p"]
    if opts["k"] is None and opts["alpha"] is None:
        raise UsageError("missing required flag --k (or --alpha)")
    k = opts["k"]
    if k is None:
        k = max(1, round(p ** (1.0 - opts["alpha"])))
    tests = opts["tests"]
    if isinstance(tests, str):
        tests = [t.strip() for t in tests.split(",") if t.strip()]
    spec = simulation.ExperimentSpec(
        design=design_spec, k=k, t_grid=parse_grid(opts["t-grid"]), link=opts["link"],
        signal_rule=opts["signal-rule"], n_trials=opts["trials"], tests=tuple(tests),
        base_seed=_seed(opts["seed"]), sidedness=opts["sidedness"], r_param=opts["r-param"],
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        curve = simulation.run_experiment(spec, workers=max(1, opts["workers"]))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    path = simulation.persist_results(curve, opts["out"])
    print(f"wrote {path} and {path.with_suffix('.json')}", file=sys.stderr)
    return 0


def cmd_boundary(opts) -> int:
    _require(opts, "family", "alpha-grid")
    theta = get_link(opts["link"]).derivative_at_zero
    rows = [(a, opts["family"], boundaries.rho_star(opts["family"], a, theta))
            for a in parse_grid(opts["alpha-grid"])]
    lines = ["alpha,family,value"] + [f"{a!r},{fam},{round(v, 12)!r}" for a, fam, v in rows]
    text = "\n".join(lines) + "\n"
    if opts["out"]:
        with open(opts["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_audit(opts) -> int:
    _require(opts, "design")
    design = designs.load_design(opts["design"], opts["format"])
    report = designs.audit(design, p_for_ratios=opts["p-for-ratios"], slack=opts["slack"],
                           alpha=opts["alpha"])
    _print_json(report.to_dict())
    return 0


def _nondetect_design(opts):
    kind = opts["design"]
    if kind == "anova":
        _require(opts, "p", "r")
        return designs.make_anova(opts["p"], opts["r"])
    if kind == "banded":
        _require(opts, "p")
        n = opts["n"] if opts["n"] is not None else opts["p"]
        return designs.make_banded(n, opts["p"], opts["l1"], opts["l2"])
    return designs.load_design(kind, opts["format"])


def cmd_nondetect(opts) -> int:
    _require(opts, "design", "k")
    design = _nondetect_design(opts)
    if opts["k"] > design.p:
        raise UsageError(f"--k {opts['k']} exceeds p = {design.p}")
    if opts["exhaustive"]:
        est = designs.exact_nondetect_condition(design, opts["k"], opts["sigma"],
                                                slack=opts["slack"])
    else:
        est = designs.estimate_nondetect_condition(
            design, opts["k"], opts["sigma"], n_pairs=opts["pairs"],
            rng=_seed(opts["seed"]), slack=opts["slack"])
    _print_json(est.to_dict())
    return 0


def cmd_oracle(opts) -> int:
    _require(opts, "p", "k")
    if opts["two-sided"] and opts["one-sided"]:
        raise UsageError("--two-sided and --one-sided are mutually exclusive")
    sidedness = "one-sided" if opts["one-sided"] else "two-sided"
    design = designs.make_anova(opts["p"], opts["r"])
    prior = SparseSignalPrior(design.p, opts["k"], opts["A"], sidedness)
    link = get_link(opts["link"])
    budget = opts["budget"]
    rng = np.random.default_rng(_seed(opts["seed"]))

    second = detection.bayes_lr_second_moment(design, prior, link, budget=budget)
    y_mc = rng.integers(0, 2, size=(opts["mc"], design.n))
    l_mc = detection.bayes_lr(design, y_mc, prior, link, budget=budget)
    mc_mean_sq = float(np.mean(l_mc ** 2))
    mc_se = float(np.std(l_mc ** 2, ddof=1) / math.sqrt(l_mc.size)) if l_mc.size > 1 else math.nan

    identity = None
    if opts["r"] == 1 and sidedness == "two-sided":
        if design.n > 20:
            raise UsageError("the r = 1 identity check enumerates 2^n outcomes; need n <= 20")
        ys = np.array(list(itertools.product((0, 1), repeat=design.n)))
        l_all = detection.bayes_lr(design, ys, prior, link, budget=budget)
        dev = float(np.max(np.abs(l_all - 1.0)))
        identity = {"outcomes": int(ys.shape[0]), "max_abs_deviation": dev,
                    "verified": dev <= 1e-10}

    result = {
        "p": design.p, "k": prior.k, "r": opts["r"], "A": prior.A, "link": link.kind,
        "sidedness": sidedness,
        "L_summary": {"mc_draws": int(l_mc.size), "mean": float(l_mc.mean()),
                      "min": float(l_mc.min()), "max": float(l_mc.max())},
        "E0_L2_exact": second,
        "E0_L2_mc": mc_mean_sq,
        "E0_L2_mc_stderr": mc_se,
        "mc_delta": mc_mean_sq - second,
        "r1_identity": identity,
    }
    _print_json(result)
    if identity is not None:
        status = "verified" if identity["verified"] else "FAILED"
        print(f"L_pi == 1 on all {identity['outcomes']} outcomes: {status}", file=sys.stderr)
    return 0


_COMMANDS = {"simulate": cmd_simulate, "boundary": cmd_boundary, "audit": cmd_audit,
             "nondetect": cmd_nondetect, "oracle": cmd_oracle}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return _COMMANDS[args.command](resolve_options(args))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FileNotFoundError, IsADirectoryError) as exc:
        # configuration errors are ValueError subclasses
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
