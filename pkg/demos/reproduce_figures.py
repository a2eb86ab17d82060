"""Empirical risk curves for the ANOVA experiments at p = 10^4.

The first set uses four replicates per coefficient, where the sparse panels
stay undetectable and only the dense panel separates.  The second uses a very
large replicate count, where risk falls as the signal offset ``t`` grows.

Run with ``python3 demos/reproduce_figures.py [n_trials]``.  The default of
100 trials finishes in well under a minute; 300 matches the acceptance run.
CSV files land in ``demos/output``.
"""

import sys
from pathlib import Path

from sparse_detect.simulation import figure4_specs, figure5_specs, persist_results, run_experiment

n_trials = int(sys.argv[1]) if len(sys.argv) > 1 else 100
out = Path(__file__).with_name("output")
out.mkdir(exist_ok=True)


def show(label, spec):
    curve = run_experiment(spec)
    persist_results(curve, out / f"{label}_k{spec.k}.csv")
    print(f"\n{label}, k={spec.k}")
    print("  t    " + "".join(f"{name:>8}" for name in curve.tests))
    for t in spec.t_grid:
        print(f"  {t:<5g}" + "".join(f"{curve.risk(name, t):8.3f}" for name in curve.tests))


for spec in figure4_specs(n_trials=n_trials):
    show("r4", spec)

for spec in figure5_specs(n_trials=n_trials):
    show("r66280", spec)
