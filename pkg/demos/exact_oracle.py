"""Exact likelihood-ratio calculations on tiny problems.

Run with ``python3 demos/exact_oracle.py``.
"""

import itertools

import numpy as np

from sparse_detect import LOGISTIC, UNIFORM, SparseSignalPrior, make_anova
from sparse_detect.detection import bayes_lr, bayes_lr_second_moment

# With one observation per coefficient, a sign-symmetric prior leaves the
# response distribution untouched.  The integrated likelihood ratio is
# exactly one on every outcome, whatever the signal size.

design = make_anova(8, 1)
outcomes = np.array(list(itertools.product((0, 1), repeat=design.n)))
for A in (0.1, 1.0, 10.0):
    lr = bayes_lr(design, outcomes, SparseSignalPrior(8, 2, A), LOGISTIC)
    print(f"r=1, A={A:5.1f}: max |L - 1| over {len(outcomes)} outcomes = "
          f"{np.max(np.abs(lr - 1)):.1e}")

# Two replicates per coefficient break the symmetry.  The second moment
# E0[L^2] measures how far the alternative mixture sits from the null;
# values near one mean no test can do much better than guessing.

design = make_anova(6, 2)
for A in (0.1, 0.3, 0.5):
    prior = SparseSignalPrior(6, 2, A)
    exact = bayes_lr_second_moment(design, prior, UNIFORM)
    y = np.random.default_rng(0).integers(0, 2, size=(20_000, design.n))
    sq = bayes_lr(design, y, prior, UNIFORM) ** 2
    se = sq.std(ddof=1) / np.sqrt(sq.size)
    print(f"r=2, A={A:.1f}: E0[L^2] exact {exact:.5f}, Monte Carlo {sq.mean():.5f} +/- {se:.5f}")
