"""Audit a binary design before running any detection experiment.

Run with ``python3 demos/audit_design.py``.
"""

import numpy as np

from sparse_detect import audit
from sparse_detect.designs import (
    estimate_nondetect_condition,
    make_anova,
    make_banded,
    make_weakly_correlated,
)

# A weakly correlated design has an orthogonal part (rows touching a single
# column) plus a handful of rows shared between columns.  The audit reports
# the replicate counts, the size of the shared part and the ratios used to
# judge whether that shared part is small enough to ignore.

design = make_weakly_correlated(93, 148, 148, 25, 2, np.random.default_rng(10))
report = audit(design)
print(f"p={report.p}  r*={report.r_star}  n_*={report.n_sub_star}  Q={report.q}")
print(f"ratios: p^(1/4) {report.c3_ratio_p_quarter:.2f}, sqrt(p) {report.c3_ratio_sqrt_p:.2f}, "
      f"log p {report.c3_ratio_log_p:.2f}")
print("verdicts:", report.verdicts)

# The nondetectability check samples pairs of k-subsets and bounds how many
# rows they share relative to how many of their elements sit close together.
# A balanced one-way layout shares exactly r rows per coincident column.

for r in (2, 5):
    est = estimate_nondetect_condition(make_anova(200, r), 3, n_pairs=2000, rng=r)
    print(f"ANOVA({r}): delta_hat = {est.delta_hat:g}, verdict {est.verdict}")

banded = make_banded(2000, 2000, 0, 2)
est = estimate_nondetect_condition(banded, 2, n_pairs=5000, rng=0)
print(f"banded (0, 2): delta_hat = {est.delta_hat:g}, violations {est.violations}, "
      f"verdict {est.verdict}")
