"""Detection of sparse signals in high-dimensional binary regression.

Submodules
----------
model       links, sparse priors and response simulation
designs     binary design matrices, structure audits, nondetectability checks
binomial    exact Binomial(r, 1/2) kernel
detection   GLRT, Higher Criticism, Max test and the exact Bayes oracle
boundaries  closed-form boundary constants
simulation  Monte Carlo empirical risk
"""

from .boundaries import rho_star, signal_from_t, simulation_signal
from .designs import BinaryDesign, audit, load_design, make_anova
from .detection import ZStatistics, compute_z, glrt, hc_pvalue, hc_statistic, max_test
from .exceptions import (
    DegenerateStatisticError,
    DesignFormatError,
    InvalidConfigurationError,
    UnsupportedConfigurationError,
)
from .model import LOGISTIC, PROBIT, UNIFORM, LinkFunction, SparseSignalPrior
from .simulation import ExperimentSpec, run_experiment

__version__ = "0.1.0"
