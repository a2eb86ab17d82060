import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparse_detect.boundaries import (
    FAMILIES,
    BoundarySpec,
    alpha_from_k,
    dense_threshold,
    rho_star,
    signal_from_t,
    simulation_signal,
    t_from_signal,
)
from sparse_detect.exceptions import InvalidConfigurationError
from sparse_detect.model import LOGISTIC, PROBIT, UNIFORM

SMOOTH = ("linear", "binary", "binomial")


@pytest.mark.parametrize("family", SMOOTH)
def test_continuity_at_three_quarters(family):
    below = rho_star(family, np.nextafter(0.75, 0))
    at = rho_star(family, 0.75)
    assert at == rho_star(family, 0.75)
    assert below == pytest.approx(at, abs=1e-15)
    # both branches are exactly 1/4 of the common numerator there
    assert (0.75 - 0.5) == (1 - math.sqrt(1 - 0.75)) ** 2


@pytest.mark.parametrize("alpha, want", [(0.6, 0.1), (0.7, 0.2), (1.0, 1.0)])
def test_linear_values(alpha, want):
    assert rho_star("linear", alpha) == pytest.approx(want, abs=1e-15)


def test_binary_logistic_at_three_quarters():
    assert rho_star("binary", 0.75, LOGISTIC.derivative_at_zero) == pytest.approx(1.0)


@pytest.mark.parametrize("link", [LOGISTIC, PROBIT, UNIFORM], ids=lambda l: l.kind)
def test_binary_binomial_relation(link):
    t0 = link.derivative_at_zero
    for a in np.linspace(0.51, 1.0, 50):
        got = rho_star("binary", a, t0) * t0 ** 2
        assert abs(got - rho_star("binomial", a)) <= 1e-12


def test_max_gap_on_moderate_range():
    for a in np.linspace(0.5 + 1e-3, 0.75 - 1e-3, 60):
        assert rho_star("max-binary", a) > rho_star("binary", a)
        assert rho_star("max-binomial", a) > rho_star("binomial", a)
    for a in np.linspace(0.75, 1.0, 30):
        assert rho_star("max-binary", a) == rho_star("binary", a)


@pytest.mark.parametrize("family", FAMILIES)
def test_monotone_in_alpha(family):
    vals = [rho_star(family, a) for a in np.linspace(0.501, 1.0, 200)]
    assert np.all(np.diff(vals) >= 0)


@pytest.mark.parametrize("alpha", [0.5, 0.3, 1.01, -0.2])
@pytest.mark.parametrize("family", FAMILIES)
def test_domain(family, alpha):
    with pytest.raises(InvalidConfigurationError):
        rho_star(family, alpha)


def test_dense_extension_is_the_first_branch():
    assert rho_star("linear", 0.3, extend_dense=True) == pytest.approx(-0.2)
    with pytest.raises(InvalidConfigurationError):
        rho_star("max-binary", 0.3, extend_dense=True)


def test_boundary_spec():
    assert BoundarySpec("binomial", 0.9).value() == rho_star("binomial", 0.9)
    with pytest.raises(InvalidConfigurationError):
        BoundarySpec("gaussian", 0.9)


def test_figure_four_signal_at_zero_offset():
    alpha = alpha_from_k(2, 10_000)
    assert alpha == pytest.approx(0.9247, abs=1e-4)
    assert rho_star("binary", alpha, 0.25) == pytest.approx(2.105, abs=2e-3)
    assert simulation_signal(0.0, alpha, 10_000, 4, LOGISTIC) == pytest.approx(3.114, abs=1e-3)


def test_signal_from_t():
    assert signal_from_t(1.0, 10_000, 4) == pytest.approx(math.sqrt(2 * math.log(10_000) / 4))
    assert signal_from_t(1.0, 10_000, 4) == pytest.approx(2.146, abs=1e-3)
    with pytest.raises(InvalidConfigurationError):
        signal_from_t(-1.0, 100, 2)


@given(st.floats(0, 50), st.integers(2, 10 ** 6), st.integers(1, 10 ** 5))
@settings(max_examples=200, deadline=None)
def test_signal_roundtrip(t, p, r):
    assert t_from_signal(signal_from_t(t, p, r), p, r) == pytest.approx(t, abs=1e-9)


def test_clamp_boundary():
    alpha = alpha_from_k(2, 10_000)
    rho = rho_star("binary", alpha, 0.25)
    assert simulation_signal(-rho, alpha, 10_000, 4, LOGISTIC, clamped=True) == 0.0
    assert simulation_signal(-rho - 1, alpha, 10_000, 4, LOGISTIC, clamped=True) == 0.0
    with pytest.raises(InvalidConfigurationError):
        simulation_signal(-rho - 1, alpha, 10_000, 4, LOGISTIC)


def test_signal_monotone_in_offset():
    alpha = alpha_from_k(7, 10_000)
    vals = [simulation_signal(t, alpha, 10_000, 4, LOGISTIC) for t in np.linspace(0, 20, 41)]
    assert np.all(np.diff(vals) > 0)


def test_dense_offsets_use_the_extended_boundary():
    alpha = alpha_from_k(631, 10_000)
    assert alpha < 0.5
    assert simulation_signal(0.0, alpha, 10_000, 4, LOGISTIC, clamped=True) == 0.0
    assert simulation_signal(1.0, alpha, 10_000, 4, LOGISTIC, clamped=True) > 0.0


@pytest.mark.parametrize("p, k, r, want", [(10_000, 100, 4, 0.5), (10_000, 631, 4, 0.199)])
def test_dense_threshold(p, k, r, want):
    assert dense_threshold(p, k, r) == pytest.approx(want, abs=1e-3)


def test_dense_threshold_scaling():
    assert dense_threshold(400, 3, 20) == pytest.approx(dense_threshold(400, 3, 5) / 2)
