import math

import pytest
from hypothesis import given, strategies as st

from genhilbert.carleson import (carleson_constant, exponent_estimate, predicted_condition,
                                 probe_tails, satisfies, vanishing_test)
from genhilbert.errors import DomainError, NoPredictionError
from genhilbert.measures import atomic, density, lebesgue


def test_probe_ladder():
    i, h, tails = probe_tails(lebesgue())
    assert len(i) == 40 and h[0] == 0.5 and h[-1] == 2.0 ** -40
    assert tails[-1] == pytest.approx(2.0 ** -40, rel=1e-9)


def test_constant_examples():
    rep = carleson_constant(lebesgue(), 1.0)
    assert rep.constant_estimate == pytest.approx(1.0, rel=1e-9)
    assert rep.bounded and not rep.vanishing
    rep = carleson_constant(density(1.0), 2.0)
    assert rep.constant_estimate == pytest.approx(0.5, rel=1e-9)
    assert not rep.vanishing
    rep = carleson_constant(density(1.0, -1.0), 2.0, log_exponent=1.0)
    assert rep.bounded and math.isfinite(rep.constant_estimate)


def test_constant_is_max_of_probe_ratios():
    rep = carleson_constant(density(0.5, 1.0), 1.2, 0.5)
    assert rep.constant_estimate == max(p[2] for p in rep.probe_points)
    t, tl, ratio = rep.probe_points[5]
    assert ratio == pytest.approx(tl * math.log(math.e / (1 - t)) ** 0.5 / (1 - t) ** 1.2, rel=1e-12)


def test_divergence_flag():
    assert carleson_constant(lebesgue(), 2.0).divergent
    assert carleson_constant(density(1.0, 1.0), 2.0).divergent
    assert not carleson_constant(density(1.0, -1.0), 2.0).divergent


def test_nonpositive_s():
    with pytest.raises(DomainError):
        carleson_constant(lebesgue(), 0.0)


def test_exponent_examples():
    assert exponent_estimate(lebesgue()).fitted_exponent == pytest.approx(1.0, abs=0.01)
    assert exponent_estimate(density(1.0)).fitted_exponent == pytest.approx(2.0, abs=0.01)
    assert exponent_estimate(atomic([(0.5, 1.0)])).fitted_exponent == math.inf


def test_vanishing_examples():
    assert vanishing_test(density(1.5), 2.0)
    assert not vanishing_test(lebesgue(), 1.0)
    assert not vanishing_test(density(1.0), 2.0)
    assert vanishing_test(atomic([(0.5, 1.0)]), 3.0)
    # a logarithmic gain alone: ratio falls like 1/log^2, a factor 11.7 over the ladder
    assert vanishing_test(density(1.0, -2.0), 2.0)


def test_vanishing_implies_decay():
    rep = carleson_constant(density(1.3, 0.5), 2.0)
    assert rep.vanishing
    assert rep.probe_points[-1][2] < 0.1 * rep.probe_points[0][2]


@given(st.floats(0.01, 100.0), st.floats(-0.5, 3.0))
def test_scaling_covariance(c, p):
    mu = density(p)
    base, scaled = carleson_constant(mu, p + 1), carleson_constant(c * mu, p + 1)
    assert scaled.constant_estimate == pytest.approx(c * base.constant_estimate, rel=1e-9)
    assert scaled.fitted_exponent == pytest.approx(base.fitted_exponent, abs=1e-6)


@given(st.floats(0.3, 3.0), st.floats(0.0, 2.0))
def test_density_family_certified(s, e):
    rep = carleson_constant(density(s - 1.0), s)
    assert rep.bounded and math.isfinite(rep.constant_estimate)
    assert rep.fitted_exponent == pytest.approx(s, abs=0.05)
    rep = carleson_constant(density(s - 1.0, -e), s, log_exponent=e)
    assert rep.bounded


@given(st.floats(-0.5, 2.0), st.floats(-0.5, 2.0))
def test_mixture_dominance(p1, p2):
    mu = density(p1) + 3.0 * density(p2)
    assert exponent_estimate(mu).fitted_exponent == pytest.approx(min(p1, p2) + 1.0, abs=0.05)


def test_predicted_examples():
    c = predicted_condition(2.0, 0.5)
    assert (c.s, c.log_exponent, c.kind) == (2.0, 0.0, "equivalent")
    assert c.compact_needs_vanishing is False
    c = predicted_condition(3.0, 1.0)
    assert (c.s, c.log_exponent, c.kind) == (2.0, 1.0, "equivalent")
    c = predicted_condition(2.0, 1.5, "B_gamma", gamma=1.0)
    assert (c.s, c.kind, c.theorems) == (2.0, "necessary", ("T3.1(i)",))
    c = predicted_condition(2.5, 2.0)
    assert c.s == 3.0 and c.compact_needs_vanishing and c.notes


def test_predicted_necessary_only_ranges():
    assert predicted_condition(1.5, 0.5).s == 1.5
    assert predicted_condition(1.5, 2.0).s == 2.5
    assert predicted_condition(1.5, 0.5).theorems == ("C3.2",)
    c = predicted_condition(0.5, 0.5, "B_gamma", gamma=0.5)
    assert c.s == pytest.approx(0.5) and c.theorems == ("T3.1(ii)",)
    c = predicted_condition(0.8, 0.4, "Q_p")
    assert (c.s, c.kind) == (0.8, "necessary")


def test_exponent_zero_is_finiteness_only():
    c = predicted_condition(1.0, 1.5, "B_gamma", gamma=2.0)
    assert c.finite_only and c.notes
    assert satisfies(lebesgue(), c) == (True, None, None)


def test_no_prediction():
    with pytest.raises(NoPredictionError):
        predicted_condition(1.5, 1.0)
    with pytest.raises(NoPredictionError):
        predicted_condition(1.0, 1.0, "B_gamma", gamma=0.5)
    with pytest.raises(NoPredictionError):
        predicted_condition(1.0, 2.0, "B_gamma", gamma=5.0)
    with pytest.raises(NoPredictionError):
        predicted_condition(1.5, 0.5, "Q_p")
    with pytest.raises(DomainError):
        predicted_condition(2.0, 0.5, "H_2")
    with pytest.raises(DomainError):
        predicted_condition(2.0, 0.5, "B_gamma")


def test_satisfies():
    bounded, vanishing, rep = satisfies(density(1.5), predicted_condition(2.0, 0.5))
    assert bounded and vanishing and rep.s_target == 2.0
    bounded, _, _ = satisfies(lebesgue(), predicted_condition(2.0, 0.5))
    assert not bounded
