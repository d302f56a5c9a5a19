import math

import pytest

from genhilbert.errors import DomainError, NoPredictionError
from genhilbert.harness import (BOUNDED_THRESHOLD, first_column, run_boundedness_harness,
                                run_compactness_proxy, run_necessity_harness, run_qp_harness,
                                test_matrix)
from genhilbert.measures import atomic, density, lebesgue


def test_t21_examples():
    r = run_boundedness_harness("T2.1", density(1.0), 2.0, 0.5)
    assert r.verdict == "bounded" and r.consistent
    assert r.empirical_growth_exponent == pytest.approx(0.0, abs=0.05)
    r = run_boundedness_harness("T2.1", lebesgue(), 2.0, 0.5)
    assert r.verdict == "unbounded" and r.consistent
    assert r.empirical_growth_exponent == pytest.approx(1.0, abs=0.05)
    assert r.runtime_ms >= 0


def test_t23_example():
    r = run_boundedness_harness("T2.3", density(2.0), 2.0, 2.0)
    assert r.verdict == "bounded" and r.consistent and r.notes


def test_divergent_integral_is_reported_not_raised():
    r = run_boundedness_harness("T2.3", lebesgue(), 2.0, 2.0)
    assert r.consistent and r.signals["image_growth_exponent"] == math.inf
    assert any("diverges" in n for n in r.notes)


@pytest.mark.parametrize("theorem, beta", [("T2.1", 0.5), ("T2.2", 1.0), ("T2.3", 2.0),
                                           ("T3.2", 0.5), ("T3.3", 1.0), ("T3.4", 2.0)])
def test_cross_signal_agreement(theorem, beta):
    for name, mu in test_matrix().items():
        r = run_boundedness_harness(theorem, mu, 2.0, beta, timing=False)
        assert r.consistent, name


@pytest.mark.parametrize("gamma", [1.9, 1.95, 2.0, 2.05, 2.1])
def test_dichotomy_flip(gamma):
    r = run_boundedness_harness("T2.1", density(gamma - 1.0), 2.0, 0.5)
    assert r.verdict == ("bounded" if gamma >= 2.0 else "unbounded")
    assert r.empirical_growth_exponent == pytest.approx(max(0.0, 2.0 - gamma), abs=0.02)


def test_harness_range_checks():
    with pytest.raises(NoPredictionError):
        run_boundedness_harness("T2.1", lebesgue(), 1.5, 0.5)
    with pytest.raises(NoPredictionError):
        run_boundedness_harness("T2.2", lebesgue(), 2.0, 0.5)
    with pytest.raises(DomainError):
        run_boundedness_harness("T9.9", lebesgue(), 2.0, 0.5)
    with pytest.raises(DomainError):
        run_boundedness_harness("Qp", lebesgue(), 2.0, 0.5)
    with pytest.raises(NoPredictionError):
        run_qp_harness(lebesgue(), 1.5)
    with pytest.raises(DomainError):
        run_necessity_harness(lebesgue(), 2.0, 1.0, 1.0)


def test_compactness_examples():
    r = run_compactness_proxy("T2.2", density(1.0, -2.0), 2.0)
    assert r.verdict == "compact" and r.consistent
    assert r.signals["proxy_last"] <= 0.1 * r.signals["proxy_first"]
    r = run_compactness_proxy("T2.2", density(1.0, -1.0), 2.0)
    assert r.verdict == "bounded-not-compact" and r.consistent
    assert r.signals["proxy_last"] > 0.1
    r = run_compactness_proxy("T2.2", atomic([(0.5, 1.0)]), 2.0)
    assert r.verdict == "compact" and r.signals["proxy_last"] == 0.0


def test_compactness_beta_required():
    with pytest.raises(DomainError):
        run_compactness_proxy("T2.3", density(2.0), 2.0)
    r = run_compactness_proxy("T2.3", density(2.5), 2.0, beta=2.0)
    assert r.verdict == "compact" and r.consistent


def test_necessity_examples():
    alpha, beta, gamma = 2.0, 1.5, 1.0
    s = alpha + beta - gamma - 0.5
    r = run_necessity_harness(density(s - 1.0), alpha, beta, gamma)
    assert r.consistent
    # the critical measure sits on the boundary of the chain
    assert r.empirical_growth_exponent == pytest.approx(s, abs=0.05)
    r = run_necessity_harness(atomic([(0.5, 1.0)]), alpha, beta, gamma)
    assert r.consistent and r.empirical_growth_exponent == math.inf
    r = run_necessity_harness(density(0.5), 2.0, 0.5, 1.0)
    assert r.predicted["theorems"] == ["T3.1(ii)"] and r.consistent


def test_qp_examples():
    for alpha in (0.5, 1.0):
        r = run_qp_harness(density(alpha - 1.0), alpha)
        assert r.verdict == "bounded" and r.consistent
        r = run_qp_harness(density(alpha - 1.4), alpha)
        assert r.verdict == "unbounded" and r.consistent
        assert r.signals["decade_ratio"] > 2
    assert run_qp_harness(lebesgue(), 0.5).verdict == "bounded"


def test_first_column_positive_decreasing():
    b = first_column(density(-0.3), 0.7, 1000)
    assert b[0] == pytest.approx(1 / 0.7, rel=1e-10)
    assert (b > 0).all() and (b[1:] <= b[:-1]).all()


def test_reports_deterministic():
    a = run_boundedness_harness("T2.2", density(1.0, -1.0), 2.0, 1.0, timing=False).to_dict()
    b = run_boundedness_harness("T2.2", density(1.0, -1.0), 2.0, 1.0, timing=False).to_dict()
    assert a == b and a["runtime_ms"] == 0
    assert BOUNDED_THRESHOLD == a["signals"]["threshold"]
