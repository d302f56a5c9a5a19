"""Radial Carleson classification of measures on [0, 1).

mu is s-Carleson when mu([t, 1)) <= C (1 - t)^s, and e-logarithmic s-Carleson
when mu([t, 1)) log(e / (1 - t))^e <= C (1 - t)^s.  Every decision here is
read off the tail sampled on the ladder t_i = 1 - 2^(-i), i = 1..40.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NoPredictionError
from .fitting import loglog_slope
from .measures import tail_u

N_PROBES = 40
DEEP = 20
DIVERGENCE_SLOPE = 0.01
VANISH_FACTOR = 0.1
_MONOTONE_TOL = 1e-12
_LOG2 = math.log(2.0)


def probe_tails(mu, n_probes=N_PROBES):
    """(i, 1 - t_i, tail(t_i)) on the dyadic ladder, with 1 - t_i = 2^(-i) exactly."""
    i = np.arange(1, n_probes + 1)
    tails = np.array([tail_u(mu, k * _LOG2) for k in i])
    return i, 2.0 ** -i.astype(float), tails


@dataclass(frozen=True)
class CarlesonReport:
    s_target: float
    log_exponent: float
    constant_estimate: float
    vanishing: bool
    divergent: bool
    trend_slope: float
    fitted_exponent: float
    fit_residual: float
    probe_points: tuple = field(repr=False)

    @property
    def bounded(self):
        return not self.divergent

    def to_dict(self):
        return {
            "s_target": self.s_target,
            "log_exponent": self.log_exponent,
            "constant_estimate": self.constant_estimate,
            "bounded": self.bounded,
            "vanishing": self.vanishing,
            "divergent": self.divergent,
            "trend_slope": self.trend_slope,
            "fitted_exponent": self.fitted_exponent,
            "fit_residual": self.fit_residual,
            "probe_points": [list(p) for p in self.probe_points],
        }


def _ratios(h, tails, s, log_exponent):
    logw = np.log1p(-np.log(h))  # log log(e / (1 - t))
    with np.errstate(divide="ignore"):
        return np.exp(np.log(tails) + log_exponent * logw - s * np.log(h))


def _exponent_from(h, tails):
    deep_h, deep_t = h[-DEEP:], tails[-DEEP:]
    if np.count_nonzero(tails > 0) < 10 or np.any(deep_t <= 0):
        return math.inf, 0.0
    fit = loglog_slope(deep_h, deep_t)
    return fit.exponent, fit.residual


def _trend(h, ratio):
    deep = ratio[-DEEP:]
    if np.any(deep <= 0):
        return -math.inf
    return loglog_slope(1.0 / h[-DEEP:], deep).exponent


def _vanishing(ratio):
    last = ratio[-10:]
    if not np.any(last > 0):
        return True
    decays = ratio[-1] <= VANISH_FACTOR * ratio[0]
    monotone = np.all(np.diff(last) <= _MONOTONE_TOL * np.maximum(last[:-1], 1e-300))
    return bool(decays and monotone)


def carleson_constant(mu, s, log_exponent=0.0, divergence_slope=DIVERGENCE_SLOPE):
    """Probe-grid estimate of the (log-)Carleson constant with trend diagnostics.

    ``divergent`` is set when log ratio keeps rising against log(1/(1-t))
    over the deepest probes (slope above ``divergence_slope``); the constant
    is then only the largest value seen.
    """
    if not s > 0:
        raise DomainError("s must be positive")
    _, h, tails = probe_tails(mu)
    ratio = _ratios(h, tails, s, log_exponent)
    slope = _trend(h, ratio)
    exponent, resid = _exponent_from(h, tails)
    points = tuple((float(1.0 - x), float(tv), float(r)) for x, tv, r in zip(h, tails, ratio))
    return CarlesonReport(
        s_target=float(s),
        log_exponent=float(log_exponent),
        constant_estimate=float(ratio.max()),
        vanishing=_vanishing(ratio),
        divergent=bool(slope > divergence_slope),
        trend_slope=float(slope),
        fitted_exponent=float(exponent),
        fit_residual=float(resid),
        probe_points=points,
    )


@dataclass(frozen=True)
class ExponentEstimate:
    fitted_exponent: float
    fit_residual: float


def exponent_estimate(mu):
    """Power-law exponent of the tail over the deepest probes (+inf if the tail dies)."""
    _, h, tails = probe_tails(mu)
    return ExponentEstimate(*_exponent_from(h, tails))


def vanishing_test(mu, s, log_exponent=0.0):
    _, h, tails = probe_tails(mu)
    return _vanishing(_ratios(h, tails, s, log_exponent))


# -- theorem table ----------------------------------------------------------------------

@dataclass(frozen=True)
class Condition:
    """A Carleson-type condition predicted for a parameter set.

    ``kind`` is "equivalent" or "necessary".  ``compact_needs_vanishing``
    says whether compactness additionally requires the vanishing version;
    it is None when no compactness statement applies.
    """

    s: float
    log_exponent: float
    kind: str
    theorems: tuple
    compact_needs_vanishing: bool = None
    finite_only: bool = False
    notes: tuple = ()

    def to_dict(self):
        return {
            "s": self.s,
            "log_exponent": self.log_exponent,
            "kind": self.kind,
            "theorems": list(self.theorems),
            "compact_needs_vanishing": self.compact_needs_vanishing,
            "finite_only": self.finite_only,
            "notes": list(self.notes),
        }


TARGETS = ("B_alpha_minus_1", "B_gamma", "Q_p")

_SOURCE_NOTE = ("compactness statement reads 'from B'; implemented with source "
                "space B_beta")
_ZERO_NOTE = ("finiteness is predicted only when the exponent is exactly 0; "
              "negative exponents are left without a prediction")


def _thm_3_1(alpha, beta, gamma):
    if gamma is None or not gamma > 0:
        raise DomainError("target B_gamma needs gamma > 0")
    if beta == 1:
        raise NoPredictionError("no necessity statement covers beta = 1")
    s = alpha + beta - gamma - 0.5 if beta > 1 else alpha - gamma + 0.5
    part = "(i)" if beta > 1 else "(ii)"
    if s > 0:
        return Condition(s, 0.0, "necessary", ("T3.1" + part,))
    if s == 0:
        return Condition(0.0, 0.0, "necessary", ("T3.1" + part,), finite_only=True,
                         notes=(_ZERO_NOTE,))
    raise NoPredictionError(
        f"necessity exponent {s:g} is negative; the statement only covers exponents >= 0")


def predicted_condition(alpha, beta, target="B_alpha_minus_1", gamma=None):
    if not alpha > 0 or not beta > 0:
        raise DomainError("alpha and beta must be positive")
    if target == "B_alpha_minus_1":
        if alpha >= 2:
            if beta < 1:
                return Condition(2.0, 0.0, "equivalent", ("T2.1", "T3.2"), False)
            if beta == 1:
                return Condition(2.0, 1.0, "equivalent", ("T2.2", "T3.3"), True)
            return Condition(beta + 1.0, 0.0, "equivalent", ("T2.3", "T3.4"), True,
                             notes=(_SOURCE_NOTE,))
        if beta == 1:
            raise NoPredictionError("alpha < 2 with beta = 1 is covered by no statement")
        s = 1.5 if beta < 1 else beta + 0.5
        return Condition(s, 0.0, "necessary", ("C3.2",))
    if target == "B_gamma":
        return _thm_3_1(alpha, beta, gamma)
    if target == "Q_p":
        if 0 < alpha <= 1 and beta < 1:
            return Condition(float(alpha), 0.0, "necessary", ("Qp",))
        raise NoPredictionError("the Q_p statement needs 0 < alpha <= 1 and 0 < beta < 1")
    raise DomainError(f"unknown target {target!r}; expected one of {TARGETS}")


def satisfies(mu, condition):
    """Classifier verdict: (bounded, vanishing, report) for the condition's exponents."""
    if condition.finite_only:
        # every accepted measure has finite mass
        return True, None, None
    report = carleson_constant(mu, condition.s, condition.log_exponent)
    return report.bounded, report.vanishing, report
