"""Adaptive composite Gauss-Legendre quadrature for vector-valued integrands.

The integrand is called on a 1-D array of nodes and must return an array whose
first axis matches the nodes; any trailing axes are integrated component-wise.
Refinement is batched: every panel whose local error exceeds its width-weighted
share of the tolerance is bisected in the same pass.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import NumericError

_FLOOR = 64 * np.finfo(float).eps


@lru_cache(maxsize=None)
def gauss_legendre(order):
    """Nodes and weights of the ``order``-point rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _rule_on(panels, order):
    x, w = gauss_legendre(order)
    a = panels[:, 0:1]
    b = panels[:, 1:2]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b) + half * x).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def composite_rule(panels, order=20):
    """Flattened nodes and weights of the composite rule on ``panels``."""
    panels = np.asarray(panels, dtype=float).reshape(-1, 2)
    return _rule_on(panels, order)


@dataclass
class QuadResult:
    value: np.ndarray
    error: np.ndarray
    panels: np.ndarray = field(repr=False)
    converged: bool = True

    def __float__(self):
        return float(np.real(self.value))


def _panel_sums(func, panels, order):
    """Per-panel integrals, shape (n_panels, *value_shape)."""
    nodes, weights = _rule_on(panels, order)
    vals = np.asarray(func(nodes))
    trailing = vals.shape[1:]
    vals = vals.reshape(len(panels), order, -1)
    w = weights.reshape(len(panels), order, 1)
    return (vals * w).sum(axis=1).reshape((len(panels),) + trailing)


def adaptive_gl(func, a=None, b=None, *, breakpoints=None, rtol=1e-10, atol=0.0,
                order=20, max_panels=4000):
    """Integrate ``func`` over [a, b] (or over consecutive ``breakpoints``).

    The error of a panel is estimated by comparing the ``order``-point rule on
    the panel with the same rule on its two halves; the halves' sum is kept.
    """
    if breakpoints is None:
        breakpoints = [a, b]
    edges = np.asarray(breakpoints, dtype=float)
    if np.any(np.diff(edges) <= 0):
        raise ValueError("breakpoints must be strictly increasing")
    span = edges[-1] - edges[0]

    accepted_val, accepted_err, accepted_panels = [], [], []
    active = np.column_stack([edges[:-1], edges[1:]])
    coarse = _panel_sums(func, active, order)

    while True:
        mids = active.mean(axis=1)
        halves = np.empty((2 * len(active), 2))
        halves[0::2, 0] = active[:, 0]
        halves[0::2, 1] = mids
        halves[1::2, 0] = mids
        halves[1::2, 1] = active[:, 1]
        half_sums = _panel_sums(func, halves, order)
        fine = half_sums[0::2] + half_sums[1::2]
        err = np.abs(fine - coarse)

        total = fine.sum(axis=0)
        if accepted_val:
            total = total + np.sum(accepted_val, axis=0)
        # components whose integral is (near) zero fall back to a floor tied
        # to the largest component, otherwise they could never converge
        scale = np.abs(total)
        tol = np.maximum(atol, np.maximum(rtol * scale, _FLOOR * scale.max(initial=0.0)))
        widths = (active[:, 1] - active[:, 0]) / span
        share = tol * widths.reshape((-1,) + (1,) * (err.ndim - 1))
        bad = np.any((err > share).reshape(len(active), -1), axis=1)

        good = ~bad
        accepted_val.extend(fine[good])
        accepted_err.extend(err[good])
        accepted_panels.extend(active[good])

        if not bad.any():
            break
        n_total = len(accepted_panels) + 2 * int(bad.sum())
        if n_total > max_panels:
            value = np.sum(accepted_val, axis=0) + fine[bad].sum(axis=0)
            raise NumericError(
                f"adaptive quadrature did not converge within {max_panels} panels",
                partial=value,
            )
        idx = np.flatnonzero(bad)
        active = np.concatenate([halves[2 * idx], halves[2 * idx + 1]])
        coarse = np.concatenate([half_sums[2 * idx], half_sums[2 * idx + 1]])

    panels = np.array(accepted_panels)
    order_idx = np.argsort(panels[:, 0])
    return QuadResult(
        value=np.sum(accepted_val, axis=0),
        error=np.sum(accepted_err, axis=0),
        panels=panels[order_idx],
    )
