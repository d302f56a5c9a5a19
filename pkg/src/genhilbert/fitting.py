"""Least-squares exponent fits used by the classifier and the harnesses."""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ExponentFit:
    exponent: float
    residual: float
    n_points: int


def loglog_slope(x, y):
    """Slope of log y against log x with the RMS residual of the fit."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    A = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - A @ coef
    return ExponentFit(float(coef[0]), float(np.sqrt(np.mean(resid ** 2))), len(lx))


def growth_exponent(d, values):
    """Exponent e in F(d) ~ C d^(-e) as d -> 0.

    Fits log F = e log(1/d) + c + k d so that the first-order correction of a
    smooth prefactor does not leak into the exponent.  Returns -inf when the
    functional vanishes at the deepest point (nothing left to grow).
    """
    d = np.asarray(d, float)
    F = np.asarray(values, float)
    if F[np.argmin(d)] <= 0.0:
        return ExponentFit(-math.inf, 0.0, len(d))
    keep = F > 0
    d, F = d[keep], F[keep]
    A = np.column_stack([np.log(1.0 / d), np.ones_like(d), d])
    coef, *_ = np.linalg.lstsq(A, np.log(F), rcond=None)
    resid = np.log(F) - A @ coef
    return ExponentFit(float(coef[0]), float(np.sqrt(np.mean(resid ** 2))), len(d))
