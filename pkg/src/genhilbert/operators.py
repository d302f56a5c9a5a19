"""The operator in coefficient form (a Hankel-type matrix) and in integral form.

Coefficient form:  b_n = c_n(alpha) * sum_k m_{n+k} a_k,
integral form:     I(f)(z) = int f(t) / (1 - t z)**alpha dmu(t).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .coefficients import gamma_ratio_table
from .errors import DomainError, PreconditionError, TruncationError
from .measures import MomentCache, convergence_gate, integrate
from .quadrature import adaptive_gl, composite_rule
from .series import (CoefficientSeries, DiskGrid, TestFamilyMember, as_series,
                     evaluate)

DEFAULT_TOL = 1e-9
_CHUNK_ELEMENTS = 2 ** 22
_I_CHUNK = 2048


@dataclass(eq=False)
class HankelEntrySpec:
    """Entries c_n(alpha) m_{n+k}, backed by a gamma-ratio table and a moment cache.

    Both caches grow on demand unless ``auto_extend`` is off, in which case an
    index beyond them raises.
    """

    measure: object
    alpha: float
    gamma_table: object = None
    moment_cache: MomentCache = None
    auto_extend: bool = True

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if self.gamma_table is None:
            self.gamma_table = gamma_ratio_table(self.alpha, 64)
        if self.moment_cache is None:
            self.moment_cache = MomentCache(self.measure, 64)

    def ensure(self, n_max, j_max):
        if n_max > self.gamma_table.N:
            if not self.auto_extend:
                raise DomainError(f"gamma table covers n <= {self.gamma_table.N}")
            self.gamma_table = gamma_ratio_table(self.alpha, max(n_max, 2 * self.gamma_table.N))
        if j_max > self.moment_cache.j_max and not self.auto_extend:
            raise DomainError(f"moment cache covers j <= {self.moment_cache.j_max}")
        self.moment_cache.ensure(j_max)

    def c(self, n_max):
        self.ensure(n_max, 0)
        return self.gamma_table.values[:n_max + 1]

    def m(self, j_max):
        return self.moment_cache.ensure(j_max)[:j_max + 1]

    def matrix(self, n_max, k_max):
        """Dense (n_max + 1) x (k_max + 1) block of entries."""
        self.ensure(n_max, n_max + k_max)
        n = np.arange(n_max + 1)[:, None]
        k = np.arange(k_max + 1)[None, :]
        return self.gamma_table.values[:n_max + 1, None] * self.moment_cache.values[n + k]


def entry(spec, n, k):
    if n < 0 or k < 0:
        raise DomainError("indices must be nonnegative")
    spec.ensure(n, n + k)
    return float(spec.gamma_table.values[n] * spec.moment_cache.values[n + k])


def _hankel_matvec(m, a, n_out):
    """sum_k m[n + k] a[k] for n = 0..n_out, in row chunks of a strided window."""
    k_in = len(a) - 1
    win = np.lib.stride_tricks.sliding_window_view(m[:n_out + k_in + 1], k_in + 1)
    rows = max(1, _CHUNK_ELEMENTS // (k_in + 1))
    re, im = np.ascontiguousarray(a.real), np.ascontiguousarray(a.imag)
    has_im = bool(np.any(im))
    out = np.zeros(n_out + 1, dtype=complex)
    for s in range(0, n_out + 1, rows):
        block = np.ascontiguousarray(win[s:s + rows])
        out.real[s:s + rows] = block @ re
        if has_im:
            out.imag[s:s + rows] = block @ im
    return out


@dataclass(frozen=True, eq=False)
class OperatorApplication:
    input: CoefficientSeries = field(repr=False)
    output: CoefficientSeries = field(repr=False)
    truncation: tuple
    residual_bound: float

    def evaluate(self, z):
        return evaluate(self.output, z)

    def error_bound(self, r):
        """Bound on |H(f)(z) - output(z)| for |z| <= r < 1."""
        return self.residual_bound / (1.0 - r) + self.output.tail_bound_at(r)


def apply_H(spec, f, n_out, k_in=None, tol=DEFAULT_TOL):
    """Apply the Hankel form to the coefficients of f, keeping b_0..b_{n_out}.

    Coefficients beyond ``k_in`` (and the envelope tail of f) are discarded and
    accounted for in ``residual_bound`` using m_{n+k} <= m_{n+k_in+1}.
    """
    s = as_series(f)
    a = s.coefficients
    k_in = s.N if k_in is None else min(int(k_in), s.N)
    if n_out < 0 or k_in < 0:
        raise DomainError("truncation orders must be nonnegative")

    spec.ensure(n_out, n_out + k_in + 1)
    c = spec.gamma_table.values[:n_out + 1]
    m = spec.moment_cache.values

    dropped = float(np.abs(a[k_in + 1:]).sum()) + s.tail_bound_at(1.0)
    residual = float(np.max(c * m[k_in + 1:n_out + k_in + 2])) * dropped if dropped else 0.0
    if not residual <= tol:
        scale = float(np.max(c * m[:n_out + 1]))
        csum = np.cumsum(np.abs(a)[::-1])[::-1]
        ok = np.flatnonzero(scale * (np.append(csum[1:], 0.0) + s.tail_bound_at(1.0)) <= tol)
        suggested = int(ok[0]) if ok.size and ok[0] > k_in else None
        raise TruncationError(
            f"residual bound {residual:.3g} exceeds tolerance {tol:.3g}",
            partial=residual, suggested_k_in=suggested if suggested is not None else 2 * k_in + 1)

    b = c * _hankel_matvec(m, a[:k_in + 1], n_out)
    norm1 = float(np.abs(a).sum()) + s.tail_bound_at(1.0)
    # |b_n| <= c_n m_n ||a||_1 and c_{n+1} m_{n+1} <= c_n m_n (n + alpha) / (n + 1)
    anchor = norm1 * c[-1] * m[n_out]
    ratio = max(1.0, (n_out + spec.alpha) / (n_out + 1.0))
    out = CoefficientSeries(b, s.r_max, float(anchor), ratio if anchor else 0.0)
    return OperatorApplication(s, out, (int(n_out), int(k_in)), residual)


# -- integral form ------------------------------------------------------------------

def _pointwise(f, z):
    """Values of f at z: closed form for family members, Horner for series."""
    if isinstance(f, TestFamilyMember):
        return f.closed_form(z)
    if callable(f) and not isinstance(f, CoefficientSeries):
        return np.asarray(f(z), dtype=complex)
    s = f
    if s.tail_anchor == 0.0:
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in s.coefficients[::-1]:
            out = out * z + c
        return out
    return np.asarray(evaluate(s, z))


def _infer_beta(f):
    if isinstance(f, TestFamilyMember):
        return f.bloch_class
    if isinstance(f, CoefficientSeries):
        if f.tail_anchor and not math.isfinite(f.tail_bound_at(1.0)):
            raise PreconditionError(
                "series is not controlled up to the boundary; pass a family member "
                "or a callable with an explicit beta")
        return 0.5
    raise PreconditionError("cannot infer beta for a callable; pass beta explicitly")


def check_gate(mu, f, beta=None):
    beta = _infer_beta(f) if beta is None else beta
    gate = convergence_gate(mu, beta)
    if not gate.admissible:
        raise PreconditionError(f"integral diverges for beta = {beta}: gate inadmissible")
    return gate


def apply_I(mu, alpha, f, z, order=0, beta=None, rtol=1e-10):
    """The integral form at z (scalar or array).

    ``order=1`` returns the z-derivative, computed from the differentiated
    kernel alpha t / (1 - t z)**(alpha + 1).
    """
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    if order not in (0, 1):
        raise DomainError("order must be 0 or 1")
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise DomainError("z must lie in the open unit disk")
    check_gate(mu, f, beta)
    zz = z.ravel()

    def integrand(t, w):
        ft = _pointwise(f, t)[:, None]
        base = 1.0 - t[:, None] * w[None, :]
        if order == 0:
            return ft * base ** (-alpha)
        return alpha * t[:, None] * ft * base ** (-alpha - 1.0)

    # each chunk gets its own adaptive run; this caps the nodes x points array
    val = np.concatenate([
        np.atleast_1d(integrate(mu, lambda t, w=zz[s:s + _I_CHUNK]: integrand(t, w), rtol=rtol))
        for s in range(0, zz.size, _I_CHUNK)]).reshape(z.shape)
    return complex(val) if val.ndim == 0 else val


@dataclass(frozen=True)
class EquivalenceResult:
    max_abs_gap: float
    error_budget: float
    within_budget: bool
    n_points: int


def equivalence_check(mu, alpha, f, grid=None, n_out=4096, k_in=None,
                      rtol=1e-10, tol=DEFAULT_TOL):
    """Max over grid points of |H(f)(z) - I(f)(z)| with its error budget."""
    grid = grid or DiskGrid(i_max=4, n_angles=16, subdivisions=2, r_cap=0.9)
    z = grid.points
    spec = HankelEntrySpec(mu, alpha)
    app = apply_H(spec, f, n_out, k_in, tol=tol)
    h = app.evaluate(z)
    i = apply_I(mu, alpha, f, z, rtol=rtol)
    gap = np.abs(h - i)
    r = float(np.abs(z).max())
    budget = app.error_bound(r) + 10.0 * rtol * float(np.abs(i).max()) + 1e-13
    return EquivalenceResult(float(gap.max()), float(budget), bool(gap.max() <= budget), len(z))


# -- pairing identity -----------------------------------------------------------------

def pairing_lhs(mu, alpha, f, g, r, weight_exponent=None, normalize=True,
                n_angles=256, rtol=1e-10, beta=None):
    """Area pairing of conj(I(f)(r z)) g(r z) against (1 - |z|^2)**w dA.

    ``w`` defaults to alpha - 2.  With ``normalize`` the weight is scaled by
    w + 1 so the weighted area measure has unit mass; that is the scaling
    under which the identity with the one-dimensional side holds exactly.
    """
    if weight_exponent is None:
        if alpha < 2:
            raise DomainError("the pairing needs alpha >= 2")
        weight_exponent = alpha - 2.0
    if weight_exponent <= -1:
        raise DomainError("weight exponent must exceed -1")
    if not (0.0 < r < 1.0):
        raise DomainError("r must lie in (0, 1)")
    check_gate(mu, f, beta)
    theta = 2.0 * np.pi * np.arange(n_angles) / n_angles
    circle = np.exp(1j * theta)

    def radial(rho, magnitude=False):
        w = r * rho[:, None] * circle[None, :]
        i_vals = apply_I(mu, alpha, f, w.ravel(), beta=beta, rtol=rtol * 0.1).reshape(w.shape)
        prod = np.conj(i_vals) * _pointwise(g, w)
        ang = np.mean(np.abs(prod) if magnitude else prod, axis=1)
        return 2.0 * rho * (1.0 - rho * rho) ** weight_exponent * ang

    edges = [0.0, 0.5, 0.75, 0.875, 1.0]
    # a pairing that cancels to 0 needs an absolute tolerance; take it from
    # a coarse pass over |integrand|
    nodes, weights = composite_rule(np.column_stack([edges[:-1], edges[1:]]), 20)
    scale = float(np.sum(weights * radial(nodes, magnitude=True)))
    res = adaptive_gl(radial, breakpoints=edges, rtol=rtol, atol=rtol * scale)
    value = complex(res.value)
    return value * (weight_exponent + 1.0) if normalize else value


def pairing_rhs(mu, f, g, r, rtol=1e-12, beta=None):
    """int conj(f(t)) g(r^2 t) dmu(t)."""
    if not (0.0 < r <= 1.0):
        raise DomainError("r must lie in (0, 1]")
    check_gate(mu, f, beta)
    return complex(integrate(
        mu, lambda t: np.conj(_pointwise(f, t)) * _pointwise(g, r * r * t), rtol=rtol))


@dataclass(frozen=True)
class PairingLimit:
    value: complex
    spread: float
    radii: tuple
    values: tuple


def pairing_limit(mu, alpha, f, g, radii=(0.9, 0.99, 0.999), side="rhs", **kwargs):
    """Extrapolate the pairing to r -> 1 assuming an O(1 - r) approach.

    Two linear extrapolations are formed from consecutive radii; the last one
    is reported and the spread between them serves as the error bar.
    """
    if len(radii) < 3:
        raise DomainError("need at least three radii")
    if side == "rhs":
        vals = [pairing_rhs(mu, f, g, r, **kwargs) for r in radii]
    elif side == "lhs":
        vals = [pairing_lhs(mu, alpha, f, g, r, **kwargs) for r in radii]
    else:
        raise DomainError("side must be 'lhs' or 'rhs'")
    h = [1.0 - r for r in radii]

    def extrap(i):
        return vals[i + 1] + (vals[i + 1] - vals[i]) * h[i + 1] / (h[i] - h[i + 1])

    e1, e2 = extrap(len(vals) - 3), extrap(len(vals) - 2)
    return PairingLimit(complex(e2), float(abs(e2 - e1)), tuple(radii), tuple(vals))


# -- necessity-side functional ------------------------------------------------------

def test_weight(beta, a, t):
    """Value at t of the bounded test function paired against the peak g_a."""
    if beta < 1:
        return np.ones_like(t)
    if beta == 1:
        return 1.0 - np.log1p(-a * t)
    return (1.0 - a * a) * (1.0 - a * t) ** (-beta)


test_weight.__test__ = False


def lower_bound_functional(mu, alpha, beta, a, r=None, rtol=1e-10):
    """int_[a,1) g_a(r^2 t) f_a(t) dmu(t) with the peak g_a and the beta-adapted f_a.

    ``alpha`` only fixes the target space and does not enter the integrand.
    ``r`` defaults to ``a``, the smallest value the argument allows.
    """
    if not alpha > 0 or not beta > 0:
        raise DomainError("alpha and beta must be positive")
    if not (0.0 < a < 1.0):
        raise DomainError("a must lie in (0, 1)")
    r = a if r is None else r
    if not (a <= r < 1.0):
        raise DomainError("r must lie in [a, 1)")

    def integrand(t):
        peak = ((1.0 - a * a) / (1.0 - a * r * r * t) ** 2) ** 2
        return peak * test_weight(beta, a, t)

    return float(np.real(integrate(mu, integrand, lower=a, rtol=rtol)))

