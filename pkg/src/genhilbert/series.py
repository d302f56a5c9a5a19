"""Truncated Taylor series on the unit disk and the norms used to test them.

A series keeps its coefficients a_0..a_N together with a geometric envelope
for the discarded tail: |a_{N+j}| <= tail_anchor * tail_ratio**j for j >= 1.
The envelope turns into a bound on the truncation error at any radius r with
tail_ratio * r < 1.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .coefficients import gamma_ratio_table
from .errors import DomainError, NumericError, PreconditionError
from .quadrature import adaptive_gl

DEFAULT_TRUNCATION = 4096
MAX_TRUNCATION = 2 ** 20
DEFAULT_R_MAX = 1.0 - 2.0 ** -10
TAIL_TARGET = 1e-15
_RADIUS_SLACK = 1e-14


@dataclass(frozen=True, eq=False)
class CoefficientSeries:
    coefficients: np.ndarray
    r_max: float = DEFAULT_R_MAX
    tail_anchor: float = 0.0
    tail_ratio: float = 0.0

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)
        if not (0.0 < self.r_max <= 1.0):
            raise DomainError(f"r_max must lie in (0, 1], got {self.r_max}")

    @property
    def N(self):
        return len(self.coefficients) - 1

    @property
    def tail_bound(self):
        return self.tail_bound_at(self.r_max)

    def tail_bound_at(self, r):
        """Bound on sup_{|z| <= r} of the discarded tail."""
        if self.tail_anchor == 0.0:
            return 0.0
        q = self.tail_ratio * r
        if q >= 1.0:
            return math.inf
        if r == 0.0:
            return 0.0
        return self.tail_anchor * math.exp(self.N * math.log(r)) * q / (1.0 - q)

    def abs_sum(self):
        """Sum of |a_k| over all k, including the enveloped tail."""
        return float(np.abs(self.coefficients).sum()) + self.tail_bound_at(1.0)

    def __add__(self, other):
        n = max(self.N, other.N)
        a = np.zeros(n + 1, dtype=complex)
        a[:self.N + 1] += self.coefficients
        a[:other.N + 1] += other.coefficients
        return CoefficientSeries(
            a, min(self.r_max, other.r_max),
            self.tail_anchor + other.tail_anchor,
            max(self.tail_ratio, other.tail_ratio),
        )

    def __mul__(self, c):
        return CoefficientSeries(self.coefficients * c, self.r_max,
                                 self.tail_anchor * abs(c), self.tail_ratio)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def to_json(self):
        return json.dumps([[float(c.real), float(c.imag)] for c in self.coefficients])

    @classmethod
    def from_json(cls, text, r_max=DEFAULT_R_MAX):
        pairs = json.loads(text)
        coeffs = np.array([complex(re, im) for re, im in pairs])
        return cls(coeffs, r_max)


def polynomial(coeffs, r_max=DEFAULT_R_MAX):
    return CoefficientSeries(np.asarray(coeffs, dtype=complex), r_max)


def monomial(k, r_max=DEFAULT_R_MAX):
    a = np.zeros(k + 1, dtype=complex)
    a[k] = 1.0
    return CoefficientSeries(a, r_max)


# -- test-function families -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class TestFamilyMember:
    family: str
    parameter: float
    series: CoefficientSeries = field(repr=False)
    beta: float = None

    __test__ = False  # not a pytest class

    def closed_form(self, z):
        z = np.asarray(z, dtype=complex)
        x = self.parameter
        if self.family == "constant_one":
            return np.ones_like(z)
        if self.family == "power_beta":
            return (1.0 - x * x) / (1.0 - x * z) ** self.beta
        if self.family == "log_e":
            return 1.0 - np.log(1.0 - x * z)
        if self.family == "log_sq":
            return np.log(2.0 / (1.0 - x * z)) ** 2 / math.log(2.0 / (1.0 - x * x))
        if self.family == "bergman_peak":
            return ((1.0 - x * x) / (1.0 - x * z) ** 2) ** 2
        raise DomainError(f"unknown family {self.family!r}")

    __call__ = closed_form

    @property
    def bloch_class(self):
        """A beta for which the member is a natural element of the beta-Bloch space."""
        if self.family == "power_beta":
            return self.beta
        if self.family in ("log_e", "log_sq"):
            return 1.0
        return 0.5


def _check_parameter(x):
    if not (0.0 < x < 1.0):
        raise DomainError(f"family parameter must lie in (0, 1), got {x}")


def _with_auto_truncation(build, n_terms, r_max):
    """Build a series with ``build(N) -> (coeffs, anchor, ratio)``.

    With ``n_terms=None`` N starts at the default and doubles until the tail
    bound on the closed unit disk falls below TAIL_TARGET (or the cap is hit).
    """
    if n_terms is not None:
        return _series(build, int(n_terms), r_max)
    n = DEFAULT_TRUNCATION
    while True:
        s = _series(build, n, r_max)
        scale = max(1.0, float(np.abs(s.coefficients).max()))
        if s.tail_bound_at(1.0) <= TAIL_TARGET * scale or n >= MAX_TRUNCATION:
            return s
        n *= 2


def _series(build, n, r_max):
    coeffs, anchor, ratio = build(n)
    return CoefficientSeries(coeffs, r_max, anchor, ratio)


def _geometric_envelope(coeffs, ratio):
    return float(abs(coeffs[-1])) if ratio > 0 else 0.0, ratio


def constant_one(r_max=DEFAULT_R_MAX):
    return TestFamilyMember("constant_one", 0.0, polynomial([1.0], r_max))


def power_beta(lam, beta, n_terms=None, r_max=DEFAULT_R_MAX):
    """(1 - lam^2) / (1 - lam z)^beta."""
    _check_parameter(lam)
    if not beta > 0:
        raise DomainError("beta must be positive")

    def build(n):
        table = gamma_ratio_table(beta, n)
        k = np.arange(n + 1)
        coeffs = np.exp(math.log1p(-lam * lam) + table.log_values + k * math.log(lam))
        ratio = max(1.0, (n + beta) / (n + 1.0)) * lam
        return (coeffs, *_geometric_envelope(coeffs, ratio))

    return TestFamilyMember("power_beta", lam, _with_auto_truncation(build, n_terms, r_max),
                            beta=float(beta))


def log_e(a, n_terms=None, r_max=DEFAULT_R_MAX):
    """log(e / (1 - a z))."""
    _check_parameter(a)

    def build(n):
        k = np.arange(1, n + 1)
        coeffs = np.empty(n + 1)
        coeffs[0] = 1.0
        coeffs[1:] = np.exp(k * math.log(a) - np.log(k))
        return (coeffs, *_geometric_envelope(coeffs, a))

    return TestFamilyMember("log_e", a, _with_auto_truncation(build, n_terms, r_max))


def log_sq(a, n_terms=None, r_max=DEFAULT_R_MAX):
    """log(2 / (1 - a z))**2 / log(2 / (1 - a^2))."""
    _check_parameter(a)
    norm = math.log(2.0 / (1.0 - a * a))
    log2 = math.log(2.0)

    def build(n):
        k = np.arange(1, n + 1)
        harmonic_prev = np.concatenate([[0.0], np.cumsum(1.0 / k[:-1])])
        coeffs = np.empty(n + 1)
        coeffs[0] = log2 * log2 / norm
        coeffs[1:] = np.exp(k * math.log(a)) * 2.0 * (log2 + harmonic_prev) / k / norm
        return (coeffs, *_geometric_envelope(coeffs, a))

    return TestFamilyMember("log_sq", a, _with_auto_truncation(build, n_terms, r_max))


def bergman_peak(a, n_terms=None, r_max=DEFAULT_R_MAX):
    """((1 - a^2) / (1 - a z)^2)^2."""
    _check_parameter(a)

    def build(n):
        table = gamma_ratio_table(4.0, n)
        k = np.arange(n + 1)
        coeffs = np.exp(2.0 * math.log1p(-a * a) + table.log_values + k * math.log(a))
        ratio = max(1.0, (n + 4.0) / (n + 1.0)) * a
        return (coeffs, *_geometric_envelope(coeffs, ratio))

    return TestFamilyMember("bergman_peak", a, _with_auto_truncation(build, n_terms, r_max))


FAMILIES = {
    "constant_one": lambda x, beta, n: constant_one(),
    "power_beta": lambda x, beta, n: power_beta(x, beta, n),
    "log_e": lambda x, beta, n: log_e(x, n),
    "log_sq": lambda x, beta, n: log_sq(x, n),
    "bergman_peak": lambda x, beta, n: bergman_peak(x, n),
}


def make_family(name, parameter=0.5, beta=None, n_terms=None):
    if name not in FAMILIES:
        raise DomainError(f"unknown family {name!r}")
    if name == "power_beta" and beta is None:
        raise DomainError("power_beta needs beta")
    return FAMILIES[name](parameter, beta, n_terms)


def as_series(f):
    return f.series if isinstance(f, TestFamilyMember) else f


# -- evaluation -------------------------------------------------------------------

def evaluate(f, z):
    """Horner evaluation of the truncated series at |z| <= r_max."""
    s = as_series(f)
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > s.r_max + _RADIUS_SLACK):
        raise DomainError(f"|z| exceeds r_max = {s.r_max}")
    out = np.zeros_like(z)
    for c in s.coefficients[::-1]:
        out = out * z + c
    return out if out.ndim else complex(out)


def derivative(f):
    s = as_series(f)
    a = s.coefficients
    n = s.N
    if n == 0:
        if s.tail_anchor:
            raise PreconditionError("cannot differentiate a length-1 series with a tail")
        return CoefficientSeries(np.zeros(1), s.r_max)
    b = a[1:] * np.arange(1, n + 1)
    if s.tail_anchor == 0.0:
        return CoefficientSeries(b, s.r_max)
    # |(N+j) a_{N+j}| <= N anchor (ratio (N+1)/N)^j
    return CoefficientSeries(b, s.r_max, n * s.tail_anchor, s.tail_ratio * (n + 1.0) / n)


def circle_values(f, r, n_angles):
    """Values of the truncated series at r exp(2 pi i m / n_angles), m = 0..M-1."""
    a = as_series(f).coefficients
    if r == 0.0:
        return np.full(n_angles, a[0], dtype=complex)
    k = np.arange(len(a))
    with np.errstate(under="ignore"):
        b = a * np.exp(k * math.log(r))
    pad = (-len(b)) % n_angles
    folded = np.concatenate([b, np.zeros(pad, dtype=complex)]).reshape(-1, n_angles).sum(axis=0)
    return n_angles * np.fft.ifft(folded)


@dataclass(frozen=True)
class DiskGrid:
    """Geometric radial ladder r = 1 - 2**(-i / subdivisions) times uniform angles."""

    i_max: int = 10
    n_angles: int = 256
    subdivisions: int = 32
    r_cap: float = None

    @property
    def radii(self):
        i = np.arange(0, self.i_max * self.subdivisions + 1)
        r = 1.0 - 2.0 ** (-i / self.subdivisions)
        if self.r_cap is not None:
            r = np.append(r[r < self.r_cap], self.r_cap)
        return r

    @property
    def angles(self):
        return 2.0 * np.pi * np.arange(self.n_angles) / self.n_angles

    @property
    def points(self):
        r = self.radii
        z = (r[:, None] * np.exp(1j * self.angles)[None, :]).ravel()
        return np.concatenate([[0.0], z[np.repeat(r, self.n_angles) > 0]]) if r[0] == 0 else z

    def refined(self):
        return DiskGrid(self.i_max, 2 * self.n_angles, 2 * self.subdivisions, self.r_cap)


def grid_values(f, grid):
    """Array (n_radii, n_angles) of series values on the grid."""
    s = as_series(f)
    radii = grid.radii
    if radii[-1] > s.r_max + _RADIUS_SLACK:
        raise DomainError(f"grid radius {radii[-1]} exceeds r_max = {s.r_max}")
    return np.array([circle_values(s, r, grid.n_angles) for r in radii])


def bloch_profile(f, alpha, grid=None):
    """Per-radius max of (1 - |z|^2)^alpha |f'(z)| over the grid."""
    grid = grid or DiskGrid()
    vals = np.abs(grid_values(derivative(f), grid)).max(axis=1)
    return grid.radii, (1.0 - grid.radii ** 2) ** alpha * vals


def bloch_norm(f, alpha, grid=None, full=False):
    """Grid estimate of sup (1 - |z|^2)^alpha |f'(z)|, a lower bound of the true sup.

    With ``full=True`` the point evaluation |f(0)| is added.
    """
    _, prof = bloch_profile(f, alpha, grid)
    value = float(prof.max())
    if full:
        value += abs(as_series(f).coefficients[0])
    return value


def growth_bound_check(f, alpha, grid=None):
    """max over the grid of |f(z)| / G_alpha(|z|), the growth envelope of B_alpha."""
    grid = grid or DiskGrid()
    r = grid.radii
    if alpha < 1:
        envelope = np.ones_like(r)
    elif alpha == 1:
        envelope = 1.0 - np.log1p(-r)
    else:
        envelope = (1.0 - r * r) ** (1.0 - alpha)
    vals = np.abs(grid_values(f, grid)).max(axis=1)
    return float(np.max(vals / envelope))


def _angular_resolution(s, n_start, n_cap=2 ** 16):
    n = max(16, n_start)
    prev = np.abs(circle_values(s, 1.0, n)).mean()
    while n < n_cap:
        n *= 2
        cur = np.abs(circle_values(s, 1.0, n)).mean()
        if abs(cur - prev) <= 1e-12 * cur:
            return n
        prev = cur
    return n


def bergman_a1_norm(f, grid=None, rtol=1e-10):
    """Integral of |f| against normalized area measure on the disk.

    Radial composite Gauss-Legendre (panels clustering at |z| = 1) times the
    angular trapezoid rule; the angular count starts at ``grid.n_angles`` and
    doubles until the boundary circle mean is stable.
    """
    s = as_series(f)
    if not math.isfinite(s.tail_bound_at(1.0)):
        raise NumericError("series tail is not controlled on the closed disk")
    grid = grid or DiskGrid()
    n_ang = _angular_resolution(s, grid.n_angles)

    def radial(rho):
        return np.array([2.0 * r * np.abs(circle_values(s, r, n_ang)).mean() for r in rho])

    breaks = np.concatenate([[0.0], 1.0 - 2.0 ** -np.arange(1, 25), [1.0]])
    return float(adaptive_gl(radial, breakpoints=breaks, rtol=rtol).value)


# -- coefficient criteria --------------------------------------------------------

def _coefficient_array(f):
    if isinstance(f, (CoefficientSeries, TestFamilyMember)):
        return as_series(f).coefficients
    return np.asarray(f)


def dyadic_blocks(f, alpha):
    """Sums over k in (2^n, 2^(n+1)] of |a_k / k^(alpha-1)|^2 for complete blocks."""
    a = _coefficient_array(f)
    n_max = len(a) - 1
    out = []
    n = 0
    while 2 ** (n + 1) <= n_max:
        k = np.arange(2 ** n + 1, 2 ** (n + 1) + 1)
        out.append(float(np.sum(np.abs(a[k] / k ** (alpha - 1.0)) ** 2)))
        n += 1
    if len(out) < 2:
        raise PreconditionError(
            f"truncation N={n_max} covers fewer than 2 complete dyadic blocks")
    return np.array(out)


def dyadic_block_seminorm(f, alpha):
    return float(dyadic_blocks(f, alpha).max())


@dataclass(frozen=True)
class QpResult:
    sup_k_ka_k: float
    bounded: bool
    decade_ratio: float
    threshold: float


def qp_coefficient_test(b, threshold=1.1):
    """sup_k k b_k for nonnegative nonincreasing b, with a last-decade growth verdict.

    The verdict compares max k b_k over k in (K/10, K] with the max over
    (K/100, K/10]; the sequence is called bounded when the ratio is below
    ``threshold``.
    """
    b = np.real(_coefficient_array(b)).astype(float)
    if np.any(b < 0):
        raise PreconditionError("coefficients must be nonnegative")
    rise = b[1:] - b[:-1]
    if np.any(rise > 1e-14 * np.maximum(b[:-1], 1e-300)):
        raise PreconditionError("coefficients must be nonincreasing")
    k_max = len(b) - 1
    if k_max < 100:
        raise PreconditionError("need at least 100 coefficients for the decade test")
    k = np.arange(len(b))
    kb = k * b
    last = kb[k_max // 10 + 1:].max()
    prev = kb[k_max // 100 + 1:k_max // 10 + 1].max()
    ratio = float(last / prev) if prev > 0 else (math.inf if last > 0 else 1.0)
    return QpResult(float(kb.max()), ratio < threshold, ratio, threshold)
