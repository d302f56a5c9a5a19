"""Positive Borel measures on [0, 1).

Three kinds are supported: finite atomic measures, the power-log densities
``(1 - t)**p * log(e / (1 - t))**q dt`` and finite positive mixtures of both.
Density integrals are computed after the substitution ``u = -log(1 - t)``,
which maps the endpoint t -> 1 to an exponentially damped tail in u.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, InvalidMeasureError, NumericError
from .quadrature import adaptive_gl, composite_rule

ATOM_CEILING = 1.0 - 1e-12
MOMENT_FLOOR = 1e-300
_DENSE_U = 40.0


@dataclass(frozen=True)
class MeasureSpec:
    kind: str
    atoms: tuple = ()
    p: float = 0.0
    q: float = 0.0
    parts: tuple = ()

    def __post_init__(self):
        if self.kind == "atomic":
            if not self.atoms:
                raise InvalidMeasureError("atomic measure needs at least one atom")
            for t, w in self.atoms:
                if not (0.0 <= t < 1.0):
                    raise InvalidMeasureError(f"atom location {t} outside [0, 1)")
                if t > ATOM_CEILING:
                    raise InvalidMeasureError(
                        f"atom location {t} is indistinguishable from mass at 1")
                if not w > 0:
                    raise InvalidMeasureError(f"atom weight {w} must be positive")
        elif self.kind == "density":
            if not (math.isfinite(self.p) and math.isfinite(self.q)):
                raise InvalidMeasureError("density exponents must be finite")
            if self.p <= -1.0:
                raise InvalidMeasureError(
                    f"density exponent p={self.p} gives infinite mass (need p > -1)")
        elif self.kind == "mixture":
            if not self.parts:
                raise InvalidMeasureError("mixture needs at least one part")
            for scale, part in self.parts:
                if not scale > 0:
                    raise InvalidMeasureError(f"mixture scale {scale} must be positive")
                if not isinstance(part, MeasureSpec):
                    raise InvalidMeasureError("mixture parts must be MeasureSpec")
        else:
            raise InvalidMeasureError(f"unknown measure kind {self.kind!r}")

    def __add__(self, other):
        return mixture([(1.0, self), (1.0, other)])

    def __rmul__(self, scale):
        return mixture([(float(scale), self)])

    def leaves(self, scale=1.0):
        """Yield ``(scale, leaf)`` pairs with atomic or density leaves."""
        if self.kind == "mixture":
            for s, part in self.parts:
                yield from part.leaves(scale * s)
        else:
            yield scale, self

    def to_dict(self):
        if self.kind == "atomic":
            return {"kind": "atomic", "atoms": [[t, w] for t, w in self.atoms]}
        if self.kind == "density":
            return {"kind": "density", "p": self.p, "q": self.q}
        return {"kind": "mixture", "parts": [[s, m.to_dict()] for s, m in self.parts]}


def atomic(atoms):
    return MeasureSpec("atomic", atoms=tuple((float(t), float(w)) for t, w in atoms))


def density(p, q=0.0):
    return MeasureSpec("density", p=float(p), q=float(q))


def lebesgue():
    return density(0.0, 0.0)


def mixture(parts):
    return MeasureSpec("mixture", parts=tuple((float(s), m) for s, m in parts))


def from_dict(obj):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InvalidMeasureError("measure JSON must be an object with a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "atomic":
            return atomic(obj["atoms"])
        if kind == "density":
            return density(obj["p"], obj.get("q", 0.0))
        if kind == "mixture":
            return mixture([(s, from_dict(m)) for s, m in obj["parts"]])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidMeasureError):
            raise
        raise InvalidMeasureError(f"malformed {kind} measure: {exc}") from exc
    raise InvalidMeasureError(f"unknown measure kind {kind!r}")


def from_json(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidMeasureError(f"measure JSON does not parse: {exc}") from exc
    return from_dict(obj)


def load_measure(path):
    return from_json(Path(path).read_text())


# -- density quadrature in u = -log(1 - t) -----------------------------------

def _log_tail_envelope(c, q, u):
    """log of an upper bound for the integral of exp(-c v) (1 + v)**q over v > u."""
    slack = c - max(q, 0.0) / (1.0 + u)
    if slack <= 0:
        return math.inf
    return -c * u + q * math.log1p(u) - math.log(slack)


def _u_cutoff(c, q, u_ref, rel):
    """Smallest tabulated u beyond which the envelope tail is below ``rel`` times
    the envelope tail at ``u_ref``."""
    ref = _log_tail_envelope(c, q, max(u_ref, 0.0))
    if not math.isfinite(ref):
        ref = _log_tail_envelope(c, q, max(u_ref, 0.0) + 2.0 * max(q, 0.0) / c)
    target = ref + math.log(rel)
    u = max(u_ref, 0.0) + 1.0
    while _log_tail_envelope(c, q, u) > target:
        u *= 1.5
        if u > 1e7:
            raise NumericError("density envelope does not decay")
    return u


def _u_breakpoints(u_lo, u_hi):
    """Panels of width 0.5 up to the dense zone end, geometric beyond."""
    dense_end = max(u_lo, min(u_hi, _DENSE_U))
    pts = list(np.arange(u_lo, dense_end, 0.5)) + [dense_end]
    u = dense_end
    while u < u_hi:
        u = min(u_hi, u * 1.5 + 1.0)
        pts.append(u)
    return np.unique(np.asarray(pts))


def _density_weight(p, q, u):
    return np.exp(-(p + 1.0) * u + q * np.log1p(u))


def _density_integral(p, q, g, u_lo=0.0, u_hi=None, rtol=1e-12):
    """Integrate g(t, s) (s = 1 - t) against the density over u in [u_lo, u_hi).

    With ``u_hi=None`` the range is semi-infinite: the envelope cutoff is used
    first and the range is then extended while the added piece still matters.
    """
    def integrand(u):
        s = np.exp(-u)
        t = -np.expm1(-u)
        w = _density_weight(p, q, u)
        vals = np.asarray(g(t, s))
        return vals * w.reshape((-1,) + (1,) * (vals.ndim - 1))

    if u_hi is not None:
        if u_hi <= u_lo:
            return 0.0
        return adaptive_gl(integrand, breakpoints=_u_breakpoints(u_lo, u_hi),
                           rtol=rtol).value

    c = p + 1.0
    end = _u_cutoff(c, q, u_lo, 1e-18)
    total = adaptive_gl(integrand, breakpoints=_u_breakpoints(u_lo, end), rtol=rtol).value
    for _ in range(60):
        nxt = 2.0 * end
        piece = adaptive_gl(integrand, breakpoints=_u_breakpoints(end, nxt), rtol=rtol).value
        total = total + piece
        end = nxt
        if np.all(np.abs(piece) <= 1e-3 * rtol * np.maximum(np.abs(total), 1e-300)):
            return total
    raise NumericError("integrand does not decay at t -> 1", partial=total)


def _density_moments(p, q, j_max):
    """Moments 0..j_max of one density leaf.

    An adaptive mesh is built for a quarter-octave ladder of probe indices and
    then reused for every index through the composite rule.
    """
    c = p + 1.0
    probes = np.unique(np.concatenate([
        [0.0, 1.0, float(j_max)],
        np.round(2.0 ** (np.arange(0, 4 * math.log2(j_max + 2) + 1) / 4.0)),
    ]))
    probes = probes[probes <= j_max]
    u_end = _u_cutoff(c, q, math.log(j_max + 2.0), 1e-16)

    def integrand(u):
        with np.errstate(divide="ignore"):
            lt = np.log1p(-np.exp(-u))
        powers = np.exp(np.outer(lt, probes))
        powers[:, probes == 0] = 1.0
        return powers * _density_weight(p, q, u)[:, None]

    mesh = adaptive_gl(integrand, breakpoints=_u_breakpoints(0.0, u_end), rtol=1e-13,
                       max_panels=20000).panels
    nodes, weights = composite_rule(_bisect(mesh))
    w = weights * _density_weight(p, q, nodes)
    lt = np.log1p(-np.exp(-nodes))
    chunk = min(1024, j_max + 1)
    # t**(j0 + k) = t**j0 * t**k: one power table serves every chunk
    table = np.exp(np.outer(lt, np.arange(chunk)))
    table[:, 0] = 1.0
    out = np.empty(j_max + 1)
    for start in range(0, j_max + 1, chunk):
        stop = min(start + chunk, j_max + 1)
        base = w * np.exp(start * lt) if start else w
        out[start:stop] = base @ table[:, :stop - start]
    return out


def _bisect(panels):
    mids = panels.mean(axis=1)
    out = np.empty((2 * len(panels), 2))
    out[0::2, 0] = panels[:, 0]
    out[0::2, 1] = mids
    out[1::2, 0] = mids
    out[1::2, 1] = panels[:, 1]
    return out


def _to_u(t):
    return -math.log1p(-t)


# -- public operations --------------------------------------------------------

def total_mass(mu):
    return moment(mu, 0)


def moment(mu, j):
    """The j-th moment of mu."""
    if j < 0 or int(j) != j:
        raise DomainError(f"moment index must be a nonnegative integer, got {j}")
    j = int(j)
    total = 0.0
    for scale, leaf in mu.leaves():
        if leaf.kind == "atomic":
            total += scale * sum(w * t ** j for t, w in leaf.atoms)
        else:
            total += scale * float(_density_integral(
                leaf.p, leaf.q,
                lambda t, s: np.ones_like(t) if j == 0 else np.exp(j * np.log1p(-s))))
    return total


def moments(mu, j_max):
    """Array of moments 0..j_max; values below 1e-300 are clamped to 0."""
    out = np.zeros(j_max + 1)
    js = np.arange(j_max + 1)
    for scale, leaf in mu.leaves():
        if leaf.kind == "atomic":
            for t, w in leaf.atoms:
                if t == 0.0:
                    out[0] += scale * w
                else:
                    out += scale * w * np.exp(js * math.log(t))
        else:
            out += scale * _density_moments(leaf.p, leaf.q, j_max)
    out[out < MOMENT_FLOOR] = 0.0
    return out


class MomentCache:
    """Moments of a fixed measure, grown by doubling on demand."""

    def __init__(self, mu, j_max=64):
        self.measure = mu
        self.values = moments(mu, j_max)

    @property
    def j_max(self):
        return len(self.values) - 1

    def ensure(self, j):
        if j > self.j_max:
            new = self.j_max
            while new < j:
                new = 2 * new + 1
            self.values = moments(self.measure, new)
        return self.values

    def __getitem__(self, j):
        return self.ensure(int(np.max(j)))[j]


def tail_u(mu, u):
    """mu([t, 1)) with t = 1 - exp(-u), evaluated without forming t."""
    if u < 0:
        raise DomainError("u must be nonnegative")
    total = 0.0
    for scale, leaf in mu.leaves():
        if leaf.kind == "atomic":
            total += scale * sum(w for t, w in leaf.atoms if _to_u(t) >= u)
        elif leaf.q == 0.0:
            c = leaf.p + 1.0
            total += scale * math.exp(-c * u) / c
        else:
            total += scale * float(_density_integral(
                leaf.p, leaf.q, lambda t, s: np.ones_like(t), u_lo=u))
    return total


def tail(mu, t):
    """mu([t, 1))."""
    if not (0.0 <= t < 1.0):
        raise DomainError(f"tail point {t} outside [0, 1)")
    total = 0.0
    for scale, leaf in mu.leaves():
        if leaf.kind == "atomic":
            total += scale * sum(w for x, w in leaf.atoms if x >= t)
        else:
            total += scale * tail_u(leaf, _to_u(t))
    return total


def integrate(mu, f, *, lower=0.0, upper=None, u_max=None, rtol=1e-10,
              with_complement=False):
    """Integral of f over [lower, upper) against mu.

    ``f`` is vectorized over t; with ``with_complement=True`` it is called as
    ``f(t, 1 - t)`` with the complement computed without cancellation.  The
    range may alternatively be cut at t = 1 - exp(-u_max).  Values may be
    complex or carry trailing axes.
    """
    if not (0.0 <= lower < 1.0):
        raise DomainError(f"lower limit {lower} outside [0, 1)")
    u_lo = _to_u(lower)
    u_hi = None
    if upper is not None:
        if not (lower < upper <= 1.0):
            raise DomainError(f"upper limit {upper} must lie in (lower, 1]")
        if upper < 1.0:
            u_hi = _to_u(upper)
    if u_max is not None:
        u_hi = u_max if u_hi is None else min(u_hi, u_max)

    g = f if with_complement else (lambda t, s: f(t))
    total = 0.0
    for scale, leaf in mu.leaves():
        if leaf.kind == "atomic":
            for t, w in leaf.atoms:
                ut = _to_u(t)
                if ut < u_lo or (u_hi is not None and ut >= u_hi):
                    continue
                val = np.asarray(g(np.array([t]), np.array([1.0 - t])))
                total = total + scale * w * val[0]
        else:
            total = total + scale * _density_integral(leaf.p, leaf.q, g, u_lo, u_hi, rtol)
    return total


def weighted_transform(mu, weight, beta=None):
    """Multiply mu by log(e/(1-t)) (``"log_e"``) or (1-t)**(1-beta) (``"power"``)."""
    if weight == "log_e":
        fn = lambda t: 1.0 - math.log1p(-t)
        dp, dq = 0.0, 1.0
    elif weight == "power":
        if beta is None or not beta > 1:
            raise DomainError("power weight needs beta > 1")
        fn = lambda t: (1.0 - t) ** (1.0 - beta)
        dp, dq = 1.0 - beta, 0.0
    else:
        raise DomainError(f"unknown weight {weight!r}")

    def go(m):
        if m.kind == "atomic":
            return atomic([(t, w * fn(t)) for t, w in m.atoms])
        if m.kind == "density":
            return density(m.p + dp, m.q + dq)
        return mixture([(s, go(part)) for s, part in m.parts])

    return go(mu)


@dataclass(frozen=True)
class GateResult:
    admissible: bool
    value: float


def _gate_exponents(beta):
    if beta < 1:
        return 0.0, 0.0
    if beta == 1:
        return 0.0, 1.0
    return 1.0 - beta, 0.0


def gate_weight(beta, t, s):
    """Weight whose mu-integral decides well-posedness on the beta-Bloch space."""
    if beta < 1:
        return np.ones_like(t)
    if beta == 1:
        return 1.0 - np.log(s)
    return s ** (1.0 - beta)


def convergence_gate(mu, beta):
    """Decide whether the integral operator converges on the beta-Bloch space."""
    if not beta > 0:
        raise DomainError("beta must be positive")
    dp, dq = _gate_exponents(beta)
    total = 0.0
    for scale, leaf in mu.leaves():
        if leaf.kind == "atomic":
            total += scale * sum(
                w * float(gate_weight(beta, np.array(t), np.array(1.0 - t)))
                for t, w in leaf.atoms)
            continue
        p, q = leaf.p + dp, leaf.q + dq
        if p > -1.0:
            total += scale * float(_density_integral(p, q, lambda t, s: np.ones_like(t)))
        elif p == -1.0 and q < -1.0:
            total += scale * (-1.0 / (q + 1.0))
        else:
            return GateResult(False, math.inf)
    return GateResult(True, total)


def gate_integral(mu, beta, u_max):
    """The gate integral truncated to t <= 1 - exp(-u_max), for divergence probes."""
    return float(np.real(integrate(
        mu, lambda t, s: gate_weight(beta, t, s), u_max=u_max, with_complement=True)))
