"""Discriminants, band edges and spectral gap certificates for the mode operators.

A spectral value lambda of the Hill operator ``-u'' + Q u`` belongs to the
spectrum iff ``|D(lambda)| <= 2`` where ``D`` is the trace of the period map.
Closed forms are available for the delta comb (every lambda) and for the step
potential above both plateaus; everything else goes through
:func:`monodromy_numeric`, which composes exact piecewise transfer matrices.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import InvalidCoefficient, OrderViolated, TauOutOfRange, ZeroInSpectrum
from .potential import (
    TWO_PI,
    DeltaComb,
    PeriodicCoefficient,
    Step,
    check_odd,
    mode_weight,
)

log = logging.getLogger(__name__)

BISECTION_STEPS = 60
SAMPLES_PER_UNIT = 512


@dataclass(frozen=True)
class Monodromy:
    m11: np.ndarray
    m12: np.ndarray
    m21: np.ndarray
    m22: np.ndarray

    @property
    def trace(self):
        return self.m11 + self.m22

    @property
    def det(self):
        return self.m11 * self.m22 - self.m12 * self.m21


@dataclass
class BandReport:
    k: int
    gap_radius: float
    edges: list
    samples: list = field(default_factory=list)


@dataclass
class GapCertificate:
    k_list: list
    radii: list
    fitted_c: float
    gamma: float

    @property
    def valid(self):
        return self.fitted_c > 0 and all(r > 0 for r in self.radii)


# -- closed forms -----------------------------------------------------------

def discriminant_delta(alpha_t, beta_t, lam):
    """Discriminant of ``-u'' + (alpha_t + beta_t delta_per) u``."""
    lam = np.asarray(lam, dtype=float)
    z = lam - alpha_t
    s = np.sqrt(np.abs(z))
    # sin(2 pi s)/s = 2 pi sinc(2 s); the z == 0 case is the limit 2 + 2 pi beta_t
    osc = beta_t * TWO_PI * np.sinc(2.0 * s) + 2.0 * np.cos(TWO_PI * s)
    x = TWO_PI * s
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        sinh_over_s = np.where(x > 0, np.sinh(x) / np.where(s > 0, s, 1.0), TWO_PI)
        expo = beta_t * sinh_over_s + 2.0 * np.cosh(x)
    out = np.where(z >= 0, osc, expo)
    return out if out.ndim else float(out)


def _step_closed(alpha_t, beta_t, theta, lam):
    a = np.sqrt(lam - alpha_t)
    b = np.sqrt(lam - beta_t)
    pa = TWO_PI * theta * a
    pb = TWO_PI * (1.0 - theta) * b
    return (-(2.0 * lam - alpha_t - beta_t) / (a * b) * np.sin(pa) * np.sin(pb)
            + 2.0 * np.cos(pa) * np.cos(pb))


def step_coefficient(alpha_t, beta_t, theta):
    return PeriodicCoefficient((0.0, TWO_PI * theta, TWO_PI), (alpha_t, beta_t))


def discriminant_step(alpha_t, beta_t, theta, lam):
    """Discriminant of the step coefficient ``alpha_t`` on [0, 2 pi theta], ``beta_t`` elsewhere.

    The closed form holds for ``lam > max(alpha_t, beta_t)``; remaining points
    are evaluated by numeric monodromy.
    """
    lam = np.asarray(lam, dtype=float)
    scalar = lam.ndim == 0
    lam = np.atleast_1d(lam)
    out = np.empty_like(lam)
    closed = lam > max(alpha_t, beta_t)
    if np.any(closed):
        out[closed] = _step_closed(alpha_t, beta_t, theta, lam[closed])
    if np.any(~closed):
        coeff = step_coefficient(alpha_t, beta_t, theta)
        out[~closed] = monodromy_numeric(coeff, lam[~closed]).trace
    return float(out[0]) if scalar else out


def mode_closed_form_args(params, k):
    w = mode_weight(params, k)
    pot = params.potential
    return -pot.alpha * w, -pot.beta * w


def discriminant_mode(params, k, lam):
    """D_k(lambda) of L_k for the configured potential."""
    check_odd(k)
    alpha_t, beta_t = mode_closed_form_args(params, k)
    pot = params.potential
    if isinstance(pot, DeltaComb):
        return discriminant_delta(alpha_t, beta_t, lam)
    if isinstance(pot, Step):
        return discriminant_step(alpha_t, beta_t, pot.theta, lam)
    raise TypeError(f"unsupported potential {pot!r}")


# -- numeric monodromy ------------------------------------------------------

def _merged_pieces(coeff, weight):
    edges = set(float(e) for e in coeff.edges)
    if weight is not None:
        edges.update(float(e) for e in weight.edges)
    edges.update(float(pos) for pos, _ in coeff.atoms)
    edges = sorted(e for e in edges if e < TWO_PI - 1e-14)
    edges.append(TWO_PI)
    return np.asarray(edges)


def monodromy_numeric(coeff, lam, weight=None):
    """Period map of ``-u'' + Q u = lam W u`` acting on ``(u, u')``.

    Constant pieces are propagated with the matrix exponential of
    ``[[0, 1], [Q - lam W, 0]]``; atoms apply ``(u, u') -> (u, u' + s u)``.
    ``weight`` defaults to W = 1 and must not carry atoms.
    """
    if not isinstance(coeff, PeriodicCoefficient):
        raise InvalidCoefficient(f"expected PeriodicCoefficient, got {type(coeff).__name__}")
    if weight is not None and weight.atoms:
        raise InvalidCoefficient("weights cannot carry point interactions")
    lam = np.asarray(lam, dtype=float)
    if not np.all(np.isfinite(lam)):
        raise InvalidCoefficient("non-finite spectral parameter")
    shape = lam.shape
    lam = lam.reshape(-1)
    edges = _merged_pieces(coeff, weight)
    atoms = {}
    for pos, strength in coeff.atoms:
        atoms[float(pos)] = atoms.get(float(pos), 0.0) + strength

    total = np.broadcast_to(np.eye(2), (lam.size, 2, 2)).copy()
    for left, right in zip(edges[:-1], edges[1:]):
        if left in atoms:
            jump = np.array([[1.0, 0.0], [atoms[left], 1.0]])
            total = jump @ total
        mid = 0.5 * (left + right)
        q = float(coeff.value_at(mid))
        w = 1.0 if weight is None else float(weight.value_at(mid))
        gen = np.zeros((lam.size, 2, 2))
        gen[:, 0, 1] = 1.0
        gen[:, 1, 0] = q - lam * w
        total = scipy.linalg.expm((right - left) * gen) @ total
    m = total.reshape(shape + (2, 2))
    return Monodromy(m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1])


# -- gap search -------------------------------------------------------------

def _bisect_edge(func, good, bad):
    """Bisect towards the first spectral point between ``good`` and ``bad``.

    A point counts as good while ``|D| > 2`` with the sign of ``D(good)``;
    exponentially narrow bands show up only as a sign flip of D.
    """
    sign = np.sign(func(good))
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (good + bad)
        d = func(mid)
        if abs(d) > 2.0 and np.sign(d) == sign:
            good = mid
        else:
            bad = mid
    return good


def _one_sided_radius(func, direction, r_max, density=SAMPLES_PER_UNIT):
    lo, r = 0.0, 1e-3
    d_lo = float(func(0.0))
    while True:
        hi = min(r, r_max)
        n = max(8, int(math.ceil((hi - lo) * density)))
        pts = lo + (hi - lo) * np.arange(1, n + 1) / n
        vals = np.asarray(func(direction * pts))
        prev = np.concatenate(([d_lo], vals[:-1]))
        bad = np.flatnonzero((np.abs(vals) <= 2.0) | (np.sign(vals) != np.sign(prev)))
        if bad.size:
            j = bad[0]
            good = pts[j - 1] if j > 0 else lo
            root = _bisect_edge(lambda t: func(direction * t), good, pts[j])
            return min(root, r_max)
        if hi >= r_max:
            return r_max
        lo, r, d_lo = hi, 2.0 * r, vals[-1]


def gap_radius(params, k, r_max=1e4):
    """Half-width of the largest symmetric interval around 0 inside the resolvent set."""
    k = check_odd(k)
    d0 = discriminant_mode(params, k, 0.0)
    if abs(d0) <= 2.0:
        raise ZeroInSpectrum(k, d0)
    func = lambda lam: discriminant_mode(params, k, lam)
    right = _one_sided_radius(func, 1.0, r_max)
    left = _one_sided_radius(func, -1.0, r_max)
    return min(left, right)


def band_report(params, k, window, n_samples=2001):
    """Sampled discriminant on ``window`` together with band edges located by bisection."""
    k = check_odd(k)
    lo, hi = window
    lam = np.linspace(lo, hi, n_samples)
    vals = np.asarray(discriminant_mode(params, k, lam))
    func = lambda x: discriminant_mode(params, k, x)
    inside = np.abs(vals) <= 2.0
    flips = (np.sign(vals[1:]) != np.sign(vals[:-1])) & ~inside[1:] & ~inside[:-1]
    edges = []
    for i in np.flatnonzero((inside[1:] != inside[:-1]) | flips):
        if flips[i]:
            # whole band between two samples: resolve both of its edges
            edges.append(float(_bisect_edge(func, lam[i], lam[i + 1])))
            edges.append(float(_bisect_edge(func, lam[i + 1], lam[i])))
            continue
        a, b = (lam[i], lam[i + 1]) if not inside[i] else (lam[i + 1], lam[i])
        edges.append(float(_bisect_edge(func, a, b)))
    try:
        radius = gap_radius(params, k)
    except ZeroInSpectrum:
        radius = 0.0
    samples = [(float(x), float(d)) for x, d in zip(lam, vals)]
    return BandReport(k=k, gap_radius=radius, edges=sorted(edges), samples=samples)


def certify_gap_growth(params, k_max, r_max=1e4):
    """Gap radii r_k for odd k <= k_max and the fitted constant min r_k / k^gamma."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    k_list = list(range(1, int(k_max) + 1, 2))
    radii = [gap_radius(params, k, r_max) for k in k_list]
    fitted = min(r / k**params.gamma for r, k in zip(radii, k_list))
    return GapCertificate(k_list=k_list, radii=radii, fitted_c=float(fitted), gamma=params.gamma)


# -- auxiliary checks -------------------------------------------------------

def sine_bound(tau):
    return min(0.5 * math.sqrt(1.0 + tau), 0.5 * math.sqrt(1.0 - tau))


def check_sine_bound(tau, c, k_max, n_samples=2000):
    """Sampled check of |sin(2 pi sqrt(lam + (k^2 - tau)/16))| >= sine_bound(tau) on (-ck, ck)."""
    if not abs(tau) < 1.0:
        raise TauOutOfRange(f"|tau| must be < 1, got {tau}")
    bound = sine_bound(tau)
    frac = (np.arange(n_samples) + 0.5) / n_samples
    for k in range(1, int(k_max) + 1, 2):
        lam = -c * k + 2.0 * c * k * frac
        arg = np.sqrt((lam + (k * k - tau) / 16.0).astype(complex))
        if np.any(np.abs(np.sin(TWO_PI * arg)) < bound):
            return False
    return True


def find_sine_bound_c(tau, k_max, c0=1.0, shrink=0.5, n_samples=2000, max_halvings=60):
    """Shrink c geometrically until :func:`check_sine_bound` succeeds."""
    c = c0
    for _ in range(max_halvings):
        if check_sine_bound(tau, c, k_max, n_samples):
            return c
        c *= shrink
    raise RuntimeError(f"no admissible c found for tau = {tau}")


def _ordered(weight1, weight2):
    edges = _merged_pieces(weight1, weight2)
    mids = 0.5 * (edges[:-1] + edges[1:])
    w1, w2 = weight1.value_at(mids), weight2.value_at(mids)
    return bool(np.all(w1 <= w2)), float(np.min(w1))


def check_band_monotonicity(weight1, weight2, a, potential=None, n_samples=2001):
    """Sampled gap-containment implication for ``W_i^{-1}(-d^2/dx^2 + Q)``.

    Returns False only if ``|D_2| > 2`` everywhere on the sampled ``[-a, a]``
    while ``|D_1| <= 2`` somewhere there.
    """
    if weight1.atoms or weight2.atoms:
        raise OrderViolated("weights must be piecewise constant without atoms")
    ordered, inf_w1 = _ordered(weight1, weight2)
    if not ordered:
        raise OrderViolated("weight1 <= weight2 violated")
    if not inf_w1 > 0:
        raise OrderViolated("inf weight1 must be positive")
    potential = potential if potential is not None else PeriodicCoefficient()
    lam = np.linspace(-a, a, n_samples)
    d2 = monodromy_numeric(potential, lam, weight2).trace
    if not np.all(np.abs(d2) > 2.0):
        return True
    d1 = monodromy_numeric(potential, lam, weight1).trace
    return bool(np.all(np.abs(d1) > 2.0))
