"""Periodic potentials V (delta comb, step) and their admissible parameter sets.

All potentials are 2*pi periodic.  The operator family of interest is

    L_k = -d^2/dx^2 - omega^2 (k^2 - tau) V(x),   k odd,

so every mode operator is a Hill operator ``-u'' + Q(x) u`` whose coefficient
``Q = -mode_weight(k) * V`` is piecewise constant plus (for the delta comb)
one point interaction per period.  :class:`PeriodicCoefficient` is the common
description consumed by the Floquet and finite element code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import (
    BetaTooSmall,
    EvenMode,
    InvalidCoefficient,
    InvalidParameters,
    TauOutOfRange,
    ThetaOutOfRange,
)

TWO_PI = 2.0 * math.pi

# theta (or 1 - theta) must lie below this for the step potential
THETA_LIMIT = 0.5 * (1.0 - math.sqrt(7.0 / 9.0))


@dataclass(frozen=True)
class DeltaComb:
    """V(x) = alpha + beta * sum_n delta(x - 2 pi n)."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise InvalidParameters(f"delta comb needs alpha, beta > 0, got {self.alpha}, {self.beta}")

    @property
    def breakpoints(self):
        return (0.0,)


@dataclass(frozen=True)
class Step:
    """V = alpha on [0, 2 pi theta], beta on the rest of the period."""

    alpha: float
    beta: float
    theta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise InvalidParameters(f"step potential needs alpha, beta > 0, got {self.alpha}, {self.beta}")
        if not 0.0 < self.theta < 1.0:
            raise ThetaOutOfRange(f"theta must lie in (0, 1), got {self.theta}")

    @property
    def breakpoints(self):
        return (0.0, TWO_PI * self.theta)


PotentialShape = Union[DeltaComb, Step]


@dataclass(frozen=True)
class ModelParams:
    potential: PotentialShape
    omega: float
    tau: float
    tau0: float
    gamma: float
    delta: float
    p_star: float
    q_star: float
    case: str

    @property
    def reg_alpha(self):
        return self.delta / 2.0

    @property
    def reg_beta(self):
        return self.gamma / 2.0

    @property
    def period_T(self):
        return TWO_PI / self.omega

    def as_dict(self):
        pot = self.potential
        out = {"case": self.case, "variant": type(pot).__name__, "alpha": pot.alpha, "beta": pot.beta}
        if isinstance(pot, Step):
            out["theta"] = pot.theta
        out.update(
            omega=self.omega, tau=self.tau, tau0=self.tau0, gamma=self.gamma, delta=self.delta,
            p_star=self.p_star, q_star=self.q_star, reg_alpha=self.reg_alpha, reg_beta=self.reg_beta,
        )
        return out


def _check_tau(tau, tau0):
    if not abs(tau) < tau0:
        raise TauOutOfRange(f"|tau| = {abs(tau)} must be < tau0 = {tau0}")


def validate_v1(alpha, beta, tau=0.0):
    """Admissible delta-comb configuration: omega = 1/(4 sqrt(alpha)), beta > 32 alpha."""
    if not alpha > 0:
        raise InvalidParameters(f"alpha must be positive, got {alpha}")
    if not beta > 32.0 * alpha:
        raise BetaTooSmall(f"beta = {beta} must exceed 32*alpha = {32.0 * alpha}")
    tau0 = 1.0 - 32.0 * alpha / beta
    _check_tau(tau, tau0)
    return ModelParams(
        potential=DeltaComb(alpha, beta),
        omega=1.0 / (4.0 * math.sqrt(alpha)),
        tau=float(tau), tau0=tau0,
        gamma=1.0, delta=-3.0, p_star=2.0, q_star=3.0, case="v1",
    )


def validate_v2(alpha, theta, tau=0.0):
    """Admissible step configuration.

    beta is derived from theta^2 alpha = (1 - theta)^2 beta.  Either orientation
    of the short interval is accepted; the returned potential is translated so
    that the short interval [0, 2 pi theta] always comes first.
    """
    if not alpha > 0:
        raise InvalidParameters(f"alpha must be positive, got {alpha}")
    if not 0.0 < theta < 1.0:
        raise ThetaOutOfRange(f"theta must lie in (0, 1), got {theta}")
    theta_c = 1.0 - theta
    if not (theta < THETA_LIMIT or theta_c < THETA_LIMIT):
        raise ThetaOutOfRange(
            f"theta = {theta}: neither theta nor 1 - theta lies in (0, {THETA_LIMIT:.6f})"
        )
    beta = alpha * theta**2 / theta_c**2
    omega = 1.0 / (4.0 * theta * math.sqrt(alpha))
    tau0 = 1.0 - 16.0 * theta * theta_c / (theta**2 + theta_c**2)
    _check_tau(tau, tau0)
    if theta < THETA_LIMIT:
        pot = Step(alpha, beta, theta)
    else:
        pot = Step(beta, alpha, theta_c)
    return ModelParams(
        potential=pot, omega=omega, tau=float(tau), tau0=tau0,
        gamma=1.0, delta=-1.0, p_star=3.0, q_star=4.0, case="v2",
    )


def check_odd(k):
    if int(k) != k or k % 2 == 0:
        raise EvenMode(f"only odd temporal modes exist, got k = {k}")
    return int(k)


def mode_weight(params, k):
    """omega^2 (k^2 - tau), the factor multiplying V in L_k."""
    k = check_odd(k)
    return params.omega**2 * (k * k - params.tau)


@dataclass(frozen=True)
class PeriodicCoefficient:
    """Coefficient Q of ``-u'' + Q u`` on one period [0, 2 pi).

    ``values[i]`` holds on ``[edges[i], edges[i+1]]``; ``atoms`` are
    ``(position, strength)`` point interactions imposing
    ``u'(x+) - u'(x-) = strength * u(x)``.
    """

    edges: tuple = (0.0, TWO_PI)
    values: tuple = (0.0,)
    atoms: tuple = field(default=())

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if edges.ndim != 1 or len(edges) != len(values) + 1 or len(values) == 0:
            raise InvalidCoefficient("need len(edges) == len(values) + 1 >= 2")
        if edges[0] != 0.0 or not math.isclose(edges[-1], TWO_PI, rel_tol=0, abs_tol=1e-12):
            raise InvalidCoefficient("edges must span exactly [0, 2 pi]")
        if np.any(np.diff(edges) <= 0):
            raise InvalidCoefficient("edges must be strictly increasing")
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(edges))):
            raise InvalidCoefficient("non-finite coefficient values")
        for pos, strength in self.atoms:
            if not (0.0 <= pos < TWO_PI) or not math.isfinite(strength):
                raise InvalidCoefficient(f"atom ({pos}, {strength}) outside [0, 2 pi) or non-finite")

    def breakpoints(self):
        """Positions in [0, 2 pi) where the coefficient is singular or jumps."""
        pts = set(float(e) for e in self.edges[:-1] if e > 0.0)
        pts.update(float(pos) for pos, _ in self.atoms)
        if len(self.values) > 1:
            pts.add(0.0)
        return tuple(sorted(pts))

    def value_at(self, x):
        """Piecewise-constant part evaluated at (periodically reduced) x."""
        xr = np.mod(np.asarray(x, dtype=float), TWO_PI)
        idx = np.searchsorted(np.asarray(self.edges), xr, side="right") - 1
        idx = np.clip(idx, 0, len(self.values) - 1)
        return np.asarray(self.values)[idx]

    def scaled(self, factor):
        return PeriodicCoefficient(
            self.edges, tuple(factor * v for v in self.values),
            tuple((pos, factor * s) for pos, s in self.atoms),
        )


def potential_coefficient(potential):
    """V itself as a PeriodicCoefficient."""
    if isinstance(potential, DeltaComb):
        return PeriodicCoefficient((0.0, TWO_PI), (potential.alpha,), ((0.0, potential.beta),))
    if isinstance(potential, Step):
        return PeriodicCoefficient(
            (0.0, TWO_PI * potential.theta, TWO_PI), (potential.alpha, potential.beta)
        )
    raise InvalidParameters(f"unknown potential {potential!r}")


def mode_coefficient(params, k):
    """Q = -omega^2 (k^2 - tau) V, the coefficient of L_k."""
    return potential_coefficient(params.potential).scaled(-mode_weight(params, k))
