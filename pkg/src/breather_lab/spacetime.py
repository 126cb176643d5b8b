"""Odd-mode time-Fourier states, their synthesis into space-time fields, and norms.

A state stores one complex nodal profile u_k per positive odd k <= k_max; the
negative modes are implicit through u_{-k} = conj(u_k), so the synthesized
field

    u(x, t) = sum_k u_k(x) e^{i k omega t} = 2 Re sum_{k > 0} u_k(x) e^{i k omega t}

is real by construction and T/2-antiperiodic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Aliasing, DimensionMismatch, MissingBasis
from .modal import Grid, b_abs, mass_matrix, stiffness_matrix
from .potential import TWO_PI, check_odd


def default_n_t(k_max):
    return 4 * int(k_max) + 4


def odd_modes(k_max):
    return np.arange(1, check_odd(k_max) + 1, 2)


@dataclass(frozen=True)
class FourierState:
    """Complex nodal profiles ``coeffs[i]`` of mode k = 2i + 1 on the interior grid nodes."""

    coeffs: np.ndarray
    grid: Grid
    omega: float

    def __post_init__(self):
        c = np.asarray(self.coeffs)
        if c.ndim != 2 or c.shape[1] != self.grid.size:
            raise DimensionMismatch(f"coefficients {c.shape} do not match {self.grid.size} grid dofs")

    @classmethod
    def zeros(cls, grid, omega, k_max):
        return cls(np.zeros((len(odd_modes(k_max)), grid.size), dtype=complex), grid, omega)

    @classmethod
    def from_real(cls, vec, grid, omega, k_max):
        """Inverse of :meth:`as_real` (interleaved real/imaginary pairs)."""
        vec = np.ascontiguousarray(vec, dtype=float)
        return cls(vec.view(complex).reshape(len(odd_modes(k_max)), grid.size).copy(), grid, omega)

    def as_real(self):
        return np.ascontiguousarray(self.coeffs, dtype=complex).view(float).ravel()

    @property
    def modes(self):
        return np.arange(1, 2 * self.coeffs.shape[0], 2)

    @property
    def k_max(self):
        return int(self.modes[-1])

    @property
    def period(self):
        return TWO_PI / self.omega

    def mode(self, k):
        check_odd(k)
        if abs(k) > self.k_max:
            return np.zeros(self.grid.size, dtype=complex)
        u = self.coeffs[(abs(k) - 1) // 2]
        # real fields satisfy u_{-k} = conj(u_k)
        return u if k > 0 else u.conj()

    def replace(self, coeffs):
        return FourierState(np.asarray(coeffs, dtype=complex), self.grid, self.omega)

    def __add__(self, other):
        return self.replace(self.coeffs + other.coeffs)

    def __sub__(self, other):
        return self.replace(self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return self.replace(self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self.replace(-self.coeffs)


@dataclass(frozen=True)
class SpaceTimeField:
    """Real values ``values[j, i]`` at time t_j = j T / N_t and interior node i."""

    values: np.ndarray
    grid: Grid
    omega: float

    @property
    def n_t(self):
        return self.values.shape[0]

    @property
    def period(self):
        return TWO_PI / self.omega

    @property
    def times(self):
        return self.period * np.arange(self.n_t) / self.n_t


def _phases(modes, n_t):
    j = np.arange(n_t)
    # e^{i k omega t_j} = e^{2 pi i k j / N_t}, independent of omega
    return np.exp(2j * np.pi * np.outer(j, modes) / n_t)


def _check_alias(k_max, n_t):
    if not n_t > 2 * k_max:
        raise Aliasing(f"N_t = {n_t} must exceed 2 k_max = {2 * k_max}")


def synthesize(state, n_t=None):
    """Real field 2 Re sum_k u_k e^{i k omega t} on the uniform time grid."""
    n_t = default_n_t(state.k_max) if n_t is None else int(n_t)
    _check_alias(state.k_max, n_t)
    vals = 2.0 * np.real(_phases(state.modes, n_t) @ state.coeffs)
    return SpaceTimeField(vals, state.grid, state.omega)


def analyze(field, k_max, return_even=False):
    """Odd coefficients u_k = mean_t field e^{-i k omega t}; optionally the largest even-mode amplitude."""
    _check_alias(k_max, field.n_t)
    modes = odd_modes(k_max)
    ph = _phases(modes, field.n_t)
    coeffs = ph.conj().T @ field.values / field.n_t
    state = FourierState(coeffs, field.grid, field.omega)
    if not return_even:
        return state
    even = np.arange(0, field.n_t // 2 + 1, 2)
    ev = _phases(even, field.n_t).conj().T @ field.values / field.n_t
    return state, float(np.max(np.abs(ev))) if ev.size else 0.0


# -- norms ------------------------------------------------------------------

def _x_weights(grid):
    return grid.lumped_weights()


def l2_plancherel_check(state, n_t=None):
    """(space-time L2 norm^2 of the synthesized field, T * sum over +-k of ||u_k||^2)."""
    w = _x_weights(state.grid)
    field = synthesize(state, n_t)
    T = state.period
    lhs = T * float(np.mean(field.values**2 @ w))
    rhs = T * 2.0 * float(np.sum(np.abs(state.coeffs) ** 2 @ w))
    return lhs, rhs


def lq_norm(field, q):
    """(int_0^T int |u|^q dx dt)^(1/q) with trapezoid weights in x and uniform weights in t."""
    if not (np.isfinite(q) and q >= 1):
        raise ValueError(f"q must be finite and >= 1, got {q}")
    w = _x_weights(field.grid)
    integral = field.period * float(np.mean(np.abs(field.values) ** q @ w))
    return integral ** (1.0 / q)


def _basis_for(bases, k):
    try:
        return bases[int(k)]
    except KeyError:
        raise MissingBasis(f"no modal basis for k = {k}") from None


def h_norm_sq(state, bases):
    """2 sum_{k > 0} sum_j |lambda_j| |c_j|^2 with c the modal coordinates of u_k."""
    total = 0.0
    for k, u in zip(state.modes, state.coeffs):
        basis = _basis_for(bases, k)
        total += b_abs(basis, basis.coords(u))
    return 2.0 * total


def split(state, bases, sign=1):
    """(P+ state, P- state) for the spectral sign convention ``sign`` (+1 or -1)."""
    plus, minus = np.zeros_like(state.coeffs), np.zeros_like(state.coeffs)
    for i, (k, u) in enumerate(zip(state.modes, state.coeffs)):
        basis = _basis_for(bases, k)
        c = basis.coords(u)
        pos = (sign * basis.eigenvalues) > 0
        plus[i] = basis.nodal(np.where(pos, c, 0.0))
        minus[i] = basis.nodal(np.where(pos, 0.0, c))
    return state.replace(plus), state.replace(minus)


def quadratic_form(state, bases):
    """B(u, u) = 2 sum_k sum_j lambda_j |c_j|^2."""
    total = 0.0
    for k, u in zip(state.modes, state.coeffs):
        basis = _basis_for(bases, k)
        total += float(np.sum(basis.eigenvalues * np.abs(basis.coords(u)) ** 2))
    return 2.0 * total


def hhat_norm_sq(state, gamma, delta):
    """2 sum_{k > 0} (k^gamma ||u_k||^2 + k^delta ||u_k'||^2)."""
    B = mass_matrix(state.grid)
    S = stiffness_matrix(state.grid)
    total = 0.0
    for k, u in zip(state.modes, state.coeffs):
        l2 = float(np.real(np.vdot(u, B @ u)))
        h1 = float(np.real(np.vdot(u, S @ u)))
        total += k**gamma * l2 + k**delta * h1
    return 2.0 * total


# -- tabular export ---------------------------------------------------------

def field_rows(field):
    """(x, t, u) rows, x fastest."""
    x = field.grid.interior
    for t, row in zip(field.times, field.values):
        for xi, ui in zip(x, row):
            yield float(xi), float(t), float(ui)


def state_rows(state):
    """(k, x, Re u_k, Im u_k) rows."""
    x = state.grid.interior
    for k, u in zip(state.modes, state.coeffs):
        for xi, ui in zip(x, u):
            yield int(k), float(xi), float(ui.real), float(ui.imag)
