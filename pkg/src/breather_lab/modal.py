"""Finite element discretization of the mode operators on a truncated line.

Each L_k is discretized with conforming P1 elements on [-2 pi M, 2 pi M] with
homogeneous Dirichlet conditions.  Delta atoms and potential jumps sit on
nodes, so the point interaction is an exact rank-one nodal term.  A dense
generalized eigensolve provides signed eigenpairs that stand in for the
spectral projections onto the positive and negative parts of L_k.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import DimensionMismatch, GapPolluted, GridMissingAtoms, SolverFailure
from .floquet import gap_radius
from .potential import TWO_PI, DeltaComb, PeriodicCoefficient, Step, mode_coefficient

log = logging.getLogger(__name__)

DEFAULT_PERIODS = 16
DEFAULT_NODES = 64
RESCUE_PERIODS = 24
BOUNDARY_MASS_LIMIT = 0.9


@dataclass(frozen=True)
class Grid:
    """Nodes of [-2 pi M, 2 pi M]; the two end nodes carry Dirichlet conditions."""

    periods_each_side: int
    nodes_per_period: int
    nodes: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        if self.nodes_per_period < 8:
            raise ValueError(f"need at least 8 nodes per period, got {self.nodes_per_period}")
        if x.ndim != 1 or x.size < 3 or np.any(np.diff(x) <= 0):
            raise ValueError("grid nodes must be strictly increasing")

    @classmethod
    def build(cls, M=DEFAULT_PERIODS, n=DEFAULT_NODES, cell=None, center=0.0):
        """Periodic repetition of ``cell`` (nodes in [0, 2 pi)) on [center - 2 pi M, center + 2 pi M].

        ``center`` must itself be a cell node so that both ends are grid nodes.
        """
        if cell is None:
            cell = TWO_PI * np.arange(n) / n
        cell = np.asarray(cell, dtype=float)
        shifts = TWO_PI * np.arange(-M - 1, M + 2)
        x = (shifts[:, None] + cell[None, :]).ravel()
        lo, hi = center - TWO_PI * M, center + TWO_PI * M
        x = x[(x > lo + 1e-9) & (x < hi - 1e-9)]
        return cls(int(M), int(n), np.concatenate(([lo], x, [hi])))

    @classmethod
    def for_params(cls, params, M=DEFAULT_PERIODS, n=DEFAULT_NODES):
        """Grid adapted to the potential: step cells split n by the local phase."""
        pot = params.potential
        if isinstance(pot, DeltaComb):
            return cls.build(M, n)
        if isinstance(pot, Step):
            # cutting on the long plateau's symmetry point avoids Dirichlet edge states
            cell = step_cell(pot, n)
            a = TWO_PI * pot.theta
            return cls.build(M, n, cell, cell[np.argmin(np.abs(cell - 0.5 * (a + TWO_PI)))])
        raise TypeError(f"unsupported potential {pot!r}")

    @property
    def x(self):
        return np.asarray(self.nodes)

    @property
    def interior(self):
        return self.x[1:-1]

    @property
    def size(self):
        return self.x.size - 2

    @property
    def h(self):
        return np.diff(self.x)

    @property
    def length(self):
        return self.x[-1] - self.x[0]

    def lumped_weights(self):
        """Trapezoid weights of the interior nodes."""
        h = self.h
        return 0.5 * (h[:-1] + h[1:])

    def node_index(self, pos, tol=1e-9):
        j = int(np.searchsorted(self.x, pos))
        for cand in (j - 1, j):
            if 0 <= cand < self.x.size and abs(self.x[cand] - pos) <= tol:
                return cand
        return -1

    def outer_mask(self):
        """Interior nodes within one period of either end."""
        x = self.interior
        return (x - self.x[0] < TWO_PI) | (self.x[-1] - x < TWO_PI)


def step_cell(pot, n):
    """Cell nodes for a step potential, splitting n by the phases theta sqrt(alpha) : (1-theta) sqrt(beta)."""
    pa = pot.theta * math.sqrt(pot.alpha)
    pb = (1.0 - pot.theta) * math.sqrt(pot.beta)
    na = min(n - 2, max(2, int(round(n * pa / (pa + pb)))))
    nb = n - na
    a = TWO_PI * pot.theta
    return np.concatenate((a * np.arange(na) / na, a + (TWO_PI - a) * np.arange(nb) / nb))


# -- assembly ---------------------------------------------------------------

def _tridiag(diag, off):
    return sp.diags([off, diag, off], [-1, 0, 1], format="csr")


def _element_forms(grid, elem_q, blended=False):
    """Interior stiffness and q-weighted mass for element values ``elem_q``.

    ``blended`` averages the consistent and lumped element masses, which
    cancels the leading P1 dispersion error of oscillatory modes.
    """
    h = grid.h
    s_d = 1.0 / h[:-1] + 1.0 / h[1:]
    s_o = -1.0 / h[1:-1]
    qh = elem_q * h
    d, o = (5.0 / 12.0, 1.0 / 12.0) if blended else (1.0 / 3.0, 1.0 / 6.0)
    return _tridiag(s_d, s_o), _tridiag(d * (qh[:-1] + qh[1:]), o * qh[1:-1])


def stiffness_matrix(grid):
    return _element_forms(grid, np.zeros(grid.h.size))[0]


def mass_matrix(grid):
    """Consistent P1 mass matrix (exact L2 inner product of nodal interpolants)."""
    return _element_forms(grid, np.ones(grid.h.size))[1]


def spectral_mass(grid):
    """Blended mass matrix used as the B of every mode eigenproblem."""
    return _element_forms(grid, np.ones(grid.h.size), blended=True)[1]


def _check_nodes(coeff, grid):
    lo, hi = grid.x[0], grid.x[-1]
    m_lo, m_hi = int(math.floor(lo / TWO_PI)), int(math.ceil(hi / TWO_PI))
    for b in coeff.breakpoints():
        for m in range(m_lo, m_hi + 1):
            pos = b + TWO_PI * m
            if lo < pos < hi and grid.node_index(pos) < 0:
                raise GridMissingAtoms(f"breakpoint {pos:.6g} is not a grid node")


def assemble_operator(coeff, grid):
    """Matrix of the form ``int u'v' + Q u v`` (atoms as rank-one nodal terms) on the interior nodes."""
    if not isinstance(coeff, PeriodicCoefficient):
        raise TypeError("coefficient must be a PeriodicCoefficient")
    _check_nodes(coeff, grid)
    mids = 0.5 * (grid.x[:-1] + grid.x[1:])
    stiff, qmass = _element_forms(grid, coeff.value_at(mids), blended=True)
    diag = np.zeros(grid.size)
    for pos, strength in coeff.atoms:
        for m in range(-grid.periods_each_side - 1, grid.periods_each_side + 2):
            j = grid.node_index(pos + TWO_PI * m)
            if 0 < j < grid.x.size - 1:
                diag[j - 1] += strength
    return (stiff + qmass + sp.diags(diag)).tocsr()


def assemble_forms(params, k, grid):
    """(A_k, B): form matrix of L_k and the blended mass matrix, both sparse."""
    return assemble_operator(mode_coefficient(params, k), grid), spectral_mass(grid)


# -- eigen-decomposition ----------------------------------------------------

@dataclass(frozen=True)
class ModalBasis:
    """Signed eigenpairs of A e = lambda B e; columns of ``eigenvectors`` are B-orthonormal."""

    k: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    mass: object
    grid: Grid = None

    @property
    def size(self):
        return self.eigenvalues.size

    @property
    def n_negative(self):
        return int(np.count_nonzero(self.eigenvalues < 0))

    @property
    def positive(self):
        return self.eigenvalues > 0

    def coords(self, u):
        """Modal coefficients c = E^T B u of a nodal vector (or matrix of columns)."""
        return self.eigenvectors.T @ (self.mass @ u)

    def nodal(self, c):
        return self.eigenvectors @ c


def boundary_fraction(grid, vec):
    """Share of the lumped L2 mass of ``vec`` in the two outermost periods."""
    w = grid.lumped_weights()
    outer = grid.outer_mask()
    dens = w * np.abs(vec) ** 2
    total = dens.sum()
    return float(dens[outer].sum() / total) if total > 0 else 0.0


def decompose(A, B, k=0, gap_tol=None, grid=None):
    """Dense generalized eigensolve; raises GapPolluted if an eigenvalue lies in (-gap_tol, gap_tol)."""
    A = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)
    B_dense = B.toarray() if sp.issparse(B) else np.asarray(B, dtype=float)
    if A.shape != B_dense.shape or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"A {A.shape} and B {B_dense.shape} differ")
    try:
        lam, vec = scipy.linalg.eigh(A, B_dense)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverFailure(f"generalized eigensolve failed: {exc}") from exc
    # deterministic sign convention: largest-magnitude entry positive
    idx = np.argmax(np.abs(vec), axis=0)
    signs = np.sign(vec[idx, np.arange(vec.shape[1])])
    vec = vec * np.where(signs == 0, 1.0, signs)
    if gap_tol is not None:
        bad = np.flatnonzero(np.abs(lam) < gap_tol)
        if bad.size:
            j = bad[np.argmin(np.abs(lam[bad]))]
            frac = boundary_fraction(grid, vec[:, j]) if grid is not None else 0.0
            log.warning("k=%d: eigenvalue %.6g in gap, outer-period mass profile %.3f", k, lam[j], frac)
            raise GapPolluted(k, float(lam[j]), frac, gap_tol)
    return ModalBasis(k=int(k), eigenvalues=lam, eigenvectors=vec, mass=B, grid=grid)


def mode_basis(params, k, grid, check_gap=True):
    """ModalBasis of L_k on ``grid`` with the Floquet-derived gap check."""
    A, B = assemble_forms(params, k, grid)
    tol = 0.5 * gap_radius(params, k) if check_gap else None
    return decompose(A, B, k=k, gap_tol=tol, grid=grid)


def mode_bases(params, k_max, grid, rescue_M=RESCUE_PERIODS):
    """Bases for all odd k <= k_max; a boundary-localized gap eigenvalue triggers one rebuild at ``rescue_M``."""
    try:
        return grid, {k: mode_basis(params, k, grid) for k in range(1, k_max + 1, 2)}
    except GapPolluted as exc:
        if not exc.boundary_localized or grid.periods_each_side >= rescue_M:
            raise
        log.info("rebuilding grid at M=%d after %s", rescue_M, exc)
        grid = Grid.for_params(params, rescue_M, grid.nodes_per_period)
        return grid, {k: mode_basis(params, k, grid) for k in range(1, k_max + 1, 2)}


def _check_len(basis, c):
    c = np.asarray(c)
    if c.shape[0] != basis.size:
        raise DimensionMismatch(f"coefficient length {c.shape[0]} != basis size {basis.size}")
    return c


def project(basis, coeffs, sign):
    """Keep the modal coefficients whose eigenvalue has the requested sign (+1 or -1)."""
    c = _check_len(basis, coeffs)
    keep = basis.positive if sign > 0 else ~basis.positive
    shape = (-1,) + (1,) * (c.ndim - 1)
    return c * keep.reshape(shape)


def b_abs(basis, coeffs):
    """sum_j |lambda_j| |c_j|^2."""
    c = _check_len(basis, coeffs)
    return float(np.sum(np.abs(basis.eigenvalues) * np.abs(c) ** 2))


def abs_form(basis):
    """Nodal matrix of |A| = B E |Lambda| E^T B."""
    BE = basis.mass @ basis.eigenvectors
    return (BE * np.abs(basis.eigenvalues)) @ BE.T


# -- Rayleigh bounds --------------------------------------------------------

def verify_rayleigh_l2(params, k, grid, c, basis=None):
    """(min_j |lambda_j|, min_j |lambda_j| >= c k^gamma)."""
    basis = basis if basis is not None else mode_basis(params, k, grid)
    val = float(np.min(np.abs(basis.eigenvalues)))
    return val, bool(val >= c * abs(k) ** params.gamma)


def h1_ratio(basis, grid):
    """Smallest mu with |A| e = mu S e."""
    S = stiffness_matrix(grid).toarray()
    try:
        mu = scipy.linalg.eigh(abs_form(basis), S, eigvals_only=True, subset_by_index=[0, 0])
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverFailure(f"H1 ratio eigensolve failed: {exc}") from exc
    return float(mu[0])


def verify_rayleigh_h1(params, k, grid, c_tilde, basis=None):
    """(min ratio of |A| over the Dirichlet energy, ratio >= c_tilde k^delta)."""
    basis = basis if basis is not None else mode_basis(params, k, grid)
    val = h1_ratio(basis, grid)
    return val, bool(val >= c_tilde * abs(k) ** params.delta)


# -- trace inequality -------------------------------------------------------

def trace_inequality_sides(grid, f, eps):
    """(sum_n |f(2 pi n)|^2, (1/2pi + 1/2eps)||f||^2 + (eps/2)||f'||^2) for interior nodal values f."""
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.size,):
        raise DimensionMismatch(f"expected {grid.size} nodal values, got {f.shape}")
    M = grid.periods_each_side
    lhs = 0.0
    for m in range(-M + 1, M):
        j = grid.node_index(TWO_PI * m)
        if j > 0:
            lhs += f[j - 1] ** 2
    l2 = float(f @ (mass_matrix(grid) @ f))
    h1 = float(f @ (stiffness_matrix(grid) @ f))
    rhs = (1.0 / TWO_PI + 0.5 / eps) * l2 + 0.5 * eps * h1
    return lhs, rhs


def verify_trace_inequality(grid, f, eps):
    lhs, rhs = trace_inequality_sides(grid, f, eps)
    return bool(lhs <= rhs)
