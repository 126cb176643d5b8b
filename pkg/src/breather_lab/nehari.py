"""Ground states of the indefinite functional J on the generalized Nehari manifold.

Everything runs in scaled modal coordinates: for mode k with eigenpairs
(lambda_j, e_j) a state is a_{k,j} = sqrt|lambda_j| c_{k,j}, c = E^T B u_k.
The real Hilbert structure of the odd-mode space is then

    <a, b> = 2 Re sum conj(a) b,

and the quadratic part of J is 1/2 <a, sigma a> with sigma = sign * sgn(lambda).
The nonlinear part J_1 = (1/T) int_D F(x, u) uses the uniform time grid and
trapezoid weights in x.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.optimize
import scipy.sparse.linalg as spla

from .errors import (
    DegenerateStart,
    DimensionMismatch,
    ExponentOutOfRange,
    InHMinus,
    MaxIterations,
    MissingBasis,
    ZeroField,
)
from .modal import assemble_forms
from .potential import TWO_PI
from .spacetime import FourierState, SpaceTimeField, default_n_t, odd_modes, synthesize

log = logging.getLogger(__name__)


# -- nonlinearities ---------------------------------------------------------

@dataclass(frozen=True)
class Nonlinearity:
    """Pointwise f(x, s), its primitive F and derivative df; x broadcasts over the last axis of s."""

    f: object
    F: object
    df: object
    p: float = 2.0
    name: str = "custom"


def _gamma_values(gamma, x):
    if callable(gamma):
        return np.asarray(gamma(np.mod(x, TWO_PI)), dtype=float)
    return np.full(np.shape(x), float(gamma))


class PowerNonlinearity(Nonlinearity):
    """f = Gamma(x) |s|^(p-1) s with a positive 2 pi periodic Gamma (constant or callable)."""

    def __init__(self, p, gamma=1.0):
        if not p > 1:
            raise ExponentOutOfRange(f"p must exceed 1, got {p}")
        g = lambda x: _gamma_values(gamma, x)
        super().__init__(
            f=lambda x, s: g(x) * np.abs(s) ** (p - 1) * s,
            F=lambda x, s: g(x) * np.abs(s) ** (p + 1) / (p + 1),
            df=lambda x, s: p * g(x) * np.abs(s) ** (p - 1),
            p=float(p),
            name="power",
        )
        object.__setattr__(self, "gamma", gamma)

    def scaled(self, factor):
        gamma = self.gamma
        return PowerNonlinearity(self.p, lambda x: factor * _gamma_values(gamma, x))


def zero_nonlinearity():
    zero = lambda x, s: np.zeros_like(s)
    return Nonlinearity(zero, zero, zero, p=2.0, name="zero")


@dataclass
class HypothesisReport:
    growth_c: float
    growth: bool
    small_at_zero: bool
    odd: bool
    monotone: bool
    superquadratic: bool
    violations: list = field(default_factory=list)

    @property
    def all_pass(self):
        return not self.violations


def check_hypotheses(nl, x=None, n_s=241):
    """Sampled growth, smallness at 0, oddness, monotonicity of f/|s| and superquadraticity."""
    x = np.linspace(0.0, TWO_PI, 17)[:-1] if x is None else np.asarray(x, dtype=float)
    s = np.logspace(-3, 3, n_s)
    S = np.concatenate((-s[::-1], s))[:, None]
    fx = nl.f(x, S)
    ratio = fx / np.abs(S)
    growth_c = float(np.max(np.abs(fx) / (1.0 + np.abs(S) ** nl.p)))
    growth = bool(np.isfinite(growth_c))
    r_small = np.abs(nl.f(x, np.array([[1e-3], [1e-6]]))) / np.array([[1e-3], [1e-6]])
    small = bool(np.all(r_small[1] < r_small[0] * (1.0 - 1e-9)))
    odd = bool(np.array_equal(nl.f(x, -S), -fx))
    monotone = bool(np.all(np.diff(ratio, axis=0) > 0))
    big = np.array([[10.0], [100.0], [1000.0]])
    q = nl.F(x, big) / big**2
    superq = bool(np.all(np.diff(q, axis=0) > 0) and np.all(q[-1] > 10.0 * q[0]))
    names = {"growth": growth, "small_at_zero": small, "odd": odd, "monotone": monotone,
             "superquadratic": superq}
    return HypothesisReport(growth_c, growth, small, odd, monotone, superq,
                            [k for k, ok in names.items() if not ok])


# -- configuration ----------------------------------------------------------

@dataclass(frozen=True)
class SolverConfig:
    sign: int = 1
    k_max: int = 9
    periods: int = 16
    nodes: int = 64
    n_t: int = 0
    inner_tol: float = 1e-10
    outer_tol: float = 1e-9
    residual_tol: float = 1e-6
    polish_tol: float = 1e-4
    max_iter: int = 400
    max_inner: int = 200
    max_newton: int = 20
    armijo_c: float = 1e-4
    armijo_shrink: float = 0.5
    seed: int = 0
    seed_noise: float = 0.0
    seed_width: float = 2.0 * TWO_PI

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        for name in ("inner_tol", "outer_tol", "residual_tol", "polish_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.k_max < 1 or self.k_max % 2 == 0:
            raise ValueError(f"k_max must be a positive odd integer, got {self.k_max}")

    def time_points(self, p):
        """max(4 k_max + 4, ceil((p+1) k_max / 2) rounded up to a multiple of 4), or the explicit n_t."""
        if self.n_t:
            return int(self.n_t)
        alias = 4 * math.ceil(math.ceil((p + 1) * self.k_max / 2) / 4)
        return max(default_n_t(self.k_max), alias)

    def validate(self, params, nl):
        if not 1.0 < nl.p < params.p_star:
            raise ExponentOutOfRange(f"p = {nl.p} must lie in (1, {params.p_star})")
        return self

    def as_dict(self):
        return asdict(self)


@dataclass
class GroundStateReport:
    J_value: float
    nehari_defect: float
    weak_residual: float
    decay_ratio: float
    decay_rate: float
    grad_norm: float
    h_norm: float
    iterations: int
    newton_steps: int
    converged: bool
    sign: int
    shift_periods: int = 0

    def as_dict(self):
        return {k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in asdict(self).items()}


# -- modal coordinates ------------------------------------------------------

def _real_matvec(E, v):
    """E @ v for real E and complex v without promoting E to complex."""
    y = E @ np.column_stack((v.real, v.imag))
    return y[:, 0] + 1j * y[:, 1]


class ModalSpace:
    """Scaled modal coordinates for the occupied odd modes on one grid."""

    def __init__(self, bases, grid, omega, k_max, sign=1, n_t=None):
        self.modes = odd_modes(k_max)
        try:
            self.bases = [bases[int(k)] for k in self.modes]
        except KeyError as exc:
            raise MissingBasis(f"no modal basis for k = {exc.args[0]}") from None
        for b in self.bases:
            if b.size != grid.size:
                raise DimensionMismatch("basis size does not match the grid")
        self.grid = grid
        self.omega = float(omega)
        self.k_max = int(k_max)
        self.sign = int(sign)
        self.n_t = default_n_t(k_max) if n_t is None else int(n_t)
        self.lam = np.array([b.eigenvalues for b in self.bases])
        self.root = np.sqrt(np.abs(self.lam))
        self.sigma = np.where(self.sign * self.lam > 0, 1.0, -1.0)
        self.weights = grid.lumped_weights()
        self.x = grid.interior
        j = np.arange(self.n_t)
        self.phases = np.exp(2j * np.pi * np.outer(j, self.modes) / self.n_t)

    @property
    def shape(self):
        return self.lam.shape

    def zeros(self):
        return np.zeros(self.shape, dtype=complex)

    # transforms
    def from_state(self, state):
        if state.coeffs.shape[0] < len(self.modes):
            raise MissingBasis("state has fewer modes than the space")
        return np.array([r * _real_matvec(b.eigenvectors.T, b.mass @ u)
                         for r, b, u in zip(self.root, self.bases, state.coeffs)])

    def nodal(self, a):
        return np.array([_real_matvec(b.eigenvectors, ak / r) for b, ak, r in zip(self.bases, a, self.root)])

    def to_state(self, a):
        return FourierState(self.nodal(a), self.grid, self.omega)

    def field_values(self, U):
        return 2.0 * np.real(self.phases @ U)

    def harmonics(self, vals):
        return self.phases.conj().T @ vals / self.n_t

    def dual(self, fhat):
        """Scaled coordinates of the functional phi -> 2 Re sum_k <fhat_k, phi_k>_W."""
        return np.array([_real_matvec(b.eigenvectors.T, self.weights * fk) / r
                         for b, fk, r in zip(self.bases, fhat, self.root)])

    # geometry
    @staticmethod
    def inner(a, b):
        return 2.0 * float(np.real(np.vdot(a, b)))

    def norm(self, a):
        return math.sqrt(max(self.inner(a, a), 0.0))

    def plus(self, a):
        return np.where(self.sigma > 0, a, 0.0)

    def minus(self, a):
        return np.where(self.sigma > 0, 0.0, a)

    def point(self, a, nl):
        return _Point(self, a, nl)


class _Point:
    """Cached space-time quantities at one state."""

    def __init__(self, space, a, nl):
        self.space, self.a, self.nl = space, a, nl
        self.U = space.nodal(a)
        self.u = space.field_values(self.U)
        self._df = None

    @property
    def J(self):
        sp_ = self.space
        j0 = 0.5 * sp_.inner(self.a, sp_.sigma * self.a)
        j1 = float(np.mean(self.nl.F(sp_.x, self.u), axis=0) @ sp_.weights)
        return j0 - j1

    @property
    def fhat(self):
        return self.space.harmonics(self.nl.f(self.space.x, self.u))

    @property
    def grad(self):
        return self.space.sigma * self.a - self.space.dual(self.fhat)

    def hess(self, b):
        sp_ = self.space
        if self._df is None:
            self._df = self.nl.df(sp_.x, self.u)
        v = sp_.field_values(sp_.nodal(b))
        return sp_.sigma * b - sp_.dual(sp_.harmonics(self._df * v))


# -- functional, gradient and diagnostics ----------------------------------

def _space_for(state, bases, sign, n_t=None):
    return ModalSpace(bases, state.grid, state.omega, state.k_max, sign, n_t)


def eval_J(state, bases, nl, sign=1, n_t=None):
    space = _space_for(state, bases, sign, n_t)
    return space.point(space.from_state(state), nl).J


def grad_J(state, bases, nl, sign=1, n_t=None):
    """Riesz representative of J'(state) in the odd-mode Hilbert space."""
    space = _space_for(state, bases, sign, n_t)
    return space.to_state(space.point(space.from_state(state), nl).grad)


def h_inner(space, s1, s2):
    return space.inner(space.from_state(s1), space.from_state(s2))


def defect_of(space, a, G):
    return abs(space.inner(G, a)) + space.norm(space.minus(G))


def nehari_defect(state, bases, nl, sign=1, n_t=None):
    """|J'(u)[u]| + ||P^- grad J(u)||."""
    space = _space_for(state, bases, sign, n_t)
    a = space.from_state(state)
    return defect_of(space, a, space.point(a, nl).grad)


def residual_weak_form(state, params, bases, nl, sign=1, n_t=None):
    """max_k of the B^{-1} dual norm of sign * A_k u_k - W fhat_k over nodal test functions."""
    space = _space_for(state, bases, sign, n_t)
    pt = space.point(space.from_state(state), nl)
    fhat = pt.fhat
    worst = 0.0
    for k, u, fk in zip(space.modes, state.coeffs, fhat):
        A, B = assemble_forms(params, int(k), state.grid)
        r = sign * (A @ u) - space.weights * fk
        z = spla.spsolve(B.tocsc(), r)
        worst = max(worst, math.sqrt(max(float(np.real(np.vdot(r, z))), 0.0)))
    return worst


# -- inner maximization -----------------------------------------------------

class _ConeProblem:
    """J restricted to R e + H^- in the variables z = (s, sqrt2 Re b, sqrt2 Im b)."""

    def __init__(self, space, e, nl):
        self.space, self.e, self.nl = space, e, nl
        self.neg = space.sigma < 0
        self.n_neg = int(np.count_nonzero(self.neg))
        self._cache = (None, None)

    def embed(self, z):
        a = self.e * z[0]
        b = (z[1:1 + self.n_neg] + 1j * z[1 + self.n_neg:]) / math.sqrt(2.0)
        a = a.copy()
        a[self.neg] += b
        return a

    def reduce(self, g):
        gn = g[self.neg]
        return np.concatenate(([self.space.inner(g, self.e)], math.sqrt(2.0) * gn.real,
                               math.sqrt(2.0) * gn.imag))

    def lift(self, a):
        b = a[self.neg] * math.sqrt(2.0)
        return np.concatenate(([self.space.inner(a, self.e)], b.real, b.imag))

    def at(self, z):
        key = z.tobytes()
        if self._cache[0] != key:
            self._cache = (key, self.space.point(self.embed(z), self.nl))
        return self._cache[1]

    def fun(self, z):
        return -self.at(z).J

    def jac(self, z):
        return -self.reduce(self.at(z).grad)

    def hessp(self, z, v):
        d = self.embed(v)
        return -self.reduce(self.at(z).hess(d))


def _scalar_peak(space, e, nl):
    """argmax_{s > 0} J(s e) by bracketing and bounded scalar search."""
    j = lambda s: space.point(s * e, nl).J
    hi = 1.0
    for _ in range(200):
        if j(hi) < 0:
            break
        hi *= 2.0
    else:
        raise MaxIterations("J(s e) stays nonnegative along the ray")
    res = scipy.optimize.minimize_scalar(lambda s: -j(s), bounds=(0.0, hi), method="bounded",
                                         options={"xatol": 1e-10 * hi})
    return float(res.x)


def scalar_oracle(space, w, nl_power):
    """s* = (||w||^2 / A)^(1/(p-1)) with A = (1/T) int Gamma |S w|^(p+1) for a purely positive w."""
    pt = space.point(w, nl_power)
    p = nl_power.p
    A = float(np.mean((p + 1) * nl_power.F(space.x, pt.u), axis=0) @ space.weights)
    return (space.inner(w, w) / A) ** (1.0 / (p - 1.0))


def inner_maximize_coords(space, w, nl, tol=1e-10, max_iter=200, warm=None):
    """m_1(w) in scaled coordinates, maximizing J over R^+ w^+ + H^-."""
    wp = space.plus(w)
    nrm = space.norm(wp)
    # roundoff from nodal round trips counts as zero
    if not nrm > 1e-12 * space.norm(w):
        raise InHMinus("w has no component in the positive space")
    e = wp / nrm
    prob = _ConeProblem(space, e, nl)
    if warm is not None:
        z0 = prob.lift(warm)
        if not z0[0] > 0:
            z0 = None
    else:
        z0 = None
    if z0 is None:
        z0 = np.zeros(1 + 2 * prob.n_neg)
        z0[0] = _scalar_peak(space, e, nl)
    # tolerance relative to the state size; roundoff floors absolute gradients
    gtol = tol * max(1.0, float(np.linalg.norm(z0)))
    res = scipy.optimize.minimize(prob.fun, z0, jac=prob.jac, hessp=prob.hessp, method="trust-ncg",
                                  options={"gtol": gtol, "maxiter": max_iter})
    z = res.x
    # trust-region ratios lose meaning near the roundoff floor of J; finish with Newton-CG on the gradient
    n = z.size
    for _ in range(10):
        g = prob.jac(z)
        gnorm = float(np.linalg.norm(g))
        if gnorm < gtol:
            break
        op = spla.LinearOperator((n, n), matvec=lambda v, z=z: prob.hessp(z, v), dtype=float)
        dz, _ = spla.cg(op, -g, rtol=1e-3, maxiter=200)
        z = z + dz
    gnorm = float(np.linalg.norm(prob.jac(z)))
    if gnorm >= gtol:
        raise MaxIterations(f"inner maximization stalled: restricted gradient {gnorm:.3e} ({res.message})")
    m = prob.embed(z)
    if z[0] < 0:
        m = -m
    return m


def inner_maximize(w, bases, nl, sign=1, cfg=None, n_t=None):
    cfg = cfg or SolverConfig(sign=sign)
    space = _space_for(w, bases, sign, n_t)
    m = inner_maximize_coords(space, space.from_state(w), nl, cfg.inner_tol, cfg.max_inner)
    return space.to_state(m)


# -- outer minimization -----------------------------------------------------

def seed_coords(space, cfg):
    """Gaussian bump times the lowest positive mode of k = 1, made even about the domain center."""
    grid = space.grid
    lam1 = space.sign * space.lam[0]
    pos = np.flatnonzero(lam1 > 0)
    if pos.size == 0:
        raise DegenerateStart("no positive mode for k = 1")
    j = pos[np.argmin(lam1[pos])]
    center = 0.5 * (grid.x[0] + grid.x[-1])
    vec = space.bases[0].eigenvectors[:, j] * np.exp(-0.5 * ((space.x - center) / cfg.seed_width) ** 2)
    even = 0.5 * (vec + vec[::-1])
    if np.linalg.norm(even) > 0.1 * np.linalg.norm(vec):
        vec = even
    U = np.zeros(space.shape, dtype=complex)
    U[0] = vec
    if cfg.seed_noise > 0:
        rng = np.random.default_rng(cfg.seed)
        U += cfg.seed_noise * np.max(np.abs(vec)) * rng.standard_normal(U.shape)
    a = space.from_state(FourierState(U, grid, space.omega))
    if not space.norm(space.plus(a)) > 0:
        raise DegenerateStart("seed has no positive component")
    return a


def _newton_polish(space, a, nl, tol, max_steps):
    """Newton iteration on grad J = 0 with MINRES on the symmetric indefinite Hessian."""
    shape = space.shape
    n = 2 * a.size
    to_c = lambda v: np.ascontiguousarray(v).view(complex).reshape(shape)
    to_r = lambda c: np.ascontiguousarray(c).view(float).ravel()
    steps = 0
    pt = space.point(a, nl)
    G = pt.grad
    for steps in range(1, max_steps + 1):
        g = space.norm(G)
        if g < tol:
            return a, G, steps - 1
        op = spla.LinearOperator((n, n), matvec=lambda v: to_r(pt.hess(to_c(v))), dtype=float)
        delta, _ = spla.minres(op, -to_r(G), rtol=min(1e-3, 0.1 * g), maxiter=500)
        delta = to_c(delta)
        t = 1.0
        for _ in range(30):
            cand = space.point(a + t * delta, nl)
            Gc = cand.grad
            if space.norm(Gc) < (1.0 - 1e-4 * t) * g:
                break
            t *= 0.5
        else:
            log.warning("Newton line search failed at |G| = %.3e", g)
            return a, G, steps
        a, pt, G = a + t * delta, cand, Gc
    return a, G, steps


def decay_estimate(field, center=None):
    """(peak amplitude / max amplitude in the outermost periods, fitted exponential rate)."""
    vals = np.asarray(field.values)
    amp = np.max(np.abs(vals), axis=0)
    if not np.any(amp > 0):
        raise ZeroField("field vanishes identically")
    grid = field.grid
    x = grid.interior
    outer = grid.outer_mask()
    edge = float(np.max(amp[outer]))
    ratio = float(np.max(amp) / edge) if edge > 0 else math.inf
    center = float(x[np.argmax(amp)]) if center is None else center
    block = np.floor((x - grid.x[0]) / TWO_PI).astype(int)
    dist, logs = [], []
    half = 0.25 * grid.length
    for b in np.unique(block):
        sel = block == b
        amax = np.max(amp[sel])
        mid = float(np.mean(x[sel]))
        if amax > 0 and abs(mid - center) > half:
            dist.append(abs(mid - center))
            logs.append(math.log(amax))
    rate = float(-np.polyfit(dist, logs, 1)[0]) if len(dist) >= 2 else 0.0
    return ratio, rate


def _gauge_shift(state):
    """Shift by whole periods so that the amplitude peak lies in [0, 2 pi)."""
    grid = state.grid
    amp = np.max(np.abs(synthesize(state).values), axis=0)
    # ties (even profiles) resolve to the rightmost peak
    x_peak = grid.interior[np.flatnonzero(amp >= (1.0 - 1e-9) * amp.max())[-1]]
    m = int(math.floor(x_peak / TWO_PI))
    if m == 0:
        return state, 0
    n = grid.nodes_per_period
    U = np.zeros_like(state.coeffs)
    if m > 0:
        U[:, :-m * n] = state.coeffs[:, m * n:]
    else:
        U[:, -m * n:] = state.coeffs[:, :m * n]
    return state.replace(U), m


def outer_minimize(cfg, params, bases, nl, grid=None, grad_hook=None):
    """Riemannian descent of w -> J(m_1(w)) on the unit sphere of the positive space.

    Returns (state, report); ``converged`` is False if an iteration budget ran out.
    ``grad_hook`` may transform gradients (used for fault injection in the verification suite).
    """
    cfg.validate(params, nl)
    grid = grid if grid is not None else next(iter(bases.values())).grid
    space = ModalSpace(bases, grid, params.omega, cfg.k_max, cfg.sign, cfg.time_points(nl.p))
    hook = grad_hook or (lambda g: g)

    e = space.plus(seed_coords(space, cfg))
    e = e / space.norm(e)
    m = inner_maximize_coords(space, e, nl, cfg.inner_tol, cfg.max_inner)
    pt = space.point(m, nl)
    psi, G = pt.J, hook(pt.grad)
    step, prev = None, None
    it = 0
    converged_gd = False
    for it in range(1, cfg.max_iter + 1):
        gnorm = space.norm(G)
        if gnorm < cfg.polish_tol * max(space.norm(m), 1.0):
            converged_gd = True
            break
        s = space.norm(space.plus(m))
        d = space.plus(G) * s
        d = d - space.inner(d, e) * e
        if prev is not None:
            de, dd = e - prev[0], d - prev[1]
            den = space.inner(de, dd)
            step = space.inner(de, de) / den if den > 0 else None
        if step is None:
            step = 0.1 / max(space.norm(d), 1e-300)
        dn2 = space.inner(d, d)
        # inexact inner solves far from critical points; the Newton polish restores full accuracy
        inner_tol = max(cfg.inner_tol, min(1e-6, 1e-3 * gnorm))
        for _ in range(40):
            e_new = e - step * d
            e_new = e_new / space.norm(e_new)
            try:
                m_new = inner_maximize_coords(space, e_new, nl, inner_tol, cfg.max_inner, warm=m)
            except (MaxIterations, InHMinus):
                step *= cfg.armijo_shrink
                continue
            pt_new = space.point(m_new, nl)
            if pt_new.J <= psi - cfg.armijo_c * step * dn2:
                break
            step *= cfg.armijo_shrink
        else:
            log.warning("outer line search failed at iteration %d", it)
            break
        prev = (e, d)
        e, m, pt, psi = e_new, m_new, pt_new, pt_new.J
        G = hook(pt.grad)
        log.debug("outer %d: J=%.12g |G|=%.3e step=%.3e", it, psi, space.norm(G), step)

    newton = 0
    if converged_gd and grad_hook is None:
        m, G, newton = _newton_polish(space, m, nl, cfg.outer_tol, cfg.max_newton)
    state = space.to_state(m)
    state, shift = _gauge_shift(state)
    if shift:
        m = space.from_state(state)
        m, G, extra = _newton_polish(space, m, nl, cfg.outer_tol, cfg.max_newton)
        newton += extra
        state = space.to_state(m)
    report = build_report(space, m, nl, params, bases, cfg, it, newton, shift)
    if not converged_gd:
        log.warning("outer minimization did not converge within %d iterations", cfg.max_iter)
    return state, report


def build_report(space, m, nl, params, bases, cfg, iterations=0, newton=0, shift=0):
    pt = space.point(m, nl)
    G = pt.grad
    state = space.to_state(m)
    field_ = SpaceTimeField(pt.u, space.grid, space.omega)
    try:
        ratio, rate = decay_estimate(field_)
    except ZeroField:
        ratio, rate = 0.0, 0.0
    defect = defect_of(space, m, G)
    residual = residual_weak_form(state, params, bases, nl, cfg.sign, space.n_t)
    gnorm = space.norm(G)
    hn = space.norm(m)
    J = pt.J
    ok = bool(gnorm < cfg.outer_tol and defect < cfg.inner_tol * max(hn, 1.0)
              and residual < cfg.residual_tol and J > 0)
    return GroundStateReport(
        J_value=J, nehari_defect=defect, weak_residual=residual, decay_ratio=ratio, decay_rate=rate,
        grad_norm=gnorm, h_norm=hn, iterations=iterations, newton_steps=newton, converged=ok,
        sign=cfg.sign, shift_periods=shift,
    )
