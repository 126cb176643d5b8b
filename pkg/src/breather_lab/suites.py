"""Randomized property suites shared by the CLI ``verify`` command and the tests.

Every suite returns a :class:`SuiteResult`; sizes are kept small so the whole
collection runs in well under a minute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .floquet import (
    _one_sided_radius,
    check_band_monotonicity,
    check_sine_bound,
    find_sine_bound_c,
    monodromy_numeric,
)
from .modal import Grid, mode_bases, project, trace_inequality_sides
from .nehari import ModalSpace, PowerNonlinearity
from .potential import TWO_PI, PeriodicCoefficient, mode_coefficient, validate_v1
from .spacetime import FourierState, h_norm_sq, l2_plancherel_check, quadratic_form, split

FAULTS = ("grad_sign_flip",)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    cases: int
    worst: float
    detail: dict = field(default_factory=dict)

    def as_dict(self):
        return {"name": self.name, "passed": bool(self.passed), "cases": int(self.cases),
                "worst": float(self.worst), "detail": self.detail}


def random_state(rng, grid, omega, k_max, scale=1.0):
    n_modes = (k_max + 1) // 2
    c = rng.standard_normal((n_modes, grid.size)) + 1j * rng.standard_normal((n_modes, grid.size))
    return FourierState(scale * c, grid, omega)


def band_limited(rng, grid, n_terms=40):
    """Random Dirichlet sine series on the grid interval."""
    L = grid.length
    x = grid.interior - grid.x[0]
    j = np.arange(1, rng.integers(1, n_terms + 1) + 1)
    c = rng.standard_normal(j.size) / j
    return np.sin(np.pi * np.outer(x, j) / L) @ c


def trace_suite(rng, n_funcs=1000, eps_values=(0.1, 1.0, 10.0), grid=None):
    grid = grid or Grid.build(4, 32)
    worst = -math.inf
    fails = 0
    for _ in range(n_funcs):
        f = band_limited(rng, grid)
        for eps in eps_values:
            lhs, rhs = trace_inequality_sides(grid, f, eps)
            worst = max(worst, lhs - rhs)
            fails += lhs > rhs
    return SuiteResult("trace_inequality", fails == 0, n_funcs * len(eps_values), worst)


def _random_weight(rng, lo, hi, pieces):
    cuts = np.sort(rng.uniform(0.0, TWO_PI, pieces - 1))
    edges = np.concatenate(([0.0], cuts, [TWO_PI]))
    return PeriodicCoefficient(tuple(edges), tuple(rng.uniform(lo, hi, pieces)))


def random_ordered_weights(rng):
    """(w1, w2) with 0 < w1 <= w2 on a common refinement."""
    pieces = int(rng.integers(1, 5))
    w2 = _random_weight(rng, 1.0, 2.0, pieces)
    factor = _random_weight(rng, 0.3, 1.0, int(rng.integers(1, 5)))
    edges = sorted(set(w2.edges) | set(factor.edges))
    mids = 0.5 * (np.asarray(edges[:-1]) + np.asarray(edges[1:]))
    v2 = w2.value_at(mids)
    w2 = PeriodicCoefficient(tuple(edges), tuple(v2))
    w1 = PeriodicCoefficient(tuple(edges), tuple(v2 * factor.value_at(mids)))
    return w1, w2


def monotonicity_suite(rng, n_pairs=50, params=None):
    """Weighted pencils (-d^2 + Q) u = lam W u with Q the k = 1 coefficient of the delta comb."""
    params = params or validate_v1(1.0, 64.0)
    Q = mode_coefficient(params, 1)
    fails, radii = 0, []
    for _ in range(n_pairs):
        w1, w2 = random_ordered_weights(rng)
        d2 = lambda lam, w=w2: monodromy_numeric(Q, lam, w).trace
        r = min(_one_sided_radius(d2, 1.0, 10.0, density=256), _one_sided_radius(d2, -1.0, 10.0, density=256))
        a = float(rng.uniform(0.1, 0.95)) * r
        radii.append(r)
        fails += not check_band_monotonicity(w1, w2, a, Q, n_samples=401)
    return SuiteResult("monotonicity", fails == 0, n_pairs, float(fails), {"min_gap": float(min(radii))})


def _small_space(sign=1, k_max=5, params=None, M=4, n=32):
    params = params or validate_v1(1.0, 64.0)
    grid, bases = mode_bases(params, k_max, Grid.for_params(params, M, n))
    return params, grid, bases, ModalSpace(bases, grid, params.omega, k_max, sign)


def identity_suite(rng, n_states=20, setup=None):
    """Plancherel, splitting of the quadratic form and projection algebra on random states."""
    params, grid, bases, _ = setup or _small_space()
    k_max = max(bases)
    worst_pl = worst_split = worst_proj = 0.0
    for _ in range(n_states):
        st = random_state(rng, grid, params.omega, k_max)
        lhs, rhs = l2_plancherel_check(st)
        worst_pl = max(worst_pl, abs(lhs - rhs) / rhs)
        plus, minus = split(st, bases)
        h, hp, hm = h_norm_sq(st, bases), h_norm_sq(plus, bases), h_norm_sq(minus, bases)
        worst_split = max(worst_split, abs(h - hp - hm) / h, abs(quadratic_form(st, bases) - hp + hm) / h)
        basis = bases[1]
        c = basis.coords(st.coeffs[0])
        pp, pm = project(basis, c, 1), project(basis, c, -1)
        worst_proj = max(worst_proj,
                         float(np.max(np.abs(project(basis, pp, 1) - pp))) / float(np.max(np.abs(c))),
                         float(np.max(np.abs(pp + pm - c))) / float(np.max(np.abs(c))))
    ok = worst_pl <= 1e-12 and worst_split <= 1e-10 and worst_proj <= 1e-10
    return SuiteResult("identities", ok, n_states, max(worst_pl, worst_split, worst_proj),
                       {"plancherel": worst_pl, "splitting": worst_split, "projection": worst_proj})


def gradient_suite(rng, p_values=(1.5, 1.8), n_dirs=50, h=1e-5, fault=None, setups=None, scale=0.3):
    """Central differences of J against <grad J, v> for both sign conventions."""
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    worst, cases = 0.0, 0
    for sign in (1, -1):
        _, _, _, space = setups[sign] if setups else _small_space(sign)
        for p in p_values:
            nl = PowerNonlinearity(p)
            a = scale * (rng.standard_normal(space.shape) + 1j * rng.standard_normal(space.shape))
            a = a / np.sqrt(1.0 + np.abs(space.lam))
            G = space.point(a, nl).grad
            if fault == "grad_sign_flip":
                G = -G
            for _ in range(n_dirs):
                v = rng.standard_normal(space.shape) + 1j * rng.standard_normal(space.shape)
                v = v / np.sqrt(1.0 + np.abs(space.lam))
                fd = (space.point(a + h * v, nl).J - space.point(a - h * v, nl).J) / (2.0 * h)
                an = space.inner(G, v)
                worst = max(worst, abs(fd - an) / max(abs(an), 1e-300))
                cases += 1
    return SuiteResult("gradient", worst < 1e-6, cases, worst, {"fault": fault})


def sine_bound_suite(tau0=0.5, k_max=21):
    taus = (0.0, 0.25, -0.25, 0.49 * tau0, -0.49 * tau0)
    found = {}
    ok = True
    for tau in taus:
        c = find_sine_bound_c(tau, k_max)
        found[repr(tau)] = c
        ok &= check_sine_bound(tau, c, k_max)
    return SuiteResult("sine_bound", bool(ok), len(taus), min(found.values()), found)


def run_all(seed=0, fault=None):
    rng = np.random.default_rng(seed)
    setups = {s: _small_space(s) for s in (1, -1)}
    return [
        trace_suite(rng),
        monotonicity_suite(rng),
        identity_suite(rng, setup=setups[1]),
        gradient_suite(rng, fault=fault, setups=setups),
        sine_bound_suite(),
    ]
