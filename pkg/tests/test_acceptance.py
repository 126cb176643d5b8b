"""One pass/fail test per acceptance criterion, at the stated tolerances and sizes."""

import math
import time

import numpy as np
import pytest

from breather_lab.cli import RunConfig, cmd_breather, cmd_gap_check
from breather_lab.floquet import (
    certify_gap_growth,
    discriminant_delta,
    discriminant_mode,
    discriminant_step,
    gap_radius,
    monodromy_numeric,
    step_coefficient,
)
from breather_lab.modal import Grid, ModalBasis, h1_ratio, mode_bases
from breather_lab.nehari import ModalSpace, PowerNonlinearity, SolverConfig, inner_maximize_coords, outer_minimize, scalar_oracle
from breather_lab.potential import TWO_PI, PeriodicCoefficient, validate_v1, validate_v2
from breather_lab.suites import _small_space, gradient_suite, identity_suite, monotonicity_suite, trace_suite


def test_discriminant_oracle_agreement():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst_delta = worst_step = 0.0
    for _ in range(1000):
        a, b = rng.uniform(-5, 5, 2)
        lam = rng.uniform(-10, 10)
        coeff = PeriodicCoefficient((0.0, TWO_PI), (a,), ((0.0, b),))
        m = monodromy_numeric(coeff, lam).trace
        worst_delta = max(worst_delta, abs(discriminant_delta(a, b, lam) - m) / abs(m))
    for _ in range(1000):
        a, b = rng.uniform(-5, 5, 2)
        theta = rng.uniform(0.05, 0.95)
        lam = max(a, b) + rng.uniform(0, 10)
        m = monodromy_numeric(step_coefficient(a, b, theta), lam).trace
        worst_step = max(worst_step, abs(discriminant_step(a, b, theta, lam) - m) / abs(m))
    assert worst_delta <= 1e-8 and worst_step <= 1e-8
    assert abs(discriminant_delta(0.0, 1.0, 0.0) - (2 + 2 * math.pi)) <= 1e-12
    for c in (-1.0, 0.0, 0.7):
        lam = c + np.array([0.1, 0.9, 2.3, 7.7])
        reduced = discriminant_step(c, c, 0.3, lam)
        assert np.max(np.abs(reduced - 2 * np.cos(TWO_PI * np.sqrt(lam - c)))) <= 1e-12
    assert time.perf_counter() - t0 < 5


def _certify(params):
    cert = certify_gap_growth(params, 41)
    radii = np.asarray(cert.radii)
    k = np.asarray(cert.k_list)
    assert list(k) == list(range(1, 42, 2))
    assert np.all(radii > 0)
    assert cert.fitted_c > 0 and cert.fitted_c == pytest.approx(np.min(radii / k), rel=1e-12)
    return cert


def test_gap_growth_delta_comb():
    t0 = time.perf_counter()
    for tau in (0.0, 0.25, 0.49):
        _certify(validate_v1(1.0, 64.0, tau))
    v1 = validate_v1(1.0, 64.0)
    assert abs(discriminant_mode(v1, 1, 0.0) + 16) <= 1e-10
    assert abs(discriminant_mode(v1, 1, -1 / 16) - (2 - 8 * math.pi)) <= 1e-10
    assert abs(discriminant_mode(v1, 3, 0.0) - 48) <= 1e-10
    assert time.perf_counter() - t0 < 30


def test_gap_growth_step():
    t0 = time.perf_counter()
    for tau in (0.0, 0.15):
        _certify(validate_v2(1.0, 0.05, tau))
    assert time.perf_counter() - t0 < 30


@pytest.mark.slow
def test_rayleigh_bounds():
    t0 = time.perf_counter()
    for params, h1_power in ((validate_v1(1.0, 64.0), 3), (validate_v2(1.0, 0.05), 1)):
        grid, bases = mode_bases(params, 11, Grid.for_params(params, 16, 64))
        l2_scaled, h1_scaled = [], []
        for k, basis in bases.items():
            lam_min = float(np.min(np.abs(basis.eigenvalues)))
            r = gap_radius(params, k)
            assert abs(lam_min - r) <= 0.05 * r, (params.case, k, lam_min, r)
            l2_scaled.append(lam_min / k)
            h1_scaled.append(h1_ratio(basis, grid) * k**h1_power)
        assert min(l2_scaled) >= 0.05
        assert min(h1_scaled) >= 0.1
    assert time.perf_counter() - t0 < 300


def test_functional_identities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    trace = trace_suite(rng, n_funcs=1000, eps_values=(0.1, 1.0, 10.0))
    assert trace.passed and trace.cases == 3000
    ident = identity_suite(rng)
    assert ident.detail["plancherel"] <= 1e-12
    assert ident.detail["splitting"] <= 1e-10
    assert ident.detail["projection"] <= 1e-10
    assert time.perf_counter() - t0 < 60


def test_gradient_contract():
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    v1 = gradient_suite(rng, p_values=(1.5, 1.8), n_dirs=50, setups={s: _small_space(s) for s in (1, -1)})
    v2p = validate_v2(1.0, 0.05)
    v2 = gradient_suite(rng, p_values=(2.0, 2.5), n_dirs=50,
                        setups={s: _small_space(s, params=v2p) for s in (1, -1)})
    assert v1.cases == v2.cases == 200
    assert v1.worst < 1e-6 and v2.worst < 1e-6
    assert time.perf_counter() - t0 < 120


@pytest.mark.slow
def test_ground_state():
    t0 = time.perf_counter()
    params = validate_v1(1.0, 64.0)
    nl = PowerNonlinearity(1.8)
    grid, bases = mode_bases(params, 9, Grid.for_params(params, 16, 64))
    for sign in (1, -1):
        _, rep = outer_minimize(SolverConfig(sign=sign, k_max=9, periods=16, nodes=64), params, bases, nl, grid)
        assert rep.converged, rep
        assert rep.nehari_defect < 1e-8 * rep.h_norm
        assert rep.weak_residual < 1e-6
        assert rep.J_value > 0
        assert rep.decay_ratio >= 1e3

    # restricted fixture: the same eigenvectors with the spectrum shifted positive, so the negative space is trivial
    shift = 1.0 + max(float(-np.min(b.eigenvalues)) for b in bases.values())
    shifted = {k: ModalBasis(k, b.eigenvalues + shift, b.eigenvectors, b.mass, grid) for k, b in bases.items()}
    space = ModalSpace(shifted, grid, params.omega, 9, 1)
    w = space.zeros()
    w[0, 0] = 1.0
    w[1, 3] = 0.5j
    w = w / space.norm(w)
    m = inner_maximize_coords(space, w, nl, tol=1e-12)
    assert space.inner(m, w) == pytest.approx(scalar_oracle(space, w, nl), rel=1e-10)
    assert time.perf_counter() - t0 < 900


def test_monotonicity_property():
    t0 = time.perf_counter()
    res = monotonicity_suite(np.random.default_rng(5), n_pairs=50)
    assert res.passed and res.cases == 50 and res.detail["min_gap"] > 0
    assert time.perf_counter() - t0 < 60


@pytest.mark.slow
def test_determinism(tmp_path):
    cfg = RunConfig(seed=17)
    runs = []
    for name in ("first", "second"):
        out = tmp_path / name
        assert cmd_gap_check(cfg, out)[0] == 0
        assert cmd_breather(cfg, out)[0] == 0
        runs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert set(runs[0]) == {"gap_certificate.json", "breather_report.json", "breather_modes.csv",
                            "breather_envelope.csv", "breather_field.csv"}
    assert runs[0] == runs[1]
