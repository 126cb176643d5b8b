import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from breather_lab.errors import Aliasing, DimensionMismatch, EvenMode, MissingBasis
from breather_lab.modal import Grid, mass_matrix, stiffness_matrix
from breather_lab.spacetime import (
    FourierState,
    SpaceTimeField,
    analyze,
    default_n_t,
    field_rows,
    h_norm_sq,
    hhat_norm_sq,
    l2_plancherel_check,
    lq_norm,
    odd_modes,
    quadratic_form,
    split,
    state_rows,
    synthesize,
)

GRID = Grid.build(1, 8)


def random_state(rng, k_max, grid=GRID, omega=0.25):
    n = len(odd_modes(k_max))
    c = rng.standard_normal((n, grid.size)) + 1j * rng.standard_normal((n, grid.size))
    return FourierState(c, grid, omega)


def test_default_n_t():
    assert default_n_t(9) == 40
    assert list(odd_modes(7)) == [1, 3, 5, 7]
    with pytest.raises(EvenMode):
        odd_modes(4)


def test_state_shape_check():
    with pytest.raises(DimensionMismatch):
        FourierState(np.zeros((2, 3)), GRID, 1.0)


def test_real_round_trip(rng):
    s = random_state(rng, 5)
    back = FourierState.from_real(s.as_real(), GRID, s.omega, 5)
    assert np.array_equal(back.coeffs, s.coeffs)
    assert s.k_max == 5 and list(s.modes) == [1, 3, 5]


def test_negative_mode_is_conjugate(rng):
    s = random_state(rng, 3)
    assert np.array_equal(s.mode(-3), s.coeffs[1].conj())
    assert not np.any(s.mode(7))


def test_arithmetic(rng):
    a, b = random_state(rng, 3), random_state(rng, 3)
    assert np.array_equal((a + b).coeffs, a.coeffs + b.coeffs)
    assert np.array_equal((a - b).coeffs, a.coeffs - b.coeffs)
    assert np.array_equal((2.0 * a).coeffs, 2.0 * a.coeffs)
    assert np.array_equal((-a).coeffs, -a.coeffs)


@given(seed=st.integers(0, 2**32 - 1), k_max=st.sampled_from([1, 3, 5, 9]))
@settings(max_examples=50, deadline=None)
def test_synthesis_round_trip(seed, k_max):
    s = random_state(np.random.default_rng(seed), k_max)
    field = synthesize(s)
    back, even = analyze(field, k_max, return_even=True)
    assert np.max(np.abs(back.coeffs - s.coeffs)) <= 1e-12 * max(1.0, np.max(np.abs(s.coeffs)))
    assert even <= 1e-12 * np.max(np.abs(field.values))


def test_antiperiodic(rng):
    s = random_state(rng, 5)
    field = synthesize(s, 48)
    v = field.values
    assert np.allclose(v[24:], -v[:24], atol=1e-12, rtol=0)


def test_real_cosine():
    grid = Grid.build(1, 8)
    c = np.zeros((1, grid.size), dtype=complex)
    c[0] = 0.5
    field = synthesize(FourierState(c, grid, 2.0), 8)
    assert np.allclose(field.values[:, 0], np.cos(2.0 * field.times), atol=1e-15)
    assert field.period == pytest.approx(math.pi)


def test_aliasing():
    s = FourierState.zeros(GRID, 1.0, 5)
    with pytest.raises(Aliasing):
        synthesize(s, 10)
    synthesize(s, 11)


@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_plancherel(seed):
    s = random_state(np.random.default_rng(seed), 7)
    lhs, rhs = l2_plancherel_check(s)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_lq_norm_of_constant_profile():
    grid = Grid.build(1, 8)
    c = np.zeros((1, grid.size), dtype=complex)
    c[0] = 0.5
    field = synthesize(FourierState(c, grid, 1.0), 64)
    w = grid.lumped_weights().sum()
    # ||cos||_L2 over a period is sqrt(pi)
    assert lq_norm(field, 2) == pytest.approx(math.sqrt(math.pi * w), rel=1e-12)
    with pytest.raises(ValueError):
        lq_norm(field, 0.5)


class TestModalNorms:
    def test_h_norm_and_split(self, small_v1, rng):
        params, grid, bases = small_v1
        s = random_state(rng, 5, grid, params.omega)
        plus, minus = split(s, bases, 1)
        assert np.allclose((plus + minus).coeffs, s.coeffs, atol=1e-10)
        hp, hm = h_norm_sq(plus, bases), h_norm_sq(minus, bases)
        assert h_norm_sq(s, bases) == pytest.approx(hp + hm, rel=1e-10)
        assert quadratic_form(s, bases) == pytest.approx(hp - hm, rel=1e-10)
        assert quadratic_form(plus, bases) == pytest.approx(hp, rel=1e-10)

    def test_split_sign_swaps(self, small_v1, rng):
        params, grid, bases = small_v1
        s = random_state(rng, 5, grid, params.omega)
        p1, m1 = split(s, bases, 1)
        p2, m2 = split(s, bases, -1)
        assert np.allclose(p1.coeffs, m2.coeffs, atol=1e-12)
        assert np.allclose(m1.coeffs, p2.coeffs, atol=1e-12)

    def test_missing_basis(self, small_v1, rng):
        params, grid, bases = small_v1
        s = random_state(rng, 7, grid, params.omega)
        with pytest.raises(MissingBasis):
            h_norm_sq(s, bases)

    def test_hhat_weights(self):
        grid = Grid.build(1, 8)
        c = np.zeros((2, grid.size), dtype=complex)
        c[1] = np.sin(np.linspace(0.1, 3.0, grid.size))
        s = FourierState(c, grid, 1.0)
        l2 = np.real(np.vdot(c[1], mass_matrix(grid) @ c[1]))
        h1 = np.real(np.vdot(c[1], stiffness_matrix(grid) @ c[1]))
        assert hhat_norm_sq(s, 1.0, -1.0) == pytest.approx(2.0 * (3.0 * l2 + h1 / 3.0), rel=1e-12)


def test_rows():
    grid = Grid.build(1, 8)
    s = FourierState.zeros(grid, 1.0, 3)
    rows = list(state_rows(s))
    assert len(rows) == 2 * grid.size and rows[0][0] == 1
    field = SpaceTimeField(np.zeros((12, grid.size)), grid, 1.0)
    frows = list(field_rows(field))
    assert len(frows) == 12 * grid.size
    assert frows[1][1] == 0.0 and frows[grid.size][1] == pytest.approx(field.period / 12)
