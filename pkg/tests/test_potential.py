import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from breather_lab.errors import (
    BetaTooSmall,
    EvenMode,
    InvalidCoefficient,
    InvalidParameters,
    TauOutOfRange,
    ThetaOutOfRange,
)
from breather_lab.potential import (
    THETA_LIMIT,
    TWO_PI,
    DeltaComb,
    PeriodicCoefficient,
    Step,
    mode_coefficient,
    mode_weight,
    validate_v1,
    validate_v2,
)


def test_v1_defaults():
    p = validate_v1(1.0, 64.0, 0.0)
    assert p.omega == 0.25
    assert p.tau0 == 0.5
    assert (p.gamma, p.delta, p.p_star, p.q_star) == (1.0, -3.0, 2.0, 3.0)
    assert 2 * p.reg_alpha == p.delta and 2 * p.reg_beta == p.gamma


def test_v1_rejects_boundary_beta():
    with pytest.raises(BetaTooSmall):
        validate_v1(1.0, 32.0, 0.0)


def test_v1_rejects_tau_at_tau0():
    with pytest.raises(TauOutOfRange):
        validate_v1(1.0, 64.0, 0.5)
    with pytest.raises(TauOutOfRange):
        validate_v1(1.0, 64.0, -0.5)


def test_v1_rejects_nonpositive_alpha():
    with pytest.raises(InvalidParameters):
        validate_v1(0.0, 64.0)


def test_v2_defaults():
    p = validate_v2(1.0, 0.05, 0.0)
    assert p.potential.beta == pytest.approx(2.77008e-3, rel=1e-5)
    assert p.omega == pytest.approx(5.0, rel=1e-15)
    assert p.tau0 == pytest.approx(0.16022, abs=1e-5)
    assert (p.gamma, p.delta, p.p_star, p.q_star) == (1.0, -1.0, 3.0, 4.0)


def test_v2_rejects_half():
    with pytest.raises(ThetaOutOfRange):
        validate_v2(1.0, 0.5)


def test_v2_swapped_orientation():
    p = validate_v2(4.0, 0.95)
    assert p.omega == pytest.approx(1.0 / (4 * 0.95 * 2.0), rel=1e-15)
    pot = p.potential
    # the short interval comes first and carries the larger plateau value
    assert pot.theta == pytest.approx(0.05)
    assert pot.alpha == pytest.approx(4.0 * 0.95**2 / 0.05**2)
    assert pot.beta == 4.0


def test_theta_limit_value():
    assert THETA_LIMIT == pytest.approx(0.5 * (1 - math.sqrt(7 / 9)))
    assert 0.058 < THETA_LIMIT < 0.06


def test_mode_weight_examples(v1):
    assert mode_weight(v1, 1) == 1.0 / 16.0
    p = validate_v1(1.0, 64.0, 0.25)
    assert mode_weight(p, 3) == pytest.approx(0.546875, rel=1e-15)
    with pytest.raises(EvenMode):
        mode_weight(v1, 2)


@given(alpha=st.floats(1e-3, 1e3), ratio=st.floats(32.0001, 1e3), frac=st.floats(0.0, 0.999))
@settings(max_examples=200, deadline=None)
def test_v1_identities(alpha, ratio, frac):
    beta = ratio * alpha
    tau = frac * (1 - 32 * alpha / beta)
    p = validate_v1(alpha, beta, tau)
    assert p.tau0 == 1 - 32 * alpha / beta
    assert alpha * p.omega**2 == pytest.approx(1 / 16, rel=1e-15)


@given(alpha=st.floats(1e-3, 1e3), theta=st.floats(1e-3, THETA_LIMIT * 0.999))
@settings(max_examples=200, deadline=None)
def test_v2_identities(alpha, theta):
    p = validate_v2(alpha, theta)
    pot = p.potential
    tc = 1 - theta
    assert theta**2 * alpha == pytest.approx(tc**2 * pot.beta, rel=1e-13)
    assert 16 * alpha * p.omega**2 * theta**2 == pytest.approx(1.0, rel=1e-13)
    assert 16 * pot.beta * p.omega**2 * tc**2 == pytest.approx(1.0, rel=1e-13)


@given(k=st.integers(0, 50).map(lambda i: 2 * i + 1))
def test_mode_weight_even_in_k(k):
    p = validate_v1(1.0, 64.0, 0.3)
    assert mode_weight(p, k) == mode_weight(p, -k)
    assert mode_weight(p, k) > 0


def test_potential_validation():
    with pytest.raises(InvalidParameters):
        DeltaComb(-1.0, 1.0)
    with pytest.raises(ThetaOutOfRange):
        Step(1.0, 1.0, 1.0)


def test_periodic_coefficient_validation():
    with pytest.raises(InvalidCoefficient):
        PeriodicCoefficient((0.0, 1.0), (1.0,))
    with pytest.raises(InvalidCoefficient):
        PeriodicCoefficient((0.0, TWO_PI), (1.0,), ((7.0, 1.0),))
    with pytest.raises(InvalidCoefficient):
        PeriodicCoefficient((0.0, TWO_PI), (math.inf,))


def test_mode_coefficient_delta(v1):
    q = mode_coefficient(v1, 1)
    assert q.values == (-1.0 / 16.0,)
    assert q.atoms == ((0.0, -4.0),)
