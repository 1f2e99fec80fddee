import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jcontrol.model import (
    MINUS,
    PLUS,
    LevelIndex,
    ModelParams,
    branch_set,
    eigenvector_coeffs,
    energy,
    f,
    f_prime,
    in_branch_set,
    levels,
    mixing,
    spurious,
    taylor_energy,
)

from .oracles import block_2x2

SQ2 = math.sqrt(2.0)

detunings = st.floats(-1.0, 1.0, allow_nan=False)
couplings = st.floats(-10.0, 10.0, allow_nan=False)
indices = st.integers(-1, 50)


def params_for(d, g, omega=2.0):
    return ModelParams(omega, omega + d, g)


# -- ModelParams / LevelIndex -------------------------------------------------------


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(0.0, 1.0)
    with pytest.raises(ValueError):
        ModelParams(1.0, -1.0)
    with pytest.raises(ValueError):
        ModelParams(1.0, 1.0, float("nan"))


def test_spurious_label_follows_detuning():
    assert spurious(ModelParams(1.0, 1.2)) == LevelIndex(-1, MINUS)
    assert spurious(ModelParams(1.0, 0.8)) == LevelIndex(-1, PLUS)
    assert spurious(ModelParams(1.0, 1.0)) == LevelIndex(-1, PLUS)


def test_level_validation():
    p = ModelParams(1.0, 1.2)
    with pytest.raises(ValueError):
        LevelIndex(-2, PLUS)
    with pytest.raises(ValueError):
        LevelIndex(0, "x")
    with pytest.raises(ValueError):
        energy(p, LevelIndex(-1, PLUS))
    assert LevelIndex(-1, MINUS).is_valid(p)
    assert str(LevelIndex(3, MINUS)) == "(3,-)"


def test_branch_sets():
    p = ModelParams(1.0, 1.2)  # delta = '-'
    assert in_branch_set(p, -1, MINUS) and not in_branch_set(p, -1, PLUS)
    assert list(branch_set(p, MINUS, 2)) == [-1, 0, 1, 2]
    assert list(branch_set(p, PLUS, 2)) == [0, 1, 2]
    assert len(levels(p, 3)) == 9


# -- f and energy ---------------------------------------------------------------------


def test_f_examples():
    assert f(ModelParams(1.0, 1.0, 0.5), 0) == 0.5
    p = ModelParams(1.0, 1.3, 0.7)
    assert f(p, -1) == pytest.approx(0.15, abs=1e-15)
    # high-precision value of sqrt(0.17)/2
    assert f(ModelParams(1.0, 1.1, 0.2), 0) == pytest.approx(0.20615528128088303, rel=1e-14)
    with pytest.raises(ValueError):
        f(p, -2)


def test_f_large_n_no_overflow():
    p = ModelParams(1.0, 1.0, 1e154)
    assert math.isfinite(f(p, 10**6))


def test_energy_examples():
    for nu in (PLUS, MINUS):
        for lab in ("magnitude", "analytic"):
            assert energy(ModelParams(1.0, 1.0, 0.0), LevelIndex(4, nu), lab) == 5.0
    p = ModelParams(1.0, 1.0, -0.3)
    assert energy(p, LevelIndex(0, PLUS), "analytic") == pytest.approx(0.7, abs=1e-15)
    assert energy(p, LevelIndex(0, PLUS)) == pytest.approx(1.3, abs=1e-15)
    with pytest.raises(ValueError):
        energy(p, LevelIndex(0, PLUS), "other")


@pytest.mark.parametrize("big", [0.7, 1.0, 1.4])
def test_spurious_energy_is_bare_ground_state(big):
    # |0>e-1 has energy w/2 - W/2 in w(a^dag a + 1/2) + (W/2) sigma_z
    p = ModelParams(1.0, big, 0.4)
    e = energy(p, spurious(p))
    assert e == pytest.approx(0.5 - big / 2, abs=1e-15)
    assert e == pytest.approx(p.delta_sign() == PLUS and f(p, -1) or -f(p, -1), abs=1e-15)


@pytest.mark.parametrize("big", [0.8, 1.0, 1.05, 1.3])
@pytest.mark.parametrize("g", [-0.9, 0.0, 0.2, 2.5])
def test_energy_matches_2x2_block(big, g):
    p = ModelParams(1.0, big, g)
    for n in range(25):
        ev = np.linalg.eigvalsh(block_2x2(1.0, big, g, n))
        assert energy(p, LevelIndex(n, MINUS)) == pytest.approx(ev[0], rel=1e-12)
        assert energy(p, LevelIndex(n, PLUS)) == pytest.approx(ev[1], rel=1e-12)


@given(detunings, couplings)
def test_spectrum_symmetric_under_g_flip(d, g):
    p, q = params_for(d, g), params_for(d, -g)
    assert [energy(p, lv) for lv in levels(p, 8)] == [energy(q, lv) for lv in levels(q, 8)]


def test_f_prime_against_finite_difference():
    p = ModelParams(1.0, 1.15, 0.6)
    h = 1e-6
    for n in range(-1, 10):
        fd = (f(p, n, 0.6 + h) - f(p, n, 0.6 - h)) / (2 * h)
        assert f_prime(p, n) == pytest.approx(fd, rel=1e-7, abs=1e-9)


# -- properties of f ------------------------------------------------------------


@given(detunings, couplings, indices, indices)
def test_f_monotone_in_n(d, g, m, n):
    p = params_for(d, g)
    m, n = max(m, n), min(m, n)
    diff = f(p, m) - f(p, n)
    assert diff >= -1e-12
    if m > n and abs(g) > 1e-4:
        assert diff > 0
    if m == n or g == 0:
        assert diff == 0


@given(detunings, couplings, indices)
def test_f_increment_bound(d, g, n):
    p = params_for(d, g)
    lhs = f(p, n + 1) - f(p, n)
    rhs = 2 * abs(g) * (math.sqrt(n + 2) - math.sqrt(n + 1))
    assert lhs <= rhs + 1e-12


@given(detunings, couplings, couplings, indices)
def test_f_increment_increasing_in_abs_g(d, g1, g2, n):
    p = params_for(d, 0.0)
    lo, hi = sorted((abs(g1), abs(g2)))
    inc = lambda g: f(p, n + 1, g) - f(p, n, g)
    assert inc(hi) - inc(lo) >= -1e-12
    # derivative sign
    if lo > 0:
        assert f_prime(p, n + 1, lo) - f_prime(p, n, lo) > 0


@given(detunings, couplings, st.integers(-1, 49))
def test_f_increment_decreasing_in_n(d, g, n):
    p = params_for(d, g)
    inc = lambda k: f(p, k + 1) - f(p, k)
    assert inc(n + 1) - inc(n) <= 1e-12


def test_f_increment_strict_on_grid():
    p = ModelParams(1.0, 1.1)
    gs = np.linspace(0.01, 5, 200)
    for n in range(-1, 20):
        inc = np.array([f(p, n + 1, g) - f(p, n, g) for g in gs])
        assert np.all(np.diff(inc) > 0)
    for g in (0.05, 1.0, 4.0):
        inc = np.array([f(p, k + 1, g) - f(p, k, g) for k in range(-1, 30)])
        assert np.all(np.diff(inc) < 0)


# -- mixing and eigenvectors ----------------------------------------------------------


def test_mixing_examples():
    m = mixing(ModelParams(1.0, 1.3, 0.0), 4)
    assert (m.theta, m.c, m.s) == (0.0, 1.0, 0.0)
    m = mixing(ModelParams(1.0, 1.0, 0.4), 2)
    assert m.theta == pytest.approx(math.pi / 2)
    assert m.c == pytest.approx(SQ2 / 2, abs=1e-15) and m.s == pytest.approx(SQ2 / 2, abs=1e-15)
    m = mixing(ModelParams(1.0, 1.0, -0.4), 2)
    assert m.theta == pytest.approx(-math.pi / 2)
    m = mixing(ModelParams(1.0, 1.0, 0.0), 0)
    assert (m.theta, m.c, m.s) == (0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        mixing(ModelParams(1.0, 1.0), -1)


def test_mixing_negative_detuning_example():
    # 2x2 diagonalization of H_0 at w=1, W=1.1, g=0.2 gives (c0, s0) below
    m = mixing(ModelParams(1.0, 1.1, 0.2), 0)
    assert m.theta == pytest.approx(1.3258176636680326, abs=1e-12)
    assert m.c == pytest.approx(0.7882054380161092, abs=1e-12)
    assert m.s == pytest.approx(0.6154122094026356, abs=1e-12)


@given(detunings, couplings, st.integers(0, 50))
def test_mixing_unit_norm(d, g, n):
    m = mixing(params_for(d, g), n)
    assert abs(m.c**2 + m.s**2 - 1) <= 1e-14
    assert -math.pi <= m.theta <= math.pi


@given(detunings, couplings, st.integers(0, 40))
@settings(max_examples=200)
def test_eigenvectors_diagonalize_block(d, g, n):
    p = params_for(d, g)
    h = block_2x2(p.omega, p.capital_omega, g, n)
    for nu in (PLUS, MINUS):
        v = np.array(eigenvector_coeffs(p, LevelIndex(n, nu)))
        e = energy(p, LevelIndex(n, nu))
        assert np.linalg.norm(h @ v - e * v) <= 1e-12 * max(1.0, abs(e))


def test_eigenvector_examples():
    assert eigenvector_coeffs(ModelParams(1.0, 1.2), LevelIndex(3, PLUS)) == (1.0, 0.0)
    u, v = eigenvector_coeffs(ModelParams(1.0, 1.0, 0.3), LevelIndex(1, MINUS))
    assert u == pytest.approx(-SQ2 / 2) and v == pytest.approx(SQ2 / 2)
    p = ModelParams(1.0, 1.2)
    assert eigenvector_coeffs(p, spurious(p)) == (0.0, 1.0)


# -- Taylor expansion ---------------------------------------------------------------


def test_taylor_coefficients():
    # sympy series of 1 + sqrt(1/25 + 4 g^2)/2
    t = taylor_energy(ModelParams(1.0, 1.2), LevelIndex(0, PLUS), 4)
    assert not t.exact
    np.testing.assert_allclose(t.coeffs, [1.1, 0, 5, 0, -125], rtol=1e-12, atol=1e-12)
    # sympy series of 3 + sqrt(1/100 + 12 g^2)/2
    t = taylor_energy(ModelParams(1.0, 1.1), LevelIndex(2, PLUS), 4)
    np.testing.assert_allclose(t.coeffs, [3.05, 0, 30, 0, -9000], rtol=1e-11, atol=1e-9)


def test_taylor_constant_term():
    p = ModelParams(1.0, 0.85)
    for nu in (PLUS, MINUS):
        t = taylor_energy(p, LevelIndex(5, nu), 2)
        assert t(0.0) == pytest.approx(6 + (1 if nu == PLUS else -1) * 0.075)
        assert len(t.coeffs) == 3


def test_taylor_zero_detuning_is_exact_linear():
    p = ModelParams(1.0, 1.0)
    t = taylor_energy(p, LevelIndex(3, MINUS), 4)
    assert t.exact
    assert t.coeffs == (4.0, -2.0)
    with pytest.raises(ValueError):
        taylor_energy(p, LevelIndex(0, PLUS), 3)


@pytest.mark.parametrize("n,nu", [(0, PLUS), (0, MINUS), (3, PLUS)])
def test_taylor_sixth_order_remainder(n, nu):
    # the next term of the series is nu * 2 (n+1)^3 g^6 / |D|^5
    d = 0.2
    p = ModelParams(1.0, 1.0 + d)
    lv = LevelIndex(n, nu)
    t = taylor_energy(p, lv, 4)
    c6 = 2 * (n + 1) ** 3 / d**5
    gs = np.linspace(d / 80, d / (4 * (n + 1)), 20)
    ratios = np.array([abs(energy(p.with_g(g), lv) - t(g)) / g**6 for g in gs])
    assert ratios.max() <= 1.01 * c6
    assert ratios[0] == pytest.approx(c6, rel=0.02)
