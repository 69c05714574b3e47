"""经典 σ、ζ、Eisenstein 级数与不变量"""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gamma as gamma_fn

from sigma_lab.exceptions import DivergentSumError, PoleError
from sigma_lab.models import TruncationPolicy
from sigma_lab.services.classical import (
    eisenstein,
    invariants,
    modified_sigma,
    quasi_period,
    sigma_product,
    sigma_reduced,
    sigma_values,
    zeta_series,
)
from sigma_lab.services.lattice import make_lattice, reduce_to_cell
from sigma_lab.services.taylor import build_coeff_table, sigma_taylor_eval

SQUARE_G2 = 60 * gamma_fn(0.25) ** 8 / (960 * math.pi ** 2)


def test_sigma_vanishes_on_lattice(square, policy):
    assert sigma_product(square, 0, policy).value == 0
    assert sigma_product(square, square.omega1, policy).value == 0


@settings(max_examples=25, deadline=None)
@given(x=st.floats(-0.6, 0.6), y=st.floats(-0.6, 0.6))
def test_sigma_is_odd(x, y):
    from sigma_lab.services.lattice import preset_lattice

    lat = preset_lattice("generic")
    policy = TruncationPolicy()
    z = complex(x, y)
    plus = sigma_product(lat, z, policy).value
    minus = sigma_product(lat, -z, policy).value
    assert abs(plus + minus) <= 1e-13 * max(1.0, abs(plus))


def test_sigma_matches_taylor_near_origin(square_inv, square, policy):
    z = 0.3 + 0.2j
    taylor = sigma_taylor_eval(build_coeff_table(12), square_inv, z)
    product = sigma_product(square, z, policy).value
    assert abs(taylor.value - product) <= 1e-12 * abs(product)
    assert taylor.last_term < 1e-12


def test_sigma_values_vectorized(generic, policy):
    zs = np.array([0.1 + 0.2j, -0.4 + 0.3j, 0.5j])
    values = sigma_values(generic, zs, policy)
    for z, v in zip(zs, values):
        assert v == pytest.approx(sigma_product(generic, z, policy).value, rel=1e-14)


def test_zeta_poles(square, policy):
    with pytest.raises(PoleError):
        zeta_series(square, 0, policy)
    with pytest.raises(PoleError):
        zeta_series(square, square.omega2, policy)


def test_zeta_is_odd(generic, policy):
    z = 0.31 - 0.17j
    assert zeta_series(generic, -z, policy).value == pytest.approx(
        -zeta_series(generic, z, policy).value, rel=1e-13
    )


def test_eisenstein_requires_convergent_order(square, policy):
    with pytest.raises(DivergentSumError):
        eisenstein(square, 1, policy)


def test_square_invariants(square_inv):
    assert abs(square_inv.mu) <= 1e-9
    assert square_inv.g2.real == pytest.approx(SQUARE_G2, rel=1e-10)
    assert abs(square_inv.g3) <= 1e-10
    assert square_inv.eta1 == pytest.approx(math.pi, rel=1e-10)
    assert square_inv.eta2 == pytest.approx(-1j * math.pi, rel=1e-10)
    assert square_inv.legendre_residual <= 1e-9


def test_hexagonal_invariants(hexagonal_inv):
    assert abs(hexagonal_inv.mu) <= 1e-9
    assert abs(hexagonal_inv.g2) <= 1e-9 * abs(hexagonal_inv.g3)
    assert abs(hexagonal_inv.g3) > 1.0


def test_generic_invariants(generic, generic_inv):
    assert abs(generic_inv.mu) > 1e-3
    assert generic_inv.mu_closed_form == pytest.approx(generic_inv.mu, rel=1e-10)
    assert generic_inv.nu_linear_system == pytest.approx(generic.nu, rel=1e-9)
    assert generic_inv.legendre_residual <= 1e-9
    for m, n in [(1, 0), (0, 1), (2, -3)]:
        gamma = m * generic.omega1 + n * generic.omega2
        intrinsic = generic.nu * gamma.conjugate() + generic_inv.mu * gamma
        assert quasi_period(generic_inv, m, n) == pytest.approx(intrinsic, rel=1e-9)


def test_scaled_lattice_homogeneity(generic_inv, generic_scaled, policy):
    scaled = invariants(generic_scaled, policy)
    assert scaled.g2 == pytest.approx(generic_inv.g2 / 2 ** 4, rel=1e-10)
    assert scaled.g3 == pytest.approx(generic_inv.g3 / 2 ** 6, rel=1e-10)
    assert scaled.mu == pytest.approx(generic_inv.mu / 4, rel=1e-9)


def test_sigma_quasi_periodicity(generic, generic_inv, policy):
    z = 0.2 + 0.1j
    shifted = sigma_product(generic, z + generic.omega1, policy).value
    expected = -cmath.exp(generic_inv.eta1 * (z + generic.omega1 / 2)) * sigma_product(
        generic, z, policy
    ).value
    assert shifted == pytest.approx(expected, rel=1e-9)


def test_sigma_reduced_matches_product(generic, generic_inv, policy):
    z = 1.7 + 0.4j
    assert sigma_reduced(generic, z, policy, generic_inv) == pytest.approx(
        sigma_product(generic, z, policy).value, rel=1e-9
    )


def test_modified_sigma_functional_equation(generic, generic_inv, policy):
    z = 0.3 + 0.1j
    gamma = generic.omega2
    lhs = modified_sigma(generic, generic_inv, z + gamma, policy)
    rhs = -cmath.exp(generic.nu * gamma.conjugate() * (z + gamma / 2)) * modified_sigma(
        generic, generic_inv, z, policy
    )
    assert lhs == pytest.approx(rhs, rel=1e-9)


# ============ 远离原点 ============

def test_zeta_far_from_origin(square, square_inv, policy):
    for z in (30 + 0.5j, -20.2 + 17.1j):
        z0, m, n = reduce_to_cell(square, z)
        expected = zeta_series(square, complex(z0), policy).value + quasi_period(square_inv, int(m), int(n))
        far = zeta_series(square, z, policy)
        assert far.shells_used > policy.series_shell
        assert far.value == pytest.approx(expected, rel=1e-9)


def test_zeta_beyond_grown_shells(square, square_inv, policy):
    z = 200.3 + 0.2j
    expected = zeta_series(square, 0.3 + 0.2j, policy).value + quasi_period(square_inv, 200, 0)
    assert zeta_series(square, z, policy).value == pytest.approx(expected, rel=1e-9)
    with pytest.raises(PoleError):
        zeta_series(square, 200 + 100j, policy)


def test_sigma_far_from_origin(policy):
    # 沿对角线 Re(μz²) = 0，|σ| ≈ e^{ν|z|²/2} 不溢出
    lat = make_lattice(1, 6j)
    inv = invariants(lat, policy)
    z = 21.2 + 21.2j
    product = sigma_product(lat, z, policy)
    assert product.shells_used > policy.series_shell
    assert np.isfinite(product.value)
    assert product.value == pytest.approx(sigma_reduced(lat, z, policy, inv), rel=1e-7)

    zs = np.array([0.2 + 0.1j, 28.3 + 28.3j])
    values = sigma_values(lat, zs, policy)
    assert values[0] == pytest.approx(sigma_product(lat, zs[0], policy).value, rel=1e-14)
    assert values[1] == pytest.approx(sigma_reduced(lat, zs[1], policy, inv), rel=1e-12)


def test_legendre_residual_shrinks_with_shells(generic):
    raw, completed = [], []
    for K in (20, 40, 80):
        shells = TruncationPolicy(series_shell=K)
        eta1 = 2 * zeta_series(generic, generic.omega1 / 2, shells).raw_value
        eta2 = 2 * zeta_series(generic, generic.omega2 / 2, shells).raw_value
        raw.append(abs(eta1 * generic.omega2 - eta2 * generic.omega1 - 2j * math.pi))
        completed.append(invariants(generic, shells).legendre_residual)
    assert raw[0] > raw[1] > raw[2]
    assert max(completed) <= 1e-9
