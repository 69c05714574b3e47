"""合流多项式、展开引理、θ_W 与 Hermite-Gauss 级数路线"""

import cmath
import logging
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.polynomial import hermite as np_hermite

from sigma_lab.exceptions import ParameterError
from sigma_lab.models import TruncationPolicy
from sigma_lab.services import hermite
from sigma_lab.services.classical import modified_sigma, sigma_reduced
from sigma_lab.services.hermite import (
    confluent_f,
    confluent_poly,
    expand_exp_quadratic,
    g2_series,
    g3_series,
    h_r,
    hermite_even,
    hermite_odd,
    mu_series,
    perelomov_check,
    poincare_periodize,
    reproducing_kernel,
    scaled_confluent,
    sigma_from_theta,
    theta_w,
    theta_w_derivatives_at0,
    theta_w_prime,
    w_r_series_route,
)
from sigma_lab.services.taylor import build_coeff_table, w_r_polynomial, w_r_value


def _hermite_reference(k, z):
    coefficients = np.zeros(k + 1)
    coefficients[k] = 1
    return np_hermite.hermval(z, coefficients)


# ============ 多项式 ============

def test_confluent_values():
    assert confluent_f(0, 3, 2, 5.0) == 1
    assert confluent_f(1, 3, 2, 3.0) == pytest.approx(-1.0)
    assert confluent_poly(2, Fraction(1, 2)).coefficients == (1, -4, Fraction(4, 3))


def test_confluent_rejects_bad_arguments():
    with pytest.raises(ParameterError):
        confluent_poly(2, Fraction(5, 2))
    with pytest.raises(ParameterError):
        confluent_poly(-1)


@pytest.mark.parametrize("r", range(6))
def test_hermite_polynomials(r):
    z = 0.7 + 0.2j
    assert hermite_even(r, z) == pytest.approx(_hermite_reference(2 * r, z), rel=1e-12)
    assert hermite_odd(r, z) == pytest.approx(_hermite_reference(2 * r + 1, z), rel=1e-12)


@pytest.mark.parametrize("r", range(7))
def test_scaled_confluent(r):
    x = np.array([0.4 - 0.3j, -1.2 + 0.5j])
    mu = 0.7 + 0.2j
    expected = mu ** r * np.array([confluent_f(r, 3, 2, v / mu) for v in x])
    np.testing.assert_allclose(scaled_confluent(r, mu, x), expected, rtol=1e-12)
    top = float(confluent_poly(r).coefficients[r])
    np.testing.assert_allclose(scaled_confluent(r, 0, x), top * x ** r, rtol=1e-14)


def _unit_disk(max_abs):
    return st.tuples(st.floats(-1, 1), st.floats(-1, 1)).map(
        lambda p: complex(*p) * max_abs / max(1.0, abs(complex(*p)))
    )


@settings(max_examples=20, deadline=None)
@given(a=_unit_disk(1.0).filter(lambda a: abs(a) > 1e-3), b=_unit_disk(1.0))
def test_expansion_lemma_against_cauchy_product(a, b):
    coefficients = expand_exp_quadratic(a, b, 10)
    for k, value in enumerate(coefficients):
        oracle = sum(
            a ** i / math.factorial(i) * b ** (k - 2 * i) / math.factorial(k - 2 * i)
            for i in range(k // 2 + 1)
        )
        assert abs(value - oracle) <= 1e-11


def test_expansion_lemma_requires_quadratic_term():
    with pytest.raises(ParameterError):
        expand_exp_quadratic(0, 1, 4)


# ============ θ_W ============

def test_theta_vanishes_at_origin(generic, policy):
    assert abs(theta_w(generic, 0, policy).value) <= 1e-15


def test_theta_prime_matches_difference_quotient(generic, policy):
    z, h = 0.3 + 0.2j, 1e-5
    quotient = (theta_w(generic, z + h, policy).value - theta_w(generic, z - h, policy).value) / (2 * h)
    assert theta_w_prime(generic, z, policy).value == pytest.approx(quotient, rel=1e-7)


def test_theta_quasi_periodicity(generic, policy):
    z = 0.3 + 0.2j
    base = theta_w(generic, z, policy).value
    for m, n in [(1, 0), (0, 1), (2, 0), (1, 2), (-1, 1)]:
        gamma = m * generic.omega1 + n * generic.omega2
        chi = 1 if m % 2 == 0 and n % 2 == 0 else -1
        factor = chi * cmath.exp(generic.nu * abs(gamma) ** 2 / 2 + generic.nu * z * gamma.conjugate())
        shifted = theta_w(generic, z + gamma, policy).value
        assert abs(shifted - factor * base) <= 1e-9 * abs(factor * base), (m, n)


def test_theta_odd_derivatives_at_origin(square, generic, generic_inv, policy):
    derivatives = theta_w_derivatives_at0(generic, 2, policy)
    assert derivatives[0] == pytest.approx(h_r(generic, generic_inv, 0, policy).value, rel=1e-12)

    h = 1e-4
    quotient = (theta_w(generic, h, policy).value - theta_w(generic, -h, policy).value) / (2 * h)
    assert quotient == pytest.approx(derivatives[0], rel=1e-6)

    # 正方格的四重对称使 2j+1 ≡ 3 (mod 4) 阶导数为 0
    assert abs(theta_w_derivatives_at0(square, 1, policy)[1]) <= 1e-12


def test_theta_tail_bound_far_from_origin(square, caplog):
    z = 6.3 + 5.8j
    with caplog.at_level(logging.WARNING, logger="sigma_lab.services.lattice"):
        coarse = theta_w(square, z, TruncationPolicy(max_shell=12))
    fine = theta_w(square, z, TruncationPolicy(max_shell=20))
    assert "⚠️" in caplog.text
    assert abs(fine.value - coarse.value) <= coarse.tail_estimate + 1e-13 * fine.abs_sum
    assert coarse.tail_estimate <= 1e-6 * abs(fine.value)


def test_perelomov_identities(panel_lattice, policy):
    _, lat = panel_lattice
    for k, residual in perelomov_check(lat, 12, policy):
        assert residual <= 1e-10, k


# ============ Hermite-Gauss 级数路线 ============

def test_normalization_is_nonzero(panel_lattice, policy):
    from sigma_lab.services.classical import invariants

    _, lat = panel_lattice
    h0 = h_r(lat, invariants(lat, policy), 0, policy)
    assert abs(h0.value) > 1e-6 * h0.abs_sum


def test_normalization_near_floor_warns(generic, generic_inv, policy, monkeypatch, caplog):
    h0 = h_r(generic, generic_inv, 0, policy)
    with caplog.at_level(logging.WARNING, logger="sigma_lab.services.hermite"):
        w_r_series_route(generic, generic_inv, 2, policy)
    assert caplog.text == ""

    monkeypatch.setattr(hermite, "NORMALIZATION_FLOOR", abs(h0.value) / h0.abs_sum / 10)
    with caplog.at_level(logging.WARNING, logger="sigma_lab.services.hermite"):
        w_r_series_route(generic, generic_inv, 2, policy)
    assert "⚠️" in caplog.text
    assert "ℋ₀" in caplog.text


def test_series_route_matches_recursion(panel_lattice, policy):
    from sigma_lab.services.classical import invariants

    _, lat = panel_lattice
    inv = invariants(lat, policy)
    table = build_coeff_table(6)
    for r in range(7):
        recursion = w_r_value(w_r_polynomial(table, r), inv)
        series = w_r_series_route(lat, inv, r, policy)
        assert abs(series - recursion) <= 1e-6 * max(1.0, abs(recursion)), r


def test_w1_vanishes_on_generic(generic, generic_inv, policy):
    assert abs(w_r_series_route(generic, generic_inv, 1, policy)) <= 1e-9


def test_w2_on_square(square, square_inv, policy):
    assert w_r_series_route(square, square_inv, 2, policy) == pytest.approx(-square_inv.g2 / 2, rel=1e-7)


def test_sigma_reconstruction(square, square_inv, generic, generic_inv, policy):
    grid = [0.1, 0.3, 0.5, 0.7, 0.9]
    for lat, inv, tol in ((square, square_inv, 1e-7), (generic, generic_inv, 1e-6)):
        z = np.array([s * lat.omega1 + t * lat.omega2 for s in grid for t in grid])
        reconstructed = sigma_from_theta(lat, inv, z, policy)
        classical = sigma_reduced(lat, z, policy, inv)
        assert np.max(np.abs(reconstructed / classical - 1)) <= tol
    assert sigma_from_theta(square, square_inv, 0.25, policy) == pytest.approx(
        sigma_reduced(square, 0.25, policy, square_inv), rel=1e-7
    )


def test_mu_series(square, generic, generic_inv, policy):
    assert abs(mu_series(square, policy)) <= 1e-8
    assert mu_series(generic, policy) == pytest.approx(generic_inv.mu, rel=1e-6)


def test_g2_g3_series(square, square_inv, hexagonal, hexagonal_inv, generic, generic_inv, policy):
    assert g2_series(square, square_inv, policy) == pytest.approx(square_inv.g2, rel=1e-6)
    assert g3_series(hexagonal, hexagonal_inv, policy) == pytest.approx(hexagonal_inv.g3, rel=1e-6)
    assert g2_series(generic, generic_inv, policy) == pytest.approx(generic_inv.g2, rel=1e-6)
    assert g3_series(generic, generic_inv, policy) == pytest.approx(generic_inv.g3, rel=1e-6)


# ============ Poincaré 周期化 ============

@pytest.mark.parametrize("z", [0.0, 0.3 + 0.2j, -0.4 + 0.5j])
def test_periodization_of_even_functions_vanishes(generic, policy, z):
    one = poincare_periodize(generic, lambda w: np.ones_like(w), z, policy)
    square_fn = poincare_periodize(generic, lambda w: w * w, z, policy, degree=2)
    cosine = poincare_periodize(generic, lambda w: np.cos(0.7 * w), z, policy, growth=(0.7, 1.0))
    for result in (one, square_fn, cosine):
        assert abs(result.value) <= 1e-10 * max(1.0, result.abs_sum)


def test_periodization_of_identity_is_minus_theta(generic, policy):
    z = 0.3 + 0.2j
    result = poincare_periodize(generic, lambda w: w, z, policy, degree=1)
    assert abs(result.value + theta_w(generic, z, policy).value) <= 1e-10


def test_periodization_lands_in_theta_space(generic, policy):
    z, gamma = 0.2 + 0.1j, generic.omega2

    def cubic(w):
        return w ** 3

    shifted = poincare_periodize(generic, cubic, z + gamma, policy, degree=3).value
    base = poincare_periodize(generic, cubic, z, policy, degree=3).value
    expected = -cmath.exp(generic.nu * gamma.conjugate() * (z + gamma / 2)) * base
    assert abs(shifted - expected) <= 1e-9 * max(1.0, abs(expected))


# ============ 再生核 ============

def test_kernel_is_hermitian(generic, policy):
    z, w = 0.3 + 0.1j, -0.2 + 0.4j
    assert reproducing_kernel(generic, w, z, policy) == pytest.approx(
        reproducing_kernel(generic, z, w, policy).conjugate(), rel=1e-10
    )


def test_kernel_is_rank_one(square, square_inv, policy):
    # 一维 theta 空间：K(z,w)·K(w,z) = K(z,z)·K(w,w)
    z, w = 0.3 + 0.1j, -0.2 + 0.4j
    lhs = reproducing_kernel(square, z, w, policy) * reproducing_kernel(square, w, z, policy)
    rhs = reproducing_kernel(square, z, z, policy) * reproducing_kernel(square, w, w, policy)
    assert lhs == pytest.approx(rhs, rel=1e-9)
    ratio = modified_sigma(square, square_inv, z, policy) / modified_sigma(square, square_inv, w, policy)
    assert reproducing_kernel(square, z, w, policy) / reproducing_kernel(square, w, w, policy) == pytest.approx(
        ratio, rel=1e-9
    )


def test_kernel_lattice_covariance(generic, policy):
    # K(z+γ, w+γ′) = j(γ, z)·K(z, w)·conj(j(γ′, w))，j(γ, z) = χ(γ)·e^{ν|γ|²/2 + νz·conj(γ)}
    nu = generic.nu
    z, w = 0.3 + 0.1j, -0.2 + 0.4j
    base = reproducing_kernel(generic, z, w, policy)
    for (m1, n1), (m2, n2) in [((1, 0), (0, 1)), ((2, 0), (1, 1)), ((0, -1), (0, 0))]:
        gamma = m1 * generic.omega1 + n1 * generic.omega2
        gamma_p = m2 * generic.omega1 + n2 * generic.omega2
        chi = 1 if m1 % 2 == 0 and n1 % 2 == 0 else -1
        chi_p = 1 if m2 % 2 == 0 and n2 % 2 == 0 else -1
        left = chi * cmath.exp(nu * abs(gamma) ** 2 / 2 + nu * z * gamma.conjugate())
        right = chi_p * cmath.exp(nu * abs(gamma_p) ** 2 / 2 + nu * w.conjugate() * gamma_p)
        shifted = reproducing_kernel(generic, z + gamma, w + gamma_p, policy)
        assert shifted == pytest.approx(left * base * right, rel=1e-9), (m1, n1, m2, n2)
