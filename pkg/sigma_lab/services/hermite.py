"""
Hermite-Gauss 级数与 Weierstrass theta 级数

- 终止型合流超几何多项式 F(−r; c; x)，c ∈ {1/2, 3/2}
- e^{az²+bz} 的展开引理
- θ_W(z) = Σχ(γ)·γ·exp(−ν|γ|²/2 + νz·conj(γ)) 及其在 0 处的导数
- ℋ_r = ν·c_r·Σχ|γ|²·μ^r F(−r;3/2;−ν²conj(γ)²/(2μ))·e^{−ν|γ|²/2}，
  c_r = (2r+1)!/(2^r r!)，𝒲_r = ℋ_r/ℋ₀
- Poincaré 周期化与 Perelomov 恒等式
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from ..exceptions import DegenerateNormalizationError, ParameterError
from ..models.lattice import Lattice, TruncationPolicy
from ..models.results import EllipticInvariants, LatticeSumResult
from ..utils.summation import int_power
from .lattice import LatticeArrays, gaussian_lattice_sum, gaussian_row_sums

logger = logging.getLogger(__name__)


SUPPORTED_C = (Fraction(1, 2), Fraction(3, 2))
# |ℋ₀| 相对 Σ|项| 的噪声底
NORMALIZATION_FLOOR = 1e-12
# 噪声底的该倍数以内告警
NORMALIZATION_WARN_FACTOR = 1e3


# ============ 合流超几何多项式 ============

@dataclass(frozen=True)
class ConfluentPoly:
    """F(−r; c; x) 的系数：x^k 的系数为 (−r)_k / ((c)_k·k!)"""
    r: int
    c: Fraction
    coefficients: tuple[Fraction, ...]

    def __call__(self, x):
        acc = 0
        for coef in reversed(self.coefficients):
            acc = acc * x + float(coef)
        return acc


@lru_cache(maxsize=None)
def confluent_poly(r: int, c: Fraction = Fraction(3, 2)) -> ConfluentPoly:
    if r < 0:
        raise ParameterError(f"r 必须非负: {r}")
    c = Fraction(c)
    if c not in SUPPORTED_C:
        raise ParameterError(f"不支持的合流参数 c = {c}（仅支持 1/2、3/2）")
    coefficients = [Fraction(1)]
    for k in range(r):
        # (−r)_{k+1}/((c)_{k+1}(k+1)!) = 上一项 · (−r+k)/((c+k)(k+1))
        coefficients.append(coefficients[-1] * (k - r) / ((c + k) * (k + 1)))
    return ConfluentPoly(r=r, c=c, coefficients=tuple(coefficients))


def confluent_f(r: int, c_num: int, c_den: int, x: complex) -> complex:
    """
    F(−r; c; x)，c = c_num/c_den

    Examples:
        >>> confluent_f(1, 3, 2, 3.0)
        -1.0
    """
    return confluent_poly(r, Fraction(c_num, c_den))(x)


def scaled_confluent(r: int, mu: complex, x):
    """
    μ^r·F(−r; 3/2; x/μ) = Σ_k c_k·x^k·μ^{r−k}

    齐次形式下 μ = 0 只剩顶次项 c_r·x^r；x = −ν²conj(γ)²/2 时即
    (ν²conj(γ)²/2)^r/(3/2)_r，无需处理 0/0。
    """
    coefficients = confluent_poly(r).coefficients
    x = np.asarray(x, dtype=complex)
    acc = np.full(x.shape, complex(coefficients[r]))
    mu_power = 1 + 0j
    for k in range(r - 1, -1, -1):
        mu_power = mu_power * mu
        acc = acc * x + float(coefficients[k]) * mu_power
    return acc


# ============ Hermite 多项式 ============

def hermite_odd(r: int, z: complex) -> complex:
    """H_{2r+1}(z) = (−1)^r·((2r+1)!/r!)·2z·F(−r;3/2;z²)"""
    z = complex(z)
    scale = (-1) ** r * math.factorial(2 * r + 1) // math.factorial(r)
    return scale * 2 * z * confluent_f(r, 3, 2, z * z)


def hermite_even(r: int, z: complex) -> complex:
    """H_{2r}(z) = (−1)^r·((2r)!/r!)·F(−r;1/2;z²)"""
    z = complex(z)
    scale = (-1) ** r * math.factorial(2 * r) // math.factorial(r)
    return scale * confluent_f(r, 1, 2, z * z)


# ============ 展开引理 ============

def expand_exp_quadratic(a: complex, b: complex, max_power: int) -> list[complex]:
    """
    e^{az²+bz} 的 Taylor 系数（到 z^max_power）

    z^{2r}:   (a^r/r!)·F(−r;1/2;−b²/(4a))
    z^{2r+1}: b·(a^r/r!)·F(−r;3/2;−b²/(4a))

    以齐次形式 a^r·F(−r;c;x/a) = Σ_k coef_k·x^k·a^{r−k}（x = −b²/4）求值。

    Raises:
        ParameterError: a = 0（此时系数为 b^k/k!）
    """
    a, b = complex(a), complex(b)
    if a == 0:
        raise ParameterError("a = 0：请直接使用 b^k/k!")
    x = -b * b / 4
    out = []
    for k in range(max_power + 1):
        r, odd = divmod(k, 2)
        poly = confluent_poly(r, SUPPORTED_C[odd])
        value = sum(
            float(coef) * x ** j * a ** (r - j) for j, coef in enumerate(poly.coefficients)
        )
        value /= math.factorial(r)
        out.append(b * value if odd else value)
    return out


# ============ 权重与 θ_W ============

def weight_map(lat: Lattice, arrays: LatticeArrays) -> np.ndarray:
    """e_χ^ν(γ) = |γ|²·χ(γ)·exp(−ν|γ|²/2)"""
    return arrays.abs2 * arrays.chi * np.exp(-lat.nu * arrays.abs2 / 2)


def theta_w(lat: Lattice, z: complex, policy: TruncationPolicy) -> LatticeSumResult:
    """θ_W(z) = Σχ(γ)·γ·exp(−ν|γ|²/2 + νz·conj(γ))"""
    z = complex(z)

    def terms(arr: LatticeArrays) -> np.ndarray:
        return arr.chi * arr.gamma * np.exp(-lat.nu * arr.abs2 / 2 + lat.nu * z * np.conj(arr.gamma))

    return gaussian_lattice_sum(lat, policy, terms, degree=1, z_abs=abs(z))


def theta_w_values(lat: Lattice, z, policy: TruncationPolicy) -> np.ndarray:
    """θ_W 的向量化求值"""
    z = np.atleast_1d(np.asarray(z, dtype=complex))

    def terms(arr: LatticeArrays) -> np.ndarray:
        phase = lat.nu * z[:, None] * np.conj(arr.gamma)[None, :]
        return arr.chi * arr.gamma * np.exp(-lat.nu * arr.abs2 / 2 + phase)

    values, _, _ = gaussian_row_sums(lat, policy, terms, degree=1, z_abs=float(np.max(np.abs(z))))
    return values


def theta_w_prime(lat: Lattice, z: complex, policy: TruncationPolicy) -> LatticeSumResult:
    """θ′_W(z) = ν·Σχ(γ)·|γ|²·exp(−ν|γ|²/2 + νz·conj(γ))"""
    z = complex(z)

    def terms(arr: LatticeArrays) -> np.ndarray:
        return lat.nu * arr.chi * arr.abs2 * np.exp(
            -lat.nu * arr.abs2 / 2 + lat.nu * z * np.conj(arr.gamma)
        )

    return gaussian_lattice_sum(lat, policy, terms, degree=2, z_abs=abs(z), scale=lat.nu)


def moment_sum(lat: Lattice, k: int, policy: TruncationPolicy) -> LatticeSumResult:
    """M_k = Σχ(γ)·conj(γ)^{2k}·|γ|²·e^{−ν|γ|²/2}"""

    def terms(arr: LatticeArrays) -> np.ndarray:
        return int_power(np.conj(arr.gamma), 2 * k) * weight_map(lat, arr)

    return gaussian_lattice_sum(lat, policy, terms, degree=2 * k + 2)


def theta_w_derivatives_at0(lat: Lattice, max_j: int, policy: TruncationPolicy) -> list[complex]:
    """θ_W^{(2j+1)}(0) = ν^{2j+1}·M_j，j = 0..max_j（偶数阶导数恒为 0）"""
    return [lat.nu ** (2 * j + 1) * moment_sum(lat, j, policy).value for j in range(max_j + 1)]


# ============ Hermite-Gauss 级数 ============

def double_factorial_odd(r: int) -> int:
    """c_r = (2r+1)!/(2^r·r!) = (2r+1)!!"""
    return math.factorial(2 * r + 1) // (2 ** r * math.factorial(r))


def hermite_gauss_sum(
    lat: Lattice, inv: EllipticInvariants, r: int, policy: TruncationPolicy
) -> LatticeSumResult:
    """
    B_r = Σχ|γ|²·μ^r F(−r;3/2;−ν²conj(γ)²/(2μ))·e^{−ν|γ|²/2}

    μ = 0 时为顶次项 (ν²conj(γ)²/2)^r/(3/2)_r。
    """
    nu, mu = lat.nu, inv.mu

    def terms(arr: LatticeArrays) -> np.ndarray:
        conj2 = np.conj(arr.gamma) * np.conj(arr.gamma)
        return scaled_confluent(r, mu, -nu * nu * conj2 / 2) * weight_map(lat, arr)

    scale = max(1.0, abs(mu)) ** r * max(1.0, nu * nu) ** r
    return gaussian_lattice_sum(lat, policy, terms, degree=2 * r + 2, scale=scale)


def h_r(lat: Lattice, inv: EllipticInvariants, r: int, policy: TruncationPolicy) -> LatticeSumResult:
    """ℋ_r = ν·c_r·B_r"""
    block = hermite_gauss_sum(lat, inv, r, policy)
    factor = lat.nu * double_factorial_odd(r)
    return LatticeSumResult(
        value=factor * block.value,
        tail_estimate=factor * block.tail_estimate,
        shells_used=block.shells_used,
        abs_sum=factor * block.abs_sum,
    )


def _normalization(lat: Lattice, inv: EllipticInvariants, policy: TruncationPolicy) -> complex:
    h0 = h_r(lat, inv, 0, policy)
    if abs(h0.value) <= NORMALIZATION_FLOOR * h0.abs_sum:
        raise DegenerateNormalizationError(f"|ℋ₀| = {abs(h0.value):.3e} 低于噪声底")
    if abs(h0.value) <= NORMALIZATION_WARN_FACTOR * NORMALIZATION_FLOOR * h0.abs_sum:
        logger.warning(
            f"⚠️ {lat.label()}: |ℋ₀| = {abs(h0.value):.3e} 接近噪声底（Σ|项| = {h0.abs_sum:.3e}）"
        )
    logger.debug(f"{lat.label()}: ℋ₀ = {h0.value:.6e}（{h0.shells_used} 壳层）")
    return h0.value


def w_r_series_route(
    lat: Lattice, inv: EllipticInvariants, r: int, policy: TruncationPolicy
) -> complex:
    """𝒲_r = ℋ_r/ℋ₀"""
    h0 = _normalization(lat, inv, policy)
    if r == 0:
        return 1 + 0j
    return h_r(lat, inv, r, policy).value / h0


def sigma_from_theta(lat: Lattice, inv: EllipticInvariants, z, policy: TruncationPolicy):
    """σ(z) = e^{μz²/2}·θ_W(z)/ℋ₀"""
    h0 = _normalization(lat, inv, policy)
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    values = np.exp(inv.mu * z_arr * z_arr / 2) * theta_w_values(lat, z_arr, policy) / h0
    return complex(values[0]) if np.ndim(z) == 0 else values


def mu_series(lat: Lattice, policy: TruncationPolicy) -> complex:
    """μ = −(ν²/3)·M₁/M₀"""
    m0 = moment_sum(lat, 0, policy).value
    m1 = moment_sum(lat, 1, policy).value
    return -(lat.nu ** 2 / 3) * m1 / m0


def g2_series(lat: Lattice, inv: EllipticInvariants, policy: TruncationPolicy) -> complex:
    """g₂ = −30·B₂/B₀"""
    b0 = hermite_gauss_sum(lat, inv, 0, policy).value
    return -30 * hermite_gauss_sum(lat, inv, 2, policy).value / b0


def g3_series(lat: Lattice, inv: EllipticInvariants, policy: TruncationPolicy) -> complex:
    """g₃ = −(35/2)·B₃/B₀"""
    b0 = hermite_gauss_sum(lat, inv, 0, policy).value
    return -35 / 2 * hermite_gauss_sum(lat, inv, 3, policy).value / b0


# ============ Poincaré 周期化 ============

def poincare_periodize(
    lat: Lattice,
    f: Callable[[np.ndarray], np.ndarray],
    z: complex,
    policy: TruncationPolicy,
    growth: tuple[float, float] = (0.0, 1.0),
    degree: float = 0.0,
) -> LatticeSumResult:
    """
    𝒫(f)(z) = Σχ(γ)·exp(−ν|γ|²/2 + νz·conj(γ))·f(z − γ)

    Args:
        f: 接受 numpy 数组的整函数
        growth: 增长预算 (α, β)，|f(w)| ≤ C·e^{α|w|^β}，β < 2；仅用于尾项上界
        degree: f 的多项式增长次数（同样只用于尾项上界）

    Raises:
        NumericalConsistencyError: 出现非有限项
    """
    z = complex(z)

    def terms(arr: LatticeArrays) -> np.ndarray:
        weights = arr.chi * np.exp(-lat.nu * arr.abs2 / 2 + lat.nu * z * np.conj(arr.gamma))
        with np.errstate(over="ignore", invalid="ignore"):
            return weights * np.asarray(f(z - arr.gamma), dtype=complex)

    return gaussian_lattice_sum(lat, policy, terms, degree=degree, z_abs=abs(z), growth=growth)


def perelomov_sum(lat: Lattice, k: int, policy: TruncationPolicy) -> LatticeSumResult:
    """Σχ(γ)·γ^k·e^{−ν|γ|²/2}"""
    if k < 0:
        raise ParameterError(f"k 必须非负: {k}")

    def terms(arr: LatticeArrays) -> np.ndarray:
        return arr.chi * int_power(arr.gamma, k) * np.exp(-lat.nu * arr.abs2 / 2)

    return gaussian_lattice_sum(lat, policy, terms, degree=k)


def perelomov_check(lat: Lattice, k_max: int, policy: TruncationPolicy) -> list[tuple[int, float]]:
    """|Σχ(γ)·γ^k·e^{−ν|γ|²/2}|，k = 0..k_max，应为 0"""
    return [(k, abs(perelomov_sum(lat, k, policy).value)) for k in range(k_max + 1)]


# ============ 再生核 ============

def reproducing_kernel(lat: Lattice, z, w, policy: TruncationPolicy):
    """
    K^ν(z, w) = (ν/π)·Σχ(γ)·exp(−ν|γ|²/2 + ν(z·conj(γ) − conj(w)·γ + z·conj(w)))

    支持 z、w 为同形数组（逐点求值）。
    """
    nu = lat.nu
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    w_arr = np.broadcast_to(np.asarray(w, dtype=complex), z_arr.shape)

    def terms(arr: LatticeArrays) -> np.ndarray:
        g = arr.gamma[None, :]
        exponent = (
            -nu * arr.abs2[None, :] / 2
            + nu * (z_arr[:, None] * np.conj(g) - np.conj(w_arr)[:, None] * g)
        )
        return arr.chi[None, :] * np.exp(exponent)

    z_abs = float(np.max(np.abs(z_arr)) + np.max(np.abs(w_arr)))
    sums, _, _ = gaussian_row_sums(lat, policy, terms, z_abs=z_abs)
    values = nu / math.pi * np.exp(nu * z_arr * np.conj(w_arr)) * sums
    return complex(values[0]) if np.ndim(z) == 0 and np.ndim(w) == 0 else values

