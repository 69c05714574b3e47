"""
ℂ 上的 Gauss 权重求积

- 张量 Gauss-Hermite 规则：∫_ℂ f(w)·e^{−ν|w|²}dm(w) ≈ Σ w_i·f(p_i)
- Bargmann 再生公式与 σ 的再生积分
- 𝒲_r 的积分路线、g₂/g₃ 的积分形式
- 核函数迹与胞腔上的再生公式（中点网格）
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import roots_hermite

from ..exceptions import ParameterError
from ..models.lattice import Lattice, TruncationPolicy
from ..models.results import EllipticInvariants
from ..utils.summation import compensated_sum
from .classical import sigma_reduced
from .hermite import double_factorial_odd, reproducing_kernel, scaled_confluent
from .lattice import LatticeArrays, gaussian_row_sums

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """张量积规则；权重已吸收 e^{−ν|w|²} 与 √ν 缩放"""
    order: int
    nu: float
    points: np.ndarray
    weights: np.ndarray

    @property
    def nodes(self) -> list[tuple[complex, float]]:
        return list(zip(self.points.tolist(), self.weights.tolist()))


@lru_cache(maxsize=16)
def build_rule(nu: float, order: int) -> QuadratureRule:
    """
    每轴 order 个 Gauss-Hermite 节点，w = (x + iy)/√ν，权重 w_x·w_y/ν

    Raises:
        ParameterError: order < 2 或 ν ≤ 0
    """
    if order < 2:
        raise ParameterError(f"求积阶数必须 ≥ 2: {order}")
    if nu <= 0:
        raise ParameterError(f"ν 必须为正: {nu}")
    x, w = roots_hermite(order)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    wx, wy = np.meshgrid(w, w, indexing="ij")
    points = ((xx + 1j * yy) / math.sqrt(nu)).ravel()
    weights = (wx * wy).ravel() / nu
    points.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(order=order, nu=nu, points=points, weights=weights)


def integrate(rule: QuadratureRule, values) -> complex:
    """∫ f·e^{−ν|w|²}dm，values 为 f 在节点上的值"""
    return compensated_sum(rule.weights * np.asarray(values, dtype=complex))


def bargmann_reproduce(
    rule: QuadratureRule, nu: float, f: Callable[[np.ndarray], np.ndarray], z: complex
) -> complex:
    """(ν/π)·∫e^{νz·conj(w)}·f(w)·e^{−ν|w|²}dm(w)"""
    kernel = np.exp(nu * complex(z) * np.conj(rule.points))
    return nu / math.pi * integrate(rule, kernel * f(rule.points))


# ============ σ 相关积分 ============

@lru_cache(maxsize=16)
def sigma_at_nodes(
    lat: Lattice, inv: EllipticInvariants, rule: QuadratureRule, policy: TruncationPolicy
) -> np.ndarray:
    """节点上的 σ 值（每个 (格, 不变量, 规则, 策略) 只算一次）"""
    values = sigma_reduced(lat, rule.points, policy, inv)
    values.setflags(write=False)
    logger.debug(f"{lat.label()}: σ 已在 {values.size} 个求积节点上求值")
    return values


def _twisted_sigma(lat, inv, rule, policy) -> np.ndarray:
    """e^{−μw²/2}·σ(w) 在节点上的值"""
    points = rule.points
    return np.exp(-inv.mu * points * points / 2) * sigma_at_nodes(lat, inv, rule, policy)


def sigma_reproduce(
    lat: Lattice,
    inv: EllipticInvariants,
    rule: QuadratureRule,
    z: complex,
    policy: Optional[TruncationPolicy] = None,
) -> complex:
    """σ(z) = (ν/π)·e^{μz²/2}·∫e^{νz·conj(w) − μw²/2}·σ(w)·e^{−ν|w|²}dm(w)"""
    policy = policy or TruncationPolicy()
    z = complex(z)
    nu = lat.nu
    kernel = np.exp(nu * z * np.conj(rule.points))
    integral = integrate(rule, kernel * _twisted_sigma(lat, inv, rule, policy))
    return nu / math.pi * np.exp(inv.mu * z * z / 2) * integral


def _hermite_gauss_integral(lat, inv, rule, r, policy) -> complex:
    """∫conj(w)·μ^r F(−r;3/2;−ν²conj(w)²/(2μ))·e^{−μw²/2}σ(w)·e^{−ν|w|²}dm"""
    nu = lat.nu
    conj_points = np.conj(rule.points)
    confluent = scaled_confluent(r, inv.mu, -nu * nu * conj_points * conj_points / 2)
    return integrate(rule, conj_points * confluent * _twisted_sigma(lat, inv, rule, policy))


def w_r_integral_route(
    lat: Lattice,
    inv: EllipticInvariants,
    rule: QuadratureRule,
    r: int,
    policy: Optional[TruncationPolicy] = None,
) -> complex:
    """𝒲_r = (ν²/π)·c_r·∫conj(w)·μ^r F(...)·e^{−μw²/2}σ(w)·e^{−ν|w|²}dm"""
    if r < 0:
        raise ParameterError(f"r 必须非负: {r}")
    policy = policy or TruncationPolicy()
    integral = _hermite_gauss_integral(lat, inv, rule, r, policy)
    return lat.nu ** 2 / math.pi * double_factorial_odd(r) * integral


def g2_g3_integral_route(
    lat: Lattice,
    inv: EllipticInvariants,
    rule: QuadratureRule,
    policy: Optional[TruncationPolicy] = None,
) -> tuple[complex, complex]:
    """
    g₂ = −(30ν²/π)·I₂，g₃ = −(35ν²/(2π))·I₃

    Gauss 因子取收敛的 e^{−ν|w|²}。
    """
    policy = policy or TruncationPolicy()
    nu = lat.nu
    g2 = -30 * nu ** 2 / math.pi * _hermite_gauss_integral(lat, inv, rule, 2, policy)
    g3 = -35 * nu ** 2 / (2 * math.pi) * _hermite_gauss_integral(lat, inv, rule, 3, policy)
    return g2, g3


# ============ 胞腔积分 ============

def cell_grid(lat: Lattice, grid: int) -> np.ndarray:
    """基本胞腔上的中点网格 z = s·ω₁ + t·ω₂"""
    if grid < 1:
        raise ParameterError(f"网格必须为正: {grid}")
    mid = (np.arange(grid) + 0.5) / grid
    s, t = np.meshgrid(mid, mid, indexing="ij")
    return (s * lat.omega1 + t * lat.omega2).ravel()


def kernel_trace_terms(lat: Lattice, policy: TruncationPolicy, grid: int = 64) -> tuple[float, complex]:
    """
    核函数迹的分解

    K(z,z)e^{−ν|z|²} = (ν/π)·Σχ(γ)·exp(−ν|γ|²/2 + ν(z·conj(γ) − conj(z)·γ))

    Returns:
        (γ = 0 项的积分 (ν/π)·S, 其余各项积分之和)
    """
    nu = lat.nu
    z = cell_grid(lat, grid)

    def terms(arr: LatticeArrays) -> np.ndarray:
        g = arr.gamma[1:][None, :]
        exponent = -nu * arr.abs2[1:][None, :] / 2 + nu * (
            z[:, None] * np.conj(g) - np.conj(z)[:, None] * g
        )
        return arr.chi[1:][None, :] * np.exp(exponent)

    # 指数为纯虚数，尾项上界与 z 无关
    sums, _, _ = gaussian_row_sums(lat, policy, terms)
    zero_term = nu / math.pi * lat.cell_area
    remainder = nu / math.pi * lat.cell_area * compensated_sum(sums) / z.size
    return zero_term, remainder


def kernel_trace(lat: Lattice, policy: TruncationPolicy, grid: int = 64) -> float:
    """∫_Λ K(z,z)·e^{−ν|z|²}dm(z)，应等于 (ν/π)·S = 1"""
    zero_term, remainder = kernel_trace_terms(lat, policy, grid)
    return zero_term + remainder.real


def kernel_reproduce(
    lat: Lattice,
    f: Callable[[np.ndarray], np.ndarray],
    z: complex,
    policy: TruncationPolicy,
    grid: int = 64,
) -> complex:
    """
    胞腔上的再生公式 f(z) = ∫_Λ K(z,w)·f(w)·e^{−ν|w|²}dm(w)

    f 须属于 (Γ, χ_W)-theta 空间，此时被积函数在 w 上周期，中点网格指数收敛。
    """
    w = cell_grid(lat, grid)
    z_arr = np.full(w.shape, complex(z))
    kernel = reproducing_kernel(lat, z_arr, w, policy)
    integrand = kernel * np.asarray(f(w), dtype=complex) * np.exp(-lat.nu * np.abs(w) ** 2)
    return lat.cell_area * compensated_sum(integrand) / w.size
