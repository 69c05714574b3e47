"""
经典 Weierstrass 参考实现

- σ：无穷乘积 z·Π′(1 − z/γ)·exp(z/γ + (z/γ)²/2)，按对数累加
- ζ：部分分式级数 1/z + Σ′[1/(z−γ) + 1/γ + z/γ²]
- G_{2n} = Σ′γ^{−2n}，g₂ = 60G₄，g₃ = 140G₆
- 准周期 η₁、η₂ 与线性方程组求 (ν, μ)

幂律求和只显式计算 series_shell 以内的壳层，其余由
utils.shell_tail 的解析尾项补全；LatticeSumResult.raw_value 保留截断值。
"""

import logging
import math
from dataclasses import replace
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import zeta as hurwitz_zeta

from ..exceptions import DivergentSumError, NumericalConsistencyError, ParameterError, PoleError
from ..models.lattice import Lattice, TruncationPolicy
from ..models.results import EllipticInvariants, LatticeSumResult
from ..utils.shell_tail import power_sum_tail
from ..utils.summation import abs_sum, compensated_row_sums, compensated_sum, int_power
from .lattice import lattice_arrays, reduce_to_cell, shell_radii

logger = logging.getLogger(__name__)


# |u| ≤ 0.5 时用级数计算 log(1−u) + u + u²/2
LOG_SERIES_RADIUS = 0.5
LOG_SERIES_TERMS = 60
# 尾项幂级数
TAIL_MAX_ORDER = 80
TAIL_CUTOFF = 1e-18
# 向量化求值的分块大小
CHUNK = 128
# 线性方程组求得的 ν 与 π/S 的容差
NU_WARN_RTOL = 1e-9
NU_FAIL_RTOL = 1e-6
EISENSTEIN_ORDERS = (2, 3, 4, 5, 6)
# 自动增壳：保持 |z| ≤ TAIL_RADIUS_FRACTION·ρ(K+1)，超过上限改走准周期约化
TAIL_RADIUS_FRACTION = 0.5
GROWN_SHELL_CAP = 64


# ============ 幂律尾项 ============

def _power_tail_series(
    lat: Lattice,
    K: int,
    z: np.ndarray,
    start: np.ndarray,
    coefficient: Callable[[int], float],
) -> tuple[np.ndarray, np.ndarray]:
    """
    Σ_{n≥2} coefficient(n)·T_{2n}(K)·start·z^{2(n−2)}

    Returns:
        (尾项, 误差估计)
    """
    rho, _ = shell_radii(lat)
    radius = rho * (K + 1)
    z_max = float(np.max(np.abs(z))) if z.size else 0.0
    if z_max >= radius:
        raise ParameterError(
            f"|z| = {z_max:.3g} 超出尾项级数收敛半径 {radius:.3g}，请增大 series_shell"
        )

    z2 = z * z
    power = np.array(start, dtype=complex)
    total = np.zeros_like(power)
    error = np.zeros(power.shape)
    for n in range(2, TAIL_MAX_ORDER):
        tail, tail_err = power_sum_tail(lat, 2 * n, K)
        c = coefficient(n)
        total = total + c * tail * power
        error = error + abs(c) * tail_err * np.abs(power)
        # |T_{2n}(K)| ≤ 8ρ^{−2n}·ζ_H(2n−1, K+1)
        majorant = abs(c) * 8 * rho ** (-2 * n) * float(hurwitz_zeta(2 * n - 1, K + 1))
        next_bound = majorant * z_max ** 2 * np.abs(power)
        if np.all(next_bound <= TAIL_CUTOFF * np.maximum(1.0, np.abs(total))):
            error = error + next_bound
            break
        power = power * z2
    return total, error


# ============ σ 函数 ============

def _log_factor(u: np.ndarray) -> np.ndarray:
    """log(1 − u) + u + u²/2，小 |u| 走 −Σ_{j≥3} u^j/j"""
    out = np.empty_like(u)
    small = np.abs(u) <= LOG_SERIES_RADIUS
    us = u[small]
    acc = np.zeros_like(us)
    for j in range(LOG_SERIES_TERMS, 2, -1):
        acc = acc * us + 1.0 / j
    out[small] = -acc * us * us * us
    ul = u[~small]
    out[~small] = np.log(1 - ul) + ul + ul * ul / 2
    return out


def _shells_for(lat: Lattice, K: int, z_max: float) -> int:
    """使 z_max ≤ TAIL_RADIUS_FRACTION·ρ(K′+1) 的最小 K′ ≥ K"""
    rho, _ = shell_radii(lat)
    needed = math.ceil(z_max / (TAIL_RADIUS_FRACTION * rho)) - 1
    return max(K, needed)


def _sigma_arrays(lat: Lattice, z: np.ndarray, K: int):
    """逐点计算 (补全值, 截断值, 误差估计, 实际壳层数)"""
    flat = z.ravel()
    K = _shells_for(lat, K, float(np.max(np.abs(flat))) if flat.size else 0.0)
    gamma = lattice_arrays(lat, K).nonzero().gamma
    log_sum = np.zeros(flat.shape, dtype=complex)
    on_lattice = np.zeros(flat.shape, dtype=bool)
    for begin in range(0, flat.size, CHUNK):
        block = flat[begin:begin + CHUNK]
        u = block[:, None] / gamma[None, :]
        hits = u == 1
        on_lattice[begin:begin + CHUNK] = np.any(hits, axis=1)
        log_sum[begin:begin + CHUNK] = compensated_row_sums(_log_factor(np.where(hits, 0, u)))

    tail, tail_err = _power_tail_series(
        lat, K, flat, start=int_power(flat, 4), coefficient=lambda n: -1.0 / (2 * n)
    )
    raw = flat * np.exp(log_sum)
    value = flat * np.exp(log_sum + tail)
    raw[on_lattice] = 0
    value[on_lattice] = 0
    error = np.abs(value) * tail_err
    return value.reshape(z.shape), raw.reshape(z.shape), error.reshape(z.shape), K


def _sigma_factor(lat: Lattice, inv: EllipticInvariants, z):
    """(z0, χ_W(γ)·exp(η(γ)(z0 + γ/2)))，z = z0 + γ"""
    z0, m, n = reduce_to_cell(lat, z)
    gamma = m * lat.omega1 + n * lat.omega2
    eta = m * inv.eta1 + n * inv.eta2
    chi = np.where((m % 2 == 0) & (n % 2 == 0), 1.0, -1.0)
    return z0, chi * np.exp(eta * (z0 + gamma / 2))


def _sigma_dispatch(lat: Lattice, z: np.ndarray, policy: TruncationPolicy):
    """近处直接求乘积，超出 GROWN_SHELL_CAP 覆盖范围的点先约化到胞腔"""
    rho, _ = shell_radii(lat)
    far = np.abs(z) > TAIL_RADIUS_FRACTION * rho * (GROWN_SHELL_CAP + 1)
    if not np.any(far):
        return _sigma_arrays(lat, z, policy.series_shell)

    shape, z, far = z.shape, z.ravel(), far.ravel()
    value = np.zeros(z.shape, dtype=complex)
    raw = np.zeros(z.shape, dtype=complex)
    error = np.zeros(z.shape)
    K = policy.series_shell
    if np.any(~far):
        value[~far], raw[~far], error[~far], K = _sigma_arrays(lat, z[~far], K)

    z0, factor = _sigma_factor(lat, invariants(lat, policy), z[far])
    v0, r0, e0, _ = _sigma_arrays(lat, z0, policy.series_shell)
    value[far], raw[far], error[far] = factor * v0, factor * r0, np.abs(factor) * e0
    logger.debug(f"{lat.label()}: {int(np.sum(far))} 个点经准周期约化求 σ")
    return value.reshape(shape), raw.reshape(shape), error.reshape(shape), K


def sigma_product(lat: Lattice, z: complex, policy: TruncationPolicy) -> LatticeSumResult:
    """
    σ(z) 的无穷乘积求值

    乘积在对数域累加（log 幅值 + 相位），z ∈ Γ 且对应因子在截断范围内时严格返回 0。
    |z| 较大时自动增加壳层，使尾项级数保持收敛；超出 GROWN_SHELL_CAP 后改用准周期约化。
    """
    value, raw, error, K = _sigma_dispatch(lat, np.asarray([z], dtype=complex), policy)
    return LatticeSumResult(
        value=complex(value[0]),
        tail_estimate=float(error[0]),
        shells_used=K,
        raw_value=complex(raw[0]),
    )


def sigma_values(lat: Lattice, z, policy: TruncationPolicy) -> np.ndarray:
    """σ 的向量化求值（返回与 z 同形的数组）"""
    value, _, _, _ = _sigma_dispatch(lat, np.asarray(z, dtype=complex), policy)
    return value


# ============ ζ 函数 ============

def zeta_series(lat: Lattice, z: complex, policy: TruncationPolicy) -> LatticeSumResult:
    """
    ζ(z; Γ) 的部分分式级数

    每项 1/(z−γ) + 1/γ + z/γ² 写成 −u²/(γ(1−u))，u = z/γ，避免抵消。
    壳层数随 |z| 增长；超出 GROWN_SHELL_CAP 时用 ζ(z0 + γ) = ζ(z0) + η(γ)。

    Raises:
        PoleError: z 落在格点上
    """
    z = complex(z)
    K = _shells_for(lat, policy.series_shell, abs(z))
    if K > GROWN_SHELL_CAP:
        z0, m, n = reduce_to_cell(lat, z)
        if complex(z0) == 0:
            raise PoleError(f"ζ 在格点 z = {z} 处有极点")
        near = zeta_series(lat, complex(z0), policy)
        return replace(near, value=near.value + quasi_period(invariants(lat, policy), int(m), int(n)))

    arrays = lattice_arrays(lat, K)
    if np.any(arrays.gamma == z):
        raise PoleError(f"ζ 在格点 z = {z} 处有极点")

    gamma = arrays.nonzero().gamma
    u = z / gamma
    terms = -u * u / (gamma * (1 - u))
    raw = 1 / z + compensated_sum(terms[::-1])

    zs = np.asarray([z])
    tail, tail_err = _power_tail_series(
        lat, K, zs, start=int_power(zs, 3), coefficient=lambda n: -1.0
    )
    return LatticeSumResult(
        value=raw + complex(tail[0]),
        tail_estimate=float(tail_err[0]) + np.finfo(float).eps * abs_sum(terms),
        shells_used=K,
        raw_value=raw,
        abs_sum=abs_sum(terms),
    )


# ============ Eisenstein 级数 ============

def eisenstein(lat: Lattice, n: int, policy: TruncationPolicy) -> LatticeSumResult:
    """
    G_{2n} = Σ′γ^{−2n}

    由外向内逐壳层累加，再加解析尾项。

    Raises:
        DivergentSumError: n < 2
    """
    if n < 2:
        raise DivergentSumError(f"G_{2 * n} 发散（需要 n ≥ 2）")
    K = policy.series_shell
    gamma = lattice_arrays(lat, K).nonzero().gamma
    terms = int_power(1 / gamma, 2 * n)[::-1]
    raw = compensated_sum(terms)
    tail, tail_err = power_sum_tail(lat, 2 * n, K)
    magnitude = abs_sum(terms)
    return LatticeSumResult(
        value=raw + tail,
        tail_estimate=tail_err + np.finfo(float).eps * magnitude,
        shells_used=K,
        raw_value=raw,
        abs_sum=magnitude,
    )


# ============ 不变量 ============

@lru_cache(maxsize=32)
def invariants(lat: Lattice, policy: TruncationPolicy) -> EllipticInvariants:
    """
    计算 η₁ = 2ζ(ω₁/2)、η₂ = 2ζ(ω₂/2)，解线性方程组得 (ν, μ)，并填充 G₄..G₁₂

    Raises:
        NumericalConsistencyError: 线性方程组的 ν 与 π/S 相差超过 1e−6（相对）
    """
    w1, w2 = lat.omega1, lat.omega2
    zeta_half1 = zeta_series(lat, w1 / 2, policy).value
    zeta_half2 = zeta_series(lat, w2 / 2, policy).value
    eta1, eta2 = 2 * zeta_half1, 2 * zeta_half2

    system = np.array([[w1.conjugate(), w1], [w2.conjugate(), w2]], dtype=complex)
    nu_ls, mu = np.linalg.solve(system, np.array([eta1, eta2], dtype=complex))
    nu = lat.nu
    drift = abs(nu_ls - nu) / nu
    if drift > NU_FAIL_RTOL:
        raise NumericalConsistencyError(f"线性方程组 ν = {nu_ls} 与 π/S = {nu} 不符")
    if drift > NU_WARN_RTOL:
        logger.warning(f"⚠️ 线性方程组 ν 相对偏差 {drift:.2e}")

    area = lat.cell_area
    mu_closed = 1j / area * (zeta_half1 * w2.conjugate() - zeta_half2 * w1.conjugate())

    sums = {2 * n: eisenstein(lat, n, policy) for n in EISENSTEIN_ORDERS}
    G = {k: r.value for k, r in sums.items()}
    legendre = abs(eta1 * w2 - eta2 * w1 - 2j * math.pi)

    logger.debug(f"{lat.label()}: μ = {complex(mu):.3e}, Legendre 残差 {legendre:.2e}")
    return EllipticInvariants(
        lattice=lat,
        g2=60 * G[4],
        g3=140 * G[6],
        G=G,
        eta1=eta1,
        eta2=eta2,
        mu=complex(mu),
        nu=nu,
        nu_linear_system=complex(nu_ls),
        mu_closed_form=mu_closed,
        legendre_residual=legendre,
        G_raw={k: r.raw_value for k, r in sums.items()},
        G_tail={k: r.tail_estimate for k, r in sums.items()},
    )


def quasi_period(inv: EllipticInvariants, m: int, n: int) -> complex:
    """η(γ) = m·η₁ + n·η₂（等于 ν·conj(γ) + μ·γ）"""
    return m * inv.eta1 + n * inv.eta2


# ============ 约化求值 ============

def sigma_reduced(
    lat: Lattice,
    z,
    policy: TruncationPolicy,
    inv: Optional[EllipticInvariants] = None,
):
    """
    先把 z 约化到以 0 为中心的基本胞腔，再乘回准周期因子

    σ(z0 + γ) = χ_W(γ)·exp(η(γ)(z0 + γ/2))·σ(z0)

    支持标量与 numpy 数组。
    """
    if inv is None:
        inv = invariants(lat, policy)
    scalar = np.ndim(z) == 0
    z0, factor = _sigma_factor(lat, inv, z)
    value = factor * _sigma_arrays(lat, np.asarray(z0, dtype=complex), policy.series_shell)[0]
    return complex(value) if scalar else value


def modified_sigma(lat: Lattice, inv: EllipticInvariants, z, policy: TruncationPolicy):
    """σ̃(z) = e^{−μz²/2}·σ(z)，属于 (Γ, χ_W)-theta 空间"""
    z_arr = np.asarray(z, dtype=complex)
    value = np.exp(-inv.mu * z_arr * z_arr / 2) * sigma_reduced(lat, z_arr, policy, inv)
    return complex(value) if np.ndim(z) == 0 else value
