"""
格服务

负责：
1. 格的构造与定向（make_lattice、预设格）
2. 格点按 sup 范数壳层枚举（标量 LatticePoint 列表 / 向量化数组）
3. 伪特征 χ_W 与 (RDQ) 检查
4. Gauss 加权求和的尾项上界与公共求和驱动
"""

import cmath
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from ..exceptions import DegenerateLatticeError, NumericalConsistencyError, ParameterError
from ..models.lattice import Lattice, LatticePoint, TruncationPolicy
from ..models.results import LatticeSumResult
from ..utils.summation import abs_sum, compensated_row_sums, compensated_sum

logger = logging.getLogger(__name__)


# ============ 预设格 ============

PRESETS: dict[str, tuple[complex, complex]] = {
    "square": (1 + 0j, 1j),
    "hexagonal": (1 + 0j, cmath.exp(1j * math.pi / 3)),
    "generic": (1 + 0j, 0.3 + 1.2j),
    "generic_scaled": (2 + 0j, 0.6 + 2.4j),
}

# 尾项上界求和的壳层窗口
TAIL_WINDOW = 200


def make_lattice(omega1: complex, omega2: complex) -> Lattice:
    """
    构造定向格

    Im(ω₂/ω₁) < 0 时自动交换基向量。

    Raises:
        DegenerateLatticeError: 零向量或共线
    """
    w1, w2 = complex(omega1), complex(omega2)
    if w1 == 0 or w2 == 0:
        raise DegenerateLatticeError("格基向量不能为零")
    if (w2 / w1).imag < 0:
        logger.debug(f"格基定向: 交换 ({w1}, {w2})")
        w1, w2 = w2, w1
    return Lattice(w1, w2)


def preset_lattice(name: str) -> Lattice:
    try:
        return make_lattice(*PRESETS[name])
    except KeyError:
        raise ParameterError(f"未知预设格: {name}（可选: {', '.join(PRESETS)}）") from None


def chi_w(point: LatticePoint) -> int:
    """χ_W(γ) = +1 当且仅当 γ/2 ∈ Γ"""
    return point.chi


def theta_space_dimension(lat: Lattice) -> float:
    """(Γ, χ_W)-theta 空间维数 (ν/π)·S"""
    return lat.nu / math.pi * lat.cell_area


def rdq_residual(lat: Lattice, p: LatticePoint, q: LatticePoint) -> float:
    """
    (RDQ) 条件残差

    |χ(γ+γ′) − χ(γ)χ(γ′)·exp((ν/2)(γ·conj(γ′) − conj(γ)·γ′))|
    """
    total = lat.point(p.m + q.m, p.n + q.n)
    phase = cmath.exp(
        lat.nu / 2 * (p.gamma * q.gamma.conjugate() - p.gamma.conjugate() * q.gamma)
    )
    return abs(total.chi - p.chi * q.chi * phase)


# ============ 枚举 ============

@dataclass(frozen=True, eq=False)
class LatticeArrays:
    """壳层有序的向量化格点（只读）"""
    m: np.ndarray
    n: np.ndarray
    gamma: np.ndarray
    chi: np.ndarray
    abs2: np.ndarray
    shell: np.ndarray

    def __len__(self) -> int:
        return len(self.gamma)

    def nonzero(self) -> "LatticeArrays":
        """去掉 γ = 0（总是第一个）"""
        return LatticeArrays(*(arr[1:] for arr in self._fields()))

    def _fields(self) -> tuple[np.ndarray, ...]:
        return (self.m, self.n, self.gamma, self.chi, self.abs2, self.shell)


@lru_cache(maxsize=64)
def lattice_arrays(lat: Lattice, max_shell: int) -> LatticeArrays:
    """
    max(|m|,|n|) ≤ max_shell 的全部格点

    顺序：壳层递增，壳层内按 (m, n) 字典序，因此确定且关于 γ ↔ −γ 对称。
    """
    if max_shell < 0:
        raise ParameterError(f"max_shell 必须非负: {max_shell}")
    span = np.arange(-max_shell, max_shell + 1)
    mm, nn = np.meshgrid(span, span, indexing="ij")
    m, n = mm.ravel(), nn.ravel()
    shell = np.maximum(np.abs(m), np.abs(n))
    order = np.lexsort((n, m, shell))
    m, n, shell = m[order], n[order], shell[order]

    gamma = m * lat.omega1 + n * lat.omega2
    chi = np.where((m % 2 == 0) & (n % 2 == 0), 1.0, -1.0)
    abs2 = gamma.real ** 2 + gamma.imag ** 2

    arrays = LatticeArrays(m=m, n=n, gamma=gamma, chi=chi, abs2=abs2, shell=shell)
    for arr in arrays._fields():
        arr.setflags(write=False)
    return arrays


def enumerate_points(lat: Lattice, policy: TruncationPolicy) -> list[LatticePoint]:
    """
    枚举 max(|m|,|n|) ≤ policy.max_shell 的格点

    Examples:
        >>> len(enumerate_points(make_lattice(1, 1j), TruncationPolicy(max_shell=3)))
        49
    """
    arrays = lattice_arrays(lat, policy.max_shell)
    return [
        LatticePoint(m=int(m), n=int(n), gamma=complex(g))
        for m, n, g in zip(arrays.m, arrays.n, arrays.gamma)
    ]


def reduce_to_cell(lat: Lattice, z):
    """
    z = z0 + m·ω₁ + n·ω₂，z0 的格坐标落在 [−½, ½]

    支持标量与 numpy 数组。

    Returns:
        (z0, m, n)
    """
    z = np.asarray(z, dtype=complex)
    area = lat.cell_area
    s = (np.conj(z) * lat.omega2).imag / area
    t = (lat.omega1.conjugate() * z).imag / area
    m = np.rint(s)
    n = np.rint(t)
    z0 = z - (m * lat.omega1 + n * lat.omega2)
    return z0, m.astype(np.int64), n.astype(np.int64)


# ============ Gauss 加权求和 ============

@lru_cache(maxsize=64)
def shell_radii(lat: Lattice) -> tuple[float, float]:
    """
    单位壳层（k = 1）上 |γ| 的最小值 ρ 与最大值 R

    壳层 k 上 ρk ≤ |γ| ≤ Rk。
    """
    w1, w2 = lat.omega1, lat.omega2
    rho = math.inf
    for a, b in ((w1, w2), (-w1, w2), (w2, w1), (-w2, w1)):
        t = -(a * b.conjugate()).real / abs(b) ** 2
        t = min(1.0, max(-1.0, t))
        rho = min(rho, abs(a + t * b))
    big_r = max(abs(w1 + w2), abs(w1 - w2))
    return rho, big_r


def gaussian_tail_bound(
    lat: Lattice,
    K: int,
    degree: float = 0.0,
    z_abs: float = 0.0,
    growth: tuple[float, float] = (0.0, 1.0),
) -> float:
    """
    壳层 > K 的 Gauss 加权和的上界

    Σ_{k>K} 8k·(Rk)^degree·max_{ρk≤x≤Rk} exp(−νx²/2 + ν|z|x)·exp(α(|z| + Rk)^β)

    −νx²/2 + ν|z|x 在 x = |z| 处取峰值，所以先把 |z| 截到 [ρk, Rk] 再求指数；
    窗口从 K+1 起，至少延伸到峰值所在壳层之后 TAIL_WINDOW 层。

    Args:
        lat: 格
        K: 已求和的最大壳层
        degree: 被加项关于 |γ| 的多项式次数
        z_abs: |z|（含 e^{νz·conj(γ)} 因子时）
        growth: 被周期化函数的增长预算 (α, β)：|f(w)| ≤ C·e^{α|w|^β}
    """
    rho, big_r = shell_radii(lat)
    alpha, beta = growth
    peak_shell = math.ceil(z_abs / rho)
    last = max(K, peak_shell) + TAIL_WINDOW
    k = np.arange(K + 1, last + 1, dtype=float)
    x = np.clip(z_abs, rho * k, big_r * k)
    log_terms = (
        np.log(8 * k)
        + degree * np.log(big_r * k)
        - lat.nu * x * x / 2
        + lat.nu * z_abs * x
        + alpha * (z_abs + big_r * k) ** beta
    )
    return float(np.sum(np.exp(log_terms)))


def select_shells(
    lat: Lattice,
    policy: TruncationPolicy,
    degree: float = 0.0,
    z_abs: float = 0.0,
    scale: float = 1.0,
    growth: tuple[float, float] = (0.0, 1.0),
) -> tuple[int, float]:
    """
    选择最小壳层数 K，使尾项上界 ≤ target_tol/10（不超过 max_shell）

    达到 max_shell 仍高于 target_tol 时记 WARNING。

    Returns:
        (K, 尾项上界)
    """
    bound = math.inf
    for K in range(0, policy.max_shell + 1):
        bound = scale * gaussian_tail_bound(lat, K, degree, z_abs, growth)
        if bound <= policy.target_tol / 10:
            return K, bound
    if bound > policy.target_tol:
        logger.warning(
            f"⚠️ {lat.label()}: 尾项上界 {bound:.2e} 高于 target_tol={policy.target_tol:.0e}"
            f"（已达 max_shell={policy.max_shell}）"
        )
    else:
        logger.debug(
            f"尾项上界 {bound:.2e} 高于 target_tol/10，使用 max_shell={policy.max_shell}"
        )
    return policy.max_shell, bound


def gaussian_lattice_sum(
    lat: Lattice,
    policy: TruncationPolicy,
    terms: Callable[[LatticeArrays], np.ndarray],
    degree: float = 0.0,
    z_abs: float = 0.0,
    scale: float = 1.0,
    growth: tuple[float, float] = (0.0, 1.0),
) -> LatticeSumResult:
    """
    Gauss 加权 Γ 求和的公共驱动

    Args:
        terms: 给定格点数组返回逐点被加项（一维）
        degree / z_abs / scale / growth: 传给尾项上界
    """
    K, bound = select_shells(lat, policy, degree, z_abs, scale, growth)
    values = _checked(terms(lattice_arrays(lat, K)))
    return LatticeSumResult(
        value=compensated_sum(values),
        tail_estimate=bound,
        shells_used=K,
        raw_value=None,
        abs_sum=abs_sum(values),
    )


def gaussian_row_sums(
    lat: Lattice,
    policy: TruncationPolicy,
    terms: Callable[[LatticeArrays], np.ndarray],
    degree: float = 0.0,
    z_abs: float = 0.0,
    scale: float = 1.0,
    growth: tuple[float, float] = (0.0, 1.0),
) -> tuple[np.ndarray, float, int]:
    """
    向量化版本：terms 返回 (点数 z, 格点数) 的二维数组，逐行求和

    Returns:
        (逐行和, 尾项上界, 壳层数)
    """
    K, bound = select_shells(lat, policy, degree, z_abs, scale, growth)
    values = _checked(np.atleast_2d(terms(lattice_arrays(lat, K))))
    return compensated_row_sums(values), bound, K


def _checked(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    if not np.all(np.isfinite(values)):
        raise NumericalConsistencyError("格点求和出现非有限项")
    return values
