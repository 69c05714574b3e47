"""
幂律格点和的解析壳层尾项

壳层 k（sup 范数）上的点落在正方形四条边上：γ = k(a + t·b)，t ∈ [−1, 1]，
步长 1/k。对每条边应用 Euler–Maclaurin 公式（四个角点各被两条边的端点权 ½ 计入一次），
得到

    Σ_{shell k} γ^{−p} = Σ_j C_j · k^{1−p−2j}

于是 shell > K 的尾项为 Σ_j C_j · ζ_H(p−1+2j, K+1)（Hurwitz ζ）。
"""

import logging
import math
from functools import lru_cache

from scipy.special import bernoulli, zeta

from ..exceptions import DivergentSumError
from ..models.lattice import Lattice

logger = logging.getLogger(__name__)


MAX_TERMS = 30
RELATIVE_CUTOFF = 1e-17
_BERNOULLI = bernoulli(2 * MAX_TERMS)


def shell_edges(lat: Lattice) -> tuple[tuple[complex, complex], ...]:
    """四条边的 (a, b)：m = ±k 两条、n = ±k 两条"""
    w1, w2 = lat.omega1, lat.omega2
    return ((w1, w2), (-w1, w2), (w2, w1), (-w2, w1))


def em_coefficient(edges: tuple[tuple[complex, complex], ...], p: int, j: int) -> complex:
    """壳层展开系数 C_j"""
    if j == 0:
        return sum(
            ((a + b) ** (1 - p) - (a - b) ** (1 - p)) / ((1 - p) * b)
            for a, b in edges
        )
    q = 2 * j - 1
    rising = float(math.prod(range(p, p + q)))
    weight = float(_BERNOULLI[2 * j]) / math.factorial(2 * j)
    sign = -1.0 if q % 2 else 1.0
    total = sum(
        b ** q * ((a + b) ** (-p - q) - (a - b) ** (-p - q))
        for a, b in edges
    )
    return weight * sign * rising * total


@lru_cache(maxsize=None)
def power_sum_tail(lat: Lattice, p: int, K: int) -> tuple[complex, float]:
    """
    尾项 T_p(K) = Σ_{max(|m|,|n|) > K} γ^{−p}

    Args:
        lat: 格
        p: 幂次（≥ 3）
        K: 已显式求和的最大壳层

    Returns:
        (尾项值, 误差估计)；奇数 p 的尾项按对称性严格为 0
    """
    if p < 3:
        raise DivergentSumError(f"Σγ^(-{p}) 不绝对收敛")
    if p % 2:
        return 0j, 0.0

    edges = shell_edges(lat)
    total = 0j
    previous = math.inf
    error = 0.0
    for j in range(MAX_TERMS):
        term = em_coefficient(edges, p, j) * float(zeta(p - 1 + 2 * j, K + 1))
        magnitude = abs(term)
        if j > 0 and magnitude > previous:
            # 渐近级数开始发散，截在最小项
            error = previous
            break
        total += term
        previous = magnitude
        if magnitude <= RELATIVE_CUTOFF * abs(total):
            error = magnitude
            break
    else:
        error = previous

    logger.debug(f"T_{p}({K}) = {total:.6e}, err ≈ {error:.2e}")
    return total, error
