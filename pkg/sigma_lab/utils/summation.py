"""
求和工具

所有 Γ 求和统一走 math.fsum（正确舍入的精确求和），
结果与求和顺序无关，因此跨运行逐位可复现。
"""

import math
from typing import Iterable, Union

import numpy as np


ArrayLike = Union[np.ndarray, Iterable[complex]]


def compensated_sum(values: ArrayLike) -> complex:
    """
    复数的补偿求和（实部、虚部分别 fsum）

    Examples:
        >>> compensated_sum([1e16, 1.0, -1e16])
        (1+0j)
    """
    arr = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(arr.real.tolist()), math.fsum(arr.imag.tolist()))


def compensated_row_sums(matrix: np.ndarray) -> np.ndarray:
    """二维数组逐行补偿求和"""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
    return np.array([compensated_sum(row) for row in matrix], dtype=complex)


def abs_sum(values: ArrayLike) -> float:
    """Σ|项|，用作条件数尺度"""
    return math.fsum(np.abs(np.asarray(values, dtype=complex)).ravel().tolist())


def int_power(values: ArrayLike, k: int) -> np.ndarray:
    """
    逐元素整数幂（二进制幂，纯乘法）

    (−x)^k 与 x^k 逐位互为 ±，γ ↔ −γ 配对因此精确抵消。
    """
    if k < 0:
        raise ValueError(f"指数必须非负: {k}")
    base = np.asarray(values, dtype=complex)
    result = np.ones_like(base)
    while k:
        if k & 1:
            result = result * base
        k >>= 1
        if k:
            base = base * base
    return result
