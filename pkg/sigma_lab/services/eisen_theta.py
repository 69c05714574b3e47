"""
由 θ_W 在 0 处的导数得到 Eisenstein 级数

X_j = θ_W^{(2j+1)}(0)/((2j+1)!·θ′_W(0))，X₀ = 1
Y_j = 2j·X_j − Σ_{k=1}^{j−1} Y_k·X_{j−k}，Y₀ = 1
Y₁ = −μ，Y_j = −G_{2j}（j ≥ 2）
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable

from ..exceptions import DegenerateNormalizationError, ParameterError
from ..models.enums import CheckStyle
from ..models.lattice import Lattice, TruncationPolicy
from ..models.results import EllipticInvariants, IdentityReport
from ..utils.summation import compensated_sum
from .hermite import moment_sum, theta_w, theta_w_prime
from .report import make_report

logger = logging.getLogger(__name__)


NORMALIZATION_FLOOR = 1e-12
PRINTED_TOL = 1e-10
# 已发表的 G₁₀ 表达式中印作 "z" 的系数按规律取 5
PRINTED_Z55 = 5


@dataclass(frozen=True)
class XSequence:
    values: tuple[complex, ...]
    policy: TruncationPolicy
    shells_used: int = 0


@dataclass(frozen=True)
class YSequence:
    values: tuple[complex, ...]


def x_sequence(lat: Lattice, policy: TruncationPolicy, max_j: int) -> XSequence:
    """
    X_j = (ν^{2j}/(2j+1)!)·M_j/M₀

    Raises:
        DegenerateNormalizationError: M₀ 低于噪声底
    """
    if max_j < 0:
        raise ParameterError(f"max_j 必须非负: {max_j}")
    m0 = moment_sum(lat, 0, policy)
    if abs(m0.value) <= NORMALIZATION_FLOOR * m0.abs_sum:
        raise DegenerateNormalizationError(f"θ′_W(0) 低于噪声底: {m0.value}")
    values = [1 + 0j]
    shells = m0.shells_used
    for j in range(1, max_j + 1):
        mj = moment_sum(lat, j, policy)
        shells = max(shells, mj.shells_used)
        values.append(lat.nu ** (2 * j) / math.factorial(2 * j + 1) * mj.value / m0.value)
    return XSequence(values=tuple(values), policy=policy, shells_used=shells)


def y_sequence(x: XSequence) -> YSequence:
    """幂级数除法 (Σ(2j+1)X_j t^j)/(ΣX_j t^j) 的系数"""
    xs = x.values
    ys = [1 + 0j]
    for j in range(1, len(xs)):
        correction = compensated_sum([ys[k] * xs[j - k] for k in range(1, j)]) if j > 1 else 0j
        ys.append(2 * j * xs[j] - correction)
    return YSequence(values=tuple(ys))


def g2n_from_theta(y: YSequence, n: int) -> complex:
    """G_{2n} = −Y_n"""
    if n < 2 or n >= len(y.values):
        raise ParameterError(f"n={n} 超出范围 [2, {len(y.values) - 1}]")
    return -y.values[n]


def division_residual(x: XSequence, y: YSequence) -> float:
    """max_j |Σ_{k=0}^{j} X_k·Y_{j−k} − (2j+1)·X_j|"""
    xs, ys = x.values, y.values
    size = min(len(xs), len(ys))
    return max(
        abs(compensated_sum([xs[k] * ys[j - k] for k in range(j + 1)]) - (2 * j + 1) * xs[j])
        for j in range(size)
    )


def zeta_from_theta(lat: Lattice, inv: EllipticInvariants, z: complex, policy: TruncationPolicy) -> complex:
    """ζ(z) = μz + θ′_W(z)/θ_W(z)"""
    z = complex(z)
    return inv.mu * z + theta_w_prime(lat, z, policy).value / theta_w(lat, z, policy).value


# ============ 已发表的 P_n ============

def _p2(X):
    return 2 * (X[1] ** 2 - 2 * X[2])


def _p3(X):
    return -2 * (X[1] ** 3 - 3 * X[1] * X[2] + 3 * X[3])


def _p4(X):
    return 2 * (X[1] ** 4 - 4 * X[1] ** 2 * X[2] + 4 * X[1] * X[3] + 2 * X[2] ** 2 - 4 * X[4])


def _p5(X):
    return -2 * (
        X[1] ** 5 - PRINTED_Z55 * X[1] ** 3 * X[2] + 5 * X[1] ** 2 * X[3]
        + 5 * X[1] * X[2] ** 2 - 5 * X[1] * X[4] - 5 * X[2] * X[3] + 5 * X[5]
    )


def _p6(X):
    return 2 * (
        X[1] ** 6 - 3 * X[1] ** 4 * X[2] + 6 * X[1] ** 3 * X[3] + 9 * X[1] ** 2 * X[2] ** 2
        - 6 * X[1] ** 2 * X[4] - 12 * X[1] * X[2] * X[3] + 6 * X[1] * X[5]
        - 2 * X[2] ** 3 + 6 * X[2] * X[4] + 3 * X[3] ** 2 - 6 * X[6]
    )


PRINTED_PN: dict[int, Callable] = {2: _p2, 3: _p3, 4: _p4, 5: _p5, 6: _p6}

PRINTED_PN_NOTES = {
    5: f"X₁³X₂ 的系数印作 z，按 {PRINTED_Z55} 代入",
    6: "X₁⁴X₂ 的系数印作 −3，一般递推给出 −6（X₁ = 0 的格上不可见）",
}


def check_printed_pn(x: XSequence, lattice_label: str = "") -> list[IdentityReport]:
    """已发表的 P_n(X₁..X_n) 与 −Y_n 比较，n = 2..6"""
    if len(x.values) < 7:
        raise ParameterError("需要 X₀..X₆")
    y = y_sequence(x)
    reports = []
    for n, printed in PRINTED_PN.items():
        expected = -y.values[n]
        value = printed(x.values)
        tol = PRINTED_TOL * max(1.0, abs(expected))
        reports.append(make_report(
            identity_id=f"Zeta5{n}",
            lattice_label=lattice_label,
            lhs=value,
            rhs=expected,
            tol=tol,
            style=CheckStyle.ABSOLUTE,
            normative=False,
            note=PRINTED_PN_NOTES.get(n, ""),
        ))
    return reports
