"""
计算结果模型

内部数值结果使用 dataclass（含 complex / numpy 字段），
对外输出的报告使用 Pydantic 模型（JSON 序列化）。
"""

from dataclasses import dataclass, field
from typing import Dict, Optional

from pydantic import BaseModel, Field

from .enums import CheckStyle, Verdict
from .lattice import Lattice


# ============ 内部结果 ============

@dataclass(frozen=True)
class LatticeSumResult:
    """
    Γ 求和结果

    - value: 求和值（幂律求和已加解析尾项修正）
    - tail_estimate: 省略部分模长的上界估计
    - shells_used: 实际使用的壳层数
    - raw_value: 未加尾项修正的截断和（Gauss 求和时与 value 相同）
    - abs_sum: Σ|项|，用作条件数 / 噪声底的尺度
    """
    value: complex
    tail_estimate: float
    shells_used: int
    raw_value: Optional[complex] = None
    abs_sum: float = 0.0


@dataclass(frozen=True, eq=False)
class EllipticInvariants:
    """
    格的椭圆不变量

    g2 = 60·G[4]、g3 = 140·G[6] 按构造严格成立；
    (nu_linear_system, mu) 为线性方程组 ν·conj(ω_j) + μ·ω_j = η_j 的解，
    nu 取精确值 π/S。
    """
    lattice: Lattice
    g2: complex
    g3: complex
    G: Dict[int, complex]
    eta1: complex
    eta2: complex
    mu: complex
    nu: float
    nu_linear_system: complex = 0j
    mu_closed_form: complex = 0j
    legendre_residual: float = 0.0
    G_raw: Dict[int, complex] = field(default_factory=dict)
    G_tail: Dict[int, float] = field(default_factory=dict)


# ============ 对外报告 ============

class ComplexNumber(BaseModel):
    """JSON 中的复数 {re, im}"""
    re: float
    im: float

    @classmethod
    def of(cls, value: complex) -> "ComplexNumber":
        value = complex(value)
        return cls(re=value.real, im=value.imag)

    def to_complex(self) -> complex:
        return complex(self.re, self.im)


class IdentityReport(BaseModel):
    """单条恒等式审计记录"""
    identity_id: str = Field(description="恒等式标识，如 Highly1、MuID1、Sg2")
    lattice_label: str = Field(description="格标签，如 square")
    lhs: ComplexNumber
    rhs: ComplexNumber
    ratio: Optional[ComplexNumber] = Field(default=None, description="rhs ≠ 0 时的 lhs/rhs")
    abs_residual: float
    tol: float
    style: CheckStyle = CheckStyle.ABSOLUTE
    verdict: Verdict
    normative: bool = Field(default=True, description="是否影响退出码")
    note: str = ""
