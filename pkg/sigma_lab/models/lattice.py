"""
格点相关模型

- Lattice: 定向格基 (ω₁, ω₂) 及其派生量 S、ν
- LatticePoint: 单个格点 γ = mω₁ + nω₂
- TruncationPolicy: 格点求和的截断策略
"""

import math
from dataclasses import dataclass

from pydantic import BaseModel, ConfigDict, Field

from ..exceptions import DegenerateLatticeError


# 共线判定的相对阈值
COLLINEAR_RTOL = 1e-14


@dataclass(frozen=True)
class Lattice:
    """
    定向格 Γ = ℤω₁ + ℤω₂

    构造时要求 Im(ω₂/ω₁) > 0；需要自动交换基向量时使用
    services.lattice.make_lattice。
    """
    omega1: complex
    omega2: complex

    def __post_init__(self):
        object.__setattr__(self, "omega1", complex(self.omega1))
        object.__setattr__(self, "omega2", complex(self.omega2))
        if self.omega1 == 0 or self.omega2 == 0:
            raise DegenerateLatticeError("格基向量不能为零")
        area = (self.omega1.conjugate() * self.omega2).imag
        if abs(area) <= COLLINEAR_RTOL * abs(self.omega1) * abs(self.omega2):
            raise DegenerateLatticeError(
                f"格基共线: ω₁={self.omega1}, ω₂={self.omega2}"
            )
        if area < 0:
            raise DegenerateLatticeError(
                f"格基未定向 (Im(ω₂/ω₁) < 0): ω₁={self.omega1}, ω₂={self.omega2}"
            )

    @property
    def cell_area(self) -> float:
        """基本胞腔面积 S = Im(conj(ω₁)·ω₂)"""
        return (self.omega1.conjugate() * self.omega2).imag

    @property
    def nu(self) -> float:
        """ν = π/S"""
        return math.pi / self.cell_area

    @property
    def tau(self) -> complex:
        return self.omega2 / self.omega1

    def point(self, m: int, n: int) -> "LatticePoint":
        return LatticePoint(m=m, n=n, gamma=m * self.omega1 + n * self.omega2)

    def coordinates(self, z: complex) -> tuple[float, float]:
        """
        实坐标 (s, t)，满足 z = s·ω₁ + t·ω₂

        Examples:
            >>> Lattice(1, 1j).coordinates(0.5 + 2j)
            (0.5, 2.0)
        """
        z = complex(z)
        area = self.cell_area
        s = (z.conjugate() * self.omega2).imag / area
        t = (self.omega1.conjugate() * z).imag / area
        return s, t

    def label(self) -> str:
        return f"({self.omega1:g}, {self.omega2:g})"


@dataclass(frozen=True)
class LatticePoint:
    """格点 γ = m·ω₁ + n·ω₂"""
    m: int
    n: int
    gamma: complex

    @property
    def chi(self) -> int:
        """Weierstrass 伪特征 χ_W：m、n 均为偶数时 +1，否则 −1"""
        return 1 if (self.m % 2 == 0 and self.n % 2 == 0) else -1

    @property
    def shell(self) -> int:
        return max(abs(self.m), abs(self.n))


class TruncationPolicy(BaseModel):
    """
    格点求和截断策略

    - max_shell: Gauss 加权求和的最大壳层（max(|m|,|n|) ≤ max_shell）
    - target_tol: 请求的绝对尾项上界；尾项估计低于 target_tol/10 时提前停止
    - series_shell: 幂律求和（σ 乘积、ζ、G_{2n}）的壳层数，尾项由解析修正补全
    """
    model_config = ConfigDict(frozen=True)

    max_shell: int = Field(default=12, ge=0, description="Gauss 加权求和最大壳层")
    target_tol: float = Field(default=1e-10, gt=0, description="绝对尾项容差")
    series_shell: int = Field(default=24, ge=4, description="幂律求和壳层数")
