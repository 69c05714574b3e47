"""
数据模型定义

模型分类：
- enums.py: 枚举类型
- lattice.py: 格、格点、截断策略
- results.py: 求和结果、椭圆不变量、审计报告
"""

# 枚举类型
from .enums import CheckStyle, OutputFormat, Verdict

# 格相关模型
from .lattice import Lattice, LatticePoint, TruncationPolicy

# 结果模型
from .results import (
    ComplexNumber,
    EllipticInvariants,
    IdentityReport,
    LatticeSumResult,
)

__all__ = [
    # 枚举
    "CheckStyle",
    "OutputFormat",
    "Verdict",
    # 格
    "Lattice",
    "LatticePoint",
    "TruncationPolicy",
    # 结果
    "ComplexNumber",
    "EllipticInvariants",
    "IdentityReport",
    "LatticeSumResult",
]
