"""
枚举类型

包含：
- Verdict: 恒等式审计结论
- CheckStyle: 比较方式（绝对残差 / 比值）
- OutputFormat: 报告输出格式
"""

from enum import Enum


# ============================================================
# 枚举类型
# ============================================================

class Verdict(str, Enum):
    """恒等式审计结论"""
    HOLDS = "holds"
    FAILS = "fails"
    INDETERMINATE = "indeterminate"  # 两侧都低于噪声底（对称零）


class CheckStyle(str, Enum):
    """比较方式"""
    ABSOLUTE = "absolute"  # |lhs - rhs| ≤ tol
    RATIO = "ratio"        # |lhs/rhs - 1| ≤ tol


class OutputFormat(str, Enum):
    """报告输出格式"""
    JSON = "json"
    CSV = "csv"
    TEXT = "text"
