"""
异常定义

所有业务异常继承自 SigmaLabError，同时继承对应的内置异常类型，
便于调用方按内置类型捕获。
"""


class SigmaLabError(Exception):
    """Sigma Lab 异常基类"""


class DegenerateLatticeError(SigmaLabError, ValueError):
    """格基退化（共线或零向量）或未定向"""


class PoleError(SigmaLabError, ZeroDivisionError):
    """在格点上求值 ζ（极点）"""


class DivergentSumError(SigmaLabError, ValueError):
    """发散的格点求和（Eisenstein 阶数 n < 2）"""


class ParameterError(SigmaLabError, ValueError):
    """参数不受支持或越界"""


class TableExhaustedError(SigmaLabError, LookupError):
    """请求的 r 超出系数表范围"""


class DegenerateNormalizationError(SigmaLabError, ArithmeticError):
    """归一化因子（ℋ₀ / θ′_W(0)）低于噪声底"""


class NumericalConsistencyError(SigmaLabError, ArithmeticError):
    """数值自洽性检查失败（ν 与 π/S 不符、求和项溢出等）"""
