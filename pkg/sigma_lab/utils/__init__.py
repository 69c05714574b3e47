"""
工具模块
"""

from .summation import abs_sum, compensated_row_sums, compensated_sum, int_power
from .shell_tail import power_sum_tail
from .report_formatter import FormattedReport, ReportFormatter, encode, flatten_row

__all__ = [
    # 求和
    "abs_sum",
    "compensated_row_sums",
    "compensated_sum",
    "int_power",
    "power_sum_tail",
    # 报告
    "FormattedReport",
    "ReportFormatter",
    "encode",
    "flatten_row",
]
