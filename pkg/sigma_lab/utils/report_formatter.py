"""
报告格式化器

把命令结果输出为 JSON / CSV / 文本：
- JSON: {schema_version, command, config, results}，复数写作 {"re", "im"}，键排序
- CSV: RFC 4180 风格，首行为表头，复数拆成 <列>_re / <列>_im 两列
- 文本: 对齐的纯文本表格
"""

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Any, Iterable

import numpy as np
from pydantic import BaseModel

from ..models.enums import OutputFormat


@dataclass
class FormattedReport:
    """格式化后的输出"""
    format: OutputFormat
    text: str


def encode(value: Any) -> Any:
    """把复数、numpy 标量、pydantic 模型等转为可 JSON 序列化的结构"""
    if isinstance(value, BaseModel):
        return encode(value.model_dump(mode="json"))
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        return {"re": value.real, "im": value.imag}
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, dict):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    return value


def _is_complex_dict(value: Any) -> bool:
    return isinstance(value, dict) and set(value) == {"re", "im"}


def flatten_row(row: dict) -> dict:
    """单层化：复数拆成两列，嵌套 dict 以 . 连接"""
    flat = {}
    for key, value in encode(row).items():
        if _is_complex_dict(value):
            flat[f"{key}_re"] = value["re"]
            flat[f"{key}_im"] = value["im"]
        elif isinstance(value, dict):
            for sub_key, sub_value in flatten_row(value).items():
                flat[f"{key}.{sub_key}"] = sub_value
        else:
            flat[key] = value
    return flat


class ReportFormatter:
    """
    报告格式化器

    同样的输入总是产生逐字节相同的输出（无时间戳，键排序，浮点用 repr）。
    """

    def __init__(self, schema_version: str = "1.0"):
        self.schema_version = schema_version

    def format(
        self,
        output_format: OutputFormat,
        command: str,
        config: dict,
        results: Iterable[Any],
    ) -> FormattedReport:
        """
        格式化命令结果

        Args:
            output_format: 输出格式
            command: 子命令名
            config: 本次运行的有效配置
            results: 结果行（dict 或 pydantic 模型）

        Returns:
            FormattedReport: 格式化后的输出
        """
        rows = [encode(r) for r in results]
        if output_format is OutputFormat.JSON:
            text = self.format_json(command, config, rows)
        elif output_format is OutputFormat.CSV:
            text = self.format_csv(rows)
        else:
            text = self.format_text(command, rows)
        return FormattedReport(format=output_format, text=text)

    def format_json(self, command: str, config: dict, rows: list) -> str:
        payload = {
            "schema_version": self.schema_version,
            "command": command,
            "config": encode(config),
            "results": rows,
        }
        return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def format_csv(self, rows: list) -> str:
        flat_rows = [flatten_row(r) for r in rows]
        fieldnames: list[str] = []
        for row in flat_rows:
            fieldnames.extend(k for k in row if k not in fieldnames)
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator="\r\n")
        writer.writeheader()
        for row in flat_rows:
            writer.writerow({k: self._cell(v) for k, v in row.items()})
        return buffer.getvalue()

    def format_text(self, command: str, rows: list) -> str:
        flat_rows = [flatten_row(r) for r in rows]
        if not flat_rows:
            return f"{command}: (无结果)\n"
        columns: list[str] = []
        for row in flat_rows:
            columns.extend(k for k in row if k not in columns)
        cells = [[self._cell(row.get(c, "")) for c in columns] for row in flat_rows]
        widths = [max(len(c), *(len(line[i]) for line in cells)) for i, c in enumerate(columns)]
        lines = [
            "  ".join(c.ljust(w) for c, w in zip(columns, widths)),
            "  ".join("-" * w for w in widths),
        ]
        lines.extend("  ".join(v.ljust(w) for v, w in zip(line, widths)) for line in cells)
        return "\n".join(lines) + "\n"

    @staticmethod
    def _cell(value: Any) -> str:
        if isinstance(value, float):
            return "nan" if math.isnan(value) else repr(value)
        if value is None:
            return ""
        if isinstance(value, bool):
            return "true" if value else "false"
        return str(value)
