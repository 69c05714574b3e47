"""
审计记录构造

所有检查统一通过 make_report 生成 IdentityReport：
- ABSOLUTE：|lhs − rhs| ≤ tol
- RATIO：|lhs/rhs − 1| ≤ tol；两侧都低于噪声底时为 indeterminate（对称零）
"""

from typing import Iterable

from ..models.enums import CheckStyle, Verdict
from ..models.results import ComplexNumber, IdentityReport


SYMMETRIC_ZERO_NOTE = "symmetric zero"


def make_report(
    identity_id: str,
    lattice_label: str,
    lhs: complex,
    rhs: complex,
    tol: float,
    style: CheckStyle = CheckStyle.ABSOLUTE,
    noise_floor: float = 0.0,
    normative: bool = True,
    note: str = "",
) -> IdentityReport:
    """
    创建审计记录

    Args:
        identity_id: 恒等式标识
        lattice_label: 格标签
        lhs / rhs: 两侧数值
        tol: 容差（含义随 style）
        style: 比较方式
        noise_floor: RATIO 检查的噪声底
        normative: 是否计入退出码
        note: 备注
    """
    lhs, rhs = complex(lhs), complex(rhs)
    residual = abs(lhs - rhs)
    ratio = lhs / rhs if rhs != 0 else None

    if style is CheckStyle.RATIO and max(abs(lhs), abs(rhs)) <= noise_floor:
        verdict = Verdict.INDETERMINATE
        note = f"{note}; {SYMMETRIC_ZERO_NOTE}" if note else SYMMETRIC_ZERO_NOTE
    elif style is CheckStyle.RATIO:
        ok = ratio is not None and abs(ratio - 1) <= tol
        verdict = Verdict.HOLDS if ok else Verdict.FAILS
    else:
        verdict = Verdict.HOLDS if residual <= tol else Verdict.FAILS

    return IdentityReport(
        identity_id=identity_id,
        lattice_label=lattice_label,
        lhs=ComplexNumber.of(lhs),
        rhs=ComplexNumber.of(rhs),
        ratio=ComplexNumber.of(ratio) if ratio is not None else None,
        abs_residual=residual,
        tol=tol,
        style=style,
        verdict=verdict,
        normative=normative,
        note=note,
    )


def normative_ok(reports: Iterable[IdentityReport]) -> bool:
    """规范性检查全部未失败（indeterminate 不算失败）"""
    return all(r.verdict is not Verdict.FAILS for r in reports if r.normative)
