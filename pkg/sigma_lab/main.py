"""
Weierstrass σ 实验室 - 命令行入口

子命令：
    invariants  格的不变量（S、ν、μ、η、g₂、g₃、G₄..G₁₂、Legendre 残差）
    coeffs      𝒲_r 三路比较（递推 / Hermite-Gauss 级数 / Gauss 积分）
    audit       恒等式审计（默认跑配置中的格组）
    table       a_{m,n} 系数表

启动方式：
    python -m sigma_lab.main audit
    python -m sigma_lab.main invariants --lattice 1 0 0 1
    python -m sigma_lab.main table --rmax 12 --format csv

退出码：0 成功，1 规范性检查失败，2 用法错误，3 I/O 错误
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .config import AppConfig, get_config, reload_config
from .exceptions import DegenerateLatticeError, ParameterError, SigmaLabError
from .models.enums import OutputFormat
from .models.lattice import Lattice, TruncationPolicy
from .services.audit import AuditService
from .services.classical import invariants
from .services.hermite import w_r_series_route
from .services.lattice import PRESETS, make_lattice, preset_lattice
from .services.quad import build_rule, w_r_integral_route
from .services.taylor import build_coeff_table, coeff_table_rows, w_r_polynomial, w_r_value
from .utils.report_formatter import ReportFormatter

logger = logging.getLogger(__name__)


EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

CUSTOM_LABEL = "custom"


# ============ 运行配置 ============

class RunConfig(BaseModel):
    """一次命令运行的有效配置（命令行 > 环境变量 > 配置文件 > 默认值）"""
    model_config = ConfigDict(frozen=True)

    lattice: Optional[tuple[float, float, float, float]] = Field(
        default=None, description="(ω₁实部, ω₁虚部, ω₂实部, ω₂虚部)"
    )
    preset: Optional[str] = None
    max_shell: int = Field(default=12, ge=1)
    series_shell: int = Field(default=24, ge=4)
    target_tol: float = Field(default=1e-10, gt=0)
    quad_order: int = Field(default=32, ge=2)
    trace_grid: int = Field(default=64, ge=1)
    r_max: int = Field(default=6, ge=0)
    output_format: OutputFormat = OutputFormat.JSON
    output_path: Optional[Path] = None

    def policy(self) -> TruncationPolicy:
        return TruncationPolicy(
            max_shell=self.max_shell,
            series_shell=self.series_shell,
            target_tol=self.target_tol,
        )

    def resolve_lattice(self) -> Optional[tuple[str, Lattice]]:
        """(标签, 格)；未指定格时返回 None"""
        if self.preset is not None:
            return self.preset, preset_lattice(self.preset)
        if self.lattice is not None:
            a, b, c, d = self.lattice
            return CUSTOM_LABEL, make_lattice(complex(a, b), complex(c, d))
        return None

    def summary(self) -> dict:
        """写入 JSON 报告的配置（不含输出路径）"""
        return self.model_dump(mode="json", exclude={"output_path"})


def resolve_run_config(args: argparse.Namespace, app_config: AppConfig) -> RunConfig:
    """
    合并命令行参数与应用配置

    Raises:
        ValidationError: 参数越界
    """
    if args.format is not None:
        output_format = OutputFormat(args.format)
    elif args.command == "table":
        output_format = OutputFormat.CSV
    else:
        output_format = app_config.output.format

    default_r_max = app_config.taylor.table_r_max if args.command == "table" else app_config.taylor.r_max

    def pick(value, default):
        return default if value is None else value

    return RunConfig(
        lattice=tuple(args.lattice) if args.lattice else None,
        preset=args.preset,
        max_shell=pick(args.max_shell, app_config.truncation.max_shell),
        series_shell=app_config.truncation.series_shell,
        target_tol=pick(args.tol, app_config.truncation.target_tol),
        quad_order=pick(args.quad_order, app_config.quadrature.order),
        trace_grid=app_config.quadrature.trace_grid,
        r_max=pick(args.rmax, default_r_max),
        output_format=output_format,
        output_path=args.out,
    )


# ============ 子命令 ============

def cmd_invariants(config: RunConfig) -> list[dict]:
    """S、ν、μ、η₁、η₂、g₂、g₃、G₄..G₁₂、Legendre 残差"""
    label, lat = config.resolve_lattice()
    inv = invariants(lat, config.policy())
    record = {
        "lattice": label,
        "omega1": lat.omega1,
        "omega2": lat.omega2,
        "S": lat.cell_area,
        "nu": inv.nu,
        "nu_linear_system": inv.nu_linear_system,
        "mu": inv.mu,
        "mu_closed_form": inv.mu_closed_form,
        "eta1": inv.eta1,
        "eta2": inv.eta2,
        "g2": inv.g2,
        "g3": inv.g3,
        "G4_raw": inv.G_raw[4],
        "legendre_residual": inv.legendre_residual,
    }
    for k in sorted(inv.G):
        record[f"G{k}"] = inv.G[k]
    return [record]


def _relative_deviation(a: complex, b: complex) -> float:
    return abs(a - b) / max(1.0, abs(b))


def cmd_coeffs(config: RunConfig) -> list[dict]:
    """每个 r 一行：三路 𝒲_r 及两两相对偏差"""
    label, lat = config.resolve_lattice()
    policy = config.policy()
    inv = invariants(lat, policy)
    table = build_coeff_table(config.r_max)
    rule = build_rule(lat.nu, config.quad_order)
    rows = []
    for r in range(config.r_max + 1):
        recursion = w_r_value(w_r_polynomial(table, r), inv)
        series = w_r_series_route(lat, inv, r, policy)
        integral = w_r_integral_route(lat, inv, rule, r, policy)
        rows.append({
            "lattice": label,
            "r": r,
            "W_recursion": recursion,
            "W_series": series,
            "W_integral": integral,
            "dev_series_recursion": _relative_deviation(series, recursion),
            "dev_integral_recursion": _relative_deviation(integral, recursion),
            "dev_series_integral": _relative_deviation(series, integral),
        })
    return rows


def cmd_audit(config: RunConfig, app_config: AppConfig) -> tuple[list, bool]:
    """全部审计记录与规范性检查是否通过"""
    resolved = config.resolve_lattice()
    panel = dict([resolved]) if resolved else app_config.audit.panel_lattices()
    service = AuditService(
        policy=config.policy(),
        quad_order=config.quad_order,
        r_max=config.r_max,
        trace_grid=config.trace_grid,
    )
    reports = service.run_panel(panel)
    return reports, service.normative_ok(reports)


def cmd_table(config: RunConfig) -> list[dict]:
    """a_{m,n}（2m+3n ≤ r_max）的精确有理数表"""
    rows = coeff_table_rows(build_coeff_table(config.r_max))
    return [
        {"m": m, "n": n, "numerator": num, "denominator": den}
        for m, n, num, den in rows
    ]


# ============ 参数解析 ============

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    lattice_group = common.add_mutually_exclusive_group()
    lattice_group.add_argument(
        "--lattice", nargs=4, type=float, metavar=("W1_RE", "W1_IM", "W2_RE", "W2_IM"),
        help="格基 ω₁、ω₂ 的实部与虚部",
    )
    lattice_group.add_argument("--preset", choices=sorted(PRESETS), help="预设格")
    common.add_argument("--max-shell", type=int, help="Gauss 加权求和的壳层上限")
    common.add_argument("--tol", type=float, help="目标尾项容差")
    common.add_argument("--quad-order", type=int, help="每轴 Gauss-Hermite 节点数")
    common.add_argument("--rmax", type=int, help="最高阶 r")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], help="输出格式")
    common.add_argument("--out", type=Path, help="输出文件（默认标准输出）")
    common.add_argument("--config", type=Path, help="YAML 配置文件")
    common.add_argument(
        "--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="日志级别"
    )

    parser = argparse.ArgumentParser(
        prog="sigma-lab",
        description="Weierstrass σ 函数的 Hermite-Gauss 展开与恒等式审计",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("invariants", parents=[common], help="格不变量")
    subparsers.add_parser("coeffs", parents=[common], help="𝒲_r 三路比较")
    subparsers.add_parser("audit", parents=[common], help="恒等式审计")
    subparsers.add_parser("table", parents=[common], help="a_{m,n} 系数表")
    return parser


def _emit(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path.write_text(text, encoding="utf-8")
    logger.info(f"📄 已写入 {path}")


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        app_config = reload_config(args.config) if args.config else get_config()
    except (OSError, ValidationError) as e:
        print(f"配置错误: {e}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        level=getattr(logging, args.log_level or app_config.logging.level),
        format=app_config.logging.format,
        stream=sys.stderr,
    )

    try:
        config = resolve_run_config(args, app_config)
        if args.command in ("invariants", "coeffs") and config.resolve_lattice() is None:
            parser.print_usage(sys.stderr)
            logger.error(f"❌ {args.command} 需要 --lattice 或 --preset")
            return EXIT_USAGE

        exit_code = EXIT_OK
        if args.command == "invariants":
            results = cmd_invariants(config)
        elif args.command == "coeffs":
            results = cmd_coeffs(config)
        elif args.command == "audit":
            results, ok = cmd_audit(config, app_config)
            exit_code = EXIT_OK if ok else EXIT_CHECK_FAILED
        else:
            results = cmd_table(config)
    except (ValidationError, DegenerateLatticeError, ParameterError) as e:
        logger.error(f"❌ 参数错误: {e}")
        return EXIT_USAGE
    except SigmaLabError as e:
        logger.error(f"❌ 计算失败: {e}")
        return EXIT_CHECK_FAILED

    formatter = ReportFormatter(schema_version=app_config.output.schema_version)
    report = formatter.format(config.output_format, args.command, config.summary(), results)
    try:
        _emit(report.text, config.output_path)
    except OSError as e:
        logger.error(f"❌ 写出失败: {e}")
        return EXIT_IO
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
