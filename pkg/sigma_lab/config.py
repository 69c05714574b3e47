"""
配置加载模块

从 config.yaml 加载配置，支持环境变量覆盖（前缀 SIGMA_LAB_，也读取 .env）
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional

import yaml
from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from .models.lattice import Lattice, TruncationPolicy
from .models.enums import OutputFormat

logger = logging.getLogger(__name__)


class TruncationConfig(BaseModel):
    """截断配置"""
    max_shell: int = Field(default=12, ge=0, description="Gauss 加权求和的壳层上限")
    series_shell: int = Field(default=24, ge=4, description="幂律求和的壳层数（另加解析尾项）")
    target_tol: float = Field(default=1e-10, gt=0)

    def to_policy(self) -> TruncationPolicy:
        return TruncationPolicy(
            max_shell=self.max_shell,
            series_shell=self.series_shell,
            target_tol=self.target_tol,
        )


class QuadratureConfig(BaseModel):
    """求积配置"""
    order: int = Field(default=32, ge=2, description="每轴 Gauss-Hermite 节点数")
    trace_grid: int = Field(default=64, ge=1, description="胞腔中点网格边长")


class TaylorConfig(BaseModel):
    """系数表配置"""
    r_max: int = Field(default=6, ge=0, description="审计中比较的 𝒲_r 最高阶")
    table_r_max: int = Field(default=12, ge=0, description="table 命令输出的最高 r")


def _default_panel() -> Dict[str, List[float]]:
    return {
        "square": [1.0, 0.0, 0.0, 1.0],
        "hexagonal": [1.0, 0.0, 0.5, 0.8660254037844386],
        "generic": [1.0, 0.0, 0.3, 1.2],
        "generic_scaled": [2.0, 0.0, 0.6, 2.4],
    }


class AuditConfig(BaseModel):
    """审计配置"""
    panel: Dict[str, List[float]] = Field(
        default_factory=_default_panel,
        description="格标签 → [ω₁实部, ω₁虚部, ω₂实部, ω₂虚部]",
    )

    def panel_lattices(self) -> Dict[str, Lattice]:
        from .services.lattice import make_lattice

        return {
            label: make_lattice(complex(a, b), complex(c, d))
            for label, (a, b, c, d) in self.panel.items()
        }


class OutputConfig(BaseModel):
    """输出配置"""
    format: OutputFormat = OutputFormat.JSON
    schema_version: str = "1.0"


class LoggingConfig(BaseModel):
    """日志配置"""
    level: str = "INFO"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class AppConfig(BaseModel):
    """应用总配置"""
    truncation: TruncationConfig = Field(default_factory=TruncationConfig)
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)
    taylor: TaylorConfig = Field(default_factory=TaylorConfig)
    audit: AuditConfig = Field(default_factory=AuditConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)


class EnvOverrides(BaseSettings):
    """环境变量覆盖（SIGMA_LAB_*）"""
    model_config = SettingsConfigDict(env_prefix="SIGMA_LAB_", env_file=".env", extra="ignore")

    config: Optional[str] = None
    max_shell: Optional[int] = None
    series_shell: Optional[int] = None
    quad_order: Optional[int] = None
    log_level: Optional[str] = None


_CANDIDATES = ["config.yaml", "config.yml", "config/config.yaml", "config/config.yml"]


def find_config_file(env: Optional[EnvOverrides] = None) -> Optional[Path]:
    """
    查找配置文件
    优先级: 环境变量 > 当前目录 > 项目根目录
    """
    env = env or EnvOverrides()

    # 1. 环境变量指定
    if env.config:
        path = Path(env.config)
        if path.exists():
            return path
        logger.warning(f"⚠️ SIGMA_LAB_CONFIG 指向的文件不存在: {path}")

    # 2. 当前目录
    for name in _CANDIDATES:
        path = Path.cwd() / name
        if path.exists():
            return path

    # 3. 项目根目录（sigma_lab 的父目录）
    project_root = Path(__file__).parent.parent
    for name in _CANDIDATES:
        path = project_root / name
        if path.exists():
            return path

    return None


def load_config(path: Optional[Path] = None) -> AppConfig:
    """
    加载配置文件

    配置优先级: 环境变量 > 配置文件 > 默认值（命令行参数在 main 中再覆盖一层）

    Args:
        path: 显式指定的配置文件；为 None 时按 find_config_file 查找

    Raises:
        OSError: 显式指定的文件无法读取
        pydantic.ValidationError: 配置值非法
    """
    env = EnvOverrides()
    config_path = Path(path) if path is not None else find_config_file(env)

    if config_path is None:
        logger.debug("未找到配置文件，使用默认值")
        raw_config = {}
    else:
        logger.debug(f"📄 加载配置文件: {config_path}")
        with open(config_path, "r", encoding="utf-8") as f:
            raw_config = yaml.safe_load(f) or {}

    # 环境变量覆盖（优先级高于文件）
    if env.max_shell is not None:
        raw_config.setdefault("truncation", {})["max_shell"] = env.max_shell
    if env.series_shell is not None:
        raw_config.setdefault("truncation", {})["series_shell"] = env.series_shell
    if env.quad_order is not None:
        raw_config.setdefault("quadrature", {})["order"] = env.quad_order
    if env.log_level:
        raw_config.setdefault("logging", {})["level"] = env.log_level.upper()

    return AppConfig(**raw_config)


# 全局配置实例
_config: Optional[AppConfig] = None


def get_config() -> AppConfig:
    """
    获取全局配置实例（单例模式）
    """
    global _config
    if _config is None:
        _config = load_config()
    return _config


def reload_config(path: Optional[Path] = None) -> AppConfig:
    """
    重新加载配置
    """
    global _config
    _config = load_config(path)
    return _config
