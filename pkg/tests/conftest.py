"""共享 fixture：格组、默认截断策略、不变量、求积规则"""

import pytest

from sigma_lab.models import TruncationPolicy
from sigma_lab.services.classical import invariants
from sigma_lab.services.lattice import preset_lattice
from sigma_lab.services.quad import build_rule

# 验收用格组（generic_scaled 只用于尺度行为）
PANEL = ("square", "hexagonal", "generic")


@pytest.fixture(scope="session")
def policy():
    return TruncationPolicy()


@pytest.fixture(scope="session")
def square():
    return preset_lattice("square")


@pytest.fixture(scope="session")
def hexagonal():
    return preset_lattice("hexagonal")


@pytest.fixture(scope="session")
def generic():
    return preset_lattice("generic")


@pytest.fixture(scope="session")
def generic_scaled():
    return preset_lattice("generic_scaled")


@pytest.fixture(scope="session", params=PANEL)
def panel_lattice(request):
    return request.param, preset_lattice(request.param)


@pytest.fixture(scope="session")
def square_inv(square, policy):
    return invariants(square, policy)


@pytest.fixture(scope="session")
def hexagonal_inv(hexagonal, policy):
    return invariants(hexagonal, policy)


@pytest.fixture(scope="session")
def generic_inv(generic, policy):
    return invariants(generic, policy)


@pytest.fixture(scope="session")
def square_rule(square):
    return build_rule(square.nu, 32)


@pytest.fixture(scope="session")
def generic_rule(generic):
    return build_rule(generic.nu, 32)


@pytest.fixture
def fresh_config(monkeypatch, tmp_path):
    """隔离的工作目录与全局配置（不读取当前目录的 config.yaml / .env）"""
    import sigma_lab.config as config_module

    for name in ("CONFIG", "MAX_SHELL", "SERIES_SHELL", "QUAD_ORDER", "LOG_LEVEL"):
        monkeypatch.delenv(f"SIGMA_LAB_{name}", raising=False)
    monkeypatch.chdir(tmp_path)
    monkeypatch.setattr(config_module, "_config", None)
    return tmp_path
