"""
Sigma Lab - Weierstrass σ 函数系数实验室

三条独立路线计算 σ 的 Taylor 系数 𝒲_r：
- 经典 Weierstrass 递推（精确有理数）
- Hermite-Gauss 格点级数
- 再生 Gauss 积分
并对格点求和恒等式目录做数值审计。
"""

__version__ = "1.0.0"
