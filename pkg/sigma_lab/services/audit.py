"""
格点和恒等式审计服务

规范性检查（计入退出码）：三路 𝒲_r 比较、σ 重构与再生、μ/g₂/g₃ 的级数与积分形式、
由递推推导出的 Highly/MuID 常数、Perelomov 恒等式、核函数迹、Legendre 关系、
θ_W 导出的 Eisenstein 级数。

发现类检查（不影响退出码）：已发表的 Highly/MuID 常数、σ 低阶系数、P_n 多项式，
以及比值恒定性元检查。
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Optional

import numpy as np

from ..exceptions import SigmaLabError
from ..models.enums import CheckStyle, Verdict
from ..models.lattice import Lattice, TruncationPolicy
from ..models.results import EllipticInvariants, IdentityReport
from .classical import invariants, sigma_reduced
from .eisen_theta import check_printed_pn, division_residual, x_sequence, y_sequence
from .hermite import (
    double_factorial_odd,
    g2_series,
    g3_series,
    hermite_gauss_sum,
    moment_sum,
    mu_series,
    perelomov_sum,
    sigma_from_theta,
    w_r_series_route,
)
from .quad import (
    QuadratureRule,
    build_rule,
    g2_g3_integral_route,
    kernel_trace,
    sigma_reproduce,
    w_r_integral_route,
)
from .report import make_report, normative_ok
from .taylor import (
    CoeffTable,
    build_coeff_table,
    printed_sigma_coefficients,
    sigma_coefficient_polynomial,
    w_r_polynomial,
    w_r_value,
)

logger = logging.getLogger(__name__)


# ============ 容差 ============

SERIES_ROUTE_TOL = 1e-6
INTEGRAL_ROUTE_TOL = 1e-4
# 积分路线只在 r ≤ 5 计入规范性检查（更高阶受求积精度限制）
INTEGRAL_ROUTE_MAX_R = 5
RECONSTRUCTION_TOL = {True: 1e-7, False: 1e-6}  # 键：μ 是否为 0
REPRODUCTION_TOL = 1e-5
MU_ZERO_TOL = 1e-8
MU_RATIO_TOL = 1e-6
SG_TOL = 1e-6
IG_TOL = 1e-4
HIGHLY_TOL = 1e-6
PERELOMOV_TOL = 1e-10
PERELOMOV_K_MAX = 12
TRACE_TOL = 1e-5
LEGENDRE_TOL = 1e-9
EISEN_THETA_TOL = 1e-4
RATIO_CONSTANCY_TOL = 1e-4
# 噪声底（相对于 Σ|项| 乘积或 ν 的相应幂次）
PRODUCT_NOISE = 1e-9
SERIES_NOISE = 1e-8
INTEGRAL_NOISE = 1e-5
MU_ZERO_RTOL = 1e-9

IG_WEIGHT_NOTE = "Gauss 因子印作 e^{+ν|w|²}（发散），按 e^{−ν|w|²} 计算"


# ============ 常数推导 ============

@dataclass(frozen=True)
class ProductIdentity:
    """形如 S_a·S_b = κ·S_c·S_d 的恒等式"""
    identity_id: str
    lhs: tuple[int, int]
    rhs: tuple[int, int]
    printed: Fraction
    oracle: Fraction


def _pochhammer_three_halves(r: int) -> Fraction:
    return math.prod((Fraction(3, 2) + k for k in range(r)), start=Fraction(1))


@lru_cache(maxsize=1)
def derive_product_identities() -> tuple[ProductIdentity, ...]:
    """
    由递推多项式推导 Highly1–3 与 MuID1–3 的常数

    𝒲₄ = k₄·𝒲₂²、𝒲₅ = k₅·𝒲₂𝒲₃，𝒲_r = c_r·B_r/B₀；
    μ = 0 时 B_r = d_r·M_r，d_r = (ν²/2)^r/(3/2)_r（ν 的幂次在比值中消去）。
    """
    table = build_coeff_table(6)
    w = {r: w_r_polynomial(table, r) for r in (2, 3, 4, 5)}
    k4 = w[4].coefficient(2, 0) / w[2].coefficient(1, 0) ** 2
    k5 = w[5].coefficient(1, 1) / (w[2].coefficient(1, 0) * w[3].coefficient(0, 1))
    c = {r: Fraction(double_factorial_odd(r)) for r in range(6)}
    p = {r: _pochhammer_three_halves(r) for r in range(6)}

    highly1 = c[4] / (k4 * c[2] ** 2)
    highly2 = c[5] / (k5 * c[2] * c[3])
    highly3 = (k4 / k5) * c[2] * c[5] / (c[3] * c[4])

    def to_moments(kappa: Fraction, lhs: tuple[int, int], rhs: tuple[int, int]) -> Fraction:
        # B_a·B_b = κ·B_c·B_d  ⇒  M_a·M_b = κ·(p_a·p_b)/(p_c·p_d)·M_c·M_d
        return kappa * p[lhs[0]] * p[lhs[1]] / (p[rhs[0]] * p[rhs[1]])

    return (
        ProductIdentity("Highly1", (2, 2), (0, 4), Fraction(7, 15), highly1),
        ProductIdentity("Highly2", (2, 3), (0, 5), Fraction(-11, 10), highly2),
        ProductIdentity("Highly3", (3, 4), (2, 5), Fraction(-33, 14), highly3),
        ProductIdentity("MuID1", (2, 2), (0, 4), Fraction(1, 11), to_moments(highly1, (2, 2), (0, 4))),
        ProductIdentity("MuID2", (2, 3), (0, 5), Fraction(-1, 6), to_moments(highly2, (2, 3), (0, 5))),
        ProductIdentity("MuID3", (3, 4), (2, 5), Fraction(-3, 2), to_moments(highly3, (3, 4), (2, 5))),
    )


# ============ 单项审计 ============

def _mu_is_zero(lat: Lattice, inv: EllipticInvariants) -> bool:
    return abs(inv.mu) <= MU_ZERO_RTOL * lat.nu


def audit_mu(lat: Lattice, policy: TruncationPolicy, label: str = "") -> IdentityReport:
    """μ 的级数形式 −(ν²/3)·M₁/M₀ 与线性方程组的 μ 比较"""
    inv = invariants(lat, policy)
    series = mu_series(lat, policy)
    if _mu_is_zero(lat, inv):
        return make_report("MuModular1", label, series, inv.mu, MU_ZERO_TOL)
    return make_report("MuModular1", label, series, inv.mu, MU_RATIO_TOL, CheckStyle.RATIO)


def audit_g2_g3(
    lat: Lattice,
    inv: EllipticInvariants,
    policy: TruncationPolicy,
    rule: QuadratureRule,
    label: str = "",
) -> list[IdentityReport]:
    """Sg2、Sg3（级数）与 Ig2、Ig3（积分）对 Eisenstein 求和的 g₂、g₃"""
    nu = lat.nu
    ig2, ig3 = g2_g3_integral_route(lat, inv, rule, policy)
    return [
        make_report("Sg2", label, g2_series(lat, inv, policy), inv.g2, SG_TOL,
                    CheckStyle.RATIO, noise_floor=SERIES_NOISE * nu ** 2),
        make_report("Sg3", label, g3_series(lat, inv, policy), inv.g3, SG_TOL,
                    CheckStyle.RATIO, noise_floor=SERIES_NOISE * nu ** 3),
        make_report("Ig2", label, ig2, inv.g2, IG_TOL, CheckStyle.RATIO,
                    noise_floor=INTEGRAL_NOISE * nu ** 2, note=IG_WEIGHT_NOTE),
        make_report("Ig3", label, ig3, inv.g3, IG_TOL, CheckStyle.RATIO,
                    noise_floor=INTEGRAL_NOISE * nu ** 3, note=IG_WEIGHT_NOTE),
    ]


def _product_reports(
    identity: ProductIdentity,
    blocks: dict,
    label: str,
    out_of_scope: Optional[str] = None,
) -> list[IdentityReport]:
    """同一恒等式的两条记录：已发表常数（发现）与推导常数（规范）"""
    (a, b), (c, d) = identity.lhs, identity.rhs
    lhs = blocks[a].value * blocks[b].value
    base = blocks[c].value * blocks[d].value
    floor = PRODUCT_NOISE * max(
        blocks[a].abs_sum * blocks[b].abs_sum, blocks[c].abs_sum * blocks[d].abs_sum
    )
    reports = []
    for suffix, constant, normative in (
        ("", identity.printed, False),
        (".oracle", identity.oracle, True),
    ):
        note = f"constant {constant}"
        if out_of_scope:
            reports.append(make_report(
                identity.identity_id + suffix, label, lhs, float(constant) * base, HIGHLY_TOL,
                CheckStyle.RATIO, noise_floor=math.inf, normative=normative,
                note=f"{note}; {out_of_scope}",
            ))
            continue
        reports.append(make_report(
            identity.identity_id + suffix, label, lhs, float(constant) * base, HIGHLY_TOL,
            CheckStyle.RATIO, noise_floor=floor * max(1.0, abs(float(constant))),
            normative=normative, note=note,
        ))
    return reports


def audit_highly(
    lat: Lattice, inv: EllipticInvariants, policy: TruncationPolicy, label: str = ""
) -> list[IdentityReport]:
    """Highly1–3：B_r = Σμ^r F(−r;3/2;·)·e_χ^ν 的乘积恒等式"""
    blocks = {r: hermite_gauss_sum(lat, inv, r, policy) for r in range(6)}
    reports = []
    for identity in derive_product_identities():
        if identity.identity_id.startswith("Highly"):
            reports.extend(_product_reports(identity, blocks, label))
    return reports


def audit_muid(
    lat: Lattice, policy: TruncationPolicy, label: str = ""
) -> list[IdentityReport]:
    """MuID1–3：M_k = Σconj(γ)^{2k}·e_χ^ν 的乘积恒等式（仅 μ = 0 的格适用）"""
    inv = invariants(lat, policy)
    blocks = {k: moment_sum(lat, k, policy) for k in range(6)}
    scope = None if _mu_is_zero(lat, inv) else "μ ≠ 0，超出适用范围"
    reports = []
    for identity in derive_product_identities():
        if identity.identity_id.startswith("MuID"):
            reports.extend(_product_reports(identity, blocks, label, out_of_scope=scope))
    return reports


def _cell_points(lat: Lattice, coords: Iterable[float]) -> np.ndarray:
    coords = list(coords)
    return np.array([s * lat.omega1 + t * lat.omega2 for s in coords for t in coords])


def _worst_ratio_report(identity_id, label, lhs, rhs, tol) -> IdentityReport:
    """逐点相对误差中最差的一点生成记录"""
    errors = np.abs(lhs / rhs - 1)
    worst = int(np.argmax(errors))
    return make_report(identity_id, label, lhs[worst], rhs[worst], tol, CheckStyle.RATIO,
                       note=f"worst of {lhs.size} points")


def audit_theorem1(
    lat: Lattice,
    policy: TruncationPolicy,
    rule: QuadratureRule,
    r_max: int,
    label: str = "",
) -> list[IdentityReport]:
    """三路 𝒲_r 比较与 σ 的重构/再生"""
    inv = invariants(lat, policy)
    table = build_coeff_table(max(r_max, 12))
    reports = []
    for r in range(r_max + 1):
        recursion = w_r_value(w_r_polynomial(table, r), inv)
        series = w_r_series_route(lat, inv, r, policy)
        integral = w_r_integral_route(lat, inv, rule, r, policy)
        scale = max(1.0, abs(recursion))
        in_scope = r <= INTEGRAL_ROUTE_MAX_R
        reports.append(make_report(f"W{r}.series", label, series, recursion, SERIES_ROUTE_TOL * scale))
        reports.append(make_report(
            f"W{r}.integral", label, integral, recursion, INTEGRAL_ROUTE_TOL * scale,
            normative=in_scope, note="" if in_scope else "quadrature-limited",
        ))
        reports.append(make_report(
            f"W{r}.series_integral", label, series, integral, INTEGRAL_ROUTE_TOL * scale,
            normative=in_scope, note="" if in_scope else "quadrature-limited",
        ))

    grid = _cell_points(lat, (0.1, 0.3, 0.5, 0.7, 0.9))
    reconstructed = sigma_from_theta(lat, inv, grid, policy)
    classical = sigma_reduced(lat, grid, policy, inv)
    tol = RECONSTRUCTION_TOL[_mu_is_zero(lat, inv)]
    reports.append(_worst_ratio_report("Identity10", label, reconstructed, classical, tol))

    points = _cell_points(lat, (0.15, 0.3, 0.45))
    reproduced = np.array([sigma_reproduce(lat, inv, rule, z, policy) for z in points])
    reports.append(_worst_ratio_report(
        "RepKer25", label, reproduced, sigma_reduced(lat, points, policy, inv), REPRODUCTION_TOL
    ))
    return reports


def audit_perelomov(lat: Lattice, policy: TruncationPolicy, label: str = "") -> list[IdentityReport]:
    """Σχ(γ)·γ^k·e^{−ν|γ|²/2} = 0，k = 0..12"""
    reports = []
    for k in range(PERELOMOV_K_MAX + 1):
        result = perelomov_sum(lat, k, policy)
        tol = max(PERELOMOV_TOL, 1e-14 * result.abs_sum)
        reports.append(make_report(f"Identity3.k{k:02d}", label, result.value, 0, tol))
    return reports


def audit_trace(lat: Lattice, policy: TruncationPolicy, grid: int = 64, label: str = "") -> IdentityReport:
    return make_report("Trace", label, kernel_trace(lat, policy, grid), 1.0, TRACE_TOL)


def audit_legendre(lat: Lattice, inv: EllipticInvariants, label: str = "") -> IdentityReport:
    lhs = inv.eta1 * lat.omega2 - inv.eta2 * lat.omega1
    return make_report("Legendre", label, lhs, 2j * math.pi, LEGENDRE_TOL)


def audit_pn(
    lat: Lattice, inv: EllipticInvariants, policy: TruncationPolicy, label: str = ""
) -> list[IdentityReport]:
    """θ_W 导出的 μ、G_{2n} 与直接求和比较；已发表的 P_n 作为发现"""
    x = x_sequence(lat, policy, 6)
    y = y_sequence(x)
    nu = lat.nu
    reports = [
        make_report("Zeta51", label, -2 * x.values[1], inv.mu, MU_ZERO_TOL * max(1.0, nu)),
        make_report("Zeta5.division", label, division_residual(x, y), 0,
                    1e-12 * max(1.0, max(abs(v) for v in y.values))),
    ]
    for n in range(2, 7):
        reports.append(make_report(
            f"G{2 * n}.theta", label, -y.values[n], inv.G[2 * n], EISEN_THETA_TOL,
            CheckStyle.RATIO, noise_floor=SERIES_NOISE * nu ** n,
        ))
    reports.extend(check_printed_pn(x, label))
    return reports


def audit_taylor_printed(table: Optional[CoeffTable] = None) -> list[IdentityReport]:
    """已发表的 σ 低阶系数与递推比较（精确有理数）"""
    table = table or build_coeff_table(12)
    reports = []
    for r, printed in printed_sigma_coefficients().items():
        derived = sigma_coefficient_polynomial(table, r)
        for (i, j) in sorted(set(printed.terms) | set(derived.terms)):
            lhs, rhs = printed.coefficient(i, j), derived.coefficient(i, j)
            note = f"printed {lhs}, recursion {rhs}"
            reports.append(make_report(
                f"Coeff.z{2 * r + 1}.g2^{i}g3^{j}", "exact", float(lhs), float(rhs), 0.0,
                normative=False, note=note if lhs != rhs else "",
            ))
    return reports


def ratio_constancy(reports: Iterable[IdentityReport]) -> list[IdentityReport]:
    """
    已发表常数与推导常数不符的恒等式：LHS/RHS 比值在格组上应恒定

    比值恒定说明是常数层面的笔误而非结构性错误。
    """
    reports = list(reports)
    mismatched = [p.identity_id for p in derive_product_identities() if p.printed != p.oracle]
    out = []
    for identity_id in mismatched:
        ratios = [
            r.ratio.to_complex() for r in reports
            if r.identity_id == identity_id and r.verdict is not Verdict.INDETERMINATE and r.ratio
        ]
        if not ratios:
            out.append(make_report(
                f"{identity_id}.ratio_constancy", "panel", 0, 0, RATIO_CONSTANCY_TOL,
                CheckStyle.RATIO, noise_floor=math.inf, normative=False,
                note="no determinate lattice",
            ))
            continue
        mean = complex(np.mean(ratios))
        farthest = max(ratios, key=lambda q: abs(q - mean))
        out.append(make_report(
            f"{identity_id}.ratio_constancy", "panel", farthest, mean,
            RATIO_CONSTANCY_TOL * abs(mean), normative=False,
            note=f"{len(ratios)} determinate lattice(s)",
        ))
    return out


# ============ 审计服务 ============

class AuditService:
    """
    审计服务

    对一组格运行全部检查，按 (identity_id, lattice_label) 排序输出。
    """

    def __init__(
        self,
        policy: Optional[TruncationPolicy] = None,
        quad_order: int = 32,
        r_max: int = 6,
        trace_grid: int = 64,
    ):
        self.policy = policy or TruncationPolicy()
        self.quad_order = quad_order
        self.r_max = r_max
        self.trace_grid = trace_grid

    def _guarded(self, check_id: str, label: str, fn: Callable[[], list]) -> list[IdentityReport]:
        try:
            return fn()
        except SigmaLabError as e:
            logger.warning(f"⚠️ {label}/{check_id} 失败: {e}")
            return [make_report(check_id, label, math.nan, 0, 0.0, note=f"error: {e}")]

    def run_lattice(self, label: str, lat: Lattice) -> list[IdentityReport]:
        policy = self.policy
        logger.info(f"🔍 审计格 {label} {lat.label()}")
        inv = invariants(lat, policy)
        rule = build_rule(lat.nu, self.quad_order)
        checks: list[tuple[str, Callable[[], list]]] = [
            ("Routes", lambda: audit_theorem1(lat, policy, rule, self.r_max, label)),
            ("MuModular1", lambda: [audit_mu(lat, policy, label)]),
            ("G2G3", lambda: audit_g2_g3(lat, inv, policy, rule, label)),
            ("Highly", lambda: audit_highly(lat, inv, policy, label)),
            ("MuID", lambda: audit_muid(lat, policy, label)),
            ("Identity3", lambda: audit_perelomov(lat, policy, label)),
            ("Trace", lambda: [audit_trace(lat, policy, self.trace_grid, label)]),
            ("Legendre", lambda: [audit_legendre(lat, inv, label)]),
            ("Zeta5", lambda: audit_pn(lat, inv, policy, label)),
        ]
        reports = []
        for check_id, fn in checks:
            reports.extend(self._guarded(check_id, label, fn))
        return reports

    def run_panel(self, panel: dict[str, Lattice]) -> list[IdentityReport]:
        reports = []
        for label, lat in panel.items():
            reports.extend(self.run_lattice(label, lat))
        reports.extend(ratio_constancy(reports))
        reports.extend(audit_taylor_printed())
        reports.sort(key=lambda r: (r.identity_id, r.lattice_label))

        failed = [r for r in reports if r.normative and r.verdict is Verdict.FAILS]
        if failed:
            logger.warning(f"⚠️ {len(failed)} 项规范性检查失败")
        else:
            logger.info(f"✅ 全部规范性检查通过（共 {len(reports)} 条记录）")
        return reports

    @staticmethod
    def normative_ok(reports: Iterable[IdentityReport]) -> bool:
        return normative_ok(reports)


# 全局审计服务实例
_audit_service: Optional[AuditService] = None


def get_audit_service() -> AuditService:
    """获取按全局配置构造的审计服务（单例）"""
    global _audit_service
    if _audit_service is None:
        from ..config import get_config

        config = get_config()
        _audit_service = AuditService(
            policy=config.truncation.to_policy(),
            quad_order=config.quadrature.order,
            r_max=config.taylor.r_max,
            trace_grid=config.quadrature.trace_grid,
        )
    return _audit_service
