"""
服务层包
"""

from .audit import AuditService, derive_product_identities, get_audit_service
from .classical import invariants, sigma_product, sigma_reduced, zeta_series, eisenstein
from .eisen_theta import x_sequence, y_sequence, g2n_from_theta
from .hermite import sigma_from_theta, w_r_series_route
from .lattice import make_lattice, preset_lattice, PRESETS
from .quad import build_rule, w_r_integral_route
from .report import make_report, normative_ok
from .taylor import build_coeff_table, w_r_polynomial

__all__ = [
    "AuditService",
    "get_audit_service",
    "derive_product_identities",
    "invariants",
    "sigma_product",
    "sigma_reduced",
    "zeta_series",
    "eisenstein",
    "x_sequence",
    "y_sequence",
    "g2n_from_theta",
    "sigma_from_theta",
    "w_r_series_route",
    "make_lattice",
    "preset_lattice",
    "PRESETS",
    "build_rule",
    "w_r_integral_route",
    "make_report",
    "normative_ok",
    "build_coeff_table",
    "w_r_polynomial",
]
