"""
Weierstrass 递推（精确有理数）

a_{m,n} 满足

    a_{m,n} = 3(m+1)·a_{m+1,n−1} + (16/3)(n+1)·a_{m−2,n+1}
              − (1/3)(2m+3n−1)(4m+6n−1)·a_{m−1,n}

a_{0,0} = 1，下标为负时取 0。权重 r = 2m+3n；前两项引用权重 r−1，
最后一项引用 r−2，因此按 r 递增填表即可。

𝒲_r = Σ_{2m+3n=r} a_{m,n}(g₂/2)^m(2g₃)^n，σ(z) = Σ 𝒲_r z^{2r+1}/(2r+1)!
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping, NamedTuple

from ..exceptions import ParameterError, TableExhaustedError
from ..models.results import EllipticInvariants
from ..utils.summation import compensated_sum


# ============ 数据结构 ============

@dataclass(frozen=True)
class CoeffTable:
    """a_{m,n} 表，覆盖全部 2m+3n ≤ max_r"""
    entries: Mapping[tuple[int, int], Fraction]
    max_r: int

    def a(self, m: int, n: int) -> Fraction:
        if m < 0 or n < 0:
            return Fraction(0)
        if 2 * m + 3 * n > self.max_r:
            raise TableExhaustedError(f"a_{{{m},{n}}} 超出表范围 max_r={self.max_r}")
        return self.entries[(m, n)]


@dataclass(frozen=True)
class BivariatePoly:
    """(g₂, g₃) 的稀疏有理系数多项式，键为 (g₂ 次数, g₃ 次数)"""
    terms: Mapping[tuple[int, int], Fraction]

    def __post_init__(self):
        cleaned = {k: Fraction(v) for k, v in sorted(self.terms.items()) if v != 0}
        object.__setattr__(self, "terms", MappingProxyType(cleaned))

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, i: int, j: int) -> Fraction:
        return self.terms.get((i, j), Fraction(0))

    def scaled(self, factor: Fraction) -> "BivariatePoly":
        return BivariatePoly({k: v * factor for k, v in self.terms.items()})

    def evaluate(self, g2: complex, g3: complex) -> complex:
        return compensated_sum(
            [float(c) * g2 ** i * g3 ** j for (i, j), c in self.terms.items()]
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (i, j), c in self.terms.items():
            monomial = "·".join(
                f"{name}^{power}" if power > 1 else name
                for name, power in (("g2", i), ("g3", j)) if power
            )
            parts.append(f"({c})·{monomial}" if monomial else f"({c})")
        return " + ".join(parts)


class TaylorEvaluation(NamedTuple):
    value: complex
    last_term: float


# ============ 递推 ============

@lru_cache(maxsize=8)
def build_coeff_table(max_r: int) -> CoeffTable:
    """
    按 r = 2m+3n 递增填充 a_{m,n}

    Examples:
        >>> build_coeff_table(6).a(1, 1)
        Fraction(-18, 1)
    """
    if max_r < 0:
        raise ParameterError(f"max_r 必须非负: {max_r}")

    entries: dict[tuple[int, int], Fraction] = {}

    def a(m: int, n: int) -> Fraction:
        if m < 0 or n < 0:
            return Fraction(0)
        return entries[(m, n)]

    for r in range(max_r + 1):
        for n in range(r // 3 + 1):
            if (r - 3 * n) % 2:
                continue
            m = (r - 3 * n) // 2
            if (m, n) == (0, 0):
                entries[(0, 0)] = Fraction(1)
                continue
            entries[(m, n)] = (
                3 * (m + 1) * a(m + 1, n - 1)
                + Fraction(16, 3) * (n + 1) * a(m - 2, n + 1)
                - Fraction(1, 3) * (2 * m + 3 * n - 1) * (4 * m + 6 * n - 1) * a(m - 1, n)
            )
    return CoeffTable(entries=MappingProxyType(entries), max_r=max_r)


def w_r_polynomial(table: CoeffTable, r: int) -> BivariatePoly:
    """𝒲_r，系数 a_{m,n}·2^{n−m}"""
    if r < 0:
        raise ParameterError(f"r 必须非负: {r}")
    if r > table.max_r:
        raise TableExhaustedError(f"r={r} 超出系数表 max_r={table.max_r}")
    terms = {}
    for n in range(r // 3 + 1):
        if (r - 3 * n) % 2:
            continue
        m = (r - 3 * n) // 2
        terms[(m, n)] = table.a(m, n) * Fraction(2) ** (n - m)
    return BivariatePoly(terms)


def w_r_value(poly: BivariatePoly, inv: EllipticInvariants) -> complex:
    return poly.evaluate(inv.g2, inv.g3)


def sigma_coefficient_polynomial(table: CoeffTable, r: int) -> BivariatePoly:
    """σ 的 z^{2r+1} 系数 𝒲_r/(2r+1)!"""
    return w_r_polynomial(table, r).scaled(Fraction(1, math.factorial(2 * r + 1)))


def sigma_taylor_eval(table: CoeffTable, inv: EllipticInvariants, z: complex) -> TaylorEvaluation:
    """
    σ(z) 的 Taylor 部分和（r ≤ table.max_r）

    Returns:
        TaylorEvaluation(value, last_term)：last_term 为最后一项的模，作为余项的粗略估计
    """
    z = complex(z)
    coefficients = [
        w_r_value(w_r_polynomial(table, r), inv) / math.factorial(2 * r + 1)
        for r in range(table.max_r + 1)
    ]
    z2 = z * z
    acc = 0j
    for c in reversed(coefficients):
        acc = acc * z2 + c
    last = abs(coefficients[-1]) * abs(z) ** (2 * table.max_r + 1)
    return TaylorEvaluation(value=acc * z, last_term=last)


def coeff_table_rows(table: CoeffTable) -> list[tuple[int, int, int, int]]:
    """(m, n, numerator, denominator)，按 r 递增"""
    rows = sorted(table.entries.items(), key=lambda item: (2 * item[0][0] + 3 * item[0][1], item[0][1]))
    return [(m, n, value.numerator, value.denominator) for (m, n), value in rows]


# ============ 已发表的低阶系数 ============

# z^5 .. z^13 的系数；z^13 的分母按已发表形式取 2^10（递推给出 2^13）
PRINTED_Z13_DENOMINATOR = 2 ** 10 * 3 ** 4 * 5 ** 2 * 7 * 11 * 13


def printed_sigma_coefficients() -> dict[int, BivariatePoly]:
    """已发表的 σ 低阶 Taylor 系数，键为 r（对应 z^{2r+1}）"""
    return {
        2: BivariatePoly({(1, 0): Fraction(-1, 2 ** 4 * 3 * 5)}),
        3: BivariatePoly({(0, 1): Fraction(-1, 2 ** 3 * 3 * 5 * 7)}),
        4: BivariatePoly({(2, 0): Fraction(-1, 2 ** 9 * 3 ** 2 * 5 * 7)}),
        5: BivariatePoly({(1, 1): Fraction(-1, 2 ** 7 * 3 ** 2 * 5 ** 2 * 7 * 11)}),
        6: BivariatePoly({
            (3, 0): Fraction(23, PRINTED_Z13_DENOMINATOR),
            (0, 2): Fraction(-576, PRINTED_Z13_DENOMINATOR),
        }),
    }
