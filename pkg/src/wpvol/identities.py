"""Exact checks of the 2 pi cone-angle relations and the V_{0,5} rewritings.

All checks are identities in ``Q[pi^2][L^2]``: each report carries the
difference of the two sides, and passes exactly when that difference is
the zero polynomial.  The derivative relation is compared after removing
the odd factor ``L_{n+1}``; the common ``2 pi i`` cancels, leaving

    Q(L, L_{n+1}^2 = -4 pi^2) = (2g - 2 + n) V_{g,n}(L)

where ``dV_{g,n+1}/dL_{n+1} = L_{n+1} Q``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional

from .exactpoly import (
    PI2,
    VolumePolynomial,
    add,
    integrate_against_length,
    odd_derivative_factor,
    substitute_square,
)
from .volumes import UnstableError, VolumeTable, compute_volume, is_stable, stable_keys

__all__ = [
    "IdentityReport",
    "check_limit_integral",
    "check_limit_derivative",
    "check_two_pi_corollary",
    "check_v05_factorizations",
    "v05_first_rewriting",
    "v05_second_rewriting",
    "limit_suite",
]

MINUS_4PI2 = -4 * PI2


@dataclass
class IdentityReport:
    name: str
    key: tuple
    discrepancy: VolumePolynomial

    @property
    def passed(self) -> bool:
        return self.discrepancy.is_zero()

    def to_dict(self) -> dict:
        return {"identity": self.name, "g": self.key[0], "n": self.key[1],
                "pass": self.passed, "discrepancy_terms": len(self.discrepancy)}


def _vol(g: int, n: int, table: Optional[VolumeTable]) -> VolumePolynomial:
    return compute_volume(g, n, table)


def _target(g: int, n_plus_1: int) -> int:
    if not is_stable(g, n_plus_1):
        raise UnstableError(f"({g}, {n_plus_1}) is not stable")
    n = n_plus_1 - 1
    if not (is_stable(g, n) or (n == 0 and g >= 2)):
        raise UnstableError(f"({g}, {n}) has no volume polynomial to compare with")
    return n


def check_limit_integral(g: int, n_plus_1: int, table: Optional[VolumeTable] = None) -> IdentityReport:
    """``V_{g,n+1}(L, 2 pi i) = sum_k int_0^{L_k} L_k V_{g,n}(L) dL_k``.

    For ``n = 0`` the right side is an empty sum; the relation then reads
    ``V_{g,1}(2 pi i) = 0``.
    """
    n = _target(g, n_plus_1)
    big = _vol(g, n_plus_1, table)
    lhs = substitute_square(big, n_plus_1, MINUS_4PI2)
    rhs = VolumePolynomial(n)
    if n:
        small = _vol(g, n, table)
        for k in range(1, n + 1):
            rhs = add(rhs, integrate_against_length(small, k))
    return IdentityReport("limit_integral", (g, n_plus_1), lhs - rhs)


def check_limit_derivative(g: int, n_plus_1: int, table: Optional[VolumeTable] = None) -> IdentityReport:
    """``dV_{g,n+1}/dL_{n+1} (L, 2 pi i) = 2 pi i (2g - 2 + n) V_{g,n}(L)``, with ``L_{n+1}`` factored out."""
    n = _target(g, n_plus_1)
    big = _vol(g, n_plus_1, table)
    q = substitute_square(odd_derivative_factor(big, n_plus_1), n_plus_1, MINUS_4PI2)
    rhs = _vol(g, n, table) * (2 * g - 2 + n)
    return IdentityReport("limit_derivative", (g, n_plus_1), q - rhs)


def _theta_poly(g: int, n: int, table) -> VolumePolynomial:
    """``V_{g,n+1}(0^n, i theta)`` as a one-variable polynomial in ``L^2 = -theta^2``."""
    big = _vol(g, n + 1, table)
    for _ in range(n):
        big = substitute_square(big, 1, 0)
    return big


def check_two_pi_corollary(g: int, n: int, table: Optional[VolumeTable] = None) -> List[IdentityReport]:
    """The 2 pi limit at cusps: ``V_{g,n+1}(0^n, 2 pi i) = 0`` and the theta-derivative there.

    With ``P(L^2) = V_{g,n+1}(0^n, L)`` and ``L = i theta``,
    ``d/dtheta P(-theta^2) = -2 theta P'(-theta^2)``; at ``theta = 2 pi``
    this must equal ``2 pi (2 - 2g - n) V_{g,n}(0^n)``, i.e.
    ``-2 P'(-4 pi^2) = (2 - 2g - n) V_{g,n}(0)`` after cancelling ``2 pi``.
    """
    if not (is_stable(g, n) or (n == 0 and g >= 2)):
        raise UnstableError(f"({g}, {n}) is not stable")
    p = _theta_poly(g, n, table)
    vanish = substitute_square(p, 1, MINUS_4PI2)
    dp = VolumePolynomial(1, {(e[0] - 1,): c * e[0] for e, c in p.terms.items() if e[0]})
    slope = substitute_square(dp, 1, MINUS_4PI2) * (-2)
    base = _vol(g, n, table)
    for _ in range(n):
        base = substitute_square(base, 1, 0)
    return [IdentityReport("two_pi_vanish", (g, n), vanish),
            IdentityReport("two_pi_slope", (g, n), slope - base * (2 - 2 * g - n))]


def _theta_sq(n: int, j: int) -> VolumePolynomial:
    # theta_j^2 = -L_j^2, written in the L^2 ring
    return VolumePolynomial.square(n, j) * (-1)


def v05_first_rewriting() -> VolumePolynomial:
    """``(1/24) sum (4pi^2 - th_j^2 - th_k^2 - th_l^2)(4pi^2 - th_j^2 - th_m^2 - th_n^2)``.

    The sum runs over ordered choices ``j`` and unordered pairs ``{k,l}``,
    ``{m,n}`` splitting the other four indices: 5 * 3 = 15 summands.
    """
    out = VolumePolynomial(5)
    four_pi2 = VolumePolynomial.constant(5, 4 * PI2)
    for j in range(1, 6):
        rest = [i for i in range(1, 6) if i != j]
        for pair in combinations(rest, 2):
            if rest[0] not in pair:
                continue  # each split {k,l}|{m,n} once
            other = [i for i in rest if i not in pair]
            a = four_pi2 - _theta_sq(5, j) - _theta_sq(5, pair[0]) - _theta_sq(5, pair[1])
            b = four_pi2 - _theta_sq(5, j) - _theta_sq(5, other[0]) - _theta_sq(5, other[1])
            out = out + a * b
    return out / 24


def v05_second_rewriting() -> VolumePolynomial:
    """``(1/4) sum_{j<k} (3(pi^2-th_j^2)(pi^2-th_k^2) + pi^4 - th_j^2 th_k^2) + (1/8) sum th_j^4``."""
    pi2 = VolumePolynomial.constant(5, PI2)
    out = VolumePolynomial(5)
    for j, k in combinations(range(1, 6), 2):
        tj, tk = _theta_sq(5, j), _theta_sq(5, k)
        out = out + ((pi2 - tj) * (pi2 - tk)) * 3 + pi2 * pi2 - tj * tk
    out = out / 4
    for j in range(1, 6):
        out = out + _theta_sq(5, j) * _theta_sq(5, j) / 8
    return out


def check_v05_factorizations(table: Optional[VolumeTable] = None) -> List[IdentityReport]:
    """Both displayed rewritings of ``V_{0,5}(i theta)`` expand to the recursion output."""
    v05 = _vol(0, 5, table).retag(None)
    return [IdentityReport("v05_first_rewriting", (0, 5), v05_first_rewriting() - v05),
            IdentityReport("v05_second_rewriting", (0, 5), v05_second_rewriting() - v05)]


def limit_suite(max_dim: int, table: Optional[VolumeTable] = None) -> List[IdentityReport]:
    """Both limit relations for every stable ``(g, n+1)`` with ``3g - 2 + n <= max_dim``."""
    reports = []
    for g, m in stable_keys(max_dim):
        n = m - 1
        if is_stable(g, n) or (n == 0 and g >= 2):
            reports.append(check_limit_integral(g, m, table))
            reports.append(check_limit_derivative(g, m, table))
    return reports
