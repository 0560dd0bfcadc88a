"""Hyperbolic trigonometry for separation bounds, crowned boundaries and cone gluing.

Lengths are in hyperbolic units and angles in radians.  ``delta`` always
denotes the distance between two boundary components across a pair of
pants whose third boundary has length ``c``.
"""
from __future__ import annotations

import math
from typing import Optional

from scipy.optimize import brentq

from .chambers import BoundaryLabel

__all__ = [
    "hexagon_delta",
    "hexagon_bound",
    "pentagon_delta",
    "pentagon_bound",
    "quad_delta",
    "obtuse_pentagon_sinh_delta",
    "crown_length",
    "crown_residual",
    "crown_spurious_root",
    "cone_glue_w",
    "separation_bound",
    "separation_regime",
    "NoBracketError",
]


class NoBracketError(ValueError):
    """No sign change of the crowned-boundary equation on the search bracket."""


def _require_length(name: str, value: float) -> None:
    if not value > 0:
        raise ValueError(f"{name} must be > 0, got {value}")


def hexagon_delta(L1: float, L2: float, c: float = 0.0) -> float:
    """Distance between geodesic boundaries of lengths ``L1``, ``L2`` (right-angled hexagon)."""
    _require_length("L1", L1)
    _require_length("L2", L2)
    if c < 0:
        raise ValueError("c must be >= 0")
    a, b = L1 / 2, L2 / 2
    return math.acosh((math.cosh(c / 2) + math.cosh(a) * math.cosh(b))
                      / (math.sinh(a) * math.sinh(b)))


def hexagon_bound(L1: float, L2: float) -> float:
    """``arccosh(1 + 1/(sinh(L1/2) sinh(L2/2)))``, below :func:`hexagon_delta` for every ``c``."""
    return math.acosh(1 + 1 / (math.sinh(L1 / 2) * math.sinh(L2 / 2)))


def pentagon_delta(L1: float, theta2: float, c: float = 0.0) -> float:
    """Distance from a geodesic of length ``L1`` to a cone point of angle ``theta2 <= pi``."""
    _require_length("L1", L1)
    if not 0 < theta2 <= math.pi:
        raise ValueError(f"theta2 must lie in (0, pi], got {theta2}")
    if c < 0:
        raise ValueError("c must be >= 0")
    ca, sa = math.cos(theta2 / 2), math.sin(theta2 / 2)
    ch, sh = math.cosh(L1 / 2), math.sinh(L1 / 2)
    chc = math.cosh(c / 2)
    K = 2 * ca * ch * (chc - 1) + chc ** 2 - 1
    return math.acosh(math.sqrt(ca ** 2 + 2 * ca * ch + ch ** 2 + K) / (sa * sh))


def pentagon_bound(L1: float) -> float:
    """``arccosh(coth(L1/2))``."""
    return math.acosh(1 / math.tanh(L1 / 2))


def quad_delta(theta1: float, theta2: float, c: float = 0.0) -> float:
    """Distance between cone points of angles ``theta1``, ``theta2`` with ``theta1 + theta2 < 2 pi``.

    Raises ``ValueError`` at or beyond the wall, where the two cone points
    can merge and no quadrilateral exists.
    """
    if not (theta1 > 0 and theta2 > 0):
        raise ValueError("cone angles must be positive")
    if theta1 + theta2 >= 2 * math.pi:
        raise ValueError(f"theta1 + theta2 = {theta1 + theta2} >= 2 pi: cone points may merge")
    if c < 0:
        raise ValueError("c must be >= 0")
    h1, h2 = theta1 / 2, theta2 / 2
    # cosh(delta) - 1 = (cosh(c/2) + cos(h1 + h2)) / (sin h1 sin h2), in a form exact near the wall
    num = 2 * math.sinh(c / 4) ** 2 + 2 * math.cos((h1 + h2) / 2) ** 2
    excess = num / (math.sin(h1) * math.sin(h2))
    return 2 * math.asinh(math.sqrt(excess / 2))


def obtuse_pentagon_sinh_delta(alpha: float, Lp: float, c: float) -> Optional[float]:
    """``delta`` with ``sinh(delta) = (cosh c + cos(alpha) cosh Lp) / (sin(alpha) sinh Lp)``.

    Returns ``None`` when the numerator is not positive, the regime where a
    cone point can approach a geodesic arbitrarily closely.
    """
    _require_length("Lp", Lp)
    if not 0 < alpha < math.pi:
        raise ValueError(f"alpha must lie in (0, pi), got {alpha}")
    num = math.cosh(c) + math.cos(alpha) * math.cosh(Lp)
    if num <= 0:
        return None
    return math.asinh(num / (math.sin(alpha) * math.sinh(Lp)))


def crown_residual(x: float, phi: float, L: float) -> float:
    """``cosh(x) tanh^2(L/2) - cos^2(phi/2) - sin^2(phi/2) cosh(L) tanh^2(x/2)``.

    ``phi`` is the corner angle of the piecewise geodesic boundary of length
    ``L``; the residual vanishes at the length ``x`` of the closed geodesic
    in its homotopy class.
    """
    s2 = math.sin(phi / 2) ** 2
    return (math.cosh(x) * math.tanh(L / 2) ** 2 - (1 - s2)
            - s2 * math.cosh(L) * math.tanh(x / 2) ** 2)


def crown_spurious_root(L: float) -> float:
    """``arccosh(coth^2(L/2))``, a root of :func:`crown_residual` for every ``phi``.

    It is independent of the corner and never the geodesic length sought.
    """
    return math.acosh(1 / math.tanh(L / 2) ** 2)


def crown_length(phi: float, L: float, lo: float = 1e-9, xtol: float = 1e-14) -> float:
    """Length ``x`` of the closed geodesic homotopic to a boundary of length ``L`` with one corner ``phi``.

    The residual has exactly two positive roots when a solution exists: the
    corner-independent :func:`crown_spurious_root` and the geodesic length.
    The search bracket ``(lo, L + 10]`` (upper end doubled until the sign
    pattern closes) is split at the spurious root and the remaining sign
    change is refined with Brent's method.  ``x -> L`` as ``phi -> pi``.
    """
    if not 0 < phi < math.pi:
        raise ValueError(f"phi must lie in (0, pi), got {phi}")
    _require_length("L", L)
    f = lambda x: crown_residual(x, phi, L)  # noqa: E731
    hi = L + 10.0
    while f(hi) <= 0:
        hi *= 2
        if hi > 1e4:
            raise NoBracketError(f"residual stays non-positive up to x={hi}")
    spur = crown_spurious_root(L)
    gap = 1e-9 * max(1.0, spur)
    brackets = [(lo, spur - gap), (spur + gap, hi)]
    found = [(a, b) for a, b in brackets if a < b and f(a) * f(b) < 0]
    if not found:
        if abs(math.cosh(L / 2) * math.sin(phi / 2) - math.cosh(spur / 2)) < 1e-9:
            return spur  # double root: both roots coincide
        raise NoBracketError(
            f"no corner-dependent sign change on ({lo}, {hi}]: "
            f"cosh(L/2) sin(phi/2) = {math.cosh(L / 2) * math.sin(phi / 2):.6g} < 1 has no geodesic")
    a, b = found[0]
    return brentq(f, a, b, xtol=xtol, rtol=1e-15, maxiter=500)


def cone_glue_w(x: float, phi: float) -> float:
    """``w`` with ``cosh(w) = -cosh^2(x/2) cos(phi) + sinh^2(x/2)``; ``w = x`` at ``phi = pi``."""
    # cosh(w) - 1 = 2 (sinh^2(x/2) - cosh^2(x/2) cos^2(phi/2)), i.e. sinh(w/2)^2 below
    half_sq = math.sinh(x / 2) ** 2 - (math.cosh(x / 2) * math.cos(phi / 2)) ** 2
    if half_sq < 0:
        rhs = -math.cosh(x / 2) ** 2 * math.cos(phi) + math.sinh(x / 2) ** 2
        raise ValueError(f"cosh(w) = {rhs} < 1: no pentagon for x={x}, phi={phi}")
    return 2 * math.asinh(math.sqrt(half_sq))


def separation_regime(a: BoundaryLabel, b: BoundaryLabel) -> str:
    kinds = {a.kind, b.kind}
    if "cusp" in kinds:
        return "cusp"
    if kinds == {"geodesic"}:
        return "geodesics"
    if kinds == {"cone"}:
        return "cones" if a.theta + b.theta < 2 * math.pi else "cones-merge"
    cone = a if a.is_cone else b
    return "geodesic-cone" if _small(cone) else "geodesic-cone-merge"


def _small(cone: BoundaryLabel) -> bool:
    if cone.pi_multiple is not None:
        return cone.pi_multiple <= 1
    return cone.theta <= math.pi


def separation_bound(a: BoundaryLabel, b: BoundaryLabel) -> Optional[float]:
    """A positive lower bound on the distance between two boundary components, or ``None``.

    ``None`` means no uniform bound exists: two cones with angle sum at
    least 2 pi or a geodesic with a cone above pi can merge, and a cusp has
    no finite distance (measure to a horocycle instead; see
    :func:`separation_regime`).  A cone angle of exactly pi counts as small.
    """
    regime = separation_regime(a, b)
    if regime == "geodesics":
        return hexagon_bound(a.magnitude, b.magnitude)
    if regime == "geodesic-cone":
        geo = a if a.kind == "geodesic" else b
        return pentagon_bound(geo.magnitude)
    if regime == "cones":
        return quad_delta(a.theta, b.theta, 0.0)
    return None
