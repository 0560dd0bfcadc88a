"""Once-punctured torus character variety and the volume of M_{1,1}(i theta).

Points of Teichmueller space are trace triples ``(x, y, z)`` with
``x, y, z >= 2`` on a level set of

    kappa(x, y, z) = x^2 + y^2 + z^2 - xyz - 2 = -2 cos(theta/2),

or, equivalently, homogeneous triples ``r = x/yz, s = y/zx, t = z/xy`` with
``r + s + t - 1 = (kappa + 2) rst``.  The group generated by the three
involutions ``phi_i`` acts on each level set; its fundamental domain is
``r, s, t <= 1/2``.  The volume integral

    (1/3) int_0^{1/2} int_{(1-2s)/(2-(kappa+2)s)}^{1/2} dr ds / ((1-r-s) r s)

equals ``(pi^2 - theta^2/4) / 6``; a further factor 1/2 for the elliptic
involution gives ``(4 pi^2 - theta^2) / 48``.

Coordinate functions accept floats or :mod:`mpmath` numbers.  Long
generator words produce coordinates that grow doubly exponentially, so
exact round trips need ``mpmath`` at a working precision proportional to
the word length.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy import integrate

__all__ = [
    "INDEX_PSL2Z_M2PLUS",
    "INDEX_M2_M2PLUS",
    "MAX_REDUCTION_STEPS",
    "ReductionError",
    "QuadratureError",
    "kappa",
    "theta_to_kappa",
    "kappa_to_theta",
    "to_homogeneous",
    "from_homogeneous",
    "apply_generator",
    "apply_generator_rst",
    "apply_word",
    "energy",
    "energy_change",
    "in_fundamental_domain",
    "reduce_to_domain",
    "sample_domain",
    "wp_density",
    "lower_r_limit",
    "closed_form_raw",
    "closed_form_final",
    "CVVolume",
    "volume_integral",
    "partial_integral",
    "monte_carlo_raw",
]

INDEX_PSL2Z_M2PLUS = 6
INDEX_M2_M2PLUS = 2
MAX_REDUCTION_STEPS = 10 ** 6
DOMAIN_TOL = 1e-12


class ReductionError(RuntimeError):
    """Orbit reduction did not terminate; the point is off the Teichmueller component."""


class QuadratureError(RuntimeError):
    """The volume quadrature missed its tolerance."""


def _sqrt(v):
    return mpmath.sqrt(v) if isinstance(v, mpmath.mpf) else math.sqrt(v)


def kappa(p: Sequence[float]):
    x, y, z = p
    return x * x + y * y + z * z - x * y * z - 2


def theta_to_kappa(theta: float) -> float:
    if not 0 <= theta < 2 * math.pi:
        raise ValueError(f"cone angle must lie in [0, 2pi), got {theta}")
    return -2 * math.cos(theta / 2)


def kappa_to_theta(k: float) -> float:
    if not -2 <= k < 2:
        raise ValueError(f"kappa must lie in [-2, 2), got {k}")
    return 2 * math.acos(-k / 2)


def to_homogeneous(p: Sequence[float]) -> Tuple:
    x, y, z = p
    if not (x > 0 and y > 0 and z > 0):
        raise ValueError("trace coordinates must be positive")
    return x / (y * z), y / (z * x), z / (x * y)


def from_homogeneous(h: Sequence[float]) -> Tuple:
    """Inverse of :func:`to_homogeneous` on the positive sheet: ``x^2 = 1/(st)`` and so on."""
    r, s, t = h
    if not (r * s > 0 and s * t > 0 and t * r > 0):
        raise ValueError("homogeneous coordinates must have positive pairwise products")
    return 1 / _sqrt(s * t), 1 / _sqrt(t * r), 1 / _sqrt(r * s)


def apply_generator(i: int, p: Sequence[float]) -> Tuple:
    """``phi_1: x -> yz - x``, ``phi_2: z -> xy - z``, ``phi_3: y -> xz - y`` on trace triples."""
    x, y, z = p
    if i == 1:
        return y * z - x, y, z
    if i == 2:
        return x, y, x * y - z
    if i == 3:
        return x, x * z - y, z
    raise ValueError(f"generator index must be 1, 2 or 3, got {i}")


def apply_generator_rst(i: int, h: Sequence[float]) -> Tuple:
    """The same involutions in homogeneous coordinates."""
    r, s, t = h
    if i == 1:
        return 1 - r, r * s / (1 - r), r * t / (1 - r)
    if i == 2:
        return t * r / (1 - t), t * s / (1 - t), 1 - t
    if i == 3:
        return s * r / (1 - s), 1 - s, s * t / (1 - s)
    raise ValueError(f"generator index must be 1, 2 or 3, got {i}")


def apply_word(word: Sequence[int], p: Sequence[float]) -> Tuple:
    """Apply generators left to right: ``word[0]`` first."""
    for i in word:
        p = apply_generator(i, p)
    return tuple(p)


def energy(p: Sequence[float]):
    return p[0] + p[1] + p[2]


def energy_change(i: int, p: Sequence[float]):
    """``E(phi_i(p)) - E(p)``; negative exactly when the matching homogeneous coordinate exceeds 1/2."""
    x, y, z = p
    if i == 1:
        return y * z - 2 * x
    if i == 2:
        return x * y - 2 * z
    if i == 3:
        return x * z - 2 * y
    raise ValueError(f"generator index must be 1, 2 or 3, got {i}")


def in_fundamental_domain(h: Sequence[float], kappa_value: float = None, tol: float = DOMAIN_TOL) -> bool:
    """``r, s, t`` in ``(0, 1/2]`` and, when ``kappa_value`` is given, on its level set.

    Corner points with two coordinates equal to 1/2 are rejected; they lie
    on no level set with ``kappa < 2``.
    """
    r, s, t = (float(v) for v in h)
    if not all(0 < v <= 0.5 + tol for v in (r, s, t)):
        return False
    if sum(abs(v - 0.5) <= tol for v in (r, s, t)) >= 2:
        return False  # two coordinates at 1/2 force kappa = 2: not an interior orbit point
    if kappa_value is not None:
        return abs(r + s + t - 1 - (kappa_value + 2) * r * s * t) <= tol
    return True


def reduce_to_domain(p: Sequence[float], strategy: str = "greedy",
                     max_steps: int = MAX_REDUCTION_STEPS) -> Tuple[Tuple, List[int]]:
    """Move ``p`` into the fundamental domain by energy-decreasing generator steps.

    ``strategy="greedy"`` takes the largest decrease (lowest index on ties);
    ``"first"`` takes the first generator that decreases the energy.
    Returns the reduced point and the generators applied, in order.
    """
    if strategy not in ("greedy", "first"):
        raise ValueError(f"unknown strategy {strategy!r}")
    p = tuple(p)
    word: List[int] = []
    for _ in range(max_steps):
        changes = [energy_change(i, p) for i in (1, 2, 3)]
        candidates = [i for i in (1, 2, 3) if changes[i - 1] < 0]
        if not candidates:
            return p, word
        if strategy == "greedy":
            i = min(candidates, key=lambda k: (changes[k - 1], k))
        else:
            i = candidates[0]
        p = apply_generator(i, p)
        word.append(i)
    raise ReductionError(f"no fixed point after {max_steps} steps; input is off the Teichmueller component")


def lower_r_limit(s, kappa_value):
    """Lower edge ``(1 - 2s) / (2 - (kappa + 2) s)`` of the domain at fixed ``s``."""
    return (1 - 2 * s) / (2 - (kappa_value + 2) * s)


def sample_domain(kappa_value: float, rng: np.random.Generator) -> Tuple[float, float, float]:
    """A random homogeneous triple in the fundamental domain of the ``kappa`` level set."""
    while True:
        s = rng.uniform(0.0, 0.5)
        r0 = lower_r_limit(s, kappa_value)
        r = rng.uniform(r0, 0.5)
        t = (1 - r - s) / (1 - (kappa_value + 2) * r * s)
        if 0 < r and 0 < s and 0 < t <= 0.5 and r > r0:
            return r, s, t


def wp_density(r: float, s: float, kappa_value: float = None) -> float:
    """Weil-Petersson area density ``1 / ((1 - r - s) r s)`` in the ``(r, s)`` chart.

    The ``kappa`` dependence sits entirely in the domain; the argument is
    accepted for symmetry with the other chart functions.
    """
    gap = 1 - r - s
    if not (r > 0 and s > 0 and gap > 0):
        raise ValueError(f"({r}, {s}) is on or outside the singular walls")
    return 1.0 / (gap * r * s)


def closed_form_raw(theta: float) -> float:
    return (math.pi ** 2 - theta ** 2 / 4) / 6


def closed_form_final(theta: float) -> float:
    return (4 * math.pi ** 2 - theta ** 2) / 48


@dataclass(frozen=True)
class CVVolume:
    """Quadrature result; unpacks as ``raw, final``."""

    theta: float
    kappa: float
    raw: float
    final: float
    error: float

    def __iter__(self) -> Iterator[float]:
        return iter((self.raw, self.final))


def _inner(sigma: float, kappa_value: float, gap: float = 0.0) -> Tuple[float, float]:
    """``int dr / ((1 - s - r) r)`` over ``[r0(s), 1/2]`` with ``s = 1/2 - sigma``.

    Stops ``gap`` short of ``r + s = 1`` when ``gap > 0``.  The interval is
    split at its midpoint.  The lower half uses ``r = r0 e^u``, the upper
    half ``1 - s - r = q e^u``; both turn the endpoint poles into smooth
    integrands.  Working in ``sigma`` keeps ``r0`` and ``q`` accurate as
    ``s -> 1/2``.
    """
    s = 0.5 - sigma
    c = 0.5 + sigma
    r0 = 2 * sigma / (2 - (kappa_value + 2) * s)
    q1 = max(sigma, gap)
    r1 = c - q1
    if r1 <= r0:
        return 0.0, 0.0
    mid = 0.5 * (r0 + r1)
    lo_val, lo_err = integrate.quad(lambda u: 1.0 / (c - r0 * math.exp(u)),
                                    0.0, math.log(mid / r0), epsabs=0, epsrel=1e-13, limit=200)
    hi_val, hi_err = integrate.quad(lambda u: 1.0 / (c - q1 * math.exp(u)),
                                    0.0, math.log((c - mid) / q1), epsabs=0, epsrel=1e-13, limit=200)
    return lo_val + hi_val, lo_err + hi_err


def partial_integral(theta: float, s_lo: float = 0.0, s_hi: float = 0.5, gap: float = 0.0,
                     rel_tol: float = 1e-10) -> Tuple[float, float]:
    """``(1/3) int int dr ds / ((1-r-s) r s)`` over ``s_lo < s < s_hi`` of the domain.

    ``gap > 0`` removes the corner strip ``1 - r - s < gap``.  The outer
    variable is ``u = -log(1/2 - s)``, which spreads the logarithmic
    singularity at ``s = 1/2`` and the thin region near ``kappa -> 2`` over
    a unit-scale range.  Returns (value, error estimate).
    """
    k = theta_to_kappa(theta)
    s_hi = min(s_hi, 0.5)
    if s_lo >= s_hi:
        return 0.0, 0.0

    def outer(u):
        sigma = math.exp(-u)
        s = 0.5 - sigma
        if s <= 0 or sigma <= 0:
            return 0.0
        val, _ = _inner(sigma, k, gap)
        return val / s * sigma

    u_lo = -math.log(0.5 - s_lo)
    u_hi = math.inf if s_hi >= 0.5 else -math.log(0.5 - s_hi)
    with np.errstate(all="ignore"):
        val, err, *rest = integrate.quad(outer, u_lo, u_hi, epsabs=0, epsrel=rel_tol,
                                         limit=500, full_output=1)
    if len(rest) > 1 and val and err > max(rel_tol * abs(val), 1e-14):
        raise QuadratureError(f"quadrature stopped at error {err:.3g} for theta={theta}: {rest[1]}")
    return val / 3, err / 3


# outer segments in s; the last one reaches the s = 1/2 corner
SEGMENTS = (0.0, 0.25, 0.4, 0.49, 0.5)


def volume_integral(theta: float, rel_tol: float = 1e-8, jobs: Optional[int] = None) -> CVVolume:
    """Numerical ``Vol(M_{1,1}(i theta))``: the domain integral ``raw`` and ``final = raw / 2``.

    The ``s``-range is cut into fixed segments that are integrated
    independently (on ``jobs`` threads when given) and summed with
    :func:`math.fsum`, so the result does not depend on completion order.
    """
    if not rel_tol > 0:
        raise ValueError(f"rel_tol must be positive, got {rel_tol}")
    rel_tol = max(rel_tol, 1e-13)
    k = theta_to_kappa(theta)
    bounds = list(zip(SEGMENTS[:-1], SEGMENTS[1:]))
    task = lambda ab: partial_integral(theta, ab[0], ab[1], rel_tol=rel_tol)  # noqa: E731
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(task, bounds))
    else:
        parts = [task(ab) for ab in bounds]
    raw = math.fsum(v for v, _ in parts)
    err = math.fsum(e for _, e in parts)
    if err > max(rel_tol * abs(raw), 1e-15):
        raise QuadratureError(f"error estimate {err:.3g} exceeds rel_tol={rel_tol} at theta={theta}")
    return CVVolume(theta, k, raw, raw / 2, err)


def monte_carlo_raw(theta: float, samples: int = 10 ** 7, seed: int = 0,
                    chunk: int = 10 ** 6) -> Tuple[float, float]:
    """Plain Monte Carlo estimate of the domain integral and its standard error.

    Samples ``s`` uniformly on ``(0, 1/2)`` and the relative position
    ``lam`` uniformly across the ``r``-interval, so the ``1/s`` blow-up is
    cancelled by the interval width.
    """
    k = theta_to_kappa(theta)
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        s = rng.uniform(0.0, 0.5, m)
        lam = rng.uniform(0.0, 1.0, m)
        r0 = lower_r_limit(s, k)
        width = 0.5 - r0
        r = r0 + lam * width
        f = 0.5 * width / ((1 - r - s) * r * s) / 3
        total += f.sum()
        total_sq += (f * f).sum()
        done += m
    mean = total / samples
    var = total_sq / samples - mean * mean
    return mean, math.sqrt(var / samples)
