"""Weil-Petersson volume polynomials ``V_{g,n}`` from Mirzakhani's recursion.

The recursion computes ``d/dL_1 (L_1 V_{g,n})`` from lower volumes by
integrating against the kernel

    H(x, t) = 1/(1 + exp((x+t)/2)) + 1/(1 + exp((x-t)/2)).

Every integral reduces to the kernel moments
``F_{2k+1}(t) = int_0^oo x^{2k+1} H(x, t) dx``, which are even polynomials in
``t`` with coefficients in Q[pi^2], together with

    int int x^{2a+1} y^{2b+1} H(x+y, t) dx dy
        = (2a+1)! (2b+1)! / (2a+2b+3)! * F_{2a+2b+3}(t).

``V_{g,n}`` is homogeneous once ``L_j^2`` and ``pi^2`` both get weight one,
of weight ``3g-3+n``.  Internally the recursion runs on rational
coefficients only and attaches the pi powers at the end.
"""
from __future__ import annotations

import logging
import os
import threading
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, factorial
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple, Union

from .exactpoly import (
    PI2,
    PiScalar,
    VolumePolynomial,
    odd_derivative_factor,
    substitute_square,
)

__all__ = [
    "CACHE_ENV",
    "DEFAULT_MAX_DIM",
    "UnstableError",
    "VolumeTable",
    "base_case",
    "bernoulli",
    "zeta_even",
    "kernel_moment",
    "compute_volume",
    "volume",
    "volume_table_up_to",
    "dimension",
    "is_stable",
    "stable_keys",
]

log = logging.getLogger(__name__)

CACHE_ENV = "WPVOL_CACHE_DIR"
DEFAULT_MAX_DIM = 6

Key = Tuple[int, int]
Exps = Tuple[int, ...]
Coeffs = Dict[Exps, Fraction]


class UnstableError(ValueError):
    """Raised for ``(g, n)`` with ``2g - 2 + n <= 0``."""


def is_stable(g: int, n: int) -> bool:
    return g >= 0 and n >= 0 and 2 * g - 2 + n > 0


def dimension(g: int, n: int) -> int:
    """Complex dimension ``3g - 3 + n``, the weight of ``V_{g,n}``."""
    return 3 * g - 3 + n


def _check_key(g: int, n: int) -> None:
    if not is_stable(g, n):
        raise UnstableError(f"(g, n) = ({g}, {n}) is not stable: 2g-2+n must be positive")


def stable_keys(max_dim: int, min_n: int = 1) -> List[Key]:
    """All stable ``(g, n)`` with ``n >= min_n`` and ``3g-3+n <= max_dim``, by dimension then g."""
    keys = []
    for d in range(0, max_dim + 1):
        for g in range(0, d // 3 + 2):
            n = d - 3 * g + 3
            if n >= min_n and is_stable(g, n):
                keys.append((g, n))
    return keys


# -- kernel moments ---------------------------------------------------------


@lru_cache(maxsize=None)
def bernoulli(m: int) -> Fraction:
    """Bernoulli number ``B_m`` with ``B_1 = -1/2``."""
    if m < 0:
        raise ValueError("m must be >= 0")
    table = [Fraction(1)]
    for k in range(1, m + 1):
        table.append(-sum(comb(k + 1, j) * table[j] for j in range(k)) / (k + 1))
    return table[m]


@lru_cache(maxsize=None)
def zeta_even(i: int) -> Fraction:
    """Rational ``c`` with ``zeta(2i) = c * pi^(2i)``; ``zeta(0) = -1/2``."""
    if i == 0:
        return Fraction(-1, 2)
    return (-1) ** (i + 1) * bernoulli(2 * i) * 2 ** (2 * i - 1) / factorial(2 * i)


@lru_cache(maxsize=None)
def _moment_coeffs(k: int) -> Tuple[Fraction, ...]:
    # entry m is the rational part of the t^(2m) coefficient; its pi power is 2(k+1-m)
    out = []
    for m in range(k + 2):
        i = k + 1 - m
        out.append(factorial(2 * k + 1) * zeta_even(i) * (2 ** (2 * i + 1) - 4)
                   / factorial(2 * m))
    return tuple(out)


def kernel_moment(k: int) -> VolumePolynomial:
    """``F_{2k+1}(t)`` as a one-variable polynomial in ``t^2``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    coeffs = {(m,): c for m, c in enumerate(_moment_coeffs(k))}
    return VolumePolynomial.from_homogeneous(None, 1, coeffs, k + 1)


@lru_cache(maxsize=None)
def _pair_factor(a: int, b: int) -> Fraction:
    return Fraction(factorial(2 * a + 1) * factorial(2 * b + 1), factorial(2 * a + 2 * b + 3))


# -- base cases -------------------------------------------------------------


def base_case(g: int, n: int) -> VolumePolynomial:
    """``V_{0,3} = 1`` and ``V_{1,1} = (L^2 + 4 pi^2)/48``."""
    if (g, n) == (0, 3):
        return VolumePolynomial.constant(3, 1, g=0)
    if (g, n) == (1, 1):
        return VolumePolynomial(1, {(1,): Fraction(1, 48), (0,): PI2 / 12}, g=1)
    raise ValueError(f"({g}, {n}) is not a base case")


# -- recursion --------------------------------------------------------------


def _rational_part(poly: VolumePolynomial) -> Coeffs:
    d = dimension(poly.g, poly.n)
    out = {}
    for exps, c in poly.terms.items():
        (p, q), = c.terms.items()
        if p != 2 * (d - sum(exps)):
            raise ValueError(f"V_{{{poly.g},{poly.n}}} is not homogeneous of weight {d}")
        out[exps] = q
    return out


def _by_first(coeffs: Coeffs) -> List[Tuple[int, Exps, Fraction]]:
    return [(e[0], e[1:], c) for e, c in coeffs.items()]


def _recurse(g: int, n: int, lookup) -> Coeffs:
    """Rational coefficients of ``V_{g,n}``; ``lookup(g, n)`` returns lower coefficient maps."""
    acc: Coeffs = {}

    def bump(exps: Exps, value: Fraction) -> None:
        acc[exps] = acc.get(exps, Fraction(0)) + value

    half = Fraction(1, 2)
    others = n - 1

    # non-separating cut: V_{g-1,n+1}(x, y, L_2..L_n)
    if g >= 1 and is_stable(g - 1, n + 1):
        for e, c in lookup(g - 1, n + 1).items():
            a, b, rest = e[0], e[1], e[2:]
            kern = _moment_coeffs(a + b + 1)
            pre = half * c * _pair_factor(a, b)
            for m, f in enumerate(kern):
                bump((m,) + rest, pre * f)

    # separating cuts: V_{g1}(x, L_I) V_{g2}(y, L_J), ordered over (g1, I)
    positions = list(range(others))
    for g1 in range(g + 1):
        g2 = g - g1
        for size in range(others + 1):
            n1, n2 = size + 1, others - size + 1
            if not (is_stable(g1, n1) and is_stable(g2, n2)):
                continue
            left = _by_first(lookup(g1, n1))
            right = _by_first(lookup(g2, n2))
            for I in combinations(positions, size):
                J = [p for p in positions if p not in I]
                for a, e1, c1 in left:
                    for b, e2, c2 in right:
                        rest = [0] * others
                        for p, k in zip(I, e1):
                            rest[p] = k
                        for p, k in zip(J, e2):
                            rest[p] = k
                        rest = tuple(rest)
                        pre = half * c1 * c2 * _pair_factor(a, b)
                        for m, f in enumerate(_moment_coeffs(a + b + 1)):
                            bump((m,) + rest, pre * f)

    # boundary terms: L_1 and L_j bound a pair of pants with x
    if n >= 2 and is_stable(g, n - 1):
        lower = _by_first(lookup(g, n - 1))
        for j in range(others):
            for a, e, c in lower:
                # e lists the exponents of the n-2 variables other than L_1, L_j
                kern = _moment_coeffs(a)
                for m, f in enumerate(kern):
                    base = c * f
                    for p in range(m + 1):
                        rest = list(e[:j]) + [m - p] + list(e[j:])
                        # the two kernel shifts double the even binomial terms; the 1/2 cancels it
                        bump((p,) + tuple(rest), base * comb(2 * m, 2 * p))

    # d/dL_1 (L_1 V) = sum A_k L_1^{2k} ... integrates to V = sum A_k L_1^{2k} / (2k+1)
    return {e: v / (2 * e[0] + 1) for e, v in acc.items() if v}


def _closed_volume(g: int, key_table) -> VolumePolynomial:
    # V_{g,0} from the derivative relation at L = 2 pi i with n = 0
    q = odd_derivative_factor(key_table(g, 1), 1)
    value = substitute_square(q, 1, -4 * PI2).coefficient(())
    return VolumePolynomial.constant(0, value / (2 * g - 2), g=g)


def compute_volume(g: int, n: int, table: Optional["VolumeTable"] = None) -> VolumePolynomial:
    """``V_{g,n}``, filling ``table`` with every lower entry it needs.

    ``n = 0`` is accepted for ``g >= 2``; the constant ``V_{g,0}`` is fixed
    by ``dV_{g,1}/dL (2 pi i) = 2 pi i (2g-2) V_{g,0}``.
    """
    _check_key(g, n)
    if table is None:
        table = _DEFAULT_TABLE
    return table.get(g, n)


class VolumeTable:
    """Memoization store for ``V_{g,n}`` with an optional on-disk JSON cache.

    Cache files are named ``vol_g{g}_n{n}.json`` and hold the canonical
    serialization.  Unreadable or inconsistent files are logged and
    recomputed.
    """

    def __init__(self, cache_dir: Optional[Union[str, Path]] = None, max_dim: Optional[int] = None):
        self.cache_dir = Path(cache_dir) if cache_dir is not None else None
        self.max_dim = max_dim
        self._entries: Dict[Key, VolumePolynomial] = {}
        self._rational: Dict[Key, Coeffs] = {}
        self._lock = threading.RLock()

    def __contains__(self, key: Key) -> bool:
        return key in self._entries

    def __iter__(self) -> Iterator[Key]:
        return iter(sorted(self._entries, key=lambda k: (dimension(*k), k)))

    def __len__(self) -> int:
        return len(self._entries)

    def keys(self, dim: Optional[int] = None) -> List[Key]:
        return [k for k in self if dim is None or dimension(*k) == dim]

    def items(self):
        return [(k, self._entries[k]) for k in self]

    def __getitem__(self, key: Key) -> VolumePolynomial:
        return self.get(*key)

    def cache_path(self, g: int, n: int) -> Optional[Path]:
        if self.cache_dir is None:
            return None
        return self.cache_dir / f"vol_g{g}_n{n}.json"

    def get(self, g: int, n: int) -> VolumePolynomial:
        _check_key(g, n)
        key = (g, n)
        found = self._entries.get(key)
        if found is not None:
            return found
        if self.max_dim is not None and dimension(g, n) > self.max_dim:
            raise ValueError(f"V_{{{g},{n}}} has dimension {dimension(g, n)} > max_dim={self.max_dim}")
        with self._lock:
            if key in self._entries:
                return self._entries[key]
            poly = self._load(g, n)
            if poly is None:
                poly = self._compute(g, n)
                self._store(poly)
            self._entries[key] = poly
            return poly

    def _coeffs(self, g: int, n: int) -> Coeffs:
        key = (g, n)
        if key not in self._rational:
            self._rational[key] = _rational_part(self.get(g, n))
        return self._rational[key]

    def _compute(self, g: int, n: int) -> VolumePolynomial:
        if (g, n) in ((0, 3), (1, 1)):
            return base_case(g, n)
        if n == 0:
            return _closed_volume(g, self.get)
        # build lower entries in increasing dimension; keeps recursion depth small
        for lg, ln in stable_keys(dimension(g, n) - 1):
            if lg <= g:
                self.get(lg, ln)
        log.debug("computing V_{%d,%d}", g, n)
        coeffs = _recurse(g, n, self._coeffs)
        poly = VolumePolynomial.from_homogeneous(g, n, coeffs, dimension(g, n))
        if not poly.is_symmetric():
            raise ArithmeticError(f"recursion produced a non-symmetric V_{{{g},{n}}}")
        return poly

    def _load(self, g: int, n: int) -> Optional[VolumePolynomial]:
        path = self.cache_path(g, n)
        if path is None or not path.exists():
            return None
        try:
            text = path.read_text()
            poly = VolumePolynomial.from_json(text)
            if (poly.g, poly.n) != (g, n):
                raise ValueError(f"file holds ({poly.g}, {poly.n})")
            if n and not poly.is_symmetric():
                raise ValueError("stored polynomial is not symmetric")
            if poly.to_json() != text:
                raise ValueError("not in canonical form")
        except (ValueError, KeyError, TypeError) as exc:
            log.warning("cache file %s is corrupt (%s); recomputing", path, exc)
            return None
        return poly

    def _store(self, poly: VolumePolynomial) -> None:
        path = self.cache_path(poly.g, poly.n)
        if path is None:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(f".tmp{os.getpid()}")
        tmp.write_text(poly.to_json())
        os.replace(tmp, path)


def _env_cache_dir() -> Optional[Path]:
    value = os.environ.get(CACHE_ENV)
    return Path(value) if value else None


_DEFAULT_TABLE = VolumeTable(cache_dir=_env_cache_dir())


def volume(g: int, n: int) -> VolumePolynomial:
    """``V_{g,n}`` from the process-wide table (disk cache from ``$WPVOL_CACHE_DIR`` if set)."""
    return compute_volume(g, n)


def volume_table_up_to(max_dim: int, cache_dir: Optional[Union[str, Path]] = None,
                       with_closed: bool = True) -> VolumeTable:
    """Every stable ``V_{g,n}`` with ``n >= 1`` and ``3g-3+n <= max_dim``.

    With ``with_closed`` the boundaryless constants ``V_{g,0}`` whose
    ``V_{g,1}`` is in range are added too.
    """
    if max_dim < 1:
        raise ValueError("max_dim must be >= 1")
    if cache_dir is None:
        cache_dir = _env_cache_dir()
    table = VolumeTable(cache_dir=cache_dir, max_dim=max_dim)
    for g, n in stable_keys(max_dim):
        table.get(g, n)
    if with_closed:
        for g in range(2, max_dim // 3 + 2):
            if dimension(g, 1) <= max_dim:
                table.get(g, 0)
    return table
