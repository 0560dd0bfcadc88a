"""Exact polynomials in squared boundary lengths with coefficients in Q[pi^2].

Every volume polynomial lives in ``Q[pi^2][L_1^2, ..., L_n^2]``.  The symbol
pi only ever appears as the formal generator ``pi^2``; it is turned into a
float in exactly one place, :func:`numeric_eval`.

Variables are numbered from 1, matching the usual ``L_1, ..., L_n`` labels.
A monomial key is the exponent vector ``(k_1, ..., k_n)`` standing for
``prod (L_j^2)^{k_j}``.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

__all__ = [
    "PiScalar",
    "PI2",
    "VolumePolynomial",
    "add",
    "multiply",
    "substitute_square",
    "integrate_against_length",
    "odd_derivative_factor",
    "numeric_eval",
    "exact_eval",
]

Exps = Tuple[int, ...]
ScalarLike = Union["PiScalar", int, Fraction]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def _format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


class PiScalar:
    """An element of Q[pi^2]: a finite sum of ``c_k * pi^(2k)``.

    Instances are immutable and hashable.  Keys of :attr:`terms` are the
    actual (even) exponents of pi.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[int, object]] = None):
        clean: Dict[int, Fraction] = {}
        if terms:
            for p, c in terms.items():
                if p < 0 or p % 2:
                    raise ValueError(f"pi exponent must be even and >= 0, got {p}")
                c = _as_fraction(c)
                if c:
                    clean[p] = clean.get(p, Fraction(0)) + c
                    if not clean[p]:
                        del clean[p]
        self._terms = clean
        self._hash = None

    @classmethod
    def coerce(cls, value: ScalarLike) -> "PiScalar":
        if isinstance(value, PiScalar):
            return value
        return cls({0: _as_fraction(value)})

    @classmethod
    def monomial(cls, coeff, pi_pow: int) -> "PiScalar":
        return cls({pi_pow: coeff})

    @property
    def terms(self) -> Dict[int, Fraction]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, PiScalar):
            return self._terms == other._terms
        try:
            return self._terms == PiScalar.coerce(other)._terms
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other):
        try:
            other = PiScalar.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for p, c in other._terms.items():
            out[p] = out.get(p, Fraction(0)) + c
        return PiScalar(out)

    __radd__ = __add__

    def __neg__(self):
        return PiScalar({p: -c for p, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = PiScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return PiScalar.coerce(other) - self

    def __mul__(self, other):
        try:
            other = PiScalar.coerce(other)
        except TypeError:
            return NotImplemented
        out: Dict[int, Fraction] = {}
        for p, c in self._terms.items():
            for q, d in other._terms.items():
                out[p + q] = out.get(p + q, Fraction(0)) + c * d
        return PiScalar(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        # division only by exact rationals; Q[pi^2] is not a field
        q = _as_fraction(other)
        return PiScalar({p: c / q for p, c in self._terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not in Q[pi^2]")
        out = PiScalar({0: 1})
        for _ in range(k):
            out = out * self
        return out

    def __float__(self) -> float:
        return float(sum(float(c) * math.pi ** p for p, c in self._terms.items()))

    def is_nonnegative(self) -> bool:
        return all(c > 0 for c in self._terms.values())

    def __repr__(self) -> str:
        return f"PiScalar({str(self)!r})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for p, c in sorted(self._terms.items()):
            cs = str(c) if c.denominator == 1 else f"({c})"
            if p == 0:
                parts.append(str(c))
            else:
                parts.append(f"{cs}·π^{p}")
        return " + ".join(parts)


PI2 = PiScalar({2: 1})


class VolumePolynomial:
    """Polynomial in ``L_1^2, ..., L_n^2`` with :class:`PiScalar` coefficients.

    ``g`` is an optional tag: ``(g, n)`` identifies ``V_{g,n}`` when the
    polynomial is a volume, and ``g`` is ``None`` for intermediate
    polynomials produced along the way.
    """

    __slots__ = ("g", "n", "_terms")

    def __init__(self, n: int, terms: Optional[Mapping[Sequence[int], ScalarLike]] = None,
                 g: Optional[int] = None):
        if n < 0:
            raise ValueError("number of variables must be >= 0")
        clean: Dict[Exps, PiScalar] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(k) for k in exps)
            if len(exps) != n:
                raise ValueError(f"exponent vector {exps} does not have {n} entries")
            if any(k < 0 for k in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = PiScalar.coerce(c)
            if exps in clean:
                c = clean[exps] + c
            if c:
                clean[exps] = c
            else:
                clean.pop(exps, None)
        self.g = g
        self.n = n
        self._terms = clean

    # construction helpers

    @classmethod
    def constant(cls, n: int, value: ScalarLike, g: Optional[int] = None) -> "VolumePolynomial":
        return cls(n, {(0,) * n: value}, g=g)

    @classmethod
    def square(cls, n: int, j: int) -> "VolumePolynomial":
        """The polynomial ``L_j^2`` in ``n`` variables."""
        _check_index(n, j)
        exps = [0] * n
        exps[j - 1] = 1
        return cls(n, {tuple(exps): 1})

    @classmethod
    def from_homogeneous(cls, g: int, n: int, coeffs: Mapping[Exps, Fraction],
                         weight: int) -> "VolumePolynomial":
        """Attach ``pi^(2(weight - |k|))`` to each rational coefficient."""
        terms = {}
        for exps, c in coeffs.items():
            p = weight - sum(exps)
            if p < 0:
                raise ValueError(f"monomial {exps} exceeds weight {weight}")
            terms[exps] = PiScalar({2 * p: c})
        return cls(n, terms, g=g)

    # access

    @property
    def terms(self) -> Dict[Exps, PiScalar]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def coefficient(self, exps: Sequence[int]) -> PiScalar:
        return self._terms.get(tuple(exps), PiScalar())

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VolumePolynomial):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self._terms.items())))

    def retag(self, g: Optional[int]) -> "VolumePolynomial":
        out = VolumePolynomial(self.n, g=g)
        out._terms = dict(self._terms)
        return out

    # ring operations

    def __add__(self, other):
        if isinstance(other, VolumePolynomial):
            return add(self, other)
        return add(self, VolumePolynomial.constant(self.n, other))

    __radd__ = __add__

    def __neg__(self):
        return VolumePolynomial(self.n, {e: -c for e, c in self._terms.items()}, g=self.g)

    def __sub__(self, other):
        if isinstance(other, VolumePolynomial):
            return add(self, -other)
        return add(self, VolumePolynomial.constant(self.n, -PiScalar.coerce(other)))

    def __mul__(self, other):
        if isinstance(other, VolumePolynomial):
            return multiply(self, other)
        c = PiScalar.coerce(other)
        return VolumePolynomial(self.n, {e: v * c for e, v in self._terms.items()}, g=self.g)

    __rmul__ = __mul__

    def __truediv__(self, other):
        q = _as_fraction(other)
        return VolumePolynomial(self.n, {e: v / q for e, v in self._terms.items()}, g=self.g)

    # structure

    def permute(self, perm: Sequence[int]) -> "VolumePolynomial":
        """Rename variable ``i`` to ``perm[i-1]`` (both 1-based)."""
        if sorted(perm) != list(range(1, self.n + 1)):
            raise ValueError(f"{perm} is not a permutation of 1..{self.n}")
        out = {}
        for exps, c in self._terms.items():
            new = [0] * self.n
            for i, k in enumerate(exps):
                new[perm[i] - 1] = k
            out[tuple(new)] = c
        return VolumePolynomial(self.n, out, g=self.g)

    def embed(self, n: int, positions: Sequence[int]) -> "VolumePolynomial":
        """Place variable ``i`` of ``self`` at position ``positions[i-1]`` of an ``n``-variable ring."""
        if len(positions) != self.n or len(set(positions)) != self.n:
            raise ValueError("positions must list distinct targets, one per variable")
        for p in positions:
            _check_index(n, p)
        out = {}
        for exps, c in self._terms.items():
            new = [0] * n
            for i, k in enumerate(exps):
                new[positions[i] - 1] = k
            out[tuple(new)] = c
        return VolumePolynomial(n, out)

    def is_symmetric(self) -> bool:
        """Exact check that the monomial map is invariant under all variable permutations."""
        # adjacent transpositions generate the symmetric group
        for i in range(self.n - 1):
            for exps, c in self._terms.items():
                swapped = exps[:i] + (exps[i + 1], exps[i]) + exps[i + 2:]
                if self._terms.get(swapped) != c:
                    return False
        return True

    def weight(self) -> int:
        """Largest ``|k| + pi_pow/2`` over all terms (0 for the zero polynomial)."""
        best = 0
        for exps, c in self._terms.items():
            for p in c.terms:
                best = max(best, sum(exps) + p // 2)
        return best

    def is_homogeneous(self, weight: int) -> bool:
        return all(sum(e) + p // 2 == weight for e, c in self._terms.items() for p in c.terms)

    def coefficients_nonnegative(self) -> bool:
        return all(c.is_nonnegative() for c in self._terms.values())

    # evaluation

    def __call__(self, *lengths) -> float:
        return numeric_eval(self, lengths)

    # serialization

    def to_dict(self) -> dict:
        rows = []
        for exps in sorted(self._terms):
            for p, c in sorted(self._terms[exps].terms.items()):
                rows.append({"exps": list(exps), "pi_pow": p, "coeff": _format_fraction(c)})
        return {"g": self.g, "n": self.n, "terms": rows}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping) -> "VolumePolynomial":
        n = int(data["n"])
        g = data.get("g")
        terms: Dict[Exps, Dict[int, Fraction]] = {}
        for row in data["terms"]:
            exps = tuple(int(k) for k in row["exps"])
            if len(exps) != n:
                raise ValueError(f"term {row} does not match n={n}")
            slot = terms.setdefault(exps, {})
            p = int(row["pi_pow"])
            if p in slot:
                raise ValueError(f"duplicate term {row}")
            slot[p] = Fraction(row["coeff"])
        return cls(n, {e: PiScalar(t) for e, t in terms.items()},
                   g=None if g is None else int(g))

    @classmethod
    def from_json(cls, text: str) -> "VolumePolynomial":
        return cls.from_dict(json.loads(text))

    def __repr__(self) -> str:
        tag = f"V_{{{self.g},{self.n}}}" if self.g is not None else f"n={self.n}"
        return f"<VolumePolynomial {tag}: {self.to_text()}>"

    def to_text(self) -> str:
        """Human-readable rendering; permutation orbits with a shared coefficient are grouped."""
        if not self._terms:
            return "0"
        orbits: Dict[Exps, List[Exps]] = {}
        for exps in sorted(self._terms):
            orbits.setdefault(tuple(sorted(exps, reverse=True)), []).append(exps)
        chunks = []
        done = set()
        for exps in sorted(self._terms):
            if exps in done:
                continue
            c = self._terms[exps]
            orbit = orbits[tuple(sorted(exps, reverse=True))]
            if len(orbit) == _orbit_size(exps) and all(self._terms[o] == c for o in orbit):
                members = sorted(orbit, reverse=True)
            else:
                members = [exps]
            done.update(members)
            chunks.append(_render_term(c, [_render_monomial(m) for m in members]))
        return " + ".join(chunks)


def _orbit_size(exps: Exps) -> int:
    size = math.factorial(len(exps))
    for k in set(exps):
        size //= math.factorial(exps.count(k))
    return size


def _render_monomial(exps: Exps) -> str:
    parts = []
    for i, k in enumerate(exps, start=1):
        if k:
            parts.append(f"L{i}^{2 * k}")
    return "*".join(parts)


def _render_term(c: PiScalar, monomials: Sequence[str]) -> str:
    if monomials == [""]:
        return str(c)
    body = monomials[0] if len(monomials) == 1 else "(" + "+".join(monomials) + ")"
    if c == 1:
        return body
    items = c.items()
    if len(items) == 1:
        p, q = items[0]
        qs = str(q) if q.denominator == 1 else f"({q})"
        prefix = qs if p == 0 else (f"π^{p}" if q == 1 else f"{qs}·π^{p}")
    else:
        prefix = f"({c})"
    return f"{prefix}·{body}"


def _check_index(n: int, j: int) -> None:
    if not 1 <= j <= n:
        raise IndexError(f"variable index {j} out of range 1..{n}")


def add(p: VolumePolynomial, q: VolumePolynomial, g: Optional[int] = None) -> VolumePolynomial:
    """Exact coefficient-wise sum; the result carries tag ``g``."""
    if p.n != q.n:
        raise ValueError(f"cannot add polynomials in {p.n} and {q.n} variables")
    out = dict(p._terms)
    for e, c in q._terms.items():
        out[e] = out[e] + c if e in out else c
    return VolumePolynomial(p.n, out, g=g)


def multiply(p: VolumePolynomial, q: VolumePolynomial, g: Optional[int] = None) -> VolumePolynomial:
    """Exact product of two polynomials over the same variables.

    Products of polynomials in disjoint variable sets are formed by first
    moving each factor into a common ring with :meth:`VolumePolynomial.embed`.
    """
    if p.n != q.n:
        raise ValueError(f"cannot multiply polynomials in {p.n} and {q.n} variables; embed first")
    out: Dict[Exps, PiScalar] = {}
    for e1, c1 in p._terms.items():
        for e2, c2 in q._terms.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            c = c1 * c2
            out[e] = out[e] + c if e in out else c
    return VolumePolynomial(p.n, out, g=g)


def substitute_square(p: VolumePolynomial, j: int, value: ScalarLike) -> VolumePolynomial:
    """Set ``L_j^2 := value`` and drop variable ``j``.

    ``value = -4*pi^2`` realises ``L_j = 2*pi*i``.
    """
    _check_index(p.n, j)
    value = PiScalar.coerce(value)
    powers = [PiScalar({0: 1})]
    out: Dict[Exps, PiScalar] = {}
    for exps, c in p._terms.items():
        k = exps[j - 1]
        while len(powers) <= k:
            powers.append(powers[-1] * value)
        rest = exps[: j - 1] + exps[j:]
        term = c * powers[k]
        out[rest] = out[rest] + term if rest in out else term
    return VolumePolynomial(p.n - 1, out)


def integrate_against_length(p: VolumePolynomial, k: int) -> VolumePolynomial:
    """Return ``int_0^{L_k} x * p(..., x, ...) dx`` as an even polynomial.

    Termwise ``int_0^L x (x^2)^m dx = (L^2)^(m+1) / (2m+2)``.
    """
    _check_index(p.n, k)
    out = {}
    for exps, c in p._terms.items():
        m = exps[k - 1]
        e = list(exps)
        e[k - 1] = m + 1
        out[tuple(e)] = c / (2 * m + 2)
    return VolumePolynomial(p.n, out)


def odd_derivative_factor(p: VolumePolynomial, j: int) -> VolumePolynomial:
    """The even polynomial ``Q`` with ``dp/dL_j = L_j * Q``."""
    _check_index(p.n, j)
    out = {}
    for exps, c in p._terms.items():
        m = exps[j - 1]
        if m == 0:
            continue
        e = list(exps)
        e[j - 1] = m - 1
        out[tuple(e)] = c * (2 * m)
    return VolumePolynomial(p.n, out)


def exact_eval(p: VolumePolynomial, squares: Sequence[ScalarLike]) -> PiScalar:
    """Substitute exact values of every ``L_j^2`` and return the resulting element of Q[pi^2]."""
    if len(squares) != p.n:
        raise ValueError(f"need {p.n} values, got {len(squares)}")
    q = p
    for value in reversed(squares):
        q = substitute_square(q, q.n, value)
    return q.coefficient(())


def _length_square(label) -> complex:
    if hasattr(label, "length_squared"):
        return label.length_squared()
    return complex(label) ** 2


def numeric_eval(p: VolumePolynomial, labels: Iterable) -> float:
    """Evaluate in double precision.

    Each label is a boundary label (geodesic, cusp or cone) or a number
    ``L``; a complex ``L = i*theta`` gives ``L^2 = -theta^2``.
    """
    squares = [_length_square(lab) for lab in labels]
    if len(squares) != p.n:
        raise ValueError(f"need {p.n} labels, got {len(squares)}")
    total = 0.0
    for exps, c in p._terms.items():
        term = complex(float(c))
        for s, k in zip(squares, exps):
            if k:
                term *= s ** k
        total += term
    return float(total.real)
