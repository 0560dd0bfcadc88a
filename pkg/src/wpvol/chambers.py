"""Classification of boundary data: non-emptiness, Hassett weights, merging, chambers.

Cone angles may be given as floats or exactly as rational multiples of pi
(:meth:`BoundaryLabel.cone_pi`).  When every cone in a configuration is
exact, all inequalities are decided in exact rational arithmetic, so walls
such as ``theta_j + theta_k = 2 pi`` are detected without rounding.
"""
from __future__ import annotations

import csv
import enum
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .exactpoly import VolumePolynomial, numeric_eval
from .volumes import UnstableError, is_stable, volume

__all__ = [
    "BoundaryLabel",
    "ChamberReport",
    "Validity",
    "ScanReport",
    "MAX_MERGE_CONES",
    "parse_label",
    "parse_labels",
    "parse_angle",
    "nonempty",
    "hassett_weights",
    "mergeable_subsets",
    "in_main_chamber",
    "classify_validity",
    "positivity_scan",
    "sample_main_chamber",
    "find_negative_example",
]

TWO_PI = 2 * math.pi
MAX_MERGE_CONES = 20
# relative tolerance for float walls and for the 2 pi limit flag
WALL_TOL = 1e-12
LIMIT_TOL = 1e-6

Number = Union[float, Fraction]


@dataclass(frozen=True)
class BoundaryLabel:
    """One boundary component: a geodesic of length ``ell``, a cusp, or a cone of angle ``theta``.

    For exact cones ``pi_multiple`` holds ``q`` with ``theta = q * pi``.
    """

    kind: str
    magnitude: Optional[float] = None
    pi_multiple: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind == "cusp":
            if self.magnitude not in (None, 0):
                raise ValueError("a cusp has no magnitude")
        elif self.kind == "geodesic":
            if self.magnitude is None or not self.magnitude > 0:
                raise ValueError(f"geodesic length must be > 0, got {self.magnitude}")
        elif self.kind == "cone":
            if self.pi_multiple is not None:
                if not 0 < self.pi_multiple < 2:
                    raise ValueError(f"cone angle {self.pi_multiple}*pi is outside (0, 2pi)")
            elif self.magnitude is None or not 0 < self.magnitude < TWO_PI:
                raise ValueError(f"cone angle must lie in (0, 2pi), got {self.magnitude}")
        else:
            raise ValueError(f"unknown boundary kind {self.kind!r}")

    @classmethod
    def geodesic(cls, length: float) -> "BoundaryLabel":
        return cls("geodesic", float(length))

    @classmethod
    def cusp(cls) -> "BoundaryLabel":
        return cls("cusp")

    @classmethod
    def cone(cls, theta: float) -> "BoundaryLabel":
        return cls("cone", float(theta))

    @classmethod
    def cone_pi(cls, q) -> "BoundaryLabel":
        q = Fraction(q)
        return cls("cone", float(q) * math.pi, q)

    @property
    def is_cone(self) -> bool:
        return self.kind == "cone"

    @property
    def theta(self) -> float:
        """Cone angle (0 for cusps and geodesics)."""
        return self.magnitude if self.kind == "cone" else 0.0

    def length_squared(self) -> float:
        """``L^2`` for the substitution ``L = ell``, ``0`` or ``i theta``."""
        if self.kind == "geodesic":
            return self.magnitude ** 2
        if self.kind == "cone":
            return -self.magnitude ** 2
        return 0.0

    def __str__(self) -> str:
        if self.kind == "cusp":
            return "cusp"
        if self.kind == "geodesic":
            return repr(self.magnitude)
        if self.pi_multiple is not None:
            return f"{self.pi_multiple}pi i"
        return f"{self.magnitude!r}i"


_PI_ANGLE = re.compile(r"^\s*(?:(?P<num>\d+(?:\.\d*)?)(?:/(?P<den>\d+))?\s*\*?)?\s*pi\s*$")


def parse_angle(text: str) -> Tuple[float, Optional[Fraction]]:
    """Parse ``"2.5"``, ``"pi"``, ``"3/2pi"``, ``"1.9pi"`` or ``"1/2*pi"`` into (float, exact multiple of pi or None)."""
    m = _PI_ANGLE.match(text)
    if m:
        q = Fraction(m["num"] or 1) / int(m["den"] or 1)
        return float(q) * math.pi, q
    return float(text), None


def parse_label(text: str) -> BoundaryLabel:
    """Label grammar: ``<float>`` geodesic (``0`` is a cusp), ``cusp``, ``<float>i`` or ``<p>/<q>pi i`` cone."""
    t = text.strip().lower()
    if t == "cusp":
        return BoundaryLabel.cusp()
    if t.endswith("i") and not t.endswith("pi"):
        body = t[:-1].rstrip().rstrip("*").rstrip()
        theta, q = parse_angle(body)
        return BoundaryLabel.cone_pi(q) if q is not None else BoundaryLabel.cone(theta)
    try:
        length = float(t)
    except ValueError:
        raise ValueError(f"cannot parse boundary label {text!r}") from None
    return BoundaryLabel.cusp() if length == 0 else BoundaryLabel.geodesic(length)


def parse_labels(text: str) -> List[BoundaryLabel]:
    return [parse_label(part) for part in text.split(",") if part.strip()]


# -- exact/float angle arithmetic -------------------------------------------


def _units(labels: Sequence[BoundaryLabel]) -> Tuple[List[Number], Number, bool]:
    """Cone angles in a common unit, the value of 2 pi in that unit, and whether it is exact."""
    cones = [lab for lab in labels if lab.is_cone]
    if all(lab.pi_multiple is not None for lab in cones):
        return [lab.pi_multiple if lab.is_cone else Fraction(0) for lab in labels], Fraction(2), True
    return [lab.theta for lab in labels], TWO_PI, False


def _compare(lhs: Number, rhs: Number, exact: bool) -> int:
    """-1, 0, 1 for lhs < rhs, lhs == rhs (within wall tolerance for floats), lhs > rhs."""
    if exact:
        return (lhs > rhs) - (lhs < rhs)
    if abs(lhs - rhs) <= WALL_TOL * max(1.0, abs(rhs)):
        return 0
    return 1 if lhs > rhs else -1


def _to_float(x: Number, exact: bool) -> float:
    return float(x) * math.pi if exact else float(x)


# -- operations --------------------------------------------------------------


def _check_stable(g: int, n: int) -> None:
    if not is_stable(g, n):
        raise UnstableError(f"(g, n) = ({g}, {n}) is not stable")


def nonempty(g: int, labels: Sequence[BoundaryLabel]) -> bool:
    """Whether the moduli space is non-empty: ``sum theta_j < 2 pi (2g - 2 + n)``."""
    n = len(labels)
    _check_stable(g, n)
    vals, two_pi, exact = _units(labels)
    return _compare(sum(vals), two_pi * (2 * g - 2 + n), exact) < 0


def hassett_weights(labels: Sequence[BoundaryLabel]) -> List[Number]:
    """Weights ``a_j = 1 - theta_j / 2 pi`` (exact Fractions when all cones are exact)."""
    if any(lab.kind == "geodesic" for lab in labels):
        raise ValueError("Hassett weights are only defined for cusps and cone points")
    vals, two_pi, exact = _units(labels)
    return [1 - v / two_pi for v in vals]


def mergeable_subsets(labels: Sequence[BoundaryLabel]) -> List[Tuple[Tuple[int, ...], float]]:
    """Subsets ``S`` of cones (1-based, ``|S| >= 2``) with ``sum_S theta > 2 pi (|S| - 1)``.

    Each comes with its merged angle ``theta_S = sum_S theta - 2 pi (|S| - 1)``.
    The Hassett criterion ``sum_S a_j < 1`` is checked alongside and must agree.
    """
    cone_idx = [i for i, lab in enumerate(labels, start=1) if lab.is_cone]
    if len(cone_idx) > MAX_MERGE_CONES:
        raise ValueError(f"more than {MAX_MERGE_CONES} cone points; subset enumeration is capped")
    vals, two_pi, exact = _units(labels)
    weights = [1 - v / two_pi for v in vals]
    out = []
    for size in range(2, len(cone_idx) + 1):
        for S in combinations(cone_idx, size):
            total = sum(vals[i - 1] for i in S)
            merge = _compare(total, two_pi * (size - 1), exact) > 0
            hassett = _compare(sum(weights[i - 1] for i in S), 1, exact) < 0
            if merge != hassett:
                raise ArithmeticError(f"merging and Hassett criteria disagree on {S}")
            if merge:
                out.append((S, _to_float(total - two_pi * (size - 1), exact)))
    return out


def in_main_chamber(labels: Sequence[BoundaryLabel]) -> bool:
    """Every pair of cone angles sums below ``2 pi``; geodesics put a configuration outside."""
    if any(lab.kind == "geodesic" for lab in labels):
        return False
    vals, two_pi, exact = _units(labels)
    cones = [vals[i] for i, lab in enumerate(labels) if lab.is_cone]
    return all(_compare(a + b, two_pi, exact) < 0 for a, b in combinations(cones, 2))


def _small_angles(labels: Sequence[BoundaryLabel]) -> bool:
    vals, two_pi, exact = _units(labels)
    return all(_compare(v, two_pi / 2, exact) < 0 for v, lab in zip(vals, labels) if lab.is_cone)


def _on_wall(g: int, labels: Sequence[BoundaryLabel]) -> bool:
    vals, two_pi, exact = _units(labels)
    n = len(labels)
    if _compare(sum(vals), two_pi * (2 * g - 2 + n), exact) == 0:
        return True
    cones = [vals[i] for i, lab in enumerate(labels) if lab.is_cone]
    return any(_compare(a + b, two_pi, exact) == 0 for a, b in combinations(cones, 2))


class Validity(str, enum.Enum):
    VALID = "Valid"
    VALID_SMALL_ANGLE = "ValidSmallAngle"
    VALID_MAIN_CHAMBER = "ValidMainChamber"
    UNKNOWN = "Unknown"


@dataclass
class ChamberReport:
    g: int
    labels: List[BoundaryLabel]
    nonempty: bool
    main_chamber: bool
    small_angles: bool
    mergeable_subsets: List[Tuple[Tuple[int, ...], float]]
    hassett_weights: Optional[List[float]]
    validity: Validity
    limit_zero: bool = False
    on_wall: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def is_volume(self) -> bool:
        """True when evaluating ``V_{g,n}`` is known to give the actual volume."""
        return self.nonempty and self.validity is not Validity.UNKNOWN

    def to_dict(self) -> dict:
        return {
            "g": self.g,
            "n": len(self.labels),
            "labels": [str(lab) for lab in self.labels],
            "nonempty": self.nonempty,
            "main_chamber": self.main_chamber,
            "small_angles": self.small_angles,
            "mergeable_subsets": [{"subset": list(S), "theta_S": th}
                                  for S, th in self.mergeable_subsets],
            "hassett_weights": (None if self.hassett_weights is None
                                else [float(a) for a in self.hassett_weights]),
            "validity": self.validity.value,
            "limit_zero": self.limit_zero,
            "on_wall": self.on_wall,
            "notes": list(self.notes),
        }


def classify_validity(g: int, labels: Sequence[BoundaryLabel]) -> ChamberReport:
    """Decide whether evaluating ``V_{g,n}`` at ``labels`` is a genuine volume.

    * ``Valid``: geodesics and cusps only.
    * ``ValidSmallAngle``: every cone angle is strictly below pi.
    * ``ValidMainChamber``: cusps and cones only, pairwise cone sums below 2 pi.
    * ``Unknown``: anything else.

    ``limit_zero`` marks a cone angle within ``LIMIT_TOL`` of 2 pi with only
    cusps and cones around it, where the volume tends to zero.  An empty
    moduli space is reported through ``nonempty``, not as an error.
    """
    labels = list(labels)
    n = len(labels)
    _check_stable(g, n)
    has_geodesic = any(lab.kind == "geodesic" for lab in labels)
    has_cone = any(lab.is_cone for lab in labels)
    main = in_main_chamber(labels)
    small = _small_angles(labels)
    notes = []

    if not has_cone:
        verdict = Validity.VALID
    elif small:
        verdict = Validity.VALID_SMALL_ANGLE
    elif main:
        verdict = Validity.VALID_MAIN_CHAMBER
    else:
        verdict = Validity.UNKNOWN
        if has_geodesic:
            notes.append("geodesic boundary together with a cone angle above pi")
        else:
            notes.append("outside the main chamber theta_j + theta_k < 2 pi")

    limit = (not has_geodesic) and any(
        lab.is_cone and TWO_PI - lab.theta < LIMIT_TOL for lab in labels)
    ne = nonempty(g, labels)
    if not ne:
        notes.append("moduli space is empty: sum of cone angles too large")
    merges = mergeable_subsets(labels)
    weights = None if has_geodesic else hassett_weights(labels)
    return ChamberReport(g, labels, ne, main, small, merges, weights, verdict,
                         limit_zero=limit, on_wall=_on_wall(g, labels), notes=notes)


# -- sampling ----------------------------------------------------------------


def sample_main_chamber(g: int, n: int, size: int, rng: np.random.Generator,
                        batch: int = 65536) -> np.ndarray:
    """Uniform samples from ``{theta in [0, 2pi)^n : theta_j + theta_k < 2pi, sum < 2pi(2g-2+n)}``."""
    _check_stable(g, n)
    bound = TWO_PI * (2 * g - 2 + n)
    out = []
    have = 0
    while have < size:
        th = rng.uniform(0.0, TWO_PI, size=(batch, n))
        top2 = np.sort(th, axis=1)[:, -2:].sum(axis=1) if n >= 2 else np.zeros(batch)
        keep = th[(top2 < TWO_PI) & (th.sum(axis=1) < bound) & (th > 0).all(axis=1)]
        out.append(keep)
        have += len(keep)
    return np.concatenate(out)[:size]


def _vectorized(poly: VolumePolynomial):
    exps = np.array([e for e, _ in poly.items()], dtype=int).reshape(-1, poly.n)
    coeffs = np.array([float(c) for _, c in poly.items()])

    def evaluate(squares: np.ndarray) -> np.ndarray:
        # squares: (samples, n)
        mono = np.prod(squares[:, None, :] ** exps[None, :, :], axis=2)
        return mono @ coeffs

    return evaluate


@dataclass
class ScanReport:
    g: int
    n: int
    samples: int
    seed: int
    min_value: float
    argmin: List[float]
    violations: List[Tuple[List[float], float]]
    thetas: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def write_csv(self, stream) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow([f"theta{j}" for j in range(1, self.n + 1)] + ["value"])
        for th, v in zip(self.thetas, self.values):
            writer.writerow([repr(float(t)) for t in th] + [repr(float(v))])


def positivity_scan(g: int, n: int, samples: int = 10_000, seed: int = 0,
                    poly: Optional[VolumePolynomial] = None, chunks: int = 8) -> ScanReport:
    """Evaluate ``V_{g,n}(i theta)`` on uniform main-chamber samples and collect non-positive values.

    The sample stream is split into ``chunks`` independent child generators
    of ``seed``, so results do not depend on how chunks are scheduled.
    """
    _check_stable(g, n)
    poly = poly if poly is not None else volume(g, n)
    evaluate = _vectorized(poly)
    children = np.random.SeedSequence(seed).spawn(chunks)
    sizes = [samples // chunks + (i < samples % chunks) for i in range(chunks)]
    thetas = np.concatenate([
        sample_main_chamber(g, n, k, np.random.default_rng(child))
        for child, k in zip(children, sizes)])
    values = evaluate(-thetas ** 2)
    bad = np.flatnonzero(values <= 0)
    i = int(np.argmin(values))
    return ScanReport(g, n, samples, seed, float(values[i]), thetas[i].tolist(),
                      [(thetas[k].tolist(), float(values[k])) for k in bad], thetas, values)


def find_negative_example(theta: float = 2.0, eps: float = 0.1) -> Tuple[List[BoundaryLabel], float]:
    """Labels ``(0, 0, i theta, i(2pi - eps))`` with ``V_{0,4} < 0``, valid when ``4 pi eps < theta^2 < 4 pi^2``."""
    if not (eps > 0 and 4 * math.pi * eps < theta ** 2 < 4 * math.pi ** 2):
        raise ValueError(f"(theta, eps) = ({theta}, {eps}) is outside 4 pi eps < theta^2 < 4 pi^2")
    labels = [BoundaryLabel.cusp(), BoundaryLabel.cusp(),
              BoundaryLabel.cone(theta), BoundaryLabel.cone(TWO_PI - eps)]
    return labels, numeric_eval(volume(0, 4), labels)
