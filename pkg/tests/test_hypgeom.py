import math

import numpy as np
import pytest

from wpvol.chambers import BoundaryLabel
from wpvol.hypgeom import (
    NoBracketError,
    cone_glue_w,
    crown_length,
    crown_residual,
    crown_spurious_root,
    hexagon_bound,
    hexagon_delta,
    obtuse_pentagon_sinh_delta,
    pentagon_bound,
    pentagon_delta,
    quad_delta,
    separation_bound,
    separation_regime,
)

PI = math.pi
Cone, Cusp, Geo = BoundaryLabel.cone, BoundaryLabel.cusp, BoundaryLabel.geodesic


def test_hexagon_examples():
    c1 = math.cosh(1)
    assert hexagon_delta(2, 2, 0) == pytest.approx(math.acosh((1 + c1 ** 2) / math.sinh(1) ** 2), rel=1e-14)
    assert hexagon_delta(2, 2, 0) == pytest.approx(1.544, abs=1e-3)
    assert hexagon_delta(2, 2, 2) == pytest.approx(math.acosh((c1 + c1 ** 2) / math.sinh(1) ** 2), rel=1e-14)
    assert hexagon_delta(2, 2, 2) == pytest.approx(1.70491, abs=1e-5)
    assert hexagon_delta(2, 2, 40) > hexagon_delta(2, 2, 20) > 9
    with pytest.raises(ValueError):
        hexagon_delta(0, 1)


def test_pentagon_examples():
    d = pentagon_delta(2, PI / 2, 0)
    cosh_d = (math.cos(PI / 4) + math.cosh(1)) / (math.sin(PI / 4) * math.sinh(1))
    assert math.cosh(d) == pytest.approx(cosh_d, rel=1e-14)
    assert math.cosh(d) == pytest.approx(2.7078, abs=1e-4)
    assert pentagon_delta(2, 1e-6) > pentagon_delta(2, 1e-3) > 8
    with pytest.raises(ValueError):
        pentagon_delta(2, 0)
    with pytest.raises(ValueError):
        pentagon_delta(2, 4.0)


def test_quad_examples():
    d = quad_delta(PI / 2, PI / 2, 2)
    assert math.cosh(d) == pytest.approx((math.cosh(1) + 0.5) / 0.5, rel=1e-13)
    assert math.cosh(d) == pytest.approx(4.0862, abs=1e-4)
    assert math.cosh(quad_delta(PI / 2, PI / 2, 0)) == pytest.approx(3, rel=1e-14)
    near = quad_delta(PI, PI - 1e-6, 0)
    assert 0 < near < 1e-5
    with pytest.raises(ValueError):
        quad_delta(PI, PI)


def test_obtuse_examples():
    for c, Lp in [(0.0, 1.0), (1.0, 2.0)]:
        d = obtuse_pentagon_sinh_delta(PI / 2, Lp, c)
        assert math.sinh(d) == pytest.approx(math.cosh(c) / math.sinh(Lp), rel=1e-13)
    assert obtuse_pentagon_sinh_delta(2.5, 3, 0) is None
    d = obtuse_pentagon_sinh_delta(1.0, 1, 1)
    q = (math.cosh(1) + math.cos(1) * math.cosh(1)) / (math.sin(1) * math.sinh(1))
    assert d == pytest.approx(math.asinh(q), rel=1e-14)
    assert d == pytest.approx(1.61, abs=1e-2)


def test_cone_glue_examples():
    for x in [0.1, 1.0, 3.0, 7.5]:
        assert cone_glue_w(x, PI) == pytest.approx(x, abs=1e-12)
    with pytest.raises(ValueError):
        cone_glue_w(1.0, PI / 2)
    rhs = -math.cosh(1.5) ** 2 * math.cos(PI / 2) + math.sinh(1.5) ** 2
    assert cone_glue_w(3.0, PI / 2) == pytest.approx(math.acosh(rhs), rel=1e-12)
    assert cone_glue_w(3.0, PI / 2) == pytest.approx(2.193, abs=1e-3)


def test_separation_examples():
    assert separation_bound(Geo(2), Geo(2)) == pytest.approx(math.acosh(1 + 1 / math.sinh(1) ** 2), rel=1e-14)
    assert separation_bound(Cone(PI / 2), Cone(PI / 2)) == pytest.approx(math.acosh(3), rel=1e-14)
    assert separation_bound(Geo(5), Cone(4.0)) is None
    assert separation_bound(Cone(4.0), Cone(3.0)) is None
    assert separation_bound(Cusp(), Geo(1)) is None
    assert separation_regime(Cusp(), Geo(1)) == "cusp"
    assert separation_bound(Geo(2), Cone(1.0)) == pytest.approx(pentagon_bound(2))
    # theta = pi counts as small
    assert separation_bound(Geo(2), BoundaryLabel.cone_pi(1)) == pytest.approx(pentagon_bound(2))


@pytest.mark.parametrize("L", [1.0, 2.0, 5.0])
def test_crown_limit(L):
    phi = PI - 1e-4
    x = crown_length(phi, L)
    assert abs(x - L) / L < 1e-3
    assert abs(crown_residual(x, phi, L)) < 1e-10


def test_crown_closed_form_and_roots():
    # the corner-dependent root satisfies cosh(x/2) = cosh(L/2) sin(phi/2)
    for phi, L in [(3.0, 2.0), (2.0, 3.0), (1.0, 4.0), (2.8, 0.7)]:
        x = crown_length(phi, L)
        assert x == pytest.approx(2 * math.acosh(math.cosh(L / 2) * math.sin(phi / 2)), rel=1e-9)
        assert abs(crown_residual(x, phi, L)) < 1e-10
    assert crown_length(3.0, 2.0) == pytest.approx(1.99341, abs=1e-5)


def test_crown_sign_changes():
    # on the bracket the residual changes sign at the geodesic length and at the corner-independent root
    phi, L = 3.0, 2.0
    xs = np.linspace(1e-9, L + 10, 200001)
    r = np.array([crown_residual(x, phi, L) for x in xs])
    flips = xs[1:][np.sign(r[1:]) != np.sign(r[:-1])]
    assert len(flips) == 2
    assert min(abs(flips - crown_spurious_root(L))) < 1e-3
    assert min(abs(flips - crown_length(phi, L))) < 1e-3
    for phi2 in [0.5, 1.5, 2.5]:
        assert abs(crown_residual(crown_spurious_root(L), phi2, L)) < 1e-12


def test_crown_no_solution():
    with pytest.raises(NoBracketError):
        crown_length(0.5, 0.5)
    with pytest.raises(ValueError):
        crown_length(PI, 1.0)


def test_bound_chains_random():
    rng = np.random.default_rng(2024)
    for _ in range(10_000):
        L1, L2 = rng.uniform(0.01, 8, 2)
        c = rng.uniform(0, 10)
        t1, t2 = rng.uniform(0.001, PI, 2)
        assert hexagon_delta(L1, L2, c) >= hexagon_bound(L1, L2) - 1e-12
        p = pentagon_delta(L1, t1, c)
        chain = (math.cos(t1 / 2) + math.cosh(L1 / 2)) / (math.sin(t1 / 2) * math.sinh(L1 / 2))
        assert math.cosh(p) >= chain * (1 - 1e-12)
        assert chain > 1 / math.tanh(L1 / 2)
        assert p >= pentagon_bound(L1) - 1e-12
        a, b = rng.uniform(0.001, 2 * PI - 0.001, 2)
        if a + b < 2 * PI:
            assert quad_delta(a, b, c) > 0
            assert separation_bound(Cone(a), Cone(b)) == quad_delta(a, b, 0)
        else:
            with pytest.raises(ValueError):
                quad_delta(a, b, c)
            assert separation_bound(Cone(a), Cone(b)) is None
        big = rng.uniform(PI + 1e-6, 2 * PI - 1e-6)
        assert separation_bound(Geo(L1), Cone(big)) is None


def test_monotone_in_c():
    rng = np.random.default_rng(7)
    h = 1e-4
    for _ in range(500):
        L1, L2 = rng.uniform(0.05, 6, 2)
        c = rng.uniform(0, 6)
        t1, t2 = rng.uniform(0.05, PI - 0.05, 2)
        assert hexagon_delta(L1, L2, c + h) > hexagon_delta(L1, L2, c)
        assert pentagon_delta(L1, t1, c + h) > pentagon_delta(L1, t1, c)
        assert quad_delta(t1, t2, c + h) > quad_delta(t1, t2, c)
