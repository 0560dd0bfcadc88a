import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from wpvol.charvar import (
    INDEX_M2_M2PLUS,
    INDEX_PSL2Z_M2PLUS,
    QuadratureError,
    ReductionError,
    apply_generator,
    apply_generator_rst,
    apply_word,
    closed_form_final,
    closed_form_raw,
    energy,
    energy_change,
    from_homogeneous,
    in_fundamental_domain,
    kappa,
    kappa_to_theta,
    lower_r_limit,
    monte_carlo_raw,
    partial_integral,
    reduce_to_domain,
    sample_domain,
    theta_to_kappa,
    to_homogeneous,
    volume_integral,
    wp_density,
)

PI = math.pi


def random_points(count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        k = rng.uniform(-2, 2)
        yield k, sample_domain(k, rng), rng


def test_constants():
    assert (INDEX_PSL2Z_M2PLUS, INDEX_M2_M2PLUS) == (6, 2)


def test_kappa_examples():
    assert kappa((3, 3, 3)) == -2
    assert kappa((3, 3, 6)) == -2
    assert kappa((2, 2, 2)) == 2
    assert kappa((6, 3, 15)) == -2


def test_theta_kappa():
    assert theta_to_kappa(0) == -2
    assert theta_to_kappa(PI) == pytest.approx(0, abs=1e-15)
    assert kappa_to_theta(1) == pytest.approx(4 * PI / 3, rel=1e-15)
    for t in [0.3, 2.0, 6.0]:
        assert kappa_to_theta(theta_to_kappa(t)) == pytest.approx(t, rel=1e-12)
    with pytest.raises(ValueError):
        theta_to_kappa(2 * PI)
    with pytest.raises(ValueError):
        kappa_to_theta(2)


def test_homogeneous_examples():
    assert to_homogeneous((3, 3, 3)) == pytest.approx((1 / 3,) * 3)
    assert to_homogeneous((3, 3, 6)) == pytest.approx((1 / 6, 1 / 6, 2 / 3))
    assert from_homogeneous((1 / 3, 1 / 3, 1 / 3)) == pytest.approx((3, 3, 3))
    with pytest.raises(ValueError):
        from_homogeneous((-0.1, 0.3, 0.3))
    with pytest.raises(ValueError):
        to_homogeneous((0, 1, 1))


def test_homogeneous_round_trip_and_level():
    for k, h, _ in random_points(1000, 11):
        p = from_homogeneous(h)
        assert min(p) >= 2 - 1e-12
        assert kappa(p) == pytest.approx(k, abs=1e-10)
        back = to_homogeneous(p)
        assert back == pytest.approx(h, rel=1e-12)
        r, s, t = back
        assert r + s + t - 1 == pytest.approx((k + 2) * r * s * t, abs=1e-12)


def test_generator_examples():
    assert apply_generator(2, (3, 3, 3)) == (3, 3, 6)
    assert apply_generator(2, (3, 3, 6)) == (3, 3, 3)
    r, s, t = apply_generator_rst(1, (1 / 3, 1 / 3, 1 / 3))
    assert (r, s, t) == pytest.approx((2 / 3, 1 / 6, 1 / 6))
    with pytest.raises(ValueError):
        apply_generator(4, (3, 3, 3))
    with pytest.raises(ValueError):
        apply_generator_rst(0, (0.3, 0.3, 0.3))


def test_generators_kappa_invariant_and_involutive():
    rng = np.random.default_rng(5)
    eps = np.finfo(float).eps
    for _ in range(10_000):
        k = rng.uniform(-2, 2)
        h = sample_domain(k, rng)
        i = int(rng.integers(1, 4))
        with mpmath.workdps(40):
            p = from_homogeneous(tuple(mpmath.mpf(v) for v in h))
            q = apply_generator(i, p)
            assert abs(kappa(q) - kappa(p)) < 1e-10
            assert max(abs(a - b) for a, b in zip(apply_generator(i, q), p)) < 1e-30
        # double precision: one rounding of the new coordinate moves kappa by
        # at most |dkappa/dcoord| * ulp, about eps * max|coord|^2
        pf = from_homogeneous(h)
        qf = apply_generator(i, pf)
        drift = abs(float(kappa(tuple(map(Fraction, qf))) - kappa(tuple(map(Fraction, pf)))))
        assert drift <= 8 * eps * max(max(pf), max(qf)) ** 2
        back = apply_generator(i, qf)
        assert max(abs(a - b) for a, b in zip(back, pf)) < 1e-12 * max(qf)


def test_charts_commute():
    for k, h, rng in random_points(300, 8):
        p = from_homogeneous(h)
        for i in (1, 2, 3):
            via_trace = to_homogeneous(apply_generator(i, p))
            via_rst = apply_generator_rst(i, h)
            assert via_rst == pytest.approx(via_trace, rel=1e-11)
            assert apply_generator_rst(i, via_rst) == pytest.approx(h, rel=1e-11)


def test_energy_examples():
    assert energy((3, 3, 3)) == 9
    assert energy((3, 3, 6)) == 12
    assert energy(apply_generator(2, (3, 3, 6))) == 9
    assert energy_change(2, (3, 3, 6)) == -3


def test_fundamental_domain_examples():
    assert in_fundamental_domain((1 / 3, 1 / 3, 1 / 3), -2)
    assert not in_fundamental_domain((1 / 6, 1 / 6, 2 / 3))
    # corner: two coordinates 1/2 would need kappa = 2
    assert not in_fundamental_domain((0.5, 0.5, 0.3))
    assert not in_fundamental_domain((0.5, 0.5, 0.3), 1.9)
    # on one wall only
    assert in_fundamental_domain((0.5, 0.4, 0.25), lower_kappa := (0.5 + 0.4 + 0.25 - 1) / (0.5 * 0.4 * 0.25) - 2)
    assert -2 <= lower_kappa < 2


def test_reduce_examples():
    assert reduce_to_domain((3, 3, 6)) == ((3, 3, 3), [2])
    assert reduce_to_domain((6, 3, 15)) == ((3, 3, 3), [2, 1])
    assert reduce_to_domain((3, 3, 3)) == ((3, 3, 3), [])
    with pytest.raises(ReductionError):
        reduce_to_domain((6, 3, 15), max_steps=1)
    with pytest.raises(ValueError):
        reduce_to_domain((3, 3, 3), strategy="random")


def test_reduction_strictly_decreases_energy():
    for k, h, rng in random_points(200, 21):
        word = [int(rng.integers(1, 4)) for _ in range(8)]
        with mpmath.workdps(250):
            p = apply_word(word, from_homogeneous(tuple(mpmath.mpf(v) for v in h)))
            reduced, steps = reduce_to_domain(p)
            e = energy(p)
            for i in steps:
                p2 = apply_generator(i, p)
                assert energy(p2) < e
                p, e = p2, energy(p2)
            assert p == reduced


def _round_trip(k, h, word, strategy):
    with mpmath.workdps(30 + 25 * len(word)):
        p = apply_word(word, from_homogeneous(tuple(mpmath.mpf(v) for v in h)))
        reduced, _ = reduce_to_domain(p, strategy=strategy)
        return tuple(float(v) for v in to_homogeneous(reduced))


def test_reduction_round_trip_and_uniqueness():
    for k, h, rng in random_points(300, 13):
        word = [int(rng.integers(1, 4)) for _ in range(int(rng.integers(0, 13)))]
        a = _round_trip(k, h, word, "greedy")
        b = _round_trip(k, h, word, "first")
        assert max(abs(x - y) for x, y in zip(a, h)) < 1e-9
        assert max(abs(x - y) for x, y in zip(a, b)) < 1e-9
        assert in_fundamental_domain(a, k, tol=1e-9)


def test_wp_density():
    assert wp_density(0.25, 0.25) == 32
    assert wp_density(0.5 - 1e-9, 0.5 - 1e-9) > 1e8
    with pytest.raises(ValueError):
        wp_density(0.5, 0.5)
    with pytest.raises(ValueError):
        wp_density(0.6, 0.5)


def test_lower_limit_near_zero():
    for k in [-2.0, 0.0, 1.5]:
        s = 1e-6
        assert lower_r_limit(s, k) == pytest.approx(0.5 - s * (2 - k) / 4, abs=1e-11)
    assert lower_r_limit(0.2, -2.0) == pytest.approx((1 - 0.4) / 2)


@pytest.mark.parametrize("theta", [0.0, 1.0, PI / 2, PI, 2.0, 3 * PI / 2, 5.0, 6.2])
def test_volume_matches_closed_form(theta):
    raw, final = volume_integral(theta)
    assert abs(raw - closed_form_raw(theta)) / raw < 1e-8
    assert abs(final - closed_form_final(theta)) / final < 1e-8


def test_volume_examples():
    res = volume_integral(PI)
    assert res.raw == pytest.approx(1.233700, abs=1e-6)
    assert res.final == pytest.approx(0.616850, abs=1e-6)
    assert volume_integral(0.0).final == pytest.approx(PI ** 2 / 12, rel=1e-10)
    finals = [volume_integral(2 * PI - eps).final for eps in (1e-1, 1e-2, 1e-3)]
    assert finals[0] > finals[1] > finals[2] > 0
    assert finals[2] < 3e-4
    with pytest.raises(ValueError):
        volume_integral(2 * PI)
    with pytest.raises(ValueError):
        volume_integral(1.0, rel_tol=0)


def test_parallel_segments_agree():
    assert volume_integral(2.0, jobs=4).raw == volume_integral(2.0).raw


def test_tolerance_halving_is_stable():
    for theta in [0.5, 3.0]:
        a = volume_integral(theta, rel_tol=1e-8)
        b = volume_integral(theta, rel_tol=5e-9)
        assert abs(a.raw - b.raw) <= max(a.error, 1e-15)


def test_excluded_strips_vanish():
    total = volume_integral(1.0).raw
    prev_s = prev_c = math.inf
    for k in range(1, 7):
        strip_s = partial_integral(1.0, 0.0, 10.0 ** -k)[0]
        strip_c = total - partial_integral(1.0, gap=10.0 ** -k)[0]
        assert 0 < strip_s < prev_s and 0 < strip_c < prev_c
        prev_s, prev_c = strip_s, strip_c
    assert prev_s < 1e-5 and prev_c < 1e-5


def test_monte_carlo_agrees():
    theta = 1.0
    mean, se = monte_carlo_raw(theta, samples=10 ** 7, seed=4)
    assert abs(mean - volume_integral(theta).raw) < 3 * se


def test_quadrature_error_type():
    assert issubclass(QuadratureError, RuntimeError)
