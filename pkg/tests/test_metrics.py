import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polysqueeze import metrics as mt
from polysqueeze.domains import Ball, CartanIV, Polydisk, Product, Puncture
from polysqueeze.errors import ContractViolation, RangeError, UnsupportedDomainError

from .conftest import random_ball_points, random_polydisk_points

mpmath.mp.dps = 50


def mp_sigma(x):
    x = mpmath.mpf(x)
    return mpmath.log((1 + x) / (1 - x))


def mp_ball_distance(a, b):
    """K(a, b) from 1 - |phi_a(b)|^2 = (1-|a|^2)(1-|b|^2)/|1-<b,a>|^2, in 50 digits."""
    a = [mpmath.mpc(complex(x)) for x in a]
    b = [mpmath.mpc(complex(x)) for x in b]
    na = mpmath.fsum(abs(x) ** 2 for x in a)
    nb = mpmath.fsum(abs(x) ** 2 for x in b)
    ab = mpmath.fsum(mpmath.conj(x) * y for x, y in zip(a, b))
    q = (1 - na) * (1 - nb) / abs(1 - ab) ** 2
    t = mpmath.sqrt(1 - q)
    return 2 * mpmath.log(1 + t) - mpmath.log(q)


def mp_disk_distance(a, b):
    a, b = mpmath.mpc(complex(a)), mpmath.mpc(complex(b))
    return mp_sigma(abs((a - b) / (1 - mpmath.conj(a) * b)))


class TestSigma:
    def test_zero(self):
        assert mt.sigma(0) == 0
        assert mt.sigma_inv(0) == 0

    def test_half_is_log3(self):
        assert mt.sigma(0.5) == pytest.approx(1.0986122886681098, abs=1e-15)
        assert mt.sigma_inv(math.log(3)) == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("x", [0.1 * k for k in range(10)])
    def test_inverse_pair(self, x):
        assert abs(mt.sigma_inv(mt.sigma(x)) - x) < 1e-12

    @pytest.mark.parametrize("x", [0.0, 1e-9, 0.3, 0.5, 0.77, 0.999, 1 - 1e-9])
    def test_against_high_precision(self, x):
        assert mt.sigma(x) == pytest.approx(float(mp_sigma(x)), rel=1e-14, abs=1e-300)

    def test_saturation(self):
        v = mt.sigma_inv(1e6)
        assert v < 1
        assert v == pytest.approx(float(mpmath.tanh(mpmath.mpf(5e5))), abs=1e-15)

    def test_monotone(self):
        xs = np.linspace(0, 0.999, 500)
        ys = [mt.sigma(x) for x in xs]
        assert all(b > a for a, b in zip(ys, ys[1:]))
        assert all(mt.sigma_inv(b) >= mt.sigma_inv(a) for a, b in zip(ys, ys[1:]))

    def test_round_trip_well_conditioned(self):
        # sigma has derivative 2/(1-x^2); the round trip is exact to 1e-12 while that stays moderate.
        for y in np.linspace(0, 8, 161):
            assert abs(mt.sigma(mt.sigma_inv(y)) - y) < 1e-12

    def test_round_trip_to_thirty(self):
        # Beyond y ~ 8, sigma_inv(y) is within ~1e-3 of 1 and the round trip error is
        # bounded by the conditioning: |dy| <= eps * sigma'(x) * x, with x = sigma_inv(y).
        eps = np.finfo(float).eps
        for y in np.linspace(0, 30, 301):
            x = mt.sigma_inv(y)
            budget = max(1e-12, 4 * eps * 2 / (1 - x * x))
            assert abs(mt.sigma(x) - y) <= budget

    def test_round_trip_twelve_digits_to_thirty(self):
        # Expected to fail in double precision: 1 - tanh(15) ~ 1.9e-13 is a few ulps
        # from 1, so sigma(sigma_inv(30)) is off by ~2e-4. Kept strict on purpose.
        worst = max(abs(mt.sigma(mt.sigma_inv(y)) - y) for y in np.linspace(0, 30, 301))
        assert worst < 1e-12, f"worst round-trip error {worst:.2e}"

    @pytest.mark.parametrize("bad", [-0.1, 1.0, 1.5, float("nan")])
    def test_sigma_range(self, bad):
        with pytest.raises(RangeError):
            mt.sigma(bad)

    def test_sigma_inv_range(self):
        with pytest.raises(RangeError):
            mt.sigma_inv(-1e-9)


class TestKobayashiExamples:
    def test_polydisk_single_coordinate(self):
        assert mt.kobayashi(Polydisk(3), np.zeros(3), [0.4, 0, 0]) == pytest.approx(
            float(mpmath.log(mpmath.mpf(7) / 3)), abs=1e-15)
        assert mt.kobayashi(Polydisk(3), np.zeros(3), [0.4, 0, 0]) == pytest.approx(0.8472978603872037, abs=1e-15)

    def test_identical_points(self):
        z = [0.2 + 0.1j, -0.5]
        assert mt.kobayashi(Ball(2), z, z) == 0

    def test_ball_from_origin(self):
        assert mt.kobayashi(Ball(2), [0, 0], [0.3, 0]) == pytest.approx(0.6190392084062235, abs=1e-15)

    def test_polydisk_radii_rescale(self):
        d = Polydisk(2, (2.0, 1.0))
        assert mt.kobayashi(d, [0, 0], [0.8, 0]) == pytest.approx(mt.sigma(0.4), abs=1e-15)

    def test_unsupported(self):
        with pytest.raises(UnsupportedDomainError):
            mt.kobayashi(CartanIV(2), [0, 0], [0.1, 0])
        with pytest.raises(UnsupportedDomainError):
            mt.kobayashi(Puncture(Ball(2), ((0, 0),)), [0.1, 0], [0.2, 0])

    def test_outside_point(self):
        with pytest.raises(ContractViolation):
            mt.kobayashi(Ball(2), [0, 0], [1.0, 0])


class TestKobayashiToSet:
    def test_single_point(self):
        assert mt.kobayashi_to_set(Ball(2), [0.3, 0], [[0, 0]]) == pytest.approx(mt.sigma(0.3), abs=1e-15)

    def test_member(self):
        assert mt.kobayashi_to_set(Ball(2), [0.3, 0], [[0, 0], [0.3, 0]]) == 0

    def test_min_of_two(self):
        got = mt.kobayashi_to_set(Ball(2), [0.1, 0], [[0, 0], [0.9, 0]])
        brute = min(mt.kobayashi(Ball(2), [0.1, 0], p) for p in ([0, 0], [0.9, 0]))
        assert got == brute == pytest.approx(mt.sigma(0.1), abs=1e-15)

    def test_empty(self):
        with pytest.raises(ContractViolation):
            mt.kobayashi_to_set(Ball(2), [0, 0], [])


class TestOracles:
    def test_ball_matches_high_precision(self, rng):
        a = random_ball_points(rng, 300, 3)
        b = random_ball_points(rng, 300, 3)
        for x, y in zip(a, b):
            exact = float(mp_ball_distance(x, y))
            assert mt.kobayashi(Ball(3), x, y) == pytest.approx(exact, rel=1e-11)

    def test_ball_near_boundary(self):
        a = np.array([0.999999, 0])
        b = np.array([0, -0.999999j])
        assert mt.kobayashi(Ball(2), a, b) == pytest.approx(float(mp_ball_distance(a, b)), rel=1e-9)

    def test_polydisk_matches_high_precision(self, rng):
        a = random_polydisk_points(rng, 200, 2)
        b = random_polydisk_points(rng, 200, 2)
        for x, y in zip(a, b):
            exact = max(float(mp_disk_distance(u, v)) for u, v in zip(x, y))
            assert mt.kobayashi(Polydisk(2), x, y) == pytest.approx(exact, rel=1e-11)

    def test_one_dimensional_ball_is_disk(self, rng):
        a = random_ball_points(rng, 100, 1)
        b = random_ball_points(rng, 100, 1)
        for x, y in zip(a, b):
            assert mt.kobayashi(Ball(1), x, y) == pytest.approx(mt.kobayashi(Polydisk(1), x, y), rel=1e-12)


def _samplers():
    prod = Product((Ball(2), Polydisk(1)))

    def product_points(rng, k):
        return np.concatenate([random_ball_points(rng, k, 2), random_polydisk_points(rng, k, 1)], axis=1)

    return [
        ("ball3", Ball(3), lambda rng, k: random_ball_points(rng, k, 3)),
        ("polydisk2", Polydisk(2), lambda rng, k: random_polydisk_points(rng, k, 2)),
        ("ball2xdisk", prod, product_points),
    ]


@pytest.mark.parametrize("name, d, sample", _samplers(), ids=[s[0] for s in _samplers()])
def test_metric_axioms(name, d, sample, rng):
    a, b, c = (sample(rng, 1000) for _ in range(3))
    for x, y, z in zip(a, b, c):
        kab = mt.kobayashi(d, x, y)
        assert abs(kab - mt.kobayashi(d, y, x)) < 1e-12
        assert mt.kobayashi(d, x, z) <= kab + mt.kobayashi(d, y, z) + 1e-9
        assert kab > 0


def test_ball_distance_from_origin_is_norm(rng):
    for z in random_ball_points(rng, 200, 4):
        assert abs(mt.sigma_inv(mt.kobayashi(Ball(4), z, np.zeros(4))) - np.linalg.norm(z)) < 1e-10


def test_product_dominates_projection(rng):
    d = Product((Ball(2), Ball(3)))
    a = np.concatenate([random_ball_points(rng, 100, 2), random_ball_points(rng, 100, 3)], axis=1)
    b = np.concatenate([random_ball_points(rng, 100, 2), random_ball_points(rng, 100, 3)], axis=1)
    for x, y in zip(a, b):
        k = mt.kobayashi(d, x, y)
        assert k >= mt.kobayashi(Ball(2), x[:2], y[:2])
        assert k >= mt.kobayashi(Ball(3), x[2:], y[2:])


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 0.999999), st.integers(0, 2))
def test_polydisk_single_coordinate_exact(x, axis):
    z = np.zeros(3, dtype=complex)
    z[axis] = x
    assert mt.kobayashi(Polydisk(3), np.zeros(3), z) == mt.sigma(x) or x == 0
