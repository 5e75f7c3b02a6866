import math

import numpy as np
import pytest

from mvda.rng import CounterRng, SeedSpec


def moments_match(samples, exact, label):
    """Each raw moment within 4 empirical standard errors of its target."""
    n = len(samples)
    for k, target in enumerate(exact, start=1):
        vals = samples**k
        se = vals.std(ddof=1) / math.sqrt(n)
        assert abs(vals.mean() - target) <= 4 * se, (label, k, vals.mean(), target, se)


class TestSeedSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            SeedSpec(seed=-1)
        with pytest.raises(ValueError):
            SeedSpec(seed=0, stream=2**64)

    def test_json_round_trip(self):
        s = SeedSpec(seed=42, stream=7)
        assert SeedSpec.from_json(s.to_json()) == s


class TestDeterminism:
    def test_same_triple_same_stream(self):
        a = SeedSpec(123, 4).child(2).uniforms(100)
        b = SeedSpec(123, 4).child(2).uniforms(100)
        assert np.array_equal(a, b)

    def test_distinct_streams_differ(self):
        a = SeedSpec(123, 4).child(0).uniforms(100)
        b = SeedSpec(123, 5).child(0).uniforms(100)
        c = SeedSpec(123, 4).child(1).uniforms(100)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_gamma_determinism(self):
        a = SeedSpec(9).child(0).gammas(2.5, 50)
        b = SeedSpec(9).child(0).gammas(2.5, 50)
        assert np.array_equal(a, b)


class TestUniforms:
    def test_open_closed_interval(self):
        u = SeedSpec(1).child(0).uniforms(200000)
        assert np.all(u > 0.0) and np.all(u <= 1.0)

    def test_mean(self):
        u = SeedSpec(2).child(0).uniforms(200000)
        assert abs(u.mean() - 0.5) <= 4 * u.std(ddof=1) / math.sqrt(len(u))


class TestNormals:
    def test_moments(self):
        z = SeedSpec(3).child(0).normals(200000)
        moments_match(z, [0.0, 1.0, 0.0, 3.0], "normal")

    def test_odd_count(self):
        assert len(SeedSpec(4).child(0).normals(7)) == 7


class TestGammas:
    @pytest.mark.parametrize("shape", [0.5, 1.0, 2.0, 3.7])
    def test_first_four_moments(self, shape):
        g = SeedSpec(5).child(0).gammas(shape, 100000)
        exact = [
            shape,
            shape * (shape + 1),
            shape * (shape + 1) * (shape + 2),
            shape * (shape + 1) * (shape + 2) * (shape + 3),
        ]
        moments_match(g, exact, f"gamma({shape})")

    def test_positive(self):
        g = SeedSpec(6).child(0).gammas(0.3, 50000)
        assert np.all(g > 0)

    def test_invalid_shape(self):
        with pytest.raises(ValueError):
            SeedSpec(7).child(0).gammas(0.0, 10)


def test_complex_normals_variance():
    z = SeedSpec(8).child(0).complex_normals(100000)
    # |z|^2 should average to 1 (variance 1/2 per component)
    sq = np.abs(z) ** 2
    assert abs(sq.mean() - 1.0) <= 4 * sq.std(ddof=1) / math.sqrt(len(sq))
