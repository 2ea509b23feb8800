import math

import numpy as np
import pytest
from scipy import stats

from src.simulation import geometry
from src.simulation.errors import InvalidArgumentError, NoGatewayError


class TestSamplePpp:
    def test_zero_intensity_is_empty(self, rng):
        points = geometry.sample_ppp(0.0, 20.0, rng)
        assert points.shape == (0, 2)

    def test_points_inside_disk(self, rng):
        points = geometry.sample_ppp(1.0, 5.0, rng)
        assert len(points) > 0
        assert np.all(np.hypot(points[:, 0], points[:, 1]) <= 5.0)

    def test_sparse_count_moments(self, rng):
        n = 20_000
        counts = np.array([len(geometry.sample_ppp(0.005, 20.0, rng)) for _ in range(n)])
        mean = 0.005 * math.pi * 400
        assert mean == pytest.approx(6.283, abs=1e-3)
        assert abs(counts.mean() - mean) < 4 * math.sqrt(mean / n)
        assert counts.mean() == pytest.approx(mean, rel=0.05)
        # Poisson: variance equals mean
        assert counts.var() == pytest.approx(mean, rel=0.05)

    @pytest.mark.slow
    def test_dense_count_moments(self, rng):
        n = 20_000
        counts = np.array([len(geometry.sample_ppp(5.0, 20.0, rng)) for _ in range(n)])
        mean = 5.0 * math.pi * 400
        assert abs(counts.mean() - mean) < 4 * math.sqrt(mean / n)
        assert counts.var() == pytest.approx(mean, rel=0.05)

    def test_uniform_over_area(self, rng):
        points = geometry.sample_ppp(5.0, 20.0, rng)
        r = np.hypot(points[:, 0], points[:, 1])
        # Ten rings of equal area should hold equal counts
        rings = np.floor((r / 20.0) ** 2 * 10).astype(int)
        observed = np.bincount(np.minimum(rings, 9), minlength=10)
        assert stats.chisquare(observed).pvalue > 0.01
        angles = np.arctan2(points[:, 1], points[:, 0])
        sectors = np.bincount(((angles + math.pi) / (2 * math.pi) * 8).astype(int) % 8, minlength=8)
        assert stats.chisquare(sectors).pvalue > 0.01

    def test_deterministic_for_seed(self):
        a = geometry.sample_ppp(1.0, 10.0, np.random.default_rng(3))
        b = geometry.sample_ppp(1.0, 10.0, np.random.default_rng(3))
        np.testing.assert_array_equal(a, b)

    @pytest.mark.parametrize('intensity,radius', [(-1.0, 20.0), (1.0, 0.0), (1.0, -5.0)])
    def test_invalid_arguments(self, rng, intensity, radius):
        with pytest.raises(InvalidArgumentError):
            geometry.sample_ppp(intensity, radius, rng)


class TestSampleAnnulus:
    def test_points_beyond_inner_radius(self, rng):
        points = geometry.sample_annulus(1.0, 3.0, 6.0, rng)
        r = np.hypot(points[:, 0], points[:, 1])
        assert len(points) > 0
        assert np.all(r > 3.0) and np.all(r <= 6.0)

    def test_mean_count(self, rng):
        n = 2000
        counts = [len(geometry.sample_annulus(0.05, 4.0, 6.0, rng)) for _ in range(n)]
        mean = 0.05 * math.pi * (36 - 16)
        assert abs(np.mean(counts) - mean) < 4 * math.sqrt(mean / n)

    def test_invalid_annulus(self, rng):
        with pytest.raises(InvalidArgumentError):
            geometry.sample_annulus(1.0, 6.0, 6.0, rng)

    def test_count_then_place_matches_one_shot_sampling(self):
        count = geometry.poisson_count(0.5, 2.0, 8.0, np.random.default_rng(4))
        rng = np.random.default_rng(4)
        placed = geometry.place_uniform(geometry.poisson_count(0.5, 2.0, 8.0, rng), 2.0, 8.0, rng)
        assert len(placed) == count
        np.testing.assert_array_equal(placed, geometry.sample_annulus(0.5, 2.0, 8.0, np.random.default_rng(4)))

    def test_place_nothing(self, rng):
        assert geometry.place_uniform(0, 0.0, 5.0, rng).shape == (0, 2)


class TestNearest:
    def test_examples(self):
        index, d = geometry.nearest((0, 0), np.array([[3.0, 4.0], [1.0, 1.0]]))
        assert index == 1
        assert d == pytest.approx(math.sqrt(2))

    def test_clamped_at_one_metre(self):
        index, d = geometry.nearest((0, 0), np.array([[0.0, 0.0]]))
        assert index == 0
        assert d == pytest.approx(0.001)

    def test_ties_go_to_lowest_index(self):
        index, _ = geometry.nearest((0, 0), np.array([[2.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]))
        assert index == 1

    def test_empty_candidates(self):
        with pytest.raises(NoGatewayError):
            geometry.nearest((0, 0), np.empty((0, 2)))

    def test_matches_brute_force(self, rng):
        candidates = geometry.sample_annulus(100 / (math.pi * 400), 0.0, 20.0, rng)
        origin = (1.5, -2.0)
        best = min(range(len(candidates)), key=lambda i: math.dist(origin, candidates[i]))
        index, d = geometry.nearest(origin, candidates)
        assert index == best
        assert d == pytest.approx(math.dist(origin, candidates[best]))

    def test_nearest_distances_match_scalar(self, rng):
        gateways = geometry.sample_ppp(0.2, 5.0, rng)
        eds = geometry.sample_ppp(1.0, 5.0, rng)
        indices, distances = geometry.nearest_distances(eds, gateways)
        for ed, j, d in zip(eds, indices, distances):
            assert (j, d) == geometry.nearest(ed, gateways)

    def test_nearest_distances_without_gateways(self, rng):
        with pytest.raises(NoGatewayError):
            geometry.nearest_distances(geometry.sample_ppp(1.0, 5.0, rng), np.empty((0, 2)))

    def test_pairwise_distances(self):
        points = np.array([[0.0, 0.0], [3.0, 4.0]])
        gateways = np.array([[0.0, 0.0], [0.0, 4.0]])
        expected = [[0.001, 4.0], [5.0, 3.0]]
        np.testing.assert_allclose(geometry.pairwise_distances(points, gateways), expected)
