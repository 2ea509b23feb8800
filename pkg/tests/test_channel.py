import math

import numpy as np
import pytest
from scipy import integrate, special, stats

from src.schemas.sim_schemas import FadingKind, FadingModel, LinkBudget
from src.simulation import channel
from src.simulation.errors import InvalidArgumentError

RAYLEIGH = FadingModel(kind=FadingKind.RAYLEIGH)


def rician(k):
    return FadingModel(kind=FadingKind.RICIAN, k_factor=k)


class TestNoise:
    @pytest.mark.parametrize('bandwidth,nf,expected', [
        (125_000, 6, -117.031),
        (1, 0, -174.0),
        (250_000, 6, -114.021),
    ])
    def test_examples(self, bandwidth, nf, expected):
        assert channel.noise_dbm(bandwidth, nf) == pytest.approx(expected, abs=1e-3)

    def test_non_positive_bandwidth(self):
        with pytest.raises(InvalidArgumentError):
            channel.noise_dbm(0, 6)

    def test_db_conversions(self):
        assert channel.db_to_linear(10.0) == pytest.approx(10.0)
        assert channel.linear_to_db(channel.db_to_linear(-117.031)) == pytest.approx(-117.031)


class TestPathGain:
    def test_free_space_at_one_km(self):
        g = channel.path_gain(1.0, 34.5e-5, 2.0)
        assert isinstance(g, float)
        assert g == pytest.approx(7.537e-10, rel=1e-3)
        assert channel.linear_to_db(g) == pytest.approx(-91.23, abs=0.01)

    def test_inverse_square(self):
        assert channel.path_gain(2.0, 34.5e-5, 2.0) == pytest.approx(channel.path_gain(1.0, 34.5e-5, 2.0) / 4)

    def test_default_exponent(self):
        assert channel.path_gain(1.0, 34.5e-5, 2.75) == pytest.approx(2.86e-13, rel=2e-3)

    def test_strictly_decreasing(self):
        g = channel.path_gain(np.linspace(0.001, 20.0, 200), 34.5e-5, 2.75)
        assert np.all(np.diff(g) < 0)

    @pytest.mark.parametrize('d,wavelength,eta', [(0.0, 34.5e-5, 2.0), (1.0, 0.0, 2.0), (1.0, 34.5e-5, 1.9)])
    def test_invalid_arguments(self, d, wavelength, eta):
        with pytest.raises(InvalidArgumentError):
            channel.path_gain(d, wavelength, eta)


@pytest.mark.slow
class TestPowerGain:
    def test_rayleigh_unit_mean(self, rng):
        gains = channel.sample_power_gain(RAYLEIGH, rng, 1_000_000)
        assert gains.mean() == pytest.approx(1.0, abs=0.003)

    @pytest.mark.parametrize('k', [1.0, 4.0, 10.0])
    def test_rician_unit_mean(self, rng, k):
        gains = channel.sample_power_gain(rician(k), rng, 1_000_000)
        assert gains.mean() == pytest.approx(1.0, abs=0.003)

    def test_rician_without_los_is_exponential(self, rng):
        gains = channel.sample_power_gain(rician(0.0), rng, 1_000_000)
        assert np.mean(gains > 1.0) == pytest.approx(math.exp(-1), abs=0.002)

    def test_rician_pure_los(self, rng):
        gains = channel.sample_power_gain(rician(1e9), rng, 1000)
        assert gains.mean() == pytest.approx(1.0, abs=1e-5)
        np.testing.assert_allclose(gains, 1.0, atol=1e-3)

    def test_scalar_and_shape(self, rng):
        assert isinstance(channel.sample_power_gain(RAYLEIGH, rng), float)
        assert channel.sample_power_gain(rician(4.0), rng, (3, 2)).shape == (3, 2)


class TestMarcumQ:
    def test_central_case(self):
        assert channel.marcum_q1(0.0, 1.0) == pytest.approx(0.60653, abs=1e-5)

    def test_zero_threshold(self):
        assert channel.marcum_q1(2.5, 0.0) == 1.0

    def test_reference_value(self):
        assert channel.marcum_q1(1.0, 1.0) == pytest.approx(0.73288, abs=1e-5)

    @pytest.mark.parametrize('a,b', [(1.0, 1.0), (0.5, 2.0), (3.0, 2.5), (4.0, 5.0)])
    def test_against_numeric_integration(self, a, b):
        # Rice density with the exponentially scaled Bessel function; i0 alone overflows on [b, inf)
        density = lambda x: x * math.exp(-(x - a) ** 2 / 2) * special.i0e(a * x)
        value, _ = integrate.quad(density, b, np.inf)
        assert math.isfinite(value)
        assert channel.marcum_q1(a, b) == pytest.approx(value, abs=1e-6)

    @pytest.mark.parametrize('a', [0.5, 1.0, 2.0, 5.0, 10.0])
    @pytest.mark.parametrize('b', [0.5, 1.0, 3.0, 6.0, 12.0])
    def test_against_noncentral_chi_square(self, a, b):
        assert channel.marcum_q1(a, b) == pytest.approx(stats.ncx2.sf(b * b, 2, a * a), abs=1e-9)

    @pytest.mark.parametrize('a,b', [(-1.0, 1.0), (1.0, -1.0), (math.inf, 1.0), (1.0, math.nan)])
    def test_invalid_arguments(self, a, b):
        with pytest.raises(InvalidArgumentError):
            channel.marcum_q1(a, b)


class TestConnectionProbability:
    budget = LinkBudget()

    def test_rayleigh_reference_point(self):
        q = 10 ** -2.0
        t = q / channel.mean_snr(8.0, self.budget)
        assert t == pytest.approx(0.266, abs=1e-3)
        assert channel.analytic_conn_prob(RAYLEIGH, 8.0, q, self.budget) == pytest.approx(0.766, abs=1e-3)

    def test_vanishing_threshold(self):
        assert channel.analytic_conn_prob(RAYLEIGH, 8.0, 1e-12, self.budget) == pytest.approx(1.0)

    @pytest.mark.parametrize('d,q', [(2.0, 0.25), (8.0, 0.01), (12.0, 0.01)])
    def test_rician_without_los_equals_rayleigh(self, d, q):
        expected = channel.analytic_conn_prob(RAYLEIGH, d, q, self.budget)
        assert channel.analytic_conn_prob(rician(0.0), d, q, self.budget) == pytest.approx(expected, abs=1e-8)

    def test_decreasing_in_distance(self):
        for model in (RAYLEIGH, rician(4.0)):
            p = [channel.analytic_conn_prob(model, d, 0.01, self.budget) for d in np.linspace(1.0, 15.0, 30)]
            assert all(b < a for a, b in zip(p, p[1:]))

    @pytest.mark.parametrize('q', [0.001, 0.005, 0.01])
    def test_line_of_sight_helps_below_mean(self, q):
        rayleigh = channel.analytic_conn_prob(RAYLEIGH, 8.0, q, self.budget)
        assert channel.analytic_conn_prob(rician(4.0), 8.0, q, self.budget) >= rayleigh

    def test_non_positive_threshold(self):
        with pytest.raises(InvalidArgumentError):
            channel.analytic_conn_prob(RAYLEIGH, 8.0, 0.0, self.budget)

    @pytest.mark.slow
    @pytest.mark.parametrize('model', [RAYLEIGH, rician(4.0)], ids=['rayleigh', 'rician'])
    def test_matches_sampled_fading(self, rng, model):
        n = 100_000
        q = 0.01
        expected = channel.analytic_conn_prob(model, 8.0, q, self.budget)
        snr = channel.sample_power_gain(model, rng, n) * channel.mean_snr(8.0, self.budget)
        assert abs(np.mean(snr >= q) - expected) < 4 * math.sqrt(expected * (1 - expected) / n)
